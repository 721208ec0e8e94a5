//! Birkhoff sums of random Lebesgue-distributed orbits, CLT diagnostics and
//! Green–Kubo variances.

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::erf::erfc;

use crate::blaschke::BlaschkeMap;
use crate::circle::CirclePoint;
use crate::error::{Error, Result};
use crate::observable::Observable;
use crate::par;
use crate::transfer::{frequency, Grid};

const GK_GRID: usize = 128;
const STEP_BUDGET: f64 = 1e9;

#[derive(Debug, Clone, PartialEq)]
pub struct BirkhoffSample {
    pub n: usize,
    /// `S_n h(x_i) / √n` for sample points `x_i`, in sample order.
    pub values: Vec<f64>,
    pub seed: u64,
    pub observable: String,
    /// Whether the exact digit-stream iterator was used.
    pub exact: bool,
}

/// Green–Kubo correlation series of a centered observable.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenKubo {
    pub sigma2: f64,
    /// `C_k = ∫ h · h∘F^{∘k} dm` for `k = 0..=k_max`.
    pub correlations: Vec<f64>,
    /// Geometric tail estimate `2|C_K| r / (1 - r)` from the last ratio `r`.
    pub tail: f64,
}

/// `σ²(h) = C_0 + 2 Σ_{k=1}^{k_max} C_k` for `h - ∫h dm`.
///
/// The correlations are computed as `∫ h · L^k h dm` by applying the
/// Aleksandrov–Clark transfer operator pointwise on a 128-point grid, reading
/// off-grid values from the trigonometric interpolant.
pub fn green_kubo(map: &BlaschkeMap, h: &Observable, k_max: usize) -> Result<GreenKubo> {
    if k_max == 0 || k_max > 64 {
        return Err(Error::InvalidInput("k_max must lie in 1..=64".into()));
    }
    let h = h.centered();
    let grid = Grid::new(GK_GRID)?;
    let n = GK_GRID;
    let base: Vec<f64> = (0..n).map(|j| h.eval(grid.angle(j))).collect();
    // for every node: preimage weights and the interpolation table e^{i f y}
    let mut tables: Vec<Vec<(f64, Vec<Complex64>)>> = Vec::with_capacity(n);
    for j in 0..n {
        let pre = map.boundary_preimages(CirclePoint::new(grid.angle(j)))?;
        tables.push(
            pre.into_iter()
                .map(|y| {
                    let y = y.angle();
                    let row = (0..n).map(|k| Complex64::from_polar(1.0, frequency(k, n) as f64 * y)).collect();
                    (1.0 / map.boundary_derivative(y), row)
                })
                .collect(),
        );
    }
    let correlate = |u: &[f64]| -> f64 { u.iter().zip(&base).map(|(a, b)| a * b).sum::<f64>() / n as f64 };
    let mut u = base.clone();
    let mut correlations = vec![correlate(&u)];
    for _ in 0..k_max {
        let coeffs = grid.coefficients(&u.iter().map(|v| Complex64::new(*v, 0.0)).collect::<Vec<_>>());
        u = tables
            .iter()
            .map(|pre| {
                pre.iter()
                    .map(|(w, row)| w * row.iter().zip(&coeffs).map(|(e, c)| e * c).sum::<Complex64>().re)
                    .sum()
            })
            .collect();
        correlations.push(correlate(&u));
    }
    let c0 = correlations[0];
    let last = correlations[k_max].abs();
    let prev = correlations[k_max - 1].abs();
    let negligible = last <= 1e-13 * c0.abs().max(1e-300);
    let ratio = if prev > 0.0 { last / prev } else { 0.0 };
    if !negligible && k_max >= 2 && ratio >= 0.999 {
        return Err(Error::NonDecaying { ratio });
    }
    let tail = if negligible || ratio >= 1.0 { 0.0 } else { 2.0 * last * ratio / (1.0 - ratio) };
    let sigma2 = c0 + 2.0 * correlations[1..].iter().sum::<f64>();
    Ok(GreenKubo { sigma2, correlations, tail })
}

pub fn green_kubo_variance(map: &BlaschkeMap, h: &Observable, k_max: usize) -> Result<f64> {
    Ok(green_kubo(map, h, k_max)?.sigma2)
}

/// Exact orbit of `z ↦ z^d` for a Lebesgue-random point: the angle
/// `2π·0.x_1x_2…` in base `d` is a stream of independent uniform digits, and
/// one step shifts the stream by one digit. A window of the leading digits is
/// kept in a `u128`; every step drops the top digit and appends a fresh one,
/// so the state is always an exact prefix of the point's expansion.
struct DigitStream {
    d: u128,
    window: u128,
    top: u128,
    scale: f64,
    shift: Option<u32>,
    bits: u64,
    bits_left: u32,
}

impl DigitStream {
    fn new<R: RngCore>(d: usize, rng: &mut R) -> Self {
        let d128 = d as u128;
        let mut len = 0u32;
        let mut full: u128 = 1;
        while let Some(next) = full.checked_mul(d128) {
            if next > (1u128 << 126) {
                break;
            }
            full = next;
            len += 1;
        }
        let top = full / d128;
        let shift = if d.is_power_of_two() { Some(d.trailing_zeros()) } else { None };
        let mut s = DigitStream { d: d128, window: 0, top, scale: 1.0 / full as f64, shift, bits: 0, bits_left: 0 };
        for _ in 0..len {
            let digit = s.digit(rng);
            s.window = s.window * d128 + digit;
        }
        s
    }

    fn digit<R: RngCore>(&mut self, rng: &mut R) -> u128 {
        match self.shift {
            Some(b) => {
                if self.bits_left < b {
                    self.bits = rng.next_u64();
                    self.bits_left = 64;
                }
                let digit = self.bits & ((1u64 << b) - 1);
                self.bits >>= b;
                self.bits_left -= b;
                digit as u128
            }
            None => rng.random_range(0..self.d as u64) as u128,
        }
    }

    fn angle(&self) -> f64 {
        std::f64::consts::TAU * (self.window as f64 * self.scale)
    }

    fn step<R: RngCore>(&mut self, rng: &mut R) {
        let digit = self.digit(rng);
        self.window = (self.window % self.top) * self.d + digit;
    }
}

fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// `S_n h / √n` over `samples` independent Lebesgue-random starting points.
/// Sample `i` draws from stream `i` of a ChaCha8 generator seeded with
/// `seed`, so results do not depend on how samples are scheduled.
pub fn birkhoff_samples(map: &BlaschkeMap, h: &Observable, n: usize, samples: usize, seed: u64) -> Result<BirkhoffSample> {
    if n == 0 || samples == 0 {
        return Err(Error::InvalidInput("n and samples must be positive".into()));
    }
    let steps = n as f64 * samples as f64;
    if steps > STEP_BUDGET {
        return Err(Error::BudgetExceeded { predicted: steps, budget: STEP_BUDGET });
    }
    let hc = h.centered();
    let exact = map.is_monomial() && map.rotation() == 0.0 && map.degree() >= 2;
    let norm = 1.0 / (n as f64).sqrt();
    let values = par::map_range(samples, |i| {
        let mut rng = sample_rng(seed, i);
        let mut total = 0.0;
        if exact {
            let mut stream = DigitStream::new(map.degree(), &mut rng);
            for _ in 0..n {
                total += hc.eval(stream.angle());
                stream.step(&mut rng);
            }
        } else {
            let mut z = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
            for _ in 0..n {
                total += hc.eval_unit(z);
                z = map.eval(z);
                z /= z.norm();
            }
        }
        total * norm
    });
    Ok(BirkhoffSample { n, values, seed, observable: h.to_string(), exact })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CltDiagnostics {
    pub ks_stat: f64,
    pub var_ratio: f64,
    pub sample_mean: f64,
    pub sample_variance: f64,
}

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Kolmogorov–Smirnov distance of `values / σ` to `N(0, 1)` and the ratio of
/// the sample variance to `σ²`.
pub fn clt_diagnostics(sample: &BirkhoffSample, sigma2: f64) -> Result<CltDiagnostics> {
    if !(sigma2 >= 1e-12) {
        return Err(Error::DegenerateVariance { sigma2 });
    }
    let m = sample.values.len();
    if m < 2 {
        return Err(Error::InvalidInput("need at least two samples".into()));
    }
    let mean = sample.values.iter().sum::<f64>() / m as f64;
    let variance = sample.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
    let sigma = sigma2.sqrt();
    let mut z: Vec<f64> = sample.values.iter().map(|v| v / sigma).collect();
    z.sort_by(f64::total_cmp);
    let ks = z
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let f = normal_cdf(*x);
            ((i + 1) as f64 / m as f64 - f).max(f - i as f64 / m as f64)
        })
        .fold(0.0, f64::max);
    Ok(CltDiagnostics { ks_stat: ks, var_ratio: variance / sigma2, sample_mean: mean, sample_variance: variance })
}
