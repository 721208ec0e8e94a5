//! Weighted transfer operators of finite Blaschke products, discretized by
//! Fourier collocation.
//!
//! For a weight `γ = e^{s·g} |F'|^{-s}` the operator is
//! `(L u)(α) = Σ_{F(y)=α} γ(y) u(y)`, which for `s = 1, g = 0` is the
//! Aleksandrov–Clark form `∫ u dμ_α`. The matrix acts on Fourier coefficient
//! vectors of length `N` in FFT order (frequencies `0, 1, ..., N/2-1, -N/2,
//! ..., -1`): column `n` is the discrete Fourier transform of `L e_n` sampled
//! at the collocation angles `α_j = 2πj/N`.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::blaschke::BlaschkeMap;
use crate::circle::CirclePoint;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, SpectralData};
use crate::observable::Observable;
use crate::par;
use crate::stochastic;

/// Gap ratio above which the perturbed operator is considered gapless.
pub const GAP_LIMIT: f64 = 0.95;
const CHOP: f64 = 1e-14;

/// Frequency of FFT index `k` on an `n`-point grid.
pub fn frequency(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// FFT index of frequency `f`, if it is represented on an `n`-point grid.
pub fn index_of(f: i64, n: usize) -> Option<usize> {
    let half = (n / 2) as i64;
    if f >= -half && f < half {
        Some(f.rem_euclid(n as i64) as usize)
    } else {
        None
    }
}

#[derive(Clone)]
pub struct Grid {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid").field("n", &self.n).finish()
    }
}

impl Grid {
    pub fn new(n: usize) -> Result<Self> {
        if !n.is_power_of_two() || !(32..=4096).contains(&n) {
            return Err(Error::InvalidInput(format!("grid size {n} must be a power of two in 32..=4096")));
        }
        let mut planner = FftPlanner::new();
        Ok(Grid { n, forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn angle(&self, j: usize) -> f64 {
        TAU * j as f64 / self.n as f64
    }

    /// Discrete Fourier coefficients of grid values.
    pub fn coefficients(&self, values: &[Complex64]) -> Vec<Complex64> {
        let mut buf = values.to_vec();
        self.forward.process(&mut buf);
        let k = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|z| *z *= k);
        buf
    }

    /// Grid values of a coefficient vector.
    pub fn values(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut buf = coeffs.to_vec();
        self.inverse.process(&mut buf);
        buf
    }

    /// Evaluate the trigonometric interpolant of `coeffs` at an arbitrary angle.
    pub fn interpolate(&self, coeffs: &[Complex64], angle: f64) -> Complex64 {
        coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * Complex64::from_polar(1.0, frequency(k, self.n) as f64 * angle))
            .sum()
    }

    /// Quadrature weights `w_j` with `ℓ · ĝ = Σ_j w_j g(α_j)` for a functional
    /// given by its Fourier moments `ℓ_k = ℓ(e_k)`.
    pub fn functional_weights(&self, moments: &[Complex64]) -> Vec<Complex64> {
        self.coefficients(moments)
    }
}

/// Discretized transfer operator together with its parameters.
#[derive(Clone)]
pub struct OperatorMatrix {
    pub matrix: CMatrix,
    pub grid: Grid,
    pub s: Complex64,
    pub descriptor: String,
}

impl std::fmt::Debug for OperatorMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OperatorMatrix")
            .field("n", &self.grid.n)
            .field("s", &self.s)
            .field("descriptor", &self.descriptor)
            .finish()
    }
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.grid.n
    }

    /// Coefficient vector of the constant function 1.
    pub fn one(&self) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); self.grid.n];
        v[0] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn apply(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        self.matrix.apply(coeffs)
    }
}

/// Assemble `L` for the weight `e^{s·g} |F'|^{-s}` on an `n`-mode grid.
pub fn assemble_operator(map: &BlaschkeMap, s: Complex64, g: Option<&Observable>, n: usize) -> Result<OperatorMatrix> {
    let grid = Grid::new(n)?;
    // preimages and weights at every collocation angle
    let nodes: Vec<Result<Vec<(f64, Complex64)>>> = par::map_range(n, |j| {
        let pre = map.boundary_preimages(CirclePoint::new(grid.angle(j)))?;
        Ok(pre
            .into_iter()
            .map(|y| {
                let y = y.angle();
                let exponent = g.map_or(0.0, |g| g.eval(y)) - map.boundary_derivative(y).ln();
                (y, (s * exponent).exp())
            })
            .collect())
    });
    let nodes: Vec<Vec<(f64, Complex64)>> = nodes.into_iter().collect::<Result<_>>()?;
    let columns: Vec<Vec<Complex64>> = par::map_range(n, |col| {
        let f = frequency(col, n) as f64;
        let samples: Vec<Complex64> = nodes
            .iter()
            .map(|pre| pre.iter().map(|(y, w)| w * Complex64::from_polar(1.0, f * y)).sum())
            .collect();
        grid.coefficients(&samples)
    });
    let mut matrix = CMatrix::zeros(n);
    for (col, c) in columns.iter().enumerate() {
        for (row, v) in c.iter().enumerate() {
            matrix.set(row, col, *v);
        }
    }
    matrix.chop(CHOP);
    let descriptor = format!(
        "degree={} s={} g={}",
        map.degree(),
        s,
        g.map_or("0".to_string(), |g| g.to_string())
    );
    Ok(OperatorMatrix { matrix, grid, s, descriptor })
}

/// Leading eigen-data; `conformal` holds the Fourier moments `m(e_k)`.
pub fn leading_eigen(op: &OperatorMatrix, tol: f64) -> Result<SpectralData> {
    if tol < 1e-12 {
        return Err(Error::InvalidInput("tolerance must be >= 1e-12".into()));
    }
    linalg::leading_eigen(&op.matrix, &op.one(), tol)
}

pub fn subleading_modulus(op: &OperatorMatrix, s: &SpectralData) -> Result<f64> {
    linalg::subleading_modulus(&op.matrix, s, 1e-9)
}

/// Conformal and equilibrium data for `γ = e^g |F'|^{-1}`.
#[derive(Debug, Clone)]
pub struct Equilibrium {
    pub spectral: SpectralData,
    /// Grid quadrature weights of the conformal measure (real part; the
    /// imaginary part vanishes for real potentials up to rounding).
    pub conformal_weights: Vec<f64>,
    /// `ρ` at the collocation angles.
    pub rho_grid: Vec<f64>,
    grid: Grid,
}

impl Equilibrium {
    pub fn grid_size(&self) -> usize {
        self.grid.n
    }

    pub fn angle(&self, j: usize) -> f64 {
        self.grid.angle(j)
    }

    /// `∫ u dm_γ`.
    pub fn conformal_integral<F: Fn(f64) -> Complex64>(&self, u: F) -> Complex64 {
        self.conformal_weights
            .iter()
            .enumerate()
            .map(|(j, w)| u(self.grid.angle(j)) * *w)
            .sum()
    }

    /// `∫ u dμ_γ` with `μ_γ = ρ_γ m_γ`.
    pub fn equilibrium_integral<F: Fn(f64) -> Complex64>(&self, u: F) -> Complex64 {
        self.conformal_weights
            .iter()
            .zip(&self.rho_grid)
            .enumerate()
            .map(|(j, (w, r))| u(self.grid.angle(j)) * (*w * *r))
            .sum()
    }

    /// `max_{0<|k|≤kmax} |∫ e_k∘F dμ - ∫ e_k dμ|`.
    pub fn invariance_residual(&self, map: &BlaschkeMap, kmax: i64) -> f64 {
        let mut worst: f64 = 0.0;
        for k in (-kmax..=kmax).filter(|k| *k != 0) {
            let pulled = self.equilibrium_integral(|t| Complex64::from_polar(1.0, k as f64 * map.lift(t)));
            let plain = self.equilibrium_integral(|t| Complex64::from_polar(1.0, k as f64 * t));
            worst = worst.max((pulled - plain).norm());
        }
        worst
    }
}

pub fn conformal_equilibrium(map: &BlaschkeMap, g: &Observable, n: usize) -> Result<Equilibrium> {
    let op = assemble_operator(map, Complex64::new(1.0, 0.0), Some(g), n)?;
    let spectral = linalg::leading_eigen(&op.matrix, &op.one(), 1e-13)?;
    if spectral.gap > GAP_LIMIT {
        return Err(Error::GapLost { ratio: spectral.gap, limit: GAP_LIMIT });
    }
    let weights = op.grid.functional_weights(&spectral.conformal);
    let rho = op.grid.values(&spectral.rho);
    Ok(Equilibrium {
        conformal_weights: weights.iter().map(|z| z.re).collect(),
        rho_grid: rho.iter().map(|z| z.re).collect(),
        spectral,
        grid: op.grid,
    })
}

/// `P(t) = log λ(L_{-log|F'| + t·g})` and the gap ratio at that node.
pub fn pressure(map: &BlaschkeMap, g: &Observable, t: f64, n: usize) -> Result<(f64, f64)> {
    let op = assemble_operator(map, Complex64::new(1.0, 0.0), Some(&g.scaled(t)), n)?;
    let s = linalg::leading_eigen(&op.matrix, &op.one(), 1e-14)?;
    Ok((s.lambda.re.ln(), s.gap))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PressureReport {
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
    /// `∫ g dm`, the predicted first derivative.
    pub mean: f64,
    /// Green–Kubo variance of `g`, the predicted second derivative.
    pub sigma2_gk: f64,
    /// Largest subleading ratio seen on the stencil.
    pub max_gap: f64,
}

/// `P(0), P'(0), P''(0)` by fourth-order central differences on the stencil
/// `t ∈ {0, ±h, ±2h}`.
pub fn pressure_and_derivs(map: &BlaschkeMap, g: &Observable, h: f64, n: usize) -> Result<PressureReport> {
    if !(1e-4..=1e-2).contains(&h) {
        return Err(Error::InvalidInput("step h must lie in [1e-4, 1e-2]".into()));
    }
    let nodes = [-2.0 * h, -h, 0.0, h, 2.0 * h];
    let mut p = [0.0; 5];
    let mut max_gap: f64 = 0.0;
    for (slot, t) in p.iter_mut().zip(nodes) {
        let (value, gap) = pressure(map, g, t, n)?;
        if gap > GAP_LIMIT {
            return Err(Error::GapLost { ratio: gap, limit: GAP_LIMIT });
        }
        max_gap = max_gap.max(gap);
        *slot = value;
    }
    let p1 = (p[0] - 8.0 * p[1] + 8.0 * p[3] - p[4]) / (12.0 * h);
    let p2 = (-p[0] + 16.0 * p[1] - 30.0 * p[2] + 16.0 * p[3] - p[4]) / (12.0 * h * h);
    let sigma2_gk = stochastic::green_kubo_variance(map, g, 64)?;
    Ok(PressureReport { p0: p[2], p1, p2, mean: g.mean(), sigma2_gk, max_gap })
}

/// Circle Poincaré series `η_x(s) = Σ_n (L_s^n 1)(x)` for real `s > 1`, by
/// solving `(I - L_s) u = 1` in the Fourier basis.
pub fn poincare_series(map: &BlaschkeMap, x: CirclePoint, s: f64, n: usize) -> Result<f64> {
    if !(s > 1.0) {
        return Err(Error::DivergentSeries { s: s.to_string() });
    }
    let op = assemble_operator(map, Complex64::new(s, 0.0), None, n)?;
    let system = CMatrix::from_fn(n, |i, j| {
        let id = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
        id - op.matrix.get(i, j)
    });
    let u = linalg::solve(&system, &op.one())?;
    Ok(op.grid.interpolate(&u, x.angle()).re)
}
