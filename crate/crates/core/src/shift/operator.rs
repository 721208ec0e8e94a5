use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, SpectralData};

use super::ShiftModel;

/// Matrix of `L_{sψ,p}` on depth-`k` cylinder indicators.
#[derive(Debug, Clone)]
pub struct CylinderMatrix {
    pub s: Complex64,
    pub p: f64,
    pub matrix: CMatrix,
}

fn weight(psi: f64, s: Complex64, p: f64) -> Complex64 {
    let factor = if p == 0.0 {
        1.0
    } else if p.fract() == 0.0 {
        psi.powi(p as i32)
    } else {
        psi.abs().powf(p)
    };
    (s * psi).exp() * factor
}

/// `(L g)(u) = Σ_v ψ^p e^{sψ}(v) g(v)` over the predecessors `v` of `u`.
/// For non-integer `p` the factor is `|ψ|^p`.
pub fn cylinder_operator(model: &ShiftModel, s: Complex64, p: f64) -> CylinderMatrix {
    let n = model.words().len();
    let mut matrix = CMatrix::zeros(n);
    for u in 0..n {
        for &v in model.predecessors(u) {
            matrix.set(u, v, weight(model.psi()[v], s, p));
        }
    }
    CylinderMatrix { s, p, matrix }
}

fn ones(n: usize) -> Vec<Complex64> {
    vec![Complex64::new(1.0, 0.0); n]
}

/// Leading eigen-data of `L_{sψ}`. `conformal[v]` is the conformal mass of
/// the cylinder `[v]` and `rho[v]` the eigenfunction on it.
pub fn spectral_data(model: &ShiftModel, s: Complex64) -> Result<SpectralData> {
    if s.re < 1.0 - 1e-12 {
        return Err(Error::InvalidInput("spectral data needs Re s >= 1".into()));
    }
    let m = cylinder_operator(model, s, 0.0).matrix;
    linalg::leading_eigen(&m, &ones(m.dim()), 1e-14)
}

/// Spectral radius of `L_{sψ}`; falls back to logarithmic growth when the
/// peripheral spectrum holds several eigenvalues.
pub fn spectral_radius(model: &ShiftModel, s: Complex64) -> f64 {
    let m = cylinder_operator(model, s, 0.0).matrix;
    match linalg::leading_eigen(&m, &ones(m.dim()), 1e-13) {
        Ok(data) if data.gap < 1.0 - 1e-6 => data.lambda.norm(),
        _ => linalg::spectral_radius(&m, 20000),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summability {
    pub inf_sum: f64,
    pub sup_sum: f64,
    /// `∫ |ψ|^p dm_{sψ}`.
    pub integral: f64,
    /// `sup_sum / integral`.
    pub ratio: f64,
}

/// Sums over the letters of `inf` and `sup` of `|ψ^p e^{sψ}|` on each
/// first-letter cylinder, and the integral of `|ψ|^p` against the conformal
/// measure of `sψ`.
pub fn summability_stats(model: &ShiftModel, s: f64, p: f64) -> Result<Summability> {
    let m = model.system().alphabet_size();
    let mut inf = vec![f64::INFINITY; m];
    let mut sup = vec![0.0f64; m];
    for (w, psi) in model.words().iter().zip(model.psi()) {
        let value = psi.abs().powf(p) * (s * psi).exp();
        let a = w[0] - 1;
        inf[a] = inf[a].min(value);
        sup[a] = sup[a].max(value);
    }
    let inf_sum: f64 = inf.iter().filter(|v| v.is_finite()).sum();
    let sup_sum: f64 = sup.iter().sum();
    let data = spectral_data(model, Complex64::new(s, 0.0))?;
    let integral: f64 = data
        .conformal
        .iter()
        .zip(model.psi())
        .map(|(l, psi)| l.re * psi.abs().powf(p))
        .sum();
    Ok(Summability { inf_sum, sup_sum, integral, ratio: sup_sum / integral })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftPressure {
    /// `P'(1)` and `P''(1)` by one-sided differences along real `s ≥ 1`.
    pub p1: f64,
    pub p2: f64,
    /// `∫ ψ dμ_1`.
    pub mean: f64,
    /// Green–Kubo variance of `ψ` under `μ_1`, from the exact matrix.
    pub sigma2_gk: f64,
}

fn log_lambda(model: &ShiftModel, s: f64) -> Result<f64> {
    let data = spectral_data(model, Complex64::new(s, 0.0))?;
    Ok(data.lambda.re.ln())
}

pub fn pressure_derivs_shift(model: &ShiftModel) -> Result<ShiftPressure> {
    for p in [1.0, 2.0] {
        let stats = summability_stats(model, 1.0, p)?;
        if !stats.sup_sum.is_finite() || !stats.integral.is_finite() {
            return Err(Error::SummabilityViolated(format!("(1, {p})-sums diverge")));
        }
    }
    let h1 = 1e-3;
    let f: Vec<f64> = (0..5).map(|j| log_lambda(model, 1.0 + j as f64 * h1)).collect::<Result<_>>()?;
    let p1 = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h1);
    let h2 = 1e-2;
    let g: Vec<f64> = (0..6).map(|j| log_lambda(model, 1.0 + j as f64 * h2)).collect::<Result<_>>()?;
    let p2 = (45.0 * g[0] - 154.0 * g[1] + 214.0 * g[2] - 156.0 * g[3] + 61.0 * g[4] - 10.0 * g[5]) / (12.0 * h2 * h2);

    let data = spectral_data(model, Complex64::new(1.0, 0.0))?;
    let mu: Vec<f64> = data.conformal.iter().zip(&data.rho).map(|(l, r)| (l * r).re).collect();
    let mean: f64 = mu.iter().zip(model.psi()).map(|(m, p)| m * p).sum();
    let centered: Vec<f64> = model.psi().iter().map(|p| p - mean).collect();
    let mut sigma2: f64 = mu.iter().zip(&centered).map(|(m, c)| m * c * c).sum();
    let matrix = cylinder_operator(model, Complex64::new(1.0, 0.0), 0.0).matrix;
    let inv = 1.0 / data.lambda.re;
    let mut v: Vec<Complex64> = data.rho.iter().zip(&centered).map(|(r, c)| r * c).collect();
    let mut previous = f64::INFINITY;
    for _ in 0..100_000 {
        v = matrix.apply(&v).into_iter().map(|z| z * inv).collect();
        let term: f64 = data
            .conformal
            .iter()
            .zip(&centered)
            .zip(&v)
            .map(|((l, c), x)| (l * c * x).re)
            .sum();
        sigma2 += 2.0 * term;
        if term.abs() < 1e-17 && previous.abs() < 1e-17 {
            break;
        }
        previous = term;
    }
    Ok(ShiftPressure { p1, p2, mean, sigma2_gk: sigma2 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EtaReport {
    /// Partial sums of `L_s^n f_s (ξ)`.
    pub series: Complex64,
    /// `(1 - λ_s)^{-1} ρ_s(ξ) m_s(f_s) + Σ Δ_s^n (f_s - R_s f_s)(ξ)`.
    pub resolvent: Complex64,
    pub terms: usize,
}

const ETA_MAX_TERMS: usize = 10_000_000;

/// Poincaré series `η(s) = Σ_{n≥0} L_s^n(e^{sφ})(ξ)` for a locally constant
/// offset `φ` (zero when absent), computed two ways.
pub fn poincare_eta(model: &ShiftModel, phi: Option<&[f64]>, s: Complex64, xi: &[usize]) -> Result<EtaReport> {
    let n = model.words().len();
    let at = model.cylinder_of(xi)?;
    let f: Vec<Complex64> = match phi {
        Some(phi) if phi.len() != n => {
            return Err(Error::InvalidInput(format!("offset needs {n} cylinder values")));
        }
        Some(phi) => phi.iter().map(|v| (s * v).exp()).collect(),
        None => ones(n),
    };
    let divergent = || Error::DivergentSeries { s: s.to_string() };
    if s.re < 1.0 - 1e-12 {
        return Err(divergent());
    }
    let matrix = cylinder_operator(model, s, 0.0).matrix;
    let data = linalg::leading_eigen(&matrix, &ones(n), 1e-14).map_err(|_| divergent())?;
    let radius = data.lambda.norm();
    if radius >= 1.0 - 1e-12 || data.gap >= 1.0 - 1e-9 {
        return Err(divergent());
    }

    let mass = linalg::dot(&data.conformal, &f);
    let projected = data.rho[at] * mass;
    let system = CMatrix::from_fn(n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        Complex64::new(id, 0.0) - (matrix.get(i, j) - data.lambda * data.rho[i] * data.conformal[j])
    });
    let complement: Vec<Complex64> = f.iter().zip(&data.rho).map(|(x, r)| x - r * mass).collect();
    let remainder = linalg::solve(&system, &complement)?;
    let resolvent = projected / (1.0 - data.lambda) + remainder[at];

    let mut v = f.clone();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut carry = Complex64::new(0.0, 0.0);
    let mut terms = 0;
    loop {
        let term = v[at];
        // compensated summation
        let y = term - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
        terms += 1;
        let size = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if size * radius / (1.0 - radius) < 1e-13 {
            break;
        }
        if terms >= ETA_MAX_TERMS {
            return Err(Error::NoConvergence { iterations: terms });
        }
        v = matrix.apply(&v);
    }
    let scale = resolvent.norm().max(1.0);
    if (sum - resolvent).norm() > 1e-9 * scale {
        return Err(Error::NoConvergence { iterations: terms });
    }
    Ok(EtaReport { series: sum, resolvent, terms })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolderFit {
    pub constant: f64,
    pub exponent: f64,
    /// `(|s - t|, ‖L_{s,q} - L_{t,q}‖)`.
    pub samples: Vec<(f64, f64)>,
}

/// Least-squares fit of `log ‖L_{s,q} - L_{t,q}‖` against `log |s - t|` for
/// `t = s_0 + i 2^{-j}` inside the given radius; the norm is the operator
/// norm induced by the supremum norm on cylinder functions.
pub fn holder_modulus_in_s(model: &ShiftModel, q: f64, s0: Complex64, radius: f64) -> Result<HolderFit> {
    if !(q >= 0.0) || !(radius > 0.0) {
        return Err(Error::InvalidInput("need q >= 0 and a positive radius".into()));
    }
    let base = cylinder_operator(model, s0, q).matrix;
    let mut samples = Vec::new();
    for j in 1..=24 {
        let delta = 0.5f64.powi(j);
        if delta > radius {
            continue;
        }
        let other = cylinder_operator(model, s0 + Complex64::new(0.0, delta), q).matrix;
        let diff = base.sub(&other).inf_norm();
        if diff > 0.0 && diff.is_finite() {
            samples.push((delta, diff));
        }
        if samples.len() == 12 {
            break;
        }
    }
    if samples.len() < 2 {
        return Err(Error::InvalidInput("radius leaves fewer than two sample distances".into()));
    }
    let k = samples.len() as f64;
    let (sx, sy) = samples.iter().fold((0.0, 0.0), |(a, b), (d, v)| (a + d.ln(), b + v.ln()));
    let (mx, my) = (sx / k, sy / k);
    let (sxy, sxx) = samples.iter().fold((0.0, 0.0), |(a, b), (d, v)| {
        let x = d.ln() - mx;
        (a + x * (v.ln() - my), b + x * x)
    });
    let exponent = sxy / sxx;
    let constant = (my - exponent * mx).exp();
    Ok(HolderFit { constant, exponent, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift::{PotentialSpec, SymbolicSystem};
    use std::f64::consts::LN_2;

    fn two_shift() -> ShiftModel {
        ShiftModel::new(SymbolicSystem::full(2).unwrap(), PotentialSpec::letters(&[-LN_2, -LN_2]).unwrap()).unwrap()
    }

    fn bernoulli() -> ShiftModel {
        let values = [-(2f64.ln()), -(3f64.ln()), -(6f64.ln())];
        ShiftModel::new(SymbolicSystem::full(3).unwrap(), PotentialSpec::letters(&values).unwrap()).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_potential_operators() {
        let m = two_shift();
        let l = cylinder_operator(&m, c(1.0, 0.0), 0.0).matrix;
        for i in 0..2 {
            for j in 0..2 {
                assert!((l.get(i, j) - c(0.5, 0.0)).norm() < 1e-15);
            }
        }
        assert!((spectral_data(&m, c(1.0, 0.0)).unwrap().lambda - c(1.0, 0.0)).norm() < 1e-14);
        assert!((spectral_data(&m, c(2.0, 0.0)).unwrap().lambda - c(0.5, 0.0)).norm() < 1e-14);
        let l1 = cylinder_operator(&m, c(1.0, 0.0), 1.0).matrix;
        let ones = ones(2);
        let image = l1.apply(&ones);
        assert!(image.iter().all(|z| (z - c(-LN_2, 0.0)).norm() < 1e-15));
        let a = 0.7;
        let s = spectral_data(&m, c(1.0, a)).unwrap();
        let want = Complex64::from_polar(1.0, -a * LN_2);
        assert!((s.lambda - want).norm() < 1e-12);
    }

    #[test]
    fn bernoulli_radius_off_the_real_axis() {
        let r = spectral_radius(&bernoulli(), c(1.0, 1.0));
        assert!(r < 0.99, "{r}");
        let lattice = spectral_radius(&two_shift(), c(1.0, std::f64::consts::TAU / LN_2));
        assert!((lattice - 1.0).abs() < 1e-9);
    }

    #[test]
    fn summability_examples() {
        let b = bernoulli();
        let s = summability_stats(&b, 1.0, 1.0).unwrap();
        let want = 2f64.ln() / 2.0 + 3f64.ln() / 3.0 + 6f64.ln() / 6.0;
        assert!((s.sup_sum - want).abs() < 1e-14);
        let s = summability_stats(&b, 1.0, 0.0).unwrap();
        for v in [s.inf_sum, s.sup_sum, s.integral] {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pressure_derivatives() {
        let r = pressure_derivs_shift(&two_shift()).unwrap();
        assert!((r.p1 + LN_2).abs() < 1e-10);
        assert!(r.p2.abs() < 1e-6);
        assert!(r.sigma2_gk.abs() < 1e-14);
        let r = pressure_derivs_shift(&bernoulli()).unwrap();
        let want = -(2f64.ln() / 2.0 + 3f64.ln() / 3.0 + 6f64.ln() / 6.0);
        assert!((r.mean - want).abs() < 1e-12);
        assert!((r.p1 - r.mean).abs() < 1e-8);
        let second = (2f64.ln().powi(2) / 2.0 + 3f64.ln().powi(2) / 3.0 + 6f64.ln().powi(2) / 6.0) - want * want;
        assert!((r.sigma2_gk - second).abs() < 1e-12);
        assert!((r.p2 - second).abs() < 1e-4, "{} {second}", r.p2);
    }

    #[test]
    fn eta_two_ways() {
        let m = two_shift();
        let e = poincare_eta(&m, None, c(2.0, 0.0), &[1]).unwrap();
        assert!((e.resolvent - c(2.0, 0.0)).norm() < 1e-12);
        assert!((e.series - c(2.0, 0.0)).norm() < 1e-12);
        let b = bernoulli();
        let e = poincare_eta(&b, None, c(1.5, 0.0), &[2, 1]).unwrap();
        assert!((e.series - e.resolvent).norm() < 1e-9);
        assert!(matches!(poincare_eta(&m, None, c(1.0, 0.0), &[1]), Err(Error::DivergentSeries { .. })));
    }

    #[test]
    fn holder_fit_for_constant_potential() {
        let fit = holder_modulus_in_s(&two_shift(), 0.0, c(1.0, 0.0), 0.5).unwrap();
        assert!(fit.exponent >= 0.99, "{}", fit.exponent);
    }
}
