//! Dense complex matrices and the dominant-eigenvalue machinery shared by the
//! circle and symbolic transfer operators.
//!
//! The leading eigenpair comes from power iteration on the matrix (right
//! eigenvector) and on its transpose (left eigenvector, i.e. the conformal
//! functional). The subleading modulus comes from two-dimensional subspace
//! iteration on the deflated operator `M - λ ρ ⊗ ℓ`, with Rayleigh–Ritz
//! extraction so that complex-conjugate pairs are handled.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 100_000;
const START_SEED: u64 = 0x5eed_0f1a;
const STALL: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(n: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        CMatrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// `M x`.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `x M` (row vector times matrix, no conjugation).
    pub fn apply_left(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.n];
        for (i, xi) in x.iter().enumerate() {
            if xi.norm_sqr() == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += xi * a;
            }
        }
        out
    }

    /// Zero out entries below `rel · max|entry|`: roundoff residue of exact
    /// cancellations.
    pub fn chop(&mut self, rel: f64) {
        let max = self.data.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let cut = rel * max;
        for z in self.data.iter_mut() {
            if z.norm() < cut {
                *z = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// Induced `ℓ∞` norm (maximum absolute row sum).
    pub fn inf_norm(&self) -> f64 {
        (0..self.n).map(|i| self.row(i).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        CMatrix { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }
}

pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn cdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm2(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn scale(a: &mut [Complex64], k: Complex64) {
    for z in a.iter_mut() {
        *z *= k;
    }
}

/// Leading eigen-data of a transfer matrix.
///
/// `conformal` is the left eigenvector `ℓ`, read as a linear functional on
/// coefficient vectors: the conformal measure of a function with coefficients
/// `g` is `ℓ · g`. Normalization: `ℓ · one = 1` and `ℓ · rho = 1`, where
/// `one` represents the constant function.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pub lambda: Complex64,
    pub rho: Vec<Complex64>,
    pub conformal: Vec<Complex64>,
    /// `|λ₂| / |λ|`.
    pub gap: f64,
    /// `‖Mρ - λρ‖∞ / ‖ρ‖∞`.
    pub residual: f64,
    pub iterations: usize,
}

fn start_vector(one: &[Complex64], salt: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED ^ salt);
    let mut v: Vec<Complex64> = one
        .iter()
        .map(|z| z + Complex64::new(1e-3 * rng.random_range(-1.0..1.0), 1e-3 * rng.random_range(-1.0..1.0)))
        .collect();
    let n = norm2(&v);
    scale(&mut v, Complex64::new(1.0 / n, 0.0));
    v
}

/// Power iteration; `left` selects the transposed operator.
fn dominant(m: &CMatrix, one: &[Complex64], tol: f64, left: bool) -> Result<(Complex64, Vec<Complex64>, usize)> {
    let mut v = start_vector(one, left as u64);
    let mut previous = Complex64::new(f64::NAN, 0.0);
    let mut settled = 0;
    let mut best_drift = f64::INFINITY;
    for it in 1..=MAX_ITERATIONS {
        let w = if left { m.apply_left(&v) } else { m.apply(&v) };
        let lambda = cdot(&v, &w) / cdot(&v, &v);
        let nw = norm2(&w);
        if nw == 0.0 || !nw.is_finite() {
            return Ok((Complex64::new(0.0, 0.0), v, it));
        }
        let drift = w.iter().zip(&v).map(|(a, b)| (a - lambda * b).norm_sqr()).sum::<f64>().sqrt() / nw;
        v = w;
        scale(&mut v, Complex64::new(1.0 / nw, 0.0));
        if (lambda - previous).norm() <= tol * lambda.norm().max(1e-300) {
            settled += 1;
            // the eigenvector converges at half the rate of the Rayleigh quotient
            if drift <= tol || (settled >= 3 && drift >= best_drift) || settled >= STALL {
                return Ok((lambda, v, it));
            }
        } else {
            settled = 0;
        }
        best_drift = best_drift.min(drift);
        previous = lambda;
    }
    Err(Error::NoConvergence { iterations: MAX_ITERATIONS })
}

/// Leading eigenvalue, eigenvector, conformal functional and gap.
pub fn leading_eigen(m: &CMatrix, one: &[Complex64], tol: f64) -> Result<SpectralData> {
    if !(tol >= 1e-15) {
        return Err(Error::InvalidInput("tolerance must be >= 1e-15".into()));
    }
    let (lambda, mut rho, it_right) = dominant(m, one, tol, false)?;
    let (_, mut ell, it_left) = dominant(m, one, tol, true)?;
    let mass = dot(&ell, one);
    if mass.norm() == 0.0 {
        return Err(Error::NoConvergence { iterations: it_left });
    }
    scale(&mut ell, mass.inv());
    let pairing = dot(&ell, &rho);
    if pairing.norm() == 0.0 {
        return Err(Error::NoConvergence { iterations: it_right });
    }
    scale(&mut rho, pairing.inv());
    let image = m.apply(&rho);
    let sup = rho.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let residual = image.iter().zip(&rho).map(|(a, b)| (a - lambda * b).norm()).fold(0.0, f64::max) / sup;
    let mut data = SpectralData {
        lambda,
        rho,
        conformal: ell,
        gap: 0.0,
        residual,
        iterations: it_right.max(it_left),
    };
    let sub = subleading_modulus(m, &data, 1e-9)?;
    data.gap = if lambda.norm() > 0.0 { sub / lambda.norm() } else { 0.0 };
    Ok(data)
}

fn eig2(h: [[Complex64; 2]; 2]) -> [Complex64; 2] {
    let tr = h[0][0] + h[1][1];
    let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    let disc = (tr * tr - det * 4.0).sqrt();
    [(tr + disc) * 0.5, (tr - disc) * 0.5]
}

/// `|λ₂|` by subspace iteration on the deflated operator `M - λ ρ ⊗ ℓ`.
pub fn subleading_modulus(m: &CMatrix, s: &SpectralData, tol: f64) -> Result<f64> {
    let n = m.dim();
    if n < 2 {
        return Ok(0.0);
    }
    let deflate = |x: &[Complex64]| -> Vec<Complex64> {
        let mut y = m.apply(x);
        let c = s.lambda * dot(&s.conformal, x);
        for (yi, ri) in y.iter_mut().zip(&s.rho) {
            *yi -= c * ri;
        }
        y
    };
    let scale_ref = m.inf_norm().max(1e-300);
    let mut q0 = start_vector(&vec![Complex64::new(1.0, 0.0); n], 2);
    let mut q1 = start_vector(&vec![Complex64::new(0.0, 0.0); n], 3);
    orthonormalize(&mut q0, &mut q1);
    let mut previous = f64::NAN;
    let mut settled = 0;
    for _ in 0..MAX_ITERATIONS {
        let z0 = deflate(&q0);
        let z1 = deflate(&q1);
        let h = [[cdot(&q0, &z0), cdot(&q0, &z1)], [cdot(&q1, &z0), cdot(&q1, &z1)]];
        let ritz = eig2(h).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let size = norm2(&z0).max(norm2(&z1));
        if size <= 1e-14 * scale_ref {
            // the deflated operator annihilates the subspace
            return Ok(size.max(ritz));
        }
        q0 = z0;
        q1 = z1;
        if !orthonormalize(&mut q0, &mut q1) {
            return Ok(ritz);
        }
        if (ritz - previous).abs() <= tol * ritz.max(1e-12) {
            settled += 1;
            if settled >= 3 {
                return Ok(ritz);
            }
        } else {
            settled = 0;
        }
        previous = ritz;
    }
    Err(Error::NoConvergence { iterations: MAX_ITERATIONS })
}

/// Gram–Schmidt on two vectors; returns false when the first vanishes.
fn orthonormalize(a: &mut [Complex64], b: &mut [Complex64]) -> bool {
    let na = norm2(a);
    if na == 0.0 {
        return false;
    }
    scale(a, Complex64::new(1.0 / na, 0.0));
    for _ in 0..2 {
        let c = cdot(a, b);
        for (bi, ai) in b.iter_mut().zip(a.iter()) {
            *bi -= c * ai;
        }
    }
    let nb = norm2(b);
    if nb > 0.0 {
        scale(b, Complex64::new(1.0 / nb, 0.0));
    } else {
        // a rank-one image: fill the second direction with an orthogonal unit vector
        for (i, bi) in b.iter_mut().enumerate() {
            *bi = Complex64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0);
        }
        let c = cdot(a, b);
        for (bi, ai) in b.iter_mut().zip(a.iter()) {
            *bi -= c * ai;
        }
        let nb = norm2(b);
        scale(b, Complex64::new(1.0 / nb, 0.0));
    }
    true
}

/// Spectral radius from the averaged logarithmic growth `‖M^k v‖^{1/k}`;
/// usable when the peripheral spectrum has several eigenvalues and plain power
/// iteration does not settle.
pub fn spectral_radius(m: &CMatrix, iterations: usize) -> f64 {
    let mut v = start_vector(&vec![Complex64::new(1.0, 0.0); m.dim()], 4);
    let mut log_sum = 0.0;
    let burn = iterations / 2;
    for k in 0..iterations {
        let w = m.apply(&v);
        let nw = norm2(&w);
        if nw == 0.0 {
            return 0.0;
        }
        if k >= burn {
            log_sum += nw.ln();
        }
        v = w;
        scale(&mut v, Complex64::new(1.0 / nw, 0.0));
    }
    (log_sum / (iterations - burn) as f64).exp()
}

/// Solve `A x = b` by Gaussian elimination with partial pivoting.
pub fn solve(a: &CMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = a.dim();
    let mut m: Vec<Vec<Complex64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut x = b.to_vec();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))
            .expect("nonempty");
        if m[pivot][col].norm() < 1e-300 {
            return Err(Error::InvalidInput("singular linear system".into()));
        }
        m.swap(col, pivot);
        x.swap(col, pivot);
        let inv = m[col][col].inv();
        for row in col + 1..n {
            let f = m[row][col] * inv;
            if f.norm() == 0.0 {
                continue;
            }
            let (upper, lower) = m.split_at_mut(row);
            for (target, pivot_entry) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *target -= f * pivot_entry;
            }
            let t = x[col];
            x[row] -= f * t;
        }
    }
    for col in (0..n).rev() {
        let mut acc = x[col];
        for k in col + 1..n {
            acc -= m[col][k] * x[k];
        }
        x[col] = acc / m[col][col];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn triangular_spectrum() {
        // upper triangular with diagonal 1, 0.5, 0.25
        let m = CMatrix::from_fn(3, |i, j| match (i, j) {
            (0, 0) => c(1.0),
            (1, 1) => c(0.5),
            (2, 2) => c(0.25),
            (i, j) if j > i => c(0.3),
            _ => c(0.0),
        });
        let one = vec![c(1.0), c(0.0), c(0.0)];
        let s = leading_eigen(&m, &one, 1e-13).unwrap();
        assert!((s.lambda - c(1.0)).norm() < 1e-12);
        assert!((s.gap - 0.5).abs() < 1e-8);
        assert!(s.residual < 1e-10);
        assert!((dot(&s.conformal, &s.rho) - c(1.0)).norm() < 1e-14);
    }

    #[test]
    fn conjugate_pair_subleading() {
        // block diag(2, rotation scaled by 0.7)
        let (co, si) = (0.7 * 1.3f64.cos(), 0.7 * 1.3f64.sin());
        let m = CMatrix::from_fn(3, |i, j| match (i, j) {
            (0, 0) => c(2.0),
            (1, 1) | (2, 2) => c(co),
            (1, 2) => c(-si),
            (2, 1) => c(si),
            _ => c(0.0),
        });
        let s = leading_eigen(&m, &[c(1.0), c(1.0), c(1.0)], 1e-13).unwrap();
        assert!((s.lambda.re - 2.0).abs() < 1e-12);
        assert!((s.gap - 0.35).abs() < 1e-8, "{}", s.gap);
    }

    #[test]
    fn nilpotent_deflation_is_zero() {
        let m = CMatrix::from_fn(4, |i, j| if (i == 0 && j == 0) || j == i + 1 { c(1.0) } else { c(0.0) });
        let s = leading_eigen(&m, &[c(1.0), c(0.0), c(0.0), c(0.0)], 1e-13).unwrap();
        assert!(s.gap < 1e-12);
    }

    #[test]
    fn radius_of_rotation_block() {
        let m = CMatrix::from_fn(2, |i, j| if i != j { c(if i == 0 { -0.9 } else { 0.9 }) } else { c(0.0) });
        assert!((spectral_radius(&m, 4000) - 0.9).abs() < 1e-9);
    }

    #[test]
    fn gaussian_elimination() {
        let a = CMatrix::from_fn(3, |i, j| c(1.0 / (i + j + 1) as f64) + if i == j { c(1.0) } else { c(0.0) });
        let x = vec![c(1.0), Complex64::new(0.0, 2.0), c(-1.0)];
        let b = a.apply(&x);
        let y = solve(&a, &b).unwrap();
        for (p, q) in x.iter().zip(&y) {
            assert!((p - q).norm() < 1e-13);
        }
    }
}
