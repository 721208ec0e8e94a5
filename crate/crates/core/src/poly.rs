//! Simultaneous polynomial root finding (Aberth–Ehrlich iteration).

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Polynomial with coefficients in ascending order of degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.norm() == 0.0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// `∏ (z - r)` for the given roots.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (i, c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * r;
            }
            coeffs = next;
        }
        Poly { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn scale(&self, k: Complex64) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        Poly::new(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).copied().unwrap_or(zero)
                        - other.coeffs.get(i).copied().unwrap_or(zero)
                })
                .collect(),
        )
    }

    /// Value and derivative by Horner's scheme.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.eval_with_derivative(z).0
    }

    /// `Σ |c_i| r^i`, the scale of rounding errors when evaluating at `|z| = r`.
    fn abs_eval(&self, r: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    /// All roots, by Aberth–Ehrlich iteration followed by Newton polishing.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        let n = self.degree();
        if n == 0 {
            return Ok(Vec::new());
        }
        let lead = self.coeffs[n];
        // Cauchy bound on root moduli
        let bound = 1.0
            + self.coeffs[..n]
                .iter()
                .map(|c| (c / lead).norm())
                .fold(0.0, f64::max);
        let radius = bound.clamp(0.5, 2.0);
        let mut z: Vec<Complex64> = (0..n)
            .map(|k| Complex64::from_polar(radius, std::f64::consts::TAU * k as f64 / n as f64 + 0.4))
            .collect();
        let mut converged = false;
        for _ in 0..500 {
            let mut max_step: f64 = 0.0;
            let mut settled = 0;
            for k in 0..n {
                let (p, dp) = self.eval_with_derivative(z[k]);
                // backward-error test: |p(z)| at the rounding level of the evaluation
                if p.norm() <= 8.0 * f64::EPSILON * self.abs_eval(z[k].norm()) {
                    settled += 1;
                    continue;
                }
                let ratio = p / dp;
                let repulsion: Complex64 = (0..n)
                    .filter(|&j| j != k)
                    .map(|j| (z[k] - z[j]).inv())
                    .sum();
                let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
                if step.is_finite() {
                    z[k] -= step;
                    max_step = max_step.max(step.norm() / z[k].norm().max(1e-300).max(1.0));
                }
            }
            if max_step < 1e-15 || settled == n {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence { iterations: 500 });
        }
        for root in z.iter_mut() {
            for _ in 0..3 {
                let (p, dp) = self.eval_with_derivative(*root);
                if dp.norm() == 0.0 {
                    break;
                }
                let step = p / dp;
                if !step.is_finite() {
                    break;
                }
                *root -= step;
            }
        }
        Ok(z)
    }
}
