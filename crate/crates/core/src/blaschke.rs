//! Finite Blaschke products with an attracting fixed point at the origin.
//!
//! A map is `F(z) = e^{iθ} ∏ (z - a_i) / (1 - ā_i z)` with `a_0 = 0`. On the
//! circle the argument of `F(e^{it})` has the continuous lift
//!
//! ```text
//! Φ(t) = θ + d·t + 2 Σ arg(1 - a_i e^{-it}),
//! ```
//!
//! where each `arg` stays in `(-π/2, π/2)` because `|a_i| < 1`. `Φ` is
//! strictly increasing with `Φ' = |F'(e^{it})| = Σ (1 - |a_i|²) / |e^{it} - a_i|²`
//! and `Φ(t + 2π) = Φ(t) + 2πd`, so boundary preimages and periodic points are
//! roots of monotone scalar equations.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::circle::{reduce_angle, CirclePoint};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::quadrature::circle_mean;

const ZERO_MARGIN: f64 = 1e-12;
const POLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeMap {
    zeros: Vec<Complex64>,
    rotation: f64,
}

/// Atomic Aleksandrov–Clark measure `μ_α` of a finite Blaschke product.
#[derive(Debug, Clone, PartialEq)]
pub struct ClarkMeasure {
    pub alpha: CirclePoint,
    pub atoms: Vec<(CirclePoint, f64)>,
}

impl ClarkMeasure {
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|(_, m)| m).sum()
    }

    /// `∫ f dμ_α`.
    pub fn integrate<F: Fn(f64) -> Complex64>(&self, f: F) -> Complex64 {
        self.atoms.iter().map(|(p, m)| f(p.angle()) * *m).sum()
    }
}

impl BlaschkeMap {
    /// Validates the zero list: the first zero must be the origin and every
    /// zero must lie strictly inside the disk.
    pub fn new(zeros: Vec<Complex64>, rotation: f64) -> Result<Self> {
        if zeros.is_empty() {
            return Err(Error::InvalidInput("a Blaschke product needs at least one zero".into()));
        }
        if zeros[0].norm() != 0.0 {
            return Err(Error::InvalidInput("zeros[0] must be 0 so that F(0) = 0".into()));
        }
        if let Some(z) = zeros.iter().find(|z| !(z.norm() < 1.0 - ZERO_MARGIN)) {
            return Err(Error::InvalidInput(format!("zero {z} is not inside the unit disk")));
        }
        if !rotation.is_finite() {
            return Err(Error::InvalidInput("rotation must be finite".into()));
        }
        Ok(BlaschkeMap { zeros, rotation: reduce_angle(rotation) })
    }

    /// `z^d`.
    pub fn monomial(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidInput("degree must be positive".into()));
        }
        Self::new(vec![Complex64::new(0.0, 0.0); d], 0.0)
    }

    /// The degree-two family `F_a(z) = z (z - a) / (1 - ā z)`, with `F_a'(0) = -a`.
    pub fn one_zero(a: Complex64) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0), a], 0.0)
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn rotation(&self) -> f64 {
        self.rotation
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_rotation(&self) -> bool {
        self.degree() == 1
    }

    /// Rotated monomial `e^{iθ} z^d`: the map has constant boundary expansion.
    pub fn is_monomial(&self) -> bool {
        self.zeros.iter().all(|z| z.norm() == 0.0)
    }

    /// `F'(0)`.
    pub fn multiplier_at_origin(&self) -> Complex64 {
        // F(z) = e^{iθ} z ∏_{i≥1} (z - a_i)/(1 - ā_i z), so F'(0) = e^{iθ} ∏ (-a_i)
        let rot = Complex64::from_polar(1.0, self.rotation);
        self.zeros[1..].iter().fold(rot, |acc, a| acc * -a)
    }

    fn check_poles(&self, z: Complex64) -> Result<()> {
        for a in &self.zeros {
            if a.norm() > 0.0 {
                let pole = a.conj().inv();
                if (z - pole).norm() < POLE_TOL {
                    return Err(Error::PoleProximity {
                        z: z.to_string(),
                        pole: pole.to_string(),
                        tol: POLE_TOL,
                    });
                }
            }
        }
        Ok(())
    }

    /// `F(z)` without validation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        self.zeros
            .iter()
            .fold(Complex64::from_polar(1.0, self.rotation), |acc, a| acc * (z - a) / (one - a.conj() * z))
    }

    /// `(F(z), F'(z))`, the derivative by logarithmic differentiation
    /// `F'/F = Σ [1/(z - a) + ā/(1 - ā z)]`, falling back to the product rule
    /// when `z` sits on a zero.
    pub fn eval_and_deriv(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        if z.norm() > 1.0 + 1e-9 {
            return Err(Error::InvalidInput(format!("|z| = {} exceeds 1 + 1e-9", z.norm())));
        }
        self.check_poles(z)?;
        let one = Complex64::new(1.0, 0.0);
        let value = self.eval(z);
        let near_zero = self.zeros.iter().any(|a| (z - a).norm() < 1e-8);
        let derivative = if near_zero {
            let factors: Vec<Complex64> =
                self.zeros.iter().map(|a| (z - a) / (one - a.conj() * z)).collect();
            let rot = Complex64::from_polar(1.0, self.rotation);
            let mut total = Complex64::new(0.0, 0.0);
            for (i, a) in self.zeros.iter().enumerate() {
                let denom = one - a.conj() * z;
                let d_factor = (1.0 - a.norm_sqr()) / (denom * denom);
                let rest: Complex64 = factors
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, f)| *f)
                    .product();
                total += d_factor * rest;
            }
            rot * total
        } else {
            let log_deriv: Complex64 = self
                .zeros
                .iter()
                .map(|a| (z - a).inv() + a.conj() / (one - a.conj() * z))
                .sum();
            value * log_deriv
        };
        Ok((value, derivative))
    }

    /// `|F'(e^{it})|`, the angular derivative on the circle.
    pub fn boundary_derivative(&self, t: f64) -> f64 {
        let z = Complex64::from_polar(1.0, t);
        self.zeros.iter().map(|a| (1.0 - a.norm_sqr()) / (z - a).norm_sqr()).sum()
    }

    /// Continuous lift `Φ(t)` of `arg F(e^{it})`, valid for every real `t`.
    pub fn lift(&self, t: f64) -> f64 {
        let e = Complex64::from_polar(1.0, -t);
        let correction: f64 = self
            .zeros
            .iter()
            .map(|a| {
                let w = Complex64::new(1.0, 0.0) - a * e;
                w.im.atan2(w.re)
            })
            .sum();
        self.rotation + self.degree() as f64 * t + 2.0 * correction
    }

    /// Boundary map in angle coordinates, reduced to `[0, 2π)`.
    pub fn circle_map(&self, t: f64) -> f64 {
        reduce_angle(self.lift(t))
    }

    /// Solve `Φ(t) = target` for `t ∈ [lo, hi]` given `Φ(lo) ≤ target ≤ Φ(hi)`,
    /// by Newton's method safeguarded with bisection.
    pub(crate) fn solve_lift(&self, target: f64, mut lo: f64, mut hi: f64) -> Result<f64> {
        let f_lo = self.lift(lo) - target;
        let f_hi = self.lift(hi) - target;
        if f_lo > 1e-12 || f_hi < -1e-12 {
            return Err(Error::LiftNonMonotone { angle: lo });
        }
        if f_lo >= 0.0 {
            return Ok(lo);
        }
        if f_hi <= 0.0 {
            return Ok(hi);
        }
        let mut t = lo + (hi - lo) * (-f_lo / (f_hi - f_lo));
        for _ in 0..200 {
            let f = self.lift(t) - target;
            if f == 0.0 {
                return Ok(t);
            }
            if f < 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            let slope = self.boundary_derivative(t);
            if !(slope > 0.0) {
                return Err(Error::LiftNonMonotone { angle: t });
            }
            let mut next = t - f / slope;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - t).abs() <= 4.0 * f64::EPSILON * t.abs().max(1.0) || hi - lo <= 1e-15 {
                return Ok(next);
            }
            t = next;
        }
        Ok(t)
    }

    /// The `d` angles `y ∈ [0, 2π)` with `F(e^{iy}) = e^{i·target}`, ascending.
    pub fn boundary_preimages(&self, target: CirclePoint) -> Result<Vec<CirclePoint>> {
        let d = self.degree();
        let base = self.lift(0.0);
        let t = target.angle();
        let k0 = ((base - t) / TAU).ceil();
        let mut out = Vec::with_capacity(d);
        for j in 0..d {
            let goal = t + TAU * (k0 + j as f64);
            let y = self.solve_lift(goal, 0.0, TAU)?;
            // y == 2π only through rounding at the seam
            out.push(CirclePoint::new(if y >= TAU { 0.0 } else { y }));
        }
        for w in out.windows(2) {
            if w[1].angle() < w[0].angle() {
                return Err(Error::LiftNonMonotone { angle: w[1].angle() });
            }
        }
        Ok(out)
    }

    /// Aleksandrov–Clark measure: atoms at the boundary preimages of `alpha`
    /// with masses `1/|F'|`.
    pub fn clark_measure(&self, alpha: CirclePoint) -> Result<ClarkMeasure> {
        let atoms = self
            .boundary_preimages(alpha)?
            .into_iter()
            .map(|p| (p, 1.0 / self.boundary_derivative(p.angle())))
            .collect();
        Ok(ClarkMeasure { alpha, atoms })
    }

    /// `∫ log|F'| dm` by the periodic trapezoid rule.
    pub fn lyapunov_exponent(&self, quad_points: usize) -> Result<f64> {
        if quad_points < 64 || !quad_points.is_power_of_two() {
            return Err(Error::InvalidInput("quad_points must be a power of two >= 64".into()));
        }
        Ok(circle_mean(quad_points, |t| self.boundary_derivative(t).ln()))
    }

    /// The `d` solutions of `F(z) = w` inside the disk.
    pub fn disk_preimages(&self, w: Complex64) -> Result<Vec<Complex64>> {
        if !(w.norm() < 1.0) {
            return Err(Error::InvalidInput(format!("|w| = {} must be < 1", w.norm())));
        }
        let one = Complex64::new(1.0, 0.0);
        let numerator = Poly::from_roots(&self.zeros).scale(Complex64::from_polar(1.0, self.rotation));
        let mut denominator = Poly::new(vec![one]);
        for a in &self.zeros {
            let factor = Poly::new(vec![one, -a.conj()]);
            denominator = multiply(&denominator, &factor);
        }
        let equation = numerator.sub(&denominator.scale(w));
        let mut roots = equation.roots()?;
        for r in &roots {
            if r.norm() >= 1.0 + 1e-9 {
                return Err(Error::RootEscape { modulus: r.norm() });
            }
        }
        roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        Ok(roots)
    }

    /// Nevanlinna counting function `N_F(w) = Σ_{F(z)=w} log(1/|z|)`.
    pub fn nevanlinna(&self, w: Complex64) -> Result<f64> {
        if !(w.norm() > 0.0) {
            return Err(Error::InvalidInput("w must be nonzero".into()));
        }
        let roots = self.disk_preimages(w)?;
        let mut total = 0.0;
        for r in roots {
            let m = r.norm();
            if m < 1e-14 {
                return Err(Error::LogSingularity { modulus: m });
            }
            total -= m.ln();
        }
        Ok(total)
    }

    /// Depth-`depth` approximation `F'(0)^{-depth} F^{∘depth}(z)` of the
    /// Koenigs linearizer.
    pub fn koenigs(&self, z: Complex64, depth: usize) -> Result<Complex64> {
        let lambda = self.multiplier_at_origin();
        if lambda.norm() < 1e-12 {
            return Err(Error::ZeroMultiplier { modulus: lambda.norm() });
        }
        if !(z.norm() < 1.0) || depth == 0 {
            return Err(Error::InvalidInput("need |z| < 1 and depth >= 1".into()));
        }
        let mut w = z;
        let mut scale = Complex64::new(1.0, 0.0);
        for _ in 0..depth {
            w = self.eval(w);
            scale /= lambda;
        }
        Ok(w * scale)
    }

    /// `F^{∘n}` on the circle in angle coordinates, with the log-derivative
    /// `log|(F^{∘n})'|` accumulated by the chain rule.
    pub fn iterate_boundary(&self, t: f64, n: usize) -> (f64, f64) {
        let mut x = t;
        let mut log_deriv = 0.0;
        for _ in 0..n {
            log_deriv += self.boundary_derivative(x).ln();
            x = self.circle_map(x);
        }
        (x, log_deriv)
    }

    /// `Φ^{∘n}(t)` split as `2π·winding + remainder` with `remainder ∈ [0, 2π)`,
    /// keeping the integer part exact.
    fn iterated_lift(&self, t: f64, n: usize) -> (i128, f64, f64) {
        let d = self.degree() as i128;
        let mut winding: i128 = 0;
        let mut r = t;
        let mut log_deriv = 0.0;
        for _ in 0..n {
            log_deriv += self.boundary_derivative(r).ln();
            let y = self.lift(r);
            let k = (y / TAU).floor();
            let mut rem = y - k * TAU;
            let mut k = k as i128;
            if rem >= TAU {
                rem -= TAU;
                k += 1;
            }
            winding = d * winding + k;
            r = rem;
        }
        (winding, r, log_deriv)
    }

    /// All boundary fixed points of `F^{∘n}` with their multipliers
    /// `|(F^{∘n})'|`, sorted by angle.
    pub fn periodic_points(&self, n: usize) -> Result<Vec<(CirclePoint, f64)>> {
        if n == 0 || n > 12 {
            return Err(Error::InvalidInput("period must be in 1..=12".into()));
        }
        let d = self.degree() as f64;
        let count = d.powi(n as i32) - 1.0;
        if count > 1e7 {
            return Err(Error::BudgetExceeded { predicted: count, budget: 1e7 });
        }
        if self.is_rotation() {
            return Err(Error::InvalidInput("rotations have no isolated periodic points".into()));
        }
        let count = count as i128;
        // g(t) = Φ_n(t) - t increases by 2π(d^n - 1) over [0, 2π)
        let g = |t: f64, k: i128| -> f64 {
            let (w, r, _) = self.iterated_lift(t, n);
            TAU * (w - k) as f64 + (r - t)
        };
        let (w0, r0, _) = self.iterated_lift(0.0, n);
        let k_first = if r0 > 0.0 { w0 + 1 } else { w0 };
        let mut out = Vec::with_capacity(count as usize);
        for j in 0..count {
            let k = k_first + j;
            let (mut lo, mut hi) = (0.0f64, TAU);
            // linear guess from the average slope
            let frac = (TAU * (k - w0) as f64 - r0) / (TAU * count as f64);
            let mut t = (frac * TAU).clamp(0.0, TAU);
            for _ in 0..200 {
                let f = g(t, k);
                if f < 0.0 {
                    lo = t;
                } else {
                    hi = t;
                }
                if f == 0.0 || hi - lo < 1e-15 {
                    break;
                }
                let (_, _, ld) = self.iterated_lift(t, n);
                let slope = ld.exp() - 1.0;
                let mut next = t - f / slope;
                if !(next > lo && next < hi) {
                    next = 0.5 * (lo + hi);
                }
                if (next - t).abs() < 1e-16 {
                    t = next;
                    break;
                }
                t = next;
            }
            let (_, _, ld) = self.iterated_lift(t, n);
            out.push((CirclePoint::new(t), ld.exp()));
        }
        out.sort_by(|a, b| a.0.angle().total_cmp(&b.0.angle()));
        Ok(out)
    }
}

fn multiply(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![Complex64::new(0.0, 0.0); a.degree() + b.degree() + 1];
    for (i, x) in a.coeffs().iter().enumerate() {
        for (j, y) in b.coeffs().iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    Poly::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn half() -> BlaschkeMap {
        BlaschkeMap::one_zero(c(0.5, 0.0)).unwrap()
    }

    #[test]
    fn construction_enforces_centering() {
        assert!(BlaschkeMap::new(vec![c(0.1, 0.0)], 0.0).is_err());
        assert!(BlaschkeMap::new(vec![c(0.0, 0.0), c(1.0, 0.0)], 0.0).is_err());
        assert!(BlaschkeMap::new(vec![], 0.0).is_err());
    }

    #[test]
    fn monomial_value_and_derivative() {
        let f = BlaschkeMap::monomial(2).unwrap();
        let (v, d) = f.eval_and_deriv(c(0.0, 1.0)).unwrap();
        assert!((v - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((d - c(0.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn one_zero_derivative_on_circle() {
        // symbolic oracle: F = (z² - z/2)/(1 - z/2), F' = ((2z - 1/2)(1 - z/2) + (z² - z/2)/2)/(1 - z/2)²
        let oracle = |z: Complex64| {
            let num = z * z - z * 0.5;
            let den = c(1.0, 0.0) - z * 0.5;
            ((z * 2.0 - 0.5) * den + num * 0.5) / (den * den)
        };
        let f = half();
        let (v, d) = f.eval_and_deriv(c(1.0, 0.0)).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-15);
        assert!((d - c(4.0, 0.0)).norm() < 1e-14);
        let (v, d) = f.eval_and_deriv(c(-1.0, 0.0)).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-15);
        assert!((d.norm() - 4.0 / 3.0).abs() < 1e-14);
        for z in [c(0.3, 0.2), c(-0.7, 0.1), c(0.5, 0.0), Complex64::from_polar(1.0, 2.0)] {
            let (_, d) = f.eval_and_deriv(z).unwrap();
            assert!((d - oracle(z)).norm() < 1e-13, "{z}");
        }
    }

    #[test]
    fn angular_derivative_matches_complex_derivative() {
        let f = BlaschkeMap::new(vec![c(0.0, 0.0), c(0.3, -0.4), c(-0.6, 0.2)], 1.0).unwrap();
        for k in 0..50 {
            let t = 0.1256 * k as f64;
            let (_, d) = f.eval_and_deriv(Complex64::from_polar(1.0, t)).unwrap();
            assert!((d.norm() - f.boundary_derivative(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn pole_proximity_rejected() {
        let f = BlaschkeMap::one_zero(c(0.5, 0.0)).unwrap();
        assert!(matches!(f.eval_and_deriv(c(2.0, 0.0)), Err(Error::InvalidInput(_))));
        let g = BlaschkeMap::one_zero(c(0.999_999_999_9, 0.0)).unwrap();
        let pole = c(1.0 / 0.999_999_999_9, 0.0);
        assert!(matches!(g.eval_and_deriv(pole), Err(Error::PoleProximity { .. })));
    }

    #[test]
    fn lift_increases_by_two_pi_d() {
        let f = BlaschkeMap::new(vec![c(0.0, 0.0), c(0.8, 0.1), c(-0.2, -0.7)], 0.3).unwrap();
        assert!((f.lift(TAU) - f.lift(0.0) - 3.0 * TAU).abs() < 1e-12);
        for k in 0..200 {
            let t = TAU * k as f64 / 200.0;
            let z = f.eval(Complex64::from_polar(1.0, t));
            assert!((Complex64::from_polar(1.0, f.lift(t)) - z).norm() < 1e-12);
            assert!((z.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn preimage_examples() {
        let sq = BlaschkeMap::monomial(2).unwrap();
        let p = sq.boundary_preimages(CirclePoint::new(0.0)).unwrap();
        assert!(p[0].angle().abs() < 1e-14 && (p[1].angle() - PI).abs() < 1e-14);
        let p = half().boundary_preimages(CirclePoint::new(0.0)).unwrap();
        assert!(p[0].angle().abs() < 1e-13 && (p[1].angle() - PI).abs() < 1e-13);
        let cube = BlaschkeMap::monomial(3).unwrap();
        let p = cube.boundary_preimages(CirclePoint::new(PI)).unwrap();
        for (got, want) in p.iter().zip([PI / 3.0, PI, 5.0 * PI / 3.0]) {
            assert!((got.angle() - want).abs() < 1e-13);
        }
    }

    #[test]
    fn preimages_map_back_to_target() {
        let f = BlaschkeMap::new(vec![c(0.0, 0.0), c(0.9, 0.0), c(-0.3, 0.85)], 2.0).unwrap();
        for k in 0..40 {
            let target = CirclePoint::new(0.157 * k as f64);
            let pre = f.boundary_preimages(target).unwrap();
            assert_eq!(pre.len(), 3);
            for y in pre {
                assert!(CirclePoint::new(f.circle_map(y.angle())).distance(target) < 1e-10);
            }
        }
    }

    #[test]
    fn clark_measures() {
        let m = BlaschkeMap::monomial(2).unwrap().clark_measure(CirclePoint::new(0.0)).unwrap();
        assert!((m.atoms[0].1 - 0.5).abs() < 1e-15 && (m.atoms[1].1 - 0.5).abs() < 1e-15);
        let m = half().clark_measure(CirclePoint::new(0.0)).unwrap();
        assert!((m.atoms[0].1 - 0.25).abs() < 1e-12);
        assert!((m.atoms[1].1 - 0.75).abs() < 1e-12);
        assert!((m.total_mass() - 1.0).abs() < 1e-12);
        let m5 = BlaschkeMap::monomial(5).unwrap().clark_measure(CirclePoint::new(1.0)).unwrap();
        assert!(m5.atoms.iter().all(|(_, w)| (w - 0.2).abs() < 1e-14));
    }

    #[test]
    fn lyapunov_values() {
        let l = BlaschkeMap::monomial(3).unwrap().lyapunov_exponent(4096).unwrap();
        assert!((l - 3f64.ln()).abs() < 1e-14);
        // frozen with an adaptive-quadrature oracle at 30 digits
        let l = half().lyapunov_exponent(4096).unwrap();
        assert!((l - 0.623_810_716_364_871_4).abs() < 1e-10, "{l}");
        assert!(l > 0.0 && l < 2f64.ln());
        let rot = BlaschkeMap::new(vec![c(0.0, 0.0)], 1.2).unwrap();
        assert!(rot.lyapunov_exponent(64).unwrap().abs() < 1e-15);
        assert!(half().lyapunov_exponent(100).is_err());
    }

    #[test]
    fn disk_preimage_examples() {
        let r = BlaschkeMap::monomial(2).unwrap().disk_preimages(c(0.25, 0.0)).unwrap();
        assert!((r[0] - c(-0.5, 0.0)).norm() < 1e-13 && (r[1] - c(0.5, 0.0)).norm() < 1e-13);
        let r = half().disk_preimages(c(0.0, 0.0)).unwrap();
        assert!(r[0].norm() < 1e-13 && (r[1] - c(0.5, 0.0)).norm() < 1e-13);
        let r = BlaschkeMap::monomial(3).unwrap().disk_preimages(c(-0.125, 0.0)).unwrap();
        assert_eq!(r.len(), 3);
        assert!(r.iter().all(|z| (z.norm() - 0.5).abs() < 1e-13));
    }

    #[test]
    fn nevanlinna_examples() {
        let sq = BlaschkeMap::monomial(2).unwrap();
        assert!((sq.nevanlinna(c(0.25, 0.0)).unwrap() - 4f64.ln()).abs() < 1e-12);
        let want = (1.0f64 / 0.3).ln();
        assert!((half().nevanlinna(c(0.3, 0.0)).unwrap() - want).abs() < 1e-8);
        assert!((half().nevanlinna(c(0.0, 0.3)).unwrap() - want).abs() < 1e-8);
        // w = F(tiny) has a preimage at the origin neighbourhood
        let w = half().eval(c(1e-16, 0.0));
        assert!(matches!(half().nevanlinna(w), Err(Error::LogSingularity { .. }) | Err(Error::InvalidInput(_))));
    }

    #[test]
    fn koenigs_examples() {
        let f = half();
        assert_eq!(f.koenigs(c(0.0, 0.0), 10).unwrap(), c(0.0, 0.0));
        let lambda = f.multiplier_at_origin();
        assert!((lambda - c(-0.5, 0.0)).norm() < 1e-15);
        let z = c(0.3, 0.0);
        let phi_z = f.koenigs(z, 40).unwrap();
        let phi_fz = f.koenigs(f.eval(z), 40).unwrap();
        assert!((phi_fz - lambda * phi_z).norm() < 1e-10);
        let tiny = f.koenigs(c(1e-8, 0.0), 40).unwrap();
        assert!(((tiny - c(1e-8, 0.0)) / 1e-8).norm() < 1e-6);
        let sq = BlaschkeMap::monomial(2).unwrap();
        assert!(matches!(sq.koenigs(z, 5), Err(Error::ZeroMultiplier { .. })));
    }

    #[test]
    fn periodic_point_examples() {
        let sq = BlaschkeMap::monomial(2).unwrap();
        let p = sq.periodic_points(3).unwrap();
        assert_eq!(p.len(), 7);
        for (k, (pt, mult)) in p.iter().enumerate() {
            assert!((pt.angle() - TAU * k as f64 / 7.0).abs() < 1e-12);
            assert!((mult - 8.0).abs() < 1e-12);
        }
        let p = sq.periodic_points(1).unwrap();
        assert_eq!(p.len(), 1);
        assert!(p[0].0.angle() < 1e-12 && (p[0].1 - 2.0).abs() < 1e-12);
        let p = half().periodic_points(1).unwrap();
        assert_eq!(p.len(), 1);
        assert!(p[0].0.angle() < 1e-12 && (p[0].1 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn periodic_points_are_fixed() {
        let f = BlaschkeMap::new(vec![c(0.0, 0.0), c(0.4, 0.3)], 0.7).unwrap();
        for n in 1..=6 {
            let pts = f.periodic_points(n).unwrap();
            assert_eq!(pts.len(), 2usize.pow(n as u32) - 1);
            for (p, _) in pts {
                let (image, _) = f.iterate_boundary(p.angle(), n);
                assert!(CirclePoint::new(image).distance(p) < 1e-9);
            }
        }
        assert!(matches!(
            BlaschkeMap::monomial(5).unwrap().periodic_points(11),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
