//! Quadrature rules: the periodic trapezoid rule for circle integrals,
//! Gauss–Legendre panels, and double-exponential rules for integrands with
//! endpoint singularities or infinite range.

use std::f64::consts::{FRAC_PI_2, TAU};

/// Pairwise (tree) summation; the result depends only on the order of
/// `values`, never on how the work producing them was scheduled.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Mean of `f` over `n` equispaced angles, i.e. `∫ f dm` for normalized
/// Lebesgue measure `m` on the circle.
pub fn circle_mean<F: Fn(f64) -> f64>(n: usize, f: F) -> f64 {
    let values: Vec<f64> = (0..n).map(|j| f(TAU * j as f64 / n as f64)).collect();
    pairwise_sum(&values) / n as f64
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_panel<F: Fn(f64) -> f64>(a: f64, b: f64, nodes: &[f64], weights: &[f64], f: F) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    nodes.iter().zip(weights).map(|(x, w)| w * f(mid + half * x)).sum::<f64>() * half
}

/// Tanh–sinh quadrature on `[a, b]`, tolerant of integrable endpoint
/// singularities. `f` receives `(x, distance_to_a, distance_to_b)` so that
/// singular integrands can be evaluated without cancellation.
pub fn tanh_sinh<F: Fn(f64, f64, f64) -> f64>(a: f64, b: f64, tol: f64, f: F) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let t_max = 6.5;
    let mut h = 0.5;
    let eval = |t: f64| -> f64 {
        let sinh_t = t.sinh();
        let u = FRAC_PI_2 * sinh_t;
        let cosh_u = u.cosh();
        let x = u.tanh();
        let w = FRAC_PI_2 * t.cosh() / (cosh_u * cosh_u);
        // 1 - x and 1 + x computed without cancellation
        let one_minus = 1.0 / (u.exp() * cosh_u);
        let one_plus = 1.0 / ((-u).exp() * cosh_u);
        let da = half * one_plus;
        let db = half * one_minus;
        if da <= 0.0 || db <= 0.0 || w == 0.0 {
            return 0.0;
        }
        w * f(mid + half * x, da, db)
    };
    let mut sum = eval(0.0);
    let mut k = 1;
    while k as f64 * h <= t_max {
        let t = k as f64 * h;
        sum += eval(t) + eval(-t);
        k += 1;
    }
    let mut estimate = sum * h * half;
    for _ in 0..12 {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= t_max {
            let t = k as f64 * h;
            sum += eval(t) + eval(-t);
            k += 2;
        }
        let refined = sum * h * half;
        let done = (refined - estimate).abs() <= tol * refined.abs().max(1.0);
        estimate = refined;
        if done {
            break;
        }
    }
    estimate
}

/// `∫_a^∞ f(x) dx` via the substitution `x = a + t/(1-t)` followed by
/// tanh–sinh on `[0, 1]`.
pub fn half_line<F: Fn(f64) -> f64>(a: f64, tol: f64, f: F) -> f64 {
    tanh_sinh(0.0, 1.0, tol, |t, _, one_minus_t| {
        let x = a + t / one_minus_t;
        let jac = 1.0 / (one_minus_t * one_minus_t);
        let v = f(x) * jac;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(8);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // degree 15 monomial integrates exactly: ∫ x^14 = 2/15
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((v - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn trapezoid_is_spectral_on_periodic_analytic() {
        // ∫ 1/(1.25 - cos θ) dm = 1/sqrt(1.25² - 1)
        let v = circle_mean(128, |t| 1.0 / (1.25 - t.cos()));
        assert!((v - 1.0 / (1.25f64 * 1.25 - 1.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn tanh_sinh_handles_log_singularity() {
        // ∫_0^1 ln x dx = -1
        let v = tanh_sinh(0.0, 1.0, 1e-13, |_, da, _| da.ln());
        assert!((v + 1.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn half_line_lorentzian() {
        let v = half_line(0.0, 1e-13, |x| 1.0 / (1.0 + x * x));
        assert!((v - PI / 2.0).abs() < 1e-11, "{v}");
    }

    #[test]
    fn pairwise_matches_naive_on_small_input() {
        let v: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 499500.0);
    }
}
