use crate::error::{Error, Result};

use super::ShiftModel;

#[derive(Debug, Clone, PartialEq)]
pub enum Lattice {
    /// Every value lies in `a ℤ`.
    Lattice { generator: f64 },
    Generic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DGenericity {
    pub verdict: Lattice,
    /// Longest period scanned.
    pub period_reached: usize,
    pub samples: usize,
}

/// Best rational approximation `p/q` of `x` with `q ≤ qmax`, from the
/// continued fraction of `x`.
fn rational(x: f64, qmax: u64) -> (i64, u64) {
    let (mut p0, mut q0, mut p1, mut q1): (i64, u64, i64, u64) = (0, 1, 1, 0);
    let mut r = x;
    loop {
        let a = r.floor();
        let (p2, q2) = (a as i64 * p1 + p0, a as u64 * q1 + q0);
        if q2 > qmax {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = r - a;
        if frac < 1e-15 {
            break;
        }
        r = 1.0 / frac;
        if !r.is_finite() || r > 1e15 {
            break;
        }
    }
    (p1, q1)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Whether all values lie in a common lattice `a ℤ` within relative
/// tolerance `tol`. Ratios to the smallest nonzero modulus are tested for
/// rationality with denominators up to `min(1000, 0.1/√tol)`.
pub fn lattice_test(values: &[f64], tol: f64) -> Lattice {
    let moduli: Vec<f64> = values.iter().map(|v| v.abs()).filter(|v| *v > tol).collect();
    let Some(min) = moduli.iter().copied().reduce(f64::min) else {
        return Lattice::Generic;
    };
    let qmax = (0.1 / tol.sqrt()).clamp(1.0, 1000.0) as u64;
    let mut lcm: u64 = 1;
    for v in &moduli {
        let r = v / min;
        let (p, q) = rational(r, qmax);
        if q == 0 || (r - p as f64 / q as f64).abs() > tol * r.max(1.0) {
            return Lattice::Generic;
        }
        lcm = lcm / gcd(lcm, q) * q;
        if lcm > qmax {
            return Lattice::Generic;
        }
    }
    let generator = min / lcm as f64;
    if moduli.iter().all(|v| {
        let k = (v / generator).round();
        (v - k * generator).abs() <= tol * v.max(1.0) * 10.0
    }) {
        Lattice::Lattice { generator }
    } else {
        Lattice::Generic
    }
}

/// Scan `S_n ψ` over all periodic words of period `≤ max_period` (or as far
/// as a `10^7`-word budget allows) and test the values for a lattice.
pub fn d_genericity(model: &ShiftModel, max_period: usize, tol: f64) -> Result<DGenericity> {
    if max_period == 0 || max_period > 12 {
        return Err(Error::InvalidInput("max_period must lie in 1..=12".into()));
    }
    let system = model.system();
    let mut values = Vec::new();
    let mut period_reached = 0;
    let mut scanned = 0usize;
    for n in 1..=max_period {
        let estimate = (system.alphabet_size() as f64).powi(n as i32);
        if scanned as f64 + estimate > 1e7 {
            break;
        }
        for w in system.words(n) {
            scanned += 1;
            if let Some(v) = model.periodic_sum(&w) {
                values.push(v);
            }
        }
        period_reached = n;
    }
    Ok(DGenericity { verdict: lattice_test(&values, tol), period_reached, samples: values.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift::{PotentialSpec, SymbolicSystem};
    use std::f64::consts::LN_2;

    #[test]
    fn detector_on_examples() {
        let two = ShiftModel::new(SymbolicSystem::full(2).unwrap(), PotentialSpec::letters(&[-LN_2, -LN_2]).unwrap()).unwrap();
        match d_genericity(&two, 8, 1e-9).unwrap().verdict {
            Lattice::Lattice { generator } => assert!((generator - LN_2).abs() < 1e-12),
            Lattice::Generic => panic!("constant potential is lattice"),
        }
        let values = [-(2f64.ln()), -(3f64.ln()), -(6f64.ln())];
        let bern = ShiftModel::new(SymbolicSystem::full(3).unwrap(), PotentialSpec::letters(&values).unwrap()).unwrap();
        assert_eq!(d_genericity(&bern, 8, 1e-9).unwrap().verdict, Lattice::Generic);
        let golden = ShiftModel::new(SymbolicSystem::golden_mean(), PotentialSpec::letters(&[-LN_2, -LN_2]).unwrap()).unwrap();
        assert!(matches!(d_genericity(&golden, 8, 1e-9).unwrap().verdict, Lattice::Lattice { .. }));
    }

    #[test]
    fn rational_lattices() {
        match lattice_test(&[1.5, 2.5, 4.0], 1e-9) {
            Lattice::Lattice { generator } => assert!((generator - 0.5).abs() < 1e-12),
            Lattice::Generic => panic!(),
        }
        assert_eq!(lattice_test(&[1.0, std::f64::consts::SQRT_2], 1e-9), Lattice::Generic);
        assert_eq!(lattice_test(&[], 1e-9), Lattice::Generic);
    }
}
