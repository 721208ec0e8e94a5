//! Points, arcs and finite arc unions on the unit circle.
//!
//! Angles are stored in `[0, 2π)`. Arcs are half-open `[start, start + length)`
//! traversed counterclockwise, which gives every point of a tiling exactly one
//! owner.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduce an angle to `[0, 2π)`.
pub fn reduce_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Shortest distance between two angles along the circle.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct CirclePoint(f64);

impl CirclePoint {
    pub fn new(angle: f64) -> Self {
        CirclePoint(reduce_angle(angle))
    }

    pub fn angle(self) -> f64 {
        self.0
    }

    pub fn to_complex(self) -> num_complex::Complex64 {
        num_complex::Complex64::from_polar(1.0, self.0)
    }

    pub fn distance(self, other: CirclePoint) -> f64 {
        circular_distance(self.0, other.0)
    }
}

/// Half-open counterclockwise arc `[start, start + length)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    start: f64,
    length: f64,
}

impl Arc {
    /// Arc from `start` to `end` counterclockwise. Equal endpoints give the
    /// full circle.
    pub fn new(start: f64, end: f64) -> Self {
        let start = reduce_angle(start);
        let mut length = (reduce_angle(end) - start).rem_euclid(TAU);
        if length == 0.0 {
            length = TAU;
        }
        Arc { start, length }
    }

    pub fn from_start_length(start: f64, length: f64) -> Result<Self> {
        if !(length > 0.0 && length <= TAU) {
            return Err(Error::InvalidInput(format!("arc length {length} not in (0, 2π]")));
        }
        Ok(Arc { start: reduce_angle(start), length })
    }

    pub fn full() -> Self {
        Arc { start: 0.0, length: TAU }
    }

    pub fn start(&self) -> CirclePoint {
        CirclePoint(self.start)
    }

    pub fn end(&self) -> CirclePoint {
        CirclePoint::new(self.start + self.length)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Normalized Lebesgue measure `m(arc) = length / 2π`.
    pub fn measure(&self) -> f64 {
        self.length / TAU
    }

    pub fn contains(&self, angle: f64) -> bool {
        let offset = (angle - self.start).rem_euclid(TAU);
        offset < self.length
    }

    /// Whether `other` lies inside `self` up to `tol` at the endpoints.
    pub fn contains_arc(&self, other: &Arc, tol: f64) -> bool {
        if self.length >= TAU {
            return true;
        }
        let mut offset = (other.start - self.start).rem_euclid(TAU);
        if offset > TAU - tol {
            offset -= TAU;
        }
        offset >= -tol && offset + other.length <= self.length + tol
    }

    /// Number of the `count` points `offset + 2πk / count` lying in the arc.
    pub fn count_equispaced(&self, offset: f64, count: u64) -> u64 {
        if self.length >= TAU {
            return count;
        }
        let step = TAU / count as f64;
        // points with k*step in [start - offset, start - offset + length) mod 2π
        let lo = (self.start - offset).rem_euclid(TAU) / step;
        let hi = lo + self.length / step;
        let first = lo.ceil();
        let last = hi.ceil();
        ((last - first).max(0.0) as u64).min(count)
    }
}

/// Finite union of disjoint half-open arcs.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ArcSet {
    arcs: Vec<Arc>,
}

impl ArcSet {
    pub fn empty() -> Self {
        ArcSet { arcs: Vec::new() }
    }

    pub fn full() -> Self {
        ArcSet { arcs: vec![Arc::full()] }
    }

    /// Union of the given arcs; overlapping arcs are rejected so that the
    /// measure stays additive.
    pub fn new(arcs: Vec<Arc>) -> Result<Self> {
        for (i, a) in arcs.iter().enumerate() {
            for b in &arcs[i + 1..] {
                if a.contains(b.start) || b.contains(a.start) {
                    return Err(Error::InvalidInput("arcs in a union must be disjoint".into()));
                }
            }
        }
        Ok(ArcSet { arcs })
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn contains(&self, angle: f64) -> bool {
        self.arcs.iter().any(|a| a.contains(angle))
    }

    pub fn measure(&self) -> f64 {
        self.arcs.iter().map(Arc::measure).sum()
    }

    pub fn count_equispaced(&self, offset: f64, count: u64) -> u64 {
        self.arcs.iter().map(|a| a.count_equispaced(offset, count)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn reduce_wraps_negative_angles() {
        assert_eq!(reduce_angle(-1e-300), 0.0);
        assert!((reduce_angle(-PI / 2.0) - 1.5 * PI).abs() < 1e-15);
        assert!((reduce_angle(5.0 * PI) - PI).abs() < 1e-14);
    }

    #[test]
    fn arc_is_half_open() {
        let a = Arc::new(0.0, PI);
        assert!(a.contains(0.0));
        assert!(!a.contains(PI));
        assert!(a.contains(PI - 1e-12));
        assert!((a.measure() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn wrapping_arc() {
        let a = Arc::new(1.5 * PI, 0.5 * PI);
        assert!(a.contains(0.0));
        assert!(a.contains(1.9 * PI));
        assert!(!a.contains(PI));
        assert!((a.length() - PI).abs() < 1e-14);
    }

    #[test]
    fn equispaced_counts_match_brute_force() {
        let arcs = [Arc::new(0.0, PI), Arc::new(0.3, 2.0), Arc::new(5.0, 1.0), Arc::full()];
        for arc in arcs {
            for count in [1u64, 2, 7, 64, 1000] {
                for offset in [0.0, 0.1, 3.0] {
                    let brute = (0..count)
                        .filter(|k| arc.contains(offset + TAU * *k as f64 / count as f64))
                        .count() as u64;
                    assert_eq!(arc.count_equispaced(offset, count), brute, "{arc:?} {count} {offset}");
                }
            }
        }
    }

    #[test]
    fn overlapping_union_rejected() {
        assert!(ArcSet::new(vec![Arc::new(0.0, 2.0), Arc::new(1.0, 3.0)]).is_err());
        let s = ArcSet::new(vec![Arc::new(0.0, 1.0), Arc::new(1.0, 3.0)]).unwrap();
        assert!((s.measure() - 3.0 / TAU).abs() < 1e-15);
    }
}
