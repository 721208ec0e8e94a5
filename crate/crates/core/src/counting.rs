//! Sorted event ledgers for backward-orbit and word counting.
//!
//! An event is one backward orbit `(n, y)` (or one word `ω`) carrying its
//! Birkhoff value, e.g. `log|(F^{∘n})'(y)|`. Blocks of events that share a
//! value and are equispaced on the circle (the level sets of `z^d`) are stored
//! as a single weighted event so that counts up to `2^{40}` and beyond remain
//! cheap and exact.

use std::f64::consts::TAU;

use crate::circle::ArcSet;

#[derive(Debug, Clone, PartialEq)]
pub enum Site {
    /// A single point on the circle.
    Angle(f64),
    /// `count` points `offset + 2πk/count` on the circle.
    Orbit { offset: f64, count: u128 },
    /// A single point on the real line.
    Point(f64),
    /// A symbolic event with its membership in the counting set decided at
    /// enumeration time.
    Word { member: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub value: f64,
    pub weight: u128,
    pub site: Site,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountingLedger {
    events: Vec<Event>,
    t_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticRow {
    pub t: f64,
    pub n: u128,
    /// `N(T) e^{-T}`.
    pub scaled: f64,
    /// `m(B) / Λ`.
    pub predicted: f64,
    pub ratio: f64,
}

impl CountingLedger {
    /// Ledger complete for values `≤ t_max`; events are sorted stably by value.
    pub fn new(mut events: Vec<Event>, t_max: f64) -> Self {
        events.retain(|e| e.value <= t_max && e.weight > 0);
        events.sort_by(|a, b| a.value.total_cmp(&b.value));
        CountingLedger { events, t_max }
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// Total weight of the events.
    pub fn total(&self) -> u128 {
        self.events.iter().map(|e| e.weight).sum()
    }

    /// `N(T)` with the strict convention `value < T`, or `value ≤ T` when
    /// `closed` is set.
    pub fn count(&self, t: f64, closed: bool) -> u128 {
        let end = if closed {
            self.events.partition_point(|e| e.value <= t)
        } else {
            self.events.partition_point(|e| e.value < t)
        };
        self.events[..end].iter().map(|e| e.weight).sum()
    }

    /// Keep the events for which `weight_in` reports a positive weight.
    pub fn restrict_by<F: Fn(&Event) -> u128>(&self, weight_in: F) -> CountingLedger {
        let events = self
            .events
            .iter()
            .map(|e| Event { weight: weight_in(e), ..e.clone() })
            .filter(|e| e.weight > 0)
            .collect();
        CountingLedger { events, t_max: self.t_max }
    }

    /// Events located in a union of arcs (half-open convention). Events on
    /// the real line or symbolic events are dropped.
    pub fn restrict_arcs(&self, set: &ArcSet) -> CountingLedger {
        self.restrict_by(|e| match e.site {
            Site::Angle(t) => u128::from(set.contains(t)),
            Site::Orbit { offset, count } => {
                if count <= u64::MAX as u128 {
                    set.count_equispaced(offset, count as u64) as u128
                } else {
                    count_equispaced_wide(set, count)
                }
            }
            _ => 0,
        })
    }

    /// Events on the real line inside a union of half-open intervals `[a, b)`.
    pub fn restrict_intervals(&self, intervals: &[(f64, f64)]) -> CountingLedger {
        self.restrict_by(|e| match e.site {
            Site::Point(x) => u128::from(intervals.iter().any(|(a, b)| x >= *a && x < *b)),
            _ => 0,
        })
    }

    /// Symbolic events whose word lies in the counting set.
    pub fn restrict_members(&self) -> CountingLedger {
        self.restrict_by(|e| match e.site {
            Site::Word { member } => u128::from(member) * e.weight,
            _ => 0,
        })
    }

    /// `(1/T) ∫_0^T N(t) e^{-t} dt`, exactly: each event with value `v < T`
    /// contributes `e^{-v} - e^{-T}`.
    pub fn cesaro(&self, t: f64) -> f64 {
        if !(t > 0.0) {
            return f64::NAN;
        }
        let tail = (-t).exp();
        let end = self.events.partition_point(|e| e.value < t);
        let sum: f64 = self.events[..end]
            .iter()
            .map(|e| e.weight as f64 * ((-e.value).exp() - tail))
            .sum();
        sum / t
    }

    /// `Σ weight · e^{-s·value}`, the Laplace–Stieltjes transform of `N`
    /// truncated at `t_max`.
    pub fn stieltjes(&self, s: f64) -> f64 {
        self.events.iter().rev().map(|e| e.weight as f64 * (-s * e.value).exp()).sum()
    }

    /// Cumulative step function `(value, N(value))` at each distinct value,
    /// closed convention.
    pub fn steps(&self) -> Vec<(f64, u128)> {
        let mut out: Vec<(f64, u128)> = Vec::new();
        let mut total = 0;
        for e in &self.events {
            total += e.weight;
            match out.last_mut() {
                Some(last) if last.0 == e.value => last.1 = total,
                _ => out.push((e.value, total)),
            }
        }
        out
    }

    /// Rows `(T, N(T), N(T)e^{-T}, m(B)/Λ, ratio)` on a grid of `T`.
    pub fn asymptotic_report(&self, lyapunov: f64, measure: f64, t_grid: &[f64], closed: bool) -> Vec<AsymptoticRow> {
        let predicted = measure / lyapunov;
        t_grid
            .iter()
            .map(|&t| {
                let n = self.count(t, closed);
                let scaled = n as f64 * (-t).exp();
                AsymptoticRow { t, n, scaled, predicted, ratio: scaled / predicted }
            })
            .collect()
    }
}

/// Equispaced count for blocks too large for `u64`: the point spacing is far
/// below double precision, so each partial arc contributes its measure share.
fn count_equispaced_wide(set: &ArcSet, count: u128) -> u128 {
    set.arcs()
        .iter()
        .map(|a| if a.length() >= TAU { count } else { (a.measure() * count as f64).floor() as u128 })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::Arc;
    use std::f64::consts::PI;

    fn ledger() -> CountingLedger {
        let events = (0..=7)
            .map(|n| Event {
                value: n as f64 * 2f64.ln(),
                weight: 1 << n,
                site: Site::Orbit { offset: 0.3 / (1 << n) as f64, count: 1 << n },
            })
            .collect();
        CountingLedger::new(events, 5.0)
    }

    #[test]
    fn counts_and_conventions() {
        let l = ledger();
        assert_eq!(l.count(5.0, false), 255);
        assert_eq!(l.count(-1.0, false), 0);
        let two = 2f64.ln();
        assert_eq!(l.count(two, false), 1);
        assert_eq!(l.count(two, true), 3);
    }

    #[test]
    fn restriction_is_additive() {
        let l = ledger();
        let a = ArcSet::new(vec![Arc::new(0.0, PI)]).unwrap();
        let b = ArcSet::new(vec![Arc::new(PI, 0.0)]).unwrap();
        let both = ArcSet::full();
        let na = l.restrict_arcs(&a).count(5.0, false);
        let nb = l.restrict_arcs(&b).count(5.0, false);
        assert_eq!(na + nb, l.restrict_arcs(&both).count(5.0, false));
        assert_eq!(na, 1 + 127);
        assert_eq!(l.restrict_arcs(&ArcSet::empty()).total(), 0);
    }

    #[test]
    fn cesaro_of_trivial_event() {
        let l = CountingLedger::new(vec![Event { value: 0.0, weight: 1, site: Site::Angle(0.0) }], 1.0);
        let t: f64 = 1e-6;
        assert!((l.cesaro(t) - (1.0 - (-t).exp()) / t).abs() < 1e-12);
        assert!((l.cesaro(t) - 1.0).abs() < 1e-5);
    }
}
