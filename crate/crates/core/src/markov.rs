//! The classical Markov partition of a finite Blaschke product and the coding
//! of circle points by words.
//!
//! Given a boundary fixed point `p`, the `d` preimages of `p` cut the circle
//! into arcs `I_1, ..., I_d` (counterclockwise from `p`), each mapped
//! bijectively onto the circle minus `p`. Positions are handled as offsets
//! `u = angle - p ∈ [0, 2π)` so that every arc is an honest interval.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use crate::blaschke::BlaschkeMap;
use crate::circle::{reduce_angle, Arc, CirclePoint};
use crate::error::{Error, Result};
use crate::shift::ShiftPotential;

const FIXED_TOL: f64 = 1e-10;
const EXCEPTIONAL_TOL: f64 = 1e-12;

/// Finite word over `{1, ..., d}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().is_empty() {
            return Ok(Word(Vec::new()));
        }
        s.split(',')
            .map(|t| match t.trim().parse::<usize>() {
                Ok(a) if a >= 1 => Ok(a),
                _ => Err(Error::InvalidInput(format!("bad letter `{t}` in word"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

#[derive(Debug, Clone)]
pub struct MarkovPartition {
    map: BlaschkeMap,
    base: CirclePoint,
    /// Arc endpoints as offsets from the base point: `0 = e_1 < ... < e_{d+1} = 2π`.
    offsets: Vec<f64>,
    /// `Φ(p)`, the lift at the base point.
    base_lift: f64,
}

impl MarkovPartition {
    pub fn build(map: &BlaschkeMap, p: CirclePoint) -> Result<Self> {
        let d = map.degree();
        if d < 2 {
            return Err(Error::InvalidInput("a Markov partition needs degree >= 2".into()));
        }
        let residual = CirclePoint::new(map.circle_map(p.angle())).distance(p);
        if residual >= FIXED_TOL {
            return Err(Error::NotFixed { residual });
        }
        let pre = map.boundary_preimages(p)?;
        let mut offsets: Vec<f64> = pre
            .iter()
            .map(|y| {
                let u = (y.angle() - p.angle()).rem_euclid(TAU);
                if u > TAU - 1e-9 {
                    0.0
                } else {
                    u
                }
            })
            .collect();
        offsets.sort_by(f64::total_cmp);
        offsets[0] = 0.0;
        offsets.push(TAU);
        // Φ(p) ≡ p mod 2π; keep the representative produced by the lift itself
        let raw = map.lift(p.angle());
        let base_lift = p.angle() + TAU * ((raw - p.angle()) / TAU).round();
        Ok(MarkovPartition { map: map.clone(), base: p, offsets, base_lift })
    }

    pub fn map(&self) -> &BlaschkeMap {
        &self.map
    }

    pub fn base_point(&self) -> CirclePoint {
        self.base
    }

    pub fn degree(&self) -> usize {
        self.offsets.len() - 1
    }

    /// The arcs `I_1, ..., I_d` in counterclockwise order from the base point.
    pub fn arcs(&self) -> Vec<Arc> {
        self.offsets
            .windows(2)
            .map(|w| Arc::from_start_length(self.base.angle() + w[0], w[1] - w[0]).expect("positive arc"))
            .collect()
    }

    fn offset_of(&self, angle: f64) -> f64 {
        let u = (angle - self.base.angle()).rem_euclid(TAU);
        if u >= TAU {
            0.0
        } else {
            u
        }
    }

    /// Letter (1-based) of the arc containing `angle`, half-open convention.
    pub fn letter_of(&self, angle: f64) -> usize {
        let u = self.offset_of(angle);
        self.offsets[1..].iter().position(|e| u < *e).map_or(self.degree(), |i| i + 1)
    }

    /// Circular distance from `angle` to the nearest arc endpoint.
    pub fn endpoint_distance(&self, angle: f64) -> f64 {
        let u = self.offset_of(angle);
        self.offsets.iter().map(|e| (u - e).abs()).fold(f64::INFINITY, f64::min)
    }

    /// Itinerary of `x` under `F`: letter `n` is the arc holding `F^{∘n}(x)`.
    pub fn encode(&self, x: CirclePoint, depth: usize) -> Result<Word> {
        if depth == 0 {
            return Err(Error::InvalidInput("depth must be >= 1".into()));
        }
        let mut y = x.angle();
        let mut letters = Vec::with_capacity(depth);
        for step in 0..depth {
            let distance = self.endpoint_distance(y);
            if distance < EXCEPTIONAL_TOL {
                return Err(Error::ExceptionalPoint { step, distance });
            }
            letters.push(self.letter_of(y));
            y = self.map.circle_map(y);
        }
        Ok(Word(letters))
    }

    /// Inverse branch `g_a: ∂𝔻 \ {p} → I_a` in offset coordinates.
    pub fn inverse_branch(&self, letter: usize, offset: f64) -> Result<f64> {
        if letter == 0 || letter > self.degree() {
            return Err(Error::InvalidInput(format!("letter {letter} outside 1..={}", self.degree())));
        }
        let lo = self.offsets[letter - 1];
        let hi = self.offsets[letter];
        if offset <= 0.0 {
            return Ok(lo);
        }
        if offset >= TAU {
            return Ok(hi);
        }
        let p = self.base.angle();
        let target = self.base_lift + TAU * (letter - 1) as f64 + offset;
        let y = self.map.solve_lift(target, p + lo, p + hi)?;
        Ok((y - p).clamp(lo, hi))
    }

    /// Arc of points whose itinerary starts with `w`.
    pub fn cylinder_arc(&self, w: &Word) -> Result<Arc> {
        if w.is_empty() {
            return Err(Error::InvalidInput("cylinder word must be nonempty".into()));
        }
        let (mut lo, mut hi) = (0.0, TAU);
        for &a in w.letters().iter().rev() {
            lo = self.inverse_branch(a, lo)?;
            hi = self.inverse_branch(a, hi)?;
        }
        Arc::from_start_length(self.base.angle() + lo, hi - lo)
    }

    /// Lower bound on `log|F'|` over the circle, sampled on a fine grid and
    /// shaded down slightly.
    pub fn min_log_derivative(&self) -> f64 {
        let n = 4096;
        let min = (0..n)
            .map(|j| self.map.boundary_derivative(TAU * j as f64 / n as f64))
            .fold(f64::INFINITY, f64::min);
        0.99 * min.ln()
    }
}

/// The geometric potential `ψ = -log|F'∘π|` of the coded system, evaluated
/// exactly through the inverse branches. The state is the current point as an
/// offset from the base point.
impl ShiftPotential for MarkovPartition {
    type State = f64;

    fn alphabet_size(&self) -> usize {
        self.degree()
    }

    fn step(&self, letter: usize, state: &f64) -> Option<(f64, f64)> {
        let u = self.inverse_branch(letter, *state).ok()?;
        let angle = reduce_angle(self.base.angle() + u);
        Some((self.map.boundary_derivative(angle).ln(), u))
    }

    fn min_increment(&self) -> f64 {
        self.min_log_derivative()
    }
}
