//! Doubly parabolic maps `F(x) = x - Σ t_i/(x - b_i)` of the real line, their
//! Markov partition, first-return map to a core interval, the Kac identity
//! for the return log-derivative, and orbit counting for the induced system.
//!
//! `F` is increasing on each of the `d + 1` branch intervals cut out by the
//! poles `b_1 < ... < b_d` and maps each onto `ℝ`; `F' > 1` everywhere.

use crate::counting::{CountingLedger, Event, Site};
use crate::error::{Error, Result};
use crate::par;
use crate::quadrature::{gauss_legendre, tanh_sinh};

const RETURN_CAP: usize = 1_000_000;
/// Outer strata per side integrated explicitly in the Kac check: at least
/// `STRATA_MIN`, doubling until the modelled tail is below half of
/// `TAIL_FRACTION` of the right-hand side, at most `STRATA_CAP`.
pub const STRATA_MIN: usize = 10_000;
pub const STRATA_CAP: usize = 1 << 20;
const TAIL_FRACTION: f64 = 0.01;
const COUNT_BUDGET: f64 = 1e7;

#[derive(Debug, Clone, PartialEq)]
pub struct ParabolicMap {
    /// `(b_i, t_i)` sorted by `b_i`.
    poles: Vec<(f64, f64)>,
    a: f64,
}

impl ParabolicMap {
    /// Rejects a nonzero translation: `x + T - Σ t_i/(x - b_i)` is only
    /// singly parabolic.
    pub fn new(mut poles: Vec<(f64, f64)>, translation: f64) -> Result<Self> {
        if translation != 0.0 {
            return Err(Error::NotDoublyParabolic(format!("translation {translation} must vanish")));
        }
        if poles.is_empty() {
            return Err(Error::InvalidInput("at least one pole is required".into()));
        }
        if poles.iter().any(|(b, t)| !b.is_finite() || !(*t > 0.0) || !t.is_finite()) {
            return Err(Error::InvalidInput("poles need finite b and t > 0".into()));
        }
        poles.sort_by(|x, y| x.0.total_cmp(&y.0));
        if poles.windows(2).any(|w| w[1].0 - w[0].0 < 1e-9) {
            return Err(Error::InvalidInput("pole locations must be distinct".into()));
        }
        let a = poles.iter().map(|(_, t)| t).sum();
        Ok(ParabolicMap { poles, a })
    }

    /// `x - 1/x`.
    pub fn boole() -> Self {
        ParabolicMap { poles: vec![(0.0, 1.0)], a: 1.0 }
    }

    pub fn poles(&self) -> &[(f64, f64)] {
        &self.poles
    }

    /// `a = Σ t_i`, the coefficient in `F(z) = z - a/z + ...`.
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn eval(&self, x: f64) -> f64 {
        x - self.poles.iter().map(|(b, t)| t / (x - b)).sum::<f64>()
    }

    pub fn derivative(&self, x: f64) -> f64 {
        1.0 + self.poles.iter().map(|(b, t)| t / ((x - b) * (x - b))).sum::<f64>()
    }

    /// `log F'(x)`, accurate where `F' - 1` is tiny.
    pub fn log_derivative(&self, x: f64) -> f64 {
        self.poles.iter().map(|(b, t)| t / ((x - b) * (x - b))).sum::<f64>().ln_1p()
    }

    /// `log F'(b_i + δ)` with the distance to `b_i` supplied exactly.
    fn log_derivative_near(&self, i: usize, delta: f64) -> f64 {
        let x = self.poles[i].0 + delta;
        self.poles
            .iter()
            .enumerate()
            .map(|(j, (b, t))| {
                let d = if j == i { delta } else { x - b };
                t / (d * d)
            })
            .sum::<f64>()
            .ln_1p()
    }

    pub fn branch_count(&self) -> usize {
        self.poles.len() + 1
    }

    /// Branch `0` is `(-∞, b_1)`, branch `d` is `(b_d, ∞)`.
    pub fn branch_interval(&self, i: usize) -> (f64, f64) {
        let lo = if i == 0 { f64::NEG_INFINITY } else { self.poles[i - 1].0 };
        let hi = if i == self.poles.len() { f64::INFINITY } else { self.poles[i].0 };
        (lo, hi)
    }

    /// The unique `x` in branch `i` with `F(x) = y`.
    pub fn inverse_branch(&self, i: usize, y: f64) -> Result<f64> {
        if !y.is_finite() {
            return Err(Error::InvalidInput("preimage of a non-finite point".into()));
        }
        let (lo, hi) = self.branch_interval(i);
        // finite brackets: F(x) > x - 1 once x - b_d ≥ a + 1, and symmetrically
        let reach = self.a + 1.0;
        let mut lo = if lo.is_finite() { lo } else { y.min(self.poles[0].0) - reach };
        let mut hi = if hi.is_finite() { hi } else { y.max(self.poles[self.poles.len() - 1].0) + reach };
        let mut x = self.branch_guess(i, y).filter(|g| *g > lo && *g < hi).unwrap_or(0.5 * (lo + hi));
        for _ in 0..400 {
            let f = self.eval(x) - y;
            if f.abs() <= 4.0 * f64::EPSILON * y.abs().max(1.0) {
                return Ok(x);
            }
            if f < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            if hi - lo <= 4.0 * f64::EPSILON * x.abs().max(1e-300) {
                return Ok(x);
            }
            let newton = x - f / self.derivative(x);
            x = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        }
        Err(Error::BisectionFail { lo, hi })
    }

    /// Asymptotic root for large `|y|`: next to a pole, or `y + a/y` on the
    /// outer branch facing `y`.
    fn branch_guess(&self, i: usize, y: f64) -> Option<f64> {
        let d = self.poles.len();
        let span = self.poles[0].0.abs().max(self.poles[d - 1].0.abs());
        if y.abs() < 4.0 * (self.a + span + 1.0) {
            return None;
        }
        Some(match (y > 0.0, i) {
            (true, i) if i == d => y + self.a / y,
            (true, i) => self.poles[i].0 - self.poles[i].1 / y,
            (false, 0) => y + self.a / y,
            (false, i) => self.poles[i - 1].0 - self.poles[i - 1].1 / y,
        })
    }

    /// All `d + 1` real preimages, one per branch.
    pub fn preimages(&self, y: f64) -> Result<Vec<f64>> {
        (0..self.branch_count()).map(|i| self.inverse_branch(i, y)).collect()
    }

    /// `∫_ℝ log F' dℓ`, split at the poles, by double-exponential quadrature.
    pub fn lyapunov_integral(&self, tol: f64) -> f64 {
        let d = self.poles.len();
        let log_near = |i: usize, delta: f64| self.log_derivative_near(i, delta);
        // (-∞, b_1): x = b_1 - δ
        let mut total = tanh_sinh(0.0, 1.0, tol, |s, _, one_minus| {
            let delta = s / one_minus;
            let v = log_near(0, -delta) / (one_minus * one_minus);
            if v.is_finite() { v } else { 0.0 }
        });
        for i in 0..d.saturating_sub(1) {
            let (b0, b1) = (self.poles[i].0, self.poles[i + 1].0);
            total += tanh_sinh(b0, b1, tol, |_, da, db| if da <= db { log_near(i, da) } else { log_near(i + 1, -db) });
        }
        total += tanh_sinh(0.0, 1.0, tol, |s, _, one_minus| {
            let delta = s / one_minus;
            let v = log_near(d - 1, delta) / (one_minus * one_minus);
            if v.is_finite() { v } else { 0.0 }
        });
        total
    }

    /// Log-multipliers `log (F^{∘n})'(q)` of all periodic orbits of period
    /// `n ≤ max_period`, found as fixed points of composed inverse branches.
    pub fn periodic_log_multipliers(&self, max_period: usize) -> Vec<f64> {
        let k = self.branch_count();
        let mut out = Vec::new();
        for n in 1..=max_period {
            let total = k.pow(n as u32);
            for code in 0..total {
                let mut itinerary = Vec::with_capacity(n);
                let mut c = code;
                for _ in 0..n {
                    itinerary.push(c % k);
                    c /= k;
                }
                if let Some(v) = self.periodic_orbit(&itinerary) {
                    out.push(v);
                }
            }
        }
        out
    }

    /// `x ↦ g_{w_1} ∘ ... ∘ g_{w_n}(x)` with the visited points.
    fn pull_back(&self, itinerary: &[usize], x: f64) -> Option<Vec<f64>> {
        let mut chain = Vec::with_capacity(itinerary.len());
        let mut y = x;
        for &i in itinerary.iter().rev() {
            y = self.inverse_branch(i, y).ok()?;
            chain.push(y);
        }
        Some(chain)
    }

    fn periodic_orbit(&self, itinerary: &[usize]) -> Option<f64> {
        let (lo, hi) = self.branch_interval(itinerary[0]);
        let span = 1e6;
        let mut lo = if lo.is_finite() { lo + 1e-12 } else { -span };
        let mut hi = if hi.is_finite() { hi - 1e-12 } else { span };
        let h = |x: f64| -> Option<f64> { Some(x - *self.pull_back(itinerary, x)?.last()?) };
        let (hl, hh) = (h(lo)?, h(hi)?);
        if !(hl < 0.0 && hh > 0.0) {
            return None;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if h(mid)? < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let q = 0.5 * (lo + hi);
        let chain = self.pull_back(itinerary, q)?;
        Some(chain.iter().map(|y| self.derivative(*y).ln()).sum())
    }
}

/// Boundary orbits `p_1^± … p_{N+1}^±` with `F(p_{n+1}^±) = p_n^±`, where
/// `p_1^-`, `p_1^+` are the outermost poles.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPartition {
    pub level: usize,
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
    /// `√n · diam J_n` at `n = N` over the same at `n = N/10`; near one when
    /// the intervals shrink like `n^{-1/2}`. `NaN` for `N < 10`.
    pub growth_ratio: f64,
}

impl RealPartition {
    /// `X = [p_{N+1}^-, p_{N+1}^+]`.
    pub fn core(&self) -> (f64, f64) {
        (self.minus[self.level], self.plus[self.level])
    }

    pub fn contains(&self, x: f64) -> bool {
        let (lo, hi) = self.core();
        x >= lo && x <= hi
    }
}

pub fn real_markov_partition(map: &ParabolicMap, n: usize) -> Result<RealPartition> {
    if n == 0 || n > 10_000 {
        return Err(Error::InvalidInput("partition level must lie in 1..=10000".into()));
    }
    let d = map.poles.len();
    let mut plus = vec![map.poles[d - 1].0];
    let mut minus = vec![map.poles[0].0];
    for k in 0..n {
        plus.push(map.inverse_branch(d, plus[k])?);
        minus.push(map.inverse_branch(0, minus[k])?);
    }
    let growth_ratio = if n >= 10 {
        let scaled = |m: usize| (m as f64).sqrt() * (plus[m] - plus[m - 1]);
        scaled(n) / scaled(n / 10)
    } else {
        f64::NAN
    };
    Ok(RealPartition { level: n, plus, minus, growth_ratio })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReturnEvent {
    pub start: f64,
    pub return_point: f64,
    pub return_time: usize,
    pub log_deriv: f64,
}

/// `F̂(x) = F^{∘N(x)}(x)` for the first `N(x) ≥ 1` with `F^{∘N(x)}(x) ∈ [lo, hi]`.
pub fn first_return(map: &ParabolicMap, core: (f64, f64), x: f64) -> Result<ReturnEvent> {
    let (lo, hi) = core;
    if !(x >= lo && x <= hi) {
        return Err(Error::InvalidInput(format!("{x} lies outside [{lo}, {hi}]")));
    }
    let mut y = x;
    let mut log_deriv = 0.0;
    for n in 1..=RETURN_CAP {
        let slope = map.derivative(y);
        y = map.eval(y);
        if !y.is_finite() || !slope.is_finite() {
            return Err(Error::NoReturnWithinCap { cap: n });
        }
        log_deriv += slope.ln();
        if y >= lo && y <= hi {
            return Ok(ReturnEvent { start: x, return_point: y, return_time: n, log_deriv });
        }
    }
    Err(Error::NoReturnWithinCap { cap: RETURN_CAP })
}

#[derive(Debug, Clone, PartialEq)]
pub struct KacReport {
    /// `∫_X log F̂' dℓ`.
    pub lhs: f64,
    /// `∫_ℝ log F' dℓ`.
    pub rhs: f64,
    /// Modelled contribution of the strata beyond the cap.
    pub tail: f64,
    pub strata: usize,
    /// Sum of the lengths of all return strata, `≈ ℓ(X)`.
    pub strata_length: f64,
    pub core_length: f64,
}

/// State of one quadrature node while it is pulled outwards through the
/// strata of one side.
#[derive(Clone, Copy)]
struct StrataNode {
    branch: usize,
    plus: bool,
    y: f64,
    r: f64,
    weight: f64,
}

type Advanced = (StrataNode, Vec<f64>, Vec<f64>);

/// Advance every node through `len` further strata. Returns per-stratum
/// `(∫ R w, ∫ w)` for the `+` side and the `-` side. `R` is the
/// log-derivative of the trip back to `J_N` and `w(y)` the Jacobian sum of
/// the preimages of `y` lying in `X`; pulling each stratum back from `J_N`
/// lets the same nodes serve every stratum.
fn strata_block(
    map: &ParabolicMap,
    core: (f64, f64),
    nodes: &mut [StrataNode],
    len: usize,
) -> Result<[(Vec<f64>, Vec<f64>); 2]> {
    let (x_lo, x_hi) = core;
    let advanced: Vec<Result<Advanced>> = par::map_slice(nodes, |&node| {
        let mut node = node;
        let mut log_terms = Vec::with_capacity(len);
        let mut len_terms = Vec::with_capacity(len);
        for _ in 0..len {
            // node.y sits in the current stratum; its preimage on `branch` is in the next one
            let zs = map.preimages(node.y)?;
            let w: f64 = zs
                .iter()
                .enumerate()
                .filter(|(i, z)| *i != node.branch && **z >= x_lo && **z <= x_hi)
                .map(|(_, z)| 1.0 / map.derivative(*z))
                .sum();
            let jac = node.weight * (-node.r).exp();
            log_terms.push(node.r * w * jac);
            len_terms.push(w * jac);
            node.y = zs[node.branch];
            node.r += map.log_derivative(node.y);
        }
        Ok((node, log_terms, len_terms))
    });
    let mut out = [(vec![0.0; len], vec![0.0; len]), (vec![0.0; len], vec![0.0; len])];
    for (slot, result) in nodes.iter_mut().zip(advanced) {
        let (node, l, m) = result?;
        *slot = node;
        let side = &mut out[usize::from(!node.plus)];
        for j in 0..len {
            side.0[j] += l[j];
            side.1[j] += m[j];
        }
    }
    Ok(out)
}

/// Tail `Σ_{m>K} (α + β log m) m^{-3/2}` fitted through the last term and
/// the middle one, summed by the integral approximation.
/// `offset` is the stratum number of the first term minus one.
fn tail_model(terms: &[f64], offset: usize) -> f64 {
    let k = terms.len();
    let (m1, m2) = ((offset + k / 2) as f64, (offset + k) as f64);
    let (y1, y2) = (terms[k / 2 - 1] * m1.powf(1.5), terms[k - 1] * m2.powf(1.5));
    let beta = (y2 - y1) / (m2.ln() - m1.ln());
    let alpha = y1 - beta * m1.ln();
    // ∫_{K+1/2}^∞ (α + β log x) x^{-3/2} dx
    let x0 = m2 + 0.5;
    2.0 * x0.powf(-0.5) * (alpha + beta * (x0.ln() + 2.0))
}

pub fn kac_check(map: &ParabolicMap, n: usize, quad_points: usize) -> Result<KacReport> {
    if n == 0 {
        return Err(Error::InvalidInput("partition level must be >= 1".into()));
    }
    if !(2..=64).contains(&quad_points) {
        return Err(Error::InvalidInput("quad_points must lie in 2..=64".into()));
    }
    let part = real_markov_partition(map, n)?;
    let rhs = map.lyapunov_integral(1e-13);
    let (x_lo, x_hi) = part.core();

    // ∫_X log F' dℓ, split at the poles inside X
    let mut cuts = vec![x_lo];
    cuts.extend(map.poles.iter().map(|(b, _)| *b).filter(|b| *b > x_lo && *b < x_hi));
    cuts.push(x_hi);
    let mut inner = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        inner += tanh_sinh(a, b, 1e-13, |x, da, db| {
            let near = |c: f64, delta: f64| map.poles.iter().position(|(p, _)| *p == c).map(|i| map.log_derivative_near(i, delta));
            let d = if da <= db { near(a, da) } else { near(b, -db) };
            let v = d.unwrap_or_else(|| map.log_derivative(x));
            if v.is_finite() { v } else { 0.0 }
        });
    }
    // X ∩ F^{-1}(X): the return-time-one stratum
    // the outermost preimages leave X at y = p_N^±
    let jacobian_in_core = |y: f64| -> f64 {
        map.preimages(y)
            .map(|zs| zs.into_iter().filter(|z| *z >= x_lo && *z <= x_hi).map(|z| 1.0 / map.derivative(z)).sum())
            .unwrap_or(0.0)
    };
    let mut breaks = [x_lo, part.minus[n - 1], part.plus[n - 1], x_hi];
    breaks.sort_by(f64::total_cmp);
    let one_step: f64 = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| tanh_sinh(w[0], w[1], 1e-13, |y, _, _| jacobian_in_core(y)))
        .sum();

    let d = map.poles.len();
    let (gx, gw) = gauss_legendre(quad_points);
    let mut nodes = Vec::with_capacity(2 * quad_points);
    for (plus, branch, boundary) in [(true, d, &part.plus), (false, 0, &part.minus)] {
        let (lo, hi) = (boundary[n - 1].min(boundary[n]), boundary[n - 1].max(boundary[n]));
        for (x, w) in gx.iter().zip(&gw) {
            let y = map.inverse_branch(branch, lo + 0.5 * (hi - lo) * (x + 1.0))?;
            nodes.push(StrataNode { branch, plus, y, r: map.log_derivative(y), weight: 0.5 * (hi - lo) * w });
        }
    }
    let mut sides: [(Vec<f64>, Vec<f64>); 2] = Default::default();
    let mut tail = f64::INFINITY;
    while sides[0].0.len() < STRATA_CAP {
        let len = if sides[0].0.is_empty() { STRATA_MIN } else { sides[0].0.len().min(STRATA_CAP - sides[0].0.len()) };
        let block = strata_block(map, (x_lo, x_hi), &mut nodes, len)?;
        for (side, new) in sides.iter_mut().zip(block) {
            side.0.extend(new.0);
            side.1.extend(new.1);
        }
        tail = tail_model(&sides[0].0, n) + tail_model(&sides[1].0, n);
        if tail.abs() <= 0.5 * TAIL_FRACTION * rhs {
            break;
        }
    }
    let explicit: f64 = sides.iter().map(|s| s.0.iter().rev().sum::<f64>()).sum();
    let lengths: f64 = one_step + sides.iter().map(|s| s.1.iter().rev().sum::<f64>() + tail_model(&s.1, n)).sum::<f64>();
    let strata = sides[0].0.len();
    let lhs = inner + explicit + tail;
    if tail.abs() > TAIL_FRACTION * rhs {
        return Err(Error::TailBoundExceeded { tail, limit: TAIL_FRACTION * rhs });
    }
    Ok(KacReport {
        lhs,
        rhs,
        tail,
        strata: 2 * strata + 1,
        strata_length: lengths,
        core_length: x_hi - x_lo,
    })
}

/// Backward orbits of the first-return map: events `(log (F̂^{∘n})'(z), z)`
/// over all `z ∈ X` with `F̂^{∘n}(z) = x` and value `≤ t`.
pub fn parabolic_count(map: &ParabolicMap, part: &RealPartition, x: f64, t: f64) -> Result<CountingLedger> {
    if !part.contains(x) {
        return Err(Error::InvalidInput("seed must lie in the core interval".into()));
    }
    if !t.is_finite() {
        return Err(Error::InvalidInput("T must be finite".into()));
    }
    if t < 0.0 {
        return Ok(CountingLedger::new(Vec::new(), t));
    }
    let (x_lo, x_hi) = part.core();
    let rhs = map.lyapunov_integral(1e-10);
    let predicted = 4.0 * t.exp() * (x_hi - x_lo) / rhs;
    if predicted > COUNT_BUDGET {
        return Err(Error::BudgetExceeded { predicted, budget: COUNT_BUDGET });
    }
    let first = induced_preimages(map, part, x, t)?;
    let subtrees: Vec<Result<Vec<Event>>> = par::map_slice(&first, |&(z, v)| induced_subtree(map, part, z, v, t));
    let mut events = vec![Event { value: 0.0, weight: 1, site: Site::Point(x) }];
    for s in subtrees {
        events.extend(s?);
    }
    Ok(CountingLedger::new(events, t))
}

/// `F̂`-preimages of `x` with log-derivative `≤ budget`, in branch order
/// along each excursion outside `X`.
fn induced_preimages(map: &ParabolicMap, part: &RealPartition, x: f64, budget: f64) -> Result<Vec<(f64, f64)>> {
    let (x_lo, x_hi) = part.core();
    let reach = x_lo.abs().max(x_hi.abs());
    let a = map.a();
    let mut out = Vec::new();
    // points outside X on the way back, with the log-derivative accumulated so far
    let mut stack = vec![(x, 0.0f64)];
    while let Some((y, r)) = stack.pop() {
        for z in map.preimages(y)?.into_iter().rev() {
            let v = r + map.derivative(z).ln();
            if v > budget {
                continue;
            }
            if z >= x_lo && z <= x_hi {
                out.push((z, v));
            } else {
                // landing from z adds at least log(1 + (|z| - reach)^2 / a)
                let gap = (z.abs() - reach).max(0.0);
                if v + (1.0 + gap * gap / a).ln() <= budget {
                    stack.push((z, v));
                }
            }
        }
    }
    Ok(out)
}

fn induced_subtree(map: &ParabolicMap, part: &RealPartition, root: f64, value: f64, t: f64) -> Result<Vec<Event>> {
    let mut out = Vec::new();
    let mut stack = vec![(root, value)];
    while let Some((z, v)) = stack.pop() {
        out.push(Event { value: v, weight: 1, site: Site::Point(z) });
        if out.len() as f64 > COUNT_BUDGET {
            return Err(Error::BudgetExceeded { predicted: out.len() as f64, budget: COUNT_BUDGET });
        }
        for (w, dv) in induced_preimages(map, part, z, t - v)?.into_iter().rev() {
            stack.push((w, v + dv));
        }
    }
    Ok(out)
}
