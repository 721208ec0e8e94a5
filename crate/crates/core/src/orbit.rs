//! Backward-orbit enumeration on the circle.
//!
//! `n(x, T)` counts pairs `(n, y)` with `F^{∘n}(y) = x` and
//! `log|(F^{∘n})'(y)| < T`. The preimage tree is explored depth first; since
//! `|F'| > 1` on the circle the accumulated log-derivative strictly increases
//! along every branch, so a branch is cut as soon as it passes `T`.
//!
//! For `e^{iθ} z^d` every level is a single block of `d^n` equispaced points
//! with the common value `n log d`, and the ledger is written in closed form.

use std::f64::consts::TAU;

use crate::blaschke::BlaschkeMap;
use crate::circle::{reduce_angle, CirclePoint};
use crate::counting::{CountingLedger, Event, Site};
use crate::error::{Error, Result};
use crate::par;

/// Node budget for explicit tree enumeration.
pub const NODE_BUDGET: f64 = 1e7;

/// Predicted node count `4 e^T / Λ` of the explicit enumeration.
pub fn predicted_nodes(lyapunov: f64, t: f64) -> f64 {
    4.0 * t.exp() / lyapunov
}

/// All backward-orbit events of `x` with value `≤ t`.
pub fn enumerate(map: &BlaschkeMap, x: CirclePoint, t: f64) -> Result<CountingLedger> {
    if map.is_rotation() {
        return Err(Error::InvalidInput("counting needs degree >= 2".into()));
    }
    if !t.is_finite() {
        return Err(Error::InvalidInput("T must be finite".into()));
    }
    if t < 0.0 {
        return Ok(CountingLedger::new(Vec::new(), t));
    }
    if map.is_monomial() {
        return monomial_levels(map, x, t);
    }
    let lyapunov = map.lyapunov_exponent(4096)?;
    let predicted = predicted_nodes(lyapunov, t);
    if predicted > NODE_BUDGET {
        return Err(Error::BudgetExceeded { predicted, budget: NODE_BUDGET });
    }
    let first = map.boundary_preimages(x)?;
    let subtrees: Vec<Result<Vec<Event>>> = par::map_slice(&first, |y| {
        let v = map.boundary_derivative(y.angle()).ln();
        if v > t {
            return Ok(Vec::new());
        }
        subtree(map, *y, v, t)
    });
    let mut events = vec![Event { value: 0.0, weight: 1, site: Site::Angle(x.angle()) }];
    for s in subtrees {
        events.extend(s?);
    }
    if events.len() as f64 > NODE_BUDGET {
        return Err(Error::BudgetExceeded { predicted: events.len() as f64, budget: NODE_BUDGET });
    }
    Ok(CountingLedger::new(events, t))
}

fn subtree(map: &BlaschkeMap, root: CirclePoint, value: f64, t: f64) -> Result<Vec<Event>> {
    let mut out = Vec::new();
    let mut stack = vec![(root, value)];
    while let Some((y, v)) = stack.pop() {
        out.push(Event { value: v, weight: 1, site: Site::Angle(y.angle()) });
        if out.len() as f64 > NODE_BUDGET {
            return Err(Error::BudgetExceeded { predicted: out.len() as f64, budget: NODE_BUDGET });
        }
        for child in map.boundary_preimages(y)?.into_iter().rev() {
            let w = v + map.boundary_derivative(child.angle()).ln();
            if w <= t {
                stack.push((child, w));
            }
        }
    }
    Ok(out)
}

fn monomial_levels(map: &BlaschkeMap, x: CirclePoint, t: f64) -> Result<CountingLedger> {
    let d = map.degree() as u128;
    let step = (d as f64).ln();
    let rot = map.rotation();
    let mut events = Vec::new();
    let mut offset = x.angle();
    let mut count: u128 = 1;
    let mut level = 0u32;
    loop {
        let value = level as f64 * step;
        if value > t {
            break;
        }
        events.push(Event { value, weight: count, site: Site::Orbit { offset, count } });
        // the next level consists of the preimages of this one
        offset = reduce_angle(offset - rot) / d as f64;
        count = count.checked_mul(d).ok_or(Error::BudgetExceeded {
            predicted: (d as f64).powi(level as i32 + 1),
            budget: u128::MAX as f64,
        })?;
        level += 1;
    }
    Ok(CountingLedger::new(events, t))
}

/// Angle of the `k`-th point of an equispaced block.
pub fn block_point(offset: f64, count: u128, k: u128) -> f64 {
    reduce_angle(offset + TAU * (k as f64 / count as f64))
}
