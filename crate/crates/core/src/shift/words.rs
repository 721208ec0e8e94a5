use crate::counting::{CountingLedger, Event, Site};
use crate::error::{Error, Result};
use crate::markov::Word;
use crate::par;

use super::ShiftPotential;

/// Hard cap on enumerated words.
pub const WORD_BUDGET: f64 = 1e7;

/// Finite union of cylinders `[w]`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CylinderSet {
    pub words: Vec<Word>,
}

impl CylinderSet {
    pub fn new(words: Vec<Word>) -> Self {
        CylinderSet { words }
    }

    /// Longest defining word.
    pub fn depth(&self) -> usize {
        self.words.iter().map(Word::len).max().unwrap_or(0)
    }

    pub fn contains(&self, letters: &[usize]) -> bool {
        self.words.iter().any(|w| letters.starts_with(w.letters()))
    }
}

/// All words `ω` with `S_{|ω|}(-ψ)(ωξ) ≤ t`, depth first over prepended
/// letters. `seed_letters` must hold enough of `ξ` to decide membership of
/// `ωξ` in `b`; without `b` every word is a member.
pub fn count_words<P: ShiftPotential>(
    system: &P,
    seed: &P::State,
    seed_letters: &[usize],
    t: f64,
    b: Option<&CylinderSet>,
) -> Result<CountingLedger> {
    if !t.is_finite() {
        return Err(Error::InvalidInput("T must be finite".into()));
    }
    if t < 0.0 {
        return Ok(CountingLedger::new(Vec::new(), t));
    }
    let min = system.min_increment();
    if !(min > 0.0) {
        return Err(Error::InvalidInput("counting needs -ψ bounded below by a positive constant".into()));
    }
    let need = b.map_or(0, CylinderSet::depth);
    if seed_letters.len() < need {
        return Err(Error::InvalidInput(format!("seed needs {need} letters to test cylinder membership")));
    }
    let member = |prefix: &[usize]| -> bool {
        match b {
            None => true,
            Some(set) => {
                let mut head: Vec<usize> = prefix.iter().rev().copied().collect();
                head.extend_from_slice(&seed_letters[..need.saturating_sub(head.len()).min(seed_letters.len())]);
                set.contains(&head)
            }
        }
    };
    let letters: Vec<usize> = (1..=system.alphabet_size()).collect();
    let subtrees: Vec<Result<Vec<Event>>> = par::map_slice(&letters, |&a| match system.step(a, seed) {
        Some((v, state)) if v <= t => subtree(system, a, state, v, t, &member),
        _ => Ok(Vec::new()),
    });
    let mut events = vec![Event { value: 0.0, weight: 1, site: Site::Word { member: member(&[]) } }];
    for s in subtrees {
        events.extend(s?);
    }
    if events.len() as f64 > WORD_BUDGET {
        return Err(Error::BudgetExceeded { predicted: events.len() as f64, budget: WORD_BUDGET });
    }
    Ok(CountingLedger::new(events, t))
}

fn subtree<P: ShiftPotential, M: Fn(&[usize]) -> bool>(
    system: &P,
    letter: usize,
    state: P::State,
    value: f64,
    t: f64,
    member: &M,
) -> Result<Vec<Event>> {
    let mut out = Vec::new();
    // prepended letters, most recent last; `depth` is the stack height of each frame
    let mut prefix: Vec<usize> = Vec::new();
    let mut stack = vec![(1usize, letter, state, value)];
    while let Some((depth, a, state, v)) = stack.pop() {
        prefix.truncate(depth - 1);
        prefix.push(a);
        out.push(Event { value: v, weight: 1, site: Site::Word { member: member(&prefix) } });
        if out.len() as f64 > WORD_BUDGET {
            return Err(Error::BudgetExceeded { predicted: out.len() as f64, budget: WORD_BUDGET });
        }
        for c in (1..=system.alphabet_size()).rev() {
            if let Some((inc, next)) = system.step(c, &state) {
                let w = v + inc;
                if w <= t {
                    stack.push((depth + 1, c, next, w));
                }
            }
        }
    }
    Ok(out)
}
