use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::markov::Word;

use super::ShiftPotential;

/// Alphabet `{1, ..., M}` with a 0/1 incidence matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicSystem {
    alphabet: usize,
    incidence: Vec<Vec<bool>>,
}

impl SymbolicSystem {
    pub fn new(incidence: Vec<Vec<bool>>) -> Result<Self> {
        let m = incidence.len();
        if m == 0 {
            return Err(Error::InvalidInput("empty alphabet".into()));
        }
        if incidence.iter().any(|row| row.len() != m) {
            return Err(Error::InvalidInput("incidence matrix must be square".into()));
        }
        Ok(SymbolicSystem { alphabet: m, incidence })
    }

    pub fn full(m: usize) -> Result<Self> {
        Self::new(vec![vec![true; m]; m])
    }

    /// `A = [[1,1],[1,0]]`: the letter 2 cannot follow itself.
    pub fn golden_mean() -> Self {
        SymbolicSystem { alphabet: 2, incidence: vec![vec![true, true], vec![true, false]] }
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    /// Whether `b` may follow `a` (letters from 1).
    pub fn admissible(&self, a: usize, b: usize) -> bool {
        self.incidence[a - 1][b - 1]
    }

    pub fn is_admissible(&self, w: &[usize]) -> bool {
        w.iter().all(|&a| (1..=self.alphabet).contains(&a)) && w.windows(2).all(|p| self.admissible(p[0], p[1]))
    }

    /// Admissible words of length `n` in lexicographic order.
    pub fn words(&self, n: usize) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..n {
            let mut next = Vec::new();
            for w in &out {
                for a in 1..=self.alphabet {
                    if w.last().is_none_or(|&b| self.admissible(b, a)) {
                        let mut v = w.clone();
                        v.push(a);
                        next.push(v);
                    }
                }
            }
            out = next;
        }
        out
    }

    /// Smallest length `ℓ ≤ max_len` at which words of length `ℓ` connect
    /// every ordered pair `(a, b)` through an admissible `aτb`; returns the
    /// connecting words of that length.
    pub fn check_finitely_primitive(&self, max_len: usize) -> Result<Vec<Word>> {
        if max_len > 8 {
            return Err(Error::InvalidInput("max_len must be <= 8".into()));
        }
        let m = self.alphabet;
        let mut word_count: f64 = 1.0;
        for len in 1..=max_len {
            word_count *= m as f64;
            if word_count > 1e6 {
                break;
            }
            let mut connected = vec![vec![false; m]; m];
            let mut witness = Vec::new();
            for tau in self.words(len) {
                let first = tau[0];
                let last = tau[len - 1];
                let mut used = false;
                for a in 1..=m {
                    if !self.admissible(a, first) {
                        continue;
                    }
                    for b in 1..=m {
                        if self.admissible(last, b) {
                            connected[a - 1][b - 1] = true;
                            used = true;
                        }
                    }
                }
                if used {
                    witness.push(Word(tau));
                }
            }
            if connected.iter().all(|row| row.iter().all(|&c| c)) {
                return Ok(witness);
            }
        }
        Err(Error::NotFoundWithinBudget { max_len })
    }
}

/// Locally constant potential of depth `k`, plus the regularity data of the
/// potential it approximates.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    pub depth: usize,
    pub values: BTreeMap<Word, f64>,
    /// Hölder exponent `α` and constant `v_α` of the approximated potential.
    pub alpha: f64,
    pub v_alpha: f64,
    /// Bound on `Σ sup e^ψ` over the letters dropped by truncation.
    pub tail_mass: f64,
}

impl PotentialSpec {
    pub fn new(depth: usize, values: BTreeMap<Word, f64>) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidInput("potential depth must be >= 1".into()));
        }
        if let Some((w, v)) = values.iter().find(|(w, v)| w.len() != depth || !v.is_finite()) {
            return Err(Error::InvalidInput(format!("bad potential entry {w} -> {v}")));
        }
        Ok(PotentialSpec { depth, values, alpha: 1.0, v_alpha: 0.0, tail_mass: 0.0 })
    }

    /// Depth-one potential with `values[a - 1]` on the cylinder `[a]`.
    pub fn letters(values: &[f64]) -> Result<Self> {
        let map = values.iter().enumerate().map(|(i, v)| (Word(vec![i + 1]), *v)).collect();
        Self::new(1, map)
    }

    /// `ψ = -2 log n` on `[n]`, `n = 1..=m`, with the tail `Σ_{n>m} n^{-2}`.
    pub fn gauss_like(m: usize) -> Result<Self> {
        let values: Vec<f64> = (1..=m).map(|n| -2.0 * (n as f64).ln()).collect();
        let mut p = Self::letters(&values)?;
        p.alpha = 1.0;
        p.v_alpha = 0.0;
        p.tail_mass = 1.0 / m as f64;
        Ok(p)
    }
}

/// A symbolic system together with a potential, indexed for matrix work.
#[derive(Debug, Clone)]
pub struct ShiftModel {
    system: SymbolicSystem,
    potential: PotentialSpec,
    words: Vec<Vec<usize>>,
    psi: Vec<f64>,
    index: HashMap<Vec<usize>, usize>,
    /// For every word `u`: the words `v` with `v_2..v_k = u_1..u_{k-1}` and
    /// `v u_k` admissible.
    predecessors: Vec<Vec<usize>>,
}

impl ShiftModel {
    pub fn new(system: SymbolicSystem, potential: PotentialSpec) -> Result<Self> {
        let k = potential.depth;
        let words = system.words(k);
        if words.is_empty() {
            return Err(Error::InvalidInput("no admissible words at the potential depth".into()));
        }
        let mut psi = Vec::with_capacity(words.len());
        for w in &words {
            match potential.values.get(&Word(w.clone())) {
                Some(v) => psi.push(*v),
                None => {
                    return Err(Error::InvalidInput(format!("potential has no value on {}", Word(w.clone()))));
                }
            }
        }
        let index: HashMap<Vec<usize>, usize> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let predecessors = words
            .iter()
            .map(|u| {
                (1..=system.alphabet_size())
                    .filter_map(|a| {
                        let mut v = Vec::with_capacity(k);
                        v.push(a);
                        v.extend_from_slice(&u[..k - 1]);
                        if system.admissible(v[k - 1], u[k - 1]) {
                            index.get(&v).copied()
                        } else {
                            None
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(ShiftModel { system, potential, words, psi, index, predecessors })
    }

    pub fn system(&self) -> &SymbolicSystem {
        &self.system
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.potential
    }

    pub fn depth(&self) -> usize {
        self.potential.depth
    }

    /// Admissible depth-`k` words, the basis of the cylinder matrices.
    pub fn words(&self) -> &[Vec<usize>] {
        &self.words
    }

    /// `ψ` on each basis word.
    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    pub(crate) fn predecessors(&self, u: usize) -> &[usize] {
        &self.predecessors[u]
    }

    /// Index of the depth-`k` cylinder holding a word with the given prefix.
    pub fn cylinder_of(&self, letters: &[usize]) -> Result<usize> {
        let k = self.depth();
        if letters.len() < k {
            return Err(Error::InvalidInput(format!("seed word needs at least {k} letters")));
        }
        self.index
            .get(&letters[..k])
            .copied()
            .ok_or_else(|| Error::InvalidInput(format!("seed prefix {} is not admissible", Word(letters[..k].to_vec()))))
    }

    /// The same model with `ψ` replaced by `ψ - c`.
    pub fn shifted(&self, c: f64) -> ShiftModel {
        let mut out = self.clone();
        for v in out.potential.values.values_mut() {
            *v -= c;
        }
        for v in out.psi.iter_mut() {
            *v -= c;
        }
        out
    }

    /// `ψ - P(ψ)`, so that the leading eigenvalue at `s = 1` is one.
    pub fn calibrated(&self) -> Result<ShiftModel> {
        let s = super::spectral_data(self, Complex64::new(1.0, 0.0))?;
        Ok(self.shifted(s.lambda.re.ln()))
    }

    /// `sup ψ < 0`.
    pub fn is_negative(&self) -> bool {
        self.psi.iter().all(|v| *v < 0.0)
    }

    /// Birkhoff sum of `ψ` around the periodic orbit of the cyclic word `w`.
    pub fn periodic_sum(&self, w: &[usize]) -> Option<f64> {
        let n = w.len();
        let k = self.depth();
        if n == 0 || !self.system.admissible(w[n - 1], w[0]) || !self.system.is_admissible(w) {
            return None;
        }
        let mut total = 0.0;
        let mut window = Vec::with_capacity(k);
        for i in 0..n {
            window.clear();
            window.extend((0..k).map(|j| w[(i + j) % n]));
            total += self.psi[*self.index.get(&window)?];
        }
        Some(total)
    }
}

/// The front of the current word: its first `max(k - 1, 1)` letters.
impl ShiftPotential for ShiftModel {
    type State = Vec<usize>;

    fn alphabet_size(&self) -> usize {
        self.system.alphabet_size()
    }

    fn step(&self, letter: usize, front: &Vec<usize>) -> Option<(f64, Vec<usize>)> {
        if !self.system.admissible(letter, front[0]) {
            return None;
        }
        let k = self.depth();
        let mut v = Vec::with_capacity(k);
        v.push(letter);
        v.extend_from_slice(&front[..k - 1]);
        let psi = self.psi[*self.index.get(&v)?];
        let keep = front.len();
        let mut next = Vec::with_capacity(keep);
        next.push(letter);
        next.extend_from_slice(&front[..keep - 1]);
        Some((-psi, next))
    }

    fn min_increment(&self) -> f64 {
        self.psi.iter().map(|v| -v).fold(f64::INFINITY, f64::min)
    }
}

impl ShiftModel {
    /// Counting state for the seed `ξ`.
    pub fn seed_state(&self, xi: &[usize]) -> Result<Vec<usize>> {
        let keep = self.depth().saturating_sub(1).max(1);
        if xi.len() < keep || !self.system.is_admissible(xi) {
            return Err(Error::InvalidInput(format!("seed word needs {keep} admissible letters")));
        }
        Ok(xi[..keep].to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitivity_witnesses() {
        let full = SymbolicSystem::full(2).unwrap();
        let w = full.check_finitely_primitive(4).unwrap();
        assert_eq!(w, vec![Word(vec![1]), Word(vec![2])]);
        let golden = SymbolicSystem::golden_mean();
        let w = golden.check_finitely_primitive(4).unwrap();
        assert!(w.iter().all(|t| t.len() == 1));
        assert!(w.contains(&Word(vec![1])));
        let isolated = SymbolicSystem::new(vec![
            vec![true, false, true],
            vec![false, false, false],
            vec![true, false, true],
        ])
        .unwrap();
        assert!(matches!(isolated.check_finitely_primitive(8), Err(Error::NotFoundWithinBudget { .. })));
        assert!(full.check_finitely_primitive(9).is_err());
    }

    #[test]
    fn words_and_predecessors() {
        let golden = SymbolicSystem::golden_mean();
        assert_eq!(golden.words(3).len(), 5);
        let mut values = BTreeMap::new();
        for w in golden.words(2) {
            values.insert(Word(w), -1.0);
        }
        let m = ShiftModel::new(golden, PotentialSpec::new(2, values).unwrap()).unwrap();
        // [1,2] is preceded by [1,1] and [2,1]; [2,1] only by [1,2]
        let w12 = m.cylinder_of(&[1, 2]).unwrap();
        let w21 = m.cylinder_of(&[2, 1]).unwrap();
        assert_eq!(m.predecessors(w12).len(), 2);
        assert_eq!(m.predecessors(w21), &[w12]);
        assert_eq!(m.periodic_sum(&[1, 2]), Some(-2.0));
        assert_eq!(m.periodic_sum(&[2, 2]), None);
    }

    #[test]
    fn missing_values_are_rejected() {
        let p = PotentialSpec::letters(&[-1.0]).unwrap();
        assert!(ShiftModel::new(SymbolicSystem::full(2).unwrap(), p).is_err());
    }
}
