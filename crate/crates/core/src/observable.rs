//! Real trigonometric polynomials on the circle, used as observables and
//! potential perturbations.
//!
//! The textual form is a signed sum of terms such as `cos`, `0.1*cos`,
//! `cos2-cos`, `2*sin3+0.5`. `const:c` is accepted as a shorthand for the
//! constant `c`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Mode {
    Const,
    Cos(u32),
    Sin(u32),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Observable {
    terms: Vec<(f64, Mode)>,
}

impl Observable {
    pub fn zero() -> Self {
        Observable { terms: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Observable { terms: vec![(c, Mode::Const)] }
    }

    pub fn cos(k: u32) -> Self {
        Observable { terms: vec![(1.0, Mode::Cos(k))] }
    }

    pub fn sin(k: u32) -> Self {
        Observable { terms: vec![(1.0, Mode::Sin(k))] }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Observable { terms: self.terms.iter().map(|(a, m)| (a * c, *m)).collect() }
    }

    pub fn plus(&self, other: &Observable) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Observable { terms }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.terms
            .iter()
            .map(|(a, m)| match m {
                Mode::Const => *a,
                Mode::Cos(k) => a * (*k as f64 * theta).cos(),
                Mode::Sin(k) => a * (*k as f64 * theta).sin(),
            })
            .sum()
    }

    /// Evaluate at the unit complex number `z = e^{iθ}` using powers of `z`
    /// instead of trigonometric calls.
    pub fn eval_unit(&self, z: Complex64) -> f64 {
        self.terms
            .iter()
            .map(|(a, m)| match m {
                Mode::Const => *a,
                Mode::Cos(k) => a * z.powu(*k).re,
                Mode::Sin(k) => a * z.powu(*k).im,
            })
            .sum()
    }

    /// `∫ h dm`, the constant Fourier coefficient.
    pub fn mean(&self) -> f64 {
        self.terms
            .iter()
            .map(|(a, m)| match m {
                Mode::Const | Mode::Cos(0) => *a,
                _ => 0.0,
            })
            .sum()
    }

    /// `h - ∫ h dm`.
    pub fn centered(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(_, m)| !matches!(m, Mode::Const | Mode::Cos(0) | Mode::Sin(0)))
            .copied()
            .collect();
        Observable { terms }
    }

    /// `sup |h|` bound by the sum of absolute coefficients.
    pub fn sup_bound(&self) -> f64 {
        self.terms.iter().map(|(a, _)| a.abs()).sum()
    }

    /// Highest frequency present.
    pub fn bandwidth(&self) -> u32 {
        self.terms
            .iter()
            .map(|(_, m)| match m {
                Mode::Const => 0,
                Mode::Cos(k) | Mode::Sin(k) => *k,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.terms
            .iter()
            .all(|(a, m)| *a == 0.0 || matches!(m, Mode::Const | Mode::Cos(0) | Mode::Sin(0)))
    }
}

fn parse_term(text: &str) -> Result<(f64, Mode)> {
    let bad = || Error::InvalidInput(format!("cannot parse observable term `{text}`"));
    let (coef, atom) = match text.split_once('*') {
        Some((c, a)) => (c.trim().parse::<f64>().map_err(|_| bad())?, a.trim()),
        None => {
            if let Ok(c) = text.parse::<f64>() {
                return Ok((c, Mode::Const));
            }
            (1.0, text)
        }
    };
    let freq = |rest: &str| -> Result<u32> {
        if rest.is_empty() {
            Ok(1)
        } else {
            rest.parse().map_err(|_| bad())
        }
    };
    let mode = if let Some(rest) = atom.strip_prefix("cos") {
        Mode::Cos(freq(rest)?)
    } else if let Some(rest) = atom.strip_prefix("sin") {
        Mode::Sin(freq(rest)?)
    } else if atom == "1" {
        Mode::Const
    } else {
        return Err(bad());
    };
    if !coef.is_finite() {
        return Err(bad());
    }
    Ok((coef, mode))
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() || s == "none" || s == "0" {
            return Ok(Observable::zero());
        }
        if let Some(c) = s.strip_prefix("const:") {
            let c: f64 = c
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad constant `{c}`")))?;
            return Ok(Observable::constant(c));
        }
        let mut terms = Vec::new();
        let mut start = 0;
        let bytes = s.as_bytes();
        for i in 1..=bytes.len() {
            // split before a sign that is not part of an exponent
            let at_split = i == bytes.len()
                || ((bytes[i] == b'+' || bytes[i] == b'-')
                    && !matches!(bytes[i - 1], b'e' | b'E' | b'*'));
            if at_split {
                let piece = &s[start..i];
                let (sign, body) = match piece.as_bytes()[0] {
                    b'-' => (-1.0, &piece[1..]),
                    b'+' => (1.0, &piece[1..]),
                    _ => (1.0, piece),
                };
                let (c, m) = parse_term(body)?;
                terms.push((sign * c, m));
                start = i;
            }
        }
        Ok(Observable { terms })
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (a, m)) in self.terms.iter().enumerate() {
            if i > 0 && *a >= 0.0 {
                write!(f, "+")?;
            }
            match m {
                Mode::Const => write!(f, "{a}")?,
                Mode::Cos(k) => write!(f, "{a}*cos{k}")?,
                Mode::Sin(k) => write!(f, "{a}*sin{k}")?,
            }
        }
        Ok(())
    }
}

impl TryFrom<String> for Observable {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Observable> for String {
    fn from(o: Observable) -> String {
        o.to_string()
    }
}
