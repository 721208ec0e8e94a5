//! JSON map descriptions shared by the command line and the browser demo.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::blaschke::BlaschkeMap;
use crate::error::{Error, Result};
use crate::markov::Word;
use crate::parabolic::ParabolicMap;
use crate::shift::{PotentialSpec, ShiftModel, SymbolicSystem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MapSpec {
    /// Zeros as `[re, im]` pairs, the first one `[0, 0]`.
    Blaschke {
        zeros: Vec<[f64; 2]>,
        #[serde(default)]
        rotation: f64,
    },
    Monomial { d: usize },
    /// Poles as `[b, t]` pairs.
    Parabolic {
        poles: Vec<[f64; 2]>,
        #[serde(default)]
        translation: f64,
    },
    Symbolic {
        alphabet: usize,
        incidence: Incidence,
        potential: PotentialConfig,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Incidence {
    /// Only `"full"` is accepted.
    Named(String),
    Matrix(Vec<Vec<u8>>),
}

/// Keys of `values` are comma-separated words, `"1,2"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub depth: usize,
    pub values: BTreeMap<String, f64>,
    #[serde(default = "one")]
    pub alpha: f64,
    #[serde(default)]
    pub v_alpha: f64,
}

fn one() -> f64 {
    1.0
}

impl MapSpec {
    /// Accepts inline JSON, or a path to a JSON file when the text does not
    /// start with `{`.
    pub fn parse(text: &str) -> Result<Self> {
        let body = if text.trim_start().starts_with('{') {
            text.to_string()
        } else {
            std::fs::read_to_string(text.trim()).map_err(|e| Error::InvalidInput(format!("cannot read map file {text}: {e}")))?
        };
        serde_json::from_str(&body).map_err(|e| Error::InvalidInput(format!("bad map spec: {e}")))
    }

    pub fn blaschke(&self) -> Result<BlaschkeMap> {
        match self {
            MapSpec::Blaschke { zeros, rotation } => {
                BlaschkeMap::new(zeros.iter().map(|[re, im]| Complex64::new(*re, *im)).collect(), *rotation)
            }
            MapSpec::Monomial { d } => BlaschkeMap::monomial(*d),
            _ => Err(Error::InvalidInput("this command needs a blaschke or monomial map".into())),
        }
    }

    pub fn parabolic(&self) -> Result<ParabolicMap> {
        match self {
            MapSpec::Parabolic { poles, translation } => ParabolicMap::new(poles.iter().map(|[b, t]| (*b, *t)).collect(), *translation),
            _ => Err(Error::InvalidInput("this command needs a parabolic map".into())),
        }
    }

    pub fn symbolic(&self) -> Result<ShiftModel> {
        let MapSpec::Symbolic { alphabet, incidence, potential } = self else {
            return Err(Error::InvalidInput("this command needs a symbolic system".into()));
        };
        let system = match incidence {
            Incidence::Named(name) if name == "full" => SymbolicSystem::full(*alphabet)?,
            Incidence::Named(name) => return Err(Error::InvalidInput(format!("unknown incidence `{name}`"))),
            Incidence::Matrix(rows) => {
                if rows.len() != *alphabet {
                    return Err(Error::InvalidInput("incidence matrix size differs from the alphabet".into()));
                }
                SymbolicSystem::new(rows.iter().map(|r| r.iter().map(|e| *e != 0).collect()).collect())?
            }
        };
        let values = potential
            .values
            .iter()
            .map(|(k, v)| Ok((k.parse::<Word>()?, *v)))
            .collect::<Result<BTreeMap<Word, f64>>>()?;
        let mut spec = PotentialSpec::new(potential.depth, values)?;
        spec.alpha = potential.alpha;
        spec.v_alpha = potential.v_alpha;
        ShiftModel::new(system, spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_kind() {
        let m = MapSpec::parse(r#"{"kind":"monomial","d":3}"#).unwrap();
        assert_eq!(m.blaschke().unwrap().degree(), 3);
        let b = MapSpec::parse(r#"{"kind":"blaschke","zeros":[[0,0],[0.5,0]],"rotation":0}"#).unwrap();
        assert_eq!(b.blaschke().unwrap().degree(), 2);
        let p = MapSpec::parse(r#"{"kind":"parabolic","poles":[[0,1]]}"#).unwrap();
        assert_eq!(p.parabolic().unwrap(), ParabolicMap::boole());
        let s = MapSpec::parse(
            r#"{"kind":"symbolic","alphabet":2,"incidence":[[1,1],[1,0]],
                "potential":{"depth":1,"values":{"1":-1.0,"2":-1.0}}}"#,
        )
        .unwrap();
        assert_eq!(s.symbolic().unwrap().system().alphabet_size(), 2);
        assert!(s.blaschke().is_err());
    }

    #[test]
    fn rejects_unknown_fields_and_kinds() {
        assert!(MapSpec::parse(r#"{"kind":"monomial","d":2,"extra":1}"#).is_err());
        assert!(MapSpec::parse(r#"{"kind":"mobius"}"#).is_err());
        let s = MapSpec::parse(
            r#"{"kind":"symbolic","alphabet":2,"incidence":"sparse","potential":{"depth":1,"values":{}}}"#,
        )
        .unwrap();
        assert!(s.symbolic().is_err());
    }

    #[test]
    fn round_trips() {
        let m = MapSpec::Parabolic { poles: vec![[-1.0, 0.5], [1.0, 0.5]], translation: 0.0 };
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(MapSpec::parse(&text).unwrap(), m);
    }
}
