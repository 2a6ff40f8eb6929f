//! File formats: functions as tagged JSON objects, samples as one 0/1 string per line.

use serde::{Deserialize, Serialize};

use super::{Assignment, BoolFunc, Conjunction, Dnf, FeatureDisjunction, Literal, Ltf};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum FuncRepr {
    Ltf { n: usize, weights: Vec<i64>, theta: i64 },
    Dnf { n: usize, terms: Vec<Vec<i64>> },
    Conjunction { n: usize, literals: Vec<i64> },
    Features { n: usize, features: Vec<Vec<i64>>, selected: Vec<usize> },
    True { n: usize },
    False { n: usize },
}

fn signed(c: &Conjunction) -> Vec<i64> {
    c.literals().iter().map(Literal::signed).collect()
}

fn parse_term(lits: &[i64]) -> Result<Conjunction> {
    let lits = lits.iter().map(|&v| Literal::from_signed(v)).collect::<Result<Vec<_>>>()?;
    Conjunction::lenient(&lits)
}

impl From<&BoolFunc> for FuncRepr {
    fn from(f: &BoolFunc) -> Self {
        match f {
            BoolFunc::Ltf(f) => FuncRepr::Ltf { n: f.dim(), weights: f.weights().to_vec(), theta: f.theta() },
            BoolFunc::Dnf(f) => FuncRepr::Dnf { n: f.dim(), terms: f.terms().iter().map(signed).collect() },
            BoolFunc::Conjunction { n, term } => FuncRepr::Conjunction { n: *n, literals: signed(term) },
            BoolFunc::FeatureDisjunction(f) => FuncRepr::Features {
                n: f.dim(),
                features: f.features().iter().map(signed).collect(),
                selected: f.selected().to_vec(),
            },
            BoolFunc::ConstTrue { n } => FuncRepr::True { n: *n },
            BoolFunc::ConstFalse { n } => FuncRepr::False { n: *n },
        }
    }
}

impl TryFrom<FuncRepr> for BoolFunc {
    type Error = Error;

    fn try_from(r: FuncRepr) -> Result<Self> {
        Ok(match r {
            FuncRepr::Ltf { n, weights, theta } => {
                if weights.len() != n {
                    return Err(Error::invalid(format!("ltf has {} weights but n={n}", weights.len())));
                }
                BoolFunc::Ltf(Ltf::new(weights, theta)?)
            }
            FuncRepr::Dnf { n, terms } => {
                let terms = terms.iter().map(|t| parse_term(t)).collect::<Result<Vec<_>>>()?;
                BoolFunc::Dnf(Dnf::new(n, terms)?)
            }
            FuncRepr::Conjunction { n, literals } => BoolFunc::conjunction(n, parse_term(&literals)?)?,
            FuncRepr::Features { n, features, selected } => {
                let features = features.iter().map(|t| parse_term(t)).collect::<Result<Vec<_>>>()?;
                BoolFunc::FeatureDisjunction(FeatureDisjunction::new(n, features, selected)?)
            }
            FuncRepr::True { n } => BoolFunc::ConstTrue { n },
            FuncRepr::False { n } => BoolFunc::ConstFalse { n },
        })
    }
}

impl Serialize for BoolFunc {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FuncRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for BoolFunc {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = FuncRepr::deserialize(d)?;
        BoolFunc::try_from(repr).map_err(serde::de::Error::custom)
    }
}

pub fn parse_function(text: &str) -> Result<BoolFunc> {
    serde_json::from_str(text).map_err(|e| Error::invalid(format!("function file: {e}")))
}

pub fn function_to_json(f: &BoolFunc) -> String {
    serde_json::to_string(f).expect("function serialization is infallible")
}

/// Parses a sample file; every nonblank line must be a 0/1 string of the same length.
pub fn parse_samples(text: &str, n: Option<usize>) -> Result<Vec<Assignment>> {
    let mut out = Vec::new();
    let mut dim = n;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let x: Assignment = line.parse().map_err(|e| Error::invalid(format!("line {}: {e}", lineno + 1)))?;
        match dim {
            Some(d) if d != x.dim() => {
                return Err(Error::invalid(format!("line {}: expected {d} bits, found {}", lineno + 1, x.dim())))
            }
            _ => dim = Some(x.dim()),
        }
        out.push(x);
    }
    Ok(out)
}

pub fn samples_to_string(points: &[Assignment]) -> String {
    let mut s = String::with_capacity(points.iter().map(|x| x.dim() + 1).sum());
    for x in points {
        s.push_str(&x.to_string());
        s.push('\n');
    }
    s
}
