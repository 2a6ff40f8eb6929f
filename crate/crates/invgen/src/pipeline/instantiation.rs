use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::Budget;
use crate::core::{BoolFunc, Conjunction, Literal};
use crate::densify::{
    densify_dnf, densify_kdnf, densify_ltf, exact_ltf_counter, exact_ltf_sampler, DensifierParams,
    DnfDensifierOutput, KdnfDensifierOutput, LtfDensifierOutput,
};
use crate::error::{Error, Result};
use crate::genct::{make_forward_tools, BottomSampler, ForwardTools};
use crate::sq::{default_ell, DisjunctionLearner, Ell, HalfspaceLearner, SqLearner};

/// The function class an inversion targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum ClassTag {
    Ltf,
    Dnf { s: usize },
    Kdnf { k: usize },
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassTag::Ltf => write!(f, "ltf"),
            ClassTag::Dnf { s } => write!(f, "dnf:{s}"),
            ClassTag::Kdnf { k } => write!(f, "kdnf:{k}"),
        }
    }
}

impl FromStr for ClassTag {
    type Err = Error;

    /// Parses `ltf`, `dnf:<s>` or `kdnf:<k>`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((a, b)) => (a, Some(b)),
            None => (s, None),
        };
        let param = |what: &str| -> Result<usize> {
            let v: usize = arg
                .ok_or_else(|| Error::invalid(format!("class {name} needs a parameter {what}")))?
                .parse()
                .map_err(|_| Error::invalid(format!("bad {what} in class tag {s:?}")))?;
            if v == 0 {
                return Err(Error::invalid(format!("{what} must be at least 1")));
            }
            Ok(v)
        };
        match name {
            "ltf" if arg.is_none() => Ok(ClassTag::Ltf),
            "dnf" => Ok(ClassTag::Dnf { s: param("s")? }),
            "kdnf" => Ok(ClassTag::Kdnf { k: param("k")? }),
            _ => Err(Error::invalid(format!("unknown class tag {s:?}"))),
        }
    }
}

/// Densifier output for any class.
#[derive(Clone, Debug)]
pub enum Densified {
    Ltf(LtfDensifierOutput),
    Dnf(DnfDensifierOutput),
    Kdnf(KdnfDensifierOutput),
}

impl Densified {
    pub fn g(&self) -> Result<BoolFunc> {
        match self {
            Densified::Ltf(o) => Ok(BoolFunc::Ltf(o.g.clone())),
            Densified::Dnf(o) => o.to_bool_func(),
            Densified::Kdnf(o) => Ok(o.g.clone()),
        }
    }

    pub fn gamma(&self) -> f64 {
        match self {
            Densified::Ltf(o) => o.gamma,
            Densified::Dnf(o) => o.gamma,
            Densified::Kdnf(o) => o.gamma,
        }
    }

    /// Terms emitted (DNF) or online rounds used (LTF); 1 for the constant densifier.
    pub fn size(&self) -> usize {
        match self {
            Densified::Ltf(o) => o.rounds as usize,
            Densified::Dnf(o) => o.terms.len(),
            Densified::Kdnf(_) => 1,
        }
    }
}

/// Every satisfiable conjunction of 1 to `k` literals over `n` variables.
pub fn all_short_conjunctions(n: usize, k: usize) -> Vec<Conjunction> {
    fn extend(n: usize, k: usize, start: usize, cur: &mut Vec<Literal>, out: &mut Vec<Conjunction>) {
        if !cur.is_empty() {
            out.push(Conjunction::new(cur).expect("distinct variables"));
        }
        if cur.len() == k {
            return;
        }
        for v in start..=n {
            for lit in [Literal::pos(v), Literal::neg(v)] {
                cur.push(lit);
                extend(n, k, v + 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(n, k, 1, &mut Vec::new(), &mut out);
    out
}

/// Class-specific densifier, forward tools and SQ learner.
#[derive(Clone)]
pub struct Instantiation {
    pub class: ClassTag,
    pub n: usize,
    pub ell: Ell,
}

impl fmt::Debug for Instantiation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Instantiation").field("class", &self.class).field("n", &self.n).finish()
    }
}

pub fn make_instantiation(class: ClassTag, n: usize) -> Result<Instantiation> {
    if n == 0 || n > crate::core::MAX_DIM {
        return Err(Error::invalid(format!("dimension {n} out of range")));
    }
    if let ClassTag::Kdnf { k } = class {
        if k > n {
            return Err(Error::invalid(format!("k={k} exceeds n={n}")));
        }
    }
    Ok(Instantiation { class, n, ell: default_ell() })
}

impl Instantiation {
    /// Density the densifier promises for the given accuracy and confidence.
    pub fn declared_gamma(&self, epsilon: f64, delta: f64) -> Result<f64> {
        Ok(match self.class {
            ClassTag::Ltf => DensifierParams::ltf(self.n, epsilon, delta, 1.0)?.gamma,
            ClassTag::Dnf { s } => DensifierParams::dnf(self.n, s, epsilon, delta, 1.0, Arc::clone(&self.ell))?.gamma,
            ClassTag::Kdnf { k } => densify_kdnf(self.n, k).gamma,
        })
    }

    pub fn densify(
        &self,
        pos: &dyn BottomSampler,
        p_hat: f64,
        epsilon: f64,
        delta: f64,
        budget: &Budget,
        rng: &mut dyn RngCore,
    ) -> Result<Densified> {
        match self.class {
            ClassTag::Ltf => {
                let params = DensifierParams::ltf(self.n, epsilon, delta, p_hat)?;
                Ok(Densified::Ltf(densify_ltf(pos, &params, &exact_ltf_counter, &exact_ltf_sampler, rng)?))
            }
            ClassTag::Dnf { s } => {
                let params = DensifierParams::dnf(self.n, s, epsilon, delta, p_hat, Arc::clone(&self.ell))?
                    .with_max_iterations(budget.densifier_iterations);
                let out = densify_dnf(pos, &params, self.n, s, rng)?;
                if out.terms.is_empty() {
                    return Err(Error::DensifierFailure("no candidate term passed the mass filter".into()));
                }
                Ok(Densified::Dnf(out))
            }
            ClassTag::Kdnf { k } => Ok(Densified::Kdnf(densify_kdnf(self.n, k))),
        }
    }

    /// Feature space of the disjunction learner; `None` for threshold functions.
    pub fn feature_space(&self, d: &Densified) -> Option<Vec<Conjunction>> {
        match (self.class, d) {
            (ClassTag::Dnf { .. }, Densified::Dnf(o)) => Some(o.terms.clone()),
            (ClassTag::Kdnf { k }, _) => Some(all_short_conjunctions(self.n, k)),
            _ => None,
        }
    }

    pub fn learner(&self, d: &Densified, epsilon: f64, budget: &Budget) -> Result<Box<dyn SqLearner>> {
        match self.class {
            ClassTag::Ltf => {
                Ok(Box::new(HalfspaceLearner::new(self.n, epsilon)?.with_max_rounds(budget.learner_rounds)))
            }
            ClassTag::Dnf { s } => {
                let features = self.feature_space(d).ok_or_else(|| Error::invalid("densifier output is not a DNF"))?;
                Ok(Box::new(DisjunctionLearner::new(self.n, features, s, epsilon, Arc::clone(&self.ell))?))
            }
            ClassTag::Kdnf { .. } => {
                let features = self.feature_space(d).unwrap_or_default();
                let sparsity = features.len().max(1);
                Ok(Box::new(DisjunctionLearner::new(self.n, features, sparsity, epsilon, Arc::clone(&self.ell))?))
            }
        }
    }

    pub fn forward_tools(&self, g: &BoolFunc, budget: &Budget) -> Result<ForwardTools> {
        Ok(make_forward_tools(g)?.with_trial_cap(budget.count_trials))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densify::DnfDensifierOutput;

    #[test]
    fn parse_tags() {
        assert_eq!("ltf".parse::<ClassTag>().unwrap(), ClassTag::Ltf);
        assert_eq!("dnf:2".parse::<ClassTag>().unwrap(), ClassTag::Dnf { s: 2 });
        assert_eq!("kdnf:3".parse::<ClassTag>().unwrap(), ClassTag::Kdnf { k: 3 });
        for bad in ["cnf", "dnf", "dnf:0", "kdnf:x", "ltf:1"] {
            assert!(bad.parse::<ClassTag>().unwrap_err().is_input_error(), "{bad}");
        }
        assert_eq!(ClassTag::Dnf { s: 4 }.to_string().parse::<ClassTag>().unwrap(), ClassTag::Dnf { s: 4 });
    }

    #[test]
    fn short_conjunction_counts() {
        assert_eq!(all_short_conjunctions(3, 1).len(), 6);
        // 2n + 4·C(n,2)
        assert_eq!(all_short_conjunctions(12, 2).len(), 24 + 4 * 66);
        let cs = all_short_conjunctions(4, 3);
        let set: std::collections::HashSet<_> = cs.iter().collect();
        assert_eq!(set.len(), cs.len());
        assert_eq!(cs.len(), 8 + 24 + 32);
    }

    #[test]
    fn learner_wiring() {
        let ltf = make_instantiation(ClassTag::Ltf, 6).unwrap();
        let d = Densified::Kdnf(densify_kdnf(6, 1));
        let spec = ltf.learner(&d, 0.1, &Budget::default()).unwrap().spec();
        assert_eq!(spec.min_tolerance, 0.1 / 48.0);

        let dnf = make_instantiation(ClassTag::Dnf { s: 2 }, 6).unwrap();
        let terms: Vec<Conjunction> = all_short_conjunctions(6, 1).into_iter().take(5).collect();
        let d = Densified::Dnf(DnfDensifierOutput {
            n: 6,
            terms,
            witnesses: vec![Vec::new(); 5],
            iterations: 1,
            declared_m: 1.0,
            gamma: 0.5,
        });
        assert_eq!(dnf.feature_space(&d).unwrap().len(), 5);
        assert_eq!(dnf.learner(&d, 0.1, &Budget::default()).unwrap().spec().query_budget, 6);

        let kdnf = make_instantiation(ClassTag::Kdnf { k: 1 }, 3).unwrap();
        let d = Densified::Kdnf(densify_kdnf(3, 1));
        assert_eq!(kdnf.feature_space(&d).unwrap().len(), 6);
        assert!(make_instantiation(ClassTag::Kdnf { k: 4 }, 3).is_err());
    }
}
