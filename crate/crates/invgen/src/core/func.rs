use std::fmt;

use super::assignment::{mask, Assignment, MAX_DIM};
use crate::error::{Error, Result};

/// Default bound on the magnitude of threshold-function weights.
pub const W_MAX: i64 = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    /// 1-based variable index.
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal { var, positive: true }
    }

    pub fn neg(var: usize) -> Self {
        Literal { var, positive: false }
    }

    /// Signed 1-based form used by the function file format.
    pub fn signed(&self) -> i64 {
        if self.positive {
            self.var as i64
        } else {
            -(self.var as i64)
        }
    }

    pub fn from_signed(v: i64) -> Result<Self> {
        if v == 0 || v.unsigned_abs() as usize > MAX_DIM {
            return Err(Error::invalid(format!("literal {v} out of range")));
        }
        Ok(Literal { var: v.unsigned_abs() as usize, positive: v > 0 })
    }

    pub fn holds(&self, x: &Assignment) -> bool {
        x.get(self.var - 1) == self.positive
    }
}

/// An AND of literals, kept as a pair of variable masks.
///
/// The mask form is canonical, so equality and hashing dedupe conjunctions
/// regardless of the order their literals were listed in.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Conjunction {
    pos: u64,
    neg: u64,
}

impl Conjunction {
    /// The empty conjunction, true everywhere.
    pub const TRUE: Conjunction = Conjunction { pos: 0, neg: 0 };

    /// Builds a conjunction, rejecting a variable that occurs with both polarities.
    pub fn new(literals: &[Literal]) -> Result<Self> {
        let c = Conjunction::lenient(literals)?;
        if !c.is_satisfiable() {
            return Err(Error::invalid("conjunction contains a variable with both polarities"));
        }
        Ok(c)
    }

    /// Builds a conjunction that may be contradictory (and hence false everywhere).
    pub fn lenient(literals: &[Literal]) -> Result<Self> {
        let mut c = Conjunction::TRUE;
        for l in literals {
            if l.var == 0 || l.var > MAX_DIM {
                return Err(Error::invalid(format!("variable {} out of range", l.var)));
            }
            let bit = 1u64 << (l.var - 1);
            if l.positive {
                c.pos |= bit;
            } else {
                c.neg |= bit;
            }
        }
        Ok(c)
    }

    pub fn from_masks(pos: u64, neg: u64) -> Self {
        Conjunction { pos, neg }
    }

    /// The conjunction of all literals on which every point of `points` agrees.
    pub fn common_literals(points: &[Assignment]) -> Option<Self> {
        let first = points.first()?;
        let n = first.dim();
        let (mut all_one, mut all_zero) = (mask(n), mask(n));
        for x in points {
            all_one &= x.bits();
            all_zero &= !x.bits();
        }
        Some(Conjunction { pos: all_one, neg: all_zero & mask(n) })
    }

    pub fn pos_mask(&self) -> u64 {
        self.pos
    }

    pub fn neg_mask(&self) -> u64 {
        self.neg
    }

    pub fn width(&self) -> usize {
        (self.pos | self.neg).count_ones() as usize
    }

    pub fn is_satisfiable(&self) -> bool {
        self.pos & self.neg == 0
    }

    /// Largest variable index mentioned, 0 for the empty conjunction.
    pub fn max_var(&self) -> usize {
        64 - (self.pos | self.neg).leading_zeros() as usize
    }

    pub fn literals(&self) -> Vec<Literal> {
        let mut out = Vec::with_capacity(self.width());
        for i in 0..64 {
            let bit = 1u64 << i;
            if self.pos & bit != 0 {
                out.push(Literal::pos(i + 1));
            }
            if self.neg & bit != 0 {
                out.push(Literal::neg(i + 1));
            }
        }
        out
    }

    #[inline]
    pub fn eval_bits(&self, bits: u64) -> bool {
        bits & self.pos == self.pos && bits & self.neg == 0
    }

    pub fn evaluate(&self, x: &Assignment) -> bool {
        self.eval_bits(x.bits())
    }

    /// Fraction of the cube on which the conjunction holds.
    pub fn mass(&self) -> f64 {
        if self.is_satisfiable() {
            0.5f64.powi(self.width() as i32)
        } else {
            0.0
        }
    }

    /// True when every point satisfying `self` also satisfies `other`.
    pub fn implies(&self, other: &Conjunction) -> bool {
        !self.is_satisfiable() || (other.pos & !self.pos == 0 && other.neg & !self.neg == 0)
    }
}

impl fmt::Debug for Conjunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lits: Vec<i64> = self.literals().iter().map(Literal::signed).collect();
        write!(f, "Conjunction{lits:?}")
    }
}

/// Integer-weight linear threshold function: true iff `Σ wᵢ(2bᵢ−1) ≥ θ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ltf {
    weights: Vec<i64>,
    theta: i64,
}

impl Ltf {
    pub fn new(weights: Vec<i64>, theta: i64) -> Result<Self> {
        Ltf::with_bound(weights, theta, W_MAX)
    }

    pub fn with_bound(weights: Vec<i64>, theta: i64, w_max: i64) -> Result<Self> {
        if weights.len() > MAX_DIM {
            return Err(Error::Capacity(format!("dimension {} exceeds {MAX_DIM}", weights.len())));
        }
        if let Some(w) = weights.iter().find(|w| w.abs() > w_max) {
            return Err(Error::invalid(format!("weight {w} exceeds bound {w_max}")));
        }
        Ok(Ltf { weights, theta })
    }

    pub fn constant_true(n: usize) -> Self {
        Ltf { weights: vec![0; n], theta: 0 }
    }

    pub fn constant_false(n: usize) -> Self {
        Ltf { weights: vec![0; n], theta: 1 }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn theta(&self) -> i64 {
        self.theta
    }

    /// `Σ wᵢ(2bᵢ−1)` at `x`.
    pub fn dot(&self, x: &Assignment) -> i64 {
        let bits = x.bits();
        self.weights
            .iter()
            .enumerate()
            .map(|(i, &w)| if (bits >> i) & 1 == 1 { w } else { -w })
            .sum()
    }

    pub fn eval_unchecked(&self, x: &Assignment) -> bool {
        self.dot(x) >= self.theta
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dnf {
    n: usize,
    terms: Vec<Conjunction>,
}

impl Dnf {
    pub fn new(n: usize, terms: Vec<Conjunction>) -> Result<Self> {
        if n > MAX_DIM {
            return Err(Error::Capacity(format!("dimension {n} exceeds {MAX_DIM}")));
        }
        if terms.is_empty() {
            return Err(Error::invalid("a DNF needs at least one term"));
        }
        if let Some(t) = terms.iter().find(|t| t.max_var() > n) {
            return Err(Error::invalid(format!("term {t:?} mentions a variable beyond n={n}")));
        }
        Ok(Dnf { n, terms })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// The same function with every term that implies another term removed.
    pub fn absorbed(&self) -> Dnf {
        let mut kept: Vec<Conjunction> = Vec::new();
        for (i, t) in self.terms.iter().enumerate() {
            let redundant = self.terms.iter().enumerate().any(|(j, u)| {
                j != i && t.implies(u) && (!u.implies(t) || j < i) && u.is_satisfiable()
            });
            if !redundant {
                kept.push(*t);
            }
        }
        if kept.is_empty() {
            kept.push(self.terms[0]);
        }
        Dnf { n: self.n, terms: kept }
    }

    pub fn terms(&self) -> &[Conjunction] {
        &self.terms
    }

    pub fn eval_unchecked(&self, x: &Assignment) -> bool {
        let b = x.bits();
        self.terms.iter().any(|t| t.eval_bits(b))
    }
}

/// A disjunction of a selected subset of a fixed list of conjunction features.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FeatureDisjunction {
    n: usize,
    features: Vec<Conjunction>,
    selected: Vec<usize>,
}

impl FeatureDisjunction {
    pub fn new(n: usize, features: Vec<Conjunction>, mut selected: Vec<usize>) -> Result<Self> {
        if n > MAX_DIM {
            return Err(Error::Capacity(format!("dimension {n} exceeds {MAX_DIM}")));
        }
        if let Some(&i) = selected.iter().find(|&&i| i >= features.len()) {
            return Err(Error::invalid(format!("selected feature {i} out of range {}", features.len())));
        }
        if let Some(t) = features.iter().find(|t| t.max_var() > n) {
            return Err(Error::invalid(format!("feature {t:?} mentions a variable beyond n={n}")));
        }
        selected.sort_unstable();
        selected.dedup();
        Ok(FeatureDisjunction { n, features, selected })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn features(&self) -> &[Conjunction] {
        &self.features
    }

    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    pub fn selected_terms(&self) -> impl Iterator<Item = &Conjunction> + '_ {
        self.selected.iter().map(move |&i| &self.features[i])
    }

    pub fn eval_unchecked(&self, x: &Assignment) -> bool {
        let b = x.bits();
        self.selected_terms().any(|t| t.eval_bits(b))
    }
}

/// Every representation the library evaluates, counts or samples.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BoolFunc {
    Ltf(Ltf),
    Dnf(Dnf),
    Conjunction { n: usize, term: Conjunction },
    FeatureDisjunction(FeatureDisjunction),
    ConstTrue { n: usize },
    ConstFalse { n: usize },
}

impl BoolFunc {
    pub fn conjunction(n: usize, term: Conjunction) -> Result<Self> {
        if term.max_var() > n {
            return Err(Error::invalid(format!("term {term:?} mentions a variable beyond n={n}")));
        }
        Ok(BoolFunc::Conjunction { n, term })
    }

    pub fn dim(&self) -> usize {
        match self {
            BoolFunc::Ltf(f) => f.dim(),
            BoolFunc::Dnf(f) => f.dim(),
            BoolFunc::FeatureDisjunction(f) => f.dim(),
            BoolFunc::Conjunction { n, .. } | BoolFunc::ConstTrue { n } | BoolFunc::ConstFalse { n } => *n,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            BoolFunc::Ltf(_) => "ltf",
            BoolFunc::Dnf(_) => "dnf",
            BoolFunc::Conjunction { .. } => "conjunction",
            BoolFunc::FeatureDisjunction(_) => "features",
            BoolFunc::ConstTrue { .. } => "true",
            BoolFunc::ConstFalse { .. } => "false",
        }
    }

    pub fn evaluate(&self, x: &Assignment) -> Result<bool> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.dim() });
        }
        Ok(self.eval_unchecked(x))
    }

    /// Evaluation without the dimension check, for hot loops over points
    /// already known to have the right dimension.
    #[inline]
    pub fn eval_unchecked(&self, x: &Assignment) -> bool {
        match self {
            BoolFunc::Ltf(f) => f.eval_unchecked(x),
            BoolFunc::Dnf(f) => f.eval_unchecked(x),
            BoolFunc::Conjunction { term, .. } => term.evaluate(x),
            BoolFunc::FeatureDisjunction(f) => f.eval_unchecked(x),
            BoolFunc::ConstTrue { .. } => true,
            BoolFunc::ConstFalse { .. } => false,
        }
    }

    /// Rewrites conjunctions and feature disjunctions as plain DNFs.
    pub fn lower_to_dnf(&self) -> Result<Dnf> {
        match self {
            BoolFunc::Dnf(f) => Ok(f.clone()),
            BoolFunc::Conjunction { n, term } => Dnf::new(*n, vec![*term]),
            BoolFunc::ConstTrue { n } => Dnf::new(*n, vec![Conjunction::TRUE]),
            BoolFunc::FeatureDisjunction(f) => {
                if f.selected().is_empty() {
                    return Err(Error::Infeasible("feature disjunction selects no feature".into()));
                }
                Dnf::new(f.dim(), f.selected_terms().copied().collect())
            }
            BoolFunc::ConstFalse { .. } => Err(Error::Infeasible("constant-false function has no terms".into())),
            BoolFunc::Ltf(_) => Err(Error::Unsupported("an LTF has no DNF lowering".into())),
        }
    }
}

impl From<Ltf> for BoolFunc {
    fn from(f: Ltf) -> Self {
        BoolFunc::Ltf(f)
    }
}

impl From<Dnf> for BoolFunc {
    fn from(f: Dnf) -> Self {
        BoolFunc::Dnf(f)
    }
}

impl From<FeatureDisjunction> for BoolFunc {
    fn from(f: FeatureDisjunction) -> Self {
        BoolFunc::FeatureDisjunction(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(s: &str) -> Assignment {
        s.parse().unwrap()
    }

    #[test]
    fn majority_of_three() {
        let f = BoolFunc::Ltf(Ltf::new(vec![1, 1, 1], 1).unwrap());
        assert!(f.evaluate(&pt("110")).unwrap());
        assert!(!f.evaluate(&pt("000")).unwrap());
        assert!(f.evaluate(&pt("11")).is_err());
    }

    #[test]
    fn dnf_evaluation() {
        let t1 = Conjunction::new(&[Literal::pos(1), Literal::neg(2)]).unwrap();
        let t2 = Conjunction::new(&[Literal::pos(3)]).unwrap();
        let f = BoolFunc::Dnf(Dnf::new(3, vec![t1, t2]).unwrap());
        assert!(f.evaluate(&pt("100")).unwrap());
        assert!(!f.evaluate(&pt("110")).unwrap());
        assert!(f.evaluate(&pt("011")).unwrap());
    }

    #[test]
    fn conjunction_invariants() {
        assert!(Conjunction::new(&[Literal::pos(2), Literal::neg(2)]).is_err());
        let c = Conjunction::lenient(&[Literal::pos(2), Literal::neg(2)]).unwrap();
        assert!(!c.is_satisfiable());
        assert_eq!(c.mass(), 0.0);
        let a = Conjunction::new(&[Literal::neg(3), Literal::pos(1)]).unwrap();
        let b = Conjunction::new(&[Literal::pos(1), Literal::neg(3)]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.literals(), vec![Literal::pos(1), Literal::neg(3)]);
        assert_eq!(a.max_var(), 3);
        assert!(a.implies(&Conjunction::new(&[Literal::pos(1)]).unwrap()));
    }

    #[test]
    fn common_literals_of_points() {
        let c = Conjunction::common_literals(&[pt("1101"), pt("1001")]).unwrap();
        assert_eq!(c.literals(), vec![Literal::pos(1), Literal::neg(3), Literal::pos(4)]);
    }

    #[test]
    fn weight_bound_enforced() {
        assert!(Ltf::new(vec![1001], 0).is_err());
        assert!(Ltf::with_bound(vec![1001], 0, 2000).is_ok());
    }

    #[test]
    fn feature_disjunction_checks_range() {
        let c = Conjunction::new(&[Literal::pos(1)]).unwrap();
        assert!(FeatureDisjunction::new(2, vec![c], vec![1]).is_err());
        let f = FeatureDisjunction::new(2, vec![c], vec![0, 0]).unwrap();
        assert_eq!(f.selected(), &[0]);
    }
}
