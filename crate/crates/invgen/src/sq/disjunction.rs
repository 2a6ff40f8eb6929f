use std::sync::Arc;

use super::{run_sq_learner, LearnerSpec, SqLearner, StatOracle, StatQuery};
use crate::core::{BoolFunc, Conjunction, FeatureDisjunction};
use crate::error::{Error, Result};

/// The noise-tolerance polynomial `ℓ`.
pub type Ell = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `ℓ(z) = z²/8`.
pub fn default_ell() -> Ell {
    Arc::new(|z| z * z / 8.0)
}

/// Elimination learner for disjunctions over a fixed list of conjunction features.
///
/// Asks for `Pr_D[f = 1]` and, for every feature `Cᵢ`, for `Pr_D[Cᵢ(x) ∧ f(x) = −1]`
/// at tolerance `ε/(8N)`; keeps the features whose estimate is at most
/// `2·max(τ, r) + ℓ(ε/k)`, where `r` is the radius the oracle reports (with an
/// oracle meeting `τ` this is the threshold `ε/(4N) + ℓ(ε/k)`).
pub struct DisjunctionLearner {
    n: usize,
    features: Arc<Vec<Conjunction>>,
    k: usize,
    epsilon: f64,
    ell: Ell,
}

impl DisjunctionLearner {
    pub fn new(n: usize, features: Vec<Conjunction>, k: usize, epsilon: f64, ell: Ell) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::invalid(format!("epsilon must lie in (0,1), got {epsilon}")));
        }
        if k == 0 {
            return Err(Error::invalid("sparsity k must be at least 1"));
        }
        Ok(DisjunctionLearner { n, features: Arc::new(features), k, epsilon, ell })
    }

    pub fn feature_count(&self) -> usize {
        self.features.len()
    }

    fn tolerance(&self) -> f64 {
        self.epsilon / (8.0 * self.features.len().max(1) as f64)
    }
}

impl SqLearner for DisjunctionLearner {
    fn spec(&self) -> LearnerSpec {
        let n = self.features.len();
        LearnerSpec { query_budget: n as u64 + 1, eval_cost: n.max(1) as f64, min_tolerance: self.tolerance() }
    }

    fn learn(&self, oracle: &mut dyn StatOracle) -> Result<BoolFunc> {
        let tol = self.tolerance();
        let positive = oracle.answer(&StatQuery::new(tol, |_, y| if y > 0 { 1.0 } else { 0.0 })?)?;
        let slack = (self.ell)(self.epsilon / self.k as f64);
        let mut selected = Vec::new();
        for i in 0..self.features.len() {
            let features = Arc::clone(&self.features);
            let q = StatQuery::new(tol, move |x, y| if y < 0 && features[i].evaluate(x) { 1.0 } else { 0.0 })?;
            let a = oracle.answer(&q)?;
            if a.value <= 2.0 * tol.max(a.radius) + slack {
                selected.push(i);
            }
        }
        if positive.value <= self.epsilon {
            return Ok(BoolFunc::ConstFalse { n: self.n });
        }
        Ok(BoolFunc::FeatureDisjunction(FeatureDisjunction::new(self.n, self.features.to_vec(), selected)?))
    }
}

/// Runs the elimination learner through [`run_sq_learner`].
pub fn learn_sparse_disjunction_sq(
    oracle: &mut dyn StatOracle,
    n: usize,
    features: Vec<Conjunction>,
    k: usize,
    epsilon: f64,
    delta: f64,
) -> Result<BoolFunc> {
    let learner = DisjunctionLearner::new(n, features, k, epsilon, default_ell())?;
    run_sq_learner(&learner, oracle, delta)
}
