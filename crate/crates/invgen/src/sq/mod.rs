//! Statistical-query machinery.
//!
//! A statistical query asks for `E_{x∼D}[χ(x, f(x))]` up to an additive
//! tolerance. Here the labels are never seen directly: answers are simulated
//! from a sampler for `D` plus positive examples of `f` under `D`, combined
//! with an estimate of `Pr_D[f = 1]`.

mod disjunction;
mod halfspace;
mod pooled;
mod simulate;

use std::sync::Arc;

use crate::core::Assignment;
use crate::error::{Error, Result};

pub use disjunction::{default_ell, learn_sparse_disjunction_sq, DisjunctionLearner, Ell};
pub use halfspace::{learn_halfspace_sq, HalfspaceLearner};
pub use pooled::{empirical_bernstein, PooledOracle};
pub use simulate::{
    dfplus_cap, estimate_bias, simulate_sample_dfplus, simulate_stat, DfPlusSampler, SimulatedOracle,
};

/// A ±1 label.
pub type Label = i8;

pub type ChiFn = dyn Fn(&Assignment, Label) -> f64 + Send + Sync;
pub type VecChiFn = dyn Fn(&Assignment, Label, &mut [f64]) + Send + Sync;

/// A query `(χ, τ)` with `χ : {0,1}ⁿ × {−1,1} → [−1,1]`.
#[derive(Clone)]
pub struct StatQuery {
    chi: Arc<ChiFn>,
    tolerance: f64,
}

impl StatQuery {
    pub fn new(tolerance: f64, chi: impl Fn(&Assignment, Label) -> f64 + Send + Sync + 'static) -> Result<Self> {
        check_tolerance(tolerance)?;
        Ok(StatQuery { chi: Arc::new(chi), tolerance })
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// `χ(x, y)` clamped to `[−1, 1]`; the flag reports whether clamping happened.
    pub fn eval(&self, x: &Assignment, y: Label) -> (f64, bool) {
        clamp_unit((self.chi)(x, y))
    }
}

/// A batch of statistical queries sharing one evaluation pass; counts as `dim` queries.
#[derive(Clone)]
pub struct VecQuery {
    chi: Arc<VecChiFn>,
    dim: usize,
    tolerance: f64,
}

impl VecQuery {
    pub fn new(
        dim: usize,
        tolerance: f64,
        chi: impl Fn(&Assignment, Label, &mut [f64]) + Send + Sync + 'static,
    ) -> Result<Self> {
        check_tolerance(tolerance)?;
        Ok(VecQuery { chi: Arc::new(chi), dim, tolerance })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Evaluates all coordinates into `out`, clamping; returns the number clamped.
    pub fn eval(&self, x: &Assignment, y: Label, out: &mut [f64]) -> usize {
        (self.chi)(x, y, out);
        let mut clamped = 0;
        for v in out.iter_mut() {
            let (c, hit) = clamp_unit(*v);
            *v = c;
            clamped += hit as usize;
        }
        clamped
    }

    /// The scalar query reading coordinate `j`.
    pub fn coordinate(&self, j: usize) -> StatQuery {
        let chi = Arc::clone(&self.chi);
        let dim = self.dim;
        StatQuery {
            chi: Arc::new(move |x, y| {
                let mut buf = vec![0.0; dim];
                chi(x, y, &mut buf);
                buf[j]
            }),
            tolerance: self.tolerance,
        }
    }
}

fn check_tolerance(tolerance: f64) -> Result<()> {
    if !(tolerance > 0.0 && tolerance <= 1.0) {
        return Err(Error::invalid(format!("query tolerance {tolerance} outside (0,1]")));
    }
    Ok(())
}

fn clamp_unit(v: f64) -> (f64, bool) {
    if v.is_nan() {
        (0.0, true)
    } else if v.abs() > 1.0 {
        (v.clamp(-1.0, 1.0), true)
    } else {
        (v, false)
    }
}

/// An oracle answer together with the confidence radius the oracle can vouch for.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Answer {
    pub value: f64,
    pub radius: f64,
}

/// Something that answers statistical queries about a fixed `(f, D)`.
pub trait StatOracle {
    fn answer(&mut self, q: &StatQuery) -> Result<Answer>;

    fn answer_vec(&mut self, q: &VecQuery) -> Result<Vec<Answer>> {
        (0..q.dim()).map(|j| self.answer(&q.coordinate(j))).collect()
    }

    /// Failure probability each subsequent answer is allowed.
    fn set_query_confidence(&mut self, delta: f64);
}

/// Declared resource profile of an SQ learner.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct LearnerSpec {
    pub query_budget: u64,
    pub eval_cost: f64,
    pub min_tolerance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct BiasEstimate {
    pub value: f64,
    pub claimed_accuracy: f64,
}

impl BiasEstimate {
    pub fn new(value: f64, claimed_accuracy: f64) -> Self {
        BiasEstimate { value: value.clamp(0.0, 1.0), claimed_accuracy }
    }
}

/// A learner that only touches the target through statistical queries.
pub trait SqLearner {
    fn spec(&self) -> LearnerSpec;
    fn learn(&self, oracle: &mut dyn StatOracle) -> Result<crate::core::BoolFunc>;
}

/// Wraps an oracle and enforces a [`LearnerSpec`]: every query must meet the
/// tolerance floor and the total may not exceed the budget.
pub struct GuardedOracle<'a> {
    inner: &'a mut dyn StatOracle,
    spec: LearnerSpec,
    issued: u64,
    tolerances: Vec<f64>,
}

impl<'a> GuardedOracle<'a> {
    pub fn new(inner: &'a mut dyn StatOracle, spec: LearnerSpec) -> Self {
        GuardedOracle { inner, spec, issued: 0, tolerances: Vec::new() }
    }

    pub fn issued(&self) -> u64 {
        self.issued
    }

    pub fn tolerances(&self) -> &[f64] {
        &self.tolerances
    }

    fn admit(&mut self, count: u64, tolerance: f64) -> Result<()> {
        if tolerance < self.spec.min_tolerance * (1.0 - 1e-12) {
            return Err(Error::invalid(format!(
                "query tolerance {tolerance} below the declared floor {}",
                self.spec.min_tolerance
            )));
        }
        self.issued += count;
        if self.issued > self.spec.query_budget {
            return Err(Error::BudgetExceeded { issued: self.issued as usize, budget: self.spec.query_budget as usize });
        }
        self.tolerances.extend(std::iter::repeat_n(tolerance, count as usize));
        Ok(())
    }
}

impl StatOracle for GuardedOracle<'_> {
    fn answer(&mut self, q: &StatQuery) -> Result<Answer> {
        self.admit(1, q.tolerance())?;
        self.inner.answer(q)
    }

    fn answer_vec(&mut self, q: &VecQuery) -> Result<Vec<Answer>> {
        self.admit(q.dim() as u64, q.tolerance())?;
        self.inner.answer_vec(q)
    }

    fn set_query_confidence(&mut self, delta: f64) {
        self.inner.set_query_confidence(delta);
    }
}

/// Runs an SQ learner against a simulated oracle, answering each query at
/// confidence `δ/(2T₁)` and enforcing the learner's declared spec.
pub fn run_sq_learner(
    learner: &dyn SqLearner,
    oracle: &mut dyn StatOracle,
    delta: f64,
) -> Result<crate::core::BoolFunc> {
    let spec = learner.spec();
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!("delta must lie in (0,1), got {delta}")));
    }
    oracle.set_query_confidence(delta / (2.0 * spec.query_budget.max(1) as f64));
    let mut guarded = GuardedOracle::new(oracle, spec);
    learner.learn(&mut guarded)
}
