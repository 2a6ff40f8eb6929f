//! Forward counting and uniform generation.
//!
//! Threshold functions are counted and sampled exactly by dynamic programming
//! over partial sums. DNFs are counted with the Karp–Luby union estimator and
//! sampled exactly with the minimal-index rejection rule.

mod dnf;
mod ltf;

use std::sync::Arc;

use rand::RngCore;

use crate::core::{Assignment, BoolFunc};
use crate::error::{Error, Result};

pub use dnf::{dnf_count, dnf_count_with_trials, dnf_sample, karp_luby_trials, DnfSampler};
pub use ltf::{ltf_count_exact, ltf_sample_exact, LtfSampler, LtfTable, DP_CELL_CAP};

/// A randomized generator that either emits a point or gives up with ⊥ (`None`).
pub trait BottomSampler<T = Assignment>: Send + Sync {
    fn generate(&self, rng: &mut dyn RngCore) -> Option<T>;

    /// Multiplicative accuracy of the non-⊥ output relative to uniform.
    fn epsilon(&self) -> f64 {
        0.0
    }

    /// Upper bound on the probability of emitting ⊥.
    fn bottom_probability(&self) -> f64 {
        0.0
    }
}

impl<T, S: BottomSampler<T> + ?Sized> BottomSampler<T> for Arc<S> {
    fn generate(&self, rng: &mut dyn RngCore) -> Option<T> {
        (**self).generate(rng)
    }

    fn epsilon(&self) -> f64 {
        (**self).epsilon()
    }

    fn bottom_probability(&self) -> f64 {
        (**self).bottom_probability()
    }
}

/// A sampler built from a closure, handy for fixtures and adapters.
pub struct FnSampler<F>(pub F);

impl<T, F> BottomSampler<T> for FnSampler<F>
where
    F: Fn(&mut dyn RngCore) -> Option<T> + Send + Sync,
{
    fn generate(&self, rng: &mut dyn RngCore) -> Option<T> {
        (self.0)(rng)
    }
}

/// Draws one value, retrying ⊥ up to `attempts` times in total.
pub fn draw_retrying<T>(sampler: &dyn BottomSampler<T>, attempts: u64, rng: &mut dyn RngCore) -> Result<T> {
    for _ in 0..attempts.max(1) {
        if let Some(x) = sampler.generate(rng) {
            return Ok(x);
        }
    }
    Err(Error::SamplerFailure(format!("sampler emitted ⊥ on {} consecutive attempts", attempts.max(1))))
}

/// Result of an approximate counter: the satisfying fraction of the cube.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct CountEstimate {
    pub value: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub exact: bool,
}

impl CountEstimate {
    pub fn exact(value: f64) -> Self {
        CountEstimate { value, epsilon: 0.0, delta: 0.0, exact: true }
    }
}

enum Tools {
    Ltf(Arc<LtfTable>),
    Dnf(crate::core::Dnf),
}

/// The class-appropriate counter and uniform generator for a function `g`.
pub struct ForwardTools {
    target: BoolFunc,
    tools: Tools,
    trial_cap: Option<u64>,
}

impl ForwardTools {
    pub fn target(&self) -> &BoolFunc {
        &self.target
    }

    /// Caps the number of Karp–Luby trials a count may use.
    pub fn with_trial_cap(mut self, cap: u64) -> Self {
        self.trial_cap = Some(cap.max(1));
        self
    }

    /// Approximate fraction of the cube satisfying `g`.
    pub fn count(&self, epsilon: f64, delta: f64, rng: &mut dyn RngCore) -> Result<CountEstimate> {
        match &self.tools {
            Tools::Ltf(t) => Ok(CountEstimate::exact(t.fraction())),
            Tools::Dnf(f) => match self.trial_cap {
                None => dnf_count(f, epsilon, delta, rng),
                Some(cap) => {
                    let wanted = 8.0 * f.terms().len() as f64 / (epsilon * epsilon) * (2.0 / delta).ln();
                    let trials = if wanted.is_finite() { (wanted.ceil() as u64).clamp(1, cap) } else { cap };
                    dnf_count_with_trials(f, trials, epsilon, delta, rng)
                }
            },
        }
    }

    /// A uniform generator for `g` whose ⊥ probability is at most `delta`.
    pub fn sampler(&self, delta: f64) -> Result<Arc<dyn BottomSampler>> {
        Ok(match &self.tools {
            Tools::Ltf(t) => Arc::new(LtfSampler::new(Arc::clone(t))?),
            Tools::Dnf(f) => Arc::new(dnf_sample(f, delta)?),
        })
    }
}

/// Dispatches `g` to exact DP tools (LTFs) or Karp–Luby tools (DNF-like forms).
pub fn make_forward_tools(g: &BoolFunc) -> Result<ForwardTools> {
    let tools = match g {
        BoolFunc::Ltf(f) => Tools::Ltf(Arc::new(LtfTable::build(f)?)),
        BoolFunc::ConstFalse { .. } => return Err(Error::Infeasible("constant-false function has no satisfying points".into())),
        BoolFunc::Dnf(_) | BoolFunc::Conjunction { .. } | BoolFunc::FeatureDisjunction(_) | BoolFunc::ConstTrue { .. } => {
            Tools::Dnf(g.lower_to_dnf()?.absorbed())
        }
    };
    Ok(ForwardTools { target: g.clone(), tools, trial_cap: None })
}
