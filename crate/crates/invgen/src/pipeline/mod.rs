//! End-to-end inverse approximate uniform generation.
//!
//! [`inv_with_bias`] turns positive examples and a guess `p̂` for the target's
//! density into a rejection sampler; [`inverse_generate`] runs it over a
//! geometric grid of guesses, certifies each candidate with [`check`], and
//! picks one with the hypothesis tournament.

mod instances;
mod instantiation;
mod inverse;
mod sampler;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sq::LearnerSpec;

pub use instances::{majority, planted_dnf, random_kdnf, random_ltf};
pub use instantiation::{all_short_conjunctions, make_instantiation, ClassTag, Densified, Instantiation};
pub use inverse::{grid_points, inv_with_bias, inverse_generate, GridEntry, InversionRun, KnownBiasReport, Transcript};
pub use sampler::{check, simulate_approx_eval, CheckCertificate, InverseSampler, SamplerSpec};

/// Caps on the work each stage may do. The theoretical sample sizes are
/// astronomically large at realistic densities; every stage records both the
/// declared and the used value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(default)]
pub struct Budget {
    /// Size of each SQ-simulation pool (generator draws and positive examples).
    pub sq_pool: u64,
    /// Descent rounds of the halfspace learner.
    pub learner_rounds: u64,
    /// Karp–Luby trials per count.
    pub count_trials: u64,
    /// Generator draws in the certificate check.
    pub check_samples: u64,
    /// Draws per distribution in the tournament.
    pub tournament_samples: u64,
    /// Rejection trials of the final sampler.
    pub rejection_trials: u64,
    /// Iterations of the DNF densifier.
    pub densifier_iterations: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            sq_pool: 100_000,
            learner_rounds: 150,
            count_trials: 200_000,
            check_samples: 20_000,
            tournament_samples: 8_000,
            rejection_trials: 4_000,
            densifier_iterations: 20_000,
        }
    }
}

fn sat_u64(x: f64) -> u64 {
    if !x.is_finite() || x >= u64::MAX as f64 {
        u64::MAX
    } else {
        x.ceil().max(0.0) as u64
    }
}

/// A declared constant next to the value actually used.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Capped {
    pub declared: f64,
    pub used: u64,
}

impl Capped {
    pub fn new(declared: f64, cap: u64) -> Self {
        Capped { declared, used: sat_u64(declared).min(cap).max(1) }
    }
}

/// Constants of one known-bias run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PipelineParams {
    pub epsilon: f64,
    pub delta: f64,
    pub gamma: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
    pub mu: f64,
    pub beta: f64,
    /// Rejection trials `⌈(4/γ) ln(1/(δε))⌉`.
    pub t: Capped,
    /// Learner tolerance floor at `ε₂`; set once the learner is known.
    pub tau2: Option<f64>,
    /// SQ-simulation pool size.
    pub m: Option<Capped>,
}

impl PipelineParams {
    pub fn new(epsilon: f64, delta: f64, gamma: f64, budget: &Budget) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0) {
            return Err(Error::invalid("epsilon and delta must lie in (0,1)"));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::invalid(format!("density gamma must lie in (0,1], got {gamma}")));
        }
        Ok(PipelineParams {
            epsilon,
            delta,
            gamma,
            eps1: epsilon / 6.0,
            eps2: epsilon * gamma / 7.0,
            eps3: epsilon * gamma / 48000.0,
            mu: epsilon / 40000.0,
            beta: epsilon / 192.0,
            t: Capped::new((4.0 / gamma) * (1.0 / (delta * epsilon)).ln(), budget.rejection_trials),
            tau2: None,
            m: None,
        })
    }

    /// Fills in `τ₂` and the pool size from the learner's declared profile:
    /// `m = ⌈(32/τ₂²) ln(48 T₁/δ)⌉`, enough for every query at `±τ₂/4`.
    pub fn with_learner(mut self, spec: &LearnerSpec, budget: &Budget) -> Self {
        let tau2 = spec.min_tolerance;
        let t1 = spec.query_budget.max(1) as f64;
        let declared = (32.0 / (tau2 * tau2)) * (48.0 * t1 / self.delta).ln();
        self.tau2 = Some(tau2);
        self.m = Some(Capped::new(declared, budget.sq_pool));
        self
    }

    /// Whether `(1+β)² ≤ 1 + (ε/12)/8` holds for the tournament's accuracy.
    pub fn beta_admissible(&self) -> bool {
        (1.0 + self.beta).powi(2) <= 1.0 + self.epsilon / 96.0
    }
}
