//! Densifiers.
//!
//! A densifier receives positive examples of an unknown `f` and a guess `p̂`
//! for `Pr_U[f = 1]`, and returns a function `g` whose satisfying set nearly
//! contains `f⁻¹(1)` while `f⁻¹(1)` fills at least a `γ` fraction of `g⁻¹(1)`.

mod dnf;
pub mod lp;
mod ltf;

use crate::error::{Error, Result};
use crate::sq::{default_ell, Ell};

pub use dnf::{densify_dnf, densify_kdnf, DnfDensifierOutput, KdnfDensifierOutput};
pub use ltf::{
    consistent_ltf, densify_ltf, exact_ltf_counter, exact_ltf_sampler, round_to_integer_ltf, ConstraintSet,
    LtfDensifierOutput, LtfExit, OnlineLtfLearner,
};

/// Attempts allowed per positive draw before a source is declared broken.
pub const SOURCE_ATTEMPTS: u64 = 1000;

/// Tunables shared by the densifiers.
#[derive(Clone)]
pub struct DensifierParams {
    pub epsilon: f64,
    pub delta: f64,
    pub p_hat: f64,
    pub gamma: f64,
    pub n_plus: u64,
    /// Declared iteration count; may be astronomically large, so kept as a float.
    pub m: f64,
    /// Hard cap on the iterations actually run.
    pub max_iterations: u64,
    pub r: usize,
    pub ell: Ell,
}

impl std::fmt::Debug for DensifierParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DensifierParams")
            .field("epsilon", &self.epsilon)
            .field("delta", &self.delta)
            .field("p_hat", &self.p_hat)
            .field("gamma", &self.gamma)
            .field("n_plus", &self.n_plus)
            .field("m", &self.m)
            .field("max_iterations", &self.max_iterations)
            .field("r", &self.r)
            .finish()
    }
}

fn check_common(n: usize, epsilon: f64, delta: f64, p_hat: f64) -> Result<()> {
    if n == 0 || n > crate::core::MAX_DIM {
        return Err(Error::invalid(format!("dimension {n} out of range")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("epsilon and delta must lie in (0,1)"));
    }
    if !(p_hat >= 0.5f64.powi(n as i32) && p_hat <= 1.0) {
        return Err(Error::invalid(format!("p_hat {p_hat} outside [2^-n, 1]")));
    }
    Ok(())
}

/// `M = ⌈4n² ln max(n,2)⌉`.
pub fn ltf_mistake_bound(n: usize) -> u64 {
    let nf = n as f64;
    (4.0 * nf * nf * nf.max(2.0).ln()).ceil() as u64
}

/// `r = ⌈2 log₂ n⌉`, at least 1.
pub fn dnf_batch_size(n: usize) -> usize {
    ((2.0 * (n as f64).log2()).ceil() as usize).max(1)
}

/// `M = 2 n^{2 log₂(2s/ℓ(ε/s))} log₂(s/δ)`, saturating at `f64::MAX`.
pub fn dnf_iteration_bound(n: usize, s: usize, epsilon: f64, delta: f64, ell: &Ell) -> f64 {
    let sf = s as f64;
    let l = ell(epsilon / sf);
    let exponent = 2.0 * (2.0 * sf / l).log2();
    let log_m = 2f64.ln() + exponent * (n as f64).ln() + (sf / delta).log2().max(1.0).ln();
    if log_m >= f64::MAX.ln() {
        f64::MAX
    } else {
        log_m.exp().max(1.0)
    }
}

impl DensifierParams {
    /// Parameters of the threshold-function densifier.
    pub fn ltf(n: usize, epsilon: f64, delta: f64, p_hat: f64) -> Result<Self> {
        check_common(n, epsilon, delta, p_hat)?;
        let nf = n as f64;
        let m = ltf_mistake_bound(n);
        let n_plus = ((2.0 / epsilon) * (nf * nf + (1.0 / delta).ln())).ceil() as u64;
        Ok(DensifierParams {
            epsilon,
            delta,
            p_hat,
            gamma: delta / (16.0 * m as f64),
            n_plus,
            m: m as f64,
            max_iterations: m,
            r: 1,
            ell: default_ell(),
        })
    }

    /// Parameters of the DNF densifier for `s`-term formulas.
    pub fn dnf(n: usize, s: usize, epsilon: f64, delta: f64, p_hat: f64, ell: Ell) -> Result<Self> {
        check_common(n, epsilon, delta, p_hat)?;
        if s == 0 {
            return Err(Error::invalid("term count s must be at least 1"));
        }
        let l = ell(epsilon / s as f64);
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::invalid(format!("ell(eps/s) must be positive, got {l}")));
        }
        let m = dnf_iteration_bound(n, s, epsilon, delta, &ell);
        let r = dnf_batch_size(n);
        let max_iterations = if m >= u64::MAX as f64 { u64::MAX } else { m.ceil() as u64 };
        Ok(DensifierParams {
            epsilon,
            delta,
            p_hat,
            gamma: 1.0 / (2.0 * m),
            n_plus: max_iterations.saturating_mul(r as u64),
            m,
            max_iterations,
            r,
            ell,
        })
    }

    pub fn with_max_iterations(mut self, cap: u64) -> Self {
        self.max_iterations = self.max_iterations.min(cap.max(1));
        self
    }

    pub fn with_n_plus(mut self, n_plus: u64) -> Self {
        self.n_plus = n_plus.max(1);
        self
    }

    /// Iterations that will actually run.
    pub fn iterations(&self) -> u64 {
        let declared = if self.m >= u64::MAX as f64 { u64::MAX } else { self.m.ceil() as u64 };
        declared.min(self.max_iterations).max(1)
    }
}
