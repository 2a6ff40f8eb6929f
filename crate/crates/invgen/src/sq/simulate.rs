use std::sync::Arc;

use rand::RngCore;

use super::{Answer, BiasEstimate, StatOracle, StatQuery};
use crate::core::{chernoff_samples, mean_of, Assignment, BoolFunc};
use crate::error::{Error, Result};
use crate::genct::{draw_retrying, BottomSampler, ForwardTools};
use crate::seed::Rng;

/// Attempts allowed per draw from a ⊥-emitting sampler, `⌈20·ln(2m/δ)⌉`.
pub(crate) fn retry_budget(m: u64, delta: f64) -> u64 {
    (20.0 * (2.0 * m.max(1) as f64 / delta).ln()).ceil().max(1.0) as u64
}

/// Estimates `E_D[χ(x, f(x))]` as `Ẽ₁ + b̃·Ẽ₂`, where `Ẽ₁ ≈ E_D[χ(x,−1)]` to
/// `±τ/4` and `Ẽ₂ ≈ E_{D_{f,+}}[χ(x,1) − χ(x,−1)]` to `±τ/2`, each at confidence `1 − δ/2`.
pub fn simulate_stat(
    q: &StatQuery,
    d_sampler: &dyn BottomSampler,
    pos_sampler: &dyn BottomSampler,
    bias: BiasEstimate,
    delta: f64,
    rng: &mut dyn RngCore,
) -> Result<f64> {
    let tau = q.tolerance();
    let m = chernoff_samples(tau / 4.0, delta / 2.0)?;
    let attempts = retry_budget(m, delta);
    let e1 = mean_of(
        &mut |r| Ok(q.eval(&draw_retrying(d_sampler, attempts, r)?, -1).0),
        m,
        rng,
    )?;
    let half_e2 = mean_of(
        &mut |r| {
            let x = draw_retrying(pos_sampler, attempts, r)?;
            Ok((q.eval(&x, 1).0 - q.eval(&x, -1).0) / 2.0)
        },
        m,
        rng,
    )?;
    Ok(e1 + bias.value * 2.0 * half_e2)
}

/// Rejection cap `⌈(1/ε′)·ln(1/δ)⌉ + 1` for drawing from `D_{f,+}`.
pub fn dfplus_cap(eps_prime: f64, delta: f64) -> Result<u64> {
    if !(eps_prime > 0.0 && eps_prime <= 1.0) {
        return Err(Error::invalid(format!("eps_prime must lie in (0,1], got {eps_prime}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!("delta must lie in (0,1), got {delta}")));
    }
    Ok(((1.0 / eps_prime) * (1.0 / delta).ln()).ceil() as u64 + 1)
}

/// Positive examples of `f` restricted to `g`: the distribution `D_{f,+}` for `D = U_{g⁻¹(1)}`.
pub struct DfPlusSampler {
    pos: Arc<dyn BottomSampler>,
    g: BoolFunc,
    cap: u64,
}

impl DfPlusSampler {
    pub fn new(pos: Arc<dyn BottomSampler>, g: BoolFunc, eps_prime: f64, delta: f64) -> Result<Self> {
        Ok(DfPlusSampler { pos, g, cap: dfplus_cap(eps_prime, delta)? })
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }
}

impl BottomSampler for DfPlusSampler {
    fn generate(&self, rng: &mut dyn RngCore) -> Option<Assignment> {
        (0..self.cap).find_map(|_| self.pos.generate(rng).filter(|x| self.g.eval_unchecked(x)))
    }
}

/// One draw from `D_{f,+}` by filtering positive examples through `g`.
pub fn simulate_sample_dfplus(
    pos_source: Arc<dyn BottomSampler>,
    g: &BoolFunc,
    eps_prime: f64,
    delta: f64,
    rng: &mut dyn RngCore,
) -> Result<Assignment> {
    let s = DfPlusSampler::new(pos_source, g.clone(), eps_prime, delta)?;
    s.generate(rng)
        .ok_or_else(|| Error::SamplerFailure(format!("no positive example accepted by g in {} draws", s.cap)))
}

/// `b̃ = p̂ / p_g` with `p_g` from the counter for `g` at accuracy `τ′/2`, clamped to `[0,1]`.
pub fn estimate_bias(
    p_hat: f64,
    tau_prime: f64,
    delta_prime: f64,
    tools: &ForwardTools,
    rng: &mut dyn RngCore,
) -> Result<BiasEstimate> {
    if !(p_hat > 0.0 && p_hat <= 1.0) {
        return Err(Error::invalid(format!("p_hat must lie in (0,1], got {p_hat}")));
    }
    let p_g = tools.count(tau_prime / 2.0, delta_prime, rng)?.value;
    if p_g <= 0.0 {
        return Err(Error::Infeasible("counter reports an empty satisfying set for g".into()));
    }
    Ok(BiasEstimate::new(p_hat / p_g, tau_prime))
}

/// Answers every query with fresh samples via [`simulate_stat`].
pub struct SimulatedOracle {
    d_sampler: Arc<dyn BottomSampler>,
    pos_sampler: Arc<dyn BottomSampler>,
    bias: BiasEstimate,
    delta: f64,
    rng: Rng,
}

impl SimulatedOracle {
    pub fn new(d_sampler: Arc<dyn BottomSampler>, pos_sampler: Arc<dyn BottomSampler>, bias: BiasEstimate, rng: Rng) -> Self {
        SimulatedOracle { d_sampler, pos_sampler, bias, delta: 0.05, rng }
    }
}

impl StatOracle for SimulatedOracle {
    fn answer(&mut self, q: &StatQuery) -> Result<Answer> {
        let value = simulate_stat(q, &*self.d_sampler, &*self.pos_sampler, self.bias, self.delta, &mut self.rng)?;
        Ok(Answer { value, radius: q.tolerance() })
    }

    fn set_query_confidence(&mut self, delta: f64) {
        self.delta = delta;
    }
}
