use std::sync::Arc;

use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use super::sampler::{check, simulate_approx_eval, CheckCertificate, InverseSampler};
use super::{Budget, Instantiation, PipelineParams};
use crate::core::Assignment;
use crate::error::{Error, Result};
use crate::genct::BottomSampler;
use crate::hypsel::{retry_attempts, tournament, CandidateDistribution, EvalFn, TournamentResult};
use crate::seed::SeedTree;
use crate::sq::{estimate_bias, run_sq_learner, BiasEstimate, DfPlusSampler, PooledOracle};

/// The geometric grid `p̂ᵢ = (1+ε)^{i−1}/2ⁿ`, `i = 1..k`, with
/// `k = ⌈n·ln2/ln(1+ε)⌉ + 1`; values are clamped to 1.
pub fn grid_points(n: usize, epsilon: f64) -> Result<Vec<f64>> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid(format!("epsilon must lie in (0,1), got {epsilon}")));
    }
    if n == 0 || n > crate::core::MAX_DIM {
        return Err(Error::invalid(format!("dimension {n} out of range")));
    }
    let k = (n as f64 * std::f64::consts::LN_2 / epsilon.ln_1p()).ceil() as usize + 1;
    let base = 0.5f64.powi(n as i32);
    Ok((0..k).map(|i| (base * (1.0 + epsilon).powi(i as i32)).min(1.0)).collect())
}

/// What one known-bias run produced besides the sampler.
#[derive(Clone, Debug, Serialize)]
pub struct KnownBiasReport {
    pub params: PipelineParams,
    pub densifier_size: usize,
    pub g_kind: &'static str,
    pub h_kind: &'static str,
    pub bias: BiasEstimate,
}

fn known_bias(
    pos_source: &Arc<dyn BottomSampler>,
    p_hat: f64,
    epsilon: f64,
    delta: f64,
    inst: &Instantiation,
    budget: &Budget,
    rng: &mut dyn RngCore,
) -> Result<(InverseSampler, KnownBiasReport)> {
    if !(p_hat > 0.0 && p_hat <= 1.0) {
        return Err(Error::invalid(format!("p_hat must lie in (0,1], got {p_hat}")));
    }
    let eps1 = epsilon / 6.0;
    let densified = inst
        .densify(pos_source.as_ref(), p_hat, eps1, delta / 3.0, budget, rng)
        .map_err(|e| e.at_stage("densify"))?;
    let g = densified.g()?;
    let params = PipelineParams::new(epsilon, delta, densified.gamma(), budget)?;
    let learner = inst.learner(&densified, params.eps2, budget).map_err(|e| e.at_stage("learner"))?;
    let params = params.with_learner(&learner.spec(), budget);
    let tau2 = params.tau2.unwrap_or(params.eps2);
    let m = params.m.map_or(1, |m| m.used);

    let tools = inst.forward_tools(&g, budget).map_err(|e| e.at_stage("forward tools"))?;
    let per_draw = delta / (12.0 * m as f64);
    let d_sampler = tools.sampler(per_draw).map_err(|e| e.at_stage("forward tools"))?;
    let pos = DfPlusSampler::new(Arc::clone(pos_source), g.clone(), 1.0 - eps1, per_draw)?;
    let bias = estimate_bias(p_hat, tau2 / 2.0, delta / 12.0, &tools, rng).map_err(|e| e.at_stage("bias"))?;
    let mut oracle = PooledOracle::draw(&*d_sampler, &pos, m, m, retry_attempts(2 * m, delta / 12.0), bias, rng)
        .map_err(|e| e.at_stage("sq simulation"))?;
    let h = run_sq_learner(learner.as_ref(), &mut oracle, delta / 12.0).map_err(|e| e.at_stage("learner"))?;

    let generator_delta = delta * epsilon / (12.0 * params.t.used as f64);
    let generator = tools.sampler(generator_delta)?;
    let report = KnownBiasReport {
        params,
        densifier_size: densified.size(),
        g_kind: g.kind(),
        h_kind: h.kind(),
        bias,
    };
    Ok((InverseSampler::new(g, h, generator, params.t.used, generator_delta), report))
}

/// Inversion when the target's density is known up to a `(1+ε)` factor:
/// densify, learn `h` inside `g` by simulated statistical queries, and
/// reject-sample `g` according to `h`.
#[allow(clippy::too_many_arguments)]
pub fn inv_with_bias(
    pos_source: Arc<dyn BottomSampler>,
    p_hat: f64,
    epsilon: f64,
    delta: f64,
    inst: &Instantiation,
    budget: &Budget,
    rng: &mut dyn RngCore,
) -> Result<InverseSampler> {
    check_unit_params(epsilon, delta)?;
    known_bias(&pos_source, p_hat, epsilon, delta, inst, budget, rng).map(|(s, _)| s)
}

fn check_unit_params(epsilon: f64, delta: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("epsilon and delta must lie in (0,1)"));
    }
    Ok(())
}

/// One grid point of the outer search.
#[derive(Clone, Debug, Serialize)]
pub struct GridEntry {
    pub index: usize,
    pub p_hat: f64,
    pub error: Option<String>,
    pub run: Option<KnownBiasReport>,
    pub certificate: Option<CheckCertificate>,
    pub admitted: bool,
    pub reject_reason: Option<String>,
}

/// Everything the outer search decided, in serializable form.
#[derive(Clone, Debug, Serialize)]
pub struct Transcript {
    pub class: String,
    pub n: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub budget: Budget,
    pub grid: Vec<GridEntry>,
    pub tournament: Option<TournamentResult>,
    /// Grid index of the returned sampler.
    pub winner: Option<usize>,
}

#[derive(Debug)]
pub struct InversionRun {
    pub sampler: InverseSampler,
    pub transcript: Transcript,
}

struct GridOutcome {
    entry: GridEntry,
    sampler: Option<InverseSampler>,
}

#[allow(clippy::too_many_arguments)]
fn run_grid_point(
    index: usize,
    p_hat: f64,
    seed: u64,
    pos_source: &Arc<dyn BottomSampler>,
    epsilon: f64,
    delta: f64,
    inst: &Instantiation,
    budget: &Budget,
) -> Result<GridOutcome> {
    let mut rng = SeedTree::new(seed).rng();
    let mut entry =
        GridEntry { index, p_hat, error: None, run: None, certificate: None, admitted: false, reject_reason: None };
    let (sampler, report) = match known_bias(pos_source, p_hat, epsilon / 12.0, delta / 3.0, inst, budget, &mut rng) {
        Ok(v) => v,
        Err(e) if e.is_input_error() => return Err(e),
        Err(e) => {
            entry.error = Some(e.to_string());
            return Ok(GridOutcome { entry, sampler: None });
        }
    };
    let gamma = report.params.gamma;
    entry.run = Some(report);
    let tools = inst.forward_tools(sampler.g(), budget)?;
    let cert = match check(sampler.g(), sampler.h(), delta / 3.0, epsilon, gamma, &tools, budget, &mut rng) {
        Ok(c) => c,
        Err(e) if e.is_input_error() => return Err(e),
        Err(e) => {
            entry.reject_reason = Some(e.to_string());
            return Ok(GridOutcome { entry, sampler: None });
        }
    };
    entry.certificate = Some(cert);
    let miss = (1.0 - cert.alpha).powf(sampler.trials() as f64);
    if cert.alpha <= 0.0 || cert.kappa <= 0.0 {
        entry.reject_reason = Some("h has no certified mass inside g".into());
    } else if miss > epsilon / 4.0 {
        entry.reject_reason = Some(format!("rejection sampler returns bottom with probability {miss:.3}"));
    } else {
        entry.admitted = true;
    }
    let sampler = entry.admitted.then(|| sampler.with_certificate(cert));
    Ok(GridOutcome { entry, sampler })
}

fn eval_oracle(s: &InverseSampler) -> EvalFn<Assignment> {
    let cert = *s.certificate().expect("admitted samplers carry a certificate");
    let (g, h) = (s.g().clone(), s.h().clone());
    Arc::new(move |x: &Assignment| simulate_approx_eval(x, &cert, &g, &h).unwrap_or(0.0))
}

/// Inversion without knowledge of the target's density: one known-bias run
/// per grid point, certificate check, then a tournament among the certified
/// candidates against the positive examples.
pub fn inverse_generate(
    pos_source: Arc<dyn BottomSampler>,
    epsilon: f64,
    delta: f64,
    inst: &Instantiation,
    budget: &Budget,
    rng: &mut dyn RngCore,
) -> Result<InversionRun> {
    check_unit_params(epsilon, delta)?;
    let grid = grid_points(inst.n, epsilon)?;
    let seeds: Vec<u64> = grid.iter().map(|_| rng.next_u64()).collect();
    let outcomes = grid
        .par_iter()
        .zip(seeds.par_iter())
        .enumerate()
        .map(|(i, (&p, &seed))| run_grid_point(i, p, seed, &pos_source, epsilon, delta, inst, budget))
        .collect::<Result<Vec<_>>>()?;

    let mut entries = Vec::with_capacity(outcomes.len());
    let mut survivors = Vec::new();
    for o in outcomes {
        if let Some(s) = o.sampler {
            survivors.push((o.entry.index, s));
        }
        entries.push(o.entry);
    }
    let mut transcript = Transcript {
        class: inst.class.to_string(),
        n: inst.n,
        epsilon,
        delta,
        budget: *budget,
        grid: entries,
        tournament: None,
        winner: None,
    };
    if survivors.is_empty() {
        return Err(Error::InversionFailure(format!("none of the {} grid points was certified", grid.len())));
    }
    let candidates: Vec<CandidateDistribution<Assignment>> = survivors
        .iter()
        .enumerate()
        .map(|(label, (_, s))| {
            let sampler: Arc<dyn BottomSampler> = Arc::new(s.clone());
            CandidateDistribution::new(label, sampler, eval_oracle(s))
        })
        .collect();
    let result = tournament(&*pos_source, &candidates, epsilon / 12.0, delta / 3.0, Some(budget.tournament_samples), rng)
        .map_err(|e| e.at_stage("tournament"))?;
    let (grid_index, sampler) = survivors.swap_remove(result.winner);
    transcript.winner = Some(grid_index);
    transcript.tournament = Some(result);
    Ok(InversionRun { sampler, transcript })
}
