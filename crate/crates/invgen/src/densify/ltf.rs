use std::collections::BTreeSet;
use std::sync::Arc;

use rand::RngCore;

use super::lp::maximize;
use super::{DensifierParams, SOURCE_ATTEMPTS};
use crate::core::{Assignment, Ltf, W_MAX};
use crate::error::{Error, Result};
use crate::genct::{draw_retrying, BottomSampler, LtfSampler, LtfTable};

const MARGIN_EPS: f64 = 1e-9;
const CF_DENOMINATOR_CAP: u64 = 1_000_000;

/// Labeled points a consistent threshold function must respect.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstraintSet {
    positives: BTreeSet<Assignment>,
    negatives: BTreeSet<Assignment>,
}

impl ConstraintSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Requires `w·φ(x) ≥ θ`.
    pub fn add_positive(&mut self, x: Assignment) -> Result<()> {
        if self.negatives.contains(&x) {
            return Err(Error::Infeasible(format!("{x} is already a negative example")));
        }
        self.positives.insert(x);
        Ok(())
    }

    /// Requires `w·φ(x) < θ`.
    pub fn add_negative(&mut self, x: Assignment) -> Result<()> {
        if self.positives.contains(&x) {
            return Err(Error::Infeasible(format!("{x} is already a positive example")));
        }
        self.negatives.insert(x);
        Ok(())
    }

    pub fn positives(&self) -> impl Iterator<Item = &Assignment> + '_ {
        self.positives.iter()
    }

    pub fn negatives(&self) -> impl Iterator<Item = &Assignment> + '_ {
        self.negatives.iter()
    }

    pub fn len(&self) -> usize {
        self.positives.len() + self.negatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_satisfied_by(&self, h: &Ltf) -> bool {
        self.positives.iter().all(|x| h.eval_unchecked(x)) && self.negatives.iter().all(|x| !h.eval_unchecked(x))
    }
}

fn phi(x: &Assignment, n: usize) -> impl Iterator<Item = f64> + '_ {
    (0..n).map(move |i| x.sign(i) as f64)
}

/// Returns an integer-weight LTF satisfying every constraint.
///
/// Maximizes the worst margin over `|wᵢ| ≤ 1`, `|θ| ≤ n+1`, then rounds the
/// real solution to integers and re-verifies every constraint.
pub fn consistent_ltf(c: &ConstraintSet, n: usize) -> Result<Ltf> {
    if let Some(x) = c.positives().chain(c.negatives()).find(|x| x.dim() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: x.dim() });
    }
    if c.is_empty() {
        return Ok(Ltf::constant_true(n));
    }
    let b = (n + 1) as f64;
    let t0 = (2 * n + 2) as f64;
    // Shifted variables: uᵢ = wᵢ + 1 ∈ [0,2], v = θ + B ∈ [0,2B], s = t + T0.
    let k = n + 2;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for x in c.positives() {
        let mut row: Vec<f64> = phi(x, n).map(|p| -p).collect();
        row.push(1.0);
        row.push(1.0);
        rows.push(row);
        rhs.push(-phi(x, n).sum::<f64>() + b + t0);
    }
    for x in c.negatives() {
        let mut row: Vec<f64> = phi(x, n).collect();
        row.push(-1.0);
        row.push(1.0);
        rows.push(row);
        rhs.push(phi(x, n).sum::<f64>() - b + t0);
    }
    for j in 0..k {
        let mut row = vec![0.0; k];
        row[j] = 1.0;
        rows.push(row);
        rhs.push(match j {
            j if j < n => 2.0,
            j if j == n => 2.0 * b,
            _ => t0 + 1.0,
        });
    }
    let mut obj = vec![0.0; k];
    obj[k - 1] = 1.0;
    let sol = maximize(&obj, &rows, &rhs)?;
    let margin = sol.x[k - 1] - t0;
    if margin <= MARGIN_EPS {
        return Err(Error::Infeasible("no threshold function separates the constraints".into()));
    }
    let w: Vec<f64> = sol.x[..n].iter().map(|u| u - 1.0).collect();
    let theta = sol.x[n] - b;
    round_to_integer_ltf(&w, theta, c)
}

/// Best rational approximation `p/q` with `q ≤ cap`, by continued fractions.
fn rational_approx(x: f64, cap: u64) -> (i64, u64) {
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let (h2, k2) = (a as i64 * h1 + h0, a as u64 * k1 + k0);
        if k2 > cap {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a;
        if frac.abs() < 1e-12 {
            break;
        }
        r = 1.0 / frac;
    }
    (h1, k1.max(1))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn try_weights(weights: Vec<i64>, lp_theta: Option<i64>, c: &ConstraintSet) -> Option<Ltf> {
    let probe = Ltf::new(weights.clone(), 0).ok()?;
    let min_pos = c.positives().map(|x| probe.dot(x)).min();
    let max_neg = c.negatives().map(|x| probe.dot(x)).max();
    let mut thetas = Vec::new();
    if let Some(t) = lp_theta {
        thetas.push(t);
    }
    match (min_pos, max_neg) {
        (Some(p), _) => thetas.push(p),
        (None, Some(q)) => thetas.push(q + 1),
        (None, None) => thetas.push(0),
    }
    thetas.into_iter().filter_map(|t| Ltf::new(weights.clone(), t).ok()).find(|h| c.is_satisfied_by(h))
}

/// Rounds a real separator to an integer LTF with weights bounded by [`W_MAX`].
///
/// Continued-fraction approximation with a common denominator is tried first,
/// then scaled rounding at doubling precision.
pub fn round_to_integer_ltf(w: &[f64], theta: f64, c: &ConstraintSet) -> Result<Ltf> {
    let n = w.len();
    let scale_ref = w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale_ref < 1e-12 {
        let h = if theta <= 0.0 { Ltf::constant_true(n) } else { Ltf::constant_false(n) };
        if c.is_satisfied_by(&h) {
            return Ok(h);
        }
        if let Some(h) = [Ltf::constant_true(n), Ltf::constant_false(n)].into_iter().find(|h| c.is_satisfied_by(h)) {
            return Ok(h);
        }
    }
    let ratios: Vec<f64> = w.iter().map(|v| if scale_ref > 0.0 { v / scale_ref } else { 0.0 }).collect();
    let theta_ratio = if scale_ref > 0.0 { theta / scale_ref } else { 0.0 };

    let approx: Vec<(i64, u64)> = ratios.iter().map(|&r| rational_approx(r, CF_DENOMINATOR_CAP)).collect();
    let mut lcm = 1u64;
    for &(_, q) in &approx {
        lcm = lcm / gcd(lcm, q) * q;
        if lcm > W_MAX as u64 {
            break;
        }
    }
    if lcm <= W_MAX as u64 {
        let weights: Vec<i64> = approx.iter().map(|&(p, q)| p * (lcm / q) as i64).collect();
        let lp_theta = (theta_ratio * lcm as f64).ceil() as i64;
        if let Some(h) = try_weights(weights, Some(lp_theta), c) {
            return Ok(h);
        }
    }
    let mut scale = 1i64;
    while scale <= W_MAX {
        let weights: Vec<i64> = ratios.iter().map(|r| (r * scale as f64).round() as i64).collect();
        let lp_theta = (theta_ratio * scale as f64).ceil() as i64;
        if let Some(h) = try_weights(weights, Some(lp_theta), c) {
            return Ok(h);
        }
        scale *= 2;
    }
    let weights: Vec<i64> = ratios.iter().map(|r| (r * W_MAX as f64).round() as i64).collect();
    try_weights(weights, Some((theta_ratio * W_MAX as f64).ceil() as i64), c)
        .ok_or_else(|| Error::Capacity(format!("no consistent rounding with weights bounded by {W_MAX}")))
}

/// Online learner for threshold functions that keeps a hypothesis consistent
/// with every counterexample seen so far.
#[derive(Clone, Debug)]
pub struct OnlineLtfLearner {
    n: usize,
    constraints: ConstraintSet,
    hypothesis: Ltf,
    mistakes: u64,
}

impl OnlineLtfLearner {
    pub fn new(n: usize) -> Self {
        OnlineLtfLearner { n, constraints: ConstraintSet::new(), hypothesis: Ltf::constant_true(n), mistakes: 0 }
    }

    pub fn hypothesis(&self) -> &Ltf {
        &self.hypothesis
    }

    pub fn constraints(&self) -> &ConstraintSet {
        &self.constraints
    }

    pub fn mistakes(&self) -> u64 {
        self.mistakes
    }

    /// Feeds the labeled point `(x, label)`; the hypothesis is refit.
    pub fn update(&mut self, x: Assignment, label: bool) -> Result<()> {
        if x.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x.dim() });
        }
        if label {
            self.constraints.add_positive(x)?;
        } else {
            self.constraints.add_negative(x)?;
        }
        self.mistakes += 1;
        self.hypothesis = consistent_ltf(&self.constraints, self.n)?;
        Ok(())
    }
}

/// How the threshold densifier terminated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LtfExit {
    /// The hypothesis was small enough relative to `p̂`.
    Dense,
    /// The round cap was reached.
    Exhausted,
}

#[derive(Clone, Debug)]
pub struct LtfDensifierOutput {
    pub g: Ltf,
    pub gamma: f64,
    pub rounds: u64,
    pub positive_counterexamples: u64,
    pub negative_counterexamples: u64,
    pub positives: Vec<Assignment>,
    pub exit: LtfExit,
}

/// Counter for [`densify_ltf`] backed by the exact DP table.
pub fn exact_ltf_counter(h: &Ltf, _rng: &mut dyn RngCore) -> Result<f64> {
    Ok(LtfTable::build(h)?.fraction())
}

/// Uniform generator for [`densify_ltf`] backed by the exact DP table.
pub fn exact_ltf_sampler(h: &Ltf) -> Result<Arc<dyn BottomSampler>> {
    Ok(Arc::new(LtfSampler::new(Arc::new(LtfTable::build(h)?))?))
}

/// Threshold-function densifier driving the online learner with counterexamples.
pub fn densify_ltf(
    pos_source: &dyn BottomSampler,
    params: &DensifierParams,
    counter: &dyn Fn(&Ltf, &mut dyn RngCore) -> Result<f64>,
    sampler_factory: &dyn Fn(&Ltf) -> Result<Arc<dyn BottomSampler>>,
    rng: &mut dyn RngCore,
) -> Result<LtfDensifierOutput> {
    let mut positives = Vec::with_capacity(params.n_plus as usize);
    for _ in 0..params.n_plus {
        positives.push(draw_retrying(pos_source, SOURCE_ATTEMPTS, rng)?);
    }
    let n = positives[0].dim();
    if let Some(x) = positives.iter().find(|x| x.dim() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: x.dim() });
    }
    let threshold = params.p_hat / (params.gamma * (1.0 + params.epsilon).powi(2));
    let mut learner = OnlineLtfLearner::new(n);
    let (mut pos_ce, mut neg_ce) = (0u64, 0u64);
    let fail = |e: Error| match e {
        Error::Infeasible(m) => Error::DensifierFailure(m),
        e => e,
    };
    for round in 0..params.iterations() {
        let h = learner.hypothesis();
        if let Some(&x) = positives.iter().find(|x| !h.eval_unchecked(x)) {
            learner.update(x, true).map_err(fail)?;
            pos_ce += 1;
            continue;
        }
        let p_i = counter(h, rng)?;
        if p_i <= threshold {
            return Ok(LtfDensifierOutput {
                g: h.clone(),
                gamma: params.gamma,
                rounds: round + 1,
                positive_counterexamples: pos_ce,
                negative_counterexamples: neg_ce,
                positives,
                exit: LtfExit::Dense,
            });
        }
        let sampler = sampler_factory(h)?;
        let x = draw_retrying(sampler.as_ref(), SOURCE_ATTEMPTS, rng)?;
        learner.update(x, false).map_err(fail)?;
        neg_ce += 1;
    }
    Ok(LtfDensifierOutput {
        g: learner.hypothesis().clone(),
        gamma: params.gamma,
        rounds: params.iterations(),
        positive_counterexamples: pos_ce,
        negative_counterexamples: neg_ce,
        positives,
        exit: LtfExit::Exhausted,
    })
}
