use super::{run_sq_learner, LearnerSpec, SqLearner, StatOracle, StatQuery, VecQuery};
use crate::core::{BoolFunc, Ltf, W_MAX};
use crate::error::{Error, Result};

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z.clamp(-50.0, 50.0)).exp())
}

/// Halfspace learner driven by statistical queries.
///
/// Runs gradient ascent on a class-balanced logistic log-likelihood over the
/// features `φ(x) = (2x₁−1, …, 2xₙ−1, 1)`. Each round asks one vector query whose
/// coordinate `j` is `c_y·y·σ(−y⟨w, φ(x)⟩)·φⱼ(x)`, with class weights
/// `c₊ = min(1, (1−b)/b)` and `c₋ = min(1, b/(1−b))` taken from an initial
/// query for `b = Pr_D[f = 1]`. The final iterate is rounded to integer weights,
/// and the threshold is then recalibrated by a coarse-to-fine search that
/// minimizes the plain disagreement `Pr_D[h ≠ f]`, since class weighting
/// shifts the threshold away from the error-minimizing one when `b` is small.
pub struct HalfspaceLearner {
    n: usize,
    epsilon: f64,
    max_rounds: u64,
    step: f64,
}

impl HalfspaceLearner {
    pub fn new(n: usize, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::invalid(format!("epsilon must lie in (0,1), got {epsilon}")));
        }
        Ok(HalfspaceLearner { n, epsilon, max_rounds: u64::MAX, step: 8.0 * (n + 1) as f64 })
    }

    /// Caps the number of descent rounds below the declared `⌈64n/ε²⌉`.
    pub fn with_max_rounds(mut self, rounds: u64) -> Self {
        self.max_rounds = rounds.max(1);
        self
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    /// Declared number of descent rounds, `⌈64n/ε²⌉`.
    pub fn declared_rounds(&self) -> u64 {
        sat_u64(64.0 * self.n.max(1) as f64 / (self.epsilon * self.epsilon))
    }

    pub fn rounds(&self) -> u64 {
        self.declared_rounds().min(self.max_rounds)
    }

    fn tolerance(&self) -> f64 {
        self.epsilon / (8.0 * self.n.max(1) as f64)
    }
}

const CALIBRATION_POINTS: usize = 33;
const CALIBRATION_STAGES: u64 = 6;

fn sat_u64(x: f64) -> u64 {
    if x >= u64::MAX as f64 {
        u64::MAX
    } else {
        x.ceil() as u64
    }
}

impl SqLearner for HalfspaceLearner {
    fn spec(&self) -> LearnerSpec {
        let per_round = (self.n + 1) as u64;
        LearnerSpec {
            query_budget: self
                .declared_rounds()
                .saturating_mul(per_round)
                .saturating_add(1 + CALIBRATION_STAGES * CALIBRATION_POINTS as u64),
            eval_cost: (self.n + 1) as f64,
            min_tolerance: self.tolerance(),
        }
    }

    fn learn(&self, oracle: &mut dyn StatOracle) -> Result<BoolFunc> {
        let n = self.n;
        let tol = self.tolerance();
        let b = oracle.answer(&StatQuery::new(tol, |_, y| if y > 0 { 1.0 } else { 0.0 })?)?.value.clamp(0.0, 1.0);
        if b <= self.epsilon {
            return Ok(BoolFunc::Ltf(Ltf::constant_false(n)));
        }
        if b >= 1.0 - self.epsilon {
            return Ok(BoolFunc::Ltf(Ltf::constant_true(n)));
        }
        let c_pos = ((1.0 - b) / b).min(1.0);
        let c_neg = (b / (1.0 - b)).min(1.0);
        let mut w = vec![0.0; n + 1];
        for _ in 0..self.rounds() {
            let cur = w.clone();
            let q = VecQuery::new(n + 1, tol, move |x, y, out| {
                let bits = x.bits();
                let phi = |j: usize| if (bits >> j) & 1 == 1 { 1.0 } else { -1.0 };
                let z = cur[n] + (0..n).map(|j| cur[j] * phi(j)).sum::<f64>();
                let (c, yf) = if y > 0 { (c_pos, 1.0) } else { (c_neg, -1.0) };
                let s = c * yf * sigmoid(-yf * z);
                for (j, o) in out.iter_mut().enumerate().take(n) {
                    *o = s * phi(j);
                }
                out[n] = s;
            })?;
            let grad = oracle.answer_vec(&q)?;
            for (wj, g) in w.iter_mut().zip(&grad) {
                *wj += self.step * g.value;
            }
        }
        let h = round_ltf(&w)?;
        Ok(BoolFunc::Ltf(calibrate_threshold(h, tol, oracle)?))
    }
}

/// Coarse-to-fine search over integer thresholds for the lowest estimated
/// disagreement with the target; ties go to the threshold closest to the current one.
fn calibrate_threshold(h: Ltf, tol: f64, oracle: &mut dyn StatOracle) -> Result<Ltf> {
    let reach: i64 = h.weights().iter().map(|w| w.abs()).sum();
    if reach == 0 {
        return Ok(h);
    }
    let (mut lo, mut hi) = (-reach, reach + 1);
    let mut best = h.theta();
    for _ in 0..CALIBRATION_STAGES {
        let span = hi - lo;
        let mut cands: Vec<i64> =
            (0..CALIBRATION_POINTS as i64).map(|j| lo + span * j / (CALIBRATION_POINTS as i64 - 1)).collect();
        if let Some(c) = cands.iter_mut().min_by_key(|c| (**c - best).abs()) {
            *c = best;
        }
        let weights = h.weights().to_vec();
        let thresholds = cands.clone();
        let q = VecQuery::new(CALIBRATION_POINTS, tol, move |x, y, out| {
            let dot: i64 = weights.iter().enumerate().map(|(i, w)| if x.get(i) { *w } else { -*w }).sum();
            for (o, t) in out.iter_mut().zip(&thresholds) {
                *o = ((dot >= *t) != (y > 0)) as u8 as f64;
            }
        })?;
        let errs = oracle.answer_vec(&q)?;
        let min = errs.iter().map(|a| a.value).fold(f64::INFINITY, f64::min);
        best = cands
            .iter()
            .zip(&errs)
            .filter(|(_, a)| a.value <= min)
            .map(|(c, _)| *c)
            .min_by_key(|c| (c - best).abs())
            .unwrap_or(best);
        let step = (span / (CALIBRATION_POINTS as i64 - 1)).max(1);
        if step == 1 {
            break;
        }
        lo = best - step;
        hi = best + step;
    }
    Ltf::new(h.weights().to_vec(), best)
}

/// Rounds real weights `(w₁..wₙ, bias)` to an integer LTF `Σ wᵢφᵢ ≥ θ` with `θ = −bias`.
fn round_ltf(w: &[f64]) -> Result<Ltf> {
    let n = w.len() - 1;
    let bias = w[n];
    let max_abs = w[..n].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max_abs == 0.0 || !max_abs.is_finite() {
        return Ok(if bias >= 0.0 { Ltf::constant_true(n) } else { Ltf::constant_false(n) });
    }
    let scale = W_MAX as f64 / max_abs;
    let weights: Vec<i64> = w[..n].iter().map(|v| (v * scale).round() as i64).collect();
    let reach = weights.iter().map(|v| v.abs()).sum::<i64>() + 1;
    let theta = ((-bias * scale).round()).clamp(-(reach as f64), reach as f64) as i64;
    Ltf::new(weights, theta)
}

/// Runs the halfspace learner through [`run_sq_learner`] with at most `max_rounds` rounds.
pub fn learn_halfspace_sq(
    oracle: &mut dyn StatOracle,
    n: usize,
    epsilon: f64,
    delta: f64,
    max_rounds: u64,
) -> Result<Ltf> {
    let learner = HalfspaceLearner::new(n, epsilon)?.with_max_rounds(max_rounds);
    match run_sq_learner(&learner, oracle, delta)? {
        BoolFunc::Ltf(h) => Ok(h),
        other => Err(Error::Unsupported(format!("halfspace learner produced a {}", other.kind()))),
    }
}
