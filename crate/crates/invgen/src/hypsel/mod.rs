//! Hypothesis selection among candidate distributions.
//!
//! Two candidates compete on the region where the first one's (approximate)
//! probability is at least the second's; a round-robin tournament over all
//! pairs returns a candidate that never lost.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::distributions::{Distribution, WeightedIndex};
use rand::RngCore;
use rayon::prelude::*;

use crate::core::MassTable;
use crate::error::{Error, Result};
use crate::genct::{draw_retrying, BottomSampler};

/// Deterministic approximate probability oracle.
pub type EvalFn<T> = Arc<dyn Fn(&T) -> f64 + Send + Sync>;

/// A candidate distribution: a sampler plus an evaluation oracle.
pub struct CandidateDistribution<T> {
    pub label: usize,
    pub sampler: Arc<dyn BottomSampler<T>>,
    pub eval: EvalFn<T>,
}

impl<T> Clone for CandidateDistribution<T> {
    fn clone(&self) -> Self {
        CandidateDistribution { label: self.label, sampler: Arc::clone(&self.sampler), eval: Arc::clone(&self.eval) }
    }
}

impl<T> CandidateDistribution<T> {
    pub fn new(label: usize, sampler: Arc<dyn BottomSampler<T>>, eval: EvalFn<T>) -> Self {
        CandidateDistribution { label, sampler, eval }
    }

    /// Membership of `x` in `H = {x : evalᵢ(x) ≥ evalⱼ(x)}`; ties are members.
    pub fn prefers(&self, other: &Self, x: &T) -> bool {
        (self.eval)(x) >= (other.eval)(x)
    }
}

/// Exact sampler for an explicit probability table.
pub struct TableSampler<T> {
    points: Vec<T>,
    index: WeightedIndex<f64>,
}

impl<T: Ord + Clone> TableSampler<T> {
    pub fn new(table: &MassTable<T>) -> Result<Self> {
        let (points, weights): (Vec<T>, Vec<f64>) =
            table.support().iter().filter(|(_, &p)| p > 0.0).map(|(x, &p)| (x.clone(), p)).unzip();
        let index = WeightedIndex::new(&weights).map_err(|e| Error::invalid(format!("bad table: {e}")))?;
        Ok(TableSampler { points, index })
    }
}

impl<T: Clone + Send + Sync> BottomSampler<T> for TableSampler<T> {
    fn generate(&self, mut rng: &mut dyn RngCore) -> Option<T> {
        Some(self.points[self.index.sample(&mut rng)].clone())
    }
}

/// A candidate backed by an explicit table whose oracle returns
/// `table(x) · distort(x)`.
pub fn table_candidate<T>(
    label: usize,
    table: MassTable<T>,
    distort: impl Fn(&T) -> f64 + Send + Sync + 'static,
) -> Result<CandidateDistribution<T>>
where
    T: Ord + Clone + Send + Sync + 'static,
{
    let sampler = Arc::new(TableSampler::new(&table)?);
    let eval: EvalFn<T> = Arc::new(move |x| table.prob(x) * distort(x));
    Ok(CandidateDistribution::new(label, sampler, eval))
}

/// Draws collapsed to counts per distinct value.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet<T> {
    counts: Vec<(T, u64)>,
    total: u64,
}

impl<T: Ord + Clone> SampleSet<T> {
    pub fn from_draws<I: IntoIterator<Item = T>>(draws: I) -> Self {
        let mut map = BTreeMap::new();
        let mut total = 0;
        for x in draws {
            *map.entry(x).or_insert(0u64) += 1;
            total += 1;
        }
        SampleSet { counts: map.into_iter().collect(), total }
    }

    /// Draws `m` values, retrying ⊥ up to `attempts` times per value.
    pub fn draw(sampler: &dyn BottomSampler<T>, m: u64, attempts: u64, rng: &mut dyn RngCore) -> Result<Self> {
        let mut draws = Vec::with_capacity(m as usize);
        for _ in 0..m {
            draws.push(draw_retrying(sampler, attempts, rng)?);
        }
        Ok(Self::from_draws(draws))
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    /// Fraction of the draws satisfying `pred`.
    pub fn fraction(&self, pred: impl Fn(&T) -> bool) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let hits: u64 = self.counts.iter().filter(|(x, _)| pred(x)).map(|(_, c)| c).sum();
        hits as f64 / self.total as f64
    }
}

/// `m = ⌈(2/γ²) ln(2/δ)⌉`.
pub fn estimate_sample_size(gamma: f64, delta: f64) -> u64 {
    ((2.0 / (gamma * gamma)) * (2.0 / delta).ln()).ceil() as u64
}

/// `m′ = ⌈(8/ε′²) ln(2/δ′)⌉`.
pub fn competition_sample_size(eps_prime: f64, delta_prime: f64) -> u64 {
    ((8.0 / (eps_prime * eps_prime)) * (2.0 / delta_prime).ln()).ceil() as u64
}

/// `m = ⌈(8/ε²)(ln N + ln(2/δ))⌉`.
pub fn tournament_sample_size(n: usize, epsilon: f64, delta: f64) -> u64 {
    ((8.0 / (epsilon * epsilon)) * ((n.max(1) as f64).ln() + (2.0 / delta).ln())).ceil() as u64
}

/// Attempts allowed per draw from a ⊥-emitting sampler: `⌈20 ln(2Nm/δ)⌉`.
pub fn retry_attempts(draws: u64, delta: f64) -> u64 {
    (20.0 * (2.0 * draws.max(1) as f64 / delta).ln()).ceil().max(1.0) as u64
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must lie in (0,1), got {v}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    First,
    Second,
}

/// Estimates the mass of `H = {x : evalᵢ(x) ≥ evalⱼ(x)}` under the designated
/// side's distribution to `±γ` with confidence `1−δ`.
pub fn estimate_region_mass<T: Ord + Clone>(
    i: &CandidateDistribution<T>,
    j: &CandidateDistribution<T>,
    draw_from: Side,
    gamma: f64,
    delta: f64,
    rng: &mut dyn RngCore,
) -> Result<f64> {
    check_unit("gamma", gamma)?;
    check_unit("delta", delta)?;
    let m = estimate_sample_size(gamma, delta);
    let source = match draw_from {
        Side::First => &i.sampler,
        Side::Second => &j.sampler,
    };
    let s = SampleSet::draw(source.as_ref(), m, retry_attempts(m, delta), rng)?;
    Ok(s.fraction(|x| i.prefers(j, x)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case", tag = "result", content = "label")]
pub enum Verdict {
    Winner(usize),
    Draw,
}

/// Statistics of one competition, reported for the lower-labelled candidate as `i`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct CompetitionOutcome {
    pub first: usize,
    pub second: usize,
    pub verdict: Verdict,
    pub p_tilde: f64,
    pub q_tilde: f64,
    pub delta_tilde: f64,
    /// Only computed when the gap exceeds the draw threshold.
    pub tau_hat: Option<f64>,
}

impl CompetitionOutcome {
    pub fn loser(&self) -> Option<usize> {
        match self.verdict {
            Verdict::Winner(w) if w == self.first => Some(self.second),
            Verdict::Winner(_) => Some(self.first),
            Verdict::Draw => None,
        }
    }
}

/// Whether the first, second or neither candidate wins given the region
/// statistics; `tau` is only consulted past the draw threshold.
pub fn decide(p_tilde: f64, q_tilde: f64, tau: impl FnOnce() -> f64, eps_prime: f64) -> (Option<Side>, Option<f64>) {
    if p_tilde - q_tilde <= 4.5 * eps_prime {
        return (None, None);
    }
    let t = tau();
    let side = if t > p_tilde - 1.625 * eps_prime {
        Some(Side::First)
    } else if t < q_tilde + 1.625 * eps_prime {
        Some(Side::Second)
    } else {
        None
    };
    (side, Some(t))
}

fn ordered<'a, T>(
    i: &'a CandidateDistribution<T>,
    j: &'a CandidateDistribution<T>,
) -> (&'a CandidateDistribution<T>, &'a CandidateDistribution<T>, bool) {
    if j.label < i.label {
        (j, i, true)
    } else {
        (i, j, false)
    }
}

fn outcome<T>(
    a: &CandidateDistribution<T>,
    b: &CandidateDistribution<T>,
    p: f64,
    q: f64,
    tau: impl FnOnce() -> f64,
    eps_prime: f64,
) -> CompetitionOutcome {
    let (side, tau_hat) = decide(p, q, tau, eps_prime);
    let verdict = match side {
        Some(Side::First) => Verdict::Winner(a.label),
        Some(Side::Second) => Verdict::Winner(b.label),
        None => Verdict::Draw,
    };
    CompetitionOutcome { first: a.label, second: b.label, verdict, p_tilde: p, q_tilde: q, delta_tilde: p - q, tau_hat }
}

/// The pairwise competition with fresh samples.
///
/// The candidates are put in label order first, so swapping the arguments
/// gives the same outcome for the same randomness.
pub fn choose_hypothesis<T: Ord + Clone>(
    target_source: &dyn BottomSampler<T>,
    i: &CandidateDistribution<T>,
    j: &CandidateDistribution<T>,
    eps_prime: f64,
    delta_prime: f64,
    rng: &mut dyn RngCore,
) -> Result<CompetitionOutcome> {
    check_unit("eps_prime", eps_prime)?;
    check_unit("delta_prime", delta_prime)?;
    let (a, b, _) = ordered(i, j);
    let p = estimate_region_mass(a, b, Side::First, eps_prime / 8.0, delta_prime / 4.0, rng)?;
    let q = estimate_region_mass(a, b, Side::Second, eps_prime / 8.0, delta_prime / 4.0, rng)?;
    let m = competition_sample_size(eps_prime, delta_prime);
    let mut drawn: Option<Result<f64>> = None;
    let out = outcome(
        a,
        b,
        p,
        q,
        || {
            let r = SampleSet::draw(target_source, m, retry_attempts(m, delta_prime), rng)
                .map(|s| s.fraction(|x| a.prefers(b, x)));
            let v = *r.as_ref().unwrap_or(&f64::NAN);
            drawn = Some(r);
            v
        },
        eps_prime,
    );
    if let Some(Err(e)) = drawn {
        return Err(e);
    }
    Ok(out)
}

/// The competition on pre-drawn samples.
pub fn compete_on_samples<T: Ord + Clone>(
    i: (&CandidateDistribution<T>, &SampleSet<T>),
    j: (&CandidateDistribution<T>, &SampleSet<T>),
    target: &SampleSet<T>,
    eps_prime: f64,
) -> CompetitionOutcome {
    let (a, b) = if j.0.label < i.0.label { (j, i) } else { (i, j) };
    let inside = |x: &T| a.0.prefers(b.0, x);
    let p = a.1.fraction(inside);
    let q = b.1.fraction(inside);
    outcome(a.0, b.0, p, q, || target.fraction(inside), eps_prime)
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct TournamentResult {
    pub winner: usize,
    pub samples_per_distribution: u64,
    pub competitions: Vec<CompetitionOutcome>,
}

/// Round-robin tournament returning the lowest-indexed candidate that never lost.
///
/// `sample_cap` optionally bounds the per-distribution sample count.
pub fn tournament<T>(
    target_source: &dyn BottomSampler<T>,
    candidates: &[CandidateDistribution<T>],
    epsilon: f64,
    delta: f64,
    sample_cap: Option<u64>,
    rng: &mut dyn RngCore,
) -> Result<TournamentResult>
where
    T: Ord + Clone + Send + Sync,
{
    check_unit("epsilon", epsilon)?;
    check_unit("delta", delta)?;
    let n = candidates.len();
    if n == 0 {
        return Err(Error::invalid("tournament needs at least one candidate"));
    }
    if n == 1 {
        return Ok(TournamentResult { winner: 0, samples_per_distribution: 0, competitions: Vec::new() });
    }
    let m = tournament_sample_size(n, epsilon, delta).min(sample_cap.unwrap_or(u64::MAX)).max(1);
    let attempts = retry_attempts(n as u64 * m, delta);
    let target = SampleSet::draw(target_source, m, attempts, rng)?;
    let mut pools = Vec::with_capacity(n);
    for c in candidates {
        pools.push(SampleSet::draw(c.sampler.as_ref(), m, attempts, rng)?);
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let competitions: Vec<CompetitionOutcome> = pairs
        .par_iter()
        .map(|&(i, j)| compete_on_samples((&candidates[i], &pools[i]), (&candidates[j], &pools[j]), &target, epsilon))
        .collect();
    let mut lost = vec![false; n];
    let position: BTreeMap<usize, usize> = candidates.iter().enumerate().map(|(k, c)| (c.label, k)).collect();
    for c in &competitions {
        if let Some(l) = c.loser() {
            lost[position[&l]] = true;
        }
    }
    let winner = lost.iter().position(|&l| !l).ok_or(Error::SelectionFailure)?;
    Ok(TournamentResult { winner, samples_per_distribution: m, competitions })
}
