use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use crate::{CliError, CliResult};

pub const SCHEMA: u32 = 1;

/// Distance between a sampler's draws and the uniform distribution on a target support.
#[derive(Clone, Debug, Serialize)]
pub struct TvSection {
    /// `exact` enumerates the target support; `empirical` compares against reference draws.
    pub mode: &'static str,
    pub draws: u64,
    pub bottom: u64,
    /// Draws per point, keyed by the 0/1 string.
    pub counts: BTreeMap<String, u64>,
    /// `|f⁻¹(1)|` in exact mode.
    pub support_size: Option<u64>,
    /// Reference draws per point in empirical mode.
    pub reference_counts: Option<BTreeMap<String, u64>>,
    pub tv: f64,
    /// Deviation of the plug-in estimate from its mean at 95% confidence, `√(ln(40)/(2N))`.
    pub half_width: f64,
    /// Upper bound on the plug-in estimate's upward bias, `½√(K/N)`.
    pub bias_bound: f64,
    /// Set when the target support was not enumerated.
    pub support_caveat: bool,
    pub threshold: f64,
    pub pass: bool,
}

/// Plug-in TV between the empirical distribution of `counts` and the uniform
/// distribution on `support`.
pub fn recompute_tv_from_counts(counts: &BTreeMap<String, u64>, support: &BTreeSet<String>) -> f64 {
    let total: u64 = counts.values().sum();
    if total == 0 {
        return 1.0;
    }
    let (n, k) = (total as f64, support.len() as f64);
    let mut sum = 0.0;
    for x in support {
        let c = counts.get(x).copied().unwrap_or(0) as f64;
        sum += (c / n - 1.0 / k).abs();
    }
    for (x, &c) in counts {
        if !support.contains(x) {
            sum += c as f64 / n;
        }
    }
    0.5 * sum
}

/// Plug-in TV between two empirical distributions.
pub fn tv_between_counts(a: &BTreeMap<String, u64>, b: &BTreeMap<String, u64>) -> f64 {
    let (na, nb) = (a.values().sum::<u64>().max(1) as f64, b.values().sum::<u64>().max(1) as f64);
    let keys: BTreeSet<&String> = a.keys().chain(b.keys()).collect();
    0.5 * keys
        .into_iter()
        .map(|k| {
            let pa = a.get(k).copied().unwrap_or(0) as f64 / na;
            let pb = b.get(k).copied().unwrap_or(0) as f64 / nb;
            (pa - pb).abs()
        })
        .sum::<f64>()
}

pub fn half_width(draws: u64) -> f64 {
    if draws == 0 {
        return 1.0;
    }
    (40f64.ln() / (2.0 * draws as f64)).sqrt()
}

pub fn bias_bound(support: u64, draws: u64) -> f64 {
    if draws == 0 {
        return 1.0;
    }
    (0.5 * (support as f64 / draws as f64).sqrt()).min(1.0)
}

/// Stage timings in milliseconds.
#[derive(Debug, Default, Serialize)]
pub struct Timings {
    stages: BTreeMap<String, f64>,
    #[serde(skip)]
    last: Option<Instant>,
}

impl Timings {
    pub fn start() -> Self {
        Timings { stages: BTreeMap::new(), last: Some(Instant::now()) }
    }

    pub fn lap(&mut self, stage: &str) {
        let now = Instant::now();
        if let Some(t) = self.last {
            self.stages.insert(stage.to_string(), (now - t).as_secs_f64() * 1e3);
        }
        self.last = Some(now);
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Usage(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}
