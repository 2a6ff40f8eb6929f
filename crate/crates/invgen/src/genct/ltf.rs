use std::sync::Arc;

use rand::{Rng, RngCore};

use super::{BottomSampler, CountEstimate};
use crate::core::{Assignment, Ltf};
use crate::error::{Error, Result};

/// Largest DP table (in cells) the exact LTF tools will allocate.
pub const DP_CELL_CAP: usize = 1 << 22;

/// Suffix-count table for an integer LTF.
///
/// Row `i` holds, for every target `t`, the number of settings of variables
/// `i..n` whose contribution `Σ_{j≥i} wⱼ(2bⱼ−1)` is at least `t`.
#[derive(Debug)]
pub struct LtfTable {
    ltf: Ltf,
    radius: i64,
    tails: Vec<i64>,
    rows: Vec<Vec<u128>>,
}

impl LtfTable {
    pub fn build(ltf: &Ltf) -> Result<Self> {
        let n = ltf.dim();
        if n > 127 {
            return Err(Error::Capacity(format!("dimension {n} overflows the DP counters")));
        }
        let mut tails = vec![0i64; n + 1];
        for i in (0..n).rev() {
            tails[i] = tails[i + 1]
                .checked_add(ltf.weights()[i].abs())
                .ok_or_else(|| Error::Capacity("weight sum overflows".into()))?;
        }
        let radius = tails[0];
        let width = 2 * radius as usize + 1;
        if width.saturating_mul(n + 1) > DP_CELL_CAP {
            return Err(Error::Capacity(format!("DP table of {} x {width} cells exceeds the cap", n + 1)));
        }
        let idx = |s: i64| (s + radius) as usize;
        let mut rows = vec![Vec::new(); n + 1];
        let mut dist = vec![0u128; width];
        dist[idx(0)] = 1;
        rows[n] = suffix_sums(&dist);
        for i in (0..n).rev() {
            let w = ltf.weights()[i];
            let mut next = vec![0u128; width];
            let r = tails[i + 1];
            for s in -r..=r {
                let c = dist[idx(s)];
                if c != 0 {
                    next[idx(s + w)] += c;
                    next[idx(s - w)] += c;
                }
            }
            dist = next;
            rows[i] = suffix_sums(&dist);
        }
        Ok(LtfTable { ltf: ltf.clone(), radius, tails, rows })
    }

    pub fn ltf(&self) -> &Ltf {
        &self.ltf
    }

    /// Number of settings of variables `i..n` contributing at least `t`.
    fn completions(&self, i: usize, t: i64) -> u128 {
        let n = self.ltf.dim();
        if t > self.tails[i] {
            0
        } else if t <= -self.tails[i] {
            1u128 << (n - i)
        } else {
            self.rows[i][(t + self.radius) as usize]
        }
    }

    /// Exact number of satisfying points.
    pub fn count(&self) -> u128 {
        self.completions(0, self.ltf.theta())
    }

    pub fn fraction(&self) -> f64 {
        self.count() as f64 / (self.ltf.dim() as f64).exp2()
    }

    /// One exactly uniform satisfying point, or `None` if there are none.
    pub fn sample(&self, rng: &mut dyn RngCore) -> Option<Assignment> {
        let n = self.ltf.dim();
        let mut need = self.ltf.theta();
        if self.completions(0, need) == 0 {
            return None;
        }
        let mut bits = 0u64;
        for i in 0..n {
            let w = self.ltf.weights()[i];
            let one = self.completions(i + 1, need - w);
            let zero = self.completions(i + 1, need + w);
            if rng.gen_range(0..one + zero) < one {
                bits |= 1 << i;
                need -= w;
            } else {
                need += w;
            }
        }
        Some(Assignment::from_raw(n, bits))
    }
}

fn suffix_sums(dist: &[u128]) -> Vec<u128> {
    let mut out = vec![0u128; dist.len()];
    let mut acc = 0u128;
    for i in (0..dist.len()).rev() {
        acc += dist[i];
        out[i] = acc;
    }
    out
}

/// Exact satisfying fraction of an integer LTF.
pub fn ltf_count_exact(f: &Ltf) -> Result<CountEstimate> {
    Ok(CountEstimate::exact(LtfTable::build(f)?.fraction()))
}

/// Exactly uniform generator over the satisfying points of an LTF; never emits ⊥.
#[derive(Debug, Clone)]
pub struct LtfSampler {
    table: Arc<LtfTable>,
}

impl LtfSampler {
    pub fn new(table: Arc<LtfTable>) -> Result<Self> {
        if table.count() == 0 {
            return Err(Error::Infeasible("LTF has no satisfying points".into()));
        }
        Ok(LtfSampler { table })
    }

    pub fn table(&self) -> &LtfTable {
        &self.table
    }
}

impl BottomSampler for LtfSampler {
    fn generate(&self, rng: &mut dyn RngCore) -> Option<Assignment> {
        self.table.sample(rng)
    }
}

pub fn ltf_sample_exact(f: &Ltf) -> Result<LtfSampler> {
    LtfSampler::new(Arc::new(LtfTable::build(f)?))
}
