use std::collections::BTreeMap;

use rand::RngCore;

use super::{Answer, BiasEstimate, StatOracle, StatQuery, VecQuery};
use crate::core::Assignment;
use crate::error::Result;
use crate::genct::{draw_retrying, BottomSampler};

/// Empirical Bernstein confidence radius for the mean of `m` draws of a
/// variable with range width `range` and sample variance `var`.
pub fn empirical_bernstein(var: f64, m: u64, range: f64, delta: f64) -> f64 {
    if m < 2 {
        return range;
    }
    let l = (2.0 / delta).ln();
    (2.0 * var.max(0.0) * l / m as f64).sqrt() + 7.0 * range * l / (3.0 * (m - 1) as f64)
}

/// A multiset of points stored as distinct points with multiplicities.
#[derive(Clone, Debug)]
struct Pool {
    points: Vec<(Assignment, u64)>,
    total: u64,
}

impl Pool {
    fn draw(sampler: &dyn BottomSampler, m: u64, attempts: u64, rng: &mut dyn RngCore) -> Result<Self> {
        let mut counts: BTreeMap<Assignment, u64> = BTreeMap::new();
        for _ in 0..m {
            *counts.entry(draw_retrying(sampler, attempts, rng)?).or_insert(0) += 1;
        }
        Ok(Pool { points: counts.into_iter().collect(), total: m })
    }

    fn from_points(points: &[Assignment]) -> Self {
        let mut counts: BTreeMap<Assignment, u64> = BTreeMap::new();
        for x in points {
            *counts.entry(*x).or_insert(0) += 1;
        }
        Pool { points: counts.into_iter().collect(), total: points.len() as u64 }
    }

    /// Mean and sample variance of `v(x)` over the pool.
    fn moments(&self, mut v: impl FnMut(&Assignment) -> f64) -> (f64, f64) {
        let (mut s, mut s2) = (0.0, 0.0);
        for (x, c) in &self.points {
            let y = v(x);
            s += *c as f64 * y;
            s2 += *c as f64 * y * y;
        }
        let m = self.total as f64;
        let mean = s / m;
        let var = if self.total > 1 { ((s2 - m * mean * mean) / (m - 1.0)).max(0.0) } else { 0.0 };
        (mean, var)
    }
}

/// STAT simulation over two fixed pools: draws from `D` and positive examples
/// from `D_{f,+}`.
///
/// Every answer is `Ẽ₁ + b̃·Ẽ₂` computed on the pools, reported with an
/// empirical Bernstein radius at the configured per-query confidence.
pub struct PooledOracle {
    d_pool: Pool,
    p_pool: Pool,
    bias: BiasEstimate,
    delta: f64,
    clamped: usize,
    answered: u64,
}

impl PooledOracle {
    pub fn draw(
        d_sampler: &dyn BottomSampler,
        pos_sampler: &dyn BottomSampler,
        m_d: u64,
        m_pos: u64,
        attempts: u64,
        bias: BiasEstimate,
        rng: &mut dyn RngCore,
    ) -> Result<Self> {
        let d_pool = Pool::draw(d_sampler, m_d.max(1), attempts, rng)?;
        let p_pool = Pool::draw(pos_sampler, m_pos.max(1), attempts, rng)?;
        Ok(PooledOracle { d_pool, p_pool, bias, delta: 0.05, clamped: 0, answered: 0 })
    }

    pub fn from_points(d_points: &[Assignment], pos_points: &[Assignment], bias: BiasEstimate) -> Self {
        PooledOracle {
            d_pool: Pool::from_points(d_points),
            p_pool: Pool::from_points(pos_points),
            bias,
            delta: 0.05,
            clamped: 0,
            answered: 0,
        }
    }

    pub fn bias(&self) -> BiasEstimate {
        self.bias
    }

    pub fn pool_sizes(&self) -> (u64, u64) {
        (self.d_pool.total, self.p_pool.total)
    }

    pub fn distinct_points(&self) -> (usize, usize) {
        (self.d_pool.points.len(), self.p_pool.points.len())
    }

    /// Number of query evaluations that had to be clamped into `[−1, 1]`.
    pub fn clamped(&self) -> usize {
        self.clamped
    }

    /// Number of scalar answers given so far.
    pub fn answered(&self) -> u64 {
        self.answered
    }

    fn combine(&self, (m1, v1): (f64, f64), (m2, v2): (f64, f64)) -> Answer {
        let b = self.bias.value;
        let r1 = empirical_bernstein(v1, self.d_pool.total, 2.0, self.delta / 2.0);
        let r2 = empirical_bernstein(v2, self.p_pool.total, 4.0, self.delta / 2.0);
        Answer { value: m1 + b * m2, radius: r1 + b * r2 + self.bias.claimed_accuracy * m2.abs() }
    }
}

impl StatOracle for PooledOracle {
    fn answer(&mut self, q: &StatQuery) -> Result<Answer> {
        let mut clamped = 0;
        let mut eval = |x: &Assignment, y| {
            let (v, hit) = q.eval(x, y);
            clamped += hit as usize;
            v
        };
        let e1 = self.d_pool.moments(|x| eval(x, -1));
        let e2 = self.p_pool.moments(|x| eval(x, 1) - eval(x, -1));
        self.clamped += clamped;
        self.answered += 1;
        Ok(self.combine(e1, e2))
    }

    fn answer_vec(&mut self, q: &VecQuery) -> Result<Vec<Answer>> {
        let d = q.dim();
        let (mut buf, mut buf2) = (vec![0.0; d], vec![0.0; d]);
        let mut acc = |pool: &Pool, two_sided: bool, clamped: &mut usize| {
            let (mut s, mut s2) = (vec![0.0; d], vec![0.0; d]);
            for (x, c) in &pool.points {
                let c = *c as f64;
                if two_sided {
                    *clamped += q.eval(x, 1, &mut buf);
                    *clamped += q.eval(x, -1, &mut buf2);
                    for j in 0..d {
                        let v = buf[j] - buf2[j];
                        s[j] += c * v;
                        s2[j] += c * v * v;
                    }
                } else {
                    *clamped += q.eval(x, -1, &mut buf);
                    for j in 0..d {
                        s[j] += c * buf[j];
                        s2[j] += c * buf[j] * buf[j];
                    }
                }
            }
            let m = pool.total as f64;
            (0..d)
                .map(|j| {
                    let mean = s[j] / m;
                    let var = if pool.total > 1 { ((s2[j] - m * mean * mean) / (m - 1.0)).max(0.0) } else { 0.0 };
                    (mean, var)
                })
                .collect::<Vec<_>>()
        };
        let mut clamped = 0;
        let e1 = acc(&self.d_pool, false, &mut clamped);
        let e2 = acc(&self.p_pool, true, &mut clamped);
        self.clamped += clamped;
        self.answered += d as u64;
        Ok(e1.into_iter().zip(e2).map(|(a, b)| self.combine(a, b)).collect())
    }

    fn set_query_confidence(&mut self, delta: f64) {
        self.delta = delta;
    }
}
