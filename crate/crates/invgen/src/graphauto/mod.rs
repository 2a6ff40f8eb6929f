//! Uniform sampling from a graph's automorphism group, learned from uniform
//! samples of the group: a lazy random walk on the Cayley graph generated by
//! the samples and their inverses.

mod fixtures;
mod graph;
mod perm;

use std::collections::HashMap;
use std::sync::Mutex;

use rand::{Rng, RngCore};

use crate::core::MassTable;
use crate::error::{Error, Result};
use crate::genct::BottomSampler;

pub use fixtures::{complete_graph, cycle_graph, dihedral_group, petersen_automorphisms, petersen_graph, rigid_graph, symmetric_group};
pub use graph::{brute_force_automorphisms, parse_graph, Graph, BRUTE_FORCE_CAP};
pub use perm::Permutation;

/// Number of sampled generators, `⌈2(n ln n + ln(1/δ))⌉ + 4`.
pub fn generator_count(n: usize, delta: f64) -> Result<u64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!("delta must lie in (0,1), got {delta}")));
    }
    let n = n as f64;
    Ok((2.0 * (n * n.max(1.0).ln() + (1.0 / delta).ln())).ceil() as u64 + 4)
}

/// Walk length, `⌈2(n ln n + ln(1/ε))⌉ + 4`.
pub fn walk_length(n: usize, epsilon: f64) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid(format!("epsilon must lie in (0,1), got {epsilon}")));
    }
    let n = n as f64;
    Ok((2.0 * (n * n.max(1.0).ln() + (1.0 / epsilon).ln())).ceil() as u64 + 4)
}

/// A symmetric generating list: the identity followed by each distinct
/// sample and its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CayleySet {
    n: usize,
    elements: Vec<Permutation>,
}

impl CayleySet {
    pub fn from_samples(n: usize, samples: &[Permutation]) -> Result<Self> {
        let mut elements = vec![Permutation::identity(n)];
        for s in samples {
            if s.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: s.len() });
            }
            for p in [s.clone(), s.inverse()] {
                if !elements.contains(&p) {
                    elements.push(p);
                }
            }
        }
        Ok(CayleySet { n, elements })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn is_symmetric(&self) -> bool {
        self.elements.iter().all(|s| self.elements.contains(&s.inverse()))
    }

    /// The subgroup generated by the set, by breadth-first closure.
    pub fn closure(&self, limit: usize) -> Result<Vec<Permutation>> {
        let mut seen = vec![Permutation::identity(self.n)];
        let mut index: HashMap<Permutation, usize> = seen.iter().cloned().map(|p| (p, 0)).collect();
        let mut i = 0;
        while i < seen.len() {
            for s in &self.elements {
                let next = seen[i].compose(s);
                if !index.contains_key(&next) {
                    if seen.len() >= limit {
                        return Err(Error::Capacity(format!("generated group exceeds {limit} elements")));
                    }
                    index.insert(next.clone(), seen.len());
                    seen.push(next);
                }
            }
            i += 1;
        }
        seen.sort();
        Ok(seen)
    }

    /// Exact distribution of the lazy walk's endpoint after `steps` steps.
    pub fn walk_distribution(&self, steps: u64, limit: usize) -> Result<MassTable<Permutation>> {
        let group = self.closure(limit)?;
        let index: HashMap<&Permutation, usize> = group.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let table: Vec<Vec<usize>> =
            group.iter().map(|g| self.elements.iter().map(|s| index[&g.compose(s)]).collect()).collect();
        let mut dist = vec![0.0; group.len()];
        dist[index[&Permutation::identity(self.n)]] = 1.0;
        let move_p = 0.5 / self.elements.len() as f64;
        for _ in 0..steps {
            let mut next: Vec<f64> = dist.iter().map(|p| 0.5 * p).collect();
            for (g, p) in dist.iter().enumerate() {
                for &t in &table[g] {
                    next[t] += move_p * p;
                }
            }
            dist = next;
        }
        MassTable::from_weights(group.into_iter().zip(dist))
    }
}

#[derive(Default)]
struct CayleyCache {
    elements: Vec<Permutation>,
    index: HashMap<Permutation, u32>,
    /// `next[e·|S| + s]` is the index of `elements[e]·S[s]`, or `u32::MAX` if not yet computed.
    next: Vec<u32>,
}

impl CayleyCache {
    fn intern(&mut self, p: Permutation, width: usize) -> u32 {
        if let Some(&i) = self.index.get(&p) {
            return i;
        }
        let i = self.elements.len() as u32;
        self.index.insert(p.clone(), i);
        self.elements.push(p);
        self.next.extend(std::iter::repeat_n(u32::MAX, width));
        i
    }
}

/// Emits the endpoint of a lazy walk from the identity: each step holds with
/// probability ½ and otherwise right-multiplies by a uniform element of the set.
/// Products are memoized, so repeated draws cost one table lookup per step.
pub struct AutSampler {
    set: CayleySet,
    steps: u64,
    cache: Mutex<CayleyCache>,
}

impl std::fmt::Debug for AutSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AutSampler").field("set", &self.set).field("steps", &self.steps).finish()
    }
}

impl AutSampler {
    pub fn new(set: CayleySet, steps: u64) -> Self {
        let mut cache = CayleyCache::default();
        cache.intern(Permutation::identity(set.n), set.elements.len());
        AutSampler { set, steps, cache: Mutex::new(cache) }
    }

    pub fn set(&self) -> &CayleySet {
        &self.set
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// One walk, returning the endpoint and the indices of the generators applied.
    pub fn walk_word(&self, rng: &mut dyn RngCore) -> (Permutation, Vec<usize>) {
        let mut cur = Permutation::identity(self.set.n);
        let mut word = Vec::new();
        for _ in 0..self.steps {
            if rng.gen_bool(0.5) {
                let s = rng.gen_range(0..self.set.elements.len());
                cur = cur.compose(&self.set.elements[s]);
                word.push(s);
            }
        }
        (cur, word)
    }

    /// Index of a walk endpoint in the memo table; see [`AutSampler::element`].
    pub fn walk_index(&self, rng: &mut dyn RngCore) -> u32 {
        let width = self.set.elements.len();
        let mut cache = self.cache.lock().unwrap_or_else(|e| e.into_inner());
        let mut cur = 0u32;
        for _ in 0..self.steps {
            if rng.gen_bool(0.5) {
                let s = rng.gen_range(0..width);
                let slot = cur as usize * width + s;
                cur = match cache.next[slot] {
                    u32::MAX => {
                        let p = cache.elements[cur as usize].compose(&self.set.elements[s]);
                        let i = cache.intern(p, width);
                        cache.next[slot] = i;
                        i
                    }
                    i => i,
                };
            }
        }
        cur
    }

    pub fn element(&self, index: u32) -> Permutation {
        self.cache.lock().unwrap_or_else(|e| e.into_inner()).elements[index as usize].clone()
    }
}

impl BottomSampler<Permutation> for AutSampler {
    fn generate(&self, rng: &mut dyn RngCore) -> Option<Permutation> {
        let i = self.walk_index(rng);
        Some(self.element(i))
    }
}

/// Builds a sampler for the group the source draws from, using
/// `generator_count(n, δ)` samples and a walk of `walk_length(n, ε)` steps.
pub fn build_aut_inverse_sampler(
    sample_source: &dyn BottomSampler<Permutation>,
    n: usize,
    epsilon: f64,
    delta: f64,
    rng: &mut dyn RngCore,
) -> Result<AutSampler> {
    let k = generator_count(n, delta)?;
    let steps = walk_length(n, epsilon)?;
    let mut samples = Vec::with_capacity(k as usize);
    for _ in 0..k {
        let s = sample_source.generate(rng).ok_or_else(|| Error::invalid("the automorphism sample source is empty"))?;
        samples.push(s);
    }
    Ok(AutSampler::new(CayleySet::from_samples(n, &samples)?, steps))
}
