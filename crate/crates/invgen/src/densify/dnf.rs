use std::collections::HashSet;

use rand::{RngCore, SeedableRng};
use rayon::prelude::*;

use super::{DensifierParams, SOURCE_ATTEMPTS};
use crate::core::{Assignment, BoolFunc, Conjunction, FeatureDisjunction};
use crate::error::{Error, Result};
use crate::genct::{draw_retrying, BottomSampler};
use crate::seed::Rng;

const CHUNK: u64 = 1024;

#[derive(Clone, Debug)]
pub struct DnfDensifierOutput {
    pub n: usize,
    /// Distinct candidate terms in order of first appearance.
    pub terms: Vec<Conjunction>,
    /// For each term, the batch of positives it was formed from.
    pub witnesses: Vec<Vec<Assignment>>,
    pub iterations: u64,
    pub declared_m: f64,
    pub gamma: f64,
}

impl DnfDensifierOutput {
    /// `g = ∨ Cᵢ`, or the constant-false function when no term survived.
    pub fn to_bool_func(&self) -> Result<BoolFunc> {
        if self.terms.is_empty() {
            return Ok(BoolFunc::ConstFalse { n: self.n });
        }
        let all = (0..self.terms.len()).collect();
        Ok(BoolFunc::FeatureDisjunction(FeatureDisjunction::new(self.n, self.terms.clone(), all)?))
    }
}

type Candidates = Vec<(Conjunction, Vec<Assignment>)>;

fn run_chunk(pos_source: &dyn BottomSampler, iters: u64, r: usize, p_hat: f64, seed: u64) -> Result<Candidates> {
    let mut rng = Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut batch = Vec::with_capacity(r);
    for _ in 0..iters {
        batch.clear();
        for _ in 0..r {
            batch.push(draw_retrying(pos_source, SOURCE_ATTEMPTS, &mut rng)?);
        }
        let Some(c) = Conjunction::common_literals(&batch) else { continue };
        if c.mass() <= p_hat && seen.insert(c) {
            out.push((c, batch.clone()));
        }
    }
    Ok(out)
}

/// DNF densifier: collects the conjunctions of literals shared by batches of
/// `r` positives whose uniform mass `2^{-width}` is at most `p̂`.
pub fn densify_dnf(
    pos_source: &dyn BottomSampler,
    params: &DensifierParams,
    n: usize,
    s: usize,
    rng: &mut dyn RngCore,
) -> Result<DnfDensifierOutput> {
    if s == 0 {
        return Err(Error::invalid("term count s must be at least 1"));
    }
    let iters = params.iterations();
    let chunks: Vec<(u64, u64)> =
        (0..iters.div_ceil(CHUNK)).map(|i| (CHUNK.min(iters - i * CHUNK), rng.next_u64())).collect();
    let parts: Vec<Result<Candidates>> =
        chunks.par_iter().map(|&(len, seed)| run_chunk(pos_source, len, params.r, params.p_hat, seed)).collect();
    let mut seen = HashSet::new();
    let mut terms = Vec::new();
    let mut witnesses = Vec::new();
    for part in parts {
        for (c, batch) in part? {
            if let Some(x) = batch.iter().find(|x| x.dim() != n) {
                return Err(Error::DimensionMismatch { expected: n, got: x.dim() });
            }
            if seen.insert(c) {
                terms.push(c);
                witnesses.push(batch);
            }
        }
    }
    Ok(DnfDensifierOutput { n, terms, witnesses, iterations: iters, declared_m: params.m, gamma: params.gamma })
}

#[derive(Clone, Debug, PartialEq)]
pub struct KdnfDensifierOutput {
    pub g: BoolFunc,
    pub gamma: f64,
}

/// For k-DNF targets the constant-true function is a `2^{-k}`-densifier.
pub fn densify_kdnf(n: usize, k: usize) -> KdnfDensifierOutput {
    KdnfDensifierOutput { g: BoolFunc::ConstTrue { n }, gamma: 0.5f64.powi(k as i32) }
}
