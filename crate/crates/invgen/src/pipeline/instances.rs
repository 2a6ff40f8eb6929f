use rand::seq::index::sample;
use rand::Rng;
use rand::RngCore;

use crate::core::{Conjunction, Dnf, Literal, Ltf};
use crate::error::{Error, Result};

/// Random integer threshold function with weights uniform in `[−w, w]` and
/// threshold uniform in `[−S/2, S/2]`, `S = Σ|wᵢ|`.
pub fn random_ltf(n: usize, w_bound: i64, rng: &mut dyn RngCore) -> Result<Ltf> {
    if !(1..=crate::core::W_MAX).contains(&w_bound) {
        return Err(Error::invalid(format!("weight bound {w_bound} out of range")));
    }
    let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(-w_bound..=w_bound)).collect();
    let half = weights.iter().map(|w| w.abs()).sum::<i64>() / 2;
    let theta = rng.gen_range(-half..=half);
    Ltf::new(weights, theta)
}

fn random_term(n: usize, width: usize, rng: &mut dyn RngCore) -> Result<Conjunction> {
    if width == 0 || width > n {
        return Err(Error::invalid(format!("term width {width} out of range for n={n}")));
    }
    let mut lits: Vec<Literal> = sample(rng, n, width)
        .into_iter()
        .map(|v| if rng.gen_bool(0.5) { Literal::pos(v + 1) } else { Literal::neg(v + 1) })
        .collect();
    lits.sort();
    Conjunction::new(&lits)
}

/// `s` random terms with widths drawn uniformly from `widths`.
pub fn planted_dnf(n: usize, s: usize, widths: std::ops::RangeInclusive<usize>, rng: &mut dyn RngCore) -> Result<Dnf> {
    if s == 0 || widths.is_empty() {
        return Err(Error::invalid("need at least one term and a non-empty width range"));
    }
    let terms = (0..s)
        .map(|_| {
            let w = rng.gen_range(widths.clone());
            random_term(n, w, rng)
        })
        .collect::<Result<Vec<_>>>()?;
    Dnf::new(n, terms)
}

/// `terms` random conjunctions of width exactly `k`.
pub fn random_kdnf(n: usize, k: usize, terms: usize, rng: &mut dyn RngCore) -> Result<Dnf> {
    planted_dnf(n, terms, k..=k, rng)
}

/// Majority of `n` variables: at least as many ones as zeros.
pub fn majority(n: usize) -> Ltf {
    Ltf::new(vec![1; n], if n.is_multiple_of(2) { 0 } else { 1 }).expect("unit weights")
}
