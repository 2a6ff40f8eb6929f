use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, RngCore};

use super::{BottomSampler, CountEstimate};
use crate::core::{Assignment, Conjunction, Dnf};
use crate::error::{Error, Result};

const MEDIAN_GROUPS: u64 = 9;

/// Karp–Luby trial budget `⌈(8s/ε²)·ln(2/δ)⌉` for an `s`-term DNF.
pub fn karp_luby_trials(s: usize, epsilon: f64, delta: f64) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon < 1.0 && delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!("epsilon={epsilon}, delta={delta} must lie in (0,1)")));
    }
    let m = (8.0 * s as f64 / (epsilon * epsilon) * (2.0 / delta).ln()).ceil();
    if m > 1e12 {
        return Err(Error::Capacity(format!("Karp-Luby budget {m:e} is too large")));
    }
    Ok(m as u64)
}

/// Satisfiable terms of a DNF with their indices and a sampler proportional to their sizes.
struct TermPicker {
    n: usize,
    terms: Vec<Conjunction>,
    live: Vec<usize>,
    pick: WeightedIndex<f64>,
    total_mass: f64,
}

impl TermPicker {
    fn new(f: &Dnf) -> Option<Self> {
        let live: Vec<usize> = (0..f.terms().len()).filter(|&i| f.terms()[i].is_satisfiable()).collect();
        if live.is_empty() {
            return None;
        }
        let masses: Vec<f64> = live.iter().map(|&i| f.terms()[i].mass()).collect();
        let total_mass = masses.iter().sum();
        let pick = WeightedIndex::new(&masses).ok()?;
        Some(TermPicker { n: f.dim(), terms: f.terms().to_vec(), live, pick, total_mass })
    }

    /// Picks a term with probability proportional to its satisfying set and
    /// completes it uniformly; returns the term index and the point.
    fn trial(&self, rng: &mut dyn RngCore) -> (usize, Assignment) {
        let i = self.live[self.pick.sample(rng)];
        let t = &self.terms[i];
        let free: u64 = rng.gen();
        let bits = (free | t.pos_mask()) & !t.neg_mask();
        (i, Assignment::from_raw(self.n, bits))
    }

    fn is_canonical(&self, i: usize, x: &Assignment) -> bool {
        let b = x.bits();
        !self.terms[..i].iter().any(|t| t.eval_bits(b))
    }
}

/// Karp–Luby estimate of the satisfying fraction of a DNF, boosted with a
/// median of 9 group means.
pub fn dnf_count(f: &Dnf, epsilon: f64, delta: f64, rng: &mut dyn RngCore) -> Result<CountEstimate> {
    let budget = karp_luby_trials(f.terms().len(), epsilon, delta)?;
    dnf_count_with_trials(f, budget, epsilon, delta, rng)
}

/// [`dnf_count`] with an explicit trial budget; `epsilon` and `delta` are
/// only recorded in the estimate.
pub fn dnf_count_with_trials(
    f: &Dnf,
    budget: u64,
    epsilon: f64,
    delta: f64,
    rng: &mut dyn RngCore,
) -> Result<CountEstimate> {
    let Some(picker) = TermPicker::new(f) else {
        return Ok(CountEstimate::exact(0.0));
    };
    let per_group = budget.div_ceil(MEDIAN_GROUPS);
    let mut means: Vec<f64> = (0..MEDIAN_GROUPS)
        .map(|_| {
            let hits = (0..per_group)
                .filter(|_| {
                    let (i, x) = picker.trial(rng);
                    picker.is_canonical(i, &x)
                })
                .count();
            hits as f64 / per_group as f64
        })
        .collect();
    means.sort_by(f64::total_cmp);
    let value = (picker.total_mass * means[means.len() / 2]).clamp(0.0, 1.0);
    Ok(CountEstimate { value, epsilon, delta, exact: false })
}

/// Exactly uniform DNF generator: a trial is accepted only when the chosen
/// term is the first term the completed point satisfies.
pub struct DnfSampler {
    picker: TermPicker,
    max_trials: u64,
    delta: f64,
}

impl DnfSampler {
    pub fn max_trials(&self) -> u64 {
        self.max_trials
    }

    /// Probability that a single trial is accepted, given the exact count.
    pub fn acceptance_probability(&self, satisfying_fraction: f64) -> f64 {
        satisfying_fraction / self.picker.total_mass
    }
}

impl BottomSampler for DnfSampler {
    fn generate(&self, rng: &mut dyn RngCore) -> Option<Assignment> {
        for _ in 0..self.max_trials {
            let (i, x) = self.picker.trial(rng);
            if self.picker.is_canonical(i, &x) {
                return Some(x);
            }
        }
        None
    }

    fn bottom_probability(&self) -> f64 {
        self.delta
    }
}

/// Uniform generator for a DNF with ⊥ probability at most `delta`; trials are
/// capped at `⌈s·ln(1/δ)⌉ + 1`.
pub fn dnf_sample(f: &Dnf, delta: f64) -> Result<DnfSampler> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!("delta must lie in (0,1), got {delta}")));
    }
    let picker = TermPicker::new(f).ok_or_else(|| Error::Infeasible("every term is contradictory".into()))?;
    let s = f.terms().len() as f64;
    let max_trials = (s * (1.0 / delta).ln()).ceil() as u64 + 1;
    Ok(DnfSampler { picker, max_trials, delta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{satisfying_count, BoolFunc, Literal};
    use crate::seed::SeedTree;
    use std::collections::BTreeMap;

    fn or2() -> Dnf {
        Dnf::new(2, vec![Conjunction::new(&[Literal::pos(1)]).unwrap(), Conjunction::new(&[Literal::pos(2)]).unwrap()]).unwrap()
    }

    #[test]
    fn budget_formula() {
        assert_eq!(karp_luby_trials(1, 0.5, 0.5).unwrap(), (32.0 * 4f64.ln()).ceil() as u64);
        assert!(karp_luby_trials(1, 0.0, 0.5).is_err());
    }

    #[test]
    fn simple_counts() {
        let mut rng = SeedTree::new(8).rng();
        let x1 = Dnf::new(4, vec![Conjunction::new(&[Literal::pos(1)]).unwrap()]).unwrap();
        let c = dnf_count(&x1, 0.1, 0.1, &mut rng).unwrap();
        assert!((c.value - 0.5).abs() < 1e-12, "single term is counted exactly");
        let c = dnf_count(&or2(), 0.05, 0.05, &mut rng).unwrap();
        assert!(c.value >= 0.75 / 1.05 && c.value <= 0.75 * 1.05, "{}", c.value);
        assert!(!c.exact);
    }

    #[test]
    fn contradictory_terms() {
        let bad = Conjunction::lenient(&[Literal::pos(1), Literal::neg(1)]).unwrap();
        let f = Dnf::new(2, vec![bad]).unwrap();
        assert!(matches!(dnf_sample(&f, 0.1), Err(Error::Infeasible(_))));
        let mut rng = SeedTree::new(1).rng();
        assert_eq!(dnf_count(&f, 0.1, 0.1, &mut rng).unwrap().value, 0.0);
        let mixed = Dnf::new(2, vec![bad, Conjunction::new(&[Literal::pos(2)]).unwrap()]).unwrap();
        let s = dnf_sample(&mixed, 0.01).unwrap();
        for _ in 0..100 {
            assert!(s.generate(&mut rng).unwrap().get(1));
        }
    }

    #[test]
    fn single_term_never_rejects() {
        let t = Conjunction::new(&[Literal::pos(1), Literal::neg(4), Literal::pos(9)]).unwrap();
        let f = Dnf::new(10, vec![t]).unwrap();
        let s = dnf_sample(&f, 0.5).unwrap();
        assert_eq!(s.max_trials(), (0.5f64.recip().ln()).ceil() as u64 + 1);
        let mut rng = SeedTree::new(4).rng();
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..20_000 {
            let x = s.generate(&mut rng).unwrap();
            assert!(t.evaluate(&x));
            seen.insert(x);
        }
        assert_eq!(seen.len(), 128);
    }

    #[test]
    fn or_is_uniform() {
        let f = or2();
        let s = dnf_sample(&f, 1e-9).unwrap();
        assert_eq!(s.acceptance_probability(0.75), 0.75);
        let mut rng = SeedTree::new(6).rng();
        let draws = 1_000_000;
        let mut freq: BTreeMap<String, u32> = BTreeMap::new();
        for _ in 0..draws {
            *freq.entry(s.generate(&mut rng).unwrap().to_string()).or_default() += 1;
        }
        assert_eq!(freq.keys().cloned().collect::<Vec<_>>(), vec!["01", "10", "11"]);
        for c in freq.values() {
            assert!((*c as f64 / draws as f64 - 1.0 / 3.0).abs() <= 0.01);
        }
        assert_eq!(satisfying_count(&BoolFunc::Dnf(f)).unwrap(), 3);
    }

    #[test]
    fn acceptance_rate_matches_analysis() {
        let f = or2();
        let picker = TermPicker::new(&f).unwrap();
        let mut rng = SeedTree::new(12).rng();
        let trials = 400_000;
        let acc = (0..trials).filter(|_| { let (i, x) = picker.trial(&mut rng); picker.is_canonical(i, &x) }).count();
        assert!((acc as f64 / trials as f64 - 0.75).abs() < 0.005);
    }
}
