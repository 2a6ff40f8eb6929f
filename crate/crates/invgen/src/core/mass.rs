use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

const NORMALIZATION_SLACK: f64 = 1e-12;

/// A finite probability distribution given by its mass function.
#[derive(Clone, Debug, PartialEq)]
pub struct MassTable<T: Ord> {
    support: BTreeMap<T, f64>,
}

impl<T: Ord + Clone> MassTable<T> {
    /// Wraps an explicit mass function, checking it is a distribution.
    pub fn new(support: BTreeMap<T, f64>) -> Result<Self> {
        let table = MassTable { support };
        table.validate()?;
        Ok(table)
    }

    pub fn uniform<I: IntoIterator<Item = T>>(points: I) -> Result<Self> {
        let set: BTreeSet<T> = points.into_iter().collect();
        if set.is_empty() {
            return Err(Error::invalid("uniform distribution over an empty set"));
        }
        let p = 1.0 / set.len() as f64;
        Ok(MassTable { support: set.into_iter().map(|x| (x, p)).collect() })
    }

    pub fn point(x: T) -> Self {
        MassTable { support: BTreeMap::from([(x, 1.0)]) }
    }

    /// Normalizes nonnegative weights; zero-weight entries are dropped.
    pub fn from_weights<I: IntoIterator<Item = (T, f64)>>(weights: I) -> Result<Self> {
        let mut support = BTreeMap::new();
        for (x, w) in weights {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::invalid(format!("weight {w} is not a finite nonnegative number")));
            }
            if w > 0.0 {
                *support.entry(x).or_insert(0.0) += w;
            }
        }
        let total: f64 = support.values().sum();
        if total <= 0.0 {
            return Err(Error::invalid("weights sum to zero"));
        }
        support.values_mut().for_each(|w| *w /= total);
        Ok(MassTable { support })
    }

    /// Empirical distribution of a multiset of observations.
    pub fn from_counts<I: IntoIterator<Item = (T, u64)>>(counts: I) -> Result<Self> {
        MassTable::from_weights(counts.into_iter().map(|(x, c)| (x, c as f64)))
    }

    pub fn empirical<I: IntoIterator<Item = T>>(draws: I) -> Result<Self> {
        let mut counts: BTreeMap<T, u64> = BTreeMap::new();
        for x in draws {
            *counts.entry(x).or_insert(0) += 1;
        }
        MassTable::from_counts(counts)
    }

    fn validate(&self) -> Result<()> {
        if let Some(p) = self.support.values().find(|p| !(**p >= 0.0 && p.is_finite())) {
            return Err(Error::invalid(format!("negative or non-finite probability {p}")));
        }
        let total: f64 = self.support.values().sum();
        let slack = NORMALIZATION_SLACK * (self.support.len().max(1) as f64);
        if (total - 1.0).abs() > slack {
            return Err(Error::invalid(format!("total mass {total} is not 1")));
        }
        Ok(())
    }

    pub fn prob(&self, x: &T) -> f64 {
        self.support.get(x).copied().unwrap_or(0.0)
    }

    pub fn support(&self) -> &BTreeMap<T, f64> {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn event_mass<F: Fn(&T) -> bool>(&self, event: F) -> f64 {
        self.support.iter().filter(|(x, _)| event(x)).map(|(_, p)| p).sum()
    }
}

/// Total variation distance, computed as half the L1 distance.
pub fn tv_exact<T: Ord + Clone>(p: &MassTable<T>, q: &MassTable<T>) -> Result<f64> {
    p.validate()?;
    q.validate()?;
    let mut l1 = 0.0;
    for (x, px) in &p.support {
        l1 += (px - q.prob(x)).abs();
    }
    for (x, qx) in &q.support {
        if !p.support.contains_key(x) {
            l1 += qx;
        }
    }
    Ok((0.5 * l1).clamp(0.0, 1.0))
}

/// Total variation distance between uniform distributions on two finite sets,
/// via the closed form in the sizes of `A∖B`, `B∖A` and `A∩B`.
pub fn tv_uniform_sets<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("uniform distribution over an empty set"));
    }
    let inter = a.intersection(b).count() as f64;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    Ok(0.5 * (na - inter) / na + 0.5 * (nb - inter) / nb + 0.5 * inter * (1.0 / na - 1.0 / nb).abs())
}
