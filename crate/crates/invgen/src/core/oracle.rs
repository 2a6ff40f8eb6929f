use rand::RngCore;

use super::assignment::Assignment;
use super::func::BoolFunc;
use crate::error::{Error, Result};

/// Largest dimension the brute-force oracles will enumerate.
pub const ENUMERATION_CAP: usize = 24;

fn check_cap(n: usize) -> Result<()> {
    if n > ENUMERATION_CAP {
        return Err(Error::Capacity(format!("cannot enumerate 2^{n} points (cap is 2^{ENUMERATION_CAP})")));
    }
    Ok(())
}

/// Calls `visit` on every point of `{0,1}ⁿ` in increasing bit order.
pub fn for_each_point<F: FnMut(Assignment)>(n: usize, mut visit: F) -> Result<()> {
    check_cap(n)?;
    for bits in 0..(1u64 << n) {
        visit(Assignment::from_raw(n, bits));
    }
    Ok(())
}

/// All satisfying points of `f`, sorted, by full enumeration.
pub fn brute_force_satisfying_set(f: &BoolFunc, n: usize) -> Result<Vec<Assignment>> {
    if f.dim() != n {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: n });
    }
    let mut out = Vec::new();
    for_each_point(n, |x| {
        if f.eval_unchecked(&x) {
            out.push(x);
        }
    })?;
    Ok(out)
}

pub fn satisfying_count(f: &BoolFunc) -> Result<u64> {
    let mut count = 0u64;
    for_each_point(f.dim(), |x| count += f.eval_unchecked(&x) as u64)?;
    Ok(count)
}

/// Sample size for an additive `±tau` estimate of a `[-1,1]` mean at confidence `1 - delta`.
pub fn chernoff_samples(tau: f64, delta: f64) -> Result<u64> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::invalid(format!("tau must lie in (0,1], got {tau}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!("delta must lie in (0,1), got {delta}")));
    }
    let m = (2.0 / (tau * tau) * (2.0 / delta).ln()).ceil();
    if m > u64::MAX as f64 {
        return Err(Error::Capacity(format!("sample size {m:e} overflows")));
    }
    Ok(m as u64)
}

/// Empirical mean of `m` draws from a `[-1,1]`-valued source.
pub fn mean_of(draw: &mut dyn FnMut(&mut dyn RngCore) -> Result<f64>, m: u64, rng: &mut dyn RngCore) -> Result<f64> {
    if m == 0 {
        return Err(Error::invalid("mean of zero samples"));
    }
    let mut sum = 0.0;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..m {
        let v = draw(rng)?;
        if !(-1.0..=1.0).contains(&v) {
            return Err(Error::invalid(format!("source value {v} outside [-1,1]")));
        }
        sum += v;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo == hi {
        return Ok(lo);
    }
    Ok((sum / m as f64).clamp(lo, hi))
}

/// Estimates the mean of a `[-1,1]`-valued source to within `±tau` with
/// probability at least `1 - delta`, using `⌈(2/τ²)·ln(2/δ)⌉` draws.
pub fn estimate_mean(
    draw: &mut dyn FnMut(&mut dyn RngCore) -> Result<f64>,
    tau: f64,
    delta: f64,
    rng: &mut dyn RngCore,
) -> Result<f64> {
    let m = chernoff_samples(tau, delta)?;
    mean_of(draw, m, rng)
}
