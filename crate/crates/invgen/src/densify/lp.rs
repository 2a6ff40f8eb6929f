//! A small dense simplex solver for `max c·x  s.t.  A x ≤ b, x ≥ 0` with `b ≥ 0`.
//!
//! The origin is feasible by assumption, so only the optimization phase is
//! needed. The tableau is kept in condensed form (one column per nonbasic
//! variable) and pivots follow Bland's rule, which rules out cycling.

use crate::error::{Error, Result};

const EPS: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

/// Solves the LP; returns an error if it is unbounded or the input is malformed.
pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpSolution> {
    let k = c.len();
    let m = a.len();
    if b.len() != m || a.iter().any(|row| row.len() != k) {
        return Err(Error::invalid("LP dimensions do not agree"));
    }
    if b.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::invalid("LP right-hand sides must be finite and nonnegative"));
    }
    let mut t: Vec<Vec<f64>> = a.to_vec();
    let mut rhs = b.to_vec();
    let mut obj = c.to_vec();
    let mut z = 0.0;
    // Variable labels: 0..k are structural, k..k+m are slacks.
    let mut nonbasic: Vec<usize> = (0..k).collect();
    let mut basic: Vec<usize> = (k..k + m).collect();
    let mut pivots = 0;
    let limit = 50 * (m + k + 10) * (m + k + 10);
    loop {
        let entering = (0..k).filter(|&j| obj[j] > EPS).min_by_key(|&j| nonbasic[j]);
        let Some(s) = entering else { break };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            if t[i][s] > EPS {
                let ratio = rhs[i] / t[i][s];
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((r, best)) => {
                        if ratio < best - EPS || (ratio <= best + EPS && basic[i] < basic[r]) {
                            Some((i, ratio))
                        } else {
                            Some((r, best))
                        }
                    }
                };
            }
        }
        let Some((r, _)) = leave else {
            return Err(Error::invalid("LP is unbounded"));
        };
        pivot(&mut t, &mut rhs, &mut obj, &mut z, r, s);
        std::mem::swap(&mut basic[r], &mut nonbasic[s]);
        pivots += 1;
        if pivots > limit {
            return Err(Error::Capacity("simplex exceeded its pivot limit".into()));
        }
    }
    let mut x = vec![0.0; k];
    for (i, &var) in basic.iter().enumerate() {
        if var < k {
            x[var] = rhs[i].max(0.0);
        }
    }
    Ok(LpSolution { x, objective: z, pivots })
}

fn pivot(t: &mut [Vec<f64>], rhs: &mut [f64], obj: &mut [f64], z: &mut f64, r: usize, s: usize) {
    let k = obj.len();
    let p = t[r][s];
    let prow: Vec<f64> = t[r].clone();
    let prhs = rhs[r];
    for (i, row) in t.iter_mut().enumerate() {
        if i == r {
            continue;
        }
        let f = row[s];
        if f != 0.0 {
            for j in 0..k {
                if j != s {
                    row[j] -= f * prow[j] / p;
                }
            }
            rhs[i] -= f * prhs / p;
            row[s] = -f / p;
        }
    }
    let f = obj[s];
    for j in 0..k {
        if j != s {
            obj[j] -= f * prow[j] / p;
        }
    }
    *z += f * prhs / p;
    obj[s] = -f / p;
    for (j, v) in t[r].iter_mut().enumerate().take(k) {
        if j != s {
            *v /= p;
        }
    }
    rhs[r] /= p;
    t[r][s] = 1.0 / p;
}
