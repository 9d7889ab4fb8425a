//! A small dense simplex solver for packing linear programs.
//!
//! The robustness solver needs to minimize a positively weighted sum over
//! covering constraints with nonnegative coefficient rows. Its dual is a
//! packing program
//!
//! ```text
//!     maximize    c . y
//!     subject to  A y <= r,   y >= 0,      with r > 0,
//! ```
//!
//! which has the all-slack basis as an immediately feasible start, so a
//! single-phase primal simplex suffices. The covering solution is read off
//! the slack reduced costs at optimality (strong duality). Ties in the ratio
//! test are broken lexicographically, which rules out cycling.

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct PackingSolution {
    /// Optimal packing variables `y` (length = number of columns).
    pub y: Vec<f64>,
    /// Common optimal value of the packing and covering programs.
    pub objective: f64,
    /// Duals of the packing rows = optimal covering variables.
    pub duals: Vec<f64>,
}

const PIVOT_CAP: usize = 10_000;
const EPS: f64 = 1e-11;

/// Solve `max c.y` subject to `rows[i] . y <= rhs[i]`, `y >= 0`.
/// Every `rhs[i]` must be positive.
pub fn solve_packing(c: &[f64], rows: &[Vec<f64>], rhs: &[f64]) -> Result<PackingSolution> {
    let m = rows.len();
    let n = c.len();
    if rhs.len() != m || rows.iter().any(|r| r.len() != n) {
        return Err(Error::LinearProgram("inconsistent LP shapes".into()));
    }
    if rhs.iter().any(|&b| b <= 0.0) {
        return Err(Error::LinearProgram(
            "packing right-hand sides must be positive".into(),
        ));
    }

    // Tableau: m rows x (n structural + m slack + 1 rhs) columns, plus a
    // reduced-cost row. Basis starts at the slacks.
    let width = n + m + 1;
    let mut t = vec![vec![0.0f64; width]; m];
    for i in 0..m {
        t[i][..n].copy_from_slice(&rows[i]);
        t[i][n + i] = 1.0;
        t[i][n + m] = rhs[i];
    }
    let mut cost = vec![0.0f64; width];
    cost[..n].copy_from_slice(c);
    let mut basis: Vec<usize> = (n..n + m).collect();

    let mut pivots = 0usize;
    loop {
        // Entering column: most positive reduced cost.
        let mut enter = None;
        let mut best = EPS;
        for j in 0..n + m {
            if cost[j] > best {
                best = cost[j];
                enter = Some(j);
            }
        }
        let Some(enter) = enter else { break };

        // Leaving row: minimum ratio, lexicographic tie-break on the whole
        // row scaled by the pivot entry.
        let mut leave: Option<usize> = None;
        for i in 0..m {
            if t[i][enter] <= EPS {
                continue;
            }
            match leave {
                None => leave = Some(i),
                Some(l) => {
                    let ratio_i = t[i][n + m] / t[i][enter];
                    let ratio_l = t[l][n + m] / t[l][enter];
                    if ratio_i < ratio_l - EPS {
                        leave = Some(i);
                    } else if (ratio_i - ratio_l).abs() <= EPS {
                        // Compare scaled rows left to right.
                        for j in 0..n + m {
                            let a = t[i][j] / t[i][enter];
                            let b = t[l][j] / t[l][enter];
                            if (a - b).abs() > EPS {
                                if a < b {
                                    leave = Some(i);
                                }
                                break;
                            }
                        }
                    }
                }
            }
        }
        let Some(leave) = leave else {
            return Err(Error::LinearProgram("packing program is unbounded".into()));
        };

        // Pivot.
        let piv = t[leave][enter];
        for j in 0..width {
            t[leave][j] /= piv;
        }
        for i in 0..m {
            if i != leave && t[i][enter].abs() > 0.0 {
                let f = t[i][enter];
                for j in 0..width {
                    t[i][j] -= f * t[leave][j];
                }
            }
        }
        let f = cost[enter];
        if f.abs() > 0.0 {
            for j in 0..width {
                cost[j] -= f * t[leave][j];
            }
        }
        basis[leave] = enter;

        pivots += 1;
        if pivots > PIVOT_CAP {
            return Err(Error::LinearProgram(format!(
                "no optimum after {PIVOT_CAP} pivots"
            )));
        }
    }

    let mut y = vec![0.0f64; n];
    for (i, &b) in basis.iter().enumerate() {
        if b < n {
            y[b] = t[i][n + m];
        }
    }
    // cost[n + m] accumulated -(objective); slack reduced costs are the
    // negated duals.
    let objective = -cost[n + m];
    let duals: Vec<f64> = (0..m).map(|i| (-cost[n + i]).max(0.0)).collect();
    Ok(PackingSolution { y, objective, duals })
}

/// Solve the covering program `min sum(x)` subject to `rows[k] . x >= rhs[k]`
/// and `x >= 0`, where every coefficient is nonnegative. Returns the primal
/// minimizer together with the multipliers of the covering rows.
pub struct CoveringSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Multiplier per covering row (zero for slack rows).
    pub multipliers: Vec<f64>,
}

pub fn solve_covering(dim: usize, rows: &[Vec<f64>], rhs: &[f64]) -> Result<CoveringSolution> {
    // Rows with nonpositive rhs are implied by x >= 0 and would break the
    // positive-rhs precondition of the packing form; drop them but keep
    // their multiplier slots.
    let mut kept: Vec<usize> = Vec::new();
    for (k, &b) in rhs.iter().enumerate() {
        if b > 0.0 {
            kept.push(k);
        }
    }
    if kept.is_empty() {
        return Ok(CoveringSolution {
            x: vec![0.0; dim],
            objective: 0.0,
            multipliers: vec![0.0; rhs.len()],
        });
    }
    // Packing form: variables y_k per kept row, constraints per coordinate.
    let c: Vec<f64> = kept.iter().map(|&k| rhs[k]).collect();
    let mut a = vec![vec![0.0f64; kept.len()]; dim];
    for (col, &k) in kept.iter().enumerate() {
        if rows[k].len() != dim {
            return Err(Error::LinearProgram("inconsistent LP shapes".into()));
        }
        for i in 0..dim {
            a[i][col] = rows[k][i];
        }
    }
    let ones = vec![1.0f64; dim];
    let sol = solve_packing(&c, &a, &ones)?;
    let mut multipliers = vec![0.0f64; rhs.len()];
    for (col, &k) in kept.iter().enumerate() {
        multipliers[k] = sol.y[col];
    }
    Ok(CoveringSolution {
        x: sol.duals,
        objective: sol.objective,
        multipliers,
    })
}
