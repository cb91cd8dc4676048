//! Dense tableau simplex for `max c^T u  s.t.  A u <= b, u >= 0` with `b >= 0`.
//!
//! The origin is feasible under `b >= 0`, so a single phase suffices. Entering
//! columns follow Dantzig's rule and fall back to Bland's rule after a run of
//! degenerate pivots, which rules out cycling.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-11;
const DEGENERATE_STREAK: usize = 32;

#[derive(Clone, Debug)]
pub struct StandardLp {
    /// Constraint rows, each of length `c.len()`.
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub objective: f64,
    pub primal: Vec<f64>,
    /// Shadow prices of the constraint rows, i.e. an optimal solution of
    /// `min b^T y  s.t.  A^T y >= c, y >= 0`.
    pub dual: Vec<f64>,
    pub pivots: usize,
}

pub fn maximize(lp: &StandardLp) -> Result<LpSolution> {
    let rows = lp.a.len();
    let vars = lp.c.len();
    if lp.b.len() != rows || lp.a.iter().any(|r| r.len() != vars) {
        return Err(Error::InvalidParameter("inconsistent LP dimensions".into()));
    }
    if lp.b.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "right-hand side must be non-negative".into(),
        ));
    }

    let width = vars + rows + 1;
    let rhs = width - 1;
    let mut t = vec![0.0; (rows + 1) * width];
    for (i, row) in lp.a.iter().enumerate() {
        let r = &mut t[i * width..(i + 1) * width];
        r[..vars].copy_from_slice(row);
        r[vars + i] = 1.0;
        r[rhs] = lp.b[i];
    }
    {
        let obj = &mut t[rows * width..];
        for (j, &cj) in lp.c.iter().enumerate() {
            obj[j] = -cj;
        }
    }
    let mut basis: Vec<usize> = (vars..vars + rows).collect();

    let max_pivots = 50 * (rows + vars) + 1000;
    let mut pivots = 0;
    let mut degenerate = 0;
    loop {
        let obj = &t[rows * width..];
        let entering = if degenerate < DEGENERATE_STREAK {
            let mut best = None;
            let mut best_val = -COST_TOL;
            for (j, &v) in obj[..rhs].iter().enumerate() {
                if v < best_val {
                    best_val = v;
                    best = Some(j);
                }
            }
            best
        } else {
            obj[..rhs].iter().position(|&v| v < -COST_TOL)
        };
        let Some(col) = entering else { break };

        let mut leave: Option<(usize, f64)> = None;
        for i in 0..rows {
            let a = t[i * width + col];
            if a > PIVOT_TOL {
                let ratio = t[i * width + rhs] / a;
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - 1e-12 || (ratio <= lr + 1e-12 && basis[i] < basis[li]) {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((row, ratio)) = leave else {
            return Err(Error::Solver("objective is unbounded".into()));
        };
        if ratio.abs() <= 1e-12 {
            degenerate += 1;
        } else {
            degenerate = 0;
        }

        pivot(&mut t, width, rows, row, col);
        basis[row] = col;
        pivots += 1;
        if pivots > max_pivots {
            return Err(Error::Solver(format!(
                "no convergence after {pivots} pivots"
            )));
        }
    }

    let mut primal = vec![0.0; vars];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < vars {
            primal[bv] = t[i * width + rhs];
        }
    }
    let obj = &t[rows * width..];
    let dual = obj[vars..vars + rows].to_vec();
    Ok(LpSolution {
        objective: obj[rhs],
        primal,
        dual,
        pivots,
    })
}

fn pivot(t: &mut [f64], width: usize, rows: usize, row: usize, col: usize) {
    let p = t[row * width + col];
    for v in &mut t[row * width..(row + 1) * width] {
        *v /= p;
    }
    let pivot_row: Vec<f64> = t[row * width..(row + 1) * width].to_vec();
    for i in 0..=rows {
        if i == row {
            continue;
        }
        let factor = t[i * width + col];
        if factor == 0.0 {
            continue;
        }
        let r = &mut t[i * width..(i + 1) * width];
        for (v, &pv) in r.iter_mut().zip(&pivot_row) {
            *v -= factor * pv;
        }
        r[col] = 0.0;
    }
}
