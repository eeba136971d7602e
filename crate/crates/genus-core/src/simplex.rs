//! Dense-tableau simplex for small linear programs.
//!
//! Solves `max c.x` subject to `Ax <= b`, `x >= 0` with `b >= 0`, so the
//! all-slack basis is feasible and no phase-one is needed.  Pivoting follows
//! Bland's rule throughout — entering variable is the lowest index with a
//! negative reduced cost, and ratio-test ties break toward the lowest basis
//! index — which rules out cycling.  Dual values are read off the slack
//! columns of the objective row at optimality.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum SimplexError {
    Unbounded,
    NegativeRhs { row: usize },
    IterationLimit,
}

impl fmt::Display for SimplexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimplexError::Unbounded => write!(f, "objective is unbounded above"),
            SimplexError::NegativeRhs { row } => {
                write!(f, "right-hand side of row {row} is negative")
            }
            SimplexError::IterationLimit => write!(f, "pivot limit exceeded"),
        }
    }
}

impl core::error::Error for SimplexError {}

#[derive(Clone, Debug, PartialEq)]
pub struct SimplexResult {
    pub objective: f64,
    pub x: Vec<f64>,
    /// One multiplier per constraint row.
    pub dual: Vec<f64>,
    pub iterations: usize,
}

const TOL: f64 = 1e-9;

/// Maximise `c.x` over `Ax <= b`, `x >= 0`.  Rows of `a` must match `c` in
/// length and `b` in count.
pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<SimplexResult, SimplexError> {
    let n = c.len();
    let m = a.len();
    assert_eq!(m, b.len(), "one rhs entry per constraint row");
    for row in a {
        assert_eq!(row.len(), n, "constraint row width must match the objective");
    }
    for (i, &bi) in b.iter().enumerate() {
        if bi < -TOL {
            return Err(SimplexError::NegativeRhs { row: i });
        }
    }

    let width = n + m + 1;
    let mut t: Vec<Vec<f64>> = Vec::with_capacity(m);
    for (i, row) in a.iter().enumerate() {
        let mut r = vec![0.0; width];
        r[..n].copy_from_slice(row);
        r[n + i] = 1.0;
        r[width - 1] = b[i].max(0.0);
        t.push(r);
    }
    let mut obj = vec![0.0; width];
    for (j, &cj) in c.iter().enumerate() {
        obj[j] = -cj;
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Steepest-coefficient pivots converge fast but can cycle on degenerate
    // problems; smallest-index pivots never cycle but creep.  Run the former
    // until the iteration budget is half spent, then switch to the latter
    // for a guaranteed finish.
    let limit = 100 * (n + m) + 1000;
    let mut iterations = 0usize;
    loop {
        let entering = if iterations < limit / 2 {
            let mut best: Option<(usize, f64)> = None;
            for j in 0..n + m {
                if obj[j] < -TOL && best.map_or(true, |(_, v)| obj[j] < v) {
                    best = Some((j, obj[j]));
                }
            }
            best.map(|(j, _)| j)
        } else {
            (0..n + m).find(|&j| obj[j] < -TOL)
        };
        let Some(entering) = entering else {
            break;
        };
        let mut leaving: Option<(usize, f64)> = None;
        for (i, row) in t.iter().enumerate() {
            let coeff = row[entering];
            if coeff > TOL {
                let ratio = row[width - 1] / coeff;
                let better = match leaving {
                    None => true,
                    Some((best_i, best_ratio)) => {
                        ratio < best_ratio - TOL
                            || (ratio < best_ratio + TOL && basis[i] < basis[best_i])
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leaving else {
            return Err(SimplexError::Unbounded);
        };
        pivot(&mut t, &mut obj, r, entering, width);
        basis[r] = entering;
        iterations += 1;
        if iterations > limit {
            return Err(SimplexError::IterationLimit);
        }
    }

    let mut x = vec![0.0; n];
    for (i, &var) in basis.iter().enumerate() {
        if var < n {
            x[var] = t[i][width - 1];
        }
    }
    let dual: Vec<f64> = (0..m).map(|i| obj[n + i].max(0.0)).collect();
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Ok(SimplexResult { objective, x, dual, iterations })
}

fn pivot(t: &mut [Vec<f64>], obj: &mut [f64], r: usize, e: usize, width: usize) {
    let scale = t[r][e];
    for v in t[r].iter_mut() {
        *v /= scale;
    }
    for i in 0..t.len() {
        if i != r {
            let factor = t[i][e];
            if factor != 0.0 {
                for j in 0..width {
                    t[i][j] -= factor * t[r][j];
                    if t[i][j].abs() < 1e-13 {
                        t[i][j] = 0.0;
                    }
                }
            }
        }
    }
    let factor = obj[e];
    if factor != 0.0 {
        for j in 0..width {
            obj[j] -= factor * t[r][j];
            if obj[j].abs() < 1e-13 {
                obj[j] = 0.0;
            }
        }
    }
}
