//! Discrepancy measures: exact star discrepancy at desk scale and the exact
//! L2 star discrepancy via Warnock's closed form.

use crate::error::{Error, Result};
use crate::point_set::PointSet;

/// Budget guard for the exact star discrepancy grid.
pub const STAR_GRID_BUDGET: f64 = 1e7;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyReport {
    pub n: usize,
    pub d: usize,
    /// Exact star discrepancy, when the enumeration budget allowed it.
    pub star: Option<f64>,
    /// Exact L2 star discrepancy (Warnock).
    pub l2star: f64,
    /// Upper-right corner of a box attaining the star discrepancy.
    pub witness_box: Option<Vec<f64>>,
}

/// Exact L2 star discrepancy via Warnock's closed form:
/// (D2*)^2 = 3^-d - (2^{1-d}/n) sum_i prod_j (1 - x_ij^2)
///         + (1/n^2) sum_{i,k} prod_j (1 - max(x_ij, x_kj)).
pub fn l2_star_discrepancy(points: &PointSet) -> f64 {
    let n = points.len();
    let d = points.dimension();
    assert!(n >= 1 && d >= 1, "need a non-empty point set");
    let nf = n as f64;

    let mut linear = 0.0;
    for p in points.iter_points() {
        let mut prod = 1.0;
        for &x in p {
            prod *= 1.0 - x * x;
        }
        linear += prod;
    }

    let mut quad = 0.0;
    for i in 0..n {
        let pi = points.point(i);
        // diagonal term
        let mut diag = 1.0;
        for &x in pi {
            diag *= 1.0 - x;
        }
        quad += diag;
        for k in (i + 1)..n {
            let pk = points.point(k);
            let mut prod = 1.0;
            for j in 0..d {
                prod *= 1.0 - pi[j].max(pk[j]);
            }
            quad += 2.0 * prod;
        }
    }

    let sq = 3.0f64.powi(-(d as i32)) - 2.0f64.powi(1 - d as i32) / nf * linear
        + quad / (nf * nf);
    sq.max(0.0).sqrt()
}

/// Exact star discrepancy over anchored boxes [0, y). The supremum is
/// attained on the critical grid formed by the point coordinates and 1; at
/// each grid corner both the open count (strict inequalities) and the closed
/// count are evaluated.
pub fn star_discrepancy_exact(points: &PointSet) -> Result<DiscrepancyReport> {
    let n = points.len();
    let d = points.dimension();
    if n == 0 {
        return Err(Error::EmptyPointSet);
    }
    let grid_size = ((n + 1) as f64).powi(d as i32);
    if grid_size > STAR_GRID_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "exact star discrepancy grid",
            required: grid_size,
            cap: STAR_GRID_BUDGET,
        });
    }

    // critical coordinates per axis: the point coordinates plus 1
    let mut axes: Vec<Vec<f64>> = Vec::with_capacity(d);
    for j in 0..d {
        let mut vals: Vec<f64> = points.column(j);
        vals.push(1.0);
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals.dedup();
        axes.push(vals);
    }

    let mut best = 0.0f64;
    let mut witness = vec![axes[0][0]; d];
    let mut index = vec![0usize; d];
    let nf = n as f64;
    loop {
        let y: Vec<f64> = (0..d).map(|j| axes[j][index[j]]).collect();
        let volume: f64 = y.iter().product();
        let mut open = 0usize;
        let mut closed = 0usize;
        for p in points.iter_points() {
            let mut inside_open = true;
            let mut inside_closed = true;
            for j in 0..d {
                if p[j] >= y[j] {
                    inside_open = false;
                }
                if p[j] > y[j] {
                    inside_closed = false;
                    break;
                }
            }
            if inside_open {
                open += 1;
            }
            if inside_closed {
                closed += 1;
            }
        }
        let local = (volume - open as f64 / nf).max(closed as f64 / nf - volume);
        if local > best {
            best = local;
            witness.copy_from_slice(&y);
        }

        // odometer over the grid
        let mut axis = 0;
        loop {
            if axis == d {
                let l2star = l2_star_discrepancy(points);
                return Ok(DiscrepancyReport {
                    n,
                    d,
                    star: Some(best),
                    l2star,
                    witness_box: Some(witness),
                });
            }
            index[axis] += 1;
            if index[axis] < axes[axis].len() {
                break;
            }
            index[axis] = 0;
            axis += 1;
        }
    }
}
