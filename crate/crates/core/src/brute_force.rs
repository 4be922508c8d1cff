//! Exhaustive grid search over a small box, used as an independent reference.

use crate::error::{Result, SolverError};
use crate::model::{ProblemSpec, Vector};

/// Largest supported dimension.
pub const MAX_DIM: usize = 3;

/// Largest number of grid points visited.
pub const MAX_POINTS: u64 = 200_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct GridOptimum {
    pub x_best: Vector,
    pub f_best: f64,
    pub points: u64,
}

/// Scans the box `dom(h)` on a uniform grid with spacing `grid_step` and returns the
/// best point that satisfies the constraints.
///
/// Functional constraints must hold exactly at a grid point. The affine residual
/// may be as large as `2 * grid_step * ||A||`, since a grid rarely meets a
/// hyperplane exactly.
pub fn brute_force_oracle(problem: &ProblemSpec, grid_step: f64) -> Result<GridOptimum> {
    let n = problem.dim();
    if n == 0 || n > MAX_DIM {
        return Err(SolverError::InvalidParameter(format!(
            "grid search supports 1 to {MAX_DIM} variables, got {n}"
        )));
    }
    if !(grid_step > 0.0) {
        return Err(SolverError::InvalidParameter(format!("grid step must be positive, got {grid_step}")));
    }
    let (lower, upper) = problem
        .nonsmooth()
        .box_bounds()
        .ok_or_else(|| SolverError::InvalidParameter("grid search needs a box domain".into()))?;
    let counts: Vec<u64> = (0..n)
        .map(|i| ((upper[i] - lower[i]) / grid_step + 1e-9).floor() as u64 + 1)
        .collect();
    let total: u64 = counts.iter().product();
    if total > MAX_POINTS {
        return Err(SolverError::InvalidParameter(format!(
            "grid of {total} points exceeds the limit of {MAX_POINTS}"
        )));
    }
    let affine_slack = 2.0 * grid_step * problem.meta().gram_norm.unwrap_or(0.0).sqrt();
    let mut best: Option<(f64, Vector)> = None;
    let mut index = vec![0u64; n];
    let mut x = lower.clone();
    for _ in 0..total {
        for i in 0..n {
            x[i] = lower[i] + index[i] as f64 * grid_step;
        }
        let feasible = problem.constraints().values(&x).iter().all(|&f| f <= 0.0)
            && problem.affine_residual(&x).norm() <= affine_slack;
        if feasible {
            let f = problem.smooth().value(&x);
            if best.as_ref().is_none_or(|(fb, _)| f < *fb) {
                best = Some((f, x.clone()));
            }
        }
        for i in 0..n {
            index[i] += 1;
            if index[i] < counts[i] {
                break;
            }
            index[i] = 0;
        }
    }
    let (f_best, x_best) = best.ok_or(SolverError::InfeasibleAtResolution { grid_step })?;
    Ok(GridOptimum {
        x_best,
        f_best,
        points: total,
    })
}
