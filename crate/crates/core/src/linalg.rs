//! Small dense helpers shared across modules.

use nalgebra::DMatrix;

use crate::model::{AffineBlock, Vector};

/// `||A^T A||_2` by power iteration on the matrix-free block.
///
/// Starts from the all-ones vector so the result is deterministic. Stops after
/// `max_iters` or once successive estimates agree to `rel_tol`.
pub fn gram_norm(affine: &dyn AffineBlock, max_iters: usize, rel_tol: f64) -> f64 {
    let n = affine.dim();
    if n == 0 || affine.rows() == 0 {
        return 0.0;
    }
    let mut v = Vector::from_element(n, 1.0 / (n as f64).sqrt());
    let mut estimate = 0.0;
    for _ in 0..max_iters {
        let w = affine.apply_transpose(&affine.apply(&v));
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let converged = (norm - estimate).abs() <= rel_tol * norm;
        estimate = norm;
        v = w / norm;
        if converged {
            break;
        }
    }
    estimate
}

/// Central finite-difference gradient of `f` at `x` with step `h`.
pub fn central_difference(f: impl Fn(&Vector) -> f64, x: &Vector, h: f64) -> Vector {
    let mut grad = Vector::zeros(x.len());
    let mut probe = x.clone();
    for i in 0..x.len() {
        let xi = x[i];
        probe[i] = xi + h;
        let up = f(&probe);
        probe[i] = xi - h;
        let down = f(&probe);
        probe[i] = xi;
        grad[i] = (up - down) / (2.0 * h);
    }
    grad
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigenvalues().min()
}

/// Spectral norm of a symmetric matrix.
pub fn symmetric_norm(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigenvalues().amax()
}

/// `ceil(v)` that ignores floating-point noise just above an integer.
pub(crate) fn robust_ceil(v: f64) -> f64 {
    let r = v.round();
    if (v - r).abs() <= 1e-9 * v.abs().max(1.0) {
        r
    } else {
        v.ceil()
    }
}
