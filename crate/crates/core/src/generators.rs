//! Seeded random instances and small hand-solvable problems.
//!
//! Randomness comes from `ChaCha8Rng::seed_from_u64`, so an instance is a pure
//! function of its size parameters and seed on every platform.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{StandardNormal, Uniform};

use crate::error::{Result, SolverError};
use crate::model::{ProblemSpec, Vector};
use crate::oracles::{BoxIndicator, DenseAffine, QuadraticConstraints, QuadraticObjective};

/// Largest non-minimal eigenvalue of the generated indefinite objectives.
pub const MAX_EIGENVALUE: f64 = 10.0;

fn normal_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

fn normal_vector(rng: &mut ChaCha8Rng, n: usize) -> Vector {
    Vector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

/// `U diag(d) U^T` with `U` orthogonal, `d_1 = -rho` and the rest uniform on `[-rho, 10]`.
fn indefinite_hessian(rng: &mut ChaCha8Rng, n: usize, rho: f64) -> Result<DMatrix<f64>> {
    let u = normal_matrix(rng, n, n).qr().q();
    let spread = Uniform::new_inclusive(-rho, MAX_EIGENVALUE)
        .map_err(|e| SolverError::InvalidParameter(format!("eigenvalue range: {e}")))?;
    let mut d = Vector::from_fn(n, |_, _| rng.sample(spread));
    if n > 0 {
        d[0] = -rho;
    }
    let q = &u * DMatrix::from_diagonal(&d) * u.transpose();
    Ok((&q + q.transpose()) * 0.5)
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(SolverError::InvalidParameter(format!("rho must be positive, got {rho}")));
    }
    Ok(())
}

/// `minimize 0.5 x^T Q x + c^T x  s.t.  A x = b,  l <= x <= u`.
#[derive(Debug, Clone, PartialEq)]
pub struct LcqpInstance {
    pub q: DMatrix<f64>,
    pub c: Vector,
    pub a: DMatrix<f64>,
    pub b: Vector,
    pub lower: Vector,
    pub upper: Vector,
    pub rho: f64,
}

impl LcqpInstance {
    pub fn dim(&self) -> usize {
        self.c.len()
    }

    /// Box centre; `A x_mid = b` by construction.
    pub fn x_mid(&self) -> Vector {
        (&self.lower + &self.upper) * 0.5
    }

    pub fn start(&self) -> Vector {
        self.x_mid()
    }

    pub fn problem(&self) -> Result<ProblemSpec> {
        let smooth = QuadraticObjective::new(self.q.clone(), self.c.clone());
        let h = BoxIndicator::new(self.lower.clone(), self.upper.clone())?;
        let problem = ProblemSpec::new(Arc::new(smooth), Arc::new(h), self.rho)?;
        if self.a.nrows() == 0 {
            return Ok(problem);
        }
        problem.with_affine(Arc::new(DenseAffine::new(self.a.clone(), self.b.clone())?))
    }

    /// The problem with the extra constraint `||x - x_mid||^2 <= radius^2`.
    pub fn problem_with_ball(&self, radius: f64) -> Result<ProblemSpec> {
        let n = self.dim();
        let mid = self.x_mid();
        let half = (&self.upper - &self.lower) * 0.5;
        let reach = half.norm();
        // |f| and ||∇f|| over the box.
        let bound = (reach * reach - radius * radius).abs().max(radius * radius).max(2.0 * reach);
        let ball = QuadraticConstraints::new(
            vec![DMatrix::identity(n, n) * 2.0],
            vec![&mid * -2.0],
            vec![mid.norm_squared() - radius * radius],
        )?
        .with_bounds(vec![bound])?;
        self.problem()?.with_constraints(Arc::new(ball))
    }
}

/// Nonconvex linearly constrained QP on the box `[0, 5]^n` with `λ_min(Q) = -rho`.
pub fn gen_lcqp(n: usize, m: usize, rho: f64, seed: u64) -> Result<(LcqpInstance, ProblemSpec)> {
    check_rho(rho)?;
    if m >= n {
        return Err(SolverError::InvalidParameter(format!(
            "need fewer equality rows than variables, got m = {m}, n = {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = indefinite_hessian(&mut rng, n, rho)?;
    let c = normal_vector(&mut rng, n);
    let a = normal_matrix(&mut rng, m, n);
    let lower = Vector::zeros(n);
    let upper = Vector::from_element(n, 5.0);
    let b = &a * ((&lower + &upper) * 0.5);
    let instance = LcqpInstance {
        q,
        c,
        a,
        b,
        lower,
        upper,
        rho,
    };
    let problem = instance.problem()?;
    Ok((instance, problem))
}

/// `minimize 0.5 x^T Q_0 x + c_0^T x  s.t.  0.5 x^T Q_j x + c_j^T x + d_j <= 0,  l <= x <= u`.
#[derive(Debug, Clone, PartialEq)]
pub struct QcqpInstance {
    pub q0: DMatrix<f64>,
    pub c0: Vector,
    pub qs: Vec<DMatrix<f64>>,
    pub cs: Vec<Vector>,
    pub ds: Vec<f64>,
    pub lower: Vector,
    pub upper: Vector,
    pub rho: f64,
}

impl QcqpInstance {
    pub fn dim(&self) -> usize {
        self.c0.len()
    }

    /// The origin, where every constraint equals `-1`.
    pub fn start(&self) -> Vector {
        Vector::zeros(self.dim())
    }

    pub fn problem(&self) -> Result<ProblemSpec> {
        let smooth = QuadraticObjective::new(self.q0.clone(), self.c0.clone());
        let h = BoxIndicator::new(self.lower.clone(), self.upper.clone())?;
        let cons = QuadraticConstraints::new(self.qs.clone(), self.cs.clone(), self.ds.clone())?;
        ProblemSpec::new(Arc::new(smooth), Arc::new(h), self.rho)?.with_constraints(Arc::new(cons))
    }
}

/// Nonconvex QCQP on `[-5, 5]^n` with `m` convex quadratic constraints strictly
/// feasible at the origin.
pub fn gen_qcqp(n: usize, m: usize, rho: f64, seed: u64) -> Result<(QcqpInstance, ProblemSpec)> {
    check_rho(rho)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q0 = indefinite_hessian(&mut rng, n, rho)?;
    let c0 = normal_vector(&mut rng, n);
    let mut qs = Vec::with_capacity(m);
    let mut cs = Vec::with_capacity(m);
    for _ in 0..m {
        let b = normal_matrix(&mut rng, n, n);
        let qj = &b * b.transpose() / n as f64;
        qs.push((&qj + qj.transpose()) * 0.5);
        cs.push(normal_vector(&mut rng, n));
    }
    let instance = QcqpInstance {
        q0,
        c0,
        qs,
        cs,
        ds: vec![-1.0; m],
        lower: Vector::from_element(n, -5.0),
        upper: Vector::from_element(n, 5.0),
        rho,
    };
    let problem = instance.problem()?;
    Ok((instance, problem))
}

/// `g(x) = 0.5 (x - 2)^2` on `[0, 5]` with `x - 1 <= 0`; solution `x* = 1`, `z* = 1`.
pub fn tp1(rho: f64) -> Result<ProblemSpec> {
    let smooth = QuadraticObjective::new(DMatrix::from_element(1, 1, 1.0), Vector::from_element(1, -2.0))
        .with_constant(2.0);
    // |x - 1| <= 4 and |f'| = 1 on [0, 5].
    let cons = QuadraticConstraints::new(vec![DMatrix::zeros(1, 1)], vec![Vector::from_element(1, 1.0)], vec![-1.0])?
        .with_bounds(vec![4.0])?;
    ProblemSpec::new(Arc::new(smooth), Arc::new(BoxIndicator::uniform(1, 0.0, 5.0)), rho)?
        .with_constraints(Arc::new(cons))
}

/// `g(x) = 0.5 ||x||^2` on `[-5, 5]^2` with `x_1 + x_2 = 1`; solution `x* = (0.5, 0.5)`,
/// `y* = -0.5`.
pub fn tp2(rho: f64) -> Result<ProblemSpec> {
    let smooth = QuadraticObjective::new(DMatrix::identity(2, 2), Vector::zeros(2));
    let affine = DenseAffine::new(DMatrix::from_row_slice(1, 2, &[1.0, 1.0]), Vector::from_element(1, 1.0))?;
    ProblemSpec::new(Arc::new(smooth), Arc::new(BoxIndicator::uniform(2, -5.0, 5.0)), rho)?
        .with_affine(Arc::new(affine))
}
