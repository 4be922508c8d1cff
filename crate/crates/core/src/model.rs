//! Problem abstraction: oracles, dual pairs, residuals and the ε-KKT verifier.
//!
//! A problem has the form
//!
//! ```text
//! minimize   g(x) + h(x)
//! subject to A x = b,  f_i(x) <= 0,  i = 1..m
//! ```
//!
//! where `g` is smooth and ρ-weakly convex, `h` is closed convex with a bounded
//! domain and a cheap prox, and every `f_i` is convex and smooth.

use std::ops::AddAssign;
use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{check_dim, Result, SolverError};
use crate::linalg;

pub type Vector = DVector<f64>;

/// Smooth part `g` of the objective.
///
/// Implementations must be pure: the same input always yields the same output.
pub trait SmoothOracle: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &Vector) -> f64;

    fn gradient(&self, x: &Vector) -> Vector;

    /// Value and gradient at the same point. Override when the two share work.
    fn value_and_gradient(&self, x: &Vector) -> (f64, Vector) {
        (self.value(x), self.gradient(x))
    }

    /// Lipschitz constant of the gradient over `dom(h)`, when known.
    fn lipschitz_hint(&self) -> Option<f64> {
        None
    }
}

/// Nonsmooth convex part `h` of the objective, accessed through its prox.
pub trait ProxOracle: Send + Sync {
    fn dim(&self) -> usize;

    /// `argmin_x step * h(x) + 0.5 * ||x - v||^2`.
    fn prox(&self, v: &Vector, step: f64) -> Vector;

    /// Euclidean projection onto `dom(h)`.
    fn project(&self, x: &Vector) -> Vector;

    /// `h(x)`, or `+inf` outside the domain.
    fn value(&self, x: &Vector) -> f64;

    /// Diameter of `dom(h)`, when known.
    fn diameter_hint(&self) -> Option<f64> {
        None
    }

    /// Lower and upper corners when `dom(h)` is a box.
    fn box_bounds(&self) -> Option<(&Vector, &Vector)> {
        None
    }
}

/// Convex functional constraints `f(x) <= 0`.
pub trait ConstraintOracle: Send + Sync {
    fn dim(&self) -> usize;

    /// Number of constraints `m`.
    fn count(&self) -> usize;

    fn values(&self, x: &Vector) -> Vector;

    /// `sum_i z_i * grad f_i(x)`.
    fn jacobian_transpose_apply(&self, x: &Vector, z: &Vector) -> Vector;

    fn per_constraint_gradient(&self, x: &Vector, i: usize) -> Vector;

    /// `f(x)` together with `sum_i w_i ∇f_i(x)`, where `w = weights(f(x))`.
    /// Override when values and gradients share work.
    fn values_and_weighted_gradient(
        &self,
        x: &Vector,
        weights: &mut dyn FnMut(&Vector) -> Vector,
    ) -> (Vector, Vector) {
        let fvals = self.values(x);
        let w = weights(&fvals);
        let jt = self.jacobian_transpose_apply(x, &w);
        (fvals, jt)
    }

    /// Gradient Lipschitz constants `L_i`, when known.
    fn lipschitz_hints(&self) -> Option<Vec<f64>> {
        None
    }

    /// Uniform bounds `B_i` on `|f_i|` and `||grad f_i||` over `dom(h)`, when known.
    fn bound_hints(&self) -> Option<Vec<f64>> {
        None
    }
}

/// Affine equality block `A x = b`, accessed matrix-free.
pub trait AffineBlock: Send + Sync {
    fn dim(&self) -> usize;

    fn rows(&self) -> usize;

    fn apply(&self, x: &Vector) -> Vector;

    fn apply_transpose(&self, v: &Vector) -> Vector;

    fn rhs(&self) -> &Vector;
}

/// The empty constraint set `m = 0`.
#[derive(Debug, Clone, Copy)]
pub struct NoConstraints {
    n: usize,
}

impl NoConstraints {
    pub fn new(n: usize) -> Self {
        Self { n }
    }
}

impl ConstraintOracle for NoConstraints {
    fn dim(&self) -> usize {
        self.n
    }

    fn count(&self) -> usize {
        0
    }

    fn values(&self, _x: &Vector) -> Vector {
        Vector::zeros(0)
    }

    fn jacobian_transpose_apply(&self, _x: &Vector, _z: &Vector) -> Vector {
        Vector::zeros(self.n)
    }

    fn per_constraint_gradient(&self, _x: &Vector, i: usize) -> Vector {
        panic!("constraint index {i} out of range for an empty constraint set")
    }

    fn lipschitz_hints(&self) -> Option<Vec<f64>> {
        Some(Vec::new())
    }

    fn bound_hints(&self) -> Option<Vec<f64>> {
        Some(Vec::new())
    }
}

/// `g(x) + rho * ||x - center||^2`, the smooth part of a proximal-point subproblem.
pub struct ShiftedSmooth {
    base: Arc<dyn SmoothOracle>,
    center: Vector,
    rho: f64,
}

impl ShiftedSmooth {
    pub fn center(&self) -> &Vector {
        &self.center
    }
}

impl SmoothOracle for ShiftedSmooth {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn value(&self, x: &Vector) -> f64 {
        self.base.value(x) + self.rho * (x - &self.center).norm_squared()
    }

    fn gradient(&self, x: &Vector) -> Vector {
        let mut grad = self.base.gradient(x);
        grad.axpy(2.0 * self.rho, &(x - &self.center), 1.0);
        grad
    }

    fn value_and_gradient(&self, x: &Vector) -> (f64, Vector) {
        let (value, mut grad) = self.base.value_and_gradient(x);
        let shift = x - &self.center;
        grad.axpy(2.0 * self.rho, &shift, 1.0);
        (value + self.rho * shift.norm_squared(), grad)
    }

    fn lipschitz_hint(&self) -> Option<f64> {
        self.base.lipschitz_hint().map(|l| l + 2.0 * self.rho)
    }
}

/// Constants feeding the smoothness estimate of the augmented Lagrangian.
///
/// Always describes the *unshifted* objective `g`; subproblems inherit it unchanged.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SmoothnessMeta {
    /// `L_0`, gradient Lipschitz constant of `g`.
    pub l0: Option<f64>,
    /// `||A^T A||`; `Some(0.0)` when there is no affine block.
    pub gram_norm: Option<f64>,
    /// `L_i` for each constraint.
    pub constraint_lipschitz: Option<Vec<f64>>,
    /// `B_i` for each constraint.
    pub constraint_bounds: Option<Vec<f64>>,
}

/// The full problem: oracles plus the weak-convexity constant ρ.
#[derive(Clone)]
pub struct ProblemSpec {
    smooth: Arc<dyn SmoothOracle>,
    nonsmooth: Arc<dyn ProxOracle>,
    constraints: Arc<dyn ConstraintOracle>,
    affine: Option<Arc<dyn AffineBlock>>,
    rho: f64,
    strong_convexity: f64,
    center: Option<Vector>,
    meta: SmoothnessMeta,
}

impl std::fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("n", &self.dim())
            .field("m", &self.constraint_count())
            .field("l", &self.affine_rows())
            .field("rho", &self.rho)
            .field("strong_convexity", &self.strong_convexity)
            .finish()
    }
}

impl ProblemSpec {
    /// A problem with no functional constraints and no affine block yet.
    pub fn new(
        smooth: Arc<dyn SmoothOracle>,
        nonsmooth: Arc<dyn ProxOracle>,
        rho: f64,
    ) -> Result<Self> {
        check_dim("nonsmooth oracle", smooth.dim(), nonsmooth.dim())?;
        if !(rho >= 0.0) || !rho.is_finite() {
            return Err(SolverError::InvalidParameter(format!(
                "weak-convexity constant must be finite and nonnegative, got {rho}"
            )));
        }
        let n = smooth.dim();
        let meta = SmoothnessMeta {
            l0: smooth.lipschitz_hint(),
            gram_norm: Some(0.0),
            constraint_lipschitz: Some(Vec::new()),
            constraint_bounds: Some(Vec::new()),
        };
        Ok(Self {
            smooth,
            nonsmooth,
            constraints: Arc::new(NoConstraints::new(n)),
            affine: None,
            rho,
            strong_convexity: 0.0,
            center: None,
            meta,
        })
    }

    pub fn with_constraints(mut self, constraints: Arc<dyn ConstraintOracle>) -> Result<Self> {
        check_dim("constraint oracle", self.dim(), constraints.dim())?;
        let m = constraints.count();
        let lip = constraints.lipschitz_hints();
        let bounds = constraints.bound_hints();
        if let Some(l) = &lip {
            check_dim("constraint lipschitz hints", m, l.len())?;
        }
        if let Some(b) = &bounds {
            check_dim("constraint bound hints", m, b.len())?;
        }
        self.meta.constraint_lipschitz = lip;
        self.meta.constraint_bounds = bounds;
        self.constraints = constraints;
        Ok(self)
    }

    /// Attaches `A x = b`. `||A^T A||` is computed here once by power iteration.
    pub fn with_affine(mut self, affine: Arc<dyn AffineBlock>) -> Result<Self> {
        check_dim("affine block", self.dim(), affine.dim())?;
        check_dim("affine rhs", affine.rows(), affine.rhs().len())?;
        self.meta.gram_norm = Some(linalg::gram_norm(affine.as_ref(), 50, 1e-6));
        self.affine = Some(affine);
        Ok(self)
    }

    /// The same problem with a different weak-convexity constant.
    pub fn with_rho(mut self, rho: f64) -> Result<Self> {
        if !(rho >= 0.0) || !rho.is_finite() {
            return Err(SolverError::InvalidParameter(format!(
                "weak-convexity constant must be finite and nonnegative, got {rho}"
            )));
        }
        self.rho = rho;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.smooth.dim()
    }

    pub fn constraint_count(&self) -> usize {
        self.constraints.count()
    }

    /// Number of affine rows `l` (0 without an affine block).
    pub fn affine_rows(&self) -> usize {
        self.affine.as_ref().map_or(0, |a| a.rows())
    }

    pub fn smooth(&self) -> &dyn SmoothOracle {
        self.smooth.as_ref()
    }

    pub fn nonsmooth(&self) -> &dyn ProxOracle {
        self.nonsmooth.as_ref()
    }

    pub fn constraints(&self) -> &dyn ConstraintOracle {
        self.constraints.as_ref()
    }

    pub fn affine(&self) -> Option<&dyn AffineBlock> {
        self.affine.as_deref()
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Strong-convexity modulus of the smooth part; ρ for subproblems, 0 otherwise.
    pub fn strong_convexity(&self) -> f64 {
        self.strong_convexity
    }

    /// Proximal center when this is a subproblem.
    pub fn center(&self) -> Option<&Vector> {
        self.center.as_ref()
    }

    pub fn meta(&self) -> &SmoothnessMeta {
        &self.meta
    }

    /// A zero dual pair of the right shape.
    pub fn zero_dual(&self) -> DualPair {
        DualPair::zeros(self.affine_rows(), self.constraint_count())
    }

    /// `A x - b`, empty without an affine block.
    pub fn affine_residual(&self, x: &Vector) -> Vector {
        match &self.affine {
            Some(a) => a.apply(x) - a.rhs(),
            None => Vector::zeros(0),
        }
    }

    /// `g(x) + h(x)`.
    pub fn objective(&self, x: &Vector) -> f64 {
        self.smooth.value(x) + self.nonsmooth.value(x)
    }
}

/// Multipliers `(y, z)` with `z >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPair {
    pub y: Vector,
    pub z: Vector,
}

impl DualPair {
    pub fn new(y: Vector, z: Vector) -> Result<Self> {
        check_nonnegative(&z)?;
        Ok(Self { y, z })
    }

    pub fn zeros(l: usize, m: usize) -> Self {
        Self {
            y: Vector::zeros(l),
            z: Vector::zeros(m),
        }
    }

    pub fn norm(&self) -> f64 {
        (self.y.norm_squared() + self.z.norm_squared()).sqrt()
    }

    /// `||self - other||` over both blocks.
    pub fn distance(&self, other: &DualPair) -> f64 {
        ((&self.y - &other.y).norm_squared() + (&self.z - &other.z).norm_squared()).sqrt()
    }
}

pub(crate) fn check_nonnegative(z: &Vector) -> Result<()> {
    match z.iter().position(|&v| v < 0.0 || v.is_nan()) {
        Some(index) => Err(SolverError::NegativeMultiplier {
            index,
            value: z[index],
        }),
        None => Ok(()),
    }
}

/// The three ε-KKT residuals and the subgradient that produced the dual one.
#[derive(Debug, Clone, PartialEq)]
pub struct KktReport {
    pub pres: f64,
    pub dres: f64,
    pub compl: f64,
    pub certificate: Vector,
}

impl KktReport {
    pub fn is_eps_kkt(&self, eps: f64) -> bool {
        self.pres <= eps && self.dres <= eps && self.compl <= eps
    }

    pub fn max_residual(&self) -> f64 {
        self.pres.max(self.dres).max(self.compl)
    }
}

/// Oracle call counts of a solve. Counts only grow.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalCounters {
    pub n_obj: u64,
    pub n_grad: u64,
    pub n_prox: u64,
}

impl EvalCounters {
    /// Objective plus gradient evaluations.
    pub fn evals(&self) -> u64 {
        self.n_obj + self.n_grad
    }
}

impl AddAssign for EvalCounters {
    fn add_assign(&mut self, rhs: Self) {
        self.n_obj += rhs.n_obj;
        self.n_grad += rhs.n_grad;
        self.n_prox += rhs.n_prox;
    }
}

pub(crate) fn positive_part_norm_squared(v: &Vector) -> f64 {
    v.iter().map(|&t| t.max(0.0).powi(2)).sum()
}

/// `sqrt(||A x - b||^2 + ||[f(x)]_+||^2)`.
pub fn primal_residual(problem: &ProblemSpec, x: &Vector) -> Result<f64> {
    check_dim("primal_residual point", problem.dim(), x.len())?;
    let affine = problem.affine_residual(x).norm_squared();
    let fvals = problem.constraints().values(x);
    Ok((affine + positive_part_norm_squared(&fvals)).sqrt())
}

/// `sum_i |z_i f_i(x)|`.
pub fn complementarity(z: &Vector, fvals: &Vector) -> Result<f64> {
    check_dim("complementarity", z.len(), fvals.len())?;
    check_nonnegative(z)?;
    Ok(z.iter().zip(fvals.iter()).map(|(zi, fi)| (zi * fi).abs()).sum::<f64>() + 0.0)
}

/// Evaluates the ε-KKT conditions at `(x, p)`.
///
/// The dual residual is the norm of `certificate`, which the caller asserts lies in
/// `∂f_0(x) + A^T y + sum_i z_i ∇f_i(x)`. Primal feasibility and complementarity are
/// recomputed from the oracles.
pub fn check_eps_kkt(
    problem: &ProblemSpec,
    x: &Vector,
    p: &DualPair,
    certificate: &Vector,
    eps: f64,
) -> Result<(KktReport, bool)> {
    check_dim("check_eps_kkt point", problem.dim(), x.len())?;
    check_dim("check_eps_kkt certificate", problem.dim(), certificate.len())?;
    check_dim("check_eps_kkt y", problem.affine_rows(), p.y.len())?;
    check_dim("check_eps_kkt z", problem.constraint_count(), p.z.len())?;
    let pres = primal_residual(problem, x)?;
    let fvals = problem.constraints().values(x);
    let compl = complementarity(&p.z, &fvals)?;
    let report = KktReport {
        pres,
        dres: certificate.norm(),
        compl,
        certificate: certificate.clone(),
    };
    let ok = report.is_eps_kkt(eps);
    Ok((report, ok))
}

/// Builds the proximal-point subproblem centred at `center`: the smooth part
/// becomes `g(x) + rho * ||x - center||^2`, everything else is shared.
pub fn build_pp_subproblem(problem: &ProblemSpec, center: &Vector) -> Result<ProblemSpec> {
    check_dim("subproblem center", problem.dim(), center.len())?;
    if problem.rho <= 0.0 {
        return Err(SolverError::InvalidParameter(
            "proximal-point subproblem needs rho > 0 to be strongly convex".into(),
        ));
    }
    let base = match &problem.center {
        // Re-centring a subproblem shifts the original objective, not the shifted one.
        Some(_) => {
            return Err(SolverError::InvalidParameter(
                "cannot build a subproblem of a subproblem".into(),
            ))
        }
        None => problem.smooth.clone(),
    };
    let shifted = ShiftedSmooth {
        base,
        center: center.clone(),
        rho: problem.rho,
    };
    Ok(ProblemSpec {
        smooth: Arc::new(shifted),
        nonsmooth: problem.nonsmooth.clone(),
        constraints: problem.constraints.clone(),
        affine: problem.affine.clone(),
        rho: problem.rho,
        strong_convexity: problem.rho,
        center: Some(center.clone()),
        meta: problem.meta.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{BoxIndicator, DenseAffine, QuadraticConstraints, QuadraticObjective};
    use nalgebra::DMatrix;

    /// g(x) = 0.5 (x - 2)^2, h = indicator [0, 5], f_1(x) = x - 1.
    fn tp1() -> ProblemSpec {
        let smooth = QuadraticObjective::new(DMatrix::from_element(1, 1, 1.0), Vector::from_element(1, -2.0))
            .with_constant(2.0);
        let cons = QuadraticConstraints::new(
            vec![DMatrix::zeros(1, 1)],
            vec![Vector::from_element(1, 1.0)],
            vec![-1.0],
        )
        .unwrap();
        ProblemSpec::new(
            Arc::new(smooth),
            Arc::new(BoxIndicator::uniform(1, 0.0, 5.0)),
            0.0,
        )
        .unwrap()
        .with_constraints(Arc::new(cons))
        .unwrap()
    }

    #[test]
    fn primal_residual_is_pythagorean() {
        // A = I_2, b = (-3, -4) at x = 0 gives Ax - b = (3, 4).
        let smooth = QuadraticObjective::new(DMatrix::zeros(2, 2), Vector::zeros(2));
        let affine = DenseAffine::new(DMatrix::identity(2, 2), Vector::from_vec(vec![-3.0, -4.0])).unwrap();
        let problem = ProblemSpec::new(Arc::new(smooth), Arc::new(BoxIndicator::uniform(2, -5.0, 5.0)), 0.0)
            .unwrap()
            .with_affine(Arc::new(affine))
            .unwrap();
        let r = primal_residual(&problem, &Vector::zeros(2)).unwrap();
        assert_eq!(r, 5.0);
    }

    #[test]
    fn primal_residual_clips_negative_constraints() {
        // f(x) = (x_1 - 1, x_1 - 0.7) at x = 0 is (-1, -0.7); at x = 1 it is (0, 0.3).
        let cons = QuadraticConstraints::new(
            vec![DMatrix::zeros(1, 1), DMatrix::zeros(1, 1)],
            vec![Vector::from_element(1, 1.0), Vector::from_element(1, 1.0)],
            vec![-1.0, -0.7],
        )
        .unwrap();
        let smooth = QuadraticObjective::new(DMatrix::zeros(1, 1), Vector::zeros(1));
        let problem = ProblemSpec::new(Arc::new(smooth), Arc::new(BoxIndicator::uniform(1, 0.0, 5.0)), 0.0)
            .unwrap()
            .with_constraints(Arc::new(cons))
            .unwrap();
        assert_eq!(primal_residual(&problem, &Vector::zeros(1)).unwrap(), 0.0);
        let r = primal_residual(&problem, &Vector::from_element(1, 1.0)).unwrap();
        assert!((r - 0.3).abs() < 1e-15);
    }

    #[test]
    fn primal_residual_rejects_wrong_dimension() {
        let err = primal_residual(&tp1(), &Vector::zeros(3)).unwrap_err();
        assert!(matches!(err, SolverError::DimensionMismatch { .. }));
    }

    #[test]
    fn complementarity_examples() {
        let z = Vector::from_vec(vec![2.0, 0.0]);
        let f = Vector::from_vec(vec![-0.1, 5.0]);
        assert!((complementarity(&z, &f).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(complementarity(&Vector::zeros(2), &f).unwrap(), 0.0);
        assert_eq!(
            complementarity(&Vector::from_element(2, 1.0), &Vector::zeros(2)).unwrap(),
            0.0
        );
        let err = complementarity(&Vector::from_vec(vec![-1.0, 0.0]), &f).unwrap_err();
        assert!(matches!(err, SolverError::NegativeMultiplier { index: 0, .. }));
    }

    #[test]
    fn tp1_exact_kkt_point() {
        let problem = tp1();
        let x = Vector::from_element(1, 1.0);
        let p = DualPair::new(Vector::zeros(0), Vector::from_element(1, 1.0)).unwrap();
        // g'(1) + z * f_1'(1) = -1 + 1 = 0
        let cert = problem.smooth().gradient(&x) + problem.constraints().jacobian_transpose_apply(&x, &p.z);
        assert_eq!(cert[0], 0.0);
        for eps in [0.0, 1e-12, 1.0] {
            let (report, ok) = check_eps_kkt(&problem, &x, &p, &cert, eps).unwrap();
            assert!(ok);
            assert_eq!((report.pres, report.dres, report.compl), (0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn tp1_infeasible_point_fails() {
        let problem = tp1();
        let x = Vector::from_element(1, 1.5);
        let p = problem.zero_dual();
        let cert = problem.smooth().gradient(&x);
        let (report, ok) = check_eps_kkt(&problem, &x, &p, &cert, 1e-3).unwrap();
        assert!(!ok);
        assert!((report.pres - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pp_subproblem_pure_quadratic_shift() {
        let smooth = QuadraticObjective::new(DMatrix::zeros(3, 3), Vector::zeros(3));
        let problem = ProblemSpec::new(Arc::new(smooth), Arc::new(BoxIndicator::uniform(3, -1.0, 1.0)), 1.0).unwrap();
        let sub = build_pp_subproblem(&problem, &Vector::zeros(3)).unwrap();
        let e1 = Vector::from_vec(vec![1.0, 0.0, 0.0]);
        assert_eq!(sub.smooth().value(&e1), 1.0);
        assert_eq!(sub.smooth().gradient(&e1), Vector::from_vec(vec![2.0, 0.0, 0.0]));
        assert_eq!(sub.strong_convexity(), 1.0);
    }

    #[test]
    fn pp_subproblem_matches_at_center_and_keeps_residuals() {
        let problem = ProblemSpec { rho: 0.7, ..tp1() };
        let center = Vector::from_element(1, 3.0);
        let sub = build_pp_subproblem(&problem, &center).unwrap();
        assert_eq!(sub.smooth().value(&center), problem.smooth().value(&center));
        for v in [0.0, 0.5, 1.0, 2.5, 5.0] {
            let x = Vector::from_element(1, v);
            assert_eq!(
                primal_residual(&sub, &x).unwrap(),
                primal_residual(&problem, &x).unwrap()
            );
        }
    }

    #[test]
    fn pp_subproblem_requires_positive_rho() {
        let err = build_pp_subproblem(&tp1(), &Vector::from_element(1, 1.0)).unwrap_err();
        assert!(matches!(err, SolverError::InvalidParameter(_)));
    }

    #[test]
    fn pp_subproblem_gradient_matches_finite_differences() {
        // TP2: g = 0.5 ||x||^2 on R^2 with weak-convexity constant 1.
        let smooth = QuadraticObjective::new(DMatrix::identity(2, 2), Vector::zeros(2));
        let problem = ProblemSpec::new(Arc::new(smooth), Arc::new(BoxIndicator::uniform(2, -5.0, 5.0)), 1.0).unwrap();
        let sub = build_pp_subproblem(&problem, &Vector::from_vec(vec![0.3, -1.2])).unwrap();
        let x = Vector::from_vec(vec![1.1, 0.4]);
        let grad = sub.smooth().gradient(&x);
        let fd = crate::linalg::central_difference(|v| sub.smooth().value(v), &x, 1e-6);
        assert!((&grad - &fd).norm() <= 1e-5 * grad.norm().max(1.0));
    }

    #[test]
    fn dual_pair_rejects_negative_z() {
        assert!(DualPair::new(Vector::zeros(1), Vector::from_vec(vec![0.0, -1e-9])).is_err());
        let p = DualPair::new(Vector::from_vec(vec![3.0]), Vector::from_vec(vec![4.0])).unwrap();
        assert_eq!(p.norm(), 5.0);
    }
}
