//! The classic augmented Lagrangian
//!
//! ```text
//! L_β(x, y, z) = f_0(x) + y^T (Ax - b) + β/2 ||Ax - b||^2
//!              + 1/(2β) (||[z + β f(x)]_+||^2 - ||z||^2)
//! ```
//!
//! evaluated on a (possibly proximally shifted) problem. The smooth part
//! `G = L_β - h` is exposed as a [`SmoothOracle`] so the inner solver can use it directly.

use crate::error::{check_dim, Result, SolverError};
use crate::model::{
    check_nonnegative, positive_part_norm_squared, DualPair, ProblemSpec, SmoothOracle,
    SmoothnessMeta, Vector,
};

/// A problem, a penalty parameter and a fixed multiplier pair.
#[derive(Debug, Clone, Copy)]
pub struct AlContext<'a> {
    problem: &'a ProblemSpec,
    beta: f64,
    p: &'a DualPair,
}

impl<'a> AlContext<'a> {
    pub fn new(problem: &'a ProblemSpec, beta: f64, p: &'a DualPair) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(SolverError::InvalidParameter(format!(
                "penalty parameter must be positive, got {beta}"
            )));
        }
        check_dim("multiplier y", problem.affine_rows(), p.y.len())?;
        check_dim("multiplier z", problem.constraint_count(), p.z.len())?;
        check_nonnegative(&p.z)?;
        Ok(Self { problem, beta, p })
    }

    pub fn problem(&self) -> &'a ProblemSpec {
        self.problem
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn multipliers(&self) -> &'a DualPair {
        self.p
    }

    /// The affine part `y^T r + β/2 ||r||^2` with `r = Ax - b`, plus `r` itself.
    fn affine_terms(&self, x: &Vector) -> (f64, Vector) {
        let r = self.problem.affine_residual(x);
        let value = self.p.y.dot(&r) + 0.5 * self.beta * r.norm_squared();
        (value, r)
    }
}

/// `Ψ_β(z, f) = 1/(2β) (||[z + β f]_+||^2 - ||z||^2)`.
pub fn psi_value(z: &Vector, beta: f64, fvals: &Vector) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(SolverError::InvalidParameter(format!(
            "penalty parameter must be positive, got {beta}"
        )));
    }
    check_dim("psi_value", z.len(), fvals.len())?;
    check_nonnegative(z)?;
    Ok(psi_unchecked(z, beta, fvals))
}

fn psi_unchecked(z: &Vector, beta: f64, fvals: &Vector) -> f64 {
    let shifted = z + fvals * beta;
    (positive_part_norm_squared(&shifted) - z.norm_squared()) / (2.0 * beta)
}

/// The augmented Lagrangian at `x`; `include_h` selects whether `h(x)` is added.
pub fn al_value(ctx: &AlContext<'_>, x: &Vector, include_h: bool) -> Result<f64> {
    check_dim("al_value point", ctx.problem.dim(), x.len())?;
    Ok(al_value_unchecked(ctx, x, include_h))
}

fn al_value_unchecked(ctx: &AlContext<'_>, x: &Vector, include_h: bool) -> f64 {
    let problem = ctx.problem;
    let (affine, _) = ctx.affine_terms(x);
    let fvals = problem.constraints().values(x);
    let mut value = problem.smooth().value(x) + affine + psi_unchecked(&ctx.p.z, ctx.beta, &fvals);
    if include_h {
        value += problem.nonsmooth().value(x);
    }
    value
}

/// Gradient of the smooth part:
/// `∇g(x) + A^T y + β A^T (Ax - b) + sum_i [z_i + β f_i(x)]_+ ∇f_i(x)`.
pub fn al_smooth_gradient(ctx: &AlContext<'_>, x: &Vector) -> Result<Vector> {
    check_dim("al_smooth_gradient point", ctx.problem.dim(), x.len())?;
    Ok(ctx.value_and_gradient(x).1)
}

impl SmoothOracle for AlContext<'_> {
    fn dim(&self) -> usize {
        self.problem.dim()
    }

    fn value(&self, x: &Vector) -> f64 {
        al_value_unchecked(self, x, false)
    }

    fn gradient(&self, x: &Vector) -> Vector {
        self.value_and_gradient(x).1
    }

    fn value_and_gradient(&self, x: &Vector) -> (f64, Vector) {
        let problem = self.problem;
        let beta = self.beta;
        let (g_value, mut grad) = problem.smooth().value_and_gradient(x);
        let (affine, r) = self.affine_terms(x);
        if let Some(a) = problem.affine() {
            let mut dual = r;
            dual *= beta;
            dual += &self.p.y;
            grad += a.apply_transpose(&dual);
        }
        let z = &self.p.z;
        let (fvals, jt) = problem
            .constraints()
            .values_and_weighted_gradient(x, &mut |f| (z + f * beta).map(|t| t.max(0.0)));
        grad += jt;
        let value = g_value + affine + psi_unchecked(z, beta, &fvals);
        (value, grad)
    }
}

/// Lipschitz constant of the augmented Lagrangian's smooth gradient over `dom(h)`:
///
/// ```text
/// L(z, β) = L_0 + 2ρ + β ||A^T A|| + sum_i (β B_i (B_i + L_i) + L_i |z_i|)
/// ```
pub fn smoothness_estimate(meta: &SmoothnessMeta, z: &Vector, beta: f64, rho: f64) -> Result<f64> {
    let l0 = meta.l0.ok_or(SolverError::MetadataUnavailable("L_0 of the smooth objective"))?;
    let gram = meta.gram_norm.ok_or(SolverError::MetadataUnavailable("||A^T A||"))?;
    let mut total = l0 + 2.0 * rho + beta * gram;
    if !z.is_empty() {
        let lip = meta
            .constraint_lipschitz
            .as_ref()
            .ok_or(SolverError::MetadataUnavailable("constraint Lipschitz constants"))?;
        let bounds = meta
            .constraint_bounds
            .as_ref()
            .ok_or(SolverError::MetadataUnavailable("constraint bounds"))?;
        check_dim("constraint Lipschitz constants", z.len(), lip.len())?;
        check_dim("constraint bounds", z.len(), bounds.len())?;
        for ((zi, li), bi) in z.iter().zip(lip).zip(bounds) {
            total += beta * bi * (bi + li) + li * zi.abs();
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::central_difference;
    use crate::model::{build_pp_subproblem, ProblemSpec};
    use crate::oracles::{BoxIndicator, DenseAffine, QuadraticConstraints, QuadraticObjective};
    use nalgebra::DMatrix;
    use std::sync::Arc;

    fn tp1() -> ProblemSpec {
        let smooth = QuadraticObjective::new(DMatrix::from_element(1, 1, 1.0), Vector::from_element(1, -2.0))
            .with_constant(2.0);
        let cons = QuadraticConstraints::new(
            vec![DMatrix::zeros(1, 1)],
            vec![Vector::from_element(1, 1.0)],
            vec![-1.0],
        )
        .unwrap();
        ProblemSpec::new(Arc::new(smooth), Arc::new(BoxIndicator::uniform(1, 0.0, 5.0)), 0.0)
            .unwrap()
            .with_constraints(Arc::new(cons))
            .unwrap()
    }

    fn tp2() -> ProblemSpec {
        let smooth = QuadraticObjective::new(DMatrix::identity(2, 2), Vector::zeros(2));
        let affine = DenseAffine::new(DMatrix::from_row_slice(1, 2, &[1.0, 1.0]), Vector::from_element(1, 1.0)).unwrap();
        ProblemSpec::new(Arc::new(smooth), Arc::new(BoxIndicator::uniform(2, -5.0, 5.0)), 1.0)
            .unwrap()
            .with_affine(Arc::new(affine))
            .unwrap()
    }

    /// m = 1 with f_1(x) = x - 0.5 (so f_1(1) = 0.5), f_0 = 0, no affine block.
    fn single_constraint() -> ProblemSpec {
        let smooth = QuadraticObjective::new(DMatrix::zeros(1, 1), Vector::zeros(1));
        let cons = QuadraticConstraints::new(
            vec![DMatrix::zeros(1, 1)],
            vec![Vector::from_element(1, 1.0)],
            vec![-0.5],
        )
        .unwrap();
        ProblemSpec::new(Arc::new(smooth), Arc::new(BoxIndicator::uniform(1, -5.0, 5.0)), 0.0)
            .unwrap()
            .with_constraints(Arc::new(cons))
            .unwrap()
    }

    #[test]
    fn feasible_point_with_zero_duals_gives_objective() {
        let problem = tp1();
        let p = problem.zero_dual();
        let x = Vector::from_element(1, 0.5);
        for beta in [1e-2, 1.0, 1e3] {
            let ctx = AlContext::new(&problem, beta, &p).unwrap();
            assert_eq!(al_value(&ctx, &x, true).unwrap(), problem.objective(&x));
        }
    }

    #[test]
    fn tp2_on_the_hyperplane() {
        let problem = tp2();
        let x = Vector::from_vec(vec![1.0, 0.0]);
        for (beta, y) in [(0.1, -3.0), (1.0, 0.0), (50.0, 7.5)] {
            let p = DualPair::new(Vector::from_element(1, y), Vector::zeros(0)).unwrap();
            let ctx = AlContext::new(&problem, beta, &p).unwrap();
            assert_eq!(al_value(&ctx, &x, false).unwrap(), 0.5);
        }
    }

    #[test]
    fn penalty_term_arithmetic() {
        let problem = single_constraint();
        let p = DualPair::new(Vector::zeros(0), Vector::from_element(1, 1.0)).unwrap();
        let ctx = AlContext::new(&problem, 2.0, &p).unwrap();
        let v = al_value(&ctx, &Vector::from_element(1, 1.0), false).unwrap();
        assert!((v - 0.75).abs() < 1e-15);
    }

    #[test]
    fn psi_examples() {
        let one = Vector::from_element(1, 1.0);
        assert_eq!(psi_value(&Vector::zeros(2), 3.0, &Vector::from_vec(vec![-1.0, 0.0])).unwrap(), 0.0);
        assert!((psi_value(&one, 2.0, &Vector::from_element(1, 0.5)).unwrap() - 0.75).abs() < 1e-15);
        assert!((psi_value(&one, 2.0, &Vector::from_element(1, -1.0)).unwrap() + 0.25).abs() < 1e-15);
        assert!(psi_value(&one, 0.0, &one).is_err());
        assert!(AlContext::new(&single_constraint(), -1.0, &DualPair::zeros(0, 1)).is_err());
    }

    #[test]
    fn inactive_constraints_leave_smooth_gradient() {
        let problem = tp1();
        let p = problem.zero_dual();
        let ctx = AlContext::new(&problem, 7.0, &p).unwrap();
        let x = Vector::from_element(1, 0.25);
        assert_eq!(al_smooth_gradient(&ctx, &x).unwrap(), problem.smooth().gradient(&x));
    }

    #[test]
    fn tp1_gradient_vanishes_at_kkt_point() {
        let problem = tp1();
        let p = DualPair::new(Vector::zeros(0), Vector::from_element(1, 1.0)).unwrap();
        let ctx = AlContext::new(&problem, 1.0, &p).unwrap();
        let g = al_smooth_gradient(&ctx, &Vector::from_element(1, 1.0)).unwrap();
        assert_eq!(g[0], 0.0);
    }

    #[test]
    fn decomposition_into_psi() {
        let problem = tp2();
        let p = DualPair::new(Vector::from_element(1, 0.4), Vector::zeros(0)).unwrap();
        let ctx = AlContext::new(&problem, 3.0, &p).unwrap();
        let x = Vector::from_vec(vec![0.2, 1.7]);
        let r = problem.affine_residual(&x);
        let expected = problem.objective(&x)
            + p.y.dot(&r)
            + 0.5 * 3.0 * r.norm_squared()
            + psi_value(&p.z, 3.0, &problem.constraints().values(&x)).unwrap();
        assert_eq!(al_value(&ctx, &x, true).unwrap(), expected);
    }

    #[test]
    fn gradient_matches_finite_differences_on_shifted_problem() {
        let problem = ProblemSpec::new(
            Arc::new(
                QuadraticObjective::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, -1.0]), Vector::from_vec(vec![0.3, -0.2])),
            ),
            Arc::new(BoxIndicator::uniform(2, -5.0, 5.0)),
            1.2,
        )
        .unwrap()
        .with_constraints(Arc::new(
            QuadraticConstraints::new(
                vec![DMatrix::identity(2, 2), DMatrix::zeros(2, 2)],
                vec![Vector::from_vec(vec![0.0, 1.0]), Vector::from_vec(vec![1.0, -1.0])],
                vec![-1.0, 0.1],
            )
            .unwrap(),
        ))
        .unwrap()
        .with_affine(Arc::new(
            DenseAffine::new(DMatrix::from_row_slice(1, 2, &[2.0, 1.0]), Vector::from_element(1, 0.5)).unwrap(),
        ))
        .unwrap();
        let sub = build_pp_subproblem(&problem, &Vector::from_vec(vec![0.5, -0.5])).unwrap();
        let p = DualPair::new(Vector::from_element(1, -0.7), Vector::from_vec(vec![0.3, 0.0])).unwrap();
        let ctx = AlContext::new(&sub, 4.0, &p).unwrap();
        for k in 0..20 {
            let t = k as f64;
            let x = Vector::from_vec(vec![2.0 * (0.9 * t).sin(), 1.5 * (1.7 * t + 0.3).cos()]);
            let g = al_smooth_gradient(&ctx, &x).unwrap();
            let fd = central_difference(|v| al_value(&ctx, v, false).unwrap(), &x, 1e-6);
            assert!((&g - &fd).norm() <= 1e-5 * g.norm().max(1.0), "k={k}: {g} vs {fd}");
        }
    }

    #[test]
    fn shifted_al_is_midpoint_convex() {
        // Nonconvex g with rho matching its negative curvature; the shifted AL is convex.
        let problem = ProblemSpec::new(
            Arc::new(QuadraticObjective::new(DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 2.0]), Vector::zeros(2))),
            Arc::new(BoxIndicator::uniform(2, -5.0, 5.0)),
            1.0,
        )
        .unwrap()
        .with_constraints(Arc::new(
            QuadraticConstraints::new(vec![DMatrix::identity(2, 2)], vec![Vector::zeros(2)], vec![-1.0]).unwrap(),
        ))
        .unwrap();
        let sub = build_pp_subproblem(&problem, &Vector::from_vec(vec![1.0, 1.0])).unwrap();
        let p = DualPair::new(Vector::zeros(0), Vector::from_element(1, 0.5)).unwrap();
        let ctx = AlContext::new(&sub, 10.0, &p).unwrap();
        for k in 0..40 {
            let t = k as f64;
            let a = Vector::from_vec(vec![3.0 * t.sin(), 2.0 * (0.3 * t).cos()]);
            let b = Vector::from_vec(vec![-2.0 * (1.1 * t).cos(), 4.0 * (0.7 * t).sin()]);
            let mid = (&a + &b) * 0.5;
            let lhs = al_value(&ctx, &mid, false).unwrap();
            let rhs = 0.5 * (al_value(&ctx, &a, false).unwrap() + al_value(&ctx, &b, false).unwrap());
            assert!(lhs <= rhs + 1e-9 * rhs.abs().max(1.0));
        }
    }

    #[test]
    fn smoothness_estimate_examples() {
        let meta = SmoothnessMeta {
            l0: Some(1.0),
            gram_norm: Some(3.0),
            constraint_lipschitz: Some(vec![1.0]),
            constraint_bounds: Some(vec![1.0]),
        };
        let l = smoothness_estimate(&meta, &Vector::from_element(1, 4.0), 2.0, 1.0).unwrap();
        assert_eq!(l, 17.0);
        let l0 = smoothness_estimate(&meta, &Vector::zeros(1), 0.0, 0.0).unwrap();
        assert_eq!(l0, 1.0);
        let missing = SmoothnessMeta { constraint_bounds: None, ..meta };
        assert!(matches!(
            smoothness_estimate(&missing, &Vector::zeros(1), 1.0, 1.0),
            Err(SolverError::MetadataUnavailable(_))
        ));
    }

    proptest::proptest! {
        #[test]
        fn smoothness_estimate_monotone_in_beta(
            l0 in 0.0..10.0f64, gram in 0.0..10.0f64, li in 0.0..5.0f64, bi in 0.0..5.0f64,
            z in 0.0..10.0f64, beta in 1e-3..1e3f64, rho in 0.0..10.0f64,
        ) {
            let meta = SmoothnessMeta {
                l0: Some(l0),
                gram_norm: Some(gram),
                constraint_lipschitz: Some(vec![li]),
                constraint_bounds: Some(vec![bi]),
            };
            let z = Vector::from_element(1, z);
            let a = smoothness_estimate(&meta, &z, beta, rho).unwrap();
            let b = smoothness_estimate(&meta, &z, 2.0 * beta, rho).unwrap();
            proptest::prop_assert!(b >= a);
        }
    }
}
