//! Inexact augmented Lagrangian method for a strongly convex (proximal-point) subproblem.
//!
//! Each outer iteration minimizes the augmented Lagrangian to a fixed stationarity
//! tolerance, takes a dual ascent step and grows the penalty geometrically.

use crate::apg::{adap_apg, ApgConfig};
use crate::error::{check_dim, PartialSolve, Result, SolverError};
use crate::lagrangian::{smoothness_estimate, AlContext};
use crate::model::{
    check_eps_kkt, check_nonnegative, DualPair, EvalCounters, KktReport, ProblemSpec, Vector,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IalmConfig {
    pub eps: f64,
    pub beta0: f64,
    pub sigma: f64,
    /// Strong-convexity constant of the subproblem.
    pub rho: f64,
    /// Inner solver template; `mu` and `eps` are overwritten per call.
    pub apg: ApgConfig,
    pub max_outer: usize,
}

impl IalmConfig {
    pub fn new(eps: f64, rho: f64) -> Self {
        Self {
            eps,
            beta0: 0.01,
            sigma: 3.0,
            rho,
            apg: ApgConfig::new(rho, eps, rho),
            max_outer: 60,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0) {
            return Err(SolverError::InvalidParameter(format!("eps must be positive, got {}", self.eps)));
        }
        if !(self.beta0 > 0.0) {
            return Err(SolverError::InvalidParameter(format!("beta0 must be positive, got {}", self.beta0)));
        }
        if !(self.sigma > 1.0) {
            return Err(SolverError::InvalidParameter(format!("sigma must exceed 1, got {}", self.sigma)));
        }
        if !(self.rho > 0.0) {
            return Err(SolverError::InvalidParameter(format!("rho must be positive, got {}", self.rho)));
        }
        Ok(())
    }
}

/// One outer iteration of [`ialm_solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct IalmIterate {
    pub k: usize,
    pub beta: f64,
    /// `||p^k||`.
    pub p_norm: f64,
    /// `||p^{k+1}||`.
    pub p_next_norm: f64,
    /// `||p^{k+1} - p^k||`.
    pub dual_step: f64,
    pub error: f64,
    /// Primal residual at `x^{k+1}`.
    pub pres: f64,
    pub inner_iters: usize,
}

#[derive(Debug, Clone)]
pub struct IalmOutput {
    pub beta_out: f64,
    pub x_out: Vector,
    pub p_out: DualPair,
    pub report: KktReport,
    pub outer_iters: usize,
    pub counters: EvalCounters,
    pub trace: Vec<IalmIterate>,
}

/// `sqrt((σ-1)/(σ+1)) * (ε/2) * min{1, sqrt(ρ)}`.
pub fn inner_tolerance(eps: f64, sigma: f64, rho: f64) -> f64 {
    ((sigma - 1.0) / (sigma + 1.0)).sqrt() * (eps / 2.0) * rho.sqrt().min(1.0)
}

/// `y + β r` and `max(0, z + β f)`.
pub fn dual_update(p: &DualPair, beta: f64, ax_minus_b: &Vector, fvals: &Vector) -> DualPair {
    let mut y = p.y.clone();
    y.axpy(beta, ax_minus_b, 1.0);
    let mut z = p.z.clone();
    z.axpy(beta, fvals, 1.0);
    z.apply(|v| *v = v.max(0.0));
    DualPair { y, z }
}

/// `K = ceil(log_σ C) + 1` with `C = max{10 ||p*||^2 / (β0 ε), 8 ||p*|| / (β0 ε), 4 / β0}`.
pub fn predicted_outer_bound(p_star_norm: f64, beta0: f64, sigma: f64, eps: f64) -> usize {
    let c = (10.0 * p_star_norm * p_star_norm / (beta0 * eps))
        .max(8.0 * p_star_norm / (beta0 * eps))
        .max(4.0 / beta0);
    let k = crate::linalg::robust_ceil(c.ln() / sigma.ln()).max(0.0);
    k as usize + 1
}

/// Inner solver settings for one augmented Lagrangian minimization.
pub(crate) fn inner_config(sub: &ProblemSpec, template: &ApgConfig, z: &Vector, beta: f64, rho: f64, eps: f64) -> ApgConfig {
    let l_min = smoothness_estimate(sub.meta(), z, beta, rho).unwrap_or(template.l_min);
    ApgConfig {
        mu: rho,
        eps,
        l_min: l_min.max(rho),
        ..*template
    }
}

/// Runs the inexact augmented Lagrangian method from `x_init` with `p^0 = 0`.
pub fn ialm_solve(sub: &ProblemSpec, x_init: &Vector, cfg: &IalmConfig) -> Result<IalmOutput> {
    cfg.validate()?;
    check_dim("ialm_solve start", sub.dim(), x_init.len())?;
    let eps_inner = inner_tolerance(cfg.eps, cfg.sigma, cfg.rho);
    let mut x = x_init.clone();
    let mut p = sub.zero_dual();
    let mut counters = EvalCounters::default();
    let mut trace = Vec::new();
    for k in 0..cfg.max_outer {
        let beta = cfg.beta0 * cfg.sigma.powi(k as i32);
        let apg_cfg = inner_config(sub, &cfg.apg, &p.z, beta, cfg.rho, eps_inner);
        let ctx = AlContext::new(sub, beta, &p)?;
        let inner = adap_apg(&ctx, sub.nonsmooth(), &x, &apg_cfg).map_err(|e| {
            merge_partial(e, &counters)
        })?;
        counters += inner.counters;
        let residual = sub.affine_residual(&inner.x);
        let fvals = sub.constraints().values(&inner.x);
        let p_next = dual_update(&p, beta, &residual, &fvals);
        let compl = crate::model::complementarity(&p_next.z, &fvals)?;
        let (p_norm, p_next_norm) = (p.norm(), p_next.norm());
        let error = ((p_norm + p_next_norm) / beta).max(compl);
        let pres = (residual.norm_squared() + crate::model::positive_part_norm_squared(&fvals)).sqrt();
        trace.push(IalmIterate {
            k,
            beta,
            p_norm,
            p_next_norm,
            dual_step: p_next.distance(&p),
            error,
            pres,
            inner_iters: inner.iters,
        });
        log::trace!("ialm k={k} beta={beta:.3e} error={error:.3e} pres={pres:.3e}");
        if error <= cfg.eps {
            let (report, _) = check_eps_kkt(sub, &inner.x, &p_next, &inner.certificate, cfg.eps)?;
            return Ok(IalmOutput {
                beta_out: beta,
                x_out: inner.x,
                p_out: p_next,
                report,
                outer_iters: k + 1,
                counters,
                trace,
            });
        }
        x = inner.x;
        p = p_next;
    }
    Err(SolverError::OuterNonconvergence {
        method: "ialm",
        partial: Box::new(PartialSolve {
            x,
            iterations: cfg.max_outer,
            counters,
        }),
    })
}

/// Adds the counters of completed work to the partial progress of an inner failure.
pub(crate) fn merge_partial(mut err: SolverError, done: &EvalCounters) -> SolverError {
    if let SolverError::InnerNonconvergence { partial, .. } = &mut err {
        partial.counters += *done;
    }
    err
}

/// Validates a caller-supplied multiplier pair against a problem.
pub(crate) fn check_dual(problem: &ProblemSpec, p: &DualPair) -> Result<()> {
    check_dim("multiplier y", problem.affine_rows(), p.y.len())?;
    check_dim("multiplier z", problem.constraint_count(), p.z.len())?;
    check_nonnegative(&p.z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::primal_residual;
    use crate::oracles::{BoxIndicator, DenseAffine, QuadraticConstraints, QuadraticObjective};
    use nalgebra::DMatrix;
    use std::sync::Arc;

    fn tp1() -> ProblemSpec {
        let smooth = QuadraticObjective::new(DMatrix::from_element(1, 1, 1.0), Vector::from_element(1, -2.0))
            .with_constant(2.0);
        let cons = QuadraticConstraints::new(vec![DMatrix::zeros(1, 1)], vec![Vector::from_element(1, 1.0)], vec![-1.0])
            .unwrap()
            .with_bounds(vec![5.0])
            .unwrap();
        ProblemSpec::new(Arc::new(smooth), Arc::new(BoxIndicator::uniform(1, 0.0, 5.0)), 0.0)
            .unwrap()
            .with_constraints(Arc::new(cons))
            .unwrap()
    }

    fn tp2() -> ProblemSpec {
        let smooth = QuadraticObjective::new(DMatrix::identity(2, 2), Vector::zeros(2));
        let affine = DenseAffine::new(DMatrix::from_row_slice(1, 2, &[1.0, 1.0]), Vector::from_element(1, 1.0)).unwrap();
        ProblemSpec::new(Arc::new(smooth), Arc::new(BoxIndicator::uniform(2, -5.0, 5.0)), 0.0)
            .unwrap()
            .with_affine(Arc::new(affine))
            .unwrap()
    }

    #[test]
    fn inner_tolerance_examples() {
        assert!((inner_tolerance(0.2, 3.0, 1.0) - 0.5f64.sqrt() * 0.1).abs() < 1e-15);
        assert_eq!(inner_tolerance(0.2, 3.0, 4.0), inner_tolerance(0.2, 3.0, 1.0));
        assert_eq!(inner_tolerance(0.0, 3.0, 0.5), 0.0);
    }

    #[test]
    fn dual_update_examples() {
        let p = DualPair::new(Vector::zeros(1), Vector::from_element(1, 1.0)).unwrap();
        let next = dual_update(&p, 2.0, &Vector::from_element(1, 0.5), &Vector::from_element(1, -1.0));
        assert_eq!(next.y[0], 1.0);
        assert_eq!(next.z[0], 0.0);
        let next = dual_update(&p, 2.0, &Vector::from_element(1, 0.0), &Vector::from_element(1, 0.25));
        assert_eq!(next.z[0], 1.5);
    }

    #[test]
    fn outer_bound_examples() {
        assert_eq!(predicted_outer_bound(1.0, 0.01, 3.0, 1e-3), 14);
        assert_eq!(predicted_outer_bound(0.0, 4.0, 3.0, 0.1), 1);
        assert!(predicted_outer_bound(1.0, 0.01, 3.0, 1e-4) >= predicted_outer_bound(1.0, 0.01, 3.0, 1e-2));
    }

    #[test]
    fn tp1_converges_to_kkt_pair() {
        let problem = tp1();
        let cfg = IalmConfig::new(1e-3, 1.0);
        let out = ialm_solve(&problem, &Vector::from_element(1, 2.5), &cfg).unwrap();
        assert!(out.report.is_eps_kkt(1e-3), "{:?}", out.report);
        assert!((out.x_out[0] - 1.0).abs() < 1e-2);
        assert!((out.p_out.z[0] - 1.0).abs() < 1e-2);
        assert!(out.outer_iters <= predicted_outer_bound(1.0, cfg.beta0, cfg.sigma, cfg.eps));
    }

    #[test]
    fn tp2_converges_to_kkt_pair() {
        let problem = tp2();
        let cfg = IalmConfig::new(1e-3, 1.0);
        let out = ialm_solve(&problem, &Vector::zeros(2), &cfg).unwrap();
        assert!(out.report.is_eps_kkt(1e-3));
        assert!((&out.x_out - Vector::from_element(2, 0.5)).norm() < 1e-2);
        assert!((out.p_out.y[0] + 0.5).abs() < 1e-2);
        assert!(out.outer_iters <= predicted_outer_bound(0.5, cfg.beta0, cfg.sigma, cfg.eps));
    }

    #[test]
    fn trace_invariants() {
        let problem = tp1();
        let cfg = IalmConfig::new(1e-4, 1.0);
        let out = ialm_solve(&problem, &Vector::from_element(1, 5.0), &cfg).unwrap();
        for it in &out.trace {
            assert_eq!(it.beta, cfg.beta0 * cfg.sigma.powi(it.k as i32));
            // Primal residual is bounded by the dual step over the penalty.
            assert!(it.pres <= it.dual_step / it.beta * (1.0 + 1e-12) + 1e-15);
        }
        let (report, ok) =
            check_eps_kkt(&problem, &out.x_out, &out.p_out, &out.report.certificate, cfg.eps).unwrap();
        assert!(ok);
        assert_eq!(report.pres, primal_residual(&problem, &out.x_out).unwrap());
    }

    #[test]
    fn outer_cap_is_an_error() {
        let cfg = IalmConfig { max_outer: 2, ..IalmConfig::new(1e-6, 1.0) };
        let err = ialm_solve(&tp1(), &Vector::from_element(1, 5.0), &cfg).unwrap_err();
        assert_eq!(err.kind(), "outer_nonconvergence");
        assert_eq!(err.partial().unwrap().iterations, 2);
    }
}
