//! Penalty method with estimated multipliers.
//!
//! Like the inexact augmented Lagrangian method, but the multipliers inside the
//! augmented Lagrangian stay fixed at a supplied estimate `p̄`. Each iterate is
//! checked for ε-KKT directly.

use crate::apg::{adap_apg, ApgConfig};
use crate::error::{check_dim, PartialSolve, Result, SolverError};
use crate::ialm::{check_dual, dual_update, inner_config, merge_partial};
use crate::lagrangian::AlContext;
use crate::model::{check_eps_kkt, DualPair, EvalCounters, KktReport, ProblemSpec, Vector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenmmConfig {
    pub eps: f64,
    /// Penalty of the first iteration.
    pub beta_init: f64,
    pub sigma: f64,
    /// Strong-convexity constant of the subproblem.
    pub rho: f64,
    /// Inner solver template; `mu` and `eps` are overwritten per call.
    pub apg: ApgConfig,
    pub max_outer: usize,
}

impl PenmmConfig {
    pub fn new(eps: f64, beta_init: f64, rho: f64) -> Self {
        Self {
            eps,
            beta_init,
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
        if !(self.beta_init > 0.0) {
            return Err(SolverError::InvalidParameter(format!(
                "beta_init must be positive, got {}",
                self.beta_init
            )));
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

/// One iteration of [`penmm_solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct PenmmIterate {
    pub k: usize,
    pub beta: f64,
    /// The multipliers the new dual pair was computed from.
    pub anchor: DualPair,
    pub pres: f64,
    pub dres: f64,
    pub compl: f64,
    pub inner_iters: usize,
}

#[derive(Debug, Clone)]
pub struct PenmmOutput {
    pub beta_out: f64,
    pub x_out: Vector,
    pub p_out: DualPair,
    pub report: KktReport,
    pub outer_iters: usize,
    pub counters: EvalCounters,
    pub trace: Vec<PenmmIterate>,
}

/// `max{4 (||p*||^2 + ||p* - p̄||^2) / ε, 4 ||p* - p̄|| / ε, 8}`.
pub fn predicted_beta_bound(p_star_norm: f64, p_gap_norm: f64, eps: f64) -> f64 {
    (4.0 * (p_star_norm * p_star_norm + p_gap_norm * p_gap_norm) / eps)
        .max(4.0 * p_gap_norm / eps)
        .max(8.0)
}

/// Runs the penalty method on `sub` from `center` with the multipliers held at `p_bar`.
pub fn penmm_solve(sub: &ProblemSpec, center: &Vector, p_bar: &DualPair, cfg: &PenmmConfig) -> Result<PenmmOutput> {
    cfg.validate()?;
    check_dim("penmm_solve center", sub.dim(), center.len())?;
    check_dual(sub, p_bar)?;
    let eps_inner = cfg.eps * cfg.rho.sqrt().min(1.0);
    let mut x = center.clone();
    let mut counters = EvalCounters::default();
    let mut trace = Vec::new();
    for k in 0..cfg.max_outer {
        let beta = cfg.beta_init * cfg.sigma.powi(k as i32);
        let apg_cfg: ApgConfig = inner_config(sub, &cfg.apg, &p_bar.z, beta, cfg.rho, eps_inner);
        let ctx = AlContext::new(sub, beta, p_bar)?;
        let inner = adap_apg(&ctx, sub.nonsmooth(), &x, &apg_cfg).map_err(|e| merge_partial(e, &counters))?;
        counters += inner.counters;
        let residual = sub.affine_residual(&inner.x);
        let fvals = sub.constraints().values(&inner.x);
        let p_next = dual_update(p_bar, beta, &residual, &fvals);
        let (report, ok) = check_eps_kkt(sub, &inner.x, &p_next, &inner.certificate, cfg.eps)?;
        trace.push(PenmmIterate {
            k,
            beta,
            anchor: p_bar.clone(),
            pres: report.pres,
            dres: report.dres,
            compl: report.compl,
            inner_iters: inner.iters,
        });
        log::trace!(
            "penmm k={k} beta={beta:.3e} pres={:.3e} dres={:.3e} compl={:.3e}",
            report.pres,
            report.dres,
            report.compl
        );
        if ok {
            return Ok(PenmmOutput {
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
    }
    Err(SolverError::OuterNonconvergence {
        method: "penmm",
        partial: Box::new(PartialSolve {
            x,
            iterations: cfg.max_outer,
            counters,
        }),
    })
}
