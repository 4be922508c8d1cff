//! Proximal-point drivers for the weakly convex problem.
//!
//! Every outer iteration solves the subproblem
//!
//! ```text
//! minimize g(x) + rho ||x - x^k||^2 + h(x)  s.t.  A x = b,  f(x) <= 0
//! ```
//!
//! and stops once two consecutive centres are within `ε / (4ρ)`. The hybrid mode
//! solves an initial block of subproblems with the augmented Lagrangian method, then
//! runs stages of penalty solves with multipliers frozen at the last augmented
//! Lagrangian estimate. Each stage closes with one more augmented Lagrangian solve
//! that refreshes the estimate.

use crate::apg::ApgConfig;
use crate::error::{check_dim, PartialSolve, Result, SolverError};
use crate::ialm::{ialm_solve, IalmConfig, IalmIterate};
use crate::linalg::robust_ceil;
use crate::model::{
    build_pp_subproblem, check_eps_kkt, DualPair, EvalCounters, KktReport, ProblemSpec, Vector,
};
use crate::penmm::{penmm_solve, PenmmConfig};

/// Smallest accepted weak-convexity constant.
pub const MIN_RHO: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Hybrid,
    PureIalm,
    PurePenalty,
}

impl Mode {
    pub fn tag(&self) -> &'static str {
        match self {
            Mode::Hybrid => "hiapem",
            Mode::PureIalm => "ialm",
            Mode::PurePenalty => "penalty",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HiapemConfig {
    pub eps: f64,
    /// Target of the augmented Lagrangian solves, which run at half of it.
    pub eps_hat1: f64,
    /// Target of the penalty solves, which run at half of it.
    pub eps_hat2: f64,
    pub beta0: f64,
    pub sigma: f64,
    /// Stage growth rate.
    pub gamma: f64,
    /// Number of initial augmented Lagrangian solves.
    pub n0: usize,
    /// Length of the first stage.
    pub n1: usize,
    pub rho: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub l_min: f64,
    /// Cap on proximal-point iterations.
    pub max_total_outer: usize,
    /// Cap on outer iterations inside each subproblem solve.
    pub max_sub_outer: usize,
    /// Cap on accelerated steps inside each inner solve.
    pub max_inner_iters: usize,
    /// Gradient evaluations after which no further subproblem is started.
    pub max_grad_evals: Option<u64>,
    pub mode: Mode,
}

impl HiapemConfig {
    pub fn new(eps: f64, rho: f64) -> Self {
        Self {
            eps,
            eps_hat1: eps,
            eps_hat2: default_eps_hat2(eps, rho),
            beta0: 0.01,
            sigma: 3.0,
            gamma: 1.1,
            n0: 10,
            n1: 2,
            rho,
            gamma1: 2.0,
            gamma2: 1.25,
            l_min: rho,
            max_total_outer: 10_000,
            max_sub_outer: 60,
            max_inner_iters: 1_000_000,
            max_grad_evals: None,
            mode: Mode::Hybrid,
        }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(SolverError::InvalidParameter(msg));
        if !(self.rho >= MIN_RHO) || !self.rho.is_finite() {
            return bad(format!("rho must be at least {MIN_RHO:e}, got {}", self.rho));
        }
        if !(self.eps > 0.0) {
            return bad(format!("eps must be positive, got {}", self.eps));
        }
        if !(0.0 < self.eps_hat2 && self.eps_hat2 <= self.eps_hat1 && self.eps_hat1 <= self.eps) {
            return bad(format!(
                "need 0 < eps_hat2 <= eps_hat1 <= eps, got {} / {} / {}",
                self.eps_hat2, self.eps_hat1, self.eps
            ));
        }
        if !(self.gamma > 1.0) {
            return bad(format!("gamma must exceed 1, got {}", self.gamma));
        }
        if self.n1 == 0 {
            return bad("n1 must be at least 1".into());
        }
        if !(self.l_min > 0.0) {
            return bad(format!("l_min must be positive, got {}", self.l_min));
        }
        self.apg_template().validate_rates()
    }

    fn apg_template(&self) -> ApgConfig {
        ApgConfig {
            gamma1: self.gamma1,
            gamma2: self.gamma2,
            max_iters: self.max_inner_iters,
            ..ApgConfig::new(self.rho, self.eps, self.l_min.max(self.rho))
        }
    }

    fn ialm_config(&self) -> IalmConfig {
        IalmConfig {
            eps: self.eps_hat1 / 2.0,
            beta0: self.beta0,
            sigma: self.sigma,
            rho: self.rho,
            apg: self.apg_template(),
            max_outer: self.max_sub_outer,
        }
    }

    fn penmm_config(&self, beta_init: f64) -> PenmmConfig {
        PenmmConfig {
            eps: self.eps_hat2 / 2.0,
            beta_init,
            sigma: self.sigma,
            rho: self.rho,
            apg: self.apg_template(),
            max_outer: self.max_sub_outer,
        }
    }
}

impl ApgConfig {
    fn validate_rates(&self) -> Result<()> {
        ApgConfig { mu: 1.0, eps: 1.0, l_min: 1.0, ..*self }.validate()
    }
}

/// `(ε / 2√2) min{1, 1/√ρ}`.
pub fn default_eps_hat2(eps: f64, rho: f64) -> f64 {
    eps / (2.0 * 2f64.sqrt()) * (1.0 / rho.sqrt()).min(1.0)
}

/// Cumulative stage boundaries `K_0 = N_0`, `K_1 = K_0 + N_1`,
/// `K_{s+1} = K_s + ceil(γ^s N_1)`, for `stages` stages.
pub fn stage_boundaries(n0: usize, n1: usize, gamma: f64, stages: usize) -> Vec<usize> {
    let mut out = vec![n0];
    let mut k = n0 + n1;
    for s in 1..=stages {
        out.push(k);
        k += stage_length(n1, gamma, s);
    }
    out
}

/// `N_{s+1} = ceil(γ^s N_1)`.
pub fn stage_length(n1: usize, gamma: f64, s: usize) -> usize {
    robust_ceil(gamma.powi(s as i32) * n1 as f64) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subroutine {
    Ialm,
    Penmm,
}

impl Subroutine {
    pub fn tag(&self) -> &'static str {
        match self {
            Subroutine::Ialm => "ialm",
            Subroutine::Penmm => "penmm",
        }
    }
}

/// One proximal-point iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationLog {
    /// Global outer index; the solve maps `x^k` to `x^{k+1}`.
    pub k: usize,
    pub subroutine: Subroutine,
    /// Stage index, 0 during the initial block.
    pub stage: usize,
    pub beta_init: f64,
    pub beta_out: f64,
    /// `||x^{k+1} - x^k||`.
    pub step: f64,
    pub pres: f64,
    pub dres: f64,
    pub compl: f64,
    pub sub_iters: usize,
    pub counters: EvalCounters,
    /// Penalties used by every sub-iteration.
    pub betas: Vec<f64>,
    /// Fixed multipliers of a penalty solve.
    pub anchor: Option<DualPair>,
    pub ialm_trace: Vec<IalmIterate>,
    /// `x^{k+1}`.
    pub x: Vector,
}

/// The multiplier estimate and penalty at the start of a stage.
#[derive(Debug, Clone, PartialEq)]
pub struct StageRecord {
    pub s: usize,
    /// Global index at which the stage closes; `K_s`.
    pub k_end: usize,
    /// Stage length `N_s`.
    pub length: usize,
    pub beta_warm: f64,
    pub p_bar: DualPair,
}

#[derive(Debug, Clone)]
pub struct SolveSummary {
    pub x: Vector,
    pub p: DualPair,
    /// Residuals for the original problem.
    pub report: KktReport,
    pub counters: EvalCounters,
    pub outer_iters: usize,
    pub stages: usize,
    pub log: Vec<IterationLog>,
    pub stage_log: Vec<StageRecord>,
}

impl SolveSummary {
    pub fn is_eps_kkt(&self, eps: f64) -> bool {
        self.report.is_eps_kkt(eps)
    }
}

struct SubSolve {
    x: Vector,
    p: DualPair,
    certificate: Vector,
    beta_out: f64,
    counters: EvalCounters,
    iters: usize,
    betas: Vec<f64>,
    anchor: Option<DualPair>,
    ialm_trace: Vec<IalmIterate>,
}

struct Driver<'a> {
    problem: ProblemSpec,
    cfg: &'a HiapemConfig,
    x: Vector,
    k: usize,
    stage: usize,
    counters: EvalCounters,
    log: Vec<IterationLog>,
    stage_log: Vec<StageRecord>,
    last: Option<(DualPair, KktReport)>,
}

enum Step {
    Stop,
    Continue,
}

impl<'a> Driver<'a> {
    fn new(problem: &ProblemSpec, x0: &Vector, cfg: &'a HiapemConfig) -> Result<Self> {
        cfg.validate()?;
        check_dim("solve start", problem.dim(), x0.len())?;
        let problem = problem.clone().with_rho(cfg.rho)?;
        let x = problem.nonsmooth().project(x0);
        Ok(Self {
            problem,
            cfg,
            x,
            k: 0,
            stage: 0,
            counters: EvalCounters::default(),
            log: Vec::new(),
            stage_log: Vec::new(),
            last: None,
        })
    }

    fn wrap(&self, tag: &'static str, err: SolverError) -> SolverError {
        let mut err = err;
        match &mut err {
            SolverError::InnerNonconvergence { partial, .. } | SolverError::OuterNonconvergence { partial, .. } => {
                partial.counters += self.counters;
            }
            _ => {}
        }
        SolverError::Subroutine {
            tag,
            k: self.k,
            source: Box::new(err),
        }
    }

    fn ialm(&self) -> Result<SubSolve> {
        let sub = build_pp_subproblem(&self.problem, &self.x)?;
        let out = ialm_solve(&sub, &self.x, &self.cfg.ialm_config()).map_err(|e| self.wrap("ialm", e))?;
        Ok(SubSolve {
            x: out.x_out,
            p: out.p_out,
            certificate: out.report.certificate,
            beta_out: out.beta_out,
            counters: out.counters,
            iters: out.outer_iters,
            betas: out.trace.iter().map(|t| t.beta).collect(),
            anchor: None,
            ialm_trace: out.trace,
        })
    }

    fn penmm(&self, beta_init: f64, p_bar: &DualPair) -> Result<SubSolve> {
        let sub = build_pp_subproblem(&self.problem, &self.x)?;
        let out = penmm_solve(&sub, &self.x, p_bar, &self.cfg.penmm_config(beta_init))
            .map_err(|e| self.wrap("penmm", e))?;
        Ok(SubSolve {
            x: out.x_out,
            p: out.p_out,
            certificate: out.report.certificate,
            beta_out: out.beta_out,
            counters: out.counters,
            iters: out.outer_iters,
            betas: out.trace.iter().map(|t| t.beta).collect(),
            anchor: Some(p_bar.clone()),
            ialm_trace: Vec::new(),
        })
    }

    /// Records a subproblem solution, moves the centre and applies the step test.
    fn accept(&mut self, kind: Subroutine, beta_init: f64, sol: SubSolve) -> Result<(Step, f64, DualPair)> {
        let step = (&sol.x - &self.x).norm();
        // v - 2ρ(x⁺ - x^k) is a subgradient of the original Lagrangian at x⁺.
        let mut certificate = sol.certificate;
        certificate.axpy(-2.0 * self.cfg.rho, &(&sol.x - &self.x), 1.0);
        let (report, _) = check_eps_kkt(&self.problem, &sol.x, &sol.p, &certificate, self.cfg.eps)?;
        self.counters += sol.counters;
        log::debug!(
            "k={} {} beta_out={:.3e} step={:.3e} pres={:.3e} dres={:.3e} compl={:.3e}",
            self.k,
            kind.tag(),
            sol.beta_out,
            step,
            report.pres,
            report.dres,
            report.compl
        );
        self.log.push(IterationLog {
            k: self.k,
            subroutine: kind,
            stage: self.stage,
            beta_init,
            beta_out: sol.beta_out,
            step,
            pres: report.pres,
            dres: report.dres,
            compl: report.compl,
            sub_iters: sol.iters,
            counters: sol.counters,
            betas: sol.betas,
            anchor: sol.anchor,
            ialm_trace: sol.ialm_trace,
            x: sol.x.clone(),
        });
        self.x = sol.x;
        self.k += 1;
        self.last = Some((sol.p.clone(), report));
        let stop = step <= self.cfg.eps / (4.0 * self.cfg.rho);
        Ok((if stop { Step::Stop } else { Step::Continue }, sol.beta_out, sol.p))
    }

    fn last_is_kkt(&self) -> bool {
        self.last.as_ref().is_some_and(|(_, r)| r.is_eps_kkt(self.cfg.eps))
    }

    fn check_cap(&self) -> Result<()> {
        if let Some(budget) = self.cfg.max_grad_evals {
            if self.counters.n_grad > budget {
                return Err(SolverError::EvaluationBudget {
                    used: self.counters.n_grad,
                    partial: Box::new(PartialSolve {
                        x: self.x.clone(),
                        iterations: self.k,
                        counters: self.counters,
                    }),
                });
            }
        }
        if self.k >= self.cfg.max_total_outer {
            return Err(SolverError::OuterNonconvergence {
                method: self.cfg.mode.tag(),
                partial: Box::new(PartialSolve {
                    x: self.x.clone(),
                    iterations: self.k,
                    counters: self.counters,
                }),
            });
        }
        Ok(())
    }

    fn finish(self) -> SolveSummary {
        let (p, report) = self.last.expect("at least one subproblem is solved before stopping");
        SolveSummary {
            x: self.x,
            p,
            report,
            counters: self.counters,
            outer_iters: self.k,
            stages: self.stage,
            log: self.log,
            stage_log: self.stage_log,
        }
    }

    fn run_hybrid(mut self) -> Result<SolveSummary> {
        let cfg = self.cfg;
        let mut beta_bar = cfg.beta0;
        let mut p_bar = self.problem.zero_dual();
        for _ in 0..cfg.n0 {
            self.check_cap()?;
            let sol = self.ialm()?;
            let (step, beta_out, p_out) = self.accept(Subroutine::Ialm, cfg.beta0, sol)?;
            if let Step::Stop = step {
                return Ok(self.finish());
            }
            beta_bar = beta_out;
            p_bar = p_out;
        }
        self.stage = 1;
        let mut k_end = cfg.n0 + cfg.n1;
        self.stage_log.push(StageRecord {
            s: 1,
            k_end,
            length: cfg.n1,
            beta_warm: beta_bar,
            p_bar: p_bar.clone(),
        });
        loop {
            if self.last_is_kkt() {
                return Ok(self.finish());
            }
            self.check_cap()?;
            if self.k + 1 >= k_end {
                let sol = self.ialm()?;
                let (step, beta_out, p_out) = self.accept(Subroutine::Ialm, cfg.beta0, sol)?;
                if let Step::Stop = step {
                    return Ok(self.finish());
                }
                let length = stage_length(cfg.n1, cfg.gamma, self.stage);
                k_end += length;
                self.stage += 1;
                beta_bar = beta_out;
                p_bar = p_out;
                self.stage_log.push(StageRecord {
                    s: self.stage,
                    k_end,
                    length,
                    beta_warm: beta_bar,
                    p_bar: p_bar.clone(),
                });
            } else {
                let sol = self.penmm(beta_bar, &p_bar)?;
                let (step, beta_out, _) = self.accept(Subroutine::Penmm, beta_bar, sol)?;
                if let Step::Stop = step {
                    return Ok(self.finish());
                }
                beta_bar = beta_out;
            }
        }
    }

    fn run_pure_ialm(mut self) -> Result<SolveSummary> {
        loop {
            self.check_cap()?;
            let sol = self.ialm()?;
            if let (Step::Stop, _, _) = self.accept(Subroutine::Ialm, self.cfg.beta0, sol)? {
                return Ok(self.finish());
            }
        }
    }

    fn run_pure_penalty(mut self) -> Result<SolveSummary> {
        let p_bar = self.problem.zero_dual();
        let mut beta = self.cfg.beta0;
        loop {
            if self.last_is_kkt() {
                return Ok(self.finish());
            }
            self.check_cap()?;
            let sol = self.penmm(beta, &p_bar)?;
            let (step, beta_out, _) = self.accept(Subroutine::Penmm, beta, sol)?;
            if let Step::Stop = step {
                return Ok(self.finish());
            }
            beta = beta_out;
        }
    }
}

/// Solves the problem in the mode selected by `cfg.mode`, starting from the
/// projection of `x0` onto `dom(h)`.
pub fn solve(problem: &ProblemSpec, x0: &Vector, cfg: &HiapemConfig) -> Result<SolveSummary> {
    let driver = Driver::new(problem, x0, cfg)?;
    match cfg.mode {
        Mode::Hybrid => driver.run_hybrid(),
        Mode::PureIalm => driver.run_pure_ialm(),
        Mode::PurePenalty => driver.run_pure_penalty(),
    }
}

/// Hybrid augmented Lagrangian / penalty solve.
pub fn hiapem_solve(problem: &ProblemSpec, x0: &Vector, cfg: &HiapemConfig) -> Result<SolveSummary> {
    solve(problem, x0, &cfg.with_mode(Mode::Hybrid))
}

/// Every subproblem solved by the augmented Lagrangian method.
pub fn pure_ialm_solve(problem: &ProblemSpec, x0: &Vector, cfg: &HiapemConfig) -> Result<SolveSummary> {
    solve(problem, x0, &cfg.with_mode(Mode::PureIalm))
}

/// Every subproblem solved by the penalty method with zero multipliers.
pub fn pure_penalty_solve(problem: &ProblemSpec, x0: &Vector, cfg: &HiapemConfig) -> Result<SolveSummary> {
    solve(problem, x0, &cfg.with_mode(Mode::PurePenalty))
}
