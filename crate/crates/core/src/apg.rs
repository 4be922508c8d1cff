//! Adaptive accelerated proximal gradient for strongly convex composite problems
//!
//! ```text
//! minimize F(x) = G(x) + H(x)
//! ```
//!
//! with `G` smooth and μ-strongly convex and `H` closed convex with a prox. The
//! Lipschitz constant of `∇G` is found by backtracking and relaxed after each
//! accepted step. The method stops at a point with an explicit subgradient of
//! norm at most ε.

use crate::error::{check_dim, PartialSolve, Result, SolverError};
use crate::model::{EvalCounters, ProxOracle, SmoothOracle, Vector};

/// Trial constants above this value abort the line search.
pub const LINE_SEARCH_CAP: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApgConfig {
    /// Strong-convexity estimate μ.
    pub mu: f64,
    /// Target norm of the stationarity certificate.
    pub eps: f64,
    /// Lower bound on the trial Lipschitz constant.
    pub l_min: f64,
    /// Increase rate of the backtracking.
    pub gamma1: f64,
    /// Decrease rate applied after each accepted step.
    pub gamma2: f64,
    pub max_iters: usize,
}

impl ApgConfig {
    pub fn new(mu: f64, eps: f64, l_min: f64) -> Self {
        Self {
            mu,
            eps,
            l_min,
            gamma1: 2.0,
            gamma2: 1.25,
            max_iters: 1_000_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(SolverError::InvalidParameter(msg));
        if !(self.mu > 0.0) || !self.mu.is_finite() {
            return bad(format!("mu must be positive, got {}", self.mu));
        }
        if !(self.eps >= 0.0) {
            return bad(format!("eps must be nonnegative, got {}", self.eps));
        }
        if !(self.l_min >= self.mu) || !self.l_min.is_finite() {
            return bad(format!("l_min = {} must be finite and at least mu = {}", self.l_min, self.mu));
        }
        if !(self.gamma1 > 1.0) {
            return bad(format!("gamma1 must exceed 1, got {}", self.gamma1));
        }
        if !(self.gamma2 >= 1.0 && self.gamma2 <= 2.0 * self.gamma1) {
            return bad(format!("gamma2 must lie in [1, 2 gamma1], got {}", self.gamma2));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ApgResult {
    pub x: Vector,
    /// An element of `∂F(x)`.
    pub certificate: Vector,
    pub certificate_norm: f64,
    /// Accepted accelerated steps.
    pub iters: usize,
    pub counters: EvalCounters,
    /// The point produced by the preprocessing step.
    pub x0: Vector,
    /// The constant accepted by the preprocessing step.
    pub l0: f64,
    /// Line-search trials over the accelerated loop.
    pub trials: usize,
}

impl ApgResult {
    /// Objective plus gradient evaluations.
    pub fn evals(&self) -> u64 {
        self.counters.evals()
    }
}

/// `prox(y - ∇G(y) / L, 1 / L)`.
pub fn prox_grad_step(grad_y: &Vector, y: &Vector, l: f64, h: &dyn ProxOracle) -> Vector {
    let mut v = y.clone();
    v.axpy(-1.0 / l, grad_y, 1.0);
    h.prox(&v, 1.0 / l)
}

/// Relative size below which a change in `G` is treated as rounding noise.
const VALUE_RESOLUTION: f64 = 1e-10;

/// `G(x) <= G(y) + <∇G(y), x - y> + L/2 ||x - y||^2`, with equality accepted up to rounding.
///
/// When `G(x)` and `G(y)` agree to within [`VALUE_RESOLUTION`] and `∇G(x)` is known, the
/// test falls back to `||∇G(x) - ∇G(y)|| <= L ||x - y||`.
fn descent_holds(g_y: f64, grad_y: &Vector, y: &Vector, x: &Vector, g_x: f64, grad_x: Option<&Vector>, l: f64) -> bool {
    let d = x - y;
    if let Some(grad_x) = grad_x {
        if (g_x - g_y).abs() <= VALUE_RESOLUTION * g_x.abs().max(g_y.abs()) {
            return (grad_x - grad_y).norm() <= l * d.norm();
        }
    }
    let bound = g_y + grad_y.dot(&d) + 0.5 * l * d.norm_squared();
    let slack = 4.0 * f64::EPSILON * (g_y.abs() + g_x.abs() + 1.0);
    g_x <= bound + slack
}

/// Inputs of one backtracking call.
#[derive(Debug, Clone, Copy)]
pub struct LineSearchInput<'a> {
    pub x_k: &'a Vector,
    pub x_prev: &'a Vector,
    pub l_k: f64,
    pub mu: f64,
    pub alpha_prev: f64,
    pub gamma1: f64,
}

/// Outcome of one backtracking call.
#[derive(Debug, Clone)]
pub struct LineSearchStep {
    pub x_next: Vector,
    /// Accepted constant `M_k`.
    pub m: f64,
    pub alpha: f64,
    pub y: Vector,
    pub grad_y: Vector,
    pub value_next: f64,
    pub grad_next: Vector,
    pub trials: usize,
}

/// Backtracks from `L_k` by factors of `γ1` until the descent condition holds at the
/// extrapolated point.
pub fn accel_line_search(
    g: &dyn SmoothOracle,
    h: &dyn ProxOracle,
    input: LineSearchInput<'_>,
    counters: &mut EvalCounters,
) -> Result<LineSearchStep> {
    let LineSearchInput {
        x_k,
        x_prev,
        l_k,
        mu,
        alpha_prev,
        gamma1,
    } = input;
    let momentum = x_k - x_prev;
    let mut l = l_k / gamma1;
    let mut cached: Option<(Vector, f64, Vector)> = None;
    let mut trials = 0;
    loop {
        l *= gamma1;
        if l > LINE_SEARCH_CAP || !l.is_finite() {
            return Err(SolverError::LineSearchDivergence { trial: l });
        }
        trials += 1;
        let alpha = (mu / l).sqrt();
        let coef = alpha * (1.0 - alpha_prev) / (alpha_prev * (1.0 + alpha));
        let mut y = x_k.clone();
        y.axpy(coef, &momentum, 1.0);
        let (g_y, grad_y) = match cached.take() {
            Some((point, v, gr)) if point == y => (v, gr),
            _ => {
                counters.n_obj += 1;
                counters.n_grad += 1;
                g.value_and_gradient(&y)
            }
        };
        let x_next = prox_grad_step(&grad_y, &y, l, h);
        counters.n_prox += 1;
        let (g_x, grad_x) = g.value_and_gradient(&x_next);
        counters.n_obj += 1;
        counters.n_grad += 1;
        if descent_holds(g_y, &grad_y, &y, &x_next, g_x, Some(&grad_x), l) {
            return Ok(LineSearchStep {
                x_next,
                m: l,
                alpha,
                y,
                grad_y,
                value_next: g_x,
                grad_next: grad_x,
                trials,
            });
        }
        cached = Some((y, g_y, grad_y));
    }
}

/// Minimizes `G + H` from `x_init` until the constructed subgradient
/// `v = M_k (y^k - x^{k+1}) + ∇G(x^{k+1}) - ∇G(y^k)` has norm at most `cfg.eps`.
pub fn adap_apg(
    g: &dyn SmoothOracle,
    h: &dyn ProxOracle,
    x_init: &Vector,
    cfg: &ApgConfig,
) -> Result<ApgResult> {
    cfg.validate()?;
    check_dim("adap_apg prox oracle", g.dim(), h.dim())?;
    check_dim("adap_apg start", g.dim(), x_init.len())?;
    let mut counters = EvalCounters::default();

    let (g_init, grad_init) = g.value_and_gradient(x_init);
    counters.n_obj += 1;
    counters.n_grad += 1;
    let mut l0 = cfg.l_min;
    let x0 = loop {
        l0 *= cfg.gamma1;
        if l0 > LINE_SEARCH_CAP || !l0.is_finite() {
            return Err(SolverError::LineSearchDivergence { trial: l0 });
        }
        let candidate = prox_grad_step(&grad_init, x_init, l0, h);
        counters.n_prox += 1;
        let g_candidate = g.value(&candidate);
        counters.n_obj += 1;
        if descent_holds(g_init, &grad_init, x_init, &candidate, g_candidate, None, l0) {
            break candidate;
        }
    };

    let mut x_prev = x0.clone();
    let mut x = x0.clone();
    let mut l_k = l0;
    let mut alpha_prev = 1.0;
    let mut trials = 0;
    let mut best_norm = f64::INFINITY;
    let mut best_x = x0.clone();
    for iter in 1..=cfg.max_iters {
        let input = LineSearchInput {
            x_k: &x,
            x_prev: &x_prev,
            l_k,
            mu: cfg.mu,
            alpha_prev,
            gamma1: cfg.gamma1,
        };
        let step = accel_line_search(g, h, input, &mut counters)?;
        trials += step.trials;
        let mut certificate = (&step.y - &step.x_next) * step.m;
        certificate += &step.grad_next;
        certificate -= &step.grad_y;
        let norm = certificate.norm();
        l_k = cfg.l_min.max(step.m / cfg.gamma2);
        alpha_prev = step.alpha;
        if norm <= cfg.eps {
            return Ok(ApgResult {
                x: step.x_next,
                certificate,
                certificate_norm: norm,
                iters: iter,
                counters,
                x0,
                l0,
                trials,
            });
        }
        if norm < best_norm {
            best_norm = norm;
            best_x.clone_from(&step.x_next);
        }
        x_prev = std::mem::replace(&mut x, step.x_next);
    }
    Err(SolverError::InnerNonconvergence {
        tolerance: cfg.eps,
        best_norm,
        partial: Box::new(PartialSolve {
            x: best_x,
            iterations: cfg.max_iters,
            counters,
        }),
    })
}

/// The evaluation budget `3E + 6T - 3` guaranteed for [`adap_apg`] on an
/// `L_G`-smooth, μ-strongly convex `G`.
///
/// `dist_init` is `||x_init - x*||` and `dist_pre` is `||x^0 - x*||`, the distance
/// after preprocessing.
pub fn evaluation_bound(l_g: f64, mu: f64, gamma1: f64, eps: f64, dist_init: f64, dist_pre: f64) -> f64 {
    let e = ((l_g / mu).ln() / gamma1.ln()).ceil();
    let ratio = gamma1 * l_g / mu;
    let radius = (ratio * dist_init * dist_init + dist_pre * dist_pre).sqrt();
    let t = (ratio.sqrt() * (2.0 * (1.0 + gamma1) * l_g * radius / eps).ln()).ceil();
    3.0 * e + 6.0 * t - 3.0
}
