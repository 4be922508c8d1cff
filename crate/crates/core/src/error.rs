use crate::model::{EvalCounters, Vector};

/// Iterate and bookkeeping carried out of a solve that hit an iteration cap.
#[derive(Debug, Clone)]
pub struct PartialSolve {
    pub x: Vector,
    pub iterations: usize,
    pub counters: EvalCounters,
}

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("dual infeasible: multiplier z[{index}] = {value} is negative")]
    NegativeMultiplier { index: usize, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("smoothness metadata unavailable: {0}")]
    MetadataUnavailable(&'static str),

    #[error("line search divergence: trial constant {trial:.3e} exceeded the cap without acceptance")]
    LineSearchDivergence { trial: f64 },

    #[error("inner solver did not reach tolerance {tolerance:.3e} within {} iterations (best certificate {best_norm:.3e})", .partial.iterations)]
    InnerNonconvergence {
        tolerance: f64,
        best_norm: f64,
        partial: Box<PartialSolve>,
    },

    #[error("{method} exceeded {} outer iterations", .partial.iterations)]
    OuterNonconvergence {
        method: &'static str,
        partial: Box<PartialSolve>,
    },

    #[error("gradient budget exhausted after {used} evaluations")]
    EvaluationBudget {
        used: u64,
        partial: Box<PartialSolve>,
    },

    #[error("no feasible grid point at resolution {grid_step}")]
    InfeasibleAtResolution { grid_step: f64 },

    #[error("{tag} call at outer iteration {k} failed: {source}")]
    Subroutine {
        tag: &'static str,
        k: usize,
        #[source]
        source: Box<SolverError>,
    },
}

impl SolverError {
    /// Short machine-friendly name, used in benchmark status columns.
    pub fn kind(&self) -> &'static str {
        match self {
            SolverError::DimensionMismatch { .. } => "dimension",
            SolverError::NegativeMultiplier { .. } => "negative_multiplier",
            SolverError::InvalidParameter(_) => "invalid_parameter",
            SolverError::MetadataUnavailable(_) => "metadata_unavailable",
            SolverError::LineSearchDivergence { .. } => "line_search_divergence",
            SolverError::InnerNonconvergence { .. } => "inner_nonconvergence",
            SolverError::OuterNonconvergence { .. } => "outer_nonconvergence",
            SolverError::EvaluationBudget { .. } => "evaluation_budget",
            SolverError::InfeasibleAtResolution { .. } => "infeasible_at_resolution",
            SolverError::Subroutine { source, .. } => source.kind(),
        }
    }

    /// Partial progress carried by iteration-cap errors, looking through subroutine wrappers.
    pub fn partial(&self) -> Option<&PartialSolve> {
        match self {
            SolverError::InnerNonconvergence { partial, .. }
            | SolverError::OuterNonconvergence { partial, .. }
            | SolverError::EvaluationBudget { partial, .. } => Some(partial),
            SolverError::Subroutine { source, .. } => source.partial(),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, SolverError>;

pub(crate) fn check_dim(context: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(SolverError::DimensionMismatch {
            context,
            expected,
            actual,
        });
    }
    Ok(())
}
