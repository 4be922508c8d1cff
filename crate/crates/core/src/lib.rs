//! First-order solvers for
//!
//! ```text
//! minimize g(x) + h(x)  s.t.  A x = b,  f(x) <= 0
//! ```
//!
//! with `g` smooth and weakly convex, `h` convex with a cheap prox and `f`
//! convex. The top-level entry points are [`hiapem_solve`], [`pure_ialm_solve`]
//! and [`pure_penalty_solve`]; [`check_eps_kkt`] verifies any returned point.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod apg;
pub mod bench;
pub mod brute_force;
pub mod error;
pub mod generators;
pub mod driver;
pub mod ialm;
pub mod lagrangian;
pub mod linalg;
pub mod model;
pub mod oracles;
pub mod penmm;

pub use apg::{adap_apg, ApgConfig, ApgResult};
pub use error::{PartialSolve, Result, SolverError};
pub use driver::{hiapem_solve, pure_ialm_solve, pure_penalty_solve, solve, HiapemConfig, Mode, SolveSummary};
pub use ialm::{ialm_solve, IalmConfig, IalmOutput};
pub use lagrangian::AlContext;
pub use model::{
    build_pp_subproblem, check_eps_kkt, AffineBlock, ConstraintOracle, DualPair, EvalCounters, KktReport,
    ProblemSpec, ProxOracle, SmoothOracle, Vector,
};
pub use penmm::{penmm_solve, PenmmConfig, PenmmOutput};
