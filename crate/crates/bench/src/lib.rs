//! Fixtures shared by the criterion benches.

use hiapem::generators::{gen_lcqp, gen_qcqp};
use hiapem::{build_pp_subproblem, DualPair, ProblemSpec, Vector};

/// A seeded LCQP instance and its starting point.
pub fn lcqp(n: usize, m: usize, rho: f64, seed: u64) -> (ProblemSpec, Vector) {
    let (inst, problem) = gen_lcqp(n, m, rho, seed).expect("valid LCQP sizes");
    (problem, inst.start())
}

/// A seeded QCQP instance and its starting point.
pub fn qcqp(n: usize, m: usize, rho: f64, seed: u64) -> (ProblemSpec, Vector) {
    let (inst, problem) = gen_qcqp(n, m, rho, seed).expect("valid QCQP sizes");
    (problem, inst.start())
}

/// The first proximal-point subproblem of `problem` with zero multipliers.
pub fn first_subproblem(problem: &ProblemSpec, center: &Vector) -> (ProblemSpec, DualPair) {
    let sub = build_pp_subproblem(problem, center).expect("subproblem of an original problem");
    let p = sub.zero_dual();
    (sub, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_have_requested_shapes() {
        let (problem, x0) = lcqp(20, 4, 1.0, 0);
        assert_eq!((problem.dim(), problem.affine_rows(), x0.len()), (20, 4, 20));
        let (problem, _) = qcqp(10, 3, 1.0, 0);
        assert_eq!(problem.constraint_count(), 3);
        let (sub, p) = first_subproblem(&problem, &Vector::zeros(10));
        assert_eq!(sub.strong_convexity(), 1.0);
        assert_eq!(p.z.len(), 3);
    }
}
