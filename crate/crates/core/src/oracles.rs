//! Concrete dense oracles: quadratics, box indicators and dense affine blocks.

use nalgebra::DMatrix;

use crate::error::{check_dim, Result, SolverError};
use crate::linalg::symmetric_norm;
use crate::model::{AffineBlock, ConstraintOracle, ProxOracle, SmoothOracle, Vector};

/// `0.5 x^T Q x + c^T x + constant` with symmetric `Q`.
#[derive(Debug, Clone)]
pub struct QuadraticObjective {
    q: DMatrix<f64>,
    c: Vector,
    constant: f64,
    lipschitz: f64,
}

impl QuadraticObjective {
    /// Panics if `Q` is not square or `c` has the wrong length.
    pub fn new(q: DMatrix<f64>, c: Vector) -> Self {
        assert!(q.is_square(), "quadratic term must be square");
        assert_eq!(q.nrows(), c.len(), "linear term length mismatch");
        let lipschitz = symmetric_norm(&q);
        Self {
            q,
            c,
            constant: 0.0,
            lipschitz,
        }
    }

    pub fn with_constant(mut self, constant: f64) -> Self {
        self.constant = constant;
        self
    }

    pub fn hessian(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn linear(&self) -> &Vector {
        &self.c
    }
}

impl SmoothOracle for QuadraticObjective {
    fn dim(&self) -> usize {
        self.c.len()
    }

    fn value(&self, x: &Vector) -> f64 {
        0.5 * x.dot(&(&self.q * x)) + self.c.dot(x) + self.constant
    }

    fn gradient(&self, x: &Vector) -> Vector {
        &self.q * x + &self.c
    }

    fn value_and_gradient(&self, x: &Vector) -> (f64, Vector) {
        let qx = &self.q * x;
        let value = 0.5 * x.dot(&qx) + self.c.dot(x) + self.constant;
        (value, qx + &self.c)
    }

    fn lipschitz_hint(&self) -> Option<f64> {
        Some(self.lipschitz)
    }
}

/// Indicator of the box `[lower, upper]`; its prox is the projection.
#[derive(Debug, Clone)]
pub struct BoxIndicator {
    lower: Vector,
    upper: Vector,
}

impl BoxIndicator {
    pub fn new(lower: Vector, upper: Vector) -> Result<Self> {
        check_dim("box bounds", lower.len(), upper.len())?;
        if lower.iter().zip(upper.iter()).any(|(l, u)| !(l <= u)) {
            return Err(SolverError::InvalidParameter(
                "box requires lower <= upper componentwise".into(),
            ));
        }
        Ok(Self { lower, upper })
    }

    pub fn uniform(n: usize, lower: f64, upper: f64) -> Self {
        Self::new(Vector::from_element(n, lower), Vector::from_element(n, upper))
            .expect("uniform box bounds must satisfy lower <= upper")
    }

    /// Midpoint of the box.
    pub fn center(&self) -> Vector {
        (&self.lower + &self.upper) * 0.5
    }
}

impl ProxOracle for BoxIndicator {
    fn dim(&self) -> usize {
        self.lower.len()
    }

    fn prox(&self, v: &Vector, _step: f64) -> Vector {
        self.project(v)
    }

    fn project(&self, x: &Vector) -> Vector {
        Vector::from_iterator(
            x.len(),
            x.iter()
                .zip(self.lower.iter().zip(self.upper.iter()))
                .map(|(&xi, (&l, &u))| xi.clamp(l, u)),
        )
    }

    fn value(&self, x: &Vector) -> f64 {
        let inside = x
            .iter()
            .zip(self.lower.iter().zip(self.upper.iter()))
            .all(|(&xi, (&l, &u))| l <= xi && xi <= u);
        if inside {
            0.0
        } else {
            f64::INFINITY
        }
    }

    fn diameter_hint(&self) -> Option<f64> {
        Some((&self.upper - &self.lower).norm())
    }

    fn box_bounds(&self) -> Option<(&Vector, &Vector)> {
        Some((&self.lower, &self.upper))
    }
}

/// Convex quadratic constraints `0.5 x^T Q_j x + c_j^T x + d_j <= 0` with `Q_j` PSD.
#[derive(Debug, Clone)]
pub struct QuadraticConstraints {
    q: Vec<DMatrix<f64>>,
    c: Vec<Vector>,
    d: Vec<f64>,
    lipschitz: Vec<f64>,
    bounds: Option<Vec<f64>>,
}

impl QuadraticConstraints {
    pub fn new(q: Vec<DMatrix<f64>>, c: Vec<Vector>, d: Vec<f64>) -> Result<Self> {
        check_dim("constraint linear terms", q.len(), c.len())?;
        check_dim("constraint offsets", q.len(), d.len())?;
        let n = c.first().map_or(0, |c| c.len());
        for (qj, cj) in q.iter().zip(&c) {
            check_dim("constraint linear term", n, cj.len())?;
            if !qj.is_square() || qj.nrows() != n {
                return Err(SolverError::DimensionMismatch {
                    context: "constraint quadratic term",
                    expected: n,
                    actual: qj.nrows(),
                });
            }
        }
        let lipschitz = q.iter().map(symmetric_norm).collect();
        Ok(Self {
            q,
            c,
            d,
            lipschitz,
            bounds: None,
        })
    }

    /// Attaches uniform bounds `B_j` over the domain.
    pub fn with_bounds(mut self, bounds: Vec<f64>) -> Result<Self> {
        check_dim("constraint bounds", self.q.len(), bounds.len())?;
        self.bounds = Some(bounds);
        Ok(self)
    }

    pub fn offsets(&self) -> &[f64] {
        &self.d
    }

    pub fn hessians(&self) -> &[DMatrix<f64>] {
        &self.q
    }
}

impl ConstraintOracle for QuadraticConstraints {
    fn dim(&self) -> usize {
        self.c.first().map_or(0, |c| c.len())
    }

    fn count(&self) -> usize {
        self.q.len()
    }

    fn values(&self, x: &Vector) -> Vector {
        Vector::from_iterator(
            self.count(),
            self.q
                .iter()
                .zip(&self.c)
                .zip(&self.d)
                .map(|((qj, cj), dj)| 0.5 * x.dot(&(qj * x)) + cj.dot(x) + dj),
        )
    }

    fn jacobian_transpose_apply(&self, x: &Vector, z: &Vector) -> Vector {
        let mut out = Vector::zeros(x.len());
        for (j, zj) in z.iter().enumerate() {
            if *zj != 0.0 {
                out.axpy(*zj, &self.per_constraint_gradient(x, j), 1.0);
            }
        }
        out
    }

    fn per_constraint_gradient(&self, x: &Vector, i: usize) -> Vector {
        &self.q[i] * x + &self.c[i]
    }

    fn values_and_weighted_gradient(
        &self,
        x: &Vector,
        weights: &mut dyn FnMut(&Vector) -> Vector,
    ) -> (Vector, Vector) {
        let grads: Vec<Vector> = (0..self.count())
            .map(|j| self.per_constraint_gradient(x, j))
            .collect();
        let qx_terms = self.q.iter().zip(&self.c).zip(&self.d).zip(&grads);
        let fvals = Vector::from_iterator(
            self.count(),
            // 0.5 x^T Q x + c^T x = 0.5 x^T (Qx + c) + 0.5 c^T x
            qx_terms.map(|(((_, cj), dj), gj)| 0.5 * x.dot(gj) + 0.5 * cj.dot(x) + dj),
        );
        let w = weights(&fvals);
        let mut out = Vector::zeros(x.len());
        for (wj, gj) in w.iter().zip(&grads) {
            if *wj != 0.0 {
                out.axpy(*wj, gj, 1.0);
            }
        }
        (fvals, out)
    }

    fn lipschitz_hints(&self) -> Option<Vec<f64>> {
        Some(self.lipschitz.clone())
    }

    fn bound_hints(&self) -> Option<Vec<f64>> {
        self.bounds.clone()
    }
}

/// Dense `A x = b`.
#[derive(Debug, Clone)]
pub struct DenseAffine {
    a: DMatrix<f64>,
    b: Vector,
}

impl DenseAffine {
    pub fn new(a: DMatrix<f64>, b: Vector) -> Result<Self> {
        check_dim("affine rhs", a.nrows(), b.len())?;
        Ok(Self { a, b })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }
}

impl AffineBlock for DenseAffine {
    fn dim(&self) -> usize {
        self.a.ncols()
    }

    fn rows(&self) -> usize {
        self.a.nrows()
    }

    fn apply(&self, x: &Vector) -> Vector {
        &self.a * x
    }

    fn apply_transpose(&self, v: &Vector) -> Vector {
        self.a.tr_mul(v)
    }

    fn rhs(&self) -> &Vector {
        &self.b
    }
}
