//! Exact solutions and data of the manufactured test problems.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::Matrix2;

use crate::assembly::{BoundaryData, ScalarFn};
use crate::mesh::Domain;
use crate::{Error, Point, Result, Vector};

/// A smooth function with first and second derivatives.
pub trait ScalarField: Send + Sync {
    fn value(&self, p: Point) -> f64;
    fn gradient(&self, p: Point) -> Vector;
    fn hessian(&self, p: Point) -> Matrix2<f64>;
}

/// `Σ c_ab x^a y^b` in global coordinates.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Polynomial {
    terms: BTreeMap<(usize, usize), f64>,
}

impl Polynomial {
    pub fn new(terms: impl IntoIterator<Item = ((usize, usize), f64)>) -> Self {
        let mut p = Self::default();
        for (e, c) in terms {
            *p.terms.entry(e).or_insert(0.0) += c;
        }
        p
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|(a, b)| a + b).max().unwrap_or(0)
    }

    pub fn derivative(&self, px: usize, py: usize) -> Self {
        let falling = |n: usize, p: usize| (0..p).map(|i| (n - i) as f64).product::<f64>();
        Self::new(
            self.terms
                .iter()
                .filter(|(&(a, b), _)| a >= px && b >= py)
                .map(|(&(a, b), &c)| ((a - px, b - py), c * falling(a, px) * falling(b, py))),
        )
    }

    pub fn eval(&self, p: Point) -> f64 {
        self.terms
            .iter()
            .map(|(&(a, b), &c)| c * p.x.powi(a as i32) * p.y.powi(b as i32))
            .sum()
    }

    pub fn laplacian(&self) -> Self {
        let mut l = self.derivative(2, 0);
        for (e, c) in self.derivative(0, 2).terms {
            *l.terms.entry(e).or_insert(0.0) += c;
        }
        l
    }
}

impl ScalarField for Polynomial {
    fn value(&self, p: Point) -> f64 {
        self.eval(p)
    }

    fn gradient(&self, p: Point) -> Vector {
        Vector::new(self.derivative(1, 0).eval(p), self.derivative(0, 1).eval(p))
    }

    fn hessian(&self, p: Point) -> Matrix2<f64> {
        let xy = self.derivative(1, 1).eval(p);
        Matrix2::new(self.derivative(2, 0).eval(p), xy, xy, self.derivative(0, 2).eval(p))
    }
}

/// `ε (e^{−x/ε} + e^{−y/ε}) − x² y`.
#[derive(Debug, Clone, Copy)]
pub struct CornerLayer {
    pub epsilon: f64,
}

impl ScalarField for CornerLayer {
    fn value(&self, p: Point) -> f64 {
        let e = self.epsilon;
        e * ((-p.x / e).exp() + (-p.y / e).exp()) - p.x * p.x * p.y
    }

    fn gradient(&self, p: Point) -> Vector {
        let e = self.epsilon;
        Vector::new(-(-p.x / e).exp() - 2.0 * p.x * p.y, -(-p.y / e).exp() - p.x * p.x)
    }

    fn hessian(&self, p: Point) -> Matrix2<f64> {
        let e = self.epsilon;
        let xy = -2.0 * p.x;
        Matrix2::new((-p.x / e).exp() / e - 2.0 * p.y, xy, xy, (-p.y / e).exp() / e)
    }
}

/// One factor `g(t) = e^{sin πt} − 1 − πε (cosh(1/2ε) − cosh((2t − 1)/2ε)) / sinh(1/2ε)`
/// of the tensor-product layer solution, with its first four derivatives.
///
/// The hyperbolic ratios are evaluated as exponentials of differences so
/// that tiny `ε` does not overflow.
#[derive(Debug, Clone, Copy)]
pub struct LayerProfile {
    pub epsilon: f64,
}

impl LayerProfile {
    /// `[g, g′, g″, g‴, g⁗]` at `t`.
    pub fn derivatives(&self, t: f64) -> [f64; 5] {
        let e = self.epsilon;
        let a = 0.5 / e;
        let b = (2.0 * t - 1.0) * a;
        let damp = 1.0 - (-2.0 * a).exp();
        let decay = (b.abs() - a).exp();
        let cosh_ratio = decay * (1.0 + (-2.0 * b.abs()).exp()) / damp;
        let sinh_ratio = b.signum() * decay * (1.0 - (-2.0 * b.abs()).exp()) / damp;
        let coth = (1.0 + (-2.0 * a).exp()) / damp;

        let (s, c) = (PI * t).sin_cos();
        let phi = s.exp();
        let phi_d = [
            phi,
            PI * c * phi,
            PI.powi(2) * (c * c - s) * phi,
            PI.powi(3) * c * (c * c - 3.0 * s - 1.0) * phi,
            PI.powi(4) * (c.powi(4) - 6.0 * c * c * s - 4.0 * c * c + 3.0 * s * s + s) * phi,
        ];
        [
            phi_d[0] - 1.0 - PI * e * (coth - cosh_ratio),
            phi_d[1] + PI * sinh_ratio,
            phi_d[2] + PI * cosh_ratio / e,
            phi_d[3] + PI * sinh_ratio / (e * e),
            phi_d[4] + PI * cosh_ratio / (e * e * e),
        ]
    }

    /// `ε² g⁗ − g″`, in which the layer parts cancel exactly.
    pub fn operator(&self, t: f64) -> f64 {
        let (s, c) = (PI * t).sin_cos();
        let phi = s.exp();
        let e2 = self.epsilon * self.epsilon;
        e2 * PI.powi(4) * (c.powi(4) - 6.0 * c * c * s - 4.0 * c * c + 3.0 * s * s + s) * phi
            - PI.powi(2) * (c * c - s) * phi
    }
}

/// `g(x) g(y)` with `g` a [`LayerProfile`].
#[derive(Debug, Clone, Copy)]
pub struct TensorLayer {
    pub profile: LayerProfile,
}

impl ScalarField for TensorLayer {
    fn value(&self, p: Point) -> f64 {
        self.profile.derivatives(p.x)[0] * self.profile.derivatives(p.y)[0]
    }

    fn gradient(&self, p: Point) -> Vector {
        let (gx, gy) = (self.profile.derivatives(p.x), self.profile.derivatives(p.y));
        Vector::new(gx[1] * gy[0], gx[0] * gy[1])
    }

    fn hessian(&self, p: Point) -> Matrix2<f64> {
        let (gx, gy) = (self.profile.derivatives(p.x), self.profile.derivatives(p.y));
        let xy = gx[1] * gy[1];
        Matrix2::new(gx[2] * gy[0], xy, xy, gx[0] * gy[2])
    }
}

/// `sin(πx) sin(πy)`.
#[derive(Debug, Clone, Copy)]
pub struct SineProduct;

impl ScalarField for SineProduct {
    fn value(&self, p: Point) -> f64 {
        (PI * p.x).sin() * (PI * p.y).sin()
    }

    fn gradient(&self, p: Point) -> Vector {
        let (sx, cx) = (PI * p.x).sin_cos();
        let (sy, cy) = (PI * p.y).sin_cos();
        Vector::new(PI * cx * sy, PI * sx * cy)
    }

    fn hessian(&self, p: Point) -> Matrix2<f64> {
        let (sx, cx) = (PI * p.x).sin_cos();
        let (sy, cy) = (PI * p.y).sin_cos();
        let xy = PI * PI * cx * cy;
        Matrix2::new(-PI * PI * sx * sy, xy, xy, -PI * PI * sx * sy)
    }
}

struct Scaled {
    inner: Arc<dyn ScalarField>,
    factor: f64,
}

impl ScalarField for Scaled {
    fn value(&self, p: Point) -> f64 {
        self.factor * self.inner.value(p)
    }

    fn gradient(&self, p: Point) -> Vector {
        self.inner.gradient(p) * self.factor
    }

    fn hessian(&self, p: Point) -> Matrix2<f64> {
        self.inner.hessian(p) * self.factor
    }
}

/// A test problem with known reference solution.
#[derive(Clone)]
pub struct ManufacturedCase {
    pub name: String,
    pub epsilon: f64,
    /// Function the discrete solution is measured against.
    pub reference: Arc<dyn ScalarField>,
    pub rhs: ScalarFn,
    pub boundary: BoundaryData,
    pub domain: Domain,
    /// Suggested polynomial degree.
    pub degree: usize,
}

impl std::fmt::Debug for ManufacturedCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ManufacturedCase")
            .field("name", &self.name)
            .field("epsilon", &self.epsilon)
            .field("domain", &self.domain)
            .field("degree", &self.degree)
            .finish_non_exhaustive()
    }
}

fn boundary_from(field: Arc<dyn ScalarField>) -> BoundaryData {
    let value = field.clone();
    BoundaryData::new(
        Arc::new(move |p| value.value(p)),
        Arc::new(move |p, n| field.gradient(p).dot(&n)),
    )
}

impl ManufacturedCase {
    /// Case whose data and boundary values all come from `solution`.
    pub fn from_solution(
        name: impl Into<String>,
        epsilon: f64,
        solution: Arc<dyn ScalarField>,
        rhs: ScalarFn,
        domain: Domain,
        degree: usize,
    ) -> Self {
        Self {
            name: name.into(),
            epsilon,
            boundary: boundary_from(solution.clone()),
            reference: solution,
            rhs,
            domain,
            degree,
        }
    }

    /// The same problem with solution, data and reference multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let scale = |g: &Option<ScalarFn>| {
            g.clone().map(|g| -> ScalarFn { Arc::new(move |p| factor * g(p)) })
        };
        let rhs = self.rhs.clone();
        let flux = self.boundary.normal_derivative.clone();
        Self {
            name: self.name.clone(),
            epsilon: self.epsilon,
            reference: Arc::new(Scaled {
                inner: self.reference.clone(),
                factor,
            }),
            rhs: Arc::new(move |p| factor * rhs(p)),
            boundary: BoundaryData {
                dirichlet: scale(&self.boundary.dirichlet),
                normal_derivative: flux.map(|g| -> crate::assembly::FluxFn {
                    Arc::new(move |p, n| factor * g(p, n))
                }),
            },
            domain: self.domain.clone(),
            degree: self.degree,
        }
    }
}

/// Example problems 1 to 3.
///
/// 1. corner layer `ε(e^{−x/ε} + e^{−y/ε}) − x²y` on the unit square with `f = 2y`;
/// 2. tensor-product layer `g(x) g(y)` on the L-shaped domain with `k = 3`;
/// 3. `f = 2π² sin(πx) sin(πy)` with clamped data, measured against the
///    reduced solution `u⁰ = sin(πx) sin(πy)`.
pub fn example_case(id: u8, epsilon: f64) -> Result<ManufacturedCase> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 1], got {epsilon}"
        )));
    }
    match id {
        1 => Ok(ManufacturedCase::from_solution(
            "example-1",
            epsilon,
            Arc::new(CornerLayer { epsilon }),
            Arc::new(|p: Point| 2.0 * p.y),
            Domain::unit_square(),
            2,
        )),
        2 => {
            let profile = LayerProfile { epsilon };
            let rhs = move |p: Point| {
                let (gx, gy) = (profile.derivatives(p.x), profile.derivatives(p.y));
                profile.operator(p.x) * gy[0]
                    + profile.operator(p.y) * gx[0]
                    + 2.0 * epsilon * epsilon * gx[2] * gy[2]
            };
            Ok(ManufacturedCase::from_solution(
                "example-2",
                epsilon,
                Arc::new(TensorLayer { profile }),
                Arc::new(rhs),
                Domain::l_shape(),
                3,
            ))
        }
        3 => Ok(ManufacturedCase {
            name: "example-3".into(),
            epsilon,
            reference: Arc::new(SineProduct),
            rhs: Arc::new(|p: Point| 2.0 * PI * PI * SineProduct.value(p)),
            boundary: BoundaryData::homogeneous(),
            domain: Domain::unit_square(),
            degree: 2,
        }),
        other => Err(Error::InvalidParameter(format!(
            "unknown example {other}; expected 1, 2 or 3"
        ))),
    }
}

/// Problem with exact solution `q`, data `f = ε²Δ²q − Δq` and boundary data
/// taken from `q`.
pub fn polynomial_case(q: Polynomial, epsilon: f64, domain: Domain, degree: usize) -> ManufacturedCase {
    let lap = q.laplacian();
    let bilap = lap.laplacian();
    let rhs = move |p: Point| epsilon * epsilon * bilap.eval(p) - lap.eval(p);
    ManufacturedCase::from_solution("polynomial", epsilon, Arc::new(q), Arc::new(rhs), domain, degree)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_hessian(f: &dyn ScalarField, p: Point, d: f64) -> Matrix2<f64> {
        let dx = Vector::new(d, 0.0);
        let dy = Vector::new(0.0, d);
        let gx = (f.gradient(p + dx) - f.gradient(p - dx)) / (2.0 * d);
        let gy = (f.gradient(p + dy) - f.gradient(p - dy)) / (2.0 * d);
        Matrix2::new(gx.x, gy.x, gx.y, gy.y)
    }

    #[test]
    fn example_one_values() {
        let case = example_case(1, 1e-6).unwrap();
        assert_eq!((case.rhs)(Point::new(1.0, 1.0)), 2.0);
        let g = case.boundary.dirichlet_at(Point::new(0.0, 0.0));
        assert!((g - 2e-6).abs() < 1e-21);
    }

    #[test]
    fn example_one_satisfies_the_equation() {
        let eps = 0.1;
        let u = CornerLayer { epsilon: eps };
        let d = 1e-3;
        for p in [Point::new(0.3, 0.4), Point::new(0.05, 0.7), Point::new(0.9, 0.12)] {
            let h = u.hessian(p);
            assert!((fd_hessian(&u, p, 1e-6) - h).amax() < 1e-6 * h.amax().max(1.0));
            // Δ²u by central differences of the exact Laplacian
            let lap = |q: Point| u.hessian(q).trace();
            let bilap = (lap(p + Vector::new(d, 0.0)) + lap(p - Vector::new(d, 0.0))
                + lap(p + Vector::new(0.0, d))
                + lap(p - Vector::new(0.0, d))
                - 4.0 * lap(p))
                / (d * d);
            let residual = eps * eps * bilap - lap(p) - 2.0 * p.y;
            assert!(residual.abs() < 1e-4, "{residual}");
        }
    }

    #[test]
    fn example_two_is_clamped() {
        let profile = LayerProfile { epsilon: 1e-2 };
        for t in [0.0, 1.0] {
            let g = profile.derivatives(t);
            assert!(g[0].abs() < 1e-10 && g[1].abs() < 1e-10, "{g:?}");
        }
        let case = example_case(2, 1e-2).unwrap();
        for p in [Point::new(0.0, 0.3), Point::new(0.7, 0.0), Point::new(0.2, 1.0)] {
            assert!(case.reference.value(p).abs() < 1e-10);
            assert!(case.reference.gradient(p).norm() < 1e-10);
        }
    }

    #[test]
    fn layer_profile_derivatives() {
        for eps in [0.3, 0.05] {
            let g = LayerProfile { epsilon: eps };
            let d = 1e-5;
            for t in [0.1, 0.45, 0.8] {
                let (lo, hi, mid) = (g.derivatives(t - d), g.derivatives(t + d), g.derivatives(t));
                for order in 0..4 {
                    let fd = (hi[order] - lo[order]) / (2.0 * d);
                    let scale = mid[order + 1].abs().max(1.0);
                    assert!((fd - mid[order + 1]).abs() < 1e-5 * scale, "eps={eps} t={t} order={order}");
                }
                let op = eps * eps * mid[4] - mid[2];
                assert!((op - g.operator(t)).abs() < 1e-9 * op.abs().max(1.0));
            }
        }
    }

    #[test]
    fn example_two_is_finite_for_tiny_epsilon() {
        let case = example_case(2, 1e-10).unwrap();
        for p in [Point::new(1e-12, 0.3), Point::new(0.5, 0.5), Point::new(0.25, 0.999)] {
            assert!((case.rhs)(p).is_finite());
            assert!(case.reference.hessian(p).iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn example_three_peak() {
        let case = example_case(3, 1e-8).unwrap();
        assert!(((case.rhs)(Point::new(0.5, 0.5)) - 2.0 * PI * PI).abs() < 1e-12);
        assert_eq!(case.boundary.dirichlet_at(Point::new(0.0, 0.5)), 0.0);
    }

    #[test]
    fn unknown_example_and_bad_epsilon() {
        assert!(example_case(4, 0.1).is_err());
        assert!(example_case(1, 0.0).is_err());
        assert!(example_case(1, 2.0).is_err());
    }

    #[test]
    fn polynomial_derivatives() {
        let q = Polynomial::new([((2, 1), 3.0), ((0, 3), -1.0), ((1, 0), 2.0)]);
        let p = Point::new(0.7, -0.4);
        assert_eq!(q.degree(), 3);
        assert!((fd_hessian(&q, p, 1e-5) - q.hessian(p)).amax() < 1e-8);
        // Δ(3x²y − y³ + 2x) = 6y − 6y = 0
        assert!(q.laplacian().eval(p).abs() < 1e-14);
    }
}
