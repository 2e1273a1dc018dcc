//! Scaled monomials `m_α(x) = ((x − x_K)/h_K)^α` in graded lexicographic
//! order: `1, ξ, η, ξ², ξη, η², ξ³, …`.

use nalgebra::DMatrix;

use crate::mesh::CellGeometry;
use crate::Point;

/// Number of monomials of total degree at most `degree`. Negative degrees
/// give the empty space.
pub fn polynomial_dim(degree: i32) -> usize {
    if degree < 0 {
        0
    } else {
        let d = degree as usize;
        (d + 1) * (d + 2) / 2
    }
}

/// Position of `ξ^a η^b` in graded lexicographic order.
pub fn monomial_index(a: usize, b: usize) -> usize {
    let d = a + b;
    d * (d + 1) / 2 + b
}

fn falling(n: usize, p: usize) -> f64 {
    (0..p).map(|i| (n - i) as f64).product()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaledMonomialBasis {
    degree: usize,
    centroid: Point,
    diameter: f64,
    exponents: Vec<(usize, usize)>,
}

/// Partial derivatives of every basis function at a set of points.
///
/// `partials[j]` holds `∂x^(order−j) ∂y^j m_α(p_i)` at row `i`, column `α`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisTable {
    pub order: usize,
    pub partials: Vec<DMatrix<f64>>,
}

impl ScaledMonomialBasis {
    pub fn new(degree: usize, centroid: Point, diameter: f64) -> Self {
        let mut exponents = Vec::with_capacity(polynomial_dim(degree as i32));
        for d in 0..=degree {
            for b in 0..=d {
                exponents.push((d - b, b));
            }
        }
        Self {
            degree,
            centroid,
            diameter,
            exponents,
        }
    }

    pub fn for_cell(cell: &CellGeometry, degree: usize) -> Self {
        Self::new(degree, cell.centroid(), cell.diameter())
    }

    /// The same centroid and scaling with a different degree.
    pub fn with_degree(&self, degree: usize) -> Self {
        Self::new(degree, self.centroid, self.diameter)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn centroid(&self) -> Point {
        self.centroid
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn exponents(&self) -> &[(usize, usize)] {
        &self.exponents
    }

    /// Scaled local coordinates `(ξ, η)` of `p`.
    pub fn local(&self, p: Point) -> (f64, f64) {
        let d = (p - self.centroid) / self.diameter;
        (d.x, d.y)
    }

    /// Writes `∂x^px ∂y^py m_α(p)` for every `α` into `out`.
    pub fn partial_into(&self, p: Point, px: usize, py: usize, out: &mut [f64]) {
        let (xi, eta) = self.local(p);
        let scale = self.diameter.powi(-((px + py) as i32));
        for (o, &(a, b)) in out.iter_mut().zip(&self.exponents) {
            *o = if a < px || b < py {
                0.0
            } else {
                falling(a, px)
                    * falling(b, py)
                    * xi.powi((a - px) as i32)
                    * eta.powi((b - py) as i32)
                    * scale
            };
        }
    }

    pub fn partial(&self, p: Point, px: usize, py: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.partial_into(p, px, py, &mut out);
        out
    }

    pub fn values(&self, p: Point) -> Vec<f64> {
        self.partial(p, 0, 0)
    }

    /// `(∂x m_α, ∂y m_α)` for every `α`.
    pub fn gradients(&self, p: Point) -> [Vec<f64>; 2] {
        [self.partial(p, 1, 0), self.partial(p, 0, 1)]
    }

    /// `(∂xx, ∂xy, ∂yy)` for every `α`.
    pub fn hessians(&self, p: Point) -> [Vec<f64>; 3] {
        [self.partial(p, 2, 0), self.partial(p, 1, 1), self.partial(p, 0, 2)]
    }

    /// `(∂xxx, ∂xxy, ∂xyy, ∂yyy)` for every `α`.
    pub fn third_derivatives(&self, p: Point) -> [Vec<f64>; 4] {
        [
            self.partial(p, 3, 0),
            self.partial(p, 2, 1),
            self.partial(p, 1, 2),
            self.partial(p, 0, 3),
        ]
    }

    /// All partial derivatives of the given order at every point.
    pub fn eval_basis(&self, points: &[Point], order: usize) -> BasisTable {
        assert!(order <= 3, "derivatives above order 3 are not tabulated");
        let n = self.len();
        let mut partials = vec![DMatrix::zeros(points.len(), n); order + 1];
        let mut row = vec![0.0; n];
        for (j, table) in partials.iter_mut().enumerate() {
            for (i, &p) in points.iter().enumerate() {
                self.partial_into(p, order - j, j, &mut row);
                for (a, v) in row.iter().enumerate() {
                    table[(i, a)] = *v;
                }
            }
        }
        BasisTable { order, partials }
    }

    /// Matrix `L` with `Δ m_α = Σ_γ L[(α, γ)] m_γ`, where `γ` runs over the
    /// monomials of degree at most `degree − 2`.
    pub fn laplacian_matrix(&self) -> DMatrix<f64> {
        let rows = self.len();
        let cols = polynomial_dim(self.degree as i32 - 2);
        let h2 = self.diameter * self.diameter;
        let mut l = DMatrix::zeros(rows, cols);
        for (alpha, &(a, b)) in self.exponents.iter().enumerate() {
            if a >= 2 {
                l[(alpha, monomial_index(a - 2, b))] += (a * (a - 1)) as f64 / h2;
            }
            if b >= 2 {
                l[(alpha, monomial_index(a, b - 2))] += (b * (b - 1)) as f64 / h2;
            }
        }
        l
    }

    /// Evaluates `Σ_α c_α ∂x^px ∂y^py m_α(p)`.
    pub fn eval_partial(&self, coeffs: &[f64], p: Point, px: usize, py: usize) -> f64 {
        self.partial(p, px, py).iter().zip(coeffs).map(|(m, c)| m * c).sum()
    }

    pub fn eval(&self, coeffs: &[f64], p: Point) -> f64 {
        self.eval_partial(coeffs, p, 0, 0)
    }
}
