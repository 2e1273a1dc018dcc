//! Quadrature rules on the unit interval and on triangles.
//!
//! Nodes are computed at run time: Golub–Welsch eigenvalue solves for the
//! Jacobi matrices of the Legendre and Jacobi(1,1) weights, followed by a few
//! Newton steps on the Legendre recurrence to recover full precision.
//! Interval rules live on `[0, 1]` with weights summing to one, so an edge
//! integral is `|e| Σ wᵢ f(a + sᵢ (b − a))`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::mesh::CellGeometry;
use crate::{Error, Point, Result};

/// Highest polynomial exactness supported by [`triangle_rule`].
pub const MAX_TRIANGLE_EXACTNESS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    exactness: usize,
}

impl EdgeRule {
    /// Builds a rule from raw parts. Used by tests that need a deliberately
    /// perturbed rule.
    pub fn from_parts(nodes: Vec<f64>, weights: Vec<f64>, exactness: usize) -> Self {
        assert_eq!(nodes.len(), weights.len());
        Self {
            nodes,
            weights,
            exactness,
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Highest polynomial degree integrated exactly.
    pub fn exactness(&self) -> usize {
        self.exactness
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫₀¹ f(s) ds` approximated by the rule.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&s, &w)| w * f(s))
            .sum()
    }

    /// Iterates over `(parameter, weight)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Legendre polynomial `P_n(x)` together with `P_{n−1}(x)`.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut prev, mut cur) = (1.0, x);
    for j in 1..n {
        let j = j as f64;
        let next = ((2.0 * j + 1.0) * x * cur - j * prev) / (j + 1.0);
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// `P_n'(x)` for |x| < 1.
fn legendre_derivative(n: usize, x: f64) -> f64 {
    let (p, q) = legendre_pair(n, x);
    n as f64 * (x * p - q) / (x * x - 1.0)
}

/// Eigenvalues (ascending) of the symmetric tridiagonal matrix with zero
/// diagonal and the given off-diagonal.
fn symmetric_tridiagonal_eigenvalues(offdiag: &[f64]) -> Vec<f64> {
    let n = offdiag.len() + 1;
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for (i, &b) in offdiag.iter().enumerate() {
        jacobi[(i, i + 1)] = b;
        jacobi[(i + 1, i)] = b;
    }
    let mut values: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| a.total_cmp(b));
    values
}

/// Mirrors the upper half of nodes on `[-1, 1]` onto the lower half so the
/// rule is exactly symmetric.
fn symmetrize(nodes: &mut [f64]) {
    let n = nodes.len();
    for i in 0..n / 2 {
        let x = 0.5 * (nodes[n - 1 - i] - nodes[i]);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
}

/// Maps a symmetric rule on `[-1, 1]` to `[0, 1]`, keeping `s_i + s_{n−1−i} = 1`
/// exact in floating point.
fn to_unit_interval(nodes: &[f64], weights: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = nodes.len();
    let mut s = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        s[i] = 0.5 * (1.0 + nodes[i]);
        s[n - 1 - i] = 1.0 - s[i];
    }
    if n % 2 == 1 {
        s[n / 2] = 0.5;
    }
    let w = weights.iter().map(|w| 0.5 * w).collect();
    (s, w)
}

/// Gauss–Legendre rule with `n ≥ 1` nodes on `[0, 1]`, exact to degree `2n − 1`.
pub fn gauss_legendre(n: usize) -> EdgeRule {
    assert!(n >= 1, "Gauss–Legendre needs at least one node");
    let mut x = if n == 1 {
        vec![0.0]
    } else {
        let off: Vec<f64> = (1..n)
            .map(|j| {
                let j = j as f64;
                j / (4.0 * j * j - 1.0).sqrt()
            })
            .collect();
        symmetric_tridiagonal_eigenvalues(&off)
    };
    for xi in x.iter_mut() {
        for _ in 0..3 {
            let (p, _) = legendre_pair(n, *xi);
            *xi -= p / legendre_derivative(n, *xi);
        }
    }
    symmetrize(&mut x);
    let w: Vec<f64> = x
        .iter()
        .map(|&xi| {
            let d = legendre_derivative(n, xi);
            2.0 / ((1.0 - xi * xi) * d * d)
        })
        .collect();
    let (nodes, weights) = to_unit_interval(&x, &w);
    EdgeRule {
        nodes,
        weights,
        exactness: 2 * n - 1,
    }
}

/// Gauss–Lobatto rule with `k + 1` nodes on `[0, 1]` (`k ≥ 1`), exact to
/// degree `2k − 1`. The endpoints are nodes.
pub fn gauss_lobatto(k: usize) -> EdgeRule {
    assert!(k >= 1, "Gauss–Lobatto needs k ≥ 1");
    let n = k + 1;
    let m = n - 1; // interior nodes are the roots of P_m'
    let mut x = vec![-1.0];
    if m >= 2 {
        let interior = if m == 2 {
            vec![0.0]
        } else {
            // Jacobi matrix of the (1 − x²) weight
            let off: Vec<f64> = (1..m - 1)
                .map(|j| {
                    let j = j as f64;
                    (j * (j + 2.0) / ((2.0 * j + 1.0) * (2.0 * j + 3.0))).sqrt()
                })
                .collect();
            symmetric_tridiagonal_eigenvalues(&off)
        };
        for mut xi in interior {
            for _ in 0..3 {
                let (p, _) = legendre_pair(m, xi);
                let d1 = legendre_derivative(m, xi);
                let d2 = (2.0 * xi * d1 - (m * (m + 1)) as f64 * p) / (1.0 - xi * xi);
                xi -= d1 / d2;
            }
            x.push(xi);
        }
    }
    x.push(1.0);
    symmetrize(&mut x);
    let scale = 2.0 / (n * (n - 1)) as f64;
    let w: Vec<f64> = x
        .iter()
        .map(|&xi| {
            let (p, _) = legendre_pair(m, xi);
            scale / (p * p)
        })
        .collect();
    let (nodes, weights) = to_unit_interval(&x, &w);
    EdgeRule {
        nodes,
        weights,
        exactness: 2 * k - 1,
    }
}

/// A rule on a triangle in barycentric coordinates; weights sum to one so
/// integrals are `area · Σ wᵢ f(xᵢ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleRule {
    barycentric: Vec<[f64; 3]>,
    weights: Vec<f64>,
    exactness: usize,
}

impl TriangleRule {
    pub fn barycentric(&self) -> &[[f64; 3]] {
        &self.barycentric
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn exactness(&self) -> usize {
        self.exactness
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Physical quadrature points and weights (scaled by the triangle area)
    /// on the triangle `tri`.
    pub fn map<'a>(&'a self, tri: &'a [Point; 3]) -> impl Iterator<Item = (Point, f64)> + 'a {
        let area = 0.5 * (tri[1] - tri[0]).perp(&(tri[2] - tri[0]));
        self.barycentric.iter().zip(&self.weights).map(move |(l, &w)| {
            let p = Point::from(
                tri[0].coords * l[0] + tri[1].coords * l[1] + tri[2].coords * l[2],
            );
            (p, w * area)
        })
    }
}

/// Collapsed-coordinate (Duffy) product rule exact for all polynomials of
/// total degree `≤ exactness` on a triangle.
pub fn triangle_rule(exactness: usize) -> Result<TriangleRule> {
    if exactness > MAX_TRIANGLE_EXACTNESS {
        return Err(Error::QuadratureDegree {
            requested: exactness,
            max: MAX_TRIANGLE_EXACTNESS,
        });
    }
    // λ₁ = u(1 − v), λ₂ = v with Jacobian (1 − v): degree d in u, d + 1 in v.
    let along = gauss_legendre((exactness + 2).div_ceil(2));
    let collapse = gauss_legendre((exactness + 3).div_ceil(2));
    let mut barycentric = Vec::with_capacity(along.len() * collapse.len());
    let mut weights = Vec::with_capacity(along.len() * collapse.len());
    for (v, wv) in collapse.iter() {
        for (u, wu) in along.iter() {
            let l1 = u * (1.0 - v);
            let l2 = v;
            barycentric.push([1.0 - l1 - l2, l1, l2]);
            weights.push(2.0 * wu * wv * (1.0 - v));
        }
    }
    Ok(TriangleRule {
        barycentric,
        weights,
        exactness,
    })
}

/// `∫_K f dx` over a mesh cell, summing a triangle rule of the requested
/// exactness over the cell's triangulation.
pub fn integrate_cell(
    cell: &CellGeometry,
    integrand: impl Fn(Point) -> f64,
    exactness: usize,
) -> Result<f64> {
    let rule = triangle_rule(exactness)?;
    Ok(integrate_with(cell, &rule, integrand))
}

/// Same as [`integrate_cell`] with a prebuilt rule.
pub fn integrate_with(
    cell: &CellGeometry,
    rule: &TriangleRule,
    integrand: impl Fn(Point) -> f64,
) -> f64 {
    cell.triangles()
        .iter()
        .map(|tri| rule.map(tri).map(|(p, w)| w * integrand(p)).sum::<f64>())
        .sum()
}
