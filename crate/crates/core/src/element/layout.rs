use nalgebra::DVector;

use super::ElementRules;
use crate::basis::{polynomial_dim, ScaledMonomialBasis};
use crate::mesh::CellGeometry;
use crate::quadrature::{triangle_rule, MAX_TRIANGLE_EXACTNESS};
use crate::{Point, Result};

/// One local degree of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DofKind {
    /// Value at local vertex `j`.
    Vertex(usize),
    /// Value at the interior Gauss–Lobatto node `node ∈ 1..k` of local edge `edge`.
    EdgePoint { edge: usize, node: usize },
    /// Scaled moment `|K|⁻¹ (m_γ, v)_K` against the scaled monomial `γ` of degree `≤ k − 2`.
    Moment(usize),
}

/// Local DoF ordering: vertex values, then `k − 1` edge values per edge in
/// loop order, then `k(k − 1)/2` interior moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ElementDofLayout {
    n_vertices: usize,
    degree: usize,
}

impl ElementDofLayout {
    pub fn new(n_vertices: usize, degree: usize) -> Self {
        Self { n_vertices, degree }
    }

    pub fn for_cell(cell: &CellGeometry, degree: usize) -> Self {
        Self::new(cell.n_vertices(), degree)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_moments(&self) -> usize {
        polynomial_dim(self.degree as i32 - 2)
    }

    pub fn n_dofs(&self) -> usize {
        self.n_vertices * self.degree + self.n_moments()
    }

    pub fn vertex(&self, j: usize) -> usize {
        j
    }

    /// Interior node `node ∈ 1..k` on local edge `edge`.
    pub fn edge_point(&self, edge: usize, node: usize) -> usize {
        debug_assert!(node >= 1 && node < self.degree);
        self.n_vertices + edge * (self.degree - 1) + node - 1
    }

    /// Node `node ∈ 0..=k` of local edge `edge`; the endpoints are vertex DoFs.
    pub fn boundary_node(&self, edge: usize, node: usize) -> usize {
        if node == 0 {
            self.vertex(edge)
        } else if node == self.degree {
            self.vertex((edge + 1) % self.n_vertices)
        } else {
            self.edge_point(edge, node)
        }
    }

    pub fn moment(&self, gamma: usize) -> usize {
        self.n_vertices * self.degree + gamma
    }

    pub fn kind(&self, dof: usize) -> DofKind {
        let nb = self.n_vertices * self.degree;
        if dof < self.n_vertices {
            DofKind::Vertex(dof)
        } else if dof < nb {
            let r = dof - self.n_vertices;
            DofKind::EdgePoint {
                edge: r / (self.degree - 1),
                node: r % (self.degree - 1) + 1,
            }
        } else {
            DofKind::Moment(dof - nb)
        }
    }

    pub fn kinds(&self) -> Vec<DofKind> {
        (0..self.n_dofs()).map(|i| self.kind(i)).collect()
    }
}

/// Position of node `node` of local edge `edge` for a Gauss–Lobatto rule.
pub(crate) fn boundary_point(cell: &CellGeometry, rules: &ElementRules, edge: usize, node: usize) -> Point {
    let (a, b) = cell.edge(edge);
    a + (b - a) * rules.lobatto().nodes()[node]
}

/// DoF values of a smooth function. Moments use a triangle rule of the given
/// exactness (capped at the largest available rule).
pub fn interpolate(
    cell: &CellGeometry,
    rules: &ElementRules,
    f: impl Fn(Point) -> f64,
    exactness: usize,
) -> Result<DVector<f64>> {
    let k = rules.degree();
    let layout = ElementDofLayout::for_cell(cell, k);
    let mut out = DVector::zeros(layout.n_dofs());
    for j in 0..layout.n_vertices() {
        out[layout.vertex(j)] = f(cell.vertices()[j]);
        for i in 1..k {
            out[layout.edge_point(j, i)] = f(boundary_point(cell, rules, j, i));
        }
    }
    let moments = ScaledMonomialBasis::for_cell(cell, k - 2);
    let rule = triangle_rule(exactness.min(MAX_TRIANGLE_EXACTNESS))?;
    let mut acc = vec![0.0; moments.len()];
    for tri in cell.triangles() {
        for (p, w) in rule.map(tri) {
            let fv = w * f(p);
            for (a, m) in acc.iter_mut().zip(moments.values(p)) {
                *a += fv * m;
            }
        }
    }
    for (g, a) in acc.iter().enumerate() {
        out[layout.moment(g)] = a / cell.area();
    }
    Ok(out)
}

/// DoF values of `Σ_α c_α m_α` for a scaled monomial basis of any degree;
/// moments are exact for degrees up to `k + 2`.
pub fn dofs_of_polynomial(
    cell: &CellGeometry,
    rules: &ElementRules,
    basis: &ScaledMonomialBasis,
    coeffs: &[f64],
) -> Result<DVector<f64>> {
    let k = rules.degree();
    let exactness = (2 * k).max(k - 2 + basis.degree());
    interpolate(cell, rules, |p| basis.eval(coeffs, p), exactness)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(ElementDofLayout::new(3, 2).n_dofs(), 7);
        assert_eq!(ElementDofLayout::new(5, 3).n_dofs(), 18);
        let quad = ElementDofLayout::new(4, 2);
        assert_eq!((quad.n_dofs(), quad.n_moments()), (9, 1));
    }

    #[test]
    fn kinds_round_trip() {
        let l = ElementDofLayout::new(5, 4);
        for (i, kind) in l.kinds().into_iter().enumerate() {
            let back = match kind {
                DofKind::Vertex(j) => l.vertex(j),
                DofKind::EdgePoint { edge, node } => l.edge_point(edge, node),
                DofKind::Moment(g) => l.moment(g),
            };
            assert_eq!(back, i);
        }
        assert_eq!(l.boundary_node(4, 4), l.vertex(0));
        assert_eq!(l.boundary_node(2, 0), l.vertex(2));
    }
}
