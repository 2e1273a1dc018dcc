//! Local virtual element machinery on one polygonal cell.
//!
//! Every operator acts on the local DoF vector (see [`ElementDofLayout`]) and
//! returns coefficients in the scaled monomial basis of degree `k`.

mod layout;
mod projectors;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub use layout::{dofs_of_polynomial, interpolate, DofKind, ElementDofLayout};
pub use projectors::{h1_projector, h2_projector, l2_projector, local_forms};

use crate::basis::ScaledMonomialBasis;
use crate::mesh::CellGeometry;
use crate::quadrature::{gauss_legendre, gauss_lobatto, triangle_rule, EdgeRule, TriangleRule};
use crate::{Error, Point, Result};

/// Mass matrices with a larger condition estimate are rejected.
pub const MAX_MASS_CONDITION: f64 = 1e13;

/// The quadrature rules used by every element of a given degree.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementRules {
    degree: usize,
    lobatto: EdgeRule,
    legendre: EdgeRule,
    gram: TriangleRule,
    load: TriangleRule,
}

impl ElementRules {
    pub fn new(degree: usize) -> Result<Self> {
        if degree < 2 {
            return Err(Error::InvalidParameter(format!(
                "polynomial degree k must be at least 2, got {degree}"
            )));
        }
        Self::with_lobatto(degree, gauss_lobatto(degree))
    }

    /// Uses `lobatto` in place of the Gauss–Lobatto rule (for sensitivity
    /// tests). It must have `k + 1` nodes with endpoints at 0 and 1.
    pub fn with_lobatto(degree: usize, lobatto: EdgeRule) -> Result<Self> {
        if degree < 2 {
            return Err(Error::InvalidParameter(format!(
                "polynomial degree k must be at least 2, got {degree}"
            )));
        }
        if lobatto.len() != degree + 1 {
            return Err(Error::InvalidParameter(format!(
                "edge rule has {} nodes, expected {}",
                lobatto.len(),
                degree + 1
            )));
        }
        Ok(Self {
            degree,
            lobatto,
            legendre: gauss_legendre(degree),
            gram: triangle_rule((2 * degree).max(6))?,
            load: triangle_rule(2 * degree + 6)?,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `k + 1` point Gauss–Lobatto rule; its nodes are the edge DoF points.
    pub fn lobatto(&self) -> &EdgeRule {
        &self.lobatto
    }

    /// `k` point Gauss–Legendre rule for normal-derivative edge integrals.
    pub fn legendre(&self) -> &EdgeRule {
        &self.legendre
    }

    /// Triangle rule for Gram matrices, exact to degree `max(2k, 6)`.
    pub fn gram(&self) -> &TriangleRule {
        &self.gram
    }

    /// Triangle rule for load vectors and errors, exact to degree `2k + 6`.
    pub fn load(&self) -> &TriangleRule {
        &self.load
    }
}

/// Basis, layout and Gram matrices of one cell.
#[derive(Debug, Clone)]
pub struct LocalSpace<'a> {
    pub cell: &'a CellGeometry,
    pub rules: &'a ElementRules,
    pub basis: ScaledMonomialBasis,
    pub layout: ElementDofLayout,
    /// `(m_α, m_β)_K`
    pub mass: DMatrix<f64>,
    /// `(∇m_α, ∇m_β)_K`
    pub stiffness: DMatrix<f64>,
    /// `(∇²m_α, ∇²m_β)_K`
    pub hessian: DMatrix<f64>,
}

impl<'a> LocalSpace<'a> {
    pub fn new(cell: &'a CellGeometry, rules: &'a ElementRules) -> Result<Self> {
        let k = rules.degree();
        let basis = ScaledMonomialBasis::for_cell(cell, k);
        let n = basis.len();
        let mut mass = DMatrix::zeros(n, n);
        let mut stiffness = DMatrix::zeros(n, n);
        let mut hessian = DMatrix::zeros(n, n);
        for tri in cell.triangles() {
            for (p, w) in rules.gram().map(tri) {
                let v = basis.values(p);
                let [gx, gy] = basis.gradients(p);
                let [hxx, hxy, hyy] = basis.hessians(p);
                for a in 0..n {
                    for b in 0..=a {
                        mass[(a, b)] += w * v[a] * v[b];
                        stiffness[(a, b)] += w * (gx[a] * gx[b] + gy[a] * gy[b]);
                        hessian[(a, b)] +=
                            w * (hxx[a] * hxx[b] + 2.0 * hxy[a] * hxy[b] + hyy[a] * hyy[b]);
                    }
                }
            }
        }
        for m in [&mut mass, &mut stiffness, &mut hessian] {
            m.fill_upper_triangle_with_lower_triangle();
        }
        let eig = SymmetricEigen::new(mass.clone()).eigenvalues;
        let condition = eig.max() / eig.min();
        if !(condition > 0.0 && condition < MAX_MASS_CONDITION) {
            return Err(Error::IllConditioned { cell: 0, condition });
        }
        Ok(Self {
            cell,
            rules,
            layout: ElementDofLayout::for_cell(cell, k),
            basis,
            mass,
            stiffness,
            hessian,
        })
    }

    /// `D[(i, α)] = χ_i(m_α)`.
    pub fn dof_matrix(&self) -> DMatrix<f64> {
        let (nd, nk) = (self.layout.n_dofs(), self.basis.len());
        let k = self.layout.degree();
        let mut d = DMatrix::zeros(nd, nk);
        for j in 0..self.layout.n_vertices() {
            for i in 0..k {
                let dof = self.layout.boundary_node(j, i);
                let p = layout::boundary_point(self.cell, self.rules, j, i);
                for (a, v) in self.basis.values(p).into_iter().enumerate() {
                    d[(dof, a)] = v;
                }
            }
        }
        for g in 0..self.layout.n_moments() {
            for a in 0..nk {
                d[(self.layout.moment(g), a)] = self.mass[(g, a)] / self.cell.area();
            }
        }
        d
    }
}

/// All local matrices of one cell.
#[derive(Debug, Clone)]
pub struct ElementOperators {
    pub basis: ScaledMonomialBasis,
    pub layout: ElementDofLayout,
    /// `χ_i(m_α)`, `n_K × dim ℙ_k`.
    pub d: DMatrix<f64>,
    /// Π∇ coefficients, `dim ℙ_k × n_K`.
    pub p_nabla: DMatrix<f64>,
    /// Π⁰ coefficients.
    pub p_0: DMatrix<f64>,
    /// Π^Δ coefficients.
    pub p_delta: DMatrix<f64>,
    /// Local `a_h^K` matrix (Hessian energy plus stabilization).
    pub a_loc: DMatrix<f64>,
    /// Local `b_h^K` matrix (gradient energy plus stabilization).
    pub b_loc: DMatrix<f64>,
    pub mass: DMatrix<f64>,
}

impl ElementOperators {
    /// The matrices are computed on a copy of `cell` translated to put its
    /// centroid at the origin; they only depend on the shape.
    pub fn new(cell: &CellGeometry, rules: &ElementRules) -> Result<Self> {
        let c = cell.centroid().coords;
        let centered = CellGeometry::from_polygon(cell.vertices().iter().map(|p| Point::from(p - c)).collect())?;
        let space = LocalSpace::new(&centered, rules)?;
        let d = space.dof_matrix();
        let p_nabla = h1_projector(&space)?;
        let p_0 = l2_projector(&space, &p_nabla)?;
        let p_delta = h2_projector(&space, &p_nabla)?;
        let (a_loc, b_loc) = local_forms(&space, &d, &p_nabla, &p_delta);
        Ok(Self {
            basis: ScaledMonomialBasis::new(rules.degree(), cell.centroid(), centered.diameter()),
            layout: space.layout,
            d,
            p_nabla,
            p_0,
            p_delta,
            a_loc,
            b_loc,
            mass: space.mass,
        })
    }

    pub fn n_dofs(&self) -> usize {
        self.layout.n_dofs()
    }

    /// `F[i] = ∫_K f Π⁰φ_i`, with `f` integrated by the load rule.
    pub fn load(&self, cell: &CellGeometry, rules: &ElementRules, f: impl Fn(Point) -> f64) -> DVector<f64> {
        let mut moments = DVector::zeros(self.basis.len());
        for tri in cell.triangles() {
            for (p, w) in rules.load().map(tri) {
                let fv = w * f(p);
                if fv == 0.0 {
                    continue;
                }
                for (o, m) in moments.iter_mut().zip(self.basis.values(p)) {
                    *o += fv * m;
                }
            }
        }
        self.p_0.tr_mul(&moments)
    }
}
