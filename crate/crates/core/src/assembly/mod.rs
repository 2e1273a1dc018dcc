//! Global problem: `ε² (a_h + J₁ + J₂ + J₃) + b_h` with the load `⟨f, Π⁰v⟩`.
//!
//! Essential data `u = g_D` is imposed strongly on boundary DoFs; the normal
//! derivative `∂u/∂n = g_N` enters weakly through the boundary-edge penalty
//! terms.

mod dofmap;
mod penalty;
mod solve;
mod sparse;

use std::io::Write;
use std::sync::Arc;

use nalgebra::DVector;
use rayon::prelude::*;

pub use dofmap::DofMap;
pub use penalty::{assemble_penalty, PenaltyConfig};
pub use solve::{check_positive_definite, solve, SolveMethod, SolverOptions, Solution};
pub use sparse::SparseMatrix;

use crate::element::{ElementOperators, ElementRules};
use crate::mesh::Mesh;
use crate::{Error, Point, Result, Vector};

pub type ScalarFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
/// Boundary flux data, called with the point and the outward unit normal.
pub type FluxFn = Arc<dyn Fn(Point, Vector) -> f64 + Send + Sync>;

/// Boundary data `u = g_D` and `∂u/∂n = g_N` on `∂Ω`. Missing data is zero.
#[derive(Clone, Default)]
pub struct BoundaryData {
    pub dirichlet: Option<ScalarFn>,
    pub normal_derivative: Option<FluxFn>,
}

impl BoundaryData {
    pub fn homogeneous() -> Self {
        Self::default()
    }

    pub fn new(dirichlet: ScalarFn, normal_derivative: FluxFn) -> Self {
        Self {
            dirichlet: Some(dirichlet),
            normal_derivative: Some(normal_derivative),
        }
    }

    pub fn dirichlet_at(&self, p: Point) -> f64 {
        self.dirichlet.as_ref().map_or(0.0, |g| g(p))
    }

    pub fn normal_derivative_at(&self, p: Point, n: Vector) -> f64 {
        self.normal_derivative.as_ref().map_or(0.0, |g| g(p, n))
    }
}

impl std::fmt::Debug for BoundaryData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BoundaryData")
            .field("dirichlet", &self.dirichlet.is_some())
            .field("normal_derivative", &self.normal_derivative.is_some())
            .finish()
    }
}

/// Element operators and numbering for one mesh and degree. Independent of
/// `ε`, so one instance serves every `ε` on the same mesh.
#[derive(Debug, Clone)]
pub struct Discretization {
    rules: ElementRules,
    dof_map: DofMap,
    operators: Vec<ElementOperators>,
}

impl Discretization {
    pub fn new(mesh: &Mesh, degree: usize) -> Result<Self> {
        Self::with_rules(mesh, ElementRules::new(degree)?)
    }

    pub fn with_rules(mesh: &Mesh, rules: ElementRules) -> Result<Self> {
        let operators = mesh
            .geometries()
            .par_iter()
            .enumerate()
            .map(|(c, g)| ElementOperators::new(g, &rules).map_err(|e| e.at_cell(c)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            dof_map: DofMap::new(mesh, rules.degree()),
            rules,
            operators,
        })
    }

    pub fn degree(&self) -> usize {
        self.rules.degree()
    }

    pub fn rules(&self) -> &ElementRules {
        &self.rules
    }

    pub fn dof_map(&self) -> &DofMap {
        &self.dof_map
    }

    pub fn operators(&self) -> &[ElementOperators] {
        &self.operators
    }

    pub fn operator(&self, cell: usize) -> &ElementOperators {
        &self.operators[cell]
    }

    pub fn n_dofs(&self) -> usize {
        self.dof_map.n_dofs()
    }

    /// Local DoF vector of `cell` extracted from a global vector.
    pub fn local_values(&self, cell: usize, global: &DVector<f64>) -> DVector<f64> {
        let dofs = self.dof_map.cell_dofs(cell);
        DVector::from_iterator(dofs.len(), dofs.iter().map(|&i| global[i]))
    }

    /// Global DoFs of a smooth function: point values at vertices and edge
    /// nodes, moments by the load rule of each cell.
    pub fn interpolate(&self, mesh: &Mesh, f: impl Fn(Point) -> f64 + Sync) -> DVector<f64> {
        let mut out = DVector::zeros(self.n_dofs());
        for i in 0..self.n_dofs() {
            if let Some(p) = self.dof_map.point(i) {
                out[i] = f(p);
            }
        }
        let moments: Vec<Vec<f64>> = (0..mesh.n_cells())
            .into_par_iter()
            .map(|c| {
                let g = mesh.geometry(c);
                let basis = self.operators[c].basis.with_degree(self.degree() - 2);
                let mut acc = vec![0.0; basis.len()];
                for tri in g.triangles() {
                    for (p, w) in self.rules.load().map(tri) {
                        let fv = w * f(p);
                        for (a, m) in acc.iter_mut().zip(basis.values(p)) {
                            *a += fv * m;
                        }
                    }
                }
                acc.iter().map(|a| a / g.area()).collect()
            })
            .collect();
        for (c, m) in moments.into_iter().enumerate() {
            for (g, v) in m.into_iter().enumerate() {
                out[self.dof_map.moment_dof(c, g)] = v;
            }
        }
        out
    }
}

/// Unassembled matrix entries with a right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct Contribution {
    pub n: usize,
    pub triplets: Vec<(usize, usize, f64)>,
    pub rhs: DVector<f64>,
}

impl Contribution {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            triplets: Vec::new(),
            rhs: DVector::zeros(n),
        }
    }

    pub fn append(&mut self, other: Contribution) {
        assert_eq!(self.n, other.n);
        self.triplets.extend(other.triplets);
        self.rhs += other.rhs;
    }

    pub fn matrix(&self) -> SparseMatrix {
        SparseMatrix::from_triplets(self.n, self.triplets.clone())
    }
}

/// Scatters `ε² A_K + B_K` and the loads `F_K` of every cell.
pub fn assemble_volume(
    mesh: &Mesh,
    disc: &Discretization,
    epsilon: f64,
    f: &(dyn Fn(Point) -> f64 + Sync),
) -> Contribution {
    let eps2 = epsilon * epsilon;
    let locals: Vec<_> = (0..mesh.n_cells())
        .into_par_iter()
        .map(|c| {
            let op = disc.operator(c);
            let k = &op.a_loc * eps2 + &op.b_loc;
            let load = op.load(mesh.geometry(c), disc.rules(), f);
            (k, load)
        })
        .collect();
    let mut out = Contribution::empty(disc.n_dofs());
    for (c, (k, load)) in locals.into_iter().enumerate() {
        let dofs = disc.dof_map().cell_dofs(c);
        for (i, &gi) in dofs.iter().enumerate() {
            out.rhs[gi] += load[i];
            for (j, &gj) in dofs.iter().enumerate() {
                out.triplets.push((gi, gj, k[(i, j)]));
            }
        }
    }
    out
}

/// A symmetric system with boundary DoFs already eliminated.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub matrix: SparseMatrix,
    pub rhs: DVector<f64>,
    /// DoFs not fixed by essential data.
    pub free: Vec<usize>,
    /// Penalty parameter used to build the matrix, for diagnostics.
    pub lambda: f64,
}

/// Fixes boundary DoFs to `g_D`: their rows and columns become identity rows,
/// and the eliminated columns move to the right-hand side.
pub fn apply_boundary_conditions(
    assembled: &Contribution,
    dof_map: &DofMap,
    data: &BoundaryData,
    lambda: f64,
) -> Result<LinearSystem> {
    let n = dof_map.n_dofs();
    let mut fixed = DVector::zeros(n);
    for i in (0..n).filter(|&i| dof_map.is_boundary(i)) {
        let p = dof_map.point(i).expect("boundary DoFs are point values");
        let g = data.dirichlet_at(p);
        if !g.is_finite() {
            return Err(Error::BoundaryData { x: p.x, y: p.y });
        }
        fixed[i] = g;
    }
    let mut rhs = assembled.rhs.clone();
    let mut triplets = Vec::with_capacity(assembled.triplets.len());
    let full = assembled.matrix();
    for (r, c, v) in full.triplets() {
        match (dof_map.is_boundary(r), dof_map.is_boundary(c)) {
            (false, false) => triplets.push((r, c, v)),
            (false, true) => rhs[r] -= v * fixed[c],
            _ => {}
        }
    }
    for i in (0..n).filter(|&i| dof_map.is_boundary(i)) {
        triplets.push((i, i, 1.0));
        rhs[i] = fixed[i];
    }
    Ok(LinearSystem {
        matrix: SparseMatrix::from_triplets(n, triplets),
        rhs,
        free: dof_map.free_dofs(),
        lambda,
    })
}

/// Volume and penalty assembly followed by boundary elimination.
pub fn assemble_system(
    mesh: &Mesh,
    disc: &Discretization,
    epsilon: f64,
    f: &(dyn Fn(Point) -> f64 + Sync),
    penalty: &PenaltyConfig,
    data: &BoundaryData,
) -> Result<LinearSystem> {
    let mut total = assemble_volume(mesh, disc, epsilon, f);
    total.append(assemble_penalty(mesh, disc, epsilon, penalty, data)?);
    apply_boundary_conditions(&total, disc.dof_map(), data, penalty.lambda)
}

/// Writes `row col value` lines (0-based) preceded by a `n n nnz` header.
pub fn write_coordinate(matrix: &SparseMatrix, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{} {} {}", matrix.nrows(), matrix.nrows(), matrix.nnz())?;
    for (r, c, v) in matrix.triplets() {
        writeln!(out, "{r} {c} {v:.17e}")?;
    }
    Ok(())
}
