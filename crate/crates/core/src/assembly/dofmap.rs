use crate::mesh::Mesh;
use crate::quadrature::gauss_lobatto;
use crate::basis::polynomial_dim;
use crate::Point;

/// Global DoF numbering: all vertices, then the `k − 1` interior nodes of
/// each edge (ordered along its stored orientation), then the moments of
/// each cell.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    degree: usize,
    n_vertices: usize,
    n_edges: usize,
    n_moments: usize,
    cell_dofs: Vec<Vec<usize>>,
    boundary: Vec<bool>,
    points: Vec<Option<Point>>,
}

impl DofMap {
    pub fn new(mesh: &Mesh, degree: usize) -> Self {
        assert!(degree >= 2, "polynomial degree must be at least 2");
        let k = degree;
        let (nv, ne, nc) = (mesh.n_vertices(), mesh.n_edges(), mesh.n_cells());
        let n_moments = polynomial_dim(k as i32 - 2);
        let n_dofs = nv + ne * (k - 1) + nc * n_moments;
        let nodes = gauss_lobatto(k);

        let mut boundary = vec![false; n_dofs];
        let mut points = vec![None; n_dofs];
        for (v, p) in mesh.vertices().iter().enumerate() {
            points[v] = Some(*p);
        }
        for (e, edge) in mesh.edges().iter().enumerate() {
            let (a, b) = mesh.edge_endpoints(e);
            for i in 1..k {
                let dof = nv + e * (k - 1) + i - 1;
                points[dof] = Some(a + (b - a) * nodes.nodes()[i]);
                boundary[dof] = edge.is_boundary();
            }
            if edge.is_boundary() {
                boundary[edge.vertices[0]] = true;
                boundary[edge.vertices[1]] = true;
            }
        }

        let mut cell_dofs = Vec::with_capacity(nc);
        for c in 0..nc {
            let cell = mesh.cell(c);
            let mut dofs = Vec::with_capacity(cell.len() * k + n_moments);
            dofs.extend_from_slice(cell);
            for r in mesh.cell_edges(c) {
                for i in 1..k {
                    let node = if r.aligned { i } else { k - i };
                    dofs.push(nv + r.edge * (k - 1) + node - 1);
                }
            }
            let first = nv + ne * (k - 1) + c * n_moments;
            dofs.extend(first..first + n_moments);
            cell_dofs.push(dofs);
        }
        Self {
            degree,
            n_vertices: nv,
            n_edges: ne,
            n_moments,
            cell_dofs,
            boundary,
            points,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n_dofs(&self) -> usize {
        self.boundary.len()
    }

    pub fn vertex_dof(&self, v: usize) -> usize {
        v
    }

    /// Interior node `node ∈ 1..k` of edge `e`, counted along its stored orientation.
    pub fn edge_dof(&self, e: usize, node: usize) -> usize {
        self.n_vertices + e * (self.degree - 1) + node - 1
    }

    pub fn moment_dof(&self, cell: usize, gamma: usize) -> usize {
        self.n_vertices + self.n_edges * (self.degree - 1) + cell * self.n_moments + gamma
    }

    /// Global indices of the local DoFs of `cell`, in local order.
    pub fn cell_dofs(&self, cell: usize) -> &[usize] {
        &self.cell_dofs[cell]
    }

    pub fn is_boundary(&self, dof: usize) -> bool {
        self.boundary[dof]
    }

    pub fn boundary_mask(&self) -> &[bool] {
        &self.boundary
    }

    /// Location of a point-value DoF; `None` for moments.
    pub fn point(&self, dof: usize) -> Option<Point> {
        self.points[dof]
    }

    pub fn free_dofs(&self) -> Vec<usize> {
        (0..self.n_dofs()).filter(|&i| !self.boundary[i]).collect()
    }
}
