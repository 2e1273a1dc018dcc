//! Polygonal meshes.
//!
//! A [`Mesh`] is immutable once built. Cells are counter-clockwise vertex
//! loops; every edge is stored once, oriented the way its lower-indexed cell
//! `K⁻` traverses it, so the stored normal `n_e` points out of `K⁻` (and out
//! of the domain on boundary edges).

mod generate;
mod geometry;
mod io;
mod quality;
mod voronoi;

use std::collections::HashMap;

pub use generate::{generate_distorted_grid, generate_rectangle_grid, Rectangle};
pub use geometry::{CellGeometry, Domain};
pub use io::{load_mesh, parse_mesh, save_mesh, write_mesh};
pub use quality::{assess_quality, MeshQualityReport, QualityThresholds};
pub use voronoi::{
    cvt_energy, generate_cvt_polygonal, lloyd_step, random_seeds, voronoi_cells,
};

use crate::{Error, Point, Result, Vector};

/// An edge with its adjacent cells. `vertices` follows the traversal direction
/// of `left` (the lower-indexed neighbour `K⁻`).
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub vertices: [usize; 2],
    pub left: usize,
    pub right: Option<usize>,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.right.is_none()
    }
}

/// A cell's reference to one of its edges. `aligned` is true when the cell
/// traverses the edge in its stored direction (always true for `K⁻`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeRef {
    pub edge: usize,
    pub aligned: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    vertices: Vec<Point>,
    cells: Vec<Vec<usize>>,
    edges: Vec<Edge>,
    cell_edges: Vec<Vec<EdgeRef>>,
    geometry: Vec<CellGeometry>,
}

impl Mesh {
    /// Validates the raw lists and builds the edge topology; see
    /// [`build_topology`].
    pub fn new(vertices: Vec<Point>, cells: Vec<Vec<usize>>) -> Result<Self> {
        build_topology(vertices, cells)
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> Point {
        self.vertices[i]
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn cell(&self, c: usize) -> &[usize] {
        &self.cells[c]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    /// Edges of cell `c` in loop order: local edge `j` joins local vertices
    /// `j` and `j + 1`.
    pub fn cell_edges(&self, c: usize) -> &[EdgeRef] {
        &self.cell_edges[c]
    }

    pub fn geometry(&self, c: usize) -> &CellGeometry {
        &self.geometry[c]
    }

    pub fn geometries(&self) -> &[CellGeometry] {
        &self.geometry
    }

    pub fn edge_endpoints(&self, e: usize) -> (Point, Point) {
        let [a, b] = self.edges[e].vertices;
        (self.vertices[a], self.vertices[b])
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let (a, b) = self.edge_endpoints(e);
        (b - a).norm()
    }

    /// Unit tangent along the stored orientation.
    pub fn edge_tangent(&self, e: usize) -> Vector {
        let (a, b) = self.edge_endpoints(e);
        (b - a).normalize()
    }

    /// Unit normal pointing from `K⁻` towards `K⁺` (outward on the boundary).
    pub fn edge_normal(&self, e: usize) -> Vector {
        let t = self.edge_tangent(e);
        Vector::new(t.y, -t.x)
    }

    /// Maximum cell diameter.
    pub fn h(&self) -> f64 {
        self.geometry.iter().map(|g| g.diameter()).fold(0.0, f64::max)
    }

    pub fn total_area(&self) -> f64 {
        self.geometry.iter().map(|g| g.area()).sum()
    }

    pub fn boundary_vertices(&self) -> Vec<bool> {
        let mut flags = vec![false; self.vertices.len()];
        for e in self.edges.iter().filter(|e| e.is_boundary()) {
            flags[e.vertices[0]] = true;
            flags[e.vertices[1]] = true;
        }
        flags
    }

    /// Index of the cell containing `p`, if any.
    pub fn locate(&self, p: Point) -> Option<usize> {
        self.geometry.iter().position(|g| g.contains(p))
    }
}

/// Builds the edge list and per-cell geometry from raw vertex and cell lists.
///
/// Edges are numbered in order of first appearance while walking cells in
/// index order, so the first cell to see an edge is its `K⁻`.
pub fn build_topology(vertices: Vec<Point>, cells: Vec<Vec<usize>>) -> Result<Mesh> {
    let nv = vertices.len();
    let mut used = vec![false; nv];
    let mut geometry = Vec::with_capacity(cells.len());
    for (c, cell) in cells.iter().enumerate() {
        if cell.len() < 3 {
            return Err(Error::DegenerateCell {
                cell: c,
                reason: format!("{} vertices", cell.len()),
            });
        }
        for &i in cell {
            if i >= nv {
                return Err(Error::VertexIndex {
                    cell: c,
                    index: i,
                    count: nv,
                });
            }
            used[i] = true;
        }
        let mut sorted = cell.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::NotSimple {
                cell: c,
                reason: "repeated vertex".into(),
            });
        }
        geometry.push(CellGeometry::new(c, cell.iter().map(|&i| vertices[i]).collect())?);
    }
    if let Some(i) = used.iter().position(|u| !u) {
        return Err(Error::UnusedVertex(i));
    }

    let mut edges: Vec<Edge> = Vec::new();
    let mut lookup: HashMap<(usize, usize), usize> = HashMap::new();
    let mut cell_edges = Vec::with_capacity(cells.len());
    for (c, cell) in cells.iter().enumerate() {
        let m = cell.len();
        let mut refs = Vec::with_capacity(m);
        for j in 0..m {
            let (a, b) = (cell[j], cell[(j + 1) % m]);
            let key = (a.min(b), a.max(b));
            match lookup.get(&key) {
                None => {
                    lookup.insert(key, edges.len());
                    refs.push(EdgeRef {
                        edge: edges.len(),
                        aligned: true,
                    });
                    edges.push(Edge {
                        vertices: [a, b],
                        left: c,
                        right: None,
                    });
                }
                Some(&e) => {
                    let edge = &mut edges[e];
                    if edge.right.is_some() {
                        return Err(Error::NonManifold { a: key.0, b: key.1 });
                    }
                    if edge.vertices != [b, a] {
                        return Err(Error::InconsistentOrientation {
                            a,
                            b,
                            first: edge.left,
                            second: c,
                        });
                    }
                    edge.right = Some(c);
                    refs.push(EdgeRef {
                        edge: e,
                        aligned: false,
                    });
                }
            }
        }
        cell_edges.push(refs);
    }

    Ok(Mesh {
        vertices,
        cells,
        edges,
        cell_edges,
        geometry,
    })
}
