use super::geometry::orient;
use super::Mesh;

/// Limits a cell must respect to count as shape regular.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityThresholds {
    /// Smallest admissible angle of a triangulation triangle, in degrees.
    pub min_angle: f64,
    /// Largest admissible ratio of longest to shortest edge within a cell.
    pub max_edge_ratio: f64,
}

impl Default for QualityThresholds {
    fn default() -> Self {
        Self {
            min_angle: 10.0,
            max_edge_ratio: 20.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshQualityReport {
    /// Per cell: smallest angle (degrees) over its triangulation.
    pub min_angles: Vec<f64>,
    /// Per cell: longest over shortest edge.
    pub edge_ratios: Vec<f64>,
    pub min_angle: f64,
    pub max_edge_ratio: f64,
    /// Cells breaking at least one threshold, in increasing order.
    pub violating_cells: Vec<usize>,
}

impl MeshQualityReport {
    pub fn is_acceptable(&self) -> bool {
        self.violating_cells.is_empty()
    }
}

fn triangle_min_angle(t: &[crate::Point; 3]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..3 {
        let a = t[i];
        let u = t[(i + 1) % 3] - a;
        let v = t[(i + 2) % 3] - a;
        let angle = orient(a, t[(i + 1) % 3], t[(i + 2) % 3]).abs().atan2(u.dot(&v));
        best = best.min(angle.to_degrees());
    }
    best
}

/// Shape diagnostics over the cell triangulations. The method does not
/// require these bounds; the report only flags cells that may degrade
/// accuracy.
pub fn assess_quality(mesh: &Mesh, thresholds: QualityThresholds) -> MeshQualityReport {
    let mut min_angles = Vec::with_capacity(mesh.n_cells());
    let mut edge_ratios = Vec::with_capacity(mesh.n_cells());
    let mut violating_cells = Vec::new();
    for (c, g) in mesh.geometries().iter().enumerate() {
        let angle = g
            .triangles()
            .iter()
            .map(triangle_min_angle)
            .fold(f64::INFINITY, f64::min);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
        for j in 0..g.n_vertices() {
            let (a, b) = g.edge(j);
            let l = (b - a).norm();
            lo = lo.min(l);
            hi = hi.max(l);
        }
        let ratio = hi / lo;
        if angle < thresholds.min_angle || ratio > thresholds.max_edge_ratio {
            violating_cells.push(c);
        }
        min_angles.push(angle);
        edge_ratios.push(ratio);
    }
    MeshQualityReport {
        min_angle: min_angles.iter().copied().fold(f64::INFINITY, f64::min),
        max_edge_ratio: edge_ratios.iter().copied().fold(0.0, f64::max),
        min_angles,
        edge_ratios,
        violating_cells,
    }
}
