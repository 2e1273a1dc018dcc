//! Dense interior penalty matrices from oracle projectors.

use ipvem::assembly::DofMap;
use ipvem::mesh::Mesh;
use nalgebra::{DMatrix, DVector};

use crate::polygon::Polygon;
use crate::projectors::{oracle_projectors, OracleProjectors};
use crate::quadrature::composite;
use crate::OracleConfig;

/// `∫_a^b f` along a segment by the composite rule of `config`.
pub fn oracle_edge_integral(
    a: ipvem::Point,
    b: ipvem::Point,
    f: impl Fn(ipvem::Point) -> f64,
    config: &OracleConfig,
) -> f64 {
    let (s, w) = composite(config.edge_order, config.edge_panels);
    let len = (b - a).norm();
    s.iter().zip(&w).map(|(s, w)| w * f(a + (b - a) * *s)).sum::<f64>() * len
}

/// Global `J₁` (with coefficient `λ`) and `J₂ + J₃` for homogeneous data,
/// in the numbering of `DofMap`.
pub fn oracle_penalty(mesh: &Mesh, k: usize, lambda: f64, config: &OracleConfig) -> (DMatrix<f64>, DMatrix<f64>) {
    let map = DofMap::new(mesh, k);
    let n = map.n_dofs();
    let ops: Vec<OracleProjectors> = (0..mesh.n_cells())
        .map(|c| {
            let poly = Polygon::new(mesh.cell(c).iter().map(|&v| mesh.vertex(v)).collect());
            oracle_projectors(&poly, k, config)
        })
        .collect();
    // `(∂_n, ∂²_nn)` of Π∇φ_i for all global i, from one cell.
    let traces = |c: usize, p: ipvem::Point, normal: nalgebra::Vector2<f64>| {
        let op = &ops[c];
        let m = &op.monomials;
        let mut dn = DVector::zeros(n);
        let mut dnn = DVector::zeros(n);
        for a in 0..m.len() {
            let g = m.derivative(a, 1, 0, p) * normal.x + m.derivative(a, 0, 1, p) * normal.y;
            let h = normal.x * normal.x * m.derivative(a, 2, 0, p)
                + 2.0 * normal.x * normal.y * m.derivative(a, 1, 1, p)
                + normal.y * normal.y * m.derivative(a, 0, 2, p);
            for (l, &dof) in map.cell_dofs(c).iter().enumerate() {
                dn[dof] += g * op.p_nabla[(a, l)];
                dnn[dof] += h * op.p_nabla[(a, l)];
            }
        }
        (dn, dnn)
    };
    let mut j1 = DMatrix::zeros(n, n);
    let mut j23 = DMatrix::zeros(n, n);
    let (qs, qw) = composite(config.edge_order, config.edge_panels);
    for (e, edge) in mesh.edges().iter().enumerate() {
        let (a, b) = mesh.edge_endpoints(e);
        let len = (b - a).norm();
        let t = (b - a) / len;
        let normal = nalgebra::Vector2::new(t.y, -t.x);
        for (s, w) in qs.iter().zip(&qw) {
            let p = a + (b - a) * *s;
            let (mut jump, mut avg) = traces(edge.left, p, normal);
            if let Some(r) = edge.right {
                let (dn, dnn) = traces(r, p, normal);
                jump -= dn;
                avg = (avg + dnn) * 0.5;
            }
            j1 += &jump * jump.transpose() * (lambda / len * w * len);
            j23 -= (&avg * jump.transpose() + &jump * avg.transpose()) * (w * len);
        }
    }
    (j1, j23)
}
