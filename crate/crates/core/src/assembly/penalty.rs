use nalgebra::{DMatrix, DVector, RowDVector};
use rayon::prelude::*;

use super::{BoundaryData, Contribution, Discretization};
use crate::element::ElementOperators;
use crate::mesh::Mesh;
use crate::quadrature::gauss_legendre;
use crate::{Error, Point, Result, Vector};

/// Interior penalty parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyConfig {
    /// Penalty coefficient `λ_e`, the same on every edge.
    pub lambda: f64,
    /// Gauss–Legendre nodes per edge; `None` means `k`, exact to degree `2k − 1`.
    pub edge_nodes: Option<usize>,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            edge_nodes: None,
        }
    }
}

impl PenaltyConfig {
    pub fn with_lambda(lambda: f64) -> Self {
        Self {
            lambda,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "penalty lambda must be positive, got {}",
                self.lambda
            )));
        }
        if self.edge_nodes == Some(0) {
            return Err(Error::InvalidParameter("edge rule needs at least one node".into()));
        }
        Ok(())
    }
}

/// Rows mapping local DoFs to `∂_n Π∇v` and `∂²_nn Π∇v` at `p`.
pub(crate) fn normal_rows(op: &ElementOperators, p: Point, n: Vector) -> (RowDVector<f64>, RowDVector<f64>) {
    let [gx, gy] = op.basis.gradients(p);
    let [hxx, hxy, hyy] = op.basis.hessians(p);
    let nd = op.n_dofs();
    let mut dn = RowDVector::zeros(nd);
    let mut dnn = RowDVector::zeros(nd);
    for a in 0..op.basis.len() {
        let first = gx[a] * n.x + gy[a] * n.y;
        let second = n.x * n.x * hxx[a] + 2.0 * n.x * n.y * hxy[a] + n.y * n.y * hyy[a];
        let row = op.p_nabla.row(a);
        if first != 0.0 {
            dn += row * first;
        }
        if second != 0.0 {
            dnn += row * second;
        }
    }
    (dn, dnn)
}

struct EdgeBlock {
    dofs: Vec<usize>,
    matrix: DMatrix<f64>,
    rhs: DVector<f64>,
}

/// `ε² (J₁ + J₂ + J₃)` with
///
/// ```text
/// J₁(v, w) =  Σ_e λ/|e| ∫_e [∂_n Π∇v] [∂_n Π∇w]
/// J₂(v, w) = −Σ_e ∫_e {∂²_nn Π∇v} [∂_n Π∇w]
/// J₃(v, w) = J₂(w, v)
/// ```
///
/// The normal of an interior edge points out of its lower-indexed cell, where
/// `[w] = w⁻ − w⁺` and `{w} = (w⁻ + w⁺)/2`. On boundary edges `[w] = {w} = w`
/// and the data `g_N` is lifted to the right-hand side, since the jump of the
/// exact solution there is `g_N` rather than zero.
pub fn assemble_penalty(
    mesh: &Mesh,
    disc: &Discretization,
    epsilon: f64,
    config: &PenaltyConfig,
    data: &BoundaryData,
) -> Result<Contribution> {
    config.validate()?;
    let eps2 = epsilon * epsilon;
    let rule = gauss_legendre(config.edge_nodes.unwrap_or(disc.degree()));
    let map = disc.dof_map();

    let blocks: Vec<EdgeBlock> = (0..mesh.n_edges())
        .into_par_iter()
        .map(|e| {
            let edge = mesh.edge(e);
            let (a, b) = mesh.edge_endpoints(e);
            let len = (b - a).norm();
            let n = mesh.edge_normal(e);
            let minus = disc.operator(edge.left);
            let plus = edge.right.map(|r| disc.operator(r));

            let mut dofs = map.cell_dofs(edge.left).to_vec();
            let n_minus = dofs.len();
            if let Some(r) = edge.right {
                dofs.extend_from_slice(map.cell_dofs(r));
            }
            let size = dofs.len();
            let mut matrix = DMatrix::zeros(size, size);
            let mut rhs = DVector::zeros(size);
            let mut jump = DVector::zeros(size);
            let mut avg = DVector::zeros(size);
            for (s, w) in rule.iter() {
                let p = a + (b - a) * s;
                let (g, h) = normal_rows(minus, p, n);
                let weight = eps2 * len * w;
                match plus {
                    Some(op) => {
                        let (gp, hp) = normal_rows(op, p, n);
                        jump.rows_mut(0, n_minus).copy_from(&g.transpose());
                        jump.rows_mut(n_minus, size - n_minus).copy_from(&(-gp.transpose()));
                        avg.rows_mut(0, n_minus).copy_from(&(h.transpose() * 0.5));
                        avg.rows_mut(n_minus, size - n_minus).copy_from(&(hp.transpose() * 0.5));
                    }
                    None => {
                        jump.copy_from(&g.transpose());
                        avg.copy_from(&h.transpose());
                        let gn = data.normal_derivative_at(p, n);
                        if gn != 0.0 {
                            rhs += (&jump * (config.lambda / len) - &avg) * (weight * gn);
                        }
                    }
                }
                matrix += (&jump * jump.transpose()) * (weight * config.lambda / len);
                matrix -= (&avg * jump.transpose() + &jump * avg.transpose()) * weight;
            }
            EdgeBlock { dofs, matrix, rhs }
        })
        .collect();

    let mut out = Contribution::empty(disc.n_dofs());
    for block in blocks {
        for (i, &gi) in block.dofs.iter().enumerate() {
            out.rhs[gi] += block.rhs[i];
            for (j, &gj) in block.dofs.iter().enumerate() {
                out.triplets.push((gi, gj, block.matrix[(i, j)]));
            }
        }
    }
    Ok(out)
}
