use nalgebra::{DMatrix, RowDVector};

use super::LocalSpace;
use crate::{Error, Point, Vector};

struct EdgeFrame {
    start: Point,
    end: Point,
    length: f64,
    tangent: Vector,
    normal: Vector,
}

fn frame(space: &LocalSpace, j: usize) -> EdgeFrame {
    let (start, end) = space.cell.edge(j);
    let length = (end - start).norm();
    let tangent = (end - start) / length;
    EdgeFrame {
        start,
        end,
        length,
        tangent,
        normal: Vector::new(tangent.y, -tangent.x),
    }
}

fn singular(what: &'static str) -> Error {
    Error::SingularLocalSystem { cell: 0, what }
}

/// Row vector mapping DoFs to `∂_n Π∇v` at `p`.
fn normal_derivative_row(space: &LocalSpace, p_nabla: &DMatrix<f64>, p: Point, n: Vector) -> RowDVector<f64> {
    let [gx, gy] = space.basis.gradients(p);
    let mut row = RowDVector::zeros(p_nabla.ncols());
    for a in 0..space.basis.len() {
        let c = gx[a] * n.x + gy[a] * n.y;
        if c != 0.0 {
            row += p_nabla.row(a) * c;
        }
    }
    row
}

/// Coefficients of Π∇: `(∇Π∇v, ∇m_β)_K = −(v, Δm_β)_K + Σ_e Q^e(v ∂_n m_β)`
/// for `β ≥ 1`, closed by matching the vertex sum of `Π∇v` and `v`.
pub fn h1_projector(space: &LocalSpace) -> crate::Result<DMatrix<f64>> {
    let layout = &space.layout;
    let (nk, nd) = (space.basis.len(), layout.n_dofs());
    let nv = layout.n_vertices();
    let mut lhs = space.stiffness.clone();
    let mut rhs = DMatrix::zeros(nk, nd);

    let lobatto = space.rules.lobatto();
    for j in 0..nv {
        let e = frame(space, j);
        for (i, (&s, &w)) in lobatto.nodes().iter().zip(lobatto.weights()).enumerate() {
            let p = e.start + (e.end - e.start) * s;
            let [gx, gy] = space.basis.gradients(p);
            let dof = layout.boundary_node(j, i);
            for b in 1..nk {
                rhs[(b, dof)] += e.length * w * (gx[b] * e.normal.x + gy[b] * e.normal.y);
            }
        }
    }
    let lap = space.basis.laplacian_matrix();
    for b in 1..nk {
        for g in 0..lap.ncols() {
            rhs[(b, layout.moment(g))] -= lap[(b, g)] * space.cell.area();
        }
    }

    lhs.row_mut(0).fill(0.0);
    for &z in space.cell.vertices() {
        for (a, m) in space.basis.values(z).into_iter().enumerate() {
            lhs[(0, a)] += m / nv as f64;
        }
    }
    for z in 0..nv {
        rhs[(0, layout.vertex(z))] = 1.0 / nv as f64;
    }
    lhs.lu().solve(&rhs).ok_or_else(|| singular("H1 projection"))
}

/// Coefficients of Π⁰: moments of degree `≤ k − 2` come from the moment
/// DoFs, the remaining ones from Π∇v. Computed as Π∇ plus a mass-matrix
/// correction of the low moments.
pub fn l2_projector(space: &LocalSpace, p_nabla: &DMatrix<f64>) -> crate::Result<DMatrix<f64>> {
    let layout = &space.layout;
    let mp = &space.mass * p_nabla;
    let mut rhs = DMatrix::zeros(mp.nrows(), mp.ncols());
    for g in 0..layout.n_moments() {
        rhs.row_mut(g).copy_from(&(-mp.row(g)));
        rhs[(g, layout.moment(g))] += space.cell.area();
    }
    let chol = space
        .mass
        .clone()
        .cholesky()
        .ok_or_else(|| singular("L2 projection"))?;
    Ok(p_nabla + chol.solve(&rhs))
}

/// Coefficients of Π^Δ: `(∇²Π^Δv, ∇²m_β)_K = (∇²v, ∇²m_β)_K` with the right
/// side integrated by parts into DoF-computable pieces, and the kernel
/// (linear polynomials) fixed by the boundary averages of `v` and `∇v`.
pub fn h2_projector(space: &LocalSpace, p_nabla: &DMatrix<f64>) -> crate::Result<DMatrix<f64>> {
    let layout = &space.layout;
    let basis = &space.basis;
    let k = layout.degree();
    let (nk, nd) = (basis.len(), layout.n_dofs());
    let nv = layout.n_vertices();
    let area = space.cell.area();
    let perimeter = space.cell.perimeter();

    let mut rhs = DMatrix::zeros(nk, nd);
    let bilap = basis.laplacian_matrix() * basis.with_degree(k - 2).laplacian_matrix();
    for b in 0..nk {
        for g in 0..bilap.ncols() {
            rhs[(b, layout.moment(g))] += bilap[(b, g)] * area;
        }
    }

    // constraint rows: boundary mean of v, then of ∇v
    let mut c_poly = DMatrix::zeros(3, nk);
    let mut c_dofs = DMatrix::zeros(3, nd);

    let lobatto = space.rules.lobatto();
    let legendre = space.rules.legendre();
    for j in 0..nv {
        let e = frame(space, j);
        let (t, n) = (e.tangent, e.normal);
        for (i, (&s, &w)) in lobatto.nodes().iter().zip(lobatto.weights()).enumerate() {
            let p = e.start + (e.end - e.start) * s;
            let dof = layout.boundary_node(j, i);
            let [txxx, txxy, txyy, tyyy] = basis.third_derivatives(p);
            for b in 0..nk {
                let dn_lap = (txxx[b] + txyy[b]) * n.x + (txxy[b] + tyyy[b]) * n.y;
                let ttn = t.x * t.x * n.x * txxx[b]
                    + (t.x * t.x * n.y + 2.0 * t.x * t.y * n.x) * txxy[b]
                    + (t.y * t.y * n.x + 2.0 * t.x * t.y * n.y) * txyy[b]
                    + t.y * t.y * n.y * tyyy[b];
                rhs[(b, dof)] -= e.length * w * (dn_lap + ttn);
            }
            for (a, m) in basis.values(p).into_iter().enumerate() {
                c_poly[(0, a)] += e.length * w * m / perimeter;
            }
            c_dofs[(0, dof)] += e.length * w / perimeter;
        }

        // ∫_e ∂_t v ∂²_nt m_β by parts along the edge: endpoint values
        let nt = |p: Point| {
            let [hxx, hxy, hyy] = basis.hessians(p);
            (0..nk)
                .map(|b| t.x * n.x * hxx[b] + (t.x * n.y + t.y * n.x) * hxy[b] + t.y * n.y * hyy[b])
                .collect::<Vec<_>>()
        };
        let (at_start, at_end) = (nt(e.start), nt(e.end));
        for b in 0..nk {
            rhs[(b, layout.vertex((j + 1) % nv))] += at_end[b];
            rhs[(b, layout.vertex(j))] -= at_start[b];
        }
        for r in 0..2 {
            let tr = if r == 0 { t.x } else { t.y };
            c_dofs[(r + 1, layout.vertex((j + 1) % nv))] += tr / perimeter;
            c_dofs[(r + 1, layout.vertex(j))] -= tr / perimeter;
        }

        for (s, w) in legendre.iter() {
            let p = e.start + (e.end - e.start) * s;
            let dn = normal_derivative_row(space, p_nabla, p, n);
            let [hxx, hxy, hyy] = basis.hessians(p);
            for b in 0..nk {
                let nn = n.x * n.x * hxx[b] + 2.0 * n.x * n.y * hxy[b] + n.y * n.y * hyy[b];
                if nn != 0.0 {
                    let mut r = rhs.row_mut(b);
                    r += &dn * (e.length * w * nn);
                }
            }
            for (r, nr) in [(1, n.x), (2, n.y)] {
                let mut row = c_dofs.row_mut(r);
                row += &dn * (e.length * w * nr / perimeter);
            }
            let [gx, gy] = basis.gradients(p);
            for a in 0..nk {
                c_poly[(1, a)] += e.length * w * gx[a] / perimeter;
                c_poly[(2, a)] += e.length * w * gy[a] / perimeter;
            }
        }
    }

    let mut system = DMatrix::zeros(nk + 3, nk + 3);
    system.view_mut((0, 0), (nk, nk)).copy_from(&space.hessian);
    system.view_mut((nk, 0), (3, nk)).copy_from(&c_poly);
    system.view_mut((0, nk), (nk, 3)).copy_from(&c_poly.transpose());
    let mut full_rhs = DMatrix::zeros(nk + 3, nd);
    full_rhs.view_mut((0, 0), (nk, nd)).copy_from(&rhs);
    full_rhs.view_mut((nk, 0), (3, nd)).copy_from(&c_dofs);
    let sol = system
        .lu()
        .solve(&full_rhs)
        .ok_or_else(|| singular("H2 projection"))?;
    Ok(sol.rows(0, nk).into_owned())
}

/// Local matrices of `a_h^K` and `b_h^K`:
///
/// ```text
/// A = PΔᵀ G_Δ PΔ + h_K⁻² (I − D PΔ)ᵀ (I − D PΔ)
/// B = P∇ᵀ G_∇ P∇ + (I − D P∇)ᵀ (I − D P∇)
/// ```
pub fn local_forms(
    space: &LocalSpace,
    d: &DMatrix<f64>,
    p_nabla: &DMatrix<f64>,
    p_delta: &DMatrix<f64>,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let nd = space.layout.n_dofs();
    let h = space.cell.diameter();
    let id = DMatrix::<f64>::identity(nd, nd);

    let rest = &id - d * p_delta;
    let mut a = p_delta.transpose() * &space.hessian * p_delta + rest.tr_mul(&rest) / (h * h);
    let rest = &id - d * p_nabla;
    let mut b = p_nabla.transpose() * &space.stiffness * p_nabla + rest.tr_mul(&rest);
    for m in [&mut a, &mut b] {
        let sym = (&*m + m.transpose()) * 0.5;
        *m = sym;
    }
    (a, b)
}
