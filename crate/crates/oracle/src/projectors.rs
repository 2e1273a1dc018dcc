//! Projector matrices assembled from their defining integrals.
//!
//! Boundary traces are the degree-`k` Lagrange interpolants through the edge
//! nodes and every integral is evaluated with rules far beyond the degree of
//! its integrand, so nothing depends on the Gauss–Lobatto weights.

use ipvem::Point;
use nalgebra::{DMatrix, RowDVector, Vector2};

use crate::monomials::Monomials;
use crate::polygon::Polygon;
use crate::quadrature::{composite, gauss_lobatto};
use crate::OracleConfig;

/// Local DoF ordering: vertices, `k − 1` interior edge nodes per edge, then
/// moments against monomials of degree `≤ k − 2`.
#[derive(Debug, Clone, Copy)]
struct Layout {
    n: usize,
    k: usize,
}

impl Layout {
    fn node(&self, edge: usize, i: usize) -> usize {
        match i {
            0 => edge,
            i if i == self.k => (edge + 1) % self.n,
            i => self.n + edge * (self.k - 1) + i - 1,
        }
    }

    fn moment(&self, g: usize) -> usize {
        self.n * self.k + g
    }

    fn n_moments(&self) -> usize {
        self.k * (self.k - 1) / 2
    }

    fn n_dofs(&self) -> usize {
        self.n * self.k + self.n_moments()
    }
}

#[derive(Debug, Clone)]
pub struct OracleProjectors {
    /// DoFs of each monomial, `n_dofs × dim ℙ_k`.
    pub d: DMatrix<f64>,
    pub p_nabla: DMatrix<f64>,
    pub p_0: DMatrix<f64>,
    pub p_delta: DMatrix<f64>,
    /// Monomial family the coefficient rows refer to.
    pub monomials: Monomials,
}

fn lagrange(nodes: &[f64], s: f64) -> (Vec<f64>, Vec<f64>) {
    let n = nodes.len();
    let mut values = vec![0.0; n];
    let mut slopes = vec![0.0; n];
    for i in 0..n {
        let mut v = 1.0;
        for m in (0..n).filter(|&m| m != i) {
            v *= (s - nodes[m]) / (nodes[i] - nodes[m]);
        }
        values[i] = v;
        let mut d = 0.0;
        for l in (0..n).filter(|&l| l != i) {
            let mut t = 1.0 / (nodes[i] - nodes[l]);
            for m in (0..n).filter(|&m| m != i && m != l) {
                t *= (s - nodes[m]) / (nodes[i] - nodes[m]);
            }
            d += t;
        }
        slopes[i] = d;
    }
    (values, slopes)
}

fn gram(monos: &Monomials, poly: &Polygon, ops: &[(usize, usize, f64)]) -> DMatrix<f64> {
    let n = monos.len();
    let (c, h) = (monos.centroid(), monos.diameter());
    DMatrix::from_fn(n, n, |a, b| {
        ops.iter()
            .map(|&(dx, dy, weight)| {
                match (monos.derivative_expansion(a, dx, dy), monos.derivative_expansion(b, dx, dy)) {
                    (Some((i, fa)), Some((j, fb))) => {
                        let (pi, qi) = monos.exponents()[i];
                        let (pj, qj) = monos.exponents()[j];
                        weight * fa * fb * poly.monomial_integral(pi + pj, qi + qj, c, h)
                    }
                    _ => 0.0,
                }
            })
            .sum()
    })
}

fn frame(poly: &Polygon, j: usize) -> (Point, Point, f64, Vector2<f64>, Vector2<f64>) {
    let (a, b) = poly.edge(j);
    let len = (b - a).norm();
    let t = (b - a) / len;
    (a, b, len, t, Vector2::new(t.y, -t.x))
}

/// Reference `D`, Π∇, Π⁰ and Π^Δ for a counter-clockwise polygon.
pub fn oracle_projectors(poly: &Polygon, k: usize, config: &OracleConfig) -> OracleProjectors {
    assert!(k >= 2);
    let layout = Layout { n: poly.len(), k };
    let monos = Monomials::new(k, poly.centroid(), poly.diameter());
    let (nk, nd) = (monos.len(), layout.n_dofs());
    let area = poly.area();
    let perimeter = poly.perimeter();
    let (lob_nodes, _) = gauss_lobatto(k);
    let (qs, qw) = composite(config.edge_order, config.edge_panels);

    let mass = gram(&monos, poly, &[(0, 0, 1.0)]);
    let stiffness = gram(&monos, poly, &[(1, 0, 1.0), (0, 1, 1.0)]);
    let hessian = gram(&monos, poly, &[(2, 0, 1.0), (1, 1, 2.0), (0, 2, 1.0)]);

    let mut d = DMatrix::zeros(nd, nk);
    for j in 0..layout.n {
        let (a, b, ..) = frame(poly, j);
        for (i, &s) in lob_nodes.iter().enumerate().take(k) {
            let p = a + (b - a) * s;
            for al in 0..nk {
                d[(layout.node(j, i), al)] = monos.value(al, p);
            }
        }
    }
    for g in 0..layout.n_moments() {
        for al in 0..nk {
            d[(layout.moment(g), al)] = mass[(g, al)] / area;
        }
    }

    // Π∇
    let mut lhs = stiffness.clone();
    let mut rhs = DMatrix::zeros(nk, nd);
    for al in 0..nk {
        lhs[(0, al)] = poly.vertices().iter().map(|&z| monos.value(al, z)).sum::<f64>() / layout.n as f64;
    }
    for z in 0..layout.n {
        rhs[(0, z)] = 1.0 / layout.n as f64;
    }
    for b in 1..nk {
        for (dx, dy) in [(2, 0), (0, 2)] {
            if let Some((g, f)) = monos.derivative_expansion(b, dx, dy) {
                rhs[(b, layout.moment(g))] -= f * area;
            }
        }
    }
    for j in 0..layout.n {
        let (a, b_pt, len, _, n) = frame(poly, j);
        for (&s, &w) in qs.iter().zip(&qw) {
            let p = a + (b_pt - a) * s;
            let (ell, _) = lagrange(&lob_nodes, s);
            for b in 1..nk {
                let dn = monos.derivative(b, 1, 0, p) * n.x + monos.derivative(b, 0, 1, p) * n.y;
                for (i, l) in ell.iter().enumerate() {
                    rhs[(b, layout.node(j, i))] += len * w * dn * l;
                }
            }
        }
    }
    let p_nabla = lhs.lu().solve(&rhs).expect("H1 projection oracle is singular");

    // Π⁰
    let mut rhs0 = &mass * &p_nabla;
    for g in 0..layout.n_moments() {
        rhs0.row_mut(g).fill(0.0);
        rhs0[(g, layout.moment(g))] = area;
    }
    let p_0 = mass.clone().lu().solve(&rhs0).expect("L2 projection oracle is singular");

    // Π^Δ
    let dn_row = |p: Point, n: Vector2<f64>| -> RowDVector<f64> {
        let mut row = RowDVector::zeros(nd);
        for al in 0..nk {
            let c = monos.derivative(al, 1, 0, p) * n.x + monos.derivative(al, 0, 1, p) * n.y;
            row += p_nabla.row(al) * c;
        }
        row
    };
    let mut rhs = DMatrix::zeros(nk + 3, nd);
    let mut system = DMatrix::zeros(nk + 3, nk + 3);
    system.view_mut((0, 0), (nk, nk)).copy_from(&hessian);
    for b in 0..nk {
        for (dx, dy, c) in [(4, 0, 1.0), (2, 2, 2.0), (0, 4, 1.0)] {
            if let Some((g, f)) = monos.derivative_expansion(b, dx, dy) {
                rhs[(b, layout.moment(g))] += c * f * area;
            }
        }
    }
    for j in 0..layout.n {
        let (a, b_pt, len, t, n) = frame(poly, j);
        for (&s, &w) in qs.iter().zip(&qw) {
            let p = a + (b_pt - a) * s;
            let (ell, slope) = lagrange(&lob_nodes, s);
            let dn = dn_row(p, n);
            let m = |b: usize, dx: usize, dy: usize| monos.derivative(b, dx, dy, p);
            for b in 0..nk {
                let dn_lap = n.x * (m(b, 3, 0) + m(b, 1, 2)) + n.y * (m(b, 2, 1) + m(b, 0, 3));
                let nt = t.x * n.x * m(b, 2, 0) + (t.x * n.y + t.y * n.x) * m(b, 1, 1) + t.y * n.y * m(b, 0, 2);
                let nn = n.x * n.x * m(b, 2, 0) + 2.0 * n.x * n.y * m(b, 1, 1) + n.y * n.y * m(b, 0, 2);
                for i in 0..=k {
                    let dof = layout.node(j, i);
                    rhs[(b, dof)] += len * w * (slope[i] / len * nt - ell[i] * dn_lap);
                }
                let mut r = rhs.row_mut(b);
                r += &dn * (len * w * nn);
            }
            for al in 0..nk {
                system[(nk, al)] += len * w * monos.value(al, p) / perimeter;
                system[(nk + 1, al)] += len * w * m(al, 1, 0) / perimeter;
                system[(nk + 2, al)] += len * w * m(al, 0, 1) / perimeter;
            }
            for i in 0..=k {
                let dof = layout.node(j, i);
                rhs[(nk, dof)] += len * w * ell[i] / perimeter;
                rhs[(nk + 1, dof)] += w * slope[i] * t.x / perimeter;
                rhs[(nk + 2, dof)] += w * slope[i] * t.y / perimeter;
            }
            for (r, nr) in [(nk + 1, n.x), (nk + 2, n.y)] {
                let mut row = rhs.row_mut(r);
                row += &dn * (len * w * nr / perimeter);
            }
        }
    }
    for c in 0..3 {
        for al in 0..nk {
            system[(al, nk + c)] = system[(nk + c, al)];
        }
    }
    let sol = system.lu().solve(&rhs).expect("H2 projection oracle is singular");
    let p_delta = sol.rows(0, nk).into_owned();

    OracleProjectors {
        d,
        p_nabla,
        p_0,
        p_delta,
        monomials: monos,
    }
}
