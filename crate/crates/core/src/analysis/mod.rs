//! Manufactured problems, the discrete energy error and convergence studies.

mod fields;
mod study;

use nalgebra::{DVector, Matrix2};
use rayon::prelude::*;

pub use fields::{
    example_case, polynomial_case, CornerLayer, LayerProfile, ManufacturedCase, Polynomial,
    ScalarField, SineProduct, TensorLayer,
};
pub use study::{
    field_dump, markdown_table, run_convergence, run_study, ConvergenceReport, LevelResult,
    MeshSource, StudyConfig,
};

use crate::assembly::Discretization;
use crate::mesh::Mesh;
use crate::quadrature::integrate_with;
use crate::{Error, Result};

/// `(∫_Ω f²)^{1/2}` by the load rule of `disc`.
pub fn l2_norm(mesh: &Mesh, disc: &Discretization, f: &(dyn Fn(crate::Point) -> f64 + Sync)) -> f64 {
    mesh.geometries()
        .par_iter()
        .map(|g| integrate_with(g, disc.rules().load(), |p| f(p).powi(2)))
        .collect::<Vec<_>>()
        .iter()
        .sum::<f64>()
        .sqrt()
}

/// Squared broken seminorms `(|u − Π^Δu_h|²_{2,K}, |u − Π∇u_h|²_{1,K})`
/// summed over cells.
pub fn error_seminorms(
    mesh: &Mesh,
    disc: &Discretization,
    solution: &DVector<f64>,
    reference: &dyn ScalarField,
) -> (f64, f64) {
    let parts: Vec<(f64, f64)> = (0..mesh.n_cells())
        .into_par_iter()
        .map(|c| {
            let op = disc.operator(c);
            let local = disc.local_values(c, solution);
            let hess_coeffs = &op.p_delta * &local;
            let grad_coeffs = &op.p_nabla * &local;
            let basis = &op.basis;
            let (mut h2, mut h1) = (0.0, 0.0);
            for tri in mesh.geometry(c).triangles() {
                for (p, w) in disc.rules().load().map(tri) {
                    let u_hess = reference.hessian(p);
                    let hess = Matrix2::new(
                        basis.eval_partial(hess_coeffs.as_slice(), p, 2, 0),
                        basis.eval_partial(hess_coeffs.as_slice(), p, 1, 1),
                        basis.eval_partial(hess_coeffs.as_slice(), p, 1, 1),
                        basis.eval_partial(hess_coeffs.as_slice(), p, 0, 2),
                    );
                    let u_grad = reference.gradient(p);
                    let gx = basis.eval_partial(grad_coeffs.as_slice(), p, 1, 0);
                    let gy = basis.eval_partial(grad_coeffs.as_slice(), p, 0, 1);
                    h2 += w * (u_hess - hess).norm_squared();
                    h1 += w * ((u_grad.x - gx).powi(2) + (u_grad.y - gy).powi(2));
                }
            }
            (h2, h1)
        })
        .collect();
    parts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y))
}

/// `(Σ_K ε²|u − Π^Δu_h|²_{2,K} + |u − Π∇u_h|²_{1,K})^{1/2} / ‖f‖`.
///
/// `f_norm` of zero leaves the error unnormalized.
pub fn energy_error(
    mesh: &Mesh,
    disc: &Discretization,
    epsilon: f64,
    solution: &DVector<f64>,
    reference: &dyn ScalarField,
    f_norm: f64,
) -> f64 {
    let (h2, h1) = error_seminorms(mesh, disc, solution, reference);
    let err = (epsilon * epsilon * h2 + h1).sqrt();
    if f_norm > 0.0 {
        err / f_norm
    } else {
        err
    }
}

/// Least-squares slope of `log err` against `log h`.
pub fn fit_rate(h: &[f64], err: &[f64]) -> Result<f64> {
    if h.len() != err.len() || h.len() < 2 {
        return Err(Error::RateFit);
    }
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = err.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx.is_nan() || sxx <= 0.0 || x.iter().chain(&y).any(|v| !v.is_finite()) {
        return Err(Error::RateFit);
    }
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    Ok(sxy / sxx)
}

/// Rate between each level and the previous one; `None` on the first level
/// or where the mesh size did not change.
pub fn running_rates(h: &[f64], err: &[f64]) -> Vec<Option<f64>> {
    (0..h.len())
        .map(|i| {
            if i == 0 || h[i] == h[i - 1] {
                None
            } else {
                Some((err[i] / err[i - 1]).ln() / (h[i] / h[i - 1]).ln())
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_rectangle_grid, Rectangle};

    #[test]
    fn synthetic_rates() {
        let h = [0.4, 0.2, 0.1, 0.05];
        for p in [2.0, 3.0] {
            let err: Vec<f64> = h.iter().map(|v| 7.3 * f64::powf(*v, p)).collect();
            assert!((fit_rate(&h, &err).unwrap() - p).abs() < 1e-10);
            for r in running_rates(&h, &err).into_iter().skip(1) {
                assert!((r.unwrap() - p).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rate_needs_distinct_sizes() {
        assert!(matches!(fit_rate(&[0.1], &[1.0]), Err(Error::RateFit)));
        assert!(matches!(fit_rate(&[0.1, 0.1], &[1.0, 0.5]), Err(Error::RateFit)));
        assert_eq!(running_rates(&[0.1, 0.1], &[1.0, 0.5]), vec![None, None]);
    }

    #[test]
    fn zero_solution_error_is_the_seminorm() {
        let mesh = generate_rectangle_grid(3, 3, Rectangle::unit()).unwrap();
        let disc = Discretization::new(&mesh, 2).unwrap();
        let u = SineProduct;
        let zero = DVector::zeros(disc.n_dofs());
        let eps = 0.3;
        let err = energy_error(&mesh, &disc, eps, &zero, &u, 1.0);
        // |u|₁² = π²/2, |u|₂² = π⁴
        let pi2 = std::f64::consts::PI.powi(2);
        let exact = (eps * eps * pi2 * pi2 + pi2 / 2.0).sqrt();
        assert!((err - exact).abs() < 1e-6 * exact, "{err} vs {exact}");
    }

    #[test]
    fn polynomial_interpolant_has_no_error() {
        let mesh = crate::mesh::generate_distorted_grid(3, 3, 0.1).unwrap();
        let disc = Discretization::new(&mesh, 3).unwrap();
        let q = Polynomial::new([((3, 0), 1.0), ((1, 2), -2.0), ((0, 1), 0.5)]);
        let dofs = disc.interpolate(&mesh, |p| q.eval(p));
        assert!(energy_error(&mesh, &disc, 1.0, &dofs, &q, 0.0) < 1e-10);
    }

    #[test]
    fn l2_norm_of_constant() {
        let mesh = generate_rectangle_grid(2, 3, Rectangle::new(0.0, 0.0, 2.0, 1.0)).unwrap();
        let disc = Discretization::new(&mesh, 2).unwrap();
        assert!((l2_norm(&mesh, &disc, &|_| 3.0) - 3.0 * 2f64.sqrt()).abs() < 1e-13);
    }
}
