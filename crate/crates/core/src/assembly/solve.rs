use faer::linalg::solvers::Solve;
use faer::sparse::linalg::LltError;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};
use nalgebra::DVector;

use super::{LinearSystem, SparseMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolveMethod {
    /// Sparse Cholesky with iterative refinement, falling back to
    /// preconditioned conjugate gradients if the factorization is unusable.
    #[default]
    Direct,
    /// Jacobi-preconditioned conjugate gradients only.
    ConjugateGradient,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub method: SolveMethod,
    /// Target relative residual `‖b − Ax‖ / ‖b‖`.
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            method: SolveMethod::Direct,
            tol: 1e-12,
            max_iterations: 20_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub values: DVector<f64>,
    pub residual: f64,
    /// Refinement or conjugate gradient iterations performed.
    pub iterations: usize,
}

fn relative_residual(a: &SparseMatrix, x: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let bn = b.norm();
    let r = (b - a.mul_vec(x)).norm();
    if bn == 0.0 {
        r
    } else {
        r / bn
    }
}

fn cholesky(system: &LinearSystem) -> Result<faer::sparse::linalg::solvers::Llt<usize, f64>> {
    let a = &system.matrix;
    let lower: Vec<_> = a
        .triplets()
        .filter(|&(r, c, _)| r >= c)
        .map(|(r, c, v)| Triplet::new(r, c, v))
        .collect();
    let csc = SparseColMat::<usize, f64>::try_new_from_triplets(a.nrows(), a.nrows(), &lower)
        .map_err(|e| Error::Solver(format!("{e:?}")))?;
    csc.sp_cholesky(Side::Lower).map_err(|e| match e {
        LltError::Numeric(faer::linalg::cholesky::llt::factor::LltError::NonPositivePivot { index }) => {
            Error::NotPositiveDefinite {
                pivot: index,
                lambda: system.lambda,
            }
        }
        other => Error::Solver(format!("{other:?}")),
    })
}

fn pcg(a: &SparseMatrix, b: &DVector<f64>, x0: DVector<f64>, tol: f64, max_iter: usize) -> Result<(DVector<f64>, usize)> {
    let inv_diag = a.diagonal().map(|d| if d > 0.0 { 1.0 / d } else { 1.0 });
    let bn = b.norm().max(f64::MIN_POSITIVE);
    let mut x = x0;
    let mut r = b - a.mul_vec(&x);
    let mut z = r.component_mul(&inv_diag);
    let mut p = z.clone();
    let mut rz = r.dot(&z);
    for it in 0..max_iter {
        if r.norm() <= tol * bn {
            return Ok((x, it));
        }
        let ap = a.mul_vec(&p);
        let alpha = rz / p.dot(&ap);
        x.axpy(alpha, &p, 1.0);
        r.axpy(-alpha, &ap, 1.0);
        z = r.component_mul(&inv_diag);
        let rz_next = r.dot(&z);
        p = &z + &p * (rz_next / rz);
        rz = rz_next;
    }
    let residual = relative_residual(a, &x, b);
    if residual <= tol {
        Ok((x, max_iter))
    } else {
        Err(Error::NoConvergence {
            residual,
            iterations: max_iter,
        })
    }
}

/// Attempts a sparse Cholesky factorization without solving.
pub fn check_positive_definite(system: &LinearSystem) -> Result<()> {
    cholesky(system).map(|_| ())
}

/// Solves the reduced system to the requested relative residual.
pub fn solve(system: &LinearSystem, options: &SolverOptions) -> Result<Solution> {
    let a = &system.matrix;
    let b = &system.rhs;
    let n = a.nrows();
    if options.method == SolveMethod::ConjugateGradient {
        let (values, iterations) = pcg(a, b, DVector::zeros(n), options.tol, options.max_iterations)?;
        let residual = relative_residual(a, &values, b);
        return Ok(Solution {
            values,
            residual,
            iterations,
        });
    }

    let llt = match cholesky(system) {
        Ok(llt) => llt,
        Err(Error::Solver(_)) => {
            let (values, iterations) = pcg(a, b, DVector::zeros(n), options.tol, options.max_iterations)?;
            let residual = relative_residual(a, &values, b);
            return Ok(Solution {
                values,
                residual,
                iterations,
            });
        }
        Err(e) => return Err(e),
    };
    let apply = |rhs: &DVector<f64>| {
        let mut x = Mat::<f64>::from_fn(n, 1, |i, _| rhs[i]);
        llt.solve_in_place(x.as_mut());
        DVector::from_fn(n, |i, _| x[(i, 0)])
    };
    let mut x = apply(b);
    let mut residual = relative_residual(a, &x, b);
    let mut iterations = 0;
    while residual > options.tol && iterations < 3 {
        let r = b - a.mul_vec(&x);
        x += apply(&r);
        residual = relative_residual(a, &x, b);
        iterations += 1;
    }
    if residual > options.tol {
        let (values, extra) = pcg(a, b, x, options.tol, options.max_iterations)?;
        x = values;
        iterations += extra;
        residual = relative_residual(a, &x, b);
    }
    Ok(Solution {
        values: x,
        residual,
        iterations,
    })
}
