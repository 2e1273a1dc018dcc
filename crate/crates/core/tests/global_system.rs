use std::sync::Arc;

use ipvem::analysis::{example_case, polynomial_case, Polynomial, ScalarField};
use ipvem::assembly::{
    apply_boundary_conditions, assemble_penalty, assemble_system, assemble_volume, solve,
    write_coordinate, BoundaryData, Contribution, Discretization, PenaltyConfig, SolveMethod,
    SolverOptions,
};
use ipvem::mesh::{
    generate_cvt_polygonal, generate_distorted_grid, generate_rectangle_grid, Domain, Mesh,
    Rectangle,
};
use ipvem::{Error, Point};
use nalgebra::DVector;

fn cubic() -> Polynomial {
    Polynomial::new([((3, 0), 1.0), ((1, 2), -0.5), ((0, 2), 2.0), ((2, 1), 0.3), ((0, 0), 0.7)])
}

fn quadratic() -> Polynomial {
    Polynomial::new([((2, 0), 1.0), ((1, 1), -0.5), ((0, 2), 2.0), ((1, 0), 0.3), ((0, 0), 0.7)])
}

fn test_meshes() -> Vec<(&'static str, Mesh)> {
    vec![
        ("grid", generate_rectangle_grid(3, 3, Rectangle::unit()).unwrap()),
        ("distorted", generate_distorted_grid(4, 4, 0.1).unwrap()),
        ("cvt", generate_cvt_polygonal(20, &Domain::unit_square(), 3, 50).unwrap()),
        ("l-shape", generate_cvt_polygonal(30, &Domain::l_shape(), 3, 50).unwrap()),
    ]
}

#[test]
fn polynomial_solutions_are_reproduced() {
    let mesh = generate_distorted_grid(4, 4, 0.1).unwrap();
    for (k, q) in [(2, quadratic()), (3, cubic())] {
        let disc = Discretization::new(&mesh, k).unwrap();
        let exact = disc.interpolate(&mesh, |p| q.eval(p));
        for eps in [1.0, 1e-4] {
            let case = polynomial_case(q.clone(), eps, Domain::unit_square(), k);
            // λ = 1 gives an indefinite matrix at ε = 1; consistency holds anyway
            let system = assemble_system(&mesh, &disc, eps, case.rhs.as_ref(), &PenaltyConfig::default(), &case.boundary).unwrap();
            let residual = (&system.rhs - system.matrix.mul_vec(&exact)).norm() / system.rhs.norm();
            assert!(residual < 1e-12, "k={k} eps={eps}: {residual}");

            let lambda = if eps == 1.0 { 16.0 } else { 1.0 };
            let system = assemble_system(&mesh, &disc, eps, case.rhs.as_ref(), &PenaltyConfig::with_lambda(lambda), &case.boundary).unwrap();
            let sol = solve(&system, &SolverOptions::default()).unwrap();
            let rel = (&sol.values - &exact).norm() / exact.norm();
            assert!(rel < 1e-8, "k={k} eps={eps}: {rel}");
        }
    }
}

#[test]
fn global_matrix_is_symmetric() {
    for (name, mesh) in test_meshes() {
        for k in [2, 3] {
            let disc = Discretization::new(&mesh, k).unwrap();
            for eps in [1.0, 1e-8] {
                let case = example_case(1, eps).unwrap();
                let system = assemble_system(&mesh, &disc, eps, case.rhs.as_ref(), &PenaltyConfig::default(), &case.boundary).unwrap();
                let sym = system.matrix.symmetry_error() / system.matrix.max_abs();
                assert!(sym < 1e-12, "{name} k={k} eps={eps}: {sym}");
            }
        }
    }
}

#[test]
fn small_epsilon_systems_factor_with_unit_penalty() {
    let direct = SolverOptions {
        tol: 1e-10,
        ..SolverOptions::default()
    };
    for (name, mesh) in test_meshes() {
        for k in [2, 3] {
            let disc = Discretization::new(&mesh, k).unwrap();
            for eps in [1e-6, 1e-8, 1e-10] {
                let case = example_case(3, eps).unwrap();
                let system = assemble_system(&mesh, &disc, eps, case.rhs.as_ref(), &PenaltyConfig::default(), &case.boundary).unwrap();
                let sol = solve(&system, &direct).unwrap_or_else(|e| panic!("{name} k={k} eps={eps}: {e}"));
                assert_eq!(sol.iterations, 0, "{name} k={k}: needed refinement");
            }
        }
    }
}

#[test]
fn unit_penalty_is_too_small_for_unit_epsilon_at_k3() {
    let mesh = generate_rectangle_grid(4, 4, Rectangle::unit()).unwrap();
    let disc = Discretization::new(&mesh, 3).unwrap();
    let data = BoundaryData::homogeneous();
    let system = assemble_system(&mesh, &disc, 1.0, &|_| 1.0, &PenaltyConfig::default(), &data).unwrap();
    match solve(&system, &SolverOptions::default()) {
        Err(Error::NotPositiveDefinite { lambda, .. }) => assert_eq!(lambda, 1.0),
        other => panic!("expected a positive definiteness failure, got {other:?}"),
    }
    let system = assemble_system(&mesh, &disc, 1.0, &|_| 1.0, &PenaltyConfig::with_lambda(8.0), &data).unwrap();
    assert!(solve(&system, &SolverOptions::default()).is_ok());
}

fn dense_apply(c: &Contribution, x: &DVector<f64>) -> DVector<f64> {
    c.matrix().mul_vec(x)
}

#[test]
fn penalty_vanishes_on_smooth_polynomials() {
    // zero normal derivative on the whole boundary of the unit square
    let q = Polynomial::new([((2, 0), 3.0), ((3, 0), -2.0), ((0, 2), 3.0), ((0, 3), -2.0)]);
    let mesh = generate_distorted_grid(4, 4, 0.1).unwrap();
    let disc = Discretization::new(&mesh, 3).unwrap();
    let dq = disc.interpolate(&mesh, |p| q.eval(p));
    let data = BoundaryData::homogeneous();
    let one = assemble_penalty(&mesh, &disc, 1.0, &PenaltyConfig::with_lambda(1.0), &data).unwrap();
    let two = assemble_penalty(&mesh, &disc, 1.0, &PenaltyConfig::with_lambda(2.0), &data).unwrap();
    let j1 = dense_apply(&two, &dq) - dense_apply(&one, &dq);
    let scale = one.matrix().max_abs() * dq.amax();
    assert!(j1.amax() < 1e-11 * scale, "{}", j1.amax() / scale);
    let j23 = dense_apply(&one, &dq) - &j1;
    assert!(dq.dot(&j23).abs() < 1e-11 * scale * dq.amax());
}

#[test]
fn first_penalty_term_matches_boundary_lifting() {
    let mesh = generate_cvt_polygonal(16, &Domain::unit_square(), 5, 30).unwrap();
    for (k, q) in [(2, quadratic()), (3, cubic())] {
        let disc = Discretization::new(&mesh, k).unwrap();
        let dq = disc.interpolate(&mesh, |p| q.eval(p));
        let grad = q.clone();
        let data = BoundaryData::new(
            Arc::new(move |p| q.eval(p)),
            Arc::new(move |p, n| grad.gradient(p).dot(&n)),
        );
        let one = assemble_penalty(&mesh, &disc, 1.0, &PenaltyConfig::with_lambda(1.0), &data).unwrap();
        let two = assemble_penalty(&mesh, &disc, 1.0, &PenaltyConfig::with_lambda(2.0), &data).unwrap();
        let r1 = dense_apply(&one, &dq) - &one.rhs;
        let r2 = dense_apply(&two, &dq) - &two.rhs;
        let j1 = r2 - r1;
        let scale = one.matrix().max_abs() * dq.amax();
        assert!(j1.amax() < 1e-11 * scale, "k={k}: {}", j1.amax() / scale);
    }
}

#[test]
fn linear_cell_has_no_consistency_terms() {
    let mesh = generate_rectangle_grid(1, 1, Rectangle::unit()).unwrap();
    let disc = Discretization::new(&mesh, 2).unwrap();
    let q = Polynomial::new([((1, 0), 2.0), ((0, 1), -1.0), ((0, 0), 0.5)]);
    let dq = disc.interpolate(&mesh, |p| q.eval(p));
    let data = BoundaryData::homogeneous();
    let one = assemble_penalty(&mesh, &disc, 1.0, &PenaltyConfig::with_lambda(1.0), &data).unwrap();
    let two = assemble_penalty(&mesh, &disc, 1.0, &PenaltyConfig::with_lambda(2.0), &data).unwrap();
    let j1 = dense_apply(&two, &dq) - dense_apply(&one, &dq);
    let j23 = dense_apply(&one, &dq) - j1;
    let form = dq.dot(&j23).abs() / (one.matrix().max_abs() * dq.amax().powi(2));
    assert!(form < 1e-13, "{form:e}");
}

#[test]
fn homogeneous_data_gives_identity_rows() {
    let mesh = generate_rectangle_grid(2, 2, Rectangle::unit()).unwrap();
    let disc = Discretization::new(&mesh, 2).unwrap();
    let system = assemble_system(&mesh, &disc, 0.1, &|_| 1.0, &PenaltyConfig::default(), &BoundaryData::homogeneous()).unwrap();
    let map = disc.dof_map();
    for i in 0..map.n_dofs() {
        if map.is_boundary(i) {
            assert_eq!(system.matrix.row(i).collect::<Vec<_>>(), vec![(i, 1.0)]);
            assert_eq!(system.rhs[i], 0.0);
        }
    }
    assert_eq!(system.free.len(), map.n_dofs() - 16);
}

#[test]
fn example_one_corner_value() {
    let mesh = generate_rectangle_grid(2, 2, Rectangle::unit()).unwrap();
    let disc = Discretization::new(&mesh, 2).unwrap();
    let case = example_case(1, 1e-6).unwrap();
    let volume = assemble_volume(&mesh, &disc, 1e-6, case.rhs.as_ref());
    let system = apply_boundary_conditions(&volume, disc.dof_map(), &case.boundary, 1.0).unwrap();
    let corner = (0..mesh.n_vertices())
        .find(|&v| mesh.vertex(v) == Point::new(0.0, 0.0))
        .unwrap();
    let dof = disc.dof_map().vertex_dof(corner);
    assert!((system.rhs[dof] - 2e-6).abs() < 1e-20);
}

#[test]
fn non_finite_boundary_data_is_reported() {
    let mesh = generate_rectangle_grid(2, 2, Rectangle::unit()).unwrap();
    let disc = Discretization::new(&mesh, 2).unwrap();
    let data = BoundaryData::new(Arc::new(|p: Point| 1.0 / p.x), Arc::new(|_, _| 0.0));
    let volume = assemble_volume(&mesh, &disc, 1.0, &|_| 0.0);
    assert!(matches!(
        apply_boundary_conditions(&volume, disc.dof_map(), &data, 1.0),
        Err(Error::BoundaryData { .. })
    ));
}

#[test]
fn volume_assembly_limits() {
    let mesh = generate_distorted_grid(3, 3, 0.1).unwrap();
    let disc = Discretization::new(&mesh, 2).unwrap();
    assert_eq!(assemble_volume(&mesh, &disc, 0.5, &|_| 0.0).rhs.amax(), 0.0);

    let b_only = assemble_volume(&mesh, &disc, 0.0, &|_| 0.0).matrix();
    let mut expected = Contribution::empty(disc.n_dofs());
    for c in 0..mesh.n_cells() {
        let dofs = disc.dof_map().cell_dofs(c);
        let b = &disc.operator(c).b_loc;
        for (i, &gi) in dofs.iter().enumerate() {
            for (j, &gj) in dofs.iter().enumerate() {
                expected.triplets.push((gi, gj, b[(i, j)]));
            }
        }
    }
    let expected = expected.matrix();
    for (r, c, v) in b_only.triplets() {
        assert_eq!(expected.get(r, c), v);
    }
}

#[test]
fn single_cell_global_is_local() {
    let mesh = generate_rectangle_grid(1, 1, Rectangle::unit()).unwrap();
    let disc = Discretization::new(&mesh, 3).unwrap();
    let eps = 0.3;
    let global = assemble_volume(&mesh, &disc, eps, &|p| p.x).matrix();
    let op = disc.operator(0);
    let local = &op.a_loc * (eps * eps) + &op.b_loc;
    let dofs = disc.dof_map().cell_dofs(0);
    for (i, &gi) in dofs.iter().enumerate() {
        for (j, &gj) in dofs.iter().enumerate() {
            assert_eq!(global.get(gi, gj), local[(i, j)]);
        }
    }
}

#[test]
fn clamped_single_cell_without_load_is_zero() {
    let mesh = generate_rectangle_grid(1, 1, Rectangle::unit()).unwrap();
    let disc = Discretization::new(&mesh, 2).unwrap();
    let system = assemble_system(&mesh, &disc, 1e-3, &|_| 0.0, &PenaltyConfig::default(), &BoundaryData::homogeneous()).unwrap();
    let sol = solve(&system, &SolverOptions::default()).unwrap();
    assert_eq!(sol.values.amax(), 0.0);
}

#[test]
fn direct_and_iterative_solvers_agree() {
    let mesh = generate_cvt_polygonal(40, &Domain::unit_square(), 2, 40).unwrap();
    let disc = Discretization::new(&mesh, 2).unwrap();
    let case = example_case(1, 1e-3).unwrap();
    let system = assemble_system(&mesh, &disc, 1e-3, case.rhs.as_ref(), &PenaltyConfig::default(), &case.boundary).unwrap();
    let direct = solve(&system, &SolverOptions::default()).unwrap();
    let cg = solve(&system, &SolverOptions { method: SolveMethod::ConjugateGradient, ..SolverOptions::default() }).unwrap();
    assert!((&direct.values - &cg.values).amax() < 1e-9 * direct.values.amax());
    assert!(direct.residual <= 1e-12 && cg.residual <= 1e-12);
}

#[test]
fn assembly_is_deterministic_across_thread_counts() {
    let mesh = generate_cvt_polygonal(60, &Domain::l_shape(), 9, 40).unwrap();
    let case = example_case(2, 1e-2).unwrap();
    let build = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let disc = Discretization::new(&mesh, 3).unwrap();
            assemble_system(&mesh, &disc, 1e-2, case.rhs.as_ref(), &PenaltyConfig::default(), &case.boundary).unwrap()
        })
    };
    let (a, b, c) = (build(1), build(1), build(4));
    assert_eq!(a.matrix, b.matrix);
    assert_eq!(a.rhs, b.rhs);
    assert!(a.matrix.triplets().zip(c.matrix.triplets()).all(|(x, y)| x.0 == y.0 && x.1 == y.1 && (x.2 - y.2).abs() <= 1e-12 * a.matrix.max_abs()));
    assert!((&a.rhs - &c.rhs).amax() <= 1e-12 * a.rhs.amax());
}

#[test]
fn coordinate_dump_is_symmetric() {
    let mesh = generate_rectangle_grid(1, 1, Rectangle::unit()).unwrap();
    let disc = Discretization::new(&mesh, 2).unwrap();
    let system = assemble_system(&mesh, &disc, 1.0, &|_| 1.0, &PenaltyConfig::default(), &BoundaryData::homogeneous()).unwrap();
    let mut out = Vec::new();
    write_coordinate(&system.matrix, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    let header: Vec<usize> = lines.next().unwrap().split(' ').map(|s| s.parse().unwrap()).collect();
    assert_eq!(header[..2], [9, 9]);
    let entries: std::collections::HashMap<(usize, usize), f64> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(' ').collect();
            ((f[0].parse().unwrap(), f[1].parse().unwrap()), f[2].parse().unwrap())
        })
        .collect();
    assert_eq!(entries.len(), header[2]);
    for (&(r, c), v) in &entries {
        assert_eq!(entries.get(&(c, r)), Some(v));
    }
}
