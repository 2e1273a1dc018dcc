use ipvem::analysis::{
    energy_error, example_case, field_dump, fit_rate, markdown_table, polynomial_case,
    run_convergence, run_study, MeshSource, Polynomial, StudyConfig,
};
use ipvem::assembly::{assemble_system, solve, Discretization, PenaltyConfig, SolverOptions};
use ipvem::mesh::{generate_cvt_polygonal, generate_distorted_grid, save_mesh, Domain};
use nalgebra::DVector;

fn distorted(sizes: &[usize]) -> MeshSource {
    MeshSource::Distorted {
        sizes: sizes.to_vec(),
        delta: 0.1,
    }
}

#[test]
fn published_errors_with_size_proxy() {
    let counts = [32.0f64, 64.0, 128.0, 256.0, 512.0];
    let errors = [6.4009e-3, 3.2484e-3, 1.3883e-3, 7.1140e-4, 3.6204e-4];
    let h: Vec<f64> = counts.iter().map(|n| n.powf(-0.5)).collect();
    let rate = fit_rate(&h, &errors).unwrap();
    assert!((rate - 2.0958).abs() < 1e-4, "{rate}");
}

#[test]
fn polynomial_solution_has_negligible_error() {
    let mesh = generate_distorted_grid(4, 4, 0.1).unwrap();
    for (k, q) in [
        (2, Polynomial::new([((2, 0), 1.0), ((1, 1), -0.5), ((0, 1), 0.3)])),
        (3, Polynomial::new([((3, 0), 1.0), ((1, 2), -0.5), ((0, 2), 2.0), ((0, 0), 0.7)])),
    ] {
        let case = polynomial_case(q, 1e-4, Domain::unit_square(), k);
        let report = run_convergence(&case, &distorted(&[4, 5]), &StudyConfig::new(k)).unwrap();
        assert!(report.errors().iter().all(|&e| e <= 1e-8), "k={k}: {:?}", report.errors());

        let disc = Discretization::new(&mesh, k).unwrap();
        let system = assemble_system(&mesh, &disc, 1e-4, case.rhs.as_ref(), &PenaltyConfig::default(), &case.boundary).unwrap();
        let values = solve(&system, &SolverOptions::default()).unwrap().values;
        let err = energy_error(&mesh, &disc, 1e-4, &values, case.reference.as_ref(), 0.0);
        assert!(err <= 1e-8, "k={k}: {err}");
    }
}

#[test]
fn zero_solution_measures_the_reference() {
    // q = x²y: |q|²₁ = 4/9 + 1/5 and |q|²₂ = 4 on the unit square
    let q = Polynomial::new([((2, 1), 1.0)]);
    let mesh = generate_cvt_polygonal(40, &Domain::unit_square(), 2, 20).unwrap();
    let disc = Discretization::new(&mesh, 2).unwrap();
    let zero = DVector::zeros(disc.n_dofs());
    for eps in [1.0, 0.1, 1e-6] {
        let err = energy_error(&mesh, &disc, eps, &zero, &q, 1.0);
        let expected = (eps * eps * 4.0 + 4.0 / 9.0 + 0.2f64).sqrt();
        assert!((err - expected).abs() < 1e-12 * expected, "{err} vs {expected}");
    }
}

#[test]
fn error_is_invariant_under_joint_scaling() {
    let source = distorted(&[5, 7]);
    for id in [1, 3] {
        let case = example_case(id, 1e-6).unwrap();
        let base = run_convergence(&case, &source, &StudyConfig::new(2)).unwrap();
        for factor in [1e-3, 7.5, 1e4] {
            let scaled = run_convergence(&case.scaled(factor), &source, &StudyConfig::new(2)).unwrap();
            for (a, b) in base.errors().iter().zip(scaled.errors()) {
                assert!((a - b).abs() <= 1e-12 * a, "example {id}, factor {factor}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn example_three_on_fine_voronoi_mesh() {
    let case = example_case(3, 1e-8).unwrap();
    let source = MeshSource::Cvt {
        counts: vec![128, 512],
        seed: 1,
        lloyd_iters: 200,
    };
    let report = run_convergence(&case, &source, &StudyConfig::new(2)).unwrap();
    let err = report.levels[1].error;
    let reference = 5.7240e-4;
    assert!(err / reference < 2.0 && reference / err < 2.0, "{err}");
}

#[test]
fn errors_decrease_along_shipped_sequences() {
    let square = MeshSource::Cvt {
        counts: vec![32, 64, 128, 256, 512],
        seed: 1,
        lloyd_iters: 200,
    };
    let lshape = MeshSource::Cvt {
        counts: vec![100, 200, 300, 400, 500],
        seed: 1,
        lloyd_iters: 200,
    };
    for (id, source, k, eps) in [
        (1, square, 2, 1e-6),
        (2, lshape, 3, 1e-8),
        (3, distorted(&[6, 8, 11, 16, 23]), 2, 1e-10),
    ] {
        let report = run_convergence(&example_case(id, eps).unwrap(), &source, &StudyConfig::new(k)).unwrap();
        let errors = report.errors();
        assert!(errors.windows(2).all(|w| w[1] < w[0]), "example {id}: {errors:?}");
        assert!(report.h().windows(2).all(|w| w[1] < w[0]));
    }
}

#[test]
fn example_two_at_moderate_epsilon_is_finite() {
    let case = example_case(2, 1e-2).unwrap();
    let source = MeshSource::Cvt {
        counts: vec![40, 80],
        seed: 3,
        lloyd_iters: 30,
    };
    let report = run_convergence(&case, &source, &StudyConfig::new(3)).unwrap();
    assert!(report.errors().iter().all(|e| e.is_finite() && *e > 0.0));
    assert!(report.rate.is_finite());
}

#[test]
fn invalid_examples_are_rejected() {
    assert!(example_case(1, 0.0).is_err());
    assert!(example_case(2, 1.5).is_err());
    assert!(example_case(4, 1e-6).is_err());
}

#[test]
fn study_outputs() {
    let cases = [example_case(1, 1e-6).unwrap(), example_case(1, 1e-8).unwrap()];
    let reports = run_study(&cases, &distorted(&[4, 6, 8]), &StudyConfig::new(2)).unwrap();

    let csv = reports[0].to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "N,h,Err,rate_running");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("16,") && lines[1].ends_with(','));
    let fields: Vec<&str> = lines[3].split(',').collect();
    assert_eq!(fields[0], "64");
    let err: f64 = fields[2].parse().unwrap();
    assert_eq!(err, reports[0].levels[2].error);
    assert!(fields[3].parse::<f64>().unwrap() > 1.0);

    let table = markdown_table(&reports);
    let rows: Vec<&str> = table.lines().collect();
    assert_eq!(rows[0], "| ε | N=16 | N=36 | N=64 | Rate |");
    assert_eq!(rows.len(), 4);
    assert!(rows[2].starts_with("| 1e-6 |"));
    assert!(rows[3].starts_with("| 1e-8 |"));

    let plot = reports[0].plot_data();
    assert_eq!(plot.lines().count(), 4);
}

#[test]
fn field_dump_samples_the_solution() {
    let mesh = generate_distorted_grid(4, 4, 0.1).unwrap();
    let q = Polynomial::new([((2, 0), 1.0), ((0, 1), 1.0)]);
    let disc = Discretization::new(&mesh, 2).unwrap();
    let values = disc.interpolate(&mesh, |p| q.eval(p));
    let dump = field_dump(&mesh, &disc, &values, 9);
    let mut count = 0;
    for line in dump.lines().filter(|l| !l.starts_with('#')) {
        let v: Vec<f64> = line.split(' ').map(|s| s.parse().unwrap()).collect();
        assert!((v[2] - (v[0] * v[0] + v[1])).abs() < 1e-12);
        count += 1;
    }
    assert_eq!(count, 81);
}

#[test]
fn mesh_files_reproduce_generated_levels() {
    let dir = tempfile::tempdir().unwrap();
    let domain = Domain::unit_square();
    let mut paths = Vec::new();
    for n in [20, 40] {
        let path = dir.path().join(format!("cvt{n}.txt"));
        save_mesh(&generate_cvt_polygonal(n, &domain, 4, 30).unwrap(), &path).unwrap();
        paths.push(path);
    }
    let case = example_case(1, 1e-6).unwrap();
    let config = StudyConfig::new(2);
    let from_files = run_convergence(&case, &MeshSource::Files(paths), &config).unwrap();
    let generated = run_convergence(
        &case,
        &MeshSource::Cvt {
            counts: vec![20, 40],
            seed: 4,
            lloyd_iters: 30,
        },
        &config,
    )
    .unwrap();
    assert_eq!(from_files.errors(), generated.errors());
    assert!(MeshSource::Files(vec![dir.path().join("missing.txt")])
        .build(0, &domain)
        .is_err());
}

#[test]
fn structured_sources_need_rectangles() {
    let case = example_case(2, 1e-6).unwrap();
    let err = run_convergence(&case, &distorted(&[4]), &StudyConfig::new(3)).unwrap_err();
    assert!(err.to_string().contains("level 0"), "{err}");
}
