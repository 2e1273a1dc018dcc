use ipvem::element::{ElementOperators, ElementRules};
use ipvem::mesh::{generate_distorted_grid, CellGeometry};
use ipvem::quadrature::{gauss_lobatto, gauss_legendre, EdgeRule};
use ipvem::assembly::{assemble_penalty, BoundaryData, Discretization, PenaltyConfig};
use ipvem_oracle::{
    oracle_edge_integral, oracle_penalty, oracle_projectors, quadrature, relative_difference,
    OracleConfig, Polygon,
};
use nalgebra::DMatrix;

fn compare(poly: &Polygon, rules: &ElementRules) -> [f64; 4] {
    let cell = CellGeometry::from_polygon(poly.vertices().to_vec()).unwrap();
    let op = ElementOperators::new(&cell, rules).unwrap();
    let oracle = oracle_projectors(poly, rules.degree(), &OracleConfig::default());
    [
        relative_difference(&op.d, &oracle.d),
        relative_difference(&op.p_nabla, &oracle.p_nabla),
        relative_difference(&op.p_0, &oracle.p_0),
        relative_difference(&op.p_delta, &oracle.p_delta),
    ]
}

#[test]
fn projectors_match_oracle_on_random_polygons() {
    for k in [2, 3] {
        let rules = ElementRules::new(k).unwrap();
        let mut worst = [0.0f64; 4];
        for seed in 0..100 {
            let poly = Polygon::random_star(seed, 3 + (seed as usize % 6));
            for (w, d) in worst.iter_mut().zip(compare(&poly, &rules)) {
                *w = w.max(d);
            }
        }
        println!("k={k} worst D, P∇, P0, PΔ differences: {worst:?}");
        assert!(worst.iter().all(|&d| d < 1e-10), "{worst:?}");
    }
}

#[test]
fn projectors_match_oracle_on_hexagons_after_polynomial_input() {
    let rules = ElementRules::new(3).unwrap();
    for seed in 0..20 {
        let poly = Polygon::random_star(1000 + seed, 6);
        let cell = CellGeometry::from_polygon(poly.vertices().to_vec()).unwrap();
        let op = ElementOperators::new(&cell, &rules).unwrap();
        let oracle = oracle_projectors(&poly, 3, &OracleConfig::default());
        for (a, b) in [
            (&op.p_nabla, &oracle.p_nabla),
            (&op.p_0, &oracle.p_0),
            (&op.p_delta, &oracle.p_delta),
        ] {
            let diff = relative_difference(&(a * &op.d), &(b * &oracle.d));
            assert!(diff < 1e-10, "seed {seed}: {diff}");
            // constant column
            assert!((a.column(0) - b.column(0)).amax() < 1e-10);
        }
    }
}

#[test]
fn perturbed_lobatto_weight_is_detected() {
    let k = 3;
    let base = gauss_lobatto(k);
    let mut weights = base.weights().to_vec();
    weights[1] += 1e-3;
    let rule = EdgeRule::from_parts(base.nodes().to_vec(), weights, base.exactness());
    let perturbed = ElementRules::with_lobatto(k, rule).unwrap();
    let poly = Polygon::random_star(7, 6);
    let diffs = compare(&poly, &perturbed);
    assert!(diffs[1] > 1e-6, "{diffs:?}");
    let clean = compare(&poly, &ElementRules::new(k).unwrap());
    assert!(clean[1] < 1e-10);
}

#[test]
fn independent_nodes_match() {
    for k in 2..8 {
        let (x, w) = quadrature::gauss_lobatto(k);
        let rule = gauss_lobatto(k);
        for i in 0..=k {
            assert!((x[i] - rule.nodes()[i]).abs() < 1e-14);
            assert!((w[i] - rule.weights()[i]).abs() < 1e-14);
        }
        let (x, w) = quadrature::gauss_legendre(k);
        let rule = gauss_legendre(k);
        for i in 0..k {
            assert!((x[i] - rule.nodes()[i]).abs() < 1e-14);
            assert!((w[i] - rule.weights()[i]).abs() < 1e-14);
        }
    }
}

#[test]
fn edge_integrals() {
    let config = OracleConfig::default();
    let (a, b) = (ipvem::Point::new(0.2, -0.1), ipvem::Point::new(1.3, 0.7));
    assert_eq!(oracle_edge_integral(a, b, |_| 0.0, &config), 0.0);
    for k in 2..6 {
        let rule = gauss_legendre(k);
        let f = |p: ipvem::Point| (p.x - 0.3 * p.y).powi(2 * k as i32 - 2) + p.y;
        let len = (b - a).norm();
        let unit = rule.integrate(|s| f(a + (b - a) * s)) * len;
        let oracle = oracle_edge_integral(a, b, f, &config);
        assert!((unit - oracle).abs() < 1e-13 * oracle.abs().max(1.0));
    }
}

#[test]
fn cell_integrals_match_refined_oracle() {
    let poly = Polygon::random_star(3, 5);
    let cell = CellGeometry::from_polygon(poly.vertices().to_vec()).unwrap();
    let c = cell.centroid();
    let h = cell.diameter();
    let rules = ElementRules::new(2).unwrap();
    let op = ElementOperators::new(&cell, &rules).unwrap();
    let basis = &op.basis;
    let config = OracleConfig::default();
    for a in 0..basis.len() {
        for b in 0..basis.len() {
            let exact = poly.refined_integral(
                |p| basis.values(p)[a] * basis.values(p)[b],
                config.refinement,
                4,
            );
            let unit = ipvem::quadrature::integrate_cell(&cell, |p| basis.values(p)[a] * basis.values(p)[b], 4).unwrap();
            assert!((exact - unit).abs() < 1e-12 * h * h, "{a} {b}");
        }
    }
    assert!((poly.centroid() - c).norm() < 1e-12 * h);
    assert!((poly.diameter() - h).abs() < 1e-14 * h);
}

#[test]
fn penalty_blocks_match_oracle() {
    let mesh = generate_distorted_grid(3, 2, 0.1).unwrap();
    for k in [2, 3] {
        let disc = Discretization::new(&mesh, k).unwrap();
        let data = BoundaryData::homogeneous();
        let dense = |lambda: f64| -> DMatrix<f64> {
            let m = assemble_penalty(&mesh, &disc, 1.0, &PenaltyConfig::with_lambda(lambda), &data)
                .unwrap()
                .matrix();
            DMatrix::from_fn(m.nrows(), m.nrows(), |r, c| m.get(r, c))
        };
        let (one, two) = (dense(1.0), dense(2.0));
        let j1 = &two - &one;
        let j23 = &one - &j1;
        let (o1, o23) = oracle_penalty(&mesh, k, 1.0, &OracleConfig::default());
        assert!(relative_difference(&j1, &o1) < 1e-12, "J1 k={k}: {}", relative_difference(&j1, &o1));
        assert!(relative_difference(&j23, &o23) < 1e-11, "J2+J3 k={k}: {}", relative_difference(&j23, &o23));
    }
}
