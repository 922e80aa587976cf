use num_complex::Complex64;
use ruby_tcc::code::{brute_force_code_dimension, StabilizerGroup};
use ruby_tcc::hamiltonian::{build_color_code, build_toric, build_two_body, Couplings};
use ruby_tcc::iom::{all_plaquette_ioms, logical_algebra};
use ruby_tcc::lattice::{build_ruby, build_square, contract_triangles};
use ruby_tcc::spectral::{
    cluster, commuting_spectrum, expand_levels, lowest_eigs, matvec, Method, SolverOptions,
    StateVector,
};

#[test]
fn integrals_of_motion_commute_with_h_on_states() {
    let lat = build_ruby(1, 1).unwrap();
    let colex = contract_triangles(&lat).unwrap();
    let h = build_two_body(&lat, &Couplings::new(0.7, -1.3, 0.4).unwrap());
    let mut ops: Vec<_> = all_plaquette_ioms(&lat, &h)
        .unwrap()
        .into_iter()
        .flat_map(|p| [p.a.op, p.b.op, p.c.op])
        .collect();
    let alg = logical_algebra(&lat, &colex, &h).unwrap();
    ops.extend(alg.ops().into_iter().map(|(_, iom)| iom.op.clone()));
    let v: StateVector<Complex64> = StateVector::random(h.n(), 11).unwrap();
    let hv = matvec(&h, &v).unwrap();
    for op in &ops {
        let hiv = matvec(&h, &v.apply_pauli(op).unwrap()).unwrap();
        let ihv = hv.apply_pauli(op).unwrap();
        assert!(hiv.distance(&ihv).unwrap() < 1e-10, "{}", op.to_text());
    }
}

#[test]
fn iterative_solver_matches_commuting_spectrum() {
    // 12-qubit color code: commuting, so the exact spectrum is known from
    // sign patterns, while the solver treats it as a generic operator.
    let colex = contract_triangles(&build_ruby(2, 1).unwrap()).unwrap();
    let h = build_color_code(&colex).unwrap();
    assert_eq!(h.n(), 12);
    let exact = expand_levels(&commuting_spectrum(&h, 1e-12).unwrap()).unwrap();
    assert_eq!(exact.len(), 1 << 12);
    let m = 40;
    let report = lowest_eigs(&h, m, &SolverOptions::default()).unwrap();
    assert_ne!(report.method, Method::Diagonal);
    for (a, b) in report.eigenvalues.iter().zip(&exact) {
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }
    assert!(report.residuals.iter().all(|r| *r <= 1e-8));
}

#[test]
fn ground_degeneracy_equals_code_dimension() {
    for h in [
        build_toric(&build_square(2).unwrap()),
        build_color_code(&contract_triangles(&build_ruby(1, 1).unwrap()).unwrap()).unwrap(),
    ] {
        let g = StabilizerGroup::from_terms(&h).unwrap();
        let dim = brute_force_code_dimension(&g).unwrap();
        let report = lowest_eigs(&h, dim + 1, &SolverOptions::default()).unwrap();
        let clusters = cluster(&report.eigenvalues, 1e-8);
        assert_eq!(clusters[0].multiplicity, dim);
    }
}

#[test]
fn seeded_solves_are_reproducible() {
    let colex = contract_triangles(&build_ruby(2, 1).unwrap()).unwrap();
    let h = build_color_code(&colex).unwrap();
    let opts = SolverOptions {
        seed: 5,
        ..SolverOptions::default()
    };
    let a = lowest_eigs(&h, 8, &opts).unwrap();
    let b = lowest_eigs(&h, 8, &opts).unwrap();
    assert_eq!(a, b);
}

#[test]
fn decoupled_triangles_use_diagonal_path() {
    let h = build_two_body(
        &build_ruby(1, 1).unwrap(),
        &Couplings::new(0.0, 0.0, -1.0).unwrap(),
    );
    let report = lowest_eigs(&h, 64, &SolverOptions::default()).unwrap();
    assert_eq!(report.method, Method::Diagonal);
    // Ferromagnetic sign: each triangle has a doubly degenerate -3 ground level.
    assert_eq!(report.eigenvalues[0], -18.0);
    assert_eq!(report.clusters[0].multiplicity, 64);
}
