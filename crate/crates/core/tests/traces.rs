use logdamp_core::circle::{build_sign, mult_op, toeplitz_index, winding_number, TrigPoly};
use logdamp_core::ck::Monomial;
use logdamp_core::heat::{
    brute_force_heat_trace, brute_force_toeplitz_trace, closed_form_heat_trace, closed_form_toeplitz_trace,
    enumerated_heat_trace, generator_monomials, oracle_agreement, truncated_matrix_trace,
};
use logdamp_core::ops::{commutator, numerical_rank};
use logdamp_core::words::BoundaryPoint;
use num_complex::Complex64;
use proptest::prelude::*;

fn chain_strategy() -> impl Strategy<Value = (usize, u8, Vec<Monomial>, Vec<f64>)> {
    (2usize..=3).prop_flat_map(|d| {
        let gens = generator_monomials(d);
        let n = gens.len();
        (
            Just(d),
            0..(2 * d) as u8,
            prop::collection::vec(0..n, 1..=2).prop_map(move |ix| ix.into_iter().map(|i| gens[i].clone()).collect()),
            prop::collection::vec(2.5f64..4.0, 2),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn heat_closed_form_matches_truncation((d, t0, chain, s) in chain_strategy()) {
        let t = BoundaryPoint::fixed_point(t0);
        let sv: Vec<Complex64> = s[..chain.len()].iter().map(|x| Complex64::new(*x, 0.0)).collect();
        let closed = closed_form_heat_trace(&chain, &t, d).unwrap().eval(&sv);
        let oracle = brute_force_heat_trace(&chain, &t, d, &sv, 16).unwrap();
        let (err, tol) = oracle_agreement(closed, &oracle, 1e-8);
        prop_assert!(err <= tol, "err {err} tol {tol}");
    }

    #[test]
    fn toeplitz_closed_form_matches_truncation((d, t0, chain, s) in chain_strategy()) {
        let t = BoundaryPoint::fixed_point(t0);
        let sv: Vec<Complex64> = s[..chain.len()].iter().map(|x| Complex64::new(*x, 0.0)).collect();
        let closed = closed_form_toeplitz_trace(&chain, &t, d).unwrap().eval(&sv);
        let oracle = brute_force_toeplitz_trace(&chain, &t, d, &sv, 16).unwrap();
        let (err, tol) = oracle_agreement(closed, &oracle, 1e-8);
        prop_assert!(err <= tol, "err {err} tol {tol}");
    }

    #[test]
    fn toeplitz_index_is_minus_winding(k in -3i64..=3) {
        let u = TrigPoly::monomial(k);
        prop_assert_eq!(toeplitz_index(&u, 32).unwrap(), -k);
        prop_assert_eq!(winding_number(&u, 512), k);
    }

    #[test]
    fn sign_commutator_rank_bounded_by_bandwidth(coeffs in prop::collection::vec(-1.0f64..1.0, 1..=7)) {
        let b = coeffs.len() as i64 / 2;
        let mut p = TrigPoly::constant(Complex64::new(0.0, 0.0));
        for (j, c) in coeffs.iter().enumerate() {
            let mono = TrigPoly::monomial(j as i64 - b).mul(&TrigPoly::constant(Complex64::new(*c, 0.0)));
            p = p.add(&mono);
        }
        let m = 16;
        let comm = commutator(&build_sign(m).to_operator(), &mult_op(&p, m)).unwrap();
        prop_assert!(numerical_rank(&comm, 1e-10) <= 2 * p.bandwidth());
    }
}

#[test]
fn grouped_oracle_equals_vertex_enumeration() {
    let t = BoundaryPoint::fixed_point(0);
    let s = [Complex64::new(2.5, 0.0), Complex64::new(3.0, 0.0)];
    for chain in [
        vec![Monomial::isometry(0), Monomial::coisometry(0)],
        vec![Monomial::coisometry(1), Monomial::isometry(2)],
        vec![Monomial::unit(), Monomial::isometry(3)],
    ] {
        let s = &s[..chain.len()];
        let grouped = brute_force_heat_trace(&chain, &t, 2, s, 5).unwrap().value;
        let listed = enumerated_heat_trace(&chain, &t, 2, s, 5, false).unwrap();
        assert!((grouped - listed).norm() <= 1e-12 * listed.norm().max(1.0), "{chain:?}");
    }
}

#[test]
fn vertex_enumeration_close_to_matrix_product() {
    let t = BoundaryPoint::fixed_point(0);
    let chain = vec![Monomial::isometry(0), Monomial::coisometry(0)];
    let s = [Complex64::new(2.5, 0.0), Complex64::new(2.5, 0.0)];
    let listed = enumerated_heat_trace(&chain, &t, 2, &s, 4, false).unwrap();
    let matrix = truncated_matrix_trace(&chain, &t, 2, &s, 4).unwrap();
    // the compressed product drops paths that leave the window and come back
    assert!((listed - matrix).norm() <= 1e-6 * listed.norm(), "{listed} vs {matrix}");
}
