use logdamp_core::circle::MoebiusMap;
use logdamp_core::moscovici::*;
use logdamp_core::Rat;
use num::One;
use proptest::prelude::*;

fn rat(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

fn factorial_u128(n: u32) -> u128 {
    (1..=n as u128).product()
}

fn alpha_oracle(k: &[u32]) -> (u128, u128) {
    let mut den = 1u128;
    let mut partial = 0u128;
    for (i, kj) in k.iter().enumerate() {
        partial += *kj as u128;
        den *= factorial_u128(*kj) * (partial + i as u128 + 1);
    }
    (1, den)
}

#[test]
fn alpha_matches_factorial_products() {
    for m in 1..=3 {
        for total in 0..=4 {
            for k in MultiIndex::with_total(m, total) {
                let (n, d) = alpha_oracle(&k.0);
                assert_eq!(alpha(&k).unwrap(), Rat::new((n as i64).into(), (d as i64).into()), "{k:?}");
            }
        }
    }
}

#[test]
fn sigma_tilde_at_half_is_factorial() {
    for n in 0..=8usize {
        let half = Rat::one() / rat(2);
        let v = sigma_tilde(n).iter().enumerate().fold(Rat::from_integer(0.into()), |acc, (j, c)| {
            acc + c * num::pow(half.clone(), j)
        });
        assert_eq!(v, rat(factorial_u128(n as u32) as i64));
    }
}

#[test]
fn free_group_verdicts() {
    let f = Family::FreeGroup { d: 2, t0: 0 };
    let r = counterexample_verdict(&f, Some(0)).unwrap();
    assert_eq!(r.pairing, -1);
    assert!(r.pass);
    assert!(r.cochains.iter().all(|c| c.phi_exact.as_deref() == Some("0")));
    let r = counterexample_verdict(&f, Some(1)).unwrap();
    assert_eq!(r.pairing, 1);
    let r = counterexample_verdict(&f, Some(2)).unwrap();
    assert_eq!(r.pairing, 0);
    assert!(!r.pass);
}

#[test]
fn circle_verdict() {
    let r = counterexample_verdict(&Family::Circle, None).unwrap();
    assert_eq!(r.pairing, -1);
    assert!(r.pass);
}

#[test]
fn moebius_verdict() {
    let f = Family::Moebius { gamma: MoebiusMap::hyperbolic(1.0), max_mode: 64, quad_points: 512 };
    let r = counterexample_verdict(&f, None).unwrap();
    assert!(r.cochains.iter().all(|c| c.all_entire));
    assert!(r.pass, "{:?}", r.pairing);
}

#[test]
fn twist_identity_on_circle_window() {
    let d = logdamp_core::circle::build_dirac(10);
    assert!(twist_identity_defect(&d, 1).unwrap() < 1e-12);
}

proptest! {
    #[test]
    fn twist_identity_random(seed in any::<u64>(), vals in prop::collection::vec(0.1f64..50.0, 3..12)) {
        let n = vals.len();
        let basis = logdamp_core::ops::LabeledBasis {
            labels: (0..n as i64).map(logdamp_core::ops::Label::Mode).collect(),
            truncation: n,
        };
        let signed: Vec<f64> = vals.iter().enumerate().map(|(i, v)| if i % 2 == 0 { *v } else { -*v }).collect();
        let d = logdamp_core::ops::DiagonalOperator::new(basis, signed).unwrap();
        prop_assert!(twist_identity_defect(&d, seed).unwrap() < 1e-9 * 2500.0);
    }

    #[test]
    fn alpha_positive_and_bounded(k in prop::collection::vec(0u32..5, 1..4)) {
        let a = alpha(&MultiIndex(k)).unwrap();
        prop_assert!(a > Rat::from_integer(0.into()) && a <= Rat::one());
    }
}
