use farey_chain::farey::{farey_inverse_left, farey_inverse_right, stern_brocot_nodes};
use farey_chain::*;
use num_bigint::BigInt;
use num_integer::Integer;
use proptest::prelude::*;

fn words_up_to(max: usize) -> impl Iterator<Item = SpinWord> {
    (0..=max).flat_map(SpinWord::all)
}

#[test]
fn every_product_is_unimodular() {
    for w in words_up_to(12) {
        let m = word_to_matrix(&w);
        assert_eq!(m.det(), BigInt::from(1), "{w}");
    }
}

#[test]
fn flip_is_conjugation_by_p() {
    let p = Mat2::p();
    for w in words_up_to(10) {
        let lhs = word_to_matrix(&spin_flip(&w));
        let rhs = &(&p * &word_to_matrix(&w)) * &p;
        assert_eq!(lhs, rhs, "{w}");
    }
}

#[test]
fn generator_determinants() {
    for (m, d) in [
        (Mat2::a0(), 1),
        (Mat2::a1(), 1),
        (Mat2::f0(), 1),
        (Mat2::f1(), -1),
        (Mat2::p(), -1),
    ] {
        assert_eq!(m.det(), BigInt::from(d), "{m}");
    }
    assert_eq!(&(&Mat2::p() * &Mat2::a0()) * &Mat2::p(), Mat2::a1());
}

#[test]
fn level_fractions_distinct_and_reduced() {
    for k in 0..=14 {
        let level = stern_brocot_level(k, DEFAULT_CAP).unwrap();
        assert_eq!(level.len(), 1 << k);
        let mut seen = std::collections::HashSet::new();
        for &(p, q) in &level {
            assert_eq!(p.gcd(&q), 1);
            assert!(p < q);
            assert!(seen.insert((p, q)));
        }
    }
}

#[test]
fn level_one_oracle() {
    // A0 A0 = [[1,0],[2,1]], A0 A1 = [[1,1],[1,2]]; mediants of the columns
    assert_eq!(stern_brocot_level(1, DEFAULT_CAP).unwrap(), vec![(1, 3), (2, 3)]);
    let nodes = stern_brocot_nodes(1, DEFAULT_CAP).unwrap();
    assert_eq!((nodes[0].left.num, nodes[0].left.den), (0, 1));
    assert_eq!((nodes[0].right.num, nodes[0].right.den), (1, 2));
    assert_eq!((nodes[1].left.num, nodes[1].left.den), (1, 2));
}

#[test]
fn level_cap() {
    assert!(matches!(
        stern_brocot_level(12, 1 << 10),
        Err(Error::ResourceCap { .. })
    ));
}

#[test]
fn farey_map_inverts_its_branches() {
    for i in 0..=200 {
        let y = i as f64 / 200.0;
        let left = farey_map(moebius_apply(&Mat2::f0(), y).unwrap()).unwrap();
        assert!((left - y).abs() < 1e-14);
        let right = farey_map(moebius_apply(&Mat2::f1(), y).unwrap()).unwrap();
        assert!((right - y).abs() < 1e-14);
        assert_eq!(moebius_apply(&Mat2::f0(), y).unwrap(), farey_inverse_left(y));
        assert_eq!(moebius_apply(&Mat2::f1(), y).unwrap(), farey_inverse_right(y));
    }
    assert_eq!(farey_map(0.5).unwrap(), 1.0);
    assert_eq!(farey_map(0.0).unwrap(), 0.0);
    assert!((farey_map(2.0 / 3.0).unwrap() - 0.5).abs() < 1e-15);
    assert!(farey_map(1.5).is_err());
}

#[test]
fn action_examples() {
    let ab = word_to_matrix(&"^v".parse().unwrap());
    assert_eq!(action_weight(&ab, 0.0, 1.0).unwrap(), 0.25);
    assert_eq!(action_weight(&ab, 3.7, 0.0).unwrap(), 1.0);
    let x: f64 = 0.6;
    assert_eq!(
        action_weight(&Mat2::a0(), x, 0.8).unwrap(),
        (1.0 + x).powf(-1.6)
    );
    assert_eq!(moebius_apply(&Mat2::f1(), 1.0).unwrap(), 0.5);
}

fn spin() -> impl Strategy<Value = Spin> {
    prop_oneof![Just(Spin::Up), Just(Spin::Down)]
}

proptest! {
    #[test]
    fn flip_is_an_involution(spins in prop::collection::vec(spin(), 0..40)) {
        let w = SpinWord::new(spins);
        prop_assert_eq!(spin_flip(&spin_flip(&w)), w);
    }

    #[test]
    fn long_words_stay_unimodular(spins in prop::collection::vec(spin(), 0..200)) {
        let w = SpinWord::new(spins);
        let m = word_to_matrix(&w);
        prop_assert_eq!(m.det(), BigInt::from(1));
        let parsed: SpinWord = w.to_string().parse().unwrap();
        prop_assert_eq!(parsed, w);
    }
}
