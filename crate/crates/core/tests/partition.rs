use farey_chain::*;
use proptest::prelude::*;

fn en() -> Enumerator {
    Enumerator::default()
}

/// Sum over explicit big-integer matrix products with the leading `A0`.
fn oracle_knauf(k: usize, x: f64, beta: f64) -> f64 {
    SpinWord::all(k)
        .map(|w| {
            let m = &Mat2::a0() * &word_to_matrix(&w);
            action_weight(&m, x, beta).unwrap()
        })
        .sum()
}

fn oracle_tilde(k: usize, x: f64, beta: f64) -> f64 {
    SpinWord::all(k)
        .map(|w| action_weight(&word_to_matrix(&w), x, beta).unwrap())
        .sum()
}

fn knauf(k: usize, x: f64, beta: f64) -> f64 {
    z_brute(&PartitionSpec::knauf(k, x, beta).unwrap(), &en()).unwrap()
}

fn constrained(pat: &ConstraintPattern, x: f64, beta: f64) -> f64 {
    z_constrained(pat, &ChainParams::new(x, beta).unwrap(), &en()).unwrap()
}

#[test]
fn enumeration_matches_matrix_oracle() {
    for k in 0..=10 {
        for &(x, beta) in &[(0.0, 1.0), (1.0 / 3.0, 0.7), (2.5, 1.5), (1.0, 0.3)] {
            let z = knauf(k, x, beta);
            assert!((z - oracle_knauf(k, x, beta)).abs() <= 1e-13 * z, "k={k}");
            let t = z_brute(&PartitionSpec::tilde(k, x, beta).unwrap(), &en()).unwrap();
            assert!((t - oracle_tilde(k, x, beta)).abs() <= 1e-13 * t, "k={k}");
        }
    }
}

#[test]
fn spec_examples() {
    assert_eq!(knauf(0, 1.0, 1.0), 0.25);
    assert_eq!(knauf(1, 0.0, 1.0), 1.25);
    let x: f64 = 0.3;
    let tilde1 = z_brute(&PartitionSpec::tilde(1, x, 0.6).unwrap(), &en()).unwrap();
    assert!((tilde1 - 1.0 - (1.0 + x).powf(-1.2)).abs() < 1e-15);
    let tilde2 = z_recursive(&PartitionSpec::tilde(2, x, 0.6).unwrap(), &en()).unwrap();
    let sum = 1.0 + knauf(0, x, 0.6) + knauf(1, x, 0.6);
    assert!((tilde2 - sum).abs() < 1e-14);
}

#[test]
fn sandwich_bound() {
    for k in 0..=12 {
        for &beta in &[0.3, 1.0, 1.7] {
            let top = knauf(k, 0.0, beta);
            for &x in &[0.0, 0.2, 1.0, 3.0] {
                let z = knauf(k, x, beta);
                let low = (1.0 + (k as f64 + 1.0) * x).powf(-2.0 * beta);
                assert!(low <= z * (1.0 + 1e-14) && z <= top * (1.0 + 1e-14));
            }
        }
    }
}

#[test]
fn grid_matches_enumeration() {
    let g = z_grid(11, 0.5, 64).unwrap();
    let z = knauf(10, 0.0, 0.5);
    assert!((g.values()[0] - z).abs() <= 1e-10 * z);
    for (&x, &v) in g.nodes().iter().zip(g.values()) {
        let z = knauf(10, x, 0.5);
        assert!((v - z).abs() <= 1e-10 * z);
    }
    // values beyond 1 through evenness
    for &x in &[1.5, 2.0, 4.0] {
        let z = knauf(10, x, 0.5);
        assert!((g.eval_even(x, 0.5) - z).abs() <= 1e-9 * z, "x={x}");
    }
}

#[test]
fn fixing_one_site_partitions_the_sum() {
    for k in 1..=12 {
        for pos in 0..k {
            let up = ConstraintPattern::single(pos, Spin::Up, k - 1 - pos);
            let total = knauf(k, 0.4, 0.9);
            let split = constrained(&up, 0.4, 0.9) + constrained(&up.flipped(), 0.4, 0.9);
            assert!((split - total).abs() <= 1e-13 * total);
        }
    }
}

#[test]
fn symmetric_point_has_no_bias() {
    for k in 1..=12 {
        for pos in 0..k {
            let up = ConstraintPattern::single(pos, Spin::Up, k - 1 - pos);
            let a = constrained(&up, 1.0, 1.3);
            let b = constrained(&up.flipped(), 1.0, 1.3);
            assert!((a - b).abs() <= 1e-13 * a);
        }
    }
}

#[test]
fn up_at_x_is_down_at_inverse() {
    for k in 1..=12 {
        for pos in 0..k {
            let up = ConstraintPattern::single(pos, Spin::Up, k - 1 - pos);
            for &x in &[0.25, 0.5, 3.0] {
                let p_up = constrained(&up, x, 0.8) / knauf(k, x, 0.8);
                let p_down = constrained(&up.flipped(), 1.0 / x, 0.8) / knauf(k, 1.0 / x, 0.8);
                assert!((p_up - p_down).abs() < 1e-13);
            }
        }
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let spec = PartitionSpec::knauf(18, 1.0 / 3.0, 0.7).unwrap();
    let pat: ConstraintPattern = "l=5 ^ n=3 v r=8".parse().unwrap();
    let p = ChainParams::new(0.2, 1.1).unwrap();
    let run = || {
        (
            z_brute(&spec, &en()).unwrap().to_bits(),
            z_recursive(&spec, &en()).unwrap().to_bits(),
            z_constrained(&pat, &p, &en()).unwrap().to_bits(),
        )
    };
    let seq = Enumerator::default().with_exec(Exec::Sequential);
    let reference = (
        z_brute(&spec, &seq).unwrap().to_bits(),
        z_recursive(&spec, &seq).unwrap().to_bits(),
        z_constrained(&pat, &p, &seq).unwrap().to_bits(),
    );
    for threads in [1, 2, 3, 8] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        assert_eq!(pool.install(run), reference, "{threads} threads");
    }
}

#[test]
fn long_patterns_are_rejected() {
    let pat = ConstraintPattern::single(0, Spin::Up, 95);
    let e = Enumerator::new(HARD_CAP, Exec::Sequential).unwrap();
    assert!(matches!(
        z_constrained(&pat, &ChainParams::new(0.0, 1.0).unwrap(), &e),
        Err(Error::PatternTooLong { .. }) | Err(Error::ResourceCap { .. })
    ));
    let spec = PartitionSpec::knauf(95, 0.0, 1.0).unwrap();
    assert!(z_brute(&spec, &e).is_err());
}

fn site() -> impl Strategy<Value = Option<Spin>> {
    prop_oneof![Just(None), Just(Some(Spin::Up)), Just(Some(Spin::Down))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn both_fixings_sum_to_the_whole(
        sites in prop::collection::vec(site(), 1..13),
        pos in 0usize..13,
        x in 0.0f64..3.0,
        beta in 0.0f64..2.0,
    ) {
        let mut sites = sites;
        let pos = pos % sites.len();
        sites[pos] = None;
        let mut up = sites.clone();
        up[pos] = Some(Spin::Up);
        let mut down = sites.clone();
        down[pos] = Some(Spin::Down);
        let whole = if sites.iter().all(Option::is_none) {
            knauf(sites.len(), x, beta)
        } else {
            constrained(&ConstraintPattern::from_sites(&sites).unwrap(), x, beta)
        };
        let parts = constrained(&ConstraintPattern::from_sites(&up).unwrap(), x, beta)
            + constrained(&ConstraintPattern::from_sites(&down).unwrap(), x, beta);
        prop_assert!((parts - whole).abs() <= 1e-12 * whole);
    }

    #[test]
    fn recursion_tracks_enumeration(k in 0usize..14, x in 0.0f64..5.0, beta in 0.0f64..2.5) {
        let spec = PartitionSpec::knauf(k, x, beta).unwrap();
        let a = z_brute(&spec, &en()).unwrap();
        let b = z_recursive(&spec, &en()).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn evenness_holds(k in 1usize..12, x in 0.05f64..4.0, beta in 0.0f64..2.0) {
        let lhs = knauf(k, x, beta);
        let rhs = x.powf(-2.0 * beta) * knauf(k, 1.0 / x, beta);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs);
    }
}
