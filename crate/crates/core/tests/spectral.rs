use farey_chain::spectral::TransferOperator;
use farey_chain::*;

fn en() -> Enumerator {
    Enumerator::default()
}

fn knauf(k: usize, x: f64, beta: f64) -> f64 {
    z_brute(&PartitionSpec::knauf(k, x, beta).unwrap(), &en()).unwrap()
}

fn solve_at(beta: f64) -> SpectralResult {
    leading_eigen(beta, 64, 1e-13, 20_000).unwrap()
}

#[test]
fn iterates_reproduce_partition_function() {
    let g = ChebyshevGrid::new(64).unwrap();
    let mut f = GridFunction::constant(g, 1.0);
    for _ in 0..8 {
        f = transfer_apply(&f, 0.7);
    }
    let z = 2.0 * knauf(7, 0.0, 0.7);
    assert!((f.values()[0] - z).abs() <= 1e-12 * z);
}

#[test]
fn eigenvalue_matches_partition_ratios() {
    let res = solve_at(0.5);
    let ks: Vec<usize> = (18..=22).collect();
    let ratios: Vec<f64> = ks
        .iter()
        .map(|&k| knauf(k + 1, 0.0, 0.5) / knauf(k, 0.0, 0.5))
        .collect();
    // ratios approach lambda from above
    assert!(ratios.windows(2).all(|w| w[1] < w[0] && w[1] > res.lambda));
    assert!((ratios[4] - res.lambda).abs() <= 1e-4);
    let ex = extrapolate_infinite_left(&ratios, &ks).unwrap();
    assert!((ex.value - res.lambda).abs() <= 1e-6, "{}", ex.value - res.lambda);
}

#[test]
fn amplitude_matches_partition_growth() {
    let res = solve_at(0.5);
    let amp = res.amplitude.unwrap();
    let k = 22;
    let direct = knauf(k, 0.0, 0.5) / res.lambda.powi(k as i32);
    assert!((direct - amp).abs() <= 1e-3 * amp);
}

#[test]
fn free_energy_is_independent_of_x() {
    let res = solve_at(0.5);
    let f = free_energy(&res).unwrap();
    for x in [0.0, 1.0, 2.0] {
        let finite = -(knauf(21, x, 0.5) / knauf(20, x, 0.5)).ln() / 0.5;
        assert!((finite - f).abs() <= 1e-3, "x={x}");
    }
    assert_eq!(free_energy(&solve_at(1.5)).unwrap(), 0.0);
}

#[test]
fn eigenvalue_is_non_increasing_in_beta() {
    let lambdas: Vec<f64> = (0..=10).map(|i| solve_at(i as f64 / 10.0).lambda).collect();
    assert!(lambdas.windows(2).all(|w| w[1] <= w[0]), "{lambdas:?}");
    assert!(lambdas.iter().all(|&l| (1.0..=2.0 + 1e-12).contains(&l)));
}

#[test]
fn eigenfunction_shape() {
    for beta in [0.1, 0.5, 0.9] {
        let res = solve_at(beta);
        let v = res.eigenfunction.values();
        assert_eq!(v[0], 1.0);
        assert!(v.iter().all(|&a| a > 0.0));
        assert!(v.windows(2).all(|w| w[1] <= w[0]));
    }
}

#[test]
fn residuals_and_identities() {
    let res = solve_at(0.5);
    assert!(res.lewis_residual <= 1e-8);
    let (c1, c2) = eigen_identities(&res);
    assert!(c1 <= 1e-8 && c2 <= 1e-8);
    let near = solve_at(0.9);
    let (c1, c2) = eigen_identities(&near);
    assert!(c1 <= 1e-6 && c2 <= 1e-6);
}

#[test]
fn spectral_convergence_in_nodes() {
    let r: Vec<f64> = [8, 16, 32]
        .into_iter()
        .map(|n| leading_eigen(0.5, n, 1e-14, 20_000).unwrap().lewis_residual)
        .collect();
    assert!(r[0] > r[1] && r[1] > r[2], "{r:?}");
}

#[test]
fn edge_correlation_length() {
    let zero = solve_at(0.0);
    let cl = correlation_lengths(&zero).unwrap();
    assert!((cl.xi_r - 1.0 / std::f64::consts::LN_2).abs() < 1e-12);
    let lengths: Vec<f64> = [0.9, 0.95, 0.99]
        .into_iter()
        .map(|b| correlation_lengths(&solve_at(b)).unwrap().xi_r)
        .collect();
    assert!(lengths.windows(2).all(|w| w[1] > w[0]));
    for b in [0.2, 0.6] {
        let res = solve_at(b);
        let cl = correlation_lengths(&res).unwrap();
        assert!((cl.xi_r * res.lambda.ln() - 1.0).abs() < 1e-14);
    }
    assert!(correlation_lengths(&solve_at(1.0)).is_err());
}

#[test]
fn near_critical_window_grades() {
    let res = leading_eigen(0.97, 32, 1e-15, 10).unwrap();
    assert_eq!(res.grade, ConvergenceGrade::NearCritical);
    assert!(res.iterations > 10);
    let crit = solve_at(1.0);
    assert_eq!(crit.grade, ConvergenceGrade::Critical);
    assert!((crit.lambda - 1.0).abs() <= 1e-3);
}

#[test]
fn parallel_and_sequential_operator_agree() {
    let g = ChebyshevGrid::new(300).unwrap();
    let f = GridFunction::from_fn(g.clone(), |x| (2.0 + x).recip()).unwrap();
    let a = TransferOperator::new(g.clone(), 0.6).unwrap().with_exec(Exec::Sequential).apply(&f);
    let b = TransferOperator::new(g, 0.6).unwrap().with_exec(Exec::Parallel).apply(&f);
    assert_eq!(a, b);
}
