//! The identity suite behind `--command verify`.

use std::f64::consts::PI;

use farey_chain::spectral::TransferOperator;
use farey_chain::*;
use serde_json::json;

use crate::commands::{enumerator, extrapolation_lengths};
use crate::config::RunConfig;
use crate::output::{Cell, Table};
use crate::{Failure, Outcome, EXIT_OK, EXIT_VERIFY};

pub const SUITE: &str = "default";

struct Ctx {
    en: Enumerator,
    /// Largest enumerated chain length.
    kmax: usize,
    nodes: usize,
}

/// Measured deviation plus any structural condition that must also hold.
struct Measured {
    value: f64,
    holds: bool,
    detail: String,
}

fn measured(value: f64, detail: impl Into<String>) -> Measured {
    Measured {
        value,
        holds: true,
        detail: detail.into(),
    }
}

type Run = fn(&Ctx) -> Result<Measured>;

struct Check {
    name: &'static str,
    identity: &'static str,
    tol: f64,
    run: Run,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn knauf(ctx: &Ctx, k: usize, x: f64, beta: f64) -> Result<f64> {
    z_brute(&PartitionSpec::knauf(k, x, beta)?, &ctx.en)
}

fn spectrum(ctx: &Ctx, beta: f64) -> Result<SpectralResult> {
    solve(
        beta,
        &SolverOptions {
            nodes: ctx.nodes,
            ..SolverOptions::default()
        },
    )
}

fn brute_vs_recursion(ctx: &Ctx) -> Result<Measured> {
    let mut worst: f64 = 0.0;
    for k in 0..=ctx.kmax {
        for x in [0.0, 1.0 / 3.0, 1.0, 2.5] {
            for beta in [0.3, 0.7, 1.0, 1.5] {
                let rec = z_recursive(&PartitionSpec::knauf(k, x, beta)?, &ctx.en)?;
                worst = worst.max(rel(rec, knauf(ctx, k, x, beta)?));
            }
        }
    }
    Ok(measured(worst, format!("k <= {}", ctx.kmax)))
}

fn operator_iterates(ctx: &Ctx) -> Result<Measured> {
    let mut worst: f64 = 0.0;
    for beta in [0.3, 0.7, 1.2] {
        let op = TransferOperator::new(ChebyshevGrid::new(ctx.nodes)?, beta)?;
        for k in 1..=ctx.kmax.max(1) {
            let it = op.iterate_constant(k);
            let scale = it.max_abs();
            for (&x, &v) in it.nodes().iter().zip(it.values()) {
                let z = 2.0 * z_recursive(&PartitionSpec::knauf(k - 1, x, beta)?, &ctx.en)?;
                worst = worst.max((v - z).abs() / scale);
            }
        }
    }
    Ok(measured(worst, format!("k <= {}, {} nodes", ctx.kmax.max(1), ctx.nodes)))
}

fn sum_rule(ctx: &Ctx) -> Result<Measured> {
    let mut worst: f64 = 0.0;
    for x in [0.0, 0.25, 1.0, 3.0] {
        for beta in [0.3, 0.7, 1.0, 1.5] {
            let mut partial = 1.0;
            for k in 0..=ctx.kmax {
                let tilde = z_brute(&PartitionSpec::tilde(k, x, beta)?, &ctx.en)?;
                worst = worst.max(rel(partial, tilde));
                partial += knauf(ctx, k, x, beta)?;
            }
        }
    }
    Ok(measured(worst, format!("k <= {}", ctx.kmax)))
}

fn partition_evenness(ctx: &Ctx) -> Result<Measured> {
    let mut worst: f64 = 0.0;
    for beta in [0.3, 0.7, 1.2] {
        for k in 1..=ctx.kmax {
            for i in 1..=16 {
                let x = 0.25 * i as f64;
                let lhs = knauf(ctx, k, x, beta)?;
                let rhs = x.powf(-2.0 * beta) * knauf(ctx, k, 1.0 / x, beta)?;
                worst = worst.max((lhs - rhs).abs() / lhs);
            }
        }
    }
    Ok(measured(worst, format!("k <= {}, x in 0.25..4", ctx.kmax)))
}

fn eigenfunction_evenness(ctx: &Ctx) -> Result<Measured> {
    let mut worst: f64 = 0.0;
    for beta in [0.3, 0.5, 0.7] {
        worst = worst.max(eigenfunction_evenness_residual(&spectrum(ctx, beta)?, 200));
    }
    Ok(measured(worst, "beta in 0.3, 0.5, 0.7"))
}

fn identities_on(ctx: &Ctx, betas: &[f64], pick: fn((f64, f64)) -> f64) -> Result<Measured> {
    let mut worst: f64 = 0.0;
    for &beta in betas {
        worst = worst.max(pick(eigen_identities(&spectrum(ctx, beta)?)));
    }
    Ok(measured(worst, format!("beta in {betas:?}")))
}

fn eigen_identity_a1(ctx: &Ctx) -> Result<Measured> {
    identities_on(ctx, &[0.3, 0.5, 0.7], |c| c.0)
}

fn eigen_identity_a2(ctx: &Ctx) -> Result<Measured> {
    identities_on(ctx, &[0.3, 0.5, 0.7], |c| c.1)
}

fn eigen_identities_near_critical(ctx: &Ctx) -> Result<Measured> {
    identities_on(ctx, &[0.9], |c| c.0.max(c.1))
}

fn lewis_three_term(ctx: &Ctx) -> Result<Measured> {
    let mut worst: f64 = 0.0;
    for beta in [0.3, 0.5, 0.7] {
        worst = worst.max(spectrum(ctx, beta)?.lewis_residual);
    }
    Ok(measured(worst, "beta in 0.3, 0.5, 0.7, nodes and midpoints"))
}

fn endpoint_beta_zero(ctx: &Ctx) -> Result<Measured> {
    let l = spectrum(ctx, 0.0)?.lambda;
    Ok(measured((l - 2.0).abs(), format!("lambda = {l}")))
}

fn endpoint_beta_one(ctx: &Ctx) -> Result<Measured> {
    let res = spectrum(ctx, 1.0)?;
    Ok(measured(
        (res.lambda - 1.0).abs(),
        format!("lambda = {}, {} after {} iterations", res.lambda, res.grade, res.iterations),
    ))
}

fn zeta_values(_: &Ctx) -> Result<Measured> {
    let z2 = (zeta(2.0)? - PI * PI / 6.0).abs();
    let z4 = (zeta(4.0)? - PI.powi(4) / 90.0).abs();
    Ok(measured(z2.max(z4), format!("zeta(2) {z2:.1e}, zeta(4) {z4:.1e}")))
}

/// The approach is algebraic in `k`, so the closer the limit the longer the
/// chain it needs.
fn zeta_limit(ctx: &Ctx) -> Result<Measured> {
    let mut worst: f64 = 0.0;
    let mut holds = true;
    let mut parts = Vec::new();
    for (beta, k) in [(2.0, 24), (1.5, 40)] {
        let limit = 2.0 * zeta(2.0 * beta - 1.0)? / zeta(2.0 * beta)?;
        let op = TransferOperator::new(ChebyshevGrid::new(ctx.nodes)?, beta)?;
        let seq: Vec<f64> = (1..=k).map(|j| op.iterate_constant(j).values()[0]).collect();
        let monotone = seq.windows(2).all(|w| w[0] < w[1]) && seq.iter().all(|&v| v < limit);
        let gap = limit - seq[k - 1];
        holds &= monotone;
        worst = worst.max(gap.abs());
        parts.push(format!(
            "beta={beta} k={k}: gap {gap:.2e}{}",
            if monotone { "" } else { " (not monotone from below)" }
        ));
    }
    Ok(Measured {
        value: worst,
        holds,
        detail: parts.join(", "),
    })
}

fn beta_zero_count(ctx: &Ctx) -> Result<Measured> {
    let mut worst: f64 = 0.0;
    for k in 0..=ctx.kmax {
        let z = knauf(ctx, k, 0.7, 0.0)?;
        worst = worst.max((z - 2f64.powi(k as i32)).abs());
    }
    Ok(measured(worst, format!("k <= {}", ctx.kmax)))
}

fn infinite_left(pattern: ConstraintPattern, beta: f64) -> Result<ExpectationQuery> {
    Ok(ExpectationQuery {
        pattern,
        params: ChainParams::new(0.0, beta)?,
        mode: ExpectationMode::InfiniteLeft,
    })
}

fn extrapolated(ctx: &Ctx, q: &ExpectationQuery) -> Result<Extrapolation> {
    let lengths = extrapolation_lengths(q, &ctx.en)?;
    expect_enumerated(q, &lengths, &ctx.en)
}

fn right_edge_law(ctx: &Ctx) -> Result<Measured> {
    let res = spectrum(ctx, 0.5)?;
    let mut worst: f64 = 0.0;
    for r in 0..=3 {
        let q = infinite_left(ConstraintPattern::single(0, Spin::Up, r), 0.5)?;
        let ex = extrapolated(ctx, &q)?;
        worst = worst.max((ex.value - expect_right_edge_infinite(r, &res)?).abs());
    }
    Ok(measured(worst, "beta = 0.5, r = 0..3"))
}

fn x_one_lengths(ctx: &Ctx) -> usize {
    ctx.kmax.min(12)
}

fn x_one_single_spin(ctx: &Ctx) -> Result<Measured> {
    let p = ChainParams::new(1.0, 0.8)?;
    let mut worst: f64 = 0.0;
    for len in 1..=x_one_lengths(ctx) {
        for l in 0..len {
            let pat = ConstraintPattern::single(l, Spin::Up, len - 1 - l);
            let v = expect_finite(&ExpectationQuery::finite(pat, p), &ctx.en)?;
            worst = worst.max((v - 0.5).abs());
        }
    }
    Ok(measured(worst, format!("beta = 0.8, lengths <= {}", x_one_lengths(ctx))))
}

fn x_one_two_spin(ctx: &Ctx) -> Result<Measured> {
    let p = ChainParams::new(1.0, 0.8)?;
    let e = |pat: ConstraintPattern| expect_finite(&ExpectationQuery::finite(pat, p), &ctx.en);
    let mut worst: f64 = 0.0;
    for len in 2..=x_one_lengths(ctx) {
        for l in 0..len - 1 {
            for n in 0..=len - 2 - l {
                let r = len - 2 - l - n;
                let pair = |a, b| ConstraintPattern::pair(l, a, n, b, r);
                let uu = e(pair(Spin::Up, Spin::Up))?;
                let dd = e(pair(Spin::Down, Spin::Down))?;
                let ud = e(pair(Spin::Up, Spin::Down))?;
                let du = e(pair(Spin::Down, Spin::Up))?;
                let mirrored = e(pair(Spin::Up, Spin::Down).reversed())?;
                worst = worst
                    .max((uu - dd).abs())
                    .max((ud - du).abs())
                    .max((ud - mirrored).abs());
            }
        }
    }
    Ok(measured(worst, format!("beta = 0.8, lengths <= {}", x_one_lengths(ctx))))
}

fn cluster_n_independence(ctx: &Ctx) -> Result<Measured> {
    let res = spectrum(ctx, 0.5)?;
    let mut worst: f64 = 0.0;
    for r in 1..=4 {
        let base = expect_cluster(ClusterKind::UD, 0, r, &res)?;
        for n in 0..=8 {
            for kind in [ClusterKind::UD, ClusterKind::DD] {
                worst = worst.max((expect_cluster(kind, n, r, &res)? - base).abs());
            }
        }
    }
    Ok(measured(worst, "beta = 0.5, n = 0..8, r = 1..4"))
}

fn cluster_enumeration(ctx: &Ctx) -> Result<Measured> {
    let res = spectrum(ctx, 0.5)?;
    let lambda = res.lambda;
    let mut worst: f64 = 0.0;
    for kind in [ClusterKind::UD, ClusterKind::DD] {
        for (n, r) in [(0, 1), (2, 1), (1, 2), (0, 3)] {
            let q = infinite_left(kind.pattern(0, n, r)?, 0.5)?;
            let target = (lambda - 1.0) / (2.0 * lambda.powi(r as i32));
            worst = worst.max((extrapolated(ctx, &q)?.value - target).abs());
        }
    }
    Ok(measured(worst, "beta = 0.5"))
}

fn critical_approach(ctx: &Ctx) -> Result<Measured> {
    let lambdas = [0.9, 0.95, 0.99]
        .into_iter()
        .map(|b| spectrum(ctx, b).map(|r| r.lambda))
        .collect::<Result<Vec<_>>>()?;
    let mut violations = lambdas.iter().filter(|&&l| l <= 1.0).count();
    for r in 1..=4 {
        let run: Vec<f64> = lambdas.iter().map(|l| 1.0 / l.powi(r)).collect();
        let down: Vec<f64> = lambdas.iter().map(|l| (l - 1.0) / l.powi(r)).collect();
        violations += run.windows(2).filter(|w| !(w[0] < w[1] && w[1] < 1.0)).count();
        violations += down.windows(2).filter(|w| !(w[0] > w[1] && w[1] > 0.0)).count();
    }
    Ok(measured(
        violations as f64,
        format!("monotonicity violations; lambda on 0.9, 0.95, 0.99: {lambdas:.5?}"),
    ))
}

fn two_spin_bounds(ctx: &Ctx) -> Result<Measured> {
    let res = spectrum(ctx, 0.5)?;
    let (lo, hi) = bounds_two_spin_infinite(3, &res)?;
    let q = ExpectationQuery::parse("inf ^ n=3 ^ inf", ChainParams::new(0.0, 0.5)?)?;
    let v = extrapolated(ctx, &q)?.value;
    Ok(measured(
        (lo - v).max(v - hi).max(0.0),
        format!("beta = 0.5: {v:.4} in [{lo:.4}, {hi:.4}]"),
    ))
}

const CHECKS: &[Check] = &[
    Check {
        name: "brute-vs-recursion",
        identity: "exhaustive Z_k = two-branch recursion",
        tol: 1e-10,
        run: brute_vs_recursion,
    },
    Check {
        name: "operator-iterates",
        identity: "K^k 1 = 2 Z_(k-1)",
        tol: 1e-10,
        run: operator_iterates,
    },
    Check {
        name: "sum-rule",
        identity: "Z~_k = 1 + sum_(i<k) Z_i",
        tol: 1e-12,
        run: sum_rule,
    },
    Check {
        name: "partition-evenness",
        identity: "Z_k(x) = x^(-2 beta) Z_k(1/x)",
        tol: 1e-10,
        run: partition_evenness,
    },
    Check {
        name: "beta-zero-count",
        identity: "Z_k = 2^k at beta = 0",
        tol: 0.0,
        run: beta_zero_count,
    },
    Check {
        name: "eigenfunction-evenness",
        identity: "a(x) = x^(-2 beta) a(1/x)",
        tol: 1e-8,
        run: eigenfunction_evenness,
    },
    Check {
        name: "eigen-identity-a1",
        identity: "a(1) = (lambda - 1) a(0)",
        tol: 1e-8,
        run: eigen_identity_a1,
    },
    Check {
        name: "eigen-identity-a2",
        identity: "a(2) = lambda (lambda - 1) a(0) / 2",
        tol: 1e-8,
        run: eigen_identity_a2,
    },
    Check {
        name: "eigen-identities-near-critical",
        identity: "a(1), a(2) identities at beta = 0.9",
        tol: 1e-6,
        run: eigen_identities_near_critical,
    },
    Check {
        name: "lewis-three-term",
        identity: "lambda a(x) = a(x + 1) + (1 + x)^(-2 beta) a(x / (1 + x))",
        tol: 1e-8,
        run: lewis_three_term,
    },
    Check {
        name: "endpoint-beta-zero",
        identity: "lambda(0) = 2",
        tol: 1e-12,
        run: endpoint_beta_zero,
    },
    Check {
        name: "endpoint-beta-one",
        identity: "lambda(1) = 1",
        tol: 1e-3,
        run: endpoint_beta_one,
    },
    Check {
        name: "zeta-values",
        identity: "zeta(2) = pi^2/6, zeta(4) = pi^4/90",
        tol: 1e-12,
        run: zeta_values,
    },
    Check {
        name: "zeta-limit",
        identity: "K^k 1 (0) -> 2 zeta(2 beta - 1) / zeta(2 beta) from below",
        tol: 5e-3,
        run: zeta_limit,
    },
    Check {
        name: "right-edge-law",
        identity: "<inf ^ r> = (1 + (2 - lambda) / lambda^(r+1)) / 2",
        tol: 1e-3,
        run: right_edge_law,
    },
    Check {
        name: "x-one-single-spin",
        identity: "<^> = 1/2 at x = 1",
        tol: 1e-12,
        run: x_one_single_spin,
    },
    Check {
        name: "x-one-two-spin",
        identity: "uu = dd, ud = du = reversed ud at x = 1",
        tol: 1e-12,
        run: x_one_two_spin,
    },
    Check {
        name: "cluster-n-independence",
        identity: "<inf ^ n=N v ..> = <inf v n=N v ..> independent of N",
        tol: 0.0,
        run: cluster_n_independence,
    },
    Check {
        name: "cluster-enumeration",
        identity: "ud, dd clusters -> (lambda - 1) / (2 lambda^r)",
        tol: 5e-3,
        run: cluster_enumeration,
    },
    Check {
        name: "critical-approach",
        identity: "1/lambda^r rises to 1, (lambda - 1)/lambda^r falls to 0 as beta -> 1",
        tol: 0.0,
        run: critical_approach,
    },
    Check {
        name: "two-spin-bounds",
        identity: "<inf ^ n=3 ^ inf> within its closed-form bounds",
        tol: 0.0,
        run: two_spin_bounds,
    },
];

pub fn run(cfg: &RunConfig) -> std::result::Result<Outcome, Failure> {
    let ctx = Ctx {
        en: enumerator(cfg)?,
        kmax: cfg.k.iter().copied().max().unwrap_or(12),
        nodes: cfg.nodes,
    };
    let mut table = Table::new(
        "verify/1",
        &["check", "identity", "measured", "tolerance", "status", "detail"],
    );
    let mut failing = Vec::new();
    let mut skipped = 0usize;
    for check in CHECKS {
        let tol = cfg.tol_or(check.tol);
        let (value, status, detail) = match (check.run)(&ctx) {
            Ok(m) if !m.value.is_finite() => {
                (Cell::Missing, "fail", format!("non-finite measurement; {}", m.detail))
            }
            Ok(m) => {
                let status = if m.holds && m.value <= tol { "pass" } else { "fail" };
                (Cell::Float(m.value), status, m.detail)
            }
            Err(e @ Error::ResourceCap { .. }) => (Cell::Missing, "skip", e.to_string()),
            Err(e) => (Cell::Missing, "fail", e.to_string()),
        };
        match status {
            "fail" => failing.push(check.name),
            "skip" => skipped += 1,
            _ => {}
        }
        table.push(vec![
            check.name.into(),
            check.identity.into(),
            value,
            tol.into(),
            status.into(),
            detail.into(),
        ]);
    }
    let checks_run = CHECKS.len() - skipped;
    table.summary.insert("suite".into(), json!(SUITE));
    table.summary.insert("checks_run".into(), json!(checks_run));
    table.summary.insert("failures".into(), json!(failing.len()));
    table.summary.insert("skipped".into(), json!(skipped));
    table.summary.insert("failing".into(), json!(failing));
    let (code, notes) = if failing.is_empty() {
        (EXIT_OK, Vec::new())
    } else {
        (
            EXIT_VERIFY,
            vec![format!("{} of {checks_run} checks failed: {}", failing.len(), failing.join(", "))],
        )
    };
    Ok(Outcome { table, code, notes })
}
