//! The table-producing commands.

use std::collections::HashMap;
use std::time::Instant;

use farey_chain::{
    correlation_lengths, eigen_identities, expect_closed_form, expect_cluster, expect_enumerated,
    expect_finite, expect_right_edge_infinite, free_energy, lengths_within_cap, solve, z_brute,
    z_grid, z_recursive, ChainParams, ClosedForm, ClusterKind, ConvergenceGrade, Enumerator, Error,
    ExpectationMode, ExpectationQuery, PartitionKind, PartitionSpec, SolverOptions, SpectralResult,
};
use farey_chain::spectral::{BETA_CRITICAL, NEAR_CRITICAL_WINDOW};

use crate::config::{Method, RunConfig};
use crate::output::{Cell, Table};
use crate::{Failure, Outcome, EXIT_CAP, EXIT_OK, EXIT_TOLERANCE};

pub const PARTITION_TOL: f64 = 1e-10;
pub const SPECTRUM_TOL: f64 = 1e-8;
pub const EXPECT_TOL: f64 = 1e-3;

/// Chain lengths used to extrapolate an infinite side.
pub const EXTRAPOLATION_POINTS: usize = 5;

/// Largest enumeration an extrapolation may use, further limited by `--cap`.
pub const EXTRAPOLATION_BUDGET: u64 = 1 << 22;

/// Equally spaced lengths whose largest enumeration fits the budget.
pub fn extrapolation_lengths(q: &ExpectationQuery, en: &Enumerator) -> farey_chain::Result<Vec<usize>> {
    let budget = Enumerator {
        cap_terms: en.cap_terms.min(EXTRAPOLATION_BUDGET),
        ..*en
    };
    lengths_within_cap(q, EXTRAPOLATION_POINTS, &budget)
}

pub fn enumerator(cfg: &RunConfig) -> Result<Enumerator, Failure> {
    Ok(Enumerator::new(cfg.cap, Default::default())?)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn timed<T>(cfg: &RunConfig, f: impl FnOnce() -> T) -> (T, f64) {
    let t = Instant::now();
    let v = f();
    let secs = if cfg.timing { t.elapsed().as_secs_f64() } else { 0.0 };
    (v, secs)
}

/// Leading eigenpair on `cfg.nodes` nodes, doubled up to 512 below the
/// near-critical window until the three-term residual is within `tol`.
pub fn solve_at(cfg: &RunConfig, beta: f64, tol: f64) -> Result<SpectralResult, Failure> {
    let opts = SolverOptions {
        nodes: cfg.nodes,
        refine_residual: (beta < NEAR_CRITICAL_WINDOW.0).then_some(tol),
        max_nodes: cfg.nodes.max(512),
        ..SolverOptions::default()
    };
    Ok(solve(beta, &opts)?)
}

/// Spectra computed once per `beta`.
pub struct SpectrumCache<'a> {
    cfg: &'a RunConfig,
    map: HashMap<u64, SpectralResult>,
}

impl<'a> SpectrumCache<'a> {
    pub fn new(cfg: &'a RunConfig) -> Self {
        Self {
            cfg,
            map: HashMap::new(),
        }
    }

    pub fn get(&mut self, beta: f64) -> Result<&SpectralResult, Failure> {
        let key = beta.to_bits();
        if !self.map.contains_key(&key) {
            let res = solve_at(self.cfg, beta, SPECTRUM_TOL)?;
            self.map.insert(key, res);
        }
        Ok(&self.map[&key])
    }
}

fn grid_value(cfg: &RunConfig, k: usize, x: f64, beta: f64) -> Result<f64, Failure> {
    if cfg.kind != PartitionKind::Knauf {
        return Err(Failure::error("the grid method computes Z_k only (kind=knauf)"));
    }
    if cfg.precision > farey_chain::DOUBLE_PRECISION {
        return Err(Failure::error("the grid method runs in double precision only"));
    }
    let z = z_grid(k + 1, beta, cfg.nodes)?;
    Ok(if x <= 1.0 { z.eval(x) } else { z.eval_even(x, beta) })
}

pub fn partition(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let en = enumerator(cfg)?;
    let tol = cfg.tol_or(PARTITION_TOL);
    let mut table = Table::new(
        "partition/1",
        &["k", "x", "beta", "method", "value", "seconds", "status"],
    );
    let mut notes = Vec::new();
    let (mut mismatch, mut capped) = (false, false);
    for &k in &cfg.k {
        for &x in &cfg.x {
            for &beta in &cfg.beta {
                let params = ChainParams::with_precision(x, beta, cfg.precision)?;
                let spec = PartitionSpec::new(cfg.kind, k, params);
                let mut reference: Option<(f64, _)> = None;
                for &method in &cfg.methods {
                    let (value, secs) = timed(cfg, || match method {
                        Method::Brute => z_brute(&spec, &en).map_err(Failure::from),
                        Method::Recursive => z_recursive(&spec, &en).map_err(Failure::from),
                        Method::Grid => grid_value(cfg, k, x, beta),
                    });
                    let (value, status) = match value {
                        Ok(v) => match reference {
                            None => {
                                reference = Some((v, method));
                                (Cell::Float(v), "ok".to_string())
                            }
                            Some((r, m)) if rel(v, r) > tol => {
                                mismatch = true;
                                notes.push(format!(
                                    "k={k} x={x} beta={beta}: {method} differs from {m} by {:.3e} (relative)",
                                    rel(v, r)
                                ));
                                (Cell::Float(v), "mismatch".to_string())
                            }
                            Some(_) => (Cell::Float(v), "ok".to_string()),
                        },
                        Err(f) if f.code == EXIT_CAP => {
                            capped = true;
                            notes.push(format!("k={k} x={x} beta={beta} {method}: {}", f.msg));
                            (Cell::Missing, "cap".to_string())
                        }
                        Err(f) => return Err(f),
                    };
                    table.push(vec![
                        k.into(),
                        x.into(),
                        beta.into(),
                        method.to_string().into(),
                        value,
                        secs.into(),
                        status.into(),
                    ]);
                }
            }
        }
    }
    let code = if mismatch {
        EXIT_TOLERANCE
    } else if capped {
        EXIT_CAP
    } else {
        EXIT_OK
    };
    Ok(Outcome { table, code, notes })
}

pub fn spectrum(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let tol = cfg.tol_or(SPECTRUM_TOL);
    let mut table = Table::new(
        "spectrum/1",
        &[
            "beta",
            "nodes",
            "lambda",
            "free_energy",
            "xi_r",
            "lewis_residual",
            "a1_check",
            "a2_check",
            "iterations",
            "grade",
            "status",
        ],
    );
    let mut notes = Vec::new();
    let mut failed = false;
    for &beta in &cfg.beta {
        let res = solve_at(cfg, beta, tol)?;
        let f = match free_energy(&res) {
            Ok(v) => Cell::Float(v),
            Err(Error::Domain { .. }) => Cell::Missing,
            Err(e) => return Err(e.into()),
        };
        let xi_r = match correlation_lengths(&res) {
            Ok(c) => Cell::Float(c.xi_r),
            Err(Error::Domain { .. }) => Cell::Inf,
            Err(e) => return Err(e.into()),
        };
        let (a1, a2) = eigen_identities(&res);
        let status = if res.grade != ConvergenceGrade::Converged || res.resolution_limited {
            "graded"
        } else if res.lewis_residual > tol || a1 > tol || a2 > tol {
            failed = true;
            notes.push(format!(
                "beta={beta}: residuals {:.2e}, {a1:.2e}, {a2:.2e} exceed {tol:e}",
                res.lewis_residual
            ));
            "residual"
        } else {
            "ok"
        };
        table.push(vec![
            beta.into(),
            res.nodes().into(),
            res.lambda.into(),
            f,
            xi_r,
            res.lewis_residual.into(),
            a1.into(),
            a2.into(),
            res.iterations.into(),
            res.grade.to_string().into(),
            status.into(),
        ]);
    }
    let code = if failed { EXIT_TOLERANCE } else { EXIT_OK };
    Ok(Outcome { table, code, notes })
}

/// Geometries from `--geometry`, else cluster patterns over `n` and `r`,
/// else the single right-edge spin.
fn geometries(cfg: &RunConfig) -> Result<Vec<String>, Failure> {
    if !cfg.geometry.is_empty() {
        return Ok(cfg.geometry.clone());
    }
    if cfg.clusters.is_empty() {
        return Ok(cfg.r.iter().map(|r| format!("inf ^ r={r}")).collect());
    }
    let mut out = Vec::new();
    for &kind in &cfg.clusters {
        let ns: &[usize] = if kind.has_gap() { &cfg.n } else { &[0] };
        for &n in ns {
            for &r in &cfg.r {
                let q = ExpectationQuery {
                    pattern: kind.pattern(0, n, r)?,
                    params: ChainParams::new(0.0, 0.0)?,
                    mode: ExpectationMode::InfiniteLeft,
                };
                out.push(q.to_string());
            }
        }
    }
    Ok(out)
}

fn closed_form(
    q: &ExpectationQuery,
    spectra: &mut SpectrumCache,
) -> Result<Option<ClosedForm>, Failure> {
    let single = q.pattern.body().len() == 1;
    if q.params.x == 1.0 && single {
        return Ok(Some(ClosedForm::Value(0.5)));
    }
    if q.mode == ExpectationMode::Finite || q.params.beta >= BETA_CRITICAL {
        return Ok(None);
    }
    let res = spectra.get(q.params.beta)?;
    match expect_closed_form(q, res) {
        Ok(c) => Ok(Some(c)),
        Err(Error::UnsupportedPattern(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn expect(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let en = enumerator(cfg)?;
    let tol = cfg.tol_or(EXPECT_TOL);
    let mut spectra = SpectrumCache::new(cfg);
    let mut table = Table::new(
        "expect/1",
        &[
            "geometry",
            "x",
            "beta",
            "closed_form",
            "lower",
            "upper",
            "enumeration_extrapolated",
            "error_estimate",
            "abs_diff",
            "warning",
        ],
    );
    let mut notes = Vec::new();
    let (mut failed, mut capped) = (false, false);
    for geometry in geometries(cfg)? {
        for &x in &cfg.x {
            for &beta in &cfg.beta {
                let params = ChainParams::with_precision(x, beta, cfg.precision)?;
                let q = ExpectationQuery::parse(&geometry, params)?;
                let closed = closed_form(&q, &mut spectra)?;
                let enumerated = if q.mode == ExpectationMode::Finite {
                    expect_finite(&q, &en).map(|v| (v, 0.0, None))
                } else {
                    extrapolation_lengths(&q, &en)
                        .and_then(|lengths| expect_enumerated(&q, &lengths, &en))
                        .map(|e| (e.value, e.error, e.warning))
                };
                let (value, error, warning) = match enumerated {
                    Ok((v, e, w)) => (Some(v), Some(e), w.unwrap_or_default()),
                    Err(e @ Error::ResourceCap { .. }) => {
                        capped = true;
                        notes.push(format!("'{q}' at x={x} beta={beta}: {e}"));
                        (None, None, "enumeration exceeds the cap".to_string())
                    }
                    Err(e) => return Err(e.into()),
                };
                let (cf, lo, hi) = match closed {
                    Some(ClosedForm::Value(v)) => (Some(v), None, None),
                    Some(ClosedForm::Bounds { lo, hi }) => (None, Some(lo), Some(hi)),
                    None => (None, None, None),
                };
                let diff = match (cf, lo, hi, value) {
                    (Some(c), _, _, Some(v)) => Some((c - v).abs()),
                    (_, Some(lo), Some(hi), Some(v)) => Some((lo - v).max(v - hi).max(0.0)),
                    _ => None,
                };
                if let Some(d) = diff.filter(|&d| d > tol) {
                    failed = true;
                    notes.push(format!("'{q}' at x={x} beta={beta}: paths differ by {d:.3e}"));
                }
                table.push(vec![
                    q.to_string().into(),
                    x.into(),
                    beta.into(),
                    cf.into(),
                    lo.into(),
                    hi.into(),
                    value.into(),
                    error.into(),
                    diff.into(),
                    warning.into(),
                ]);
            }
        }
    }
    let code = if failed {
        EXIT_TOLERANCE
    } else if capped {
        EXIT_CAP
    } else {
        EXIT_OK
    };
    Ok(Outcome { table, code, notes })
}

/// Closed forms at `x = 0` for a chain infinite on the left, one row per
/// `(beta, n, r)`. Cluster columns need `r >= 1`.
pub fn table(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let mut spectra = SpectrumCache::new(cfg);
    let mut columns = vec!["beta", "n", "r", "lambda", "edge_up"];
    let names: Vec<&'static str> = ClusterKind::ALL
        .iter()
        .map(|k| match k {
            ClusterKind::UU => "uu",
            ClusterKind::DU => "du",
            ClusterKind::UD => "ud",
            ClusterKind::DD => "dd",
            ClusterKind::UpRun => "up_run",
            ClusterKind::DownThenUpRun => "down_up_run",
        })
        .collect();
    columns.extend(&names);
    let mut table = Table::new("table/1", &columns);
    for &beta in &cfg.beta {
        if beta >= BETA_CRITICAL {
            return Err(Failure::error(format!(
                "closed forms need beta < 1, got {beta}"
            )));
        }
        let res = spectra.get(beta)?;
        for &n in &cfg.n {
            for &r in &cfg.r {
                let mut row: Vec<Cell> = vec![
                    beta.into(),
                    n.into(),
                    r.into(),
                    res.lambda.into(),
                    expect_right_edge_infinite(r, res)?.into(),
                ];
                for kind in ClusterKind::ALL {
                    row.push(if r == 0 {
                        Cell::Missing
                    } else {
                        expect_cluster(kind, n, r, res)?.into()
                    });
                }
                table.push(row);
            }
        }
    }
    Ok(Outcome {
        table,
        code: EXIT_OK,
        notes: Vec::new(),
    })
}
