//! Transfer operator of the Farey map and its leading eigenpair.
//!
//! The operator acts on functions on `[0, 1]` as
//!
//! ```text
//! (K phi)(x) = (1 + x)^(-2 beta) [ phi(x / (1 + x)) + phi(1 / (1 + x)) ]
//! ```
//!
//! Both pre-images stay inside `[0, 1]`, so collocation on a Chebyshev grid
//! needs no extrapolation. Iterating `K` on the constant function reproduces
//! twice the partition function one level down, which is what ties this
//! module to the exhaustive sums in [`crate::partition`].

use std::fmt;
use std::sync::Arc;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{domain, ensure_finite, Error, Result};
use crate::grid::{ChebyshevGrid, GridFunction};
use crate::params::Exec;

pub const DEFAULT_NODES: usize = 64;
pub const DEFAULT_TOL: f64 = 1e-13;
pub const DEFAULT_MAX_ITER: usize = 20_000;

/// Iteration floor inside the near-critical window, where the gap closes.
pub const NEAR_CRITICAL_MAX_ITER: usize = 200_000;
pub const NEAR_CRITICAL_WINDOW: (f64, f64) = (0.95, 1.05);

/// Critical inverse temperature.
pub const BETA_CRITICAL: f64 = 1.0;

/// Sub-leading eigenvalue below the transition.
pub const SUBLEADING_EIGENVALUE: f64 = 1.0;

/// Rows this long or longer are applied in parallel.
#[cfg(feature = "parallel")]
const PARALLEL_ROWS: usize = 256;

/// Collocation matrix of `K` on a fixed grid.
#[derive(Debug, Clone)]
pub struct TransferOperator {
    grid: Arc<ChebyshevGrid>,
    beta: f64,
    /// Row-major, `n x n`.
    matrix: Vec<f64>,
    exec: Exec,
}

impl TransferOperator {
    pub fn new(grid: Arc<ChebyshevGrid>, beta: f64) -> Result<Self> {
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(domain("TransferOperator", format!("beta = {beta}")));
        }
        let n = grid.len();
        let mut matrix = Vec::with_capacity(n * n);
        for &x in grid.nodes() {
            let w = (1.0 + x).powf(-2.0 * beta);
            let left = grid.basis_at(x / (1.0 + x));
            let right = grid.basis_at(1.0 / (1.0 + x));
            matrix.extend(left.iter().zip(&right).map(|(l, r)| w * (l + r)));
        }
        Ok(Self {
            grid,
            beta,
            matrix,
            exec: Exec::default(),
        })
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn grid(&self) -> &Arc<ChebyshevGrid> {
        &self.grid
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn apply_values(&self, v: &[f64], out: &mut [f64]) {
        let n = self.grid.len();
        let row = |(i, o): (usize, &mut f64)| {
            *o = self.matrix[i * n..(i + 1) * n]
                .iter()
                .zip(v)
                .map(|(m, x)| m * x)
                .sum();
        };
        match self.exec {
            #[cfg(feature = "parallel")]
            Exec::Parallel if n >= PARALLEL_ROWS => out.par_iter_mut().enumerate().for_each(row),
            _ => out.iter_mut().enumerate().for_each(row),
        }
    }

    pub fn apply(&self, f: &GridFunction) -> GridFunction {
        let mut out = vec![0.0; self.grid.len()];
        self.apply_values(f.values(), &mut out);
        GridFunction::from_values_unchecked(Arc::clone(&self.grid), out)
    }

    /// `K^k 1`.
    pub fn iterate_constant(&self, k: usize) -> GridFunction {
        let n = self.grid.len();
        let mut v = vec![1.0; n];
        let mut tmp = vec![0.0; n];
        for _ in 0..k {
            self.apply_values(&v, &mut tmp);
            std::mem::swap(&mut v, &mut tmp);
        }
        GridFunction::from_values_unchecked(Arc::clone(&self.grid), v)
    }
}

/// One application of `K` to `f`, evaluated directly at the nodes.
pub fn transfer_apply(f: &GridFunction, beta: f64) -> GridFunction {
    let values = f
        .nodes()
        .iter()
        .map(|&x| transfer_eval(f, beta, x))
        .collect();
    GridFunction::from_values_unchecked(Arc::clone(f.grid()), values)
}

/// `(K f)(x)` at any `x >= 0`. For `x > 1` this is the natural extension of
/// `K f` off the unit interval; it uses only values of `f` inside `[0, 1]`.
pub fn transfer_eval(f: &GridFunction, beta: f64, x: f64) -> f64 {
    (1.0 + x).powf(-2.0 * beta) * (f.eval(x / (1.0 + x)) + f.eval(1.0 / (1.0 + x)))
}

/// How far the power iteration got.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvergenceGrade {
    /// Successive eigenvalue estimates met the tolerance.
    Converged,
    /// Inside the near-critical window below `beta = 1`, or the iteration
    /// budget ran out while the gap was closing.
    NearCritical,
    /// `beta >= 1`: the leading value is the edge of the continuous
    /// spectrum and the estimates approach 1 only algebraically.
    Critical,
}

impl fmt::Display for ConvergenceGrade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConvergenceGrade::Converged => "converged",
            ConvergenceGrade::NearCritical => "near-critical",
            ConvergenceGrade::Critical => "critical",
        })
    }
}

/// Leading eigenpair of `K` with diagnostics.
#[derive(Debug, Clone)]
pub struct SpectralResult {
    pub beta: f64,
    pub lambda: f64,
    /// Normalized so that `a(0) = 1`.
    pub eigenfunction: GridFunction,
    /// `max |lambda a - K a|` over the nodes.
    pub residual_linf: f64,
    /// Three-term residual over nodes and inter-node points, see [`lewis_residual`].
    pub lewis_residual: f64,
    pub iterations: usize,
    /// Change of the eigenvalue estimate in the last iteration.
    pub last_delta: f64,
    pub grade: ConvergenceGrade,
    /// `lim Z_k(0) / lambda^k`, the factor between the partition-function
    /// normalization of the eigenfunction and `a(0) = 1`. Only defined below
    /// the transition after convergence.
    pub amplitude: Option<f64>,
    /// The iteration stopped early because the next iterate could no longer
    /// be represented as a positive function on the grid. Happens from the
    /// near-critical window on, where the iterates concentrate at `x = 0`.
    pub resolution_limited: bool,
}

impl SpectralResult {
    pub fn nodes(&self) -> usize {
        self.eigenfunction.grid().len()
    }

    /// Eigenfunction at any `x >= 0`, extended past 1 through evenness.
    pub fn a(&self, x: f64) -> f64 {
        self.eigenfunction.eval_even(x, self.beta)
    }
}

/// Options for [`solve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub nodes: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// Double the node count until the three-term residual drops below this.
    pub refine_residual: Option<f64>,
    pub max_nodes: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            nodes: DEFAULT_NODES,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            refine_residual: None,
            max_nodes: 512,
        }
    }
}

/// Power iteration from the constant function.
///
/// Each step applies `K`, reads the eigenvalue estimate at `x = 0` and
/// rescales so that `a(0) = 1`. The iteration stops when two successive
/// estimates differ by at most `tol`.
pub fn leading_eigen(beta: f64, nodes: usize, tol: f64, max_iter: usize) -> Result<SpectralResult> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(domain("leading_eigen", format!("beta = {beta} must be >= 0")));
    }
    if !(tol > 0.0) {
        return Err(domain("leading_eigen", format!("tol = {tol} must be > 0")));
    }
    let grid = ChebyshevGrid::new(nodes)?;
    let op = TransferOperator::new(grid, beta)?;
    power_iteration(&op, tol, max_iter)
}

fn in_near_critical_window(beta: f64) -> bool {
    (NEAR_CRITICAL_WINDOW.0..=NEAR_CRITICAL_WINDOW.1).contains(&beta)
}

pub fn power_iteration(op: &TransferOperator, tol: f64, max_iter: usize) -> Result<SpectralResult> {
    let beta = op.beta();
    let n = op.grid().len();
    let budget = if in_near_critical_window(beta) {
        max_iter.max(NEAR_CRITICAL_MAX_ITER)
    } else {
        max_iter
    };

    let mut v = vec![1.0; n];
    let mut u = vec![0.0; n];
    let mut lambda = f64::NAN;
    let mut last_delta = f64::INFINITY;
    let mut log_scale = 0.0;
    let mut iterations = 0;
    let mut converged = false;
    let mut resolution_limited = false;

    while iterations < budget {
        op.apply_values(&v, &mut u);
        iterations += 1;
        let mu = u[0];
        if !u.iter().all(|&x| x > 0.0 && x.is_finite()) {
            if beta < NEAR_CRITICAL_WINDOW.0 {
                return Err(domain(
                    "leading_eigen",
                    format!("iterate lost positivity at step {iterations}"),
                ));
            }
            // the iterate has become too steep for the grid; keep the last
            // positive one
            iterations -= 1;
            resolution_limited = true;
            break;
        }
        for (vi, ui) in v.iter_mut().zip(&u) {
            *vi = ui / mu;
        }
        log_scale += mu.ln();
        last_delta = (mu - lambda).abs();
        lambda = mu;
        if last_delta <= tol {
            converged = true;
            break;
        }
    }

    let grade = if beta >= BETA_CRITICAL {
        ConvergenceGrade::Critical
    } else if converged && !in_near_critical_window(beta) {
        ConvergenceGrade::Converged
    } else {
        ConvergenceGrade::NearCritical
    };

    let eigenfunction = GridFunction::from_values_unchecked(Arc::clone(op.grid()), v);
    op.apply_values(eigenfunction.values(), &mut u);
    let residual_linf = eigenfunction
        .values()
        .iter()
        .zip(&u)
        .map(|(a, ka)| (lambda * a - ka).abs())
        .fold(0.0, f64::max);

    // K^j 1 = exp(log_scale) v and K^j 1 = 2 Z_{j-1}
    let amplitude = (beta < BETA_CRITICAL && converged).then(|| {
        (log_scale - std::f64::consts::LN_2 - (iterations as f64 - 1.0) * lambda.ln()).exp()
    });

    let mut result = SpectralResult {
        beta,
        lambda: ensure_finite(lambda, "leading_eigen", "leading eigenvalue")?,
        eigenfunction,
        residual_linf,
        lewis_residual: 0.0,
        iterations,
        last_delta,
        grade,
        amplitude,
        resolution_limited,
    };
    result.lewis_residual = lewis_residual(&result);

    if !converged && beta < NEAR_CRITICAL_WINDOW.0 {
        return Err(Error::NonConvergence {
            iterations,
            last_delta,
            best: Box::new(result),
        });
    }
    Ok(result)
}

/// Leading eigenpair with optional node doubling until the three-term
/// residual meets `opts.refine_residual`.
pub fn solve(beta: f64, opts: &SolverOptions) -> Result<SpectralResult> {
    let mut nodes = opts.nodes;
    loop {
        let res = leading_eigen(beta, nodes, opts.tol, opts.max_iter)?;
        match opts.refine_residual {
            Some(target) if res.lewis_residual > target && nodes * 2 <= opts.max_nodes => {
                nodes *= 2;
            }
            _ => return Ok(res),
        }
    }
}

/// Sup of `|lambda a(x) - a(x + 1) - (1 + x)^(-2 beta) a(x / (x + 1))|` over
/// the nodes and the points halfway between them. `a(x + 1)` is taken from
/// `(x + 1)^(-2 beta) a(1 / (x + 1))`.
pub fn lewis_residual(res: &SpectralResult) -> f64 {
    let a = &res.eigenfunction;
    let beta = res.beta;
    let grid = a.grid();
    grid.nodes()
        .iter()
        .copied()
        .chain(grid.midpoints())
        .map(|x| {
            let shifted = a.eval_even(x + 1.0, beta);
            let inner = (1.0 + x).powf(-2.0 * beta) * a.eval(x / (x + 1.0));
            (res.lambda * a.eval(x) - shifted - inner).abs()
        })
        .fold(0.0, f64::max)
}

/// `(|a(1) - (lambda - 1) a(0)|, |a(2) - lambda (lambda - 1) a(0) / 2|)`,
/// with `a(2)` obtained through evenness.
pub fn eigen_identities(res: &SpectralResult) -> (f64, f64) {
    let lambda = res.lambda;
    let a0 = res.a(0.0);
    let a1 = res.a(1.0);
    let a2 = res.a(2.0);
    (
        (a1 - (lambda - 1.0) * a0).abs(),
        (a2 - 0.5 * lambda * (lambda - 1.0) * a0).abs(),
    )
}

/// `max |a(x) - x^(-2 beta) a(1/x)|` for `x` in `[1/2, 1]`, where `a(1/x)`
/// comes from the operator itself, `(K a)(1/x) / lambda`, and not from the
/// evenness relation being tested.
pub fn eigenfunction_evenness_residual(res: &SpectralResult, samples: usize) -> f64 {
    let a = &res.eigenfunction;
    (0..=samples)
        .map(|i| 0.5 + 0.5 * i as f64 / samples.max(1) as f64)
        .map(|x| {
            let outside = transfer_eval(a, res.beta, 1.0 / x) / res.lambda;
            (a.eval(x) - x.powf(-2.0 * res.beta) * outside).abs()
        })
        .fold(0.0, f64::max)
}

/// `f = -ln(lambda) / beta`; zero from the transition on.
pub fn free_energy(res: &SpectralResult) -> Result<f64> {
    if res.beta == 0.0 {
        return Err(domain("free_energy", "undefined at beta = 0"));
    }
    if res.beta >= BETA_CRITICAL {
        return Ok(0.0);
    }
    Ok(-res.lambda.ln() / res.beta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationLengths {
    /// Bulk length `C / ln(lambda / lambda_1)`, reported with `C = 1`;
    /// defined only up to that constant.
    pub xi: f64,
    /// Right-edge length `1 / ln(lambda)`.
    pub xi_r: f64,
}

/// Both lengths diverge at the transition; for `beta >= 1` this returns a
/// domain error and callers report `+inf`.
pub fn correlation_lengths(res: &SpectralResult) -> Result<CorrelationLengths> {
    if res.beta >= BETA_CRITICAL {
        return Err(domain(
            "correlation_lengths",
            format!("correlation length diverges for beta = {} >= 1", res.beta),
        ));
    }
    let xi_r = 1.0 / res.lambda.ln();
    let xi = 1.0 / (res.lambda / SUBLEADING_EIGENVALUE).ln();
    Ok(CorrelationLengths {
        xi: ensure_finite(xi, "correlation_lengths", "bulk correlation length")?,
        xi_r: ensure_finite(xi_r, "correlation_lengths", "edge correlation length")?,
    })
}
