//! Functions on `[0, 1]` sampled at Chebyshev–Lobatto points.
//!
//! Values between nodes come from the barycentric formula of the second kind
//! with the closed-form Lobatto weights `(-1)^j`, halved at both ends.

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use crate::error::{Error, Result};

pub const MIN_NODES: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl ChebyshevGrid {
    /// `n` Lobatto points `x_j = sin^2(pi j / (2 (n - 1)))`, from 0 to 1.
    pub fn new(n: usize) -> Result<Arc<Self>> {
        if n < MIN_NODES {
            return Err(Error::InvalidArgument(format!(
                "a grid needs at least {MIN_NODES} nodes, got {n}"
            )));
        }
        let m = (n - 1) as f64;
        let nodes = (0..n)
            .map(|j| {
                let s = (FRAC_PI_2 * j as f64 / m).sin();
                s * s
            })
            .collect();
        let weights = (0..n)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                if j == 0 || j == n - 1 {
                    0.5 * sign
                } else {
                    sign
                }
            })
            .collect();
        Ok(Arc::new(Self { nodes, weights }))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Points halfway (in angle) between consecutive nodes; used to probe
    /// interpolation error away from the collocation points.
    pub fn midpoints(&self) -> Vec<f64> {
        let m = (self.len() - 1) as f64;
        (0..self.len() - 1)
            .map(|j| {
                let s = (FRAC_PI_2 * (j as f64 + 0.5) / m).sin();
                s * s
            })
            .collect()
    }

    fn node_index(&self, y: f64) -> Option<usize> {
        self.nodes.iter().position(|&x| x == y)
    }

    /// Values of the Lagrange basis polynomials at `y`.
    pub fn basis_at(&self, y: f64) -> Vec<f64> {
        let mut row = vec![0.0; self.len()];
        if let Some(j) = self.node_index(y) {
            row[j] = 1.0;
            return row;
        }
        let mut denom = 0.0;
        for ((r, &x), &w) in row.iter_mut().zip(&self.nodes).zip(&self.weights) {
            *r = w / (y - x);
            denom += *r;
        }
        for r in &mut row {
            *r /= denom;
        }
        row
    }

    /// Barycentric interpolation of `values` at `y` in `[0, 1]`.
    pub fn interpolate(&self, values: &[f64], y: f64) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        assert!(
            (0.0..=1.0).contains(&y),
            "interpolation point {y} outside [0, 1]"
        );
        let mut num = 0.0;
        let mut den = 0.0;
        for ((&x, &w), &v) in self.nodes.iter().zip(&self.weights).zip(values) {
            let diff = y - x;
            if diff == 0.0 {
                return v;
            }
            let t = w / diff;
            num += t * v;
            den += t;
        }
        num / den
    }
}

/// A function on `[0, 1]` known through its node values.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Arc<ChebyshevGrid>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Arc<ChebyshevGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                op: "GridFunction::new",
                identity: "node values must be finite",
            });
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_values_unchecked(grid: Arc<ChebyshevGrid>, values: Vec<f64>) -> Self {
        Self { grid, values }
    }

    pub fn from_fn(grid: Arc<ChebyshevGrid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&x| f(x)).collect();
        Self::new(grid, values)
    }

    pub fn constant(grid: Arc<ChebyshevGrid>, c: f64) -> Self {
        let values = vec![c; grid.len()];
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<ChebyshevGrid> {
        &self.grid
    }

    pub fn nodes(&self) -> &[f64] {
        self.grid.nodes()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Value at `x` in `[0, 1]`; exact at the nodes.
    pub fn eval(&self, x: f64) -> f64 {
        self.grid.interpolate(&self.values, x)
    }

    /// Value at any `x >= 0` for a function that is even under the spin flip,
    /// `f(x) = x^(-2 beta) f(1/x)`. Arguments above 1 are mapped back into
    /// `[0, 1]` by that identity; the grid is never extrapolated.
    pub fn eval_even(&self, x: f64, beta: f64) -> f64 {
        if x <= 1.0 {
            self.eval(x)
        } else {
            x.powf(-2.0 * beta) * self.eval(1.0 / x)
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    /// Largest absolute difference of node values.
    pub fn max_abs_diff(&self, other: &GridFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_layout() {
        let g = ChebyshevGrid::new(9).unwrap();
        assert_eq!(g.nodes()[0], 0.0);
        assert_eq!(g.nodes()[8], 1.0);
        assert!(g.nodes().windows(2).all(|w| w[0] < w[1]));
        assert!((g.nodes()[4] - 0.5).abs() < 1e-15);
        assert!(ChebyshevGrid::new(7).is_err());
    }

    #[test]
    fn exact_at_nodes() {
        let g = ChebyshevGrid::new(16).unwrap();
        let f = GridFunction::from_fn(g.clone(), |x| (3.0 * x).sin() + 0.1).unwrap();
        for (&x, &v) in f.nodes().iter().zip(f.values()) {
            assert_eq!(f.eval(x), v);
        }
    }

    #[test]
    fn reproduces_polynomials() {
        let g = ChebyshevGrid::new(12).unwrap();
        let p = |x: f64| 1.0 - 2.0 * x + 0.5 * x.powi(7) - x.powi(11);
        let f = GridFunction::from_fn(g, p).unwrap();
        for i in 0..=50 {
            let x = i as f64 / 50.0;
            assert!((f.eval(x) - p(x)).abs() < 1e-13, "at {x}");
        }
    }

    #[test]
    fn spectral_accuracy_for_analytic_functions() {
        let f = |x: f64| (1.0 + x).powf(-1.3);
        let mut prev = f64::INFINITY;
        for n in [8, 16, 32] {
            let g = ChebyshevGrid::new(n).unwrap();
            let gf = GridFunction::from_fn(g.clone(), f).unwrap();
            let err = g
                .midpoints()
                .iter()
                .map(|&x| (gf.eval(x) - f(x)).abs())
                .fold(0.0, f64::max);
            assert!(err < prev);
            prev = err;
        }
        assert!(prev < 1e-13);
    }

    #[test]
    fn constant_is_exact_everywhere() {
        let g = ChebyshevGrid::new(64).unwrap();
        let c = GridFunction::constant(g, 1.0);
        for i in 0..=97 {
            assert_eq!(c.eval(i as f64 / 97.0), 1.0);
        }
    }

    #[test]
    fn basis_rows_sum_to_one() {
        let g = ChebyshevGrid::new(20).unwrap();
        for &y in &[0.0, 0.123, 0.5, 0.999] {
            let s: f64 = g.basis_at(y).iter().sum();
            assert!((s - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn even_extension() {
        let beta = 0.7;
        let g = ChebyshevGrid::new(32).unwrap();
        let z0 = |x: f64| (1.0 + x).powf(-2.0 * beta);
        let f = GridFunction::from_fn(g, z0).unwrap();
        for &x in &[1.5, 2.0, 7.0] {
            assert!((f.eval_even(x, beta) - z0(x)).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_bad_values() {
        let g = ChebyshevGrid::new(8).unwrap();
        assert!(GridFunction::new(g.clone(), vec![1.0; 7]).is_err());
        let mut v = vec![1.0; 8];
        v[3] = f64::NAN;
        assert!(GridFunction::new(g, v).is_err());
    }
}
