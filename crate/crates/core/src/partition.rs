//! Partition functions of the chain.
//!
//! `Z_k(x)` sums `((a + c) x + (b + d))^(-2 beta)` over the `2^k` products
//! `M = [[a, b], [c, d]]` of length `k`; equivalently it is the constant
//! function acted on by `A0 (A0 + A1)^k`. `Z~_k(x)` drops the leading `A0`
//! and sums `(cx + d)^(-2 beta)`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::enumerate::{check_length, weight_sum, Row};
use crate::error::{Error, Result};
use crate::grid::{ChebyshevGrid, GridFunction};
use crate::params::{ChainParams, Enumerator, Exec};
use crate::spectral::TransferOperator;
use crate::word::{Spin, SpinWord};

/// Recursion levels below which branches are handed to the thread pool.
#[cfg(feature = "parallel")]
const PARALLEL_DEPTH: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PartitionKind {
    /// All `2^k` words, no prefix.
    Tilde,
    /// Words behind the hidden leading up spin.
    Knauf,
}

impl PartitionKind {
    fn start(self) -> Row {
        match self {
            PartitionKind::Tilde => Row::TILDE,
            PartitionKind::Knauf => Row::KNAUF,
        }
    }

    /// Matrix length including the hidden prefix.
    fn matrix_len(self, k: usize) -> usize {
        match self {
            PartitionKind::Tilde => k,
            PartitionKind::Knauf => k + 1,
        }
    }
}

impl fmt::Display for PartitionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PartitionKind::Tilde => "tilde",
            PartitionKind::Knauf => "knauf",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionSpec {
    pub kind: PartitionKind,
    pub k: usize,
    pub params: ChainParams,
}

impl PartitionSpec {
    pub fn new(kind: PartitionKind, k: usize, params: ChainParams) -> Self {
        Self { kind, k, params }
    }

    pub fn knauf(k: usize, x: f64, beta: f64) -> Result<Self> {
        Ok(Self::new(PartitionKind::Knauf, k, ChainParams::new(x, beta)?))
    }

    pub fn tilde(k: usize, x: f64, beta: f64) -> Result<Self> {
        Ok(Self::new(PartitionKind::Tilde, k, ChainParams::new(x, beta)?))
    }
}

/// `l` free spins, a body of fixed and free sites, then `r` free spins.
///
/// The body always starts and ends with a fixed spin; free sites at its
/// edges are folded into `left` and `right` on construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConstraintPattern {
    left: usize,
    body: Vec<Option<Spin>>,
    right: usize,
}

impl ConstraintPattern {
    pub fn new(left: usize, body: Vec<Option<Spin>>, right: usize) -> Result<Self> {
        let first = body.iter().position(Option::is_some);
        let last = body.iter().rposition(Option::is_some);
        let (Some(first), Some(last)) = (first, last) else {
            return Err(Error::InvalidArgument(
                "a constraint pattern needs at least one fixed spin".into(),
            ));
        };
        Ok(Self {
            left: left + first,
            right: right + body.len() - 1 - last,
            body: body[first..=last].to_vec(),
        })
    }

    /// `l` free, one fixed spin, `r` free.
    pub fn single(left: usize, spin: Spin, right: usize) -> Self {
        Self {
            left,
            body: vec![Some(spin)],
            right,
        }
    }

    /// `l` free, `s1`, `n` free, `s2`, `r` free.
    pub fn pair(left: usize, s1: Spin, gap: usize, s2: Spin, right: usize) -> Self {
        let mut body = vec![None; gap + 2];
        body[0] = Some(s1);
        body[gap + 1] = Some(s2);
        Self { left, body, right }
    }

    /// `l` free spins followed by a fully fixed word and `r` free spins.
    pub fn word(left: usize, word: &SpinWord, right: usize) -> Result<Self> {
        Self::new(left, word.spins().iter().copied().map(Some).collect(), right)
    }

    /// From a full site list, `None` marking free sites.
    pub fn from_sites(sites: &[Option<Spin>]) -> Result<Self> {
        Self::new(0, sites.to_vec(), 0)
    }

    pub fn left(&self) -> usize {
        self.left
    }

    pub fn right(&self) -> usize {
        self.right
    }

    pub fn body(&self) -> &[Option<Spin>] {
        &self.body
    }

    pub fn sites(&self) -> Vec<Option<Spin>> {
        let mut s = vec![None; self.left];
        s.extend_from_slice(&self.body);
        s.resize(self.len(), None);
        s
    }

    pub fn len(&self) -> usize {
        self.left + self.body.len() + self.right
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn fixed_count(&self) -> usize {
        self.body.iter().filter(|s| s.is_some()).count()
    }

    pub fn free_count(&self) -> usize {
        self.len() - self.fixed_count()
    }

    pub fn with_left(&self, left: usize) -> Self {
        Self {
            left,
            ..self.clone()
        }
    }

    pub fn with_right(&self, right: usize) -> Self {
        Self {
            right,
            ..self.clone()
        }
    }

    /// Every fixed spin reversed.
    pub fn flipped(&self) -> Self {
        Self {
            body: self.body.iter().map(|s| s.map(Spin::flip)).collect(),
            ..self.clone()
        }
    }

    /// Mirror image: the chain read right to left.
    pub fn reversed(&self) -> Self {
        Self {
            left: self.right,
            body: self.body.iter().rev().copied().collect(),
            right: self.left,
        }
    }
}

impl fmt::Display for ConstraintPattern {
    /// Geometry string such as `l=3 ^ n=2 v r=1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = vec![format!("l={}", self.left)];
        let mut gap = 0;
        for site in &self.body {
            match site {
                None => gap += 1,
                Some(s) => {
                    if gap > 0 {
                        parts.push(format!("n={gap}"));
                        gap = 0;
                    }
                    parts.push(s.symbol().to_string());
                }
            }
        }
        parts.push(format!("r={}", self.right));
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for ConstraintPattern {
    type Err = Error;

    /// Parses the format written by `Display`. `l=` and `r=` may be omitted.
    fn from_str(s: &str) -> Result<Self> {
        let mut left = 0;
        let mut right = 0;
        let mut body = Vec::new();
        let bad = |t: &str| Error::InvalidArgument(format!("bad geometry token '{t}' in '{s}'"));
        let tokens: Vec<&str> = s.split_whitespace().collect();
        for (i, tok) in tokens.iter().enumerate() {
            if let Some(v) = tok.strip_prefix("l=") {
                if i != 0 {
                    return Err(bad(tok));
                }
                left = v.parse().map_err(|_| bad(tok))?;
            } else if let Some(v) = tok.strip_prefix("r=") {
                if i != tokens.len() - 1 {
                    return Err(bad(tok));
                }
                right = v.parse().map_err(|_| bad(tok))?;
            } else if let Some(v) = tok.strip_prefix("n=") {
                let n: usize = v.parse().map_err(|_| bad(tok))?;
                body.extend(std::iter::repeat_n(None, n));
            } else {
                for c in tok.chars() {
                    body.push(Some(Spin::from_symbol(c).ok_or_else(|| bad(tok))?));
                }
            }
        }
        Self::new(left, body, right)
    }
}

/// Exhaustive sum over all `2^k` configurations.
pub fn z_brute(spec: &PartitionSpec, en: &Enumerator) -> Result<f64> {
    check_length(spec.kind.matrix_len(spec.k))?;
    en.check("z_brute", spec.k)?;
    let p = spec.params;
    if p.is_extended() {
        return extended_brute(spec);
    }
    let sites = vec![None; spec.k];
    Ok(weight_sum(spec.kind.start(), &sites, p.x, p.beta, en.exec))
}

#[cfg(feature = "extended")]
fn extended_brute(spec: &PartitionSpec) -> Result<f64> {
    Ok(crate::extended::z_brute_mp(spec)?.to_f64())
}

#[cfg(not(feature = "extended"))]
fn extended_brute(spec: &PartitionSpec) -> Result<f64> {
    Err(Error::UnsupportedPrecision(spec.params.float_precision))
}

/// `Z_k(x) = (1 + x)^(-2 beta) Z_{k-1}(x / (1 + x)) + Z_{k-1}(x + 1)`,
/// unrolled down to `Z_0 = (1 + x)^(-2 beta)` (Knauf) or `Z~_0 = 1`.
pub fn z_recursive(spec: &PartitionSpec, en: &Enumerator) -> Result<f64> {
    en.check("z_recursive", spec.k)?;
    let p = spec.params;
    if p.is_extended() {
        return extended_recursive(spec);
    }
    Ok(recurse(spec.kind, spec.k, p.x, -2.0 * p.beta, 0, en.exec))
}

#[cfg(feature = "extended")]
fn extended_recursive(spec: &PartitionSpec) -> Result<f64> {
    Ok(crate::extended::z_recursive_mp(spec)?.to_f64())
}

#[cfg(not(feature = "extended"))]
fn extended_recursive(spec: &PartitionSpec) -> Result<f64> {
    Err(Error::UnsupportedPrecision(spec.params.float_precision))
}

fn recurse(kind: PartitionKind, k: usize, x: f64, exponent: f64, depth: usize, exec: Exec) -> f64 {
    let w = if exponent == 0.0 {
        1.0
    } else {
        (1.0 + x).powf(exponent)
    };
    if k == 0 {
        return match kind {
            PartitionKind::Knauf => w,
            PartitionKind::Tilde => 1.0,
        };
    }
    let left = || recurse(kind, k - 1, x / (1.0 + x), exponent, depth + 1, exec);
    let right = || recurse(kind, k - 1, x + 1.0, exponent, depth + 1, exec);
    let (a, b) = match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel if depth < PARALLEL_DEPTH && k > 8 => rayon::join(left, right),
        _ => (left(), right()),
    };
    w * a + b
}

/// `Z_{k-1}` on the Chebyshev grid, as `K^k 1 / 2`.
pub fn z_grid(k: usize, beta: f64, nodes: usize) -> Result<GridFunction> {
    z_grid_with(k, beta, nodes, Exec::default())
}

pub fn z_grid_with(k: usize, beta: f64, nodes: usize, exec: Exec) -> Result<GridFunction> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "z_grid needs k >= 1 (it returns Z_{k-1})".into(),
        ));
    }
    let grid: Arc<ChebyshevGrid> = ChebyshevGrid::new(nodes)?;
    let op = TransferOperator::new(grid, beta)?.with_exec(exec);
    Ok(op.iterate_constant(k).scaled(0.5))
}

/// Sum over the configurations that match `pat`, behind the hidden up spin.
pub fn z_constrained(pat: &ConstraintPattern, params: &ChainParams, en: &Enumerator) -> Result<f64> {
    check_length(pat.len() + 1)?;
    en.check("z_constrained", pat.free_count())?;
    if params.is_extended() {
        return extended_constrained(pat, params);
    }
    Ok(weight_sum(Row::KNAUF, &pat.sites(), params.x, params.beta, en.exec))
}

#[cfg(feature = "extended")]
fn extended_constrained(pat: &ConstraintPattern, params: &ChainParams) -> Result<f64> {
    Ok(crate::extended::z_constrained_mp(pat, params)?.to_f64())
}

#[cfg(not(feature = "extended"))]
fn extended_constrained(_: &ConstraintPattern, params: &ChainParams) -> Result<f64> {
    Err(Error::UnsupportedPrecision(params.float_precision))
}
