//! Exhaustive sums over spin configurations.
//!
//! Work is split on the first [`SPLIT_FREE_SITES`] free sites: every prefix
//! assignment becomes an independent subtree, subtree sums are collected in
//! prefix order and combined by pairwise reduction. The decomposition does
//! not depend on the scheduler, so sequential and parallel runs agree bit for
//! bit.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::params::Exec;
use crate::word::Spin;

/// Longest pattern whose running products are guaranteed to fit in `u64`.
pub const MAX_PATTERN_LEN: usize = 90;

const SPLIT_FREE_SITES: usize = 10;

/// Pairwise (tree) summation: `O(log n)` rounding growth.
///
/// For power-of-two lengths the reduction tree of the reversed slice is the
/// mirror image of the original, so both give the same bits.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        n => {
            let (lo, hi) = v.split_at(n / 2);
            pairwise_sum(lo) + pairwise_sum(hi)
        }
    }
}

/// Running state carried down the configuration tree.
pub(crate) trait State: Copy + Send + Sync {
    fn step(self, spin: Spin) -> Self;
}

/// Bottom row `(c, d)` of the running product; enough for `(cx + d)^(-2 beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Row {
    pub c: u64,
    pub d: u64,
}

impl Row {
    /// Bottom row of `A0`, the hidden up spin in front of every chain.
    pub const KNAUF: Row = Row { c: 1, d: 1 };
    /// Bottom row of the identity.
    pub const TILDE: Row = Row { c: 0, d: 1 };
}

impl State for Row {
    #[inline]
    fn step(self, spin: Spin) -> Self {
        match spin {
            Spin::Up => Row {
                c: self.c + self.d,
                d: self.d,
            },
            Spin::Down => Row {
                c: self.c,
                d: self.c + self.d,
            },
        }
    }
}

/// Full matrix `[a, b, c, d]`, needed when the leaf also moves its argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Quad(pub [u64; 4]);

impl State for Quad {
    #[inline]
    fn step(self, spin: Spin) -> Self {
        let [a, b, c, d] = self.0;
        match spin {
            Spin::Up => Quad([a + b, b, c + d, d]),
            Spin::Down => Quad([a, a + b, c, c + d]),
        }
    }
}

/// `(cx + d)^(-2 beta)` for integer `c, d`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Weight {
    x: f64,
    neg_two_beta: f64,
}

impl Weight {
    pub fn new(x: f64, beta: f64) -> Self {
        Self {
            x,
            neg_two_beta: -2.0 * beta,
        }
    }

    #[inline]
    pub fn eval(&self, c: u64, d: u64) -> f64 {
        if self.neg_two_beta == 0.0 {
            return 1.0;
        }
        (c as f64 * self.x + d as f64).powf(self.neg_two_beta)
    }
}

pub(crate) fn check_length(len: usize) -> Result<()> {
    if len > MAX_PATTERN_LEN {
        return Err(Error::PatternTooLong {
            len,
            max: MAX_PATTERN_LEN,
        });
    }
    Ok(())
}

fn subtree<S: State, F: Fn(S) -> f64>(s: S, sites: &[Option<Spin>], leaf: &F) -> f64 {
    match sites.split_first() {
        None => leaf(s),
        Some((Some(spin), rest)) => subtree(s.step(*spin), rest, leaf),
        Some((None, rest)) => {
            subtree(s.step(Spin::Up), rest, leaf) + subtree(s.step(Spin::Down), rest, leaf)
        }
    }
}

/// States after the first sites, up to `SPLIT_FREE_SITES` free ones, in
/// lexicographic order; plus the untouched remainder of the pattern.
fn expand_prefix<S: State>(start: S, sites: &[Option<Spin>]) -> (Vec<S>, &[Option<Spin>]) {
    let mut states = vec![start];
    let mut free = 0;
    let mut used = 0;
    for site in sites {
        if free == SPLIT_FREE_SITES {
            break;
        }
        states = match site {
            Some(spin) => states.into_iter().map(|s| s.step(*spin)).collect(),
            None => {
                free += 1;
                states
                    .into_iter()
                    .flat_map(|s| [s.step(Spin::Up), s.step(Spin::Down)])
                    .collect()
            }
        };
        used += 1;
    }
    (states, &sites[used..])
}

/// Sum of `leaf` over every completion of `sites` (`None` marks a free site).
pub(crate) fn sum_over<S, F>(start: S, sites: &[Option<Spin>], exec: Exec, leaf: &F) -> f64
where
    S: State,
    F: Fn(S) -> f64 + Sync,
{
    let (states, rest) = expand_prefix(start, sites);
    let partial: Vec<f64> = match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => states
            .par_iter()
            .map(|&s| subtree(s, rest, leaf))
            .collect(),
        _ => states.iter().map(|&s| subtree(s, rest, leaf)).collect(),
    };
    pairwise_sum(&partial)
}

/// Sum of `(cx + d)^(-2 beta)` over completions, starting from bottom row `start`.
pub(crate) fn weight_sum(start: Row, sites: &[Option<Spin>], x: f64, beta: f64, exec: Exec) -> f64 {
    let w = Weight::new(x, beta);
    sum_over(start, sites, exec, &|r: Row| w.eval(r.c, r.d))
}
