//! Multi-precision versions of the exhaustive sums and the recursion.
//!
//! Arguments `x` and `beta` are taken exactly from their `f64` values; every
//! subsequent operation rounds to the requested number of bits.

use rug::ops::Pow;
use rug::Float;

use crate::enumerate::{check_length, Row, State};
use crate::error::Result;
use crate::params::ChainParams;
use crate::partition::{ConstraintPattern, PartitionKind, PartitionSpec};
use crate::word::Spin;

fn weight(prec: u32, x: &Float, exponent: &Float, c: u64, d: u64) -> Float {
    let base = Float::with_val(prec, x * c) + d;
    if exponent.is_zero() {
        Float::with_val(prec, 1)
    } else {
        base.pow(exponent)
    }
}

fn tree(prec: u32, row: Row, sites: &[Option<Spin>], x: &Float, e: &Float) -> Float {
    match sites.split_first() {
        None => weight(prec, x, e, row.c, row.d),
        Some((Some(s), rest)) => tree(prec, row.step(*s), rest, x, e),
        Some((None, rest)) => {
            tree(prec, row.step(Spin::Up), rest, x, e) + tree(prec, row.step(Spin::Down), rest, x, e)
        }
    }
}

fn start(kind: PartitionKind) -> Row {
    match kind {
        PartitionKind::Tilde => Row::TILDE,
        PartitionKind::Knauf => Row::KNAUF,
    }
}

fn args(params: &ChainParams) -> (u32, Float, Float) {
    let prec = params.float_precision;
    let x = Float::with_val(prec, params.x);
    let e = Float::with_val(prec, -2.0 * params.beta);
    (prec, x, e)
}

/// Exhaustive sum at `spec.params.float_precision` bits.
pub fn z_brute_mp(spec: &PartitionSpec) -> Result<Float> {
    check_length(spec.k + 1)?;
    let (prec, x, e) = args(&spec.params);
    Ok(tree(prec, start(spec.kind), &vec![None; spec.k], &x, &e))
}

pub fn z_constrained_mp(pat: &ConstraintPattern, params: &ChainParams) -> Result<Float> {
    check_length(pat.len() + 1)?;
    let (prec, x, e) = args(params);
    Ok(tree(prec, Row::KNAUF, &pat.sites(), &x, &e))
}

fn recurse(kind: PartitionKind, k: usize, prec: u32, x: Float, e: &Float) -> Float {
    let one_plus = Float::with_val(prec, &x + 1u32);
    let w = if e.is_zero() {
        Float::with_val(prec, 1)
    } else {
        Float::with_val(prec, one_plus.clone().pow(e))
    };
    if k == 0 {
        return match kind {
            PartitionKind::Knauf => w,
            PartitionKind::Tilde => Float::with_val(prec, 1),
        };
    }
    let inner = Float::with_val(prec, &x / &one_plus);
    let a = recurse(kind, k - 1, prec, inner, e);
    let b = recurse(kind, k - 1, prec, one_plus, e);
    w * a + b
}

/// The two-branch recursion at `spec.params.float_precision` bits.
pub fn z_recursive_mp(spec: &PartitionSpec) -> Result<Float> {
    let (prec, x, e) = args(&spec.params);
    Ok(recurse(spec.kind, spec.k, prec, x, &e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(k: usize, x: f64, beta: f64, prec: u32) -> PartitionSpec {
        PartitionSpec::new(
            PartitionKind::Knauf,
            k,
            ChainParams::with_precision(x, beta, prec).unwrap(),
        )
    }

    #[test]
    fn exact_small_values() {
        let z = z_brute_mp(&spec(1, 0.0, 1.0, 200)).unwrap();
        assert_eq!(z, 1.25);
        let r = z_recursive_mp(&spec(1, 0.0, 1.0, 200)).unwrap();
        assert_eq!(r, 1.25);
    }

    #[test]
    fn brute_and_recursion_agree_to_many_digits() {
        let s = spec(12, 1.0 / 3.0, 0.7, 256);
        let a = z_brute_mp(&s).unwrap();
        let b = z_recursive_mp(&s).unwrap();
        let rel = Float::with_val(256, &a - &b).abs() / &a;
        assert!(rel < 1e-60, "{rel}");
    }

    #[test]
    fn f64_result_is_close() {
        let s = spec(14, 0.5, 1.3, 128);
        let hi = z_brute_mp(&s).unwrap().to_f64();
        let lo = crate::partition::z_brute(
            &PartitionSpec::knauf(14, 0.5, 1.3).unwrap(),
            &crate::params::Enumerator::default(),
        )
        .unwrap();
        assert!((hi - lo).abs() <= 1e-14 * hi);
    }
}
