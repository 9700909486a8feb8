//! Farey map and the Stern–Brocot levels generated by products starting with `A0`.

use num_integer::Integer;

use crate::error::{domain, Error, Result};

/// A reduced fraction `num / den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fraction {
    pub num: u64,
    pub den: u64,
}

impl Fraction {
    pub fn new(num: u64, den: u64) -> Self {
        Self { num, den }
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn is_reduced(self) -> bool {
        self.num.gcd(&self.den) == 1
    }
}

/// Interval `[left, right]` spanned by the columns of `A0 W`, together with
/// the mediant that the node contributes to the tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SternBrocotNode {
    pub left: Fraction,
    pub right: Fraction,
    pub mediant: Fraction,
}

/// Nodes of the Farey part of the Stern–Brocot tree at depth `k`.
///
/// Node `i` corresponds to the word `A0 W_i`, where `W_i` runs over the `2^k`
/// words of length `k` in lexicographic order (`A0` before `A1`). For
/// `M = [[a, b], [c, d]]` the columns give the interval `[b/d, a/c]` and the
/// node's fraction is the mediant `(a + b) / (c + d)`.
pub fn stern_brocot_nodes(k: usize, cap_terms: u64) -> Result<Vec<SternBrocotNode>> {
    let requested = 1u128 << k.min(127);
    if k >= 64 || requested > cap_terms as u128 {
        return Err(Error::ResourceCap {
            op: "stern_brocot_level",
            requested,
            cap: cap_terms,
        });
    }
    let mut out = Vec::with_capacity(1 << k);
    // (a, b, c, d) of A0
    let mut stack = vec![((1u64, 0u64, 1u64, 1u64), 0usize)];
    while let Some(((a, b, c, d), depth)) = stack.pop() {
        if depth == k {
            out.push(SternBrocotNode {
                left: Fraction::new(b, d),
                right: Fraction::new(a, c),
                mediant: Fraction::new(a + b, c + d),
            });
            continue;
        }
        // push A1 first so that A0 is visited first
        stack.push(((a, a + b, c, c + d), depth + 1));
        stack.push(((a + b, b, c + d, d), depth + 1));
    }
    Ok(out)
}

/// The `2^k` fractions at depth `k`, as `(numerator, denominator)` pairs.
pub fn stern_brocot_level(k: usize, cap_terms: u64) -> Result<Vec<(u64, u64)>> {
    Ok(stern_brocot_nodes(k, cap_terms)?
        .into_iter()
        .map(|n| (n.mediant.num, n.mediant.den))
        .collect())
}

/// `x/(1-x)` on `[0, 1/2]`, `(1-x)/x` on `(1/2, 1]`.
pub fn farey_map(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(domain("farey_map", format!("{x} is outside [0, 1]")));
    }
    Ok(if x <= 0.5 { x / (1.0 - x) } else { (1.0 - x) / x })
}

/// Inverse branch `x / (1 + x)`.
pub fn farey_inverse_left(x: f64) -> f64 {
    x / (1.0 + x)
}

/// Inverse branch `1 / (1 + x)`.
pub fn farey_inverse_right(x: f64) -> f64 {
    1.0 / (1.0 + x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    const CAP: u64 = 1 << 26;

    #[test]
    fn level_zero_and_one() {
        assert_eq!(stern_brocot_level(0, CAP).unwrap(), vec![(1, 2)]);
        let nodes = stern_brocot_nodes(1, CAP).unwrap();
        // 1/2 sits between 0/1 and 1/1: the columns of A0 A0 and A0 A1
        assert_eq!(nodes[0].left, Fraction::new(0, 1));
        assert_eq!(nodes[0].right, Fraction::new(1, 2));
        assert_eq!(nodes[1].left, Fraction::new(1, 2));
        assert_eq!(nodes[1].right, Fraction::new(1, 1));
        assert_eq!(stern_brocot_level(1, CAP).unwrap(), vec![(1, 3), (2, 3)]);
    }

    #[test]
    fn level_two_matches_mediants() {
        assert_eq!(
            stern_brocot_level(2, CAP).unwrap(),
            vec![(1, 4), (2, 5), (3, 5), (3, 4)]
        );
    }

    #[test]
    fn levels_are_reduced_distinct_and_ordered() {
        for k in 0..=14 {
            let level = stern_brocot_level(k, CAP).unwrap();
            assert_eq!(level.len(), 1 << k);
            let distinct: HashSet<_> = level.iter().collect();
            assert_eq!(distinct.len(), level.len());
            for &(p, q) in &level {
                assert_eq!(p.gcd(&q), 1, "{p}/{q} at level {k}");
                assert!(p < q);
            }
            // in-order traversal is increasing
            for w in level.windows(2) {
                assert!(w[0].0 * w[1].1 < w[1].0 * w[0].1);
            }
        }
    }

    #[test]
    fn level_respects_cap() {
        assert!(matches!(
            stern_brocot_level(10, 1 << 4),
            Err(Error::ResourceCap { .. })
        ));
    }

    #[test]
    fn farey_map_examples() {
        assert_eq!(farey_map(0.5).unwrap(), 1.0);
        assert_eq!(farey_map(0.0).unwrap(), 0.0);
        assert!((farey_map(2.0 / 3.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(farey_map(-0.1).is_err());
        assert!(farey_map(1.5).is_err());
    }

    #[test]
    fn inverse_branches_invert_the_map() {
        for i in 0..=100 {
            let y = i as f64 / 100.0;
            let left = farey_map(farey_inverse_left(y)).unwrap();
            assert!((left - y).abs() < 1e-14, "left branch at {y}");
            let right = farey_map(farey_inverse_right(y)).unwrap();
            assert!((right - y).abs() < 1e-14, "right branch at {y}");
        }
    }
}
