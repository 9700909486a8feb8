//! Riemann zeta function for real `s > 1`.

use crate::error::{domain, Result};

/// Direct terms summed before the Euler–Maclaurin tail.
const HEAD_TERMS: u32 = 12;

/// `B_{2j} / (2j)!` for `j = 1..=10`.
const BERNOULLI_OVER_FACTORIAL: [f64; 10] = [
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40_320.0,
    5.0 / 66.0 / 3_628_800.0,
    -691.0 / 2730.0 / 479_001_600.0,
    7.0 / 6.0 / 87_178_291_200.0,
    -3617.0 / 510.0 / 20_922_789_888_000.0,
    43_867.0 / 798.0 / 6_402_373_705_728_000.0,
    -174_611.0 / 330.0 / 2_432_902_008_176_640_000.0,
];

/// `zeta(s) = sum n^-s`, evaluated as a finite head plus the Euler–Maclaurin
/// expansion of the tail starting at `N`:
///
/// ```text
/// sum_{n>=N} n^-s = N^(1-s)/(s-1) + N^-s/2
///                 + sum_j B_2j/(2j)! * s(s+1)...(s+2j-2) * N^(-s-2j+1) + R
/// ```
pub fn zeta(s: f64) -> Result<f64> {
    if !(s > 1.0) || s.is_nan() {
        return Err(domain("zeta", format!("s = {s} must exceed 1")));
    }
    let n = HEAD_TERMS as f64;
    // largest terms last so the small ones are not swamped
    let head: f64 = (1..HEAD_TERMS).rev().map(|k| (k as f64).powf(-s)).sum();

    let n_pow = n.powf(-s);
    let mut tail = n * n_pow / (s - 1.0) + 0.5 * n_pow;
    // rising product s (s+1) ... (s+2j-2), times N^(-s-2j+1)
    let mut rising = s;
    let mut power = n_pow / n;
    for (j, &c) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        if j > 0 {
            let m = 2.0 * j as f64;
            rising *= (s + m - 1.0) * (s + m);
            power /= n * n;
        }
        let term = c * rising * power;
        tail += term;
        if term.abs() < 1e-18 * tail.abs() {
            break;
        }
    }
    Ok(head + tail)
}
