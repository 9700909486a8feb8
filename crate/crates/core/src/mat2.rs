//! Exact 2x2 matrices over the nonnegative integers.

use std::fmt;
use std::ops::Mul;

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;

use crate::error::{domain, Result};
use crate::word::{Spin, SpinWord};

/// Row-major `[[a, b], [c, d]]`.
///
/// Entries are arbitrary precision: products of `k` generators grow like the
/// Fibonacci numbers and leave the 64-bit range near `k = 90`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub a: BigUint,
    pub b: BigUint,
    pub c: BigUint,
    pub d: BigUint,
}

impl Mat2 {
    pub fn new(a: u64, b: u64, c: u64, d: u64) -> Self {
        Self {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            d: d.into(),
        }
    }

    pub fn identity() -> Self {
        Self::new(1, 0, 0, 1)
    }

    /// Up spin, `[[1, 0], [1, 1]]`. Also the inverse Farey branch `F0`.
    pub fn a0() -> Self {
        Self::new(1, 0, 1, 1)
    }

    /// Down spin, `[[1, 1], [0, 1]]`.
    pub fn a1() -> Self {
        Self::new(1, 1, 0, 1)
    }

    /// Spin flip, `[[0, 1], [1, 0]]`.
    pub fn p() -> Self {
        Self::new(0, 1, 1, 0)
    }

    pub fn f0() -> Self {
        Self::a0()
    }

    /// Inverse Farey branch `x -> 1/(1+x)`, equal to `P A1`.
    pub fn f1() -> Self {
        Self::new(0, 1, 1, 1)
    }

    pub fn generator(spin: Spin) -> Self {
        match spin {
            Spin::Up => Self::a0(),
            Spin::Down => Self::a1(),
        }
    }

    pub fn det(&self) -> BigInt {
        BigInt::from(&self.a * &self.d) - BigInt::from(&self.b * &self.c)
    }

    /// Right multiplication by a generator, done with additions only.
    pub fn times_generator(&self, spin: Spin) -> Self {
        match spin {
            // [[a+b, b], [c+d, d]]
            Spin::Up => Self {
                a: &self.a + &self.b,
                b: self.b.clone(),
                c: &self.c + &self.d,
                d: self.d.clone(),
            },
            // [[a, a+b], [c, c+d]]
            Spin::Down => Self {
                a: self.a.clone(),
                b: &self.a + &self.b,
                c: self.c.clone(),
                d: &self.c + &self.d,
            },
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            a: self.a.clone(),
            b: self.c.clone(),
            c: self.b.clone(),
            d: self.d.clone(),
        }
    }

    fn entry_f64(v: &BigUint) -> f64 {
        v.to_f64().unwrap_or(f64::INFINITY)
    }
}

impl Mul for &Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: &Mat2) -> Mat2 {
        Mat2 {
            a: &self.a * &rhs.a + &self.b * &rhs.c,
            b: &self.a * &rhs.b + &self.b * &rhs.d,
            c: &self.c * &rhs.a + &self.d * &rhs.c,
            d: &self.c * &rhs.b + &self.d * &rhs.d,
        }
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        &self * &rhs
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// Product of the generators spelled by `w`, leftmost spin first.
pub fn word_to_matrix(w: &SpinWord) -> Mat2 {
    w.spins()
        .iter()
        .fold(Mat2::identity(), |m, &s| m.times_generator(s))
}

/// `(cx + d)^(-2 beta)`, the weight factor of `f(x) | M`.
pub fn action_weight(m: &Mat2, x: f64, beta: f64) -> Result<f64> {
    let denom = Mat2::entry_f64(&m.c) * x + Mat2::entry_f64(&m.d);
    if !(denom > 0.0) {
        return Err(domain(
            "action_weight",
            format!("cx + d = {denom} is not positive"),
        ));
    }
    if beta == 0.0 {
        return Ok(1.0);
    }
    Ok(denom.powf(-2.0 * beta))
}

/// The Moebius map `x -> (ax + b) / (cx + d)`.
pub fn moebius_apply(m: &Mat2, x: f64) -> Result<f64> {
    let denom = Mat2::entry_f64(&m.c) * x + Mat2::entry_f64(&m.d);
    if denom == 0.0 || !denom.is_finite() {
        return Err(domain("moebius_apply", "vanishing denominator cx + d"));
    }
    Ok((Mat2::entry_f64(&m.a) * x + Mat2::entry_f64(&m.b)) / denom)
}

/// `f(x) | M = (cx + d)^(-2 beta) f((ax + b) / (cx + d))`.
pub fn act<F: Fn(f64) -> f64>(f: F, m: &Mat2, x: f64, beta: f64) -> Result<f64> {
    Ok(action_weight(m, x, beta)? * f(moebius_apply(m, x)?))
}
