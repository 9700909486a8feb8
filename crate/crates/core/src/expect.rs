//! Spin expectation values.
//!
//! Finite chains are handled by enumeration. For a chain that is infinitely
//! long on the left and observed at `x = 0`, a family of patterns fixed near
//! the right edge has closed forms in the leading eigenvalue alone.

use std::fmt;
use std::str::FromStr;

use crate::enumerate::{check_length, sum_over, Quad};
use crate::error::{domain, ensure_finite, Error, Result};
use crate::extrapolate::{extrapolate_infinite_left, Extrapolation};
use crate::partition::{z_brute, z_constrained, ConstraintPattern, PartitionSpec};
use crate::params::{ChainParams, Enumerator};
use crate::spectral::{SpectralResult, BETA_CRITICAL};
use crate::word::Spin;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExpectationMode {
    Finite,
    /// Infinitely many free spins on the left.
    InfiniteLeft,
    /// Infinitely many free spins on both sides.
    InfiniteBoth,
}

/// A pattern, the chain parameters and which sides run off to infinity.
/// For infinite sides the corresponding free count of `pattern` is unused.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectationQuery {
    pub pattern: ConstraintPattern,
    pub params: ChainParams,
    pub mode: ExpectationMode,
}

impl ExpectationQuery {
    pub fn finite(pattern: ConstraintPattern, params: ChainParams) -> Self {
        Self {
            pattern,
            params,
            mode: ExpectationMode::Finite,
        }
    }

    /// Parses a geometry string: `inf` or `l=N` on the left, spins `^`/`v`
    /// with free gaps `n=N`, then `inf` or `r=N` on the right.
    pub fn parse(geometry: &str, params: ChainParams) -> Result<Self> {
        let tokens: Vec<&str> = geometry.split_whitespace().collect();
        let left_inf = tokens.first() == Some(&"inf");
        let right_inf = tokens.len() > 1 && tokens.last() == Some(&"inf");
        let inner = &tokens[usize::from(left_inf)..tokens.len() - usize::from(right_inf)];
        let mode = match (left_inf, right_inf) {
            (false, false) => ExpectationMode::Finite,
            (true, false) => ExpectationMode::InfiniteLeft,
            (true, true) => ExpectationMode::InfiniteBoth,
            (false, true) => {
                return Err(Error::InvalidArgument(format!(
                    "'{geometry}': an infinite right side needs an infinite left side"
                )))
            }
        };
        if left_inf && inner.first().is_some_and(|t| t.starts_with("l=")) {
            return Err(Error::InvalidArgument(format!("'{geometry}': left side given twice")));
        }
        if right_inf && inner.last().is_some_and(|t| t.starts_with("r=")) {
            return Err(Error::InvalidArgument(format!("'{geometry}': right side given twice")));
        }
        let pattern: ConstraintPattern = inner.join(" ").parse()?;
        Ok(Self {
            pattern,
            params,
            mode,
        })
    }

    fn left_infinite(&self) -> bool {
        self.mode != ExpectationMode::Finite
    }

    fn right_infinite(&self) -> bool {
        self.mode == ExpectationMode::InfiniteBoth
    }
}

impl fmt::Display for ExpectationQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.pattern.to_string();
        let mut parts: Vec<&str> = s.split(' ').collect();
        if self.left_infinite() {
            parts[0] = "inf";
        }
        if self.right_infinite() {
            *parts.last_mut().unwrap() = "inf";
        }
        f.write_str(&parts.join(" "))
    }
}

/// Probability of `q.pattern` in a finite chain.
pub fn expect_finite(q: &ExpectationQuery, en: &Enumerator) -> Result<f64> {
    if q.mode != ExpectationMode::Finite {
        return Err(Error::InvalidArgument(format!(
            "'{q}' is not a finite geometry"
        )));
    }
    finite_probability(&q.pattern, &q.params, en)
}

fn finite_probability(pat: &ConstraintPattern, params: &ChainParams, en: &Enumerator) -> Result<f64> {
    en.check("expect_finite", pat.len())?;
    let num = z_constrained(pat, params, en)?;
    let den = z_brute(
        &PartitionSpec::new(crate::partition::PartitionKind::Knauf, pat.len(), *params),
        en,
    )?;
    ensure_finite(num / den, "expect_finite", "constrained over full partition function")
}

/// `K = (Z_l(0) - Z_l(1)) / (Z_l | A0 (A0 + A1)^r)(0)`, the excess of up over
/// down weight for the geometry `l ^ r` at `x = 0`, relative to the up weight.
pub fn one_spin_bias(l: usize, r: usize, beta: f64, en: &Enumerator) -> Result<f64> {
    let z_l0 = z_brute(&PartitionSpec::knauf(l, 0.0, beta)?, en)?;
    let z_l1 = z_brute(&PartitionSpec::knauf(l, 1.0, beta)?, en)?;
    let up = z_constrained(
        &ConstraintPattern::single(l, Spin::Up, r),
        &ChainParams::new(0.0, beta)?,
        en,
    )?;
    let k = (z_l0 - z_l1) / up;
    if !(-1e-12..=1.0 + 1e-12).contains(&k) {
        return Err(domain("one_spin_bias", format!("K = {k} outside [0, 1]")));
    }
    Ok(k)
}

/// Up probability of the spin in `l ^ r` at `x = 0`, as `1 / (2 - K)`.
pub fn expect_one_spin_via_k(l: usize, r: usize, beta: f64, en: &Enumerator) -> Result<f64> {
    Ok(1.0 / (2.0 - one_spin_bias(l, r, beta, en)?))
}

fn require_subcritical(op: &'static str, res: &SpectralResult) -> Result<f64> {
    if res.beta >= BETA_CRITICAL {
        return Err(domain(op, format!("needs beta < 1, got {}", res.beta)));
    }
    Ok(res.lambda)
}

/// `<inf ^ r>` at `x = 0`: `(1 + (2 - lambda) / lambda^(r+1)) / 2`.
pub fn expect_right_edge_infinite(r: usize, res: &SpectralResult) -> Result<f64> {
    let lambda = require_subcritical("expect_right_edge_infinite", res)?;
    Ok(0.5 * (1.0 + (2.0 - lambda) / lambda.powi(r as i32 + 1)))
}

/// `U_n(x) = a | A0 (A0 + A1)^n` and `D_n(x) = a | A1 (A0 + A1)^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnDnValues {
    pub n: usize,
    pub x: f64,
    pub u: f64,
    pub d: f64,
}

/// `U_n`, `D_n` by acting with all `2^(n+1)` words on the eigenfunction.
pub fn u_n_d_n(n: usize, x: f64, res: &SpectralResult, en: &Enumerator) -> Result<UnDnValues> {
    require_subcritical("u_n_d_n", res)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(domain("u_n_d_n", format!("x = {x} outside [0, 1]")));
    }
    check_length(n + 1)?;
    en.check("u_n_d_n", n + 1)?;
    let sites = vec![None; n];
    let beta = res.beta;
    let leaf = |q: Quad| {
        let [a, b, c, d] = q.0.map(|e| e as f64);
        let den = c * x + d;
        den.powf(-2.0 * beta) * res.a((a * x + b) / den)
    };
    let u = sum_over(Quad([1, 0, 1, 1]), &sites, en.exec, &leaf);
    let d = sum_over(Quad([1, 1, 0, 1]), &sites, en.exec, &leaf);
    Ok(UnDnValues { n, x, u, d })
}

/// Closed forms of `U_n`, `D_n` at `x = 0` and `x = 1`.
pub fn u_n_d_n_closed(n: usize, x: f64, res: &SpectralResult) -> Result<UnDnValues> {
    let lambda = require_subcritical("u_n_d_n_closed", res)?;
    let ln1 = lambda.powi(n as i32 + 1);
    let (u, d) = if x == 0.0 {
        let a0 = res.a(0.0);
        ((0.5 * (ln1 - lambda) + 1.0) * a0, (0.5 * (ln1 + lambda) - 1.0) * a0)
    } else if x == 1.0 {
        let half = 0.5 * ln1 * res.a(1.0);
        (half, half)
    } else {
        return Err(Error::UnsupportedPattern(format!(
            "U_n and D_n have closed forms only at x = 0 and x = 1, not {x}"
        )));
    };
    Ok(UnDnValues { n, x, u, d })
}

/// Patterns at the right edge of a chain infinite on the left, `x = 0`.
/// `r` counts fixed spins from the second fixed spin (or the run) to the edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClusterKind {
    /// `^ n=N` then `r` up spins.
    UU,
    /// `v n=N` then `r` up spins.
    DU,
    /// `^ n=N v` then `r - 1` up spins.
    UD,
    /// `v n=N v` then `r - 1` up spins.
    DD,
    /// `r` up spins.
    UpRun,
    /// `v` then `r - 1` up spins.
    DownThenUpRun,
}

impl ClusterKind {
    pub const ALL: [ClusterKind; 6] = [
        ClusterKind::UU,
        ClusterKind::DU,
        ClusterKind::UD,
        ClusterKind::DD,
        ClusterKind::UpRun,
        ClusterKind::DownThenUpRun,
    ];

    /// Whether the gap `n` enters the pattern.
    pub fn has_gap(self) -> bool {
        !matches!(self, ClusterKind::UpRun | ClusterKind::DownThenUpRun)
    }

    /// The pattern with `l` free spins in front.
    pub fn pattern(self, l: usize, n: usize, r: usize) -> Result<ConstraintPattern> {
        if r == 0 {
            return Err(Error::InvalidArgument("cluster run length must be >= 1".into()));
        }
        let ups = |m: usize| std::iter::repeat_n(Some(Spin::Up), m);
        let gap = |s: Spin| std::iter::once(Some(s)).chain(std::iter::repeat_n(None, n));
        let body: Vec<Option<Spin>> = match self {
            ClusterKind::UU => gap(Spin::Up).chain(ups(r)).collect(),
            ClusterKind::DU => gap(Spin::Down).chain(ups(r)).collect(),
            ClusterKind::UD => gap(Spin::Up).chain([Some(Spin::Down)]).chain(ups(r - 1)).collect(),
            ClusterKind::DD => gap(Spin::Down).chain([Some(Spin::Down)]).chain(ups(r - 1)).collect(),
            ClusterKind::UpRun => ups(r).collect(),
            ClusterKind::DownThenUpRun => std::iter::once(Some(Spin::Down)).chain(ups(r - 1)).collect(),
        };
        ConstraintPattern::new(l, body, 0)
    }
}

impl fmt::Display for ClusterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClusterKind::UU => "uu",
            ClusterKind::DU => "du",
            ClusterKind::UD => "ud",
            ClusterKind::DD => "dd",
            ClusterKind::UpRun => "up-run",
            ClusterKind::DownThenUpRun => "down-up-run",
        })
    }
}

impl FromStr for ClusterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClusterKind::ALL
            .into_iter()
            .find(|k| k.to_string() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown cluster kind '{s}'")))
    }
}

/// Closed-form probability of a [`ClusterKind`] pattern.
pub fn expect_cluster(kind: ClusterKind, n: usize, r: usize, res: &SpectralResult) -> Result<f64> {
    let lambda = require_subcritical("expect_cluster", res)?;
    if r == 0 {
        return Err(Error::InvalidArgument("cluster run length must be >= 1".into()));
    }
    let lr = lambda.powi(r as i32);
    let edge = (2.0 - lambda) / lambda.powi(n as i32 + 1);
    Ok(match kind {
        ClusterKind::UU => (1.0 + edge) / (2.0 * lr),
        ClusterKind::DU => (1.0 - edge) / (2.0 * lr),
        ClusterKind::UD | ClusterKind::DD => (lambda - 1.0) / (2.0 * lr),
        ClusterKind::UpRun => 1.0 / lr,
        ClusterKind::DownThenUpRun => (lambda - 1.0) / lr,
    })
}

/// Bounds on `<inf ^ n=N ^ inf>` in the normalization `a(0) = 1`.
pub fn bounds_two_spin_infinite(n: usize, res: &SpectralResult) -> Result<(f64, f64)> {
    let lambda = require_subcritical("bounds_two_spin_infinite", res)?;
    let a0 = res.a(0.0);
    let lo = (lambda - 1.0) * a0 / (2.0 * lambda);
    let hi = (1.0 + (2.0 - lambda) / lambda.powi(n as i32 + 1)) * a0 / (2.0 * lambda);
    if lo > hi {
        return Err(domain("bounds_two_spin_infinite", format!("lo {lo} > hi {hi}")));
    }
    Ok((lo, hi))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm {
    Value(f64),
    Bounds { lo: f64, hi: f64 },
}

/// Recognizes `pattern` as a cluster family member `(kind, n, r)`.
fn classify(pat: &ConstraintPattern) -> Option<(ClusterKind, usize, usize)> {
    if pat.right() != 0 {
        return None;
    }
    let body = pat.body();
    let first = body[0]?;
    let rest = &body[1..];
    let gap = rest.iter().take_while(|s| s.is_none()).count();
    let tail = &rest[gap..];
    if tail.iter().any(Option::is_none) {
        return None;
    }
    let all_up = |s: &[Option<Spin>]| s.iter().all(|&t| t == Some(Spin::Up));
    if gap == 0 && all_up(body) {
        return Some((ClusterKind::UpRun, 0, body.len()));
    }
    if gap == 0 && first == Spin::Down && all_up(tail) {
        return Some((ClusterKind::DownThenUpRun, 0, body.len()));
    }
    if tail.is_empty() {
        return None;
    }
    if all_up(tail) {
        let kind = if first == Spin::Up { ClusterKind::UU } else { ClusterKind::DU };
        return Some((kind, gap, tail.len()));
    }
    if tail[0] == Some(Spin::Down) && all_up(&tail[1..]) {
        let kind = if first == Spin::Up { ClusterKind::UD } else { ClusterKind::DD };
        return Some((kind, gap, tail.len()));
    }
    None
}

/// Closed form for an infinite geometry, where one is known.
pub fn expect_closed_form(q: &ExpectationQuery, res: &SpectralResult) -> Result<ClosedForm> {
    if q.mode == ExpectationMode::Finite {
        return Err(Error::UnsupportedPattern(format!(
            "'{q}': closed forms are for infinite chains; use enumeration"
        )));
    }
    require_subcritical("expect_closed_form", res)?;
    if (q.params.beta - res.beta).abs() > 0.0 {
        return Err(Error::InvalidArgument(format!(
            "query at beta = {} but spectrum at beta = {}",
            q.params.beta, res.beta
        )));
    }
    let pat = &q.pattern;
    let single = pat.body().len() == 1;
    let unsupported = || Error::UnsupportedPattern(format!("'{q}' at x = {}", q.params.x));
    if q.params.x == 1.0 && single {
        return Ok(ClosedForm::Value(0.5));
    }
    if q.params.x != 0.0 {
        return Err(unsupported());
    }
    match q.mode {
        ExpectationMode::InfiniteLeft => {
            if single {
                let up = expect_right_edge_infinite(pat.right(), res)?;
                return Ok(ClosedForm::Value(match pat.body()[0] {
                    Some(Spin::Up) => up,
                    _ => 1.0 - up,
                }));
            }
            let (kind, n, r) = classify(pat).ok_or_else(unsupported)?;
            Ok(ClosedForm::Value(expect_cluster(kind, n, r, res)?))
        }
        ExpectationMode::InfiniteBoth => {
            let body = pat.body();
            if body.len() >= 2
                && body[0] == Some(Spin::Up)
                && body[body.len() - 1] == Some(Spin::Up)
                && body[1..body.len() - 1].iter().all(Option::is_none)
            {
                let (lo, hi) = bounds_two_spin_infinite(body.len() - 2, res)?;
                Ok(ClosedForm::Bounds { lo, hi })
            } else {
                Err(unsupported())
            }
        }
        ExpectationMode::Finite => unreachable!(),
    }
}

/// Finite-chain probabilities along `lengths`, one per length, with every
/// infinite side replaced by that many free spins.
pub fn finite_sequence(q: &ExpectationQuery, lengths: &[usize], en: &Enumerator) -> Result<Vec<f64>> {
    lengths
        .iter()
        .map(|&m| {
            let mut pat = q.pattern.clone();
            if q.left_infinite() {
                pat = pat.with_left(m);
            }
            if q.right_infinite() {
                pat = pat.with_right(m);
            }
            finite_probability(&pat, &q.params, en)
        })
        .collect()
}

/// Enumeration route: the exact value for finite geometries, otherwise a
/// geometric extrapolation over `lengths`.
pub fn expect_enumerated(q: &ExpectationQuery, lengths: &[usize], en: &Enumerator) -> Result<Extrapolation> {
    if q.mode == ExpectationMode::Finite {
        let value = expect_finite(q, en)?;
        return Ok(Extrapolation {
            value,
            error: 0.0,
            ratio: f64::NAN,
            warning: None,
        });
    }
    let values = finite_sequence(q, lengths, en)?;
    extrapolate_infinite_left(&values, lengths)
}

/// The longest equally spaced run of `points` lengths whose largest
/// enumeration fits into the cap.
pub fn lengths_within_cap(q: &ExpectationQuery, points: usize, en: &Enumerator) -> Result<Vec<usize>> {
    let budget = 63 - en.cap_terms.leading_zeros() as usize;
    let base = q.pattern.body().len()
        + if q.left_infinite() { 0 } else { q.pattern.left() }
        + if q.right_infinite() { 0 } else { q.pattern.right() };
    let per_step = usize::from(q.left_infinite()) + usize::from(q.right_infinite());
    let per_step = per_step.max(1);
    let max = budget.saturating_sub(base) / per_step;
    if max + 1 < points {
        return Err(Error::ResourceCap {
            op: "lengths_within_cap",
            requested: 1u128 << (base + per_step * points).min(127),
            cap: en.cap_terms,
        });
    }
    Ok((max + 1 - points..=max).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::leading_eigen;

    fn en() -> Enumerator {
        Enumerator::default()
    }

    #[test]
    fn one_spin_k_oracle() {
        let k = one_spin_bias(0, 1, 1.0, &en()).unwrap();
        assert!((k - 27.0 / 40.0).abs() < 1e-15);
        let v = expect_one_spin_via_k(0, 1, 1.0, &en()).unwrap();
        assert!((v - 40.0 / 53.0).abs() < 1e-15);
    }

    #[test]
    fn geometry_round_trip() {
        let p = ChainParams::new(0.0, 0.5).unwrap();
        for g in ["inf ^ n=2 v r=1", "l=3 ^ r=0", "inf ^ n=3 ^ inf", "inf v ^ ^ r=0"] {
            let q = ExpectationQuery::parse(g, p).unwrap();
            assert_eq!(q.to_string(), g);
        }
        assert!(ExpectationQuery::parse("l=2 ^ inf", p).is_err());
        assert!(ExpectationQuery::parse("inf l=2 ^ r=0", p).is_err());
        assert!(ExpectationQuery::parse("inf n=3 inf", p).is_err());
    }

    #[test]
    fn classification() {
        let c = |s: &str| classify(&s.parse().unwrap());
        assert_eq!(c("^ n=2 ^ ^"), Some((ClusterKind::UU, 2, 2)));
        assert_eq!(c("v n=1 ^"), Some((ClusterKind::DU, 1, 1)));
        assert_eq!(c("^ n=4 v ^ ^"), Some((ClusterKind::UD, 4, 3)));
        assert_eq!(c("v n=4 v"), Some((ClusterKind::DD, 4, 1)));
        assert_eq!(c("^ ^ ^"), Some((ClusterKind::UpRun, 0, 3)));
        assert_eq!(c("v ^ ^"), Some((ClusterKind::DownThenUpRun, 0, 3)));
        assert_eq!(c("^ n=1 v v"), None);
        assert_eq!(c("^ r=2"), None);
        for kind in ClusterKind::ALL {
            let pat = kind.pattern(0, 3, 2).unwrap();
            let (k, n, r) = classify(&pat).unwrap();
            let res = leading_eigen(0.4, 32, 1e-13, 10_000).unwrap();
            let a = expect_cluster(kind, 3, 2, &res).unwrap();
            let b = expect_cluster(k, n, r, &res).unwrap();
            assert!((a - b).abs() < 1e-15, "{kind}");
        }
    }

    #[test]
    fn closed_forms_at_half() {
        let res = leading_eigen(0.5, 64, 1e-13, 20_000).unwrap();
        let lambda = res.lambda;
        assert!((expect_right_edge_infinite(0, &res).unwrap() - 1.0 / lambda).abs() < 1e-15);
        for n in 0..6 {
            let uu = expect_cluster(ClusterKind::UU, n, 1, &res).unwrap();
            let ud = expect_cluster(ClusterKind::UD, n, 1, &res).unwrap();
            let du = expect_cluster(ClusterKind::DU, n, 1, &res).unwrap();
            assert!((uu + ud - expect_right_edge_infinite(n + 1, &res).unwrap()).abs() < 1e-14);
            assert!((uu + du - expect_right_edge_infinite(0, &res).unwrap()).abs() < 1e-14);
        }
        let (lo, hi) = bounds_two_spin_infinite(3, &res).unwrap();
        assert!(lo < hi);
    }

    #[test]
    fn closed_form_dispatch() {
        let res = leading_eigen(0.5, 64, 1e-13, 20_000).unwrap();
        let p0 = ChainParams::new(0.0, 0.5).unwrap();
        let p1 = ChainParams::new(1.0, 0.5).unwrap();
        let v = |g: &str, p| expect_closed_form(&ExpectationQuery::parse(g, p).unwrap(), &res);
        assert_eq!(v("inf ^ r=5", p1).unwrap(), ClosedForm::Value(0.5));
        assert_eq!(
            v("inf v r=2", p0).unwrap(),
            ClosedForm::Value(1.0 - expect_right_edge_infinite(2, &res).unwrap())
        );
        assert!(matches!(v("inf ^ n=3 ^ inf", p0).unwrap(), ClosedForm::Bounds { .. }));
        assert!(matches!(v("inf ^ n=2 v r=1", p0), Err(Error::UnsupportedPattern(_))));
        assert!(matches!(v("inf ^ r=1", ChainParams::new(0.5, 0.5).unwrap()), Err(Error::UnsupportedPattern(_))));
        assert!(v("l=2 ^ r=1", p0).is_err());
    }

    #[test]
    fn undn_closed_and_operator_agree() {
        let res = leading_eigen(0.5, 64, 1e-13, 20_000).unwrap();
        for n in 0..5 {
            for x in [0.0, 1.0] {
                let op = u_n_d_n(n, x, &res, &en()).unwrap();
                let cf = u_n_d_n_closed(n, x, &res).unwrap();
                assert!((op.u - cf.u).abs() < 1e-9, "U n={n} x={x}");
                assert!((op.d - cf.d).abs() < 1e-9, "D n={n} x={x}");
            }
        }
    }

    #[test]
    fn critical_is_rejected() {
        let res = leading_eigen(1.2, 32, 1e-10, 100).unwrap();
        assert!(expect_right_edge_infinite(0, &res).is_err());
        assert!(expect_cluster(ClusterKind::UU, 0, 1, &res).is_err());
        assert!(bounds_two_spin_infinite(0, &res).is_err());
    }

    #[test]
    fn lengths_fit_cap() {
        let p = ChainParams::new(0.0, 0.5).unwrap();
        let q = ExpectationQuery::parse("inf ^ r=3", p).unwrap();
        let e = Enumerator::new(1 << 20, crate::params::Exec::Sequential).unwrap();
        let l = lengths_within_cap(&q, 5, &e).unwrap();
        assert_eq!(l, vec![12, 13, 14, 15, 16]);
        let both = ExpectationQuery::parse("inf ^ n=3 ^ inf", p).unwrap();
        assert_eq!(lengths_within_cap(&both, 3, &e).unwrap(), vec![5, 6, 7]);
    }
}
