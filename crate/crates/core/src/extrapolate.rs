//! Limits of sequences whose error decays geometrically in the length.

use crate::error::{Error, Result};

/// Successive decay ratios may differ by this much before a warning is raised.
pub const RATIO_SPREAD: f64 = 0.2;

#[derive(Debug, Clone, PartialEq)]
pub struct Extrapolation {
    pub value: f64,
    /// Change between the last two Aitken estimates.
    pub error: f64,
    /// Mean decay ratio per step of the length grid, `NaN` when the input is
    /// already constant.
    pub ratio: f64,
    pub warning: Option<String>,
}

/// Aitken's delta-squared process on the tail of `values`, sampled at
/// equally spaced `lengths`.
///
/// Assumes `v(l) = v_inf + b q^l`, which it removes exactly.
pub fn extrapolate_infinite_left(values: &[f64], lengths: &[usize]) -> Result<Extrapolation> {
    if values.len() != lengths.len() {
        return Err(Error::InvalidArgument(format!(
            "{} values for {} lengths",
            values.len(),
            lengths.len()
        )));
    }
    if values.len() < 3 {
        return Err(Error::InvalidArgument(
            "extrapolation needs at least three points".into(),
        ));
    }
    if lengths.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("lengths must increase".into()));
    }
    let step = lengths[1] - lengths[0];
    if lengths.windows(2).any(|w| w[1] - w[0] != step) {
        return Err(Error::InvalidArgument("lengths must be equally spaced".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            op: "extrapolate_infinite_left",
            identity: "input sequence",
        });
    }

    let diffs: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let last = *values.last().unwrap();
    if diffs.iter().all(|&d| d == 0.0) {
        return Ok(Extrapolation {
            value: last,
            error: 0.0,
            ratio: f64::NAN,
            warning: None,
        });
    }

    let aitken: Vec<f64> = values
        .windows(3)
        .map(|w| {
            let (d1, d2) = (w[1] - w[0], w[2] - w[1]);
            let dd = d2 - d1;
            if dd == 0.0 {
                w[2]
            } else {
                w[2] - d2 * d2 / dd
            }
        })
        .collect();
    let value = *aitken.last().unwrap();
    let error = match aitken.len() {
        1 => diffs.last().unwrap().abs(),
        n => (aitken[n - 1] - aitken[n - 2]).abs(),
    };

    let ratios: Vec<f64> = diffs
        .windows(2)
        .filter(|w| w[0] != 0.0)
        .map(|w| w[1] / w[0])
        .collect();
    let ratio = ratios.iter().sum::<f64>() / ratios.len().max(1) as f64;
    let spread = ratios
        .iter()
        .map(|q| (q - ratio).abs())
        .fold(0.0, f64::max);
    let warning = if ratios.is_empty() {
        Some("no usable decay ratio".to_string())
    } else if spread > RATIO_SPREAD * ratio.abs() {
        Some(format!(
            "decay ratios {ratios:?} vary by more than {:.0}%",
            RATIO_SPREAD * 100.0
        ))
    } else if ratio.abs() >= 1.0 {
        Some(format!("sequence is not contracting (ratio {ratio})"))
    } else {
        None
    };

    Ok(Extrapolation {
        value,
        error,
        ratio,
        warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn removes_geometric_tail() {
        let lengths: Vec<usize> = (10..16).collect();
        let values: Vec<f64> = lengths
            .iter()
            .map(|&l| 0.37 + 2.5 * 0.6f64.powi(l as i32))
            .collect();
        let e = extrapolate_infinite_left(&values, &lengths).unwrap();
        assert!((e.value - 0.37).abs() < 1e-12);
        assert!((e.ratio - 0.6).abs() < 1e-9);
        assert!(e.warning.is_none());
    }

    #[test]
    fn alternating_geometric_tail() {
        let lengths = [2, 4, 6, 8];
        let values: Vec<f64> = lengths
            .iter()
            .map(|&l| -1.0 + (-0.5f64).powi(l as i32 / 2))
            .collect();
        let e = extrapolate_infinite_left(&values, &lengths).unwrap();
        assert!((e.value + 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_sequence() {
        let e = extrapolate_infinite_left(&[0.5; 4], &[1, 2, 3, 4]).unwrap();
        assert_eq!(e.value, 0.5);
        assert_eq!(e.error, 0.0);
    }

    #[test]
    fn warns_on_non_geometric_decay() {
        let lengths: Vec<usize> = (1..8).collect();
        let values: Vec<f64> = lengths.iter().map(|&l| 1.0 / (l * l) as f64).collect();
        let e = extrapolate_infinite_left(&values, &lengths).unwrap();
        assert!(e.warning.is_some());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(extrapolate_infinite_left(&[1.0, 2.0], &[1, 2]).is_err());
        assert!(extrapolate_infinite_left(&[1.0, 2.0, 3.0], &[1, 3, 2]).is_err());
        assert!(extrapolate_infinite_left(&[1.0, 2.0, 3.0], &[1, 2, 4]).is_err());
        assert!(extrapolate_infinite_left(&[1.0, 2.0], &[1, 2, 3]).is_err());
    }
}
