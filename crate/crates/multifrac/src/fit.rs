//! Log-log slope fitting and sequence extrapolation used by the asymptotic
//! audits.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Result of a least-squares power-law fit on log-log axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub abscissae: Vec<f64>,
    pub values: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least-squares slope of log|value| against log(abscissa).
///
/// Requires at least 8 samples whose abscissae increase and span at least two
/// decades, and nonzero values.
pub fn fit_asymptotic_exponent(samples: &[(f64, f64)]) -> Result<ExponentFit> {
    if samples.len() < 8 {
        return Err(Error::DegenerateFit(format!(
            "need at least 8 samples, got {}",
            samples.len()
        )));
    }
    if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::DegenerateFit("abscissae must be strictly increasing".into()));
    }
    if samples.iter().any(|&(x, v)| !(x > 0.0) || v == 0.0 || !v.is_finite()) {
        return Err(Error::DegenerateFit(
            "abscissae must be positive and values nonzero and finite".into(),
        ));
    }
    let span = samples[samples.len() - 1].0 / samples[0].0;
    // the tiny slack keeps grids built as exp(ln ...) from missing by one ulp
    if span < 100.0 * (1.0 - 1e-9) {
        return Err(Error::DegenerateFit(format!(
            "abscissae span only a factor of {span:.3}; need at least 2 decades"
        )));
    }

    let xs: Vec<f64> = samples.iter().map(|&(x, _)| x.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|&(_, v)| v.abs().ln()).collect();
    let (slope, intercept, r_squared) = ols(&xs, &ys);

    Ok(ExponentFit {
        abscissae: samples.iter().map(|&(x, _)| x).collect(),
        values: samples.iter().map(|&(_, v)| v).collect(),
        slope,
        intercept,
        r_squared,
    })
}

/// Plain OLS returning (slope, intercept, r^2).
pub fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();

    let denom = n * sxx - sx * sx;
    let slope = if denom.abs() < 1e-300 { 0.0 } else { (n * sxy - sx * sy) / denom };
    let intercept = (sy - slope * sx) / n;

    let y_mean = sy / n;
    let ss_tot: f64 = ys.iter().map(|y| (y - y_mean).powi(2)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - (slope * x + intercept)).powi(2))
        .sum();
    let r_squared = if ss_tot < 1e-300 {
        if ss_res < 1e-300 {
            1.0
        } else {
            0.0
        }
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    (slope, intercept, r_squared)
}

/// Richardson extrapolation of a sequence R(eps_j) -> L with a single known
/// leading error order p and integer-spaced corrections p, p+1, p+2, ...,
/// on a ladder of decreasing abscissae.
pub fn richardson(eps: &[f64], values: &[f64], p: f64) -> f64 {
    assert_eq!(eps.len(), values.len());
    let n = values.len();
    if n == 0 {
        return f64::NAN;
    }
    if n == 1 {
        return values[0];
    }
    let mut table: Vec<f64> = values.to_vec();
    let levels = n.min(4);
    for level in 0..levels - 1 {
        let order = p + level as f64;
        let mut next = Vec::with_capacity(table.len() - 1);
        for j in 1..table.len() {
            let r = eps[j + level] / eps[j + level - 1]; // < 1 on a decreasing ladder
            let factor = r.powf(-order) - 1.0;
            if factor.abs() < 1e-12 {
                next.push(table[j]);
            } else {
                next.push(table[j] + (table[j] - table[j - 1]) / factor);
            }
        }
        table = next;
        if table.len() < 2 {
            break;
        }
    }
    *table.last().expect("non-empty table")
}

/// Iterated Aitken delta-squared extrapolation for sequences with an unknown
/// but roughly geometric error decay (as produced by halving ladders).
pub fn aitken(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut seq = values.to_vec();
    for _ in 0..2 {
        if seq.len() < 3 {
            break;
        }
        let mut next = Vec::with_capacity(seq.len() - 2);
        for i in 0..seq.len() - 2 {
            let d2 = seq[i + 2] - 2.0 * seq[i + 1] + seq[i];
            if d2.abs() < 1e-300 {
                next.push(seq[i + 2]);
            } else {
                next.push(seq[i + 2] - (seq[i + 2] - seq[i + 1]).powi(2) / d2);
            }
        }
        seq = next;
    }
    *seq.last().expect("non-empty sequence")
}
