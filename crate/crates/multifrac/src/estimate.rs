//! Local regularity estimation from sampled paths.
//!
//! A quadratic-variation estimator: localized sums of squared increments at
//! dyadic scales, regressed on log scale. The recoverable quantity is the
//! product H(t)K — the two-sided increment bounds pin exactly that exponent,
//! and no second-moment statistic separates H from K.

use crate::error::{Error, Result};
use crate::fit::ols;
use crate::simulate::PathEnsemble;
use serde::{Deserialize, Serialize};

/// Default dyadic scales, in grid steps.
pub const DEFAULT_SCALES: [usize; 4] = [1, 2, 4, 8];

/// Local exponent estimate at one time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalExponentEstimate {
    pub t: f64,
    /// Regression slope halved, clamped into (0.01, 0.99).
    pub estimate: f64,
    pub clamped: bool,
    /// Window length in samples.
    pub window: usize,
    pub scales: Vec<usize>,
    pub stderr: f64,
}

fn window_bounds(
    n: usize,
    center: usize,
    window: usize,
    max_scale: usize,
) -> Result<(usize, usize)> {
    let half = window / 2;
    if center < half {
        return Err(Error::WindowOutOfRange(format!(
            "window of {window} samples centered at index {center} underruns the grid"
        )));
    }
    let lo = center - half;
    let hi = lo + window;
    if hi + max_scale > n {
        return Err(Error::WindowOutOfRange(format!(
            "window of {window} samples plus scale {max_scale} overruns the grid of {n}"
        )));
    }
    Ok((lo, hi))
}

/// Localized mean squared increments of one path at each scale.
fn squared_increment_means(
    path: &[f64],
    lo: usize,
    hi: usize,
    scales: &[usize],
) -> Vec<f64> {
    scales
        .iter()
        .map(|&m| {
            let mut sum = 0.0;
            for i in lo..hi {
                let d = path[i + m] - path[i];
                sum += d * d;
            }
            sum / (hi - lo) as f64
        })
        .collect()
}

fn slope_to_estimate(slope: f64) -> (f64, bool) {
    let raw = 0.5 * slope;
    if raw <= 0.01 {
        (0.01, true)
    } else if raw >= 0.99 {
        (0.99, true)
    } else {
        (raw, false)
    }
}

/// Estimate the local exponent of a single path sampled on a uniform grid
/// with spacing `dt`, from a window of `window` samples centered at time `t`.
pub fn local_hurst_estimate(
    path: &[f64],
    dt: f64,
    t: f64,
    window: usize,
    scales: &[usize],
) -> Result<LocalExponentEstimate> {
    if scales.len() < 2 {
        return Err(Error::InsufficientScales(scales.len()));
    }
    if scales.windows(2).any(|w| w[1] <= w[0]) || scales[0] == 0 {
        return Err(Error::Domain("scales must be positive and strictly increasing".into()));
    }
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("grid spacing must be positive, got {dt}")));
    }
    let center = (t / dt).round() as usize;
    let max_scale = scales[scales.len() - 1];
    let (lo, hi) = window_bounds(path.len(), center, window, max_scale)?;

    let means = squared_increment_means(path, lo, hi, scales);
    let xs: Vec<f64> = scales.iter().map(|&m| (m as f64 * dt).ln()).collect();
    let ys: Vec<f64> = means.iter().map(|&v| v.max(f64::MIN_POSITIVE).ln()).collect();
    let (slope, _, _) = ols(&xs, &ys);
    let (estimate, clamped) = slope_to_estimate(slope);

    Ok(LocalExponentEstimate {
        t: center as f64 * dt,
        estimate,
        clamped,
        window,
        scales: scales.to_vec(),
        stderr: f64::NAN, // single path: no ensemble spread to report
    })
}

/// Ensemble-averaged local exponents at each requested time.
///
/// The per-scale squared-increment means are averaged across paths first and
/// regressed once (variance reduction with the same bias as per-path
/// regression); the standard error propagates the across-path spread of the
/// scale means through the regression weights.
pub fn hurst_profile(
    ensemble: &PathEnsemble,
    t_list: &[f64],
    window: usize,
    scales: &[usize],
) -> Result<Vec<LocalExponentEstimate>> {
    let paths: Vec<&[f64]> = ensemble.paths().collect();
    hurst_profile_raw(ensemble.grid.points(), &paths, t_list, window, scales)
}

/// Same as `hurst_profile` but on bare grid points and path slices (the CSV
/// re-import route, where no process spec is attached).
pub fn hurst_profile_raw(
    pts: &[f64],
    paths: &[&[f64]],
    t_list: &[f64],
    window: usize,
    scales: &[usize],
) -> Result<Vec<LocalExponentEstimate>> {
    if t_list.is_empty() {
        return Ok(Vec::new());
    }
    if paths.is_empty() {
        return Err(Error::InsufficientPaths { needed: 1, got: 0 });
    }
    if scales.len() < 2 {
        return Err(Error::InsufficientScales(scales.len()));
    }
    let n = pts.len();
    if n < 2 {
        return Err(Error::Grid("need at least two grid points".into()));
    }
    let dt = pts[1] - pts[0];
    let uniform = pts.windows(2).all(|w| (w[1] - w[0] - dt).abs() <= 1e-9 * dt.abs());
    if !uniform {
        return Err(Error::Grid("estimator needs a uniform grid".into()));
    }

    let max_scale = scales[scales.len() - 1];
    let n_paths = paths.len();

    let mut out = Vec::with_capacity(t_list.len());
    for &t in t_list {
        let center = ((t - pts[0]) / dt).round() as usize;
        let (lo, hi) = window_bounds(n, center, window, max_scale)?;

        // per-scale means for each path
        let per_path: Vec<Vec<f64>> =
            paths.iter().map(|p| squared_increment_means(p, lo, hi, scales)).collect();

        let mut mean = vec![0.0f64; scales.len()];
        for row in &per_path {
            for (acc, &v) in mean.iter_mut().zip(row) {
                *acc += v;
            }
        }
        for acc in &mut mean {
            *acc /= n_paths as f64;
        }

        let xs: Vec<f64> = scales.iter().map(|&m| (m as f64 * dt).ln()).collect();
        let ys: Vec<f64> = mean.iter().map(|&v| v.max(f64::MIN_POSITIVE).ln()).collect();
        let (slope, _, _) = ols(&xs, &ys);
        let (estimate, clamped) = slope_to_estimate(slope);

        // spread of log-means across paths -> slope standard error
        let stderr = if n_paths >= 2 {
            let x_mean = xs.iter().sum::<f64>() / xs.len() as f64;
            let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
            let mut var_slope = 0.0;
            for (j, &x) in xs.iter().enumerate() {
                let mut var_j = 0.0;
                for row in &per_path {
                    var_j += (row[j] - mean[j]).powi(2);
                }
                var_j /= (n_paths * (n_paths - 1)) as f64; // variance of the mean
                let se_log = var_j.sqrt() / mean[j].max(f64::MIN_POSITIVE);
                let w = (x - x_mean) / sxx;
                var_slope += w * w * se_log * se_log;
            }
            0.5 * var_slope.sqrt()
        } else {
            f64::NAN
        };

        out.push(LocalExponentEstimate {
            t: pts[0] + center as f64 * dt,
            estimate,
            clamped,
            window,
            scales: scales.to_vec(),
            stderr,
        });
    }
    Ok(out)
}

/// Default window for a grid of n samples: about n/16, forced odd, at least 33.
pub fn default_window(n: usize) -> usize {
    let w = (n / 16).max(32);
    w + 1 - (w % 2)
}
