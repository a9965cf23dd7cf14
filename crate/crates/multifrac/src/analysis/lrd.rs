//! Long-range-dependence audits: asymptotic exponents of the covariance and
//! correlation of the process and of its unit-time increments, plus the
//! summability-based memory classification.
//!
//! Predicted exponents come from the leading terms of the large-t expansion
//! of the kernel. With a = H(t)+H(s), the expansion of cov(t,s) carries the
//! two monomials t^(a(K-1)) and t^(aK-1), so the observable order is their
//! maximum:
//!
//! ```text
//! cov(t,s) ~ t^(Ka - min(a, 1)),    cor(t,s) ~ t^(K H(s) - min(a, 1))
//! ```
//!
//! For a < 1 and a > 1 this reproduces the two classical regime formulas; it
//! also covers the mixed case a >= 1 > Ka, where the t^(aK-1) monomial wins.
//!
//! For unit increments Y(t) = X(t+1) - X(t) with a Hurst function that
//! settles down at large t (every built-in does), the t-difference acts as a
//! derivative and costs exactly one power of t, so with m and L the min/max
//! of the four exponent sums over {t, t+1} x {s, s+1}:
//!
//! ```text
//! cov_Y(t,s) ~ cor_Y(t,s) ~ t^(max(m(K-1), LK-1) - 1)
//! ```
//!
//! and E Y^2(t) -> 2^(1-K), which is why the correlation shares the
//! covariance exponent. These laws were cross-checked against high-precision
//! kernel evaluation over three-decade grids.

use crate::analysis::increment_cov;
use crate::error::{Error, Result};
use crate::fit::fit_asymptotic_exponent;
use crate::kernels::ProcessSpec;
use crate::report::{inputs_of, Target, VerificationReport};
use serde_json::json;

const SLOPE_TOLERANCE: f64 = 0.05;
const REGIME_BAND: f64 = 0.02;

fn require_three_decades(t_grid: &[f64]) -> Result<()> {
    if t_grid.len() < 8 {
        return Err(Error::DegenerateFit("need at least 8 grid times".into()));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) || !(t_grid[0] > 0.0) {
        return Err(Error::DegenerateFit("t grid must be positive and increasing".into()));
    }
    let span = t_grid[t_grid.len() - 1] / t_grid[0];
    if span < 1e3 * (1.0 - 1e-9) {
        return Err(Error::DegenerateFit(format!(
            "t grid spans a factor {span:.3}; need at least 3 decades"
        )));
    }
    Ok(())
}

fn hurst_of(spec: &ProcessSpec, t: f64) -> Result<f64> {
    spec.hurst_at(t).ok_or_else(|| {
        Error::Domain("this audit needs a process with a Hurst exponent".into())
    })
}

/// Fit the large-t power laws of cov(t,s) and cor(t,s) and compare with the
/// exponents predicted by the kernel expansion at t_max.
pub fn lrd_process_audit(spec: &ProcessSpec, s: f64, t_grid: &[f64]) -> Result<VerificationReport> {
    require_three_decades(t_grid)?;
    if !(s > 0.0) {
        return Err(Error::Domain(format!("s must be positive, got {s}")));
    }
    let k = spec.k();
    let t_max = t_grid[t_grid.len() - 1];
    let h_t = hurst_of(spec, t_max)?;
    let h_s = hurst_of(spec, s)?;
    let a = h_t + h_s;

    let mut cov_samples = Vec::with_capacity(t_grid.len());
    let mut cor_samples = Vec::with_capacity(t_grid.len());
    let vs = spec.cov(s, s)?;
    for &t in t_grid {
        let c = spec.cov(t, s)?;
        cov_samples.push((t, c));
        cor_samples.push((t, c / (spec.cov(t, t)? * vs).sqrt()));
    }
    let cov_fit = fit_asymptotic_exponent(&cov_samples)?;
    let cor_fit = fit_asymptotic_exponent(&cor_samples)?;

    let pred_cov = k * a - a.min(1.0);
    let pred_cor = k * h_s - a.min(1.0);

    let ka = k * a;
    let boundary = (ka - 1.0).abs() < REGIME_BAND;
    let regime = if boundary {
        "unclassified (regime boundary K(H(t)+H(s)) ~ 1)"
    } else if ka > 1.0 {
        "covariance grows: K(H(t)+H(s)) > 1"
    } else {
        "covariance decays: K(H(t)+H(s)) < 1"
    };

    let deviation = (cov_fit.slope - pred_cov).abs().max((cor_fit.slope - pred_cor).abs());
    let key = if boundary { 0.0 } else { deviation };

    let mut notes = format!(
        "{regime}; predictions from the leading terms of the large-t kernel expansion"
    );
    if (a - 1.0).abs() < REGIME_BAND {
        notes.push_str("; H(t)+H(s) ~ 1: the two monomials have equal order");
    }

    Ok(VerificationReport::evaluate(
        "lrd_process",
        inputs_of(&[
            ("family", json!(spec.family_name())),
            ("K", json!(k)),
            ("s", json!(s)),
            ("t_max", json!(t_max)),
        ]),
        vec![
            ("max_slope_deviation".into(), key),
            ("cov_slope".into(), cov_fit.slope),
            ("cov_predicted".into(), pred_cov),
            ("cov_r_squared".into(), cov_fit.r_squared),
            ("cor_slope".into(), cor_fit.slope),
            ("cor_predicted".into(), pred_cor),
            ("cor_r_squared".into(), cor_fit.r_squared),
            ("exponent_sum".into(), a),
            ("K_times_sum".into(), ka),
        ],
        Target::Value(0.0),
        SLOPE_TOLERANCE,
        notes,
    ))
}

/// Fit the large-t power laws of cov_Y(t,s) and cor_Y(t,s) for the unit-time
/// increments and compare with the second-difference prediction.
pub fn lrd_increment_audit(
    spec: &ProcessSpec,
    s: f64,
    t_grid: &[f64],
) -> Result<VerificationReport> {
    require_three_decades(t_grid)?;
    if !(s >= 0.0) {
        return Err(Error::Domain(format!("s must be nonnegative, got {s}")));
    }
    let k = spec.k();
    let t_max = t_grid[t_grid.len() - 1];
    let sums = [
        hurst_of(spec, t_max)? + hurst_of(spec, s)?,
        hurst_of(spec, t_max + 1.0)? + hurst_of(spec, s)?,
        hurst_of(spec, t_max)? + hurst_of(spec, s + 1.0)?,
        hurst_of(spec, t_max + 1.0)? + hurst_of(spec, s + 1.0)?,
    ];
    let m = sums.iter().copied().fold(f64::INFINITY, f64::min);
    let l = sums.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let inputs = inputs_of(&[
        ("family", json!(spec.family_name())),
        ("K", json!(k)),
        ("s", json!(s)),
        ("t_max", json!(t_max)),
        ("sums", json!(sums.to_vec())),
    ]);

    // The separation hypothesis: the four sums must be pairwise distinct.
    // When H is effectively constant they all coincide and the leading
    // monomials cancel to a different order entirely, so the audit reports
    // and skips rather than asserting.
    if l - m < 1e-9 {
        return Ok(VerificationReport::evaluate(
            "lrd_increments",
            inputs,
            vec![("max_slope_deviation".into(), 0.0)],
            Target::Value(0.0),
            SLOPE_TOLERANCE,
            "degenerate, skipped: the four exponent sums coincide (H effectively constant \
             at both time arguments); increment cancellation changes the order",
        ));
    }
    let mut pairwise_note = String::new();
    let mut sorted = sums;
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[1] - w[0] < 1e-9) {
        pairwise_note = "; some sums coincide at t_max (H settled on the t side); the \
                         second-difference law is unaffected"
            .to_string();
    }

    let mut cov_samples = Vec::with_capacity(t_grid.len());
    let mut cor_samples = Vec::with_capacity(t_grid.len());
    let var_s = increment_cov(spec, s, s)?;
    for &t in t_grid {
        let c = increment_cov(spec, t, s)?;
        cov_samples.push((t, c));
        cor_samples.push((t, c / (increment_cov(spec, t, t)? * var_s).sqrt()));
    }
    let cov_fit = fit_asymptotic_exponent(&cov_samples)?;
    let cor_fit = fit_asymptotic_exponent(&cor_samples)?;

    let kl = k * l;
    let predicted = (m * (k - 1.0)).max(l * k - 1.0) - 1.0;
    let boundary = (kl - 1.0).abs() < REGIME_BAND;
    let deviation = (cov_fit.slope - predicted).abs().max((cor_fit.slope - predicted).abs());
    let key = if boundary { 0.0 } else { deviation };

    let regime = if boundary {
        "unclassified (regime boundary KL ~ 1)"
    } else if kl > 1.0 {
        "KL > 1"
    } else {
        "KL < 1"
    };

    Ok(VerificationReport::evaluate(
        "lrd_increments",
        inputs,
        vec![
            ("max_slope_deviation".into(), key),
            ("cov_slope".into(), cov_fit.slope),
            ("cor_slope".into(), cor_fit.slope),
            ("predicted".into(), predicted),
            ("cov_r_squared".into(), cov_fit.r_squared),
            ("cor_r_squared".into(), cor_fit.r_squared),
            ("sum_min".into(), m),
            ("sum_max".into(), l),
            ("KL".into(), kl),
        ],
        Target::Value(0.0),
        SLOPE_TOLERANCE,
        format!(
            "{regime}; increment variance tends to 2^(1-K) so cov and cor share the \
             exponent max(m(K-1), LK-1) - 1{pairwise_note}"
        ),
    ))
}

/// Summability classification of |cor_Y(s, s + k delta)|.
///
/// Fits the tail exponent tau over the last decades of lags and classifies
/// LONG (tau > -1, non-summable), SHORT (tau < -1) or BOUNDARY
/// (|tau + 1| < 0.02). For the two-parameter family the known dichotomy
/// (long memory iff 2HK > 1) is asserted whenever |2HK - 1| > 0.05.
pub fn memory_classification(
    spec: &ProcessSpec,
    s: f64,
    delta: f64,
    n_terms: usize,
) -> Result<VerificationReport> {
    if n_terms < 1000 {
        return Err(Error::Domain(format!("need n_terms >= 1000, got {n_terms}")));
    }
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("delta must be positive, got {delta}")));
    }
    if !(s >= 0.0) {
        return Err(Error::Domain(format!("s must be nonnegative, got {s}")));
    }

    let var_s = increment_cov(spec, s, s)?;
    if var_s <= 0.0 {
        return Err(Error::Domain("increment variance at s vanishes".into()));
    }

    // log-spaced lag subsample (endpoints pinned so the fit spans its full
    // range) for the tail fit; every term feeds the partial sum
    let fit_lo = (n_terms / 150).max(8);
    let fit_lags: Vec<usize> = {
        let m = 60;
        let ratio = n_terms as f64 / fit_lo as f64;
        let mut lags: Vec<usize> = (0..=m)
            .map(|j| ((fit_lo as f64) * ratio.powf(j as f64 / m as f64)).round() as usize)
            .collect();
        lags.dedup();
        lags
    };

    let mut partial_sum = 0.0f64;
    let mut samples: Vec<(f64, f64)> = Vec::new();
    let mut zero_tail = 0usize;
    let mut fit_cursor = 0usize;
    for lag in 1..=n_terms {
        let t = s + lag as f64 * delta;
        let c = increment_cov(spec, t, s)?;
        let var_t = increment_cov(spec, t, t)?;
        let cor = (c / (var_t * var_s).sqrt()).abs();
        partial_sum += cor;
        if lag >= fit_lo && cor == 0.0 {
            zero_tail += 1;
        }
        if fit_cursor < fit_lags.len() && lag == fit_lags[fit_cursor] {
            fit_cursor += 1;
            if cor > 0.0 {
                samples.push((lag as f64, cor));
            }
        }
    }

    let tail_total = n_terms - fit_lo + 1;
    let (label, tail_exponent, fit_r2) = if zero_tail * 2 > tail_total {
        // e.g. Brownian increments: exactly zero beyond lag 1
        ("SHORT".to_string(), f64::NEG_INFINITY, 1.0)
    } else {
        let fit = fit_asymptotic_exponent(&samples)?;
        let tau = fit.slope;
        let label = if (tau + 1.0).abs() < REGIME_BAND {
            "BOUNDARY".to_string()
        } else if tau > -1.0 {
            "LONG".to_string()
        } else {
            "SHORT".to_string()
        };
        (label, tau, fit.r_squared)
    };

    // agreement with the 2HK dichotomy where it applies
    let dichotomy_hk = match spec {
        ProcessSpec::Fbm { h } => Some(2.0 * h),
        ProcessSpec::Bfbm { h, k } => Some(2.0 * h * k),
        _ => None,
    };
    let (consistent, expected, two_hk) = match dichotomy_hk {
        Some(two_hk) if (two_hk - 1.0).abs() > 0.05 => {
            let expected = if two_hk > 1.0 { "LONG" } else { "SHORT" };
            ((label == expected) as i32 as f64, expected.to_string(), two_hk)
        }
        Some(two_hk) => (1.0, "BOUNDARY (not asserted)".to_string(), two_hk),
        None => (1.0, "n/a".to_string(), f64::NAN),
    };

    let code = match label.as_str() {
        "LONG" => 1.0,
        "BOUNDARY" => 0.5,
        _ => 0.0,
    };

    Ok(VerificationReport::evaluate(
        "memory_classification",
        inputs_of(&[
            ("family", json!(spec.family_name())),
            ("s", json!(s)),
            ("delta", json!(delta)),
            ("n_terms", json!(n_terms)),
        ]),
        vec![
            ("dichotomy_consistent".into(), consistent),
            ("classification_code".into(), code),
            ("tail_exponent".into(), tail_exponent),
            ("partial_sum".into(), partial_sum),
            ("fit_r_squared".into(), fit_r2),
            ("two_hk".into(), two_hk),
        ],
        Target::Value(1.0),
        0.0,
        format!("classification: {label}; expected from dichotomy: {expected}"),
    ))
}
