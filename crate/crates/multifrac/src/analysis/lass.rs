//! Local asymptotic self-similarity: the rescaled increment covariance around
//! a fixed time t converges, as the zoom scale shrinks, to 2^(1-K) times the
//! fBm kernel with exponent H(t)K.

use crate::error::{Error, Result};
use crate::fit::aitken;
use crate::hurst::HurstFunction;
use crate::kernels::{cov_ext, cov_fbm};
use crate::report::{inputs_of, Target, VerificationReport};
use serde_json::json;

/// One (u, v) entry of the rescaled covariance study.
#[derive(Debug, Clone)]
pub struct LassEntry {
    pub u: f64,
    pub v: f64,
    /// (rho, C_rho(u,v)) along the ladder.
    pub ladder: Vec<(f64, f64)>,
    pub extrapolated: f64,
    pub target: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone)]
pub struct LassOutcome {
    pub report: VerificationReport,
    pub entries: Vec<LassEntry>,
}

/// For each rho computes C_rho(u,v) =
/// E[(B_{t+rho u} - B_t)(B_{t+rho v} - B_t)] / rho^(2 H(t) K)
/// from the extended kernel, extrapolates rho -> 0, and compares entrywise
/// against 2^(1-K) cov_fbm(u, v, H(t)K) at 1e-3 relative.
pub fn lass_covariance_limit(
    hf: &HurstFunction,
    k: f64,
    t: f64,
    u_grid: &[f64],
    rho_list: &[f64],
) -> Result<LassOutcome> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    if u_grid.is_empty() || u_grid.iter().any(|&u| !(u > 0.0)) {
        return Err(Error::Domain("u grid must be nonempty and positive".into()));
    }
    if rho_list.len() < 4
        || rho_list.windows(2).any(|w| w[1] >= w[0])
        || rho_list.iter().any(|&r| !(r > 0.0))
    {
        return Err(Error::Domain(
            "rho ladder must have >= 4 positive strictly decreasing rungs".into(),
        ));
    }

    let ht = hf.eval(t);
    let hk = ht * k;
    let base = cov_ext(t, t, hf, k)?;

    let mut entries = Vec::new();
    let mut worst = 0.0f64;
    for (i, &u) in u_grid.iter().enumerate() {
        for &v in &u_grid[..=i] {
            let mut ladder = Vec::with_capacity(rho_list.len());
            for &rho in rho_list {
                let c = cov_ext(t + rho * u, t + rho * v, hf, k)?
                    - cov_ext(t + rho * u, t, hf, k)?
                    - cov_ext(t, t + rho * v, hf, k)?
                    + base;
                ladder.push((rho, c / rho.powf(2.0 * hk)));
            }

            let values: Vec<f64> = ladder.iter().map(|l| l.1).collect();
            let last = *values.last().expect("ladder non-empty");
            let tail = &values[values.len().saturating_sub(8)..];
            let mut extrapolated = aitken(tail);
            // keep the extrapolation honest: it must not drift further from
            // the tail than the raw rung-to-rung movement
            let step = (values[values.len() - 1] - values[values.len() - 2]).abs();
            if !extrapolated.is_finite() || (extrapolated - last).abs() > 10.0 * step.max(1e-14) {
                extrapolated = last;
            }

            let target = 2.0f64.powf(1.0 - k) * cov_fbm(u, v, hk)?;
            let rel_error = (extrapolated - target).abs() / target.abs();
            worst = worst.max(rel_error);
            entries.push(LassEntry { u, v, ladder, extrapolated, target, rel_error });
        }
    }

    let report = VerificationReport::evaluate(
        "lass_covariance_limit",
        inputs_of(&[
            ("K", json!(k)),
            ("t", json!(t)),
            ("H_t", json!(ht)),
            ("u_grid", json!(u_grid)),
            ("rho_min", json!(rho_list[rho_list.len() - 1])),
        ]),
        vec![
            ("max_rel_error".into(), worst),
            ("entries".into(), entries.len() as f64),
            ("sigma2_target".into(), 2.0f64.powf(1.0 - k)),
        ],
        Target::Value(0.0),
        1e-3,
        "entrywise limit of the rescaled covariance vs 2^(1-K) fBm(H(t)K)",
    );

    Ok(LassOutcome { report, entries })
}
