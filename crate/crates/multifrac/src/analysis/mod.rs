//! Deterministic numerical verification of the process family's quantitative
//! properties: increment bounds, limits, and asymptotic exponents, all
//! computed from the kernels. Gaussian finite-dimensional claims are
//! covariance claims, so kernel-level checks verify them exactly at desk
//! scale; Monte Carlo enters only as an end-to-end cross-check elsewhere.

mod lass;
mod lrd;
mod regularity;

pub use lass::{lass_covariance_limit, LassOutcome};
pub use lrd::{lrd_increment_audit, lrd_process_audit, memory_classification};
pub use regularity::{
    holder_bounds_audit, prop2_constants, quasi_helix_audit, small_increment_ratio,
    x_displacement_variance, Prop2Constants, SmallIncrementResult,
};

use crate::error::{Error, Result};
use crate::kernels::ProcessSpec;
use crate::special::gaussian_moment_constant;

/// E(X_t - X_s)^2 from the kernel: cov(t,t) + cov(s,s) - 2 cov(t,s).
/// Tiny negative rounding (above -1e-13 relative) is clamped to zero.
pub fn increment_second_moment(spec: &ProcessSpec, t: f64, s: f64) -> Result<f64> {
    let vt = spec.cov(t, t)?;
    let vs = spec.cov(s, s)?;
    let c = spec.cov(t, s)?;
    let m = vt + vs - 2.0 * c;
    if m < 0.0 {
        let scale = vt.abs().max(vs.abs()).max(1.0);
        if m > -1e-13 * scale {
            return Ok(0.0);
        }
    }
    Ok(m)
}

/// E|Y|^alpha = c(alpha) (E Y^2)^(alpha/2) for a centred Gaussian Y,
/// with c(alpha) = 2^(alpha/2) Gamma((alpha+1)/2) / Gamma(1/2).
pub fn gaussian_abs_moment(alpha: f64, variance: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("moment order must be positive, got {alpha}")));
    }
    if !(variance >= 0.0) {
        return Err(Error::Domain(format!("variance must be nonnegative, got {variance}")));
    }
    Ok(gaussian_moment_constant(alpha) * variance.powf(0.5 * alpha))
}

/// cov(t,s) / sqrt(cov(t,t) cov(s,s)).
pub fn correlation(spec: &ProcessSpec, t: f64, s: f64) -> Result<f64> {
    let vt = spec.cov(t, t)?;
    let vs = spec.cov(s, s)?;
    if vt <= 0.0 || vs <= 0.0 {
        return Err(Error::Domain(format!(
            "correlation undefined: variance vanishes (var(t)={vt}, var(s)={vs})"
        )));
    }
    Ok(spec.cov(t, s)? / (vt * vs).sqrt())
}

/// Covariance of the unit-time increments Y(t) = X(t+1) - X(t):
/// cov(t+1,s+1) - cov(t+1,s) - cov(t,s+1) + cov(t,s).
pub fn increment_cov(spec: &ProcessSpec, t: f64, s: f64) -> Result<f64> {
    Ok(spec.cov(t + 1.0, s + 1.0)? - spec.cov(t + 1.0, s)? - spec.cov(t, s + 1.0)?
        + spec.cov(t, s)?)
}

/// Correlation of the unit-time increments.
pub fn increment_correlation(spec: &ProcessSpec, s: f64, t: f64) -> Result<f64> {
    let c = increment_cov(spec, t, s)?;
    let vt = increment_cov(spec, t, t)?;
    let vs = increment_cov(spec, s, s)?;
    if vt <= 0.0 || vs <= 0.0 {
        return Err(Error::Domain(format!(
            "increment correlation undefined: variance vanishes (var(t)={vt}, var(s)={vs})"
        )));
    }
    Ok(c / (vt * vs).sqrt())
}
