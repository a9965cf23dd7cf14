//! Time-varying Hurst exponents H(t) with a declared range [mu, nu] in (0,1)
//! and a declared Hölder exponent beta.
//!
//! Every built-in family is Lipschitz on bounded intervals, so beta = 1 and
//! sup H(t) = nu < beta, which is exactly the hypothesis the regularity and
//! LASS results need. Evaluation clamps into [mu, nu]; a flag records whether
//! clamping fired.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HurstKind {
    /// H(t) = h.
    Constant { h: f64 },
    /// H(t) = intercept + slope * t, clamped into [mu, nu].
    Linear { intercept: f64, slope: f64 },
    /// H(t) = (mu+nu)/2 + (nu-mu)/2 * sin(2 pi t / period + phase).
    Sine { period: f64, phase: f64 },
    /// H(t) = mu + (nu-mu) / (1 + exp(-steepness (t - center))).
    Logistic { center: f64, steepness: f64 },
    /// Piecewise-linear interpolation of user-supplied knots (t, H(t)),
    /// constant beyond the first/last knot. Range and beta are declared by
    /// the caller because they cannot be certified for arbitrary tables.
    Tabulated { knots: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HurstFunction {
    kind: HurstKind,
    range_lo: f64,
    range_hi: f64,
    holder_exponent: f64,
}

impl HurstFunction {
    pub fn constant(h: f64) -> Result<Self> {
        check_open_unit("h", h)?;
        Ok(Self { kind: HurstKind::Constant { h }, range_lo: h, range_hi: h, holder_exponent: 1.0 })
    }

    pub fn linear(intercept: f64, slope: f64, range_lo: f64, range_hi: f64) -> Result<Self> {
        check_range(range_lo, range_hi)?;
        if !intercept.is_finite() || !slope.is_finite() {
            return Err(Error::Domain("linear Hurst coefficients must be finite".into()));
        }
        Ok(Self {
            kind: HurstKind::Linear { intercept, slope },
            range_lo,
            range_hi,
            holder_exponent: 1.0,
        })
    }

    pub fn sine(range_lo: f64, range_hi: f64, period: f64, phase: f64) -> Result<Self> {
        check_range(range_lo, range_hi)?;
        if !(period > 0.0) {
            return Err(Error::Domain(format!("sine period must be positive, got {period}")));
        }
        Ok(Self { kind: HurstKind::Sine { period, phase }, range_lo, range_hi, holder_exponent: 1.0 })
    }

    pub fn logistic(range_lo: f64, range_hi: f64, center: f64, steepness: f64) -> Result<Self> {
        check_range(range_lo, range_hi)?;
        if !(steepness > 0.0) {
            return Err(Error::Domain(format!(
                "logistic steepness must be positive, got {steepness}"
            )));
        }
        Ok(Self {
            kind: HurstKind::Logistic { center, steepness },
            range_lo,
            range_hi,
            holder_exponent: 1.0,
        })
    }

    /// Library-only escape hatch: a tabulated H(t) with caller-declared range
    /// and Hölder exponent. The theorem audits cannot check hypotheses for a
    /// black box, so the declaration is taken at face value.
    pub fn tabulated(
        knots: Vec<(f64, f64)>,
        range_lo: f64,
        range_hi: f64,
        holder_exponent: f64,
    ) -> Result<Self> {
        check_range(range_lo, range_hi)?;
        if !(holder_exponent > 0.0) {
            return Err(Error::Domain("holder exponent must be positive".into()));
        }
        if knots.is_empty() {
            return Err(Error::Domain("tabulated Hurst function needs at least one knot".into()));
        }
        if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::Domain("tabulated knots must have strictly increasing times".into()));
        }
        Ok(Self { kind: HurstKind::Tabulated { knots }, range_lo, range_hi, holder_exponent })
    }

    pub fn kind(&self) -> &HurstKind {
        &self.kind
    }

    /// Declared lower bound mu of the range.
    pub fn range_lo(&self) -> f64 {
        self.range_lo
    }

    /// Declared upper bound nu of the range.
    pub fn range_hi(&self) -> f64 {
        self.range_hi
    }

    /// Declared Hölder exponent beta of t -> H(t); 1 for every built-in.
    pub fn holder_exponent(&self) -> f64 {
        self.holder_exponent
    }

    /// H(t), clamped into [mu, nu].
    pub fn eval(&self, t: f64) -> f64 {
        self.eval_flagged(t).0
    }

    /// H(t) together with a flag recording whether clamping occurred.
    pub fn eval_flagged(&self, t: f64) -> (f64, bool) {
        let raw = match &self.kind {
            HurstKind::Constant { h } => *h,
            HurstKind::Linear { intercept, slope } => intercept + slope * t,
            HurstKind::Sine { period, phase } => {
                let mid = 0.5 * (self.range_lo + self.range_hi);
                let amp = 0.5 * (self.range_hi - self.range_lo);
                mid + amp * (2.0 * std::f64::consts::PI * t / period + phase).sin()
            }
            HurstKind::Logistic { center, steepness } => {
                self.range_lo
                    + (self.range_hi - self.range_lo) / (1.0 + (-steepness * (t - center)).exp())
            }
            HurstKind::Tabulated { knots } => interp_knots(knots, t),
        };
        if raw < self.range_lo {
            (self.range_lo, true)
        } else if raw > self.range_hi {
            (self.range_hi, true)
        } else {
            (raw, false)
        }
    }

    /// Whether H is the same constant everywhere (up to the clamp).
    pub fn is_constant(&self) -> bool {
        matches!(self.kind, HurstKind::Constant { .. }) || self.range_lo == self.range_hi
    }

    /// Analytic Lipschitz bound on |H(t)-H(s)| / |t-s| where one is available.
    /// Tabulated functions report their maximal knot-to-knot slope.
    pub fn lipschitz_bound(&self) -> f64 {
        match &self.kind {
            HurstKind::Constant { .. } => 0.0,
            HurstKind::Linear { slope, .. } => slope.abs(),
            HurstKind::Sine { period, .. } => {
                (self.range_hi - self.range_lo) * std::f64::consts::PI / period
            }
            HurstKind::Logistic { steepness, .. } => {
                0.25 * (self.range_hi - self.range_lo) * steepness
            }
            HurstKind::Tabulated { knots } => knots
                .windows(2)
                .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs())
                .fold(0.0, f64::max),
        }
    }
}

fn interp_knots(knots: &[(f64, f64)], t: f64) -> f64 {
    match knots.binary_search_by(|k| k.0.total_cmp(&t)) {
        Ok(i) => knots[i].1,
        Err(0) => knots[0].1,
        Err(i) if i == knots.len() => knots[knots.len() - 1].1,
        Err(i) => {
            let (t0, h0) = knots[i - 1];
            let (t1, h1) = knots[i];
            h0 + (h1 - h0) * (t - t0) / (t1 - t0)
        }
    }
}

fn check_open_unit(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must lie in (0,1), got {v}")))
    }
}

fn check_range(lo: f64, hi: f64) -> Result<()> {
    check_open_unit("range_lo", lo)?;
    check_open_unit("range_hi", hi)?;
    if lo > hi {
        return Err(Error::Domain(format!("range_lo {lo} exceeds range_hi {hi}")));
    }
    Ok(())
}
