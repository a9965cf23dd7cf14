//! Increment-variance bounds and Hölder-regularity audits.

use crate::analysis::increment_second_moment;
use crate::error::{Error, Result};
use crate::fit::{self, ExponentFit};
use crate::hurst::HurstFunction;
use crate::kernels::ProcessSpec;
use crate::quad;
use crate::report::{inputs_of, Target, VerificationReport};
use crate::simulate::TimeGrid;
use crate::special::gamma_pos;
use serde_json::json;

/// Two-sided quasi-helix bound:
/// 2^-K |t-s|^2HK <= E(B_t - B_s)^2 <= 2^(1-K) |t-s|^2HK on all grid pairs,
/// with 1e-12 relative slack.
pub fn quasi_helix_audit(h: f64, k: f64, grid: &TimeGrid) -> Result<VerificationReport> {
    let spec = ProcessSpec::bfbm(h, k)?;
    let pts = grid.points();
    let tol = 1e-12;

    let mut worst = f64::NEG_INFINITY;
    let mut pairs = 0usize;
    for (i, &t) in pts.iter().enumerate() {
        for &s in &pts[..=i] {
            let m = increment_second_moment(&spec, t, s)?;
            let gap = (t - s).abs().powf(2.0 * h * k);
            let lo = (-k * std::f64::consts::LN_2).exp() * gap;
            let hi = 2.0 * lo;
            // violations, relative to the bound magnitude
            let v_lo = (lo - m) / lo.max(f64::MIN_POSITIVE);
            let v_hi = (m - hi) / hi.max(f64::MIN_POSITIVE);
            worst = worst.max(v_lo).max(v_hi);
            pairs += 1;
        }
    }

    Ok(VerificationReport::evaluate(
        "quasi_helix",
        inputs_of(&[("H", json!(h)), ("K", json!(k)), ("grid_len", json!(grid.len()))]),
        vec![("max_relative_violation".into(), worst), ("pairs".into(), pairs as f64)],
        Target::Interval { lo: f64::MIN, hi: 0.0 },
        tol,
        "",
    ))
}

/// The ratio sigma_eps^2(t) / eps^2HK along a decreasing ladder, its
/// log-log fit, and the Richardson-extrapolated eps -> 0 limit (2^(1-K)).
#[derive(Debug, Clone)]
pub struct SmallIncrementResult {
    /// Fit of log sigma^2 against log eps; slope estimates 2HK.
    pub fit: ExponentFit,
    /// (eps, ratio) pairs in ladder order.
    pub ratios: Vec<(f64, f64)>,
    /// Extrapolated limit of the ratio.
    pub limit: f64,
}

pub fn small_increment_ratio(
    h: f64,
    k: f64,
    t: f64,
    eps_list: &[f64],
) -> Result<SmallIncrementResult> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    if eps_list.len() < 3 {
        return Err(Error::Domain("need at least 3 ladder rungs".into()));
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) || eps_list.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::Domain("eps ladder must be positive and strictly decreasing".into()));
    }
    let spec = ProcessSpec::bfbm(h, k)?;
    let p = 2.0 * h * k;

    let mut ratios = Vec::with_capacity(eps_list.len());
    let mut sigma2 = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let m = increment_second_moment(&spec, t + eps, t)?;
        sigma2.push(m);
        ratios.push((eps, m / eps.powf(p)));
    }

    // The ratio expands as 2^(1-K) + a2 eps^(2-2HK) + a3 eps^(3-2HK) + ...
    // for t > 0, so Richardson with leading order 2-2HK applies.
    let values: Vec<f64> = ratios.iter().map(|r| r.1).collect();
    let limit = fit::richardson(eps_list, &values, 2.0 - p);

    let mut samples: Vec<(f64, f64)> =
        eps_list.iter().copied().zip(sigma2.iter().copied()).collect();
    samples.reverse();
    let fit = fit::fit_asymptotic_exponent(&samples)?;

    Ok(SmallIncrementResult { fit, ratios, limit })
}

/// E(X_t^{H,K} - X_t^{H2,K})^2 by adaptive quadrature of
/// integral_0^inf (e^{-theta t^2H2} - e^{-theta t^2H})^2 theta^{-(1+K)} dtheta.
pub fn x_displacement_variance(t: f64, h: f64, h2: f64, k: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("t must be nonnegative, got {t}")));
    }
    for (name, v) in [("H", h), ("H2", h2)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::Domain(format!("{name} must lie in (0,1), got {v}")));
        }
    }
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::Domain(format!("K must lie in (0,1), got {k}")));
    }
    if t == 0.0 || h == h2 {
        return Ok(0.0);
    }

    let a = t.powf(2.0 * h2.min(h));
    let b = t.powf(2.0 * h2.max(h));
    let (a, b) = (a.min(b), a.max(b));

    // difference of exponentials without cancellation:
    // e^{-x a} - e^{-x b} = e^{-x a} (1 - e^{-x (b-a)})
    let diff = move |x: f64| (-x * a).exp() * (-(-x * (b - a)).exp_m1());

    const TOL: f64 = 5e-11;
    const MAX_PANELS: usize = 200_000;

    let head = quad::integrate(
        |x| if x <= 0.0 { 0.0 } else { diff(x).powi(2) * x.powf(-1.0 - k) },
        0.0,
        1.0,
        TOL,
        MAX_PANELS,
    )?;
    // tail x -> 1/u
    let tail = quad::integrate(
        |u| if u <= 0.0 { 0.0 } else { diff(1.0 / u).powi(2) * u.powf(k - 1.0) },
        0.0,
        1.0,
        TOL,
        MAX_PANELS,
    )?;
    Ok(head.value + tail.value)
}

/// The three sup-of-integral constants from the parameter-continuity bound:
/// a fractional-noise constant (c1) and the two X-process constants for the
/// t <= 1 and t >= 1 branches (c2, c3). The sup runs over a 256-point grid
/// on [a, b]; t = 0 is excluded because the displacement there is
/// identically zero while the raw integral diverges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prop2Constants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl Prop2Constants {
    /// The X-process bound constant: max(c2, c3). This is what bounds
    /// x_displacement_variance / |H - H'|^2.
    pub fn c_final(&self) -> f64 {
        self.c2.max(self.c3)
    }

    /// Full parameter-continuity constant for the process itself, via the
    /// decomposition coefficients: sup_t E(B^H_t - B^H'_t)^2 <=
    /// (2^(2-K) c1 + 2^(1-K) K / Gamma(1-K) * max(c2,c3)) |H - H'|^2.
    /// At K = 1 the X part vanishes (1/Gamma(0) = 0).
    pub fn parameter_continuity_bound(&self, k: f64) -> f64 {
        let x_coeff = (2.0f64).powf(1.0 - k) * k / gamma_pos(1.0 - k);
        (2.0f64).powf(2.0 - k) * self.c1 + x_coeff * self.c_final()
    }
}

pub fn prop2_constants(a: f64, b: f64, alpha: f64, gamma: f64, k: f64) -> Result<Prop2Constants> {
    if !(a >= 0.0 && b > a) {
        return Err(Error::Domain(format!("need 0 <= a < b, got a={a}, b={b}")));
    }
    if !(alpha > 0.0 && alpha <= gamma && gamma < 1.0) {
        return Err(Error::Domain(format!(
            "need 0 < alpha <= gamma < 1, got alpha={alpha}, gamma={gamma}"
        )));
    }
    if !(k > 0.0 && k <= 1.0) {
        return Err(Error::Domain(format!("K must lie in (0,1], got {k}")));
    }

    const GRID: usize = 256;
    let ts: Vec<f64> =
        (0..GRID).map(|i| a + (b - a) * i as f64 / (GRID - 1) as f64).collect();

    // c1 = 4 sup_t [ int_0^1 (1-cos(t th)) th^{-2 gamma - 1} ln^2 th dth
    //              + int_1^inf th^{-2 alpha - 1} ln^2 th dth ]
    // Both pieces are mapped onto exponentially decaying smooth integrands:
    // th = e^{-v} and th = e^{w} respectively.
    let tail_c1 = {
        let mut w_max = 40.0 / (2.0 * alpha);
        while w_max * w_max * (-2.0 * alpha * w_max).exp() > 1e-16 {
            w_max *= 1.5;
        }
        quad::integrate(|w| w * w * (-2.0 * alpha * w).exp(), 0.0, w_max, 1e-12, 50_000)?.value
    };
    let mut c1_sup = f64::NEG_INFINITY;
    for &t in &ts {
        let head = if t == 0.0 {
            0.0
        } else {
            let decay = 2.0 - 2.0 * gamma;
            let mut v_max = 40.0 / decay;
            while (t * t).max(1.0) * v_max * v_max * (-decay * v_max).exp() > 1e-14 {
                v_max *= 1.5;
            }
            quad::integrate(
                |v| {
                    let x = t * (-v).exp();
                    if x < 1e-4 {
                        0.5 * t * t * v * v * ((2.0 * gamma - 2.0) * v).exp()
                    } else {
                        let s = (0.5 * x).sin();
                        2.0 * s * s * v * v * (2.0 * gamma * v).exp()
                    }
                },
                0.0,
                v_max,
                1e-9,
                100_000,
            )?
            .value
        };
        c1_sup = c1_sup.max(head + tail_c1);
    }
    let c1 = 4.0 * c1_sup;

    // J(t, e) = int_0^inf exp(-2 th t^2e) th^{1-K} dth = (2 t^2e)^(K-2) * g
    // with g = int_0^inf e^{-w} w^{1-K} dw evaluated once by quadrature.
    let g = quad::integrate(
        |w| if w <= 0.0 { 0.0 } else { (-w).exp() * w.powf(1.0 - k) },
        0.0,
        60.0,
        1e-13,
        100_000,
    )?
    .value;
    let j = |t: f64, e: f64| (2.0 * t.powf(2.0 * e)).powf(k - 2.0) * g;

    let sup_pos = |e: f64| {
        ts.iter()
            .filter(|&&t| t > 0.0)
            .map(|&t| j(t, e))
            .fold(f64::NEG_INFINITY, f64::max)
    };

    let inv_e_alpha = 1.0 / (std::f64::consts::E * alpha);
    let c2 = inv_e_alpha * inv_e_alpha * sup_pos(gamma);

    let log_factor = ts
        .iter()
        .map(|&t| if t == 0.0 { 0.0 } else { 4.0 * t.powf(4.0 * gamma) * t.ln() * t.ln() })
        .fold(f64::NEG_INFINITY, f64::max);
    let c3 = log_factor * sup_pos(alpha);

    let out = Prop2Constants { c1, c2, c3 };
    if !(out.c1.is_finite() && out.c2.is_finite() && out.c3.is_finite()) {
        return Err(Error::Domain(format!(
            "constants not finite: c1={}, c2={}, c3={}",
            out.c1, out.c2, out.c3
        )));
    }
    Ok(out)
}

/// Two-sided Hölder audit over pairs in [0,1]^2.
///
/// Upper: the smallest empirical constant C_hat = max E(B_t-B_s)^2 /
/// |t-s|^(2 (H(t) v H(s)) K) must be finite and below the recipe constant
/// C4 = 2^(2-K) + 2 C' with C' = c_final * L^2, L the fitted Hölder constant
/// of the Hurst function over the same pairs.
///
/// Lower: over pairs with |t-s| < delta (delta from the constructive recipe
/// delta = 0.999 (min(1, 1/(2^(1+K) C''')))^eta, eta = 1/(2 (beta - K nu))),
/// the ratio E / |t-s|^(2 (H(t) ^ H(s)) K) must stay positive. If too few
/// input pairs are that close, deterministic close pairs are derived from
/// the inputs so the lower bound is actually exercised.
pub fn holder_bounds_audit(
    hf: &HurstFunction,
    k: f64,
    pairs: &[(f64, f64)],
) -> Result<VerificationReport> {
    if pairs.is_empty() {
        return Err(Error::Domain("need at least one pair".into()));
    }
    if pairs.iter().any(|&(t, s)| !(0.0..=1.0).contains(&t) || !(0.0..=1.0).contains(&s)) {
        return Err(Error::Domain("pairs must lie in [0,1]^2".into()));
    }
    let spec = ProcessSpec::ext_bfbm(hf.clone(), k)?;
    let beta = hf.holder_exponent();
    let nu = hf.range_hi();
    if !(k * nu < beta) {
        return Err(Error::Domain(format!(
            "hypothesis sup H(t) K < beta violated: K nu = {} >= beta = {beta}",
            k * nu
        )));
    }

    // fitted Hölder constant of H over the supplied pairs
    let mut lipschitz = 0.0f64;
    let mut skipped = 0usize;
    for &(t, s) in pairs {
        if t == s {
            skipped += 1;
            continue;
        }
        lipschitz =
            lipschitz.max((hf.eval(t) - hf.eval(s)).abs() / (t - s).abs().powf(beta));
    }

    let consts = prop2_constants(0.0, 1.0, hf.range_lo(), hf.range_hi(), k)?;
    let c_prime = consts.parameter_continuity_bound(k) * lipschitz * lipschitz;
    let c4 = (2.0f64).powf(2.0 - k) + 2.0 * c_prime;

    let mut c_hat = 0.0f64;
    for &(t, s) in pairs {
        if t == s {
            continue;
        }
        let m = increment_second_moment(&spec, t, s)?;
        let expo = 2.0 * hf.eval(t).max(hf.eval(s)) * k;
        c_hat = c_hat.max(m / (t - s).abs().powf(expo));
    }

    // constructive delta for the lower bound
    let c_second = c_prime;
    let eta = 0.5 / (beta - k * nu);
    let delta = if c_second == 0.0 {
        0.999
    } else {
        0.999 * (1.0 / ((2.0f64).powf(1.0 + k) * c_second)).min(1.0).powf(eta)
    };

    let mut close: Vec<(f64, f64)> = pairs
        .iter()
        .copied()
        .filter(|&(t, s)| t != s && (t - s).abs() < delta)
        .collect();
    if close.len() < 32 {
        for &(t, _) in pairs.iter().take(1000) {
            for f in [0.25, 0.5, 0.75] {
                let base = t.min(1.0 - delta).max(0.0);
                let other = base + f * delta;
                if other <= 1.0 && other != base {
                    close.push((base, other));
                }
            }
        }
    }
    let mut m_hat = f64::INFINITY;
    for &(t, s) in &close {
        let m = increment_second_moment(&spec, t, s)?;
        let expo = 2.0 * hf.eval(t).min(hf.eval(s)) * k;
        m_hat = m_hat.min(m / (t - s).abs().powf(expo));
    }

    let key = (c4 - c_hat).min(m_hat);
    Ok(VerificationReport::evaluate(
        "holder_bounds",
        inputs_of(&[
            ("K", json!(k)),
            ("hurst", json!(format!("{:?}", hf.kind()))),
            ("pairs", json!(pairs.len())),
        ]),
        vec![
            ("min_margin".into(), key),
            ("c_hat".into(), c_hat),
            ("c4".into(), c4),
            ("m_hat".into(), m_hat),
            ("delta".into(), delta),
            ("fitted_lipschitz".into(), lipschitz),
            ("close_pairs".into(), close.len() as f64),
        ],
        Target::Interval { lo: 0.0, hi: f64::MAX },
        0.0,
        format!("{skipped} degenerate t=s pairs skipped"),
    ))
}
