//! Thin wrappers over the special functions the kernels need.

/// Natural log of the gamma function for strictly positive arguments.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0, "ln_gamma argument must be positive, got {x}");
    libm::lgamma(x)
}

/// Gamma function on the positive half-line.
pub fn gamma_pos(x: f64) -> f64 {
    ln_gamma(x).exp()
}

/// Absolute-moment constant of a standard Gaussian:
/// c(alpha) = 2^(alpha/2) * Gamma((alpha+1)/2) / Gamma(1/2).
pub fn gaussian_moment_constant(alpha: f64) -> f64 {
    (0.5 * alpha * std::f64::consts::LN_2 + ln_gamma(0.5 * (alpha + 1.0))
        - ln_gamma(0.5))
    .exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_half_integers() {
        assert_relative_eq!(gamma_pos(0.5), std::f64::consts::PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma_pos(1.0), 1.0, max_relative = 1e-14);
        assert_relative_eq!(gamma_pos(2.5), 0.75 * std::f64::consts::PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma_pos(5.0), 24.0, max_relative = 1e-14);
    }

    #[test]
    fn moment_constant_known_orders() {
        // c(2) = 1 and c(4) = 3 are the Gaussian second and fourth moments.
        assert_relative_eq!(gaussian_moment_constant(2.0), 1.0, max_relative = 1e-13);
        assert_relative_eq!(gaussian_moment_constant(4.0), 3.0, max_relative = 1e-13);
        // c(1) = sqrt(2/pi), reference 0.79788456080286535588 (50-digit evaluation)
        assert_relative_eq!(
            gaussian_moment_constant(1.0),
            0.797_884_560_802_865_4,
            max_relative = 1e-13
        );
    }
}
