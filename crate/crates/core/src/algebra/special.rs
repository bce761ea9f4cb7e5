//! Special functions needed for the cat-state normalization: `ln Γ` (a checked
//! wrapper) and the modified Bessel function of the first kind `I_ν`.
//!
//! Both are evaluated in log space so that arguments with large factorials
//! (hundreds of Fock levels, deformation parameters in the hundreds) stay
//! representable.

use crate::error::{Error, Result};

/// Natural logarithm of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            function: "ln_gamma",
            detail: format!("x must be positive and finite, got {x}"),
        });
    }
    if x == 1.0 || x == 2.0 {
        return Ok(0.0);
    }
    Ok(statrs::function::gamma::ln_gamma(x))
}

/// Hard cap on the number of series terms; arguments used by the simulator
/// converge in a few hundred.
const BESSEL_MAX_TERMS: usize = 100_000;

/// `ln I_ν(x)` from the ascending series
/// `Σₖ (x/2)^{2k+ν} / (k! Γ(k+ν+1))`, accumulated as a scaled log-sum.
///
/// Returns `-inf` when `I_ν(x) = 0` (x = 0, ν > 0) and `+inf` when the
/// function diverges (x = 0, -1 < ν < 0).
pub fn ln_bessel_i(nu: f64, x: f64) -> Result<f64> {
    if !(nu > -1.0) || !nu.is_finite() {
        return Err(Error::Domain {
            function: "bessel_i",
            detail: format!("order must satisfy nu > -1, got {nu}"),
        });
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            function: "bessel_i",
            detail: format!("argument must be finite and >= 0, got {x}"),
        });
    }
    if x == 0.0 {
        return Ok(if nu == 0.0 {
            0.0
        } else if nu > 0.0 {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        });
    }

    let ln_half_x = (0.5 * x).ln();
    // running sum is Σ exp(term - scale)
    let mut scale = f64::NEG_INFINITY;
    let mut sum = 0.0;
    let mut prev = f64::NEG_INFINITY;
    for k in 0..BESSEL_MAX_TERMS {
        let kf = k as f64;
        let term = (2.0 * kf + nu) * ln_half_x - ln_gamma(kf + 1.0)? - ln_gamma(kf + nu + 1.0)?;
        if term > scale {
            sum = sum * (scale - term).exp() + 1.0;
            scale = term;
        } else {
            sum += (term - scale).exp();
        }
        let past_peak = term < prev;
        if past_peak && (term - scale).exp() < 1e-16 * sum {
            return Ok(scale + sum.ln());
        }
        prev = term;
    }
    Err(Error::NonConvergence {
        function: "bessel_i",
        terms: BESSEL_MAX_TERMS,
    })
}

/// Modified Bessel function of the first kind, `I_ν(x)`, for `ν > -1`, `x ≥ 0`.
pub fn bessel_i(nu: f64, x: f64) -> Result<f64> {
    ln_bessel_i(nu, x).map(f64::exp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    /// ln Γ(m + 1/2) by the recurrence down to Γ(1/2) = √π.
    fn ln_gamma_half_integer(m: usize) -> f64 {
        let mut acc = 0.5 * PI.ln();
        for j in 0..m {
            acc += (j as f64 + 0.5).ln();
        }
        acc
    }

    /// ln Γ(m) = ln (m-1)!
    fn ln_factorial_oracle(m: usize) -> f64 {
        (1..m).map(|j| (j as f64).ln()).sum()
    }

    #[test]
    fn ln_gamma_anchor_values() {
        assert!(rel(ln_gamma(0.5).unwrap(), 0.572_364_942_924_700_1) < 1e-13);
        assert_eq!(ln_gamma(1.0).unwrap(), 0.0);
        assert_eq!(ln_gamma(2.0).unwrap(), 0.0);
        let expected = ln_gamma_half_integer(10);
        assert!(rel(ln_gamma(10.5).unwrap(), expected) < 1e-13);
    }

    #[test]
    fn ln_gamma_matches_recurrences_over_a_wide_range() {
        for m in 3..400 {
            let got = ln_gamma(m as f64).unwrap();
            assert!(rel(got, ln_factorial_oracle(m)) < 1e-13, "m = {m}");
            let got = ln_gamma(m as f64 + 0.5).unwrap();
            assert!(rel(got, ln_gamma_half_integer(m)) < 1e-13, "m + 1/2 = {m}.5");
        }
    }

    #[test]
    fn ln_gamma_small_arguments_use_the_shift() {
        // Γ(1/4) = 3.625609908221908...
        assert!(rel(ln_gamma(0.25).unwrap(), 3.625_609_908_221_908_f64.ln()) < 1e-13);
        // Γ(x) ~ 1/x as x -> 0
        let x = 1e-8;
        assert!(rel(ln_gamma(x).unwrap(), -(x.ln()) - 0.577_215_664_901_532_9 * x) < 1e-12);
    }

    #[test]
    fn ln_gamma_rejects_nonpositive() {
        assert!(matches!(ln_gamma(0.0), Err(Error::Domain { .. })));
        assert!(matches!(ln_gamma(-1.5), Err(Error::Domain { .. })));
        assert!(ln_gamma(f64::NAN).is_err());
    }

    #[test]
    fn bessel_half_integer_orders_match_hyperbolic_identities() {
        for &z in &[1e-3, 0.1, 1.0, 2.5, 9.0, 30.0, 100.0] {
            let pref = (2.0 / (PI * z)).sqrt();
            assert!(rel(bessel_i(-0.5, z).unwrap(), pref * z.cosh()) < 1e-13, "z = {z}");
            assert!(rel(bessel_i(0.5, z).unwrap(), pref * z.sinh()) < 1e-13, "z = {z}");
        }
        assert!((bessel_i(-0.5, 1.0).unwrap() - 1.231_200_214_592_96).abs() < 1e-12);
        assert!((bessel_i(0.5, 1.0).unwrap() - 0.937_674_888_245_488).abs() < 1e-12);
    }

    #[test]
    fn bessel_large_argument_stays_finite_in_log_space() {
        // I_{ν}(x) ~ e^x / sqrt(2πx) for x >> ν²; check ln at x = 800, ν = -1/2 exactly.
        let x: f64 = 800.0;
        let expected = (2.0 / (PI * x)).sqrt().ln() + x + (0.5 * (1.0 + (-2.0 * x).exp())).ln();
        assert!(rel(ln_bessel_i(-0.5, x).unwrap(), expected) < 1e-13);
        // large order
        let v = ln_bessel_i(199.5, 100.0).unwrap();
        assert!(v.is_finite());
    }

    #[test]
    fn bessel_at_origin() {
        assert_eq!(bessel_i(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_i(2.5, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_i(-0.5, 0.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn bessel_recurrence_holds() {
        // I_{ν-1}(x) - I_{ν+1}(x) = (2ν/x) I_ν(x)
        for &(nu, x) in &[(1.3, 0.7), (10.5, 9.0), (50.5, 30.0), (3.25, 20.0)] {
            let lhs = bessel_i(nu - 1.0, x).unwrap() - bessel_i(nu + 1.0, x).unwrap();
            let rhs = 2.0 * nu / x * bessel_i(nu, x).unwrap();
            assert!(rel(lhs, rhs) < 1e-11, "nu = {nu}, x = {x}");
        }
    }

    #[test]
    fn bessel_domain_errors() {
        assert!(bessel_i(-1.0, 1.0).is_err());
        assert!(bessel_i(0.5, -1.0).is_err());
    }
}
