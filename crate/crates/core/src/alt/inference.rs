//! Wald statistics and normal-theory confidence intervals.
//!
//! Sign-unrestricted coefficients use the plain interval `c ± z·se`. Positive
//! quantities (the shape, predicted percentiles) use a normal interval on the
//! log scale, `v·exp(±z·se/v)`, which keeps both bounds positive.

use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

fn check_se(se: f64) -> Result<()> {
    if se > 0.0 && se.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveSE(se))
    }
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "confidence level must be in (0,1), got {level}"
        )))
    }
}

/// Two-sided standard normal critical value for `level`, i.e. the
/// `(1 + level)/2` quantile.
pub fn normal_critical(level: f64) -> Result<f64> {
    check_level(level)?;
    let std = Normal::new(0.0, 1.0).expect("standard normal");
    Ok(std.inverse_cdf(0.5 * (1.0 + level)))
}

/// `z = coef/se` and its two-sided normal p-value.
pub fn wald_stats(coef: f64, se: f64) -> Result<(f64, f64)> {
    check_se(se)?;
    let z = coef / se;
    // 2·(1 − Φ(|z|)) = erfc(|z|/√2)
    let p = erfc(z.abs() / std::f64::consts::SQRT_2);
    Ok((z, p))
}

pub fn coef_ci(coef: f64, se: f64, level: f64) -> Result<(f64, f64)> {
    check_se(se)?;
    let z = normal_critical(level)?;
    Ok((coef - z * se, coef + z * se))
}

pub fn positive_param_ci(value: f64, se: f64, level: f64) -> Result<(f64, f64)> {
    if !(value > 0.0 && value.is_finite()) {
        return Err(Error::NonPositiveValue(value));
    }
    check_se(se)?;
    let z = normal_critical(level)?;
    let factor = (z * se / value).exp();
    Ok((value / factor, value * factor))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn critical_values() {
        assert!(close(
            normal_critical(0.95).unwrap(),
            1.959963984540054,
            1e-9
        ));
        assert!(close(
            normal_critical(0.99).unwrap(),
            2.5758293035489004,
            1e-9
        ));
        assert!(normal_critical(1.0).is_err());
        assert!(normal_critical(0.0).is_err());
    }

    #[test]
    fn wald_examples() {
        let (z, p) = wald_stats(36.60, 15.72).unwrap();
        assert!(close(z, 2.33, 0.005) && close(p, 0.02, 0.005), "{z} {p}");
        let (z, p) = wald_stats(-10723.90, 4344.03).unwrap();
        assert!(close(z, -2.47, 0.005) && close(p, 0.01, 0.005), "{z} {p}");
        assert_eq!(wald_stats(0.0, 1.0).unwrap(), (0.0, 1.0));
        let (_, p) = wald_stats(1.959963984540054, 1.0).unwrap();
        assert!(close(p, 0.05, 1e-10));
        assert!(matches!(wald_stats(1.0, 0.0), Err(Error::NonPositiveSE(_))));
    }

    #[test]
    fn coef_ci_examples() {
        let (lo, hi) = coef_ci(36.60, 15.72, 0.99).unwrap();
        assert!(
            close(lo, -3.90, 0.02) && close(hi, 77.09, 0.02),
            "{lo} {hi}"
        );
        // The published (-0.00, 0.09) for this row was computed from unrounded
        // inputs; from the rounded (0.05, 0.02) the interval is (-0.0015, 0.1015).
        let (lo, hi) = coef_ci(0.05, 0.02, 0.99).unwrap();
        assert!(
            close(lo, -0.0015, 1e-4) && close(hi, 0.1015, 1e-4),
            "{lo} {hi}"
        );
        let mut last = 0.0;
        for level in [0.5, 0.9, 0.99, 0.999, 0.999_999] {
            let (lo, hi) = coef_ci(1.0, 0.3, level).unwrap();
            assert!(hi - lo > last);
            last = hi - lo;
        }
        assert!(coef_ci(1.0, -1.0, 0.9).is_err());
    }

    #[test]
    fn positive_ci_examples() {
        let (lo, hi) = positive_param_ci(0.114565, 0.0200486, 0.99).unwrap();
        assert!(
            close(lo, 0.0729939, 2e-4) && close(hi, 0.179811, 2e-4),
            "{lo} {hi}"
        );
        let (lo, hi) = positive_param_ci(2.0, 1e-15, 0.95).unwrap();
        assert!(close(lo, 2.0, 1e-12) && close(hi, 2.0, 1e-12));
        assert!(matches!(
            positive_param_ci(0.0, 1.0, 0.9),
            Err(Error::NonPositiveValue(_))
        ));
        assert!(matches!(
            positive_param_ci(1.0, 0.0, 0.9),
            Err(Error::NonPositiveSE(_))
        ));
    }
}
