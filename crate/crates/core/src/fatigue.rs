//! Exponential fatigue accumulation, `f(t) = 1 − exp(−λ·t)`, and the
//! conversions between fatigue values, rates and exposure durations.
//! Durations are always in hours.

use crate::error::{Error, Result};

/// A fatigue accumulation curve with a constant rate per hour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FatigueCurve {
    rate: f64,
}

impl FatigueCurve {
    pub fn new(rate: f64) -> Result<Self> {
        check_rate(rate)?;
        Ok(Self { rate })
    }

    /// The curve passing through fatigue `f` after `hours` of exposure.
    pub fn through(f: f64, hours: f64) -> Result<Self> {
        rate_from_fatigue(f, hours).map(|rate| Self { rate })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn fatigue_at(&self, hours: f64) -> Result<f64> {
        fatigue_at(self.rate, hours)
    }
}

fn check_rate(rate: f64) -> Result<()> {
    if rate.is_finite() && rate > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveRate(rate))
    }
}

/// Fatigue accumulated after `t` hours at `rate`.
pub fn fatigue_at(rate: f64, t: f64) -> Result<f64> {
    check_rate(rate)?;
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    // -expm1 keeps precision for small rate * t
    Ok(-(-rate * t).exp_m1())
}

/// Rate that produces fatigue `f` after `t` hours; inverse of [`fatigue_at`].
pub fn rate_from_fatigue(f: f64, t: f64) -> Result<f64> {
    if !(f > 0.0 && f < 1.0) {
        return Err(Error::FatigueValueOutOfRange(f));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::NonPositiveTime(t));
    }
    Ok(-(-f).ln_1p() / t)
}

/// Fatigue expected after `t_target` hours given `f_observed` after
/// `t_observed` hours under the same rate.
pub fn rescale_fatigue(f_observed: f64, t_observed: f64, t_target: f64) -> Result<f64> {
    fatigue_at(rate_from_fatigue(f_observed, t_observed)?, t_target)
}
