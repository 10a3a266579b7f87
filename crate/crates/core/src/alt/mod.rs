//! Weibull general log-linear accelerated-life model.
//!
//! The life characteristic (Weibull scale) at factor levels `x` is
//! `η(x) = exp(α₀ + Σ αⱼ·gⱼ(xⱼ))` with a per-factor transform `gⱼ`; the shape
//! `β` is shared. Parameters are estimated by maximum likelihood over
//! `(α, ln β)` and inference uses the inverse observed information.

mod fit;
mod inference;
mod likelihood;
mod model;
mod persist;
mod predict;

pub use fit::{fit_mle, FitConfig, FitDiagnostics};
pub use inference::{coef_ci, normal_critical, positive_param_ci, wald_stats};
pub use likelihood::{log_likelihood, observed_information, score};
pub use model::{FactorSpec, FactorValues, FitMeta, GllWeibullModel, Transform};
pub use persist::FORMAT_VERSION;
pub use predict::{
    life_characteristic, predict_percentile, predict_with_interval, sweep_curve, weibull_cdf,
    weibull_quantile, Prediction, CHARACTERISTIC_PERCENTILE,
};

/// One row of a regression table: a coefficient (or the shape) with its
/// standard error, Wald statistics and confidence bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionRow {
    pub predictor: String,
    pub coef: f64,
    pub std_error: f64,
    /// `None` for the shape row.
    pub z: Option<f64>,
    pub p: Option<f64>,
    pub lower: f64,
    pub upper: f64,
}

/// Intercept and factor rows with plain normal intervals, then the shape
/// with a log-scale interval.
pub fn regression_table(model: &GllWeibullModel, level: f64) -> crate::Result<Vec<RegressionRow>> {
    let se = model.std_errors();
    let mut rows = Vec::with_capacity(model.parameter_count());
    let names = std::iter::once("Intercept".to_string())
        .chain(model.factors.iter().map(|f| f.name.clone()));
    for (i, name) in names.enumerate() {
        let coef = model.alpha[i];
        let (z, p) = wald_stats(coef, se[i])?;
        let (lower, upper) = coef_ci(coef, se[i], level)?;
        rows.push(RegressionRow {
            predictor: name,
            coef,
            std_error: se[i],
            z: Some(z),
            p: Some(p),
            lower,
            upper,
        });
    }
    let shape_se = model.shape_std_error();
    let (lower, upper) = positive_param_ci(model.shape, shape_se, level)?;
    rows.push(RegressionRow {
        predictor: "Shape".into(),
        coef: model.shape,
        std_error: shape_se,
        z: None,
        p: None,
        lower,
        upper,
    });
    Ok(rows)
}
