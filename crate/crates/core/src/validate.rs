//! Hold-out validation, synthetic life data and parameter-recovery checks.

use crate::alt::{
    fit_mle, predict_percentile, weibull_quantile, FactorSpec, FactorValues, FitConfig,
    GllWeibullModel,
};
use crate::dataset::{Dataset, Observation};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// `|predicted − observed| / observed`.
pub fn relative_error(observed: f64, predicted: f64) -> Result<f64> {
    if !(observed > 0.0 && observed.is_finite()) {
        return Err(Error::NonPositiveObserved(observed));
    }
    Ok((predicted - observed).abs() / observed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationRow {
    /// 1-based row number in the hold-out set.
    pub instance: usize,
    pub observed: f64,
    pub predicted: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub percentile: f64,
    pub rows: Vec<ValidationRow>,
    pub mean_relative_error: f64,
    pub max_relative_error: f64,
}

/// Predicts the `p`-quantile at every hold-out row and compares it with the
/// observed fatigue.
pub fn evaluate(model: &GllWeibullModel, holdout: &Dataset, p: f64) -> Result<ValidationReport> {
    if holdout.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let columns = model
        .factors
        .iter()
        .map(|f| {
            holdout
                .column_index(&f.name)
                .ok_or_else(|| Error::MissingColumn(f.name.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(holdout.len());
    for (i, obs) in holdout.rows().iter().enumerate() {
        let x: FactorValues = model
            .factors
            .iter()
            .zip(&columns)
            .map(|(f, &c)| (f.name.clone(), holdout.value(i, c)))
            .collect();
        let predicted = predict_percentile(model, &x, p)?;
        rows.push(ValidationRow {
            instance: i + 1,
            observed: obs.fatigue,
            predicted,
            relative_error: relative_error(obs.fatigue, predicted)?,
        });
    }
    let mean_relative_error =
        rows.iter().map(|r| r.relative_error).sum::<f64>() / rows.len() as f64;
    let max_relative_error = rows.iter().fold(0.0_f64, |m, r| m.max(r.relative_error));
    Ok(ValidationReport {
        percentile: p,
        rows,
        mean_relative_error,
        max_relative_error,
    })
}

/// Ground truth and sampling plan for synthetic Weibull life data.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub true_alpha: Vec<f64>,
    pub true_shape: f64,
    pub factors: Vec<FactorSpec>,
    /// Admissible raw (untransformed) values, one pool per factor.
    pub factor_value_pools: Vec<Vec<f64>>,
    pub n: usize,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn true_model(&self) -> Result<GllWeibullModel> {
        GllWeibullModel::new(
            self.factors.clone(),
            self.true_alpha.clone(),
            self.true_shape,
        )
    }

    fn check(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("synthetic row count must be positive"));
        }
        if self.factor_value_pools.len() != self.factors.len() {
            return Err(Error::invalid("need one value pool per factor"));
        }
        if let Some(i) = self.factor_value_pools.iter().position(Vec::is_empty) {
            return Err(Error::invalid(format!(
                "value pool for `{}` is empty",
                self.factors[i].name
            )));
        }
        Ok(())
    }
}

/// Draws `spec.n` rows with a [`SplitMix64`] stream seeded by `spec.seed`.
///
/// For each row, one pool index is drawn per factor in factor order
/// (`index(pool.len())`), then `u = open_unit()`, and the response is the
/// Weibull quantile `η(x)·(−ln(1 − u))^(1/β)`. The response is stored in the
/// `fatigue` column.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Dataset> {
    spec.check()?;
    let model = spec.true_model()?;
    let mut rng = SplitMix64::new(spec.seed);
    let mut rows = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let values: Vec<f64> = spec
            .factor_value_pools
            .iter()
            .map(|pool| pool[rng.index(pool.len())])
            .collect();
        let x: FactorValues = spec
            .factors
            .iter()
            .zip(&values)
            .map(|(f, v)| (f.name.clone(), *v))
            .collect();
        let eta = model.linear_predictor(&x)?.exp();
        let t = weibull_quantile(rng.open_unit(), eta, spec.true_shape);
        rows.push(Observation::new(values, t));
    }
    Dataset::new(spec.factors.iter().map(|f| f.name.clone()).collect(), rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParameterRecovery {
    pub name: String,
    pub truth: f64,
    pub estimate: f64,
    /// Natural-scale standard error (delta method for the shape).
    pub std_error: f64,
    /// `|estimate − truth| / se`; for the shape this is taken on the log
    /// scale, where the fit is parameterized.
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoverySummary {
    pub model: GllWeibullModel,
    pub parameters: Vec<ParameterRecovery>,
}

impl RecoverySummary {
    pub fn max_z(&self) -> f64 {
        self.parameters.iter().fold(0.0, |m, p| m.max(p.z))
    }
}

/// Generates data from `spec`, fits it and compares every estimate with the
/// truth. Requires at least 10 rows per parameter.
pub fn recovery_check(spec: &SyntheticSpec, config: &FitConfig) -> Result<RecoverySummary> {
    let params = spec.true_alpha.len() + 1;
    if spec.n < 10 * params {
        return Err(Error::invalid(format!(
            "recovery check needs at least {} rows for {params} parameters, got {}",
            10 * params,
            spec.n
        )));
    }
    let data = generate_synthetic(spec)?;
    let model = fit_mle(&data, &spec.factors, crate::dataset::FATIGUE_COLUMN, config)?;
    let se = model.std_errors();
    let names =
        std::iter::once("Intercept".to_string()).chain(spec.factors.iter().map(|f| f.name.clone()));
    let mut parameters: Vec<ParameterRecovery> = names
        .zip(spec.true_alpha.iter().zip(&model.alpha))
        .enumerate()
        .map(|(i, (name, (&truth, &estimate)))| ParameterRecovery {
            name,
            truth,
            estimate,
            std_error: se[i],
            z: (estimate - truth).abs() / se[i],
        })
        .collect();
    let k = spec.true_alpha.len();
    parameters.push(ParameterRecovery {
        name: "Shape".into(),
        truth: spec.true_shape,
        estimate: model.shape,
        std_error: model.shape_std_error(),
        z: (model.shape.ln() - spec.true_shape.ln()).abs() / se[k],
    });
    Ok(RecoverySummary { model, parameters })
}
