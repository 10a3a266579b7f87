use crate::alt::inference::positive_param_ci;
use crate::alt::model::{FactorValues, GllWeibullModel};
use crate::dataset::normalize_name;
use crate::error::{Error, Result};

/// `1 − e⁻¹`: the probability at which the Weibull quantile equals the
/// scale, so predictions at this level are the characteristic life η(x).
pub const CHARACTERISTIC_PERCENTILE: f64 = 0.632_120_558_828_557_7;

fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "percentile must be in (0,1), got {p}"
        )))
    }
}

/// Weibull CDF `1 − exp(−(t/η)^β)`.
pub fn weibull_cdf(t: f64, scale: f64, shape: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    -(-(t / scale).powf(shape)).exp_m1()
}

/// Weibull quantile `η·(−ln(1 − p))^(1/β)`.
pub fn weibull_quantile(p: f64, scale: f64, shape: f64) -> f64 {
    scale * (-(-p).ln_1p()).powf(1.0 / shape)
}

/// Life characteristic η(x) = exp(α₀ + Σ αⱼ·gⱼ(xⱼ)).
pub fn life_characteristic(model: &GllWeibullModel, x: &FactorValues) -> Result<f64> {
    Ok(model.linear_predictor(x)?.exp())
}

/// The p-quantile of the fitted life distribution at `x`.
pub fn predict_percentile(model: &GllWeibullModel, x: &FactorValues, p: f64) -> Result<f64> {
    check_probability(p)?;
    Ok(weibull_quantile(
        p,
        life_characteristic(model, x)?,
        model.shape,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub percentile_p: f64,
    pub value: f64,
    pub std_error: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub confidence_level: f64,
}

/// Percentile prediction with a delta-method standard error and a log-scale
/// confidence interval.
///
/// `ln t_p = xᵀα + e^(−s)·ln(−ln(1 − p))`, so the gradient of `t_p` over
/// `(α, s)` is `t_p·(x, −e^(−s)·ln(−ln(1 − p)))`.
pub fn predict_with_interval(
    model: &GllWeibullModel,
    x: &FactorValues,
    p: f64,
    level: f64,
) -> Result<Prediction> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::invalid(format!(
            "confidence level must be in (0,1), got {level}"
        )));
    }
    if model.covariance.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularInformation);
    }
    let value = predict_percentile(model, x, p)?;
    let mut grad = model.design_row(x)?;
    grad.push(-(-(-p).ln_1p()).ln() / model.shape);
    for g in grad.iter_mut() {
        *g *= value;
    }
    let n = grad.len();
    let mut var = 0.0;
    for i in 0..n {
        for j in 0..n {
            var += grad[i] * model.covariance[(i, j)] * grad[j];
        }
    }
    let std_error = var.max(0.0).sqrt();
    let (ci_lower, ci_upper) = if std_error > 0.0 {
        positive_param_ci(value, std_error, level)?
    } else {
        (value, value)
    };
    Ok(Prediction {
        percentile_p: p,
        value,
        std_error,
        ci_lower,
        ci_upper,
        confidence_level: level,
    })
}

/// Percentile predictions while one factor moves along `grid` and the others
/// stay at `fixed`.
pub fn sweep_curve(
    model: &GllWeibullModel,
    varying: &str,
    grid: &[f64],
    fixed: &FactorValues,
    p: f64,
) -> Result<Vec<(f64, f64)>> {
    if grid.is_empty() {
        return Err(Error::invalid("sweep grid is empty"));
    }
    if grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::invalid("sweep grid must be sorted ascending"));
    }
    let key = normalize_name(varying);
    let factor = model
        .factors
        .iter()
        .find(|f| normalize_name(&f.name) == key)
        .ok_or_else(|| Error::MissingFactor(varying.to_string()))?;
    let mut x = fixed.clone();
    x.retain(|k, _| normalize_name(k) != key);
    grid.iter()
        .map(|&g| {
            x.insert(factor.name.clone(), g);
            Ok((g, predict_percentile(model, &x, p)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alt::model::{FactorSpec, Transform};
    use nalgebra::DMatrix;

    fn at(pairs: &[(&str, f64)]) -> FactorValues {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn life_characteristic_examples() {
        let m = GllWeibullModel::new(vec![FactorSpec::identity("x")], vec![0.0, 0.0], 1.0).unwrap();
        assert_eq!(life_characteristic(&m, &at(&[("x", 17.0)])).unwrap(), 1.0);
        let m = GllWeibullModel::new(vec![FactorSpec::identity("x")], vec![0.0, 1.0], 1.0).unwrap();
        assert!((life_characteristic(&m, &at(&[("x", 2f64.ln())])).unwrap() - 2.0).abs() < 1e-15);
        let m = GllWeibullModel::new(
            vec![FactorSpec::new("x", Transform::Log)],
            vec![1.0, -1.0],
            1.0,
        )
        .unwrap();
        assert!(
            (life_characteristic(&m, &at(&[("x", std::f64::consts::E)])).unwrap() - 1.0).abs()
                < 1e-15
        );
        assert!(matches!(
            life_characteristic(&m, &at(&[])),
            Err(Error::MissingFactor(_))
        ));
        assert!(matches!(
            life_characteristic(&m, &at(&[("x", 0.0)])),
            Err(Error::TransformDomainError { .. })
        ));
    }

    #[test]
    fn percentile_examples() {
        let m = GllWeibullModel::new(vec![], vec![3f64.ln()], 2.7).unwrap();
        let v = predict_percentile(&m, &at(&[]), CHARACTERISTIC_PERCENTILE).unwrap();
        assert!((v - 3.0).abs() < 1e-14);
        let m = GllWeibullModel::new(vec![], vec![2f64.ln()], 1.0).unwrap();
        assert!((predict_percentile(&m, &at(&[]), 0.5).unwrap() - 1.386294).abs() < 1e-6);
        let m = GllWeibullModel::new(vec![], vec![0.0], 2.0).unwrap();
        assert!(
            (predict_percentile(&m, &at(&[]), 0.25).unwrap() - 0.5363600213026516).abs() < 1e-12
        );
        assert!(predict_percentile(&m, &at(&[]), 1.0).is_err());
    }

    #[test]
    fn zero_covariance_collapses_interval() {
        let m =
            GllWeibullModel::new(vec![FactorSpec::identity("x")], vec![-2.0, 0.1], 3.0).unwrap();
        let p = predict_with_interval(&m, &at(&[("x", 1.0)]), 0.5, 0.99).unwrap();
        assert_eq!(p.std_error, 0.0);
        assert_eq!((p.ci_lower, p.ci_upper), (p.value, p.value));
    }

    #[test]
    fn delta_method_matches_finite_differences() {
        let cov = DMatrix::from_row_slice(
            3,
            3,
            &[0.04, -0.01, 0.002, -0.01, 0.01, 0.001, 0.002, 0.001, 0.02],
        );
        let m = GllWeibullModel::new(vec![FactorSpec::identity("x")], vec![-2.0, 0.3], 2.5)
            .unwrap()
            .with_covariance(cov.clone())
            .unwrap();
        let x = at(&[("x", 1.7)]);
        let p = 0.3;
        let pred = predict_with_interval(&m, &x, p, 0.9).unwrap();
        // numerical gradient over (α0, α1, ln β)
        let f = |th: &[f64]| {
            let mm =
                GllWeibullModel::new(m.factors.clone(), th[..2].to_vec(), th[2].exp()).unwrap();
            predict_percentile(&mm, &x, p).unwrap()
        };
        let theta = [-2.0, 0.3, 2.5f64.ln()];
        let h = 1e-6;
        let g: Vec<f64> = (0..3)
            .map(|i| {
                let mut a = theta;
                let mut b = theta;
                a[i] += h;
                b[i] -= h;
                (f(&a) - f(&b)) / (2.0 * h)
            })
            .collect();
        let var: f64 = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .map(|(i, j)| g[i] * cov[(i, j)] * g[j])
            .sum();
        assert!((pred.std_error - var.sqrt()).abs() < 1e-8);
        assert!(pred.ci_lower < pred.value && pred.value < pred.ci_upper);
    }

    #[test]
    fn sweeps_follow_coefficient_sign() {
        let m = GllWeibullModel::new(
            vec![FactorSpec::identity("stress"), FactorSpec::identity("time")],
            vec![-2.0, 0.2, -0.1],
            3.0,
        )
        .unwrap();
        let grid = [1.0, 2.0, 3.5, 5.0];
        let up = sweep_curve(&m, "Stress", &grid, &at(&[("time", 0.1)]), 0.5).unwrap();
        assert!(up.windows(2).all(|w| w[1].1 > w[0].1));
        let down = sweep_curve(&m, "time", &grid, &at(&[("stress", 2.0)]), 0.5).unwrap();
        assert!(down.windows(2).all(|w| w[1].1 < w[0].1));
        let one = sweep_curve(&m, "time", &[2.0], &at(&[("stress", 2.0)]), 0.5).unwrap();
        assert_eq!(one.len(), 1);
        assert!(sweep_curve(&m, "time", &[], &at(&[("stress", 2.0)]), 0.5).is_err());
        assert!(sweep_curve(&m, "time", &[2.0, 1.0], &at(&[("stress", 2.0)]), 0.5).is_err());
        assert!(sweep_curve(&m, "nope", &[1.0], &at(&[]), 0.5).is_err());
        // a stale value for the varying factor in `fixed` is ignored
        let with_stale = sweep_curve(
            &m,
            "time",
            &grid,
            &at(&[("stress", 2.0), ("Time", 9.0)]),
            0.5,
        )
        .unwrap();
        assert_eq!(with_stale, down);
    }
}
