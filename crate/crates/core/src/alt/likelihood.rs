//! Weibull log-linear log-likelihood and its derivatives.
//!
//! With `μᵢ = xᵢᵀα = ln ηᵢ`, `yᵢ = ln tᵢ` and `wᵢ = β(yᵢ − μᵢ)`, each exact
//! observation contributes
//!
//! ```text
//! ℓᵢ = ln β − β·μᵢ + (β − 1)·yᵢ − exp(wᵢ)
//! ```
//!
//! Derivatives are taken with respect to `θ = (α, s)` where `s = ln β`:
//!
//! ```text
//! ∂ℓᵢ/∂α   = β(eᵢ − 1)·xᵢ                 eᵢ = exp(wᵢ)
//! ∂ℓᵢ/∂s   = 1 + wᵢ − wᵢeᵢ
//! ∂²ℓᵢ/∂α² = −β²eᵢ·xᵢxᵢᵀ
//! ∂²ℓᵢ/∂α∂s = β(eᵢ − 1 + wᵢeᵢ)·xᵢ
//! ∂²ℓᵢ/∂s² = wᵢ(1 − eᵢ − wᵢeᵢ)
//! ```

use nalgebra::{DMatrix, DVector};

use crate::alt::model::{FactorSpec, GllWeibullModel};
use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Transformed design matrix rows and log responses.
#[derive(Debug, Clone)]
pub(crate) struct Design {
    pub rows: Vec<Vec<f64>>,
    pub log_response: Vec<f64>,
}

impl Design {
    pub fn build(dataset: &Dataset, factors: &[FactorSpec], response: &str) -> Result<Self> {
        let columns = factors
            .iter()
            .map(|f| {
                dataset
                    .column_index(&f.name)
                    .ok_or_else(|| Error::MissingColumn(f.name.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        let response_col = dataset
            .column_index(response)
            .ok_or_else(|| Error::MissingColumn(response.to_string()))?;

        let mut rows = Vec::with_capacity(dataset.len());
        let mut log_response = Vec::with_capacity(dataset.len());
        for r in 0..dataset.len() {
            let t = dataset.value(r, response_col);
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::NonPositiveResponse {
                    row: r + 1,
                    value: t,
                });
            }
            let mut row = Vec::with_capacity(factors.len() + 1);
            row.push(1.0);
            for (f, &c) in factors.iter().zip(&columns) {
                row.push(f.transform.apply(&f.name, dataset.value(r, c))?);
            }
            rows.push(row);
            log_response.push(t.ln());
        }
        Ok(Self { rows, log_response })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Order {
    Value,
    Gradient,
    Hessian,
}

#[derive(Debug, Clone)]
pub(crate) struct Evaluation {
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

/// Evaluates the log-likelihood at `theta = (α, ln β)` up to the requested
/// derivative order. Unrequested parts are left at zero.
pub(crate) fn evaluate(design: &Design, theta: &[f64], order: Order) -> Evaluation {
    let p = theta.len();
    let k = p - 1;
    let s = theta[k];
    let beta = s.exp();
    let mut value = 0.0;
    let mut gradient = DVector::zeros(p);
    let mut hessian = DMatrix::zeros(p, p);
    for (x, &y) in design.rows.iter().zip(&design.log_response) {
        let mu: f64 = x.iter().zip(theta).map(|(a, b)| a * b).sum();
        let w = beta * (y - mu);
        let e = w.exp();
        value += s - beta * mu + (beta - 1.0) * y - e;
        if order >= Order::Gradient {
            let ga = beta * (e - 1.0);
            for j in 0..k {
                gradient[j] += ga * x[j];
            }
            gradient[k] += 1.0 + w - w * e;
        }
        if order >= Order::Hessian {
            let haa = -beta * beta * e;
            let has = beta * (e - 1.0 + w * e);
            for i in 0..k {
                for j in 0..=i {
                    hessian[(i, j)] += haa * x[i] * x[j];
                }
                hessian[(k, i)] += has * x[i];
            }
            hessian[(k, k)] += w * (1.0 - e - w * e);
        }
    }
    if order >= Order::Hessian {
        for i in 0..p {
            for j in 0..i {
                hessian[(j, i)] = hessian[(i, j)];
            }
        }
    }
    Evaluation {
        value,
        gradient,
        hessian,
    }
}

pub(crate) fn theta_of(model: &GllWeibullModel) -> Vec<f64> {
    let mut theta = model.alpha.clone();
    theta.push(model.shape.ln());
    theta
}

/// Log-likelihood of `dataset` under `model`, treating `response` as exact
/// Weibull lifetimes.
pub fn log_likelihood(model: &GllWeibullModel, dataset: &Dataset, response: &str) -> Result<f64> {
    let design = Design::build(dataset, &model.factors, response)?;
    Ok(evaluate(&design, &theta_of(model), Order::Value).value)
}

/// Gradient of [`log_likelihood`] with respect to `(α₀, …, αₙ, ln β)`.
pub fn score(model: &GllWeibullModel, dataset: &Dataset, response: &str) -> Result<Vec<f64>> {
    let design = Design::build(dataset, &model.factors, response)?;
    Ok(evaluate(&design, &theta_of(model), Order::Gradient)
        .gradient
        .iter()
        .copied()
        .collect())
}

/// Negative Hessian of [`log_likelihood`] with respect to
/// `(α₀, …, αₙ, ln β)`.
pub fn observed_information(
    model: &GllWeibullModel,
    dataset: &Dataset,
    response: &str,
) -> Result<DMatrix<f64>> {
    let design = Design::build(dataset, &model.factors, response)?;
    Ok(-evaluate(&design, &theta_of(model), Order::Hessian).hessian)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{builtin_table3, Observation};

    fn one_row(t: f64) -> Dataset {
        Dataset::new(vec!["x".into()], vec![Observation::new(vec![1.0], t)]).unwrap()
    }

    #[test]
    fn single_row_closed_forms() {
        let m = GllWeibullModel::new(vec![], vec![0.0], 1.0).unwrap();
        assert!((log_likelihood(&m, &one_row(1.0), "fatigue").unwrap() + 1.0).abs() < 1e-15);
        let m = GllWeibullModel::new(vec![], vec![0.0], 2.0).unwrap();
        let ll = log_likelihood(&m, &one_row(1.0), "fatigue").unwrap();
        assert!((ll - (2f64.ln() - 1.0)).abs() < 1e-15);
        assert!((ll + 0.306853).abs() < 1e-6);
    }

    // Naive density sum: ln f(t) = ln(β/η) + (β−1)·ln(t/η) − (t/η)^β.
    fn oracle(alpha: &[f64], beta: f64, d: &Dataset) -> f64 {
        let at = d.column("available time").unwrap();
        let st = d.column("stress").unwrap();
        let t = d.column("fatigue").unwrap();
        (0..d.len())
            .map(|i| {
                let eta = (alpha[0] + alpha[1] * at[i] + alpha[2] * st[i]).exp();
                let z = t[i] / eta;
                (beta / eta).ln() + (beta - 1.0) * z.ln() - z.powf(beta)
            })
            .sum()
    }

    #[test]
    fn workshop_matches_naive_sum() {
        let d = builtin_table3();
        let factors = vec![
            FactorSpec::identity("Available Time"),
            FactorSpec::identity("Stress"),
        ];
        for (alpha, beta) in [
            (vec![-2.0, 0.04, 0.1], 3.5),
            (vec![-1.5, -0.2, 0.3], 0.7),
            (vec![0.0, 0.0, 0.0], 1.0),
        ] {
            let m = GllWeibullModel::new(factors.clone(), alpha.clone(), beta).unwrap();
            let got = log_likelihood(&m, &d, "fatigue").unwrap();
            let want = oracle(&alpha, beta, &d);
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
    }

    #[test]
    fn errors() {
        let d = builtin_table3();
        let m =
            GllWeibullModel::new(vec![FactorSpec::identity("nope")], vec![0.0, 0.0], 1.0).unwrap();
        assert!(matches!(
            log_likelihood(&m, &d, "fatigue"),
            Err(Error::MissingColumn(_))
        ));
        let m = GllWeibullModel::new(vec![], vec![0.0], 1.0).unwrap();
        assert!(matches!(
            log_likelihood(&m, &d, "nope"),
            Err(Error::MissingColumn(_))
        ));
        let d = Dataset::new(vec!["x".into()], vec![Observation::new(vec![-1.0], 0.1)]).unwrap();
        assert!(matches!(
            log_likelihood(&m, &d, "x"),
            Err(Error::NonPositiveResponse { row: 1, .. })
        ));
    }
}
