use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dataset::normalize_name;
use crate::error::{Error, Result};

/// Covariate transform applied to a factor before it enters the linear
/// predictor. `Log` gives the inverse-power-law form and `Reciprocal` the
/// Arrhenius form of the life relationship.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    Identity,
    Log,
    Reciprocal,
}

impl Transform {
    pub fn name(self) -> &'static str {
        match self {
            Transform::Identity => "identity",
            Transform::Log => "log",
            Transform::Reciprocal => "reciprocal",
        }
    }

    pub fn apply(self, factor: &str, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::invalid(format!(
                "factor `{factor}`: value {x} is not finite"
            )));
        }
        match self {
            Transform::Identity => Ok(x),
            _ if x <= 0.0 => Err(Error::TransformDomainError {
                factor: factor.to_string(),
                transform: self.name(),
                value: x,
            }),
            Transform::Log => Ok(x.ln()),
            Transform::Reciprocal => Ok(1.0 / x),
        }
    }

    /// d g(x) / dx
    pub fn derivative(self, x: f64) -> f64 {
        match self {
            Transform::Identity => 1.0,
            Transform::Log => 1.0 / x,
            Transform::Reciprocal => -1.0 / (x * x),
        }
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Transform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match normalize_name(s).as_str() {
            "identity" | "id" | "linear" => Ok(Transform::Identity),
            "log" | "ln" | "ipl" => Ok(Transform::Log),
            "reciprocal" | "recip" | "inverse" | "arrhenius" => Ok(Transform::Reciprocal),
            _ => Err(Error::invalid(format!("unknown transform `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorSpec {
    pub name: String,
    pub transform: Transform,
}

impl FactorSpec {
    pub fn new(name: impl Into<String>, transform: Transform) -> Self {
        Self {
            name: name.into(),
            transform,
        }
    }

    pub fn identity(name: impl Into<String>) -> Self {
        Self::new(name, Transform::Identity)
    }
}

impl FromStr for FactorSpec {
    type Err = Error;

    /// `name` or `name:transform`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, transform) = match s.split_once(':') {
            Some((n, t)) => (n.trim(), t.parse()?),
            None => (s.trim(), Transform::Identity),
        };
        if name.is_empty() {
            return Err(Error::invalid("empty factor name"));
        }
        Ok(Self::new(name, transform))
    }
}

/// Factor values keyed by name; lookups ignore case and separators.
pub type FactorValues = BTreeMap<String, f64>;

pub(crate) fn lookup(values: &FactorValues, name: &str) -> Option<f64> {
    if let Some(v) = values.get(name) {
        return Some(*v);
    }
    let key = normalize_name(name);
    values
        .iter()
        .find(|(k, _)| normalize_name(k) == key)
        .map(|(_, v)| *v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitMeta {
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
    pub gradient_max_norm: f64,
}

/// Weibull life model whose scale follows the general log-linear
/// relationship `η(x) = exp(α₀ + Σ αⱼ·gⱼ(xⱼ))`.
///
/// `covariance` is over `(α₀, …, αₙ, ln β)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GllWeibullModel {
    pub factors: Vec<FactorSpec>,
    pub alpha: Vec<f64>,
    pub shape: f64,
    pub covariance: DMatrix<f64>,
    pub fit_meta: FitMeta,
}

impl GllWeibullModel {
    /// A model with fixed parameters and no estimation uncertainty.
    pub fn new(factors: Vec<FactorSpec>, alpha: Vec<f64>, shape: f64) -> Result<Self> {
        if alpha.len() != factors.len() + 1 {
            return Err(Error::invalid(format!(
                "expected {} coefficients for {} factors, got {}",
                factors.len() + 1,
                factors.len(),
                alpha.len()
            )));
        }
        if alpha.iter().any(|a| !a.is_finite()) {
            return Err(Error::invalid("coefficients must be finite"));
        }
        if !(shape.is_finite() && shape > 0.0) {
            return Err(Error::NonPositiveValue(shape));
        }
        let p = alpha.len() + 1;
        Ok(Self {
            factors,
            alpha,
            shape,
            covariance: DMatrix::zeros(p, p),
            fit_meta: FitMeta {
                log_likelihood: 0.0,
                iterations: 0,
                converged: false,
                gradient_max_norm: 0.0,
            },
        })
    }

    pub fn with_covariance(mut self, covariance: DMatrix<f64>) -> Result<Self> {
        let p = self.parameter_count();
        if covariance.nrows() != p || covariance.ncols() != p {
            return Err(Error::invalid(format!(
                "covariance must be {p}x{p}, got {}x{}",
                covariance.nrows(),
                covariance.ncols()
            )));
        }
        if covariance.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularInformation);
        }
        let asym = (&covariance - covariance.transpose()).amax();
        if asym > 1e-8 * covariance.amax().max(1.0) {
            return Err(Error::invalid("covariance is not symmetric"));
        }
        self.covariance = covariance;
        Ok(self)
    }

    /// Coefficients plus the shape.
    pub fn parameter_count(&self) -> usize {
        self.alpha.len() + 1
    }

    /// Asymptotic standard errors over `(α₀, …, αₙ, ln β)`.
    pub fn std_errors(&self) -> Vec<f64> {
        (0..self.parameter_count())
            .map(|i| self.covariance[(i, i)].max(0.0).sqrt())
            .collect()
    }

    /// Standard error of the shape on its natural scale (delta method).
    pub fn shape_std_error(&self) -> f64 {
        let i = self.alpha.len();
        self.shape * self.covariance[(i, i)].max(0.0).sqrt()
    }

    /// `[1, g₁(x₁), …, gₙ(xₙ)]` for one point.
    pub fn design_row(&self, x: &FactorValues) -> Result<Vec<f64>> {
        let mut row = Vec::with_capacity(self.alpha.len());
        row.push(1.0);
        for f in &self.factors {
            let v = lookup(x, &f.name).ok_or_else(|| Error::MissingFactor(f.name.clone()))?;
            row.push(f.transform.apply(&f.name, v)?);
        }
        Ok(row)
    }

    pub fn linear_predictor(&self, x: &FactorValues) -> Result<f64> {
        let row = self.design_row(x)?;
        Ok(row.iter().zip(&self.alpha).map(|(g, a)| g * a).sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transforms() {
        assert_eq!(Transform::Identity.apply("x", -2.0).unwrap(), -2.0);
        assert_eq!(Transform::Log.apply("x", 1.0).unwrap(), 0.0);
        assert_eq!(Transform::Reciprocal.apply("x", 4.0).unwrap(), 0.25);
        assert!(matches!(
            Transform::Log.apply("x", 0.0),
            Err(Error::TransformDomainError {
                transform: "log",
                ..
            })
        ));
        assert!(matches!(
            Transform::Reciprocal.apply("x", -1.0),
            Err(Error::TransformDomainError {
                transform: "reciprocal",
                ..
            })
        ));
        for t in [Transform::Identity, Transform::Log, Transform::Reciprocal] {
            let x = 2.5;
            let h = 1e-6;
            let fd = (t.apply("x", x + h).unwrap() - t.apply("x", x - h).unwrap()) / (2.0 * h);
            assert!((fd - t.derivative(x)).abs() < 1e-8);
        }
    }

    #[test]
    fn parse_factor_specs() {
        let f: FactorSpec = "stress".parse().unwrap();
        assert_eq!(f, FactorSpec::identity("stress"));
        let f: FactorSpec = "available_time:log".parse().unwrap();
        assert_eq!(f.transform, Transform::Log);
        let f: FactorSpec = "temp:Arrhenius".parse().unwrap();
        assert_eq!(f.transform, Transform::Reciprocal);
        assert!("x:cubic".parse::<FactorSpec>().is_err());
        assert!(":log".parse::<FactorSpec>().is_err());
    }

    #[test]
    fn lookup_ignores_case_and_spaces() {
        let mut x = FactorValues::new();
        x.insert("Available Time".into(), 0.1);
        assert_eq!(lookup(&x, "available_time"), Some(0.1));
        assert_eq!(lookup(&x, "stress"), None);
    }

    #[test]
    fn model_checks() {
        assert!(GllWeibullModel::new(vec![], vec![0.0, 1.0], 1.0).is_err());
        assert!(GllWeibullModel::new(vec![], vec![0.0], 0.0).is_err());
        let m = GllWeibullModel::new(vec![], vec![0.0], 2.0).unwrap();
        assert_eq!(m.parameter_count(), 2);
        assert!(m.clone().with_covariance(DMatrix::zeros(3, 3)).is_err());
        let cov = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0]);
        assert!(m.clone().with_covariance(cov).is_err());
        let cov = DMatrix::from_row_slice(2, 2, &[0.04, 0.0, 0.0, 0.01]);
        let m = m.with_covariance(cov).unwrap();
        assert!((m.std_errors()[0] - 0.2).abs() < 1e-15);
        assert!((m.shape_std_error() - 0.2).abs() < 1e-15);
    }
}
