use std::fmt;

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::alt::likelihood::{evaluate, Design, Order};
use crate::alt::model::{FactorSpec, FitMeta, GllWeibullModel};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::pca::eigen_symmetric;

/// A shape above this is treated as diverging (degenerate, zero-spread data).
const SHAPE_DIVERGENCE: f64 = 1e8;
/// Smallest accepted eigenvalue ratio of the observed information.
const MIN_RCOND: f64 = 1e-13;
const MAX_HALVINGS: usize = 60;
/// Relative size of rounding noise in the summed log-likelihood.
const VALUE_NOISE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    pub max_iterations: usize,
    /// Convergence requires the max-norm of the score to drop below this.
    pub gradient_tolerance: f64,
    pub confidence_level: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            gradient_tolerance: 1e-8,
            confidence_level: 0.99,
        }
    }
}

/// State of a fit that stopped without converging.
#[derive(Debug, Clone, PartialEq)]
pub struct FitDiagnostics {
    pub alpha: Vec<f64>,
    pub shape: f64,
    pub log_likelihood: f64,
    pub iterations: usize,
    pub gradient_max_norm: f64,
    pub shape_diverged: bool,
    pub reason: String,
}

impl fmt::Display for FitDiagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} after {} iterations, |grad|max = {:e}, shape = {:e}",
            self.reason, self.iterations, self.gradient_max_norm, self.shape
        )
    }
}

fn max_abs(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Ascent direction from the (possibly damped) Newton system.
fn newton_direction(info: &DMatrix<f64>, gradient: &DVector<f64>) -> DVector<f64> {
    let p = info.nrows();
    let diag_scale = (0..p).fold(1.0_f64, |m, i| m.max(info[(i, i)].abs()));
    let mut damping = 0.0;
    for _ in 0..40 {
        let mut m = info.clone();
        for i in 0..p {
            m[(i, i)] += damping;
        }
        if let Some(chol) = Cholesky::new(m) {
            let d = chol.solve(gradient);
            if d.iter().all(|v| v.is_finite()) {
                return d;
            }
        }
        damping = if damping == 0.0 {
            1e-10 * diag_scale
        } else {
            damping * 10.0
        };
    }
    gradient / diag_scale
}

/// Maximum-likelihood fit of the Weibull log-linear model.
///
/// Newton's method runs over `(α, ln β)` starting from `α₀ = ln(mean t)`,
/// other coefficients 0 and `β = 1`. When the observed information is not
/// positive definite the Newton system is damped, and every step is
/// backtracked until the likelihood improves. The returned covariance is the
/// inverse observed information at the optimum.
pub fn fit_mle(
    dataset: &Dataset,
    factors: &[FactorSpec],
    response: &str,
    config: &FitConfig,
) -> Result<GllWeibullModel> {
    if config.max_iterations == 0 {
        return Err(Error::invalid("max_iterations must be positive"));
    }
    if !(config.gradient_tolerance > 0.0) {
        return Err(Error::invalid("gradient tolerance must be positive"));
    }
    if !(config.confidence_level > 0.0 && config.confidence_level < 1.0) {
        return Err(Error::invalid("confidence level must be in (0,1)"));
    }
    let design = Design::build(dataset, factors, response)?;
    let p = factors.len() + 2;
    if design.len() < p + 1 {
        return Err(Error::TooFewRows {
            needed: p + 1,
            got: design.len(),
        });
    }
    for (j, f) in factors.iter().enumerate() {
        let col = design.rows.iter().map(|r| r[j + 1]);
        let (lo, hi) = col.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
        if hi - lo <= 1e-12 * lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE) {
            return Err(Error::DegenerateFactor(f.name.clone()));
        }
    }

    let mean_t = design.log_response.iter().map(|y| y.exp()).sum::<f64>() / design.len() as f64;
    let mut theta = vec![0.0; p];
    theta[0] = mean_t.ln();

    let mut current = evaluate(&design, &theta, Order::Hessian);
    let mut iterations = 0;
    let mut converged = false;
    let mut failure = String::new();
    let mut shape_diverged = false;
    loop {
        if max_abs(&current.gradient) < config.gradient_tolerance {
            converged = true;
            break;
        }
        if theta[p - 1].exp() > SHAPE_DIVERGENCE {
            shape_diverged = true;
            failure = "shape diverged".into();
            break;
        }
        if iterations >= config.max_iterations {
            failure = "iteration budget exhausted".into();
            break;
        }
        iterations += 1;

        let info = -&current.hessian;
        let direction = newton_direction(&info, &current.gradient);
        let slope = current.gradient.dot(&direction);
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<f64> = theta
                .iter()
                .zip(direction.iter())
                .map(|(t, d)| t + step * d)
                .collect();
            let value = evaluate(&design, &trial, Order::Value).value;
            if value.is_finite() && value >= current.value + 1e-4 * step * slope {
                accepted = Some((trial, None));
                break;
            }
            // Near the optimum the expected gain drops below the rounding
            // noise of the objective; fall back to the score norm.
            let noise = VALUE_NOISE * (1.0 + current.value.abs());
            if value.is_finite() && value >= current.value - noise {
                let eval = evaluate(&design, &trial, Order::Hessian);
                if max_abs(&eval.gradient) < max_abs(&current.gradient) {
                    accepted = Some((trial, Some(eval)));
                    break;
                }
            }
            step *= 0.5;
        }
        match accepted {
            Some((trial, eval)) => {
                current = eval.unwrap_or_else(|| evaluate(&design, &trial, Order::Hessian));
                theta = trial;
            }
            None => {
                failure = "line search stalled".into();
                break;
            }
        }
    }

    let k = p - 1;
    let alpha = theta[..k].to_vec();
    let shape = theta[k].exp();
    let gradient_max_norm = max_abs(&current.gradient);
    if !converged {
        return Err(Error::NoConvergence(Box::new(FitDiagnostics {
            alpha,
            shape,
            log_likelihood: current.value,
            iterations,
            gradient_max_norm,
            shape_diverged,
            reason: failure,
        })));
    }

    let covariance = invert_information(&(-&current.hessian))?;
    let model = GllWeibullModel::new(factors.to_vec(), alpha, shape)?;
    let mut model = model.with_covariance(covariance)?;
    model.fit_meta = FitMeta {
        log_likelihood: current.value,
        iterations,
        converged,
        gradient_max_norm,
    };
    Ok(model)
}

/// Inverse of a symmetric positive definite information matrix via its
/// eigendecomposition; rejects singular or ill-conditioned input.
fn invert_information(info: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let sym = (info + info.transpose()) * 0.5;
    let eig = eigen_symmetric(&sym).map_err(|_| Error::SingularInformation)?;
    let largest = eig.values[0];
    let smallest = *eig.values.last().expect("non-empty");
    if !(largest > 0.0) || !(smallest > MIN_RCOND * largest) {
        return Err(Error::SingularInformation);
    }
    let v = &eig.vectors;
    let inv_diag = DMatrix::from_diagonal(&DVector::from_iterator(
        eig.values.len(),
        eig.values.iter().map(|l| 1.0 / l),
    ));
    let cov = v * inv_diag * v.transpose();
    Ok((&cov + cov.transpose()) * 0.5)
}
