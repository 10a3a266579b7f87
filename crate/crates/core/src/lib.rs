//! Accelerated human fatigue testing.
//!
//! Performance shaping factors (PSFs) are screened with a correlation-matrix
//! PCA, the most influential ones become acceleration factors of a Weibull
//! general log-linear life model fitted by maximum likelihood, and the fitted
//! model predicts fatigue percentiles with confidence intervals.
//!
//! ```
//! use ahft_core::alt::{fit_mle, predict_with_interval, FactorSpec, FactorValues, FitConfig};
//! use ahft_core::dataset::builtin_table3;
//!
//! let data = builtin_table3();
//! let factors = [FactorSpec::identity("available time"), FactorSpec::identity("stress")];
//! let model = fit_mle(&data, &factors, "fatigue", &FitConfig::default()).unwrap();
//! let x = FactorValues::from([("available time".into(), 0.1), ("stress".into(), 5.0)]);
//! let pred = predict_with_interval(&model, &x, 0.5, 0.99).unwrap();
//! assert!(pred.ci_lower < pred.value && pred.value < pred.ci_upper);
//! ```

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod alt;
pub mod dataset;
pub mod error;
pub mod fatigue;
pub mod pca;
pub mod rng;
pub mod validate;

/// Matrix types used in the public API.
pub use nalgebra;

pub use alt::{FactorSpec, FactorValues, FitConfig, GllWeibullModel, Prediction, Transform};
pub use dataset::{Dataset, Observation, PsfCatalog};
pub use error::{Error, Result};
pub use pca::{PcaResult, SelectionResult};
pub use validate::{SyntheticSpec, ValidationReport};
