//! JSON model documents.
//!
//! Floats are written in their shortest round-trip decimal form, so a saved
//! model reads back bit-for-bit.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::alt::model::{FactorSpec, FitMeta, GllWeibullModel};
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct ModelDocument {
    format_version: u32,
    factors: Vec<FactorSpec>,
    alpha: Vec<f64>,
    shape: f64,
    /// Row-major, over (alpha_0 .. alpha_n, ln shape).
    covariance: Vec<Vec<f64>>,
    fit: FitMeta,
}

impl GllWeibullModel {
    pub fn to_json(&self) -> Result<String> {
        let doc = ModelDocument {
            format_version: FORMAT_VERSION,
            factors: self.factors.clone(),
            alpha: self.alpha.clone(),
            shape: self.shape,
            covariance: self
                .covariance
                .row_iter()
                .map(|r| r.iter().copied().collect())
                .collect(),
            fit: self.fit_meta.clone(),
        };
        serde_json::to_string_pretty(&doc).map_err(|e| Error::ModelFormat(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDocument =
            serde_json::from_str(text).map_err(|e| Error::ModelFormat(e.to_string()))?;
        if doc.format_version != FORMAT_VERSION {
            return Err(Error::ModelFormat(format!(
                "unsupported format_version {}",
                doc.format_version
            )));
        }
        let p = doc.alpha.len() + 1;
        if doc.covariance.len() != p || doc.covariance.iter().any(|r| r.len() != p) {
            return Err(Error::ModelFormat(format!("covariance must be {p}x{p}")));
        }
        let cov = DMatrix::from_fn(p, p, |i, j| doc.covariance[i][j]);
        let mut model =
            GllWeibullModel::new(doc.factors, doc.alpha, doc.shape)?.with_covariance(cov)?;
        model.fit_meta = doc.fit;
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = self.to_json()?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}
