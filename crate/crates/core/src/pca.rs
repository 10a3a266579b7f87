//! Principal component analysis of the PSF correlation matrix and the
//! variance-based selection of effective factors.
//!
//! The pipeline is: standardize the selected columns, form the correlation
//! matrix, diagonalize it with cyclic Jacobi rotations, sort the spectrum in
//! descending order and accumulate the proportion of variance explained by
//! each component. Factor selection keeps the smallest number of leading
//! components whose cumulative proportion reaches a threshold and ranks the
//! input columns by their eigenvalue-weighted absolute loadings on those
//! components.

use nalgebra::DMatrix;

use crate::dataset::{correlation_matrix, normalize_name, Dataset};
use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 100;
/// Eigenvalues closer than this are reported as tied.
pub const TIE_TOL: f64 = 1e-10;
/// Slightly negative eigenvalues down to this bound are clamped to zero.
pub const NEGATIVE_EIGEN_TOL: f64 = 1e-10;

/// Eigenvalues in descending order with matching unit-norm eigenvector
/// columns.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

/// Diagonalizes a real symmetric matrix with the cyclic Jacobi method.
///
/// Each eigenvector is signed so that its entry of largest magnitude is
/// positive (the lowest index wins a tie).
pub fn eigen_symmetric(m: &DMatrix<f64>) -> Result<EigenDecomposition> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::invalid(format!(
            "matrix must be square, got {}x{}",
            n,
            m.ncols()
        )));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let diff = (m[(i, j)] - m[(j, i)]).abs();
            if diff > SYMMETRY_TOL {
                return Err(Error::NotSymmetric {
                    row: i,
                    col: j,
                    diff,
                });
            }
        }
    }

    let mut a = (m + m.transpose()) * 0.5;
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = a.norm();

    let mut converged = n <= 1;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum::<f64>()
            .sqrt();
        if off == 0.0 || off <= 1e-3 * f64::EPSILON * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= 1e-3 * f64::EPSILON * (a[(p, p)].abs() + a[(q, q)].abs()) {
                    // negligible against the diagonal: drop it
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate_columns(&mut a, p, q, c, s);
                rotate_rows(&mut a, p, q, c, s);
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                rotate_columns(&mut v, p, q, c, s);
            }
        }
    }
    if !converged {
        return Err(Error::EigenNoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.column(src).into_owned();
        col /= col.norm();
        let max_abs = col.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
        let lead = col
            .iter()
            .position(|x| x.abs() >= max_abs - 1e-12)
            .unwrap_or(0);
        if col[lead] < 0.0 {
            col.neg_mut();
        }
        vectors.set_column(dst, &col);
    }
    Ok(EigenDecomposition { values, vectors })
}

// m <- m * J, with J the plane rotation (c, s) in the (p, q) plane.
fn rotate_columns(m: &mut DMatrix<f64>, p: usize, q: usize, c: f64, s: f64) {
    for k in 0..m.nrows() {
        let mp = m[(k, p)];
        let mq = m[(k, q)];
        m[(k, p)] = c * mp - s * mq;
        m[(k, q)] = s * mp + c * mq;
    }
}

// m <- Jᵀ * m
fn rotate_rows(m: &mut DMatrix<f64>, p: usize, q: usize, c: f64, s: f64) {
    for k in 0..m.ncols() {
        let mp = m[(p, k)];
        let mq = m[(q, k)];
        m[(p, k)] = c * mp - s * mq;
        m[(q, k)] = s * mp + c * mq;
    }
}

/// Per-component share of the spectrum and its running total.
pub fn variance_proportions(eigenvalues: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if let Some(v) = eigenvalues.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::invalid(format!(
            "eigenvalues must be nonnegative, got {v}"
        )));
    }
    let total: f64 = eigenvalues.iter().sum();
    if total <= 0.0 {
        return Err(Error::AllZeroSpectrum);
    }
    let proportions: Vec<f64> = eigenvalues.iter().map(|v| v / total).collect();
    let cumulative = proportions
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect();
    Ok((proportions, cumulative))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcaResult {
    pub column_names: Vec<String>,
    pub eigenvalues: Vec<f64>,
    /// One column per component; row `i` is the loading of `column_names[i]`.
    pub eigenvectors: DMatrix<f64>,
    pub proportions: Vec<f64>,
    pub cumulative: Vec<f64>,
    /// `tied[c]` is set when component `c` shares its eigenvalue with a
    /// neighbour; loadings inside a tied block are not unique.
    pub tied: Vec<bool>,
    /// The correlation matrix that was diagonalized.
    pub correlation: DMatrix<f64>,
}

impl PcaResult {
    pub fn components(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn column_position(&self, name: &str) -> Option<usize> {
        let key = normalize_name(name);
        self.column_names
            .iter()
            .position(|c| normalize_name(c) == key)
    }

    pub fn loading(&self, column: &str, component: usize) -> Option<f64> {
        let row = self.column_position(column)?;
        (component < self.components()).then(|| self.eigenvectors[(row, component)])
    }
}

/// Runs PCA on the correlation matrix of `columns`. Pass
/// [`Dataset::analysis_columns`] for the default analysis, which includes
/// the fatigue response next to the PSFs.
pub fn run_pca(dataset: &Dataset, columns: &[&str]) -> Result<PcaResult> {
    let column_names = columns
        .iter()
        .map(|c| {
            dataset
                .display_name(c)
                .ok_or_else(|| Error::MissingColumn(c.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    let correlation = correlation_matrix(dataset, columns)?;
    let EigenDecomposition {
        mut values,
        vectors,
    } = eigen_symmetric(&correlation)?;
    for v in values.iter_mut() {
        if *v < 0.0 && *v >= -NEGATIVE_EIGEN_TOL {
            *v = 0.0;
        }
    }
    let (proportions, cumulative) = variance_proportions(&values)?;
    let tied = (0..values.len())
        .map(|i| {
            (i > 0 && (values[i - 1] - values[i]).abs() < TIE_TOL)
                || (i + 1 < values.len() && (values[i] - values[i + 1]).abs() < TIE_TOL)
        })
        .collect();
    Ok(PcaResult {
        column_names,
        eigenvalues: values,
        eigenvectors: vectors,
        proportions,
        cumulative,
        tied,
        correlation,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorScore {
    pub name: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub retained_components: usize,
    pub threshold: f64,
    pub response: String,
    /// Every non-response column, ranked by descending importance.
    pub selected_factors: Vec<FactorScore>,
}

impl SelectionResult {
    /// Names of the `n` highest-ranked factors.
    pub fn top(&self, n: usize) -> Vec<&str> {
        self.selected_factors
            .iter()
            .take(n)
            .map(|f| f.name.as_str())
            .collect()
    }
}

/// Keeps the smallest number of leading components whose cumulative
/// proportion of variance reaches `threshold`, then scores each
/// non-response column by `Σ_c λ_c · |loading_c|` over the kept components.
/// Equal scores keep column order.
pub fn select_factors(pca: &PcaResult, threshold: f64, response: &str) -> Result<SelectionResult> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::invalid(format!(
            "threshold must be in (0,1], got {threshold}"
        )));
    }
    let response_row = pca
        .column_position(response)
        .ok_or_else(|| Error::MissingColumn(response.to_string()))?;
    // round-off can leave the final cumulative value a hair below 1
    let retained_components = pca
        .cumulative
        .iter()
        .position(|&c| c >= threshold - 1e-12)
        .map_or(pca.components(), |i| i + 1);

    let mut selected_factors: Vec<FactorScore> = pca
        .column_names
        .iter()
        .enumerate()
        .filter(|(row, _)| *row != response_row)
        .map(|(row, name)| FactorScore {
            name: name.clone(),
            score: (0..retained_components)
                .map(|c| pca.eigenvalues[c] * pca.eigenvectors[(row, c)].abs())
                .sum(),
        })
        .collect();
    selected_factors.sort_by(|a, b| b.score.total_cmp(&a.score));
    Ok(SelectionResult {
        retained_components,
        threshold,
        response: pca.column_names[response_row].clone(),
        selected_factors,
    })
}
