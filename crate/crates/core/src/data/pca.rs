use super::DataMatrix;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Principal axes of the sample covariance matrix.
#[derive(Debug, Clone)]
pub struct Pca {
    pub mean: DVector<f64>,
    /// Eigenvalues, sorted in decreasing order.
    pub eigenvalues: DVector<f64>,
    /// Unit eigenvectors as columns, matching `eigenvalues`. Each column's
    /// largest-magnitude entry is positive.
    pub loadings: DMatrix<f64>,
}

impl Pca {
    pub fn fit(data: &DataMatrix) -> Result<Self> {
        let x = data.values();
        let n = x.nrows();
        if n < 2 {
            return Err(Error::InvalidArgument("PCA needs at least two rows".into()));
        }
        let mean = x.row_mean().transpose();
        let centered = centered(x, &mean);
        let cov = centered.transpose() * &centered / (n as f64 - 1.0);
        let eig = SymmetricEigen::new(cov);

        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let eigenvalues = DVector::from_iterator(order.len(), order.iter().map(|&k| eig.eigenvalues[k]));
        let mut loadings = eig.eigenvectors.select_columns(&order);
        for mut col in loadings.column_iter_mut() {
            let pivot = col.iter().copied().max_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap_or(1.0);
            if pivot < 0.0 {
                col.neg_mut();
            }
        }
        Ok(Self {
            mean,
            eigenvalues,
            loadings,
        })
    }

    /// Scores on the given 0-based components.
    pub fn project(&self, data: &DataMatrix, components: &[usize]) -> Result<DataMatrix> {
        let p = self.eigenvalues.len();
        if data.n_cols() != p {
            return Err(Error::Dimension(format!(
                "PCA fitted on {p} columns, data has {}",
                data.n_cols()
            )));
        }
        let top = self.eigenvalues[0].max(0.0);
        for &c in components {
            if c >= p {
                return Err(Error::InvalidArgument(format!(
                    "component {} requested but data has {p} columns",
                    c + 1
                )));
            }
            if self.eigenvalues[c] <= 1e-12 * top.max(f64::MIN_POSITIVE) {
                return Err(Error::InvalidArgument(format!(
                    "component {} has zero variance (rank-deficient data)",
                    c + 1
                )));
            }
        }
        let scores = centered(data.values(), &self.mean) * self.loadings.select_columns(components);
        let names = components.iter().map(|c| format!("PC{}", c + 1)).collect();
        DataMatrix::new(scores, names)
    }
}

fn centered(x: &DMatrix<f64>, mean: &DVector<f64>) -> DMatrix<f64> {
    let mut c = x.clone();
    for mut row in c.row_iter_mut() {
        row -= mean.transpose();
    }
    c
}

/// Scores of `data` on the requested principal components, given as
/// 1-based indices into the components sorted by decreasing variance.
pub fn pca_scores(data: &DataMatrix, components: &[usize]) -> Result<DataMatrix> {
    if components.is_empty() {
        return Err(Error::InvalidArgument("no components requested".into()));
    }
    if components.contains(&0) {
        return Err(Error::InvalidArgument("component indices are 1-based".into()));
    }
    let zero_based: Vec<usize> = components.iter().map(|c| c - 1).collect();
    Pca::fit(data)?.project(data, &zero_based)
}
