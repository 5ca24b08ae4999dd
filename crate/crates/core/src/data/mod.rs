//! Observation matrices, CSV IO, PCA preprocessing, bundled fixtures and
//! the simulation scenarios.

mod fixtures;
mod io;
mod pca;
mod scenario;

pub use fixtures::{fixtures_dir, load_banknotes, load_crabs, load_wine, synthetic_wide, Fixture};
pub use io::{read_csv, read_labels, write_csv, write_labels, write_rows};
pub use pca::{pca_scores, Pca};
pub use scenario::{generate_scenario, Scenario, ScenarioParams, ScenarioSpec};

use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// An `n x p` matrix of observations (one row each) with column names.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: DMatrix<f64>,
    column_names: Vec<String>,
}

impl DataMatrix {
    pub fn new(values: DMatrix<f64>, column_names: Vec<String>) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(Error::Dimension(format!(
                "data must have at least one row and column, got {}x{}",
                values.nrows(),
                values.ncols()
            )));
        }
        if column_names.len() != values.ncols() {
            return Err(Error::Dimension(format!(
                "{} column names for {} columns",
                column_names.len(),
                values.ncols()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            let (col, row) = (pos / values.nrows(), pos % values.nrows());
            return Err(Error::Parse {
                row: row + 1,
                column: column_names[col].clone(),
                detail: "non-finite value".into(),
            });
        }
        Ok(Self {
            values,
            column_names,
        })
    }

    /// Wraps a matrix with default column names `V1..Vp`.
    pub fn unnamed(values: DMatrix<f64>) -> Result<Self> {
        let names = (1..=values.ncols()).map(|j| format!("V{j}")).collect();
        Self::new(values, names)
    }

    pub fn n_rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_cols(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    /// Keeps the listed (0-based) columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.n_cols()) {
            return Err(Error::InvalidArgument(format!(
                "column index {bad} out of range for {} columns",
                self.n_cols()
            )));
        }
        let values = self.values.select_columns(cols);
        let names = cols.iter().map(|&c| self.column_names[c].clone()).collect();
        Self::new(values, names)
    }

    /// Keeps the listed (0-based) rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        if let Some(&bad) = rows.iter().find(|&&r| r >= self.n_rows()) {
            return Err(Error::InvalidArgument(format!(
                "row index {bad} out of range for {} rows",
                self.n_rows()
            )));
        }
        Self::new(self.values.select_rows(rows), self.column_names.clone())
    }

    /// Observations as columns: a `p x n` matrix whose column `i` is row
    /// `i` of the data, contiguous in memory.
    pub fn observations(&self) -> DMatrix<f64> {
        self.values.transpose()
    }
}
