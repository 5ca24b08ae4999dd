//! JSON persistence for fitted mixtures.

use crate::CliError;
use mssal::selection::SelectionReport;
use mssal::{ComponentParams, FitResult, MixtureModel};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentRecord {
    pub mu: Vec<f64>,
    pub beta: Vec<f64>,
    /// `D` in row-major order.
    pub d_mat: Vec<f64>,
    pub a_diag: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitMetadata {
    pub loglik: f64,
    pub bic: f64,
    pub rho: usize,
    pub n: usize,
    pub n_iter: usize,
    pub seed: u64,
    pub converged: bool,
}

/// One row of a model-selection sweep. `loglik` and `bic` are null when
/// every start failed for that `G`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionRow {
    #[serde(rename = "G")]
    pub g: usize,
    pub loglik: Option<f64>,
    pub rho: usize,
    pub bic: Option<f64>,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub schema_version: u32,
    #[serde(rename = "G")]
    pub g: usize,
    pub p: usize,
    pub weights: Vec<f64>,
    pub components: Vec<ComponentRecord>,
    pub metadata: FitMetadata,
    /// Present in files written by `select`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selection: Option<Vec<SelectionRow>>,
}

impl ModelFile {
    pub fn new(model: &MixtureModel, metadata: FitMetadata) -> Self {
        let components = model
            .components()
            .iter()
            .map(|c| ComponentRecord {
                mu: c.mu().iter().copied().collect(),
                beta: c.beta().iter().copied().collect(),
                d_mat: c.d_mat().transpose().iter().copied().collect(),
                a_diag: c.a_diag().iter().copied().collect(),
            })
            .collect();
        Self {
            schema_version: SCHEMA_VERSION,
            g: model.n_components(),
            p: model.dim(),
            weights: model.weights().to_vec(),
            components,
            metadata,
            selection: None,
        }
    }

    pub fn from_fit(fit: &FitResult, n: usize, seed: u64) -> Self {
        let p = fit.model.dim();
        let rho = mssal::selection::count_free_params(fit.n_components(), p);
        let metadata = FitMetadata {
            loglik: fit.loglik(),
            bic: mssal::selection::bic(fit.loglik(), rho, n),
            rho,
            n,
            n_iter: fit.n_iter,
            seed,
            converged: fit.converged,
        };
        Self::new(&fit.model, metadata)
    }

    /// The chosen model of a sweep, with one row per `G` attached.
    pub fn from_selection(report: &SelectionReport, seed: u64) -> Self {
        let mut file = Self::from_fit(report.chosen_fit(), report.n, seed);
        let finite = |v: f64| v.is_finite().then_some(v);
        file.selection = Some(
            report
                .records
                .iter()
                .map(|r| SelectionRow {
                    g: r.g,
                    loglik: finite(r.loglik),
                    rho: r.rho,
                    bic: finite(r.bic),
                    converged: r.converged,
                    note: r.note.clone(),
                })
                .collect(),
        );
        file
    }

    /// Rebuilds the mixture, checking every parameter constraint.
    pub fn to_model(&self) -> Result<MixtureModel, CliError> {
        let (g, p) = (self.g, self.p);
        if g == 0 || p == 0 || self.weights.len() != g || self.components.len() != g {
            return Err(CliError::InvalidModel(format!(
                "model file declares G={g}, p={p} but has {} weights and {} components",
                self.weights.len(),
                self.components.len()
            )));
        }
        let components = self
            .components
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if c.d_mat.len() != p * p {
                    return Err(CliError::InvalidModel(format!(
                        "component {}: d_mat has {} entries, expected {}",
                        k + 1,
                        c.d_mat.len(),
                        p * p
                    )));
                }
                ComponentParams::new(
                    DVector::from_vec(c.mu.clone()),
                    DVector::from_vec(c.beta.clone()),
                    DMatrix::from_row_slice(p, p, &c.d_mat),
                    DVector::from_vec(c.a_diag.clone()),
                )
                .map_err(|e| CliError::InvalidModel(format!("component {}: {e}", k + 1)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        MixtureModel::new(self.weights.clone(), components).map_err(|e| CliError::InvalidModel(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model file serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        #[derive(Deserialize)]
        struct Version {
            schema_version: Option<u32>,
        }
        let version: Version =
            serde_json::from_str(text).map_err(|e| CliError::InvalidModel(format!("invalid model JSON: {e}")))?;
        match version.schema_version {
            Some(SCHEMA_VERSION) => {}
            Some(v) => {
                return Err(CliError::InvalidModel(format!(
                    "unsupported schema_version {v}, expected {SCHEMA_VERSION}"
                )))
            }
            None => return Err(CliError::InvalidModel("model JSON has no schema_version".into())),
        }
        let file: Self =
            serde_json::from_str(text).map_err(|e| CliError::InvalidModel(format!("invalid model JSON: {e}")))?;
        file.to_model()?;
        Ok(file)
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_json()).map_err(|e| CliError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::InvalidModel(msg) => CliError::InvalidModel(format!("{}: {msg}", path.display())),
            other => other,
        })
    }
}
