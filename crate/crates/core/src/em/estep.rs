use super::config::FitConfig;
use crate::data::DataMatrix;
use crate::distributions::{log_sum_exp, ComponentParams, MixtureModel};
use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Conditional expectations computed in the E-step.
///
/// `e1[g]` and `e2[g]` are `p x n`: column `i` holds `E[W_ijg | x_i]` and
/// `E[1/W_ijg | x_i]` for every direction `j` of component `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentExpectations {
    /// `n x G` responsibilities.
    pub zhat: DMatrix<f64>,
    pub e1: Vec<DMatrix<f64>>,
    pub e2: Vec<DMatrix<f64>>,
    /// How many `(i, j, g)` triples had `b` raised to the floor.
    pub clamped: usize,
}

impl LatentExpectations {
    /// Hard assignments with all latent moments equal to one. Used to seed
    /// the first M-step of a start.
    pub fn from_hard_labels(labels: &[usize], g: usize, p: usize) -> Self {
        let n = labels.len();
        let zhat = DMatrix::from_fn(n, g, |i, k| if labels[i] == k { 1.0 } else { 0.0 });
        Self {
            zhat,
            e1: vec![DMatrix::from_element(p, n, 1.0); g],
            e2: vec![DMatrix::from_element(p, n, 1.0); g],
            clamped: 0,
        }
    }

    pub fn n_obs(&self) -> usize {
        self.zhat.nrows()
    }

    pub fn n_components(&self) -> usize {
        self.zhat.ncols()
    }

    /// `n_g = sum_i zhat_ig` for every component.
    pub fn component_totals(&self) -> Vec<f64> {
        self.zhat.column_iter().map(|c| c.sum()).collect()
    }
}

/// Responsibilities, latent-weight moments and the observed-data
/// log-likelihood at `model`.
pub fn e_step(
    data: &DataMatrix,
    model: &MixtureModel,
    cfg: &FitConfig,
) -> Result<(LatentExpectations, f64)> {
    if data.n_cols() != model.dim() {
        return Err(Error::Dimension(format!(
            "data has {} columns, model has dimension {}",
            data.n_cols(),
            model.dim()
        )));
    }
    e_step_obs(&data.observations(), model, cfg.b_floor)
}

/// E-step on observations stored as the columns of a `p x n` matrix.
pub(crate) fn e_step_obs(
    obs: &DMatrix<f64>,
    model: &MixtureModel,
    b_floor: f64,
) -> Result<(LatentExpectations, f64)> {
    let (p, n) = obs.shape();
    let g_count = model.n_components();
    // log pi_g + log h(x_i | theta_g), n x G
    let mut log_terms = DMatrix::zeros(n, g_count);
    let mut e1 = Vec::with_capacity(g_count);
    let mut e2 = Vec::with_capacity(g_count);
    let mut clamped = 0usize;

    for (g, (params, &weight)) in model.components().iter().zip(model.weights()).enumerate() {
        let rotated = rotated_residuals(obs, params);
        let a = params.a_diag();
        let skew = (params.d_mat().transpose() * params.beta()).component_mul(a);
        let gamma: Vec<f64> = (0..p).map(|j| (skew[j] * skew[j] + 2.0 * a[j]).sqrt()).collect();
        let d: Vec<f64> = (0..p).map(|j| 2.0 + skew[j] * skew[j] / a[j]).collect();
        let log_norm: f64 = weight.ln() - gamma.iter().map(|v| v.ln()).sum::<f64>();

        let mut m1 = DMatrix::zeros(p, n);
        let mut m2 = DMatrix::zeros(p, n);
        for i in 0..n {
            let mut lt = log_norm;
            for j in 0..p {
                let v = rotated[(j, i)];
                let sgn = if v > 0.0 {
                    1.0
                } else if v < 0.0 {
                    -1.0
                } else {
                    0.0
                };
                lt -= v.abs() / a[j] * (gamma[j] - skew[j] * sgn);
                let mut b = v * v / a[j];
                if b < b_floor {
                    b = b_floor;
                    clamped += 1;
                }
                // GIG(d, b, 1/2) moments.
                m1[(j, i)] = (b / d[j]).sqrt() + 1.0 / d[j];
                m2[(j, i)] = (d[j] / b).sqrt();
            }
            log_terms[(i, g)] = lt;
        }
        e1.push(m1);
        e2.push(m2);
    }

    let mut zhat = DMatrix::zeros(n, g_count);
    let mut loglik = 0.0;
    let mut row = vec![0.0; g_count];
    for i in 0..n {
        for g in 0..g_count {
            row[g] = log_terms[(i, g)];
        }
        let total = log_sum_exp(&row);
        if !total.is_finite() {
            return Err(Error::StartFailed(format!(
                "non-finite mixture density at observation {}",
                i + 1
            )));
        }
        loglik += total;
        for g in 0..g_count {
            zhat[(i, g)] = (row[g] - total).exp();
        }
        // Renormalise to absorb rounding in exp.
        let s: f64 = zhat.row(i).sum();
        for g in 0..g_count {
            zhat[(i, g)] /= s;
        }
    }
    Ok((
        LatentExpectations {
            zhat,
            e1,
            e2,
            clamped,
        },
        loglik,
    ))
}

/// `D'(x_i - mu)` for every observation, `p x n`.
pub(crate) fn rotated_residuals(obs: &DMatrix<f64>, params: &ComponentParams) -> DMatrix<f64> {
    let mut centered = obs.clone();
    for mut col in centered.column_iter_mut() {
        col -= params.mu();
    }
    params.d_mat().transpose() * centered
}
