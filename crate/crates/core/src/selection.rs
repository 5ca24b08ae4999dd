//! BIC model selection over the number of components.

use crate::data::DataMatrix;
use crate::distributions::MixtureModel;
use crate::em::{fit_em, FitConfig, FitResult};
use crate::error::{Error, Result};

/// Free parameters of a `G`-component, `p`-variate MSSAL mixture: `G - 1`
/// weights plus, per component, `mu`, `beta`, the diagonal of `A` and the
/// `p (p - 1) / 2` angles of `D`.
pub fn count_free_params(g: usize, p: usize) -> usize {
    g.saturating_sub(1) + g * (3 * p + p * (p.saturating_sub(1)) / 2)
}

/// `2 loglik - rho ln n`. Larger is better.
pub fn bic(loglik: f64, rho: usize, n: usize) -> f64 {
    2.0 * loglik - rho as f64 * (n as f64).ln()
}

/// Best fit found for one `G`.
#[derive(Debug, Clone)]
pub struct SelectionRecord {
    pub g: usize,
    pub loglik: f64,
    pub rho: usize,
    pub bic: f64,
    pub converged: bool,
    /// `None` when every start failed; `note` then says why.
    pub fit: Option<FitResult>,
    pub note: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SelectionReport {
    pub n: usize,
    /// One record per `G`, in increasing order of `G`.
    pub records: Vec<SelectionRecord>,
    pub chosen_g: usize,
    pub chosen_model: MixtureModel,
}

impl SelectionReport {
    pub fn chosen(&self) -> &SelectionRecord {
        self.records
            .iter()
            .find(|r| r.g == self.chosen_g)
            .expect("chosen G has a record")
    }

    /// The fit behind the chosen model.
    pub fn chosen_fit(&self) -> &FitResult {
        self.chosen().fit.as_ref().expect("chosen record has a fit")
    }
}

/// Fits every `G` in `g_min..=g_max` and keeps the converged fit with the
/// largest BIC.
pub fn select_model(
    data: &DataMatrix,
    g_min: usize,
    g_max: usize,
    cfg: &FitConfig,
) -> Result<SelectionReport> {
    if g_min == 0 || g_min > g_max {
        return Err(Error::InvalidArgument(format!(
            "invalid component range {g_min}..={g_max}"
        )));
    }
    let n = data.n_rows();
    let p = data.n_cols();
    if g_max >= n {
        return Err(Error::InvalidArgument(format!(
            "G up to {g_max} needs more than {n} observations"
        )));
    }
    let records: Vec<SelectionRecord> = (g_min..=g_max)
        .map(|g| {
            let rho = count_free_params(g, p);
            match fit_em(data, g, cfg) {
                Ok(fit) => {
                    let loglik = fit.loglik();
                    let note = if fit.degenerate {
                        Some("degenerate: an eigenvalue collapsed".to_string())
                    } else if !fit.converged {
                        Some(format!("not converged after {} iterations", fit.n_iter))
                    } else {
                        None
                    };
                    SelectionRecord {
                        g,
                        loglik,
                        rho,
                        bic: bic(loglik, rho, n),
                        converged: fit.converged,
                        fit: Some(fit),
                        note,
                    }
                }
                Err(e) => SelectionRecord {
                    g,
                    loglik: f64::NAN,
                    rho,
                    bic: f64::NAN,
                    converged: false,
                    fit: None,
                    note: Some(e.to_string()),
                },
            }
        })
        .collect();
    let chosen = records
        .iter()
        .filter(|r| r.converged)
        .fold(None::<&SelectionRecord>, |best, r| match best {
            Some(b) if b.bic >= r.bic => Some(b),
            _ => Some(r),
        })
        .ok_or(Error::NoConvergedModel { g_min, g_max })?;
    let chosen_g = chosen.g;
    let chosen_model = chosen.fit.as_ref().expect("converged record has a fit").model.clone();
    Ok(SelectionReport {
        n,
        records,
        chosen_g,
        chosen_model,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_counts() {
        assert_eq!(count_free_params(1, 1), 3);
        assert_eq!(count_free_params(2, 2), 15);
        assert_eq!(count_free_params(3, 5), 77);
    }

    #[test]
    fn bic_arithmetic() {
        assert!((bic(-100.0, 5, 50) + 219.560).abs() < 1e-3);
        assert_eq!(bic(0.0, 0, 1), 0.0);
    }

    #[test]
    fn range_is_validated() {
        let data = DataMatrix::unnamed(nalgebra::DMatrix::from_fn(5, 1, |i, _| i as f64)).unwrap();
        let cfg = FitConfig::default();
        assert!(select_model(&data, 3, 2, &cfg).is_err());
        assert!(select_model(&data, 0, 2, &cfg).is_err());
        assert!(select_model(&data, 1, 5, &cfg).is_err());
    }
}
