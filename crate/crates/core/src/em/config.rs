use crate::distributions::DEFAULT_B_FLOOR;
use crate::error::{Error, Result};

/// Estimation settings for [`fit_em`](super::fit_em).
#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    /// Number of random starting partitions.
    pub n_starts: usize,
    /// Maximum EM iterations per start.
    pub max_iter: usize,
    /// Aitken stopping threshold.
    pub aitken_eps: f64,
    /// Maximum MM iterations per rotation update.
    pub mm_max_iter: usize,
    /// MM stopping threshold on the absolute change of the objective.
    pub mm_tol: f64,
    /// Floor on `b` in the latent-weight moments.
    pub b_floor: f64,
    /// A start is discarded when some component's share `n_g / n` drops
    /// below this. `None` means `(p + 1) / n`: with `p` or fewer members a
    /// component can collapse onto a hyperplane and the likelihood grows
    /// without bound.
    pub min_weight: Option<f64>,
    pub seed: u64,
    /// When false the EM loop always runs `max_iter` iterations.
    pub check_convergence: bool,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            n_starts: 50,
            max_iter: 1000,
            aitken_eps: 1e-3,
            mm_max_iter: 20,
            mm_tol: 1e-8,
            b_floor: DEFAULT_B_FLOOR,
            min_weight: None,
            seed: 1,
            check_convergence: true,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("n_starts", self.n_starts),
            ("max_iter", self.max_iter),
            ("mm_max_iter", self.mm_max_iter),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return Err(Error::InvalidArgument(format!("{name} must be at least 1")));
        }
        let tolerances = [
            ("aitken_eps", self.aitken_eps),
            ("mm_tol", self.mm_tol),
            ("b_floor", self.b_floor),
            ("min_weight", self.min_weight.unwrap_or(1.0)),
        ];
        if let Some((name, v)) = tolerances.iter().find(|(_, v)| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
        }
        Ok(())
    }

    pub(crate) fn min_weight_for(&self, n: usize, p: usize) -> f64 {
        self.min_weight.unwrap_or((p as f64 + 1.0) / n as f64)
    }
}
