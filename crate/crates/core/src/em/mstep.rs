use super::estep::LatentExpectations;
use crate::distributions::ComponentParams;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Absolute lower bound for eigenvalues. Values at or below the floor in
/// use mark the fit degenerate.
pub const A_FLOOR: f64 = 1e-12;

const RIDGE: f64 = 1e-10;

/// The E-step output restricted to one component.
///
/// `obs` holds the observations as columns (`p x n`), `z` the
/// responsibilities and `e1`, `e2` the `p x n` latent-weight moments.
#[derive(Debug, Clone, Copy)]
pub struct ComponentMoments<'a> {
    pub obs: &'a DMatrix<f64>,
    pub z: &'a [f64],
    pub e1: &'a DMatrix<f64>,
    pub e2: &'a DMatrix<f64>,
}

impl ComponentMoments<'_> {
    /// `n_g = sum_i z_i`.
    pub fn total(&self) -> f64 {
        self.z.iter().sum()
    }
}

/// Mixing weights `n_g / n`.
///
/// Fails when some component's share falls below `min_weight`.
pub fn update_pi(expect: &LatentExpectations, min_weight: f64) -> Result<Vec<f64>> {
    let n = expect.n_obs() as f64;
    let totals = expect.component_totals();
    if let Some((g, &ng)) = totals.iter().enumerate().find(|(_, &ng)| ng < min_weight * n) {
        return Err(Error::StartFailed(format!(
            "component {} emptied (n_g = {ng:.3e} below {:.3e})",
            g + 1,
            min_weight * n
        )));
    }
    let sum: f64 = totals.iter().sum();
    Ok(totals.iter().map(|ng| ng / sum).collect())
}

/// Location and skewness updates.
#[derive(Debug, Clone, PartialEq)]
pub struct MuBetaUpdate {
    pub mu: DVector<f64>,
    pub beta: DVector<f64>,
    /// A ridge was needed to solve one of the weighted systems.
    pub ridged: bool,
}

/// Updates `mu` with the previous `beta`, then `beta` with the new `mu`.
///
/// Both weighted systems are diagonal in the frame of the previous `D`,
/// so they are solved coordinate by coordinate there and rotated back.
pub fn update_mu_beta(moments: &ComponentMoments<'_>, prev: &ComponentParams) -> MuBetaUpdate {
    let d = prev.d_mat();
    let a = prev.a_diag();
    let (p, n) = moments.obs.shape();
    let y = d.transpose() * moments.obs;
    let lambda = d.transpose() * prev.beta();
    let n_g = moments.total();
    let mut ridged = false;

    let mut s = DVector::<f64>::zeros(p);
    let mut t = DVector::<f64>::zeros(p);
    let mut r = DVector::<f64>::zeros(p);
    let mut y_sum = DVector::<f64>::zeros(p);
    for i in 0..n {
        let zi = moments.z[i];
        if zi == 0.0 {
            continue;
        }
        for j in 0..p {
            let w = zi * moments.e2[(j, i)] / a[j];
            s[j] += w;
            t[j] += w * y[(j, i)];
            r[j] += zi * a[j] * moments.e1[(j, i)];
            y_sum[j] += zi * y[(j, i)];
        }
    }
    let mut guard = |v: f64| {
        if v > 0.0 && v.is_finite() {
            v
        } else {
            ridged = true;
            v.max(0.0) + RIDGE
        }
    };
    let mu_rot = DVector::from_fn(p, |j, _| (t[j] - n_g * lambda[j]) / guard(s[j]));
    let beta_rot = DVector::from_fn(p, |j, _| (y_sum[j] - n_g * mu_rot[j]) / guard(r[j]));
    MuBetaUpdate {
        mu: d * mu_rot,
        beta: d * beta_rot,
        ridged,
    }
}

/// Eigenvalue update.
#[derive(Debug, Clone, PartialEq)]
pub struct AUpdate {
    pub a: DVector<f64>,
    /// Some entry hit [`A_FLOOR`].
    pub floored: bool,
}

/// One sweep of the fixed point
/// `a_j = sqrt( S2_j / (n_g / a_prev_j + S1_j lambda_j^2) )`
/// with `S2_j = sum_i z_i E2_ij v_ij^2`, `S1_j = sum_i z_i E1_ij`,
/// `v_i = D'(x_i - mu)` and `lambda = D' beta`.
///
/// A single sweep moves each `a_j` toward the stationary point of the
/// expected log-likelihood without overshooting it. Results below
/// `floor` (never less than [`A_FLOOR`]) are raised to it and flagged.
pub fn update_a(
    moments: &ComponentMoments<'_>,
    d: &DMatrix<f64>,
    mu: &DVector<f64>,
    beta: &DVector<f64>,
    a_prev: &DVector<f64>,
    floor: f64,
) -> AUpdate {
    let floor = floor.max(A_FLOOR);
    let (p, n) = moments.obs.shape();
    let lambda = d.transpose() * beta;
    let mu_rot = d.transpose() * mu;
    let y = d.transpose() * moments.obs;
    let n_g = moments.total();
    let mut s1 = DVector::<f64>::zeros(p);
    let mut s2 = DVector::<f64>::zeros(p);
    for i in 0..n {
        let zi = moments.z[i];
        if zi == 0.0 {
            continue;
        }
        for j in 0..p {
            let v = y[(j, i)] - mu_rot[j];
            s1[j] += zi * moments.e1[(j, i)];
            s2[j] += zi * moments.e2[(j, i)] * v * v;
        }
    }
    let mut floored = false;
    let a = DVector::from_fn(p, |j, _| {
        let denom = n_g / a_prev[j] + s1[j] * lambda[j] * lambda[j];
        let v = (s2[j] / denom).sqrt();
        if v >= floor && v.is_finite() {
            v
        } else {
            floored = true;
            floor
        }
    });
    AUpdate { a, floored }
}
