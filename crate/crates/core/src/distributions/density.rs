use super::bessel::log_bessel_k;
use super::gig::DEFAULT_B_FLOOR;
use super::log_sum_exp;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use std::f64::consts::{LN_2, PI};

/// Maximum tolerated entry of `|D'D - I|` for an eigenvector matrix.
pub const ORTHOGONALITY_TOL: f64 = 1e-8;

/// Parameters of one MSSAL component.
///
/// The skewness is stored in the `beta` parameterisation, where the
/// per-direction shift of the latent Gaussian is `Omega * beta` with
/// `Omega = D A diag(w) D'`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentParams {
    mu: DVector<f64>,
    beta: DVector<f64>,
    d_mat: DMatrix<f64>,
    a_diag: DVector<f64>,
}

impl ComponentParams {
    pub fn new(
        mu: DVector<f64>,
        beta: DVector<f64>,
        d_mat: DMatrix<f64>,
        a_diag: DVector<f64>,
    ) -> Result<Self> {
        let p = mu.len();
        if p == 0 {
            return Err(Error::Dimension("component dimension must be at least 1".into()));
        }
        if beta.len() != p || a_diag.len() != p || d_mat.nrows() != p || d_mat.ncols() != p {
            return Err(Error::Dimension(format!(
                "component parts disagree: mu {p}, beta {}, a {}, D {}x{}",
                beta.len(),
                a_diag.len(),
                d_mat.nrows(),
                d_mat.ncols()
            )));
        }
        let finite = mu.iter().chain(beta.iter()).chain(d_mat.iter()).chain(a_diag.iter());
        if finite.clone().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("component parameters must be finite".into()));
        }
        if let Some(a) = a_diag.iter().find(|&&a| !(a > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "eigenvalues must be positive, found {a}"
            )));
        }
        let dev = orthogonality_defect(&d_mat);
        if dev >= ORTHOGONALITY_TOL {
            return Err(Error::InvalidArgument(format!(
                "D is not orthogonal: max |D'D - I| = {dev:e}"
            )));
        }
        Ok(Self {
            mu,
            beta,
            d_mat,
            a_diag,
        })
    }

    /// Standard symmetric Laplace-type component at `mu` with `D = I`,
    /// `beta = 0` and unit eigenvalues.
    pub fn standard(mu: DVector<f64>) -> Self {
        let p = mu.len();
        Self {
            beta: DVector::zeros(p),
            d_mat: DMatrix::identity(p, p),
            a_diag: DVector::from_element(p, 1.0),
            mu,
        }
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &DVector<f64> {
        &self.mu
    }

    pub fn beta(&self) -> &DVector<f64> {
        &self.beta
    }

    pub fn d_mat(&self) -> &DMatrix<f64> {
        &self.d_mat
    }

    pub fn a_diag(&self) -> &DVector<f64> {
        &self.a_diag
    }

    /// `D A D'`, the scale matrix at unit latent weights.
    pub fn scale_matrix(&self) -> DMatrix<f64> {
        &self.d_mat * DMatrix::from_diagonal(&self.a_diag) * self.d_mat.transpose()
    }

    /// Expected value `mu + D A D' beta` (every latent weight has mean 1).
    pub fn mean(&self) -> DVector<f64> {
        &self.mu + self.scale_matrix() * &self.beta
    }

    pub fn kernel(&self) -> ComponentKernel {
        ComponentKernel::new(self)
    }
}

/// Max-abs entry of `D'D - I`.
pub(crate) fn orthogonality_defect(d: &DMatrix<f64>) -> f64 {
    let p = d.ncols();
    let gram = d.transpose() * d;
    (gram - DMatrix::<f64>::identity(p, p)).amax()
}

/// Precomputed quantities for evaluating one component's log-density many
/// times.
#[derive(Debug, Clone)]
pub struct ComponentKernel {
    mu: DVector<f64>,
    d_t: DMatrix<f64>,
    a: DVector<f64>,
    /// `[A D' beta]_j`
    skew: DVector<f64>,
    gamma: DVector<f64>,
    log_norm: f64,
}

impl ComponentKernel {
    pub fn new(params: &ComponentParams) -> Self {
        let d_t = params.d_mat.transpose();
        let skew = (&d_t * &params.beta).component_mul(&params.a_diag);
        let gamma = skew.zip_map(&params.a_diag, |s, a| (s * s + 2.0 * a).sqrt());
        let log_norm = -gamma.iter().map(|g| g.ln()).sum::<f64>();
        Self {
            mu: params.mu.clone(),
            d_t,
            a: params.a_diag.clone(),
            skew,
            gamma,
            log_norm,
        }
    }

    /// Log-density at `x`, given as a slice of length `p`.
    pub fn log_density(&self, x: &[f64]) -> f64 {
        let p = self.mu.len();
        let mut total = self.log_norm;
        for j in 0..p {
            let mut v = 0.0;
            for k in 0..p {
                v += self.d_t[(j, k)] * (x[k] - self.mu[k]);
            }
            total -= v.abs() / self.a[j] * (self.gamma[j] - self.skew[j] * sign(v));
        }
        total
    }
}

/// Sign with `sign(0) = 0`.
#[inline]
pub(crate) fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Log-density of one MSSAL component.
pub fn mssal_log_density(x: &DVector<f64>, params: &ComponentParams) -> Result<f64> {
    if x.len() != params.dim() {
        return Err(Error::Dimension(format!(
            "point has length {}, component has dimension {}",
            x.len(),
            params.dim()
        )));
    }
    Ok(params.kernel().log_density(x.as_slice()))
}

/// Log-density of the multivariate shifted asymmetric Laplace law with
/// skewness `alpha`, scale `sigma` and location `mu`.
///
/// At `x = mu` the squared Mahalanobis distance is raised to
/// [`DEFAULT_B_FLOOR`] so the Bessel factor stays finite.
pub fn sal_log_density(
    x: &DVector<f64>,
    alpha: &DVector<f64>,
    sigma: &DMatrix<f64>,
    mu: &DVector<f64>,
) -> Result<f64> {
    let p = x.len();
    if alpha.len() != p || mu.len() != p || sigma.nrows() != p || sigma.ncols() != p {
        return Err(Error::Dimension(format!(
            "sal_log_density: x {p}, alpha {}, mu {}, sigma {}x{}",
            alpha.len(),
            mu.len(),
            sigma.nrows(),
            sigma.ncols()
        )));
    }
    let chol = sigma
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Decomposition("sigma is not positive definite".into()))?;
    let diff = x - mu;
    let sinv_alpha = chol.solve(alpha);
    let sinv_diff = chol.solve(&diff);
    let q = alpha.dot(&sinv_alpha);
    let delta = diff.dot(&sinv_diff).max(DEFAULT_B_FLOOR);
    let log_det: f64 = 2.0 * chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>();
    let nu = (2.0 - p as f64) / 2.0;
    let u = ((2.0 + q) * delta).sqrt();
    Ok(LN_2 + diff.dot(&sinv_alpha)
        - 0.5 * p as f64 * (2.0 * PI).ln()
        - 0.5 * log_det
        + 0.5 * nu * (delta.ln() - (2.0 + q).ln())
        + log_bessel_k(nu, u)?)
}

/// A finite mixture of MSSAL components.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureModel {
    weights: Vec<f64>,
    components: Vec<ComponentParams>,
}

impl MixtureModel {
    pub fn new(weights: Vec<f64>, components: Vec<ComponentParams>) -> Result<Self> {
        if components.is_empty() || weights.len() != components.len() {
            return Err(Error::Dimension(format!(
                "{} weights for {} components",
                weights.len(),
                components.len()
            )));
        }
        let p = components[0].dim();
        if components.iter().any(|c| c.dim() != p) {
            return Err(Error::Dimension("components have different dimensions".into()));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidArgument(format!("invalid mixing weights {weights:?}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "mixing weights sum to {total}, expected 1"
            )));
        }
        Ok(Self {
            weights,
            components,
        })
    }

    pub fn single(component: ComponentParams) -> Self {
        Self {
            weights: vec![1.0],
            components: vec![component],
        }
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn dim(&self) -> usize {
        self.components[0].dim()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn components(&self) -> &[ComponentParams] {
        &self.components
    }

    pub fn kernels(&self) -> Vec<ComponentKernel> {
        self.components.iter().map(ComponentKernel::new).collect()
    }

    /// Per-component `ln pi_g + ln h(x | theta_g)` using prebuilt kernels.
    pub(crate) fn weighted_log_densities(
        &self,
        kernels: &[ComponentKernel],
        x: &[f64],
        out: &mut [f64],
    ) {
        for ((o, k), w) in out.iter_mut().zip(kernels).zip(&self.weights) {
            *o = w.ln() + k.log_density(x);
        }
    }
}

/// `ln sum_g pi_g h(x | theta_g)`, stabilised by shifting with the largest
/// term.
pub fn mixture_log_density(x: &DVector<f64>, model: &MixtureModel) -> Result<f64> {
    if x.len() != model.dim() {
        return Err(Error::Dimension(format!(
            "point has length {}, model has dimension {}",
            x.len(),
            model.dim()
        )));
    }
    let kernels = model.kernels();
    let mut terms = vec![0.0; model.n_components()];
    model.weighted_log_densities(&kernels, x.as_slice(), &mut terms);
    Ok(log_sum_exp(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    fn rotation(theta: f64) -> DMatrix<f64> {
        let (s, c) = theta.sin_cos();
        DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
    }

    #[test]
    fn mode_value_is_minus_sum_log_gamma() {
        let params = ComponentParams::new(
            dvector![1.0, -2.0],
            dvector![0.4, -0.7],
            rotation(0.3),
            dvector![0.8, 2.5],
        )
        .unwrap();
        let k = params.kernel();
        let at_mode = mssal_log_density(params.mu(), &params).unwrap();
        let expected: f64 = -k.gamma.iter().map(|g| g.ln()).sum::<f64>();
        assert_eq!(at_mode, expected);
    }

    #[test]
    fn symmetric_double_exponential_product() {
        let params = ComponentParams::new(
            dvector![0.0, 0.0],
            dvector![0.0, 0.0],
            DMatrix::identity(2, 2),
            dvector![0.5, 0.5],
        )
        .unwrap();
        let v = mssal_log_density(&dvector![1.0, -1.0], &params).unwrap();
        assert!((v - (-4.0)).abs() < 1e-14);
    }

    #[test]
    fn sal_reduces_to_univariate_form() {
        let v = sal_log_density(
            &dvector![1.0],
            &dvector![0.0],
            &DMatrix::from_element(1, 1, 0.5),
            &dvector![0.0],
        )
        .unwrap();
        assert!((v + 2.0).abs() < 1e-13, "{v}");
    }

    #[test]
    fn sal_rejects_singular_scale() {
        let sigma = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let r = sal_log_density(&dvector![0.0, 1.0], &dvector![0.0, 0.0], &sigma, &dvector![0.0, 0.0]);
        assert!(matches!(r, Err(Error::Decomposition(_))));
    }

    #[test]
    fn sal_at_location_is_finite() {
        let sigma = DMatrix::identity(2, 2);
        let v = sal_log_density(&dvector![0.0, 0.0], &dvector![0.3, 0.1], &sigma, &dvector![0.0, 0.0])
            .unwrap();
        assert!(v.is_finite());
    }

    #[test]
    fn invalid_components_are_rejected() {
        let bad_a = ComponentParams::new(dvector![0.0], dvector![0.0], DMatrix::identity(1, 1), dvector![0.0]);
        assert!(bad_a.is_err());
        let not_orth = ComponentParams::new(
            dvector![0.0, 0.0],
            dvector![0.0, 0.0],
            DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]),
            dvector![1.0, 1.0],
        );
        assert!(not_orth.is_err());
        let mismatch = ComponentParams::new(dvector![0.0, 0.0], dvector![0.0], DMatrix::identity(2, 2), dvector![1.0, 1.0]);
        assert!(matches!(mismatch, Err(Error::Dimension(_))));
    }

    #[test]
    fn identical_components_collapse() {
        let c = ComponentParams::new(dvector![0.5, 1.0], dvector![1.0, 0.2], rotation(1.1), dvector![1.0, 0.3]).unwrap();
        let mix = MixtureModel::new(vec![0.3, 0.7], vec![c.clone(), c.clone()]).unwrap();
        let x = dvector![0.2, -1.3];
        let a = mixture_log_density(&x, &mix).unwrap();
        let b = mssal_log_density(&x, &c).unwrap();
        assert!((a - b).abs() < 1e-14);
        let single = MixtureModel::single(c.clone());
        assert_eq!(mixture_log_density(&x, &single).unwrap(), b);
    }

    #[test]
    fn weights_must_sum_to_one() {
        let c = ComponentParams::standard(dvector![0.0]);
        assert!(MixtureModel::new(vec![0.5, 0.4], vec![c.clone(), c]).is_err());
    }
}
