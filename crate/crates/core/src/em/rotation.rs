use super::mstep::ComponentMoments;
use nalgebra::{DMatrix, DVector};

/// The rotation subproblem of one component.
///
/// With `mu`, `beta` and `A` held fixed, the part of the expected
/// complete-data log-likelihood that depends on `D` is `-f(D) / 2` where
///
/// `f(D) = sum_i z_i [ sum_j (E2_ij / a_j) (d_j' r_i)^2 + sum_j a_j E1_ij (d_j' beta)^2 ]`
///
/// and `r_i = x_i - mu`. [`mm_rotation_update`] minimises `f` over
/// orthogonal matrices.
#[derive(Debug, Clone)]
pub struct RotationProblem {
    residuals: DMatrix<f64>,
    z: Vec<f64>,
    /// `E2_ij / a_j`, `p x n`.
    m: DMatrix<f64>,
    beta: DVector<f64>,
    /// `sum_i z_i a_j E1_ij`.
    n_bar: DVector<f64>,
    /// `sum_i z_i ||r_i||^2 E2_ij / a_j`.
    c: DVector<f64>,
    /// `max_j E2_ij / a_j` per observation.
    alpha: Vec<f64>,
    /// `sum_i z_i max_j a_j E1_ij`.
    alpha_b: f64,
}

/// Result of [`mm_rotation_update`].
#[derive(Debug, Clone, PartialEq)]
pub struct RotationOutcome {
    pub d: DMatrix<f64>,
    /// `f` at the starting matrix followed by its value after each MM
    /// iteration.
    pub objective: Vec<f64>,
    pub iterations: usize,
    /// An SVD did not converge; the last good matrix was kept.
    pub svd_failed: bool,
    /// `f` increased by more than `1e-8` at some iteration.
    pub ascent: bool,
}

impl RotationProblem {
    pub fn new(
        moments: &ComponentMoments<'_>,
        mu: &DVector<f64>,
        beta: &DVector<f64>,
        a: &DVector<f64>,
    ) -> Self {
        let obs = moments.obs;
        let (p, n) = obs.shape();
        let mut residuals = obs.clone();
        for mut col in residuals.column_iter_mut() {
            col -= mu;
        }
        let z = moments.z.to_vec();
        let m = DMatrix::from_fn(p, n, |j, i| moments.e2[(j, i)] / a[j]);
        let mut n_bar = DVector::zeros(p);
        let mut c = DVector::zeros(p);
        let mut alpha = Vec::with_capacity(n);
        let mut alpha_b = 0.0;
        for i in 0..n {
            let r2 = residuals.column(i).norm_squared();
            let mut max_m = f64::MIN;
            let mut max_n = f64::MIN;
            for j in 0..p {
                let nij = a[j] * moments.e1[(j, i)];
                n_bar[j] += z[i] * nij;
                c[j] += z[i] * r2 * m[(j, i)];
                max_m = max_m.max(m[(j, i)]);
                max_n = max_n.max(nij);
            }
            alpha.push(max_m);
            alpha_b += z[i] * max_n;
        }
        Self {
            residuals,
            z,
            m,
            beta: beta.clone(),
            n_bar,
            c,
            alpha,
            alpha_b,
        }
    }

    pub fn dim(&self) -> usize {
        self.beta.len()
    }

    /// Evaluates `f(D)`.
    pub fn objective(&self, d: &DMatrix<f64>) -> f64 {
        let u = d.transpose() * &self.residuals;
        let ell = d.transpose() * &self.beta;
        let mut total = 0.0;
        for (i, &zi) in self.z.iter().enumerate() {
            if zi == 0.0 {
                continue;
            }
            let s: f64 = (0..self.dim()).map(|j| self.m[(j, i)] * u[(j, i)] * u[(j, i)]).sum();
            total += zi * s;
        }
        total + ell.component_mul(&ell).dot(&self.n_bar)
    }

    /// Linear term of the majoriser built from the largest eigenvalues of
    /// the rank-one matrices `z_i r_i r_i'` and `z_i beta beta'`.
    fn first_gradient(&self, d0: &DMatrix<f64>) -> DMatrix<f64> {
        let (p, n) = self.residuals.shape();
        let u = d0.transpose() * &self.residuals;
        let ell = d0.transpose() * &self.beta;
        let q = DMatrix::from_fn(p, n, |j, i| self.z[i] * u[(j, i)] * self.m[(j, i)]);
        let mut g = &self.residuals * q.transpose();
        g -= d0 * DMatrix::from_diagonal(&self.c);
        g += &self.beta * ell.component_mul(&self.n_bar).transpose();
        g -= d0 * DMatrix::from_diagonal(&self.n_bar) * self.beta.norm_squared();
        g
    }

    /// Linear term of the majoriser built from the largest diagonal entries
    /// of the per-observation weight matrices.
    fn second_gradient(&self, d1: &DMatrix<f64>) -> DMatrix<f64> {
        let (p, n) = self.residuals.shape();
        let u = d1.transpose() * &self.residuals;
        let ell = d1.transpose() * &self.beta;
        let q = DMatrix::from_fn(p, n, |j, i| {
            self.z[i] * u[(j, i)] * (self.m[(j, i)] - self.alpha[i])
        });
        let mut g = &self.residuals * q.transpose();
        let shifted = self.n_bar.map(|v| v - self.alpha_b);
        g += &self.beta * ell.component_mul(&shifted).transpose();
        g
    }
}

/// Orthogonal minimiser of `<g, D>`, i.e. `-U V'` for `g = U S V'`.
fn procrustes(g: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    if g.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let svd = g.clone().try_svd(true, true, f64::EPSILON, 0)?;
    let u = svd.u?;
    let v_t = svd.v_t?;
    Some(-(u * v_t))
}

/// Flips columns so the largest-magnitude entry of each is positive.
pub(crate) fn normalize_signs(d: &mut DMatrix<f64>) {
    for mut col in d.column_iter_mut() {
        let lead = col.iter().fold(0.0f64, |acc, &v| if v.abs() > acc.abs() { v } else { acc });
        if lead < 0.0 {
            col.neg_mut();
        }
    }
}

/// Majorization-minimization for `D`.
///
/// Each iteration takes two half-steps. Both replace `f` by a surrogate
/// that touches it at the current matrix and is linear in `D` on the
/// orthogonal group, so each half-step is a Procrustes problem solved by
/// one SVD. Iteration stops once `f` changes by less than `tol` or after
/// `max_iter` iterations.
pub fn mm_rotation_update(
    problem: &RotationProblem,
    d0: &DMatrix<f64>,
    max_iter: usize,
    tol: f64,
) -> RotationOutcome {
    let p = problem.dim();
    if p == 1 {
        let d = DMatrix::from_element(1, 1, 1.0);
        let f = problem.objective(&d);
        return RotationOutcome {
            d,
            objective: vec![f],
            iterations: 0,
            svd_failed: false,
            ascent: false,
        };
    }
    let mut d = d0.clone();
    let mut f = problem.objective(&d);
    let mut objective = vec![f];
    let mut svd_failed = false;
    let mut ascent = false;
    let mut iterations = 0;
    for _ in 0..max_iter {
        let Some(d1) = procrustes(&problem.first_gradient(&d)) else {
            svd_failed = true;
            break;
        };
        let Some(d2) = procrustes(&problem.second_gradient(&d1)) else {
            svd_failed = true;
            break;
        };
        iterations += 1;
        let f_new = problem.objective(&d2);
        if f_new > f + 1e-8 * f.abs().max(1.0) {
            ascent = true;
        }
        let change = (f_new - f).abs();
        d = d2;
        f = f_new;
        objective.push(f);
        if change < tol {
            break;
        }
    }
    normalize_signs(&mut d);
    RotationOutcome {
        d,
        objective,
        iterations,
        svd_failed,
        ascent,
    }
}
