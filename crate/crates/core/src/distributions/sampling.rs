//! Random draws from MSSAL components and mixtures.
//!
//! Each row is produced by drawing `w_1..w_p ~ Exp(1)`, then
//! `z_1..z_p ~ N(0, 1)`, in that order, and returning
//! `x = mu + Omega beta + chol(Omega) z` with `Omega = D A diag(w) D'`.

use super::density::{ComponentParams, MixtureModel};
use crate::data::DataMatrix;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::weighted::WeightedIndex;
use rand_distr::{Distribution, Exp1, StandardNormal};

/// Draws `n` independent rows from one component.
pub fn sample_mssal<R: Rng + ?Sized>(
    params: &ComponentParams,
    n: usize,
    rng: &mut R,
) -> Result<DataMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample size must be at least 1".into()));
    }
    let p = params.dim();
    let mut values = DMatrix::zeros(n, p);
    for i in 0..n {
        let row = draw_row(params, rng);
        values.row_mut(i).copy_from(&row.transpose());
    }
    DataMatrix::unnamed(values)
}

/// Draws `n` rows from a mixture and returns them with their 1-based
/// component labels.
pub fn sample_mixture<R: Rng + ?Sized>(
    model: &MixtureModel,
    n: usize,
    rng: &mut R,
) -> Result<(DataMatrix, Vec<usize>)> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample size must be at least 1".into()));
    }
    let chooser = WeightedIndex::new(model.weights())
        .map_err(|e| Error::InvalidArgument(format!("mixing weights: {e}")))?;
    let p = model.dim();
    let mut values = DMatrix::zeros(n, p);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let g = chooser.sample(rng);
        let row = draw_row(&model.components()[g], rng);
        values.row_mut(i).copy_from(&row.transpose());
        labels.push(g + 1);
    }
    Ok((DataMatrix::unnamed(values)?, labels))
}

fn draw_row<R: Rng + ?Sized>(params: &ComponentParams, rng: &mut R) -> DVector<f64> {
    let p = params.dim();
    let w = DVector::from_fn(p, |_, _| Exp1.sample(rng));
    let z = DVector::from_fn(p, |_, _| <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng));
    let aw = params.a_diag().component_mul(&w);
    let d = params.d_mat();
    let omega = d * DMatrix::from_diagonal(&aw) * d.transpose();
    let root = match omega.clone().cholesky() {
        Some(c) => c.l(),
        // Numerically indefinite when some w_j is tiny; the symmetric
        // factor has the same law.
        None => d * DMatrix::from_diagonal(&aw.map(f64::sqrt)),
    };
    params.mu() + &omega * params.beta() + root * z
}
