use super::bessel::bessel_k_ratio;
use crate::error::{Error, Result};

/// Smallest `b` used when evaluating latent-weight moments. Below it the
/// expectation of `1/W` diverges.
pub const DEFAULT_B_FLOOR: f64 = 1e-10;

/// First moment and first inverse moment of a generalized inverse
/// Gaussian variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GigMoments {
    /// `E[W]`
    pub e_w: f64,
    /// `E[1/W]`
    pub e_inv_w: f64,
}

/// Moments of GIG(d, b, nu), the law with density proportional to
/// `w^{nu-1} exp(-(d w + b / w) / 2)`.
///
/// `b` below `b_floor` is raised to the floor; the returned flag reports
/// whether that happened.
pub fn gig_moments(d: f64, b: f64, nu: f64, b_floor: f64) -> Result<(GigMoments, bool)> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::domain("gig_moments", format!("d must be positive, got {d}")));
    }
    if !(b >= 0.0) || !b.is_finite() {
        return Err(Error::domain("gig_moments", format!("b must be non-negative, got {b}")));
    }
    let clamped = b < b_floor;
    let b = b.max(b_floor);
    if (nu - 0.5).abs() < 1e-15 {
        return Ok((half_order(d, b), clamped));
    }
    let c = (d * b).sqrt();
    let r = bessel_k_ratio(nu, c)?;
    let moments = GigMoments {
        e_w: (b / d).sqrt() * r,
        e_inv_w: (d / b).sqrt() * r - 2.0 * nu / b,
    };
    Ok((moments, clamped))
}

/// `nu = 1/2`: the ratio is `1 + 1/c` and the `2 nu / b` term cancels
/// analytically, which avoids the cancellation as `b -> 0`.
#[inline]
pub(crate) fn half_order(d: f64, b: f64) -> GigMoments {
    GigMoments {
        e_w: (b / d).sqrt() + 1.0 / d,
        e_inv_w: (d / b).sqrt(),
    }
}
