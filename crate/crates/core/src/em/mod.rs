//! EM estimation for MSSAL mixtures.
//!
//! One iteration is an E-step ([`e_step`]) followed by conditional
//! maximisation of the expected complete-data log-likelihood in the order
//! `pi -> mu -> beta -> D -> A`. `D` is updated by a majorization-
//! minimization loop whose steps are closed-form SVD solutions.

mod aitken;
mod config;
mod estep;
mod fit;
mod mstep;
mod rotation;

pub use aitken::aitken_converged;
pub use config::FitConfig;
pub use estep::{e_step, LatentExpectations};
pub use fit::{fit_em, fit_from_labels, map_classify, FitDiagnostics, FitResult};
pub use mstep::{update_a, update_mu_beta, update_pi, AUpdate, ComponentMoments, MuBetaUpdate, A_FLOOR};
pub use rotation::{mm_rotation_update, RotationOutcome, RotationProblem};
