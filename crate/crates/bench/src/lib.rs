//! Shared inputs for the benchmarks.

use mssal::data::{generate_scenario, synthetic_wide};
use mssal::em::{e_step, ComponentMoments, RotationProblem};
use mssal::{DataMatrix, FitConfig, LatentExpectations, MixtureModel, Scenario, ScenarioSpec};
use nalgebra::DMatrix;

/// Scenario III with `n_per_component` rows per component.
pub fn two_clusters(n_per_component: usize, seed: u64) -> DataMatrix {
    generate_scenario(&ScenarioSpec::pinned(Scenario::III, n_per_component, seed))
        .expect("pinned scenario")
        .0
}

/// The first `p` columns of the synthetic timing matrix.
pub fn wide(n: usize, p: usize) -> DataMatrix {
    synthetic_wide(n, p, 1).expect("synthetic data")
}

/// A single start run for exactly `iters` iterations.
pub fn fixed_iterations(iters: usize) -> FitConfig {
    FitConfig {
        n_starts: 1,
        max_iter: iters,
        check_convergence: false,
        ..FitConfig::default()
    }
}

/// Inputs for one rotation update, taken from an E-step at `model`.
pub struct RotationInput {
    pub obs: DMatrix<f64>,
    pub expect: LatentExpectations,
    pub model: MixtureModel,
}

impl RotationInput {
    pub fn new(data: &DataMatrix, model: MixtureModel) -> Self {
        let (expect, _) = e_step(data, &model, &FitConfig::default()).expect("e-step");
        Self {
            obs: data.observations(),
            expect,
            model,
        }
    }

    pub fn problem(&self) -> (RotationProblem, DMatrix<f64>) {
        let z: Vec<f64> = self.expect.zhat.column(0).iter().copied().collect();
        let moments = ComponentMoments {
            obs: &self.obs,
            z: &z,
            e1: &self.expect.e1[0],
            e2: &self.expect.e2[0],
        };
        let c = &self.model.components()[0];
        let problem = RotationProblem::new(&moments, c.mu(), c.beta(), c.a_diag());
        (problem, c.d_mat().clone())
    }
}
