//! The three two-component simulation scenarios.
//!
//! Parameter sets are pinned here. Each pair is separated by at least five
//! pooled scale units, where the unit is the square root of the largest
//! eigenvalue of the averaged component covariance.

use super::DataMatrix;
use crate::distributions::{sample_mssal, ComponentParams};
use crate::error::{Error, Result};
use crate::rng_from_seed;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// Two bivariate Gaussians.
    I,
    /// Two bivariate skew-normals.
    II,
    /// Two MSSAL components.
    III,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::I, Scenario::II, Scenario::III];
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(Scenario::I),
            "II" | "2" => Ok(Scenario::II),
            "III" | "3" => Ok(Scenario::III),
            other => Err(Error::InvalidArgument(format!(
                "unknown scenario {other:?}; expected I, II or III"
            ))),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Scenario::I => "I",
            Scenario::II => "II",
            Scenario::III => "III",
        };
        f.write_str(s)
    }
}

/// Component parameters for one scenario.
#[derive(Debug, Clone)]
pub enum ScenarioParams {
    Gaussian {
        means: [DVector<f64>; 2],
        covariances: [DMatrix<f64>; 2],
    },
    /// Skew-normal via hidden truncation: `z_j = delta_j |u0| +
    /// sqrt(1 - delta_j^2) u1_j` with one shared `u0`, then
    /// `x = location + scale * z` elementwise.
    SkewNormal {
        locations: [DVector<f64>; 2],
        scales: [DVector<f64>; 2],
        deltas: [DVector<f64>; 2],
    },
    Mssal {
        components: [ComponentParams; 2],
    },
}

impl ScenarioParams {
    /// The checked-in parameter set for a scenario.
    pub fn pinned(scenario: Scenario) -> Self {
        let v = |a: f64, b: f64| DVector::from_vec(vec![a, b]);
        let m = |a, b, c, d| DMatrix::from_row_slice(2, 2, &[a, b, c, d]);
        match scenario {
            Scenario::I => ScenarioParams::Gaussian {
                means: [v(0.0, 0.0), v(7.0, 0.0)],
                covariances: [m(1.0, 0.5, 0.5, 1.5), m(1.5, -0.6, -0.6, 1.0)],
            },
            Scenario::II => ScenarioParams::SkewNormal {
                locations: [v(0.0, 0.0), v(8.0, -4.0)],
                scales: [v(2.0, 1.0), v(1.0, 2.0)],
                deltas: [v(0.95, 0.5), v(-0.7, 0.9)],
            },
            Scenario::III => {
                let rot = |deg: f64| {
                    let (s, c) = deg.to_radians().sin_cos();
                    m(c, -s, s, c)
                };
                let first = ComponentParams::new(v(0.0, 0.0), v(1.0, 0.5), rot(30.0), v(1.0, 0.25));
                let second = ComponentParams::new(v(8.0, -2.0), v(-0.5, 1.0), rot(-20.0), v(0.5, 0.8));
                ScenarioParams::Mssal {
                    components: [first.expect("pinned"), second.expect("pinned")],
                }
            }
        }
    }

    /// Population mean and covariance of each component.
    pub fn moments(&self) -> [(DVector<f64>, DMatrix<f64>); 2] {
        match self {
            ScenarioParams::Gaussian { means, covariances } => [
                (means[0].clone(), covariances[0].clone()),
                (means[1].clone(), covariances[1].clone()),
            ],
            ScenarioParams::SkewNormal {
                locations,
                scales,
                deltas,
            } => {
                let one = |g: usize| {
                    let (xi, om, de) = (&locations[g], &scales[g], &deltas[g]);
                    let b = (2.0 / PI).sqrt();
                    let mean = xi + om.component_mul(de) * b;
                    let p = xi.len();
                    let corr = DMatrix::from_fn(p, p, |j, k| {
                        if j == k {
                            1.0 - 2.0 * de[j] * de[j] / PI
                        } else {
                            de[j] * de[k] * (1.0 - 2.0 / PI)
                        }
                    });
                    let s = DMatrix::from_diagonal(om);
                    (mean, &s * corr * &s)
                };
                [one(0), one(1)]
            }
            ScenarioParams::Mssal { components } => {
                let one = |c: &ComponentParams| {
                    let lam = c.d_mat().transpose() * c.beta();
                    let a = c.a_diag();
                    let var = DVector::from_fn(a.len(), |j, _| a[j] + (a[j] * lam[j]).powi(2));
                    (c.mean(), c.d_mat() * DMatrix::from_diagonal(&var) * c.d_mat().transpose())
                };
                [one(&components[0]), one(&components[1])]
            }
        }
    }

    /// Distance between component means in pooled scale units.
    pub fn separation(&self) -> f64 {
        let [(m1, c1), (m2, c2)] = self.moments();
        let pooled = (c1 + c2) * 0.5;
        let top = SymmetricEigen::new(pooled).eigenvalues.max();
        (m1 - m2).norm() / top.sqrt()
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioSpec {
    pub scenario: Scenario,
    pub n_per_component: usize,
    pub seed: u64,
    pub params: ScenarioParams,
}

impl ScenarioSpec {
    /// A spec using the pinned parameter set.
    pub fn pinned(scenario: Scenario, n_per_component: usize, seed: u64) -> Self {
        Self {
            scenario,
            n_per_component,
            seed,
            params: ScenarioParams::pinned(scenario),
        }
    }
}

/// Generates `2 * n_per_component` rows, first all of component 1 then all
/// of component 2, with labels 1 and 2.
pub fn generate_scenario(spec: &ScenarioSpec) -> Result<(DataMatrix, Vec<usize>)> {
    let n = spec.n_per_component;
    if n == 0 {
        return Err(Error::InvalidArgument("n_per_component must be at least 1".into()));
    }
    let mut rng = rng_from_seed(spec.seed);
    let mut blocks = Vec::with_capacity(2);
    match &spec.params {
        ScenarioParams::Gaussian { means, covariances } => {
            for g in 0..2 {
                let l = covariances[g]
                    .clone()
                    .cholesky()
                    .ok_or_else(|| Error::Decomposition("scenario covariance".into()))?
                    .l();
                let p = means[g].len();
                let mut block = DMatrix::zeros(n, p);
                for i in 0..n {
                    let z = DVector::from_fn(p, |_, _| std_normal(&mut rng));
                    block.row_mut(i).copy_from(&(&means[g] + &l * z).transpose());
                }
                blocks.push(block);
            }
        }
        ScenarioParams::SkewNormal {
            locations,
            scales,
            deltas,
        } => {
            for g in 0..2 {
                let p = locations[g].len();
                let mut block = DMatrix::zeros(n, p);
                for i in 0..n {
                    let u0 = std_normal(&mut rng).abs();
                    for j in 0..p {
                        let d = deltas[g][j];
                        let z = d * u0 + (1.0 - d * d).sqrt() * std_normal(&mut rng);
                        block[(i, j)] = locations[g][j] + scales[g][j] * z;
                    }
                }
                blocks.push(block);
            }
        }
        ScenarioParams::Mssal { components } => {
            for c in components {
                blocks.push(sample_mssal(c, n, &mut rng)?.values().clone());
            }
        }
    }
    let p = blocks[0].ncols();
    let mut values = DMatrix::zeros(2 * n, p);
    values.rows_mut(0, n).copy_from(&blocks[0]);
    values.rows_mut(n, n).copy_from(&blocks[1]);
    let labels = (0..2 * n).map(|i| if i < n { 1 } else { 2 }).collect();
    Ok((DataMatrix::unnamed(values)?, labels))
}

fn std_normal(rng: &mut crate::Rng) -> f64 {
    StandardNormal.sample(rng)
}
