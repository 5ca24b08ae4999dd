//! Bundled real datasets.
//!
//! Fixture CSV files live in the workspace `fixtures/` directory, or in
//! the directory named by the `MSSAL_FIXTURES` environment variable.
//!
//! | fixture   | data file        | label file               |
//! |-----------|------------------|--------------------------|
//! | crabs     | `crabs.csv`      | `crabs_sex.csv`          |
//! | banknotes | `banknotes.csv`  | `banknotes_status.csv`   |
//! | wine      | `wine.csv`       | (none)                   |

use super::io::{read_csv, read_labels};
use super::DataMatrix;
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fixture {
    Crabs,
    Banknotes,
    Wine,
}

impl Fixture {
    pub fn data_file(self) -> &'static str {
        match self {
            Fixture::Crabs => "crabs.csv",
            Fixture::Banknotes => "banknotes.csv",
            Fixture::Wine => "wine.csv",
        }
    }

    pub fn label_file(self) -> Option<&'static str> {
        match self {
            Fixture::Crabs => Some("crabs_sex.csv"),
            Fixture::Banknotes => Some("banknotes_status.csv"),
            Fixture::Wine => None,
        }
    }

    pub fn data_path(self) -> PathBuf {
        fixtures_dir().join(self.data_file())
    }

    pub fn is_available(self) -> bool {
        self.data_path().is_file()
    }
}

pub fn fixtures_dir() -> PathBuf {
    match std::env::var_os("MSSAL_FIXTURES") {
        Some(dir) => PathBuf::from(dir),
        None => PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures")),
    }
}

fn load_labelled(fixture: Fixture, expect: (usize, usize)) -> Result<(DataMatrix, Vec<i64>)> {
    let data = read_csv(fixture.data_path(), true)?;
    let labels = read_labels(fixtures_dir().join(fixture.label_file().unwrap_or_default()))?;
    if (data.n_rows(), data.n_cols()) != expect || labels.len() != expect.0 {
        return Err(Error::Dimension(format!(
            "{:?} fixture: expected {}x{} with {} labels, found {}x{} with {} labels",
            fixture,
            expect.0,
            expect.1,
            expect.0,
            data.n_rows(),
            data.n_cols(),
            labels.len()
        )));
    }
    Ok((data, labels))
}

/// Leptograpsus crabs: 200 rows of five morphological measurements and
/// sex labels (1 = male, 2 = female).
pub fn load_crabs() -> Result<(DataMatrix, Vec<i64>)> {
    load_labelled(Fixture::Crabs, (200, 5))
}

/// Swiss banknotes: 200 rows of six measurements and status labels
/// (1 = genuine, 2 = counterfeit).
pub fn load_banknotes() -> Result<(DataMatrix, Vec<i64>)> {
    load_labelled(Fixture::Banknotes, (200, 6))
}

/// The 27-variable wine data, used only for timing.
pub fn load_wine() -> Result<DataMatrix> {
    let data = read_csv(Fixture::Wine.data_path(), true)?;
    if data.n_cols() < 25 {
        return Err(Error::Dimension(format!(
            "wine fixture has {} columns, timing needs at least 25",
            data.n_cols()
        )));
    }
    Ok(data)
}

/// A deterministic `n x p` matrix with three shifted Gaussian groups. Stands
/// in for the wine data in timing runs when that fixture is absent; with a
/// fixed iteration count, run time depends on `n`, `p` and `G` only.
pub fn synthetic_wide(n: usize, p: usize, seed: u64) -> Result<DataMatrix> {
    let mut rng = crate::rng_from_seed(seed);
    let values = DMatrix::from_fn(n, p, |i, j| {
        let z: f64 = StandardNormal.sample(&mut rng);
        let group = (i % 3) as f64;
        z * (1.0 + 0.1 * j as f64) + 3.0 * group * if j % 2 == 0 { 1.0 } else { -1.0 }
    });
    DataMatrix::unnamed(values)
}
