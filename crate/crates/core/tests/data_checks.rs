use mssal::data::{generate_scenario, pca_scores, read_csv, write_csv, Pca, ScenarioParams};
use mssal::{rng_from_seed, DataMatrix, Scenario, ScenarioSpec};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

fn sample_moments(x: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = x.nrows() as f64;
    let mean = x.row_mean().transpose();
    let mut c = x.clone();
    for mut row in c.row_iter_mut() {
        row -= mean.transpose();
    }
    let cov = c.transpose() * &c / (n - 1.0);
    (mean, cov)
}

#[test]
fn csv_round_trip_is_exact() {
    let mut rng = rng_from_seed(3);
    let values = DMatrix::from_fn(37, 4, |_, j| match j {
        0 => rng.random::<f64>() * 1e-300,
        1 => rng.random::<f64>() * 1e300,
        2 => -rng.random::<f64>(),
        _ => (rng.random_range(-1000..1000) as f64) / 7.0,
    });
    let names = vec!["a".into(), "b c".into(), "d".into(), "e".into()];
    let data = DataMatrix::new(values, names).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.csv");
    write_csv(&data, &path).unwrap();
    let back = read_csv(&path, true).unwrap();
    assert_eq!(back, data);
    let first = std::fs::read(&path).unwrap();
    write_csv(&back, &path).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), first);
}

#[test]
fn pca_scores_are_uncorrelated_and_ordered() {
    let mut rng = rng_from_seed(8);
    let mix = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.0, 0.1, 1.0, 0.4, -0.5, 0.0, 0.3]);
    let z = DMatrix::from_fn(500, 3, |_, _| rng.random::<f64>() - 0.5);
    let data = DataMatrix::unnamed(z * mix.transpose()).unwrap();
    let pca = Pca::fit(&data).unwrap();
    let scores = pca_scores(&data, &[1, 2, 3]).unwrap();
    let (mean, cov) = sample_moments(scores.values());
    assert!(mean.amax() < 1e-12);
    for j in 0..3 {
        assert!((cov[(j, j)] - pca.eigenvalues[j]).abs() < 1e-10 * pca.eigenvalues[0]);
        for k in 0..3 {
            if j != k {
                assert!(cov[(j, k)].abs() < 1e-10 * pca.eigenvalues[0]);
            }
        }
    }
    assert!(pca.eigenvalues[0] >= pca.eigenvalues[1] && pca.eigenvalues[1] >= pca.eigenvalues[2]);
    // Total variance is preserved.
    let (_, raw) = sample_moments(data.values());
    assert!((raw.trace() - pca.eigenvalues.sum()).abs() < 1e-10 * raw.trace());
    assert_eq!(scores.column_names(), ["PC1", "PC2", "PC3"]);
}

#[test]
fn pca_two_by_two_closed_form() {
    let x = DMatrix::from_row_slice(4, 2, &[0.0, 0.0, 2.0, 1.0, 4.0, 1.0, 2.0, 2.0]);
    let pca = Pca::fit(&DataMatrix::unnamed(x.clone()).unwrap()).unwrap();
    let (_, c) = sample_moments(&x);
    let (a, b, d) = (c[(0, 0)], c[(0, 1)], c[(1, 1)]);
    let half = ((a - d).powi(2) / 4.0 + b * b).sqrt();
    let top = (a + d) / 2.0 + half;
    assert!((pca.eigenvalues[0] - top).abs() < 1e-12);
    assert!((pca.eigenvalues[1] - ((a + d) / 2.0 - half)).abs() < 1e-12);
    let v = DVector::from_vec(vec![b, top - a]).normalize();
    assert!((pca.loadings.column(0).dot(&v).abs() - 1.0).abs() < 1e-12);
}

#[test]
fn pca_rejects_bad_indices() {
    let data = DataMatrix::unnamed(DMatrix::from_fn(5, 2, |i, j| (i * (j + 1)) as f64 + j as f64)).unwrap();
    assert!(pca_scores(&data, &[0]).is_err());
    assert!(pca_scores(&data, &[3]).is_err());
    assert!(pca_scores(&data, &[]).is_err());
}

#[test]
fn scenario_samples_match_population_moments() {
    for s in Scenario::ALL {
        let spec = ScenarioSpec::pinned(s, 100_000, 99);
        let (data, labels) = generate_scenario(&spec).unwrap();
        assert_eq!(data.n_rows(), 200_000);
        assert_eq!(labels.iter().filter(|&&l| l == 1).count(), 100_000);
        let moments = ScenarioParams::pinned(s).moments();
        for (g, (mu, sigma)) in moments.iter().enumerate() {
            let block = data.values().rows(g * 100_000, 100_000).into_owned();
            let (m, c) = sample_moments(&block);
            for j in 0..2 {
                let se = (sigma[(j, j)] / 100_000.0).sqrt();
                assert!((m[j] - mu[j]).abs() < 4.0 * se, "scenario {s} comp {g} mean {j}");
                for k in 0..2 {
                    let scale = (sigma[(j, j)] * sigma[(k, k)]).sqrt();
                    assert!((c[(j, k)] - sigma[(j, k)]).abs() < 0.05 * scale, "scenario {s} cov");
                }
            }
        }
    }
}

#[test]
fn scenario_two_skewness_has_the_sign_of_delta() {
    let spec = ScenarioSpec::pinned(Scenario::II, 100_000, 5);
    let ScenarioParams::SkewNormal { deltas, .. } = &spec.params else {
        panic!("scenario II is skew-normal");
    };
    let deltas = deltas.clone();
    let (data, _) = generate_scenario(&spec).unwrap();
    for g in 0..2 {
        let block = data.values().rows(g * 100_000, 100_000).into_owned();
        let (m, c) = sample_moments(&block);
        for j in 0..2 {
            let third = block.column(j).iter().map(|x| (x - m[j]).powi(3)).sum::<f64>() / 100_000.0;
            let skew = third / c[(j, j)].powf(1.5);
            assert_eq!(skew.signum(), deltas[g][j].signum(), "comp {g} dim {j}: {skew}");
        }
    }
}

#[test]
fn scenarios_are_reproducible_and_seed_dependent() {
    let a = generate_scenario(&ScenarioSpec::pinned(Scenario::I, 50, 1)).unwrap();
    let b = generate_scenario(&ScenarioSpec::pinned(Scenario::I, 50, 1)).unwrap();
    let c = generate_scenario(&ScenarioSpec::pinned(Scenario::I, 50, 2)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.0, c.0);
}
