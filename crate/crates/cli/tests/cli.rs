//! End-to-end runs of the `mssal` binary.

use mssal::data::{read_csv, read_labels};
use mssal::distributions::mixture_log_density;
use mssal::{ComponentParams, MixtureModel};
use mssal_cli::commands::density_grid;
use mssal_cli::{FitMetadata, ModelFile};
use nalgebra::{dmatrix, dvector, DMatrix, DVector};
use std::path::Path;
use std::process::{Command, Output};

fn mssal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mssal")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = mssal(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// Runs a failing command and returns its exit code and the diagnostic.
fn fails(args: &[&str]) -> (i32, String) {
    let out = mssal(args);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(!out.status.success(), "{args:?} unexpectedly succeeded");
    assert_eq!(err.trim_end().lines().count(), 1, "diagnostic is one line: {err:?}");
    (out.status.code().unwrap(), err)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn simulate(dir: &Path, scenario: &str, n: usize, seed: u64) -> (String, String) {
    let data = dir.join(format!("{scenario}_{seed}.csv"));
    let labels = dir.join(format!("{scenario}_{seed}_labels.csv"));
    ok(&[
        "simulate",
        "--scenario",
        scenario,
        "--n-per-comp",
        &n.to_string(),
        "--seed",
        &seed.to_string(),
        "--out-data",
        s(&data),
        "--out-labels",
        s(&labels),
    ]);
    (s(&data).to_owned(), s(&labels).to_owned())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    s(&path).to_owned()
}

#[test]
fn simulate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, la) = simulate(dir.path(), "III", 250, 7);
    let other = tempfile::tempdir().unwrap();
    let (b, lb) = simulate(other.path(), "III", 250, 7);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(std::fs::read(&la).unwrap(), std::fs::read(&lb).unwrap());
    let data = read_csv(&a, true).unwrap();
    assert_eq!((data.n_rows(), data.n_cols()), (500, 2));
    assert_eq!(read_labels(&la).unwrap().len(), 500);
}

#[test]
fn bad_scenario_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = mssal(&[
        "simulate", "--scenario", "IV", "--out-data", s(&dir.path().join("d")), "--out-labels", s(&dir.path().join("l")),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fit_writes_model_and_labels_reproducibly() {
    let dir = tempfile::tempdir().unwrap();
    let (data, truth) = simulate(dir.path(), "III", 40, 3);
    let run = |tag: &str| {
        let model = dir.path().join(format!("m{tag}.json"));
        let labels = dir.path().join(format!("l{tag}.csv"));
        let stdout = ok(&[
            "fit", "--data", &data, "--g", "2", "--starts", "4", "--seed", "5", "--out", s(&model), "--labels-out",
            s(&labels),
        ]);
        assert!(stdout.contains("loglik=") && stdout.contains("BIC=") && stdout.contains("iterations="));
        (std::fs::read(&model).unwrap(), std::fs::read(&labels).unwrap(), model)
    };
    let (m1, l1, model_path) = run("1");
    let (m2, l2, _) = run("2");
    assert_eq!(m1, m2);
    assert_eq!(l1, l2);

    let file = ModelFile::load(&model_path).unwrap();
    assert_eq!((file.g, file.p, file.metadata.n, file.metadata.seed), (2, 2, 80, 5));
    assert!(file.metadata.converged);
    assert_eq!(file.to_json().as_bytes(), &m1[..]);

    let score = ok(&["score", "--truth", &truth, "--pred", s(&dir.path().join("l1.csv"))]);
    let ari: f64 = score
        .lines()
        .find_map(|l| l.strip_prefix("ARI: "))
        .and_then(|v| v.split_whitespace().next())
        .unwrap()
        .parse()
        .unwrap();
    assert!(ari > 0.9, "{score}");
}

#[test]
fn single_component_fit_labels_everything_one() {
    let dir = tempfile::tempdir().unwrap();
    let (data, _) = simulate(dir.path(), "I", 15, 1);
    let labels = dir.path().join("l.csv");
    ok(&[
        "fit", "--data", &data, "--g", "1", "--starts", "2", "--out", s(&dir.path().join("m.json")), "--labels-out",
        s(&labels),
    ]);
    assert!(read_labels(&labels).unwrap().iter().all(|&l| l == 1));
}

#[test]
fn unreadable_data_exits_two_and_names_the_path() {
    let (code, err) = fails(&["fit", "--data", "/no/such/file.csv", "--g", "2", "--out", "/tmp/unused.json"]);
    assert_eq!(code, 2);
    assert!(err.contains("/no/such/file.csv"), "{err}");
}

#[test]
fn select_with_one_g_prints_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let (data, _) = simulate(dir.path(), "I", 30, 2);
    let out = dir.path().join("sel.json");
    let stdout = ok(&[
        "select", "--data", &data, "--g-min", "1", "--g-max", "1", "--starts", "2", "--out", s(&out),
    ]);
    let rows = stdout.lines().filter(|l| l.trim_start().starts_with(|c: char| c.is_ascii_digit())).count();
    assert_eq!(rows, 1, "{stdout}");
    let file = ModelFile::load(&out).unwrap();
    assert_eq!(file.selection.as_ref().unwrap().len(), 1);
    assert_eq!(file.g, 1);

    let (code, _) = fails(&["select", "--data", &data, "--g-min", "3", "--g-max", "2", "--out", s(&out)]);
    assert_eq!(code, 2);
}

#[test]
fn score_reports_rand_ari_and_table() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.csv", "label\n1\n1\n2\n2\n");
    let b = write(dir.path(), "b.csv", "label\n1\n2\n1\n2\n");
    let same = ok(&["score", "--truth", &a, "--pred", &a]);
    assert!(same.contains("ARI: 1\n"), "{same}");
    let cross = ok(&["score", "--truth", &a, "--pred", &b]);
    assert!(cross.contains("ARI: -0.5\n"), "{cross}");
    assert!(cross.contains("truth\\pred"));
    let short = write(dir.path(), "c.csv", "label\n1\n2\n");
    let (code, err) = fails(&["score", "--truth", &a, "--pred", &short]);
    assert_ne!(code, 0);
    assert!(err.contains("4") && err.contains("2"));
}

fn rotated(beta: DVector<f64>) -> MixtureModel {
    let (sn, cs) = 0.4f64.sin_cos();
    let comp = ComponentParams::new(dvector![1.0, -0.5], beta, dmatrix![cs, -sn; sn, cs], dvector![1.2, 0.3]).unwrap();
    MixtureModel::single(comp)
}

#[test]
fn symmetric_model_grid_respects_axis_reflections() {
    let model = rotated(dvector![0.0, 0.0]);
    let comp = &model.components()[0];
    let d = comp.d_mat();
    let mu = comp.mu();
    let grid = density_grid(&model, (-4.0, 6.0), (-5.0, 4.0), 25).unwrap();
    for flip in [dvector![-1.0, 1.0], dvector![1.0, -1.0]] {
        let reflect = d * DMatrix::from_diagonal(&flip) * d.transpose();
        for [x, y, dens] in &grid {
            let r = mu + &reflect * (dvector![*x, *y] - mu);
            let other = mixture_log_density(&r, &model).unwrap().exp();
            assert!((other - dens).abs() < 1e-10);
        }
    }
}

#[test]
fn grid_integrates_to_one_on_a_wide_window() {
    let model = rotated(dvector![0.3, -0.4]);
    let n = 400;
    let grid = density_grid(&model, (-25.0, 27.0), (-27.0, 25.0), n).unwrap();
    let cell = (52.0 / n as f64).powi(2);
    let total: f64 = grid.iter().map(|r| r[2]).sum::<f64>() * cell;
    assert!((total - 1.0).abs() < 5e-3, "{total}");
}

#[test]
fn contour_command_writes_grid_and_rejects_other_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let meta = FitMetadata { loglik: 0.0, bic: 0.0, rho: 6, n: 1, n_iter: 0, seed: 0, converged: true };
    let model = dir.path().join("m.json");
    ModelFile::new(&rotated(dvector![0.0, 0.0]), meta.clone()).save(&model).unwrap();
    let out = dir.path().join("grid.csv");
    ok(&[
        "contour", "--model", s(&model), "--xmin", "-2", "--xmax", "4", "--ymin", "-3", "--ymax", "2", "--grid", "1",
        "--out", s(&out),
    ]);
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,y,density");
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("1,-0.5,"));

    let three = MixtureModel::single(ComponentParams::standard(dvector![0.0, 0.0, 0.0]));
    let model3 = dir.path().join("m3.json");
    ModelFile::new(&three, meta).save(&model3).unwrap();
    let (code, err) = fails(&[
        "contour", "--model", s(&model3), "--xmin", "0", "--xmax", "1", "--ymin", "0", "--ymax", "1", "--out", s(&out),
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("p=3"));

    let broken = write(dir.path(), "bad.json", "{\"schema_version\": 2}");
    let (code, err) = fails(&[
        "contour", "--model", &broken, "--xmin", "0", "--xmax", "1", "--ymin", "0", "--ymax", "1", "--out", s(&out),
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("schema_version"));
}

#[test]
fn pca_command() {
    let dir = tempfile::tempdir().unwrap();
    let one = write(dir.path(), "one.csv", "v\n1\n2\n6\n");
    let out = dir.path().join("pc.csv");
    ok(&["pca", "--data", &one, "--components", "1", "--out", s(&out)]);
    let scores = read_csv(&out, true).unwrap();
    assert_eq!(scores.values().as_slice(), &[-2.0, -1.0, 3.0]);

    let (code, _) = fails(&["pca", "--data", &one, "--components", "0", "--out", s(&out)]);
    assert_eq!(code, 2);
    let (code, _) = fails(&["pca", "--data", &one, "--components", "2", "--out", s(&out)]);
    assert_eq!(code, 2);

    let crabs = mssal::data::Fixture::Crabs.data_path();
    ok(&["pca", "--data", s(&crabs), "--components", "1,3", "--out", s(&out)]);
    let scores = read_csv(&out, true).unwrap();
    assert_eq!((scores.n_rows(), scores.n_cols()), (200, 2));
    assert_eq!(scores.column_names(), ["PC1", "PC3"]);
}

#[test]
fn bench_command_writes_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let stdout = ok(&["bench", "--dims", "2,3", "--g", "1,2", "--iters", "1", "--reps", "1", "--out", s(&out)]);
    assert_eq!(stdout.lines().count(), 5);
    let table = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "p,G,iterations,seconds,seconds_per_iteration");
    assert_eq!(lines.len(), 5);
    assert!(lines[1..].iter().all(|l| l.split(',').nth(2) == Some("1")));
}
