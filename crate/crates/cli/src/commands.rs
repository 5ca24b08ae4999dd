use crate::model_file::ModelFile;
use crate::CliError;
use clap::{Args, Parser, Subcommand};
use mssal::data::{
    generate_scenario, load_wine, pca_scores, read_csv, read_labels, synthetic_wide, write_csv, write_labels,
    write_rows, Fixture,
};
use mssal::em::fit_em;
use mssal::metrics::{adjusted_rand_index_detailed, cross_tab, rand_index};
use mssal::selection::select_model;
use mssal::{DataMatrix, FitConfig, Partition, Scenario, ScenarioSpec};
use nalgebra::DVector;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Debug, Parser)]
#[command(name = "mssal", version, about = "Clustering with mixtures of MSSAL distributions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a G-component mixture by EM.
    Fit(FitArgs),
    /// Fit a range of G and keep the model with the largest BIC.
    Select(SelectArgs),
    /// Generate one of the two-component simulation scenarios.
    Simulate(SimulateArgs),
    /// Compare two label files.
    Score(ScoreArgs),
    /// Evaluate a bivariate model's density on a grid.
    Contour(ContourArgs),
    /// Project data on principal components.
    Pca(PcaArgs),
    /// Time fixed-iteration EM over dimensions and component counts.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct EstimationArgs {
    /// Random starting partitions per fit.
    #[arg(long, default_value_t = 50)]
    pub starts: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub max_iter: usize,
    /// Aitken stopping threshold.
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
}

impl EstimationArgs {
    fn config(&self) -> Result<FitConfig, CliError> {
        let cfg = FitConfig {
            n_starts: self.starts,
            max_iter: self.max_iter,
            aitken_eps: self.eps,
            seed: self.seed,
            ..FitConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Number of components.
    #[arg(long)]
    pub g: usize,
    #[command(flatten)]
    pub estimation: EstimationArgs,
    /// Where to write the fitted model (JSON).
    #[arg(long)]
    pub out: PathBuf,
    /// Where to write the MAP labels (CSV, 1-based).
    #[arg(long)]
    pub labels_out: Option<PathBuf>,
    /// The data file has no header line.
    #[arg(long)]
    pub no_header: bool,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub g_min: usize,
    #[arg(long, default_value_t = 5)]
    pub g_max: usize,
    #[command(flatten)]
    pub estimation: EstimationArgs,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub labels_out: Option<PathBuf>,
    #[arg(long)]
    pub no_header: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// I, II or III.
    #[arg(long, value_parser = parse_scenario)]
    pub scenario: Scenario,
    #[arg(long, default_value_t = 100)]
    pub n_per_comp: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out_data: PathBuf,
    #[arg(long)]
    pub out_labels: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long)]
    pub pred: PathBuf,
}

#[derive(Debug, Args)]
pub struct ContourArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub xmin: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub xmax: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub ymin: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub ymax: f64,
    /// Cells per axis; densities are evaluated at cell centres.
    #[arg(long, default_value_t = 100)]
    pub grid: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PcaArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Comma-separated 1-based component indices.
    #[arg(long, default_value = "1,2")]
    pub components: String,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub no_header: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Data to time on. Defaults to the wine fixture, or a synthetic
    /// 178 x 27 matrix when that is absent.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, default_value = "5,10,15,20,25")]
    pub dims: String,
    #[arg(long, default_value = "1,2,3")]
    pub g: String,
    /// EM iterations per run.
    #[arg(long, default_value_t = 100)]
    pub iters: usize,
    /// Repetitions per cell; the fastest is reported.
    #[arg(long, default_value_t = 3)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_scenario(s: &str) -> Result<Scenario, String> {
    s.parse().map_err(|e: mssal::Error| e.to_string())
}

fn parse_list(s: &str, what: &str) -> Result<Vec<usize>, CliError> {
    let items: Result<Vec<usize>, _> = s.split(',').map(|t| t.trim().parse::<usize>()).collect();
    match items {
        Ok(v) if !v.is_empty() => Ok(v),
        _ => Err(CliError::Usage(format!(
            "{what} must be a comma-separated list of non-negative integers, got {s:?}"
        ))),
    }
}

fn emit(out: &mut dyn Write, text: std::fmt::Arguments<'_>) -> Result<(), CliError> {
    out.write_fmt(text)
        .and_then(|_| out.write_all(b"\n"))
        .map_err(|e| CliError::io(Path::new("<stdout>"), e))
}

macro_rules! say {
    ($out:expr, $($arg:tt)*) => {
        emit($out, format_args!($($arg)*))
    };
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Fit(a) => cmd_fit(&a, out),
        Command::Select(a) => cmd_select(&a, out),
        Command::Simulate(a) => cmd_simulate(&a, out),
        Command::Score(a) => cmd_score(&a, out),
        Command::Contour(a) => cmd_contour(&a, out),
        Command::Pca(a) => cmd_pca(&a, out),
        Command::Bench(a) => cmd_bench(&a, out),
    }
}

pub fn cmd_fit(args: &FitArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = args.estimation.config()?;
    let data = read_csv(&args.data, !args.no_header)?;
    let fit = fit_em(&data, args.g, &cfg)?;
    if !fit.converged {
        let why = if fit.degenerate { "collapsed to a degenerate solution" } else { "reached the iteration limit" };
        return Err(CliError::Fit(format!(
            "no start converged for G={} ({} starts); the best {} after {} iterations at log-likelihood {}",
            args.g, cfg.n_starts, why, fit.n_iter, fit.loglik()
        )));
    }
    let file = ModelFile::from_fit(&fit, data.n_rows(), cfg.seed);
    file.save(&args.out)?;
    if let Some(path) = &args.labels_out {
        write_labels(&fit.map_labels, path)?;
    }
    let m = &file.metadata;
    say!(out, "G={} loglik={} BIC={} rho={} iterations={} converged={}", args.g, m.loglik, m.bic, m.rho, m.n_iter, m.converged)
}

pub fn cmd_select(args: &SelectArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = args.estimation.config()?;
    let data = read_csv(&args.data, !args.no_header)?;
    let report = select_model(&data, args.g_min, args.g_max, &cfg)?;
    let file = ModelFile::from_selection(&report, cfg.seed);
    file.save(&args.out)?;
    if let Some(path) = &args.labels_out {
        write_labels(&report.chosen_fit().map_labels, path)?;
    }
    let fmt = |v: f64| if v.is_finite() { format!("{v:.4}") } else { "-".to_string() };
    say!(out, "{:>3}  {:>14}  {:>5}  {:>14}  {:>9}  note", "G", "loglik", "rho", "BIC", "converged")?;
    for r in &report.records {
        say!(
            out,
            "{:>3}  {:>14}  {:>5}  {:>14}  {:>9}  {}",
            r.g,
            fmt(r.loglik),
            r.rho,
            fmt(r.bic),
            r.converged,
            r.note.as_deref().unwrap_or("")
        )?;
    }
    say!(out, "chosen G={} BIC={}", report.chosen_g, report.chosen().bic)
}

pub fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = ScenarioSpec::pinned(args.scenario, args.n_per_comp, args.seed);
    let (data, labels) = generate_scenario(&spec)?;
    write_csv(&data, &args.out_data)?;
    write_labels(&labels, &args.out_labels)?;
    say!(out, "scenario {}: wrote {} rows", args.scenario, data.n_rows())
}

pub fn cmd_score(args: &ScoreArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let truth = Partition::new(read_labels(&args.truth)?)?;
    let pred = Partition::new(read_labels(&args.pred)?)?;
    let (ari, undefined) = adjusted_rand_index_detailed(&truth, &pred)?;
    say!(out, "Rand index: {}", rand_index(&truth, &pred)?)?;
    if undefined {
        say!(out, "ARI: {ari} (undefined: both partitions are trivial)")?;
    } else {
        say!(out, "ARI: {ari}")?;
    }
    write!(out, "{}", cross_tab(&truth, &pred)?).map_err(|e| CliError::io(Path::new("<stdout>"), e))
}

/// Cell-centre density grid, `x` varying slowest.
pub fn density_grid(
    model: &mssal::MixtureModel,
    (xmin, xmax): (f64, f64),
    (ymin, ymax): (f64, f64),
    grid: usize,
) -> Result<Vec<[f64; 3]>, CliError> {
    if model.dim() != 2 {
        return Err(CliError::Usage(format!(
            "contour output is only defined for bivariate models; this model has p={}",
            model.dim()
        )));
    }
    let bounds = [xmin, xmax, ymin, ymax];
    if bounds.iter().any(|v| !v.is_finite()) || !(xmin < xmax) || !(ymin < ymax) {
        return Err(CliError::Usage(format!(
            "need finite bounds with xmin < xmax and ymin < ymax, got x [{xmin}, {xmax}], y [{ymin}, {ymax}]"
        )));
    }
    if grid == 0 {
        return Err(CliError::Usage("grid must be at least 1".into()));
    }
    let hx = (xmax - xmin) / grid as f64;
    let hy = (ymax - ymin) / grid as f64;
    let mut rows = Vec::with_capacity(grid * grid);
    for i in 0..grid {
        let x = xmin + (i as f64 + 0.5) * hx;
        for j in 0..grid {
            let y = ymin + (j as f64 + 0.5) * hy;
            let ld = mssal::distributions::mixture_log_density(&DVector::from_vec(vec![x, y]), model)?;
            rows.push([x, y, ld.exp()]);
        }
    }
    Ok(rows)
}

pub fn cmd_contour(args: &ContourArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let model = ModelFile::load(&args.model)?.to_model()?;
    let grid = density_grid(&model, (args.xmin, args.xmax), (args.ymin, args.ymax), args.grid)?;
    let rows: Vec<Vec<String>> = grid.iter().map(|r| r.iter().map(f64::to_string).collect()).collect();
    write_rows(&args.out, &["x", "y", "density"], &rows)?;
    say!(out, "wrote {} grid points", rows.len())
}

pub fn cmd_pca(args: &PcaArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let components = parse_list(&args.components, "--components")?;
    let data = read_csv(&args.data, !args.no_header)?;
    let scores = pca_scores(&data, &components)?;
    write_csv(&scores, &args.out)?;
    say!(out, "wrote {} x {} scores", scores.n_rows(), scores.n_cols())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRow {
    pub p: usize,
    pub g: usize,
    pub iterations: usize,
    /// Fastest wall-clock time over the repetitions.
    pub seconds: f64,
}

impl TimingRow {
    pub fn seconds_per_iteration(&self) -> f64 {
        self.seconds / self.iterations.max(1) as f64
    }
}

/// Runs one EM start for exactly `iters` iterations on the first `p`
/// columns, for every `p` in `dims` and `G` in `gs`.
pub fn timing_sweep(
    data: &DataMatrix,
    dims: &[usize],
    gs: &[usize],
    iters: usize,
    reps: usize,
    seed: u64,
) -> Result<Vec<TimingRow>, CliError> {
    if reps == 0 {
        return Err(CliError::Usage("reps must be at least 1".into()));
    }
    let cfg = FitConfig {
        n_starts: 1,
        max_iter: iters,
        seed,
        check_convergence: false,
        ..FitConfig::default()
    };
    cfg.validate()?;
    let mut rows = Vec::new();
    for &p in dims {
        if p == 0 || p > data.n_cols() {
            return Err(CliError::Usage(format!(
                "dimension {p} requested but the data has {} columns",
                data.n_cols()
            )));
        }
        let cols: Vec<usize> = (0..p).collect();
        let sub = data.select_columns(&cols)?;
        for &g in gs {
            let mut best = f64::INFINITY;
            let mut iterations = 0;
            for _ in 0..reps {
                let start = Instant::now();
                let fit = fit_em(&sub, g, &cfg)?;
                best = best.min(start.elapsed().as_secs_f64());
                iterations = fit.n_iter;
            }
            rows.push(TimingRow {
                p,
                g,
                iterations,
                seconds: best,
            });
        }
    }
    Ok(rows)
}

pub fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let dims = parse_list(&args.dims, "--dims")?;
    let gs = parse_list(&args.g, "--g")?;
    let data = match &args.data {
        Some(path) => read_csv(path, true)?,
        None if Fixture::Wine.is_available() => load_wine()?,
        None => {
            eprintln!("note: wine fixture not found, timing on synthetic 178 x 27 data");
            synthetic_wide(178, 27, 1)?
        }
    };
    let rows = timing_sweep(&data, &dims, &gs, args.iters, args.reps, args.seed)?;
    say!(out, "{:>3}  {:>2}  {:>10}  {:>12}  {:>16}", "p", "G", "iterations", "seconds", "seconds/iter")?;
    for r in &rows {
        say!(
            out,
            "{:>3}  {:>2}  {:>10}  {:>12.6}  {:>16.8}",
            r.p,
            r.g,
            r.iterations,
            r.seconds,
            r.seconds_per_iteration()
        )?;
    }
    if let Some(path) = &args.out {
        let table: Vec<Vec<String>> = rows
            .iter()
            .map(|r| {
                vec![
                    r.p.to_string(),
                    r.g.to_string(),
                    r.iterations.to_string(),
                    r.seconds.to_string(),
                    r.seconds_per_iteration().to_string(),
                ]
            })
            .collect();
        write_rows(path, &["p", "G", "iterations", "seconds", "seconds_per_iteration"], &table)?;
    }
    Ok(())
}
