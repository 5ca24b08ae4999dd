use super::aitken::aitken_converged;
use super::config::FitConfig;
use super::estep::{e_step_obs, LatentExpectations};
use super::mstep::{update_a, update_mu_beta, update_pi, ComponentMoments};
use super::rotation::{mm_rotation_update, normalize_signs, RotationProblem};
use crate::data::DataMatrix;
use crate::distributions::{ComponentParams, MixtureModel};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;

const ASCENT_TOL: f64 = 1e-8;

/// Numerical events recorded while fitting a start.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FitDiagnostics {
    /// Index of the start that produced the result.
    pub start: usize,
    /// Starts that were abandoned (emptied component, non-finite density).
    pub failed_starts: usize,
    /// M-steps that needed a ridge in the `mu`/`beta` systems.
    pub ridge_events: usize,
    pub svd_failures: usize,
    /// MM iterations where the rotation objective went up.
    pub mm_ascents: usize,
    /// Iterations redone with unfloored latent moments to keep the
    /// log-likelihood from dropping.
    pub exact_retries: usize,
    /// EM iterations where the log-likelihood dropped by more than `1e-8`.
    pub loglik_decreases: usize,
}

/// Outcome of [`fit_em`].
#[derive(Debug, Clone)]
pub struct FitResult {
    pub model: MixtureModel,
    /// Log-likelihood at the start of every iteration and at the returned
    /// model (last entry).
    pub loglik_trace: Vec<f64>,
    /// MAP labels, `1..=G`.
    pub map_labels: Vec<usize>,
    /// The Aitken criterion was met and no eigenvalue was floored.
    pub converged: bool,
    /// Number of completed EM iterations.
    pub n_iter: usize,
    /// How often `b` was raised to its floor over all E-steps.
    pub clamp_count: usize,
    /// Some eigenvalue hit the floor; the fit is unusable.
    pub degenerate: bool,
    /// Responsibilities at the returned model, `n x G`.
    pub zhat: DMatrix<f64>,
    pub diagnostics: FitDiagnostics,
}

impl FitResult {
    pub fn loglik(&self) -> f64 {
        *self.loglik_trace.last().expect("trace is never empty")
    }

    pub fn n_components(&self) -> usize {
        self.model.n_components()
    }
}

/// `argmax_g zhat_ig` as 1-based labels; ties go to the lowest index.
pub fn map_classify(zhat: &DMatrix<f64>) -> Vec<usize> {
    zhat.row_iter()
        .map(|row| {
            let mut best = 0;
            for (g, &v) in row.iter().enumerate() {
                if v > row[best] {
                    best = g;
                }
            }
            best + 1
        })
        .collect()
}

/// Fits a `G`-component MSSAL mixture from `cfg.n_starts` random
/// partitions and returns the best start.
///
/// Starts are ranked by: not degenerate, converged, then final
/// log-likelihood. Start `s` draws its partition from seed `cfg.seed + s`.
pub fn fit_em(data: &DataMatrix, g: usize, cfg: &FitConfig) -> Result<FitResult> {
    cfg.validate()?;
    check_size(data, g)?;
    let obs = data.observations();
    let n = data.n_rows();
    let outcomes: Vec<Result<FitResult>> = (0..cfg.n_starts)
        .into_par_iter()
        .map(|s| {
            let mut rng = crate::rng_from_seed(cfg.seed.wrapping_add(s as u64));
            let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..g)).collect();
            run_start(&obs, &labels, g, cfg).map(|mut r| {
                r.diagnostics.start = s;
                r
            })
        })
        .collect();
    pick_best(outcomes, g)
}

/// Fits from a fixed initial partition (1-based labels). `G` is the
/// largest label.
pub fn fit_from_labels(data: &DataMatrix, labels: &[usize], cfg: &FitConfig) -> Result<FitResult> {
    cfg.validate()?;
    if labels.len() != data.n_rows() {
        return Err(Error::LengthMismatch {
            left: labels.len(),
            right: data.n_rows(),
        });
    }
    if labels.iter().any(|&l| l == 0) {
        return Err(Error::InvalidArgument("initial labels are 1-based".into()));
    }
    let g = labels.iter().copied().max().unwrap_or(0);
    check_size(data, g)?;
    let zero_based: Vec<usize> = labels.iter().map(|l| l - 1).collect();
    run_start(&data.observations(), &zero_based, g, cfg)
}

fn check_size(data: &DataMatrix, g: usize) -> Result<()> {
    if g == 0 {
        return Err(Error::InvalidArgument("G must be at least 1".into()));
    }
    if data.n_rows() <= g {
        return Err(Error::InvalidArgument(format!(
            "need more observations than components (n = {}, G = {g})",
            data.n_rows()
        )));
    }
    Ok(())
}

fn pick_best(outcomes: Vec<Result<FitResult>>, g: usize) -> Result<FitResult> {
    let starts = outcomes.len();
    let mut failed = 0;
    let mut last_err = String::new();
    let mut best: Option<FitResult> = None;
    for out in outcomes {
        match out {
            Ok(r) => {
                let better = match &best {
                    None => true,
                    Some(b) => rank(&r) > rank(b),
                };
                if better {
                    best = Some(r);
                }
            }
            Err(e) => {
                failed += 1;
                last_err = e.to_string();
            }
        }
    }
    match best {
        Some(mut r) => {
            r.diagnostics.failed_starts = failed;
            Ok(r)
        }
        None => Err(Error::AllStartsFailed {
            g,
            starts,
            reason: last_err,
        }),
    }
}

fn rank(r: &FitResult) -> (bool, bool, f64) {
    (!r.degenerate, r.converged, r.loglik())
}

/// Eigenvalues below this fraction of the average data variance are
/// raised at initialisation and mark a fit degenerate afterwards.
const RELATIVE_A_FLOOR: f64 = 1e-6;

/// `RELATIVE_A_FLOOR` times the average variance of the data.
fn eigenvalue_floor(obs: &DMatrix<f64>) -> Result<f64> {
    let (p, n) = obs.shape();
    let scale = covariance(obs, &vec![true; n]).0.trace() / p as f64;
    if !(scale > 0.0) {
        return Err(Error::StartFailed("data have zero variance".into()));
    }
    Ok(RELATIVE_A_FLOOR * scale)
}

/// Component parameters from a hard partition: sample mean, zero skewness
/// and the eigen-decomposition of the sample covariance.
fn initial_params(obs: &DMatrix<f64>, labels: &[usize], g: usize, floor: f64) -> Result<Vec<ComponentParams>> {
    let p = obs.nrows();
    (0..g)
        .map(|k| {
            let members: Vec<bool> = labels.iter().map(|&l| l == k).collect();
            let (cov, mean, count) = covariance(obs, &members);
            if count == 0 {
                return Err(Error::StartFailed(format!("initial group {} is empty", k + 1)));
            }
            let eig = cov.symmetric_eigen();
            let mut d = eig.eigenvectors;
            normalize_signs(&mut d);
            let a = eig.eigenvalues.map(|v| v.max(floor));
            ComponentParams::new(mean, DVector::zeros(p), d, a)
        })
        .collect()
}

fn covariance(obs: &DMatrix<f64>, members: &[bool]) -> (DMatrix<f64>, DVector<f64>, usize) {
    let p = obs.nrows();
    let count = members.iter().filter(|&&m| m).count();
    let mut mean = DVector::zeros(p);
    let mut cov = DMatrix::zeros(p, p);
    if count == 0 {
        return (cov, mean, 0);
    }
    for (col, _) in obs.column_iter().zip(members).filter(|(_, &m)| m) {
        mean += col;
    }
    mean /= count as f64;
    for (col, _) in obs.column_iter().zip(members).filter(|(_, &m)| m) {
        let r = col - &mean;
        cov += &r * r.transpose();
    }
    cov /= count as f64;
    (cov, mean, count)
}

struct MStepEvents {
    ridged: usize,
    svd_failures: usize,
    mm_ascents: usize,
    floored: bool,
}

fn m_step(
    obs: &DMatrix<f64>,
    ex: &LatentExpectations,
    prev: &MixtureModel,
    cfg: &FitConfig,
    a_floor: f64,
) -> Result<(MixtureModel, MStepEvents)> {
    let (p, n) = obs.shape();
    let weights = update_pi(ex, cfg.min_weight_for(n, p))?;
    let mut events = MStepEvents {
        ridged: 0,
        svd_failures: 0,
        mm_ascents: 0,
        floored: false,
    };
    let mut components = Vec::with_capacity(prev.n_components());
    for (g, old) in prev.components().iter().enumerate() {
        let z: Vec<f64> = ex.zhat.column(g).iter().copied().collect();
        let moments = ComponentMoments {
            obs,
            z: &z,
            e1: &ex.e1[g],
            e2: &ex.e2[g],
        };
        let mb = update_mu_beta(&moments, old);
        events.ridged += usize::from(mb.ridged);
        let problem = RotationProblem::new(&moments, &mb.mu, &mb.beta, old.a_diag());
        let rot = mm_rotation_update(&problem, old.d_mat(), cfg.mm_max_iter, cfg.mm_tol);
        events.svd_failures += usize::from(rot.svd_failed);
        events.mm_ascents += usize::from(rot.ascent);
        let au = update_a(&moments, &rot.d, &mb.mu, &mb.beta, old.a_diag(), a_floor);
        events.floored |= au.floored;
        components.push(ComponentParams::new(mb.mu, mb.beta, rot.d, au.a)?);
    }
    Ok((MixtureModel::new(weights, components)?, events))
}

fn run_start(obs: &DMatrix<f64>, labels: &[usize], g: usize, cfg: &FitConfig) -> Result<FitResult> {
    let p = obs.nrows();
    let a_floor = eigenvalue_floor(obs)?;
    let init = initial_params(obs, labels, g, a_floor)?;
    let pseudo = LatentExpectations::from_hard_labels(labels, g, p);
    let placeholder = MixtureModel::new(vec![1.0 / g as f64; g], init)?;
    let mut diagnostics = FitDiagnostics::default();

    let (mut model, events) = m_step(obs, &pseudo, &placeholder, cfg, a_floor)?;
    let mut degenerate = events.floored;
    absorb(&mut diagnostics, &events);

    let mut trace = Vec::new();
    let mut clamp_count = 0;
    let mut converged = false;
    let mut n_iter = 0;
    let (mut ex, ll) = e_step_obs(obs, &model, cfg.b_floor)?;
    clamp_count += ex.clamped;
    trace.push(ll);

    while !degenerate && n_iter < cfg.max_iter {
        let l_prev = trace[trace.len() - 1];
        let (mut next, mut events) = m_step(obs, &ex, &model, cfg, a_floor)?;
        let (mut next_ex, mut ll) = e_step_obs(obs, &next, cfg.b_floor)?;
        if ll < l_prev - ASCENT_TOL && ex.clamped > 0 {
            // The floor on b spoils the minorisation near observations that
            // sit on a principal axis of their component. Redo the step with
            // unfloored moments, which restores the ascent property.
            let (exact, _) = e_step_obs(obs, &model, f64::MIN_POSITIVE)?;
            let (retry, retry_events) = m_step(obs, &exact, &model, cfg, a_floor)?;
            let (retry_ex, retry_ll) = e_step_obs(obs, &retry, cfg.b_floor)?;
            if retry_ll > ll {
                diagnostics.exact_retries += 1;
                (next, events, next_ex, ll) = (retry, retry_events, retry_ex, retry_ll);
            }
        }
        absorb(&mut diagnostics, &events);
        degenerate |= events.floored;
        n_iter += 1;
        clamp_count += next_ex.clamped;
        if ll < l_prev - ASCENT_TOL {
            diagnostics.loglik_decreases += 1;
        }
        model = next;
        ex = next_ex;
        trace.push(ll);
        let k = trace.len();
        if cfg.check_convergence
            && k >= 3
            && aitken_converged(trace[k - 3], trace[k - 2], trace[k - 1], cfg.aitken_eps)
        {
            converged = true;
            break;
        }
    }

    Ok(FitResult {
        map_labels: map_classify(&ex.zhat),
        model,
        loglik_trace: trace,
        converged: converged && !degenerate,
        n_iter,
        clamp_count,
        degenerate,
        zhat: ex.zhat,
        diagnostics,
    })
}

fn absorb(diag: &mut FitDiagnostics, events: &MStepEvents) {
    diag.ridge_events += events.ridged;
    diag.svd_failures += events.svd_failures;
    diag.mm_ascents += events.mm_ascents;
}
