//! Steepest-ascent search for a maximally informative ensemble.
//!
//! The ensemble is held as weight-carrying pure states `|psi_i>` with
//! `sum_i |psi_i|^2 = 1`. For each state the gradient operator
//!
//! ```text
//! G_i = sum_j log2( <psi_i|P_j|psi_i> / (|psi_i|^2 q_j) ) P_j,   q_j = sum_k <psi_k|P_j|psi_k>
//! ```
//!
//! satisfies `I = sum_i <psi_i|G_i|psi_i>`, and stationary ensembles obey
//! `G_i |psi_i> = I |psi_i>` for every `i`. One ascent step maps
//! `|psi_i> -> [(1 - a) 1 + a G_i] |psi_i>` and renormalizes the total weight.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::info::{joint_weights, pure_mutual_information};
use crate::linalg::{self, CMatrix, CVector};
use crate::quantum::{random_pure_ensemble_with, Ensemble, Povm, PureEnsemble};

/// Conditional probabilities at or below this are left out of `G_i`.
///
/// PSD-ness of `P_j` forces `P_j |psi_i> ~ 0` whenever `<psi_i|P_j|psi_i>`
/// vanishes, so the divergent log multiplies a null vector.
pub const ZERO_TERM_TOL: f64 = 1e-14;

/// States lighter than this are removed between iterations.
pub const PRUNE_WEIGHT: f64 = 1e-12;

/// Slack below which a decrease of `I` is treated as round-off, not overshoot.
const ASCENT_SLACK: f64 = 1e-14;

/// Step sizes below this end a restart.
const MIN_ALPHA: f64 = 1e-12;

/// A state whose conditional probability for an outcome falls to this is projected off that outcome's support.
const SNAP_TOL: f64 = 1e-10;

/// Largest drop in `I` a snap may cause; near a boundary optimum the drop is second order.
const SNAP_LOSS: f64 = 1e-6;

/// Relative eigenvalue cutoff for the support of a POVM element.
const SUPPORT_TOL: f64 = 1e-12;

/// Consecutive steps with gain below `tol_mi` and no residual progress that end a restart.
const STALL_ITERS: usize = 50;

/// A residual counts as progress once it drops below this fraction of the best so far.
const STALL_FACTOR: f64 = 0.95;

/// Results from [`maximize_informational_power`] within this many bits count as ties.
const TIE_TOL: f64 = 1e-9;

/// The per-state gradient operators of an ensemble and their action on it.
#[derive(Debug, Clone)]
pub struct GradientOperators {
    pub operators: Vec<CMatrix>,
    /// `G_i |psi_i>`.
    pub images: Vec<CVector>,
    /// `sum_i <psi_i|G_i|psi_i>`, which equals the mutual information.
    pub mutual_information: f64,
}

fn check_normalized(ensemble: &PureEnsemble) -> Result<()> {
    let total = ensemble.total_weight();
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::PriorsNotNormalized { sum: total });
    }
    Ok(())
}

/// Gradient operators of a normalized weight-carrying ensemble.
pub fn gradient_operators(ensemble: &PureEnsemble, povm: &Povm) -> Result<GradientOperators> {
    check_normalized(ensemble)?;
    let a = joint_weights(ensemble, povm)?;
    let outputs: Vec<f64> = a.column_iter().map(|col| col.sum()).collect();
    let dim = povm.dim();
    let mut operators = Vec::with_capacity(ensemble.len());
    let mut images = Vec::with_capacity(ensemble.len());
    let mut total = 0.0;
    for (i, psi) in ensemble.vectors().iter().enumerate() {
        let weight = psi.norm_squared();
        if weight == 0.0 {
            return Err(Error::ZeroWeightState { index: i });
        }
        let mut op = CMatrix::zeros(dim, dim);
        for (j, element) in povm.elements().iter().enumerate() {
            let aij = a[(i, j)];
            if aij <= ZERO_TERM_TOL * weight {
                continue;
            }
            op += element.scale((aij / (weight * outputs[j])).log2());
        }
        let image = &op * psi;
        total += psi.dotc(&image).re;
        operators.push(op);
        images.push(image);
    }
    Ok(GradientOperators { operators, images, mutual_information: total })
}

/// Stationarity and corollary diagnostics of one ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub mutual_information: f64,
    /// `max_i |G_i psi_i - I psi_i| / |psi_i|`.
    pub stationarity_residual: f64,
    /// `|I - sqrt(sum_i <psi_i|G_i^2|psi_i>)|`.
    pub corollary_gap: f64,
}

impl GradientOperators {
    pub fn diagnostics(&self, ensemble: &PureEnsemble) -> Diagnostics {
        let mi = self.mutual_information;
        let mut residual: f64 = 0.0;
        let mut second_moment = 0.0;
        for (psi, image) in ensemble.vectors().iter().zip(&self.images) {
            let deviation = (image - psi.scale(mi)).norm() / psi.norm();
            residual = residual.max(deviation);
            second_moment += image.norm_squared();
        }
        Diagnostics {
            mutual_information: mi,
            stationarity_residual: residual,
            corollary_gap: (mi - second_moment.sqrt()).abs(),
        }
    }
}

pub fn diagnostics(ensemble: &PureEnsemble, povm: &Povm) -> Result<Diagnostics> {
    Ok(gradient_operators(ensemble, povm)?.diagnostics(ensemble))
}

/// Largest per-state violation of the eigenvalue condition `G_i psi_i = I psi_i`.
pub fn stationarity_residual(ensemble: &PureEnsemble, povm: &Povm) -> Result<f64> {
    Ok(diagnostics(ensemble, povm)?.stationarity_residual)
}

/// Distance between `I` and `sqrt(sum_i <psi_i|G_i^2|psi_i>)`.
pub fn corollary_gap(ensemble: &PureEnsemble, povm: &Povm) -> Result<f64> {
    Ok(diagnostics(ensemble, povm)?.corollary_gap)
}

fn step_from(ensemble: &PureEnsemble, grad: &GradientOperators, alpha: f64) -> Result<PureEnsemble> {
    let moved: Vec<CVector> = ensemble
        .vectors()
        .iter()
        .zip(&grad.images)
        .map(|(psi, image)| psi.scale(1.0 - alpha) + image.scale(alpha))
        .collect();
    let total: f64 = moved.iter().map(|v| v.norm_squared()).sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::DegenerateUpdate);
    }
    let scale = total.sqrt().recip();
    let moved = moved
        .into_iter()
        .filter(|v| v.norm_squared() > 0.0)
        .map(|v| v.scale(scale))
        .collect();
    PureEnsemble::from_raw(moved)
}

/// One ascent step with step size `alpha` in `(0, 1]`.
pub fn ascent_step(ensemble: &PureEnsemble, povm: &Povm, alpha: f64) -> Result<PureEnsemble> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidArguments(format!("step size must lie in (0, 1], got {alpha}")));
    }
    let grad = gradient_operators(ensemble, povm)?;
    step_from(ensemble, &grad, alpha)
}

/// Replaces each mixed member by the weighted eigenvectors of its state.
///
/// The refinement never lowers mutual information with any measurement.
pub fn refine_mixed_ensemble(ensemble: &Ensemble) -> Result<PureEnsemble> {
    let mut vectors = Vec::new();
    for (p, rho) in ensemble.iter() {
        let (values, basis) = linalg::hermitian_eigen(rho.matrix());
        for (k, &lambda) in values.iter().enumerate() {
            let weight = p * lambda;
            if weight > 1e-15 {
                vectors.push(basis.column(k).scale(weight.sqrt()));
            }
        }
    }
    let refined = PureEnsemble::from_raw(vectors)?;
    let norm = refined.total_weight().sqrt();
    PureEnsemble::from_raw(refined.into_vectors().into_iter().map(|v| v.unscale(norm)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub alpha0: f64,
    pub alpha_shrink: f64,
    /// Stop once an accepted step gains less than this many bits.
    pub tol_mi: f64,
    pub tol_stationarity: f64,
    pub max_iters: usize,
    pub restarts: usize,
    pub seed: u64,
    pub ensemble_size_override: Option<usize>,
    /// Start from real vectors and use `D(D+1)/2` states.
    pub real_hint: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            alpha0: 0.2,
            alpha_shrink: 0.5,
            tol_mi: 1e-10,
            tol_stationarity: 1e-7,
            max_iters: 5000,
            restarts: 8,
            seed: 0,
            ensemble_size_override: None,
            real_hint: false,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArguments(msg));
        if !(self.alpha0 > 0.0 && self.alpha0 <= 1.0) {
            return bad(format!("alpha0 must lie in (0, 1], got {}", self.alpha0));
        }
        if !(self.alpha_shrink > 0.0 && self.alpha_shrink < 1.0) {
            return bad(format!("alpha_shrink must lie in (0, 1), got {}", self.alpha_shrink));
        }
        if !(self.tol_mi > 0.0 && self.tol_stationarity > 0.0) {
            return bad("tolerances must be positive".into());
        }
        if self.restarts == 0 || self.max_iters == 0 {
            return bad("restarts and max_iters must be at least 1".into());
        }
        if self.ensemble_size_override == Some(0) {
            return bad("ensemble size must be at least 1".into());
        }
        Ok(())
    }

    /// Number of states used for a `dim`-dimensional measurement.
    pub fn ensemble_size(&self, dim: usize) -> usize {
        match self.ensemble_size_override {
            Some(m) => m,
            None if self.real_hint => dim * (dim + 1) / 2,
            None => dim * dim,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub iteration: usize,
    pub mutual_information: f64,
    /// Step size used to leave this iterate (the current size at the final one).
    pub alpha: f64,
    pub residual: f64,
    /// States removed after this iteration for falling below [`PRUNE_WEIGHT`].
    pub pruned: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Stationary,
    SmallImprovement,
    StepSizeExhausted,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartSummary {
    pub restart: usize,
    pub mutual_information: f64,
    pub iterations: usize,
    pub residual: f64,
    pub stop: StopReason,
}

#[derive(Debug, Clone)]
pub struct OptimizationReport {
    /// Estimate of the informational power in bits.
    pub power_estimate: f64,
    pub ensemble: PureEnsemble,
    pub iterations_used: usize,
    /// Iterates of the best restart.
    pub trace: Vec<TraceEntry>,
    pub restart_index_of_best: usize,
    pub stationarity_residual: f64,
    pub corollary_gap: f64,
    pub stop: StopReason,
    /// Whether the stationarity residual and corollary gap fell below `tol_stationarity`.
    pub converged: bool,
    pub restarts: Vec<RestartSummary>,
}

struct RestartOutcome {
    ensemble: PureEnsemble,
    trace: Vec<TraceEntry>,
    diagnostics: Diagnostics,
    power: f64,
    stop: StopReason,
}

fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

fn prune(ensemble: PureEnsemble) -> Result<(PureEnsemble, usize)> {
    let before = ensemble.len();
    let kept: Vec<CVector> = ensemble
        .into_vectors()
        .into_iter()
        .filter(|v| v.norm_squared() >= PRUNE_WEIGHT)
        .collect();
    let removed = before - kept.len();
    if removed == 0 {
        return Ok((PureEnsemble::from_raw(kept)?, 0));
    }
    let norm: f64 = kept.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt();
    let kept = kept.into_iter().map(|v| v.unscale(norm)).collect();
    Ok((PureEnsemble::from_raw(kept)?, removed))
}

/// Mutual information with every nonzero joint probability kept.
///
/// Unlike the reported value, this has no cutoff, so tiny terms crossing a
/// threshold cannot masquerade as an overshoot.
fn objective(ensemble: &PureEnsemble, povm: &Povm) -> Result<f64> {
    let a = joint_weights(ensemble, povm)?;
    let weights: Vec<f64> = a.row_iter().map(|row| row.sum()).collect();
    let outputs: Vec<f64> = a.column_iter().map(|col| col.sum()).collect();
    let total: f64 = weights.iter().sum();
    // compensated summation keeps late-stage gains above round-off
    let (mut sum, mut carry) = (0.0_f64, 0.0_f64);
    for (i, row) in a.row_iter().enumerate() {
        for (j, &aij) in row.iter().enumerate() {
            if aij > 0.0 {
                let term = aij * (aij * total / (weights[i] * outputs[j])).log2();
                let t = sum + term;
                carry += if sum.abs() >= term.abs() { (sum - t) + term } else { (term - t) + sum };
                sum = t;
            }
        }
    }
    Ok((sum + carry) / total)
}

/// Projectors onto the supports of the POVM elements.
fn support_projectors(povm: &Povm) -> Vec<CMatrix> {
    povm.elements()
        .iter()
        .map(|element| {
            let (values, basis) = linalg::hermitian_eigen(element);
            let cutoff = SUPPORT_TOL * values.iter().fold(1.0_f64, |m, v| m.max(*v));
            let mut proj = CMatrix::zeros(povm.dim(), povm.dim());
            for (k, &v) in values.iter().enumerate() {
                if v > cutoff {
                    let col = basis.column(k).into_owned();
                    proj += linalg::projector(&col);
                }
            }
            proj
        })
        .collect()
}

/// Removes from each state its component in the support of any element it almost never triggers.
fn snap_to_kernels(ensemble: &PureEnsemble, povm: &Povm, supports: &[CMatrix]) -> Result<Option<PureEnsemble>> {
    let a = joint_weights(ensemble, povm)?;
    let mut changed = false;
    let mut vectors = Vec::with_capacity(ensemble.len());
    for (i, psi) in ensemble.vectors().iter().enumerate() {
        let weight = psi.norm_squared();
        let mut v = psi.clone();
        for (j, proj) in supports.iter().enumerate() {
            if a[(i, j)] > 0.0 && a[(i, j)] <= SNAP_TOL * weight {
                v -= proj * &v;
                changed = true;
            }
        }
        vectors.push(v);
    }
    if !changed {
        return Ok(None);
    }
    let norm: f64 = vectors.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Ok(None);
    }
    Ok(Some(PureEnsemble::from_raw(vectors.into_iter().map(|v| v.unscale(norm)).collect())?))
}

/// Runs ascent steps from `start` until one of the stopping rules fires.
pub fn ascend(start: PureEnsemble, povm: &Povm, cfg: &OptimizerConfig) -> Result<(PureEnsemble, Vec<TraceEntry>, StopReason)> {
    let outcome = run_ascent(start, povm, cfg)?;
    Ok((outcome.ensemble, outcome.trace, outcome.stop))
}

fn run_ascent(start: PureEnsemble, povm: &Povm, cfg: &OptimizerConfig) -> Result<RestartOutcome> {
    let supports = support_projectors(povm);
    let mut ensemble = start;
    let mut alpha = cfg.alpha0;
    let mut grad = gradient_operators(&ensemble, povm)?;
    let mut current = objective(&ensemble, povm)?;
    let mut best_residual = f64::INFINITY;
    let mut stalled = 0;
    let mut trace = Vec::new();
    let mut iteration = 0;
    let stop = loop {
        let diag = grad.diagnostics(&ensemble);
        let entry = |alpha, pruned| TraceEntry {
            iteration,
            mutual_information: current,
            alpha,
            residual: diag.stationarity_residual,
            pruned,
        };
        if diag.stationarity_residual < cfg.tol_stationarity {
            trace.push(entry(alpha, 0));
            break StopReason::Stationary;
        }
        if stalled >= STALL_ITERS {
            trace.push(entry(alpha, 0));
            break StopReason::SmallImprovement;
        }
        if iteration >= cfg.max_iters {
            trace.push(entry(alpha, 0));
            break StopReason::MaxIterations;
        }
        // shrink the step until it does not overshoot
        let accepted = loop {
            match step_from(&ensemble, &grad, alpha) {
                Ok(candidate) => {
                    let value = objective(&candidate, povm)?;
                    if value >= current - ASCENT_SLACK {
                        break Some((candidate, value));
                    }
                }
                Err(Error::DegenerateUpdate) => {}
                Err(e) => return Err(e),
            }
            alpha *= cfg.alpha_shrink;
            if alpha < MIN_ALPHA {
                break None;
            }
        };
        let Some((mut candidate, mut value)) = accepted else {
            trace.push(entry(alpha, 0));
            break StopReason::StepSizeExhausted;
        };
        // keep shrinking while a shorter step gains more
        while alpha * cfg.alpha_shrink >= MIN_ALPHA {
            let shorter = match step_from(&ensemble, &grad, alpha * cfg.alpha_shrink) {
                Ok(v) => v,
                Err(Error::DegenerateUpdate) => break,
                Err(e) => return Err(e),
            };
            let shorter_value = objective(&shorter, povm)?;
            if shorter_value <= value {
                break;
            }
            alpha *= cfg.alpha_shrink;
            candidate = shorter;
            value = shorter_value;
        }
        if let Some(snapped) = snap_to_kernels(&candidate, povm, &supports)? {
            let snapped_value = objective(&snapped, povm)?;
            if snapped_value >= value - SNAP_LOSS {
                candidate = snapped;
                value = snapped_value;
            }
        }
        let (candidate, pruned) = prune(candidate)?;
        trace.push(entry(alpha, pruned));
        ensemble = candidate;
        grad = gradient_operators(&ensemble, povm)?;
        iteration += 1;
        let gain = value - current;
        current = if pruned > 0 { objective(&ensemble, povm)? } else { value };
        let residual = grad.diagnostics(&ensemble).stationarity_residual;
        if residual < STALL_FACTOR * best_residual {
            best_residual = residual;
            stalled = 0;
        } else if gain < cfg.tol_mi && pruned == 0 {
            stalled += 1;
        } else {
            stalled = 0;
        }
    };
    let diagnostics = grad.diagnostics(&ensemble);
    let power = pure_mutual_information(&ensemble, povm)?;
    Ok(RestartOutcome { ensemble, trace, diagnostics, power, stop })
}

/// Estimates the informational power of `povm`: the largest mutual
/// information over all input ensembles.
///
/// Each restart starts from independent random states and the best final
/// value wins, ties going to the smaller stationarity residual. A report
/// that did not reach `tol_stationarity` is returned with `converged` unset.
pub fn maximize_informational_power(povm: &Povm, cfg: &OptimizerConfig) -> Result<OptimizationReport> {
    cfg.validate()?;
    let dim = povm.dim();
    if dim < 2 {
        return Err(Error::InvalidArguments("measurement dimension must be at least 2".into()));
    }
    let count = cfg.ensemble_size(dim);
    let outcomes = (0..cfg.restarts)
        .into_par_iter()
        .map(|restart| {
            let mut rng = restart_rng(cfg.seed, restart);
            let start = random_pure_ensemble_with(dim, count, cfg.real_hint, &mut rng)?;
            run_ascent(start, povm, cfg)
        })
        .collect::<Result<Vec<_>>>()?;

    let summaries: Vec<RestartSummary> = outcomes
        .iter()
        .enumerate()
        .map(|(restart, o)| RestartSummary {
            restart,
            mutual_information: o.power,
            iterations: o.trace.last().map_or(0, |t| t.iteration),
            residual: o.diagnostics.stationarity_residual,
            stop: o.stop,
        })
        .collect();
    let mut best = 0;
    for (k, o) in outcomes.iter().enumerate().skip(1) {
        let b = &outcomes[best];
        let better = o.power > b.power + TIE_TOL
            || ((o.power - b.power).abs() <= TIE_TOL
                && o.diagnostics.stationarity_residual < b.diagnostics.stationarity_residual);
        if better {
            best = k;
        }
    }
    let winner = outcomes.into_iter().nth(best).expect("at least one restart");
    Ok(OptimizationReport {
        power_estimate: winner.power,
        iterations_used: winner.trace.last().map_or(0, |t| t.iteration),
        ensemble: winner.ensemble,
        trace: winner.trace,
        restart_index_of_best: best,
        stationarity_residual: winner.diagnostics.stationarity_residual,
        corollary_gap: winner.diagnostics.corollary_gap,
        stop: winner.stop,
        converged: winner.diagnostics.stationarity_residual < cfg.tol_stationarity
            && winner.diagnostics.corollary_gap < cfg.tol_stationarity,
        restarts: summaries,
    })
}

/// A fresh random starting ensemble drawn the way [`maximize_informational_power`] does.
pub fn starting_ensemble(dim: usize, cfg: &OptimizerConfig, restart: usize) -> Result<PureEnsemble> {
    let mut rng = restart_rng(cfg.seed, restart);
    random_pure_ensemble_with(dim, cfg.ensemble_size(dim), cfg.real_hint, &mut rng)
}
