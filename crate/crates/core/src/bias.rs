//! The fold-based estimate of the minimum-CV-error bias, its standard
//! error, the adjusted test-error estimate, and the bootstrap oracle.
//!
//! The cheap estimate averages, over folds, the gap between fold k's curve
//! at the global minimizer and at its own minimizer:
//! `mean_k [e_k(theta_hat) - e_k(theta_hat_k)]`. Every term is nonnegative
//! by construction and everything needed was already computed during
//! cross-validation.
//!
//! The bootstrap route re-runs a full K-fold CV on each of B resamples and
//! averages `CV_b(theta_hat) - min_j CV_b(j)`; it estimates the same bias
//! at B times the compute.

use rayon::prelude::*;
use serde::Serialize;

use crate::cv::{argmin_first, cv_curve, CvOutcome, FoldCurves};
use crate::cv::{fold_error_curves_with_cost, make_folds};
use crate::dataset::{Dataset, Task};
use crate::error::{Error, Result};
use crate::learners::LearnerSpec;
use crate::loss::Loss;
use crate::rng::{derive_seed, stream_rng, streams};

/// The fold-based bias estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasEstimate {
    /// `(1/K) sum_k d_k`; nonnegative, in loss units.
    pub value: f64,
    /// `d_k = e_k(theta_hat) - e_k(theta_hat_k)`, one per fold.
    pub diffs: Vec<f64>,
    /// Standard error of the mean of the `d_k` (sample SD over sqrt(K));
    /// absent when K = 1.
    pub se: Option<f64>,
    /// `CV(theta_hat) + value`: the adjusted test-error estimate.
    pub adjusted: f64,
}

/// Computes the bias estimate from the per-fold curves and the selection
/// made on them. `outcome` must come from these same curves.
pub fn tt_bias(curves: &FoldCurves, outcome: &CvOutcome) -> Result<BiasEstimate> {
    if outcome.cv_curve.len() != curves.t() || outcome.per_fold_minimizers.len() != curves.k() {
        return Err(Error::invalid(
            "CV outcome does not match the fold curves it was supposedly selected from",
        ));
    }
    let k = curves.k();
    let diffs: Vec<f64> = (0..k)
        .map(|fold| {
            let row = curves.row(fold);
            row[outcome.theta_hat] - row[outcome.per_fold_minimizers[fold]]
        })
        .collect();
    let value = diffs.iter().sum::<f64>() / k as f64;
    let se = if k > 1 {
        let var = diffs.iter().map(|d| (d - value) * (d - value)).sum::<f64>() / (k - 1) as f64;
        Some((var / k as f64).sqrt())
    } else {
        None
    };
    Ok(BiasEstimate { value, diffs, se, adjusted: outcome.min_cv + value })
}

/// `CV(theta_hat) + bias`: never below the minimum it corrects.
pub fn adjusted_error(min_cv: f64, bias: &BiasEstimate) -> f64 {
    min_cv + bias.value
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BootstrapConfig {
    pub k_folds: usize,
    pub replicates: usize,
    pub seed: u64,
    pub stratify: bool,
    /// Redraws allowed when a resample misses a class entirely.
    pub retries: usize,
}

impl BootstrapConfig {
    pub fn new(k_folds: usize, replicates: usize, seed: u64) -> Self {
        // B defaults to 100 in the CLI; retries bound the single-class redraw loop.
        BootstrapConfig { k_folds, replicates, seed, stratify: false, retries: 100 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapBias {
    /// Mean of the per-replicate terms.
    pub value: f64,
    /// `CV_b(theta_hat) - min_j CV_b(j)` per replicate, each nonnegative.
    pub terms: Vec<f64>,
    /// Standard error of the mean over replicates; absent when B = 1.
    pub se: Option<f64>,
    /// Summed per-replicate CV compute in seconds (B full K-fold CVs).
    pub compute_seconds: f64,
}

/// Bootstrap oracle for the bias: draws B resamples of size n with
/// replacement, runs a fresh K-fold CV on each (folds re-randomized per
/// replicate), and averages the gap between the replicate curve at the
/// original `theta_hat` and at the replicate's own minimum.
///
/// `theta_hat` is the minimizer from the CV already run on `data`; it is
/// held fixed across replicates. Duplicated observations may land in
/// different folds of a replicate; that leakage is inherent to the
/// resampling construction.
pub fn bootstrap_bias(
    data: &Dataset,
    spec: &LearnerSpec,
    loss: Loss,
    theta_hat: usize,
    config: &BootstrapConfig,
) -> Result<BootstrapBias> {
    if config.replicates == 0 {
        return Err(Error::invalid("need at least one bootstrap replicate"));
    }
    if theta_hat >= spec.grid.len() {
        return Err(Error::invalid(format!(
            "theta_hat index {theta_hat} outside grid of length {}",
            spec.grid.len()
        )));
    }

    let results: Vec<Result<(f64, f64)>> = (0..config.replicates)
        .into_par_iter()
        .map(|b| replicate_term(data, spec, loss, theta_hat, config, b))
        .collect();

    let mut terms = Vec::with_capacity(config.replicates);
    let mut compute_seconds = 0.0;
    for r in results {
        let (term, cost) = r?;
        terms.push(term);
        compute_seconds += cost;
    }
    let value = terms.iter().sum::<f64>() / terms.len() as f64;
    let se = if terms.len() > 1 {
        let b = terms.len() as f64;
        let var = terms.iter().map(|t| (t - value) * (t - value)).sum::<f64>() / (b - 1.0);
        Some((var / b).sqrt())
    } else {
        None
    };
    Ok(BootstrapBias { value, terms, se, compute_seconds })
}

fn replicate_term(
    data: &Dataset,
    spec: &LearnerSpec,
    loss: Loss,
    theta_hat: usize,
    config: &BootstrapConfig,
    b: usize,
) -> Result<(f64, f64)> {
    use rand::Rng;
    let replicate_seed = derive_seed(config.seed, b as u64);
    let mut rng = stream_rng(replicate_seed, streams::BOOTSTRAP);
    let n = data.n();

    let mut resample: Option<Dataset> = None;
    for _ in 0..=config.retries {
        let rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        let candidate = data.subset(&rows)?;
        let usable = match candidate.task() {
            Task::Classification => candidate.present_classes().len() >= 2,
            Task::Regression => true,
        };
        if usable {
            resample = Some(candidate);
            break;
        }
    }
    let resample = resample.ok_or(Error::DegenerateResample { replicate: b, retries: config.retries })?;

    let stratify_labels = if config.stratify && resample.task() == Task::Classification {
        Some(resample.labels().to_vec())
    } else {
        None
    };
    let plan = make_folds(n, config.k_folds, replicate_seed, stratify_labels.as_deref())?;
    let (curves, cost) = fold_error_curves_with_cost(&resample, spec, &plan, loss)?;
    let curve = cv_curve(&curves);
    let own_min = curve[argmin_first(&curve)?];
    Ok((curve[theta_hat] - own_min, cost))
}
