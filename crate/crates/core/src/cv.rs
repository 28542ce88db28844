//! Fold construction, per-fold error curves, the CV curve, and grid
//! minimization.

use rayon::prelude::*;
use serde::Serialize;

use crate::dataset::{Dataset, Task};
use crate::error::{Error, Result};
use crate::learners::{self, LearnerSpec};
use crate::loss::Loss;
use crate::rng::{stream_rng, streams};

/// A partition of `0..n` into K folds with sizes differing by at most one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FoldPlan {
    k: usize,
    /// Fold index in `0..K` per observation.
    assignment: Vec<usize>,
    fold_sizes: Vec<usize>,
}

impl FoldPlan {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn fold_sizes(&self) -> &[usize] {
        &self.fold_sizes
    }

    /// Rows held out in fold `fold`.
    pub fn fold_rows(&self, fold: usize) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.assignment[i] == fold).collect()
    }

    /// Rows trained on in round `fold` (everything else).
    pub fn train_rows(&self, fold: usize) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.assignment[i] != fold).collect()
    }
}

/// Randomly splits `n` observations into `k` folds of near-equal size.
///
/// With `stratify = Some(labels)` the split preserves class proportions:
/// each fold's count for a class is the floor or ceiling of the
/// proportional share. Deterministic given the seed.
pub fn make_folds(n: usize, k: usize, seed: u64, stratify: Option<&[usize]>) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::invalid(format!("need at least 2 folds, got {k}")));
    }
    if k > n {
        return Err(Error::invalid(format!("fold count {k} exceeds observation count {n}")));
    }
    if let Some(labels) = stratify {
        if labels.len() != n {
            return Err(Error::invalid(format!(
                "stratification labels have length {}, expected {n}",
                labels.len()
            )));
        }
    }

    let mut rng = stream_rng(seed, streams::FOLDS);
    let mut assignment = vec![0usize; n];
    match stratify {
        None => {
            let mut order: Vec<usize> = (0..n).collect();
            shuffle(&mut order, &mut rng);
            // First n % k folds take one extra observation.
            let base = n / k;
            let extra = n % k;
            let mut pos = 0;
            for fold in 0..k {
                let size = base + usize::from(fold < extra);
                for &row in &order[pos..pos + size] {
                    assignment[row] = fold;
                }
                pos += size;
            }
        }
        Some(labels) => {
            let mut classes: Vec<usize> = labels.to_vec();
            classes.sort_unstable();
            classes.dedup();
            // Deal each class's shuffled members to consecutive folds; the
            // cursor carries across classes so overall sizes stay within one.
            let mut cursor = 0usize;
            for class in classes {
                let mut members: Vec<usize> =
                    (0..n).filter(|&i| labels[i] == class).collect();
                shuffle(&mut members, &mut rng);
                for member in members {
                    assignment[member] = cursor % k;
                    cursor += 1;
                }
            }
        }
    }

    let mut fold_sizes = vec![0usize; k];
    for &f in &assignment {
        fold_sizes[f] += 1;
    }
    if fold_sizes.iter().any(|&s| s == 0) {
        return Err(Error::invalid("a fold came out empty"));
    }
    Ok(FoldPlan { k, assignment, fold_sizes })
}

fn shuffle(items: &mut [usize], rng: &mut impl rand::Rng) {
    use rand::seq::SliceRandom;
    items.shuffle(rng);
}

/// The K x t matrix of per-fold error curves `e_k(theta_j)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldCurves {
    /// `values[k][j] = e_k(theta_j)`: mean loss over fold k of the model
    /// fit without fold k, evaluated at grid index j.
    values: Vec<Vec<f64>>,
    fold_sizes: Vec<usize>,
}

impl FoldCurves {
    pub fn new(values: Vec<Vec<f64>>, fold_sizes: Vec<usize>) -> Result<Self> {
        if values.is_empty() || values.len() != fold_sizes.len() {
            return Err(Error::invalid("fold curve rows must match fold sizes"));
        }
        let t = values[0].len();
        if t == 0 || values.iter().any(|row| row.len() != t) {
            return Err(Error::invalid("fold curves must share one nonempty grid"));
        }
        if fold_sizes.iter().any(|&s| s == 0) {
            return Err(Error::invalid("fold sizes must be positive"));
        }
        for (k, row) in values.iter().enumerate() {
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFiniteLoss { fold: k, grid_index: j });
            }
        }
        Ok(FoldCurves { values, fold_sizes })
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }

    pub fn t(&self) -> usize {
        self.values[0].len()
    }

    pub fn n(&self) -> usize {
        self.fold_sizes.iter().sum()
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.values[k]
    }

    pub fn fold_sizes(&self) -> &[usize] {
        &self.fold_sizes
    }
}

/// Cross-validates `spec` over `plan`: K model fits, each scored on its
/// held-out fold at every grid value. Returns the per-fold error curves.
pub fn fold_error_curves(
    data: &Dataset,
    spec: &LearnerSpec,
    plan: &FoldPlan,
    loss: Loss,
) -> Result<FoldCurves> {
    fold_error_curves_with_cost(data, spec, plan, loss).map(|(curves, _)| curves)
}

/// As [`fold_error_curves`], also reporting the summed per-fold compute
/// time in seconds (scheduling-independent, unlike wall clock).
pub fn fold_error_curves_with_cost(
    data: &Dataset,
    spec: &LearnerSpec,
    plan: &FoldPlan,
    loss: Loss,
) -> Result<(FoldCurves, f64)> {
    if plan.n() != data.n() {
        return Err(Error::invalid(format!(
            "fold plan covers {} rows, dataset has {}",
            plan.n(),
            data.n()
        )));
    }
    if !loss.matches_task(data.task()) {
        return Err(Error::invalid(format!(
            "loss {loss} does not match task {}",
            data.task()
        )));
    }

    let per_fold: Vec<Result<(Vec<f64>, f64)>> = (0..plan.k())
        .into_par_iter()
        .map(|fold| {
            let started = std::time::Instant::now();
            let row = fold_curve(data, spec, plan, loss, fold)
                .map_err(|e| Error::FoldFailure { fold, source: Box::new(e) })?;
            Ok((row, started.elapsed().as_secs_f64()))
        })
        .collect();

    let mut values = Vec::with_capacity(plan.k());
    let mut cost = 0.0;
    for item in per_fold {
        let (row, seconds) = item?;
        values.push(row);
        cost += seconds;
    }
    Ok((FoldCurves::new(values, plan.fold_sizes().to_vec())?, cost))
}

fn fold_curve(
    data: &Dataset,
    spec: &LearnerSpec,
    plan: &FoldPlan,
    loss: Loss,
    fold: usize,
) -> Result<Vec<f64>> {
    let train = data.subset(&plan.train_rows(fold))?;
    let model = learners::fit(spec, &train)?;
    let held_out = plan.fold_rows(fold);
    let t = spec.grid.len();
    let mut sums = vec![0.0f64; t];
    for &i in &held_out {
        let preds = model.predict_all(data.row(i))?;
        let (label, value) = match data.task() {
            Task::Classification => (Some(data.labels()[i]), None),
            Task::Regression => (None, Some(data.values()[i])),
        };
        for (j, pred) in preds.iter().enumerate() {
            sums[j] += loss.eval(label, value, pred)?;
        }
    }
    let n_k = held_out.len() as f64;
    Ok(sums.into_iter().map(|s| s / n_k).collect())
}

/// Eq-style point-weighted CV curve: `CV(theta_j) = sum_k (n_k/n) e_k(theta_j)`.
pub fn cv_curve(curves: &FoldCurves) -> Vec<f64> {
    let n = curves.n() as f64;
    let t = curves.t();
    let mut out = vec![0.0f64; t];
    for (k, row) in curves.values.iter().enumerate() {
        let w = curves.fold_sizes[k] as f64;
        for (o, &e) in out.iter_mut().zip(row) {
            *o += w * e;
        }
    }
    for o in out.iter_mut() {
        *o /= n;
    }
    out
}

/// Plain fold average `(1/K) sum_k e_k(theta_j)`; this is the averaging
/// the bias estimate uses, distinct from the point-weighted CV curve when
/// fold sizes differ.
pub fn unweighted_mean_curve(curves: &FoldCurves) -> Vec<f64> {
    let k = curves.k() as f64;
    let t = curves.t();
    let mut out = vec![0.0f64; t];
    for row in &curves.values {
        for (o, &e) in out.iter_mut().zip(row) {
            *o += e;
        }
    }
    for o in out.iter_mut() {
        *o /= k;
    }
    out
}

/// Smallest index attaining the minimum; grids are ordered simplest-first,
/// so ties favor parsimony. NaN anywhere is an error, never ordered.
pub fn argmin_first(curve: &[f64]) -> Result<usize> {
    if curve.is_empty() {
        return Err(Error::invalid("cannot minimize an empty curve"));
    }
    if let Some(j) = curve.iter().position(|v| v.is_nan()) {
        return Err(Error::invalid(format!("curve value at index {j} is NaN")));
    }
    let mut best = 0;
    for (j, &v) in curve.iter().enumerate().skip(1) {
        if v < curve[best] {
            best = j;
        }
    }
    Ok(best)
}

/// The CV curve, its minimizer, and each fold's own minimizer.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvOutcome {
    pub cv_curve: Vec<f64>,
    /// Smallest grid index minimizing the CV curve.
    pub theta_hat: usize,
    /// `cv_curve[theta_hat]`, exactly.
    pub min_cv: f64,
    /// Smallest minimizing grid index of each fold's own curve.
    pub per_fold_minimizers: Vec<usize>,
}

impl CvOutcome {
    pub fn select(curves: &FoldCurves) -> Result<Self> {
        let curve = cv_curve(curves);
        let theta_hat = argmin_first(&curve)?;
        let min_cv = curve[theta_hat];
        let per_fold_minimizers = (0..curves.k())
            .map(|k| argmin_first(curves.row(k)))
            .collect::<Result<Vec<_>>>()?;
        Ok(CvOutcome { cv_curve: curve, theta_hat, min_cv, per_fold_minimizers })
    }
}

/// One-call convenience: curves plus selection.
pub fn run_cv(
    data: &Dataset,
    spec: &LearnerSpec,
    plan: &FoldPlan,
    loss: Loss,
) -> Result<(FoldCurves, CvOutcome)> {
    let curves = fold_error_curves(data, spec, plan, loss)?;
    let outcome = CvOutcome::select(&curves)?;
    Ok((curves, outcome))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate_two_class_gaussian, SyntheticSpec, Targets};
    use crate::learners::{LearnerKind, LearnerSpec, ThetaGrid};

    fn knn_spec(ks: Vec<f64>) -> LearnerSpec {
        LearnerSpec::new(LearnerKind::Knn, ThetaGrid::new(ks).unwrap()).unwrap()
    }

    #[test]
    fn equal_split_sizes() {
        let plan = make_folds(10, 5, 1, None).unwrap();
        assert_eq!(plan.fold_sizes(), &[2, 2, 2, 2, 2]);
        let plan = make_folds(40, 10, 1, None).unwrap();
        assert!(plan.fold_sizes().iter().all(|&s| s == 4));
    }

    #[test]
    fn remainder_spreads_by_one() {
        let plan = make_folds(7, 3, 9, None).unwrap();
        let mut sizes = plan.fold_sizes().to_vec();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        assert_eq!(sizes, vec![3, 2, 2]);
    }

    #[test]
    fn fold_count_bounds_enforced() {
        assert!(make_folds(10, 1, 0, None).is_err());
        assert!(make_folds(10, 11, 0, None).is_err());
        assert!(make_folds(10, 10, 0, None).is_ok());
    }

    #[test]
    fn folds_partition_all_rows() {
        let plan = make_folds(23, 4, 7, None).unwrap();
        let mut seen = vec![0usize; 23];
        for fold in 0..4 {
            for row in plan.fold_rows(fold) {
                seen[row] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
        let sizes = plan.fold_sizes();
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
    }

    #[test]
    fn stratified_folds_balance_classes() {
        // 14 of class 1, 10 of class 2, K = 4.
        let labels: Vec<usize> = (0..24).map(|i| if i < 14 { 1 } else { 2 }).collect();
        let plan = make_folds(24, 4, 3, Some(&labels)).unwrap();
        for fold in 0..4 {
            let rows = plan.fold_rows(fold);
            let c1 = rows.iter().filter(|&&i| labels[i] == 1).count();
            let c2 = rows.iter().filter(|&&i| labels[i] == 2).count();
            // Proportional shares are 14/4 = 3.5 and 10/4 = 2.5.
            assert!((3..=4).contains(&c1), "fold {fold} has {c1} of class 1");
            assert!((2..=3).contains(&c2), "fold {fold} has {c2} of class 2");
        }
        let sizes = plan.fold_sizes();
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
    }

    #[test]
    fn plans_are_deterministic_per_seed() {
        let a = make_folds(30, 5, 11, None).unwrap();
        let b = make_folds(30, 5, 11, None).unwrap();
        assert_eq!(a, b);
        let c = make_folds(30, 5, 12, None).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn single_class_data_gives_zero_curves() {
        let data = Dataset::from_parts(
            (0..12).map(|i| i as f64).collect(),
            1,
            Targets::Labels { labels: vec![1; 12], class_count: 1 },
        )
        .unwrap();
        let plan = make_folds(12, 3, 2, None).unwrap();
        let spec = LearnerSpec::new(LearnerKind::Cart, ThetaGrid::new(vec![0.0, 1.0]).unwrap()).unwrap();
        let curves = fold_error_curves(&data, &spec, &plan, Loss::ZeroOne).unwrap();
        for k in 0..curves.k() {
            assert!(curves.row(k).iter().all(|&e| e == 0.0));
        }
    }

    #[test]
    fn leave_one_out_entries_are_zero_or_one() {
        let data = generate_two_class_gaussian(&SyntheticSpec::new(12, 2, false), 4).unwrap();
        let plan = make_folds(12, 12, 5, None).unwrap();
        let spec = knn_spec(vec![3.0, 1.0]);
        let curves = fold_error_curves(&data, &spec, &plan, Loss::ZeroOne).unwrap();
        for k in 0..curves.k() {
            assert!(curves.row(k).iter().all(|&e| e == 0.0 || e == 1.0));
        }
    }

    #[test]
    fn zero_one_curves_stay_in_unit_interval() {
        let data = generate_two_class_gaussian(&SyntheticSpec::new(20, 3, true), 8).unwrap();
        let plan = make_folds(20, 5, 6, Some(data.labels())).unwrap();
        let spec = knn_spec(vec![5.0, 3.0, 1.0]);
        let curves = fold_error_curves(&data, &spec, &plan, Loss::ZeroOne).unwrap();
        for k in 0..curves.k() {
            assert!(curves.row(k).iter().all(|&e| (0.0..=1.0).contains(&e)));
        }
    }

    #[test]
    fn cv_curve_weights_by_fold_size() {
        let curves = FoldCurves::new(vec![vec![0.5], vec![0.0]], vec![2, 1]).unwrap();
        let cv = cv_curve(&curves);
        assert!((cv[0] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn equal_folds_match_unweighted_mean() {
        let curves = FoldCurves::new(
            vec![vec![0.3, 0.2], vec![0.5, 0.4], vec![0.1, 0.9]],
            vec![4, 4, 4],
        )
        .unwrap();
        let weighted = cv_curve(&curves);
        let unweighted = unweighted_mean_curve(&curves);
        for (a, b) in weighted.iter().zip(&unweighted) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn identical_rows_collapse_to_that_curve() {
        let row = vec![0.4, 0.1, 0.3];
        let curves = FoldCurves::new(vec![row.clone(), row.clone()], vec![3, 5]).unwrap();
        let cv = cv_curve(&curves);
        for (a, b) in cv.iter().zip(&row) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn argmin_takes_first_of_ties() {
        assert_eq!(argmin_first(&[0.3, 0.2, 0.4]).unwrap(), 1);
        assert_eq!(argmin_first(&[0.3, 0.2, 0.2]).unwrap(), 1);
        assert_eq!(argmin_first(&[0.5]).unwrap(), 0);
        assert!(argmin_first(&[0.1, f64::NAN]).is_err());
        assert!(argmin_first(&[]).is_err());
    }

    #[test]
    fn fold_relabeling_leaves_cv_curve_unchanged() {
        let curves = FoldCurves::new(
            vec![vec![0.3, 0.2], vec![0.5, 0.4], vec![0.1, 0.9]],
            vec![4, 2, 3],
        )
        .unwrap();
        let permuted = FoldCurves::new(
            vec![vec![0.1, 0.9], vec![0.3, 0.2], vec![0.5, 0.4]],
            vec![3, 4, 2],
        )
        .unwrap();
        let a = cv_curve(&curves);
        let b = cv_curve(&permuted);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn outcome_minimum_dominates_every_grid_point() {
        let data = generate_two_class_gaussian(&SyntheticSpec::new(24, 4, true), 13).unwrap();
        let plan = make_folds(24, 6, 3, Some(data.labels())).unwrap();
        let spec = knn_spec(vec![7.0, 5.0, 3.0, 1.0]);
        let (_, outcome) = run_cv(&data, &spec, &plan, Loss::ZeroOne).unwrap();
        assert_eq!(outcome.min_cv, outcome.cv_curve[outcome.theta_hat]);
        for &v in &outcome.cv_curve {
            assert!(outcome.min_cv <= v);
        }
    }

    #[test]
    fn plan_dataset_mismatch_is_rejected() {
        let data = generate_two_class_gaussian(&SyntheticSpec::new(12, 2, false), 4).unwrap();
        let plan = make_folds(10, 5, 5, None).unwrap();
        let spec = knn_spec(vec![3.0, 1.0]);
        assert!(fold_error_curves(&data, &spec, &plan, Loss::ZeroOne).is_err());
    }

    #[test]
    fn loss_task_mismatch_is_rejected() {
        let data = generate_two_class_gaussian(&SyntheticSpec::new(12, 2, false), 4).unwrap();
        let plan = make_folds(12, 4, 5, None).unwrap();
        let spec = knn_spec(vec![3.0, 1.0]);
        assert!(fold_error_curves(&data, &spec, &plan, Loss::Squared).is_err());
    }
}
