//! The single-knob learner zoo behind one fitting interface.
//!
//! Every learner exposes exactly one tuning parameter over an ordered grid
//! and answers predictions at *every* grid index from a single fit (the
//! boosting path, the centroid shrinkage path, the per-lambda coefficient
//! set, ...). Grids are ordered most-regularized first, so argmin ties
//! resolve toward the simplest model.
//!
//! None of the learners is stochastic: fitting is a pure function of
//! `(spec, train)` and needs no seed.

mod cart;
mod gbm;
mod knn;
mod lda;
mod nsc;
mod ridge;
mod svm;

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Task};
use crate::error::{Error, Result};

/// A class label in `1..=G` or a real-valued response.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Prediction {
    Label(usize),
    Value(f64),
}

impl Prediction {
    pub fn label(&self) -> Option<usize> {
        match self {
            Prediction::Label(l) => Some(*l),
            Prediction::Value(_) => None,
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            Prediction::Value(v) => Some(*v),
            Prediction::Label(_) => None,
        }
    }
}

/// `sign(d) * max(|d| - delta, 0)`: shrink toward zero by `delta`.
pub fn soft_threshold(d: f64, delta: f64) -> f64 {
    debug_assert!(delta >= 0.0, "soft threshold wants a nonnegative delta");
    if d > delta {
        d - delta
    } else if d < -delta {
        d + delta
    } else {
        0.0
    }
}

/// Ordered tuning-parameter grid, most-regularized/simplest value first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaGrid {
    values: Vec<f64>,
}

impl ThetaGrid {
    /// Requires at least two finite, strictly monotone values.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::invalid(format!(
                "a tuning grid needs at least 2 values, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("tuning grid contains a non-finite value"));
        }
        let ascending = values.windows(2).all(|w| w[0] < w[1]);
        let descending = values.windows(2).all(|w| w[0] > w[1]);
        if !ascending && !descending {
            return Err(Error::invalid("tuning grid must be strictly monotone"));
        }
        Ok(ThetaGrid { values })
    }

    /// Degenerate one-point grid: no selection happens, every "curve" is a
    /// single value. Only for diagnostics that deliberately switch the
    /// minimization off; the normal constructor refuses t = 1.
    pub fn single(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::invalid("tuning grid contains a non-finite value"));
        }
        Ok(ThetaGrid { values: vec![value] })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, j: usize) -> f64 {
        self.values[j]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LearnerKind {
    /// K-nearest neighbors; theta = neighbor count k (descending grid).
    Knn,
    /// Nearest shrunken centroids; theta = shrinkage threshold (descending).
    Nsc,
    /// Linear discriminant analysis; theta = covariance shrinkage toward
    /// its diagonal (descending, 1 = diagonal).
    Lda,
    /// Classification tree; theta = maximum depth (ascending).
    Cart,
    /// Logistic boosting with depth-1 stumps; theta = rounds (ascending).
    Gbm,
    /// Linear hinge-loss SVM; theta = ridge penalty lambda (descending).
    Svm,
    /// Ridge regression with one predictor; theta = lambda (descending).
    Ridge,
}

impl LearnerKind {
    pub const ALL: [LearnerKind; 7] = [
        LearnerKind::Knn,
        LearnerKind::Nsc,
        LearnerKind::Lda,
        LearnerKind::Cart,
        LearnerKind::Gbm,
        LearnerKind::Svm,
        LearnerKind::Ridge,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            LearnerKind::Knn => "knn",
            LearnerKind::Nsc => "nsc",
            LearnerKind::Lda => "lda",
            LearnerKind::Cart => "cart",
            LearnerKind::Gbm => "gbm",
            LearnerKind::Svm => "svm",
            LearnerKind::Ridge => "ridge",
        }
    }

    pub fn task(&self) -> Task {
        match self {
            LearnerKind::Ridge => Task::Regression,
            _ => Task::Classification,
        }
    }

    /// Learners limited to two classes; KNN/NSC/CART take any G.
    fn two_class_only(&self) -> bool {
        matches!(self, LearnerKind::Lda | LearnerKind::Svm | LearnerKind::Gbm)
    }
}

impl std::fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LearnerKind::ALL
            .iter()
            .find(|k| k.name() == s)
            .copied()
            .ok_or_else(|| Error::invalid(format!("unknown learner {s:?} (expected one of knn, nsc, lda, cart, gbm, svm, ridge)")))
    }
}

/// A learner kind plus a concrete grid; the unit the CV engine consumes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerSpec {
    pub kind: LearnerKind,
    pub grid: ThetaGrid,
}

impl LearnerSpec {
    pub fn new(kind: LearnerKind, grid: ThetaGrid) -> Result<Self> {
        for &v in grid.values() {
            match kind {
                LearnerKind::Knn => {
                    if v < 1.0 || v.fract() != 0.0 {
                        return Err(Error::invalid(format!("knn neighbor counts must be positive integers, got {v}")));
                    }
                }
                LearnerKind::Cart | LearnerKind::Gbm => {
                    if v < 0.0 || v.fract() != 0.0 {
                        return Err(Error::invalid(format!("{kind} grid values must be nonnegative integers, got {v}")));
                    }
                }
                LearnerKind::Nsc | LearnerKind::Ridge => {
                    if v < 0.0 {
                        return Err(Error::invalid(format!("{kind} grid values must be nonnegative, got {v}")));
                    }
                }
                LearnerKind::Lda => {
                    if !(0.0..=1.0).contains(&v) {
                        return Err(Error::invalid(format!("lda shrinkage values must lie in [0, 1], got {v}")));
                    }
                }
                LearnerKind::Svm => {
                    if v <= 0.0 {
                        return Err(Error::invalid(format!("svm lambda values must be positive, got {v}")));
                    }
                }
            }
        }
        Ok(LearnerSpec { kind, grid })
    }

    fn validate_for(&self, train: &Dataset) -> Result<()> {
        if self.kind.task() != train.task() {
            return Err(Error::invalid(format!(
                "{} expects a {} task, dataset is {}",
                self.kind,
                self.kind.task(),
                train.task()
            )));
        }
        if self.kind.two_class_only() {
            if let Some(g) = train.class_count() {
                if g != 2 {
                    return Err(Error::invalid(format!("{} supports exactly 2 classes, dataset declares {g}", self.kind)));
                }
            }
        }
        if self.kind == LearnerKind::Knn {
            let max_k = self.grid.values().iter().copied().fold(0.0f64, f64::max);
            if max_k > train.n() as f64 {
                return Err(Error::invalid(format!(
                    "knn neighbor count {max_k} exceeds training size {}",
                    train.n()
                )));
            }
        }
        if self.kind == LearnerKind::Ridge && train.p() != 1 {
            return Err(Error::invalid(format!("ridge supports a single predictor, dataset has p = {}", train.p())));
        }
        Ok(())
    }
}

/// Learner choice before grid resolution: an explicit grid, or the
/// kind-specific default derived from the data (NSC thresholds, KNN caps).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerConfig {
    pub kind: LearnerKind,
    pub grid: Option<Vec<f64>>,
}

impl LearnerConfig {
    pub fn new(kind: LearnerKind) -> Self {
        LearnerConfig { kind, grid: None }
    }

    pub fn with_grid(kind: LearnerKind, grid: Vec<f64>) -> Self {
        LearnerConfig { kind, grid: Some(grid) }
    }

    /// Fixes the grid against a concrete dataset and fold count. The grid
    /// must be fixed *before* cross-validation so all folds share one axis.
    pub fn resolve(&self, data: &Dataset, k_folds: usize) -> Result<LearnerSpec> {
        let values = match &self.grid {
            Some(v) => v.clone(),
            None => default_grid(self.kind, data, k_folds)?,
        };
        LearnerSpec::new(self.kind, ThetaGrid::new(values)?)
    }
}

fn default_grid(kind: LearnerKind, data: &Dataset, k_folds: usize) -> Result<Vec<f64>> {
    match kind {
        LearnerKind::Knn => {
            if k_folds < 2 || k_folds > data.n() {
                return Err(Error::invalid(format!("fold count {k_folds} invalid for n = {}", data.n())));
            }
            let max_fold = data.n().div_ceil(k_folds);
            knn::default_grid(data.n() - max_fold)
        }
        LearnerKind::Nsc => nsc::default_grid(data),
        LearnerKind::Lda => Ok(vec![1.0, 0.8, 0.6, 0.4, 0.2, 0.1, 0.05, 0.0]),
        LearnerKind::Cart => Ok((0..=8).map(|d| d as f64).collect()),
        LearnerKind::Gbm => Ok((1..=200).map(|m| m as f64).collect()),
        LearnerKind::Svm => Ok((0..10).map(|i| 10f64.powf(3.0 - i as f64 * 6.0 / 9.0)).collect()),
        LearnerKind::Ridge => Ok(vec![1e3, 1e2, 1e1, 1.0, 1e-1, 1e-2, 1e-3, 0.0]),
    }
}

/// Per-kind model state able to predict at every grid index from one fit.
pub(crate) trait ModelPath: Send + Sync {
    fn predict_at(&self, x: &[f64], j: usize) -> Prediction;

    /// Predictions at all `t` grid indices; learners with a shared path
    /// (KNN distances, boosting rounds, tree walks) override this.
    fn predict_path(&self, x: &[f64], t: usize) -> Vec<Prediction> {
        (0..t).map(|j| self.predict_at(x, j)).collect()
    }
}

/// Fallback when training degenerates to a single class (or observation):
/// predict the majority training class at every grid index.
struct ConstantModel {
    prediction: Prediction,
}

impl ModelPath for ConstantModel {
    fn predict_at(&self, _x: &[f64], _j: usize) -> Prediction {
        self.prediction
    }
}

/// A fitted model bound to its grid; predictions at grid index `j` depend
/// only on the training data and `theta_j`.
pub struct FittedModel {
    grid: ThetaGrid,
    p: usize,
    inner: Box<dyn ModelPath>,
}

impl FittedModel {
    pub fn grid(&self) -> &ThetaGrid {
        &self.grid
    }

    pub fn predict(&self, x: &[f64], j: usize) -> Result<Prediction> {
        self.check_x(x)?;
        if j >= self.grid.len() {
            return Err(Error::invalid(format!(
                "grid index {j} out of range (t = {})",
                self.grid.len()
            )));
        }
        Ok(self.inner.predict_at(x, j))
    }

    /// Predictions at every grid index, cheapest along the fitted path.
    pub fn predict_all(&self, x: &[f64]) -> Result<Vec<Prediction>> {
        self.check_x(x)?;
        Ok(self.inner.predict_path(x, self.grid.len()))
    }

    fn check_x(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.p {
            return Err(Error::invalid(format!(
                "feature row has {} entries, model expects {}",
                x.len(),
                self.p
            )));
        }
        Ok(())
    }
}

/// Fits `spec` on `train`, returning a model that predicts at every grid
/// index. Degenerate training data (a single class, a single observation)
/// falls back to predicting the majority training class.
pub fn fit(spec: &LearnerSpec, train: &Dataset) -> Result<FittedModel> {
    if train.n() == 0 {
        return Err(Error::invalid("cannot fit on an empty training set"));
    }
    spec.validate_for(train)?;
    let inner: Box<dyn ModelPath> = if train.task() == Task::Classification
        && (train.present_classes().len() < 2 || train.n() < 2)
    {
        let label = majority_class(train.labels(), train.class_count().unwrap_or(1));
        Box::new(ConstantModel { prediction: Prediction::Label(label) })
    } else {
        match spec.kind {
            LearnerKind::Knn => knn::fit(train, spec.grid.values())?,
            LearnerKind::Nsc => nsc::fit(train, spec.grid.values())?,
            LearnerKind::Lda => lda::fit(train, spec.grid.values())?,
            LearnerKind::Cart => cart::fit(train, spec.grid.values())?,
            LearnerKind::Gbm => gbm::fit(train, spec.grid.values())?,
            LearnerKind::Svm => svm::fit(train, spec.grid.values())?,
            LearnerKind::Ridge => ridge::fit(train, spec.grid.values())?,
        }
    };
    Ok(FittedModel { grid: spec.grid.clone(), p: train.p(), inner })
}

/// Most frequent label; vote ties go to the smallest class index.
pub(crate) fn majority_class(labels: &[usize], class_count: usize) -> usize {
    let mut counts = vec![0usize; class_count + 1];
    for &l in labels {
        counts[l] += 1;
    }
    let mut best = 1;
    for g in 2..=class_count {
        if counts[g] > counts[best] {
            best = g;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Targets;

    fn two_class(features: Vec<f64>, p: usize, labels: Vec<usize>) -> Dataset {
        Dataset::from_parts(features, p, Targets::Labels { labels, class_count: 2 }).unwrap()
    }

    #[test]
    fn soft_threshold_matches_definition() {
        assert_eq!(soft_threshold(2.0, 0.5), 1.5);
        assert_eq!(soft_threshold(-0.3, 0.5), 0.0);
        for d in [-2.5, -0.1, 0.0, 0.7, 3.0] {
            assert_eq!(soft_threshold(d, 0.0), d);
        }
        assert_eq!(soft_threshold(-2.0, 0.5), -1.5);
    }

    #[test]
    fn grid_rejects_short_and_non_monotone() {
        assert!(ThetaGrid::new(vec![1.0]).is_err());
        assert!(ThetaGrid::new(vec![1.0, 2.0, 2.0]).is_err());
        assert!(ThetaGrid::new(vec![1.0, 3.0, 2.0]).is_err());
        assert!(ThetaGrid::new(vec![3.0, 2.0, 1.0]).is_ok());
        assert!(ThetaGrid::single(0.0).is_ok());
    }

    #[test]
    fn knn_default_grid_matches_sequence_and_cap() {
        // n = 40, K = 10: smallest training fold has 36 rows.
        let data = crate::dataset::generate_two_class_gaussian(
            &crate::dataset::SyntheticSpec::new(40, 2, false),
            1,
        )
        .unwrap();
        let spec = LearnerConfig::new(LearnerKind::Knn).resolve(&data, 10).unwrap();
        assert_eq!(
            spec.grid.values(),
            &[31.0, 21.0, 15.0, 11.0, 7.0, 5.0, 3.0, 1.0]
        );
    }

    #[test]
    fn single_class_training_falls_back_to_constant() {
        let data = two_class(vec![0.0, 1.0, 2.0, 3.0], 1, vec![1, 1, 1, 1]);
        let spec = LearnerSpec::new(
            LearnerKind::Cart,
            ThetaGrid::new(vec![0.0, 1.0]).unwrap(),
        )
        .unwrap();
        let model = fit(&spec, &data).unwrap();
        assert_eq!(model.predict(&[9.0], 1).unwrap(), Prediction::Label(1));
    }

    #[test]
    fn prediction_validates_index_and_dimension() {
        let data = two_class(vec![0.0, 1.0, 2.0, 3.0], 1, vec![1, 1, 2, 2]);
        let spec = LearnerSpec::new(LearnerKind::Knn, ThetaGrid::new(vec![3.0, 1.0]).unwrap()).unwrap();
        let model = fit(&spec, &data).unwrap();
        assert!(model.predict(&[0.0], 5).is_err());
        assert!(model.predict(&[0.0, 0.0], 0).is_err());
    }

    #[test]
    fn task_mismatch_is_rejected() {
        let data = two_class(vec![0.0, 1.0, 2.0, 3.0], 1, vec![1, 1, 2, 2]);
        let spec = LearnerSpec::new(LearnerKind::Ridge, ThetaGrid::new(vec![1.0, 0.0]).unwrap()).unwrap();
        assert!(fit(&spec, &data).is_err());
    }
}
