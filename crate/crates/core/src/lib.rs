//! Cross-validation with a fold-based correction for the downward bias of
//! the minimum CV error.
//!
//! Picking a tuning parameter at the minimum of a K-fold cross-validation
//! error curve makes that minimum an optimistic estimate of the test error
//! at the chosen parameter. This crate computes CV error curves over a
//! parameter grid, selects the minimizer, and estimates the optimism from
//! the per-fold error curves alone: the bias estimate is the average over
//! folds of `e_k(theta_hat) - e_k(theta_hat_k)`, where `theta_hat_k`
//! minimizes fold `k`'s own curve. Adding that estimate back to the minimum
//! CV error gives the adjusted test-error estimate, at essentially no cost
//! beyond the original cross-validation.
//!
//! The crate also ships a bootstrap estimator of the same bias (expensive:
//! one full K-fold CV per resample) used as an oracle for the cheap
//! estimate, a zoo of single-knob learners (KNN, nearest shrunken
//! centroids, LDA, CART, stump-boosting, linear SVM, ridge), synthetic
//! two-class Gaussian generators, and a Monte Carlo harness that reproduces
//! the simulation study the correction was validated on.
//!
//! Everything stochastic takes an explicit seed and derives per-task
//! streams from it, so results are identical regardless of thread count.

pub mod bias;
pub mod cv;
pub mod dataset;
pub mod error;
pub mod experiments;
pub mod learners;
mod linalg;
pub mod loss;
pub mod rng;

pub use bias::{adjusted_error, bootstrap_bias, tt_bias, BiasEstimate, BootstrapBias, BootstrapConfig};
pub use cv::{argmin_first, cv_curve, fold_error_curves, make_folds, CvOutcome, FoldCurves, FoldPlan};
pub use dataset::{Dataset, SyntheticSpec, Targets, Task};
pub use error::{Error, Result};
pub use learners::{fit, soft_threshold, FittedModel, LearnerConfig, LearnerKind, LearnerSpec, Prediction, ThetaGrid};
pub use loss::Loss;
