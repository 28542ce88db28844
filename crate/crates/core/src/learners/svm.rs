//! Linear hinge-loss SVM trained by deterministic full-batch subgradient
//! descent.
//!
//! Primal objective: `(lambda/2)||w||^2 + (1/n) sum hinge(y_i, w.x_i + b)`
//! with an unregularized intercept, so at the high-lambda end of the grid
//! the weights vanish and the intercept alone carries the majority class.
//! Weights take the 1/(lambda t) step with a projection onto the
//! `||w|| <= 1/sqrt(lambda)` ball; the intercept takes a 1/sqrt(t) step.
//! Zero initialization, fixed iteration budget, no randomness.

use crate::dataset::Dataset;
use crate::error::Result;

use super::{ModelPath, Prediction};

const MAX_ITERS: usize = 200;
const OBJECTIVE_CHECK_EVERY: usize = 10;
const STALL_TOL: f64 = 1e-8;

struct SvmModel {
    /// One (weights, intercept) per lambda on the grid.
    solutions: Vec<(Vec<f64>, f64)>,
}

pub(super) fn fit(train: &Dataset, grid: &[f64]) -> Result<Box<dyn ModelPath>> {
    let n = train.n();
    let p = train.p();
    let y: Vec<f64> = train.labels().iter().map(|&l| if l == 2 { 1.0 } else { -1.0 }).collect();

    let solutions = grid.iter().map(|&lambda| train_one(train, &y, n, p, lambda)).collect();
    Ok(Box::new(SvmModel { solutions }))
}

fn train_one(train: &Dataset, y: &[f64], n: usize, p: usize, lambda: f64) -> (Vec<f64>, f64) {
    let inv_n = 1.0 / n as f64;
    let radius = 1.0 / lambda.sqrt();
    let mut w = vec![0.0f64; p];
    let mut b = 0.0f64;
    let mut grad_w = vec![0.0f64; p];
    let mut last_objective = f64::INFINITY;

    for t in 0..MAX_ITERS {
        let mut hinge_sum = 0.0;
        let mut grad_b = 0.0;
        for g in grad_w.iter_mut() {
            *g = 0.0;
        }
        for i in 0..n {
            let row = train.row(i);
            let margin = y[i] * (dot(&w, row) + b);
            if margin < 1.0 {
                hinge_sum += 1.0 - margin;
                for (g, &xj) in grad_w.iter_mut().zip(row) {
                    *g -= y[i] * xj;
                }
                grad_b -= y[i];
            }
        }

        let step_w = 1.0 / (lambda * (t + 1) as f64);
        let step_b = 0.5 / ((t + 1) as f64).sqrt();
        let mut norm_sq = 0.0;
        for (wj, g) in w.iter_mut().zip(&grad_w) {
            *wj -= step_w * (lambda * *wj + g * inv_n);
            norm_sq += *wj * *wj;
        }
        if norm_sq > radius * radius {
            let scale = radius / norm_sq.sqrt();
            for wj in w.iter_mut() {
                *wj *= scale;
            }
        }
        b -= step_b * grad_b * inv_n;

        if (t + 1) % OBJECTIVE_CHECK_EVERY == 0 {
            let norm_sq: f64 = w.iter().map(|v| v * v).sum();
            let objective = 0.5 * lambda * norm_sq + hinge_sum * inv_n;
            if (last_objective - objective).abs() <= STALL_TOL * objective.abs().max(1.0) {
                break;
            }
            last_objective = objective;
        }
    }
    (w, b)
}

fn dot(w: &[f64], x: &[f64]) -> f64 {
    w.iter().zip(x).map(|(a, b)| a * b).sum()
}

impl ModelPath for SvmModel {
    fn predict_at(&self, x: &[f64], j: usize) -> Prediction {
        let (w, b) = &self.solutions[j];
        Prediction::Label(if dot(w, x) + b > 0.0 { 2 } else { 1 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Targets;
    use crate::learners::{fit, LearnerKind, LearnerSpec, ThetaGrid};

    fn svm_spec(lambdas: Vec<f64>) -> LearnerSpec {
        LearnerSpec::new(LearnerKind::Svm, ThetaGrid::new(lambdas).unwrap()).unwrap()
    }

    fn separable() -> Dataset {
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for i in 0..10 {
            let off = (i % 5) as f64 * 0.05;
            if i < 5 {
                features.extend_from_slice(&[-1.0 - off, -0.5 + off]);
                labels.push(1);
            } else {
                features.extend_from_slice(&[1.0 + off, 0.5 - off]);
                labels.push(2);
            }
        }
        Dataset::from_parts(features, 2, Targets::Labels { labels, class_count: 2 }).unwrap()
    }

    #[test]
    fn separates_linearly_separable_data() {
        let model = fit(&svm_spec(vec![1.0, 0.001]), &separable()).unwrap();
        for j in 0..2 {
            assert_eq!(model.predict(&[-1.2, -0.4], j).unwrap(), Prediction::Label(1));
            assert_eq!(model.predict(&[1.1, 0.6], j).unwrap(), Prediction::Label(2));
        }
    }

    #[test]
    fn extreme_regularization_predicts_the_majority_class() {
        // 3 of class 2 vs 2 of class 1; with lambda huge the weights vanish
        // and the unregularized intercept carries the majority.
        let features = vec![-1.0, -1.1, 0.9, 1.0, 1.1];
        let data = Dataset::from_parts(
            features,
            1,
            Targets::Labels { labels: vec![1, 1, 2, 2, 2], class_count: 2 },
        )
        .unwrap();
        let model = fit(&svm_spec(vec![1e7, 1.0]), &data).unwrap();
        for x in [-2.0, 0.0, 2.0] {
            assert_eq!(model.predict(&[x], 0).unwrap(), Prediction::Label(2));
        }
    }

    #[test]
    fn deterministic_across_fits() {
        let data = separable();
        let spec = svm_spec(vec![10.0, 0.1]);
        let a = fit(&spec, &data).unwrap();
        let b = fit(&spec, &data).unwrap();
        for x in [[-0.3, 0.2], [0.4, -0.1]] {
            for j in 0..2 {
                assert_eq!(a.predict(&x, j).unwrap(), b.predict(&x, j).unwrap());
            }
        }
    }
}
