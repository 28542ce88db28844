//! Two-class logistic gradient boosting with depth-1 stumps.
//!
//! Fixed shrinkage 0.1, no subsampling; the number of boosting rounds is
//! the tuning parameter and the full path is kept, so every grid value is
//! answered by truncating one fit. Leaf values are Newton steps
//! (sum of residuals over sum of hessians), clamped to +-4.

use crate::dataset::Dataset;
use crate::error::Result;

use super::{ModelPath, Prediction};

const SHRINKAGE: f64 = 0.1;
const MAX_LEAF_VALUE: f64 = 4.0;

struct Stump {
    feature: usize,
    threshold: f64,
    left_value: f64,
    right_value: f64,
}

impl Stump {
    fn eval(&self, x: &[f64]) -> f64 {
        if x[self.feature] <= self.threshold {
            self.left_value
        } else {
            self.right_value
        }
    }
}

struct GbmModel {
    baseline: f64,
    stumps: Vec<Stump>,
    rounds: Vec<usize>,
}

pub(super) fn fit(train: &Dataset, grid: &[f64]) -> Result<Box<dyn ModelPath>> {
    let rounds: Vec<usize> = grid.iter().map(|&m| m as usize).collect();
    let max_rounds = rounds.iter().copied().max().unwrap_or(0);
    let n = train.n();
    let p = train.p();
    // Class 2 is the positive class.
    let y: Vec<f64> = train.labels().iter().map(|&l| if l == 2 { 1.0 } else { 0.0 }).collect();
    let positives = y.iter().sum::<f64>();
    let baseline = (positives / (n as f64 - positives)).ln();

    // Presort row orders per feature once.
    let orders: Vec<Vec<u32>> = (0..p)
        .map(|j| {
            let mut idx: Vec<u32> = (0..n as u32).collect();
            idx.sort_unstable_by(|&a, &b| {
                train.feature(a as usize, j).total_cmp(&train.feature(b as usize, j))
            });
            idx
        })
        .collect();

    let mut f_scores = vec![baseline; n];
    let mut stumps = Vec::with_capacity(max_rounds);
    for _ in 0..max_rounds {
        let mut residual = vec![0.0f64; n];
        let mut hessian = vec![0.0f64; n];
        let mut total_r = 0.0;
        let mut total_h = 0.0;
        for i in 0..n {
            let prob = 1.0 / (1.0 + (-f_scores[i]).exp());
            residual[i] = y[i] - prob;
            hessian[i] = prob * (1.0 - prob);
            total_r += residual[i];
            total_h += hessian[i];
        }

        let stump = best_stump(train, &orders, &residual, &hessian, total_r, total_h);
        for (i, f) in f_scores.iter_mut().enumerate() {
            *f += SHRINKAGE * stump.eval(train.row(i));
        }
        stumps.push(stump);
    }

    Ok(Box::new(GbmModel { baseline, stumps, rounds }))
}

/// Newton gain `(sum r)^2 / (sum h)` maximized over (feature, threshold);
/// ties keep the smallest feature index, then the smallest threshold. When
/// no feature admits a split, a single-leaf stump applies the global
/// Newton step.
fn best_stump(
    train: &Dataset,
    orders: &[Vec<u32>],
    residual: &[f64],
    hessian: &[f64],
    total_r: f64,
    total_h: f64,
) -> Stump {
    let n = train.n();
    let mut best: Option<(f64, usize, f64, f64, f64)> = None;
    for (feature, order) in orders.iter().enumerate() {
        let mut left_r = 0.0;
        let mut left_h = 0.0;
        for cut in 1..n {
            let i = order[cut - 1] as usize;
            left_r += residual[i];
            left_h += hessian[i];
            let value = train.feature(i, feature);
            let next = train.feature(order[cut] as usize, feature);
            if next == value {
                continue;
            }
            let right_r = total_r - left_r;
            let right_h = total_h - left_h;
            let gain = gain_term(left_r, left_h) + gain_term(right_r, right_h);
            let better = match best {
                None => true,
                Some((g, _, _, _, _)) => gain > g,
            };
            if better {
                let threshold = value + (next - value) / 2.0;
                best = Some((
                    gain,
                    feature,
                    threshold,
                    leaf_value(left_r, left_h),
                    leaf_value(right_r, right_h),
                ));
            }
        }
    }
    match best {
        Some((_, feature, threshold, left_value, right_value)) => {
            Stump { feature, threshold, left_value, right_value }
        }
        None => {
            let v = leaf_value(total_r, total_h);
            Stump { feature: 0, threshold: f64::INFINITY, left_value: v, right_value: v }
        }
    }
}

fn gain_term(r: f64, h: f64) -> f64 {
    if h > 1e-12 {
        r * r / h
    } else {
        0.0
    }
}

fn leaf_value(r: f64, h: f64) -> f64 {
    if h > 1e-12 {
        (r / h).clamp(-MAX_LEAF_VALUE, MAX_LEAF_VALUE)
    } else {
        0.0
    }
}

impl GbmModel {
    fn label_for(&self, score: f64) -> Prediction {
        Prediction::Label(if score > 0.0 { 2 } else { 1 })
    }
}

impl ModelPath for GbmModel {
    fn predict_at(&self, x: &[f64], j: usize) -> Prediction {
        let rounds = self.rounds[j].min(self.stumps.len());
        let mut score = self.baseline;
        for stump in &self.stumps[..rounds] {
            score += SHRINKAGE * stump.eval(x);
        }
        self.label_for(score)
    }

    fn predict_path(&self, x: &[f64], t: usize) -> Vec<Prediction> {
        // Cumulative scores once; read each grid round off the path.
        let mut by_round = Vec::with_capacity(self.stumps.len() + 1);
        let mut score = self.baseline;
        by_round.push(score);
        for stump in &self.stumps {
            score += SHRINKAGE * stump.eval(x);
            by_round.push(score);
        }
        (0..t)
            .map(|j| self.label_for(by_round[self.rounds[j].min(self.stumps.len())]))
            .collect()
    }
}
