//! Linear discriminant analysis with a pooled covariance shrunk toward its
//! diagonal; the shrinkage weight is the tuning parameter.
//!
//! The pooled covariance gets a small ridge (1e-6 * trace/p) before
//! shrinkage so the Cholesky solve is always defined.

use crate::dataset::Dataset;
use crate::error::Result;
use crate::linalg::{cholesky, cholesky_solve};

use super::{ModelPath, Prediction};

struct LdaModel {
    classes: Vec<usize>,
    /// Per grid index, per class slot: discriminant weights and offset.
    weights: Vec<Vec<Vec<f64>>>,
    offsets: Vec<Vec<f64>>,
}

pub(super) fn fit(train: &Dataset, grid: &[f64]) -> Result<Box<dyn ModelPath>> {
    let n = train.n();
    let p = train.p();
    let labels = train.labels();
    let classes = train.present_classes();
    let mut class_of = vec![usize::MAX; train.class_count().unwrap() + 1];
    for (slot, &g) in classes.iter().enumerate() {
        class_of[g] = slot;
    }

    let mut counts = vec![0usize; classes.len()];
    let mut means = vec![vec![0.0f64; p]; classes.len()];
    for i in 0..n {
        let slot = class_of[labels[i]];
        counts[slot] += 1;
        for (j, &x) in train.row(i).iter().enumerate() {
            means[slot][j] += x;
        }
    }
    for (slot, m) in means.iter_mut().enumerate() {
        for v in m.iter_mut() {
            *v /= counts[slot] as f64;
        }
    }

    // Pooled within-class covariance.
    let dof = n.saturating_sub(classes.len()).max(1);
    let mut cov = vec![0.0f64; p * p];
    for i in 0..n {
        let slot = class_of[labels[i]];
        let row = train.row(i);
        for a in 0..p {
            let da = row[a] - means[slot][a];
            for b in a..p {
                cov[a * p + b] += da * (row[b] - means[slot][b]);
            }
        }
    }
    for a in 0..p {
        for b in a..p {
            cov[a * p + b] /= dof as f64;
            cov[b * p + a] = cov[a * p + b];
        }
    }
    let trace: f64 = (0..p).map(|a| cov[a * p + a]).sum();
    let ridge = (1e-6 * trace / p as f64).max(1e-12);
    for a in 0..p {
        cov[a * p + a] += ridge;
    }

    let priors: Vec<f64> = counts.iter().map(|&c| (c as f64 / n as f64).ln()).collect();
    let mut weights = Vec::with_capacity(grid.len());
    let mut offsets = Vec::with_capacity(grid.len());
    for &alpha in grid {
        // Shrink toward the diagonal: (1 - alpha) * S + alpha * diag(S).
        let mut shrunk = vec![0.0f64; p * p];
        for a in 0..p {
            for b in 0..p {
                let v = cov[a * p + b];
                shrunk[a * p + b] = if a == b { v } else { (1.0 - alpha) * v };
            }
        }
        let l = cholesky(&shrunk, p)?;
        let mut w_per_class = Vec::with_capacity(classes.len());
        let mut off_per_class = Vec::with_capacity(classes.len());
        for (slot, mean) in means.iter().enumerate() {
            let w = cholesky_solve(&l, p, mean);
            let half_quad: f64 = 0.5 * w.iter().zip(mean).map(|(wi, mi)| wi * mi).sum::<f64>();
            off_per_class.push(priors[slot] - half_quad);
            w_per_class.push(w);
        }
        weights.push(w_per_class);
        offsets.push(off_per_class);
    }

    Ok(Box::new(LdaModel { classes, weights, offsets }))
}

impl ModelPath for LdaModel {
    fn predict_at(&self, x: &[f64], j: usize) -> Prediction {
        let mut best_slot = 0;
        let mut best = f64::NEG_INFINITY;
        for (slot, w) in self.weights[j].iter().enumerate() {
            let score: f64 =
                w.iter().zip(x).map(|(wi, xi)| wi * xi).sum::<f64>() + self.offsets[j][slot];
            if score > best {
                best = score;
                best_slot = slot;
            }
        }
        Prediction::Label(self.classes[best_slot])
    }
}
