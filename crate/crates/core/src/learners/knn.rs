//! K-nearest neighbors with Euclidean distance.
//!
//! Vote ties break to the smallest class index; distance ties to the
//! smallest training-row index, which also makes duplicated rows (bootstrap
//! resamples) deterministic.

use crate::dataset::Dataset;
use crate::error::{Error, Result};

use super::{ModelPath, Prediction};

struct KnnModel {
    features: Vec<f64>,
    labels: Vec<usize>,
    n: usize,
    p: usize,
    class_count: usize,
    neighbor_counts: Vec<usize>,
}

pub(super) fn fit(train: &Dataset, grid: &[f64]) -> Result<Box<dyn ModelPath>> {
    let neighbor_counts: Vec<usize> = grid.iter().map(|&k| k as usize).collect();
    let mut features = Vec::with_capacity(train.n() * train.p());
    for i in 0..train.n() {
        features.extend_from_slice(train.row(i));
    }
    Ok(Box::new(KnnModel {
        features,
        labels: train.labels().to_vec(),
        n: train.n(),
        p: train.p(),
        class_count: train.class_count().unwrap(),
        neighbor_counts,
    }))
}

/// Default neighbor grid: odd counts growing by ~45% (1, 3, 5, 7, 11, 15,
/// 21, 31, 45, ...), kept strictly below the smallest training-fold size,
/// ordered most-smoothing first.
pub(super) fn default_grid(min_train_size: usize) -> Result<Vec<f64>> {
    let mut ks: Vec<usize> = Vec::new();
    let mut k = 1usize;
    while k < min_train_size {
        ks.push(k);
        let next = nearest_odd(1.45 * k as f64);
        k = if next > k { next } else { k + 2 };
    }
    if ks.len() < 2 {
        return Err(Error::invalid(format!(
            "training folds of size {min_train_size} are too small for a neighbor grid"
        )));
    }
    ks.reverse();
    Ok(ks.into_iter().map(|k| k as f64).collect())
}

fn nearest_odd(x: f64) -> usize {
    let lo = {
        let f = x.floor() as usize;
        if f % 2 == 0 { f.saturating_sub(1) } else { f }
    };
    let lo = lo.max(1);
    let hi = lo + 2;
    if x - lo as f64 <= hi as f64 - x {
        lo
    } else {
        hi
    }
}

impl KnnModel {
    fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.p..(i + 1) * self.p]
    }

    /// Training rows ordered by (distance, row index).
    fn ranked_neighbors(&self, x: &[f64]) -> Vec<(f64, usize)> {
        let mut ranked: Vec<(f64, usize)> = (0..self.n)
            .map(|i| {
                let d = self
                    .row(i)
                    .iter()
                    .zip(x)
                    .map(|(a, b)| {
                        let diff = a - b;
                        diff * diff
                    })
                    .sum::<f64>();
                (d, i)
            })
            .collect();
        ranked.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        ranked
    }

    fn vote(&self, ranked: &[(f64, usize)], k: usize) -> usize {
        let k = k.min(self.n);
        let mut counts = vec![0usize; self.class_count + 1];
        for &(_, i) in &ranked[..k] {
            counts[self.labels[i]] += 1;
        }
        let mut best = 1;
        for g in 2..=self.class_count {
            if counts[g] > counts[best] {
                best = g;
            }
        }
        best
    }
}

impl ModelPath for KnnModel {
    fn predict_at(&self, x: &[f64], j: usize) -> Prediction {
        let ranked = self.ranked_neighbors(x);
        Prediction::Label(self.vote(&ranked, self.neighbor_counts[j]))
    }

    fn predict_path(&self, x: &[f64], t: usize) -> Vec<Prediction> {
        // One distance pass serves every k on the grid.
        let ranked = self.ranked_neighbors(x);
        (0..t)
            .map(|j| Prediction::Label(self.vote(&ranked, self.neighbor_counts[j])))
            .collect()
    }
}
