//! Nearest shrunken centroids: diagonal discriminant analysis with
//! soft-thresholded standardized centroid differences.
//!
//! Class centroids are compared to the overall centroid, standardized by
//! `m_g * (s_i + s0)` where `s_i` is the pooled within-class standard
//! deviation, `s0` the median of the `s_i`, and `m_g = sqrt(1/n_g - 1/n)`.
//! The threshold grid shrinks those differences toward zero; at threshold 0
//! the model is plain unshrunken diagonal discriminant analysis. Priors are
//! treated as equal.

use crate::dataset::Dataset;
use crate::error::{Error, Result};

use super::{soft_threshold, ModelPath, Prediction};

pub(super) struct CentroidStats {
    /// Labels of the classes actually present, ascending.
    pub classes: Vec<usize>,
    /// Overall per-feature mean.
    pub overall: Vec<f64>,
    /// Standardized centroid differences, one row of length p per class.
    pub diffs: Vec<Vec<f64>>,
    /// `m_g * (s_i + s0)` scale per (class, feature), for un-standardizing.
    pub scales: Vec<Vec<f64>>,
    /// `s_i + s0` per feature (zero only when every feature is constant).
    pub denoms: Vec<f64>,
}

impl CentroidStats {
    pub fn max_abs_diff(&self) -> f64 {
        self.diffs
            .iter()
            .flat_map(|row| row.iter())
            .fold(0.0f64, |m, d| m.max(d.abs()))
    }

    /// Shrunken centroid of class slot `c` at threshold `delta`.
    fn centroid(&self, c: usize, delta: f64) -> Vec<f64> {
        self.overall
            .iter()
            .zip(self.diffs[c].iter().zip(&self.scales[c]))
            .map(|(o, (d, s))| o + s * soft_threshold(*d, delta))
            .collect()
    }

    /// Features whose shrunken difference survives in any class.
    #[cfg(test)]
    pub fn surviving_features(&self, delta: f64) -> usize {
        let p = self.overall.len();
        (0..p)
            .filter(|&i| self.diffs.iter().any(|row| soft_threshold(row[i], delta) != 0.0))
            .count()
    }
}

pub(super) fn centroid_stats(train: &Dataset) -> Result<CentroidStats> {
    let n = train.n();
    let p = train.p();
    let labels = train.labels();
    let classes = train.present_classes();
    if classes.len() < 2 {
        return Err(Error::invalid("centroid statistics need at least two classes present"));
    }

    let mut counts = vec![0usize; classes.len()];
    let mut class_of = vec![usize::MAX; train.class_count().unwrap() + 1];
    for (slot, &g) in classes.iter().enumerate() {
        class_of[g] = slot;
    }
    let mut means = vec![vec![0.0f64; p]; classes.len()];
    let mut overall = vec![0.0f64; p];
    for i in 0..n {
        let slot = class_of[labels[i]];
        counts[slot] += 1;
        for (j, &x) in train.row(i).iter().enumerate() {
            means[slot][j] += x;
            overall[j] += x;
        }
    }
    for (slot, m) in means.iter_mut().enumerate() {
        for v in m.iter_mut() {
            *v /= counts[slot] as f64;
        }
    }
    for v in overall.iter_mut() {
        *v /= n as f64;
    }

    // Pooled within-class variance per feature.
    let dof = n.saturating_sub(classes.len());
    let mut pooled = vec![0.0f64; p];
    if dof > 0 {
        for i in 0..n {
            let slot = class_of[labels[i]];
            for (j, &x) in train.row(i).iter().enumerate() {
                let d = x - means[slot][j];
                pooled[j] += d * d;
            }
        }
        for v in pooled.iter_mut() {
            *v = (*v / dof as f64).sqrt();
        }
    }
    let s0 = median(&pooled);
    // An exactly zero pooled SD is replaced by the stabilizer.
    let sd: Vec<f64> = pooled.iter().map(|&s| if s == 0.0 { s0 } else { s }).collect();

    let denoms: Vec<f64> = sd.iter().map(|&s| s + s0).collect();
    let mut diffs = Vec::with_capacity(classes.len());
    let mut scales = Vec::with_capacity(classes.len());
    for slot in 0..classes.len() {
        let m_g = (1.0 / counts[slot] as f64 - 1.0 / n as f64).max(0.0).sqrt();
        let mut drow = Vec::with_capacity(p);
        let mut srow = Vec::with_capacity(p);
        for j in 0..p {
            let scale = m_g * denoms[j];
            if scale > 0.0 {
                drow.push((means[slot][j] - overall[j]) / scale);
            } else {
                drow.push(0.0);
            }
            srow.push(scale);
        }
        diffs.push(drow);
        scales.push(srow);
    }

    Ok(CentroidStats { classes, overall, diffs, scales, denoms })
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let m = sorted.len();
    if m == 0 {
        0.0
    } else if m % 2 == 1 {
        sorted[m / 2]
    } else {
        0.5 * (sorted[m / 2 - 1] + sorted[m / 2])
    }
}

/// 30 thresholds, linear between the largest absolute standardized
/// difference and 0, most shrinkage first.
pub(super) fn default_grid(data: &Dataset) -> Result<Vec<f64>> {
    let stats = centroid_stats(data)?;
    let max = stats.max_abs_diff();
    if max <= 0.0 {
        return Err(Error::invalid("all centroid differences are zero; no threshold grid to build"));
    }
    Ok((0..30).map(|j| max * (29 - j) as f64 / 29.0).collect())
}

struct NscModel {
    classes: Vec<usize>,
    /// Per grid index, per class slot: shrunken centroid and the inverse
    /// squared denominators for the discriminant distance.
    centroids: Vec<Vec<Vec<f64>>>,
    inv_sq: Vec<f64>,
}

pub(super) fn fit(train: &Dataset, grid: &[f64]) -> Result<Box<dyn ModelPath>> {
    let stats = centroid_stats(train)?;
    // Dead features (denominator 0) drop out of the distance.
    let inv_sq: Vec<f64> = stats
        .denoms
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / (d * d) } else { 0.0 })
        .collect();

    let centroids: Vec<Vec<Vec<f64>>> = grid
        .iter()
        .map(|&delta| (0..stats.classes.len()).map(|c| stats.centroid(c, delta)).collect())
        .collect();

    Ok(Box::new(NscModel { classes: stats.classes, centroids, inv_sq }))
}

impl ModelPath for NscModel {
    fn predict_at(&self, x: &[f64], j: usize) -> Prediction {
        let mut best_slot = 0;
        let mut best_score = f64::INFINITY;
        for (slot, centroid) in self.centroids[j].iter().enumerate() {
            let score: f64 = x
                .iter()
                .zip(centroid.iter().zip(&self.inv_sq))
                .map(|(xi, (ci, w))| {
                    let d = xi - ci;
                    d * d * w
                })
                .sum();
            if score < best_score {
                best_score = score;
                best_slot = slot;
            }
        }
        Prediction::Label(self.classes[best_slot])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate_two_class_gaussian, SyntheticSpec, Targets};
    use crate::learners::{fit, LearnerConfig, LearnerKind, LearnerSpec, ThetaGrid};

    fn nsc_spec(grid: Vec<f64>) -> LearnerSpec {
        LearnerSpec::new(LearnerKind::Nsc, ThetaGrid::new(grid).unwrap()).unwrap()
    }

    #[test]
    fn zero_threshold_equals_unshrunken_diagonal_discriminant() {
        let data = generate_two_class_gaussian(&SyntheticSpec::new(30, 5, true), 17).unwrap();
        let stats = centroid_stats(&data).unwrap();
        let model = fit(&nsc_spec(vec![1.0, 0.0]), &data).unwrap();

        // Independent unshrunken DDA: argmin_g sum_i (x_i - mean_gi)^2/(s_i+s0)^2.
        let labels = data.labels();
        let mut counts = [0usize; 2];
        let mut means = vec![[0.0f64; 2]; data.p()];
        for i in 0..data.n() {
            let g = labels[i] - 1;
            counts[g] += 1;
            for j in 0..data.p() {
                means[j][g] += data.feature(i, j);
            }
        }
        for j in 0..data.p() {
            for g in 0..2 {
                means[j][g] /= counts[g] as f64;
            }
        }
        for probe in 0..data.n() {
            let x = data.row(probe);
            let mut scores = [0.0f64; 2];
            for g in 0..2 {
                for j in 0..data.p() {
                    let d = (x[j] - means[j][g]) / stats.denoms[j];
                    scores[g] += d * d;
                }
            }
            let expected = if scores[0] <= scores[1] { 1 } else { 2 };
            assert_eq!(model.predict(x, 1).unwrap(), Prediction::Label(expected));
        }
    }

    #[test]
    fn surviving_features_monotone_in_threshold() {
        let data = generate_two_class_gaussian(&SyntheticSpec::new(40, 20, true), 3).unwrap();
        let stats = centroid_stats(&data).unwrap();
        let max = stats.max_abs_diff();
        let mut last = usize::MAX;
        for step in 0..=10 {
            let delta = max * step as f64 / 10.0;
            let count = stats.surviving_features(delta);
            assert!(count <= last, "support grew from {last} to {count} at delta {delta}");
            last = count;
        }
        assert_eq!(stats.surviving_features(max), 0);
    }

    #[test]
    fn full_shrinkage_predicts_smallest_class() {
        let data = generate_two_class_gaussian(&SyntheticSpec::new(20, 4, false), 9).unwrap();
        let stats = centroid_stats(&data).unwrap();
        let model = fit(&nsc_spec(vec![stats.max_abs_diff(), 0.0]), &data).unwrap();
        // All centroids collapse onto the overall mean: every class ties.
        assert_eq!(model.predict(data.row(0), 0).unwrap(), Prediction::Label(1));
    }

    #[test]
    fn default_grid_is_descending_and_ends_at_zero() {
        let data = generate_two_class_gaussian(&SyntheticSpec::new(20, 6, true), 4).unwrap();
        let spec = LearnerConfig::new(LearnerKind::Nsc).resolve(&data, 5).unwrap();
        let values = spec.grid.values();
        assert_eq!(values.len(), 30);
        assert!(values.windows(2).all(|w| w[0] > w[1]));
        assert_eq!(*values.last().unwrap(), 0.0);
    }

    #[test]
    fn zero_variance_feature_does_not_poison_predictions() {
        // First feature constant; pooled SD 0 is replaced by the stabilizer.
        let features = vec![
            1.0, 0.0, //
            1.0, 0.2, //
            1.0, 1.9, //
            1.0, 2.1, //
        ];
        let data = Dataset::from_parts(
            features,
            2,
            Targets::Labels { labels: vec![1, 1, 2, 2], class_count: 2 },
        )
        .unwrap();
        let model = fit(&nsc_spec(vec![0.5, 0.0]), &data).unwrap();
        assert_eq!(model.predict(&[1.0, 0.1], 1).unwrap(), Prediction::Label(1));
        assert_eq!(model.predict(&[1.0, 2.0], 1).unwrap(), Prediction::Label(2));
    }
}
