//! Classification tree: binary axis-aligned splits chosen by Gini
//! impurity, maximum depth as the tuning parameter.
//!
//! The tree is grown once to the deepest grid value; predicting at a
//! shallower depth walks the same tree and stops early, which equals
//! refitting with that depth cap because split choices never look at the
//! depth limit. Tie-breaks: split score ties keep the smallest feature
//! index then the smallest threshold; majority votes keep the smallest
//! class index.

use crate::dataset::Dataset;
use crate::error::Result;

use super::{majority_class, ModelPath, Prediction};

const MIN_LEAF: usize = 5;

struct Node {
    majority: usize,
    /// `(feature, threshold, left_child, right_child)`; `x <= threshold`
    /// goes left.
    split: Option<(usize, f64, usize, usize)>,
}

struct CartModel {
    nodes: Vec<Node>,
    depths: Vec<usize>,
}

pub(super) fn fit(train: &Dataset, grid: &[f64]) -> Result<Box<dyn ModelPath>> {
    let depths: Vec<usize> = grid.iter().map(|&d| d as usize).collect();
    let max_depth = depths.iter().copied().max().unwrap_or(0);
    let mut builder = Builder {
        data: train,
        class_count: train.class_count().unwrap(),
        nodes: Vec::new(),
    };
    let all_rows: Vec<usize> = (0..train.n()).collect();
    builder.grow(all_rows, 0, max_depth);
    Ok(Box::new(CartModel { nodes: builder.nodes, depths }))
}

struct Builder<'a> {
    data: &'a Dataset,
    class_count: usize,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn grow(&mut self, rows: Vec<usize>, depth: usize, max_depth: usize) -> usize {
        let labels = self.data.labels();
        let node_labels: Vec<usize> = rows.iter().map(|&i| labels[i]).collect();
        let majority = majority_class(&node_labels, self.class_count);
        let id = self.nodes.len();
        self.nodes.push(Node { majority, split: None });

        let pure = node_labels.iter().all(|&l| l == node_labels[0]);
        if depth >= max_depth || pure || rows.len() < 2 * MIN_LEAF {
            return id;
        }
        let Some((feature, threshold)) = self.best_split(&rows) else {
            return id;
        };
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
            rows.into_iter().partition(|&i| self.data.feature(i, feature) <= threshold);
        let left = self.grow(left_rows, depth + 1, max_depth);
        let right = self.grow(right_rows, depth + 1, max_depth);
        self.nodes[id].split = Some((feature, threshold, left, right));
        id
    }

    /// Minimizes the size-weighted child Gini impurity; returns `None` when
    /// no split leaves MIN_LEAF rows on each side (constant features have
    /// no candidate thresholds and are skipped naturally).
    fn best_split(&self, rows: &[usize]) -> Option<(usize, f64)> {
        let labels = self.data.labels();
        let g = self.class_count;
        let total = rows.len();
        let mut best: Option<(f64, usize, f64)> = None;

        let mut ordered: Vec<(f64, usize)> = Vec::with_capacity(total);
        for feature in 0..self.data.p() {
            ordered.clear();
            ordered.extend(rows.iter().map(|&i| (self.data.feature(i, feature), labels[i])));
            ordered.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

            let mut right_counts = vec![0usize; g + 1];
            for &(_, l) in &ordered {
                right_counts[l] += 1;
            }
            let mut left_counts = vec![0usize; g + 1];
            for cut in 1..total {
                let (value, label) = ordered[cut - 1];
                left_counts[label] += 1;
                right_counts[label] -= 1;
                let next = ordered[cut].0;
                if next == value {
                    continue;
                }
                if cut < MIN_LEAF || total - cut < MIN_LEAF {
                    continue;
                }
                let score = weighted_gini(&left_counts, cut) + weighted_gini(&right_counts, total - cut);
                let threshold = value + (next - value) / 2.0;
                let better = match best {
                    None => true,
                    Some((s, _, _)) => score < s,
                };
                if better {
                    best = Some((score, feature, threshold));
                }
            }
        }
        best.map(|(_, feature, threshold)| (feature, threshold))
    }
}

fn weighted_gini(counts: &[usize], size: usize) -> f64 {
    let n = size as f64;
    let sum_sq: f64 = counts.iter().map(|&c| (c as f64) * (c as f64)).sum();
    n - sum_sq / n
}

impl CartModel {
    /// Nodes along the root-to-leaf path for `x`, index = depth.
    fn path(&self, x: &[f64], cap: usize) -> usize {
        let mut node = 0;
        let mut depth = 0;
        while depth < cap {
            match self.nodes[node].split {
                Some((feature, threshold, left, right)) => {
                    node = if x[feature] <= threshold { left } else { right };
                    depth += 1;
                }
                None => break,
            }
        }
        node
    }
}

impl ModelPath for CartModel {
    fn predict_at(&self, x: &[f64], j: usize) -> Prediction {
        Prediction::Label(self.nodes[self.path(x, self.depths[j])].majority)
    }

    fn predict_path(&self, x: &[f64], t: usize) -> Vec<Prediction> {
        // One walk to the deepest node; every grid depth reads off the path.
        let mut path_majorities = vec![self.nodes[0].majority];
        let mut node = 0;
        while let Some((feature, threshold, left, right)) = self.nodes[node].split {
            node = if x[feature] <= threshold { left } else { right };
            path_majorities.push(self.nodes[node].majority);
        }
        (0..t)
            .map(|j| {
                let d = self.depths[j].min(path_majorities.len() - 1);
                Prediction::Label(path_majorities[d])
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate_two_class_gaussian, SyntheticSpec, Targets};
    use crate::learners::{fit, LearnerKind, LearnerSpec, ThetaGrid};

    fn cart_spec(depths: Vec<f64>) -> LearnerSpec {
        LearnerSpec::new(LearnerKind::Cart, ThetaGrid::new(depths).unwrap()).unwrap()
    }

    fn stripe_data() -> Dataset {
        // Class 2 iff x0 > 0.5; ten rows per side so MIN_LEAF is satisfied.
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for i in 0..20 {
            let x = i as f64 / 19.0;
            features.push(x);
            features.push((i as f64 * 0.713).sin());
            labels.push(if x > 0.5 { 2 } else { 1 });
        }
        Dataset::from_parts(features, 2, Targets::Labels { labels, class_count: 2 }).unwrap()
    }

    #[test]
    fn depth_zero_is_majority_vote() {
        let data = stripe_data();
        let model = fit(&cart_spec(vec![0.0, 1.0]), &data).unwrap();
        assert_eq!(model.predict(&[0.9, 0.0], 0).unwrap(), Prediction::Label(1));
    }

    #[test]
    fn one_split_recovers_the_stripe() {
        let data = stripe_data();
        let model = fit(&cart_spec(vec![0.0, 1.0]), &data).unwrap();
        assert_eq!(model.predict(&[0.9, 0.3], 1).unwrap(), Prediction::Label(2));
        assert_eq!(model.predict(&[0.1, -0.3], 1).unwrap(), Prediction::Label(1));
    }

    #[test]
    fn truncated_depth_equals_refit() {
        let data = generate_two_class_gaussian(&SyntheticSpec::new(60, 3, true), 21).unwrap();
        let full = fit(&cart_spec((0..=6).map(|d| d as f64).collect()), &data).unwrap();
        let shallow = fit(&cart_spec(vec![0.0, 1.0, 2.0]), &data).unwrap();
        for i in 0..data.n() {
            let x = data.row(i);
            assert_eq!(
                full.predict_all(x).unwrap()[..3],
                shallow.predict_all(x).unwrap()[..]
            );
        }
    }

    #[test]
    fn min_leaf_blocks_tiny_splits() {
        // 8 rows cannot produce two children of 5.
        let features: Vec<f64> = (0..8).map(|i| i as f64).collect();
        let data = Dataset::from_parts(
            features,
            1,
            Targets::Labels { labels: vec![1, 1, 1, 1, 2, 2, 2, 2], class_count: 2 },
        )
        .unwrap();
        let model = fit(&cart_spec(vec![0.0, 3.0]), &data).unwrap();
        // Root never splits: prediction is the majority (tie -> class 1).
        assert_eq!(model.predict(&[7.0], 1).unwrap(), Prediction::Label(1));
    }
}
