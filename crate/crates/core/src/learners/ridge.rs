//! Single-predictor ridge regression, intercept handled by centering.
//!
//! `slope(lambda) = Sxy / (Sxx + lambda)` on centered data; prediction is
//! `mean(y) + slope * (x - mean(x))`. With `Sxx + lambda == 0` (constant
//! predictor at lambda 0) the slope falls back to 0, i.e. the mean model.

use crate::dataset::Dataset;
use crate::error::Result;

use super::{ModelPath, Prediction};

struct RidgeModel {
    x_mean: f64,
    y_mean: f64,
    sxy: f64,
    sxx: f64,
    lambdas: Vec<f64>,
}

pub(super) fn fit(train: &Dataset, grid: &[f64]) -> Result<Box<dyn ModelPath>> {
    let n = train.n();
    let y = train.values();
    let x_mean = (0..n).map(|i| train.feature(i, 0)).sum::<f64>() / n as f64;
    let y_mean = y.iter().sum::<f64>() / n as f64;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for i in 0..n {
        let dx = train.feature(i, 0) - x_mean;
        sxy += dx * (y[i] - y_mean);
        sxx += dx * dx;
    }
    Ok(Box::new(RidgeModel { x_mean, y_mean, sxy, sxx, lambdas: grid.to_vec() }))
}

impl ModelPath for RidgeModel {
    fn predict_at(&self, x: &[f64], j: usize) -> Prediction {
        let denom = self.sxx + self.lambdas[j];
        let slope = if denom > 0.0 { self.sxy / denom } else { 0.0 };
        Prediction::Value(self.y_mean + slope * (x[0] - self.x_mean))
    }
}
