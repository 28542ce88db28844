//! Loss functions: 0-1 for classification, squared error for regression.

use serde::{Deserialize, Serialize};

use crate::dataset::Task;
use crate::error::{Error, Result};
use crate::learners::Prediction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Loss {
    ZeroOne,
    Squared,
}

impl Loss {
    pub fn for_task(task: Task) -> Loss {
        match task {
            Task::Classification => Loss::ZeroOne,
            Task::Regression => Loss::Squared,
        }
    }

    pub fn matches_task(self, task: Task) -> bool {
        self == Loss::for_task(task)
    }

    /// Loss of `pred` against the true label (classification) or response
    /// (regression). The prediction kind must match the loss.
    pub fn eval(self, true_label: Option<usize>, true_value: Option<f64>, pred: &Prediction) -> Result<f64> {
        match (self, pred) {
            (Loss::ZeroOne, Prediction::Label(l)) => {
                let y = true_label.ok_or_else(|| Error::invalid("0-1 loss needs a class label"))?;
                Ok(if *l == y { 0.0 } else { 1.0 })
            }
            (Loss::Squared, Prediction::Value(v)) => {
                let y = true_value.ok_or_else(|| Error::invalid("squared loss needs a real response"))?;
                let d = y - v;
                Ok(d * d)
            }
            _ => Err(Error::invalid("prediction kind does not match the loss")),
        }
    }
}

impl std::fmt::Display for Loss {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Loss::ZeroOne => write!(f, "zero-one"),
            Loss::Squared => write!(f, "squared"),
        }
    }
}
