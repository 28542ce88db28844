//! Data model, CSV ingestion, and synthetic two-class Gaussian generators.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream_rng, streams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Classification,
    Regression,
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Task::Classification => write!(f, "classification"),
            Task::Regression => write!(f, "regression"),
        }
    }
}

/// Targets: class labels in `1..=G` or real responses.
#[derive(Debug, Clone, PartialEq)]
pub enum Targets {
    Labels { labels: Vec<usize>, class_count: usize },
    Values(Vec<f64>),
}

impl Targets {
    pub fn len(&self) -> usize {
        match self {
            Targets::Labels { labels, .. } => labels.len(),
            Targets::Values(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// An immutable feature matrix with labels or responses.
///
/// Rows are observations, columns predictors, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n: usize,
    p: usize,
    features: Vec<f64>,
    targets: Targets,
}

impl Dataset {
    /// Builds a dataset from row-major features and targets, checking the
    /// shape and label invariants.
    pub fn from_parts(features: Vec<f64>, p: usize, targets: Targets) -> Result<Self> {
        let n = targets.len();
        if n < 2 {
            return Err(Error::invalid(format!("need at least 2 observations, got {n}")));
        }
        if p < 1 {
            return Err(Error::invalid("need at least 1 predictor"));
        }
        if features.len() != n * p {
            return Err(Error::invalid(format!(
                "feature matrix has {} entries, expected n*p = {}*{}",
                features.len(),
                n,
                p
            )));
        }
        if let Targets::Labels { labels, class_count } = &targets {
            if *class_count == 0 {
                return Err(Error::invalid("class count must be positive"));
            }
            if let Some(bad) = labels.iter().find(|&&l| l == 0 || l > *class_count) {
                return Err(Error::invalid(format!(
                    "label {bad} outside 1..={class_count}"
                )));
            }
        }
        Ok(Dataset { n, p, features, targets })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn task(&self) -> Task {
        match self.targets {
            Targets::Labels { .. } => Task::Classification,
            Targets::Values(_) => Task::Regression,
        }
    }

    pub fn targets(&self) -> &Targets {
        &self.targets
    }

    /// Class count G; `None` for regression.
    pub fn class_count(&self) -> Option<usize> {
        match &self.targets {
            Targets::Labels { class_count, .. } => Some(*class_count),
            Targets::Values(_) => None,
        }
    }

    /// Labels in `1..=G`. Panics on regression data; gate on [`Self::task`].
    pub fn labels(&self) -> &[usize] {
        match &self.targets {
            Targets::Labels { labels, .. } => labels,
            Targets::Values(_) => panic!("labels() on regression targets"),
        }
    }

    pub fn values(&self) -> &[f64] {
        match &self.targets {
            Targets::Values(v) => v,
            Targets::Labels { .. } => panic!("values() on classification targets"),
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.p..(i + 1) * self.p]
    }

    pub fn feature(&self, i: usize, j: usize) -> f64 {
        self.features[i * self.p + j]
    }

    /// Copies the given rows into a new dataset (used for fold training sets
    /// and bootstrap resamples; duplicate indices are allowed). Unlike
    /// [`Self::from_parts`] this permits a single row, so leave-one-out-style
    /// splits of tiny datasets still reach the learners' degenerate
    /// fallbacks instead of erroring here.
    pub fn subset(&self, rows: &[usize]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::invalid("cannot take an empty subset"));
        }
        if let Some(&bad) = rows.iter().find(|&&r| r >= self.n) {
            return Err(Error::invalid(format!("row index {bad} out of range (n={})", self.n)));
        }
        let mut features = Vec::with_capacity(rows.len() * self.p);
        for &r in rows {
            features.extend_from_slice(self.row(r));
        }
        let targets = match &self.targets {
            Targets::Labels { labels, class_count } => Targets::Labels {
                labels: rows.iter().map(|&r| labels[r]).collect(),
                class_count: *class_count,
            },
            Targets::Values(v) => Targets::Values(rows.iter().map(|&r| v[r]).collect()),
        };
        Ok(Dataset { n: rows.len(), p: self.p, features, targets })
    }

    /// Distinct labels present, ascending. Empty for regression.
    pub fn present_classes(&self) -> Vec<usize> {
        match &self.targets {
            Targets::Labels { labels, class_count } => {
                let mut seen = vec![false; *class_count + 1];
                for &l in labels {
                    seen[l] = true;
                }
                (1..=*class_count).filter(|&g| seen[g]).collect()
            }
            Targets::Values(_) => Vec::new(),
        }
    }
}

/// Parameters of the two-class Gaussian generator.
///
/// Features are i.i.d. standard normal; under `signal`, the first
/// `ceil(signal_fraction * p)` features get `shift` added in class 2.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n: usize,
    pub p: usize,
    pub signal: bool,
    pub shift: f64,
    pub signal_fraction: f64,
}

impl SyntheticSpec {
    pub fn new(n: usize, p: usize, signal: bool) -> Self {
        SyntheticSpec { n, p, signal, shift: 0.5, signal_fraction: 0.10 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.n % 2 != 0 {
            return Err(Error::invalid(format!(
                "two-class generator needs an even n >= 2, got {}",
                self.n
            )));
        }
        if self.p < 1 {
            return Err(Error::invalid("need p >= 1"));
        }
        if !(0.0..=1.0).contains(&self.signal_fraction) {
            return Err(Error::invalid(format!(
                "signal_fraction must lie in [0, 1], got {}",
                self.signal_fraction
            )));
        }
        Ok(())
    }

    /// Number of leading features that carry the mean shift.
    pub fn shifted_features(&self) -> usize {
        if self.signal {
            (self.signal_fraction * self.p as f64).ceil() as usize
        } else {
            0
        }
    }
}

/// Draws a two-class dataset: rows `0..n/2` are class 1, rows `n/2..n`
/// class 2, all features standard normal, plus the class-2 mean shift when
/// `signal` is on. Deterministic given `seed`.
pub fn generate_two_class_gaussian(spec: &SyntheticSpec, seed: u64) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = stream_rng(seed, streams::DATA);
    let half = spec.n / 2;
    let shifted = spec.shifted_features();
    let mut features = Vec::with_capacity(spec.n * spec.p);
    for i in 0..spec.n {
        for j in 0..spec.p {
            let mut x: f64 = rng.sample(StandardNormal);
            if i >= half && j < shifted {
                x += spec.shift;
            }
            features.push(x);
        }
    }
    let labels: Vec<usize> = (0..spec.n).map(|i| if i < half { 1 } else { 2 }).collect();
    Dataset::from_parts(features, spec.p, Targets::Labels { labels, class_count: 2 })
}

/// Null dataset with `class_count` equiprobable classes: labels carry no
/// information about the standard-normal features. Used by the
/// no-signal calibration check, which needs G > 2.
pub fn generate_equiprobable_null(
    n: usize,
    p: usize,
    class_count: usize,
    seed: u64,
) -> Result<Dataset> {
    if class_count < 2 {
        return Err(Error::invalid("need at least 2 classes"));
    }
    if n % class_count != 0 {
        return Err(Error::invalid(format!(
            "n = {n} not divisible by class count {class_count}"
        )));
    }
    let mut rng = stream_rng(seed, streams::DATA);
    let features: Vec<f64> = (0..n * p).map(|_| rng.sample(StandardNormal)).collect();
    let per_class = n / class_count;
    let labels: Vec<usize> = (0..n).map(|i| i / per_class + 1).collect();
    Dataset::from_parts(features, p, Targets::Labels { labels, class_count })
}

/// Name -> class index mapping produced by the CSV loader
/// (classes numbered by first appearance in the file).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LabelMapping {
    pub names: Vec<String>,
}

impl LabelMapping {
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name).map(|i| i + 1)
    }
}

/// Loads a headered CSV file. Every column except `label_column` is a
/// numeric feature; the label column is mapped to `1..=G` by first
/// appearance (classification) or parsed as reals (regression).
pub fn load_csv(path: &Path, label_column: &str, task: Task) -> Result<(Dataset, LabelMapping)> {
    let io_err = |source| Error::Io { path: path.display().to_string(), source };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(source) => io_err(source),
            other => Error::Parse {
                path: path.display().to_string(),
                row: 0,
                column: String::new(),
                message: format!("{other:?}"),
            },
        })?;

    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Parse {
            path: path.display().to_string(),
            row: 0,
            column: String::new(),
            message: e.to_string(),
        })?
        .iter()
        .map(str::to_owned)
        .collect();
    let label_idx = headers.iter().position(|h| h == label_column).ok_or_else(|| {
        Error::Parse {
            path: path.display().to_string(),
            row: 0,
            column: label_column.to_string(),
            message: format!("label column not found among {headers:?}"),
        }
    })?;
    let feature_names: Vec<&String> =
        headers.iter().enumerate().filter(|(i, _)| *i != label_idx).map(|(_, h)| h).collect();
    let p = feature_names.len();
    if p == 0 {
        return Err(Error::Parse {
            path: path.display().to_string(),
            row: 0,
            column: String::new(),
            message: "no feature columns besides the label".to_string(),
        });
    }

    let mut features = Vec::new();
    let mut raw_labels: Vec<String> = Vec::new();
    let mut reals: Vec<f64> = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let row = row_idx + 1; // 1-based data row, excluding the header
        let record = record.map_err(|e| Error::Parse {
            path: path.display().to_string(),
            row,
            column: String::new(),
            message: e.to_string(),
        })?;
        if record.len() != headers.len() {
            return Err(Error::Parse {
                path: path.display().to_string(),
                row,
                column: String::new(),
                message: format!("expected {} fields, found {}", headers.len(), record.len()),
            });
        }
        for (col_idx, field) in record.iter().enumerate() {
            if col_idx == label_idx {
                match task {
                    Task::Classification => raw_labels.push(field.to_string()),
                    Task::Regression => reals.push(parse_cell(field, path, row, &headers[col_idx])?),
                }
            } else {
                features.push(parse_cell(field, path, row, &headers[col_idx])?);
            }
        }
    }
    let n = match task {
        Task::Classification => raw_labels.len(),
        Task::Regression => reals.len(),
    };
    if n == 0 {
        return Err(Error::Parse {
            path: path.display().to_string(),
            row: 0,
            column: String::new(),
            message: "file has no data rows".to_string(),
        });
    }

    let (targets, mapping) = match task {
        Task::Classification => {
            let mut names: Vec<String> = Vec::new();
            let mut labels = Vec::with_capacity(n);
            for name in &raw_labels {
                let idx = match names.iter().position(|k| k == name) {
                    Some(i) => i + 1,
                    None => {
                        names.push(name.clone());
                        names.len()
                    }
                };
                labels.push(idx);
            }
            let class_count = names.len();
            (Targets::Labels { labels, class_count }, LabelMapping { names })
        }
        Task::Regression => (Targets::Values(reals), LabelMapping { names: Vec::new() }),
    };
    Ok((Dataset::from_parts(features, p, targets)?, mapping))
}

fn parse_cell(field: &str, path: &Path, row: usize, column: &str) -> Result<f64> {
    let trimmed = field.trim();
    if trimmed.is_empty() {
        return Err(Error::Parse {
            path: path.display().to_string(),
            row,
            column: column.to_string(),
            message: "missing value (missing values are rejected, not imputed)".to_string(),
        });
    }
    trimmed.parse::<f64>().map_err(|_| Error::Parse {
        path: path.display().to_string(),
        row,
        column: column.to_string(),
        message: format!("not a number: {trimmed:?}"),
    })
}

/// Writes a dataset as CSV (features f1..fp plus a label column).
/// Floats use the shortest round-trip decimal form.
pub fn write_csv(data: &Dataset, path: &Path, label_column: &str) -> Result<()> {
    let mut out = String::new();
    for j in 0..data.p() {
        let _ = write!(out, "f{},", j + 1);
    }
    out.push_str(label_column);
    out.push('\n');
    for i in 0..data.n() {
        for v in data.row(i) {
            let _ = write!(out, "{v},");
        }
        match data.targets() {
            Targets::Labels { labels, .. } => {
                let _ = write!(out, "{}", labels[i]);
            }
            Targets::Values(v) => {
                let _ = write!(out, "{}", v[i]);
            }
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

/// Columnar cache format: exact round-trip of a dataset, labels included.
///
/// Layout (one record per line, space separated):
/// ```text
/// cvdataset 1
/// task classification        # or: task regression
/// classes 2                  # classification only
/// rows 4
/// cols 2
/// feature 1 <v..v>           # one line per feature column, n values each
/// feature 2 <v..v>
/// labels <l..l>              # or: values <v..v>
/// ```
pub fn save_cache(data: &Dataset, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str("cvdataset 1\n");
    let _ = writeln!(out, "task {}", data.task());
    if let Some(g) = data.class_count() {
        let _ = writeln!(out, "classes {g}");
    }
    let _ = writeln!(out, "rows {}", data.n());
    let _ = writeln!(out, "cols {}", data.p());
    for j in 0..data.p() {
        let _ = write!(out, "feature {}", j + 1);
        for i in 0..data.n() {
            let _ = write!(out, " {}", data.feature(i, j));
        }
        out.push('\n');
    }
    match data.targets() {
        Targets::Labels { labels, .. } => {
            out.push_str("labels");
            for l in labels {
                let _ = write!(out, " {l}");
            }
        }
        Targets::Values(v) => {
            out.push_str("values");
            for x in v {
                let _ = write!(out, " {x}");
            }
        }
    }
    out.push('\n');
    fs::write(path, out).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

pub fn load_cache(path: &Path) -> Result<Dataset> {
    let text = fs::read_to_string(path)
        .map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    let perr = |row: usize, message: String| Error::Parse {
        path: path.display().to_string(),
        row,
        column: String::new(),
        message,
    };
    let mut lines = text.lines().enumerate();
    let mut expect = |key: &str| -> Result<(usize, Vec<String>)> {
        let (i, line) = lines
            .next()
            .ok_or_else(|| perr(0, format!("unexpected end of file, wanted {key:?}")))?;
        let mut parts = line.split_whitespace();
        let head = parts.next().unwrap_or("");
        if head != key {
            return Err(perr(i + 1, format!("expected {key:?}, found {head:?}")));
        }
        Ok((i + 1, parts.map(str::to_owned).collect()))
    };

    let (row, version) = expect("cvdataset")?;
    if version.first().map(String::as_str) != Some("1") {
        return Err(perr(row, format!("unsupported version {version:?}")));
    }
    let (row, task) = expect("task")?;
    let task = match task.first().map(String::as_str) {
        Some("classification") => Task::Classification,
        Some("regression") => Task::Regression,
        other => return Err(perr(row, format!("unknown task {other:?}"))),
    };
    let class_count = if task == Task::Classification {
        let (row, g) = expect("classes")?;
        Some(
            g.first()
                .and_then(|s| s.parse::<usize>().ok())
                .ok_or_else(|| perr(row, "bad class count".to_string()))?,
        )
    } else {
        None
    };
    let (row, n) = expect("rows")?;
    let n: usize = n
        .first()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| perr(row, "bad row count".to_string()))?;
    let (row, p) = expect("cols")?;
    let p: usize = p
        .first()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| perr(row, "bad column count".to_string()))?;

    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(p);
    for _ in 0..p {
        let (row, vals) = expect("feature")?;
        if vals.len() != n + 1 {
            return Err(perr(row, format!("feature line has {} values, expected {}", vals.len().saturating_sub(1), n)));
        }
        let col: Vec<f64> = vals[1..]
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| perr(row, e.to_string()))?;
        columns.push(col);
    }
    let mut features = Vec::with_capacity(n * p);
    for i in 0..n {
        for col in &columns {
            features.push(col[i]);
        }
    }
    let targets = match task {
        Task::Classification => {
            let (row, vals) = expect("labels")?;
            if vals.len() != n {
                return Err(perr(row, format!("{} labels, expected {n}", vals.len())));
            }
            let labels: Vec<usize> = vals
                .iter()
                .map(|s| s.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| perr(row, e.to_string()))?;
            Targets::Labels { labels, class_count: class_count.unwrap() }
        }
        Task::Regression => {
            let (row, vals) = expect("values")?;
            if vals.len() != n {
                return Err(perr(row, format!("{} values, expected {n}", vals.len())));
            }
            let values: Vec<f64> = vals
                .iter()
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| perr(row, e.to_string()))?;
            Targets::Values(values)
        }
    };
    Dataset::from_parts(features, p, targets)
}
