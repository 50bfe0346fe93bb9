//! Column-oriented multi-label datasets: loading, discretization and synthesis.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Arc;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::DataError;

/// Global index of a feature column inside its [`Dataset`].
pub type FeatureId = usize;

/// One feature or label: a dense vector of category codes `0..cardinality`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DiscreteColumn {
    codes: Vec<u32>,
    cardinality: u32,
}

impl DiscreteColumn {
    /// Builds a column from arbitrary codes, renumbering the distinct values in
    /// ascending order to `0..cardinality`.
    pub fn from_codes(raw: &[u32]) -> Self {
        let mut distinct: Vec<u32> = raw.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        let codes = raw
            .iter()
            .map(|v| distinct.binary_search(v).expect("value is present") as u32)
            .collect();
        DiscreteColumn {
            codes,
            cardinality: distinct.len() as u32,
        }
    }

    /// Discretizes raw numeric observations according to `spec`.
    pub fn from_values(values: &[f64], spec: &BinningSpec) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut distinct = sorted.clone();
        distinct.dedup();

        if spec.strategy == BinningStrategy::None || distinct.len() <= spec.max_raw_categories {
            let codes: Vec<u32> = values
                .iter()
                .map(|v| distinct.partition_point(|d| d < v) as u32)
                .collect();
            return DiscreteColumn {
                codes,
                cardinality: distinct.len() as u32,
            };
        }

        let bins = spec.bins.max(2);
        let raw: Vec<u32> = match spec.strategy {
            BinningStrategy::EqualFrequency => {
                let n = sorted.len();
                // cut j sits at the first rank of bin j; tied values all land above the cut.
                // With fewer values than bins the last ranks are past the end: empty bins.
                let cuts: Vec<f64> = (1..bins)
                    .map(|j| {
                        sorted
                            .get((j * n).div_ceil(bins))
                            .copied()
                            .unwrap_or(f64::INFINITY)
                    })
                    .collect();
                values
                    .iter()
                    .map(|v| cuts.partition_point(|c| c <= v) as u32)
                    .collect()
            }
            BinningStrategy::EqualWidth => {
                let lo = sorted[0];
                let hi = sorted[sorted.len() - 1];
                let width = (hi - lo) / bins as f64;
                values
                    .iter()
                    .map(|v| (((v - lo) / width).floor() as usize).min(bins - 1) as u32)
                    .collect()
            }
            BinningStrategy::None => unreachable!(),
        };
        DiscreteColumn::from_codes(&raw)
    }

    pub fn codes(&self) -> &[u32] {
        &self.codes
    }

    pub fn cardinality(&self) -> u32 {
        self.cardinality
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BinningStrategy {
    EqualFrequency,
    EqualWidth,
    None,
}

/// How numeric columns with many distinct values are turned into categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinningSpec {
    pub strategy: BinningStrategy,
    pub bins: usize,
    /// Columns with at most this many distinct values are kept as categorical.
    pub max_raw_categories: usize,
}

impl Default for BinningSpec {
    fn default() -> Self {
        BinningSpec {
            strategy: BinningStrategy::EqualFrequency,
            bins: 5,
            max_raw_categories: 32,
        }
    }
}

impl BinningSpec {
    pub fn none() -> Self {
        BinningSpec {
            strategy: BinningStrategy::None,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.strategy != BinningStrategy::None && self.bins < 2 {
            return Err(format!("bins must be at least 2, got {}", self.bins));
        }
        Ok(())
    }
}

/// Immutable multi-label dataset. Columns are reference counted so worker
/// contexts can hold them without copying the codes.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n: usize,
    features: Vec<Arc<DiscreteColumn>>,
    feature_names: Vec<String>,
    labels: Vec<Arc<DiscreteColumn>>,
    label_names: Vec<String>,
}

impl Dataset {
    /// Validates and assembles a dataset. Labels must be binary unless
    /// `permissive_labels` is set.
    pub fn new(
        n: usize,
        features: Vec<(String, DiscreteColumn)>,
        labels: Vec<(String, DiscreteColumn)>,
        permissive_labels: bool,
    ) -> Result<Self, DataError> {
        const ORIGIN: &str = "dataset";
        if features.is_empty() {
            return Err(DataError::validation(ORIGIN, "no feature columns"));
        }
        if labels.is_empty() {
            return Err(DataError::validation(ORIGIN, "no label columns"));
        }
        for (name, col) in features.iter().chain(labels.iter()) {
            if col.len() != n {
                return Err(DataError::validation(
                    ORIGIN,
                    format!("column {name:?} has {} rows, expected {n}", col.len()),
                ));
            }
        }
        check_unique(features.iter().map(|(n, _)| n.as_str()), "feature")?;
        check_unique(labels.iter().map(|(n, _)| n.as_str()), "label")?;
        if !permissive_labels {
            if let Some((name, col)) = labels.iter().find(|(_, c)| c.cardinality() > 2) {
                return Err(DataError::validation(
                    ORIGIN,
                    format!(
                        "label {name:?} has {} distinct values; labels must be binary",
                        col.cardinality()
                    ),
                ));
            }
        }
        let (feature_names, features) = features
            .into_iter()
            .map(|(name, col)| (name, Arc::new(col)))
            .unzip();
        let (label_names, labels) = labels
            .into_iter()
            .map(|(name, col)| (name, Arc::new(col)))
            .unzip();
        Ok(Dataset {
            n,
            features,
            feature_names,
            labels,
            label_names,
        })
    }

    /// Instance count.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Feature count.
    pub fn d(&self) -> usize {
        self.features.len()
    }

    /// Label count.
    pub fn t(&self) -> usize {
        self.labels.len()
    }

    pub fn feature(&self, id: FeatureId) -> &Arc<DiscreteColumn> {
        &self.features[id]
    }

    pub fn features(&self) -> &[Arc<DiscreteColumn>] {
        &self.features
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn labels(&self) -> &[Arc<DiscreteColumn>] {
        &self.labels
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    pub fn feature_ids(&self) -> Vec<FeatureId> {
        (0..self.d()).collect()
    }

    /// Dense CSV with features first and labels in the last `t` columns.
    pub fn write_dense_csv<W: Write>(&self, mut out: W, header: bool) -> std::io::Result<()> {
        let columns: Vec<&DiscreteColumn> = self
            .features
            .iter()
            .chain(self.labels.iter())
            .map(|c| c.as_ref())
            .collect();
        if header {
            let names: Vec<&str> = self
                .feature_names
                .iter()
                .chain(self.label_names.iter())
                .map(String::as_str)
                .collect();
            writeln!(out, "{}", names.join(","))?;
        }
        let mut line = String::new();
        for row in 0..self.n {
            line.clear();
            for (j, col) in columns.iter().enumerate() {
                if j > 0 {
                    line.push(',');
                }
                line.push_str(&col.codes()[row].to_string());
            }
            writeln!(out, "{line}")?;
        }
        out.flush()
    }
}

fn check_unique<'a>(names: impl Iterator<Item = &'a str>, kind: &str) -> Result<(), DataError> {
    let mut seen = HashSet::new();
    for name in names {
        if !seen.insert(name) {
            return Err(DataError::validation(
                "dataset",
                format!("duplicate {kind} name {name:?}"),
            ));
        }
    }
    Ok(())
}

/// Options for [`load_dense_csv`].
#[derive(Debug, Clone)]
pub struct DenseCsvOptions {
    /// Number of trailing label columns.
    pub label_count: usize,
    pub has_header: bool,
    pub binning: BinningSpec,
    pub permissive_labels: bool,
}

impl DenseCsvOptions {
    pub fn new(label_count: usize) -> Self {
        DenseCsvOptions {
            label_count,
            has_header: false,
            binning: BinningSpec::default(),
            permissive_labels: false,
        }
    }

    pub fn header(mut self, has_header: bool) -> Self {
        self.has_header = has_header;
        self
    }

    pub fn binning(mut self, binning: BinningSpec) -> Self {
        self.binning = binning;
        self
    }

    pub fn permissive_labels(mut self, permissive: bool) -> Self {
        self.permissive_labels = permissive;
        self
    }
}

fn open(path: &Path) -> Result<BufReader<File>, DataError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| DataError::Io {
            path: path.to_path_buf(),
            source,
        })
}

pub fn load_dense_csv(
    path: impl AsRef<Path>,
    opts: &DenseCsvOptions,
) -> Result<Dataset, DataError> {
    let path = path.as_ref();
    read_dense_csv(open(path)?, &path.display().to_string(), opts)
}

/// Reads a dense CSV. `origin` names the input in error messages.
pub fn read_dense_csv<R: BufRead>(
    reader: R,
    origin: &str,
    opts: &DenseCsvOptions,
) -> Result<Dataset, DataError> {
    opts.binning
        .validate()
        .map_err(|m| DataError::validation(origin, m))?;
    if opts.label_count == 0 {
        return Err(DataError::validation(
            origin,
            "label count must be positive",
        ));
    }

    let mut header: Option<Vec<String>> = None;
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| DataError::parse(origin, lineno, e.to_string()))?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        match width {
            None => {
                width = Some(cells.len());
                columns = vec![Vec::new(); cells.len()];
            }
            Some(w) if w != cells.len() => {
                return Err(DataError::parse(
                    origin,
                    lineno,
                    format!("expected {w} cells, found {}", cells.len()),
                ));
            }
            Some(_) => {}
        }
        if opts.has_header && header.is_none() {
            header = Some(cells.iter().map(|c| c.trim().to_string()).collect());
            continue;
        }
        for (j, cell) in cells.iter().enumerate() {
            let cell = cell.trim();
            let value: f64 = cell
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| {
                    DataError::parse(
                        origin,
                        lineno,
                        format!("column {}: {cell:?} is not a finite number", j + 1),
                    )
                })?;
            columns[j].push(value);
        }
    }

    let width = width.unwrap_or(0);
    if opts.label_count >= width {
        return Err(DataError::validation(
            origin,
            format!(
                "{} label columns leave no features in a {width}-column file",
                opts.label_count
            ),
        ));
    }
    let names = header.unwrap_or_else(|| {
        let d = width - opts.label_count;
        (0..d)
            .map(|j| format!("f{j}"))
            .chain((0..opts.label_count).map(|j| format!("l{j}")))
            .collect()
    });
    let n = columns.first().map_or(0, Vec::len);
    let split = width - opts.label_count;

    let mut named = names.into_iter().zip(columns);
    let features: Vec<(String, DiscreteColumn)> = named
        .by_ref()
        .take(split)
        .map(|(name, values)| {
            let col = DiscreteColumn::from_values(&values, &opts.binning);
            (name, col)
        })
        .collect();
    let labels: Vec<(String, DiscreteColumn)> = named
        .map(|(name, values)| {
            (
                name,
                DiscreteColumn::from_values(&values, &BinningSpec::none()),
            )
        })
        .collect();
    Dataset::new(n, features, labels, opts.permissive_labels).map_err(|e| relabel_origin(e, origin))
}

fn relabel_origin(err: DataError, origin: &str) -> DataError {
    match err {
        DataError::Validation { message, .. } => DataError::validation(origin, message),
        other => other,
    }
}

/// Options for [`load_sparse_multilabel`].
#[derive(Debug, Clone)]
pub struct SparseOptions {
    pub n_features: usize,
    pub n_labels: usize,
    pub binning: BinningSpec,
}

impl SparseOptions {
    pub fn new(n_features: usize, n_labels: usize) -> Self {
        SparseOptions {
            n_features,
            n_labels,
            binning: BinningSpec::default(),
        }
    }
}

pub fn load_sparse_multilabel(
    path: impl AsRef<Path>,
    opts: &SparseOptions,
) -> Result<Dataset, DataError> {
    let path = path.as_ref();
    read_sparse_multilabel(open(path)?, &path.display().to_string(), opts)
}

/// Reads the sparse multi-label format: `<label ids> <index>:<value> ...` with
/// comma separated 0-based label ids and 1-based, strictly increasing feature
/// indices. Absent features read as 0. Blank lines are skipped.
pub fn read_sparse_multilabel<R: BufRead>(
    reader: R,
    origin: &str,
    opts: &SparseOptions,
) -> Result<Dataset, DataError> {
    opts.binning
        .validate()
        .map_err(|m| DataError::validation(origin, m))?;
    if opts.n_features == 0 || opts.n_labels == 0 {
        return Err(DataError::validation(
            origin,
            "feature and label counts must be positive",
        ));
    }
    let mut features: Vec<Vec<f64>> = vec![Vec::new(); opts.n_features];
    let mut labels: Vec<Vec<u32>> = vec![Vec::new(); opts.n_labels];

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| DataError::parse(origin, lineno, e.to_string()))?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            continue;
        }
        let mut tokens = line.split(' ').peekable();
        let label_field = match tokens.peek() {
            Some(tok) if !tok.contains(':') => tokens.next().unwrap_or(""),
            _ => "",
        };

        for l in labels.iter_mut() {
            l.push(0);
        }
        for id in label_field.split(',').filter(|s| !s.is_empty()) {
            let id: usize = id
                .parse()
                .map_err(|_| DataError::parse(origin, lineno, format!("bad label id {id:?}")))?;
            if id >= opts.n_labels {
                return Err(DataError::parse(
                    origin,
                    lineno,
                    format!("label id {id} out of range (n_labels = {})", opts.n_labels),
                ));
            }
            *labels[id].last_mut().expect("row pushed") = 1;
        }

        for col in features.iter_mut() {
            col.push(0.0);
        }
        let mut previous = 0usize;
        for tok in tokens.filter(|t| !t.is_empty()) {
            let (index, value) = tok.split_once(':').ok_or_else(|| {
                DataError::parse(origin, lineno, format!("expected index:value, got {tok:?}"))
            })?;
            let index: usize = index.parse().map_err(|_| {
                DataError::parse(origin, lineno, format!("bad feature index {index:?}"))
            })?;
            if index == 0 || index > opts.n_features {
                return Err(DataError::parse(
                    origin,
                    lineno,
                    format!("feature index {index} out of range 1..={}", opts.n_features),
                ));
            }
            if index <= previous {
                return Err(DataError::parse(
                    origin,
                    lineno,
                    format!("feature index {index} does not increase (previous {previous})"),
                ));
            }
            previous = index;
            let value: f64 = value
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| {
                    DataError::parse(origin, lineno, format!("bad feature value {value:?}"))
                })?;
            *features[index - 1].last_mut().expect("row pushed") = value;
        }
    }

    let n = labels[0].len();
    let features = features
        .into_iter()
        .enumerate()
        .map(|(j, values)| {
            (
                format!("f{}", j + 1),
                DiscreteColumn::from_values(&values, &opts.binning),
            )
        })
        .collect();
    let labels = labels
        .into_iter()
        .enumerate()
        .map(|(j, codes)| (format!("l{j}"), DiscreteColumn::from_codes(&codes)))
        .collect();
    Dataset::new(n, features, labels, false).map_err(|e| relabel_origin(e, origin))
}

pub const SYNTH_LABELS: usize = 8;
pub const SYNTH_INSTANCES: usize = 256;
pub const SYNTH_REPEATS: usize = 50;

/// The redundant-feature benchmark: 8 uniform binary labels over 256
/// instances. Each label owns two original features, one agreeing with it on
/// exactly half of the instances and one on exactly a quarter, and each
/// original feature is repeated 50 times (800 features in total).
///
/// Feature layout is label-major: for label `l`, ids `100 l .. 100 l + 50`
/// are copies of the half-agreement feature and the next 50 are copies of the
/// quarter-agreement feature.
pub fn generate_synthesized(seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = SYNTH_INSTANCES;
    let label_codes: Vec<Vec<u32>> = (0..SYNTH_LABELS)
        .map(|_| (0..n).map(|_| rng.gen_range(0..2u32)).collect())
        .collect();

    let mut features = Vec::with_capacity(SYNTH_LABELS * 2 * SYNTH_REPEATS);
    for (l, label) in label_codes.iter().enumerate() {
        for (tag, agree) in [("half", n / 2), ("quarter", n / 4)] {
            let mut codes = label.clone();
            for pos in sample(&mut rng, n, n - agree) {
                codes[pos] ^= 1;
            }
            let col = DiscreteColumn::from_codes(&codes);
            for r in 0..SYNTH_REPEATS {
                features.push((format!("l{l}_{tag}_{r}"), col.clone()));
            }
        }
    }
    let labels = label_codes
        .iter()
        .enumerate()
        .map(|(l, codes)| (format!("label{l}"), DiscreteColumn::from_codes(codes)))
        .collect();
    Dataset::new(n, features, labels, false).expect("synthesized dataset is well formed")
}

/// Parameters for [`generate_noisy`].
#[derive(Debug, Clone, Copy)]
pub struct NoisySpec {
    pub n: usize,
    pub d: usize,
    pub t: usize,
    /// Number of categories features draw from when not copying a label.
    pub cardinality: u32,
    /// Probability that a feature cell is replaced by a uniform random code.
    pub noise: f64,
}

/// Random instance generator: uniform binary labels, and features that each
/// copy one random label with per-cell noise. Useful for property tests and
/// timing runs.
pub fn generate_noisy(spec: NoisySpec, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let label_codes: Vec<Vec<u32>> = (0..spec.t)
        .map(|_| (0..spec.n).map(|_| rng.gen_range(0..2u32)).collect())
        .collect();
    let features = (0..spec.d)
        .map(|j| {
            let parent = &label_codes[rng.gen_range(0..spec.t)];
            let codes: Vec<u32> = parent
                .iter()
                .map(|&c| {
                    if rng.gen_bool(spec.noise) {
                        rng.gen_range(0..spec.cardinality.max(1))
                    } else {
                        c
                    }
                })
                .collect();
            (format!("f{j}"), DiscreteColumn::from_codes(&codes))
        })
        .collect();
    let labels = label_codes
        .iter()
        .enumerate()
        .map(|(l, codes)| (format!("l{l}"), DiscreteColumn::from_codes(codes)))
        .collect();
    Dataset::new(spec.n, features, labels, false).expect("generated dataset is well formed")
}
