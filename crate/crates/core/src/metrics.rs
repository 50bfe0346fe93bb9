//! Multi-label evaluation measures over binary truth and prediction matrices.
//!
//! `label_avg_f` averages the per-label F-measure over labels; `pooled_f`
//! pools the per-label counts before forming one F-measure. (They are called
//! macro- and micro-averaged F elsewhere; the names here say what they compute.)
//!
//! Empty denominators score 1: an instance with no true and no predicted
//! labels, or a label never present and never predicted, counts as correct.

use std::io::BufRead;
use std::path::Path;

use serde::Serialize;

use crate::error::{DataError, SelectError};

/// `rows x labels` matrix of 0/1 entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionMatrix {
    rows: usize,
    labels: usize,
    cells: Vec<bool>,
}

impl PredictionMatrix {
    pub fn from_rows(rows: &[Vec<bool>]) -> Result<Self, SelectError> {
        let labels = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != labels) {
            return Err(SelectError::DimensionMismatch(format!(
                "row {i} has {} entries, expected {labels}",
                r.len()
            )));
        }
        Ok(PredictionMatrix {
            rows: rows.len(),
            labels,
            cells: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn labels(&self) -> usize {
        self.labels
    }

    pub fn get(&self, row: usize, label: usize) -> bool {
        self.cells[row * self.labels + label]
    }

    fn row(&self, row: usize) -> &[bool] {
        &self.cells[row * self.labels..(row + 1) * self.labels]
    }

    /// Elementwise negation.
    pub fn complement(&self) -> Self {
        PredictionMatrix {
            cells: self.cells.iter().map(|c| !c).collect(),
            ..self.clone()
        }
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self, DataError> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|source| DataError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::read_csv(std::io::BufReader::new(file), &path.display().to_string())
    }

    /// Headerless CSV of 0/1 cells.
    pub fn read_csv<R: BufRead>(reader: R, origin: &str) -> Result<Self, DataError> {
        let mut rows: Vec<Vec<bool>> = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| DataError::parse(origin, lineno, e.to_string()))?;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            if line.is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .map(|c| match c.trim() {
                    "0" => Ok(false),
                    "1" => Ok(true),
                    other => Err(DataError::parse(
                        origin,
                        lineno,
                        format!("expected 0 or 1, got {other:?}"),
                    )),
                })
                .collect::<Result<Vec<bool>, _>>()?;
            if let Some(first) = rows.first() {
                if first.len() != row.len() {
                    return Err(DataError::parse(
                        origin,
                        lineno,
                        format!("expected {} cells, found {}", first.len(), row.len()),
                    ));
                }
            }
            rows.push(row);
        }
        PredictionMatrix::from_rows(&rows).map_err(|e| DataError::validation(origin, e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MultilabelScores {
    pub subset_accuracy: f64,
    pub example_accuracy: f64,
    pub example_f: f64,
    pub label_avg_f: f64,
    pub pooled_f: f64,
}

fn ratio_or_one(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

pub fn multilabel_metrics(
    truth: &PredictionMatrix,
    pred: &PredictionMatrix,
) -> Result<MultilabelScores, SelectError> {
    if truth.rows != pred.rows || truth.labels != pred.labels {
        return Err(SelectError::DimensionMismatch(format!(
            "truth is {}x{}, prediction is {}x{}",
            truth.rows, truth.labels, pred.rows, pred.labels
        )));
    }
    let n = truth.rows;
    let t = truth.labels;

    let mut subset = 0.0;
    let mut accuracy = 0.0;
    let mut example_f = 0.0;
    for i in 0..n {
        let (a, b) = (truth.row(i), pred.row(i));
        let inter = a.iter().zip(b).filter(|(x, y)| **x && **y).count();
        let union = a.iter().zip(b).filter(|(x, y)| **x || **y).count();
        let sizes = a.iter().filter(|x| **x).count() + b.iter().filter(|x| **x).count();
        if a == b {
            subset += 1.0;
        }
        accuracy += ratio_or_one(inter, union);
        example_f += ratio_or_one(2 * inter, sizes);
    }

    let mut label_f = 0.0;
    let (mut pooled_inter, mut pooled_sizes) = (0usize, 0usize);
    for l in 0..t {
        let mut inter = 0;
        let mut sizes = 0;
        for i in 0..n {
            let (x, y) = (truth.get(i, l), pred.get(i, l));
            inter += usize::from(x && y);
            sizes += usize::from(x) + usize::from(y);
        }
        label_f += ratio_or_one(2 * inter, sizes);
        pooled_inter += inter;
        pooled_sizes += sizes;
    }

    let per = |v: f64, count: usize| if count == 0 { 1.0 } else { v / count as f64 };
    Ok(MultilabelScores {
        subset_accuracy: per(subset, n),
        example_accuracy: per(accuracy, n),
        example_f: per(example_f, n),
        label_avg_f: per(label_f, t),
        pooled_f: ratio_or_one(2 * pooled_inter, pooled_sizes),
    })
}
