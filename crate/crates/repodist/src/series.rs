//! [`AnalysisSeries`]: the plot-data currency. A labelled set of named
//! numeric columns of equal length, serializable to CSV (one column per
//! name) and to structured JSON, plus the [`Binning`] rules used by
//! histogram-shaped analyses.

use std::io::Write;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("column {name:?} has length {got}, expected {expected}")]
    MismatchedLength {
        name: String,
        got: usize,
        expected: usize,
    },
    #[error("column {name:?} contains a non-finite value at row {row}")]
    NonFinite { name: String, row: usize },
    #[error("duplicate column name {name:?}")]
    DuplicateColumn { name: String },
    #[error("binning spec invalid: {0}")]
    InvalidBinning(String),
    #[error("series has no columns")]
    NoColumns,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Named numeric columns of equal length, in insertion order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisSeries {
    label: String,
    columns: Vec<Column>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct Column {
    name: String,
    values: Vec<f64>,
}

impl AnalysisSeries {
    pub fn new(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            columns: Vec::new(),
        }
    }

    /// Builds a series from (name, values) pairs in one call.
    pub fn from_columns<N: Into<String>>(
        label: impl Into<String>,
        columns: Vec<(N, Vec<f64>)>,
    ) -> Result<Self, SeriesError> {
        let mut series = Self::new(label);
        for (name, values) in columns {
            series.push_column(name, values)?;
        }
        Ok(series)
    }

    /// Appends a column, enforcing equal length, finiteness, and name
    /// uniqueness.
    pub fn push_column(
        &mut self,
        name: impl Into<String>,
        values: Vec<f64>,
    ) -> Result<(), SeriesError> {
        let name = name.into();
        if self.columns.iter().any(|c| c.name == name) {
            return Err(SeriesError::DuplicateColumn { name });
        }
        if let Some(first) = self.columns.first() {
            if values.len() != first.values.len() {
                return Err(SeriesError::MismatchedLength {
                    name,
                    got: values.len(),
                    expected: first.values.len(),
                });
            }
        }
        if let Some(row) = values.iter().position(|v| !v.is_finite()) {
            return Err(SeriesError::NonFinite { name, row });
        }
        self.columns.push(Column { name, values });
        Ok(())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Number of rows (0 when no columns have been added).
    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.values.len())
    }

    pub fn column_names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|c| c.name.as_str())
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.values.as_slice())
    }

    /// Writes the series as CSV: header row of column names, then one row
    /// per index.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), SeriesError> {
        if self.columns.is_empty() {
            return Err(SeriesError::NoColumns);
        }
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(self.columns.iter().map(|c| c.name.as_str()))
            .map_err(io_from_csv)?;
        let mut row = Vec::with_capacity(self.columns.len());
        for i in 0..self.rows() {
            row.clear();
            for c in &self.columns {
                row.push(format_number(c.values[i]));
            }
            w.write_record(&row).map_err(io_from_csv)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Structured JSON with column order preserved:
    /// `{"label": …, "columns": [{"name": …, "values": […]}, …]}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("series serialization is infallible")
    }
}

fn io_from_csv(err: csv::Error) -> SeriesError {
    SeriesError::Io(std::io::Error::other(err))
}

// Integral values print without a trailing ".0" so count columns stay
// readable; everything else uses the shortest round-trip form.
fn format_number(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// How to partition a numeric range into histogram bins.
#[derive(Debug, Clone, PartialEq)]
pub enum Binning {
    /// `bins` equal-width bins spanning [min, max] of the data.
    EqualWidth { bins: usize },
    /// Explicit ascending bin edges; bin i is [edges[i], edges[i+1]),
    /// with the final bin closed on the right.
    Edges(Vec<f64>),
    /// One bin per integer k, covering [k − 0.5, k + 0.5).
    IntegerCentered,
}

impl Binning {
    /// Resolves the rule into concrete ascending edges for the given data.
    pub fn edges_for(&self, values: &[f64]) -> Result<Vec<f64>, SeriesError> {
        match self {
            Binning::EqualWidth { bins } => {
                if *bins == 0 {
                    return Err(SeriesError::InvalidBinning(
                        "bin count must be ≥ 1".to_string(),
                    ));
                }
                if values.is_empty() {
                    return Err(SeriesError::InvalidBinning(
                        "cannot derive bin edges from an empty dataset".to_string(),
                    ));
                }
                let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
                let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                // A zero-width range still needs a usable bin.
                let (min, max) = if min == max {
                    (min - 0.5, max + 0.5)
                } else {
                    (min, max)
                };
                let width = (max - min) / *bins as f64;
                let mut edges: Vec<f64> =
                    (0..*bins).map(|i| min + width * i as f64).collect();
                edges.push(max);
                Ok(edges)
            }
            Binning::Edges(edges) => {
                if edges.len() < 2 {
                    return Err(SeriesError::InvalidBinning(
                        "need at least two edges".to_string(),
                    ));
                }
                if edges.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(SeriesError::InvalidBinning(
                        "edges must be strictly ascending".to_string(),
                    ));
                }
                if edges.iter().any(|e| !e.is_finite()) {
                    return Err(SeriesError::InvalidBinning(
                        "edges must be finite".to_string(),
                    ));
                }
                Ok(edges.clone())
            }
            Binning::IntegerCentered => {
                if values.is_empty() {
                    return Err(SeriesError::InvalidBinning(
                        "cannot derive bin edges from an empty dataset".to_string(),
                    ));
                }
                let min = values.iter().cloned().fold(f64::INFINITY, f64::min).round() as i64;
                let max = values
                    .iter()
                    .cloned()
                    .fold(f64::NEG_INFINITY, f64::max)
                    .round() as i64;
                Ok((min..=max + 1).map(|k| k as f64 - 0.5).collect())
            }
        }
    }
}

/// Bin index of `value` for ascending `edges`, honouring the final-bin
/// right-closure; `None` when the value falls outside every bin.
pub fn bin_index(edges: &[f64], value: f64) -> Option<usize> {
    let last = edges.len() - 1;
    if value < edges[0] || value > edges[last] {
        return None;
    }
    if value == edges[last] {
        return Some(last - 1);
    }
    // Binary search for the half-open interval containing value.
    let mut lo = 0;
    let mut hi = last;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if value < edges[mid] {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(lo)
}
