//! [`Sample`]: a cleaned univariate numeric dataset plus the provenance
//! that tells a report reader where the numbers came from and what was
//! done to them.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SampleError {
    #[error("sample value at index {index} is not finite: {value}")]
    NonFinite { index: usize, value: f64 },
}

/// Where a sample came from and which transformations produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    /// Dataset identifier: a file path, dataset kind, or "synthetic:…".
    pub source: String,
    /// Preprocessing steps applied, in order, human readable.
    pub steps: Vec<String>,
    /// Activity-band label when the sample is one band of a larger set.
    pub band: Option<String>,
    /// Whether the values have been z-score standardized.
    pub standardized: bool,
}

impl Provenance {
    pub fn new(source: impl Into<String>) -> Self {
        Self {
            source: source.into(),
            steps: Vec::new(),
            band: None,
            standardized: false,
        }
    }

    pub fn with_step(mut self, step: impl Into<String>) -> Self {
        self.steps.push(step.into());
        self
    }

    pub fn with_band(mut self, band: impl Into<String>) -> Self {
        self.band = Some(band.into());
        self
    }
}

/// A univariate numeric dataset. Values are guaranteed finite; emptiness
/// is representable (filters may legitimately strain everything out) and
/// is re-checked by consumers that need data.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    provenance: Provenance,
}

impl Sample {
    /// Builds a sample, rejecting non-finite values.
    pub fn new(values: Vec<f64>, provenance: Provenance) -> Result<Self, SampleError> {
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(SampleError::NonFinite { index, value });
            }
        }
        Ok(Self { values, provenance })
    }

    /// Convenience constructor for tests and ad-hoc data.
    pub fn from_values(values: Vec<f64>, source: impl Into<String>) -> Result<Self, SampleError> {
        Self::new(values, Provenance::new(source))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Derives a new sample from transformed values, appending a step to
    /// the provenance trail.
    pub fn derive(
        &self,
        values: Vec<f64>,
        step: impl Into<String>,
    ) -> Result<Self, SampleError> {
        let provenance = self.provenance.clone().with_step(step);
        Self::new(values, provenance)
    }

    /// Marks the sample as standardized (set by the z-score pre-step).
    pub fn set_standardized(&mut self, standardized: bool) {
        self.provenance.standardized = standardized;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_values() {
        let err = Sample::from_values(vec![1.0, f64::NAN], "t").unwrap_err();
        assert!(matches!(err, SampleError::NonFinite { index: 1, .. }));
    }

    #[test]
    fn allows_empty_sample() {
        let s = Sample::from_values(vec![], "t").unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn derive_appends_step() {
        let s = Sample::from_values(vec![1.0, 2.0], "t").unwrap();
        let d = s.derive(vec![2.0, 4.0], "doubled").unwrap();
        assert_eq!(d.values(), &[2.0, 4.0]);
        assert_eq!(d.provenance().steps, vec!["doubled".to_string()]);
        assert_eq!(d.provenance().source, "t");
    }
}
