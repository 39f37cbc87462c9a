//! Machine-readable status and error records, plus atomic file writes.

use repodist::analyze::AnalyzeError;
use repodist::dist::DistError;
use repodist::fit::FitError;
use repodist::ingest::IngestError;
use repodist::sample::SampleError;
use repodist::series::{AnalysisSeries, SeriesError};
use repodist::synth::{FieldError, SynthError};
use serde_json::{json, Map, Value};
use std::io::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Copy, Clone, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// A failed command: the error taxonomy kind, a human message, and —
/// for config validation — the individual field problems.
#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
    pub fields: Vec<FieldError>,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            kind: "usage",
            message: message.into(),
            fields: Vec::new(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        CliError {
            kind: "config",
            message: message.into(),
            fields: Vec::new(),
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError {
            kind: "io",
            message: format!("{}: {source}", path.display()),
            fields: Vec::new(),
        }
    }

    /// The single-line JSON error record printed to stdout.
    pub fn record_line(&self) -> String {
        let mut record = json!({
            "status": "error",
            "kind": self.kind,
            "message": self.message,
        });
        if !self.fields.is_empty() {
            record["fields"] =
                serde_json::to_value(&self.fields).expect("field errors serialize");
        }
        record.to_string()
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        CliError {
            kind: "ingest",
            message: e.to_string(),
            fields: Vec::new(),
        }
    }
}

impl From<SampleError> for CliError {
    fn from(e: SampleError) -> Self {
        CliError {
            kind: "ingest",
            message: e.to_string(),
            fields: Vec::new(),
        }
    }
}

impl From<FitError> for CliError {
    fn from(e: FitError) -> Self {
        CliError {
            kind: "fit",
            message: e.to_string(),
            fields: Vec::new(),
        }
    }
}

impl From<AnalyzeError> for CliError {
    fn from(e: AnalyzeError) -> Self {
        CliError {
            kind: "analyze",
            message: e.to_string(),
            fields: Vec::new(),
        }
    }
}

impl From<DistError> for CliError {
    fn from(e: DistError) -> Self {
        CliError {
            kind: "params",
            message: e.to_string(),
            fields: Vec::new(),
        }
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        CliError {
            kind: "series",
            message: e.to_string(),
            fields: Vec::new(),
        }
    }
}

impl From<SynthError> for CliError {
    fn from(e: SynthError) -> Self {
        let message = e.to_string();
        match e {
            SynthError::InvalidConfig(fields) => CliError {
                kind: "config",
                message,
                fields,
            },
            _ => CliError {
                kind: "synth",
                message,
                fields: Vec::new(),
            },
        }
    }
}

/// Wraps command details into the final `{"status":"ok", …}` line.
pub fn status_line(details: Value) -> String {
    let mut map = Map::new();
    map.insert("status".into(), "ok".into());
    if let Value::Object(rest) = details {
        map.extend(rest);
    }
    Value::Object(map).to_string()
}

/// Writes bytes to `path` via a temp file in the same directory plus an
/// atomic rename, creating parent directories as needed.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let parent: PathBuf = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&parent).map_err(|e| CliError::io(path, e))?;
    let mut tmp =
        tempfile::NamedTempFile::new_in(&parent).map_err(|e| CliError::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.flush().map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

/// Serializes a series in the chosen format. `csv_prefix` is prepended
/// only to CSV output (e.g. a `# slope=…` comment line).
pub fn series_bytes(
    series: &AnalysisSeries,
    format: OutputFormat,
    csv_prefix: Option<&str>,
) -> Result<Vec<u8>, CliError> {
    match format {
        OutputFormat::Csv => {
            let mut bytes = Vec::new();
            if let Some(prefix) = csv_prefix {
                bytes.extend_from_slice(prefix.as_bytes());
            }
            series.write_csv(&mut bytes)?;
            Ok(bytes)
        }
        OutputFormat::Json => {
            let mut bytes =
                serde_json::to_vec_pretty(&series.to_json()).map_err(|e| CliError {
                    kind: "io",
                    message: format!("cannot serialize series: {e}"),
                    fields: Vec::new(),
                })?;
            bytes.push(b'\n');
            Ok(bytes)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_records_are_single_line_json_with_kind() {
        let err = CliError::usage("--seed is required");
        let line = err.record_line();
        assert!(!line.contains('\n'));
        let parsed: Value = serde_json::from_str(&line).unwrap();
        assert_eq!(parsed["status"], "error");
        assert_eq!(parsed["kind"], "usage");
        assert_eq!(parsed["message"], "--seed is required");
        assert!(parsed.get("fields").is_none());
    }

    #[test]
    fn config_errors_carry_field_details() {
        let err = CliError::from(SynthError::InvalidConfig(vec![FieldError {
            field: "band_mix".into(),
            message: "weights must sum to 1".into(),
        }]));
        let parsed: Value = serde_json::from_str(&err.record_line()).unwrap();
        assert_eq!(parsed["kind"], "config");
        assert_eq!(parsed["fields"][0]["field"], "band_mix");
    }

    #[test]
    fn status_line_merges_details_under_ok() {
        let line = status_line(json!({"command": "sample", "n": 3}));
        let parsed: Value = serde_json::from_str(&line).unwrap();
        assert_eq!(parsed["status"], "ok");
        assert_eq!(parsed["command"], "sample");
        assert_eq!(parsed["n"], 3);
    }

    #[test]
    fn atomic_write_replaces_existing_content() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/report.json");
        atomic_write(&path, b"first").unwrap();
        atomic_write(&path, b"second").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"second");
    }
}
