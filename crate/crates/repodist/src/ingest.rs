//! Readers and cleaning pipelines for the three raw dataset shapes:
//! repository metadata CSVs, developer-survey CSVs, and commit-event
//! exports. Malformed rows are counted and skipped, never silently
//! dropped; missing files or missing columns are fatal.

use crate::sample::{Provenance, Sample, SampleError};
use chrono::{DateTime, TimeZone, Utc};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::fs::File;
use std::path::Path;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Open {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path} is missing required column {column:?}")]
    MissingColumn { path: String, column: String },
    #[error("no rows survive preprocessing ({context})")]
    EmptySample { context: String },
    #[error("invalid experience range: lower bound {lo} exceeds upper bound {hi}")]
    InvalidRange { lo: f64, hi: f64 },
    #[error(transparent)]
    Sample(#[from] SampleError),
}

/// One row of repository metadata: name, commit count, contributor
/// count, and the average commit length (units left opaque).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepoRecord {
    pub repo_name: String,
    pub commits: u64,
    pub contributors: u64,
    pub avg_commit_length: f64,
}

/// One raw developer-survey row; `years_code_pro` stays textual because
/// its cleaning rules differ by survey year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyRow {
    pub main_branch: String,
    pub years_code_pro: String,
    pub employment: String,
    pub work_week_hrs: Option<f64>,
}

/// One commit from a commit-history export, with its timestamp
/// normalized to UTC.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommitEvent {
    pub project: String,
    pub sha: String,
    pub message: String,
    pub date: DateTime<Utc>,
    pub author_name: String,
    pub author_email: String,
}

/// The seven repository activity bands, keyed by total commit count.
/// Together they partition the nonnegative integers: shared printed
/// boundaries (20, 100, …) belong to the upper band, and the top band
/// starts strictly above 100,000.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum ActivityBand {
    #[serde(rename = "<20")]
    Under20,
    #[serde(rename = "20-100")]
    Band20To100,
    #[serde(rename = "100-1000")]
    Band100To1000,
    #[serde(rename = "1000-4000")]
    Band1000To4000,
    #[serde(rename = "4000-10000")]
    Band4000To10000,
    #[serde(rename = "10000-100000")]
    Band10000To100000,
    #[serde(rename = ">100000")]
    Over100000,
}

impl ActivityBand {
    pub const ALL: [ActivityBand; 7] = [
        ActivityBand::Under20,
        ActivityBand::Band20To100,
        ActivityBand::Band100To1000,
        ActivityBand::Band1000To4000,
        ActivityBand::Band4000To10000,
        ActivityBand::Band10000To100000,
        ActivityBand::Over100000,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ActivityBand::Under20 => "<20",
            ActivityBand::Band20To100 => "20-100",
            ActivityBand::Band100To1000 => "100-1000",
            ActivityBand::Band1000To4000 => "1000-4000",
            ActivityBand::Band4000To10000 => "4000-10000",
            ActivityBand::Band10000To100000 => "10000-100000",
            ActivityBand::Over100000 => ">100000",
        }
    }

    /// Half-open commit-count range `[lower, upper)`; the top band is
    /// unbounded above. The  printed upper limit 100,000 is inclusive,
    /// so its band runs to 100,001 exclusive.
    pub fn bounds(self) -> (u64, Option<u64>) {
        match self {
            ActivityBand::Under20 => (0, Some(20)),
            ActivityBand::Band20To100 => (20, Some(100)),
            ActivityBand::Band100To1000 => (100, Some(1_000)),
            ActivityBand::Band1000To4000 => (1_000, Some(4_000)),
            ActivityBand::Band4000To10000 => (4_000, Some(10_000)),
            ActivityBand::Band10000To100000 => (10_000, Some(100_001)),
            ActivityBand::Over100000 => (100_001, None),
        }
    }

    pub fn contains(self, commits: u64) -> bool {
        let (lo, hi) = self.bounds();
        commits >= lo && hi.is_none_or(|h| commits < h)
    }
}

impl fmt::Display for ActivityBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ActivityBand {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        ActivityBand::ALL
            .into_iter()
            .find(|b| b.label() == t)
            .ok_or_else(|| format!("unknown activity band {s:?}"))
    }
}

/// Maps a commit count to its unique activity band.
pub fn band_of(commits: u64) -> ActivityBand {
    ActivityBand::ALL
        .into_iter()
        .find(|b| b.contains(commits))
        .expect("activity bands partition the nonnegative integers")
}

/// Reader output: the well-formed records plus how many rows were
/// skipped as malformed.
#[derive(Debug, Clone, PartialEq)]
pub struct Loaded<T> {
    pub records: Vec<T>,
    pub skipped: usize,
}

/// Column-name remapping for repository CSVs; defaults to the
/// documented export header.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepoColumns {
    pub repo_name: String,
    pub commits: String,
    pub contributors: String,
    pub avg_commit_length: String,
}

impl Default for RepoColumns {
    fn default() -> Self {
        Self {
            repo_name: "repository".into(),
            commits: "commits".into(),
            contributors: "contributors".into(),
            avg_commit_length: "avg_commit_length".into(),
        }
    }
}

/// Column-name remapping for survey CSVs; defaults to the official
/// column names shared by the survey years.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurveyColumns {
    pub main_branch: String,
    pub years_code_pro: String,
    pub employment: String,
    pub work_week_hrs: String,
}

impl Default for SurveyColumns {
    fn default() -> Self {
        Self {
            main_branch: "MainBranch".into(),
            years_code_pro: "YearsCodePro".into(),
            employment: "Employment".into(),
            work_week_hrs: "WorkWeekHrs".into(),
        }
    }
}

fn open_csv(path: &Path) -> Result<csv::Reader<File>, IngestError> {
    let file = File::open(path).map_err(|source| IngestError::Open {
        path: path.display().to_string(),
        source,
    })?;
    Ok(csv::ReaderBuilder::new().flexible(true).from_reader(file))
}

fn column_index(
    headers: &csv::StringRecord,
    name: &str,
    path: &Path,
) -> Result<usize, IngestError> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| IngestError::MissingColumn {
            path: path.display().to_string(),
            column: name.to_string(),
        })
}

/// Reads repository metadata. Rows with unparseable numeric fields are
/// counted and skipped; a missing file or missing column is fatal.
pub fn read_repo_csv(path: impl AsRef<Path>) -> Result<Loaded<RepoRecord>, IngestError> {
    read_repo_csv_with(path, &RepoColumns::default())
}

pub fn read_repo_csv_with(
    path: impl AsRef<Path>,
    columns: &RepoColumns,
) -> Result<Loaded<RepoRecord>, IngestError> {
    let path = path.as_ref();
    let mut reader = open_csv(path)?;
    let headers = reader
        .headers()
        .map_err(|e| IngestError::Open {
            path: path.display().to_string(),
            source: std::io::Error::other(e),
        })?
        .clone();
    let name_i = column_index(&headers, &columns.repo_name, path)?;
    let commits_i = column_index(&headers, &columns.commits, path)?;
    let contributors_i = column_index(&headers, &columns.contributors, path)?;
    let length_i = column_index(&headers, &columns.avg_commit_length, path)?;

    let mut records = Vec::new();
    let mut skipped = 0usize;
    for row in reader.records() {
        let Ok(row) = row else {
            skipped += 1;
            continue;
        };
        let parsed = (|| {
            let repo_name = row.get(name_i)?.to_string();
            let commits = row.get(commits_i)?.trim().parse::<u64>().ok()?;
            let contributors = row.get(contributors_i)?.trim().parse::<u64>().ok()?;
            let avg_commit_length = row.get(length_i)?.trim().parse::<f64>().ok()?;
            if !avg_commit_length.is_finite() || avg_commit_length < 0.0 {
                return None;
            }
            Some(RepoRecord {
                repo_name,
                commits,
                contributors,
                avg_commit_length,
            })
        })();
        match parsed {
            Some(record) => records.push(record),
            None => skipped += 1,
        }
    }
    log::debug!(
        "{}: {} repository records, {} malformed rows skipped",
        path.display(),
        records.len(),
        skipped
    );
    Ok(Loaded { records, skipped })
}

/// Reads raw survey rows. Numeric cleaning is deferred to the per-year
/// preprocessing; only structurally broken rows are skipped here.
pub fn read_survey_csv(path: impl AsRef<Path>) -> Result<Loaded<SurveyRow>, IngestError> {
    read_survey_csv_with(path, &SurveyColumns::default())
}

pub fn read_survey_csv_with(
    path: impl AsRef<Path>,
    columns: &SurveyColumns,
) -> Result<Loaded<SurveyRow>, IngestError> {
    let path = path.as_ref();
    let mut reader = open_csv(path)?;
    let headers = reader
        .headers()
        .map_err(|e| IngestError::Open {
            path: path.display().to_string(),
            source: std::io::Error::other(e),
        })?
        .clone();
    let branch_i = column_index(&headers, &columns.main_branch, path)?;
    let years_i = column_index(&headers, &columns.years_code_pro, path)?;
    let employment_i = column_index(&headers, &columns.employment, path)?;
    let hours_i = column_index(&headers, &columns.work_week_hrs, path)?;

    let mut records = Vec::new();
    let mut skipped = 0usize;
    for row in reader.records() {
        let Ok(row) = row else {
            skipped += 1;
            continue;
        };
        let parsed = (|| {
            Some(SurveyRow {
                main_branch: row.get(branch_i)?.to_string(),
                years_code_pro: row.get(years_i)?.to_string(),
                employment: row.get(employment_i)?.to_string(),
                work_week_hrs: row
                    .get(hours_i)
                    .and_then(|h| h.trim().parse::<f64>().ok())
                    .filter(|h| h.is_finite()),
            })
        })();
        match parsed {
            Some(record) => records.push(record),
            None => skipped += 1,
        }
    }
    log::debug!(
        "{}: {} survey rows, {} malformed rows skipped",
        path.display(),
        records.len(),
        skipped
    );
    Ok(Loaded { records, skipped })
}

/// Reads commit events from a CSV export. Dates are RFC 3339 or epoch
/// seconds; rows whose date cannot be parsed (or whose sha is empty)
/// are counted and skipped. Duplicate shas are kept — deduplication is
/// a caller decision.
pub fn read_commit_events(
    path: impl AsRef<Path>,
) -> Result<Loaded<CommitEvent>, IngestError> {
    let path = path.as_ref();
    let mut reader = open_csv(path)?;
    let headers = reader
        .headers()
        .map_err(|e| IngestError::Open {
            path: path.display().to_string(),
            source: std::io::Error::other(e),
        })?
        .clone();
    let project_i = column_index(&headers, "project", path)?;
    let sha_i = column_index(&headers, "sha", path)?;
    let message_i = column_index(&headers, "message", path)?;
    let date_i = column_index(&headers, "date", path)?;
    let name_i = column_index(&headers, "author_name", path)?;
    let email_i = column_index(&headers, "author_email", path)?;

    let mut records = Vec::new();
    let mut skipped = 0usize;
    for row in reader.records() {
        let Ok(row) = row else {
            skipped += 1;
            continue;
        };
        let parsed = (|| {
            let sha = row.get(sha_i)?.trim();
            if sha.is_empty() {
                return None;
            }
            let date = parse_event_date(row.get(date_i)?)?;
            Some(CommitEvent {
                project: row.get(project_i)?.to_string(),
                sha: sha.to_string(),
                message: row.get(message_i)?.to_string(),
                date,
                author_name: row.get(name_i)?.to_string(),
                author_email: row.get(email_i)?.to_string(),
            })
        })();
        match parsed {
            Some(record) => records.push(record),
            None => skipped += 1,
        }
    }
    log::debug!(
        "{}: {} commit events, {} malformed rows skipped",
        path.display(),
        records.len(),
        skipped
    );
    Ok(Loaded { records, skipped })
}

/// Accepts RFC 3339 timestamps or integer epoch seconds.
fn parse_event_date(raw: &str) -> Option<DateTime<Utc>> {
    let t = raw.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(t) {
        return Some(dt.with_timezone(&Utc));
    }
    if let Ok(secs) = t.parse::<i64>() {
        return Utc.timestamp_opt(secs, 0).single();
    }
    None
}

/// 2021-survey cleaning: keep professional developers whose years of
/// professional coding parse as a number in [1, 50]. The sentinel
/// answers ("Less than 1 year", "More than 50 years") and N/A values
/// fall outside that rule and are dropped. The cross-year comparison
/// applies these same rules to the 2019 survey.
pub fn preprocess_2021(rows: &[SurveyRow]) -> Result<Sample, IngestError> {
    preprocess_2021_labeled(rows, "so-survey-2021")
}

pub fn preprocess_2021_labeled(
    rows: &[SurveyRow],
    source: &str,
) -> Result<Sample, IngestError> {
    let mut values = Vec::new();
    for row in rows {
        if row.main_branch.trim() != "I am a developer by profession" {
            continue;
        }
        let Ok(years) = row.years_code_pro.trim().parse::<f64>() else {
            continue;
        };
        if !(1.0..=50.0).contains(&years) {
            continue;
        }
        values.push(years);
    }
    if values.is_empty() {
        return Err(IngestError::EmptySample {
            context: "2021-style survey cleaning kept no rows".into(),
        });
    }
    let provenance = Provenance::new(source)
        .with_step("kept rows answering \"I am a developer by profession\"")
        .with_step("kept numeric professional-coding years in [1, 50]");
    Ok(Sample::new(values, provenance)?)
}

/// 2020-survey cleaning: full-time employees with a 30–90 hour work
/// week; "Less than 1 year" maps to 0, "More than 50 years" to 51, and
/// other answers must parse as a number in [0, 51]. N/A years are
/// dropped.
pub fn preprocess_2020(rows: &[SurveyRow]) -> Result<Sample, IngestError> {
    preprocess_2020_labeled(rows, "so-survey-2020")
}

pub fn preprocess_2020_labeled(
    rows: &[SurveyRow],
    source: &str,
) -> Result<Sample, IngestError> {
    let mut values = Vec::new();
    for row in rows {
        if row.employment.trim() != "Employed full-time" {
            continue;
        }
        let Some(hours) = row.work_week_hrs else {
            continue;
        };
        if !(30.0..=90.0).contains(&hours) {
            continue;
        }
        let years = match row.years_code_pro.trim() {
            "Less than 1 year" => 0.0,
            "More than 50 years" => 51.0,
            other => match other.parse::<f64>() {
                Ok(v) if (0.0..=51.0).contains(&v) => v,
                _ => continue,
            },
        };
        values.push(years);
    }
    if values.is_empty() {
        return Err(IngestError::EmptySample {
            context: "2020-style survey cleaning kept no rows".into(),
        });
    }
    let provenance = Provenance::new(source)
        .with_step("kept rows answering \"Employed full-time\"")
        .with_step("kept work weeks of 30-90 hours")
        .with_step("mapped \"Less than 1 year\" to 0 and \"More than 50 years\" to 51");
    Ok(Sample::new(values, provenance)?)
}

/// Inclusive subsample of an experience sample, recorded in provenance.
pub fn filter_experience_range(
    xs: &Sample,
    lo: f64,
    hi: f64,
) -> Result<Sample, IngestError> {
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(IngestError::InvalidRange { lo, hi });
    }
    let values: Vec<f64> = xs
        .values()
        .iter()
        .copied()
        .filter(|&v| v >= lo && v <= hi)
        .collect();
    Ok(xs.derive(values, format!("kept experience in [{lo}, {hi}] years"))?)
}
