//! Dataset → numeric sample extraction shared by `fit` and `analyze`.

use crate::output::CliError;
use crate::{DatasetKind, GroupArg};
use repodist::analyze::{self, RateGroup};
use repodist::ingest::{
    self, ActivityBand, CommitEvent, Loaded, RepoRecord, SurveyRow,
};
use repodist::sample::{Provenance, Sample};
use std::path::Path;

/// A numeric column ready for fitting or histogram/trend analysis,
/// plus the count of structurally broken input rows.
#[derive(Debug)]
pub struct NumericData {
    pub sample: Sample,
    pub malformed_rows: usize,
}

impl From<GroupArg> for RateGroup {
    fn from(g: GroupArg) -> Self {
        match g {
            GroupArg::Project => RateGroup::Project,
            GroupArg::Author => RateGroup::Author,
        }
    }
}

fn forbid_range(kind: DatasetKind, min: Option<f64>, max: Option<f64>) -> Result<(), CliError> {
    if min.is_some() || max.is_some() {
        return Err(CliError::usage(format!(
            "--min/--max apply to survey kinds; use --band with {}",
            kind.token()
        )));
    }
    Ok(())
}

fn forbid_band(kind: DatasetKind, band: Option<ActivityBand>) -> Result<(), CliError> {
    if band.is_some() {
        return Err(CliError::usage(format!(
            "--band applies to commit-count datasets, not {}",
            kind.token()
        )));
    }
    Ok(())
}

/// Loads the dataset's numeric column: repository commit counts
/// (github-repos), cleaned experience years (survey kinds), or
/// per-entity commit totals (travis-commits).
pub fn load_numeric(
    input: &Path,
    kind: DatasetKind,
    min: Option<f64>,
    max: Option<f64>,
    band: Option<ActivityBand>,
    group: GroupArg,
) -> Result<NumericData, CliError> {
    match kind {
        DatasetKind::GithubRepos => {
            forbid_range(kind, min, max)?;
            let loaded = ingest::read_repo_csv(input)?;
            let mut provenance = Provenance::new(input.display().to_string())
                .with_step(format!(
                    "read {} repository records",
                    loaded.records.len()
                ));
            let mut records = loaded.records;
            if let Some(b) = band {
                records.retain(|r| b.contains(r.commits));
                provenance = provenance
                    .with_step(format!("kept repositories in band {b}"))
                    .with_band(b.label());
            }
            let values = records.iter().map(|r| r.commits as f64).collect();
            Ok(NumericData {
                sample: Sample::new(values, provenance)?,
                malformed_rows: loaded.skipped,
            })
        }
        DatasetKind::SoSurvey2019 | DatasetKind::SoSurvey2020 | DatasetKind::SoSurvey2021 => {
            forbid_band(kind, band)?;
            let loaded = ingest::read_survey_csv(input)?;
            let sample = preprocess_survey(&loaded.records, kind)?;
            let sample = match (min, max) {
                (None, None) => sample,
                (lo, hi) => ingest::filter_experience_range(
                    &sample,
                    lo.unwrap_or(0.0),
                    hi.unwrap_or(f64::INFINITY),
                )?,
            };
            Ok(NumericData {
                sample,
                malformed_rows: loaded.skipped,
            })
        }
        DatasetKind::TravisCommits => {
            forbid_range(kind, min, max)?;
            let loaded = load_events(input)?;
            let totals = analyze::entity_totals(&loaded.records, group.into());
            let mut provenance = Provenance::new(input.display().to_string())
                .with_step(format!(
                    "aggregated {} commits into totals for {} {} entities",
                    loaded.records.len(),
                    totals.len(),
                    match RateGroup::from(group) {
                        RateGroup::Project => "project",
                        RateGroup::Author => "author",
                    }
                ));
            let mut values: Vec<f64> = totals.values().map(|&t| t as f64).collect();
            if let Some(b) = band {
                values.retain(|&v| b.contains(v as u64));
                provenance = provenance
                    .with_step(format!("kept entities in band {b}"))
                    .with_band(b.label());
            }
            Ok(NumericData {
                sample: Sample::new(values, provenance)?,
                malformed_rows: loaded.skipped,
            })
        }
    }
}

/// Applies the survey cleaning rules for the dataset year. The 2019
/// survey is cleaned with the 2021 rules so cross-year comparisons use
/// one definition of professional experience.
fn preprocess_survey(rows: &[SurveyRow], kind: DatasetKind) -> Result<Sample, CliError> {
    let sample = match kind {
        DatasetKind::SoSurvey2020 => {
            ingest::preprocess_2020_labeled(rows, kind.token())?
        }
        DatasetKind::SoSurvey2019 | DatasetKind::SoSurvey2021 => {
            ingest::preprocess_2021_labeled(rows, kind.token())?
        }
        _ => unreachable!("survey preprocessing on a non-survey kind"),
    };
    Ok(sample)
}

/// Loads commit events for event-based analyses.
pub fn load_events(input: &Path) -> Result<Loaded<CommitEvent>, CliError> {
    Ok(ingest::read_commit_events(input)?)
}

/// Loads repository records for repository-based analyses.
pub fn load_repos(input: &Path) -> Result<Loaded<RepoRecord>, CliError> {
    Ok(ingest::read_repo_csv(input)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    fn write_temp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f.flush().unwrap();
        f
    }

    #[test]
    fn github_band_filter_keeps_only_the_band() {
        let f = write_temp(
            "repository,commits,contributors,avg_commit_length\n\
             a,5,1,10.0\n\
             b,150,3,12.0\n\
             c,900,7,9.0\n\
             d,2000,9,11.0\n",
        );
        let data = load_numeric(
            f.path(),
            DatasetKind::GithubRepos,
            None,
            None,
            Some("100-1000".parse().unwrap()),
            GroupArg::Project,
        )
        .unwrap();
        assert_eq!(data.sample.values(), &[150.0, 900.0]);
        assert_eq!(data.sample.provenance().band.as_deref(), Some("100-1000"));
        assert_eq!(data.malformed_rows, 0);
    }

    #[test]
    fn survey_2019_uses_the_2021_cleaning_rules() {
        // 2021 rules: professional developers with 1–50 years. The
        // second row fails the professional filter; the last is out of
        // range.
        let f = write_temp(
            "MainBranch,YearsCodePro,Employment,WorkWeekHrs\n\
             I am a developer by profession,10,Employed full-time,40\n\
             I code primarily as a hobby,10,Employed full-time,40\n\
             I am a developer by profession,60,Employed full-time,40\n",
        );
        let data = load_numeric(
            f.path(),
            DatasetKind::SoSurvey2019,
            None,
            None,
            None,
            GroupArg::Project,
        )
        .unwrap();
        assert_eq!(data.sample.values(), &[10.0]);
        assert_eq!(data.sample.provenance().source, "so-survey-2019");
    }

    #[test]
    fn travis_totals_group_by_author_when_asked() {
        let f = write_temp(
            "project,sha,message,date,author_name,author_email\n\
             p1,s1,m,2014-03-01T10:00:00+00:00,Ann,ann@ex.com\n\
             p1,s2,m,2014-03-02T10:00:00+00:00,Ann,ANN@ex.com\n\
             p2,s3,m,2014-03-03T10:00:00+00:00,Bob,bob@ex.com\n",
        );
        let by_project = load_numeric(
            f.path(),
            DatasetKind::TravisCommits,
            None,
            None,
            None,
            GroupArg::Project,
        )
        .unwrap();
        let mut totals = by_project.sample.values().to_vec();
        totals.sort_by(f64::total_cmp);
        assert_eq!(totals, vec![1.0, 2.0]);

        let by_author = load_numeric(
            f.path(),
            DatasetKind::TravisCommits,
            None,
            None,
            None,
            GroupArg::Author,
        )
        .unwrap();
        assert_eq!(by_author.sample.len(), 2);
    }

    #[test]
    fn range_flags_on_commit_datasets_are_usage_errors() {
        let f = write_temp("repository,commits,contributors,avg_commit_length\n");
        let err = load_numeric(
            f.path(),
            DatasetKind::GithubRepos,
            Some(0.0),
            None,
            None,
            GroupArg::Project,
        )
        .unwrap_err();
        assert_eq!(err.kind, "usage");
    }

    #[test]
    fn band_flag_on_surveys_is_a_usage_error() {
        let f = write_temp("MainBranch,YearsCodePro,Employment,WorkWeekHrs\n");
        let err = load_numeric(
            f.path(),
            DatasetKind::SoSurvey2021,
            None,
            None,
            Some("<20".parse().unwrap()),
            GroupArg::Project,
        )
        .unwrap_err();
        assert_eq!(err.kind, "usage");
    }
}
