//! The `analyze` verb: one plot-ready series file per invocation, plus
//! a stdout status record carrying the headline numbers (trend slope,
//! exclusion counts, row counts).

use crate::data;
use crate::output::{atomic_write, series_bytes, CliError, OutputFormat};
use crate::{AnalysisKind, AnalyzeArgs, DatasetKind, GranularityArg};
use repodist::analyze::{self, Granularity, HistogramMode};
use repodist::series::Binning;
use serde_json::{json, Value};
use std::path::Path;

impl From<GranularityArg> for Granularity {
    fn from(g: GranularityArg) -> Self {
        match g {
            GranularityArg::Day => Granularity::Day,
            GranularityArg::Month => Granularity::Month,
            GranularityArg::Year => Granularity::Year,
        }
    }
}

fn require_kind(
    args: &AnalyzeArgs,
    wanted: DatasetKind,
    analysis: &str,
) -> Result<(), CliError> {
    if args.kind != wanted {
        return Err(CliError::usage(format!(
            "{analysis} requires --kind {}, got {}",
            wanted.token(),
            args.kind.token()
        )));
    }
    Ok(())
}

pub fn run(
    args: &AnalyzeArgs,
    out: Option<&Path>,
    format: OutputFormat,
) -> Result<Value, CliError> {
    let out = out.ok_or_else(|| CliError::usage("--out is required for analyze"))?;
    match args.analysis {
        AnalysisKind::Histogram => {
            let data = data::load_numeric(
                &args.input,
                args.kind,
                args.min,
                args.max,
                args.band,
                args.group_by,
            )?;
            let binning = if args.integer_bins {
                Binning::IntegerCentered
            } else {
                Binning::EqualWidth { bins: args.bins }
            };
            let mode = if args.density {
                HistogramMode::Density
            } else {
                HistogramMode::Counts
            };
            let series = analyze::histogram(&data.sample, &binning, mode)?;
            atomic_write(out, &series_bytes(&series, format, None)?)?;
            Ok(json!({
                "command": "analyze",
                "analysis": "histogram",
                "rows": series.rows(),
                "sample_size": data.sample.len(),
                "malformed_rows": data.malformed_rows,
                "out": out.display().to_string(),
            }))
        }
        AnalysisKind::RankTrend => {
            let data = data::load_numeric(
                &args.input,
                args.kind,
                args.min,
                args.max,
                args.band,
                args.group_by,
            )?;
            let (series, line) =
                analyze::rank_trend(data.sample.values(), !args.ascending)?;
            let bytes = match format {
                OutputFormat::Csv => {
                    let prefix = format!(
                        "# slope={} intercept={} n={}\n",
                        line.slope, line.intercept, line.n
                    );
                    series_bytes(&series, format, Some(&prefix))?
                }
                OutputFormat::Json => {
                    let mut v = serde_json::to_vec_pretty(&json!({
                        "label": "rank-trend",
                        "slope": line.slope,
                        "intercept": line.intercept,
                        "n": line.n,
                        "series": series.to_json(),
                    }))
                    .expect("trend serializes");
                    v.push(b'\n');
                    v
                }
            };
            atomic_write(out, &bytes)?;
            Ok(json!({
                "command": "analyze",
                "analysis": "rank-trend",
                "slope": line.slope,
                "intercept": line.intercept,
                "n": line.n,
                "out": out.display().to_string(),
            }))
        }
        AnalysisKind::CommitRate => {
            require_kind(args, DatasetKind::TravisCommits, "commit-rate")?;
            let loaded = data::load_events(&args.input)?;
            let report = analyze::commit_rates(&loaded.records, args.group_by.into());
            let bytes = match format {
                OutputFormat::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.write_record(["entity", "total_commits", "span_days", "rate"])
                        .and_then(|_| {
                            for e in &report.entries {
                                w.write_record([
                                    e.entity.as_str(),
                                    &e.total_commits.to_string(),
                                    &e.span_days.to_string(),
                                    &e.rate.to_string(),
                                ])?;
                            }
                            Ok(())
                        })
                        .map_err(|e| CliError {
                            kind: "io",
                            message: format!("cannot encode rate table: {e}"),
                            fields: Vec::new(),
                        })?;
                    w.into_inner().map_err(|e| CliError {
                        kind: "io",
                        message: format!("cannot encode rate table: {e}"),
                        fields: Vec::new(),
                    })?
                }
                OutputFormat::Json => {
                    let mut v = serde_json::to_vec_pretty(&report)
                        .expect("rate report serializes");
                    v.push(b'\n');
                    v
                }
            };
            atomic_write(out, &bytes)?;
            Ok(json!({
                "command": "analyze",
                "analysis": "commit-rate",
                "entities": report.entries.len(),
                "excluded_single_day": report.excluded_single_day,
                "malformed_rows": loaded.skipped,
                "out": out.display().to_string(),
            }))
        }
        AnalysisKind::WeeklyProfile => {
            require_kind(args, DatasetKind::TravisCommits, "weekly-profile")?;
            let loaded = data::load_events(&args.input)?;
            let series = analyze::weekly_profile(&loaded.records)?;
            atomic_write(out, &series_bytes(&series, format, None)?)?;
            Ok(json!({
                "command": "analyze",
                "analysis": "weekly-profile",
                "events": loaded.records.len(),
                "malformed_rows": loaded.skipped,
                "out": out.display().to_string(),
            }))
        }
        AnalysisKind::TimeSeries => {
            require_kind(args, DatasetKind::TravisCommits, "time-series")?;
            let loaded = data::load_events(&args.input)?;
            let series =
                analyze::time_series(&loaded.records, args.granularity.into())?;
            atomic_write(out, &series_bytes(&series, format, None)?)?;
            Ok(json!({
                "command": "analyze",
                "analysis": "time-series",
                "granularity": args.granularity.into_token(),
                "rows": series.rows(),
                "events": loaded.records.len(),
                "malformed_rows": loaded.skipped,
                "out": out.display().to_string(),
            }))
        }
        AnalysisKind::CommitsVsContributors => {
            require_kind(args, DatasetKind::GithubRepos, "commits-vs-contributors")?;
            let loaded = data::load_repos(&args.input)?;
            let series = analyze::commits_vs_contributors(&loaded.records)?;
            atomic_write(out, &series_bytes(&series, format, None)?)?;
            Ok(json!({
                "command": "analyze",
                "analysis": "commits-vs-contributors",
                "rows": series.rows(),
                "malformed_rows": loaded.skipped,
                "out": out.display().to_string(),
            }))
        }
    }
}

impl GranularityArg {
    fn into_token(self) -> &'static str {
        match self {
            GranularityArg::Day => "day",
            GranularityArg::Month => "month",
            GranularityArg::Year => "year",
        }
    }
}
