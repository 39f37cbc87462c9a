//! Descriptive analytics over ingested data: banded histograms,
//! descending-rank trend lines, per-entity commit rates, weekly
//! activity profiles, calendar time series, and commits-vs-contributors
//! scatter data. Everything lands in [`AnalysisSeries`] for export.

use crate::ingest::{CommitEvent, RepoRecord};
use crate::sample::Sample;
use crate::series::{bin_index, AnalysisSeries, Binning, SeriesError};
use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalyzeError {
    #[error("need at least {needed} data points, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Ordinary-least-squares line through (rank, value) pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendLine {
    /// Value change per unit rank.
    pub slope: f64,
    /// Value at rank 0 (ranks themselves start at 1).
    pub intercept: f64,
    pub n: usize,
}

/// Commit rate of one grouped entity (project or author).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateEntry {
    pub entity: String,
    pub total_commits: u64,
    /// Exclusive day difference, last active day minus first.
    pub span_days: u64,
    /// total_commits / span_days.
    pub rate: f64,
}

/// Rates plus how many entities were dropped for having all their
/// commits on a single day (their span is zero).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub entries: Vec<RateEntry>,
    pub excluded_single_day: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateGroup {
    Project,
    Author,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Granularity {
    Day,
    Month,
    Year,
}

impl fmt::Display for Granularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Granularity::Day => "day",
            Granularity::Month => "month",
            Granularity::Year => "year",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HistogramMode {
    Counts,
    /// Unit-area normalization: bar heights are count / (n · width).
    Density,
}

/// Bins a sample. Column layout: bin_lower, bin_upper, bin_center, and
/// either count or density. With explicit edges, observations outside
/// the edges are dropped; density mode normalizes over what remains, so
/// the histogram area is exactly one.
pub fn histogram(
    xs: &Sample,
    binning: &Binning,
    mode: HistogramMode,
) -> Result<AnalysisSeries, AnalyzeError> {
    if xs.is_empty() {
        return Err(AnalyzeError::EmptyInput("histogram of an empty sample".into()));
    }
    let edges = binning.edges_for(xs.values())?;
    let bins = edges.len() - 1;
    let mut counts = vec![0u64; bins];
    let mut included = 0u64;
    for &x in xs.values() {
        if let Some(i) = bin_index(&edges, x) {
            counts[i] += 1;
            included += 1;
        }
    }
    let mut lower = Vec::with_capacity(bins);
    let mut upper = Vec::with_capacity(bins);
    let mut center = Vec::with_capacity(bins);
    let mut height = Vec::with_capacity(bins);
    for i in 0..bins {
        lower.push(edges[i]);
        upper.push(edges[i + 1]);
        center.push(0.5 * (edges[i] + edges[i + 1]));
        height.push(match mode {
            HistogramMode::Counts => counts[i] as f64,
            HistogramMode::Density => {
                if included == 0 {
                    0.0
                } else {
                    counts[i] as f64 / (included as f64 * (edges[i + 1] - edges[i]))
                }
            }
        });
    }
    let value_name = match mode {
        HistogramMode::Counts => "count",
        HistogramMode::Density => "density",
    };
    Ok(AnalysisSeries::from_columns(
        "histogram",
        vec![
            ("bin_lower", lower),
            ("bin_upper", upper),
            ("bin_center", center),
            (value_name, height),
        ],
    )?)
}

/// Sorts values, pairs them with 1-based ranks, and fits an OLS line.
/// Returns the (rank, value, trend) series plus the line itself.
pub fn rank_trend(
    values: &[f64],
    descending: bool,
) -> Result<(AnalysisSeries, TrendLine), AnalyzeError> {
    let n = values.len();
    if n < 2 {
        return Err(AnalyzeError::InsufficientData { needed: 2, got: n });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    if descending {
        sorted.reverse();
    }
    let nf = n as f64;
    let ranks: Vec<f64> = (1..=n).map(|r| r as f64).collect();
    let rank_mean = (nf + 1.0) / 2.0;
    let value_mean = sorted.iter().sum::<f64>() / nf;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (r, v) in ranks.iter().zip(&sorted) {
        sxy += (r - rank_mean) * (v - value_mean);
        sxx += (r - rank_mean) * (r - rank_mean);
    }
    let slope = sxy / sxx;
    let intercept = value_mean - slope * rank_mean;
    let trend: Vec<f64> = ranks.iter().map(|r| slope * r + intercept).collect();
    let series = AnalysisSeries::from_columns(
        "rank-trend",
        vec![("rank", ranks), ("value", sorted), ("trend", trend)],
    )?;
    Ok((
        series,
        TrendLine {
            slope,
            intercept,
            n,
        },
    ))
}

/// Canonical grouping key: the trimmed project name, or the author
/// identity — the (trimmed name, lowercased email) pair.
fn entity_key(event: &CommitEvent, group_by: RateGroup) -> String {
    match group_by {
        RateGroup::Project => event.project.trim().to_string(),
        RateGroup::Author => format!(
            "{} <{}>",
            event.author_name.trim(),
            event.author_email.trim().to_lowercase()
        ),
    }
}

/// Total commits per entity under the same grouping rule as
/// [`commit_rates`], with no span-based exclusions. Totals always sum
/// to the event count.
pub fn entity_totals(events: &[CommitEvent], group_by: RateGroup) -> BTreeMap<String, u64> {
    let mut totals: BTreeMap<String, u64> = BTreeMap::new();
    for event in events {
        *totals.entry(entity_key(event, group_by)).or_default() += 1;
    }
    totals
}

/// Groups commits by project or by author — author identity being the
/// (trimmed name, lowercased email) pair — and derives commits/day over
/// each entity's active span. Entities whose commits all fall on one
/// calendar day have no measurable span and are excluded, counted.
pub fn commit_rates(events: &[CommitEvent], group_by: RateGroup) -> RateReport {
    let mut groups: BTreeMap<String, (u64, NaiveDate, NaiveDate)> = BTreeMap::new();
    for event in events {
        let key = entity_key(event, group_by);
        let day = event.date.date_naive();
        groups
            .entry(key)
            .and_modify(|(count, first, last)| {
                *count += 1;
                *first = (*first).min(day);
                *last = (*last).max(day);
            })
            .or_insert((1, day, day));
    }
    let mut entries = Vec::new();
    let mut excluded_single_day = 0usize;
    for (entity, (total_commits, first, last)) in groups {
        let span = (last - first).num_days();
        if span < 1 {
            excluded_single_day += 1;
            continue;
        }
        let span_days = span as u64;
        entries.push(RateEntry {
            entity,
            total_commits,
            span_days,
            rate: total_commits as f64 / span_days as f64,
        });
    }
    RateReport {
        entries,
        excluded_single_day,
    }
}

/// Total commits per weekday, Monday through Sunday. The weekday
/// column is the ISO number (Monday = 1 … Sunday = 7).
pub fn weekly_profile(events: &[CommitEvent]) -> Result<AnalysisSeries, AnalyzeError> {
    let mut counts = [0u64; 7];
    for event in events {
        let index = event.date.date_naive().weekday().num_days_from_monday();
        counts[index as usize] += 1;
    }
    Ok(AnalysisSeries::from_columns(
        "weekly-profile",
        vec![
            ("weekday", (1..=7).map(|d| d as f64).collect()),
            ("count", counts.iter().map(|&c| c as f64).collect()),
        ],
    )?)
}

/// Commit counts per calendar period with gaps zero-filled between the
/// first and last active period. Periods are emitted as numeric
/// columns: year (+ month, + epoch_day for finer granularities).
pub fn time_series(
    events: &[CommitEvent],
    granularity: Granularity,
) -> Result<AnalysisSeries, AnalyzeError> {
    if events.is_empty() {
        return Err(AnalyzeError::EmptyInput("time series of zero events".into()));
    }
    let epoch = NaiveDate::from_ymd_opt(1970, 1, 1).expect("fixed valid date");
    match granularity {
        Granularity::Day => {
            let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
            for event in events {
                let day = (event.date.date_naive() - epoch).num_days();
                *counts.entry(day).or_default() += 1;
            }
            let (&first, &last) = (
                counts.keys().next().expect("nonempty"),
                counts.keys().next_back().expect("nonempty"),
            );
            let mut epoch_day = Vec::new();
            let mut year = Vec::new();
            let mut month = Vec::new();
            let mut day_of_month = Vec::new();
            let mut count = Vec::new();
            for d in first..=last {
                let date = if d >= 0 {
                    epoch + chrono::Days::new(d as u64)
                } else {
                    epoch - chrono::Days::new(d.unsigned_abs())
                };
                epoch_day.push(d as f64);
                year.push(date.year() as f64);
                month.push(date.month() as f64);
                day_of_month.push(date.day() as f64);
                count.push(*counts.get(&d).unwrap_or(&0) as f64);
            }
            Ok(AnalysisSeries::from_columns(
                "time-series-day",
                vec![
                    ("epoch_day", epoch_day),
                    ("year", year),
                    ("month", month),
                    ("day", day_of_month),
                    ("count", count),
                ],
            )?)
        }
        Granularity::Month => {
            let mut counts: BTreeMap<i32, u64> = BTreeMap::new();
            for event in events {
                let date = event.date.date_naive();
                let key = date.year() * 12 + date.month0() as i32;
                *counts.entry(key).or_default() += 1;
            }
            let (&first, &last) = (
                counts.keys().next().expect("nonempty"),
                counts.keys().next_back().expect("nonempty"),
            );
            let mut year = Vec::new();
            let mut month = Vec::new();
            let mut count = Vec::new();
            for key in first..=last {
                year.push(key.div_euclid(12) as f64);
                month.push((key.rem_euclid(12) + 1) as f64);
                count.push(*counts.get(&key).unwrap_or(&0) as f64);
            }
            Ok(AnalysisSeries::from_columns(
                "time-series-month",
                vec![("year", year), ("month", month), ("count", count)],
            )?)
        }
        Granularity::Year => {
            let mut counts: BTreeMap<i32, u64> = BTreeMap::new();
            for event in events {
                *counts.entry(event.date.date_naive().year()).or_default() += 1;
            }
            let (&first, &last) = (
                counts.keys().next().expect("nonempty"),
                counts.keys().next_back().expect("nonempty"),
            );
            let mut year = Vec::new();
            let mut count = Vec::new();
            for y in first..=last {
                year.push(y as f64);
                count.push(*counts.get(&y).unwrap_or(&0) as f64);
            }
            Ok(AnalysisSeries::from_columns(
                "time-series-year",
                vec![("year", year), ("count", count)],
            )?)
        }
    }
}

/// (contributors, commits) pairs in stable input order, duplicates
/// preserved, for scatter plots and correlation work.
pub fn commits_vs_contributors(
    records: &[RepoRecord],
) -> Result<AnalysisSeries, AnalyzeError> {
    if records.is_empty() {
        return Err(AnalyzeError::EmptyInput(
            "no repository records to pair".into(),
        ));
    }
    Ok(AnalysisSeries::from_columns(
        "commits-vs-contributors",
        vec![
            (
                "contributors",
                records.iter().map(|r| r.contributors as f64).collect(),
            ),
            ("commits", records.iter().map(|r| r.commits as f64).collect()),
        ],
    )?)
}
