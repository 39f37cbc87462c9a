//! The `fit` verb: load a numeric column, fit the requested families,
//! rank them, and write a versioned JSON report plus optional
//! goodness-of-fit series.

use crate::data::{self, NumericData};
use crate::output::{atomic_write, CliError};
use crate::{FitArgs, GroupArg};
use repodist::dist::Family;
use repodist::fit::{
    self, Criterion, MomentSummary, RankEntry, Ranking, Standardization,
};
use repodist::sample::Sample;
use repodist::series::Binning;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

/// Everything a reader needs to interpret the fitted numbers: where
/// the values came from and what was done to them before fitting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessingInfo {
    /// Dataset identifier recorded in the sample's provenance.
    pub source: String,
    /// Ordered human-readable preprocessing steps.
    pub steps: Vec<String>,
    /// Activity band the sample was restricted to, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<String>,
    /// Whether values were z-score standardized before fitting.
    pub standardized: bool,
    /// The (mean, sd) used for standardization, for mapping fitted
    /// parameters back to the raw scale.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub standardization: Option<Standardization>,
}

/// The `fit` command's output document. Serializes losslessly: parsing
/// the JSON back yields an equal report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub schema_version: u32,
    /// Input path as given on the command line.
    pub dataset: String,
    /// Dataset kind token, e.g. "so-survey-2020".
    pub kind: String,
    pub preprocessing: PreprocessingInfo,
    pub sample_size: usize,
    /// Structurally broken CSV rows skipped during ingestion.
    pub malformed_rows: usize,
    pub moments: MomentSummary,
    /// One entry per requested family, in canonical family order.
    pub fits: Vec<RankEntry>,
    /// The same entries sorted by the ranking criterion.
    pub ranking: Ranking,
}

/// Deduplicates while preserving first-occurrence order.
fn unique_families(requested: &[Family]) -> Vec<Family> {
    let mut seen = Vec::new();
    for &f in requested {
        if !seen.contains(&f) {
            seen.push(f);
        }
    }
    seen
}

/// Fits and ranks; pure of any file output so tests can call it on
/// in-memory samples.
pub fn build_report(
    sample: &Sample,
    dataset: String,
    kind: String,
    malformed_rows: usize,
    families: &[Family],
    criterion: Criterion,
    standardization: Option<Standardization>,
) -> Result<FitReport, CliError> {
    let ranking = fit::rank_fits(sample, families, criterion)?;
    let moments = fit::moments(sample)?;
    let mut fits: Vec<RankEntry> = Vec::with_capacity(ranking.entries.len());
    for &family in families {
        if let Some(entry) = ranking.entries.iter().find(|e| e.family() == family) {
            fits.push(entry.clone());
        }
    }
    let provenance = sample.provenance();
    Ok(FitReport {
        schema_version: SCHEMA_VERSION,
        dataset,
        kind,
        preprocessing: PreprocessingInfo {
            source: provenance.source.clone(),
            steps: provenance.steps.clone(),
            band: provenance.band.clone(),
            standardized: provenance.standardized,
            standardization,
        },
        sample_size: sample.len(),
        malformed_rows,
        moments,
        fits,
        ranking,
    })
}

pub fn run(args: &FitArgs, out: Option<&Path>) -> Result<Value, CliError> {
    let out = out.ok_or_else(|| CliError::usage("--out is required for fit"))?;
    let NumericData {
        sample,
        malformed_rows,
    } = data::load_numeric(
        &args.input,
        args.kind,
        args.min,
        args.max,
        args.band,
        GroupArg::Project,
    )?;

    let (sample, standardization) = if args.standardize {
        let (s, std) = fit::standardize(&sample)?;
        (s, Some(std))
    } else {
        (sample, None)
    };

    let families = if args.families.is_empty() {
        Family::ALL.to_vec()
    } else {
        unique_families(&args.families)
    };

    let report = build_report(
        &sample,
        args.input.display().to_string(),
        args.kind.token().to_string(),
        malformed_rows,
        &families,
        args.criterion,
        standardization,
    )?;

    let mut bytes = serde_json::to_vec_pretty(&report).expect("report serializes");
    bytes.push(b'\n');
    atomic_write(out, &bytes)?;

    let best = report
        .ranking
        .best()
        .expect("rank_fits guarantees a feasible fit");

    // Goodness-of-fit series for the winning distribution, always CSV.
    if let Some(path) = &args.pp {
        let series = fit::pp_series(&best.distribution, &sample)?;
        let mut csv = Vec::new();
        series.write_csv(&mut csv)?;
        atomic_write(path, &csv)?;
    }
    if let Some(path) = &args.cdf_compare {
        let series = fit::cdf_compare_series(&best.distribution, &sample)?;
        let mut csv = Vec::new();
        series.write_csv(&mut csv)?;
        atomic_write(path, &csv)?;
    }
    if let Some(path) = &args.density_compare {
        let binning = if args.integer_bins {
            Binning::IntegerCentered
        } else {
            Binning::EqualWidth { bins: args.bins }
        };
        let series = fit::density_compare_series(&best.distribution, &sample, &binning)?;
        let mut csv = Vec::new();
        series.write_csv(&mut csv)?;
        atomic_write(path, &csv)?;
    }

    Ok(json!({
        "command": "fit",
        "out": out.display().to_string(),
        "sample_size": report.sample_size,
        "malformed_rows": report.malformed_rows,
        "families": families.len(),
        "criterion": report.ranking.criterion,
        "best_family": best.distribution.family().name(),
    }))
}
