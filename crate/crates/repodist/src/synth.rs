//! Seeded generation of synthetic coder–commit–repository graphs.
//! Repositories draw an activity band, then a commit count truncated to
//! the band's range; commits are assigned to coders categorically by
//! commit rate and stamped with calendar days whose weekday profile
//! follows the configured weights. Everything derives from one seed, so
//! equal configurations reproduce byte-identical exports.

use crate::dist::{DistError, Distribution, SeededUniform, UniformSource};
use crate::ingest::ActivityBand;
use chrono::{Datelike, Days, NaiveDate};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid config: {}", summarize_field_errors(.0))]
    InvalidConfig(Vec<FieldError>),
    #[error("band {band} has negligible probability mass under its commit distribution; truncated sampling is infeasible")]
    InfeasibleBand { band: String },
    #[error("truncation to [{lo}, {hi}] leaves negligible probability mass")]
    EmptyTruncation { lo: f64, hi: f64 },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path} row {row}: {message}")]
    BadRow {
        path: String,
        row: usize,
        message: String,
    },
    #[error(transparent)]
    Dist(#[from] DistError),
}

fn summarize_field_errors(errors: &[FieldError]) -> String {
    let mut out = String::new();
    for (i, e) in errors.iter().enumerate() {
        if i > 0 {
            out.push_str("; ");
        }
        let _ = write!(out, "{}: {}", e.field, e.message);
    }
    out
}

/// Inclusive calendar-day window for commit timestamps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeRange {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

fn default_coder_rate_dist() -> Distribution {
    Distribution::new(crate::dist::Params::Exponential {
        loc: 0.0,
        scale: 1.0,
    })
    .expect("unit exponential is valid")
}

/// Full recipe for one synthetic graph. All sampling distributions are
/// validated [`Distribution`]s, so a deserialized config is usable as
/// soon as [`SynthConfig::validate`] passes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_repos: usize,
    pub n_coders: usize,
    /// Probability of each activity band; must sum to 1 ± 1e-12.
    pub band_mix: BTreeMap<ActivityBand, f64>,
    /// Commit-count distribution per band, truncated to the band range
    /// at sampling time. Required for every band with positive weight.
    pub commits_per_repo_dist: BTreeMap<ActivityBand, Distribution>,
    pub coder_experience_dist: Distribution,
    /// Source of per-coder commit rates, which weight the coder→commit
    /// assignment. Defaults to a unit exponential.
    #[serde(default = "default_coder_rate_dist")]
    pub coder_rate_dist: Distribution,
    pub contributors_per_repo_dist: Distribution,
    pub commit_msg_len_dist: Distribution,
    pub time_range: TimeRange,
    /// Relative day-of-week frequencies, Monday through Sunday.
    pub weekly_weights: [f64; 7],
    /// When set, each commit gets a Bernoulli bug label with this
    /// probability; ships disabled (no label column) by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bug_probability: Option<f64>,
}

impl SynthConfig {
    /// Checks every field and reports all problems at once.
    pub fn validate(&self) -> Result<(), SynthError> {
        let mut errors = Vec::new();
        let mut fail = |field: &str, message: String| {
            errors.push(FieldError {
                field: field.to_string(),
                message,
            });
        };
        if self.n_repos < 1 {
            fail("n_repos", "must be at least 1".into());
        }
        if self.n_coders < 1 {
            fail("n_coders", "must be at least 1".into());
        }
        let mut mix_sum = 0.0;
        for (band, &w) in &self.band_mix {
            if !(w.is_finite() && w >= 0.0) {
                fail("band_mix", format!("weight for {band} must be ≥ 0, got {w}"));
            } else {
                mix_sum += w;
            }
        }
        if (mix_sum - 1.0).abs() > 1e-12 {
            fail(
                "band_mix",
                format!("weights must sum to 1 ± 1e-12, got {mix_sum:.15}"),
            );
        }
        for (band, &w) in &self.band_mix {
            if w > 0.0 && !self.commits_per_repo_dist.contains_key(band) {
                fail(
                    "commits_per_repo_dist",
                    format!("band {band} has weight {w} but no commit distribution"),
                );
            }
        }
        if self.time_range.start > self.time_range.end {
            fail(
                "time_range",
                format!(
                    "start {} is after end {}",
                    self.time_range.start, self.time_range.end
                ),
            );
        }
        let mut weight_problem = false;
        for &w in &self.weekly_weights {
            if !(w.is_finite() && w >= 0.0) {
                weight_problem = true;
            }
        }
        if weight_problem {
            fail(
                "weekly_weights",
                "all seven weights must be finite and ≥ 0".into(),
            );
        } else if self.weekly_weights.iter().sum::<f64>() <= 0.0 {
            fail("weekly_weights", "weights must not all be zero".into());
        } else if self.time_range.start <= self.time_range.end {
            // The weights must give at least one drawable day inside the
            // window (a short window can miss every nonzero weekday).
            let mut any = false;
            let mut day = self.time_range.start;
            while day <= self.time_range.end {
                if self.weekly_weights[day.weekday().num_days_from_monday() as usize] > 0.0
                {
                    any = true;
                    break;
                }
                day = day + Days::new(1);
            }
            if !any {
                fail(
                    "weekly_weights",
                    "no day inside time_range has positive weight".into(),
                );
            }
        }
        if let Some(p) = self.bug_probability {
            if !(0.0..=1.0).contains(&p) {
                fail(
                    "bug_probability",
                    format!("must be within [0, 1], got {p}"),
                );
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(SynthError::InvalidConfig(errors))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoderNode {
    pub id: u64,
    pub experience_years: f64,
    pub commit_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommitNode {
    pub id: u64,
    pub coder_id: u64,
    pub repo_id: u64,
    pub date: NaiveDate,
    pub msg_len: u64,
    /// Present only when the Bernoulli bug labeler is enabled.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bug: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepoNode {
    pub id: u64,
    pub band: ActivityBand,
    pub total_commits: u64,
    pub contributors: u64,
}

/// The generated graph: nodes plus the implicit coder→commit→repo
/// edges carried by the commits' foreign keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripartiteGraph {
    pub coders: Vec<CoderNode>,
    pub commits: Vec<CommitNode>,
    pub repos: Vec<RepoNode>,
}

/// Rounds half-up and clamps into the nonnegative integers.
fn to_count(x: f64) -> u64 {
    let rounded = (x + 0.5).floor();
    if rounded <= 0.0 {
        0
    } else {
        rounded as u64
    }
}

/// Inverse-transform sampling restricted to [lo, hi]: the uniform draw
/// is mapped into the CDF slice (F(lo), F(hi)) before inversion.
/// Infinite bounds recover plain sampling.
pub fn truncated_sample<R: UniformSource + ?Sized>(
    dist: &Distribution,
    lo: f64,
    hi: f64,
    rng: &mut R,
) -> Result<f64, SynthError> {
    let f_lo = if lo == f64::NEG_INFINITY {
        0.0
    } else {
        dist.cdf(lo)?
    };
    let f_hi = if hi == f64::INFINITY { 1.0 } else { dist.cdf(hi)? };
    let mass = f_hi - f_lo;
    if mass.is_nan() || mass < 1e-12 {
        return Err(SynthError::EmptyTruncation { lo, hi });
    }
    let u = f_lo + rng.next_open01() * mass;
    // Keep the transformed uniform strictly inside (0, 1) against
    // floating-point edge rounding.
    let u = u.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0);
    let mut x = dist.quantile(u)?;
    if lo.is_finite() && x < lo {
        x = lo;
    }
    if hi.is_finite() && x > hi {
        x = hi;
    }
    Ok(x)
}

/// Cumulative-weight categorical pick: returns the index owning the
/// slice of (0, total) that `u · total` falls into.
fn pick_weighted(cumulative: &[f64], total: f64, u: f64) -> usize {
    let target = u * total;
    let idx = cumulative.partition_point(|&c| c <= target);
    idx.min(cumulative.len() - 1)
}

/// Generates a full graph from the config. Deterministic: the draw
/// order is fixed (coders, then per-repo band + commit count, then per
/// repo its commits and contributor count), all from one seeded stream.
pub fn generate(cfg: &SynthConfig) -> Result<TripartiteGraph, SynthError> {
    cfg.validate()?;

    // Eagerly reject any positive-weight band whose distribution puts
    // no mass inside the band, so the failure does not depend on which
    // bands the seed happens to draw.
    let mut band_samplers: BTreeMap<ActivityBand, (f64, f64)> = BTreeMap::new();
    for (&band, &weight) in &cfg.band_mix {
        if weight <= 0.0 {
            continue;
        }
        let dist = &cfg.commits_per_repo_dist[&band];
        let (lo, hi) = band_float_bounds(band);
        let f_lo = if lo == f64::NEG_INFINITY { 0.0 } else { dist.cdf(lo)? };
        let f_hi = if hi == f64::INFINITY { 1.0 } else { dist.cdf(hi)? };
        let mass = f_hi - f_lo;
        if mass.is_nan() || mass < 1e-12 {
            return Err(SynthError::InfeasibleBand {
                band: band.label().to_string(),
            });
        }
        band_samplers.insert(band, (lo, hi));
    }

    let mut rng = SeededUniform::from_seed(cfg.seed);

    // Coders: experience then rate, per coder.
    let mut coders = Vec::with_capacity(cfg.n_coders);
    for id in 0..cfg.n_coders as u64 {
        let experience_years = cfg.coder_experience_dist.quantile(rng.next_open01())?;
        let commit_rate = cfg.coder_rate_dist.quantile(rng.next_open01())?;
        coders.push(CoderNode {
            id,
            experience_years,
            commit_rate,
        });
    }

    // Categorical helpers: band mix, coder rates, and day weights.
    // Zero-weight bands are dropped so edge rounding can never pick one.
    let bands: Vec<ActivityBand> = cfg
        .band_mix
        .iter()
        .filter(|&(_, &w)| w > 0.0)
        .map(|(&b, _)| b)
        .collect();
    let band_cumulative: Vec<f64> = cfg
        .band_mix
        .values()
        .filter(|&&w| w > 0.0)
        .scan(0.0, |acc, w| {
            *acc += w;
            Some(*acc)
        })
        .collect();
    let band_total = *band_cumulative.last().expect("validated nonempty mix");

    let rate_weights: Vec<f64> = coders
        .iter()
        .map(|c| if c.commit_rate.is_finite() && c.commit_rate > 0.0 {
            c.commit_rate
        } else {
            0.0
        })
        .collect();
    let rate_total: f64 = rate_weights.iter().sum();
    // All-zero rates degrade to a uniform assignment.
    let (rate_cumulative, rate_total) = if rate_total > 0.0 {
        (
            rate_weights
                .iter()
                .scan(0.0, |acc, w| {
                    *acc += w;
                    Some(*acc)
                })
                .collect::<Vec<f64>>(),
            rate_total,
        )
    } else {
        (
            (1..=coders.len()).map(|i| i as f64).collect(),
            coders.len() as f64,
        )
    };

    let mut days = Vec::new();
    let mut day_cumulative = Vec::new();
    let mut acc = 0.0;
    let mut day = cfg.time_range.start;
    while day <= cfg.time_range.end {
        let w = cfg.weekly_weights[day.weekday().num_days_from_monday() as usize];
        if w > 0.0 {
            acc += w;
            days.push(day);
            day_cumulative.push(acc);
        }
        day = day + Days::new(1);
    }
    let day_total = acc;

    // Repositories: band then truncated commit count, per repo.
    let mut repos = Vec::with_capacity(cfg.n_repos);
    let mut commit_counts = Vec::with_capacity(cfg.n_repos);
    for id in 0..cfg.n_repos as u64 {
        let band = bands[pick_weighted(&band_cumulative, band_total, rng.next_open01())];
        let (lo, hi) = band_samplers[&band];
        let raw = truncated_sample(&cfg.commits_per_repo_dist[&band], lo, hi, &mut rng)
            .map_err(|e| match e {
                SynthError::EmptyTruncation { .. } => SynthError::InfeasibleBand {
                    band: band.label().to_string(),
                },
                other => other,
            })?;
        let (band_lo, band_hi) = band.bounds();
        let mut total_commits = to_count(raw).max(band_lo);
        if let Some(upper) = band_hi {
            total_commits = total_commits.min(upper - 1);
        }
        commit_counts.push(total_commits);
        repos.push(RepoNode {
            id,
            band,
            total_commits,
            contributors: 0,
        });
    }

    // Commits per repo, then that repo's contributor count.
    let total_commit_nodes: u64 = commit_counts.iter().sum();
    let mut commits = Vec::with_capacity(total_commit_nodes as usize);
    let mut next_commit_id = 0u64;
    for repo in &mut repos {
        let mut assigned: BTreeSet<u64> = BTreeSet::new();
        for _ in 0..commit_counts[repo.id as usize] {
            let coder_id =
                pick_weighted(&rate_cumulative, rate_total, rng.next_open01()) as u64;
            let date = days[pick_weighted(&day_cumulative, day_total, rng.next_open01())];
            let msg_len = to_count(cfg.commit_msg_len_dist.quantile(rng.next_open01())?);
            let bug = cfg.bug_probability.map(|p| rng.next_open01() < p);
            assigned.insert(coder_id);
            commits.push(CommitNode {
                id: next_commit_id,
                coder_id,
                repo_id: repo.id,
                date,
                msg_len,
                bug,
            });
            next_commit_id += 1;
        }
        let sampled =
            to_count(cfg.contributors_per_repo_dist.quantile(rng.next_open01())?);
        repo.contributors = if assigned.is_empty() {
            0
        } else {
            // A repo with commits has at least one contributor, and never
            // more than the coders actually seen on its commits.
            sampled.max(1).min(assigned.len() as u64)
        };
    }

    log::debug!(
        "generated graph: {} coders, {} commits, {} repos (seed {})",
        coders.len(),
        commits.len(),
        repos.len(),
        cfg.seed
    );
    Ok(TripartiteGraph {
        coders,
        commits,
        repos,
    })
}

/// Half-open float bounds of one band for truncated sampling.
fn band_float_bounds(band: ActivityBand) -> (f64, f64) {
    let (lo, hi) = band.bounds();
    (
        lo as f64,
        hi.map(|h| h as f64).unwrap_or(f64::INFINITY),
    )
}

/// Export manifest: enough to replay the generation (config + seed +
/// tool version) plus a per-band frequency report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthManifest {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub config: SynthConfig,
    pub n_coders: usize,
    pub n_commits: usize,
    pub n_repos: usize,
    pub band_repo_counts: BTreeMap<ActivityBand, u64>,
}

fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), SynthError> {
    let to_err = |source: std::io::Error| SynthError::Write {
        path: path.display().to_string(),
        source,
    };
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(to_err)?;
    tmp.write_all(contents).map_err(to_err)?;
    tmp.flush().map_err(to_err)?;
    tmp.persist(path).map_err(|e| to_err(e.error))?;
    Ok(())
}

/// Writes coders.csv, commits.csv, repos.csv and manifest.json into
/// `dir` (created if missing), atomically. Returns the manifest.
pub fn export_graph(
    graph: &TripartiteGraph,
    cfg: &SynthConfig,
    dir: impl AsRef<Path>,
) -> Result<SynthManifest, SynthError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|source| SynthError::Write {
        path: dir.display().to_string(),
        source,
    })?;

    let mut coders_csv = String::from("id,experience_years,commit_rate\n");
    for c in &graph.coders {
        let _ = writeln!(
            coders_csv,
            "{},{},{}",
            c.id, c.experience_years, c.commit_rate
        );
    }
    write_atomic(&dir.join("coders.csv"), coders_csv.as_bytes())?;

    let labeled = graph.commits.iter().any(|c| c.bug.is_some());
    let mut commits_csv = if labeled {
        String::from("id,coder_id,repo_id,date,msg_len,bug\n")
    } else {
        String::from("id,coder_id,repo_id,date,msg_len\n")
    };
    for c in &graph.commits {
        if labeled {
            let _ = writeln!(
                commits_csv,
                "{},{},{},{},{},{}",
                c.id,
                c.coder_id,
                c.repo_id,
                c.date.format("%Y-%m-%d"),
                c.msg_len,
                c.bug.map(|b| if b { "1" } else { "0" }).unwrap_or("")
            );
        } else {
            let _ = writeln!(
                commits_csv,
                "{},{},{},{},{}",
                c.id,
                c.coder_id,
                c.repo_id,
                c.date.format("%Y-%m-%d"),
                c.msg_len
            );
        }
    }
    write_atomic(&dir.join("commits.csv"), commits_csv.as_bytes())?;

    let mut repos_csv = String::from("id,band,total_commits,contributors\n");
    for r in &graph.repos {
        let _ = writeln!(
            repos_csv,
            "{},{},{},{}",
            r.id,
            r.band.label(),
            r.total_commits,
            r.contributors
        );
    }
    write_atomic(&dir.join("repos.csv"), repos_csv.as_bytes())?;

    let mut band_repo_counts: BTreeMap<ActivityBand, u64> = BTreeMap::new();
    for r in &graph.repos {
        *band_repo_counts.entry(r.band).or_default() += 1;
    }
    let manifest = SynthManifest {
        tool: "repodist".to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.seed,
        config: cfg.clone(),
        n_coders: graph.coders.len(),
        n_commits: graph.commits.len(),
        n_repos: graph.repos.len(),
        band_repo_counts,
    };
    let manifest_json =
        serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_atomic(&dir.join("manifest.json"), manifest_json.as_bytes())?;
    Ok(manifest)
}

fn read_file(path: &Path) -> Result<String, SynthError> {
    fs::read_to_string(path).map_err(|source| SynthError::Read {
        path: path.display().to_string(),
        source,
    })
}

fn bad_row(path: &Path, row: usize, message: impl Into<String>) -> SynthError {
    SynthError::BadRow {
        path: path.display().to_string(),
        row,
        message: message.into(),
    }
}

/// Reads an exported graph back. An export followed by an import gives
/// a graph equal to the original.
pub fn import_graph(dir: impl AsRef<Path>) -> Result<TripartiteGraph, SynthError> {
    let dir = dir.as_ref();

    let coders_path = dir.join("coders.csv");
    let mut coders = Vec::new();
    for (i, line) in read_file(&coders_path)?.lines().enumerate().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(bad_row(&coders_path, i + 1, "expected 3 fields"));
        }
        coders.push(CoderNode {
            id: fields[0]
                .parse()
                .map_err(|e| bad_row(&coders_path, i + 1, format!("id: {e}")))?,
            experience_years: fields[1]
                .parse()
                .map_err(|e| bad_row(&coders_path, i + 1, format!("experience: {e}")))?,
            commit_rate: fields[2]
                .parse()
                .map_err(|e| bad_row(&coders_path, i + 1, format!("rate: {e}")))?,
        });
    }

    let commits_path = dir.join("commits.csv");
    let commits_text = read_file(&commits_path)?;
    let mut lines = commits_text.lines();
    let header = lines.next().unwrap_or_default();
    let labeled = header.ends_with(",bug");
    let mut commits = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        let expected = if labeled { 6 } else { 5 };
        if fields.len() != expected {
            return Err(bad_row(
                &commits_path,
                i + 2,
                format!("expected {expected} fields"),
            ));
        }
        commits.push(CommitNode {
            id: fields[0]
                .parse()
                .map_err(|e| bad_row(&commits_path, i + 2, format!("id: {e}")))?,
            coder_id: fields[1]
                .parse()
                .map_err(|e| bad_row(&commits_path, i + 2, format!("coder_id: {e}")))?,
            repo_id: fields[2]
                .parse()
                .map_err(|e| bad_row(&commits_path, i + 2, format!("repo_id: {e}")))?,
            date: NaiveDate::parse_from_str(fields[3], "%Y-%m-%d")
                .map_err(|e| bad_row(&commits_path, i + 2, format!("date: {e}")))?,
            msg_len: fields[4]
                .parse()
                .map_err(|e| bad_row(&commits_path, i + 2, format!("msg_len: {e}")))?,
            bug: if labeled {
                match fields[5] {
                    "1" => Some(true),
                    "0" => Some(false),
                    other => {
                        return Err(bad_row(
                            &commits_path,
                            i + 2,
                            format!("bug flag must be 0 or 1, got {other:?}"),
                        ))
                    }
                }
            } else {
                None
            },
        });
    }

    let repos_path = dir.join("repos.csv");
    let mut repos = Vec::new();
    for (i, line) in read_file(&repos_path)?.lines().enumerate().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(bad_row(&repos_path, i + 1, "expected 4 fields"));
        }
        repos.push(RepoNode {
            id: fields[0]
                .parse()
                .map_err(|e| bad_row(&repos_path, i + 1, format!("id: {e}")))?,
            band: fields[1]
                .parse()
                .map_err(|e: String| bad_row(&repos_path, i + 1, e))?,
            total_commits: fields[2]
                .parse()
                .map_err(|e| bad_row(&repos_path, i + 1, format!("total_commits: {e}")))?,
            contributors: fields[3]
                .parse()
                .map_err(|e| bad_row(&repos_path, i + 1, format!("contributors: {e}")))?,
        });
    }

    Ok(TripartiteGraph {
        coders,
        commits,
        repos,
    })
}
