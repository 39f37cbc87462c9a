//! `repodist` — command-line front end wiring CSV ingestion, maximum
//! likelihood fitting, commit-activity analysis, and synthetic dataset
//! generation.
//!
//! Every run finishes by printing exactly one machine-readable JSON
//! record to stdout: `{"status":"ok", …}` on success (exit 0) or
//! `{"status":"error","kind":…,"message":…}` on failure (exit 1).
//! Output files are written atomically (temp file + rename). Log
//! verbosity is controlled by the `REPODIST_LOG` environment variable
//! (`error`, `warn`, `info`, `debug`, `trace`).

mod analyze_cmd;
mod data;
mod fit_cmd;
mod output;
mod sample_cmd;
mod synth_cmd;

use clap::{Args, Parser, Subcommand, ValueEnum};
use output::OutputFormat;
use repodist::dist::Family;
use repodist::fit::Criterion;
use repodist::ingest::ActivityBand;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "repodist",
    version,
    about = "Fit closed-form distributions to software-development metadata, \
             analyze commit activity, and generate synthetic coder–commit–repository datasets"
)]
struct Cli {
    /// Seed for all randomness; required by `synth` and `sample`
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output file (`fit`, `analyze`, `sample`) or directory (`synth`)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Format for series and draw files; fit reports are always JSON
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit distribution families to one dataset column and rank them
    Fit(FitArgs),
    /// Produce a plot-ready analysis series from a dataset
    Analyze(AnalyzeArgs),
    /// Generate and export a synthetic tripartite dataset
    Synth(SynthArgs),
    /// Draw from one distribution into a file
    Sample(SampleArgs),
}

/// Which CSV schema and preprocessing rules to apply to the input.
#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
enum DatasetKind {
    /// Repository metadata: repository, commits, contributors, avg_commit_length
    #[value(name = "github-repos")]
    GithubRepos,
    /// 2019 developer survey (cleaned with the 2021 rules for comparability)
    #[value(name = "so-survey-2019")]
    SoSurvey2019,
    /// 2020 developer survey: full-time filter plus 30–90 weekly hours
    #[value(name = "so-survey-2020")]
    SoSurvey2020,
    /// 2021 developer survey: professional developers, 1–50 years
    #[value(name = "so-survey-2021")]
    SoSurvey2021,
    /// Commit events: project, sha, message, date, author_name, author_email
    #[value(name = "travis-commits")]
    TravisCommits,
}

impl DatasetKind {
    fn token(self) -> &'static str {
        match self {
            DatasetKind::GithubRepos => "github-repos",
            DatasetKind::SoSurvey2019 => "so-survey-2019",
            DatasetKind::SoSurvey2020 => "so-survey-2020",
            DatasetKind::SoSurvey2021 => "so-survey-2021",
            DatasetKind::TravisCommits => "travis-commits",
        }
    }
}

#[derive(Args)]
struct FitArgs {
    /// Input CSV path
    input: PathBuf,

    /// Dataset schema and preprocessing rules
    #[arg(long, value_enum)]
    kind: DatasetKind,

    /// Lower experience bound in years, inclusive (survey kinds)
    #[arg(long, allow_negative_numbers = true)]
    min: Option<f64>,

    /// Upper experience bound in years, inclusive (survey kinds)
    #[arg(long, allow_negative_numbers = true)]
    max: Option<f64>,

    /// Keep only entities in this activity band, e.g. "100-1000"
    #[arg(long, value_parser = ActivityBand::from_str)]
    band: Option<ActivityBand>,

    /// Families to fit, comma separated; defaults to all eight
    #[arg(long, value_delimiter = ',', value_parser = Family::from_str)]
    families: Vec<Family>,

    /// Ranking criterion: aic, bic, or log-lik
    #[arg(long, default_value = "aic", value_parser = Criterion::from_str)]
    criterion: Criterion,

    /// Standardize to zero mean and unit variance before fitting
    #[arg(long)]
    standardize: bool,

    /// Write a probability–probability series for the best fit (CSV)
    #[arg(long)]
    pp: Option<PathBuf>,

    /// Write an empirical-vs-fitted CDF series for the best fit (CSV)
    #[arg(long)]
    cdf_compare: Option<PathBuf>,

    /// Write a histogram-vs-fitted-density series for the best fit (CSV)
    #[arg(long)]
    density_compare: Option<PathBuf>,

    /// Equal-width bin count for --density-compare
    #[arg(long, default_value_t = 40)]
    bins: usize,

    /// Center --density-compare bins on consecutive integers (count data)
    #[arg(long)]
    integer_bins: bool,
}

/// Which analysis series to compute.
#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
enum AnalysisKind {
    /// Binned value counts or unit-area densities
    Histogram,
    /// Values sorted, ranked, and fitted with an OLS trend line
    RankTrend,
    /// Commits per day over each entity's active span
    CommitRate,
    /// Total commits per weekday, Monday through Sunday
    WeeklyProfile,
    /// Commit counts per calendar period, gaps zero-filled
    TimeSeries,
    /// (contributors, commits) scatter pairs
    CommitsVsContributors,
}

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
enum GroupArg {
    Project,
    Author,
}

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
enum GranularityArg {
    Day,
    Month,
    Year,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Input CSV path
    input: PathBuf,

    /// Dataset schema and preprocessing rules
    #[arg(long, value_enum)]
    kind: DatasetKind,

    /// Analysis to run
    #[arg(long, value_enum)]
    analysis: AnalysisKind,

    /// Entity grouping for commit-event analyses
    #[arg(long, value_enum, default_value_t = GroupArg::Project)]
    group_by: GroupArg,

    /// Rank smallest value first instead of largest first (rank-trend)
    #[arg(long)]
    ascending: bool,

    /// Period length for time-series
    #[arg(long, value_enum, default_value_t = GranularityArg::Month)]
    granularity: GranularityArg,

    /// Equal-width bin count for histogram
    #[arg(long, default_value_t = 40)]
    bins: usize,

    /// Center histogram bins on consecutive integers (count data)
    #[arg(long)]
    integer_bins: bool,

    /// Histogram heights as unit-area density instead of counts
    #[arg(long)]
    density: bool,

    /// Lower experience bound in years, inclusive (survey kinds)
    #[arg(long, allow_negative_numbers = true)]
    min: Option<f64>,

    /// Upper experience bound in years, inclusive (survey kinds)
    #[arg(long, allow_negative_numbers = true)]
    max: Option<f64>,

    /// Keep only entities in this activity band, e.g. "100-1000"
    #[arg(long, value_parser = ActivityBand::from_str)]
    band: Option<ActivityBand>,
}

#[derive(Args)]
struct SynthArgs {
    /// Generation config (JSON); the --seed flag overrides its seed field
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct SampleArgs {
    /// Distribution family, e.g. log_normal, exponential, neg_binomial
    #[arg(long, value_parser = Family::from_str)]
    family: Family,

    /// Number of draws
    #[arg(long)]
    n: usize,

    /// Shape parameter (log_normal, weibull_min, gamma, inverse_gaussian)
    #[arg(long, allow_negative_numbers = true)]
    shape: Option<f64>,

    /// Location shift (continuous families)
    #[arg(long, allow_negative_numbers = true)]
    loc: Option<f64>,

    /// Scale parameter (continuous families)
    #[arg(long, allow_negative_numbers = true)]
    scale: Option<f64>,

    /// Mean (normal)
    #[arg(long, allow_negative_numbers = true)]
    mean: Option<f64>,

    /// Standard deviation (normal)
    #[arg(long, allow_negative_numbers = true)]
    sd: Option<f64>,

    /// Rate (poisson)
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,

    /// Dispersion (neg_binomial)
    #[arg(long, allow_negative_numbers = true)]
    size: Option<f64>,

    /// Mean (neg_binomial)
    #[arg(long, allow_negative_numbers = true)]
    mu: Option<f64>,
}

fn main() {
    let filter = std::env::var("REPODIST_LOG").unwrap_or_else(|_| "warn".to_string());
    env_logger::Builder::new()
        .parse_filters(&filter)
        .format_timestamp(None)
        .init();

    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Fit(args) => fit_cmd::run(args, cli.out.as_deref()),
        Command::Analyze(args) => analyze_cmd::run(args, cli.out.as_deref(), cli.format),
        Command::Synth(args) => synth_cmd::run(args, cli.seed, cli.out.as_deref()),
        Command::Sample(args) => sample_cmd::run(args, cli.seed, cli.out.as_deref(), cli.format),
    };
    match outcome {
        Ok(details) => {
            println!("{}", output::status_line(details));
        }
        Err(err) => {
            println!("{}", err.record_line());
            std::process::exit(1);
        }
    }
}
