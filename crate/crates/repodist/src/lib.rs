//! Fits closed-form probability distributions to software-development
//! metadata (repositories, commits, developers), ranks the fits by
//! goodness of fit, and regenerates synthetic coder–commit–repository
//! datasets by inverse-transform sampling.
//!
//! The crate is organized as a pipeline:
//!
//! - [`specfun`] — self-contained special functions (erf, erf⁻¹, ln Γ,
//!   regularized incomplete gamma and beta) backing every CDF and quantile.
//! - [`dist`] — the distribution catalog: eight families with density,
//!   CDF, quantile, inverse-transform sampling, and log-likelihood.
//! - [`fit`] — maximum-likelihood fitting, AIC/BIC/KS scoring,
//!   skewness–kurtosis screening, and best-fit ranking.
//! - [`ingest`] — CSV readers and the preprocessing rules that turn raw
//!   repository, survey, and commit exports into clean samples.
//! - [`analyze`] — descriptive analytics: histograms, rank trend lines,
//!   commit rates, weekly profiles, and time series.
//! - [`synth`] — seeded generation of tripartite coder–commit–repository
//!   graphs with feature vectors drawn from configured distributions.
//!
//! [`sample::Sample`] and [`series::AnalysisSeries`] are the currencies the
//! modules exchange: cleaned univariate data going in, plot-ready series
//! coming out.

pub mod analyze;
pub mod dist;
pub mod fit;
pub mod ingest;
pub mod sample;
pub mod series;
pub mod specfun;
pub mod synth;

#[cfg(test)]
pub(crate) mod testkit;
