//! Judging which closed-form family explains a sample: moment
//! summaries, per-family maximum-likelihood fits, information-criterion
//! ranking, Kolmogorov–Smirnov distances, and the diagnostic series
//! (P–P, CDF overlay, density overlay) used to eyeball a fit.

mod mle;
mod simplex;

use crate::dist::{DistError, Distribution, Family};
use crate::sample::{Sample, SampleError};
use crate::series::{bin_index, AnalysisSeries, Binning, SeriesError};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
    #[error("{family} cannot model this sample: {reason}")]
    InfeasibleFit { family: &'static str, reason: String },
    #[error("the KS statistic is defined here for continuous families only, got {family}")]
    DiscreteKs { family: &'static str },
    #[error("ranking needs at least two candidate families, got {0}")]
    TooFewFamilies(usize),
    #[error("no candidate family produced a usable fit")]
    NoFeasibleFit,
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// First four sample moments. Skewness and kurtosis are the raw
/// standardized moments (a Normal sample gives kurtosis ≈ 3); they are
/// `None` when the variance is zero instead of being zero-filled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSummary {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
}

pub fn moments(xs: &Sample) -> Result<MomentSummary, FitError> {
    let n = xs.len();
    if n < 2 {
        return Err(FitError::InsufficientData { needed: 2, got: n });
    }
    let nf = n as f64;
    let mean = xs.values().iter().sum::<f64>() / nf;
    let mut m2 = 0.0;
    let mut m3 = 0.0;
    let mut m4 = 0.0;
    for &x in xs.values() {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;
    let (skewness, kurtosis) = if m2 > 0.0 {
        (Some(m3 / m2.powf(1.5)), Some(m4 / (m2 * m2)))
    } else {
        (None, None)
    };
    Ok(MomentSummary {
        n,
        mean,
        variance: m2,
        skewness,
        kurtosis,
    })
}

/// Mean and standard deviation removed by a z-score pre-step, kept so
/// reports can state what the fitted parameters refer to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub mean: f64,
    pub sd: f64,
}

/// Rescales the sample to zero mean and unit variance and records the
/// step in its provenance.
pub fn standardize(xs: &Sample) -> Result<(Sample, Standardization), FitError> {
    let summary = moments(xs)?;
    let sd = summary.variance.sqrt();
    if sd == 0.0 {
        return Err(FitError::DegenerateSample(
            "zero variance, cannot standardize".into(),
        ));
    }
    let z: Vec<f64> = xs
        .values()
        .iter()
        .map(|x| (x - summary.mean) / sd)
        .collect();
    let mut out = xs.derive(z, "standardized to zero mean and unit variance")?;
    out.set_standardized(true);
    Ok((
        out,
        Standardization {
            mean: summary.mean,
            sd,
        },
    ))
}

/// One fitted family with its goodness-of-fit summary. `ks_stat` is
/// populated for continuous families only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub distribution: Distribution,
    pub log_lik: f64,
    pub aic: f64,
    pub bic: f64,
    pub ks_stat: Option<f64>,
    pub n: usize,
    pub converged: bool,
}

/// Fits one family by maximum likelihood and attaches the information
/// criteria (AIC = 2k − 2·lnL, BIC = k·ln n − 2·lnL with k the family's
/// free-parameter count) plus the KS distance for continuous families.
pub fn fit_family(family: Family, xs: &Sample) -> Result<FitResult, FitError> {
    let n = xs.len();
    if n < 2 {
        return Err(FitError::InsufficientData { needed: 2, got: n });
    }
    let est = mle::estimate(family, xs.values())?;
    let ll = est.distribution.log_likelihood(xs)?;
    if ll.zero_density_count > 0 {
        return Err(FitError::InfeasibleFit {
            family: family.name(),
            reason: format!(
                "{} observations fall outside the fitted support",
                ll.zero_density_count
            ),
        });
    }
    let k = family.free_params() as f64;
    let aic = 2.0 * k - 2.0 * ll.value;
    let bic = k * (n as f64).ln() - 2.0 * ll.value;
    let ks_stat = if family.is_discrete() {
        None
    } else {
        Some(ks_statistic(&est.distribution, xs)?)
    };
    Ok(FitResult {
        distribution: est.distribution,
        log_lik: ll.value,
        aic,
        bic,
        ks_stat,
        n,
        converged: est.converged,
    })
}

/// Two-sided Kolmogorov–Smirnov distance between the empirical CDF and
/// a fitted continuous CDF: the largest gap on either side of each jump.
pub fn ks_statistic(dist: &Distribution, xs: &Sample) -> Result<f64, FitError> {
    if dist.family().is_discrete() {
        return Err(FitError::DiscreteKs {
            family: dist.family().name(),
        });
    }
    if xs.is_empty() {
        return Err(FitError::InsufficientData { needed: 1, got: 0 });
    }
    let mut sorted = xs.values().to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut stat = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = dist.cdf(x)?;
        let above = ((i + 1) as f64 / n - f).abs();
        let below = (i as f64 / n - f).abs();
        stat = stat.max(above).max(below);
    }
    Ok(stat)
}

/// Ordering key: lower is better for every criterion, so the
/// log-likelihood is negated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Aic,
    Bic,
    LogLik,
}

impl Criterion {
    fn key(self, fit: &FitResult) -> f64 {
        match self {
            Criterion::Aic => fit.aic,
            Criterion::Bic => fit.bic,
            Criterion::LogLik => -fit.log_lik,
        }
    }
}

impl FromStr for Criterion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "aic" => Ok(Criterion::Aic),
            "bic" => Ok(Criterion::Bic),
            "loglik" | "loglikelihood" => Ok(Criterion::LogLik),
            _ => Err(format!("unknown ranking criterion {s:?}")),
        }
    }
}

/// One slot in a ranking: either a completed fit or the reason the
/// family could not be fitted at all.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RankEntry {
    Fitted(FitResult),
    Infeasible { family: Family, reason: String },
}

impl RankEntry {
    pub fn family(&self) -> Family {
        match self {
            RankEntry::Fitted(fit) => fit.distribution.family(),
            RankEntry::Infeasible { family, .. } => *family,
        }
    }

    pub fn fit(&self) -> Option<&FitResult> {
        match self {
            RankEntry::Fitted(fit) => Some(fit),
            RankEntry::Infeasible { .. } => None,
        }
    }
}

/// All candidate families ordered best-first. Converged fits come
/// first (ordered by the criterion), then non-converged fits, then
/// infeasible families; every requested family appears exactly once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub criterion: Criterion,
    pub entries: Vec<RankEntry>,
}

impl Ranking {
    /// The best completed fit, if any converged or non-converged fit exists.
    pub fn best(&self) -> Option<&FitResult> {
        self.entries.iter().find_map(RankEntry::fit)
    }
}

/// Ties on the chosen criterion fall through AIC → BIC → log-likelihood
/// and finally the canonical family tag order, so rankings are total
/// and reproducible.
fn rank_order(a: &FitResult, b: &FitResult, criterion: Criterion) -> Ordering {
    (!a.converged)
        .cmp(&!b.converged)
        .then_with(|| {
            for c in [criterion, Criterion::Aic, Criterion::Bic, Criterion::LogLik] {
                let ord = c.key(a).total_cmp(&c.key(b));
                if ord != Ordering::Equal {
                    return ord;
                }
            }
            Ordering::Equal
        })
        .then_with(|| a.distribution.family().cmp(&b.distribution.family()))
}

/// Fits every candidate family and orders them by the criterion.
/// Families that cannot model the sample (wrong support, degenerate
/// statistics) are kept in the result, flagged, at the end.
pub fn rank_fits(
    xs: &Sample,
    families: &[Family],
    criterion: Criterion,
) -> Result<Ranking, FitError> {
    if families.len() < 2 {
        return Err(FitError::TooFewFamilies(families.len()));
    }
    let mut fitted: Vec<FitResult> = Vec::new();
    let mut infeasible: Vec<(Family, String)> = Vec::new();
    for &family in families {
        match fit_family(family, xs) {
            Ok(fit) => fitted.push(fit),
            Err(FitError::InfeasibleFit { reason, .. }) => {
                log::debug!("{family} is infeasible for this sample: {reason}");
                infeasible.push((family, reason));
            }
            Err(other) => return Err(other),
        }
    }
    if fitted.is_empty() {
        return Err(FitError::NoFeasibleFit);
    }
    fitted.sort_by(|a, b| rank_order(a, b, criterion));
    let mut entries: Vec<RankEntry> = fitted.into_iter().map(RankEntry::Fitted).collect();
    entries.extend(
        infeasible
            .into_iter()
            .map(|(family, reason)| RankEntry::Infeasible { family, reason }),
    );
    Ok(Ranking { criterion, entries })
}

/// P–P diagnostic: empirical plotting positions (i − ½)/n against the
/// fitted CDF at the order statistics. A good fit hugs the diagonal.
pub fn pp_series(dist: &Distribution, xs: &Sample) -> Result<AnalysisSeries, FitError> {
    if xs.is_empty() {
        return Err(FitError::InsufficientData { needed: 1, got: 0 });
    }
    let mut sorted = xs.values().to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut empirical = Vec::with_capacity(sorted.len());
    let mut theoretical = Vec::with_capacity(sorted.len());
    for (i, &x) in sorted.iter().enumerate() {
        empirical.push((i as f64 + 0.5) / n);
        theoretical.push(dist.cdf(x)?);
    }
    Ok(AnalysisSeries::from_columns(
        "probability-probability",
        vec![
            ("empirical_probability", empirical),
            ("theoretical_probability", theoretical),
        ],
    )?)
}

/// Step-function comparison: (x, empirical CDF, fitted CDF) at each
/// order statistic, with the empirical CDF at its post-jump value i/n.
pub fn cdf_compare_series(
    dist: &Distribution,
    xs: &Sample,
) -> Result<AnalysisSeries, FitError> {
    if xs.is_empty() {
        return Err(FitError::InsufficientData { needed: 1, got: 0 });
    }
    let mut sorted = xs.values().to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut empirical = Vec::with_capacity(sorted.len());
    let mut fitted = Vec::with_capacity(sorted.len());
    for (i, &x) in sorted.iter().enumerate() {
        empirical.push((i + 1) as f64 / n);
        fitted.push(dist.cdf(x)?);
    }
    Ok(AnalysisSeries::from_columns(
        "cdf-comparison",
        vec![
            ("x", sorted),
            ("empirical_cdf", empirical),
            ("fitted_cdf", fitted),
        ],
    )?)
}

/// Unit-area histogram of the sample next to the fitted density at the
/// bin centers. Observations outside explicit bin edges are dropped
/// before normalizing, so the histogram always integrates to one.
pub fn density_compare_series(
    dist: &Distribution,
    xs: &Sample,
    binning: &Binning,
) -> Result<AnalysisSeries, FitError> {
    if xs.is_empty() {
        return Err(FitError::InsufficientData { needed: 1, got: 0 });
    }
    let edges = binning.edges_for(xs.values())?;
    let bins = edges.len() - 1;
    let mut counts = vec![0usize; bins];
    let mut included = 0usize;
    for &x in xs.values() {
        if let Some(i) = bin_index(&edges, x) {
            counts[i] += 1;
            included += 1;
        }
    }
    if included == 0 {
        return Err(FitError::DegenerateSample(
            "no observations fall inside the bin edges".into(),
        ));
    }
    let mut centers = Vec::with_capacity(bins);
    let mut histogram = Vec::with_capacity(bins);
    let mut fitted = Vec::with_capacity(bins);
    for i in 0..bins {
        let width = edges[i + 1] - edges[i];
        let center = 0.5 * (edges[i] + edges[i + 1]);
        centers.push(center);
        histogram.push(counts[i] as f64 / (included as f64 * width));
        fitted.push(dist.density(center));
    }
    Ok(AnalysisSeries::from_columns(
        "density-comparison",
        vec![
            ("bin_center", centers),
            ("histogram_density", histogram),
            ("fitted_density", fitted),
        ],
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{Params, SeededUniform};

    fn draws(params: Params, seed: u64, n: usize) -> Sample {
        let dist = Distribution::new(params).unwrap();
        let mut rng = SeededUniform::from_seed(seed);
        Sample::from_values(dist.sample(&mut rng, n).unwrap(), "test draws").unwrap()
    }

    fn sample_of(values: &[f64]) -> Sample {
        Sample::from_values(values.to_vec(), "test").unwrap()
    }

    fn loglik(dist: &Distribution, xs: &Sample) -> f64 {
        dist.log_likelihood(xs).unwrap().value
    }

    // ---- moments -------------------------------------------------------

    #[test]
    fn moments_of_small_symmetric_samples() {
        let m = moments(&sample_of(&[-1.0, 0.0, 1.0])).unwrap();
        assert_eq!(m.n, 3);
        assert!(m.mean.abs() < 1e-15);
        assert!((m.variance - 2.0 / 3.0).abs() < 1e-15);
        assert!(m.skewness.unwrap().abs() < 1e-15);

        let m = moments(&sample_of(&[-1.0, 1.0])).unwrap();
        assert!((m.variance - 1.0).abs() < 1e-15);
        // Two-point samples have the minimum possible kurtosis, 1.
        assert!((m.kurtosis.unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn moments_of_normal_draws_match_theory() {
        let xs = draws(Params::Normal { mean: 0.0, sd: 1.0 }, 11, 100_000);
        let m = moments(&xs).unwrap();
        assert!(m.mean.abs() < 0.02, "mean {}", m.mean);
        assert!((m.variance - 1.0).abs() < 0.03, "var {}", m.variance);
        assert!(m.skewness.unwrap().abs() < 0.05);
        assert!((m.kurtosis.unwrap() - 3.0).abs() < 0.1);
    }

    #[test]
    fn moments_errors_and_degenerate_flags() {
        let err = moments(&sample_of(&[4.2])).unwrap_err();
        assert!(matches!(
            err,
            FitError::InsufficientData { needed: 2, got: 1 }
        ));
        let m = moments(&sample_of(&[5.0, 5.0, 5.0])).unwrap();
        assert_eq!(m.variance, 0.0);
        assert!(m.skewness.is_none());
        assert!(m.kurtosis.is_none());
    }

    // ---- standardize ---------------------------------------------------

    #[test]
    fn standardize_centers_and_scales() {
        let (z, scale) = standardize(&sample_of(&[2.0, 4.0, 6.0])).unwrap();
        assert!((scale.mean - 4.0).abs() < 1e-15);
        assert!((scale.sd - (8.0f64 / 3.0).sqrt()).abs() < 1e-15);
        let m = moments(&z).unwrap();
        assert!(m.mean.abs() < 1e-15);
        assert!((m.variance - 1.0).abs() < 1e-12);
        assert!(z.provenance().standardized);
        assert!(!z.provenance().steps.is_empty());
    }

    #[test]
    fn standardize_rejects_constant_sample() {
        let err = standardize(&sample_of(&[3.0, 3.0])).unwrap_err();
        assert!(matches!(err, FitError::DegenerateSample(_)));
    }

    // ---- closed-form fits ----------------------------------------------

    #[test]
    fn normal_fit_is_the_sample_mean_and_rms_deviation() {
        let xs = sample_of(&[1.0, 2.0, 3.0]);
        let fit = fit_family(Family::Normal, &xs).unwrap();
        let Params::Normal { mean, sd } = *fit.distribution.params() else {
            panic!("expected a normal fit");
        };
        assert!((mean - 2.0).abs() < 1e-15);
        assert!((sd - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!(fit.converged);
        // The reported criteria satisfy their definitions bit-for-bit.
        assert_eq!(fit.aic, 2.0 * 2.0 - 2.0 * fit.log_lik);
        assert_eq!(fit.bic, 2.0 * 3.0f64.ln() - 2.0 * fit.log_lik);
        assert!(fit.ks_stat.is_some());
    }

    #[test]
    fn poisson_fit_is_the_sample_mean() {
        let xs = sample_of(&[1.0, 2.0, 3.0]);
        let fit = fit_family(Family::Poisson, &xs).unwrap();
        let Params::Poisson { lambda } = *fit.distribution.params() else {
            panic!("expected a poisson fit");
        };
        assert!((lambda - 2.0).abs() < 1e-15);
        assert!(fit.ks_stat.is_none());
        assert_eq!(fit.aic, 2.0 * 1.0 - 2.0 * fit.log_lik);
    }

    #[test]
    fn count_families_reject_fractional_observations() {
        let xs = sample_of(&[1.5, 2.0, 3.0]);
        for family in [Family::Poisson, Family::NegBinomial] {
            let err = fit_family(family, &xs).unwrap_err();
            assert!(
                matches!(err, FitError::InfeasibleFit { .. }),
                "{family}: {err}"
            );
        }
    }

    #[test]
    fn exponential_fit_pins_location_below_the_minimum() {
        let xs = sample_of(&[1.0, 2.0, 3.0, 10.0]);
        let fit = fit_family(Family::Exponential, &xs).unwrap();
        let Params::Exponential { loc, scale } = *fit.distribution.params() else {
            panic!("expected an exponential fit");
        };
        assert!(loc < 1.0 && loc > 1.0 - 1e-6);
        assert!((scale - (4.0 - loc)).abs() < 1e-12);
        // The closed form dominates nearby scale choices.
        let worse = Distribution::new(Params::Exponential {
            loc,
            scale: scale * 1.2,
        })
        .unwrap();
        assert!(loglik(&worse, &xs) < fit.log_lik);
    }

    #[test]
    fn too_small_samples_are_rejected() {
        let xs = sample_of(&[1.0]);
        let err = fit_family(Family::Normal, &xs).unwrap_err();
        assert!(matches!(
            err,
            FitError::InsufficientData { needed: 2, got: 1 }
        ));
    }

    // ---- numeric fits --------------------------------------------------

    #[test]
    fn neg_binomial_recovers_its_generating_parameters() {
        let truth = Params::NegBinomial { size: 2.2, mu: 6.8 };
        let xs = draws(truth, 31, 31_202);
        let fit = fit_family(Family::NegBinomial, &xs).unwrap();
        let Params::NegBinomial { size, mu } = *fit.distribution.params() else {
            panic!("expected a negative binomial fit");
        };
        assert!(fit.converged);
        assert!((1.9..=2.5).contains(&size), "size {size}");
        assert!((6.6..=7.0).contains(&mu), "mu {mu}");
        // The mean is fitted exactly: it is the closed-form MLE at any
        // fixed dispersion.
        let mean = xs.values().iter().sum::<f64>() / xs.len() as f64;
        assert!((mu - mean).abs() < 1e-12);
    }

    #[test]
    fn gamma_fit_matches_generating_likelihood() {
        let truth = Params::Gamma {
            shape: 1.17,
            loc: -1.26,
            scale: 1.07,
        };
        let xs = draws(truth, 7, 10_000);
        let fit = fit_family(Family::Gamma, &xs).unwrap();
        assert!(fit.converged);
        let ll_true = loglik(&Distribution::new(truth).unwrap(), &xs);
        let gap = (fit.log_lik - ll_true) / ll_true.abs();
        assert!(gap.abs() < 0.005, "relative gap {gap}");
        // A maximum-likelihood fit cannot do meaningfully worse than the
        // generating parameters on its own training sample.
        assert!(fit.log_lik >= ll_true - 3.0, "{} vs {ll_true}", fit.log_lik);
    }

    #[test]
    fn fitted_gamma_is_a_local_maximum() {
        let truth = Params::Gamma {
            shape: 1.17,
            loc: -1.26,
            scale: 1.07,
        };
        let xs = draws(truth, 7, 10_000);
        let fit = fit_family(Family::Gamma, &xs).unwrap();
        let Params::Gamma { shape, loc, scale } = *fit.distribution.params() else {
            panic!("expected a gamma fit");
        };
        let base = fit.log_lik;
        let mut checked = 0;
        for delta in [1e-4, -1e-4] {
            for which in 0..3 {
                let mut p = (shape, loc, scale);
                match which {
                    0 => p.0 *= 1.0 + delta,
                    1 => p.1 += delta * p.1.abs().max(1e-3),
                    _ => p.2 *= 1.0 + delta,
                }
                let perturbed = Distribution::new(Params::Gamma {
                    shape: p.0,
                    loc: p.1,
                    scale: p.2,
                })
                .unwrap();
                let ll = perturbed.log_likelihood(&xs).unwrap().value;
                assert!(ll <= base + 1e-6, "perturbation improved: {ll} > {base}");
                checked += 1;
            }
        }
        assert_eq!(checked, 6);
    }

    #[test]
    fn shifted_families_dominate_their_generators() {
        let cases = [
            Params::LogNormal {
                shape: 1.30,
                loc: -0.83,
                scale: 0.41,
            },
            Params::WeibullMin {
                shape: 0.81,
                loc: -0.81,
                scale: 0.71,
            },
            Params::InverseGaussian {
                shape: 2.13,
                loc: -0.851,
                scale: 0.40,
            },
        ];
        for truth in cases {
            let xs = draws(truth, 13, 4_000);
            let fit = fit_family(truth.family(), &xs).unwrap();
            let ll_true = loglik(&Distribution::new(truth).unwrap(), &xs);
            assert!(
                fit.log_lik >= ll_true - 3.0,
                "{}: fitted {} vs generator {ll_true}",
                truth.family(),
                fit.log_lik
            );
        }
    }

    #[test]
    fn fits_are_deterministic() {
        let xs = draws(Params::NegBinomial { size: 1.59, mu: 8.33 }, 5, 2_000);
        let a = fit_family(Family::NegBinomial, &xs).unwrap();
        let b = fit_family(Family::NegBinomial, &xs).unwrap();
        assert_eq!(a, b);
    }

    // ---- KS statistic --------------------------------------------------

    #[test]
    fn ks_of_a_single_median_point_is_half() {
        let dist = Distribution::new(Params::Normal { mean: 0.0, sd: 1.0 }).unwrap();
        let ks = ks_statistic(&dist, &sample_of(&[0.0])).unwrap();
        assert!((ks - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ks_rejects_discrete_families() {
        let dist = Distribution::new(Params::Poisson { lambda: 2.0 }).unwrap();
        let err = ks_statistic(&dist, &sample_of(&[1.0, 2.0])).unwrap_err();
        assert!(matches!(err, FitError::DiscreteKs { family: "poisson" }));
    }

    #[test]
    fn ks_of_an_exact_quantile_sample_is_half_over_n() {
        let dist = Distribution::new(Params::LogNormal {
            shape: 1.30,
            loc: -0.83,
            scale: 0.41,
        })
        .unwrap();
        let n = 100;
        let values: Vec<f64> = (0..n)
            .map(|i| dist.quantile((i as f64 + 0.5) / n as f64).unwrap())
            .collect();
        let ks = ks_statistic(&dist, &sample_of(&values)).unwrap();
        assert!((ks - 0.5 / n as f64).abs() < 1e-9, "ks {ks}");
    }

    /// Oracle: evaluate the empirical CDF by counting, at every distinct
    /// observation, from both sides of the jump. Quadratic, but immune
    /// to index bookkeeping mistakes and correct under ties.
    fn ks_by_counting(dist: &Distribution, values: &[f64]) -> f64 {
        let n = values.len() as f64;
        let mut stat = 0.0f64;
        for &t in values {
            let at_or_below = values.iter().filter(|&&x| x <= t).count() as f64 / n;
            let below = values.iter().filter(|&&x| x < t).count() as f64 / n;
            let f = dist.cdf(t).unwrap();
            stat = stat.max((at_or_below - f).abs()).max((below - f).abs());
        }
        stat
    }

    #[test]
    fn ks_matches_counting_oracle_with_ties() {
        let dist = Distribution::new(Params::Exponential {
            loc: -0.83,
            scale: 0.83,
        })
        .unwrap();
        let mut rng = SeededUniform::from_seed(99);
        // Round to two decimals so the sample contains ties.
        let values: Vec<f64> = dist
            .sample(&mut rng, 150)
            .unwrap()
            .into_iter()
            .map(|x| (x * 100.0).round() / 100.0)
            .collect();
        let xs = sample_of(&values);
        let fit = fit_family(Family::Exponential, &xs).unwrap();
        let fast = ks_statistic(&fit.distribution, &xs).unwrap();
        let slow = ks_by_counting(&fit.distribution, &values);
        assert_eq!(fast, slow);
    }

    // ---- ranking -------------------------------------------------------

    #[test]
    fn overdispersed_counts_rank_negative_binomial_first() {
        let xs = draws(Params::NegBinomial { size: 1.59, mu: 8.33 }, 17, 5_000);
        let ranking = rank_fits(
            &xs,
            &[Family::Poisson, Family::Normal, Family::NegBinomial],
            Criterion::Aic,
        )
        .unwrap();
        assert_eq!(ranking.entries.len(), 3);
        let best = ranking.best().unwrap();
        assert_eq!(best.distribution.family(), Family::NegBinomial);
        // AIC identity holds exactly for every completed fit.
        for entry in &ranking.entries {
            if let Some(fit) = entry.fit() {
                let k = fit.distribution.family().free_params() as f64;
                assert_eq!(fit.aic, 2.0 * k - 2.0 * fit.log_lik);
                assert_eq!(fit.bic, k * (fit.n as f64).ln() - 2.0 * fit.log_lik);
            }
        }
        // Rankings are a permutation of the request.
        let mut families: Vec<Family> =
            ranking.entries.iter().map(RankEntry::family).collect();
        families.sort();
        assert_eq!(
            families,
            vec![Family::Normal, Family::Poisson, Family::NegBinomial]
        );
    }

    fn synthetic_fit(family: Family, aic: f64, bic: f64, log_lik: f64, converged: bool) -> FitResult {
        let params = match family {
            Family::Poisson => Params::Poisson { lambda: 2.0 },
            Family::Normal => Params::Normal { mean: 0.0, sd: 1.0 },
            Family::Exponential => Params::Exponential { loc: 0.0, scale: 1.0 },
            _ => Params::LogNormal {
                shape: 1.0,
                loc: 0.0,
                scale: 1.0,
            },
        };
        FitResult {
            distribution: Distribution::new(params).unwrap(),
            log_lik,
            aic,
            bic,
            ks_stat: None,
            n: 10,
            converged,
        }
    }

    #[test]
    fn ties_fall_through_bic_then_loglik_then_family_order() {
        let a = synthetic_fit(Family::Poisson, 10.0, 12.0, -3.0, true);
        let b = synthetic_fit(Family::Normal, 10.0, 11.0, -3.0, true);
        assert_eq!(rank_order(&b, &a, Criterion::Aic), Ordering::Less);

        let c = synthetic_fit(Family::Poisson, 10.0, 11.0, -2.0, true);
        let d = synthetic_fit(Family::Normal, 10.0, 11.0, -3.0, true);
        assert_eq!(rank_order(&c, &d, Criterion::Aic), Ordering::Less);

        // Everything equal: the canonical tag order decides, and the
        // log-normal family is declared first.
        let e = synthetic_fit(Family::LogNormal, 10.0, 11.0, -3.0, true);
        let f = synthetic_fit(Family::Normal, 10.0, 11.0, -3.0, true);
        assert_eq!(rank_order(&e, &f, Criterion::Aic), Ordering::Less);

        // A non-converged fit sinks below a converged one with worse AIC.
        let g = synthetic_fit(Family::Normal, 5.0, 6.0, -1.0, false);
        let h = synthetic_fit(Family::Poisson, 10.0, 11.0, -3.0, true);
        assert_eq!(rank_order(&h, &g, Criterion::Aic), Ordering::Less);
    }

    #[test]
    fn infeasible_families_trail_the_ranking_with_reasons() {
        let xs = sample_of(&[0.5, 1.5, 2.5, 3.5, 4.5]);
        let ranking = rank_fits(
            &xs,
            &[
                Family::Poisson,
                Family::Normal,
                Family::Exponential,
                Family::NegBinomial,
            ],
            Criterion::Aic,
        )
        .unwrap();
        assert_eq!(ranking.entries.len(), 4);
        assert!(ranking.entries[0].fit().is_some());
        assert!(ranking.entries[1].fit().is_some());
        for entry in &ranking.entries[2..] {
            assert!(matches!(entry, RankEntry::Infeasible { .. }), "{entry:?}");
        }
    }

    #[test]
    fn ranking_requires_two_families_and_one_feasible_fit() {
        let xs = sample_of(&[1.0, 2.0, 3.0]);
        let err = rank_fits(&xs, &[Family::Normal], Criterion::Aic).unwrap_err();
        assert!(matches!(err, FitError::TooFewFamilies(1)));

        let fractional = sample_of(&[0.5, 1.5, 2.5]);
        let err = rank_fits(
            &fractional,
            &[Family::Poisson, Family::NegBinomial],
            Criterion::Aic,
        )
        .unwrap_err();
        assert!(matches!(err, FitError::NoFeasibleFit));
    }

    #[test]
    fn ranking_serializes_and_round_trips() {
        let xs = draws(Params::NegBinomial { size: 2.0, mu: 5.0 }, 3, 500);
        let ranking = rank_fits(
            &xs,
            &[Family::Poisson, Family::NegBinomial],
            Criterion::Bic,
        )
        .unwrap();
        let json = serde_json::to_string(&ranking).unwrap();
        let back: Ranking = serde_json::from_str(&json).unwrap();
        assert_eq!(ranking, back);
    }

    // ---- diagnostic series ---------------------------------------------

    #[test]
    fn pp_series_of_a_quantile_sample_is_diagonal() {
        let dist = Distribution::new(Params::Normal {
            mean: 24.66,
            sd: 2.81,
        })
        .unwrap();
        let n = 50;
        let values: Vec<f64> = (0..n)
            .map(|i| dist.quantile((i as f64 + 0.5) / n as f64).unwrap())
            .collect();
        let series = pp_series(&dist, &sample_of(&values)).unwrap();
        assert_eq!(series.rows(), n);
        let emp = series.column("empirical_probability").unwrap();
        let theo = series.column("theoretical_probability").unwrap();
        for (e, t) in emp.iter().zip(theo) {
            assert!((e - t).abs() < 1e-9, "{e} vs {t}");
        }
    }

    #[test]
    fn pp_series_of_one_point() {
        let dist = Distribution::new(Params::Normal { mean: 0.0, sd: 1.0 }).unwrap();
        let x = dist.quantile(0.3).unwrap();
        let series = pp_series(&dist, &sample_of(&[x])).unwrap();
        assert_eq!(series.rows(), 1);
        assert!((series.column("empirical_probability").unwrap()[0] - 0.5).abs() < 1e-15);
        assert!((series.column("theoretical_probability").unwrap()[0] - 0.3).abs() < 1e-9);
    }

    #[test]
    fn cdf_comparison_gap_equals_the_ks_statistic() {
        let dist = Distribution::new(Params::WeibullMin {
            shape: 0.81,
            loc: -0.81,
            scale: 0.71,
        })
        .unwrap();
        let n = 40;
        let values: Vec<f64> = (0..n)
            .map(|i| dist.quantile((i as f64 + 0.5) / n as f64).unwrap())
            .collect();
        let xs = sample_of(&values);
        let series = cdf_compare_series(&dist, &xs).unwrap();
        let emp = series.column("empirical_cdf").unwrap();
        let fit = series.column("fitted_cdf").unwrap();
        let max_gap = emp
            .iter()
            .zip(fit)
            .map(|(e, f)| (e - f).abs())
            .fold(0.0, f64::max);
        assert!(max_gap <= 0.5 / n as f64 + 1e-12, "gap {max_gap}");
        let ks = ks_statistic(&dist, &xs).unwrap();
        assert!((max_gap - ks).abs() < 1e-12);
    }

    #[test]
    fn density_comparison_has_unit_area_and_tracks_the_density() {
        let params = Params::LogNormal {
            shape: 1.30,
            loc: -0.83,
            scale: 0.41,
        };
        let xs = draws(params, 23, 10_000);
        let dist = Distribution::new(params).unwrap();
        let series =
            density_compare_series(&dist, &xs, &Binning::EqualWidth { bins: 40 }).unwrap();
        let centers = series.column("bin_center").unwrap();
        let hist = series.column("histogram_density").unwrap();
        let fitted = series.column("fitted_density").unwrap();
        let width = centers[1] - centers[0];
        let area: f64 = hist.iter().map(|h| h * width).sum();
        assert!((area - 1.0).abs() < 1e-12, "area {area}");
        let l1: f64 = hist
            .iter()
            .zip(fitted)
            .map(|(h, f)| (h - f).abs() * width)
            .sum();
        assert!(l1 < 0.2, "integrated |histogram − density| = {l1}");
    }

    #[test]
    fn density_comparison_single_bin() {
        let dist = Distribution::new(Params::Normal { mean: 0.5, sd: 1.0 }).unwrap();
        let xs = sample_of(&[0.0, 1.0]);
        let series = density_compare_series(
            &dist,
            &xs,
            &Binning::Edges(vec![-0.5, 1.5]),
        )
        .unwrap();
        assert_eq!(series.rows(), 1);
        assert!((series.column("histogram_density").unwrap()[0] - 0.5).abs() < 1e-15);
        assert!(
            (series.column("fitted_density").unwrap()[0] - dist.density(0.5)).abs() < 1e-15
        );
    }

    #[test]
    fn density_comparison_rejects_fully_excluded_samples() {
        let dist = Distribution::new(Params::Normal { mean: 0.0, sd: 1.0 }).unwrap();
        let xs = sample_of(&[10.0, 11.0]);
        let err = density_compare_series(&dist, &xs, &Binning::Edges(vec![0.0, 1.0]))
            .unwrap_err();
        assert!(matches!(err, FitError::DegenerateSample(_)));
    }
}
