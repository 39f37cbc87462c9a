//! Per-family maximum-likelihood estimators. Normal, Poisson, and
//! Exponential have closed forms; the negative binomial profiles its
//! dispersion numerically; the four shifted continuous families run a
//! full simplex search over (shape, loc, scale).

use super::simplex::{minimize, SimplexOptions, SimplexResult};
use super::FitError;
use crate::dist::{Distribution, Family, Params};
use crate::specfun;
use std::collections::BTreeMap;

pub(crate) struct Estimate {
    pub distribution: Distribution,
    pub converged: bool,
}

/// Deterministic start offsets for the simplex restarts: the first run
/// uses the moment-matched start, the rest explore around it.
const RESTART_OFFSETS: [f64; 4] = [0.0, 0.5, -0.5, 1.0];

pub(crate) fn estimate(family: Family, values: &[f64]) -> Result<Estimate, FitError> {
    match family {
        Family::Normal => fit_normal(values),
        Family::Poisson => fit_poisson(values),
        Family::Exponential => fit_exponential(values),
        Family::NegBinomial => fit_neg_binomial(values),
        Family::LogNormal
        | Family::WeibullMin
        | Family::Gamma
        | Family::InverseGaussian => fit_shifted(family, values),
    }
}

struct Stats {
    mean: f64,
    var: f64,
    min: f64,
    max: f64,
}

fn stats(values: &[f64]) -> Stats {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Stats {
        mean,
        var,
        min,
        max,
    }
}

fn infeasible(family: Family, reason: impl Into<String>) -> FitError {
    FitError::InfeasibleFit {
        family: family.name(),
        reason: reason.into(),
    }
}

/// Margin that keeps a fitted location parameter strictly below the
/// smallest observation, so no data point sits on a support boundary
/// where shape < 1 densities diverge.
fn support_margin(s: &Stats) -> f64 {
    let range = s.max - s.min;
    if range > 0.0 {
        1e-9 * range
    } else {
        1e-12 + 1e-9 * s.min.abs()
    }
}

fn require_counts(family: Family, values: &[f64]) -> Result<(), FitError> {
    for &v in values {
        if !(v >= 0.0 && v.fract() == 0.0) {
            return Err(infeasible(
                family,
                format!("needs non-negative integer observations, found {v}"),
            ));
        }
    }
    Ok(())
}

/// (value, multiplicity) pairs in deterministic order; likelihood work
/// then scales with distinct values, which for count data is tiny.
fn aggregate(values: &[f64]) -> Vec<(f64, f64)> {
    let mut counts: BTreeMap<u64, (f64, usize)> = BTreeMap::new();
    for &v in values {
        counts
            .entry(v.to_bits())
            .and_modify(|e| e.1 += 1)
            .or_insert((v, 1));
    }
    counts
        .into_values()
        .map(|(v, c)| (v, c as f64))
        .collect()
}

fn neg_log_lik(dist: &Distribution, grouped: &[(f64, f64)]) -> f64 {
    let mut sum = 0.0;
    for &(v, count) in grouped {
        let lp = dist.log_density(v);
        if lp == f64::NEG_INFINITY {
            return f64::INFINITY;
        }
        sum += count * lp;
    }
    -sum
}

/// Runs the simplex from the moment start plus deterministic jittered
/// restarts and keeps the best endpoint.
fn multi_start<F>(mut objective: F, start: &[f64], step: &[f64]) -> SimplexResult
where
    F: FnMut(&[f64]) -> f64,
{
    let opts = SimplexOptions::default();
    let mut best: Option<SimplexResult> = None;
    for offset in RESTART_OFFSETS {
        let jittered: Vec<f64> = start
            .iter()
            .enumerate()
            .map(|(d, &v)| v + offset * if d % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let run = minimize(&mut objective, &jittered, step, &opts);
        log::trace!(
            "restart offset {offset}: objective {} after {} iterations (converged: {})",
            run.value,
            run.iterations,
            run.converged
        );
        let better = match &best {
            None => true,
            Some(b) => run.value < b.value,
        };
        if better {
            best = Some(run);
        }
    }
    best.expect("at least one simplex run")
}

fn fit_normal(values: &[f64]) -> Result<Estimate, FitError> {
    let s = stats(values);
    if s.var == 0.0 {
        return Err(infeasible(
            Family::Normal,
            "sample variance is zero; the scale is unidentifiable",
        ));
    }
    let distribution = Distribution::new(Params::Normal {
        mean: s.mean,
        sd: s.var.sqrt(),
    })?;
    Ok(Estimate {
        distribution,
        converged: true,
    })
}

fn fit_poisson(values: &[f64]) -> Result<Estimate, FitError> {
    require_counts(Family::Poisson, values)?;
    let s = stats(values);
    if s.mean <= 0.0 {
        return Err(infeasible(
            Family::Poisson,
            "every observation is zero; the rate is unidentifiable",
        ));
    }
    let distribution = Distribution::new(Params::Poisson { lambda: s.mean })?;
    Ok(Estimate {
        distribution,
        converged: true,
    })
}

fn fit_exponential(values: &[f64]) -> Result<Estimate, FitError> {
    let s = stats(values);
    if s.max == s.min {
        return Err(infeasible(
            Family::Exponential,
            "sample has zero range; the scale is unidentifiable",
        ));
    }
    let loc = s.min - support_margin(&s);
    let distribution = Distribution::new(Params::Exponential {
        loc,
        scale: s.mean - loc,
    })?;
    Ok(Estimate {
        distribution,
        converged: true,
    })
}

fn fit_neg_binomial(values: &[f64]) -> Result<Estimate, FitError> {
    require_counts(Family::NegBinomial, values)?;
    let s = stats(values);
    if s.mean <= 0.0 {
        return Err(infeasible(
            Family::NegBinomial,
            "every observation is zero; the mean is unidentifiable",
        ));
    }
    // The sample mean is the exact MLE for `mu` at any fixed size, so
    // only the dispersion is searched, on a log scale.
    let mu = s.mean;
    let grouped = aggregate(values);
    let size0 = if s.var > s.mean {
        (s.mean * s.mean / (s.var - s.mean)).clamp(1e-3, 1e12)
    } else {
        // No overdispersion: start deep in the near-Poisson regime.
        1e6
    };
    let objective = |t: &[f64]| -> f64 {
        let size = t[0].exp();
        if !size.is_finite() {
            return f64::INFINITY;
        }
        match Distribution::new(Params::NegBinomial { size, mu }) {
            Ok(d) => neg_log_lik(&d, &grouped),
            Err(_) => f64::INFINITY,
        }
    };
    let run = multi_start(objective, &[size0.ln()], &[0.4]);
    let distribution = Distribution::new(Params::NegBinomial {
        size: run.point[0].exp(),
        mu,
    })?;
    Ok(Estimate {
        distribution,
        converged: run.converged,
    })
}

/// Moment-matched starting point for one shifted family, given the
/// excess sample (observations minus a provisional location).
fn shifted_start(family: Family, excess: &[f64]) -> (f64, f64) {
    let s = stats(excess);
    let sd = s.var.sqrt();
    match family {
        Family::LogNormal => {
            let logs: Vec<f64> = excess.iter().map(|z| z.ln()).collect();
            let ls = stats(&logs);
            (ls.var.sqrt().max(0.05), ls.mean.exp())
        }
        Family::WeibullMin => {
            let cv = (sd / s.mean).max(1e-6);
            let shape = cv.powf(-1.086).clamp(0.1, 50.0);
            let gamma_mean = specfun::log_gamma(1.0 + 1.0 / shape)
                .map(f64::exp)
                .unwrap_or(1.0);
            (shape, s.mean / gamma_mean)
        }
        Family::Gamma => {
            let shape = (s.mean / sd.max(1e-12)).powi(2).clamp(0.01, 1e4);
            (shape, (s.var / s.mean).max(1e-12))
        }
        Family::InverseGaussian => {
            let shape = (s.var / (s.mean * s.mean)).clamp(1e-3, 1e3);
            (shape, s.mean / shape)
        }
        _ => unreachable!("only shifted families take a moment start"),
    }
}

/// Joint (shape, loc, scale) likelihood search. The location is
/// reparameterized as `loc = loc_max − exp(w)` so the search space is
/// unconstrained while the location stays strictly below the smallest
/// observation, which caps the likelihood spikes that shape < 1
/// densities develop at the support edge.
fn fit_shifted(family: Family, values: &[f64]) -> Result<Estimate, FitError> {
    let s = stats(values);
    if s.max == s.min {
        return Err(infeasible(
            family,
            "sample has zero range; shape and scale are unidentifiable",
        ));
    }
    let loc_max = s.min - support_margin(&s);
    let grouped = aggregate(values);

    let loc0 = s.min - 0.1 * (s.max - s.min);
    let excess: Vec<f64> = values.iter().map(|x| x - loc0).collect();
    let (shape0, scale0) = shifted_start(family, &excess);
    let start = [
        shape0.ln(),
        (loc_max - loc0).max(1e-12).ln(),
        scale0.max(1e-12).ln(),
    ];

    let objective = |t: &[f64]| -> f64 {
        let shape = t[0].exp();
        let loc = loc_max - t[1].exp();
        let scale = t[2].exp();
        if !shape.is_finite() || !loc.is_finite() || !scale.is_finite() {
            return f64::INFINITY;
        }
        let params = match family {
            Family::LogNormal => Params::LogNormal {
                shape,
                loc,
                scale,
            },
            Family::WeibullMin => Params::WeibullMin {
                shape,
                loc,
                scale,
            },
            Family::Gamma => Params::Gamma {
                shape,
                loc,
                scale,
            },
            Family::InverseGaussian => Params::InverseGaussian {
                shape,
                loc,
                scale,
            },
            _ => unreachable!(),
        };
        match Distribution::new(params) {
            Ok(d) => neg_log_lik(&d, &grouped),
            Err(_) => f64::INFINITY,
        }
    };

    let run = multi_start(objective, &start, &[0.3, 0.3, 0.3]);
    let shape = run.point[0].exp();
    let loc = loc_max - run.point[1].exp();
    let scale = run.point[2].exp();
    let params = match family {
        Family::LogNormal => Params::LogNormal { shape, loc, scale },
        Family::WeibullMin => Params::WeibullMin { shape, loc, scale },
        Family::Gamma => Params::Gamma { shape, loc, scale },
        Family::InverseGaussian => Params::InverseGaussian { shape, loc, scale },
        _ => unreachable!(),
    };
    let distribution = Distribution::new(params).map_err(|e| {
        infeasible(family, format!("optimizer left the valid region: {e}"))
    })?;
    Ok(Estimate {
        distribution,
        converged: run.converged,
    })
}
