//! The `sample` verb: deterministic inverse-transform draws from one
//! distribution, written as a single-column CSV or a JSON document.

use crate::output::{atomic_write, CliError, OutputFormat};
use crate::SampleArgs;
use repodist::dist::{Distribution, Family, Params, SeededUniform};
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::Path;

/// Assembles the family's parameter record from the individual flags,
/// rejecting both missing and extraneous parameters.
pub fn build_params(args: &SampleArgs) -> Result<Params, CliError> {
    let family = args.family;
    let need = |value: Option<f64>, flag: &str| {
        value.ok_or_else(|| CliError::usage(format!("{family} requires --{flag}")))
    };
    let forbid = |value: Option<f64>, flag: &str| {
        if value.is_some() {
            Err(CliError::usage(format!("{family} does not take --{flag}")))
        } else {
            Ok(())
        }
    };

    let shape_loc_scale = |shape, loc, scale| -> Result<(), CliError> {
        if shape {
            need(args.shape, "shape").map(|_| ())?;
        } else {
            forbid(args.shape, "shape")?;
        }
        if loc {
            need(args.loc, "loc").map(|_| ())?;
        } else {
            forbid(args.loc, "loc")?;
        }
        if scale {
            need(args.scale, "scale").map(|_| ())?;
        } else {
            forbid(args.scale, "scale")?;
        }
        Ok(())
    };
    let forbid_normal = || forbid(args.mean, "mean").and_then(|_| forbid(args.sd, "sd"));
    let forbid_poisson = || forbid(args.lambda, "lambda");
    let forbid_nb = || forbid(args.size, "size").and_then(|_| forbid(args.mu, "mu"));

    let params = match family {
        Family::LogNormal | Family::WeibullMin | Family::Gamma | Family::InverseGaussian => {
            shape_loc_scale(true, true, true)?;
            forbid_normal()?;
            forbid_poisson()?;
            forbid_nb()?;
            let (shape, loc, scale) = (
                args.shape.expect("checked"),
                args.loc.expect("checked"),
                args.scale.expect("checked"),
            );
            match family {
                Family::LogNormal => Params::LogNormal { shape, loc, scale },
                Family::WeibullMin => Params::WeibullMin { shape, loc, scale },
                Family::Gamma => Params::Gamma { shape, loc, scale },
                Family::InverseGaussian => Params::InverseGaussian { shape, loc, scale },
                _ => unreachable!(),
            }
        }
        Family::Exponential => {
            shape_loc_scale(false, true, true)?;
            forbid_normal()?;
            forbid_poisson()?;
            forbid_nb()?;
            Params::Exponential {
                loc: args.loc.expect("checked"),
                scale: args.scale.expect("checked"),
            }
        }
        Family::Normal => {
            shape_loc_scale(false, false, false)?;
            forbid_poisson()?;
            forbid_nb()?;
            Params::Normal {
                mean: need(args.mean, "mean")?,
                sd: need(args.sd, "sd")?,
            }
        }
        Family::Poisson => {
            shape_loc_scale(false, false, false)?;
            forbid_normal()?;
            forbid_nb()?;
            Params::Poisson {
                lambda: need(args.lambda, "lambda")?,
            }
        }
        Family::NegBinomial => {
            shape_loc_scale(false, false, false)?;
            forbid_normal()?;
            forbid_poisson()?;
            Params::NegBinomial {
                size: need(args.size, "size")?,
                mu: need(args.mu, "mu")?,
            }
        }
    };
    Ok(params)
}

pub fn run(
    args: &SampleArgs,
    seed: Option<u64>,
    out: Option<&Path>,
    format: OutputFormat,
) -> Result<Value, CliError> {
    let seed = seed.ok_or_else(|| CliError::usage("--seed is required for sample"))?;
    let out = out.ok_or_else(|| CliError::usage("--out is required for sample"))?;
    if args.n == 0 {
        return Err(CliError::usage("--n must be at least 1"));
    }

    let params = build_params(args)?;
    let dist = Distribution::new(params)?;
    let mut rng = SeededUniform::from_seed(seed);
    let values = dist.sample(&mut rng, args.n)?;

    let bytes = match format {
        OutputFormat::Csv => {
            let mut text = String::from("value\n");
            for v in &values {
                let _ = writeln!(text, "{v}");
            }
            text.into_bytes()
        }
        OutputFormat::Json => {
            let mut v = serde_json::to_vec_pretty(&json!({
                "family": dist.family().name(),
                "params": dist.params(),
                "seed": seed,
                "n": args.n,
                "values": values,
            }))
            .expect("draws serialize");
            v.push(b'\n');
            v
        }
    };
    atomic_write(out, &bytes)?;

    Ok(json!({
        "command": "sample",
        "family": dist.family().name(),
        "n": args.n,
        "seed": seed,
        "out": out.display().to_string(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(family: Family) -> SampleArgs {
        SampleArgs {
            family,
            n: 10,
            shape: None,
            loc: None,
            scale: None,
            mean: None,
            sd: None,
            lambda: None,
            size: None,
            mu: None,
        }
    }

    #[test]
    fn builds_each_family_from_its_own_flags() {
        let mut a = args(Family::LogNormal);
        a.shape = Some(1.3);
        a.loc = Some(-0.81);
        a.scale = Some(0.4);
        assert_eq!(
            build_params(&a).unwrap(),
            Params::LogNormal {
                shape: 1.3,
                loc: -0.81,
                scale: 0.4
            }
        );

        let mut a = args(Family::Poisson);
        a.lambda = Some(3.5);
        assert_eq!(build_params(&a).unwrap(), Params::Poisson { lambda: 3.5 });
    }

    #[test]
    fn missing_parameters_are_usage_errors() {
        let mut a = args(Family::Normal);
        a.mean = Some(24.66);
        let err = build_params(&a).unwrap_err();
        assert_eq!(err.kind, "usage");
        assert!(err.message.contains("--sd"));
    }

    #[test]
    fn foreign_parameters_are_rejected() {
        let mut a = args(Family::Normal);
        a.mean = Some(0.0);
        a.sd = Some(1.0);
        a.shape = Some(2.0);
        let err = build_params(&a).unwrap_err();
        assert_eq!(err.kind, "usage");
        assert!(err.message.contains("--shape"));
    }
}
