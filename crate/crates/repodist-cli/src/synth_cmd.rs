//! The `synth` verb: read a generation config, override its seed from
//! the mandatory flag, generate the graph, and export it with its
//! manifest.

use crate::output::CliError;
use crate::SynthArgs;
use repodist::synth::{self, SynthConfig};
use serde_json::{json, Value};
use std::path::Path;

pub fn run(
    args: &SynthArgs,
    seed: Option<u64>,
    out: Option<&Path>,
) -> Result<Value, CliError> {
    let seed = seed.ok_or_else(|| CliError::usage("--seed is required for synth"))?;
    let out = out
        .ok_or_else(|| CliError::usage("--out directory is required for synth"))?;

    let text = std::fs::read_to_string(&args.config).map_err(|e| {
        CliError::config(format!("cannot read {}: {e}", args.config.display()))
    })?;
    let mut cfg: SynthConfig = serde_json::from_str(&text).map_err(|e| {
        CliError::config(format!("cannot parse {}: {e}", args.config.display()))
    })?;
    cfg.seed = seed;
    cfg.validate()?;

    let graph = synth::generate(&cfg)?;
    let manifest = synth::export_graph(&graph, &cfg, out)?;

    Ok(json!({
        "command": "synth",
        "seed": seed,
        "n_coders": manifest.n_coders,
        "n_commits": manifest.n_commits,
        "n_repos": manifest.n_repos,
        "band_repo_counts": manifest.band_repo_counts,
        "out": out.display().to_string(),
    }))
}
