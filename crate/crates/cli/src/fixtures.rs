//! Ready-to-run configurations for the worked examples and the derived
//! divergence, boundedness and essential-norm fixtures.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use orlicz_core::YoungFunction;
use serde_json::{json, Value};

use crate::config::{parse_config, ExperimentConfig};

pub const FIXTURES: [&str; 5] = ["example-2-10", "example-2-11", "lpq-divergent", "lpq-bounded", "essnorm-limsup"];

fn young_json(f: &YoungFunction) -> Value {
    serde_json::to_value(f).expect("young function serializes")
}

fn unit_pair_grid() -> Value {
    json!({"lo": 0.0, "hi": 1.0, "n": 41, "scale": "linear"})
}

/// The fixture as JSON text.
pub fn fixture_json(name: &str) -> Result<String> {
    let v = match name {
        "example-2-10" => json!({
            "schema_version": "1",
            "command": "verify-all",
            "seed": 7,
            "young": {"phi": "exp_power:2", "psi": "power_scaled:2", "theta": "entropy:2"},
            "space": {"symmetric": {"n_cells": 100}},
            "weight": {"expr": "1 + w"},
            "params": {"gch": 4.0, "pair_grid": unit_pair_grid()},
        }),
        "example-2-11" => {
            let theta = YoungFunction::compose(YoungFunction::exp_quartic().conjugate(), YoungFunction::power(2.0));
            json!({
                "schema_version": "1",
                "command": "verify-all",
                "seed": 7,
                "young": {"phi": "exp_quartic", "psi": "log_quotient", "theta": young_json(&theta)},
                "space": {"rotation": {"n": 4, "cells_per_interval": 25}},
                "weight": {"expr": "1 + w"},
                "params": {"pair_grid": unit_pair_grid()},
            })
        }
        "lpq-divergent" | "lpq-bounded" => {
            let value = if name == "lpq-divergent" { "1" } else { "2^(-n)" };
            json!({
                "schema_version": "1",
                "command": "criteria",
                "seed": 7,
                "weight": {"symbolic": {"mass_fn": "2^(-n)", "value_fn": value, "n_max": 256}},
                "params": {"which": "power-atom-bound", "p": 2.0, "q": 3.0},
            })
        }
        "essnorm-limsup" => json!({
            "schema_version": "1",
            "command": "essnorm",
            "seed": 7,
            "young": {"phi": "power_scaled:2"},
            "weight": {"symbolic": {"mass_fn": "2^(-n)", "value_fn": "1 + 1/n", "n_max": 256}},
            "params": {"gch": 1.0, "ks": [1, 2, 4, 8, 16, 32, 64], "epsilons": [0.5, 1.0, 1.5]},
        }),
        other => bail!("unknown fixture {other:?}; known: {}", FIXTURES.join(", ")),
    };
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

pub fn fixture(name: &str) -> Result<ExperimentConfig> {
    parse_config(&fixture_json(name)?).with_context(|| format!("fixture {name}"))
}

/// Writes `<dir>/<name>.json`.
pub fn emit_fixture(name: &str, dir: &Path) -> Result<PathBuf> {
    let text = fixture_json(name)?;
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}
