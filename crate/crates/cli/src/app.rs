//! Command-line front end of `orlicz-lab`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use orlicz_core::space::SpaceSpec;
use serde_json::Value;

use crate::commands::execute;
use crate::config::{load_config, young_from_arg, Command, ExperimentConfig, SpaceConfig, WeightSpec, YoungSpec};
use crate::fixtures::{emit_fixture, fixture, FIXTURES};
use crate::report::{compare_reports, write_outputs, Report};

pub const DEFAULT_SEED: u64 = orlicz_core::wct::DEFAULT_SEED;

#[derive(Debug, Parser)]
#[command(name = "orlicz-lab", version, about = "Numerical experiments on Orlicz spaces and weighted conditional type operators")]
pub struct Cli {
    /// Seed for every randomized estimate; overrides the config's seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Exit with status 2 on a violated or divergent verdict or a failed check.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Write `<command>.json` and CSV sidecars here instead of printing.
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    /// Compare two reports, ignoring metadata; exit 2 when they differ.
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    pub compare: Option<Vec<PathBuf>>,
    #[command(subcommand)]
    pub command: Option<Cmd>,
}

/// Space and weight flags shared by the operator commands.
#[derive(Debug, Args, Clone, Default)]
pub struct Data {
    /// Space as JSON (builder object or explicit cells and blocks), inline or a file.
    #[arg(long, alias = "alg")]
    pub space: Option<String>,
    /// Weight as JSON (values, expression or symbolic sequence), inline or a file.
    #[arg(long = "fn", alias = "u")]
    pub weight: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Run an experiment config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Evaluate, invert or test a Young's function.
    Young {
        #[arg(long)]
        phi: String,
        /// eval, inverse, conjugate, conjugate_inverse, growth, composition or suite.
        #[arg(long, default_value = "eval")]
        op: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        at: Vec<f64>,
        /// delta2, delta-prime, nabla-prime or precedes.
        #[arg(long)]
        condition: Option<String>,
        #[arg(long)]
        psi: Option<String>,
    },
    /// Luxemburg norm and modular of a function.
    Norm {
        #[arg(long)]
        phi: String,
        #[command(flatten)]
        data: Data,
    },
    /// Conditional expectation onto the partition blocks.
    Condexp {
        #[command(flatten)]
        data: Data,
    },
    /// Lower estimate of an operator norm.
    Opnorm {
        #[arg(long)]
        phi: String,
        #[arg(long)]
        psi: Option<String>,
        #[command(flatten)]
        data: Data,
        /// wct or mult.
        #[arg(long, default_value = "wct")]
        kind: String,
        /// atoms, random, ascent or all.
        #[arg(long, default_value = "all")]
        strategy: String,
        #[arg(long, default_value_t = 32)]
        budget: usize,
    },
    /// Boundedness criteria with verdicts and per-atom traces.
    Criteria {
        /// `all`, or comma-separated criterion ids.
        #[arg(long, default_value = "all", value_delimiter = ',')]
        which: Vec<String>,
        #[arg(long)]
        phi: Option<String>,
        #[arg(long)]
        psi: Option<String>,
        #[arg(long)]
        theta: Option<String>,
        #[command(flatten)]
        data: Data,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        q: Option<f64>,
        /// Stated GCH constant; certified from the partition when absent.
        #[arg(long, alias = "C")]
        gch: Option<f64>,
        #[arg(long)]
        infinite_measure: bool,
    },
    /// Essential-norm sandwich, level sets and truncation curve.
    Essnorm {
        #[arg(long)]
        phi: String,
        #[command(flatten)]
        data: Data,
        #[arg(long = "C", alias = "gch")]
        gch: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        ks: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        epsilons: Vec<f64>,
        #[arg(long)]
        level: Option<f64>,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Estimate the generalized conditional-type Hölder constant.
    Gch {
        #[arg(long)]
        phi: String,
        #[arg(long)]
        partner: Option<String>,
        #[command(flatten)]
        data: Data,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long)]
        constant: Option<f64>,
    },
    /// Run every invariant suite and criterion cross-check.
    VerifyAll {
        #[arg(long, conflicts_with = "fixture")]
        config: Option<PathBuf>,
        #[arg(long)]
        fixture: Option<String>,
    },
    /// Write a ready-to-run fixture config.
    EmitFixture {
        /// example-2-10, example-2-11, lpq-divergent, lpq-bounded or essnorm-limsup.
        name: String,
        /// Target directory; defaults to --output-dir, else the current directory.
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

/// Inline JSON, or the contents of a file.
fn json_arg(arg: &str, what: &str) -> Result<Value> {
    let t = arg.trim_start();
    let text = if t.starts_with('{') || t.starts_with('[') || t.starts_with('"') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).with_context(|| format!("reading {what} file {arg}"))?
    };
    serde_json::from_str(&text).with_context(|| format!("parsing {what} JSON"))
}

fn space_arg(arg: &str) -> Result<SpaceConfig> {
    let v = json_arg(arg, "space")?;
    match serde_json::from_value::<SpaceConfig>(v.clone()) {
        Ok(s) => Ok(s),
        Err(first) => serde_json::from_value::<SpaceSpec>(v)
            .map(SpaceConfig::Explicit)
            .map_err(|_| anyhow!("invalid space: {first}")),
    }
}

/// A bare number array is cellwise values; an object with `mass_fn` is a
/// symbolic sequence; anything else must be a tagged weight.
fn weight_arg(arg: &str) -> Result<WeightSpec> {
    let v = json_arg(arg, "weight")?;
    let v = match v {
        Value::Array(_) => serde_json::json!({"values": v}),
        Value::Object(ref m) if m.contains_key("mass_fn") => serde_json::json!({"symbolic": v}),
        Value::String(s) => serde_json::json!({"expr": s}),
        other => other,
    };
    serde_json::from_value(v).context("invalid weight")
}

fn with_young(mut cfg: ExperimentConfig, name: &str, arg: Option<&str>) -> Result<ExperimentConfig> {
    if let Some(a) = arg {
        let f = young_from_arg(a).with_context(|| format!("--{name}"))?;
        cfg.young.insert(name.to_string(), YoungSpec(f));
    }
    Ok(cfg)
}

fn with_data(mut cfg: ExperimentConfig, data: &Data) -> Result<ExperimentConfig> {
    if let Some(s) = &data.space {
        cfg.space = Some(space_arg(s)?);
    }
    if let Some(w) = &data.weight {
        cfg.weight = Some(weight_arg(w)?);
    }
    Ok(cfg)
}

fn with_opt<T: serde::Serialize>(cfg: ExperimentConfig, key: &str, v: Option<T>) -> ExperimentConfig {
    match v {
        Some(v) => cfg.with_param(key, v),
        None => cfg,
    }
}

/// The config a subcommand describes; `None` for commands that run no experiment.
pub fn build_config(cmd: &Cmd) -> Result<Option<ExperimentConfig>> {
    let cfg = match cmd {
        Cmd::Run { config } => load_config(config)?,
        Cmd::Young { phi, op, at, condition, psi } => {
            let mut cfg = with_young(ExperimentConfig::new(Command::Young), "phi", Some(phi))?;
            cfg = with_young(cfg, "psi", psi.as_deref())?.with_param("op", op).with_param("at", at);
            if psi.is_some() {
                cfg = cfg.with_param("psi", "psi");
            }
            with_opt(cfg, "condition", condition.as_ref())
        }
        Cmd::Norm { phi, data } => with_data(with_young(ExperimentConfig::new(Command::Norm), "phi", Some(phi))?, data)?,
        Cmd::Condexp { data } => with_data(ExperimentConfig::new(Command::Condexp), data)?,
        Cmd::Opnorm { phi, psi, data, kind, strategy, budget } => {
            let mut cfg = with_young(ExperimentConfig::new(Command::Opnorm), "phi", Some(phi))?;
            cfg = with_data(with_young(cfg, "psi", psi.as_deref())?, data)?;
            cfg.with_param("kind", kind).with_param("strategy", strategy).with_param("budget", budget)
        }
        Cmd::Criteria { which, phi, psi, theta, data, p, q, gch, infinite_measure } => {
            let mut cfg = ExperimentConfig::new(Command::Criteria);
            cfg = with_young(cfg, "phi", phi.as_deref())?;
            cfg = with_young(cfg, "psi", psi.as_deref())?;
            cfg = with_young(cfg, "theta", theta.as_deref())?;
            cfg = with_data(cfg, data)?;
            let which: Value = if which.len() == 1 { which[0].clone().into() } else { which.clone().into() };
            cfg = cfg.with_param("which", which).with_param("finite_measure", !infinite_measure);
            with_opt(with_opt(with_opt(cfg, "p", *p), "q", *q), "gch", *gch)
        }
        Cmd::Essnorm { phi, data, gch, ks, epsilons, level, budget } => {
            let cfg = with_young(ExperimentConfig::new(Command::Essnorm), "phi", Some(phi))?;
            let cfg = with_data(cfg, data)?.with_param("epsilons", epsilons);
            let cfg = with_opt(with_opt(cfg, "gch", *gch), "ks", ks.as_ref());
            with_opt(with_opt(cfg, "level", *level), "budget", *budget)
        }
        Cmd::Gch { phi, partner, data, samples, constant } => {
            let mut cfg = with_young(ExperimentConfig::new(Command::Gch), "phi", Some(phi))?;
            cfg = with_data(with_young(cfg, "partner", partner.as_deref())?, data)?.with_param("samples", samples);
            if partner.is_some() {
                cfg = cfg.with_param("partner", "partner");
            }
            with_opt(cfg, "constant", *constant)
        }
        Cmd::VerifyAll { config, fixture: name } => {
            let cfg = match (config, name) {
                (Some(path), _) => load_config(path)?,
                (None, Some(name)) => fixture(name)?,
                (None, None) => return Err(anyhow!("verify-all needs --config or --fixture")),
            };
            if cfg.command != Command::VerifyAll {
                return Err(anyhow!("config runs {:?}, not verify-all", cfg.command.name()));
            }
            cfg
        }
        Cmd::EmitFixture { .. } => return Ok(None),
    };
    Ok(Some(cfg))
}

fn run_experiment(cli: &Cli, cfg: &ExperimentConfig) -> Result<u8> {
    let seed = cli.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let start = Instant::now();
    let outcome = execute(cfg, seed)?;
    let report = Report::new(cfg.command.name(), seed, outcome.result.clone(), start.elapsed().as_millis() as u64);
    match cli.output_dir.as_ref().or(cfg.output_dir.as_ref()) {
        Some(dir) => {
            for p in write_outputs(dir, &report, &outcome.sidecars)? {
                eprintln!("wrote {}", p.display());
            }
        }
        None => print!("{}", report.to_json()),
    }
    if cli.strict && outcome.flagged() {
        for c in &outcome.failed_checks {
            eprintln!("failed check: {c}");
        }
        return Ok(2);
    }
    Ok(0)
}

fn compare(paths: &[PathBuf]) -> Result<u8> {
    let (a, b) = (&paths[0], &paths[1]);
    Ok(match compare_reports(a, b)? {
        None => {
            println!("identical: {} and {}", a.display(), b.display());
            0
        }
        Some(at) => {
            println!("reports differ at {at}");
            2
        }
    })
}

/// Runs the parsed command line and returns the process status.
pub fn run(cli: &Cli) -> Result<u8> {
    if let Some(paths) = &cli.compare {
        return compare(paths);
    }
    let cmd = cli.command.as_ref().ok_or_else(|| anyhow!("no command given; see --help"))?;
    if let Cmd::EmitFixture { name, dir } = cmd {
        let dir = dir.as_deref().or(cli.output_dir.as_deref()).unwrap_or(Path::new("."));
        if !FIXTURES.contains(&name.as_str()) {
            return Err(anyhow!("unknown fixture {name:?}; known: {}", FIXTURES.join(", ")));
        }
        println!("{}", emit_fixture(name, dir)?.display());
        return Ok(0);
    }
    let cfg = build_config(cmd)?.expect("experiment command");
    run_experiment(cli, &cfg)
}

pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn young_flags_build_a_config() {
        let cli = Cli::try_parse_from(["orlicz-lab", "young", "--phi", "ps:2", "--at", "2"]).unwrap();
        let cfg = build_config(cli.command.as_ref().unwrap()).unwrap().unwrap();
        assert_eq!(cfg.command, Command::Young);
        assert_eq!(cfg.params["at"], serde_json::json!([2.0]));
    }

    #[test]
    fn weight_shapes() {
        assert!(matches!(weight_arg("[1, 2]").unwrap(), WeightSpec::Values(_)));
        assert!(matches!(weight_arg(r#"{"mass_fn": "2^(-n)", "value_fn": "1"}"#).unwrap(), WeightSpec::Symbolic(_)));
        assert!(matches!(weight_arg(r#""1 + w""#).unwrap(), WeightSpec::Expr(_)));
    }
}
