//! Experiment configuration files and the resolved inputs they describe.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use num_complex::Complex64;
use orlicz_core::space::{build_atomic_space, build_rotation_space, build_symmetric_space, SpaceSpec};
use orlicz_core::{Atoms, Expr, MeasurableFn, MeasureSpace, SubAlgebra, SymbolicAtomSequence, YoungFunction};
use serde::de::{self, DeserializeOwned, MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const SCHEMA_VERSION: &str = "1";
pub const NMAX_ENV: &str = "ORLICZ_LAB_NMAX";
pub const DEFAULT_NMAX: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Young,
    Norm,
    Condexp,
    Opnorm,
    Criteria,
    Essnorm,
    Gch,
    VerifyAll,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Young => "young",
            Self::Norm => "norm",
            Self::Condexp => "condexp",
            Self::Opnorm => "opnorm",
            Self::Criteria => "criteria",
            Self::Essnorm => "essnorm",
            Self::Gch => "gch",
            Self::VerifyAll => "verify-all",
        }
    }
}

fn schema_version() -> String {
    SCHEMA_VERSION.to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "schema_version")]
    pub schema_version: String,
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Named Young's functions; commands look up `phi`, `psi`, `theta`
    /// unless their params name others.
    #[serde(default)]
    pub young: BTreeMap<String, YoungSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<WeightSpec>,
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    pub params: serde_json::Map<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        Self {
            schema_version: schema_version(),
            command,
            seed: None,
            young: BTreeMap::new(),
            space: None,
            weight: None,
            params: serde_json::Map::new(),
            output_dir: None,
        }
    }

    /// Command parameters decoded into `T`; errors name the offending path.
    pub fn params<T: DeserializeOwned>(&self) -> Result<T> {
        let value = serde_json::Value::Object(self.params.clone());
        serde_path_to_error::deserialize(value).map_err(|e| {
            let path = e.path().to_string();
            let path = if path == "." { "params".to_string() } else { format!("params.{path}") };
            anyhow!("invalid config at {path}: {}", e.into_inner())
        })
    }

    pub fn with_param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(key.to_string(), serde_json::to_value(value).expect("serializable param"));
        self
    }
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        anyhow!("invalid config at {path}: {}", e.into_inner())
    })?;
    if cfg.schema_version != SCHEMA_VERSION {
        bail!("unsupported schema_version {:?}, expected {SCHEMA_VERSION:?}", cfg.schema_version);
    }
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in {}", path.display()))
}

/// A Young's function given as a tagged object or as `family[:p]`.
#[derive(Debug, Clone, PartialEq)]
pub struct YoungSpec(pub YoungFunction);

impl Serialize for YoungSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for YoungSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = YoungSpec;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a Young's function object or a \"family:p\" string")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<YoungSpec, E> {
                parse_young_shorthand(v).map(YoungSpec).map_err(|e| E::custom(format!("{e:#}")))
            }

            fn visit_map<A: MapAccess<'de>>(self, map: A) -> Result<YoungSpec, A::Error> {
                let f = YoungFunction::deserialize(de::value::MapAccessDeserializer::new(map))?;
                f.validate().map_err(de::Error::custom)?;
                Ok(YoungSpec(f))
            }
        }
        d.deserialize_any(V)
    }
}

/// `power:3`, `power_scaled:2`, `exp_power:1`, `entropy:2`, `log_quotient`,
/// `exp_quartic`, and `conjugate:<spec>`. Dashes and underscores are
/// interchangeable; `ps` abbreviates `power_scaled`.
pub fn parse_young_shorthand(s: &str) -> Result<YoungFunction> {
    let s = s.trim();
    let (family, arg) = match s.split_once(':') {
        Some((f, a)) => (f.trim().replace('-', "_"), Some(a.trim())),
        None => (s.replace('-', "_"), None),
    };
    let p = || -> Result<f64> {
        let a = arg.ok_or_else(|| anyhow!("{family} needs an exponent, e.g. {family}:2"))?;
        a.parse::<f64>().map_err(|_| anyhow!("bad exponent {a:?} in {s:?}"))
    };
    let f = match family.as_str() {
        "power" => YoungFunction::power(p()?),
        "power_scaled" | "ps" => YoungFunction::power_scaled(p()?),
        "exp_power" => YoungFunction::exp_power(p()?),
        "entropy" => YoungFunction::entropy(p()?),
        "log_quotient" => YoungFunction::log_quotient(),
        "exp_quartic" => YoungFunction::exp_quartic(),
        "conjugate" => {
            let inner = arg.ok_or_else(|| anyhow!("conjugate needs an inner function"))?;
            parse_young_shorthand(inner)?.conjugate()
        }
        other => bail!("unknown Young's function family {other:?}"),
    };
    f.validate()?;
    Ok(f)
}

/// Reads `--phi`-style arguments: inline JSON, a JSON file, or shorthand.
pub fn young_from_arg(arg: &str) -> Result<YoungFunction> {
    let trimmed = arg.trim_start();
    let json = if trimmed.starts_with('{') || trimmed.starts_with('"') {
        Some(arg.to_string())
    } else if Path::new(arg).is_file() {
        Some(std::fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?)
    } else {
        None
    };
    match json {
        Some(text) => {
            let de = &mut serde_json::Deserializer::from_str(&text);
            let spec: YoungSpec = serde_path_to_error::deserialize(de)
                .map_err(|e| {
                    let path = e.path().to_string();
                    anyhow!("invalid Young's function at {path}: {}", e.into_inner())
                })?;
            Ok(spec.0)
        }
        None => parse_young_shorthand(arg),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceConfig {
    /// `[-1, 1]` with the reflection pairing.
    Symmetric { n_cells: usize },
    /// `[0, 1]` with the orbits of the `1/n` rotation.
    Rotation { n: usize, cells_per_interval: usize },
    /// Atoms with the full σ-algebra.
    Atomic { masses: Vec<f64> },
    Explicit(SpaceSpec),
}

impl SpaceConfig {
    pub fn build(&self) -> Result<(Arc<MeasureSpace>, SubAlgebra)> {
        Ok(match self {
            Self::Symmetric { n_cells } => build_symmetric_space(*n_cells)?,
            Self::Rotation { n, cells_per_interval } => build_rotation_space(*n, *cells_per_interval)?,
            Self::Atomic { masses } => build_atomic_space(masses)?,
            Self::Explicit(spec) => spec.build()?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolicSpec {
    pub mass_fn: Expr,
    pub value_fn: Expr,
    /// Defaults to `ORLICZ_LAB_NMAX`, else 10 000.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
}

impl SymbolicSpec {
    pub fn build(&self) -> Result<SymbolicAtomSequence> {
        let n_max = match self.n_max {
            Some(n) => n,
            None => default_n_max()?,
        };
        Ok(SymbolicAtomSequence::new(self.mass_fn.clone(), self.value_fn.clone(), n_max)?)
    }
}

pub fn default_n_max() -> Result<usize> {
    match std::env::var(NMAX_ENV) {
        Ok(v) => v.trim().parse().with_context(|| format!("{NMAX_ENV}={v:?} is not a positive integer")),
        Err(_) => Ok(DEFAULT_NMAX),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    /// Real cellwise values in cell order.
    Values(Vec<f64>),
    Complex { re: Vec<f64>, im: Vec<f64> },
    /// Expression in the cell coordinate `w` and the 1-based index `n`.
    Expr(Expr),
    /// A symbolic 𝒜-atom sequence; no space is needed.
    Symbolic(SymbolicSpec),
}

/// A weight on a finite space or a symbolic atom sequence.
#[derive(Debug, Clone)]
pub enum Weight {
    Finite(MeasurableFn),
    Symbolic(SymbolicAtomSequence),
}

/// Everything a command needs, built from a config.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub young: BTreeMap<String, YoungFunction>,
    pub space: Option<(Arc<MeasureSpace>, SubAlgebra)>,
    pub weight: Option<Weight>,
}

impl Inputs {
    pub fn resolve(cfg: &ExperimentConfig) -> Result<Self> {
        let young = cfg.young.iter().map(|(k, v)| (k.clone(), v.0.clone())).collect();
        let space = cfg.space.as_ref().map(|s| s.build().context("building space")).transpose()?;
        let weight = match &cfg.weight {
            None => None,
            Some(WeightSpec::Symbolic(s)) => Some(Weight::Symbolic(s.build().context("building weight.symbolic")?)),
            Some(spec) => {
                let (sp, _) = space.as_ref().ok_or_else(|| anyhow!("weight needs a space (config field `space`)"))?;
                let f = match spec {
                    WeightSpec::Values(v) => MeasurableFn::real(sp.clone(), v.clone()),
                    WeightSpec::Complex { re, im } => {
                        if re.len() != im.len() {
                            bail!("weight.complex: re and im have different lengths");
                        }
                        MeasurableFn::new(sp.clone(), re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect())
                    }
                    WeightSpec::Expr(e) => MeasurableFn::from_expr(sp.clone(), e),
                    WeightSpec::Symbolic(_) => unreachable!(),
                }
                .context("building weight")?;
                Some(Weight::Finite(f))
            }
        };
        Ok(Self { young, space, weight })
    }

    pub fn young(&self, name: &str, role: &str) -> Result<&YoungFunction> {
        self.young
            .get(name)
            .ok_or_else(|| anyhow!("Young's function {name:?} (used as {role}) is not defined under `young`"))
    }

    pub fn young_opt(&self, name: &str) -> Option<&YoungFunction> {
        self.young.get(name)
    }

    pub fn space(&self) -> Result<&(Arc<MeasureSpace>, SubAlgebra)> {
        self.space.as_ref().ok_or_else(|| anyhow!("this command needs a finite space (config field `space`)"))
    }

    pub fn finite_weight(&self) -> Result<&MeasurableFn> {
        match &self.weight {
            Some(Weight::Finite(f)) => Ok(f),
            Some(Weight::Symbolic(_)) => bail!("this command needs a weight on a finite space, not a symbolic one"),
            None => bail!("this command needs a weight (config field `weight`)"),
        }
    }

    pub fn atoms(&self) -> Result<Atoms<'_>> {
        match &self.weight {
            Some(Weight::Symbolic(s)) => Ok(Atoms::Symbolic(s)),
            Some(Weight::Finite(u)) => Ok(Atoms::Finite { alg: &self.space()?.1, u }),
            None => bail!("this command needs a weight (config field `weight`)"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shorthand_families() {
        assert_eq!(parse_young_shorthand("ps:2").unwrap(), YoungFunction::power_scaled(2.0));
        assert_eq!(parse_young_shorthand("exp-power:1").unwrap(), YoungFunction::exp_power(1.0));
        assert_eq!(parse_young_shorthand("log_quotient").unwrap(), YoungFunction::log_quotient());
        assert_eq!(parse_young_shorthand("conjugate:power_scaled:3").unwrap(), YoungFunction::power_scaled(1.5));
        assert!(parse_young_shorthand("power_scaled").is_err());
        assert!(parse_young_shorthand("power_scaled:0.5").is_err());
        assert!(parse_young_shorthand("cosh:2").is_err());
    }

    #[test]
    fn errors_name_the_offending_path() {
        let err = parse_config(r#"{"command":"norm","space":{"symmetric":{"n_cells":"ten"}}}"#).unwrap_err();
        assert!(format!("{err:#}").contains("space.symmetric.n_cells"), "{err:#}");
        let err = parse_config(r#"{"command":"norm","young":{"phi":"cosh:2"}}"#).unwrap_err();
        assert!(format!("{err:#}").contains("young.phi"), "{err:#}");
        let err = parse_config(r#"{"command":"bogus"}"#).unwrap_err();
        assert!(format!("{err:#}").contains("command"), "{err:#}");
        let cfg = parse_config(r#"{"command":"gch","params":{"samples":"many"}}"#).unwrap();
        #[derive(Deserialize, Debug)]
        #[allow(dead_code)]
        struct P {
            samples: usize,
        }
        let err = cfg.params::<P>().unwrap_err();
        assert!(format!("{err:#}").contains("params.samples"), "{err:#}");
    }

    #[test]
    fn young_objects_and_strings_mix() {
        let cfg = parse_config(
            r#"{"command":"young","young":{"phi":{"family":"exp_power","p":2},"psi":"ps:2"},
                "weight":{"symbolic":{"mass_fn":"2^(-n)","value_fn":"1","n_max":16}}}"#,
        )
        .unwrap();
        let inputs = Inputs::resolve(&cfg).unwrap();
        assert_eq!(inputs.young("psi", "psi").unwrap(), &YoungFunction::power_scaled(2.0));
        assert!(inputs.young("theta", "theta").is_err());
        assert!(matches!(inputs.weight, Some(Weight::Symbolic(_))));
    }
}
