//! Run configuration shared by the command line and JSON config files.
//!
//! Every flag has a JSON key of the same name (with `_` for `-`). Values in
//! a config file use the same text forms as on the command line; numbers
//! and booleans may also be written as JSON literals, and list flags take
//! arrays. Flags given on the command line win over the file.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context};
use clap::Args;
use netgnar::graph::WeightMode;
use netgnar::ingest::TransformKind;
use netgnar::model::{preset, AlphaMode, GnarOrder, SelectionCriterion};
use netgnar::series::Frequency;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer};

pub const DEFAULT_TEST_PERIODS: usize = 40;

/// A model to evaluate: a numbered preset or an explicit order.
///
/// Explicit orders are written `P:S1/S2/...`, optionally followed by
/// `:global` or `:zero`, e.g. `2:1/1` or `1:2:zero`.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Preset(u8),
    Order(GnarOrder),
}

impl ModelSpec {
    pub fn order(&self) -> anyhow::Result<GnarOrder> {
        match self {
            ModelSpec::Preset(k) => Ok(preset(*k)?),
            ModelSpec::Order(o) => Ok(o.clone()),
        }
    }

    /// Name used in output keys and file names.
    pub fn name(&self) -> String {
        match self {
            ModelSpec::Preset(k) => format!("model{k}"),
            ModelSpec::Order(o) => {
                let s: Vec<String> = o.s.iter().map(|v| v.to_string()).collect();
                let suffix = match (o.alpha_zero, o.alpha_mode) {
                    (true, _) => "_zero",
                    (false, AlphaMode::Global) => "_global",
                    (false, AlphaMode::PerNode) => "",
                };
                format!("p{}_s{}{suffix}", o.p, s.join("-"))
            }
        }
    }
}

impl FromStr for ModelSpec {
    type Err = anyhow::Error;

    fn from_str(raw: &str) -> anyhow::Result<Self> {
        let raw = raw.trim();
        if !raw.contains(':') {
            let k: u8 = raw.parse().with_context(|| format!("unknown model '{raw}'"))?;
            preset(k)?;
            return Ok(ModelSpec::Preset(k));
        }
        let mut parts = raw.split(':');
        let p: usize = parts.next().unwrap_or_default().parse().context("model lag count")?;
        let s = parts
            .next()
            .unwrap_or_default()
            .split('/')
            .map(|v| v.parse::<usize>().context("model stage list"))
            .collect::<anyhow::Result<Vec<_>>>()?;
        let (mode, zero) = match parts.next() {
            None => (AlphaMode::PerNode, false),
            Some("global") => (AlphaMode::Global, false),
            Some("zero") => (AlphaMode::PerNode, true),
            Some(other) => bail!("unknown alpha option '{other}' in model '{raw}'"),
        };
        if parts.next().is_some() {
            bail!("malformed model '{raw}'");
        }
        Ok(ModelSpec::Order(GnarOrder::new(p, s, mode, zero)?))
    }
}

/// `MxN` lattice dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeSize {
    pub rows: usize,
    pub cols: usize,
}

impl FromStr for LatticeSize {
    type Err = anyhow::Error;

    fn from_str(raw: &str) -> anyhow::Result<Self> {
        let (r, c) = raw
            .split_once(['x', 'X'])
            .with_context(|| format!("lattice size '{raw}' is not MxN"))?;
        Ok(LatticeSize {
            rows: r.trim().parse().context("lattice rows")?,
            cols: c.trim().parse().context("lattice columns")?,
        })
    }
}

impl fmt::Display for LatticeSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)
    }
}

fn scalar_text(v: serde_json::Value) -> Result<String, String> {
    match v {
        serde_json::Value::String(s) => Ok(s),
        serde_json::Value::Number(n) => Ok(n.to_string()),
        serde_json::Value::Bool(b) => Ok(b.to_string()),
        other => Err(format!("expected a scalar, found {other}")),
    }
}

fn parse_text<T>(text: &str) -> Result<T, String>
where
    T: FromStr,
    T::Err: fmt::Display,
{
    text.parse::<T>().map_err(|e| format!("'{text}': {e}"))
}

fn opt_scalar<'de, D, T>(d: D) -> Result<Option<T>, D::Error>
where
    D: Deserializer<'de>,
    T: FromStr,
    T::Err: fmt::Display,
{
    let Some(v) = Option::<serde_json::Value>::deserialize(d)? else {
        return Ok(None);
    };
    let text = scalar_text(v).map_err(D::Error::custom)?;
    parse_text::<T>(&text).map(Some).map_err(D::Error::custom)
}

fn opt_list<'de, D, T>(d: D) -> Result<Option<Vec<T>>, D::Error>
where
    D: Deserializer<'de>,
    T: FromStr,
    T::Err: fmt::Display,
{
    let Some(v) = Option::<serde_json::Value>::deserialize(d)? else {
        return Ok(None);
    };
    let items: Vec<String> = match v {
        serde_json::Value::Array(items) => items
            .into_iter()
            .map(scalar_text)
            .collect::<Result<_, _>>()
            .map_err(D::Error::custom)?,
        other => scalar_text(other)
            .map_err(D::Error::custom)?
            .split(',')
            .map(str::to_string)
            .collect(),
    };
    items
        .iter()
        .map(|t| parse_text::<T>(t.trim()))
        .collect::<Result<Vec<_>, _>>()
        .map(Some)
        .map_err(D::Error::custom)
}

/// Every setting a run can take. All fields are optional so that a file and
/// the command line can be layered; defaults apply after merging.
#[derive(Debug, Clone, Default, PartialEq, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Commuting flows CSV (`from_fips,to_fips,commuters`)
    #[arg(long, help_heading = "Inputs")]
    pub flows: Option<PathBuf>,
    /// Cumulative cases CSV
    #[arg(long, help_heading = "Inputs")]
    pub cases: Option<PathBuf>,
    /// Cumulative deaths CSV
    #[arg(long, help_heading = "Inputs")]
    pub deaths: Option<PathBuf>,
    /// County centroids CSV (`fips,lat,lon`), needed for great-circle weights
    #[arg(long, help_heading = "Inputs")]
    pub centroids: Option<PathBuf>,
    /// Use a triangular lattice instead of a flows file
    #[arg(long, value_name = "MxN", help_heading = "Inputs")]
    #[serde(deserialize_with = "opt_scalar")]
    pub lattice: Option<LatticeSize>,
    /// Skip malformed flow rows instead of failing (they are reported in quality.json)
    #[arg(long, num_args = 0..=1, default_missing_value = "true", help_heading = "Inputs")]
    #[serde(deserialize_with = "opt_scalar")]
    pub skip_bad_rows: Option<bool>,

    /// States to evaluate, postal codes or FIPS (e.g. RI,MA)
    #[arg(long, value_delimiter = ',', help_heading = "Evaluation")]
    #[serde(deserialize_with = "opt_list")]
    pub states: Option<Vec<String>>,
    /// daily or weekly
    #[arg(long, help_heading = "Evaluation")]
    #[serde(deserialize_with = "opt_scalar")]
    pub frequency: Option<Frequency>,
    /// Presets 1,2,3 or explicit orders such as 2:1/1
    #[arg(long, value_delimiter = ',', help_heading = "Evaluation")]
    #[serde(deserialize_with = "opt_list")]
    pub models: Option<Vec<ModelSpec>>,
    /// Rolling-horizon test periods [default: 40]
    #[arg(long, help_heading = "Evaluation")]
    #[serde(deserialize_with = "opt_scalar")]
    pub test_periods: Option<usize>,
    /// binary, commuters or great_circle_km
    #[arg(long, help_heading = "Evaluation")]
    #[serde(deserialize_with = "opt_scalar")]
    pub weight_mode: Option<WeightMode>,
    /// none, log1p, sqrt or zscore
    #[arg(long, help_heading = "Evaluation")]
    #[serde(deserialize_with = "opt_scalar")]
    pub transform: Option<TransformKind>,
    /// Worker threads (does not change results)
    #[arg(long, help_heading = "Evaluation")]
    #[serde(deserialize_with = "opt_scalar")]
    pub workers: Option<usize>,

    /// Model to simulate: a preset or an explicit order
    #[arg(long, help_heading = "Simulation")]
    #[serde(deserialize_with = "opt_scalar")]
    pub model: Option<ModelSpec>,
    /// Global alpha per lag
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, help_heading = "Simulation")]
    #[serde(deserialize_with = "opt_list")]
    pub alpha: Option<Vec<f64>>,
    /// Beta per (lag, stage), lag-major
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, help_heading = "Simulation")]
    #[serde(deserialize_with = "opt_list")]
    pub beta: Option<Vec<f64>>,
    /// Simulated rows [default: 100]
    #[arg(long, help_heading = "Simulation")]
    #[serde(deserialize_with = "opt_scalar")]
    pub steps: Option<usize>,
    /// Innovation standard deviation [default: 1]
    #[arg(long, help_heading = "Simulation")]
    #[serde(deserialize_with = "opt_scalar")]
    pub sigma: Option<f64>,
    /// Mean of the initial rows [default: 0]
    #[arg(long, allow_negative_numbers = true, help_heading = "Simulation")]
    #[serde(deserialize_with = "opt_scalar")]
    pub initial_level: Option<f64>,
    /// Standard deviation of the initial rows [default: sigma]
    #[arg(long, help_heading = "Simulation")]
    #[serde(deserialize_with = "opt_scalar")]
    pub initial_sd: Option<f64>,
    /// Discarded leading rows [default: 50]
    #[arg(long, help_heading = "Simulation")]
    #[serde(deserialize_with = "opt_scalar")]
    pub burn_in: Option<usize>,

    /// Largest alphaOrder and betaOrder searched [default: 3]
    #[arg(long, help_heading = "Selection")]
    #[serde(deserialize_with = "opt_scalar")]
    pub grid_max: Option<usize>,
    /// mase or bic
    #[arg(long, help_heading = "Selection")]
    #[serde(deserialize_with = "opt_scalar")]
    pub criterion: Option<SelectionCriterion>,

    /// Random seed [default: 0]
    #[arg(long)]
    #[serde(deserialize_with = "opt_scalar")]
    pub seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
}

macro_rules! layer {
    ($top:expr, $base:expr; $($field:ident),* $(,)?) => {
        RunConfig { $($field: $top.$field.or($base.$field)),* }
    };
}

impl RunConfig {
    pub fn from_file(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        // relative paths in a config file are relative to the file
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.flows, &mut cfg.cases, &mut cfg.deaths, &mut cfg.centroids, &mut cfg.out]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    /// Fields set in `self` win over `base`.
    pub fn over(self, base: RunConfig) -> RunConfig {
        layer!(self, base;
            flows, cases, deaths, centroids, lattice, skip_bad_rows, states, frequency, models,
            test_periods, weight_mode, transform, workers, model, alpha, beta, steps, sigma,
            initial_level, initial_sd, burn_in, grid_max, criterion, seed, out,
        )
    }

    pub fn out_dir(&self) -> anyhow::Result<&Path> {
        self.out.as_deref().context("--out is required")
    }

    pub fn test_periods(&self) -> anyhow::Result<usize> {
        let t = self.test_periods.unwrap_or(DEFAULT_TEST_PERIODS);
        if t == 0 {
            bail!("--test-periods must be at least 1");
        }
        Ok(t)
    }

    pub fn models(&self) -> Vec<ModelSpec> {
        self.models
            .clone()
            .unwrap_or_else(|| (1..=3).map(ModelSpec::Preset).collect())
    }

    pub fn criterion(&self) -> SelectionCriterion {
        self.criterion.unwrap_or_default()
    }

    /// Fails if a declared input path does not exist.
    pub fn check_paths(&self) -> anyhow::Result<()> {
        for (flag, path) in [
            ("--flows", &self.flows),
            ("--cases", &self.cases),
            ("--deaths", &self.deaths),
            ("--centroids", &self.centroids),
        ] {
            if let Some(p) = path {
                if !p.is_file() {
                    bail!("{flag} {}: no such file", p.display());
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_specs() {
        assert_eq!("2".parse::<ModelSpec>().unwrap(), ModelSpec::Preset(2));
        assert!("9".parse::<ModelSpec>().is_err());
        let m: ModelSpec = "2:1/2:global".parse().unwrap();
        assert_eq!(m.order().unwrap(), GnarOrder::new(2, vec![1, 2], AlphaMode::Global, false).unwrap());
        assert_eq!(m.name(), "p2_s1-2_global");
        assert_eq!("1:1:zero".parse::<ModelSpec>().unwrap().name(), "p1_s1_zero");
        assert!("1:1:maybe".parse::<ModelSpec>().is_err());
        assert!("2:1".parse::<ModelSpec>().is_err());
    }

    #[test]
    fn lattice_size() {
        let l: LatticeSize = "40x78".parse().unwrap();
        assert_eq!((l.rows, l.cols), (40, 78));
        assert_eq!(l.to_string(), "40x78");
        assert!("40".parse::<LatticeSize>().is_err());
    }

    #[test]
    fn json_mirrors_flags() {
        let cfg: RunConfig = serde_json::from_str(
            r#"{"states": "RI,MA", "models": [1, "2:1/1"], "test_periods": 5,
                "transform": "none", "frequency": "weekly", "lattice": "3x4", "alpha": [0.5, -0.1]}"#,
        )
        .unwrap();
        assert_eq!(cfg.states, Some(vec!["RI".to_string(), "MA".to_string()]));
        assert_eq!(cfg.models.as_ref().unwrap().len(), 2);
        assert_eq!(cfg.test_periods, Some(5));
        assert_eq!(cfg.transform, Some(TransformKind::Identity));
        assert_eq!(cfg.frequency, Some(Frequency::Weekly));
        assert_eq!(cfg.alpha, Some(vec![0.5, -0.1]));
        assert!(serde_json::from_str::<RunConfig>(r#"{"test-periods": 5}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"test_periods": "many"}"#).is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = RunConfig {
            test_periods: Some(5),
            seed: Some(1),
            ..Default::default()
        };
        let flags = RunConfig {
            seed: Some(2),
            ..Default::default()
        };
        let merged = flags.over(file);
        assert_eq!((merged.test_periods, merged.seed), (Some(5), Some(2)));
        assert_eq!(merged.test_periods().unwrap(), 5);
        assert!(RunConfig { test_periods: Some(0), ..Default::default() }.test_periods().is_err());
        assert_eq!(RunConfig::default().test_periods().unwrap(), DEFAULT_TEST_PERIODS);
    }
}
