//! Run configuration shared by the command line and TOML config files.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;
use serde::{Deserialize, Deserializer};

use crate::error::{Error, Result};

/// A time bound that may be infinite; spelled `inf` on the command line
/// and in config files.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Time(pub f64);

impl FromStr for Time {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "+inf" => Ok(Time(f64::INFINITY)),
            other => other.parse::<f64>().map(Time).map_err(|_| format!("expected a number or `inf`, got `{s}`")),
        }
    }
}

impl fmt::Display for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Time {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(Time(x)),
            Raw::Int(x) => Ok(Time(x as f64)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Moment,
    Finiteness,
    Simulate,
    Reproduce,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Example {
    Dufresne,
    Bessel,
    Gbm,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSpec {
    pub name: Option<String>,
    pub mu: Option<f64>,
    pub sigma: Option<f64>,
    pub delta: Option<f64>,
    pub v: Option<f64>,
    pub power: Option<f64>,
}

impl ModelSpec {
    pub fn params(&self) -> BTreeMap<String, f64> {
        [("mu", self.mu), ("sigma", self.sigma), ("delta", self.delta), ("v", self.v), ("power", self.power)]
            .into_iter()
            .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
            .collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuerySpec {
    /// Moment order; integer for the engine, any positive value for simulation.
    pub n: Option<f64>,
    pub s: Option<f64>,
    pub t: Option<Time>,
    pub method: Option<String>,
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
    pub max_subdivisions: Option<usize>,
    pub max_n: Option<u32>,
    pub example: Option<Example>,
    pub no_mc: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSpec {
    pub paths: Option<usize>,
    pub dt: Option<f64>,
    pub horizon: Option<f64>,
    pub seed: Option<u64>,
    pub streams: Option<usize>,
    pub grid_step: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Everything one invocation needs. Fields left unset fall back to the
/// command's defaults.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<CommandKind>,
    pub model: ModelSpec,
    pub query: QuerySpec,
    pub sim: SimSpec,
    pub output: OutputSpec,
    pub verbosity: u8,
}

macro_rules! overlay {
    ($top:expr, $base:expr; $($field:ident),*) => {
        $( if $top.$field.is_none() { $top.$field = $base.$field.clone(); } )*
    };
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidQuery(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidQuery(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Fills every unset field of `self` from `base`.
    pub fn or(mut self, base: &RunConfig) -> Self {
        overlay!(self, base; command);
        overlay!(self.model, base.model; name, mu, sigma, delta, v, power);
        overlay!(self.query, base.query; n, s, t, method, abs_tol, rel_tol, max_subdivisions, max_n, example, no_mc);
        overlay!(self.sim, base.sim; paths, dt, horizon, seed, streams, grid_step);
        overlay!(self.output, base.output; path, format);
        self.verbosity = self.verbosity.max(base.verbosity);
        self
    }

    /// Output format: explicit, else from the output file extension, else text.
    pub fn format(&self) -> Format {
        if let Some(f) = self.output.format {
            return f;
        }
        match self.output.path.as_ref().and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some("csv") => Format::Csv,
            Some(_) => Format::Json,
            None => Format::Text,
        }
    }
}
