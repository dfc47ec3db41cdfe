//! Flat experiment configuration: a TOML file of scalar keys plus
//! command-line overrides, resolved into one struct per run.

use serde::{Deserialize, Serialize};
use uvqnhe_core::hamiltonian::Boundary;
use uvqnhe_core::neural::{Activation, Head};
use uvqnhe_core::training::EnergyMode;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryChoice {
    Open,
    Periodic,
}

impl Default for BoundaryChoice {
    fn default() -> Self {
        BoundaryChoice::Open
    }
}

impl From<BoundaryChoice> for Boundary {
    fn from(choice: BoundaryChoice) -> Self {
        match choice {
            BoundaryChoice::Open => Boundary::Open,
            BoundaryChoice::Periodic => Boundary::Periodic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeChoice {
    Exact,
    Sampler,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Chain length; the one field without a default.
    pub n_sites: usize,
    #[serde(default = "one")]
    pub layers: usize,
    #[serde(default = "unit")]
    pub j: f64,
    #[serde(default = "unit")]
    pub h: f64,
    #[serde(default)]
    pub boundary: BoundaryChoice,
    /// Data-collection mode for the network stage.
    #[serde(default = "default_mode")]
    pub mode: ModeChoice,
    /// Circuit-stage evaluation mode, for every kind. Defaults to exact:
    /// simplex search over a stochastic objective stalls near flat
    /// regions, and the experiments probe the network stage, not the
    /// optimizer's noise robustness.
    #[serde(default)]
    pub vqe_mode: Option<ModeChoice>,
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default = "default_epochs")]
    pub epochs: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default = "default_learning_rate")]
    pub learning_rate: f64,
    #[serde(default = "default_hidden")]
    pub hidden: usize,
    #[serde(default = "default_activation")]
    pub activation: String,
    /// Network output head for the multiplicative stage: `amplitude`
    /// (positive, unbounded) or `linear` (signed). The `uvqnhe` kinds
    /// always train the phase head.
    #[serde(default = "default_head")]
    pub head: String,
    /// Shot counts visited by `shot-sweep` and `variance-audit`.
    #[serde(default = "default_shot_list")]
    pub shot_list: Vec<u64>,
    /// Estimator trained inside `shot-sweep`: `vqnhe` or `uvqnhe`.
    #[serde(default = "default_variant")]
    pub variant: String,
    /// Redraw sampled collections until every histogram covers the full
    /// space, counting the rejections.
    #[serde(default)]
    pub enforce_coverage: bool,
    /// Add a vanishing pseudo-count mass to the normalization histogram.
    #[serde(default)]
    pub regularize_denominator: bool,
    /// Output directory; defaults to `runs/<kind>`.
    #[serde(default)]
    pub out: Option<String>,
}

fn one() -> usize {
    1
}
fn unit() -> f64 {
    1.0
}
fn default_mode() -> ModeChoice {
    ModeChoice::Sampler
}
fn default_shots() -> u64 {
    1000
}
fn default_epochs() -> usize {
    300
}
fn default_trials() -> usize {
    20
}
fn default_budget() -> usize {
    4000
}
fn default_learning_rate() -> f64 {
    1e-2
}
fn default_hidden() -> usize {
    16
}
fn default_activation() -> String {
    "tanh".into()
}
fn default_head() -> String {
    "amplitude".into()
}
fn default_shot_list() -> Vec<u64> {
    vec![500, 1000, 5000, 20000]
}
fn default_variant() -> String {
    "vqnhe".into()
}

impl ExperimentConfig {
    /// Parse a config file, then apply `key=value` override lines on top.
    pub fn load(path: Option<&str>, overrides: &[String]) -> Result<Self, CliError> {
        let mut table = match path {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read config {path}: {e}")))?;
                text.parse::<toml::Table>()
                    .map_err(|e| CliError::Usage(format!("config {path}: {e}")))?
            }
            None => toml::Table::new(),
        };
        for entry in overrides {
            let parsed = entry
                .parse::<toml::Table>()
                .map_err(|e| CliError::Usage(format!("override '{entry}': {e}")))?;
            if parsed.len() != 1 {
                return Err(CliError::Usage(format!(
                    "override '{entry}' must set exactly one key"
                )));
            }
            for (key, value) in parsed {
                table.insert(key, value);
            }
        }
        toml::Value::Table(table)
            .try_into()
            .map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    pub fn energy_mode(&self, choice: ModeChoice) -> EnergyMode {
        match choice {
            ModeChoice::Exact => EnergyMode::Exact,
            ModeChoice::Sampler => EnergyMode::Shots { shots: self.shots },
        }
    }

    pub fn vqe_energy_mode(&self) -> EnergyMode {
        self.energy_mode(self.vqe_mode.unwrap_or(ModeChoice::Exact))
    }

    pub fn parsed_activation(&self) -> Result<Activation, CliError> {
        Activation::parse(&self.activation)
            .ok_or_else(|| CliError::Usage(format!("unknown activation '{}'", self.activation)))
    }

    pub fn multiplicative_head(&self) -> Result<Head, CliError> {
        match self.head.as_str() {
            "amplitude" => Ok(Head::Amplitude),
            "linear" => Ok(Head::Linear),
            other => Err(CliError::Usage(format!(
                "head '{other}' is not one of amplitude, linear"
            ))),
        }
    }
}
