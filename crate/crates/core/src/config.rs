//! Run configuration shared by every subcommand.
//!
//! All blocks are optional; an empty JSON object is the default ideal-gas
//! setup (`γ = 1.4`, `R = 1`, `τ̄ = (1,1,1)`, `η = ζ = χ = 1`, `ρ = θ = 1`).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::eos::IdealGas;
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::initial::IcConfig;
use crate::solver::{validate_cfl, SchemeConfig};
use crate::state::{Model, PhysicalState, RelaxationParams, SourceMode};

/// Equilibrium reference state for the structural audit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StateConfig {
    pub rho: f64,
    pub theta: f64,
    #[serde(default)]
    pub u: [f64; 3],
}

impl Default for StateConfig {
    fn default() -> Self {
        Self {
            rho: 1.0,
            theta: 1.0,
            u: [0.0; 3],
        }
    }
}

impl StateConfig {
    pub fn physical(&self) -> PhysicalState {
        PhysicalState {
            u: self.u,
            ..PhysicalState::equilibrium(self.rho, self.theta)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeConfig {
    pub t_end: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
}

fn default_cfl() -> f64 {
    0.5
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self {
            t_end: 0.1,
            cfl: default_cfl(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Snapshot cadence; `None` writes only the initial and final states.
    #[serde(default)]
    pub every: Option<f64>,
    /// Output directory, overridden by `--out`.
    #[serde(default)]
    pub path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Strictly decreasing, all positive.
    pub epsilons: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            epsilons: vec![0.02, 0.01, 0.005, 0.0025],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecayConfig {
    /// Fraction of the time window, counted from the end, used for the rate fit.
    #[serde(default = "default_tail")]
    pub tail_fraction: f64,
}

fn default_tail() -> f64 {
    0.5
}

impl Default for DecayConfig {
    fn default() -> Self {
        Self {
            tail_fraction: default_tail(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub eos: IdealGas,
    #[serde(default)]
    pub relax: RelaxationParams,
    #[serde(default)]
    pub source: SourceMode,
    #[serde(default)]
    pub state: StateConfig,
    #[serde(default)]
    pub grid: Grid1D,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub ic: IcConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub scheme: SchemeConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub decay: DecayConfig,
    /// Seed for the random verification directions, overridden by `--seed`.
    #[serde(default)]
    pub seed: u64,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Parameters checked for the model itself (EOS and relaxation).
    pub fn model(&self) -> Result<Model> {
        self.eos.validate()?;
        Ok(Model::new(self.eos, self.relax)?.with_source(self.source))
    }

    /// Adds the checks needed by time-dependent runs.
    pub fn validate_run(&self) -> Result<()> {
        self.model()?;
        self.grid.validate()?;
        validate_cfl(self.time.cfl)?;
        if !(self.time.t_end > 0.0 && self.time.t_end.is_finite()) {
            return Err(Error::Config(format!(
                "t_end must be positive, got {}",
                self.time.t_end
            )));
        }
        if let Some(e) = self.output.every {
            if !(e > 0.0) {
                return Err(Error::Config(format!(
                    "output.every must be positive, got {e}"
                )));
            }
        }
        Ok(())
    }
}
