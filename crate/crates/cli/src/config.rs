//! JSON configuration files.
//!
//! A configuration is one JSON object; unknown keys are rejected.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "emitters": [
//!     { "position": [0, 0, 10], "omega": 3.525, "dipole": [0, 0, 10] },
//!     { "position": [4, 0, 10], "omega": 3.525, "dipole": [0, 0, 10] }
//!   ],
//!   "environment": { "kind": "drude_half_space", "omega_p": 5.0, "gamma": 0.1 },
//!   "initial_amplitudes": [[1, 0], [0, 0]],
//!   "method": "fqd",
//!   "rwa": false,
//!   "time_grid": { "t_max": 5000, "dt": 1.0 },
//!   "frequency_grid": { "omega_min": 1, "omega_max": 7, "n_points": 1201 },
//!   "memory_cutoff": 300,
//!   "oracle_modes": 400,
//!   "tolerances": { "quadrature": 1e-8, "memory": 1e-6, "corrector": 1e-12 }
//! }
//! ```
//!
//! | key | meaning |
//! |-----|---------|
//! | `schema_version` | must be 1 (default 1) |
//! | `emitters[].position` | nm; the Drude half-space fills z < 0 |
//! | `emitters[].omega` | transition energy ħω in eV |
//! | `emitters[].dipole` | real transition dipole in Debye |
//! | `environment` | `{"kind": "vacuum"}` or `{"kind": "drude_half_space", "omega_p", "gamma"}` (eV) with ε = 1 − ω_p²/(ω² + iγω) |
//! | `initial_amplitudes` | optional `[re, im]` per emitter, normalised; default: first emitter excited |
//! | `method` | `fqd`, `maqd` or `oracle` |
//! | `rwa` | rotating-wave approximation (default false) |
//! | `time_grid` | `t_max` and `dt` in ħ/eV (1 ħ/eV ≈ 0.658 fs) |
//! | `frequency_grid` | uniform grid for spectral densities (eV) |
//! | `memory_cutoff` | optional memory window τ_max in ħ/eV; default min(t_max, 10/γ) |
//! | `oracle_modes` | optional pseudomode count for the oracle (default 400) |
//! | `tolerances` | optional quadrature, memory-tail (null disables truncation) and corrector tolerances |
//!
//! A run manifest may be given in place of a configuration; its `config`
//! snapshot is used, which reproduces the original run.

use std::path::Path;

use mqed::model::{validate_config, Method, SystemConfig, ValidatedConfig};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};
use crate::output::MANIFEST_VERSION_KEY;

/// Command-line overrides applied on top of a configuration.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub method: Option<Method>,
    pub rwa: Option<bool>,
    pub tol: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, config: &mut SystemConfig) {
        if let Some(m) = self.method {
            config.method = m;
        }
        if let Some(r) = self.rwa {
            config.rwa = r;
        }
        if let Some(t) = self.tol {
            config.tolerances.quadrature = t;
        }
    }
}

fn parse_error(path: &str, e: &serde_json::Error) -> CliError {
    CliError::Parse {
        path: path.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

pub fn parse_config(text: &str, path: &str) -> CliResult<SystemConfig> {
    let value: Value = serde_json::from_str(text).map_err(|e| parse_error(path, &e))?;
    if let Some(snapshot) = value.get(MANIFEST_VERSION_KEY).and(value.get("config")) {
        return serde_json::from_value(snapshot.clone()).map_err(|e| CliError::Parse {
            path: format!("{path} (manifest config)"),
            line: 0,
            column: 0,
            message: e.to_string(),
        });
    }
    serde_json::from_str(text).map_err(|e| parse_error(path, &e))
}

pub fn load_config(path: &Path) -> CliResult<SystemConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text, &path.display().to_string())
}

pub fn validate(config: &SystemConfig) -> CliResult<ValidatedConfig> {
    validate_config(config).map_err(CliError::Invalid)
}

/// SHA-256 of the canonical JSON serialisation.
pub fn config_hash(config: &SystemConfig) -> String {
    let json = serde_json::to_string(config).expect("configuration serialises");
    format!("{:x}", Sha256::digest(json.as_bytes()))
}
