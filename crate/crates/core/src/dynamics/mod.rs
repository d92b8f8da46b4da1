//! Time propagation of the single-excitation emitter amplitudes.

mod analytic;
mod convergence;
mod fqd;
mod maqd;
mod trajectory;

pub use analytic::analytic_pair_populations;
pub use convergence::{convergence_sweep, convergence_sweep_with, ConvergenceReport};
pub use fqd::{fqd_problem, propagate_fqd, scattering_spectra, solve_fqd, FqdProblem, MarkovTerms};
pub use maqd::{maqd_generator, propagate_maqd, solve_maqd};
pub use trajectory::{fmt17, Trajectory};

use crate::error::Result;
use crate::greens::{Part, SommerfeldOptions};
use crate::model::{Method, ValidatedConfig};
use crate::weak::{weak_coupling_report, WeakCouplingReport, WeakOptions};

/// Weak-coupling report of the configured system with the full Green's tensor.
pub fn markov_report(config: &ValidatedConfig) -> Result<WeakCouplingReport> {
    let defaults = WeakOptions::default();
    let opts = WeakOptions {
        sommerfeld: SommerfeldOptions {
            rel_tol: config
                .tolerances
                .quadrature
                .min(defaults.sommerfeld.rel_tol),
            ..defaults.sommerfeld
        },
        ..defaults
    };
    weak_coupling_report(&config.emitters, &config.environment, Part::Total, &opts)
}

/// Runs the configured method.
pub fn simulate(config: &ValidatedConfig) -> Result<Trajectory> {
    match config.method {
        Method::Fqd => solve_fqd(config),
        Method::Maqd => solve_maqd(config, &markov_report(config)?),
        Method::Oracle => Ok(crate::oracle::solve_oracle_config(config)?.trajectory),
    }
}
