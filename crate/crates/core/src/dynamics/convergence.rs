use serde::Serialize;

use super::{solve_fqd, Trajectory};
use crate::error::{Error, Result};
use crate::model::{validate_config, ValidatedConfig};

/// Deviations below this are treated as converged to round-off.
const NOISE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub factors: Vec<usize>,
    /// `deviations[i]`: max population change between refinement i and the
    /// previous run (the base run for i = 0), on the base time grid.
    pub deviations: Vec<f64>,
}

impl ConvergenceReport {
    /// Observed order log₂(d_i/d_{i+1}) for successive factor doublings.
    pub fn observed_orders(&self) -> Vec<f64> {
        self.deviations
            .windows(2)
            .zip(self.factors.windows(2))
            .map(|(d, f)| (d[0] / d[1]).ln() / (f[1] as f64 / f[0] as f64).ln())
            .collect()
    }
}

/// Runs `run(1)` and `run(f)` for each factor and checks that successive
/// deviations decrease. `run(f)` must return a trajectory sampled f times
/// more densely than `run(1)`.
pub fn convergence_sweep_with(
    factors: &[usize],
    run: impl Fn(usize) -> Result<Trajectory>,
) -> Result<ConvergenceReport> {
    if factors.is_empty() || factors.contains(&0) {
        return Err(Error::InvalidArgument("factors must be positive".into()));
    }
    let mut prev = run(1)?;
    let mut prev_factor = 1;
    let mut deviations = Vec::with_capacity(factors.len());
    for &f in factors {
        if f % prev_factor != 0 {
            return Err(Error::InvalidArgument(
                "each factor must be a multiple of the previous".into(),
            ));
        }
        let cur = run(f)?;
        let a = prev.decimate(1);
        let b = cur.decimate(f / prev_factor);
        deviations.push(a.max_population_deviation(&b));
        prev = cur;
        prev_factor = f;
    }
    let bad = deviations
        .windows(2)
        .any(|d| d[1] >= d[0] && d[1] > NOISE_FLOOR);
    if bad {
        return Err(Error::NotConverging(deviations));
    }
    Ok(ConvergenceReport {
        factors: factors.to_vec(),
        deviations,
    })
}

/// FQD refinement study: each factor divides dt and multiplies the
/// frequency-grid density.
pub fn convergence_sweep(config: &ValidatedConfig, factors: &[usize]) -> Result<ConvergenceReport> {
    convergence_sweep_with(factors, |f| {
        let mut c = config.config().clone();
        c.time_grid.dt /= f as f64;
        c.frequency_grid = c.frequency_grid.refined(f);
        let v = validate_config(&c).map_err(Error::Validation)?;
        solve_fqd(&v)
    })
}
