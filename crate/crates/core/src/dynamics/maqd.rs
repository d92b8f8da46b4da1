use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::Trajectory;
use crate::error::{Error, Result};
use crate::model::{TimeGrid, ValidatedConfig};
use crate::weak::WeakCouplingReport;

/// Generator H of dx/dt = −iHx for x_α = C_α·e^{−i(ω_α−ω̄)t}, where ω̄ is the
/// mean transition frequency. The diagonal holds the shifted, damped
/// energies; the off-diagonal V_DDI (or Ṽ_DDI under the RWA).
pub fn maqd_generator(
    transition: &[f64],
    report: &WeakCouplingReport,
    rwa: bool,
) -> Result<DMatrix<Complex64>> {
    let n = transition.len();
    if report.emitters.len() != n {
        return Err(Error::InvalidArgument(format!(
            "report covers {} emitters, expected {n}",
            report.emitters.len()
        )));
    }
    let mean = transition.iter().sum::<f64>() / n as f64;
    let mut h = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for a in 0..n {
        let r = &report.emitters[a];
        let mut shift = r.shift_excited;
        if !rwa {
            shift += (0..n)
                .filter(|&b| b != a)
                .map(|b| report.emitters[b].shift_ground)
                .sum::<f64>();
        }
        h[(a, a)] = Complex64::new(transition[a] - mean + shift, -0.5 * r.gamma);
        for b in (0..n).filter(|&b| b != a) {
            let p = report
                .pair(a, b)
                .ok_or_else(|| Error::InvalidArgument(format!("missing pair ({a}, {b})")))?;
            h[(a, b)] = if rwa { p.v_ddi_rwa() } else { p.v_ddi() };
        }
    }
    Ok(h)
}

/// Markovian dynamics by matrix exponential of the constant generator,
/// evaluated independently at every output time.
pub fn propagate_maqd(
    transition: &[f64],
    report: &WeakCouplingReport,
    rwa: bool,
    initial: &[Complex64],
    grid: &TimeGrid,
) -> Result<Trajectory> {
    let n = transition.len();
    let h = maqd_generator(transition, report, rwa)?;
    let mean = transition.iter().sum::<f64>() / n as f64;
    let x0 = DVector::from_column_slice(initial);
    let times = grid.times();
    let mut amps = vec![Vec::with_capacity(times.len()); n];
    let minus_i = Complex64::new(0.0, -1.0);
    for &t in &times {
        let x = (&h * (minus_i * t)).exp() * &x0;
        for a in 0..n {
            let c = x[a] * Complex64::from_polar(1.0, (transition[a] - mean) * t);
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::NonFiniteAmplitude(a));
            }
            amps[a].push(c);
        }
    }
    Ok(Trajectory::new(times, amps))
}

pub fn solve_maqd(config: &ValidatedConfig, report: &WeakCouplingReport) -> Result<Trajectory> {
    let transition: Vec<f64> = config.emitters.iter().map(|e| e.omega).collect();
    propagate_maqd(
        &transition,
        report,
        config.rwa,
        &config.initial_state(),
        &config.time_grid,
    )
}
