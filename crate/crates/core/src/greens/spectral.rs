//! Spectral densities J_αβ(ω) = 4k²·μ_α·Im G(r_α, r_β, ω)·μ_β (eV, with
//! dipoles in √(eV·nm³)); Γ = 2πJ on resonance.

use rayon::prelude::*;

use super::{im_greens, Part, SommerfeldOptions};
use crate::error::Result;
use crate::model::{Emitter, Environment};
use crate::units::HBAR_C_EV_NM;

/// J_ab(ω) at a single real frequency. Returns 0 at ω = 0.
pub fn coupling_strength(
    a: &Emitter,
    b: &Emitter,
    omega: f64,
    env: &Environment,
    part: Part,
    opts: SommerfeldOptions,
) -> Result<f64> {
    if omega == 0.0 || (part == Part::Scattering && env.is_vacuum()) {
        return Ok(0.0);
    }
    let im = im_greens(env, &a.pos(), &b.pos(), omega, part, opts)?;
    let k = omega / HBAR_C_EV_NM;
    let (ma, mb) = (a.dipole_internal(), b.dipole_internal());
    Ok(4.0 * k * k * ma.dot(&(im * mb)))
}

/// Tabulated J_αβ on a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDensity {
    pub alpha: usize,
    pub beta: usize,
    pub part: Part,
    pub omegas: Vec<f64>,
    pub values: Vec<f64>,
}

pub fn spectral_density(
    emitters: &[Emitter],
    alpha: usize,
    beta: usize,
    omegas: &[f64],
    env: &Environment,
    part: Part,
    opts: SommerfeldOptions,
) -> Result<SpectralDensity> {
    let (a, b) = (&emitters[alpha], &emitters[beta]);
    let values = omegas
        .par_iter()
        .map(|&w| coupling_strength(a, b, w, env, part, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralDensity {
        alpha,
        beta,
        part,
        omegas: omegas.to_vec(),
        values,
    })
}

/// The full symmetric matrix of spectral densities on one grid:
/// `values[a][b][i]` = J_ab(ω_i).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSet {
    pub omegas: Vec<f64>,
    pub values: Vec<Vec<Vec<f64>>>,
}

impl SpectralSet {
    pub fn n_emitters(&self) -> usize {
        self.values.len()
    }

    /// Builds a set from a model function J(a, b, ω); the function is only
    /// called for a ≤ b.
    pub fn from_fn(n: usize, omegas: &[f64], f: impl Fn(usize, usize, f64) -> f64) -> Self {
        let mut values = vec![vec![Vec::new(); n]; n];
        for a in 0..n {
            for b in a..n {
                let v: Vec<f64> = omegas.iter().map(|&w| f(a, b, w)).collect();
                values[b][a] = v.clone();
                values[a][b] = v;
            }
        }
        SpectralSet {
            omegas: omegas.to_vec(),
            values,
        }
    }

    pub fn zeros(n: usize, omegas: &[f64]) -> Self {
        Self::from_fn(n, omegas, |_, _, _| 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().flatten().flatten().all(|&v| v == 0.0)
    }

    pub fn get(&self, a: usize, b: usize) -> &[f64] {
        &self.values[a][b]
    }
}

/// Tabulates J_ab for all pairs a ≤ b in parallel over (pair, frequency).
pub fn spectral_matrix(
    emitters: &[Emitter],
    omegas: &[f64],
    env: &Environment,
    part: Part,
    opts: SommerfeldOptions,
) -> Result<SpectralSet> {
    let n = emitters.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a..n).map(move |b| (a, b))).collect();
    let jobs: Vec<(usize, usize)> = (0..pairs.len())
        .flat_map(|p| (0..omegas.len()).map(move |i| (p, i)))
        .collect();
    let flat = jobs
        .par_iter()
        .map(|&(p, i)| {
            let (a, b) = pairs[p];
            coupling_strength(&emitters[a], &emitters[b], omegas[i], env, part, opts)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut values = vec![vec![Vec::new(); n]; n];
    for (p, &(a, b)) in pairs.iter().enumerate() {
        let v = flat[p * omegas.len()..(p + 1) * omegas.len()].to_vec();
        values[b][a] = v.clone();
        values[a][b] = v;
    }
    Ok(SpectralSet {
        omegas: omegas.to_vec(),
        values,
    })
}
