//! Dyadic Green's functions and the coupling spectral densities built from them.

mod free;
mod halfspace;
mod spectral;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::Environment;

pub use free::{free_space_gf, free_space_im_coincident};
pub use halfspace::{
    fresnel, fresnel_coefficients, half_space_scattering_gf, half_space_scattering_gf_with_error,
    SommerfeldOptions,
};
pub use spectral::{
    coupling_strength, spectral_density, spectral_matrix, SpectralDensity, SpectralSet,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Free,
    Scattering,
    Total,
}

/// A 3×3 complex Green's tensor (1/nm) tagged with the part it represents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreensTensor {
    pub value: Matrix3<Complex64>,
    pub part: Part,
}

impl GreensTensor {
    /// μ_a·G·μ_b for real dipoles.
    pub fn project(&self, a: &Vector3<f64>, b: &Vector3<f64>) -> Complex64 {
        let ac = a.map(|v| Complex64::new(v, 0.0));
        let bc = b.map(|v| Complex64::new(v, 0.0));
        (ac.transpose() * self.value * bc)[(0, 0)]
    }
}

/// G(r1, r2, ω) for the requested part. The free part requires r1 ≠ r2.
pub fn greens_tensor(
    env: &Environment,
    r1: &Vector3<f64>,
    r2: &Vector3<f64>,
    omega: Complex64,
    part: Part,
    opts: SommerfeldOptions,
) -> Result<GreensTensor> {
    let value = match part {
        Part::Free => free_space_gf(r1, r2, omega)?,
        Part::Scattering => half_space_scattering_gf_with_error(r1, r2, omega, env, opts)?.0,
        Part::Total => {
            free_space_gf(r1, r2, omega)?
                + half_space_scattering_gf_with_error(r1, r2, omega, env, opts)?.0
        }
    };
    Ok(GreensTensor { value, part })
}

/// Im G(r, r', ω) for real ω, defined also at coincident points where the
/// free part contributes its finite imaginary part (ω/ħc)/(6π)·I.
pub fn im_greens(
    env: &Environment,
    r1: &Vector3<f64>,
    r2: &Vector3<f64>,
    omega: f64,
    part: Part,
    opts: SommerfeldOptions,
) -> Result<Matrix3<f64>> {
    let w = Complex64::new(omega, 0.0);
    let free = || -> Result<Matrix3<f64>> {
        if r1 == r2 {
            Ok(free_space_im_coincident(omega))
        } else {
            Ok(free_space_gf(r1, r2, w)?.map(|z| z.im))
        }
    };
    let sc = || -> Result<Matrix3<f64>> {
        Ok(half_space_scattering_gf_with_error(r1, r2, w, env, opts)?
            .0
            .map(|z| z.im))
    };
    match part {
        Part::Free => free(),
        Part::Scattering => sc(),
        Part::Total => Ok(free()? + sc()?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_is_free_plus_scattering() {
        let env = Environment::plasmonic_default();
        let r1 = Vector3::new(0.0, 0.0, 5.0);
        let r2 = Vector3::new(2.0, 1.0, 3.0);
        let w = Complex64::new(3.2, 0.0);
        let o = SommerfeldOptions::default();
        let f = greens_tensor(&env, &r1, &r2, w, Part::Free, o).unwrap();
        let s = greens_tensor(&env, &r1, &r2, w, Part::Scattering, o).unwrap();
        let t = greens_tensor(&env, &r1, &r2, w, Part::Total, o).unwrap();
        assert_eq!(t.part, Part::Total);
        assert!((t.value - f.value - s.value)
            .iter()
            .all(|z| z.norm() < 1e-15 * t.value.norm()));
    }
}
