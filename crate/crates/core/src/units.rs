//! Unit conventions.
//!
//! Internally ħ = 1: frequencies are stored as photon energies ħω in eV, lengths
//! in nm, and time in units of ħ/eV (≈ 0.658 fs). Dipole moments enter the
//! equations through the combination μ²/(4πε₀), which has units eV·nm³; a
//! dipole given in Debye is therefore stored as μ/√(4πε₀) in √(eV·nm³).
//! With these choices every coupling (decay rates, shifts, dipole-dipole
//! interactions, spectral densities) is a plain energy in eV.

/// ħc in eV·nm.
pub const HBAR_C_EV_NM: f64 = 197.326_980_4;

/// ħ in eV·s.
pub const HBAR_EV_S: f64 = 6.582_119_569e-16;

/// One internal time unit (ħ/eV) in seconds.
pub const TIME_UNIT_S: f64 = HBAR_EV_S;

/// One internal time unit in femtoseconds.
pub const TIME_UNIT_FS: f64 = HBAR_EV_S * 1e15;

const ELEMENTARY_CHARGE_C: f64 = 1.602_176_634e-19;
const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;
const VACUUM_PERMITTIVITY_F_M: f64 = 8.854_187_812_8e-12;

/// 1 D = 10⁻²¹/c C·m.
const DEBYE_C_M: f64 = 1e-21 / SPEED_OF_LIGHT_M_S;

/// D²/(4πε₀) expressed in eV·nm³.
pub fn debye_squared_ev_nm3() -> f64 {
    let joule_m3 = DEBYE_C_M * DEBYE_C_M / (4.0 * std::f64::consts::PI * VACUUM_PERMITTIVITY_F_M);
    joule_m3 / ELEMENTARY_CHARGE_C * 1e27
}

/// Vacuum wavenumber k₀ = ω/c in 1/nm for ħω in eV.
#[inline]
pub fn wavenumber(omega_ev: f64) -> f64 {
    omega_ev / HBAR_C_EV_NM
}

/// Debye → internal dipole unit √(eV·nm³).
pub fn debye_to_internal(mu_debye: f64) -> f64 {
    mu_debye * debye_squared_ev_nm3().sqrt()
}

pub fn internal_to_debye(mu: f64) -> f64 {
    mu / debye_squared_ev_nm3().sqrt()
}

/// Converts a rate in internal units (eV/ħ) to 1/s.
pub fn rate_to_per_second(rate: f64) -> f64 {
    rate / HBAR_EV_S
}

pub fn rate_from_per_second(rate_hz: f64) -> f64 {
    rate_hz * HBAR_EV_S
}

pub fn time_to_seconds(t: f64) -> f64 {
    t * TIME_UNIT_S
}

pub fn time_from_seconds(t_s: f64) -> f64 {
    t_s / TIME_UNIT_S
}

/// Prefactor of the free-space spontaneous emission rate: Γ⁰ = C·|μ|²(ħω)³
/// with |μ| in Debye, ħω in eV and Γ⁰ in internal units.
pub fn vacuum_rate_prefactor() -> f64 {
    4.0 / 3.0 * debye_squared_ev_nm3() / HBAR_C_EV_NM.powi(3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn debye_constant_matches_hand_value() {
        // (3.33564e-30 C·m)² · 8.98755e9 N·m²/C² = 1.0000e-49 J·m³ = 6.2415e-4 eV·nm³
        assert!((debye_squared_ev_nm3() - 6.241_509e-4).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn debye_round_trip(mu in 1e-3f64..1e3) {
            let back = internal_to_debye(debye_to_internal(mu));
            prop_assert!(((back - mu) / mu).abs() < 1e-14);
        }

        #[test]
        fn rate_and_time_round_trip(x in 1e-6f64..1e6) {
            prop_assert!(((rate_from_per_second(rate_to_per_second(x)) - x) / x).abs() < 1e-14);
            prop_assert!(((time_from_seconds(time_to_seconds(x)) - x) / x).abs() < 1e-14);
        }
    }
}
