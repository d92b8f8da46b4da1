//! Donor/acceptor scenarios above the Drude surface.

use crate::model::{
    Emitter, Environment, FrequencyGrid, Method, SystemConfig, TimeGrid, Tolerances, SCHEMA_VERSION,
};

pub const TRANSITION_EV: f64 = 3.525;
pub const DIPOLE_DEBYE: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// h = 10 nm, d = 4 nm.
    Fig3Weak,
    /// h = 1 nm, d = 1 nm.
    Fig3Strong,
}

impl Preset {
    pub const ALL: [Preset; 2] = [Preset::Fig3Weak, Preset::Fig3Strong];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig3Weak => "fig3-weak",
            Preset::Fig3Strong => "fig3-strong",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    /// Height above the surface and donor-acceptor distance (nm).
    pub fn geometry(self) -> (f64, f64) {
        match self {
            Preset::Fig3Weak => (10.0, 4.0),
            Preset::Fig3Strong => (1.0, 1.0),
        }
    }

    pub fn config(self, method: Method, rwa: bool) -> SystemConfig {
        let (h, d) = self.geometry();
        let mut c = pair_above_surface(h, d, method, rwa);
        if self == Preset::Fig3Strong {
            c.time_grid = TimeGrid {
                t_max: 20.0,
                dt: 0.01,
            };
            c.memory_cutoff = Some(20.0);
        }
        c
    }
}

/// Identical z-polarised pair at height `h`, separated by `d` along x, donor
/// initially excited. Time and memory ranges suit the weak-coupling regime.
pub fn pair_above_surface(h: f64, d: f64, method: Method, rwa: bool) -> SystemConfig {
    let dip = [0.0, 0.0, DIPOLE_DEBYE];
    SystemConfig {
        schema_version: SCHEMA_VERSION,
        emitters: vec![
            Emitter::new([0.0, 0.0, h], TRANSITION_EV, dip),
            Emitter::new([d, 0.0, h], TRANSITION_EV, dip),
        ],
        environment: Environment::plasmonic_default(),
        initial_amplitudes: None,
        method,
        rwa,
        time_grid: TimeGrid {
            t_max: 5000.0,
            dt: 1.0,
        },
        frequency_grid: FrequencyGrid::new(1.0, 7.0, 1201),
        memory_cutoff: Some(300.0),
        oracle_modes: None,
        tolerances: Tolerances::default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_config;

    #[test]
    fn presets_validate() {
        for p in Preset::ALL {
            for rwa in [false, true] {
                assert!(validate_config(&p.config(Method::Fqd, rwa)).is_ok());
            }
            assert_eq!(Preset::from_name(p.name()), Some(p));
        }
        assert_eq!(Preset::from_name("fig2"), None);
    }

    #[test]
    fn geometry_is_placed_above_the_surface() {
        let c = Preset::Fig3Strong.config(Method::Maqd, false);
        assert_eq!(c.emitters[0].position, [0.0, 0.0, 1.0]);
        assert_eq!(c.emitters[1].position, [1.0, 0.0, 1.0]);
        assert_eq!(c.emitters[0].omega, TRANSITION_EV);
    }
}
