//! Physical data model and validated simulation configuration.

use std::fmt;

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units;

pub const SCHEMA_VERSION: u32 = 1;

/// Transition dipole as written in a config file. Only real vectors are
/// accepted by validation; the complex form exists so that such input is
/// reported instead of failing to parse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DipoleSpec {
    Real([f64; 3]),
    Complex([[f64; 2]; 3]),
}

impl DipoleSpec {
    fn real_part(&self) -> [f64; 3] {
        match *self {
            DipoleSpec::Real(v) => v,
            DipoleSpec::Complex(c) => [c[0][0], c[1][0], c[2][0]],
        }
    }

    fn has_imaginary_part(&self) -> bool {
        match self {
            DipoleSpec::Real(_) => false,
            DipoleSpec::Complex(c) => c.iter().any(|z| z[1] != 0.0),
        }
    }
}

/// A two-level emitter: position in nm, transition energy ħω in eV, and
/// transition dipole in Debye.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Emitter {
    pub position: [f64; 3],
    pub omega: f64,
    pub dipole: DipoleSpec,
}

impl Emitter {
    pub fn new(position: [f64; 3], omega: f64, dipole_debye: [f64; 3]) -> Self {
        Emitter {
            position,
            omega,
            dipole: DipoleSpec::Real(dipole_debye),
        }
    }

    pub fn pos(&self) -> Vector3<f64> {
        Vector3::from(self.position)
    }

    pub fn dipole_debye(&self) -> Vector3<f64> {
        Vector3::from(self.dipole.real_part())
    }

    /// Dipole in internal units √(eV·nm³), i.e. μ/√(4πε₀).
    pub fn dipole_internal(&self) -> Vector3<f64> {
        self.dipole_debye() * units::debye_to_internal(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Environment {
    Vacuum,
    /// Drude metal filling z < 0, vacuum above; ε_D(ω) = 1 − ω_p²/(ω² + iγω).
    DrudeHalfSpace {
        omega_p: f64,
        gamma: f64,
    },
}

impl Environment {
    /// Drude half-space with ω_p = 5 eV, γ = 0.1 eV (surface plasmon near 3.54 eV).
    pub fn plasmonic_default() -> Self {
        Environment::DrudeHalfSpace {
            omega_p: 5.0,
            gamma: 0.1,
        }
    }

    /// Same damping, but reading the plasma term literally as ω_p² = 5 eV².
    pub fn plasmonic_literal() -> Self {
        Environment::DrudeHalfSpace {
            omega_p: 5f64.sqrt(),
            gamma: 0.1,
        }
    }

    pub fn is_vacuum(&self) -> bool {
        matches!(self, Environment::Vacuum)
    }

    /// Relative permittivity of the lower half-space at complex frequency.
    pub fn permittivity(&self, omega: Complex64) -> Complex64 {
        match *self {
            Environment::Vacuum => Complex64::new(1.0, 0.0),
            Environment::DrudeHalfSpace { omega_p, gamma } => {
                1.0 - omega_p * omega_p / (omega * omega + Complex64::i() * gamma * omega)
            }
        }
    }

    /// Quasi-static surface plasmon frequency ω_p/√2, if any.
    pub fn surface_plasmon_frequency(&self) -> Option<f64> {
        match *self {
            Environment::Vacuum => None,
            Environment::DrudeHalfSpace { omega_p, .. } => Some(omega_p / 2f64.sqrt()),
        }
    }
}

/// ε_D(ω) = 1 − ω_p²/(ω² + iγω) for real ω > 0.
pub fn drude_permittivity(omega_p: f64, gamma: f64, omega: f64) -> Result<Complex64> {
    if !(omega > 0.0) {
        return Err(Error::NonPositiveFrequency(omega));
    }
    let denom = Complex64::new(omega * omega, gamma * omega);
    Ok(1.0 - omega_p * omega_p / denom)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Fqd,
    Maqd,
    Oracle,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::Fqd => "fqd",
            Method::Maqd => "maqd",
            Method::Oracle => "oracle",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub t_max: f64,
    pub dt: f64,
}

impl TimeGrid {
    pub fn n_steps(&self) -> usize {
        (self.t_max / self.dt).round() as usize
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.n_steps()).map(|i| i as f64 * self.dt).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencyGrid {
    pub omega_min: f64,
    pub omega_max: f64,
    pub n_points: usize,
}

impl FrequencyGrid {
    pub fn new(omega_min: f64, omega_max: f64, n_points: usize) -> Self {
        FrequencyGrid {
            omega_min,
            omega_max,
            n_points,
        }
    }

    pub fn spacing(&self) -> f64 {
        (self.omega_max - self.omega_min) / (self.n_points - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.n_points)
            .map(|i| {
                if i + 1 == self.n_points {
                    self.omega_max
                } else {
                    self.omega_min + i as f64 * h
                }
            })
            .collect()
    }

    /// Same span with `factor`× the point density.
    pub fn refined(&self, factor: usize) -> Self {
        FrequencyGrid {
            n_points: (self.n_points - 1) * factor + 1,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Relative tolerance of adaptive quadratures (Sommerfeld and spectral integrals).
    pub quadrature: f64,
    /// Relative tail tolerance for history truncation; `None` keeps the full memory window.
    pub memory: Option<f64>,
    /// Corrector convergence threshold of the Volterra scheme.
    pub corrector: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            quadrature: 1e-8,
            memory: Some(1e-6),
            corrector: 1e-12,
        }
    }
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

/// Simulation configuration as read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub emitters: Vec<Emitter>,
    pub environment: Environment,
    /// Complex initial amplitudes as `[re, im]` pairs; defaults to the first emitter excited.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_amplitudes: Option<Vec<[f64; 2]>>,
    pub method: Method,
    #[serde(default)]
    pub rwa: bool,
    pub time_grid: TimeGrid,
    pub frequency_grid: FrequencyGrid,
    /// Memory window τ_max (ħ/eV); defaults to min(t_max, 10/γ).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub memory_cutoff: Option<f64>,
    /// Number of pseudomode frequencies for the oracle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_modes: Option<usize>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl SystemConfig {
    pub fn n_emitters(&self) -> usize {
        self.emitters.len()
    }

    pub fn initial_state(&self) -> Vec<Complex64> {
        match &self.initial_amplitudes {
            Some(a) => a.iter().map(|z| Complex64::new(z[0], z[1])).collect(),
            None => (0..self.emitters.len())
                .map(|i| {
                    if i == 0 {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect(),
        }
    }

    pub fn memory_window(&self) -> f64 {
        let t_max = self.time_grid.t_max;
        match (self.memory_cutoff, self.environment) {
            (Some(tau), _) => tau.min(t_max),
            (None, Environment::DrudeHalfSpace { gamma, .. }) => t_max.min(10.0 / gamma),
            (None, Environment::Vacuum) => t_max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    NonNormalizedInitialState,
    EmitterBelowInterface,
    EmptyFrequencyGrid,
    NonPositiveStep,
    NonPositiveFrequency,
    ZeroDipole,
    ComplexDipole,
    NoEmitters,
    CoincidentEmitters,
    AmplitudeCountMismatch,
    InvalidEnvironment,
    UnsupportedSchema,
    InvalidTolerance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub path: String,
    pub kind: ViolationKind,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn push(&mut self, path: impl Into<String>, kind: ViolationKind, detail: impl Into<String>) {
        self.violations.push(Violation {
            path: path.into(),
            kind,
            detail: detail.into(),
        });
    }

    pub fn contains(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{}: {:?} ({})", v.path, v.kind, v.detail)?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationReport {}

/// A configuration that satisfied every invariant. Defaults (initial amplitudes)
/// are resolved, so re-validating the inner config yields the same value.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedConfig(SystemConfig);

impl ValidatedConfig {
    pub fn config(&self) -> &SystemConfig {
        &self.0
    }

    pub fn into_inner(self) -> SystemConfig {
        self.0
    }
}

impl std::ops::Deref for ValidatedConfig {
    type Target = SystemConfig;
    fn deref(&self) -> &SystemConfig {
        &self.0
    }
}

pub fn validate_config(
    config: &SystemConfig,
) -> std::result::Result<ValidatedConfig, ValidationReport> {
    let mut report = ValidationReport::default();

    if config.schema_version != SCHEMA_VERSION {
        report.push(
            "schema_version",
            ViolationKind::UnsupportedSchema,
            format!("expected {SCHEMA_VERSION}, got {}", config.schema_version),
        );
    }

    if config.emitters.is_empty() {
        report.push(
            "emitters",
            ViolationKind::NoEmitters,
            "at least one emitter required",
        );
    }

    let half_space = !config.environment.is_vacuum();
    for (i, e) in config.emitters.iter().enumerate() {
        if !(e.omega > 0.0) || !e.omega.is_finite() {
            report.push(
                format!("emitters[{i}].omega"),
                ViolationKind::NonPositiveFrequency,
                format!("{}", e.omega),
            );
        }
        if e.dipole.has_imaginary_part() {
            report.push(
                format!("emitters[{i}].dipole"),
                ViolationKind::ComplexDipole,
                "dipoles must be real vectors",
            );
        }
        let norm = e.dipole_debye().norm();
        if !(norm > 0.0) || !norm.is_finite() {
            report.push(
                format!("emitters[{i}].dipole"),
                ViolationKind::ZeroDipole,
                "|dipole| must be positive",
            );
        }
        if half_space && !(e.position[2] > 0.0) {
            report.push(
                format!("emitters[{i}].position[2]"),
                ViolationKind::EmitterBelowInterface,
                format!("z = {} nm must be above the interface", e.position[2]),
            );
        }
        for j in 0..i {
            if (e.pos() - config.emitters[j].pos()).norm() == 0.0 {
                report.push(
                    format!("emitters[{i}].position"),
                    ViolationKind::CoincidentEmitters,
                    format!("coincides with emitters[{j}]"),
                );
            }
        }
    }

    if let Environment::DrudeHalfSpace { omega_p, gamma } = config.environment {
        if !(omega_p > 0.0) || !(gamma > 0.0) {
            report.push(
                "environment",
                ViolationKind::InvalidEnvironment,
                "omega_p and gamma must be positive",
            );
        }
    }

    let mut resolved = config.clone();
    match &config.initial_amplitudes {
        Some(a) if a.len() != config.emitters.len() => {
            report.push(
                "initial_amplitudes",
                ViolationKind::AmplitudeCountMismatch,
                format!(
                    "{} amplitudes for {} emitters",
                    a.len(),
                    config.emitters.len()
                ),
            );
        }
        Some(a) => {
            let norm: f64 = a.iter().map(|z| z[0] * z[0] + z[1] * z[1]).sum();
            if (norm - 1.0).abs() > 1e-9 {
                report.push(
                    "initial_amplitudes",
                    ViolationKind::NonNormalizedInitialState,
                    format!("sum |C|^2 = {norm}"),
                );
            }
        }
        None => {
            resolved.initial_amplitudes = Some(
                config
                    .initial_state()
                    .iter()
                    .map(|z| [z.re, z.im])
                    .collect(),
            );
        }
    }

    let tg = &config.time_grid;
    if !(tg.dt > 0.0) {
        report.push(
            "time_grid.dt",
            ViolationKind::NonPositiveStep,
            format!("{}", tg.dt),
        );
    }
    if !(tg.t_max > 0.0) {
        report.push(
            "time_grid.t_max",
            ViolationKind::NonPositiveStep,
            format!("{}", tg.t_max),
        );
    }

    let fg = &config.frequency_grid;
    if fg.n_points < 2 || !(fg.omega_max > fg.omega_min) || !(fg.omega_min >= 0.0) {
        report.push(
            "frequency_grid",
            ViolationKind::EmptyFrequencyGrid,
            format!(
                "[{}, {}] with {} points",
                fg.omega_min, fg.omega_max, fg.n_points
            ),
        );
    }

    if let Some(tau) = config.memory_cutoff {
        if !(tau > 0.0) {
            report.push(
                "memory_cutoff",
                ViolationKind::NonPositiveStep,
                format!("{tau}"),
            );
        }
    }
    if let Some(m) = config.oracle_modes {
        if m < 2 {
            report.push(
                "oracle_modes",
                ViolationKind::EmptyFrequencyGrid,
                "need at least 2 modes",
            );
        }
    }
    let tol = &config.tolerances;
    if !(tol.quadrature > 0.0)
        || !(tol.corrector > 0.0)
        || tol.memory.is_some_and(|m| !(m > 0.0 && m < 1.0))
    {
        report.push(
            "tolerances",
            ViolationKind::InvalidTolerance,
            "tolerances must be positive",
        );
    }

    if report.violations.is_empty() {
        Ok(ValidatedConfig(resolved))
    } else {
        Err(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn minimal() -> SystemConfig {
        SystemConfig {
            schema_version: SCHEMA_VERSION,
            emitters: vec![Emitter::new([0.0, 0.0, 10.0], 3.525, [0.0, 0.0, 10.0])],
            environment: Environment::Vacuum,
            initial_amplitudes: None,
            method: Method::Maqd,
            rwa: false,
            time_grid: TimeGrid {
                t_max: 100.0,
                dt: 0.1,
            },
            frequency_grid: FrequencyGrid::new(0.0, 35.0, 1001),
            memory_cutoff: None,
            oracle_modes: None,
            tolerances: Tolerances::default(),
        }
    }

    #[test]
    fn single_vacuum_emitter_is_valid() {
        let v = validate_config(&minimal()).unwrap();
        assert_eq!(v.initial_amplitudes.as_ref().unwrap(), &vec![[1.0, 0.0]]);
    }

    #[test]
    fn emitter_below_interface() {
        let mut c = minimal();
        c.environment = Environment::plasmonic_default();
        c.emitters[0].position[2] = -1.0;
        let r = validate_config(&c).unwrap_err();
        assert!(r.contains(ViolationKind::EmitterBelowInterface));
        assert_eq!(r.violations[0].path, "emitters[0].position[2]");
    }

    #[test]
    fn unnormalized_amplitudes() {
        let mut c = minimal();
        c.emitters
            .push(Emitter::new([4.0, 0.0, 10.0], 3.525, [0.0, 0.0, 10.0]));
        c.initial_amplitudes = Some(vec![[1.0, 0.0], [1.0, 0.0]]);
        let r = validate_config(&c).unwrap_err();
        assert!(r.contains(ViolationKind::NonNormalizedInitialState));
    }

    #[test]
    fn bad_grids_and_steps() {
        let mut c = minimal();
        c.frequency_grid.n_points = 1;
        c.time_grid.dt = 0.0;
        let r = validate_config(&c).unwrap_err();
        assert!(r.contains(ViolationKind::EmptyFrequencyGrid));
        assert!(r.contains(ViolationKind::NonPositiveStep));
    }

    #[test]
    fn complex_dipole_rejected() {
        let mut c = minimal();
        c.emitters[0].dipole = DipoleSpec::Complex([[0.0, 0.0], [0.0, 1.0], [10.0, 0.0]]);
        let r = validate_config(&c).unwrap_err();
        assert!(r.contains(ViolationKind::ComplexDipole));
    }

    #[test]
    fn unknown_keys_rejected() {
        let mut v = serde_json::to_value(minimal()).unwrap();
        v["bogus"] = serde_json::json!(1);
        assert!(serde_json::from_value::<SystemConfig>(v).is_err());
    }

    #[test]
    fn drude_high_frequency_limit() {
        let eps = drude_permittivity(5.0, 0.1, 1e6).unwrap();
        assert!((eps - 1.0).norm() < 1e-10);
        assert!(drude_permittivity(5.0, 0.1, 0.0).is_err());
    }

    #[test]
    fn drude_surface_plasmon_condition() {
        let eps = drude_permittivity(5.0, 0.1, 5.0 / 2f64.sqrt()).unwrap();
        // Re ε = 1 − 25/(12.5 + 0.01) to O(γ²/ω²)
        assert!((eps.re + 1.0).abs() < 2e-3);
    }

    #[test]
    fn drude_hand_value() {
        // 25/(1 + 0.1i) = 25(1 − 0.1i)/1.01 = 24.752475… − 2.4752475…i
        let eps = drude_permittivity(5.0, 0.1, 1.0).unwrap();
        assert!((eps.re - (1.0 - 25.0 / 1.01)).abs() < 1e-13);
        assert!((eps.im - 2.5 / 1.01).abs() < 1e-13);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn drude_is_passive(wp in 1e-3f64..50.0, g in 1e-4f64..5.0, w in 1e-3f64..100.0) {
            prop_assert!(drude_permittivity(wp, g, w).unwrap().im > 0.0);
        }
    }

    proptest! {
        #[test]
        fn validation_is_idempotent(z in -5.0f64..5.0, dt in -1.0f64..1.0, drude in any::<bool>()) {
            let mut c = minimal();
            c.emitters[0].position[2] = z;
            c.time_grid.dt = dt;
            if drude { c.environment = Environment::plasmonic_default(); }
            let first = validate_config(&c);
            if let Ok(v) = &first {
                let second = validate_config(v.config()).unwrap();
                prop_assert_eq!(&second, v);
            } else {
                prop_assert_eq!(validate_config(&c).unwrap_err(), first.unwrap_err());
            }
        }
    }
}
