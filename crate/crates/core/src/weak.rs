//! Markov-regime observables: decay rates, scattering energy shifts and the
//! dipole-dipole couplings V_RDDI, V_ORC, V_QC.

use std::f64::consts::PI;

use nalgebra::Vector3;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::greens::{
    coupling_strength, free_space_gf, greens_tensor, half_space_scattering_gf_with_error,
    GreensTensor, Part, SommerfeldOptions,
};
use crate::model::{Emitter, Environment};
use crate::quadrature::{integrate, integrate_breaks, integrate_to_infinity, QuadOptions};
use crate::special::aux_integrals;
use crate::units::{vacuum_rate_prefactor, HBAR_C_EV_NM};

/// How I(ω′) = ∫₀^∞ J(ω)/(ω + ω′) dω is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegralMethod {
    /// Quadrature along real frequencies.
    RealAxis,
    /// Rotation onto the imaginary frequency axis, where G is real and decays.
    ImagAxis,
    /// Closed form in trigonometric integrals (free space only); the
    /// scattering part, if requested, is taken on the imaginary axis.
    ClosedForm,
}

#[derive(Debug, Clone, Copy)]
pub struct WeakOptions {
    pub sommerfeld: SommerfeldOptions,
    /// Relative tolerance of the frequency (or κ) quadratures.
    pub rel_tol: f64,
}

impl Default for WeakOptions {
    fn default() -> Self {
        WeakOptions {
            sommerfeld: SommerfeldOptions {
                rel_tol: 1e-10,
                max_panels: 4000,
            },
            rel_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftState {
    Excited,
    Ground,
}

/// Free-space spontaneous emission rate Γ⁰ = (4/3)k³|μ|² (eV/ħ).
pub fn gamma0(e: &Emitter) -> f64 {
    vacuum_rate_prefactor() * e.dipole_debye().norm_squared() * e.omega.powi(3)
}

/// Γ_α = 8πk²·μ·Im G(r_α, r_α, ω_α)·μ including the scattering part.
pub fn decay_rate(e: &Emitter, env: &Environment, opts: &WeakOptions) -> Result<f64> {
    Ok(2.0 * PI * coupling_strength(e, e, e.omega, env, Part::Total, opts.sommerfeld)?)
}

fn mu(e: &Emitter) -> Vector3<f64> {
    e.dipole_internal()
}

/// V_RDDI,ab = −4πk_b²·μ_a·G(r_a, r_b, ω_b)·μ_b.
pub fn v_rddi(
    a: &Emitter,
    b: &Emitter,
    env: &Environment,
    part: Part,
    opts: &WeakOptions,
) -> Result<Complex64> {
    let w = Complex64::new(b.omega, 0.0);
    let g = greens_tensor(env, &a.pos(), &b.pos(), w, part, opts.sommerfeld)?;
    let k = b.omega / HBAR_C_EV_NM;
    Ok(-4.0 * PI * k * k * g.project(&mu(a), &mu(b)))
}

/// Non-retarded Coulomb coupling [μ_a·μ_b − 3(μ_a·n)(μ_b·n)]/R³.
pub fn short_distance_ddi(a: &Emitter, b: &Emitter) -> Result<f64> {
    let d = a.pos() - b.pos();
    let r = d.norm();
    if r == 0.0 {
        return Err(Error::CoincidentPointsFullTensor);
    }
    let n = d / r;
    let (ma, mb) = (mu(a), mu(b));
    Ok((ma.dot(&mb) - 3.0 * ma.dot(&n) * mb.dot(&n)) / r.powi(3))
}

/// Closed-form free-space I⁰(ω′) in terms of the auxiliary integrals 𝓘₁..𝓘₃.
pub fn free_space_i0(a: &Emitter, b: &Emitter, omega_prime: f64) -> Result<f64> {
    if !(omega_prime > 0.0) {
        return Err(Error::NonPositiveFrequency(omega_prime));
    }
    let d = a.pos() - b.pos();
    let r = d.norm();
    if r == 0.0 {
        return Err(Error::CoincidentPointsFullTensor);
    }
    let n = d / r;
    let (ma, mb) = (mu(a), mu(b));
    let kp = omega_prime / HBAR_C_EV_NM;
    let xp = kp * r;
    let mm = ma.dot(&mb);
    let mn = ma.dot(&n) * mb.dot(&n);
    let (i1, i2, i3) = aux_integrals(xp);
    Ok(-(kp / (PI * r * r)) * ((mm - mn) * i1 + (mm - 3.0 * mn) * (i2 + i3)))
}

/// −∫₀^∞ dκ 4ω′(κ/ħc)²·μ_a·G(iκ)·μ_b/(κ² + ω′²) for the free or scattering part.
fn imag_axis_integral(
    a: &Emitter,
    b: &Emitter,
    omega_prime: f64,
    env: &Environment,
    part: Part,
    opts: &WeakOptions,
) -> Result<f64> {
    let (ra, rb) = (a.pos(), b.pos());
    let (ma, mb) = (mu(a), mu(b));
    let scale = match part {
        Part::Free => HBAR_C_EV_NM / (ra - rb).norm(),
        _ => omega_prime.max(env.surface_plasmon_frequency().unwrap_or(omega_prime)),
    };
    // Beyond κ·(z_a + z_b)/ħc ≈ 60 the reflected field is below e^{-60}.
    let kappa_max = match part {
        Part::Free => f64::INFINITY,
        _ => 60.0 * HBAR_C_EV_NM / (ra.z + rb.z),
    };
    let mut failure = None;
    let mut integrand = |kappa: f64| {
        if kappa == 0.0 || failure.is_some() {
            return 0.0;
        }
        let w = Complex64::new(0.0, kappa);
        let g = match part {
            Part::Free => free_space_gf(&ra, &rb, w),
            _ => {
                half_space_scattering_gf_with_error(&ra, &rb, w, env, opts.sommerfeld).map(|x| x.0)
            }
        };
        match g {
            Ok(g) => {
                let proj = GreensTensor { value: g, part }.project(&ma, &mb).re;
                let k = kappa / HBAR_C_EV_NM;
                -4.0 * omega_prime * k * k * proj / (kappa * kappa + omega_prime * omega_prime)
            }
            Err(e) => {
                failure = Some(e);
                0.0
            }
        }
    };
    let qopts = QuadOptions::rel(opts.rel_tol).with_abs(1e-300);
    let q = if kappa_max.is_finite() {
        let mut breaks = vec![0.0, scale.min(kappa_max), kappa_max];
        breaks.dedup();
        integrate_breaks(&mut integrand, &breaks, qopts)?
    } else {
        integrate_to_infinity(&mut integrand, 0.0, scale, qopts)?
    };
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(q.value)
}

/// Free-space real-axis I(ω′): quadrature over [0, Ω] and the remaining
/// tail rotated onto vertical contours Ω ± iy, where the two analytic
/// halves of Im G₀ = (G₀(ω) − G₀(−ω))/2i decay.
fn free_real_axis_integral(
    a: &Emitter,
    b: &Emitter,
    omega_prime: f64,
    opts: &WeakOptions,
) -> Result<f64> {
    let (ra, rb) = (a.pos(), b.pos());
    let (ma, mb) = (mu(a), mu(b));
    let r = (ra - rb).norm();
    if r == 0.0 {
        return Err(Error::CoincidentPointsFullTensor);
    }
    let proj = |w: Complex64| -> Complex64 {
        match free_space_gf(&ra, &rb, w) {
            Ok(g) => GreensTensor {
                value: g,
                part: Part::Free,
            }
            .project(&ma, &mb),
            Err(_) => Complex64::new(0.0, 0.0),
        }
    };
    let big = 2.0 * omega_prime.max(HBAR_C_EV_NM / r);
    let qo = QuadOptions::rel(opts.rel_tol).with_abs(1e-300);
    let head = integrate(
        |w: f64| {
            if w == 0.0 {
                return 0.0;
            }
            let k = w / HBAR_C_EV_NM;
            4.0 * k * k * proj(Complex64::new(w, 0.0)).im / (w + omega_prime)
        },
        0.0,
        big,
        qo,
    )?;
    // F±(ω) = 4k²·μG₀(±ω)μ/(2i(ω + ω′)); ∫_Ω^∞ (F₊ − F₋) dω.
    let f_half = |w: Complex64, sign: f64| -> Complex64 {
        let k = w / HBAR_C_EV_NM;
        4.0 * k * k * proj(w * sign) / (Complex64::new(0.0, 2.0) * (w + omega_prime))
    };
    let decay = HBAR_C_EV_NM / r;
    let up = integrate_to_infinity(
        |y: f64| (Complex64::i() * f_half(Complex64::new(big, y), 1.0)).re,
        0.0,
        decay,
        qo,
    )?;
    let down = integrate_to_infinity(
        |y: f64| (-Complex64::i() * f_half(Complex64::new(big, -y), -1.0)).re,
        0.0,
        decay,
        qo,
    )?;
    Ok(head.value + up.value - down.value)
}

/// Power-law extrapolation of ∫_Ω^∞ J(ω)/(ω + s·ω₀) dω from two samples of J.
fn power_law_tail(j_hi: f64, j_mid: f64, big: f64, mid: f64, shift: f64) -> Result<f64> {
    if j_hi == 0.0 {
        return Ok(0.0);
    }
    let p = if j_mid != 0.0 && j_mid.signum() == j_hi.signum() {
        -(j_hi.abs() / j_mid.abs()).ln() / (big / mid).ln()
    } else {
        0.0
    };
    if p <= 0.1 {
        return Err(Error::TailNotConverged {
            tail: f64::INFINITY,
            value: j_hi,
        });
    }
    let q = integrate_to_infinity(
        |w: f64| j_hi * (big / w).powf(p) / (w + shift),
        big,
        big,
        QuadOptions::rel(1e-10),
    )?;
    Ok(q.value)
}

fn cutoff(omega: f64, env: &Environment) -> f64 {
    match env {
        Environment::Vacuum => 10.0 * omega,
        Environment::DrudeHalfSpace { omega_p, .. } => (10.0 * omega).max(5.0 * omega_p),
    }
}

/// Scattering real-axis I(ω′) by adaptive quadrature of J^Sc up to
/// Ω = max(10ω′, 5ω_p) plus a power-law tail.
fn scattering_real_axis_integral(
    a: &Emitter,
    b: &Emitter,
    omega_prime: f64,
    env: &Environment,
    opts: &WeakOptions,
) -> Result<f64> {
    let Some(wsp) = env.surface_plasmon_frequency() else {
        return Ok(0.0);
    };
    let big = cutoff(omega_prime, env);
    let j = |w: f64| coupling_strength(a, b, w, env, Part::Scattering, opts.sommerfeld);
    let mut failure = None;
    let mut breaks = vec![0.0];
    for d in [-0.5, -0.1, 0.0, 0.1, 0.5] {
        let x = wsp + d;
        if x > 0.0 && x < big {
            breaks.push(x);
        }
    }
    breaks.push(big);
    let q = integrate_breaks(
        |w: f64| match j(w) {
            Ok(v) => v / (w + omega_prime),
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        &breaks,
        QuadOptions::rel(opts.rel_tol).with_abs(1e-300),
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let tail = power_law_tail(j(big)?, j(0.5 * big)?, big, 0.5 * big, omega_prime)?;
    if tail.abs() > 0.05 * q.value.abs() {
        return Err(Error::TailNotConverged {
            tail,
            value: q.value,
        });
    }
    Ok(q.value + tail)
}

/// I(ω′) = ∫₀^∞ J_ab(ω)/(ω + ω′) dω for the requested part of G.
pub fn integral_i(
    a: &Emitter,
    b: &Emitter,
    omega_prime: f64,
    env: &Environment,
    part: Part,
    method: IntegralMethod,
    opts: &WeakOptions,
) -> Result<f64> {
    if !(omega_prime > 0.0) {
        return Err(Error::NonPositiveFrequency(omega_prime));
    }
    let free = || -> Result<f64> {
        match method {
            IntegralMethod::ClosedForm => free_space_i0(a, b, omega_prime),
            IntegralMethod::ImagAxis => {
                if a.pos() == b.pos() {
                    return Err(Error::CoincidentPointsFullTensor);
                }
                imag_axis_integral(a, b, omega_prime, env, Part::Free, opts)
            }
            IntegralMethod::RealAxis => free_real_axis_integral(a, b, omega_prime, opts),
        }
    };
    let scattering = || -> Result<f64> {
        if env.is_vacuum() {
            return Ok(0.0);
        }
        match method {
            IntegralMethod::RealAxis => scattering_real_axis_integral(a, b, omega_prime, env, opts),
            _ => imag_axis_integral(a, b, omega_prime, env, Part::Scattering, opts),
        }
    };
    match part {
        Part::Free => free(),
        Part::Scattering => scattering(),
        Part::Total => Ok(free()? + scattering()?),
    }
}

/// V_ORC,ab = I(ω_b) − I(ω_a); exactly zero on resonance.
pub fn v_orc(
    a: &Emitter,
    b: &Emitter,
    env: &Environment,
    part: Part,
    opts: &WeakOptions,
) -> Result<f64> {
    if a.omega == b.omega {
        return Ok(0.0);
    }
    let m = IntegralMethod::ClosedForm;
    Ok(integral_i(a, b, b.omega, env, part, m, opts)?
        - integral_i(a, b, a.omega, env, part, m, opts)?)
}

/// V_QC,ab = I(ω_b).
pub fn v_qc(
    a: &Emitter,
    b: &Emitter,
    env: &Environment,
    part: Part,
    opts: &WeakOptions,
) -> Result<f64> {
    integral_i(a, b, b.omega, env, part, IntegralMethod::ClosedForm, opts)
}

/// Scattering (Casimir–Polder) shift of the excited or ground state.
///
/// Ground: Δ_g = −∫ J^Sc/(ω + ω_α) = −I^Sc(ω_α), taken on the imaginary axis.
/// Excited: by the Kramers–Kronig relation for k²G_Sc,
/// −P∫ J^Sc/(ω − ω_α) = −4πk_α²·μ·Re G_Sc(ω_α)·μ + I^Sc(ω_α).
pub fn energy_shift_scattering(
    e: &Emitter,
    env: &Environment,
    state: ShiftState,
    opts: &WeakOptions,
) -> Result<f64> {
    if env.is_vacuum() {
        return Ok(0.0);
    }
    let i_sc = integral_i(
        e,
        e,
        e.omega,
        env,
        Part::Scattering,
        IntegralMethod::ImagAxis,
        opts,
    )?;
    match state {
        ShiftState::Ground => Ok(-i_sc),
        ShiftState::Excited => Ok(v_rddi(e, e, env, Part::Scattering, opts)?.re + i_sc),
    }
}

/// −P∫ J(ω)/(ω − ω₀) dω (excited) or −∫ J(ω)/(ω + ω₀) dω (ground) from a
/// tabulation, by pole subtraction with a power-law tail beyond the grid.
pub fn energy_shift_tabulated(
    omegas: &[f64],
    values: &[f64],
    omega0: f64,
    state: ShiftState,
) -> Result<f64> {
    let n = omegas.len();
    if n < 3 || values.len() != n {
        return Err(Error::InvalidArgument(
            "tabulation needs at least 3 points".into(),
        ));
    }
    let hi = omegas[n - 1];
    let mid_idx = omegas.partition_point(|&w| w < 0.5 * hi).min(n - 2);
    let tail_of =
        |shift: f64| power_law_tail(values[n - 1], values[mid_idx], hi, omegas[mid_idx], shift);
    match state {
        ShiftState::Ground => {
            let body = trapezoid(omegas, |i| values[i] / (omegas[i] + omega0));
            Ok(-(body + tail_of(omega0)?))
        }
        ShiftState::Excited => Ok(-(principal_value(omegas, values, omega0)? + tail_of(-omega0)?)),
    }
}

/// P∫ f(ω)/(ω − ω₀) dω over the tabulated range by pole subtraction:
/// ∫ (f − f(ω₀))/(ω − ω₀) dω + f(ω₀)·ln|(ω_max − ω₀)/(ω_min − ω₀)|, with the
/// removable point filled by a central-difference slope.
pub fn principal_value(omegas: &[f64], values: &[f64], omega0: f64) -> Result<f64> {
    let n = omegas.len();
    let (lo, hi) = (omegas[0], omegas[n - 1]);
    if !(omega0 > lo && omega0 < hi) {
        return Err(Error::GridDoesNotEncloseResonance {
            omega: omega0,
            omega_min: lo,
            omega_max: hi,
        });
    }
    let k = omegas.partition_point(|&w| w <= omega0).clamp(1, n - 1);
    let (w0, w1) = (omegas[k - 1], omegas[k]);
    let t = (omega0 - w0) / (w1 - w0);
    let f0 = values[k - 1] * (1.0 - t) + values[k] * t;
    let slope = {
        let (a, b) = (k.saturating_sub(2), (k + 1).min(n - 1));
        (values[b] - values[a]) / (omegas[b] - omegas[a])
    };
    let h = w1 - w0;
    let body = trapezoid(omegas, |i| {
        let dw = omegas[i] - omega0;
        if dw.abs() < 1e-9 * h {
            slope
        } else {
            (values[i] - f0) / dw
        }
    });
    Ok(body + f0 * ((hi - omega0) / (omega0 - lo)).abs().ln())
}

fn trapezoid(x: &[f64], f: impl Fn(usize) -> f64) -> f64 {
    (1..x.len())
        .map(|i| 0.5 * (x[i] - x[i - 1]) * (f(i) + f(i - 1)))
        .sum()
}

/// Per-emitter Markov quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmitterRates {
    pub gamma0: f64,
    pub gamma: f64,
    pub shift_excited: f64,
    pub shift_ground: f64,
}

/// Per ordered pair couplings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairCoupling {
    pub alpha: usize,
    pub beta: usize,
    pub v_rddi: Complex64,
    pub v_orc: f64,
    pub v_qc: f64,
}

impl PairCoupling {
    pub fn v_ddi(&self) -> Complex64 {
        self.v_rddi + self.v_orc
    }

    pub fn v_ddi_rwa(&self) -> Complex64 {
        self.v_rddi + self.v_qc
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakCouplingReport {
    pub part: Part,
    pub emitters: Vec<EmitterRates>,
    pub pairs: Vec<PairCoupling>,
}

impl WeakCouplingReport {
    pub fn pair(&self, alpha: usize, beta: usize) -> Option<&PairCoupling> {
        self.pairs
            .iter()
            .find(|p| p.alpha == alpha && p.beta == beta)
    }
}

pub fn pair_coupling(
    emitters: &[Emitter],
    alpha: usize,
    beta: usize,
    env: &Environment,
    part: Part,
    opts: &WeakOptions,
) -> Result<PairCoupling> {
    let (a, b) = (&emitters[alpha], &emitters[beta]);
    Ok(PairCoupling {
        alpha,
        beta,
        v_rddi: v_rddi(a, b, env, part, opts)?,
        v_orc: v_orc(a, b, env, part, opts)?,
        v_qc: v_qc(a, b, env, part, opts)?,
    })
}

/// All Markov quantities. With `part = Free` the rates are Γ⁰ and the
/// shifts vanish; otherwise the scattering contributions are included.
pub fn weak_coupling_report(
    emitters: &[Emitter],
    env: &Environment,
    part: Part,
    opts: &WeakOptions,
) -> Result<WeakCouplingReport> {
    let rates = emitters
        .par_iter()
        .map(|e| -> Result<EmitterRates> {
            let g0 = gamma0(e);
            if part == Part::Free {
                return Ok(EmitterRates {
                    gamma0: g0,
                    gamma: g0,
                    shift_excited: 0.0,
                    shift_ground: 0.0,
                });
            }
            let gsc = 2.0
                * PI
                * coupling_strength(e, e, e.omega, env, Part::Scattering, opts.sommerfeld)?;
            let gamma = if part == Part::Total { g0 + gsc } else { gsc };
            Ok(EmitterRates {
                gamma0: g0,
                gamma,
                shift_excited: energy_shift_scattering(e, env, ShiftState::Excited, opts)?,
                shift_ground: energy_shift_scattering(e, env, ShiftState::Ground, opts)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let n = emitters.len();
    let idx: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)))
        .collect();
    let pairs = idx
        .par_iter()
        .map(|&(a, b)| pair_coupling(emitters, a, b, env, part, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(WeakCouplingReport {
        part,
        emitters: rates,
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::rate_to_per_second;

    fn pair_at(xp: f64, omega: f64, dip: [f64; 3]) -> (Emitter, Emitter) {
        let r = xp * HBAR_C_EV_NM / omega;
        (
            Emitter::new([0.0, 0.0, 10.0], omega, dip),
            Emitter::new([r, 0.0, 10.0], omega, dip),
        )
    }

    #[test]
    fn vacuum_rate_hand_value() {
        // μ = 10 D = 3.335641e-29 C·m, ω = 3.525 eV/ħ = 5.355418e15 s⁻¹,
        // μ²ω³/(3πε₀ħc³) = 7.207432e8 s⁻¹
        let e = Emitter::new([0.0, 0.0, 1.0], 3.525, [0.0, 0.0, 10.0]);
        let g = rate_to_per_second(gamma0(&e));
        assert!((g - 7.207_432e8).abs() < 1e-6 * 7.207_432e8, "{g:e}");
        let direct = decay_rate(&e, &Environment::Vacuum, &WeakOptions::default()).unwrap();
        assert!((direct - gamma0(&e)).abs() < 1e-12 * direct);
    }

    #[test]
    fn rate_approaches_vacuum_far_from_surface() {
        let env = Environment::plasmonic_default();
        let o = WeakOptions::default();
        let e = |z: f64| Emitter::new([0.0, 0.0, z], 3.525, [0.0, 0.0, 10.0]);
        let ratio = |z: f64| decay_rate(&e(z), &env, &o).unwrap() / gamma0(&e(z));
        assert!(ratio(10.0) > 10.0);
        assert!((ratio(2000.0) - 1.0).abs() < 0.2);
        assert!((ratio(2000.0) - 1.0).abs() < (ratio(200.0) - 1.0).abs());
    }

    #[test]
    fn coulomb_limit_parallel_and_collinear() {
        let (a, b) = pair_at(1e-3, 3.0, [0.0, 0.0, 5.0]);
        let o = WeakOptions::default();
        let c = short_distance_ddi(&a, &b).unwrap();
        let v = v_rddi(&a, &b, &Environment::Vacuum, Part::Free, &o).unwrap();
        assert!(((v.re - c) / c).abs() < 1e-5);
        let (a, b) = pair_at(1e-3, 3.0, [5.0, 0.0, 0.0]);
        let v = v_rddi(&a, &b, &Environment::Vacuum, Part::Free, &o).unwrap();
        let mu2 = a.dipole_internal().norm_squared();
        let r = (a.pos() - b.pos()).norm();
        assert!(((v.re + 2.0 * mu2 / r.powi(3)) / v.re).abs() < 1e-5);
    }

    #[test]
    fn magic_angle_vanishes() {
        let th = (1.0f64 / 3.0).sqrt().acos();
        let d = [th.cos() * 4.0, th.sin() * 4.0, 0.0];
        let (a, b) = pair_at(0.01, 3.0, d);
        assert!(short_distance_ddi(&a, &b).unwrap().abs() < 1e-12);
    }

    #[test]
    fn orc_vanishes_on_resonance_and_is_small_off_resonance() {
        let (a, mut b) = pair_at(0.05, 3.0, [0.0, 0.0, 5.0]);
        let o = WeakOptions::default();
        assert_eq!(
            v_orc(&a, &b, &Environment::Vacuum, Part::Free, &o).unwrap(),
            0.0
        );
        b.omega = 3.03;
        let orc = v_orc(&a, &b, &Environment::Vacuum, Part::Free, &o).unwrap();
        let qc = v_qc(&a, &b, &Environment::Vacuum, Part::Free, &o).unwrap();
        assert!(orc != 0.0 && orc.abs() < 0.05 * qc.abs());
    }

    #[test]
    fn qc_is_minus_half_coulomb_in_near_field() {
        let (a, b) = pair_at(1e-3, 3.0, [0.0, 0.0, 5.0]);
        let o = WeakOptions::default();
        let qc = v_qc(&a, &b, &Environment::Vacuum, Part::Free, &o).unwrap();
        let c = short_distance_ddi(&a, &b).unwrap();
        assert!(((qc + 0.5 * c) / c).abs() < 5e-3);
    }

    #[test]
    fn closed_form_matches_imaginary_axis() {
        let o = WeakOptions::default();
        for &xp in &[1e-3, 0.03, 0.5, 2.0, 10.0] {
            let (a, b) = pair_at(xp, 2.5, [1.0, 2.0, 3.0]);
            let c = free_space_i0(&a, &b, a.omega).unwrap();
            let n = integral_i(
                &a,
                &b,
                a.omega,
                &Environment::Vacuum,
                Part::Free,
                IntegralMethod::ImagAxis,
                &o,
            )
            .unwrap();
            assert!(((c - n) / c).abs() < 1e-8, "x' = {xp}: {c} vs {n}");
        }
    }

    #[test]
    fn integral_vanishes_for_large_frequency() {
        let (a, b) = pair_at(0.1, 3.0, [0.0, 0.0, 5.0]);
        let i = |w: f64| free_space_i0(&a, &b, w).unwrap().abs();
        assert!(i(3e5) < 1e-3 * i(3.0));
    }

    #[test]
    fn pole_subtraction_constant_profile() {
        let omegas: Vec<f64> = (0..=200).map(|i| 1.0 + 0.01 * i as f64).collect();
        let flat = vec![2.0; omegas.len()];
        let centred = principal_value(&omegas, &flat, 2.0).unwrap();
        assert!(centred.abs() < 1e-13);
        let off = principal_value(&omegas, &flat, 1.37).unwrap();
        assert!((off - 2.0 * (1.63f64 / 0.37).ln()).abs() < 1e-12);
    }

    #[test]
    fn pole_subtraction_with_tail() {
        let omegas: Vec<f64> = (0..=200).map(|i| 1.0 + 0.01 * i as f64).collect();
        let decaying: Vec<f64> = omegas.iter().map(|w| 1.0 / (w * w * w)).collect();
        // 1/(w³(w−2)) has antiderivative ln|w−2|/8 − ln w/8 + 1/(4w) + 1/(4w²),
        // so P∫₁^∞ = −1/2.
        let got = energy_shift_tabulated(&omegas, &decaying, 2.0, ShiftState::Excited).unwrap();
        assert!((got - 0.5).abs() < 1e-4, "{got}");
        assert!(matches!(
            energy_shift_tabulated(&omegas, &decaying, 5.0, ShiftState::Excited),
            Err(Error::GridDoesNotEncloseResonance { .. })
        ));
    }

    #[test]
    fn vacuum_shifts_vanish() {
        let e = Emitter::new([0.0, 0.0, 1.0], 3.0, [0.0, 0.0, 1.0]);
        let o = WeakOptions::default();
        for s in [ShiftState::Excited, ShiftState::Ground] {
            assert_eq!(
                energy_shift_scattering(&e, &Environment::Vacuum, s, &o).unwrap(),
                0.0
            );
        }
    }
}
