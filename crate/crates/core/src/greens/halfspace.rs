//! Scattering Green's function of a planar interface at z = 0 between vacuum
//! (z > 0) and a medium with permittivity ε(ω) (z < 0), as a Sommerfeld
//! integral over the lateral wavenumber k_ρ.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::Environment;
use crate::quadrature::{integrate_breaks, CVec, QuadOptions};
use crate::special::bessel_j012;
use crate::units::HBAR_C_EV_NM;

/// Square root on the branch Im ≥ 0 (decaying or outgoing waves).
#[inline]
fn kz_sqrt(z: Complex64) -> Complex64 {
    let s = z.sqrt();
    if s.im < 0.0 || (s.im == 0.0 && s.re < 0.0) {
        -s
    } else {
        s
    }
}

/// Fresnel reflection coefficients (r_p, r_s) for vacuum over a medium of
/// permittivity `eps`, at lateral wavenumber `k_rho` and vacuum wavenumber `k0`.
pub fn fresnel(k_rho: Complex64, k0: Complex64, eps: Complex64) -> (Complex64, Complex64) {
    let kr2 = k_rho * k_rho;
    let kz1 = kz_sqrt(k0 * k0 - kr2);
    let kz2 = kz_sqrt(eps * k0 * k0 - kr2);
    let rp = (eps * kz1 - kz2) / (eps * kz1 + kz2);
    let rs = (kz1 - kz2) / (kz1 + kz2);
    (rp, rs)
}

/// (r_p, r_s) at real k_ρ ≥ 0 and real ω > 0 for the given environment.
pub fn fresnel_coefficients(
    k_rho: f64,
    omega: f64,
    env: &Environment,
) -> Result<(Complex64, Complex64)> {
    if !(omega > 0.0) {
        return Err(Error::NonPositiveFrequency(omega));
    }
    if k_rho < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "k_rho must be non-negative, got {k_rho}"
        )));
    }
    let w = Complex64::new(omega, 0.0);
    Ok(fresnel(
        Complex64::new(k_rho, 0.0),
        w / HBAR_C_EV_NM,
        env.permittivity(w),
    ))
}

/// Cached geometry of one source/observation pair.
#[derive(Debug, Clone, Copy)]
struct Geometry {
    rho: f64,
    zsum: f64,
    cos_phi: f64,
    sin_phi: f64,
}

impl Geometry {
    fn new(r1: &Vector3<f64>, r2: &Vector3<f64>) -> Self {
        let dx = r1.x - r2.x;
        let dy = r1.y - r2.y;
        let rho = dx.hypot(dy);
        let (cos_phi, sin_phi) = if rho > 0.0 {
            (dx / rho, dy / rho)
        } else {
            (1.0, 0.0)
        };
        Geometry {
            rho,
            zsum: r1.z + r2.z,
            cos_phi,
            sin_phi,
        }
    }
}

/// The six scalar Sommerfeld integrands (S0, S2, P0, P2, P1, Pz) at k_ρ,
/// multiplied by the path Jacobian `dk`.
#[inline]
fn integrand(kr: Complex64, dk: Complex64, k0: Complex64, eps: Complex64, g: &Geometry) -> CVec<6> {
    let kr2 = kr * kr;
    let k02 = k0 * k0;
    let kz1 = kz_sqrt(k02 - kr2);
    let kz2 = kz_sqrt(eps * k02 - kr2);
    let rp = (eps * kz1 - kz2) / (eps * kz1 + kz2);
    let rs = (kz1 - kz2) / (kz1 + kz2);
    let w = kr / kz1 * (Complex64::i() * kz1 * g.zsum).exp() * dk;
    let [j0, j1, j2] = if g.rho == 0.0 {
        let z = Complex64::new(0.0, 0.0);
        [Complex64::new(1.0, 0.0), z, z]
    } else {
        bessel_j012(kr * g.rho)
    };
    let rpw = rp * w;
    let rsw = rs * w;
    let kz1sq = kz1 * kz1;
    CVec([
        rsw * j0,
        rsw * j2,
        rpw * kz1sq * j0,
        rpw * kz1sq * j2,
        rpw * kz1 * kr * j1,
        rpw * kr2 * j0,
    ])
}

fn assemble(s: &CVec<6>, k0: Complex64, g: &Geometry) -> Matrix3<Complex64> {
    let [s0, s2, p0, p2, p1, pz] = s.0;
    let inv_k2 = 1.0 / (k0 * k0);
    let c2 = g.cos_phi * g.cos_phi - g.sin_phi * g.sin_phi;
    let sn2 = 2.0 * g.sin_phi * g.cos_phi;
    let i2 = Complex64::new(0.0, 2.0);
    let xx = s0 + s2 * c2 - (p0 - p2 * c2) * inv_k2;
    let yy = s0 - s2 * c2 - (p0 + p2 * c2) * inv_k2;
    let xy = s2 * sn2 + p2 * sn2 * inv_k2;
    let xz = -i2 * p1 * g.cos_phi * inv_k2;
    let yz = -i2 * p1 * g.sin_phi * inv_k2;
    let zz = 2.0 * pz * inv_k2;
    let m = Matrix3::new(xx, xy, xz, xy, yy, yz, -xz, -yz, zz);
    m * Complex64::new(0.0, 1.0 / (8.0 * PI))
}

/// Integration options for the Sommerfeld integral.
#[derive(Debug, Clone, Copy)]
pub struct SommerfeldOptions {
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for SommerfeldOptions {
    fn default() -> Self {
        SommerfeldOptions {
            rel_tol: 1e-8,
            max_panels: 4000,
        }
    }
}

/// G_Sc(r1, r2, ω) with its quadrature error estimate (max-norm, units 1/nm).
///
/// For real ω the path leaves the real k_ρ axis on a half-ellipse that
/// passes beneath the branch points and the surface-plasmon pole (mirrored
/// above for ω < 0), then follows the real axis until the evanescent factor
/// e^{−k_ρ(z1+z2)} is negligible. Imaginary frequencies use the real axis.
pub fn half_space_scattering_gf_with_error(
    r1: &Vector3<f64>,
    r2: &Vector3<f64>,
    omega: Complex64,
    env: &Environment,
    opts: SommerfeldOptions,
) -> Result<(Matrix3<Complex64>, f64)> {
    if env.is_vacuum() {
        return Ok((Matrix3::zeros(), 0.0));
    }
    if omega.norm() == 0.0 {
        return Err(Error::NonPositiveFrequency(0.0));
    }
    if !(r1.z > 0.0 && r2.z > 0.0) {
        return Err(Error::InvalidArgument(
            "observation and source points must lie above the interface".into(),
        ));
    }
    let g = Geometry::new(r1, r2);
    let k0 = omega / HBAR_C_EV_NM;
    let eps = env.permittivity(omega);
    let qopts = QuadOptions {
        abs_tol: 1e-290,
        rel_tol: opts.rel_tol,
        max_panels: opts.max_panels,
    };

    let tail_end_of = |start: f64| start + 40.0 / g.zsum;
    let tail_breaks = |start: f64, end: f64| -> Vec<f64> {
        let width = if g.rho > 0.0 {
            (PI / g.rho).min(end - start)
        } else {
            end - start
        };
        let n = ((end - start) / width).ceil().max(1.0) as usize;
        (0..=n)
            .map(|i| start + (end - start) * i as f64 / n as f64)
            .collect()
    };

    let imaginary_frequency = omega.re.abs() <= 1e-12 * omega.norm();
    let mut total = CVec::<6>([Complex64::new(0.0, 0.0); 6]);
    let mut err = 0.0;
    let start = if imaginary_frequency {
        0.0
    } else {
        let sqrt_eps = eps.sqrt();
        let k_spp = k0 * (eps / (eps + 1.0)).sqrt();
        let reach = k0.norm().max((k0 * sqrt_eps).re.abs()).max(k_spp.re.abs());
        let a = 0.75 * reach;
        let b = 0.5 * k0.norm();
        let sgn = omega.re.signum();
        let ell = integrate_breaks(
            |u: f64| {
                let (s, c) = (PI * u).sin_cos();
                let kr = Complex64::new(a * (1.0 - c), -sgn * b * s);
                let dk = Complex64::new(a * PI * s, -sgn * b * PI * c);
                integrand(kr, dk, k0, eps, &g)
            },
            &[0.0, 0.25, 0.5, 0.75, 1.0],
            qopts,
        )?;
        total = total + ell.value;
        err += ell.error;
        2.0 * a
    };
    let end = tail_end_of(start);
    let tail = integrate_breaks(
        |x: f64| {
            integrand(
                Complex64::new(x, 0.0),
                Complex64::new(1.0, 0.0),
                k0,
                eps,
                &g,
            )
        },
        &tail_breaks(start, end),
        qopts,
    )?;
    total = total + tail.value;
    err += tail.error;
    let gm = assemble(&total, k0, &g);
    let err_scale = (1.0 / (8.0 * PI)) * (1.0 + 2.0 / (k0 * k0).norm());
    Ok((gm, err * err_scale))
}

pub fn half_space_scattering_gf(
    r1: &Vector3<f64>,
    r2: &Vector3<f64>,
    omega: Complex64,
    env: &Environment,
) -> Result<Matrix3<Complex64>> {
    half_space_scattering_gf_with_error(r1, r2, omega, env, SommerfeldOptions::default())
        .map(|(g, _)| g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn drude() -> Environment {
        Environment::plasmonic_default()
    }

    #[test]
    fn vacuum_beneath_gives_no_reflection() {
        let (rp, rs) = fresnel_coefficients(0.01, 3.0, &Environment::Vacuum).unwrap();
        assert!(rp.norm() < 1e-15 && rs.norm() < 1e-15);
        let g = half_space_scattering_gf(
            &Vector3::new(0.0, 0.0, 5.0),
            &Vector3::new(1.0, 0.0, 5.0),
            Complex64::new(3.0, 0.0),
            &Environment::Vacuum,
        )
        .unwrap();
        assert!(g.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn quasi_static_reflection_limit() {
        let omega = 3.0;
        let env = drude();
        let eps = env.permittivity(Complex64::new(omega, 0.0));
        let (rp, _) = fresnel_coefficients(1e4, omega, &env).unwrap();
        let r_qs = (eps - 1.0) / (eps + 1.0);
        assert!((rp - r_qs).norm() < 1e-8 * r_qs.norm());
    }

    #[test]
    fn plasmon_pole_location() {
        // Denominator ε·kz1 + kz2 vanishes at k_spp = k0·√(ε/(ε+1)).
        let omega = Complex64::new(3.3, 0.0);
        let k0 = omega / HBAR_C_EV_NM;
        let eps = drude().permittivity(omega);
        let kspp = k0 * (eps / (eps + 1.0)).sqrt();
        let den =
            |kr: Complex64| eps * kz_sqrt(k0 * k0 - kr * kr) + kz_sqrt(eps * k0 * k0 - kr * kr);
        assert!(den(kspp).norm() < 1e-12 * k0.norm());
        assert!(kspp.re > k0.re && kspp.im > 0.0);
    }

    #[test]
    fn coincident_zz_matches_image_dipole() {
        let omega = 3.0;
        let k0 = omega / HBAR_C_EV_NM;
        let h = 0.01 / k0;
        let r = Vector3::new(0.0, 0.0, h);
        let env = drude();
        let g = half_space_scattering_gf(&r, &r, Complex64::new(omega, 0.0), &env).unwrap();
        let eps = env.permittivity(Complex64::new(omega, 0.0));
        let refl = (eps - 1.0) / (eps + 1.0);
        let image = refl * 2.0 / (4.0 * PI * (2.0 * h).powi(3));
        let got = g[(2, 2)] * k0 * k0;
        assert!((got - image).norm() < 1e-2 * image.norm());
    }

    #[test]
    fn full_tensor_matches_image_dipole() {
        let omega = 2.0;
        let k0 = omega / HBAR_C_EV_NM;
        let h = 0.005 / k0;
        let r1 = Vector3::new(0.3 * h, -0.7 * h, h);
        let r2 = Vector3::new(-0.2 * h, 0.4 * h, 1.6 * h);
        let env = drude();
        let eps = env.permittivity(Complex64::new(omega, 0.0));
        let refl = (eps - 1.0) / (eps + 1.0);
        let img = Vector3::new(r2.x, r2.y, -r2.z);
        let d = r1 - img;
        let rr = d.norm();
        let n = d / rr;
        let t = (3.0 * n * n.transpose() - Matrix3::identity()) / (4.0 * PI * rr.powi(3));
        let mirror = Matrix3::from_diagonal(&Vector3::new(-1.0, -1.0, 1.0));
        let expect = (t * mirror).map(|v| refl * v);
        let g = half_space_scattering_gf(&r1, &r2, Complex64::new(omega, 0.0), &env).unwrap()
            * Complex64::new(k0 * k0, 0.0);
        let scale = expect.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        for (a, b) in g.iter().zip(expect.iter()) {
            assert!((a - b).norm() < 1e-2 * scale, "{a} vs {b}");
        }
    }

    #[test]
    fn reciprocity_and_schwarz() {
        let env = drude();
        let r1 = Vector3::new(1.0, 2.0, 3.0);
        let r2 = Vector3::new(-2.0, 0.5, 6.0);
        let w = Complex64::new(3.4, 0.0);
        let g12 = half_space_scattering_gf(&r1, &r2, w, &env).unwrap();
        let g21 = half_space_scattering_gf(&r2, &r1, w, &env).unwrap();
        let gm = half_space_scattering_gf(&r1, &r2, -w, &env).unwrap();
        let scale = g12.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        assert!((g12 - g21.transpose())
            .iter()
            .all(|z| z.norm() < 1e-7 * scale));
        assert!((gm - g12.map(|z| z.conj()))
            .iter()
            .all(|z| z.norm() < 1e-7 * scale));
    }

    #[test]
    fn real_on_imaginary_frequency_axis() {
        let env = drude();
        let g = half_space_scattering_gf(
            &Vector3::new(0.0, 0.0, 2.0),
            &Vector3::new(1.0, 1.0, 3.0),
            Complex64::new(0.0, 2.0),
            &env,
        )
        .unwrap();
        let scale = g.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        assert!(g.iter().all(|z| z.im.abs() < 1e-12 * scale));
    }

    #[test]
    fn error_estimate_bounds_tolerance_change() {
        let env = drude();
        let r1 = Vector3::new(0.0, 0.0, 10.0);
        let r2 = Vector3::new(4.0, 0.0, 10.0);
        let w = Complex64::new(3.525, 0.0);
        let (g1, e1) = half_space_scattering_gf_with_error(
            &r1,
            &r2,
            w,
            &env,
            SommerfeldOptions {
                rel_tol: 1e-6,
                max_panels: 4000,
            },
        )
        .unwrap();
        let (g2, _) = half_space_scattering_gf_with_error(
            &r1,
            &r2,
            w,
            &env,
            SommerfeldOptions {
                rel_tol: 5e-7,
                max_panels: 4000,
            },
        )
        .unwrap();
        let diff = (g1 - g2).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        assert!(diff <= e1, "diff {diff:e} vs estimate {e1:e}");
    }
}
