//! Free-space dyadic Green's function.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::units::HBAR_C_EV_NM;

/// Im of B(x) = e^{ix}(1/x² − i/x) for real x, i.e. sin x/x² − cos x/x,
/// summed as Σ_{k≥1} (−1)^{k+1}·2k·x^{2k−1}/(2k+1)! to avoid cancellation.
fn im_b_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut pow = x;
    let mut fact = 6.0;
    let mut sum = 0.0;
    for k in 1..30 {
        let t = 2.0 * k as f64 * pow / fact;
        let t = if k % 2 == 1 { t } else { -t };
        sum += t;
        if t.abs() < 1e-18 * sum.abs() {
            break;
        }
        pow *= x2;
        fact *= ((2 * k + 2) * (2 * k + 3)) as f64;
    }
    sum
}

/// G₀(r1, r2, ω) for complex frequency ω (eV); requires r1 ≠ r2.
pub fn free_space_gf(
    r1: &Vector3<f64>,
    r2: &Vector3<f64>,
    omega: Complex64,
) -> Result<Matrix3<Complex64>> {
    let d = r1 - r2;
    let r = d.norm();
    if r == 0.0 {
        return Err(Error::CoincidentPointsFullTensor);
    }
    let n = d / r;
    let k = omega / HBAR_C_EV_NM;
    let x = k * r;
    let e = (Complex64::i() * x).exp();
    let a = e;
    let b = if omega.im == 0.0 && x.re.abs() < 0.5 {
        let xr = x.re;
        if xr == 0.0 {
            // static limit: only the longitudinal 1/x² term survives and is infinite
            return Err(Error::NonPositiveFrequency(0.0));
        }
        let (s, c) = xr.sin_cos();
        Complex64::new(c / (xr * xr) + s / xr, im_b_series(xr))
    } else {
        e * (1.0 / (x * x) - Complex64::i() / x)
    };
    let nn = n * n.transpose();
    let id = Matrix3::<f64>::identity();
    let pre = 1.0 / (4.0 * PI * r);
    let t = (id - nn).map(|v| Complex64::new(v, 0.0)) * a
        + (3.0 * nn - id).map(|v| Complex64::new(v, 0.0)) * b;
    Ok(t * Complex64::new(pre, 0.0))
}

/// Im G₀(r, r, ω) = (ω/ħc)/(6π)·I for real ω.
pub fn free_space_im_coincident(omega: f64) -> Matrix3<f64> {
    Matrix3::identity() * (omega / HBAR_C_EV_NM / (6.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn direct_im_b(x: f64) -> f64 {
        x.sin() / (x * x) - x.cos() / x
    }

    #[test]
    fn series_matches_direct_where_both_are_accurate() {
        for &x in &[0.1, 0.3, 0.49] {
            assert!((im_b_series(x) - direct_im_b(x)).abs() < 1e-13 * direct_im_b(x).abs() * 100.0);
        }
    }

    #[test]
    fn coincident_request_errors() {
        let r = Vector3::new(1.0, 2.0, 3.0);
        assert!(matches!(
            free_space_gf(&r, &r, Complex64::new(2.0, 0.0)),
            Err(Error::CoincidentPointsFullTensor)
        ));
    }

    #[test]
    fn near_field_is_longitudinal() {
        // kR = 1e-3, lateral separation along x with z-dipoles: k²G_zz ≈ −1/(4πR³)
        let omega = 2.0;
        let k = omega / HBAR_C_EV_NM;
        let r = 1e-3 / k;
        let g = free_space_gf(
            &Vector3::new(r, 0.0, 0.0),
            &Vector3::zeros(),
            Complex64::new(omega, 0.0),
        )
        .unwrap();
        let kzz = (g[(2, 2)] * (k * k)).re;
        let coulomb = -1.0 / (4.0 * PI * r.powi(3));
        assert!(((kzz - coulomb) / coulomb).abs() < 1e-5);
    }

    #[test]
    fn imaginary_part_approaches_coincident_value() {
        let omega = 3.0;
        let g = free_space_gf(
            &Vector3::new(1e-4, 0.0, 0.0),
            &Vector3::zeros(),
            Complex64::new(omega, 0.0),
        )
        .unwrap();
        let im0 = free_space_im_coincident(omega);
        for i in 0..3 {
            assert!((g[(i, i)].im - im0[(i, i)]).abs() < 1e-9 * im0[(i, i)]);
        }
    }

    #[test]
    fn real_on_imaginary_axis() {
        let g = free_space_gf(
            &Vector3::new(3.0, -1.0, 2.0),
            &Vector3::zeros(),
            Complex64::new(0.0, 5.0),
        )
        .unwrap();
        assert!(g.iter().all(|z| z.im.abs() < 1e-15 * z.norm().max(1e-30)));
    }

    proptest! {
        #[test]
        fn reciprocity_and_schwarz(
            a in prop::array::uniform3(-20.0f64..20.0),
            b in prop::array::uniform3(-20.0f64..20.0),
            omega in 0.01f64..20.0,
        ) {
            let (r1, r2) = (Vector3::from(a), Vector3::from(b));
            prop_assume!((r1 - r2).norm() > 1e-3);
            let w = Complex64::new(omega, 0.0);
            let g12 = free_space_gf(&r1, &r2, w).unwrap();
            let g21 = free_space_gf(&r2, &r1, w).unwrap();
            let gm = free_space_gf(&r1, &r2, -w).unwrap();
            let scale = g12.iter().fold(0.0f64, |m, z| m.max(z.norm()));
            prop_assert!((g12 - g21.transpose()).iter().all(|z| z.norm() <= 1e-12 * scale));
            prop_assert!((gm - g12.map(|z| z.conj())).iter().all(|z| z.norm() <= 1e-12 * scale));
        }
    }
}
