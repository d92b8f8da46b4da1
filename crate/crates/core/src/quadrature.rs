//! Adaptive Gauss–Kronrod quadrature over scalar, complex and small
//! fixed-size vector integrands, plus Filon phase moments.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values that can be integrated: a vector space with a max-norm.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn max_norm(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn max_norm(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn max_norm(&self) -> f64 {
        self.norm()
    }
}

/// Fixed-length vector of complex values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CVec<const N: usize>(pub [Complex64; N]);

impl<const N: usize> Add for CVec<N> {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        for i in 0..N {
            self.0[i] += o.0[i];
        }
        self
    }
}

impl<const N: usize> Sub for CVec<N> {
    type Output = Self;
    fn sub(mut self, o: Self) -> Self {
        for i in 0..N {
            self.0[i] -= o.0[i];
        }
        self
    }
}

impl<const N: usize> Mul<f64> for CVec<N> {
    type Output = Self;
    fn mul(mut self, s: f64) -> Self {
        for v in self.0.iter_mut() {
            *v *= s;
        }
        self
    }
}

impl<const N: usize> QuadValue for CVec<N> {
    fn zero() -> Self {
        CVec([Complex64::new(0.0, 0.0); N])
    }
    fn max_norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_892_614_085,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// One 21-point Kronrod panel with embedded 10-point Gauss error estimate.
pub fn gk21<T: QuadValue>(f: &mut impl FnMut(f64) -> T, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[10];
    let mut g = T::zero();
    for j in 0..10 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k = k + s * WGK[j];
        if j % 2 == 1 {
            g = g + s * WG[j / 2];
        }
    }
    let k = k * h;
    let g = g * h;
    let err = (k - g).max_norm();
    (k, err)
}

#[derive(Debug, Clone, Copy)]
pub struct Quad<T> {
    pub value: T,
    pub error: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 0.0,
            rel_tol: 1e-10,
            max_panels: 2000,
        }
    }
}

impl QuadOptions {
    pub fn rel(rel_tol: f64) -> Self {
        QuadOptions {
            rel_tol,
            ..Default::default()
        }
    }

    pub fn with_abs(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }
}

/// Globally adaptive bisection over a list of initial breakpoints.
pub fn integrate_breaks<T: QuadValue>(
    mut f: impl FnMut(f64) -> T,
    breaks: &[f64],
    opts: QuadOptions,
) -> Result<Quad<T>> {
    let mut panels: Vec<(f64, f64, T, f64)> = breaks
        .windows(2)
        .filter(|w| w[1] != w[0])
        .map(|w| {
            let (v, e) = gk21(&mut f, w[0], w[1]);
            (w[0], w[1], v, e)
        })
        .collect();
    loop {
        let (total, err) = panels
            .iter()
            .fold((T::zero(), 0.0), |(s, e), p| (s + p.2, e + p.3));
        let target = opts.abs_tol.max(opts.rel_tol * total.max_norm());
        if err <= target {
            return Ok(Quad {
                value: total,
                error: err,
            });
        }
        if panels.len() >= opts.max_panels {
            return Err(Error::QuadratureNotConverged {
                estimate: err,
                tolerance: target,
            });
        }
        let (idx, _) =
            panels.iter().enumerate().fold(
                (0, -1.0),
                |(bi, be), (i, p)| if p.3 > be { (i, p.3) } else { (bi, be) },
            );
        let (a, b, _, _) = panels[idx];
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            return Err(Error::QuadratureNotConverged {
                estimate: err,
                tolerance: target,
            });
        }
        let (v1, e1) = gk21(&mut f, a, m);
        let (v2, e2) = gk21(&mut f, m, b);
        panels[idx] = (a, m, v1, e1);
        panels.push((m, b, v2, e2));
    }
}

pub fn integrate<T: QuadValue>(
    f: impl FnMut(f64) -> T,
    a: f64,
    b: f64,
    opts: QuadOptions,
) -> Result<Quad<T>> {
    integrate_breaks(f, &[a, b], opts)
}

/// ∫ₐ^∞ f via x = a + s·t/(1 − t) on t ∈ [0, 1).
pub fn integrate_to_infinity<T: QuadValue>(
    mut f: impl FnMut(f64) -> T,
    a: f64,
    scale: f64,
    opts: QuadOptions,
) -> Result<Quad<T>> {
    integrate(
        move |t| {
            let u = 1.0 - t;
            let x = a + scale * t / u;
            f(x) * (scale / (u * u))
        },
        0.0,
        1.0,
        opts,
    )
}

/// E₀(θ) = ∫₀¹ e^{−iθu} du and E₁(θ) = ∫₀¹ u e^{−iθu} du.
pub fn phase_moments(theta: f64) -> (Complex64, Complex64) {
    if theta.abs() < 0.25 {
        let z = Complex64::new(0.0, -theta);
        let mut pow = Complex64::new(1.0, 0.0);
        let mut fact = 1.0;
        let mut e0 = Complex64::new(0.0, 0.0);
        let mut e1 = Complex64::new(0.0, 0.0);
        for k in 0..20 {
            if k > 0 {
                pow *= z;
                fact *= k as f64;
            }
            e0 += pow / (fact * (k + 1) as f64);
            e1 += pow / (fact * (k + 2) as f64);
        }
        (e0, e1)
    } else {
        let em = Complex64::from_polar(1.0, -theta);
        let it = Complex64::new(0.0, theta);
        let e0 = (1.0 - em) / it;
        let e1 = (em * (1.0 + it) - 1.0) / (theta * theta);
        (e0, e1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn polynomial_exact() {
        let q = integrate(
            |x: f64| x.powi(7) - 3.0 * x * x,
            0.0,
            2.0,
            QuadOptions::default(),
        )
        .unwrap();
        assert!((q.value - (32.0 - 8.0)).abs() < 1e-13);
    }

    #[test]
    fn peaked_integrand() {
        let eps: f64 = 1e-3;
        let q = integrate(
            |x: f64| eps / (x * x + eps * eps),
            -1.0,
            1.0,
            QuadOptions::rel(1e-12),
        )
        .unwrap();
        let exact = 2.0 * (1.0 / eps).atan();
        assert!((q.value - exact).abs() < 1e-11 * exact);
    }

    #[test]
    fn semi_infinite() {
        let q =
            integrate_to_infinity(|x: f64| (-x).exp(), 0.0, 1.0, QuadOptions::rel(1e-13)).unwrap();
        assert!((q.value - 1.0).abs() < 1e-13);
    }

    #[test]
    fn vector_integrand() {
        let q = integrate(
            |x: f64| CVec([Complex64::new(x.cos(), x.sin()), Complex64::new(1.0, 0.0)]),
            0.0,
            1.0,
            QuadOptions::rel(1e-13),
        )
        .unwrap();
        assert!((q.value.0[0] - Complex64::new(1f64.sin(), 1.0 - 1f64.cos())).norm() < 1e-14);
        assert!((q.value.0[1].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn exhausted_budget_is_reported() {
        let r = integrate(
            |x: f64| (1.0 / x).sin(),
            1e-12,
            1.0,
            QuadOptions {
                abs_tol: 0.0,
                rel_tol: 1e-14,
                max_panels: 20,
            },
        );
        assert!(matches!(r, Err(Error::QuadratureNotConverged { .. })));
    }

    proptest! {
        #[test]
        fn phase_moments_branches_agree(theta in -3.0f64..3.0) {
            let (e0, e1) = phase_moments(theta);
            let r = integrate(
                |u: f64| CVec([Complex64::from_polar(1.0, -theta * u), Complex64::from_polar(u, -theta * u)]),
                0.0, 1.0, QuadOptions::rel(1e-14)).unwrap();
            prop_assert!((e0 - r.value.0[0]).norm() < 1e-13);
            prop_assert!((e1 - r.value.0[1]).norm() < 1e-13);
        }
    }
}
