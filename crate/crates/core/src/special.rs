//! Special functions: trigonometric integrals and their auxiliary functions,
//! and integer-order Bessel functions of complex argument.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Ci(x) and Si(x) by power series; intended for 0 < x < 4.
fn ci_si_series(x: f64) -> (f64, f64) {
    let x2 = x * x;
    let mut ci = 0.0;
    let mut si = x;
    // term_k = (−1)^k x^{2k}/(2k)!
    let mut t = 1.0;
    for k in 1..60 {
        let n = 2 * k;
        t *= -x2 / ((n - 1) as f64 * n as f64);
        let c = t / n as f64;
        let s = t * x / ((n + 1) as f64 * (n + 1) as f64);
        ci += c;
        si += s;
        if c.abs() < 1e-18 * ci.abs().max(1e-300) && s.abs() < 1e-18 * si.abs() {
            break;
        }
    }
    (EULER_GAMMA + x.ln() + ci, si)
}

/// e^{z}E₁(z) by modified Lentz evaluation of the continued fraction; |z| ≳ 2.
fn exp_e1_cf(z: Complex64) -> Complex64 {
    let tiny = 1e-300;
    let mut b = z + 1.0;
    let mut c = Complex64::new(1.0 / tiny, 0.0);
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            break;
        }
    }
    h
}

/// Auxiliary functions f(x) = ci(x)·sin x − si(x)·cos x and
/// g(x) = −ci(x)·cos x − si(x)·sin x, with si(x) = Si(x) − π/2.
pub fn aux_fg(x: f64) -> (f64, f64) {
    assert!(x > 0.0, "aux_fg requires x > 0");
    if x < 4.0 {
        let (ci, si_full) = ci_si_series(x);
        let si = si_full - FRAC_PI_2;
        let (s, c) = x.sin_cos();
        (ci * s - si * c, -ci * c - si * s)
    } else {
        // e^{ix}E₁(ix) = g − i·f
        let w = exp_e1_cf(Complex64::new(0.0, x));
        (-w.im, w.re)
    }
}

/// Cosine and sine integrals ci(x) = −∫ₓ^∞ cos t/t dt and si(x) = −∫ₓ^∞ sin t/t dt.
pub fn ci_si(x: f64) -> (f64, f64) {
    if x < 4.0 {
        let (ci, si) = ci_si_series(x);
        (ci, si - FRAC_PI_2)
    } else {
        let (f, g) = aux_fg(x);
        let (s, c) = x.sin_cos();
        (f * s - g * c, -f * c - g * s)
    }
}

/// The three auxiliary integrals
/// 𝓘₁ = ∫₀^∞ x²e^{−x}/(x²+x′²) dx, 𝓘₂ = ∫₀^∞ x e^{−x}/(x²+x′²) dx,
/// 𝓘₃ = ∫₀^∞ e^{−x}/(x²+x′²) dx.
pub fn aux_integrals(xp: f64) -> (f64, f64, f64) {
    let (f, g) = aux_fg(xp);
    let i1 = if xp > 40.0 {
        asymptotic_i1(xp)
    } else {
        1.0 - xp * f
    };
    (i1, g, f / xp)
}

/// 𝓘₁ ~ Σ_{k≥1} (−1)^{k+1}(2k)!/x′^{2k}, which avoids the cancellation in 1 − x′f.
fn asymptotic_i1(xp: f64) -> f64 {
    let inv2 = 1.0 / (xp * xp);
    let mut term = 2.0 * inv2;
    let mut sum = 0.0;
    let mut k = 1usize;
    loop {
        sum += term;
        let n = 2 * k;
        let next = -term * ((n + 1) * (n + 2)) as f64 * inv2;
        if next.abs() < 1e-18 * sum.abs() || next.abs() > term.abs() {
            break;
        }
        term = next;
        k += 1;
    }
    sum
}

fn bessel_series(z: Complex64, n: u32) -> Complex64 {
    let h = z * 0.5;
    let h2 = -h * h;
    let mut t = Complex64::new(1.0, 0.0);
    for k in 1..=n {
        t *= h / k as f64;
    }
    let mut sum = t;
    for k in 1..200u32 {
        t *= h2 / (k as f64 * (k + n) as f64);
        sum += t;
        if t.norm() < 1e-17 * sum.norm().max(1e-300) {
            break;
        }
    }
    sum
}

/// J₀, J₁, J₂ of complex argument.
///
/// Power series for |z| ≤ 8; otherwise the trapezoid rule on
/// J_n(z) = (1/2π)∫₀^{2π} e^{i(z sinθ − nθ)} dθ, which converges
/// geometrically once the node count exceeds |z|.
pub fn bessel_j012(z: Complex64) -> [Complex64; 3] {
    let r = z.norm();
    if r <= 8.0 {
        return [
            bessel_series(z, 0),
            bessel_series(z, 1),
            bessel_series(z, 2),
        ];
    }
    let n = 4 * ((r as usize + 40) / 4);
    let mut acc = [Complex64::new(0.0, 0.0); 3];
    let dth = 2.0 * PI / n as f64;
    for k in 0..n {
        let th = k as f64 * dth;
        let (s, c) = th.sin_cos();
        let e = (Complex64::i() * z * s).exp();
        // e^{−iθ}, e^{−2iθ}
        let e1 = Complex64::new(c, -s);
        let e2 = e1 * e1;
        acc[0] += e;
        acc[1] += e * e1;
        acc[2] += e * e2;
    }
    let scale = 1.0 / n as f64;
    [acc[0] * scale, acc[1] * scale, acc[2] * scale]
}
