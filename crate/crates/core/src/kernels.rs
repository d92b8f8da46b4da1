//! Memory kernels of the non-Markovian equations of motion.
//!
//! A kernel with reference frequency ω_r is K(τ) = ∫ dω J(ω) e^{−i(ω−ω_r)τ}.
//! Co-rotating kernels use ω_r = ω_α, counter-rotating ones ω_r = −ω_β. Next
//! to the point samples K(nΔt) each table carries product-integration weights
//! for a piecewise-linear history, computed directly in the frequency domain
//! so that a kernel oscillating faster than Δt is still integrated exactly.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::greens::SpectralSet;
use crate::quadrature::phase_moments;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    CoRotating,
    CounterRotating,
}

/// One sampled kernel built from J_{row,col}.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    pub row: usize,
    pub col: usize,
    pub kind: KernelKind,
    pub dt: f64,
    /// ω_r in the kernel phase e^{−i(ω−ω_r)τ}.
    pub reference: f64,
    /// K(nΔt) for n = 0..=n_max.
    pub values: Vec<Complex64>,
    /// ∫ over [nΔt, (n+1)Δt] of K(τ)·(1 − s), with s = τ/Δt − n.
    pub falling: Vec<Complex64>,
    /// ∫ over [nΔt, (n+1)Δt] of K(τ)·s.
    pub rising: Vec<Complex64>,
    /// Number of history intervals actually used by the solver.
    pub support: usize,
}

impl KernelTable {
    pub fn taus(&self) -> Vec<f64> {
        (0..self.values.len()).map(|n| n as f64 * self.dt).collect()
    }

    pub fn tau_max(&self) -> f64 {
        (self.values.len() - 1) as f64 * self.dt
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|z| *z == Complex64::new(0.0, 0.0))
    }

    /// Zeroth moment K(0) = ∫J dω.
    pub fn zeroth_moment(&self) -> Complex64 {
        self.values[0]
    }

    /// Weight of history node n for a window of `len` intervals.
    #[inline]
    pub fn weight(&self, n: usize, len: usize) -> Complex64 {
        if n == 0 {
            self.falling[0]
        } else if n == len {
            self.rising[n - 1]
        } else {
            self.falling[n] + self.rising[n - 1]
        }
    }
}

/// ∫ F(ω) e^{−i(ω−ω_r)T} dω on a uniform grid with F linear per panel.
pub fn filon_transform(omegas: &[f64], f: &[Complex64], reference: f64, t: f64) -> Complex64 {
    let n = omegas.len();
    if n < 2 {
        return Complex64::new(0.0, 0.0);
    }
    let h = omegas[1] - omegas[0];
    let (e0, e1) = phase_moments(h * t);
    let a = e0 - e1;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n - 1 {
        let p = Complex64::from_polar(1.0, -(omegas[i] - reference) * t);
        acc += p * (f[i] * a + f[i + 1] * e1);
    }
    acc * h
}

fn check_uniform(omegas: &[f64]) -> Result<f64> {
    if omegas.len() < 2 {
        return Err(Error::InvalidArgument(
            "frequency grid needs at least two points".into(),
        ));
    }
    let h = omegas[1] - omegas[0];
    let ok = omegas
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs().max(w[1].abs()));
    if !ok || h <= 0.0 {
        return Err(Error::InvalidArgument(
            "frequency grid must be uniform and increasing".into(),
        ));
    }
    Ok(h)
}

/// Samples and product-integration weights of one kernel on n_max intervals.
pub fn build_table(
    omegas: &[f64],
    density: &[f64],
    reference: f64,
    dt: f64,
    n_max: usize,
    meta: (usize, usize, KernelKind),
) -> Result<KernelTable> {
    check_uniform(omegas)?;
    let zero = density.iter().all(|&v| v == 0.0);
    let (values, falling, rising) = if zero {
        let z = Complex64::new(0.0, 0.0);
        (vec![z; n_max + 1], vec![z; n_max], vec![z; n_max])
    } else {
        let jc: Vec<Complex64> = density.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let (fa, fb): (Vec<Complex64>, Vec<Complex64>) = omegas
            .iter()
            .zip(density)
            .map(|(&w, &j)| {
                let (e0, e1) = phase_moments((w - reference) * dt);
                (j * (e0 - e1) * dt, j * e1 * dt)
            })
            .unzip();
        let rows: Vec<(Complex64, Complex64, Complex64)> = (0..=n_max)
            .into_par_iter()
            .map(|n| {
                let t = n as f64 * dt;
                let k = filon_transform(omegas, &jc, reference, t);
                if n == n_max {
                    return (k, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
                }
                (
                    k,
                    filon_transform(omegas, &fa, reference, t),
                    filon_transform(omegas, &fb, reference, t),
                )
            })
            .collect();
        let values = rows.iter().map(|r| r.0).collect();
        let falling = rows[..n_max].iter().map(|r| r.1).collect();
        let rising = rows[..n_max].iter().map(|r| r.2).collect();
        (values, falling, rising)
    };
    Ok(KernelTable {
        row: meta.0,
        col: meta.1,
        kind: meta.2,
        dt,
        reference,
        values,
        falling,
        rising,
        support: n_max,
    })
}

/// All kernels needed by one propagation.
///
/// `co[α][β]` is built from J_αβ with ω_r = ω_α and acts on C_β(t′)·e^{−i(ω_β−ω_α)t′}.
/// `cr[β][γ]` is built from J_βγ with ω_r = −ω_β. The diagonal `cr[β][β]`
/// acts on C_α(t′) in every equation α ≠ β, and `cr[β][α]` acts on
/// C_β(t′)·e^{−i(ω_β−ω_α)t′} in equation α.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSet {
    pub dt: f64,
    pub co: Vec<Vec<KernelTable>>,
    pub cr: Option<Vec<Vec<KernelTable>>>,
}

impl KernelSet {
    pub fn n_emitters(&self) -> usize {
        self.co.len()
    }

    pub fn is_zero(&self) -> bool {
        self.tables().all(KernelTable::is_zero)
    }

    pub fn tables(&self) -> impl Iterator<Item = &KernelTable> {
        self.co
            .iter()
            .flatten()
            .chain(self.cr.iter().flatten().flatten())
    }

    /// Restricts every table's history to its own memory bound.
    pub fn truncate(&mut self, tol: f64) -> Result<()> {
        let apply = |t: &mut KernelTable| -> Result<()> {
            let tau = kernel_memory_bound(t, tol)?;
            t.support = ((tau / t.dt).ceil() as usize).clamp(1, t.values.len() - 1);
            Ok(())
        };
        for t in self.co.iter_mut().flatten() {
            apply(t)?;
        }
        if let Some(cr) = self.cr.as_mut() {
            for t in cr.iter_mut().flatten() {
                apply(t)?;
            }
        }
        Ok(())
    }
}

/// Builds co-rotating kernels for every pair and, unless `rwa`, the
/// counter-rotating ones, on a memory window of `tau_max`.
pub fn build_kernels(
    spectral: &SpectralSet,
    transition: &[f64],
    dt: f64,
    tau_max: f64,
    rwa: bool,
) -> Result<KernelSet> {
    let n = transition.len();
    if spectral.n_emitters() != n {
        return Err(Error::InvalidArgument(format!(
            "{} spectral rows for {} emitters",
            spectral.n_emitters(),
            n
        )));
    }
    if !(dt > 0.0) || !(tau_max > 0.0) {
        return Err(Error::InvalidArgument(
            "dt and tau_max must be positive".into(),
        ));
    }
    let h = check_uniform(&spectral.omegas)?;
    if h * tau_max > std::f64::consts::PI && !spectral.is_zero() {
        return Err(Error::SpectralGridTooCoarse {
            spacing: h,
            tau_max,
        });
    }
    let n_max = ((tau_max / dt).round() as usize).max(1);
    let build = |a: usize, b: usize, kind: KernelKind| {
        let reference = match kind {
            KernelKind::CoRotating => transition[a],
            KernelKind::CounterRotating => -transition[a],
        };
        build_table(
            &spectral.omegas,
            spectral.get(a, b),
            reference,
            dt,
            n_max,
            (a, b, kind),
        )
    };
    let grid = |kind: KernelKind| -> Result<Vec<Vec<KernelTable>>> {
        (0..n)
            .map(|a| (0..n).map(|b| build(a, b, kind)).collect())
            .collect()
    };
    Ok(KernelSet {
        dt,
        co: grid(KernelKind::CoRotating)?,
        cr: if rwa {
            None
        } else {
            Some(grid(KernelKind::CounterRotating)?)
        },
    })
}

/// Smallest τ with ∫_τ^{τ_max}|K| < tol·∫_0^{τ_max}|K|.
///
/// Raises `NoDecayDetected` when the mean |K| over the last tenth of the
/// window is still at least half of its mean over the first tenth.
pub fn kernel_memory_bound(table: &KernelTable, tol: f64) -> Result<f64> {
    if table.is_zero() {
        return Ok(0.0);
    }
    let mags: Vec<f64> = table.values.iter().map(|z| z.norm()).collect();
    let m = mags.len();
    let tenth = (m / 10).max(1);
    let head = mags[..tenth].iter().sum::<f64>() / tenth as f64;
    let tail = mags[m - tenth..].iter().sum::<f64>() / tenth as f64;
    if tail >= 0.5 * head {
        return Err(Error::NoDecayDetected {
            alpha: table.row,
            beta: table.col,
        });
    }
    let dt = table.dt;
    // cumulative trapezoid from the far end
    let mut tail_int = vec![0.0; m];
    for i in (0..m - 1).rev() {
        tail_int[i] = tail_int[i + 1] + 0.5 * dt * (mags[i] + mags[i + 1]);
    }
    let total = tail_int[0];
    let idx = tail_int
        .iter()
        .position(|&v| v < tol * total)
        .unwrap_or(m - 1);
    Ok(idx as f64 * dt)
}

/// Lorentzian model density J(ω) = (g²/π)·λ/((ω − ω_c)² + λ²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lorentzian {
    pub g: f64,
    pub lambda: f64,
    pub omega_c: f64,
}

impl Lorentzian {
    pub fn density(&self, omega: f64) -> f64 {
        let x = omega - self.omega_c;
        self.g * self.g / std::f64::consts::PI * self.lambda / (x * x + self.lambda * self.lambda)
    }

    /// Whole-line transform g²·e^{−λτ}·e^{−i(ω_c−ω_r)τ} for τ ≥ 0.
    pub fn kernel(&self, tau: f64, reference: f64) -> Complex64 {
        Complex64::from_polar(
            self.g * self.g * (-self.lambda * tau).exp(),
            -(self.omega_c - reference) * tau,
        )
    }
}
