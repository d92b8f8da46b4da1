//! Brute-force reference: the continuum is replaced by pseudomodes and the
//! truncated state vector (emitter excitations, one-polariton states and,
//! without the RWA, doubly excited one-polariton states) is propagated
//! exactly with a Chebyshev expansion of e^{−iHΔt}.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::greens::{spectral_matrix, Part, SommerfeldOptions, SpectralSet};
use crate::model::{TimeGrid, ValidatedConfig};

/// Relative size below which a spectral eigenvalue is treated as zero.
const RANK_TOL: f64 = 1e-13;
/// Negative eigenvalues beyond this fraction of the largest one are reported.
const PSD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct PseudomodeModel {
    pub transition: Vec<f64>,
    /// Mode frequencies ω_j (cell midpoints).
    pub frequencies: Vec<f64>,
    pub spacing: f64,
    /// `couplings[j]` lists the channel vectors g_j^{(k)} ∈ ℝ^N with
    /// Σ_k g_{αj}^{(k)} g_{βj}^{(k)} = J_αβ(ω_j)·Δω.
    pub couplings: Vec<Vec<Vec<f64>>>,
}

impl PseudomodeModel {
    pub fn n_emitters(&self) -> usize {
        self.transition.len()
    }

    pub fn n_channels(&self) -> usize {
        self.couplings.iter().map(Vec::len).sum()
    }

    pub fn basis_dimension(&self, rwa: bool) -> usize {
        let n = self.n_emitters();
        let m = self.n_channels();
        if rwa {
            n + m
        } else {
            n + m + m * n * (n - 1) / 2
        }
    }

    /// Revival time 2π/Δω of the discretised continuum.
    pub fn recurrence_time(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.spacing
    }

    /// Σ_k g g at mode j, i.e. the reconstructed J(ω_j)·Δω.
    pub fn reconstructed(&self, j: usize) -> DMatrix<f64> {
        let n = self.n_emitters();
        let mut m = DMatrix::zeros(n, n);
        for g in &self.couplings[j] {
            for a in 0..n {
                for b in 0..n {
                    m[(a, b)] += g[a] * g[b];
                }
            }
        }
        m
    }
}

fn interpolate(x: &[f64], y: &[f64], t: f64) -> f64 {
    let i = x.partition_point(|&v| v <= t).clamp(1, x.len() - 1);
    let (x0, x1) = (x[i - 1], x[i]);
    y[i - 1] + (y[i] - y[i - 1]) * (t - x0) / (x1 - x0)
}

/// `m` uniform cells over the tabulated support; per-frequency
/// eigendecomposition of the J matrix gives the channel couplings.
pub fn build_pseudomodes(
    spectral: &SpectralSet,
    transition: &[f64],
    m: usize,
) -> Result<PseudomodeModel> {
    let n = transition.len();
    if m < 2 {
        return Err(Error::InvalidArgument(
            "at least two pseudomodes are required".into(),
        ));
    }
    if spectral.n_emitters() != n || spectral.omegas.len() < 2 {
        return Err(Error::InvalidArgument(
            "spectral set does not match the emitters".into(),
        ));
    }
    let (lo, hi) = (spectral.omegas[0], *spectral.omegas.last().unwrap());
    let dw = (hi - lo) / m as f64;
    let frequencies: Vec<f64> = (0..m).map(|j| lo + (j as f64 + 0.5) * dw).collect();
    let scale = spectral
        .values
        .iter()
        .flatten()
        .flatten()
        .fold(0.0f64, |s, v| s.max(v.abs()));
    let mut couplings = Vec::with_capacity(m);
    for &w in &frequencies {
        let jm = DMatrix::from_fn(n, n, |a, b| {
            interpolate(&spectral.omegas, spectral.get(a, b), w)
        });
        let eig = SymmetricEigen::new(jm);
        let emax = eig.eigenvalues.iter().fold(0.0f64, |s, v| s.max(v.abs()));
        let emin = eig
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if emin < -PSD_TOL * emax.max(f64::MIN_POSITIVE) {
            return Err(Error::NonPsdSpectralMatrix {
                omega: w,
                min_eigenvalue: emin,
            });
        }
        let chans = (0..n)
            .filter(|&k| eig.eigenvalues[k] > RANK_TOL * scale)
            .map(|k| {
                let s = (eig.eigenvalues[k] * dw).sqrt();
                eig.eigenvectors.column(k).iter().map(|v| v * s).collect()
            })
            .collect();
        couplings.push(chans);
    }
    Ok(PseudomodeModel {
        transition: transition.to_vec(),
        frequencies,
        spacing: dw,
        couplings,
    })
}

/// Real symmetric Hamiltonian stored as diagonal plus a list of couplings.
struct SparseHamiltonian {
    diag: Vec<f64>,
    edges: Vec<(usize, usize, f64)>,
}

impl SparseHamiltonian {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        for i in 0..v.len() {
            out[i] = v[i] * self.diag[i];
        }
        for &(i, j, g) in &self.edges {
            out[i] += v[j] * g;
            out[j] += v[i] * g;
        }
    }

    /// Gershgorin bounds on the spectrum.
    fn bounds(&self) -> (f64, f64) {
        let mut radius = vec![0.0; self.dim()];
        for &(i, j, g) in &self.edges {
            radius[i] += g.abs();
            radius[j] += g.abs();
        }
        let lo = (0..self.dim())
            .map(|i| self.diag[i] - radius[i])
            .fold(f64::INFINITY, f64::min);
        let hi = (0..self.dim())
            .map(|i| self.diag[i] + radius[i])
            .fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }
}

/// Basis layout: emitters, then one-polariton channels, then (without the
/// RWA) doubly excited states per emitter pair and channel.
fn hamiltonian(model: &PseudomodeModel, rwa: bool, shift: f64) -> (SparseHamiltonian, usize) {
    let n = model.n_emitters();
    let w = &model.transition;
    let mut diag: Vec<f64> = w.iter().map(|x| x - shift).collect();
    let mut edges = Vec::new();
    let chans: Vec<(f64, &Vec<f64>)> = model
        .frequencies
        .iter()
        .zip(&model.couplings)
        .flat_map(|(&f, cs)| cs.iter().map(move |g| (f, g)))
        .collect();
    for (f, g) in &chans {
        let s = diag.len();
        diag.push(f - shift);
        for a in 0..n {
            if g[a] != 0.0 {
                edges.push((a, s, g[a]));
            }
        }
    }
    let photon_end = diag.len();
    if !rwa {
        for a in 0..n {
            for b in a + 1..n {
                for (f, g) in &chans {
                    let s = diag.len();
                    diag.push(f + w[a] + w[b] - shift);
                    // |E_ab,1⟩ is reached from |E_a⟩ by exciting b, and vice versa
                    edges.push((a, s, g[b]));
                    edges.push((b, s, g[a]));
                }
            }
        }
    }
    (SparseHamiltonian { diag, edges }, photon_end)
}

/// J_k(x) for k = 0..=kmax by Miller's downward recurrence.
fn bessel_sequence(x: f64, kmax: usize) -> Vec<f64> {
    let mut out = vec![0.0; kmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let start = (kmax.max(x as usize) + 30 + (x.sqrt() * 10.0) as usize) & !1;
    let mut jp1 = 0.0;
    let mut j = 1e-300;
    let mut norm = 0.0;
    let mut vals = vec![0.0; start + 1];
    vals[start] = j;
    for k in (1..=start).rev() {
        let jm1 = 2.0 * k as f64 / x * j - jp1;
        jp1 = j;
        j = jm1;
        vals[k - 1] = j;
        if j.abs() > 1e250 {
            for v in vals[k - 1..].iter_mut() {
                *v *= 1e-250;
            }
            jp1 *= 1e-250;
            j *= 1e-250;
        }
    }
    for (k, v) in vals.iter().enumerate() {
        if k == 0 {
            norm += v;
        } else if k % 2 == 0 {
            norm += 2.0 * v;
        }
    }
    for k in 0..=kmax {
        out[k] = vals[k] / norm;
    }
    out
}

/// Result of one brute-force propagation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleRun {
    pub trajectory: Trajectory,
    /// Largest |‖ψ(t)‖² − ‖ψ(0)‖²| over the grid.
    pub max_norm_error: f64,
    /// One-polariton sector population at each time.
    pub photon_population: Vec<f64>,
    /// Doubly excited sector population at each time (zero under the RWA).
    pub doubly_excited_population: Vec<f64>,
}

pub fn solve_oracle(
    model: &PseudomodeModel,
    initial: &[Complex64],
    rwa: bool,
    grid: &TimeGrid,
) -> Result<OracleRun> {
    let n = model.n_emitters();
    if initial.len() != n {
        return Err(Error::InvalidArgument("initial state size mismatch".into()));
    }
    let rec = model.recurrence_time();
    if grid.t_max > rec {
        return Err(Error::RecurrenceHorizonExceeded {
            t_max: grid.t_max,
            recurrence: rec,
        });
    }
    let shift = model.transition.iter().sum::<f64>() / n as f64;
    let (h, photon_end) = hamiltonian(model, rwa, shift);
    let dim = h.dim();
    let (lo, hi) = h.bounds();
    let center = 0.5 * (lo + hi);
    let radius = (0.5 * (hi - lo)).max(1e-12) * 1.001;
    let dt = grid.dt;
    let x = radius * dt;
    let kmax = (x + 20.0 + 5.0 * x.cbrt()) as usize;
    let bessel = bessel_sequence(x, kmax);
    let nterms = (0..=kmax)
        .rev()
        .find(|&k| bessel[k].abs() > 1e-18)
        .map_or(1, |k| k + 1);
    let mut coef: Vec<Complex64> = Vec::with_capacity(nterms);
    let mut ipow = Complex64::new(1.0, 0.0);
    for (k, &b) in bessel.iter().take(nterms).enumerate() {
        coef.push(ipow * if k == 0 { b } else { 2.0 * b });
        ipow *= Complex64::new(0.0, -1.0);
    }
    let global = Complex64::from_polar(1.0, -center * dt);

    // H̃ = (H − center)/radius
    let apply_scaled = |v: &[Complex64], out: &mut [Complex64]| {
        h.apply(v, out);
        for i in 0..v.len() {
            out[i] = (out[i] - v[i] * center) / radius;
        }
    };

    let mut psi = vec![Complex64::new(0.0, 0.0); dim];
    psi[..n].copy_from_slice(initial);
    let norm0: f64 = psi.iter().map(|z| z.norm_sqr()).sum();

    let steps = grid.n_steps();
    let times = grid.times();
    let mut amps = vec![Vec::with_capacity(steps + 1); n];
    let mut photon = Vec::with_capacity(steps + 1);
    let mut doubly = Vec::with_capacity(steps + 1);
    let mut max_norm_error: f64 = 0.0;

    let mut t0 = vec![Complex64::new(0.0, 0.0); dim];
    let mut t1 = vec![Complex64::new(0.0, 0.0); dim];
    let mut t2 = vec![Complex64::new(0.0, 0.0); dim];
    let mut acc = vec![Complex64::new(0.0, 0.0); dim];
    for k in 0..=steps {
        if k > 0 {
            t0.copy_from_slice(&psi);
            for i in 0..dim {
                acc[i] = t0[i] * coef[0];
            }
            if nterms > 1 {
                apply_scaled(&t0, &mut t1);
                for i in 0..dim {
                    acc[i] += t1[i] * coef[1];
                }
                for c in coef.iter().skip(2) {
                    apply_scaled(&t1, &mut t2);
                    for i in 0..dim {
                        t2[i] = t2[i] * 2.0 - t0[i];
                        acc[i] += t2[i] * *c;
                    }
                    std::mem::swap(&mut t0, &mut t1);
                    std::mem::swap(&mut t1, &mut t2);
                }
            }
            for i in 0..dim {
                psi[i] = acc[i] * global;
            }
        }
        let t = times[k];
        for a in 0..n {
            let c = psi[a] * Complex64::from_polar(1.0, (model.transition[a] - shift) * t);
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::NonFiniteAmplitude(a));
            }
            amps[a].push(c);
        }
        let p: f64 = psi[n..photon_end].iter().map(|z| z.norm_sqr()).sum();
        let d: f64 = psi[photon_end..].iter().map(|z| z.norm_sqr()).sum();
        let e: f64 = psi[..n].iter().map(|z| z.norm_sqr()).sum();
        max_norm_error = max_norm_error.max((e + p + d - norm0).abs());
        photon.push(p);
        doubly.push(d);
    }
    Ok(OracleRun {
        trajectory: Trajectory::new(times, amps),
        max_norm_error,
        photon_population: photon,
        doubly_excited_population: doubly,
    })
}

/// Oracle run for a configuration: the total spectral density on the
/// configured band is discretised into `oracle_modes` pseudomodes (default 400).
pub fn solve_oracle_config(config: &ValidatedConfig) -> Result<OracleRun> {
    let omegas = config.frequency_grid.points();
    let opts = SommerfeldOptions {
        rel_tol: config.tolerances.quadrature,
        ..Default::default()
    };
    let spectra = spectral_matrix(
        &config.emitters,
        &omegas,
        &config.environment,
        Part::Total,
        opts,
    )?;
    let transition: Vec<f64> = config.emitters.iter().map(|e| e.omega).collect();
    let model = build_pseudomodes(&spectra, &transition, config.oracle_modes.unwrap_or(400))?;
    solve_oracle(
        &model,
        &config.initial_state(),
        config.rwa,
        &config.time_grid,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::Lorentzian;
    use crate::model::Emitter;

    fn uniform(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect()
    }

    fn one() -> Vec<Complex64> {
        vec![Complex64::new(1.0, 0.0)]
    }

    #[test]
    fn bessel_values() {
        // J_0(1), J_1(1), J_5(10) from standard tables
        let j = bessel_sequence(1.0, 3);
        assert!((j[0] - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((j[1] - 0.440_050_585_744_933_5).abs() < 1e-15);
        let j = bessel_sequence(10.0, 6);
        assert!((j[5] - (-0.234_061_528_186_793_6)).abs() < 1e-14);
    }

    #[test]
    fn single_emitter_couplings_are_square_roots() {
        let w = uniform(1.0, 2.0, 11);
        let set = SpectralSet::from_fn(1, &w, |_, _, x| x * x);
        let m = build_pseudomodes(&set, &[1.5], 10).unwrap();
        for (j, &f) in m.frequencies.iter().enumerate() {
            // linear interpolation of ω² between grid nodes
            let lo = ((f - 1.0) / 0.1).floor() * 0.1 + 1.0;
            let jv = lo * lo + ((lo + 0.1).powi(2) - lo * lo) * (f - lo) / 0.1;
            assert_eq!(m.couplings[j].len(), 1);
            assert!((m.couplings[j][0][0].abs() - (jv * 0.1).sqrt()).abs() < 1e-14);
        }
        assert_eq!(m.basis_dimension(true), 11);
        assert_eq!(m.basis_dimension(false), 11);
    }

    #[test]
    fn factorisation_reproduces_spectral_matrix() {
        let w = uniform(2.0, 5.0, 31);
        let l = Lorentzian {
            g: 0.1,
            lambda: 0.3,
            omega_c: 3.5,
        };
        let set = SpectralSet::from_fn(2, &w, |a, b, x| {
            if a == b {
                l.density(x)
            } else {
                0.6 * l.density(x)
            }
        });
        let m = build_pseudomodes(&set, &[3.5, 3.5], 30).unwrap();
        for j in 0..30 {
            let r = m.reconstructed(j);
            let exact = DMatrix::from_fn(2, 2, |a, b| {
                interpolate(&set.omegas, set.get(a, b), m.frequencies[j]) * m.spacing
            });
            assert!((r - exact.clone()).abs().max() < 1e-10 * exact.abs().max());
        }
        assert_eq!(m.n_channels(), 60);
        assert_eq!(m.basis_dimension(false), 2 + 60 + 60);
    }

    #[test]
    fn rank_one_pair_dimension() {
        let w = uniform(2.0, 5.0, 31);
        let set = SpectralSet::from_fn(2, &w, |_, _, _| 0.01);
        let m = build_pseudomodes(&set, &[3.5, 3.5], 50).unwrap();
        assert_eq!(m.basis_dimension(true), 2 + 50);
        assert_eq!(m.basis_dimension(false), 2 + 50 + 50);
    }

    #[test]
    fn non_psd_matrix_is_reported() {
        let w = uniform(2.0, 5.0, 31);
        let set = SpectralSet::from_fn(2, &w, |a, b, _| if a == b { 1.0 } else { 1.5 });
        let r = build_pseudomodes(&set, &[3.5, 3.5], 10);
        assert!(matches!(r, Err(Error::NonPsdSpectralMatrix { .. })));
    }

    #[test]
    fn vacuum_pair_spectral_matrix_is_psd() {
        let a = Emitter::new([0.0, 0.0, 5.0], 3.0, [0.0, 0.0, 10.0]);
        let b = Emitter::new([50.0, 0.0, 5.0], 3.0, [0.0, 0.0, 10.0]);
        let w = uniform(0.5, 6.0, 56);
        let set = spectral_matrix(
            &[a, b],
            &w,
            &crate::model::Environment::Vacuum,
            Part::Total,
            SommerfeldOptions::default(),
        )
        .unwrap();
        for i in 0..w.len() {
            let m = DMatrix::from_fn(2, 2, |x, y| set.get(x, y)[i]);
            let e = SymmetricEigen::new(m).eigenvalues;
            assert!(e.min() >= -1e-12 * e.max(), "{e}");
        }
        assert!(build_pseudomodes(&set, &[3.0, 3.0], 100).is_ok());
    }

    #[test]
    fn zero_coupling_keeps_amplitudes() {
        let set = SpectralSet::zeros(2, &uniform(1.0, 5.0, 5));
        let m = build_pseudomodes(&set, &[3.0, 3.2], 20).unwrap();
        let init = vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let run = solve_oracle(
            &m,
            &init,
            false,
            &TimeGrid {
                t_max: 20.0,
                dt: 0.1,
            },
        )
        .unwrap();
        for a in 0..2 {
            for z in &run.trajectory.amplitudes[a] {
                assert!((z - init[a]).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn flat_band_gives_golden_rule_decay() {
        let j0 = 0.004;
        let w0 = 10.0;
        let set = SpectralSet::from_fn(1, &uniform(w0 - 6.0, w0 + 6.0, 3), |_, _, _| j0);
        let m = build_pseudomodes(&set, &[w0], 3000).unwrap();
        let rate = 2.0 * std::f64::consts::PI * j0;
        let grid = TimeGrid {
            t_max: 4.0 / rate,
            dt: 0.05,
        };
        let run = solve_oracle(&m, &one(), true, &grid).unwrap();
        // the missing tails |ω| > W bound the amplitude error by 2Γ/(πW)
        let tol = 4.0 * rate / (std::f64::consts::PI * 6.0);
        for (k, &t) in run.trajectory.times.iter().enumerate() {
            let d = (run.trajectory.populations[0][k] - (-rate * t).exp()).abs();
            assert!(d < tol, "t={t} d={d} tol={tol}");
        }
        assert!(run.max_norm_error < 1e-10);
    }

    #[test]
    fn horizon_is_enforced() {
        let set = SpectralSet::from_fn(1, &uniform(3.0, 4.0, 3), |_, _, _| 0.01);
        let m = build_pseudomodes(&set, &[3.5], 10).unwrap();
        let r = solve_oracle(
            &m,
            &one(),
            true,
            &TimeGrid {
                t_max: 100.0,
                dt: 0.1,
            },
        );
        assert!(matches!(r, Err(Error::RecurrenceHorizonExceeded { .. })));
    }

    #[test]
    fn counter_rotating_sector_is_populated_only_without_rwa() {
        let l = Lorentzian {
            g: 0.1,
            lambda: 0.1,
            omega_c: 3.5,
        };
        let set = SpectralSet::from_fn(2, &uniform(2.5, 4.5, 201), |a, b, x| {
            if a == b {
                l.density(x)
            } else {
                0.6 * l.density(x)
            }
        });
        let m = build_pseudomodes(&set, &[3.5, 3.5], 200).unwrap();
        let init = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let grid = TimeGrid {
            t_max: 30.0,
            dt: 0.05,
        };
        let no = solve_oracle(&m, &init, false, &grid).unwrap();
        let yes = solve_oracle(&m, &init, true, &grid).unwrap();
        assert!(no.max_norm_error < 1e-10 && yes.max_norm_error < 1e-10);
        assert!(no.doubly_excited_population.iter().any(|&p| p > 1e-8));
        assert!(yes.doubly_excited_population.iter().all(|&p| p == 0.0));
        // RWA: emitter + photon population is exactly conserved
        for k in 0..yes.trajectory.len() {
            let s = yes.trajectory.total[k] + yes.photon_population[k];
            assert!((s - 1.0).abs() < 1e-10);
        }
    }
}
