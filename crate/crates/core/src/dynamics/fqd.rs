use nalgebra::DMatrix;
use num_complex::Complex64;

use super::Trajectory;
use crate::error::{Error, Result};
use crate::greens::{spectral_matrix, Part, SommerfeldOptions, SpectralSet};
use crate::kernels::{build_kernels, KernelSet, KernelTable};
use crate::model::{Emitter, Environment, TimeGrid, ValidatedConfig};
use crate::weak::{gamma0, pair_coupling, WeakOptions};

const MAX_CORRECTOR_ITERATIONS: usize = 60;

/// Markovian free-space part of the equations of motion.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovTerms {
    /// Γ⁰_α (eV).
    pub decay: Vec<f64>,
    /// V⁰_DDI (or Ṽ⁰_DDI) for α ≠ β; the diagonal is ignored.
    pub coupling: DMatrix<Complex64>,
}

impl MarkovTerms {
    pub fn zero(n: usize) -> Self {
        MarkovTerms {
            decay: vec![0.0; n],
            coupling: DMatrix::from_element(n, n, Complex64::new(0.0, 0.0)),
        }
    }

    /// Γ⁰ and the free-space dipole-dipole couplings of a set of emitters.
    pub fn free_space(emitters: &[Emitter], rwa: bool, opts: &WeakOptions) -> Result<Self> {
        let n = emitters.len();
        let mut m = Self::zero(n);
        for a in 0..n {
            m.decay[a] = gamma0(&emitters[a]);
            for b in (0..n).filter(|&b| b != a) {
                let p = pair_coupling(emitters, a, b, &Environment::Vacuum, Part::Free, opts)?;
                m.coupling[(a, b)] = if rwa { p.v_ddi_rwa() } else { p.v_ddi() };
            }
        }
        Ok(m)
    }
}

/// Everything the Volterra propagator needs.
#[derive(Debug, Clone)]
pub struct FqdProblem {
    pub transition: Vec<f64>,
    pub markov: MarkovTerms,
    pub kernels: KernelSet,
    pub initial: Vec<Complex64>,
    pub time_grid: TimeGrid,
    pub corrector_tol: f64,
}

/// One history convolution: Σ_n w_n f(t_N − nΔt) with f a source series.
struct Conv<'a> {
    table: &'a KernelTable,
    /// interior weights w_n = falling_n + rising_{n−1}, n ≥ 1
    interior: Vec<Complex64>,
    source: usize,
}

impl<'a> Conv<'a> {
    fn new(table: &'a KernelTable, source: usize) -> Self {
        let interior = (1..table.support)
            .map(|n| table.falling[n] + table.rising[n - 1])
            .collect();
        Conv {
            table,
            interior,
            source,
        }
    }

    /// History part (n ≥ 1) at step `step`.
    fn history(&self, f: &[Complex64], step: usize) -> Complex64 {
        let len = step.min(self.table.support);
        if len == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let mut acc = self.table.rising[len - 1] * f[step - len];
        for n in 1..len {
            acc += self.interior[n - 1] * f[step - n];
        }
        acc
    }

    fn head(&self) -> Complex64 {
        self.table.falling[0]
    }
}

/// Trapezoidal product-integration scheme with an explicit predictor and a
/// fixed-point corrector on the newest point. The free-space decay is
/// carried by an exact integrating factor.
pub fn propagate_fqd(problem: &FqdProblem) -> Result<Trajectory> {
    let n = problem.transition.len();
    let ks = &problem.kernels;
    if ks.n_emitters() != n || problem.initial.len() != n || problem.markov.decay.len() != n {
        return Err(Error::InvalidArgument("inconsistent emitter count".into()));
    }
    let dt = problem.time_grid.dt;
    if (ks.dt - dt).abs() > 1e-12 * dt {
        return Err(Error::InvalidArgument(format!(
            "kernel step {} differs from time step {dt}",
            ks.dt
        )));
    }
    let steps = problem.time_grid.n_steps();
    let w = &problem.transition;

    // sources: index a*n+b holds C_b(t)·e^{−i(ω_b−ω_a)t}
    let phase =
        |a: usize, b: usize, k: usize| Complex64::from_polar(1.0, -(w[b] - w[a]) * k as f64 * dt);
    let mut sources = vec![Vec::with_capacity(steps + 1); n * n];

    // memory terms entering equation α
    let mut terms: Vec<Vec<Conv>> = (0..n).map(|_| Vec::new()).collect();
    for a in 0..n {
        for b in 0..n {
            let t = &ks.co[a][b];
            if !t.is_zero() {
                terms[a].push(Conv::new(t, a * n + b));
            }
        }
        if let Some(cr) = &ks.cr {
            for b in (0..n).filter(|&b| b != a) {
                if !cr[b][b].is_zero() {
                    terms[a].push(Conv::new(&cr[b][b], a * n + a));
                }
                if !cr[b][a].is_zero() {
                    terms[a].push(Conv::new(&cr[b][a], a * n + b));
                }
            }
        }
    }

    // the diagonal decay −Γ⁰/2 is integrated exactly through the factor q
    let q: Vec<f64> = problem
        .markov
        .decay
        .iter()
        .map(|g| (-0.5 * g * dt).exp())
        .collect();
    let markov = |c: &[Complex64], k: usize, out: &mut [Complex64]| {
        for a in 0..n {
            let mut d = Complex64::new(0.0, 0.0);
            for b in (0..n).filter(|&b| b != a) {
                let v = problem.markov.coupling[(a, b)];
                if v != Complex64::new(0.0, 0.0) {
                    d += Complex64::new(0.0, -1.0) * v * phase(a, b, k) * c[b];
                }
            }
            out[a] = d;
        }
    };

    let mut amps: Vec<Vec<Complex64>> = vec![Vec::with_capacity(steps + 1); n];
    let mut c = problem.initial.clone();
    for a in 0..n {
        amps[a].push(c[a]);
        for b in 0..n {
            sources[a * n + b].push(c[b]);
        }
    }
    let mut f_prev = vec![Complex64::new(0.0, 0.0); n];
    markov(&c, 0, &mut f_prev);

    let mut hist = vec![Complex64::new(0.0, 0.0); n];
    let mut f_new = vec![Complex64::new(0.0, 0.0); n];
    for k in 1..=steps {
        for a in 0..n {
            hist[a] = terms[a]
                .iter()
                .map(|t| t.history(&sources[t.source], k))
                .sum();
        }
        let eval = |cand: &[Complex64], out: &mut [Complex64]| {
            markov(cand, k, out);
            for a in 0..n {
                let mut m = hist[a];
                for t in &terms[a] {
                    let (sa, sb) = (t.source / n, t.source % n);
                    m += t.head() * phase(sa, sb, k) * cand[sb];
                }
                out[a] -= m;
            }
        };
        // predictor
        let mut cand: Vec<Complex64> = (0..n).map(|a| (c[a] + f_prev[a] * dt) * q[a]).collect();
        let mut residual = f64::INFINITY;
        let mut iterations = 0;
        while residual > problem.corrector_tol {
            if iterations == MAX_CORRECTOR_ITERATIONS {
                return Err(Error::StepRejected {
                    step: k,
                    time: k as f64 * dt,
                    residual,
                });
            }
            eval(&cand, &mut f_new);
            let next: Vec<Complex64> = (0..n)
                .map(|a| (c[a] + f_prev[a] * (0.5 * dt)) * q[a] + f_new[a] * (0.5 * dt))
                .collect();
            let scale = next.iter().fold(1.0f64, |m, z| m.max(z.norm()));
            residual = next
                .iter()
                .zip(&cand)
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max)
                / scale;
            cand = next;
            iterations += 1;
        }
        eval(&cand, &mut f_new);
        for a in 0..n {
            if !cand[a].re.is_finite() || !cand[a].im.is_finite() {
                return Err(Error::NonFiniteAmplitude(a));
            }
        }
        c = cand;
        f_prev.copy_from_slice(&f_new);
        for a in 0..n {
            amps[a].push(c[a]);
            for b in 0..n {
                sources[a * n + b].push(c[b] * phase(a, b, k));
            }
        }
    }
    Ok(Trajectory::new(problem.time_grid.times(), amps))
}

/// Tabulates J^Sc for the configured emitters and grid. Vacuum gives zeros.
pub fn scattering_spectra(config: &ValidatedConfig) -> Result<SpectralSet> {
    let omegas = config.frequency_grid.points();
    if config.environment.is_vacuum() {
        return Ok(SpectralSet::zeros(config.n_emitters(), &omegas));
    }
    let opts = SommerfeldOptions {
        rel_tol: config.tolerances.quadrature,
        ..Default::default()
    };
    spectral_matrix(
        &config.emitters,
        &omegas,
        &config.environment,
        Part::Scattering,
        opts,
    )
}

/// Builds the FQD problem from a validated configuration and precomputed
/// scattering spectra.
pub fn fqd_problem(config: &ValidatedConfig, spectra: &SpectralSet) -> Result<FqdProblem> {
    let transition: Vec<f64> = config.emitters.iter().map(|e| e.omega).collect();
    let opts = WeakOptions::default();
    let markov = MarkovTerms::free_space(&config.emitters, config.rwa, &opts)?;
    let dt = config.time_grid.dt;
    let tau = config.memory_window().max(dt);
    let mut kernels = build_kernels(spectra, &transition, dt, tau, config.rwa)?;
    if let Some(tol) = config.tolerances.memory {
        kernels.truncate(tol)?;
    }
    Ok(FqdProblem {
        transition,
        markov,
        kernels,
        initial: config.initial_state(),
        time_grid: config.time_grid,
        corrector_tol: config.tolerances.corrector,
    })
}

pub fn solve_fqd(config: &ValidatedConfig) -> Result<Trajectory> {
    let spectra = scattering_spectra(config)?;
    propagate_fqd(&fqd_problem(config, &spectra)?)
}
