//! Subcommand implementations. Every command validates all of its inputs and
//! finishes every computation before the first file is written.

use std::path::{Path, PathBuf};
use std::time::Instant;

use mqed::dynamics::{fmt17, markov_report, simulate as run_method, Trajectory};
use mqed::greens::{coupling_strength, greens_tensor, Part, SommerfeldOptions};
use mqed::model::{Environment, Method, SystemConfig, ValidatedConfig};
use mqed::presets::Preset;
use mqed::weak::WeakCouplingReport;
use nalgebra::Vector3;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::{config_hash, load_config, validate, Overrides};
use crate::error::{CliError, CliResult};
use crate::output::{write_artifacts, Artifact, RunManifest, SubConfig};
use crate::plotscript;

fn rwa_tag(rwa: bool) -> &'static str {
    if rwa {
        "rwa"
    } else {
        "norwa"
    }
}

fn stem_of(path: &Path) -> String {
    path.file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("run")
        .trim_end_matches(".manifest")
        .to_string()
}

fn pool(jobs: usize) -> CliResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {jobs} workers: {e}")))
}

/// Runs validated configurations concurrently; results keep the input order.
fn run_all(configs: &[ValidatedConfig], jobs: usize) -> CliResult<Vec<(Trajectory, f64)>> {
    pool(jobs)?.install(|| {
        configs
            .par_iter()
            .map(|c| {
                let start = Instant::now();
                log::info!("running {} (rwa = {})", c.method, c.rwa);
                let t = run_method(c)?;
                Ok((t, start.elapsed().as_secs_f64()))
            })
            .collect::<CliResult<Vec<_>>>()
    })
}

#[derive(Debug, Clone)]
pub struct SimulateArgs {
    pub config: Option<PathBuf>,
    pub preset: Option<Preset>,
    pub overrides: Overrides,
    pub out: PathBuf,
    pub jobs: usize,
}

pub fn simulate(args: &SimulateArgs) -> CliResult<Vec<PathBuf>> {
    let jobs: Vec<(String, SystemConfig)> = match (&args.config, args.preset) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "give either a config file or --preset, not both".into(),
            ))
        }
        (None, None) => {
            return Err(CliError::Usage(
                "a config file or --preset is required".into(),
            ))
        }
        (Some(path), None) => {
            let mut c = load_config(path)?;
            args.overrides.apply(&mut c);
            let base = stem_of(path);
            let suffix = format!("_{}_{}", c.method, rwa_tag(c.rwa));
            let stem = if base.ends_with(&suffix) {
                base
            } else {
                base + &suffix
            };
            vec![(stem, c)]
        }
        (None, Some(p)) => {
            let methods = args
                .overrides
                .method
                .map_or(vec![Method::Fqd, Method::Maqd], |m| vec![m]);
            let rwas = args.overrides.rwa.map_or(vec![false, true], |r| vec![r]);
            let mut v = Vec::new();
            for &m in &methods {
                for &r in &rwas {
                    let mut c = p.config(m, r);
                    args.overrides.apply(&mut c);
                    v.push((format!("{}_{}_{}", p.name(), m, rwa_tag(r)), c));
                }
            }
            v
        }
    };
    let validated = jobs
        .iter()
        .map(|(_, c)| validate(c))
        .collect::<CliResult<Vec<_>>>()?;
    let results = run_all(&validated, args.jobs)?;
    let artifacts = jobs
        .into_iter()
        .zip(results)
        .map(|((stem, c), (traj, secs))| {
            let mut manifest = RunManifest::new("simulate", &c, secs);
            manifest.preset = args.preset.map(|p| p.name().to_string());
            Artifact {
                stem,
                csv: traj.to_csv_string(),
                manifest,
            }
        })
        .collect();
    write_artifacts(&args.out, artifacts)
}

pub const WEAK_HEADER: &str = "kind,alpha,beta,gamma0,gamma,shift_excited,shift_ground,\
Re_V_RDDI,Im_V_RDDI,V_ORC,V_QC,Re_V_DDI,Re_V_DDI_RWA,ratio";

/// One row per emitter, then one per ordered pair; indices are 1-based.
pub fn weak_csv(report: &WeakCouplingReport) -> String {
    let mut s = String::from(WEAK_HEADER);
    s.push('\n');
    for (i, e) in report.emitters.iter().enumerate() {
        s.push_str(&format!(
            "emitter,{},,{},{},{},{},,,,,,,\n",
            i + 1,
            fmt17(e.gamma0),
            fmt17(e.gamma),
            fmt17(e.shift_excited),
            fmt17(e.shift_ground)
        ));
    }
    for p in &report.pairs {
        let (v, vr) = (p.v_ddi(), p.v_ddi_rwa());
        s.push_str(&format!(
            "pair,{},{},,,,,{},{},{},{},{},{},{}\n",
            p.alpha + 1,
            p.beta + 1,
            fmt17(p.v_rddi.re),
            fmt17(p.v_rddi.im),
            fmt17(p.v_orc),
            fmt17(p.v_qc),
            fmt17(v.re),
            fmt17(vr.re),
            fmt17(v.re / vr.re)
        ));
    }
    s
}

pub fn weakcoupling(path: &Path, overrides: Overrides, out: &Path) -> CliResult<Vec<PathBuf>> {
    let mut c = load_config(path)?;
    overrides.apply(&mut c);
    let v = validate(&c)?;
    let start = Instant::now();
    let report = markov_report(&v)?;
    let manifest = RunManifest::new("weakcoupling", &c, start.elapsed().as_secs_f64());
    write_artifacts(
        out,
        vec![Artifact {
            stem: format!("{}_weakcoupling", stem_of(path)),
            csv: weak_csv(&report),
            manifest,
        }],
    )
}

const AXES: [&str; 3] = ["x", "y", "z"];

pub fn greens_header() -> String {
    let mut cols = vec!["omega".to_string()];
    for a in AXES {
        for b in AXES {
            cols.push(format!("Re_G_{a}{b}"));
            cols.push(format!("Im_G_{a}{b}"));
        }
    }
    cols.push("J".into());
    cols.join(",")
}

#[derive(Debug, Clone, Copy)]
pub struct GreensArgs {
    /// 1-based emitter indices.
    pub alpha: usize,
    pub beta: Option<usize>,
    /// Defaults to the total tensor between distinct emitters and the
    /// scattering part at a single emitter.
    pub part: Option<Part>,
}

pub fn greens(
    path: &Path,
    args: GreensArgs,
    overrides: Overrides,
    out: &Path,
) -> CliResult<Vec<PathBuf>> {
    let mut c = load_config(path)?;
    overrides.apply(&mut c);
    let v = validate(&c)?;
    let n = v.emitters.len();
    let beta = args.beta.unwrap_or(if n > 1 { 2 } else { 1 });
    for i in [args.alpha, beta] {
        if i == 0 || i > n {
            return Err(CliError::Usage(format!(
                "emitter index {i} outside 1..={n}"
            )));
        }
    }
    let (a, b) = (&v.emitters[args.alpha - 1], &v.emitters[beta - 1]);
    let part = args.part.unwrap_or(if args.alpha == beta {
        Part::Scattering
    } else {
        Part::Total
    });
    let opts = SommerfeldOptions {
        rel_tol: v.tolerances.quadrature,
        ..Default::default()
    };
    let start = Instant::now();
    let rows = v
        .frequency_grid
        .points()
        .par_iter()
        .map(|&w| -> CliResult<String> {
            let g = greens_tensor(
                &v.environment,
                &a.pos(),
                &b.pos(),
                Complex64::new(w, 0.0),
                part,
                opts,
            )?;
            let j = coupling_strength(a, b, w, &v.environment, part, opts)?;
            let mut row = vec![fmt17(w)];
            for i in 0..3 {
                for k in 0..3 {
                    row.push(fmt17(g.value[(i, k)].re));
                    row.push(fmt17(g.value[(i, k)].im));
                }
            }
            row.push(fmt17(j));
            Ok(row.join(","))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut csv = greens_header();
    csv.push('\n');
    for r in rows {
        csv.push_str(&r);
        csv.push('\n');
    }
    let manifest = RunManifest::new("greens", &c, start.elapsed().as_secs_f64());
    write_artifacts(
        out,
        vec![Artifact {
            stem: format!("{}_greens_{}_{}", stem_of(path), args.alpha, beta),
            csv,
            manifest,
        }],
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Distance between the first two emitters along their current separation.
    D,
    /// Common height of all emitters above the surface.
    H,
    /// Transition energy of the second emitter relative to the first.
    Detuning,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::D => "d",
            SweepAxis::H => "h",
            SweepAxis::Detuning => "detuning",
        }
    }

    fn check(self, c: &SystemConfig) -> CliResult<()> {
        match self {
            SweepAxis::D | SweepAxis::Detuning if c.emitters.len() < 2 => Err(CliError::Usage(
                format!("axis {} needs at least two emitters", self.name()),
            )),
            SweepAxis::D if c.emitters[0].position == c.emitters[1].position => Err(
                CliError::Usage("axis d needs distinct emitter positions".into()),
            ),
            SweepAxis::H if c.environment == Environment::Vacuum => Err(CliError::Usage(
                "axis h needs a half-space environment".into(),
            )),
            _ => Ok(()),
        }
    }

    pub fn apply(self, c: &mut SystemConfig, value: f64) {
        match self {
            SweepAxis::D => {
                let r0 = c.emitters[0].pos();
                let dir = (c.emitters[1].pos() - r0).normalize();
                let r1: Vector3<f64> = r0 + dir * value;
                c.emitters[1].position = [r1.x, r1.y, r1.z];
            }
            SweepAxis::H => {
                for e in &mut c.emitters {
                    e.position[2] = value;
                }
            }
            SweepAxis::Detuning => c.emitters[1].omega = c.emitters[0].omega + value,
        }
    }
}

/// `start:stop:count`, both ends included.
pub fn parse_range(s: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::Usage(format!("range {s:?} is not start:stop:count"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    Ok(match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect(),
    })
}

#[derive(Debug, Clone)]
pub struct SweepArgs {
    pub config: PathBuf,
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub overrides: Overrides,
    pub out: PathBuf,
    pub jobs: usize,
}

pub fn sweep(args: &SweepArgs) -> CliResult<Vec<PathBuf>> {
    if args.values.is_empty() {
        return Err(CliError::Usage("empty sweep range".into()));
    }
    let mut base = load_config(&args.config)?;
    args.overrides.apply(&mut base);
    validate(&base)?;
    args.axis.check(&base)?;
    let subs: Vec<SystemConfig> = args
        .values
        .iter()
        .map(|&x| {
            let mut c = base.clone();
            args.axis.apply(&mut c, x);
            c
        })
        .collect();
    let validated = subs.iter().map(validate).collect::<CliResult<Vec<_>>>()?;
    let start = Instant::now();
    let results = run_all(&validated, args.jobs)?;
    let n = base.emitters.len();
    let mut csv = format!("{},{}\n", args.axis.name(), Trajectory::csv_header(n));
    for (&x, (traj, _)) in args.values.iter().zip(&results) {
        let prefix = fmt17(x);
        for line in traj.to_csv_string().lines().skip(1) {
            csv.push_str(&prefix);
            csv.push(',');
            csv.push_str(line);
            csv.push('\n');
        }
    }
    let mut manifest = RunManifest::new("sweep", &base, start.elapsed().as_secs_f64());
    manifest.sub_configs = args
        .values
        .iter()
        .zip(&subs)
        .map(|(&value, c)| SubConfig {
            value,
            sha256: config_hash(c),
        })
        .collect();
    write_artifacts(
        &args.out,
        vec![Artifact {
            stem: format!("{}_sweep_{}", stem_of(&args.config), args.axis.name()),
            csv,
            manifest,
        }],
    )
}

/// Writes `<first csv stem>.py` into `out`, or next to the first CSV.
pub fn plotscript(csvs: &[PathBuf], out: Option<&Path>) -> CliResult<PathBuf> {
    let first = csvs
        .first()
        .ok_or_else(|| CliError::Usage("no CSV files given".into()))?;
    let dir = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| first.parent().map(Path::to_path_buf).unwrap_or_default());
    let script_path = dir.join(format!("{}.py", stem_of(first)));
    let script = plotscript::render(csvs, &script_path)?;
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    std::fs::write(&script_path, script).map_err(|e| CliError::io(&script_path, e))?;
    Ok(script_path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use mqed::model::{Emitter, TimeGrid};

    fn vacuum_pair() -> SystemConfig {
        let mut c = Preset::Fig3Weak.config(Method::Maqd, false);
        c.environment = Environment::Vacuum;
        c.memory_cutoff = None;
        c.time_grid = TimeGrid {
            t_max: 10.0,
            dt: 1.0,
        };
        c
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("1:10:10").unwrap().len(), 10);
        assert_eq!(parse_range("1:10:10").unwrap()[9], 10.0);
        assert_eq!(parse_range("2:3:1").unwrap(), vec![2.0]);
        assert!(parse_range("1:2:0").unwrap().is_empty());
        assert!(parse_range("1:2").is_err());
        assert!(parse_range("a:2:3").is_err());
    }

    #[test]
    fn axes_modify_geometry() {
        let mut c = vacuum_pair();
        SweepAxis::D.apply(&mut c, 7.0);
        assert_eq!(c.emitters[1].position, [7.0, 0.0, 10.0]);
        SweepAxis::H.apply(&mut c, 3.0);
        assert!(c.emitters.iter().all(|e| e.position[2] == 3.0));
        SweepAxis::Detuning.apply(&mut c, 0.1);
        assert!((c.emitters[1].omega - c.emitters[0].omega - 0.1).abs() < 1e-15);
    }

    #[test]
    fn axis_applicability() {
        let c = vacuum_pair();
        assert!(SweepAxis::H.check(&c).is_err());
        assert!(SweepAxis::D.check(&c).is_ok());
        let mut single = c.clone();
        single.emitters.truncate(1);
        assert!(SweepAxis::Detuning.check(&single).is_err());
    }

    #[test]
    fn weak_csv_layout() {
        let a = Emitter::new([0.0, 0.0, 5.0], 3.0, [0.0, 0.0, 5.0]);
        let b = Emitter::new([2.0, 0.0, 5.0], 3.0, [0.0, 0.0, 5.0]);
        let report = mqed::weak::weak_coupling_report(
            &[a, b],
            &Environment::Vacuum,
            Part::Total,
            &Default::default(),
        )
        .unwrap();
        let csv = weak_csv(&report);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 1 + 2 + 2);
        let width = WEAK_HEADER.split(',').count();
        assert!(lines.iter().all(|l| l.split(',').count() == width));
        assert!(lines[1].starts_with("emitter,1,,"));
        assert!(lines[3].starts_with("pair,1,2,"));
        let orc: f64 = lines[3].split(',').nth(9).unwrap().parse().unwrap();
        assert_eq!(orc, 0.0);
    }

    #[test]
    fn greens_header_width() {
        assert_eq!(greens_header().split(',').count(), 1 + 18 + 1);
    }
}
