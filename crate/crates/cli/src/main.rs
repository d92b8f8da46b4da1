use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mqed::greens::Part;
use mqed::model::Method;
use mqed::presets::Preset;
use mqed_cli::commands::{self, GreensArgs, SimulateArgs, SweepArgs, SweepAxis};
use mqed_cli::config::Overrides;
use mqed_cli::{CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "mqed",
    version,
    about = "Emitter dynamics in dispersive dielectric environments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Maximum number of concurrent runs.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Relative quadrature tolerance (overrides the configuration).
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(clap::Args)]
struct RunFlags {
    #[arg(long, value_enum)]
    method: Option<MethodArg>,

    /// Apply the rotating-wave approximation.
    #[arg(long, conflicts_with = "no_rwa")]
    rwa: bool,

    /// Keep the counter-rotating terms.
    #[arg(long)]
    no_rwa: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate the emitter amplitudes and write a trajectory CSV.
    Simulate {
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        preset: Option<PresetArg>,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Decay rates, energy shifts and dipole-dipole couplings.
    Weakcoupling { config: PathBuf },
    /// Green's tensor and spectral density over the frequency grid.
    Greens {
        config: PathBuf,
        /// First emitter (1-based).
        #[arg(long, default_value_t = 1)]
        alpha: usize,
        /// Second emitter (1-based); defaults to 2 when present.
        #[arg(long)]
        beta: Option<usize>,
        #[arg(long, value_enum)]
        part: Option<PartArg>,
    },
    /// Repeat a simulation over a geometry or detuning axis.
    Sweep {
        config: PathBuf,
        #[arg(long, value_enum)]
        axis: AxisArg,
        /// Comma-separated axis values.
        #[arg(long, value_delimiter = ',', conflicts_with = "range")]
        values: Vec<f64>,
        /// start:stop:count, ends included.
        #[arg(long)]
        range: Option<String>,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Write a matplotlib script overlaying trajectory CSVs.
    Plotscript {
        #[arg(required = true)]
        csv: Vec<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Fqd,
    Maqd,
    Oracle,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    #[value(name = "fig3-weak")]
    Fig3Weak,
    #[value(name = "fig3-strong")]
    Fig3Strong,
}

#[derive(Clone, Copy, ValueEnum)]
enum PartArg {
    Free,
    Scattering,
    Total,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    D,
    H,
    Detuning,
}

impl RunFlags {
    fn overrides(&self, tol: Option<f64>) -> Overrides {
        Overrides {
            method: self.method.map(|m| match m {
                MethodArg::Fqd => Method::Fqd,
                MethodArg::Maqd => Method::Maqd,
                MethodArg::Oracle => Method::Oracle,
            }),
            rwa: match (self.rwa, self.no_rwa) {
                (true, _) => Some(true),
                (_, true) => Some(false),
                _ => None,
            },
            tol,
        }
    }
}

fn run(cli: Cli) -> CliResult<Vec<PathBuf>> {
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("mqed-out"));
    let jobs = cli
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let plain = Overrides {
        tol: cli.tol,
        ..Default::default()
    };
    match cli.command {
        Command::Simulate {
            config,
            preset,
            flags,
        } => commands::simulate(&SimulateArgs {
            config,
            preset: preset.map(|p| match p {
                PresetArg::Fig3Weak => Preset::Fig3Weak,
                PresetArg::Fig3Strong => Preset::Fig3Strong,
            }),
            overrides: flags.overrides(cli.tol),
            out,
            jobs,
        }),
        Command::Weakcoupling { config } => commands::weakcoupling(&config, plain, &out),
        Command::Greens {
            config,
            alpha,
            beta,
            part,
        } => {
            let part = part.map(|p| match p {
                PartArg::Free => Part::Free,
                PartArg::Scattering => Part::Scattering,
                PartArg::Total => Part::Total,
            });
            commands::greens(&config, GreensArgs { alpha, beta, part }, plain, &out)
        }
        Command::Sweep {
            config,
            axis,
            values,
            range,
            flags,
        } => {
            let values = match range {
                Some(r) => commands::parse_range(&r)?,
                None => values,
            };
            commands::sweep(&SweepArgs {
                config,
                axis: match axis {
                    AxisArg::D => SweepAxis::D,
                    AxisArg::H => SweepAxis::H,
                    AxisArg::Detuning => SweepAxis::Detuning,
                },
                values,
                overrides: flags.overrides(cli.tol),
                out,
                jobs,
            })
        }
        Command::Plotscript { csv } => {
            commands::plotscript(&csv, cli.out.as_deref()).map(|p| vec![p])
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("MQED_LOG", "warn")).init();
    match run(Cli::parse()) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
