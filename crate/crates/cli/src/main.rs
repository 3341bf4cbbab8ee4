use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cspin_core::config::{load_config, Overrides, RunConfig};
use cspin_core::ensemble::{
    entropy_vs_size, realization_couplings, run_ensemble, summarize_couplings, with_threads,
    EnsembleSummary,
};
use cspin_core::error::Error;
use cspin_core::output;
use cspin_core::scaling::{analyze_sizes, ScalingReport};
use cspin_core::verify::{check_instance, verify_ensemble, VerifyReport};

const EXIT_IO: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(name = "cspin", version, about = "Central spin correlation growth simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug, Default)]
struct Common {
    /// TOML configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed of the orientation draws
    #[arg(long)]
    seed: Option<u64>,
    /// Bath size; must be a multiple of the ring size
    #[arg(long)]
    nspins: Option<usize>,
    /// Number of random bath orientations
    #[arg(long)]
    realizations: Option<usize>,
    /// Last grid time in μs
    #[arg(long)]
    tmax_us: Option<f64>,
    /// Number of grid points including t = 0
    #[arg(long)]
    steps: Option<usize>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Fixed coupling list, one ω/2π value in Hz per line
    #[arg(long)]
    couplings: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, Default)]
struct Single {
    /// Use only this realization index instead of the ensemble
    #[arg(long)]
    realization: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// FID and entanglement entropy traces (fid.csv)
    Fid {
        #[command(flatten)]
        single: Single,
        #[command(flatten)]
        common: Common,
    },
    /// Hamming-weight intensity spectra over time (intensities.csv)
    Intensities {
        #[command(flatten)]
        single: Single,
        #[command(flatten)]
        common: Common,
    },
    /// S_ent, S1 and S2 traces (entropy.csv)
    Entropy {
        #[command(flatten)]
        single: Single,
        #[command(flatten)]
        common: Common,
    },
    /// Full ensemble pipeline (traces.csv, intensities.csv)
    Ensemble {
        #[command(flatten)]
        common: Common,
    },
    /// Size sweep with ln N fits (scaling.csv, report.txt)
    Scaling {
        /// Comma-separated bath sizes
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        #[command(flatten)]
        common: Common,
    },
    /// Dense-oracle checks of the analytic engine on configured orientations
    Verify {
        /// Number of orientations to check
        #[arg(long, default_value_t = 5)]
        instances: usize,
        /// Random times per orientation
        #[arg(long, default_value_t = 5)]
        times: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Per-figure data files for FID/S_ent, intensities/Rényi and scaling
    PlotData {
        /// Comma-separated bath sizes for the scaling figure
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        /// Skip the size sweep
        #[arg(long)]
        no_scaling: bool,
        /// Individual realizations written next to the ensemble mean
        #[arg(long, default_value_t = 3)]
        examples: usize,
        #[command(flatten)]
        common: Common,
    },
}

enum Failure {
    Core(Error),
    Verify(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn resolve(common: &Common) -> Result<RunConfig, Error> {
    let mut cfg = match &common.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    cfg.apply(&Overrides {
        seed: common.seed,
        nspins: common.nspins,
        realizations: common.realizations,
        tmax_us: common.tmax_us,
        steps: common.steps,
        out: common.out.clone(),
        threads: common.threads,
        couplings_file: common.couplings.clone(),
    })?;
    Ok(cfg)
}

/// Fixed couplings, one realization, or the full ensemble.
fn summary(cfg: &RunConfig, single: &Single) -> Result<EnsembleSummary, Error> {
    let grid = cfg.time_grid();
    if let Some(c) = cfg.fixed_couplings()? {
        return summarize_couplings(&c, &grid);
    }
    match single.realization {
        Some(i) => summarize_couplings(&realization_couplings(&cfg.ensemble, i)?, &grid),
        None => with_threads(cfg.threads, || run_ensemble(&cfg.ensemble))?,
    }
}

type Sweep = (BTreeMap<usize, EnsembleSummary>, ScalingReport);

fn size_sweep(cfg: &RunConfig, sizes: Option<Vec<usize>>) -> Result<Sweep, Error> {
    let sizes = sizes.unwrap_or_else(|| cfg.scaling.sizes.clone());
    let default = cfg.ensemble.n_realizations;
    let by_size = with_threads(cfg.threads, || {
        entropy_vs_size(&sizes, &cfg.ensemble, |n| {
            cfg.scaling.realizations_for(n, default)
        })
    })??;
    let report = analyze_sizes(&by_size, &cfg.scaling.options)?;
    Ok((by_size, report))
}

fn announce(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Fid { single, common } => {
            let cfg = resolve(&common)?;
            announce(&[output::emit_fid(&summary(&cfg, &single)?, &cfg.output_dir)?]);
        }
        Command::Intensities { single, common } => {
            let cfg = resolve(&common)?;
            announce(&[output::emit_intensities(&summary(&cfg, &single)?, &cfg.output_dir)?]);
        }
        Command::Entropy { single, common } => {
            let cfg = resolve(&common)?;
            announce(&[output::emit_entropy(&summary(&cfg, &single)?, &cfg.output_dir)?]);
        }
        Command::Ensemble { common } => {
            let cfg = resolve(&common)?;
            let s = summary(&cfg, &Single::default())?;
            announce(&output::emit_traces(&s, &cfg.output_dir)?);
        }
        Command::Scaling { sizes, common } => {
            let cfg = resolve(&common)?;
            let (_, report) = size_sweep(&cfg, sizes)?;
            print!("{}", output::format_report(&report));
            announce(&output::emit_scaling(&report, &cfg.output_dir)?);
        }
        Command::Verify {
            instances,
            times,
            common,
        } => {
            let cfg = resolve(&common)?;
            if instances == 0 || times == 0 {
                return Err(Error::Config("instances and times must be ≥ 1".into()).into());
            }
            let max = cfg.protocol.max_oracle_spins;
            let report = match cfg.fixed_couplings()? {
                Some(c) => {
                    let mut r = VerifyReport::default();
                    for k in 1..=times {
                        let t = cfg.ensemble.grid.t_max * k as f64 / times as f64;
                        r.add(check_instance(&c, t, max)?);
                    }
                    r
                }
                None => with_threads(cfg.threads, || {
                    verify_ensemble(&cfg.ensemble, instances, times, max)
                })??,
            };
            println!("{report}");
            if !report.passed() {
                return Err(Failure::Verify(format!(
                    "{} of {} instances failed",
                    report.failures.len(),
                    report.instances
                )));
            }
        }
        Command::PlotData {
            sizes,
            no_scaling,
            examples,
            common,
        } => {
            let cfg = resolve(&common)?;
            let main = summary(&cfg, &Single::default())?;
            let grid = cfg.time_grid();
            let examples = (0..examples)
                .map(|i| summarize_couplings(&realization_couplings(&cfg.ensemble, i)?, &grid))
                .collect::<Result<Vec<_>, _>>()?;
            let sweep = if no_scaling {
                None
            } else {
                let s = size_sweep(&cfg, sizes)?;
                print!("{}", output::format_report(&s.1));
                Some(s)
            };
            let paths = output::emit_plot_data(
                &main,
                &examples,
                sweep.as_ref().map(|(b, r)| (b, r)),
                &cfg.output_dir,
            )?;
            announce(&paths);
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    if e.is_validation() {
        EXIT_VALIDATION
    } else {
        EXIT_IO
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Verify(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(EXIT_VERIFY)
        }
    }
}
