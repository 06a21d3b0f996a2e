use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use vqc_noise::experiment::{
    load_config, noise_cells, render_table, run_bp_variance, run_landscape, run_train,
    summarize_dir, train_cells, validate_channels, ExperimentConfig, ExperimentError, Mode,
    RunStatus,
};

#[derive(Parser)]
#[command(name = "expcli", version, about = "Noisy variational circuit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train every cell of the configured grid.
    Train {
        #[arg(long)]
        config: PathBuf,
        /// Worker threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Output directory (default `runs/<unix time>`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan two-parameter cost landscapes.
    Landscape {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        axis1: Option<usize>,
        #[arg(long)]
        axis2: Option<usize>,
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate gradient variance over random initialisations.
    BpVariance {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check completeness of every noise channel.
    Validate,
    /// Aggregate a training run directory.
    Summarize {
        #[arg(long)]
        runs: PathBuf,
    },
}

fn default_out() -> PathBuf {
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    PathBuf::from("runs").join(secs.to_string())
}

fn config_for(path: &Path, mode: Mode) -> Result<ExperimentConfig, ExperimentError> {
    let cfg = load_config(path)?;
    match cfg.mode {
        Some(m) if m != mode => Err(ExperimentError::Config(format!(
            "mode: config is for {m} but the {mode} command was run"
        ))),
        _ => Ok(cfg),
    }
}

fn config_error(msg: String) -> ExperimentError {
    ExperimentError::Config(msg)
}

fn run(cli: Cli) -> Result<(), ExperimentError> {
    match cli.command {
        Command::Train { config, jobs, out } => {
            let cfg = config_for(&config, Mode::Train)?;
            let cells = train_cells(&cfg);
            println!(
                "{} runs: {} qubit counts x {} observables x {} noise settings x {} seeds",
                cells.len(),
                cfg.qubit_counts.len(),
                cfg.observables.len(),
                noise_cells(&cfg).len(),
                cfg.seeds.len()
            );
            let out = out.unwrap_or_else(default_out);
            let records = run_train(&cfg, &out, jobs)?;
            let failed = records.iter().filter(|r| r.status == RunStatus::Failure).count();
            println!("wrote {} ({failed} failed)", out.display());
            let rows = summarize_dir(&out)?;
            print!("{}", render_table(&rows));
        }
        Command::Landscape {
            config,
            axis1,
            axis2,
            resolution,
            jobs,
            out,
        } => {
            let mut cfg = config_for(&config, Mode::Landscape)?;
            let ls = &mut cfg.landscape;
            ls.axis1 = axis1.unwrap_or(ls.axis1);
            ls.axis2 = axis2.unwrap_or(ls.axis2);
            ls.resolution = resolution.unwrap_or(ls.resolution);
            if ls.axis1 == ls.axis2 {
                return Err(config_error("--axis2 must differ from --axis1".into()));
            }
            if ls.resolution < 2 {
                return Err(config_error("--resolution must be at least 2".into()));
            }
            let out = out.unwrap_or_else(default_out);
            let records = run_landscape(&cfg, &out, jobs)?;
            for r in &records {
                match r.flatness {
                    Some(f) => println!("{}q {} {} p={} flatness={f:.6}", r.qubits, r.observable, r.noise, r.p),
                    None => println!(
                        "{}q {} {} p={} failed: {}",
                        r.qubits,
                        r.observable,
                        r.noise,
                        r.p,
                        r.error.as_deref().unwrap_or("")
                    ),
                }
            }
            println!("wrote {}", out.display());
        }
        Command::BpVariance {
            config,
            samples,
            jobs,
            out,
        } => {
            let mut cfg = config_for(&config, Mode::BpVariance)?;
            if let Some(s) = samples {
                if s < 2 {
                    return Err(config_error("--samples must be at least 2".into()));
                }
                cfg.bp_variance.samples = s;
            }
            let out = out.unwrap_or_else(default_out);
            let records = run_bp_variance(&cfg, &out, jobs)?;
            for r in &records {
                match r.variance {
                    Some(v) => println!("{}q {} {} p={} variance={v:.6e}", r.qubits, r.observable, r.noise, r.p),
                    None => println!(
                        "{}q {} {} p={} failed: {}",
                        r.qubits,
                        r.observable,
                        r.noise,
                        r.p,
                        r.error.as_deref().unwrap_or("")
                    ),
                }
            }
            println!("wrote {}", out.display());
        }
        Command::Validate => {
            let rows = validate_channels()?;
            let mut ok = true;
            for r in &rows {
                println!(
                    "{:<18} p={:.1} defect={:.3e} {}",
                    r.kind.name(),
                    r.probability,
                    r.defect,
                    if r.passed { "ok" } else { "FAIL" }
                );
                ok &= r.passed;
            }
            if !ok {
                return Err(ExperimentError::Execution("channel validation failed".into()));
            }
        }
        Command::Summarize { runs } => {
            let rows = summarize_dir(&runs)?;
            print!("{}", render_table(&rows));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
