use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use openbh::cli::{
    cmd_analyze, cmd_oracle_check, cmd_reproduce, cmd_scan_angle, cmd_simulate, table_ids,
    CliError, ExperimentSpec,
};
use openbh::correlations::CriterionFamily;

#[derive(Parser)]
#[command(
    name = "openbh",
    version,
    about = "Truncated-Wigner simulator and correlation analysis for open pumped/damped Bose-Hubbard chains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run (or resume) a trajectory ensemble: writes populations.csv and
    /// checkpoint.json into the output directory
    Simulate {
        /// Experiment spec file (TOML)
        #[arg(long)]
        spec: PathBuf,
        /// Output directory (default: spec's [output].dir, else ".")
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the planned ensemble size
        #[arg(long)]
        trajectories: Option<u64>,
        /// Override the base RNG seed
        #[arg(long)]
        seed: Option<u64>,
        /// Ignore any existing checkpoint and start fresh
        #[arg(long)]
        no_resume: bool,
    },
    /// Optimize correlation criteria from a checkpoint at one sample time
    Analyze {
        #[arg(long)]
        checkpoint: PathBuf,
        /// Sample time to analyze (default: the last one)
        #[arg(long)]
        time: Option<f64>,
        /// Comma-separated families: quad,ds,epr,vlf-pair,vlf-triple,obr
        #[arg(long)]
        criteria: Option<String>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Scan one criterion over the quadrature angle (EPR specs emit both
    /// directions)
    ScanAngle {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        time: Option<f64>,
        /// Criterion spec with 1-based modes, e.g. epr:1,2 or obr:2,3,1
        #[arg(long)]
        criterion: String,
        /// Angle grid step in degrees
        #[arg(long, default_value_t = 0.5)]
        step: f64,
        /// Output CSV path
        #[arg(long, default_value = "scan.csv")]
        out: PathBuf,
    },
    /// Validate the engine against the exact linear-regime moments
    /// (requires a chi = 0 spec); exits 0 only if every z-score is below
    /// the threshold
    OracleCheck {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 5.0)]
        threshold: f64,
        /// Fault-injection knob: rescale the stochastic increment to
        /// verify that the check actually detects a broken engine
        #[arg(long, default_value_t = 1.0)]
        noise_scale: f64,
        #[arg(long)]
        trajectories: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Re-run one published configuration and print the side-by-side
    /// table comparison ("list" prints the available ids)
    Reproduce {
        /// Table id, e.g. loss3-chi1e-2, or "list"
        table: String,
        #[arg(long)]
        trajectories: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "runs")]
        out: PathBuf,
    },
}

fn parse_families(arg: &Option<String>) -> Result<Option<Vec<CriterionFamily>>, CliError> {
    match arg {
        None => Ok(None),
        Some(list) => list
            .split(',')
            .map(|s| s.parse::<CriterionFamily>().map_err(CliError::Config))
            .collect::<Result<Vec<_>, _>>()
            .map(Some),
    }
}

fn load_spec(
    path: &std::path::Path,
    trajectories: Option<u64>,
    seed: Option<u64>,
) -> Result<ExperimentSpec, CliError> {
    let mut spec = ExperimentSpec::from_path(path)?;
    if let Some(n) = trajectories {
        spec = spec.with_trajectories(n)?;
    }
    if let Some(s) = seed {
        spec = spec.with_seed(s)?;
    }
    Ok(spec)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate {
            spec,
            out,
            trajectories,
            seed,
            no_resume,
        } => {
            let spec = load_spec(&spec, trajectories, seed)?;
            let out_dir = out.unwrap_or_else(|| {
                PathBuf::from(spec.output_dir.clone().unwrap_or_else(|| ".".into()))
            });
            let outcome = cmd_simulate(&spec, &out_dir, !no_resume)?;
            if let Some(from) = outcome.resumed_from {
                println!("resumed from {from} trajectories");
            }
            println!(
                "{} trajectories -> {} and {}",
                outcome.n_trajectories,
                outcome.populations_path.display(),
                outcome.checkpoint_path.display()
            );
            Ok(())
        }
        Command::Analyze {
            checkpoint,
            time,
            criteria,
            out,
        } => {
            let families = parse_families(&criteria)?;
            let outcome = cmd_analyze(&checkpoint, time, families.as_deref(), &out)?;
            print!("{}", outcome.rendered);
            println!(
                "wrote {} and {}",
                outcome.json_path.display(),
                outcome.csv_path.display()
            );
            Ok(())
        }
        Command::ScanAngle {
            checkpoint,
            time,
            criterion,
            step,
            out,
        } => {
            let outcome = cmd_scan_angle(&checkpoint, time, &criterion, step, &out)?;
            println!(
                "wrote {} ({})",
                outcome.csv_path.display(),
                outcome.labels.join(", ")
            );
            Ok(())
        }
        Command::OracleCheck {
            spec,
            threshold,
            noise_scale,
            trajectories,
            seed,
        } => {
            let spec = load_spec(&spec, trajectories, seed)?;
            let outcome = cmd_oracle_check(&spec, threshold, noise_scale)?;
            for (t, report) in &outcome.per_time {
                println!(
                    "t = {t}: max |z| = {:.2} ({} components, worst {})",
                    report.max_abs_z, report.n_components, report.worst_component
                );
            }
            if outcome.pass {
                println!(
                    "PASS: max |z| = {:.2} < {}",
                    outcome.max_abs_z, outcome.threshold
                );
                Ok(())
            } else {
                Err(CliError::Config(format!(
                    "FAIL: max |z| = {:.2} >= {}",
                    outcome.max_abs_z, outcome.threshold
                )))
            }
        }
        Command::Reproduce {
            table,
            trajectories,
            seed,
            out,
        } => {
            if table == "list" {
                for id in table_ids() {
                    println!("{id}");
                }
                return Ok(());
            }
            let outcome = cmd_reproduce(&table, trajectories, seed, &out)?;
            print!("{}", outcome.rendered);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
