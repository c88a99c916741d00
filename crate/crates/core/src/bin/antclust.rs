use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use antclust::config::{load_synthetic_spec, parse_override, RunConfig};
use antclust::datastream::{generate_synthetic, write_items_csv};
use antclust::runner;
use antclust::Error;

#[derive(Parser)]
#[command(
    version,
    about = "Stigmergic ant-colony clustering on a toroidal lattice"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its outputs.
    Run {
        config: PathBuf,
        /// Override a config key (repeatable).
        #[arg(long = "set", value_name = "KEY=VALUE", value_parser = parse_override)]
        set: Vec<(String, String)>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run batch and streaming variants of a config over several seeds.
    Compare {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        seeds: Vec<u64>,
        #[arg(long = "set", value_name = "KEY=VALUE", value_parser = parse_override)]
        set: Vec<(String, String)>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a synthetic data set as `id,label,f1,...` CSV.
    GenSynthetic {
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Anything that goes wrong before the simulation starts is a configuration error.
struct ConfigFailure(Error);

enum Failure {
    Config(Error),
    Runtime(Error),
}

impl From<ConfigFailure> for Failure {
    fn from(e: ConfigFailure) -> Self {
        Failure::Config(e.0)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_config_error() {
            Failure::Config(e)
        } else {
            Failure::Runtime(e)
        }
    }
}

fn load(
    config: &Path,
    mut set: Vec<(String, String)>,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> Result<RunConfig, ConfigFailure> {
    if let Some(s) = seed {
        set.push(("run.seed".into(), s.to_string()));
    }
    if let Some(o) = out {
        set.push(("run.out".into(), o.display().to_string()));
    }
    RunConfig::load(config, &set).map_err(ConfigFailure)
}

fn execute(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Run {
            config,
            set,
            seed,
            out,
        } => {
            let cfg = load(&config, set, seed, out)?;
            let outcome = runner::run(&cfg)?;
            for c in &outcome.simulation.checkpoints {
                match &c.report {
                    Ok(r) => println!(
                        "t={:>9}  rate={:.4}  entropy={:.4}",
                        c.step, r.mean_rate, c.entropy
                    ),
                    Err(why) => println!(
                        "t={:>9}  rate=n/a ({why})  entropy={:.4}",
                        c.step, c.entropy
                    ),
                }
            }
            println!("{}", outcome.dir.display());
        }
        Command::Compare {
            config,
            seeds,
            set,
            out,
        } => {
            let cfg = load(&config, set, None, out)?;
            let summary = runner::compare(&cfg, &seeds)?;
            print!("{}", summary.to_csv());
        }
        Command::GenSynthetic { spec, out } => {
            let spec = load_synthetic_spec(&spec).map_err(ConfigFailure)?;
            write_items_csv(&out, &generate_synthetic(&spec))?;
            println!("{}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors count as configuration errors
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
