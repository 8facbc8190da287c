use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use dcqs::error::{Error, Result};
use dcqs::exact::DEFAULT_ENUMERATION_CAP;
use dcqs::hamiltonian::load_instance;
use dcqs::harness::{self, InstanceSource, OracleChoice, REPORT_FILE};
use dcqs::pool::SamplePool;

#[derive(Parser)]
#[command(name = "dcqs", version, about = "Low-temperature sampling experiments")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Generator {
    IsingChain,
    IsingChainOpen,
    SpinGlass,
    ThreeBody,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleArg {
    Auto,
    Enumeration,
    TransferMatrix,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded random instance.
    Generate {
        /// JSON instance source, e.g. {"generator": "spin_glass", "n": 18, "seed": 0}.
        #[arg(long, conflicts_with = "generator")]
        config: Option<PathBuf>,
        #[arg(long, value_enum, required_unless_present = "config")]
        generator: Option<Generator>,
        #[arg(long, required_unless_present = "config")]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        e0: f64,
        #[arg(long)]
        pairs: Option<usize>,
        #[arg(long)]
        triples: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exact ln Z and observables on a temperature or beta grid.
    Exact {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_delimiter = ',', required_unless_present = "betas")]
        temperatures: Vec<f64>,
        #[arg(long, value_delimiter = ',', conflicts_with = "temperatures")]
        betas: Vec<f64>,
        #[arg(long, value_enum, default_value = "auto")]
        oracle: OracleArg,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: usize,
        /// Also write exact.csv here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an experiment file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the master seed of the file.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Effective temperature of a sample CSV.
    FitTemp {
        #[arg(long)]
        samples: PathBuf,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [0.0, 1000.0])]
        bracket: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: usize,
        /// Also write fit.json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Single-worker Metropolis update rate.
    Throughput {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        seconds: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write throughput.json here for later reports.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn source_from_args(
    generator: Generator,
    n: usize,
    seed: u64,
    e0: f64,
    pairs: Option<usize>,
    triples: Option<usize>,
) -> Result<InstanceSource> {
    Ok(match generator {
        Generator::IsingChain => InstanceSource::IsingChain { n, seed, open: false },
        Generator::IsingChainOpen => InstanceSource::IsingChain { n, seed, open: true },
        Generator::SpinGlass => InstanceSource::SpinGlass { n, e0, seed },
        Generator::ThreeBody => match (pairs, triples) {
            (Some(n_pairs), Some(n_triples)) => InstanceSource::ThreeBody { n, n_pairs, n_triples, seed },
            _ => return Err(Error::InvalidParameter("three-body instances need --pairs and --triples".into())),
        },
    })
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn write_file(path: PathBuf, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.into(), source: e })?;
    }
    std::fs::write(&path, text).map_err(|e| Error::Io { path, source: e })
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Generate { config, generator, n, seed, e0, pairs, triples, out } => {
            let source = match config {
                Some(path) => {
                    let text =
                        std::fs::read_to_string(&path).map_err(|e| Error::Io { path: path.clone(), source: e })?;
                    serde_json::from_str(&text)?
                }
                None => source_from_args(generator.expect("required"), n.expect("required"), seed, e0, pairs, triples)?,
            };
            let path = harness::cmd_generate(&source, &out)?;
            println!("{}", path.display());
        }
        Command::Exact { instance, temperatures, betas, oracle, cap, out } => {
            let h = load_instance(&instance)?;
            if let Some(t) = temperatures.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
                return Err(Error::InvalidParameter(format!(
                    "temperature {t} must be positive; use --betas for beta = 0"
                )));
            }
            let betas = if betas.is_empty() { temperatures.iter().map(|t| 1.0 / t).collect() } else { betas };
            let choice = match oracle {
                OracleArg::Auto => OracleChoice::Auto,
                OracleArg::Enumeration => OracleChoice::Enumeration,
                OracleArg::TransferMatrix => OracleChoice::TransferMatrix,
            };
            let table = harness::cmd_exact(&h, &betas, choice, cap)?;
            let csv = table.to_csv();
            print!("{csv}");
            if let Some(dir) = out {
                write_file(dir.join("exact.csv"), &csv)?;
            }
        }
        Command::Run { config, out, seed } => {
            let (run, written) = harness::cmd_run(&config, &out, seed)?;
            for m in &run.body.methods {
                eprintln!("{}: {} samples, {} distinct", m.label, m.total_samples, m.distinct_states);
            }
            eprintln!("wrote {} files", written.len());
            println!("{}", out.join(REPORT_FILE).display());
        }
        Command::FitTemp { samples, instance, bracket, cap, out } => {
            let h = load_instance(&instance)?;
            let pool = SamplePool::load_csv(&samples)?;
            let report = harness::cmd_fit_temp(&pool, &h, (bracket[0], bracket[1]), cap)?;
            print_json(&report)?;
            if let Some(dir) = out {
                write_file(dir.join("fit.json"), &(serde_json::to_string_pretty(&report)? + "\n"))?;
            }
        }
        Command::Throughput { instance, seconds, seed, out } => {
            let h = load_instance(&instance)?;
            let report = harness::cmd_throughput(&h, seconds, seed, out.as_deref())?;
            print_json(&report)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be >= 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 3 })
        }
    }
}
