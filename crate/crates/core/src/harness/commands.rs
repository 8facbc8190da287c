//! Library side of the `dcqs` subcommands.

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;

use super::config::{resolve, ExperimentConfig, InstanceSource, OracleChoice};
use super::run::{instance_hash, run_experiment, write_outputs, ExactTable, ExperimentRun, THROUGHPUT_FILE};
use crate::error::{Error, Result};
use crate::exact::{Oracle, Spectrum};
use crate::hamiltonian::{save_instance, DiagonalHamiltonian};
use crate::pool::SamplePool;
use crate::reweight::{fit_effective_temperature, TemperatureFit};
use crate::samplers::{throughput_benchmark, Throughput};

/// Instances up to this size get their ground energy written into metadata.
pub const GROUND_ENERGY_MAX_QUBITS: usize = 20;

/// Published single-core update rate of an optimized MH implementation.
pub const REFERENCE_UPDATES_PER_SECOND: f64 = 8.7e6;

fn file_name(source: &InstanceSource) -> String {
    match source {
        InstanceSource::IsingChain { n, seed, open } => {
            format!("{}_n{n}_s{seed}.json", if *open { "ising_chain_open" } else { "ising_chain" })
        }
        InstanceSource::SpinGlass { n, seed, .. } => format!("spin_glass_n{n}_s{seed}.json"),
        InstanceSource::ThreeBody { n, seed, .. } => format!("three_body_n{n}_s{seed}.json"),
        InstanceSource::File { path } => {
            path.file_name().map_or("instance.json".into(), |f| f.to_string_lossy().into())
        }
    }
}

/// Generator parameters plus, for small instances, the exact ground energy.
pub fn instance_metadata(source: &InstanceSource, h: &DiagonalHamiltonian) -> serde_json::Value {
    let mut meta = source.metadata();
    if h.n_qubits() <= GROUND_ENERGY_MAX_QUBITS {
        let e0 = Spectrum::new(h).expect("below cap").ground_energy();
        meta["ground_energy"] = serde_json::json!(e0);
    }
    meta
}

/// Builds an instance and saves it as `<out_dir>/<generator>_n<N>_s<seed>.json`.
pub fn cmd_generate(source: &InstanceSource, out_dir: &Path) -> Result<PathBuf> {
    if matches!(source, InstanceSource::File { .. }) {
        return Err(Error::invalid("generate needs a generator, not a file"));
    }
    let h = source.build(None)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let path = out_dir.join(file_name(source));
    save_instance(&path, &h, Some(&instance_metadata(source, &h)))?;
    Ok(path)
}

/// Exact `ln Z` and observables on a β grid; `beta = 0` is allowed.
pub fn cmd_exact(h: &DiagonalHamiltonian, betas: &[f64], oracle: OracleChoice, cap: usize) -> Result<ExactTable> {
    if betas.is_empty() {
        return Err(Error::invalid("the beta grid is empty"));
    }
    let oracle = match oracle {
        OracleChoice::Auto => Oracle::for_instance(h, cap)?,
        OracleChoice::Enumeration => Oracle::enumeration(h, cap)?,
        OracleChoice::TransferMatrix => Oracle::TransferMatrix(h.chain_couplings()?),
        OracleChoice::None => return Err(Error::invalid("exact needs an oracle")),
    };
    ExactTable::compute(&oracle, betas)
}

/// Loads, resolves and runs an experiment file, writing its outputs to `out_dir`.
pub fn cmd_run(config_path: &Path, out_dir: &Path, seed: Option<u64>) -> Result<(ExperimentRun, Vec<PathBuf>)> {
    let mut config = ExperimentConfig::load(config_path)?;
    if let Some(s) = seed {
        config.seed = s;
    }
    let exp = resolve(&config, config_path.parent())?;
    let run = run_experiment(&exp)?;
    let written = write_outputs(&run, out_dir)?;
    Ok((run, written))
}

#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub samples: u64,
    pub distinct_states: usize,
    pub empirical_mean_energy: f64,
    pub oracle: String,
    #[serde(flatten)]
    pub fit: TemperatureFit,
}

/// Effective temperature of a sample file: the `T` whose exact mean energy
/// equals the multiplicity-weighted sample mean.
pub fn cmd_fit_temp(pool: &SamplePool, h: &DiagonalHamiltonian, bracket: (f64, f64), cap: usize) -> Result<FitReport> {
    if pool.n_qubits() != h.n_qubits() {
        return Err(Error::SizeMismatch { left: pool.n_qubits(), right: h.n_qubits() });
    }
    pool.verify_energies(h, 1e-9)?;
    let empirical = pool.mean_energy().ok_or(Error::EmptyPool)?;
    let oracle = Oracle::for_instance(h, cap)?;
    let fit = fit_effective_temperature(empirical, |b| oracle.mean_energy(b), bracket)?;
    Ok(FitReport {
        samples: pool.total_samples(),
        distinct_states: pool.len(),
        empirical_mean_energy: empirical,
        oracle: oracle.name().to_string(),
        fit,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ThroughputReport {
    pub n_qubits: usize,
    pub n_terms: usize,
    pub instance_sha256: String,
    #[serde(flatten)]
    pub measured: Throughput,
    pub reference_updates_per_second: f64,
}

/// Single-worker MH update rate; with `out_dir`, also saved where later
/// `run` reports pick it up.
pub fn cmd_throughput(
    h: &DiagonalHamiltonian,
    seconds: f64,
    seed: u64,
    out_dir: Option<&Path>,
) -> Result<ThroughputReport> {
    if !(seconds > 0.0 && seconds.is_finite()) {
        return Err(Error::invalid(format!("seconds must be positive, got {seconds}")));
    }
    let measured = throughput_benchmark(h, Duration::from_secs_f64(seconds), seed)?;
    let report = ThroughputReport {
        n_qubits: h.n_qubits(),
        n_terms: h.len(),
        instance_sha256: instance_hash(h),
        measured,
        reference_updates_per_second: REFERENCE_UPDATES_PER_SECOND,
    };
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join(THROUGHPUT_FILE);
        let text = serde_json::to_string_pretty(&report)? + "\n";
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    }
    Ok(report)
}
