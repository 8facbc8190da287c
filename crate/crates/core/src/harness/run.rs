//! Experiment orchestration and report files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::{file_stem, Experiment, ExperimentConfig, LadderSpec, MethodBlock, PpParams, SCHEMA_VERSION};
use crate::cd::{dcqs_run, IterationStats};
use crate::error::{Error, Result};
use crate::exact::Oracle;
use crate::hamiltonian::{to_canonical_json, DiagonalHamiltonian};
use crate::pool::SamplePool;
use crate::reweight::{cumulative_fom, divergences, fit_effective_temperature, fom_csv, reweight, FomTrace};
use crate::rng::{derive_seed, tag};
use crate::samplers::{adapt_ladder_with_cap, greedy_pp_into, mh_run_budget, pt_run, PtOptions, ReplicaLadder};

/// Bracket used for per-iteration effective temperatures.
pub const T_EFF_BRACKET: (f64, f64) = (0.0, 1e3);

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Software {
    pub name: String,
    pub version: String,
}

impl Software {
    pub fn current() -> Self {
        Self { name: env!("CARGO_PKG_NAME").to_string(), version: env!("CARGO_PKG_VERSION").to_string() }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct InstanceSummary {
    pub n_qubits: usize,
    pub n_terms: usize,
    pub locality_counts: Vec<usize>,
    pub is_chain: bool,
    /// SHA-256 of the canonical instance serialization without metadata.
    pub sha256: String,
}

impl InstanceSummary {
    pub fn of(h: &DiagonalHamiltonian) -> Self {
        Self {
            n_qubits: h.n_qubits(),
            n_terms: h.len(),
            locality_counts: h.locality_counts(),
            is_chain: h.is_chain(),
            sha256: instance_hash(h),
        }
    }
}

pub fn instance_hash(h: &DiagonalHamiltonian) -> String {
    let digest = Sha256::digest(to_canonical_json(h, None).as_bytes());
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ExactRow {
    pub temperature: Option<f64>,
    pub beta: f64,
    pub ln_z: f64,
    pub mean_energy: f64,
    pub magnetization: f64,
    pub correlator: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ExactTable {
    pub oracle: String,
    pub rows: Vec<ExactRow>,
}

pub const EXACT_CSV_HEADER: &str = "temperature,beta,ln_z,mean_energy,magnetization,correlator";

impl ExactTable {
    pub fn compute(oracle: &Oracle, betas: &[f64]) -> Result<Self> {
        let rows = betas
            .iter()
            .map(|&beta| {
                let t = oracle.thermal(beta)?;
                Ok(ExactRow {
                    temperature: (beta > 0.0).then(|| 1.0 / beta),
                    beta,
                    ln_z: t.ln_z,
                    mean_energy: t.mean_energy,
                    magnetization: t.mean_magnetization(),
                    correlator: t.connected_correlator(),
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { oracle: oracle.name().to_string(), rows })
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{EXACT_CSV_HEADER}\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                opt(r.temperature),
                r.beta,
                r.ln_z,
                r.mean_energy,
                r.magnetization,
                r.correlator
            );
        }
        out
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or(String::new(), |v| v.to_string())
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct TemperatureRow {
    pub temperature: f64,
    pub beta: f64,
    pub samples: u64,
    pub distinct_states: usize,
    pub ln_z_tilde: f64,
    pub ln_z: Option<f64>,
    pub kl: Option<f64>,
    pub tvd: Option<f64>,
    pub magnetization: f64,
    pub correlator: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct TraceSummary {
    pub temperature: f64,
    pub beta: f64,
    pub points: usize,
    pub final_ln_z_tilde: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct IterationReport {
    #[serde(flatten)]
    pub stats: IterationStatsRecord,
    pub t_eff: Option<f64>,
    pub t_eff_saturated: Option<bool>,
}

/// Serializable copy of [`IterationStats`].
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct IterationStatsRecord {
    pub iteration: usize,
    pub mean_energy: f64,
    pub min_energy: f64,
    pub distinct: usize,
    pub active_gates: usize,
    pub alpha1: Vec<f64>,
    pub bias: Vec<f64>,
}

impl From<&IterationStats> for IterationStatsRecord {
    fn from(s: &IterationStats) -> Self {
        Self {
            iteration: s.iteration,
            mean_energy: s.mean_energy,
            min_energy: s.min_energy,
            distinct: s.distinct,
            active_gates: s.active_gates,
            alpha1: s.alpha1.clone(),
            bias: s.bias.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct LadderReport {
    pub betas: Vec<f64>,
    pub swap_acceptance: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct MethodReport {
    pub label: String,
    pub kind: String,
    pub planned_samples: u64,
    pub total_samples: u64,
    pub distinct_states: usize,
    pub pp_added: Option<u64>,
    pub rows: Vec<TemperatureRow>,
    pub traces: Vec<TraceSummary>,
    pub iterations: Option<Vec<IterationReport>>,
    pub ladder: Option<LadderReport>,
}

/// Everything a rerun of the echoed config reproduces byte for byte.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ReportBody {
    pub software: Software,
    pub config: ExperimentConfig,
    pub instance: InstanceSummary,
    pub exact: Option<ExactTable>,
    pub methods: Vec<MethodReport>,
}

impl ReportBody {
    pub fn method(&self, label: &str) -> Option<&MethodReport> {
        self.methods.iter().find(|m| m.label == label)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }
}

/// Run-dependent facts kept apart from the body.
#[derive(Debug, Clone, Serialize)]
pub struct ReportMetadata {
    pub created_unix_seconds: u64,
    pub elapsed_seconds: f64,
    pub threads: usize,
    pub target: String,
    /// Last `throughput` result found in the output directory.
    pub throughput: Option<serde_json::Value>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub body: ReportBody,
    pub metadata: ReportMetadata,
}

/// Samples of one method: one pool, or one per temperature for MH.
#[derive(Debug, Clone)]
pub enum MethodPools {
    Single(SamplePool),
    PerTemperature(Vec<(f64, SamplePool)>),
}

impl MethodPools {
    fn for_temperature(&self, t: f64) -> Option<&SamplePool> {
        match self {
            MethodPools::Single(p) => Some(p),
            MethodPools::PerTemperature(v) => v.iter().find(|(x, _)| *x == t).map(|(_, p)| p),
        }
    }
}

/// A finished run: the report body plus data that only goes to CSV.
#[derive(Debug, Clone)]
pub struct ExperimentRun {
    pub body: ReportBody,
    pub pools: Vec<MethodPools>,
    pub traces: Vec<Vec<FomTrace>>,
    pub elapsed_seconds: f64,
}

struct BlockOutcome {
    pools: MethodPools,
    iterations: Option<Vec<IterationStats>>,
    ladder: Option<ReplicaLadder>,
    pp_added: Option<u64>,
}

fn block_seed(master: u64, index: usize) -> u64 {
    derive_seed(master, tag::HARNESS, index as u64 + 1)
}

fn post_process(h: &DiagonalHamiltonian, pool: &mut SamplePool, pp: &PpParams, seed: u64) -> Result<u64> {
    greedy_pp_into(h, pool, pp.n_pp, pp.n_sweeps, pp.t_pp, seed)
}

fn run_block(exp: &Experiment, index: usize, sources: &[Option<BlockOutcome>]) -> Result<BlockOutcome> {
    let h = &exp.hamiltonian;
    let seed = block_seed(exp.config.seed, index);
    match &exp.config.methods[index] {
        MethodBlock::Dcqs(b) => {
            let cfg = crate::cd::DcqsConfig { seed, ..b.params.clone() };
            let out = dcqs_run(h, &cfg)?;
            let mut pool = out.pool;
            let pp_added = match &b.post_process {
                Some(pp) => Some(post_process(h, &mut pool, pp, derive_seed(seed, tag::HARNESS, 0))?),
                None => None,
            };
            Ok(BlockOutcome { pools: MethodPools::Single(pool), iterations: Some(out.stats), ladder: None, pp_added })
        }
        MethodBlock::Mh(b) => {
            let ts = b.temperatures.as_deref().expect("resolved");
            let samples = b.samples.expect("resolved");
            let pools = ts
                .iter()
                .enumerate()
                .map(|(j, &t)| {
                    Ok((t, mh_run_budget(h, 1.0 / t, b.walkers, samples, derive_seed(seed, tag::HARNESS, j as u64))?))
                })
                .collect::<Result<_>>()?;
            Ok(BlockOutcome {
                pools: MethodPools::PerTemperature(pools),
                iterations: None,
                ladder: None,
                pp_added: None,
            })
        }
        MethodBlock::Pt(b) => {
            let ladder = match &b.ladder {
                LadderSpec::Betas(betas) => ReplicaLadder::new(betas.clone())?,
                LadderSpec::Adaptive(a) => adapt_ladder_with_cap(
                    h,
                    a.beta_min,
                    a.beta_max,
                    a.r,
                    a.n_pt_steps,
                    derive_seed(seed, tag::HARNESS, 0),
                    a.max_iterations,
                )?,
            };
            let out = pt_run(h, &ladder, &PtOptions::samples(b.samples.expect("resolved")), seed)?;
            let pool = out.union();
            Ok(BlockOutcome {
                pools: MethodPools::Single(pool),
                iterations: None,
                ladder: Some(out.ladder),
                pp_added: None,
            })
        }
        MethodBlock::Pp(b) => {
            let src = exp.config.methods.iter().position(|m| m.label() == b.source).expect("validated source");
            let mut pool = match sources[src].as_ref().map(|o| &o.pools) {
                Some(MethodPools::Single(p)) => p.clone(),
                _ => return Err(Error::invalid(format!("source '{}' has no single pool", b.source))),
            };
            let added = post_process(h, &mut pool, &b.params(), seed)?;
            Ok(BlockOutcome { pools: MethodPools::Single(pool), iterations: None, ladder: None, pp_added: Some(added) })
        }
    }
}

fn named(label: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| Error::Block { block: label.to_string(), source: Box::new(e) }
}

fn temperature_row(pool: &SamplePool, t: f64, oracle: Option<&Oracle>) -> Result<TemperatureRow> {
    let beta = 1.0 / t;
    let rw = reweight(pool, beta)?;
    let obs = rw.observables();
    let (ln_z, kl, tvd) = match oracle {
        Some(o) => {
            let ln_z = o.ln_z(beta)?;
            let d = divergences(pool, beta, ln_z)?;
            (Some(ln_z), Some(d.kl), Some(d.tvd))
        }
        None => (None, None, None),
    };
    Ok(TemperatureRow {
        temperature: t,
        beta,
        samples: pool.total_samples(),
        distinct_states: pool.len(),
        ln_z_tilde: rw.ln_z_tilde,
        ln_z,
        kl,
        tvd,
        magnetization: obs.magnetization,
        correlator: obs.correlator,
        energy: obs.energy,
    })
}

fn iteration_reports(stats: &[IterationStats], oracle: Option<&Oracle>) -> Vec<IterationReport> {
    stats
        .iter()
        .map(|s| {
            let fit =
                oracle.and_then(|o| fit_effective_temperature(s.mean_energy, |b| o.mean_energy(b), T_EFF_BRACKET).ok());
            IterationReport { stats: s.into(), t_eff: fit.map(|f| f.t_eff), t_eff_saturated: fit.map(|f| f.saturated) }
        })
        .collect()
}

/// Runs every block of a resolved experiment. Blocks other than `pp` run
/// concurrently; each draws from its own derived seed.
pub fn run_experiment(exp: &Experiment) -> Result<ExperimentRun> {
    let start = Instant::now();
    let methods = &exp.config.methods;
    let independent: Vec<Result<Option<BlockOutcome>>> = (0..methods.len())
        .into_par_iter()
        .map(|i| match methods[i] {
            MethodBlock::Pp(_) => Ok(None),
            _ => run_block(exp, i, &[]).map(Some).map_err(named(methods[i].label())),
        })
        .collect();
    let mut outcomes: Vec<Option<BlockOutcome>> = independent.into_iter().collect::<Result<_>>()?;
    for i in 0..methods.len() {
        if outcomes[i].is_none() {
            let o = run_block(exp, i, &outcomes).map_err(named(methods[i].label()))?;
            outcomes[i] = Some(o);
        }
    }
    let outcomes: Vec<BlockOutcome> = outcomes.into_iter().map(|o| o.expect("every block ran")).collect();

    let oracle = exp.oracle.as_ref();
    let exact = match oracle {
        Some(o) => Some(ExactTable::compute(o, &exp.temperatures().iter().map(|t| 1.0 / t).collect::<Vec<_>>())?),
        None => None,
    };
    let planned = exp.planned_totals();
    let mut reports = Vec::with_capacity(methods.len());
    let mut traces_all = Vec::with_capacity(methods.len());
    for ((block, outcome), &planned_samples) in methods.iter().zip(&outcomes).zip(&planned) {
        let label = block.label();
        let per_t: Vec<(f64, &SamplePool)> = match &outcome.pools {
            MethodPools::Single(p) => exp.temperatures().iter().map(|&t| (t, p)).collect(),
            MethodPools::PerTemperature(v) => v.iter().map(|(t, p)| (*t, p)).collect(),
        };
        let rows = per_t
            .iter()
            .map(|&(t, p)| temperature_row(p, t, oracle))
            .collect::<Result<Vec<_>>>()
            .map_err(named(label))?;
        let mut traces = Vec::new();
        for &t in exp.trace_temperatures() {
            if let Some(p) = outcome.pools.for_temperature(t) {
                traces.extend(cumulative_fom(p, &[1.0 / t]).map_err(named(label))?);
            }
        }
        let (total_samples, distinct_states) = match &outcome.pools {
            MethodPools::Single(p) => (p.total_samples(), p.len()),
            MethodPools::PerTemperature(v) => {
                (v.first().map_or(0, |(_, p)| p.total_samples()), v.iter().map(|(_, p)| p.len()).max().unwrap_or(0))
            }
        };
        reports.push(MethodReport {
            label: label.to_string(),
            kind: block.kind().to_string(),
            planned_samples,
            total_samples,
            distinct_states,
            pp_added: outcome.pp_added,
            rows,
            traces: traces
                .iter()
                .map(|tr| TraceSummary {
                    temperature: 1.0 / tr.beta,
                    beta: tr.beta,
                    points: tr.samples.len(),
                    final_ln_z_tilde: tr.final_value().unwrap_or(f64::NEG_INFINITY),
                })
                .collect(),
            iterations: outcome.iterations.as_ref().map(|s| iteration_reports(s, oracle)),
            ladder: outcome
                .ladder
                .as_ref()
                .map(|l| LadderReport { betas: l.betas().to_vec(), swap_acceptance: l.acceptance_ratios() }),
        });
        traces_all.push(traces);
    }
    let body = ReportBody {
        software: Software::current(),
        config: exp.config.clone(),
        instance: InstanceSummary::of(&exp.hamiltonian),
        exact,
        methods: reports,
    };
    Ok(ExperimentRun {
        body,
        pools: outcomes.into_iter().map(|o| o.pools).collect(),
        traces: traces_all,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}

pub const OBSERVABLES_CSV_HEADER: &str =
    "method,temperature,beta,samples,distinct_states,ln_z_tilde,ln_z,kl,tvd,magnetization,correlator,energy";

pub fn observables_csv(body: &ReportBody) -> String {
    let mut out = format!("{OBSERVABLES_CSV_HEADER}\n");
    for m in &body.methods {
        for r in &m.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                m.label,
                r.temperature,
                r.beta,
                r.samples,
                r.distinct_states,
                r.ln_z_tilde,
                opt(r.ln_z),
                opt(r.kl),
                opt(r.tvd),
                r.magnetization,
                r.correlator,
                r.energy
            );
        }
    }
    out
}

pub const THROUGHPUT_FILE: &str = "throughput.json";
pub const REPORT_FILE: &str = "report.json";

fn write(path: PathBuf, text: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(())
}

/// Writes `report.json` and the CSV tables into `out_dir`; returns the paths.
pub fn write_outputs(run: &ExperimentRun, out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let throughput =
        std::fs::read_to_string(out_dir.join(THROUGHPUT_FILE)).ok().and_then(|t| serde_json::from_str(&t).ok());
    let report = ExperimentReport {
        schema_version: SCHEMA_VERSION,
        body: run.body.clone(),
        metadata: ReportMetadata {
            created_unix_seconds: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            elapsed_seconds: run.elapsed_seconds,
            threads: rayon::current_num_threads(),
            target: format!("{}-{}", std::env::consts::ARCH, std::env::consts::OS),
            throughput,
        },
    };
    let mut written = Vec::new();
    let json = serde_json::to_string_pretty(&report)? + "\n";
    write(out_dir.join(REPORT_FILE), &json, &mut written)?;
    if let Some(exact) = &run.body.exact {
        write(out_dir.join("exact.csv"), &exact.to_csv(), &mut written)?;
    }
    write(out_dir.join("observables.csv"), &observables_csv(&run.body), &mut written)?;
    for (m, traces) in run.body.methods.iter().zip(&run.traces) {
        if !traces.is_empty() {
            write(out_dir.join(format!("fom_{}.csv", file_stem(&m.label))), &fom_csv(traces), &mut written)?;
        }
    }
    if run.body.config.write_pools {
        for (m, pools) in run.body.methods.iter().zip(&run.pools) {
            if let MethodPools::Single(p) = pools {
                write(out_dir.join(format!("pool_{}.csv", file_stem(&m.label))), &p.to_csv(), &mut written)?;
            }
        }
    }
    Ok(written)
}

/// Splits a report file into its body text; used to compare reruns.
pub fn report_body_json(report_text: &str) -> Result<String> {
    let v: serde_json::Value = serde_json::from_str(report_text)?;
    Ok(serde_json::to_string_pretty(&v["body"])?)
}
