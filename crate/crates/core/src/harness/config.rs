//! Experiment files.
//!
//! One JSON document fixes an experiment: the instance, the temperature grid,
//! every method block with its hyperparameters, the sample budget and the
//! master seed. [`resolve`] validates a config and fills in every default so
//! the echo written into reports is complete on its own.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cd::DcqsConfig;
use crate::error::{Error, Result};
use crate::exact::{Oracle, DEFAULT_ENUMERATION_CAP};
use crate::hamiltonian::{
    gen_ising_chain, gen_ising_chain_open, gen_spin_glass, gen_three_body, load_instance, DiagonalHamiltonian,
};
use crate::samplers::{ReplicaLadder, DEFAULT_LADDER_CAP, DEFAULT_T_PP};

pub const SCHEMA_VERSION: u32 = 1;

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

fn analogue() -> String {
    "analogue".to_string()
}

fn yes() -> bool {
    true
}

fn enumeration_cap() -> usize {
    DEFAULT_ENUMERATION_CAP
}

fn default_e0() -> f64 {
    1.0
}

fn default_t_pp() -> f64 {
    DEFAULT_T_PP
}

fn one() -> usize {
    1
}

fn ladder_cap() -> usize {
    DEFAULT_LADDER_CAP
}

fn label_dcqs() -> String {
    "DCQS".to_string()
}

fn label_mh() -> String {
    "MH".to_string()
}

fn label_pt() -> String {
    "PT".to_string()
}

fn label_pp() -> String {
    "PP".to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case", deny_unknown_fields)]
pub enum InstanceSource {
    IsingChain {
        n: usize,
        seed: u64,
        #[serde(default)]
        open: bool,
    },
    SpinGlass {
        n: usize,
        #[serde(default = "default_e0")]
        e0: f64,
        seed: u64,
    },
    ThreeBody {
        n: usize,
        n_pairs: usize,
        n_triples: usize,
        seed: u64,
    },
    /// Relative paths are taken from the config file's directory.
    File {
        path: PathBuf,
    },
}

impl InstanceSource {
    pub fn build(&self, base_dir: Option<&Path>) -> Result<DiagonalHamiltonian> {
        match self {
            InstanceSource::IsingChain { n, seed, open: false } => gen_ising_chain(*n, *seed),
            InstanceSource::IsingChain { n, seed, open: true } => gen_ising_chain_open(*n, *seed),
            InstanceSource::SpinGlass { n, e0, seed } => gen_spin_glass(*n, *e0, *seed),
            InstanceSource::ThreeBody { n, n_pairs, n_triples, seed } => {
                gen_three_body(*n, *n_pairs, *n_triples, *seed)
            }
            InstanceSource::File { path } => match base_dir {
                Some(dir) if path.is_relative() => load_instance(dir.join(path)),
                _ => load_instance(path),
            },
        }
    }

    /// Generator parameters as stored in instance file metadata.
    pub fn metadata(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain data")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogSpaced {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TemperatureGrid {
    List(Vec<f64>),
    LogSpaced { log_spaced: LogSpaced },
}

/// `count` temperatures from `min` to `max`, evenly spaced in `ln T`.
pub fn log_spaced(min: f64, max: f64, count: usize) -> Result<Vec<f64>> {
    if !(min > 0.0 && max >= min && max.is_finite()) {
        return Err(Error::invalid(format!("log-spaced grid needs 0 < min <= max, got {min}, {max}")));
    }
    match count {
        0 => Err(Error::invalid("log-spaced grid needs count >= 1")),
        1 => Ok(vec![min]),
        _ => {
            let ratio = (max / min).ln() / (count - 1) as f64;
            let mut grid: Vec<f64> = (0..count).map(|k| min * (ratio * k as f64).exp()).collect();
            grid[count - 1] = max;
            Ok(grid)
        }
    }
}

impl TemperatureGrid {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            TemperatureGrid::List(v) => Ok(v.clone()),
            TemperatureGrid::LogSpaced { log_spaced: g } => log_spaced(g.min, g.max, g.count),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleChoice {
    /// Transfer matrix for chains, enumeration up to the cap, otherwise none.
    #[default]
    Auto,
    Enumeration,
    TransferMatrix,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PpParams {
    pub n_pp: usize,
    pub n_sweeps: u64,
    #[serde(default = "default_t_pp")]
    pub t_pp: f64,
}

impl PpParams {
    fn validate(&self) -> Result<()> {
        if self.n_pp == 0 || self.n_sweeps == 0 {
            return Err(Error::invalid("post-processing needs n_pp >= 1 and n_sweeps >= 1"));
        }
        if !(self.t_pp >= 0.0 && self.t_pp.is_finite()) {
            return Err(Error::invalid(format!("t_pp must be finite and >= 0, got {}", self.t_pp)));
        }
        Ok(())
    }

    /// `n_pp × n_sweeps × N`.
    pub fn added(&self, n_qubits: usize) -> u64 {
        self.n_pp as u64 * self.n_sweeps * n_qubits as u64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DcqsBlock {
    #[serde(default = "label_dcqs")]
    pub label: String,
    #[serde(default)]
    pub params: DcqsConfig,
    /// Greedy refinement of the final pool; its proposals count toward the budget.
    #[serde(default)]
    pub post_process: Option<PpParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MhBlock {
    #[serde(default = "label_mh")]
    pub label: String,
    #[serde(default = "one")]
    pub walkers: usize,
    /// Samples per temperature; defaults to the experiment budget.
    #[serde(default)]
    pub samples: Option<u64>,
    /// Defaults to the experiment grid.
    #[serde(default)]
    pub temperatures: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdaptiveLadder {
    pub beta_min: f64,
    pub beta_max: f64,
    pub r: f64,
    /// Single-flip updates per replica in each trial run.
    pub n_pt_steps: u64,
    #[serde(default = "ladder_cap")]
    pub max_iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum LadderSpec {
    Betas(Vec<f64>),
    Adaptive(AdaptiveLadder),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PtBlock {
    #[serde(default = "label_pt")]
    pub label: String,
    pub ladder: LadderSpec,
    /// Samples across all replicas; defaults to the experiment budget.
    #[serde(default)]
    pub samples: Option<u64>,
}

/// Greedy refinement applied to the pool of an earlier dcqs or pt block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PpBlock {
    #[serde(default = "label_pp")]
    pub label: String,
    pub source: String,
    pub n_pp: usize,
    pub n_sweeps: u64,
    #[serde(default = "default_t_pp")]
    pub t_pp: f64,
}

impl PpBlock {
    pub fn params(&self) -> PpParams {
        PpParams { n_pp: self.n_pp, n_sweeps: self.n_sweeps, t_pp: self.t_pp }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MethodBlock {
    Dcqs(DcqsBlock),
    Mh(MhBlock),
    Pt(PtBlock),
    Pp(PpBlock),
}

impl MethodBlock {
    pub fn label(&self) -> &str {
        match self {
            MethodBlock::Dcqs(b) => &b.label,
            MethodBlock::Mh(b) => &b.label,
            MethodBlock::Pt(b) => &b.label,
            MethodBlock::Pp(b) => &b.label,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            MethodBlock::Dcqs(_) => "dcqs",
            MethodBlock::Mh(_) => "mh",
            MethodBlock::Pt(_) => "pt",
            MethodBlock::Pp(_) => "pp",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    #[serde(default)]
    pub name: String,
    /// Marks desk-scale re-runs of larger protocols.
    #[serde(default = "analogue")]
    pub label: String,
    pub instance: InstanceSource,
    #[serde(default)]
    pub seed: u64,
    pub temperatures: TemperatureGrid,
    /// Temperatures of the cumulative `ln Z̃` traces; defaults to the grid.
    #[serde(default)]
    pub trace_temperatures: Option<Vec<f64>>,
    #[serde(default)]
    pub budget: Option<u64>,
    /// Every block must plan the same number of samples.
    #[serde(default = "yes")]
    pub equal_budget: bool,
    #[serde(default)]
    pub oracle: OracleChoice,
    #[serde(default = "enumeration_cap")]
    pub enumeration_cap: usize,
    /// Also write each single-pool method's samples as CSV.
    #[serde(default)]
    pub write_pools: bool,
    pub methods: Vec<MethodBlock>,
}

impl ExperimentConfig {
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            source_name: source_name.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }
}

/// A validated experiment with its instance built.
#[derive(Debug, Clone)]
pub struct Experiment {
    /// Fully materialized; serializes to the report's config echo.
    pub config: ExperimentConfig,
    pub hamiltonian: DiagonalHamiltonian,
    pub oracle: Option<Oracle>,
}

impl Experiment {
    pub fn temperatures(&self) -> &[f64] {
        match &self.config.temperatures {
            TemperatureGrid::List(v) => v,
            TemperatureGrid::LogSpaced { .. } => unreachable!("resolved grids are lists"),
        }
    }

    pub fn trace_temperatures(&self) -> &[f64] {
        self.config.trace_temperatures.as_deref().expect("resolved")
    }

    /// Samples each block is configured to produce.
    pub fn planned_totals(&self) -> Vec<u64> {
        planned_totals(&self.config.methods, self.hamiltonian.n_qubits())
    }
}

fn check_temperatures(what: &str, ts: &[f64]) -> Result<()> {
    if ts.is_empty() {
        return Err(Error::invalid(format!("{what} is empty")));
    }
    if let Some(t) = ts.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        return Err(Error::invalid(format!("{what} holds {t}; temperatures must be positive and finite")));
    }
    Ok(())
}

/// File-name form of a method label.
pub fn file_stem(label: &str) -> String {
    label.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

fn planned_totals(methods: &[MethodBlock], n: usize) -> Vec<u64> {
    let mut totals: Vec<u64> = Vec::with_capacity(methods.len());
    for block in methods {
        let t = match block {
            MethodBlock::Dcqs(b) => b.params.total_shots() + b.post_process.as_ref().map_or(0, |p| p.added(n)),
            MethodBlock::Mh(b) => b.samples.unwrap_or(0),
            MethodBlock::Pt(b) => b.samples.unwrap_or(0),
            MethodBlock::Pp(b) => {
                let src = methods.iter().position(|m| m.label() == b.source).expect("validated source");
                totals[src] + b.params().added(n)
            }
        };
        totals.push(t);
    }
    totals
}

fn block_error(label: &str, e: Error) -> Error {
    Error::Block { block: label.to_string(), source: Box::new(e) }
}

/// Validates `config`, builds its instance and materializes every default.
pub fn resolve(config: &ExperimentConfig, base_dir: Option<&Path>) -> Result<Experiment> {
    let mut cfg = config.clone();
    if cfg.schema_version != SCHEMA_VERSION {
        return Err(Error::invalid(format!(
            "schema_version {} is not supported (expected {SCHEMA_VERSION})",
            cfg.schema_version
        )));
    }
    if cfg.methods.is_empty() {
        return Err(Error::invalid("the method list is empty"));
    }
    let h = cfg.instance.build(base_dir)?;
    let n = h.n_qubits();

    let grid = cfg.temperatures.values()?;
    check_temperatures("temperatures", &grid)?;
    let traces = cfg.trace_temperatures.clone().unwrap_or_else(|| grid.clone());
    check_temperatures("trace_temperatures", &traces)?;
    if cfg.budget == Some(0) {
        return Err(Error::invalid("budget must be >= 1"));
    }

    let mut stems = HashSet::new();
    let mut seen: Vec<(String, &'static str)> = Vec::new();
    for block in &mut cfg.methods {
        let label = block.label().to_string();
        if label.is_empty() {
            return Err(Error::invalid(format!("a {} block has an empty label", block.kind())));
        }
        if !stems.insert(file_stem(&label)) {
            return Err(Error::invalid(format!("method label '{label}' is not unique")));
        }
        let budget = cfg.budget;
        let check = |samples: &mut Option<u64>| -> Result<()> {
            match (*samples, budget) {
                (Some(0), _) => Err(Error::invalid("samples must be >= 1")),
                (Some(_), _) => Ok(()),
                (None, Some(b)) => {
                    *samples = Some(b);
                    Ok(())
                }
                (None, None) => Err(Error::invalid("samples missing and no experiment budget to default to")),
            }
        };
        let result = match block {
            MethodBlock::Dcqs(b) => b.params.validate().and_then(|_| {
                if n > b.params.simulation_cap {
                    return Err(Error::OverCap { what: "state-vector simulation", n, cap: b.params.simulation_cap });
                }
                b.post_process.as_ref().map_or(Ok(()), PpParams::validate)
            }),
            MethodBlock::Mh(b) => {
                if b.walkers == 0 {
                    Err(Error::invalid("walkers must be >= 1"))
                } else {
                    let ts = b.temperatures.get_or_insert_with(|| grid.clone());
                    check_temperatures("temperatures", ts).and_then(|_| check(&mut b.samples))
                }
            }
            MethodBlock::Pt(b) => {
                let ladder = match &b.ladder {
                    LadderSpec::Betas(betas) => ReplicaLadder::new(betas.clone()).map(|_| ()),
                    LadderSpec::Adaptive(a) => {
                        if !(a.beta_min > 0.0 && a.beta_min < a.beta_max && a.beta_max.is_finite()) {
                            Err(Error::invalid("adaptive ladder needs 0 < beta_min < beta_max"))
                        } else if !(a.r > 0.0 && a.r < 1.0) {
                            Err(Error::invalid("adaptive ladder needs 0 < r < 1"))
                        } else if a.n_pt_steps == 0 || a.max_iterations == 0 {
                            Err(Error::invalid("adaptive ladder needs n_pt_steps >= 1 and max_iterations >= 1"))
                        } else {
                            Ok(())
                        }
                    }
                };
                ladder.and_then(|_| check(&mut b.samples))
            }
            MethodBlock::Pp(b) => b.params().validate().and_then(|_| match seen.iter().find(|(l, _)| *l == b.source) {
                None => Err(Error::invalid(format!("source '{}' is not an earlier block", b.source))),
                Some((_, "mh")) => Err(Error::invalid(format!(
                    "source '{}' is an mh block, which holds one pool per temperature",
                    b.source
                ))),
                Some(_) => Ok(()),
            }),
        };
        result.map_err(|e| block_error(&label, e))?;
        seen.push((label, block.kind()));
    }

    let totals = planned_totals(&cfg.methods, n);
    if cfg.equal_budget {
        let target = cfg.budget.unwrap_or(totals[0]);
        for (block, &t) in cfg.methods.iter().zip(&totals) {
            if t != target {
                return Err(block_error(
                    block.label(),
                    Error::invalid(format!("plans {t} samples but the equal budget is {target}")),
                ));
            }
        }
    }

    let oracle = match cfg.oracle {
        OracleChoice::Auto => match Oracle::for_instance(&h, cfg.enumeration_cap) {
            Ok(o) => Some(o),
            Err(Error::OverCap { .. }) => None,
            Err(e) => return Err(e),
        },
        OracleChoice::Enumeration => Some(Oracle::enumeration(&h, cfg.enumeration_cap)?),
        OracleChoice::TransferMatrix => Some(Oracle::TransferMatrix(h.chain_couplings()?)),
        OracleChoice::None => None,
    };

    cfg.temperatures = TemperatureGrid::List(grid);
    cfg.trace_temperatures = Some(traces);
    Ok(Experiment { config: cfg, hamiltonian: h, oracle })
}
