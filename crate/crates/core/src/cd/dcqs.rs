use serde::{Deserialize, Serialize};

use super::circuit::{build_impulse_circuit, build_initial_hamiltonian, initial_ground_state, BiasField};
use super::schedule::Schedule;
use super::state::{sample_measurements, DEFAULT_SIMULATION_CAP};
use crate::bits::SpinConvention;
use crate::error::{Error, Result};
use crate::hamiltonian::DiagonalHamiltonian;
use crate::pool::SamplePool;
use crate::rng::{derive_seed, stream, tag};
use crate::samplers::greedy_pp;

/// Sign relating the next bias to the mean spin of the selected shots.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BiasSign {
    /// `b = +m`: the next initial state leans toward the selected shots.
    #[default]
    Aligned,
    /// `b = −m`: the next initial state leans away from the selected shots.
    #[serde(alias = "paper")]
    Literal,
}

impl BiasSign {
    fn apply(self, m: f64) -> f64 {
        match self {
            BiasSign::Aligned => m,
            BiasSign::Literal => -m,
        }
    }
}

/// Greedy refinement used when the bias comes from a single best state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PpBiasConfig {
    pub n_pp: usize,
    pub n_sweeps: u64,
    pub t_pp: f64,
}

impl Default for PpBiasConfig {
    fn default() -> Self {
        Self { n_pp: 2000, n_sweeps: 3, t_pp: crate::samplers::DEFAULT_T_PP }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DcqsConfig {
    pub n_iter: usize,
    pub n_shots: u64,
    pub w: f64,
    pub n_cvar: u64,
    pub n_trot: usize,
    pub schedule: Schedule,
    pub bias_sign: BiasSign,
    /// Bias from the single lowest state after greedy refinement of the shots.
    pub pp_refined_bias: bool,
    pub pp_bias: PpBiasConfig,
    /// Set by the caller; experiment files derive it from their master seed.
    #[serde(skip)]
    pub seed: u64,
    pub simulation_cap: usize,
}

impl Default for DcqsConfig {
    fn default() -> Self {
        Self {
            n_iter: 5,
            n_shots: 1000,
            w: 0.5,
            n_cvar: 20,
            n_trot: 2,
            schedule: Schedule::SinSquared,
            bias_sign: BiasSign::Aligned,
            pp_refined_bias: false,
            pp_bias: PpBiasConfig::default(),
            seed: 0,
            simulation_cap: DEFAULT_SIMULATION_CAP,
        }
    }
}

impl DcqsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_iter == 0 {
            return Err(Error::invalid("n_iter must be >= 1"));
        }
        if self.n_shots == 0 {
            return Err(Error::invalid("n_shots must be >= 1"));
        }
        if self.n_cvar == 0 || self.n_cvar > self.n_shots {
            return Err(Error::invalid(format!("n_cvar must lie in 1..={}, got {}", self.n_shots, self.n_cvar)));
        }
        if self.n_trot == 0 {
            return Err(Error::invalid("n_trot must be >= 1"));
        }
        if !(self.w >= 0.0 && self.w.is_finite()) {
            return Err(Error::invalid(format!("w must be finite and >= 0, got {}", self.w)));
        }
        if self.pp_refined_bias && (self.pp_bias.n_pp == 0 || self.pp_bias.n_sweeps == 0) {
            return Err(Error::invalid("pp_bias needs n_pp >= 1 and n_sweeps >= 1"));
        }
        if !(self.pp_bias.t_pp >= 0.0) {
            return Err(Error::invalid("pp_bias.t_pp must be >= 0"));
        }
        Ok(())
    }

    /// Samples the run draws: `n_iter × n_shots`.
    pub fn total_shots(&self) -> u64 {
        self.n_iter as u64 * self.n_shots
    }
}

/// Bias for iteration `iteration` from the `n_cvar` lowest-energy shots.
pub fn update_bias(pool: &SamplePool, n_cvar: u64, sign: BiasSign, w: f64, iteration: usize) -> Result<BiasField> {
    let m = pool.lowest_shot_magnetization(n_cvar)?;
    BiasField::new(m.into_iter().map(|x| sign.apply(x)).collect(), w, iteration)
}

#[derive(Debug, Clone, Serialize)]
pub struct IterationStats {
    pub iteration: usize,
    pub bias: Vec<f64>,
    pub alpha1: Vec<f64>,
    pub active_gates: usize,
    pub mean_energy: f64,
    pub min_energy: f64,
    pub distinct: usize,
}

#[derive(Debug, Clone)]
pub struct DcqsOutput {
    /// Every shot of every iteration, in iteration order.
    pub pool: SamplePool,
    /// Shots of each iteration on their own.
    pub shots: Vec<SamplePool>,
    pub stats: Vec<IterationStats>,
}

/// Iterated biased counterdiabatic sampling on the state-vector simulator.
pub fn dcqs_run(h: &DiagonalHamiltonian, config: &DcqsConfig) -> Result<DcqsOutput> {
    config.validate()?;
    let n = h.n_qubits();
    if n > config.simulation_cap {
        return Err(Error::OverCap { what: "state-vector simulation", n, cap: config.simulation_cap });
    }
    let h_f = h.to_pauli_sum();
    let mut bias = BiasField::zero(n, config.w)?;
    let mut pool = SamplePool::new(n);
    let mut shots_per_iter = Vec::with_capacity(config.n_iter);
    let mut stats = Vec::with_capacity(config.n_iter);
    for k in 1..=config.n_iter {
        let h_i = build_initial_hamiltonian(&bias);
        let circuit = build_impulse_circuit(&h_i, &h_f, config.schedule, config.n_trot)?;
        let mut state = initial_ground_state(&bias, config.simulation_cap)?;
        circuit.apply(&mut state)?;
        let mut rng = stream(config.seed, tag::SHOTS, k as u64);
        let shots = sample_measurements(&state, h, config.n_shots, &mut rng)?;
        pool.extend(&shots);
        stats.push(IterationStats {
            iteration: k,
            bias: bias.b().to_vec(),
            alpha1: circuit.steps.iter().map(|s| s.alpha1).collect(),
            active_gates: circuit.active_gates(),
            mean_energy: shots.mean_energy().expect("n_shots >= 1"),
            min_energy: shots.min_energy().expect("n_shots >= 1"),
            distinct: shots.len(),
        });
        if k < config.n_iter {
            bias = if config.pp_refined_bias {
                refined_bias(h, &shots, config, k + 1)?
            } else {
                update_bias(&shots, config.n_cvar, config.bias_sign, config.w, k + 1)?
            };
        }
        shots_per_iter.push(shots);
    }
    Ok(DcqsOutput { pool, shots: shots_per_iter, stats })
}

/// Bias from the single lowest state after greedy refinement of `shots`.
/// The refined states only steer the bias; they are not returned as samples.
fn refined_bias(
    h: &DiagonalHamiltonian,
    shots: &SamplePool,
    config: &DcqsConfig,
    iteration: usize,
) -> Result<BiasField> {
    let pp = &config.pp_bias;
    let seed = derive_seed(config.seed, tag::BIAS_PP, iteration as u64);
    let refined = greedy_pp(h, shots, pp.n_pp.min(shots.len()), pp.n_sweeps, pp.t_pp, seed)?;
    let (best, _) = refined.by_energy().into_iter().next().ok_or(Error::EmptyPool)?;
    let b = (0..h.n_qubits()).map(|i| config.bias_sign.apply(SpinConvention::spin_f64(best.get(i)))).collect();
    BiasField::new(b, config.w, iteration)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitString;
    use crate::hamiltonian::gen_spin_glass;

    #[test]
    fn bias_from_all_zero_state() {
        let mut pool = SamplePool::new(3);
        pool.record(&BitString::zeros(3), -1.0);
        let b = update_bias(&pool, 1, BiasSign::Aligned, 0.5, 2).unwrap();
        assert_eq!(b.b(), &[1.0, 1.0, 1.0]);
        let b = update_bias(&pool, 1, BiasSign::Literal, 0.5, 2).unwrap();
        assert_eq!(b.b(), &[-1.0, -1.0, -1.0]);
    }

    #[test]
    fn sign_names() {
        let parse = |t: &str| serde_json::from_str::<BiasSign>(t).unwrap();
        assert_eq!(parse("\"aligned\""), BiasSign::Aligned);
        assert_eq!(parse("\"literal\""), BiasSign::Literal);
        assert_eq!(parse("\"paper\""), BiasSign::Literal);
    }

    #[test]
    fn complementary_shots_cancel() {
        let mut pool = SamplePool::new(4);
        let s = BitString::parse("0110").unwrap();
        pool.record_many(&s, -2.0, 2);
        pool.record_many(&s.complement(4), -2.0, 2);
        pool.record(&BitString::parse("1111").unwrap(), 5.0);
        let b = update_bias(&pool, 4, BiasSign::Aligned, 1.0, 2).unwrap();
        assert_eq!(b.b(), &[0.0; 4]);
        assert!(matches!(update_bias(&pool, 6, BiasSign::Aligned, 1.0, 2), Err(Error::InsufficientShots { .. })));
    }

    #[test]
    fn single_iteration_keeps_zero_bias() {
        let h = gen_spin_glass(5, 1.0, 0).unwrap();
        let cfg = DcqsConfig { n_iter: 1, n_shots: 50, n_cvar: 5, ..Default::default() };
        let out = dcqs_run(&h, &cfg).unwrap();
        assert_eq!(out.stats.len(), 1);
        assert!(out.stats[0].bias.iter().all(|&b| b == 0.0));
        assert_eq!(out.pool.total_samples(), 50);
    }

    #[test]
    fn budget_and_determinism() {
        let h = gen_spin_glass(6, 1.0, 3).unwrap();
        let cfg = DcqsConfig { n_iter: 3, n_shots: 40, n_cvar: 4, seed: 11, ..Default::default() };
        let a = dcqs_run(&h, &cfg).unwrap();
        let b = dcqs_run(&h, &cfg).unwrap();
        assert_eq!(a.pool, b.pool);
        assert_eq!(a.pool.total_samples(), 120);
        a.pool.verify_energies(&h, 1e-12).unwrap();
        let refined = DcqsConfig { pp_refined_bias: true, ..cfg };
        let c = dcqs_run(&h, &refined).unwrap();
        assert_eq!(c.pool.total_samples(), 120);
        assert!(c.stats[1].bias.iter().all(|b| b.abs() == 1.0));
    }

    #[test]
    fn config_validation() {
        let bad = [
            DcqsConfig { n_iter: 0, ..Default::default() },
            DcqsConfig { n_cvar: 2000, ..Default::default() },
            DcqsConfig { n_trot: 0, ..Default::default() },
            DcqsConfig { w: -1.0, ..Default::default() },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err());
        }
        let h = gen_spin_glass(25, 1.0, 0).unwrap();
        assert!(matches!(dcqs_run(&h, &DcqsConfig::default()), Err(Error::OverCap { .. })));
    }
}
