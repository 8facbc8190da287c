use rand::Rng;
use rayon::prelude::*;

use super::{acceptance_probability, LocalFields};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::hamiltonian::DiagonalHamiltonian;
use crate::pool::SamplePool;
use crate::rng::{stream, tag};

pub const DEFAULT_T_PP: f64 = 0.02;

/// Low-temperature single-flip refinement of the `n_pp` best distinct states.
///
/// Each start runs `n_sweeps × N` proposals at temperature `t_pp`, and every
/// proposed bitstring is added to the pool whether or not it is accepted.
/// Returns the enlarged pool; the input pool's draws come first.
pub fn greedy_pp(
    h: &DiagonalHamiltonian,
    pool: &SamplePool,
    n_pp: usize,
    n_sweeps: u64,
    t_pp: f64,
    seed: u64,
) -> Result<SamplePool> {
    let mut out = pool.clone();
    greedy_pp_into(h, &mut out, n_pp, n_sweeps, t_pp, seed)?;
    Ok(out)
}

/// In-place form of [`greedy_pp`]; returns the number of samples added.
pub fn greedy_pp_into(
    h: &DiagonalHamiltonian,
    pool: &mut SamplePool,
    n_pp: usize,
    n_sweeps: u64,
    t_pp: f64,
    seed: u64,
) -> Result<u64> {
    let n = h.n_qubits();
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    if pool.n_qubits() != n {
        return Err(Error::SizeMismatch { left: pool.n_qubits(), right: n });
    }
    if n_pp == 0 || n_pp > pool.len() {
        return Err(Error::invalid(format!("n_pp = {n_pp} must lie in 1..={} (distinct pool size)", pool.len())));
    }
    if !(t_pp >= 0.0) {
        return Err(Error::invalid(format!("t_pp must be >= 0, got {t_pp}")));
    }
    let beta = if t_pp == 0.0 { f64::INFINITY } else { 1.0 / t_pp };
    let fields = LocalFields::new(h);
    let starts: Vec<BitString> = pool.by_energy().into_iter().take(n_pp).map(|(s, _)| s.clone()).collect();
    let proposals = n_sweeps * n as u64;
    let parts: Vec<SamplePool> = starts
        .par_iter()
        .enumerate()
        .map(|(k, start)| {
            let mut rng = stream(seed, tag::PP_START, k as u64);
            let mut state = start.clone();
            let mut local = SamplePool::new(n);
            for _ in 0..proposals {
                let i = rng.gen_range(0..n);
                let de = fields.delta_energy(state.words(), i);
                state.flip(i);
                local.record_with(state.words(), || h.energy_words(state.words()));
                let u: f64 = rng.gen();
                if u >= acceptance_probability(beta, de) {
                    state.flip(i);
                }
            }
            local
        })
        .collect();
    let before = pool.total_samples();
    for part in &parts {
        pool.extend(part);
    }
    Ok(pool.total_samples() - before)
}
