use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{acceptance_probability, random_state, LocalFields};
use crate::error::{Error, Result};
use crate::hamiltonian::DiagonalHamiltonian;
use crate::pool::SamplePool;
use crate::rng::{stream, tag, StreamRng};

fn check_beta(beta: f64) -> Result<()> {
    if !(beta >= 0.0) || beta.is_nan() {
        return Err(Error::invalid(format!("beta must be >= 0, got {beta}")));
    }
    Ok(())
}

/// One single-flip Metropolis chain; every step (accepted or not) is recorded.
pub(super) fn walker(
    h: &DiagonalHamiltonian,
    fields: &LocalFields,
    beta: f64,
    steps: u64,
    rng: &mut StreamRng,
) -> SamplePool {
    let n = h.n_qubits();
    let mut state = random_state(n, rng);
    let mut pool = SamplePool::new(n);
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let de = fields.delta_energy(state.words(), i);
        let u: f64 = rng.gen();
        if u < acceptance_probability(beta, de) {
            state.flip(i);
        }
        pool.record_with(state.words(), || h.energy_words(state.words()));
    }
    pool
}

/// `n_walkers` independent chains of `n_steps` steps each.
pub fn mh_run(h: &DiagonalHamiltonian, beta: f64, n_walkers: usize, n_steps: u64, seed: u64) -> Result<SamplePool> {
    if n_walkers == 0 || n_steps == 0 {
        return Err(Error::invalid("n_walkers and n_steps must be >= 1"));
    }
    mh_run_steps(h, beta, &vec![n_steps; n_walkers], seed)
}

/// Splits `total_samples` over `n_walkers` chains; the first
/// `total_samples % n_walkers` walkers take one extra step.
pub fn mh_run_budget(
    h: &DiagonalHamiltonian,
    beta: f64,
    n_walkers: usize,
    total_samples: u64,
    seed: u64,
) -> Result<SamplePool> {
    if n_walkers == 0 || total_samples < n_walkers as u64 {
        return Err(Error::invalid(format!("budget of {total_samples} samples cannot feed {n_walkers} walkers")));
    }
    let w = n_walkers as u64;
    let steps: Vec<u64> = (0..w).map(|k| total_samples / w + u64::from(k < total_samples % w)).collect();
    mh_run_steps(h, beta, &steps, seed)
}

/// Walker `k` runs `steps[k]` steps on stream `(seed, k)`.
pub fn mh_run_steps(h: &DiagonalHamiltonian, beta: f64, steps: &[u64], seed: u64) -> Result<SamplePool> {
    check_beta(beta)?;
    if h.n_qubits() == 0 {
        return Err(Error::invalid("instance has no qubits"));
    }
    let fields = LocalFields::new(h);
    let parts: Vec<SamplePool> = steps
        .par_iter()
        .enumerate()
        .map(|(k, &n)| walker(h, &fields, beta, n, &mut stream(seed, tag::MH_WALKER, k as u64)))
        .collect();
    Ok(SamplePool::merge_interleaved(h.n_qubits(), &parts))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Throughput {
    pub updates: u64,
    pub seconds: f64,
    pub updates_per_second: f64,
    pub mean_degree: f64,
}

/// Single-threaded Metropolis update rate at `beta = 1`, without pool
/// recording, measured for at least `duration`.
pub fn throughput_benchmark(h: &DiagonalHamiltonian, duration: Duration, seed: u64) -> Result<Throughput> {
    let n = h.n_qubits();
    if n == 0 {
        return Err(Error::invalid("instance has no qubits"));
    }
    let fields = LocalFields::new(h);
    let mut rng = stream(seed, tag::HARNESS, 0);
    let mut state = random_state(n, &mut rng);
    let beta = 1.0;
    let batch = 1u64 << 14;
    let mut updates = 0u64;
    let mut accepted = 0u64;
    let start = Instant::now();
    loop {
        for _ in 0..batch {
            let i = rng.gen_range(0..n);
            let de = fields.delta_energy(state.words(), i);
            let u: f64 = rng.gen();
            if u < acceptance_probability(beta, de) {
                state.flip(i);
                accepted += 1;
            }
        }
        updates += batch;
        if start.elapsed() >= duration {
            break;
        }
    }
    let seconds = start.elapsed().as_secs_f64();
    std::hint::black_box(accepted);
    Ok(Throughput { updates, seconds, updates_per_second: updates as f64 / seconds, mean_degree: fields.mean_degree() })
}
