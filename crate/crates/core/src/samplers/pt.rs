use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{acceptance_probability, random_state, swap_probability, LocalFields};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::hamiltonian::DiagonalHamiltonian;
use crate::pool::SamplePool;
use crate::rng::{derive_seed, stream, tag, StreamRng};

pub const DEFAULT_LADDER_CAP: usize = 30;

/// Sorted inverse temperatures plus swap statistics for each adjacent pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicaLadder {
    betas: Vec<f64>,
    swap_attempts: Vec<u64>,
    swap_accepts: Vec<u64>,
}

impl ReplicaLadder {
    pub fn new(betas: Vec<f64>) -> Result<Self> {
        if betas.is_empty() {
            return Err(Error::invalid("ladder needs at least one inverse temperature"));
        }
        if betas.iter().any(|b| !b.is_finite() || *b < 0.0) {
            return Err(Error::invalid("ladder inverse temperatures must be finite and >= 0"));
        }
        if betas.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("ladder inverse temperatures must be strictly increasing"));
        }
        let pairs = betas.len() - 1;
        Ok(Self { betas, swap_attempts: vec![0; pairs], swap_accepts: vec![0; pairs] })
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn len(&self) -> usize {
        self.betas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.betas.is_empty()
    }

    pub fn swap_attempts(&self) -> &[u64] {
        &self.swap_attempts
    }

    pub fn swap_accepts(&self) -> &[u64] {
        &self.swap_accepts
    }

    /// Accepted / attempted swaps per adjacent pair; 0 for pairs never tried.
    pub fn acceptance_ratios(&self) -> Vec<f64> {
        self.swap_attempts
            .iter()
            .zip(&self.swap_accepts)
            .map(|(&a, &s)| if a == 0 { 0.0 } else { s as f64 / a as f64 })
            .collect()
    }

    pub fn reset_counters(&mut self) {
        self.swap_attempts.iter_mut().for_each(|x| *x = 0);
        self.swap_accepts.iter_mut().for_each(|x| *x = 0);
    }

    /// New ladder with the midpoint inserted into every pair flagged in `split`.
    pub fn refined(&self, split: &[bool]) -> ReplicaLadder {
        let mut betas = vec![self.betas[0]];
        for (j, w) in self.betas.windows(2).enumerate() {
            if split[j] {
                betas.push(0.5 * (w[0] + w[1]));
            }
            betas.push(w[1]);
        }
        let pairs = betas.len() - 1;
        ReplicaLadder { betas, swap_attempts: vec![0; pairs], swap_accepts: vec![0; pairs] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PtOptions {
    pub n_sweeps: u64,
    /// Stops after exactly this many recorded samples across replicas; the
    /// last sweep is shared out evenly, lower slots first.
    pub sample_limit: Option<u64>,
    pub record: bool,
    pub log_swaps: bool,
}

impl PtOptions {
    pub fn sweeps(n_sweeps: u64) -> Self {
        Self { n_sweeps, sample_limit: None, record: true, log_swaps: false }
    }

    pub fn samples(limit: u64) -> Self {
        Self { n_sweeps: 0, sample_limit: Some(limit), record: true, log_swaps: false }
    }
}

/// One swap decision, enough to replay it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SwapRecord {
    pub sweep: u64,
    pub pair: usize,
    pub energy_lo: f64,
    pub energy_hi: f64,
    pub beta_lo: f64,
    pub beta_hi: f64,
    pub uniform: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone)]
pub struct PtOutput {
    /// One pool per temperature slot.
    pub pools: Vec<SamplePool>,
    pub ladder: ReplicaLadder,
    pub swaps: Vec<SwapRecord>,
    pub sweeps_run: u64,
}

impl PtOutput {
    /// All replica pools interleaved in update order.
    pub fn union(&self) -> SamplePool {
        let n = self.pools.first().map_or(0, |p| p.n_qubits());
        SamplePool::merge_interleaved(n, &self.pools)
    }

    pub fn total_samples(&self) -> u64 {
        self.pools.iter().map(|p| p.total_samples()).sum()
    }
}

struct Replica {
    state: BitString,
    energy: f64,
    rng: StreamRng,
    pool: SamplePool,
}

impl Replica {
    fn updates(&mut self, h: &DiagonalHamiltonian, fields: &LocalFields, beta: f64, count: u64, record: bool) {
        let n = h.n_qubits();
        for _ in 0..count {
            let i = self.rng.gen_range(0..n);
            let de = fields.delta_energy(self.state.words(), i);
            let u: f64 = self.rng.gen();
            if u < acceptance_probability(beta, de) {
                self.state.flip(i);
                self.energy += de;
            }
            if record {
                let state = &self.state;
                self.energy = self.pool.record_with(state.words(), || h.energy_words(state.words()));
            }
        }
    }
}

/// Parallel tempering. A sweep is `N` single-flip updates per replica, then
/// swap attempts on even pairs (even sweeps) or odd pairs (odd sweeps).
/// Counters of the returned ladder accumulate on top of the input's.
pub fn pt_run(h: &DiagonalHamiltonian, ladder: &ReplicaLadder, options: &PtOptions, seed: u64) -> Result<PtOutput> {
    let r = ladder.len();
    if r < 2 {
        return Err(Error::invalid(format!("parallel tempering needs >= 2 replicas, ladder has {r}")));
    }
    let n = h.n_qubits();
    if n == 0 {
        return Err(Error::invalid("instance has no qubits"));
    }
    let per_sweep = (n * r) as u64;
    let (n_sweeps, limit) = match options.sample_limit {
        Some(0) => return Err(Error::invalid("sample_limit must be >= 1")),
        Some(l) => (l.div_ceil(per_sweep), l),
        None if options.n_sweeps == 0 => return Err(Error::invalid("n_sweeps must be >= 1")),
        None => (options.n_sweeps, options.n_sweeps * per_sweep),
    };
    let fields = LocalFields::new(h);
    let mut replicas: Vec<Replica> = (0..r)
        .map(|k| {
            let state = random_state(n, &mut stream(seed, tag::PT_INIT, k as u64));
            let energy = h.energy_words(state.words());
            Replica { state, energy, rng: stream(seed, tag::PT_REPLICA, k as u64), pool: SamplePool::new(n) }
        })
        .collect();
    let mut swap_rng = stream(seed, tag::PT_SWAP, 0);
    let mut ladder = ladder.clone();
    let mut swaps = Vec::new();
    let betas = ladder.betas.clone();

    for sweep in 0..n_sweeps {
        let done = sweep * per_sweep;
        let full = limit - done >= per_sweep;
        let remaining = limit - done;
        replicas.par_iter_mut().enumerate().for_each(|(k, rep)| {
            let quota =
                if full { n as u64 } else { remaining / r as u64 + u64::from((k as u64) < remaining % r as u64) };
            rep.updates(h, &fields, betas[k], quota, options.record);
        });
        if !full {
            break;
        }
        let mut pair = (sweep % 2) as usize;
        while pair + 1 < r {
            let (lo, hi) = (pair, pair + 1);
            let (energy_lo, energy_hi) = (replicas[lo].energy, replicas[hi].energy);
            let p = swap_probability(energy_lo, energy_hi, betas[lo], betas[hi]);
            let u: f64 = swap_rng.gen();
            let accepted = u < p;
            ladder.swap_attempts[pair] += 1;
            if accepted {
                ladder.swap_accepts[pair] += 1;
                let (a, b) = replicas.split_at_mut(hi);
                std::mem::swap(&mut a[lo].state, &mut b[0].state);
                std::mem::swap(&mut a[lo].energy, &mut b[0].energy);
            }
            if options.log_swaps {
                swaps.push(SwapRecord {
                    sweep,
                    pair,
                    energy_lo,
                    energy_hi,
                    beta_lo: betas[lo],
                    beta_hi: betas[hi],
                    uniform: u,
                    accepted,
                });
            }
            pair += 2;
        }
    }
    Ok(PtOutput { pools: replicas.into_iter().map(|r| r.pool).collect(), ladder, swaps, sweeps_run: n_sweeps })
}

/// Grows a ladder from `{beta_min, beta_max}` by inserting midpoints into
/// every pair whose swap acceptance falls below `r`. `n_pt_steps` counts
/// single-flip updates per replica for each trial run.
pub fn adapt_ladder(
    h: &DiagonalHamiltonian,
    beta_min: f64,
    beta_max: f64,
    r: f64,
    n_pt_steps: u64,
    seed: u64,
) -> Result<ReplicaLadder> {
    adapt_ladder_with_cap(h, beta_min, beta_max, r, n_pt_steps, seed, DEFAULT_LADDER_CAP)
}

pub fn adapt_ladder_with_cap(
    h: &DiagonalHamiltonian,
    beta_min: f64,
    beta_max: f64,
    r: f64,
    n_pt_steps: u64,
    seed: u64,
    max_iterations: usize,
) -> Result<ReplicaLadder> {
    if !(beta_min > 0.0 && beta_min < beta_max && beta_max.is_finite()) {
        return Err(Error::invalid(format!("need 0 < beta_min < beta_max, got {beta_min}, {beta_max}")));
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::invalid(format!("target acceptance must lie in (0, 1), got {r}")));
    }
    if n_pt_steps == 0 {
        return Err(Error::invalid("n_pt_steps must be >= 1"));
    }
    let sweeps = n_pt_steps.div_ceil(h.n_qubits().max(1) as u64).max(2);
    let options = PtOptions { n_sweeps: sweeps, sample_limit: None, record: false, log_swaps: false };
    let mut ladder = ReplicaLadder::new(vec![beta_min, beta_max])?;
    for it in 0..max_iterations {
        let out = pt_run(h, &ladder, &options, derive_seed(seed, tag::LADDER, it as u64))?;
        let failing: Vec<bool> = out.ladder.acceptance_ratios().iter().map(|&a| a < r).collect();
        if !failing.contains(&true) {
            return Ok(out.ladder);
        }
        ladder = out.ladder.refined(&failing);
    }
    Err(Error::LadderNotConverged { target: r, iterations: max_iterations, partial: ladder.betas })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::gen_spin_glass;

    #[test]
    fn ladder_validation() {
        assert!(ReplicaLadder::new(vec![1.0, 1.0]).is_err());
        assert!(ReplicaLadder::new(vec![2.0, 1.0]).is_err());
        assert!(ReplicaLadder::new(vec![]).is_err());
        let h = gen_spin_glass(4, 1.0, 0).unwrap();
        let single = ReplicaLadder::new(vec![1.0]).unwrap();
        assert!(pt_run(&h, &single, &PtOptions::sweeps(3), 0).is_err());
    }

    #[test]
    fn midpoint_refinement() {
        let l = ReplicaLadder::new(vec![0.01, 50.0]).unwrap();
        assert_eq!(l.refined(&[true]).betas(), &[0.01, 25.005, 50.0]);
        let l = ReplicaLadder::new(vec![0.0, 1.0, 2.0, 4.0]).unwrap();
        assert_eq!(l.refined(&[false, true, true]).betas(), &[0.0, 1.0, 1.5, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn sample_limit_is_exact_and_pairs_alternate() {
        let h = gen_spin_glass(6, 1.0, 3).unwrap();
        let ladder = ReplicaLadder::new(vec![0.1, 0.5, 1.0, 2.0]).unwrap();
        let out = pt_run(&h, &ladder, &PtOptions::samples(1001), 5).unwrap();
        assert_eq!(out.total_samples(), 1001);
        let mut opts = PtOptions::sweeps(10);
        opts.log_swaps = true;
        let out = pt_run(&h, &ladder, &opts, 5).unwrap();
        assert_eq!(out.ladder.swap_attempts(), &[5, 5, 5]);
        for s in &out.swaps {
            assert_eq!(s.pair % 2, (s.sweep % 2) as usize);
        }
        for p in &out.pools {
            p.verify_energies(&h, 1e-12).unwrap();
            assert_eq!(p.total_samples(), 60);
        }
    }

    #[test]
    fn logged_swaps_replay() {
        let h = gen_spin_glass(8, 1.0, 1).unwrap();
        let ladder = ReplicaLadder::new(vec![0.2, 0.6, 1.4, 3.0]).unwrap();
        let mut opts = PtOptions::sweeps(200);
        opts.log_swaps = true;
        let out = pt_run(&h, &ladder, &opts, 2).unwrap();
        for s in &out.swaps {
            let p = swap_probability(s.energy_lo, s.energy_hi, s.beta_lo, s.beta_hi);
            assert_eq!(s.accepted, s.uniform < p);
        }
        let accepted = out.swaps.iter().filter(|s| s.accepted).count() as u64;
        assert_eq!(accepted, out.ladder.swap_accepts().iter().sum::<u64>());
    }

    #[test]
    fn cap_reports_partial_ladder() {
        let h = gen_spin_glass(8, 1.0, 1).unwrap();
        match adapt_ladder_with_cap(&h, 0.01, 50.0, 0.99, 64, 0, 1) {
            Err(Error::LadderNotConverged { partial, iterations, .. }) => {
                assert_eq!(iterations, 1);
                assert_eq!(partial, vec![0.01, 25.005, 50.0]);
            }
            other => panic!("{other:?}"),
        }
    }
}
