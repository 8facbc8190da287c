//! Classical Markov-chain baselines.

mod mh;
mod pp;
mod pt;

pub use mh::{mh_run, mh_run_budget, mh_run_steps, throughput_benchmark, Throughput};
pub use pp::{greedy_pp, greedy_pp_into, DEFAULT_T_PP};
pub use pt::{
    adapt_ladder, adapt_ladder_with_cap, pt_run, PtOptions, PtOutput, ReplicaLadder, SwapRecord, DEFAULT_LADDER_CAP,
};

use rand::Rng;

use crate::bits::{words_for, BitString};
use crate::hamiltonian::DiagonalHamiltonian;
use crate::rng::StreamRng;

/// Metropolis acceptance `min(1, exp(−β ΔE))`.
///
/// An infinite `beta` is the zero-temperature limit: only strictly
/// downhill moves are accepted.
#[inline]
pub fn acceptance_probability(beta: f64, delta_e: f64) -> f64 {
    if delta_e < 0.0 {
        1.0
    } else if beta.is_infinite() {
        0.0
    } else {
        (-beta * delta_e).exp().min(1.0)
    }
}

/// Replica-exchange acceptance `min(1, exp((E_i − E_j)(β_i − β_j)))`.
#[inline]
pub fn swap_probability(e_i: f64, e_j: f64, beta_i: f64, beta_j: f64) -> f64 {
    ((e_i - e_j) * (beta_i - beta_j)).exp().min(1.0)
}

pub fn random_state(n: usize, rng: &mut StreamRng) -> BitString {
    let mut words: Vec<u64> = (0..words_for(n)).map(|_| rng.gen()).collect();
    let tail = n % 64;
    if tail != 0 {
        *words.last_mut().expect("non-empty") &= (1u64 << tail) - 1;
    } else if n == 0 {
        words[0] = 0;
    }
    BitString::from_words(words)
}

/// Per-qubit incidence lists for `O(degree)` single-flip energy differences.
#[derive(Debug, Clone)]
pub struct LocalFields {
    n_qubits: usize,
    /// `incidence[offsets[i]..offsets[i + 1]]` are the terms containing qubit `i`.
    offsets: Vec<u32>,
    coefs: Vec<f64>,
    /// For incidence `k`, `others[other_offsets[k]..other_offsets[k + 1]]`
    /// are the remaining qubits of that term.
    other_offsets: Vec<u32>,
    others: Vec<u32>,
}

impl LocalFields {
    pub fn new(h: &DiagonalHamiltonian) -> Self {
        let n = h.n_qubits();
        let mut per_qubit: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (t, term) in h.terms().iter().enumerate() {
            for &q in &term.support {
                per_qubit[q].push(t);
            }
        }
        let mut offsets = vec![0u32];
        let mut coefs = Vec::new();
        let mut other_offsets = vec![0u32];
        let mut others = Vec::new();
        for (i, terms) in per_qubit.iter().enumerate() {
            for &t in terms {
                let term = &h.terms()[t];
                coefs.push(term.coef);
                others.extend(term.support.iter().filter(|&&q| q != i).map(|&q| q as u32));
                other_offsets.push(others.len() as u32);
            }
            offsets.push(coefs.len() as u32);
        }
        Self { n_qubits: n, offsets, coefs, other_offsets, others }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Mean number of terms touching a qubit.
    pub fn mean_degree(&self) -> f64 {
        self.coefs.len() as f64 / self.n_qubits.max(1) as f64
    }

    /// Energy change from flipping qubit `i` of `words`.
    #[inline]
    pub fn delta_energy(&self, words: &[u64], i: usize) -> f64 {
        let bit = |q: u32| (words[(q >> 6) as usize] >> (q & 63)) & 1;
        let mut field = 0.0;
        let (lo, hi) = (self.offsets[i] as usize, self.offsets[i + 1] as usize);
        for k in lo..hi {
            let (a, b) = (self.other_offsets[k] as usize, self.other_offsets[k + 1] as usize);
            let parity = self.others[a..b].iter().fold(0, |p, &q| p ^ bit(q));
            field += if parity == 0 { self.coefs[k] } else { -self.coefs[k] };
        }
        let si = if bit(i as u32) == 0 { 1.0 } else { -1.0 };
        -2.0 * si * field
    }
}
