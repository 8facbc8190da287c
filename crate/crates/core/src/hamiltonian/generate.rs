//! Seeded random instance generators.

use indexmap::IndexSet;
use rand::seq::SliceRandom;
use rand::Rng;

use super::DiagonalHamiltonian;
use crate::error::{Error, Result};
use crate::rng::{stream, tag, StreamRng};

/// Coefficient alphabet of the higher-order spin-glass instances.
pub const SIDON_SET: [f64; 8] =
    [-1.0, -19.0 / 28.0, -13.0 / 28.0, -8.0 / 28.0, 8.0 / 28.0, 13.0 / 28.0, 19.0 / 28.0, 1.0];

fn instance_rng(seed: u64) -> StreamRng {
    stream(seed, tag::INSTANCE, 0)
}

fn chain(n: usize, seed: u64, periodic: bool) -> Result<DiagonalHamiltonian> {
    if n < 2 {
        return Err(Error::invalid(format!("a chain needs at least 2 sites, got {n}")));
    }
    let mut rng = instance_rng(seed);
    let mut terms = Vec::with_capacity(2 * n);
    for i in 0..n {
        let h: f64 = rng.gen_range(-1.0..=1.0);
        let j: f64 = rng.gen_range(-1.0..=1.0);
        terms.push((vec![i], h));
        if periodic || i + 1 < n {
            terms.push((vec![i, (i + 1) % n], j));
        }
    }
    DiagonalHamiltonian::new(n, terms)
}

/// Disordered periodic Ising chain `Σ h_i Z_i + J_i Z_i Z_{i+1}` with
/// `h_i, J_i ~ U[-1, 1]` and `Z_N = Z_0`.
pub fn gen_ising_chain(n: usize, seed: u64) -> Result<DiagonalHamiltonian> {
    chain(n, seed, true)
}

/// Same draws as [`gen_ising_chain`] without the wrap-around bond.
pub fn gen_ising_chain_open(n: usize, seed: u64) -> Result<DiagonalHamiltonian> {
    chain(n, seed, false)
}

/// All-to-all spin glass with fields and couplings uniform on `[-e0, e0]`.
pub fn gen_spin_glass(n: usize, e0: f64, seed: u64) -> Result<DiagonalHamiltonian> {
    if n < 2 {
        return Err(Error::invalid(format!("a spin glass needs at least 2 sites, got {n}")));
    }
    if !(e0 > 0.0 && e0.is_finite()) {
        return Err(Error::invalid(format!("energy scale must be positive and finite, got {e0}")));
    }
    let mut rng = instance_rng(seed);
    let mut terms = Vec::with_capacity(n + n * (n - 1) / 2);
    for i in 0..n {
        terms.push((vec![i], rng.gen_range(-e0..=e0)));
    }
    for i in 0..n {
        for j in i + 1..n {
            terms.push((vec![i, j], rng.gen_range(-e0..=e0)));
        }
    }
    DiagonalHamiltonian::new(n, terms)
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Draws `count` distinct sorted `k`-subsets of `0..n`.
fn distinct_supports(rng: &mut StreamRng, n: usize, k: usize, count: usize) -> Vec<Vec<usize>> {
    let total = binomial(n, k);
    if (count as u128) * 2 > total {
        // dense request: enumerate and shuffle
        let mut all = Vec::new();
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            all.push(idx.clone());
            let Some(pos) = (0..k).rev().find(|&p| idx[p] < n - k + p) else { break };
            idx[pos] += 1;
            for q in pos + 1..k {
                idx[q] = idx[q - 1] + 1;
            }
        }
        let (chosen, _) = all.partial_shuffle(rng, count);
        return chosen.to_vec();
    }
    let mut seen: IndexSet<Vec<usize>> = IndexSet::with_capacity(count);
    while seen.len() < count {
        let mut s: Vec<usize> = rand::seq::index::sample(rng, n, k).into_vec();
        s.sort_unstable();
        seen.insert(s);
    }
    seen.into_iter().collect()
}

/// Three-body spin glass on a random hypergraph: `n` fields, `n_pairs`
/// distinct pair terms and `n_triples` distinct triple terms, every
/// coefficient drawn uniformly from [`SIDON_SET`].
pub fn gen_three_body(n: usize, n_pairs: usize, n_triples: usize, seed: u64) -> Result<DiagonalHamiltonian> {
    if n < 1 {
        return Err(Error::invalid("three-body instance needs at least one site"));
    }
    if n_pairs as u128 > binomial(n, 2) {
        return Err(Error::invalid(format!("{n_pairs} distinct pairs do not fit on {n} sites")));
    }
    if n_triples as u128 > binomial(n, 3) {
        return Err(Error::invalid(format!("{n_triples} distinct triples do not fit on {n} sites")));
    }
    let mut rng = instance_rng(seed);
    let draw = |rng: &mut StreamRng| *SIDON_SET.choose(rng).expect("non-empty");
    let mut terms = Vec::with_capacity(n + n_pairs + n_triples);
    for i in 0..n {
        let c = draw(&mut rng);
        terms.push((vec![i], c));
    }
    for support in distinct_supports(&mut rng, n, 2, n_pairs) {
        let c = draw(&mut rng);
        terms.push((support, c));
    }
    for support in distinct_supports(&mut rng, n, 3, n_triples) {
        let c = draw(&mut rng);
        terms.push((support, c));
    }
    DiagonalHamiltonian::new(n, terms)
}
