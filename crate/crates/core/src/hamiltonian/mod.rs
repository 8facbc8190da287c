//! Classical spin Hamiltonians diagonal in the computational basis.
//!
//! A [`DiagonalHamiltonian`] is a sum of Z-product terms `c · Π_{i∈S} Z_i`.
//! Energies use the [`SpinConvention`] (bit 0 ↦ +1).

mod generate;
mod io;

pub use generate::{gen_ising_chain, gen_ising_chain_open, gen_spin_glass, gen_three_body, SIDON_SET};
pub use io::{
    load_instance, load_instance_with_metadata, parse_instance, save_instance, to_canonical_json, InstanceFile,
};

use indexmap::IndexMap;

use crate::bits::{words_for, BitString, SpinConvention};
use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum};

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub support: Vec<usize>,
    pub coef: f64,
}

/// Immutable diagonal Hamiltonian with merged, sorted supports.
#[derive(Debug, Clone)]
pub struct DiagonalHamiltonian {
    n_qubits: usize,
    terms: Vec<Term>,
    /// Row-major `terms.len() × words_for(n_qubits)` Z masks.
    masks: Vec<u64>,
}

impl PartialEq for DiagonalHamiltonian {
    fn eq(&self, other: &Self) -> bool {
        self.n_qubits == other.n_qubits && self.terms == other.terms
    }
}

/// Fields `h_i` and ring bonds `J_i` (between sites `i` and `i+1 mod N`).
#[derive(Debug, Clone, PartialEq)]
pub struct ChainCouplings {
    pub fields: Vec<f64>,
    pub bonds: Vec<f64>,
    pub offset: f64,
}

impl DiagonalHamiltonian {
    /// Builds a Hamiltonian from `(support, coefficient)` pairs.
    ///
    /// Supports are sorted; terms sharing a support are summed and keep the
    /// position of their first occurrence.
    pub fn new(n_qubits: usize, terms: impl IntoIterator<Item = (Vec<usize>, f64)>) -> Result<Self> {
        let mut merged: IndexMap<Vec<usize>, f64> = IndexMap::new();
        for (mut support, coef) in terms {
            if !coef.is_finite() {
                return Err(Error::invalid(format!("non-finite coefficient {coef} on support {support:?}")));
            }
            support.sort_unstable();
            if let Some(w) = support.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::invalid(format!("support {support:?} repeats qubit {}", w[0])));
            }
            if let Some(&q) = support.iter().find(|&&q| q >= n_qubits) {
                return Err(Error::invalid(format!(
                    "qubit index {q} in support {support:?} is out of range for {n_qubits} qubits"
                )));
            }
            *merged.entry(support).or_insert(0.0) += coef;
        }
        let terms: Vec<Term> = merged.into_iter().map(|(support, coef)| Term { support, coef }).collect();
        let w = words_for(n_qubits);
        let mut masks = vec![0u64; terms.len() * w];
        for (t, term) in terms.iter().enumerate() {
            for &q in &term.support {
                masks[t * w + q / 64] |= 1u64 << (q % 64);
            }
        }
        Ok(Self { n_qubits, terms, masks })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of terms per support size, index = locality.
    pub fn locality_counts(&self) -> Vec<usize> {
        let max = self.terms.iter().map(|t| t.support.len()).max().unwrap_or(0);
        let mut counts = vec![0; max + 1];
        for t in &self.terms {
            counts[t.support.len()] += 1;
        }
        counts
    }

    pub fn check_state(&self, s: &BitString) -> Result<()> {
        let words = s.words();
        let highest = words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map_or(0, |(i, w)| i * 64 + 64 - w.leading_zeros() as usize);
        if words.len() != words_for(self.n_qubits) || highest > self.n_qubits {
            return Err(Error::LengthMismatch {
                expected: self.n_qubits,
                got: if highest > self.n_qubits { highest } else { words.len() * 64 },
            });
        }
        Ok(())
    }

    /// `E(s) = Σ_terms c · Π_{i∈S} spin(s_i)`.
    pub fn energy(&self, s: &BitString) -> Result<f64> {
        self.check_state(s)?;
        Ok(self.energy_words(s.words()))
    }

    /// Energy of a `0`/`1` string (qubit 0 first).
    pub fn energy_text(&self, text: &str) -> Result<f64> {
        if text.chars().count() != self.n_qubits {
            return Err(Error::LengthMismatch { expected: self.n_qubits, got: text.chars().count() });
        }
        self.energy(&BitString::parse(text)?)
    }

    /// Unchecked energy for a word slice of the right width.
    #[inline]
    pub fn energy_words(&self, words: &[u64]) -> f64 {
        let w = words.len();
        let mut e = 0.0;
        for (t, term) in self.terms.iter().enumerate() {
            e += term.coef * SpinConvention::parity_sign(words, &self.masks[t * w..(t + 1) * w]);
        }
        e
    }

    /// Energy of basis index `index` for registers of at most 64 qubits.
    #[inline]
    pub fn energy_index(&self, index: u64) -> f64 {
        debug_assert!(self.n_qubits <= 64);
        let mut e = 0.0;
        for (term, &mask) in self.terms.iter().zip(&self.masks) {
            let sign = if (index & mask).count_ones() & 1 == 0 { 1.0 } else { -1.0 };
            e += term.coef * sign;
        }
        e
    }

    /// The operator as a Pauli sum of Z strings.
    pub fn to_pauli_sum(&self) -> PauliSum {
        let strings = self.terms.iter().map(|t| {
            PauliString::z_mask(self.n_qubits, &t.support)
                .expect("supports validated on construction")
                .with_coefficient(t.coef)
        });
        PauliSum::from_strings(self.n_qubits, strings).expect("sizes agree")
    }

    /// Fields and ring bonds when the instance is a 1D chain.
    pub fn chain_couplings(&self) -> Result<ChainCouplings> {
        let n = self.n_qubits;
        if n < 2 {
            return Err(Error::NotAChain(format!("{n} qubits")));
        }
        let mut out = ChainCouplings { fields: vec![0.0; n], bonds: vec![0.0; n], offset: 0.0 };
        for term in &self.terms {
            match term.support.as_slice() {
                [] => out.offset += term.coef,
                [i] => out.fields[*i] += term.coef,
                [i, j] if *j == i + 1 => out.bonds[*i] += term.coef,
                [0, j] if *j == n - 1 => out.bonds[n - 1] += term.coef,
                other => {
                    return Err(Error::NotAChain(format!(
                        "term on qubits {other:?} is not a field or a nearest-neighbour ring bond"
                    )))
                }
            }
        }
        Ok(out)
    }

    pub fn is_chain(&self) -> bool {
        self.chain_couplings().is_ok()
    }

    /// Mean number of terms touching a site.
    pub fn mean_site_degree(&self) -> f64 {
        let total: usize = self.terms.iter().map(|t| t.support.len()).sum();
        total as f64 / self.n_qubits.max(1) as f64
    }
}
