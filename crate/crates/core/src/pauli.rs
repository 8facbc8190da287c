//! Symbolic algebra over N-qubit Pauli operators.
//!
//! A Pauli string is stored as two bit masks plus a complex coefficient. A qubit
//! with only its x bit set carries X, only its z bit carries Z, and both carry
//! Y. The coefficient is the full complex prefactor, so the operator is
//! `coefficient * (P_0 ⊗ P_1 ⊗ ...)` with each `P_i ∈ {I, X, Y, Z}`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::bits::words_for;
use crate::error::{Error, Result};

pub const DEFAULT_PRUNE: f64 = 1e-14;

pub(crate) const I_POWERS: [Complex64; 4] =
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, -1.0)];

/// Bit masks identifying a Pauli string up to its coefficient.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliKey {
    pub x: Vec<u64>,
    pub z: Vec<u64>,
}

impl PauliKey {
    pub fn identity(n_qubits: usize) -> Self {
        let w = words_for(n_qubits);
        Self { x: vec![0; w], z: vec![0; w] }
    }

    fn y_count(&self) -> u32 {
        self.x.iter().zip(&self.z).map(|(x, z)| (x & z).count_ones()).sum()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    pub fn is_diagonal(&self) -> bool {
        self.x.iter().all(|&w| w == 0)
    }

    /// True when the two strings anticommute.
    pub fn anticommutes(&self, other: &PauliKey) -> bool {
        let overlap: u32 =
            self.x.iter().zip(&other.z).chain(self.z.iter().zip(&other.x)).map(|(a, b)| (a & b).count_ones()).sum();
        overlap & 1 == 1
    }

    /// Product of the bare strings: `self · other = phase · result`.
    pub fn product(&self, other: &PauliKey) -> (Complex64, PauliKey) {
        let x: Vec<u64> = self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect();
        let z: Vec<u64> = self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect();
        let zx: u32 = self.z.iter().zip(&other.x).map(|(a, b)| (a & b).count_ones()).sum();
        let out = PauliKey { x, z };
        // σ = i^{|x∧z|} X^x Z^z and Z^z1 X^x2 = (-1)^{|z1∧x2|} X^x2 Z^z1
        let exponent = self.y_count() as i64 + other.y_count() as i64 + 2 * zx as i64 - out.y_count() as i64;
        (I_POWERS[exponent.rem_euclid(4) as usize], out)
    }

    /// Qubits touched by the string, ascending, with their single-qubit letter.
    pub fn letters(&self, n_qubits: usize) -> Vec<(usize, char)> {
        (0..n_qubits)
            .filter_map(|q| {
                let x = (self.x[q / 64] >> (q % 64)) & 1 == 1;
                let z = (self.z[q / 64] >> (q % 64)) & 1 == 1;
                match (x, z) {
                    (false, false) => None,
                    (true, false) => Some((q, 'X')),
                    (true, true) => Some((q, 'Y')),
                    (false, true) => Some((q, 'Z')),
                }
            })
            .collect()
    }

    fn fits(&self, n_qubits: usize) -> bool {
        let w = words_for(n_qubits);
        if self.x.len() != w || self.z.len() != w {
            return false;
        }
        let spare = w * 64 - n_qubits;
        if spare == 0 {
            return true;
        }
        let top = !0u64 << (64 - spare);
        (self.x[w - 1] | self.z[w - 1]) & top == 0
    }
}

/// A single Pauli string with its complex coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliString {
    pub n_qubits: usize,
    pub key: PauliKey,
    pub coefficient: Complex64,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        Self { n_qubits, key: PauliKey::identity(n_qubits), coefficient: Complex64::new(1.0, 0.0) }
    }

    /// A string from `(qubit, letter)` pairs, letters in `IXYZ`.
    pub fn from_letters(n_qubits: usize, letters: &[(usize, char)]) -> Result<Self> {
        let mut p = Self::identity(n_qubits);
        for &(q, c) in letters {
            if q >= n_qubits {
                return Err(Error::invalid(format!("qubit {q} out of range for {n_qubits} qubits")));
            }
            let (x, z) = match c.to_ascii_uppercase() {
                'I' => (false, false),
                'X' => (true, false),
                'Y' => (true, true),
                'Z' => (false, true),
                other => return Err(Error::invalid(format!("unknown Pauli letter {other:?}"))),
            };
            let bit = 1u64 << (q % 64);
            if x {
                p.key.x[q / 64] |= bit;
            }
            if z {
                p.key.z[q / 64] |= bit;
            }
        }
        Ok(p)
    }

    /// Parses the `Y0 Z3` form used in circuit dumps; `I` is the identity.
    pub fn parse(n_qubits: usize, text: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for token in text.split_whitespace() {
            if token == "I" {
                continue;
            }
            let mut chars = token.chars();
            let letter = chars.next().ok_or_else(|| Error::invalid("empty Pauli token"))?;
            let qubit: usize =
                chars.as_str().parse().map_err(|_| Error::invalid(format!("bad Pauli token {token:?}")))?;
            letters.push((qubit, letter));
        }
        Self::from_letters(n_qubits, &letters)
    }

    pub fn z_mask(n_qubits: usize, qubits: &[usize]) -> Result<Self> {
        let letters: Vec<_> = qubits.iter().map(|&q| (q, 'Z')).collect();
        Self::from_letters(n_qubits, &letters)
    }

    pub fn with_coefficient(mut self, c: impl Into<Complex64>) -> Self {
        self.coefficient = c.into();
        self
    }

    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        check_sizes(self.n_qubits, other.n_qubits)?;
        let (phase, key) = self.key.product(&other.key);
        Ok(PauliString { n_qubits: self.n_qubits, key, coefficient: phase * self.coefficient * other.coefficient })
    }

    pub fn is_valid(&self) -> bool {
        self.key.fits(self.n_qubits)
    }

    /// Low 64-bit masks `(x, z)`; only meaningful for registers of at most 64 qubits.
    pub fn masks_u64(&self) -> (u64, u64) {
        (self.key.x[0], self.key.z[0])
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters = self.key.letters(self.n_qubits);
        if letters.is_empty() {
            return write!(f, "I");
        }
        for (k, (q, c)) in letters.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{c}{q}")?;
        }
        Ok(())
    }
}

fn check_sizes(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::SizeMismatch { left: a, right: b });
    }
    Ok(())
}

/// A linear combination of Pauli strings, keyed by masks in a deterministic order.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: BTreeMap<PauliKey, Complex64>,
    threshold: f64,
}

impl PauliSum {
    pub fn new(n_qubits: usize) -> Self {
        Self::with_threshold(n_qubits, DEFAULT_PRUNE)
    }

    pub fn with_threshold(n_qubits: usize, threshold: f64) -> Self {
        Self { n_qubits, terms: BTreeMap::new(), threshold }
    }

    pub fn from_strings(n_qubits: usize, strings: impl IntoIterator<Item = PauliString>) -> Result<Self> {
        let mut sum = Self::new(n_qubits);
        for s in strings {
            sum.add_string(&s)?;
        }
        sum.prune();
        Ok(sum)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, key: &PauliKey) -> Complex64 {
        self.terms.get(key).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliKey, &Complex64)> {
        self.terms.iter()
    }

    pub fn strings(&self) -> impl Iterator<Item = PauliString> + '_ {
        self.terms.iter().map(|(k, &c)| PauliString { n_qubits: self.n_qubits, key: k.clone(), coefficient: c })
    }

    pub fn add_string(&mut self, s: &PauliString) -> Result<()> {
        check_sizes(self.n_qubits, s.n_qubits)?;
        if !s.is_valid() {
            return Err(Error::invalid("Pauli string has mask bits beyond its qubit count"));
        }
        self.accumulate(s.key.clone(), s.coefficient);
        Ok(())
    }

    fn accumulate(&mut self, key: PauliKey, c: Complex64) {
        match self.terms.entry(key) {
            Entry::Occupied(mut e) => *e.get_mut() += c,
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    /// Drops every coefficient with magnitude below the threshold.
    pub fn prune(&mut self) {
        let t = self.threshold;
        self.terms.retain(|_, c| c.norm() >= t);
    }

    pub fn scaled(&self, factor: impl Into<Complex64>) -> PauliSum {
        let f = factor.into();
        let mut out = self.clone();
        out.terms.values_mut().for_each(|c| *c *= f);
        out.prune();
        out
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        check_sizes(self.n_qubits, other.n_qubits)?;
        let mut out = self.clone();
        for (k, &c) in &other.terms {
            out.accumulate(k.clone(), c);
        }
        out.prune();
        Ok(out)
    }

    /// `self + factor · other`.
    pub fn add_scaled(&self, other: &PauliSum, factor: f64) -> Result<PauliSum> {
        check_sizes(self.n_qubits, other.n_qubits)?;
        let mut out = self.clone();
        for (k, &c) in &other.terms {
            out.accumulate(k.clone(), c * factor);
        }
        out.prune();
        Ok(out)
    }

    pub fn multiply(&self, other: &PauliSum) -> Result<PauliSum> {
        check_sizes(self.n_qubits, other.n_qubits)?;
        let mut out = PauliSum::with_threshold(self.n_qubits, self.threshold);
        for (ka, &ca) in &self.terms {
            for (kb, &cb) in &other.terms {
                let (phase, key) = ka.product(kb);
                out.accumulate(key, phase * ca * cb);
            }
        }
        out.prune();
        Ok(out)
    }

    /// `[self, other] = self·other − other·self`.
    ///
    /// Commuting string pairs cancel exactly; anticommuting pairs contribute
    /// twice their product.
    pub fn commutator(&self, other: &PauliSum) -> Result<PauliSum> {
        check_sizes(self.n_qubits, other.n_qubits)?;
        let mut out = PauliSum::with_threshold(self.n_qubits, self.threshold);
        for (ka, &ca) in &self.terms {
            for (kb, &cb) in &other.terms {
                if ka.anticommutes(kb) {
                    let (phase, key) = ka.product(kb);
                    out.accumulate(key, 2.0 * phase * ca * cb);
                }
            }
        }
        out.prune();
        Ok(out)
    }

    /// Normalized Hilbert–Schmidt product `Tr[self† other] / 2^N`.
    pub fn hs_inner(&self, other: &PauliSum) -> Result<Complex64> {
        check_sizes(self.n_qubits, other.n_qubits)?;
        let (small, large, conj_small) =
            if self.terms.len() <= other.terms.len() { (self, other, true) } else { (other, self, false) };
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &c) in &small.terms {
            if let Some(&d) = large.terms.get(k) {
                acc += if conj_small { c.conj() * d } else { d.conj() * c };
            }
        }
        Ok(acc)
    }

    /// `Tr[self† self] / 2^N`.
    pub fn norm_sq(&self) -> f64 {
        self.terms.values().map(|c| c.norm_sqr()).sum()
    }

    /// Real coefficients of a Hermitian sum, or an error naming the first
    /// coefficient whose imaginary part exceeds `tol`.
    pub fn hermitian_terms(&self, tol: f64) -> Result<Vec<(PauliString, f64)>> {
        self.terms
            .iter()
            .map(|(k, c)| {
                if c.im.abs() > tol * c.norm().max(1.0) {
                    return Err(Error::Degenerate(format!(
                        "operator is not Hermitian: coefficient {c} on {}",
                        PauliString { n_qubits: self.n_qubits, key: k.clone(), coefficient: *c }
                    )));
                }
                Ok((
                    PauliString { n_qubits: self.n_qubits, key: k.clone(), coefficient: Complex64::new(1.0, 0.0) },
                    c.re,
                ))
            })
            .collect()
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, s) in self.strings().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({}) {}", s.coefficient, s)?;
        }
        Ok(())
    }
}
