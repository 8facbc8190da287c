//! Bitstrings and the bit-to-spin convention.

use std::borrow::Borrow;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};

/// Project-wide mapping between measured bits and Z eigenvalues.
///
/// Bit 0 is spin +1 and bit 1 is spin -1, i.e. `Z|0> = +|0>`. Energies, bias
/// fields and observables all go through this type.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SpinConvention;

impl SpinConvention {
    #[inline]
    pub const fn spin(bit: bool) -> i8 {
        if bit {
            -1
        } else {
            1
        }
    }

    #[inline]
    pub fn spin_f64(bit: bool) -> f64 {
        Self::spin(bit) as f64
    }

    /// Z-product eigenvalue of the qubits selected by `mask`: `(-1)^popcount(s & mask)`.
    #[inline]
    pub fn parity_sign(state: &[u64], mask: &[u64]) -> f64 {
        let ones: u32 = state.iter().zip(mask).map(|(s, m)| (s & m).count_ones()).sum();
        if ones & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

pub(crate) const fn words_for(n: usize) -> usize {
    if n == 0 {
        1
    } else {
        n.div_ceil(64)
    }
}

/// A computational-basis state. Bit `i` is qubit `i`; unused high bits are zero.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BitString {
    words: Vec<u64>,
}

impl Hash for BitString {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.words.as_slice().hash(state)
    }
}

impl Borrow<[u64]> for BitString {
    fn borrow(&self) -> &[u64] {
        &self.words
    }
}

impl BitString {
    pub fn zeros(n: usize) -> Self {
        Self { words: vec![0; words_for(n)] }
    }

    pub fn from_words(words: Vec<u64>) -> Self {
        Self { words }
    }

    /// Basis index `index` of an `n <= 64` qubit register.
    pub fn from_index(index: u64, n: usize) -> Self {
        let mut words = vec![0; words_for(n)];
        words[0] = index;
        Self { words }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut s = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            s.set(i, b);
        }
        s
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Low word; the full state for registers of up to 64 qubits.
    pub fn index(&self) -> u64 {
        self.words[0]
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        let mask = 1u64 << (i % 64);
        if bit {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    #[inline]
    pub fn spin(&self, i: usize) -> i8 {
        SpinConvention::spin(self.get(i))
    }

    pub fn complement(&self, n: usize) -> Self {
        let mut out = self.clone();
        for i in 0..n {
            out.flip(i);
        }
        out
    }

    /// `0`/`1` text with qubit 0 as the first character.
    pub fn to_text(&self, n: usize) -> String {
        (0..n).map(|i| if self.get(i) { '1' } else { '0' }).collect()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut s = Self::zeros(text.len());
        for (i, c) in text.chars().enumerate() {
            match c {
                '0' => {}
                '1' => s.set(i, true),
                other => {
                    return Err(Error::invalid(format!("bitstring character {other:?} at position {i} is not 0 or 1")))
                }
            }
        }
        Ok(s)
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString(")?;
        for w in self.words.iter().rev() {
            write!(f, "{w:016x}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convention_bit_zero_is_spin_up() {
        assert_eq!(SpinConvention::spin(false), 1);
        assert_eq!(SpinConvention::spin(true), -1);
    }

    #[test]
    fn text_round_trip_uses_qubit_zero_first() {
        let s = BitString::parse("0110").unwrap();
        assert!(!s.get(0) && s.get(1) && s.get(2) && !s.get(3));
        assert_eq!(s.index(), 0b0110);
        assert_eq!(s.to_text(4), "0110");
        assert!(BitString::parse("01x").is_err());
    }

    #[test]
    fn multiword_states() {
        let mut s = BitString::zeros(130);
        s.flip(129);
        s.flip(64);
        assert_eq!(s.words().len(), 3);
        assert!(s.get(129) && s.get(64) && !s.get(63));
        assert_eq!(BitString::parse(&s.to_text(130)).unwrap(), s);
    }

    #[test]
    fn parity_sign_counts_selected_ones() {
        let s = BitString::parse("1101").unwrap();
        let mask = BitString::parse("1100").unwrap();
        assert_eq!(SpinConvention::parity_sign(s.words(), mask.words()), 1.0);
        let mask = BitString::parse("1111").unwrap();
        assert_eq!(SpinConvention::parity_sign(s.words(), mask.words()), -1.0);
    }
}
