use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::hamiltonian::DiagonalHamiltonian;
use crate::pauli::{PauliString, PauliSum, I_POWERS};
use crate::pool::SamplePool;
use crate::rng::StreamRng;

pub const DEFAULT_SIMULATION_CAP: usize = 24;

/// Below this many amplitudes gates run on the calling thread.
const PARALLEL_THRESHOLD: usize = 1 << 14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Dense `2^N` amplitude vector; basis index bit `i` is qubit `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn basis(n_qubits: usize, index: u64) -> Result<Self> {
        check_cap(n_qubits, DEFAULT_SIMULATION_CAP)?;
        let mut amps = vec![ZERO; 1 << n_qubits];
        let slot =
            amps.get_mut(index as usize).ok_or_else(|| Error::invalid(format!("basis index {index} out of range")))?;
        *slot = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// `⊗_i (a_i|0⟩ + b_i|1⟩)` from per-qubit `(a_i, b_i)`.
    pub fn product(qubits: &[(Complex64, Complex64)], cap: usize) -> Result<Self> {
        check_cap(qubits.len(), cap)?;
        let mut amps = Vec::with_capacity(1 << qubits.len());
        amps.push(Complex64::new(1.0, 0.0));
        for &(a, b) in qubits {
            // qubit q is the highest bit so far: new amplitudes are [old·a, old·b]
            let len = amps.len();
            amps.extend_from_within(..len);
            amps[..len].iter_mut().for_each(|x| *x *= a);
            amps[len..].iter_mut().for_each(|x| *x *= b);
        }
        Ok(Self { n_qubits: qubits.len(), amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::invalid(format!("{} amplitudes is not a power of two", amps.len())));
        }
        Ok(Self { n_qubits: amps.len().trailing_zeros() as usize, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `P|ψ⟩`, computed out of place.
    pub fn apply_pauli(&self, p: &PauliString) -> Result<Vec<Complex64>> {
        self.check_string(p)?;
        let (x, z) = p.masks_u64();
        let phase = I_POWERS[((x & z).count_ones() % 4) as usize] * p.coefficient;
        let value = |b: usize| {
            let src = b ^ x as usize;
            let sign = if (z as usize & src).count_ones() & 1 == 0 { 1.0 } else { -1.0 };
            phase * sign * self.amps[src]
        };
        let mut out = vec![ZERO; self.amps.len()];
        if self.amps.len() >= PARALLEL_THRESHOLD {
            out.par_iter_mut().enumerate().for_each(|(b, o)| *o = value(b));
        } else {
            out.iter_mut().enumerate().for_each(|(b, o)| *o = value(b));
        }
        Ok(out)
    }

    /// `|ψ⟩ ← exp(−iθP)|ψ⟩ = cos θ |ψ⟩ − i sin θ P|ψ⟩` for a unit-coefficient string.
    pub fn apply_rotation(&mut self, p: &PauliString, theta: f64) -> Result<()> {
        if theta == 0.0 {
            return self.check_string(p);
        }
        let unit = PauliString { coefficient: Complex64::new(1.0, 0.0), ..p.clone() };
        let pp = self.apply_pauli(&unit)?;
        let c = Complex64::new(theta.cos(), 0.0);
        let s = Complex64::new(0.0, -theta.sin());
        let update = |(a, q): (&mut Complex64, &Complex64)| *a = c * *a + s * *q;
        if self.amps.len() >= PARALLEL_THRESHOLD {
            self.amps.par_iter_mut().zip(pp.par_iter()).for_each(update);
        } else {
            self.amps.iter_mut().zip(pp.iter()).for_each(update);
        }
        Ok(())
    }

    /// `⟨ψ|O|ψ⟩`.
    pub fn expectation(&self, op: &PauliSum) -> Result<Complex64> {
        let mut acc = ZERO;
        for s in op.strings() {
            let ps = self.apply_pauli(&s)?;
            acc += self.amps.iter().zip(&ps).map(|(a, b)| a.conj() * b).sum::<Complex64>();
        }
        Ok(acc)
    }

    fn check_string(&self, p: &PauliString) -> Result<()> {
        if p.n_qubits != self.n_qubits {
            return Err(Error::SizeMismatch { left: self.n_qubits, right: p.n_qubits });
        }
        Ok(())
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::OverCap { what: "state-vector simulation", n, cap });
    }
    Ok(())
}

/// Free-function form of [`StateVector::apply_rotation`].
pub fn apply_rotation(state: &mut StateVector, p: &PauliString, theta: f64) -> Result<()> {
    state.apply_rotation(p, theta)
}

/// `n_shots` Born-rule draws, recorded with their energies under `h`.
pub fn sample_measurements(
    state: &StateVector,
    h: &DiagonalHamiltonian,
    n_shots: u64,
    rng: &mut StreamRng,
) -> Result<SamplePool> {
    let n = state.n_qubits();
    if h.n_qubits() != n {
        return Err(Error::SizeMismatch { left: n, right: h.n_qubits() });
    }
    let mut cumulative = Vec::with_capacity(state.amps.len());
    let mut total = 0.0;
    for a in &state.amps {
        total += a.norm_sqr();
        cumulative.push(total);
    }
    let mut pool = SamplePool::new(n);
    for _ in 0..n_shots {
        let u = rng.gen::<f64>() * total;
        let idx = cumulative.partition_point(|&c| c <= u).min(cumulative.len() - 1);
        pool.record_with(&[idx as u64], || h.energy_index(idx as u64));
    }
    Ok(pool)
}

/// Basis state of a register index as a bitstring.
pub fn index_state(index: usize, n: usize) -> BitString {
    BitString::from_index(index as u64, n)
}
