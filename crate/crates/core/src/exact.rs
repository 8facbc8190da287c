//! Ground-truth thermodynamics.
//!
//! [`Spectrum`] enumerates all `2^N` energies and evaluates Boltzmann
//! quantities in log space. [`transfer_matrix`] solves disordered periodic
//! chains at any `N` through a rescaled product of 2×2 matrices.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hamiltonian::{ChainCouplings, DiagonalHamiltonian};
use crate::numeric::LogSumExp;

pub const DEFAULT_ENUMERATION_CAP: usize = 24;

/// States per deterministic work partition.
const CHUNK: usize = 1 << 12;

/// Exact thermal averages at one inverse temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactThermal {
    pub beta: f64,
    pub ln_z: f64,
    pub mean_energy: f64,
    /// `⟨Z_i⟩` per site.
    pub magnetization: Vec<f64>,
    /// `⟨Z_i Z_{i+1 mod N}⟩` per ring bond.
    pub bond_correlators: Vec<f64>,
    /// `μ(s)` indexed by basis index; enumeration only.
    pub probabilities: Option<Vec<f64>>,
}

impl ExactThermal {
    /// `(1/N) Σ ⟨Z_i⟩`.
    pub fn mean_magnetization(&self) -> f64 {
        self.magnetization.iter().sum::<f64>() / self.magnetization.len() as f64
    }

    /// Ring-averaged connected correlator `(1/N) Σ [⟨Z_i Z_{i+1}⟩ − ⟨Z_i⟩⟨Z_{i+1}⟩]`.
    pub fn connected_correlator(&self) -> f64 {
        let n = self.magnetization.len();
        if n < 2 {
            return 0.0;
        }
        let m = &self.magnetization;
        (0..n).map(|i| self.bond_correlators[i] - m[i] * m[(i + 1) % n]).sum::<f64>() / n as f64
    }
}

/// Every basis-state energy of an instance, indexed by basis index.
#[derive(Debug, Clone)]
pub struct Spectrum {
    n_qubits: usize,
    energies: Vec<f64>,
}

impl Spectrum {
    pub fn new(h: &DiagonalHamiltonian) -> Result<Self> {
        Self::with_cap(h, DEFAULT_ENUMERATION_CAP)
    }

    pub fn with_cap(h: &DiagonalHamiltonian, cap: usize) -> Result<Self> {
        let n = h.n_qubits();
        if n > cap.min(40) {
            return Err(Error::OverCap { what: "exact enumeration", n, cap });
        }
        let size = 1usize << n;
        let mut energies = vec![0.0; size];
        energies.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
            let base = (c * CHUNK) as u64;
            for (k, e) in chunk.iter_mut().enumerate() {
                *e = h.energy_index(base + k as u64);
            }
        });
        Ok(Self { n_qubits: n, energies })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn ground_energy(&self) -> f64 {
        self.energies.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Basis indices of the lowest energy, ascending.
    pub fn ground_states(&self, tol: f64) -> Vec<u64> {
        let e0 = self.ground_energy();
        (0..self.energies.len() as u64).filter(|&i| self.energies[i as usize] <= e0 + tol).collect()
    }

    pub fn ln_z(&self, beta: f64) -> f64 {
        let partials: Vec<LogSumExp> = self
            .energies
            .par_chunks(CHUNK)
            .map(|chunk| {
                let mut acc = LogSumExp::new();
                chunk.iter().for_each(|&e| acc.push(-beta * e));
                acc
            })
            .collect();
        let mut total = LogSumExp::new();
        partials.iter().for_each(|p| total.merge(p));
        total.value()
    }

    pub fn mean_energy(&self, beta: f64) -> f64 {
        let ln_z = self.ln_z(beta);
        let partials: Vec<f64> = self
            .energies
            .par_chunks(CHUNK)
            .map(|chunk| chunk.iter().map(|&e| e * (-beta * e - ln_z).exp()).sum())
            .collect();
        partials.iter().sum()
    }

    /// Full thermal record including the probability table.
    pub fn thermal(&self, beta: f64) -> ExactThermal {
        let n = self.n_qubits;
        let ln_z = self.ln_z(beta);
        let probabilities: Vec<f64> = self.energies.par_iter().map(|&e| (-beta * e - ln_z).exp()).collect();
        let bonds = if n >= 2 { n } else { 0 };
        // [energy, m_0..m_{n-1}, c_0..c_{bonds-1}] per chunk, summed in chunk order
        let partials: Vec<Vec<f64>> = probabilities
            .par_chunks(CHUNK)
            .enumerate()
            .map(|(c, chunk)| {
                let mut acc = vec![0.0; 1 + n + bonds];
                for (k, &p) in chunk.iter().enumerate() {
                    let idx = c * CHUNK + k;
                    acc[0] += p * self.energies[idx];
                    for i in 0..n {
                        let si = 1.0 - 2.0 * ((idx >> i) & 1) as f64;
                        acc[1 + i] += p * si;
                        if bonds > 0 {
                            let j = (i + 1) % n;
                            let sj = 1.0 - 2.0 * ((idx >> j) & 1) as f64;
                            acc[1 + n + i] += p * si * sj;
                        }
                    }
                }
                acc
            })
            .collect();
        let mut total = vec![0.0; 1 + n + bonds];
        for p in &partials {
            total.iter_mut().zip(p).for_each(|(t, x)| *t += x);
        }
        ExactThermal {
            beta,
            ln_z,
            mean_energy: total[0],
            magnetization: total[1..1 + n].to_vec(),
            bond_correlators: total[1 + n..].to_vec(),
            probabilities: Some(probabilities),
        }
    }
}

pub fn enumerate_boltzmann(h: &DiagonalHamiltonian, beta: f64) -> Result<ExactThermal> {
    enumerate_boltzmann_with_cap(h, beta, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_boltzmann_with_cap(h: &DiagonalHamiltonian, beta: f64, cap: usize) -> Result<ExactThermal> {
    check_beta(beta)?;
    Ok(Spectrum::with_cap(h, cap)?.thermal(beta))
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::invalid(format!("inverse temperature must be finite and >= 0, got {beta}")));
    }
    Ok(())
}

type Mat2 = [[f64; 2]; 2];

const IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

/// A 2×2 matrix times `exp(log_scale)`.
#[derive(Debug, Clone, Copy)]
struct Scaled {
    m: Mat2,
    log_scale: f64,
}

impl Scaled {
    fn identity() -> Self {
        Self { m: IDENTITY, log_scale: 0.0 }
    }

    /// Divides by the largest entry and folds it into the log scale.
    fn normalized(mut self) -> Self {
        let max = self.m.iter().flatten().fold(0.0f64, |a, &b| a.max(b.abs()));
        if max > 0.0 {
            self.m.iter_mut().flatten().for_each(|x| *x /= max);
            self.log_scale += max.ln();
        }
        self
    }

    fn mul(&self, other: &Scaled) -> Scaled {
        Scaled { m: matmul(&self.m, &other.m), log_scale: self.log_scale + other.log_scale }.normalized()
    }
}

fn matmul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Flips the sign of the row belonging to spin −1: `diag(1, −1) · m`.
fn z_left(m: &Mat2) -> Mat2 {
    [m[0], [-m[1][0], -m[1][1]]]
}

fn trace(m: &Mat2) -> f64 {
    m[0][0] + m[1][1]
}

/// Transfer matrix of bond `i`, index 0 ↔ spin +1:
/// `T_i[a][b] = exp(−β (J_i s_a s_b + (h_i s_a + h_{i+1} s_b) / 2))`.
fn site_matrix(c: &ChainCouplings, i: usize, beta: f64) -> Scaled {
    let n = c.fields.len();
    let (hi, hj, j) = (c.fields[i], c.fields[(i + 1) % n], c.bonds[i]);
    let spin = [1.0, -1.0];
    let mut expo = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            expo[a][b] = -beta * (j * spin[a] * spin[b] + 0.5 * (hi * spin[a] + hj * spin[b]));
        }
    }
    let max = expo.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut m = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            m[a][b] = (expo[a][b] - max).exp();
        }
    }
    Scaled { m, log_scale: max }
}

/// Exact solution of a periodic (or open) 1D chain at inverse temperature `beta`.
///
/// Site and bond averages come from inserting `diag(1, −1)` into the traced
/// product at the corresponding sites; prefix and suffix products make the
/// whole evaluation `O(N)`.
pub fn transfer_matrix(h: &DiagonalHamiltonian, beta: f64) -> Result<ExactThermal> {
    check_beta(beta)?;
    let c = h.chain_couplings()?;
    Ok(transfer_matrix_couplings(&c, beta))
}

pub(crate) fn transfer_matrix_couplings(c: &ChainCouplings, beta: f64) -> ExactThermal {
    let n = c.fields.len();
    let mats: Vec<Scaled> = (0..n).map(|i| site_matrix(c, i, beta)).collect();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(Scaled::identity());
    for t in &mats {
        let next = prefix.last().expect("non-empty").mul(t);
        prefix.push(next);
    }
    let mut suffix = vec![Scaled::identity(); n + 1];
    for i in (0..n).rev() {
        suffix[i] = mats[i].mul(&suffix[i + 1]);
    }
    let full = prefix[n];
    let ln_z_raw = trace(&full.m).ln() + full.log_scale;

    // each average is a ratio of two traces sharing one set of scale factors,
    // so rounding in the accumulated scales cancels and |⟨·⟩| ≤ 1 holds exactly
    let magnetization: Vec<f64> = (0..n)
        .map(|i| {
            let (p, s) = (&prefix[i].m, &suffix[i].m);
            trace(&matmul(p, &z_left(s))) / trace(&matmul(p, s))
        })
        .collect();
    let bond_correlators: Vec<f64> = (0..n)
        .map(|i| {
            let (p, t, s) = (&prefix[i].m, &mats[i].m, &suffix[i + 1].m);
            let inner = matmul(&z_left(t), &z_left(s));
            trace(&matmul(p, &inner)) / trace(&matmul(p, &matmul(t, s)))
        })
        .collect();
    let mean_energy = c.offset
        + c.fields.iter().zip(&magnetization).map(|(h, m)| h * m).sum::<f64>()
        + c.bonds.iter().zip(&bond_correlators).map(|(j, zz)| j * zz).sum::<f64>();
    ExactThermal {
        beta,
        ln_z: ln_z_raw - beta * c.offset,
        mean_energy,
        magnetization,
        bond_correlators,
        probabilities: None,
    }
}

/// Picks the cheapest exact route for an instance: transfer matrix for
/// chains, enumeration otherwise.
#[derive(Debug, Clone)]
pub enum Oracle {
    TransferMatrix(ChainCouplings),
    Enumeration(Spectrum),
}

impl Oracle {
    pub fn for_instance(h: &DiagonalHamiltonian, cap: usize) -> Result<Self> {
        match h.chain_couplings() {
            Ok(c) => Ok(Oracle::TransferMatrix(c)),
            Err(_) => Ok(Oracle::Enumeration(Spectrum::with_cap(h, cap)?)),
        }
    }

    pub fn enumeration(h: &DiagonalHamiltonian, cap: usize) -> Result<Self> {
        Ok(Oracle::Enumeration(Spectrum::with_cap(h, cap)?))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Oracle::TransferMatrix(_) => "transfer_matrix",
            Oracle::Enumeration(_) => "enumeration",
        }
    }

    pub fn thermal(&self, beta: f64) -> Result<ExactThermal> {
        check_beta(beta)?;
        Ok(match self {
            Oracle::TransferMatrix(c) => transfer_matrix_couplings(c, beta),
            Oracle::Enumeration(s) => s.thermal(beta),
        })
    }

    pub fn ln_z(&self, beta: f64) -> Result<f64> {
        check_beta(beta)?;
        Ok(match self {
            Oracle::TransferMatrix(c) => transfer_matrix_couplings(c, beta).ln_z,
            Oracle::Enumeration(s) => s.ln_z(beta),
        })
    }

    pub fn mean_energy(&self, beta: f64) -> Result<f64> {
        check_beta(beta)?;
        Ok(match self {
            Oracle::TransferMatrix(c) => transfer_matrix_couplings(c, beta).mean_energy,
            Oracle::Enumeration(s) => s.mean_energy(beta),
        })
    }
}

/// `⟨E⟩` at `beta` from whichever oracle applies; non-increasing in `beta`.
pub fn exact_mean_energy(h: &DiagonalHamiltonian, beta: f64) -> Result<f64> {
    Oracle::for_instance(h, DEFAULT_ENUMERATION_CAP)?.mean_energy(beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{gen_ising_chain, gen_spin_glass};

    #[test]
    fn infinite_temperature_counts_states() {
        let h = gen_spin_glass(7, 1.0, 4).unwrap();
        let t = enumerate_boltzmann(&h, 0.0).unwrap();
        assert!((t.ln_z - 7.0 * 2f64.ln()).abs() < 1e-12);
        let chain = gen_ising_chain(9, 4).unwrap();
        assert!((transfer_matrix(&chain, 0.0).unwrap().ln_z - 9.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn single_qubit_closed_form() {
        let h = DiagonalHamiltonian::new(1, [(vec![0], 1.0)]).unwrap();
        let t = enumerate_boltzmann(&h, 1.0).unwrap();
        assert!((t.ln_z - (2.0 * 1f64.cosh()).ln()).abs() < 1e-14);
        assert!((t.mean_energy + 1f64.tanh()).abs() < 1e-14);
    }

    #[test]
    fn two_site_chain_by_hand() {
        // E(s0, s1) = 0.3 s0 − 0.5 s1 + 2·0.7 s0 s1
        let h = DiagonalHamiltonian::new(2, [(vec![0], 0.3), (vec![1], -0.5), (vec![0, 1], 1.4)]).unwrap();
        let beta = 0.8;
        let states = [(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)];
        let weights: Vec<f64> =
            states.iter().map(|&(a, b): &(f64, f64)| (-beta * (0.3 * a - 0.5 * b + 1.4 * a * b)).exp()).collect();
        let z: f64 = weights.iter().sum();
        let t = enumerate_boltzmann(&h, beta).unwrap();
        assert!((t.ln_z - z.ln()).abs() < 1e-14);
        let p = t.probabilities.as_ref().unwrap();
        for k in 0..4 {
            assert!((p[k] - weights[k] / z).abs() < 1e-14);
        }
        let tm = transfer_matrix(&h, beta).unwrap();
        assert!((tm.ln_z - z.ln()).abs() < 1e-13);
        let m0: f64 = states.iter().zip(&weights).map(|(s, w)| s.0 * w).sum::<f64>() / z;
        assert!((tm.magnetization[0] - m0).abs() < 1e-13);
        assert!((t.magnetization[0] - m0).abs() < 1e-13);
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let h = gen_ising_chain(30, 0).unwrap();
        match enumerate_boltzmann(&h, 1.0) {
            Err(Error::OverCap { cap, n, .. }) => assert_eq!((cap, n), (24, 30)),
            other => panic!("expected cap error, got {other:?}"),
        }
        assert!(enumerate_boltzmann_with_cap(&gen_ising_chain(6, 0).unwrap(), 1.0, 5).is_err());
    }

    #[test]
    fn non_chain_is_rejected_by_transfer_matrix() {
        let h = gen_spin_glass(4, 1.0, 0).unwrap();
        assert!(matches!(transfer_matrix(&h, 1.0), Err(Error::NotAChain(_))));
    }

    #[test]
    fn probabilities_are_normalized() {
        let h = gen_spin_glass(9, 1.0, 2).unwrap();
        for beta in [0.0, 0.5, 3.0, 50.0] {
            let t = enumerate_boltzmann(&h, beta).unwrap();
            let p = t.probabilities.unwrap();
            assert!(p.iter().all(|&x| x >= 0.0));
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mean_energy_limits() {
        let h = gen_spin_glass(8, 1.0, 9).unwrap();
        let s = Spectrum::new(&h).unwrap();
        let uniform = s.energies().iter().sum::<f64>() / 256.0;
        assert!((s.mean_energy(0.0) - uniform).abs() < 1e-12);
        assert!((s.mean_energy(200.0) - s.ground_energy()).abs() < 1e-6);
    }

    #[test]
    fn chain_at_high_beta_is_stable() {
        let h = gen_ising_chain(14, 3).unwrap();
        let tm = transfer_matrix(&h, 50.0).unwrap();
        let en = enumerate_boltzmann(&h, 50.0).unwrap();
        assert!(tm.ln_z.is_finite());
        assert!((tm.ln_z - en.ln_z).abs() < 1e-8);
        assert!((tm.mean_energy - en.mean_energy).abs() < 1e-8, "{} vs {}", tm.mean_energy, en.mean_energy);
    }
}
