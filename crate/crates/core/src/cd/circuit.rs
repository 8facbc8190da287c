use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use super::schedule::Schedule;
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum};

/// Site-dependent longitudinal field added to the transverse driver.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasField {
    b: Vec<f64>,
    w: f64,
    iteration: usize,
}

impl BiasField {
    /// The unbiased first iteration.
    pub fn zero(n_qubits: usize, w: f64) -> Result<Self> {
        Self::new(vec![0.0; n_qubits], w, 1)
    }

    pub fn new(b: Vec<f64>, w: f64, iteration: usize) -> Result<Self> {
        if !(w >= 0.0 && w.is_finite()) {
            return Err(Error::invalid(format!("bias weight must be finite and >= 0, got {w}")));
        }
        if iteration == 0 {
            return Err(Error::invalid("iterations are counted from 1"));
        }
        if let Some(x) = b.iter().find(|x| !(x.abs() <= 1.0)) {
            return Err(Error::invalid(format!("bias component {x} outside [-1, 1]")));
        }
        if iteration == 1 && b.iter().any(|&x| x != 0.0) {
            return Err(Error::invalid("the first iteration carries no bias"));
        }
        Ok(Self { b, w, iteration })
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn n_qubits(&self) -> usize {
        self.b.len()
    }
}

/// `H_i = −Σ_i (X_i + w b_i Z_i)`; zero bias components add no Z term.
pub fn build_initial_hamiltonian(bias: &BiasField) -> PauliSum {
    let n = bias.n_qubits();
    let mut h = PauliSum::new(n);
    for i in 0..n {
        let x = PauliString::from_letters(n, &[(i, 'X')]).expect("in range");
        h.add_string(&x.with_coefficient(-1.0)).expect("same size");
        let c = bias.w * bias.b[i];
        if c != 0.0 {
            let z = PauliString::from_letters(n, &[(i, 'Z')]).expect("in range");
            h.add_string(&z.with_coefficient(-c)).expect("same size");
        }
    }
    h
}

/// Product ground state of `H_i`: qubit `i` is `(cos(θ_i/2), sin(θ_i/2))`
/// with `θ_i = atan2(1, w b_i)`, the Bloch vector along `(1, 0, w b_i)`.
pub fn initial_ground_state(bias: &BiasField, cap: usize) -> Result<StateVector> {
    let qubits: Vec<(Complex64, Complex64)> = bias
        .b
        .iter()
        .map(|&bi| {
            let half = 0.5 * 1f64.atan2(bias.w * bi);
            (Complex64::new(half.cos(), 0.0), Complex64::new(half.sin(), 0.0))
        })
        .collect();
    StateVector::product(&qubits, cap)
}

/// First-order variational gauge coefficient at `lambda`.
///
/// With `H_ad = (1−λ) H_i + λ H_f`, `O0 = H_f − H_i`, `O1 = [H_ad, O0]` and
/// `O2 = [H_ad, O1]`, returns `α₁ = −‖O1‖² / ‖O2‖²` together with `O1`.
pub fn gauge_alpha1(h_i: &PauliSum, h_f: &PauliSum, lambda: f64) -> Result<(f64, PauliSum)> {
    let o0 = h_f.add_scaled(h_i, -1.0)?;
    let h_ad = h_i.scaled(1.0 - lambda).add_scaled(h_f, lambda)?;
    let o1 = h_ad.commutator(&o0)?;
    let o2 = h_ad.commutator(&o1)?;
    let n2 = o2.norm_sq();
    if n2 < 1e-24 {
        return Err(Error::Degenerate(format!(
            "second nested commutator vanishes at lambda = {lambda}; no gauge potential"
        )));
    }
    Ok((-o1.norm_sq() / n2, o1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub pauli: PauliString,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrotterStep {
    pub s: f64,
    pub lambda: f64,
    pub alpha1: f64,
    pub gates: Vec<Gate>,
}

/// Ordered Trotter steps of `exp(−iθ P)` rotations.
#[derive(Debug, Clone, PartialEq)]
pub struct CDCircuit {
    pub n_qubits: usize,
    pub steps: Vec<TrotterStep>,
}

impl CDCircuit {
    /// Gates with a non-zero angle.
    pub fn active_gates(&self) -> usize {
        self.steps.iter().flat_map(|s| &s.gates).filter(|g| g.theta != 0.0).count()
    }

    pub fn apply(&self, state: &mut StateVector) -> Result<()> {
        for g in self.steps.iter().flat_map(|s| &s.gates) {
            state.apply_rotation(&g.pauli, g.theta)?;
        }
        Ok(())
    }

    /// One `step k: <pauli> <theta>` line per gate, steps counted from 1.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (k, step) in self.steps.iter().enumerate() {
            for g in &step.gates {
                writeln!(out, "step {}: {} {}", k + 1, g.pauli, g.theta + 0.0).expect("string write");
            }
        }
        out
    }
}

/// Impulse-regime circuit: only the counterdiabatic term is kept.
///
/// Step `k` evaluates the generator `λ'(s_k) · i α₁(λ(s_k)) O1` at
/// `s_k = k / n_trot` and emits `exp(−i θ_j P_j)` with
/// `θ_j = λ'(s_k) γ_j / n_trot`, where `γ_j` are the real Pauli coefficients
/// of `i α₁ O1`.
pub fn build_impulse_circuit(h_i: &PauliSum, h_f: &PauliSum, schedule: Schedule, n_trot: usize) -> Result<CDCircuit> {
    build_with_rate(h_i, h_f, schedule, n_trot, |s| schedule.dlambda(s) / n_trot as f64)
}

/// Same circuit written in wall-clock time: `Δt = τ / n_trot`,
/// `dλ/dt (t_k) = λ'(t_k / τ) / τ`. The product `Δt · dλ/dt` is `τ`-free.
pub fn build_impulse_circuit_timed(
    h_i: &PauliSum,
    h_f: &PauliSum,
    schedule: Schedule,
    n_trot: usize,
    tau: f64,
) -> Result<CDCircuit> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::invalid(format!("tau must be positive, got {tau}")));
    }
    let dt = tau / n_trot as f64;
    build_with_rate(h_i, h_f, schedule, n_trot, |s| {
        let t = s * tau;
        dt * (schedule.dlambda(t / tau) / tau)
    })
}

fn build_with_rate(
    h_i: &PauliSum,
    h_f: &PauliSum,
    schedule: Schedule,
    n_trot: usize,
    rate: impl Fn(f64) -> f64,
) -> Result<CDCircuit> {
    if n_trot == 0 {
        return Err(Error::invalid("n_trot must be >= 1"));
    }
    if h_i.n_qubits() != h_f.n_qubits() {
        return Err(Error::SizeMismatch { left: h_i.n_qubits(), right: h_f.n_qubits() });
    }
    let mut steps = Vec::with_capacity(n_trot);
    for k in 1..=n_trot {
        let s = k as f64 / n_trot as f64;
        let lambda = schedule.lambda(s);
        let (alpha1, o1) = gauge_alpha1(h_i, h_f, lambda)?;
        let generator = o1.scaled(Complex64::new(0.0, alpha1));
        let weight = rate(s);
        let gates = generator
            .hermitian_terms(1e-9)?
            .into_iter()
            .map(|(pauli, gamma)| Gate { pauli, theta: weight * gamma })
            .collect();
        steps.push(TrotterStep { s, lambda, alpha1, gates });
    }
    Ok(CDCircuit { n_qubits: h_f.n_qubits(), steps })
}
