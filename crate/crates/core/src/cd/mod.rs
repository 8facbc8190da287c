//! Digitized counterdiabatic sampling on a dense state vector.
//!
//! Each iteration prepares the ground state of a biased transverse-field
//! driver, applies the impulse-regime Trotter circuit built from the
//! first-order gauge potential, measures, and derives the next bias from the
//! lowest-energy shots.

mod circuit;
mod dcqs;
mod schedule;
mod state;

pub use circuit::{
    build_impulse_circuit, build_impulse_circuit_timed, build_initial_hamiltonian, gauge_alpha1, initial_ground_state,
    BiasField, CDCircuit, Gate, TrotterStep,
};
pub use dcqs::{dcqs_run, update_bias, BiasSign, DcqsConfig, DcqsOutput, IterationStats, PpBiasConfig};
pub use schedule::Schedule;
pub use state::{apply_rotation, index_state, sample_measurements, StateVector, DEFAULT_SIMULATION_CAP};
