// `!(x >= 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bits;
pub mod cd;
pub mod error;
pub mod exact;
pub mod hamiltonian;
pub mod harness;
pub mod numeric;
pub mod pauli;
pub mod pool;
pub mod reweight;
pub mod rng;
pub mod samplers;
