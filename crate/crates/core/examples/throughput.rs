//! Single-worker Metropolis update rate on a 156-qubit three-body instance.

use std::time::Duration;

use dcqs::hamiltonian::gen_three_body;
use dcqs::harness::REFERENCE_UPDATES_PER_SECOND;
use dcqs::samplers::throughput_benchmark;

fn main() -> dcqs::error::Result<()> {
    let h = gen_three_body(156, 176, 244, 0)?;
    let t = throughput_benchmark(&h, Duration::from_secs(1), 0)?;
    println!("{} updates in {:.2} s: {:.3e} updates/s", t.updates, t.seconds, t.updates_per_second);
    println!("mean site degree {:.2}; reference rate {:.1e}/s", t.mean_degree, REFERENCE_UPDATES_PER_SECOND);
    Ok(())
}
