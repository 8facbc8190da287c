//! Counterdiabatic sampling on a chain, with the first circuit printed.

use dcqs::cd::{build_impulse_circuit, build_initial_hamiltonian, dcqs_run, BiasField, DcqsConfig, Schedule};
use dcqs::exact::transfer_matrix;
use dcqs::hamiltonian::gen_ising_chain;
use dcqs::reweight::reweight;

fn main() -> dcqs::error::Result<()> {
    let h = gen_ising_chain(4, 0)?;
    let h_i = build_initial_hamiltonian(&BiasField::zero(4, 0.5)?);
    print!("{}", build_impulse_circuit(&h_i, &h.to_pauli_sum(), Schedule::SinSquared, 2)?.dump());

    let h = gen_ising_chain(12, 0)?;
    let out = dcqs_run(&h, &DcqsConfig { seed: 5, ..Default::default() })?;
    for s in &out.stats {
        println!(
            "iteration {}: mean {:.4} min {:.4} distinct {}",
            s.iteration, s.mean_energy, s.min_energy, s.distinct
        );
    }
    for t in [0.1, 0.3, 1.0] {
        let exact = transfer_matrix(&h, 1.0 / t)?;
        let obs = reweight(&out.pool, 1.0 / t)?.observables();
        println!(
            "T = {t}: <M> {:.4} (exact {:.4}), E {:.4} (exact {:.4})",
            obs.magnetization,
            exact.mean_magnetization(),
            obs.energy,
            exact.mean_energy
        );
    }
    Ok(())
}
