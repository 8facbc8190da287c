//! Cumulative ln Z̃ as DCQS samples arrive, against the exact value.

use dcqs::cd::{dcqs_run, DcqsConfig};
use dcqs::exact::transfer_matrix;
use dcqs::hamiltonian::gen_ising_chain;
use dcqs::reweight::{cumulative_fom, divergences};

fn main() -> dcqs::error::Result<()> {
    let h = gen_ising_chain(14, 1)?;
    let beta = 5.0;
    let cfg = DcqsConfig { seed: 2, ..Default::default() };
    let out = dcqs_run(&h, &cfg)?;
    let ln_z = transfer_matrix(&h, beta)?.ln_z;
    let trace = &cumulative_fom(&out.pool, &[beta])?[0];
    for k in 1..=cfg.n_iter as u64 {
        let n = k * cfg.n_shots;
        println!("after {n:>5} samples: ln Z~ {:.6}", trace.value_at(n));
    }
    let d = divergences(&out.pool, beta, ln_z)?;
    println!("exact ln Z {ln_z:.6}, KL {:.2e}, TVD {:.2e}", d.kl, d.tvd);
    Ok(())
}
