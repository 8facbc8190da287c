//! Greedy refinement of a sample pool and its sample accounting.

use dcqs::hamiltonian::gen_three_body;
use dcqs::reweight::ln_z_tilde;
use dcqs::samplers::{greedy_pp, mh_run, DEFAULT_T_PP};

fn main() -> dcqs::error::Result<()> {
    let h = gen_three_body(16, 18, 25, 0)?;
    let pool = mh_run(&h, 1.0, 4, 500, 1)?;
    let (n_pp, n_sweeps) = (100, 3);
    let refined = greedy_pp(&h, &pool, n_pp, n_sweeps, DEFAULT_T_PP, 2)?;
    println!(
        "added {} samples (n_pp × n_sweeps × N = {})",
        refined.total_samples() - pool.total_samples(),
        n_pp as u64 * n_sweeps * 16
    );
    for beta in [1.0, 5.0, 10.0] {
        println!("beta {beta:>4}: ln Z~ {:.4} -> {:.4}", ln_z_tilde(&pool, beta)?, ln_z_tilde(&refined, beta)?);
    }
    Ok(())
}
