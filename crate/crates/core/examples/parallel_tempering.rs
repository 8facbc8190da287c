//! Adaptive replica ladder followed by a parallel tempering run.

use dcqs::hamiltonian::gen_spin_glass;
use dcqs::samplers::{adapt_ladder, pt_run, PtOptions};

fn main() -> dcqs::error::Result<()> {
    let h = gen_spin_glass(12, 1.0, 2)?;
    let ladder = adapt_ladder(&h, 0.1, 5.0, 0.3, 5_000, 11)?;
    println!("ladder: {:?}", ladder.betas().iter().map(|b| format!("{b:.3}")).collect::<Vec<_>>());

    let out = pt_run(&h, &ladder, &PtOptions::sweeps(2_000), 12)?;
    for (k, ratio) in out.ladder.acceptance_ratios().iter().enumerate() {
        println!("pair {k:>2}: swap acceptance {ratio:.3}");
    }
    let cold = out.pools.last().expect("non-empty ladder");
    println!(
        "coldest replica: {} samples, min energy {:.4}",
        cold.total_samples(),
        cold.min_energy().unwrap_or(f64::NAN)
    );
    Ok(())
}
