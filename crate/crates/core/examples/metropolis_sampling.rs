//! Metropolis sampling on a small spin glass, checked against enumeration.

use dcqs::exact::enumerate_boltzmann;
use dcqs::hamiltonian::gen_spin_glass;
use dcqs::samplers::mh_run_budget;

fn main() -> dcqs::error::Result<()> {
    let h = gen_spin_glass(10, 1.0, 0)?;
    let beta = 0.5;
    let exact = enumerate_boltzmann(&h, beta)?;
    let mu = exact.probabilities.as_ref().expect("enumeration keeps probabilities");
    for samples in [10_000u64, 100_000, 1_000_000] {
        let pool = mh_run_budget(&h, beta, 8, samples, 1)?;
        let total = pool.total_samples() as f64;
        let mut tvd = 0.0;
        let mut seen = 0.0;
        for (s, e) in pool.iter() {
            let p = mu[s.index() as usize];
            tvd += (e.multiplicity as f64 / total - p).abs();
            seen += p;
        }
        tvd = 0.5 * (tvd + (1.0 - seen));
        println!("{samples:>8} samples  {:>5} distinct  TVD {tvd:.4}", pool.len());
    }
    Ok(())
}
