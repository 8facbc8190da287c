//! Effective temperature of each DCQS iteration on a spin glass.

use dcqs::cd::{dcqs_run, DcqsConfig};
use dcqs::exact::Spectrum;
use dcqs::hamiltonian::gen_spin_glass;
use dcqs::reweight::fit_effective_temperature;

fn main() -> dcqs::error::Result<()> {
    let h = gen_spin_glass(12, 1.0, 0)?;
    let spectrum = Spectrum::new(&h)?;
    let cfg = DcqsConfig { n_shots: 5_000, n_cvar: 5_000, w: 1.0, seed: 3, ..Default::default() };
    let out = dcqs_run(&h, &cfg)?;
    println!("ground energy {:.4}", spectrum.ground_energy());
    for s in &out.stats {
        let fit = fit_effective_temperature(s.mean_energy, |b| Ok(spectrum.mean_energy(b)), (0.0, 1e3))?;
        println!(
            "iteration {}: <E> {:.4}  min {:.4}  T_eff {:.4}",
            s.iteration, s.mean_energy, s.min_energy, fit.t_eff
        );
    }
    Ok(())
}
