//! Transfer matrix against brute-force enumeration on a periodic chain.

use dcqs::exact::{enumerate_boltzmann, transfer_matrix};
use dcqs::hamiltonian::gen_ising_chain;

fn main() -> dcqs::error::Result<()> {
    let h = gen_ising_chain(12, 3)?;
    println!("{:>6} {:>20} {:>10} {:>10} {:>10}", "beta", "ln Z", "|d lnZ|", "<M>", "C");
    for beta in [0.0, 0.1, 1.0, 10.0, 50.0] {
        let tm = transfer_matrix(&h, beta)?;
        let en = enumerate_boltzmann(&h, beta)?;
        println!(
            "{beta:>6} {:>20.12} {:>10.1e} {:>10.6} {:>10.6}",
            tm.ln_z,
            (tm.ln_z - en.ln_z).abs(),
            tm.mean_magnetization(),
            tm.connected_correlator()
        );
    }
    Ok(())
}
