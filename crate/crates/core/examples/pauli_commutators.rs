//! Pauli products, commutators and the single-qubit gauge coefficient.

use dcqs::cd::gauge_alpha1;
use dcqs::pauli::{PauliString, PauliSum};

fn main() -> dcqs::error::Result<()> {
    let x = PauliString::parse(2, "X0")?;
    let z = PauliString::parse(2, "Z0 Z1")?;
    println!("X0 · Z0Z1 = {}", x.multiply(&z)?);

    let a = PauliSum::from_strings(2, [x.clone(), PauliString::parse(2, "X1")?])?;
    let b = PauliSum::from_strings(2, [z.with_coefficient(0.5)])?;
    println!("[X0 + X1, 0.5 Z0Z1] = {}", a.commutator(&b)?);

    // H_i = −X, H_f = h Z: α₁(λ) = −1 / (4[(1−λ)² + λ²h²])
    let h = 0.7;
    let hi = PauliSum::from_strings(1, [PauliString::parse(1, "X0")?.with_coefficient(-1.0)])?;
    let hf = PauliSum::from_strings(1, [PauliString::parse(1, "Z0")?.with_coefficient(h)])?;
    println!("{:>6} {:>14} {:>14}", "lambda", "alpha1", "closed form");
    for k in 0..=5 {
        let l = k as f64 / 5.0;
        let (alpha, _) = gauge_alpha1(&hi, &hf, l)?;
        let closed = -1.0 / (4.0 * ((1.0 - l).powi(2) + l * l * h * h));
        println!("{l:>6.2} {alpha:>14.10} {closed:>14.10}");
    }
    Ok(())
}
