use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dcqs::exact::{enumerate_boltzmann, exact_mean_energy, transfer_matrix, Spectrum};
use dcqs::hamiltonian::{gen_ising_chain, gen_ising_chain_open, gen_spin_glass, DiagonalHamiltonian};

fn with_field_shift(h: &DiagonalHamiltonian, site: usize, eps: f64) -> DiagonalHamiltonian {
    let mut terms: Vec<(Vec<usize>, f64)> = h.terms().iter().map(|t| (t.support.clone(), t.coef)).collect();
    terms.push((vec![site], eps));
    DiagonalHamiltonian::new(h.n_qubits(), terms).unwrap()
}

#[test]
fn transfer_matrix_agrees_with_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for k in 0..20 {
        let n = rng.gen_range(2..=14);
        let h = if k % 4 == 3 { gen_ising_chain_open(n, k).unwrap() } else { gen_ising_chain(n, k).unwrap() };
        for beta in [0.1, 1.0, 10.0, 50.0] {
            let tm = transfer_matrix(&h, beta).unwrap();
            let en = enumerate_boltzmann(&h, beta).unwrap();
            assert!((tm.ln_z - en.ln_z).abs() < 1e-8, "n={n} beta={beta}");
            assert!((tm.mean_energy - en.mean_energy).abs() < 1e-8);
            for i in 0..n {
                assert!((tm.magnetization[i] - en.magnetization[i]).abs() < 1e-8);
                assert!((tm.bond_correlators[i] - en.bond_correlators[i]).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn magnetization_matches_field_derivative() {
    let h = gen_ising_chain(10, 4).unwrap();
    let eps = 1e-5;
    for beta in [0.3, 1.0, 4.0] {
        let tm = transfer_matrix(&h, beta).unwrap();
        for i in [0, 3, 9] {
            let up = transfer_matrix(&with_field_shift(&h, i, eps), beta).unwrap().ln_z;
            let down = transfer_matrix(&with_field_shift(&h, i, -eps), beta).unwrap().ln_z;
            let fd = -(up - down) / (2.0 * eps) / beta;
            assert!((fd - tm.magnetization[i]).abs() < 1e-6, "site {i}: {fd} vs {}", tm.magnetization[i]);
        }
    }
}

#[test]
fn mean_energy_is_minus_beta_derivative() {
    let h = gen_spin_glass(9, 1.0, 2).unwrap();
    let s = Spectrum::new(&h).unwrap();
    let eps = 1e-5;
    for beta in [0.1, 1.0, 3.0] {
        let fd = -(s.ln_z(beta + eps) - s.ln_z(beta - eps)) / (2.0 * eps);
        assert!((fd - s.mean_energy(beta)).abs() < 1e-6);
    }
}

#[test]
fn enumeration_table_is_consistent() {
    let h = gen_spin_glass(8, 1.0, 6).unwrap();
    for beta in [0.0, 0.5, 5.0] {
        let t = enumerate_boltzmann(&h, beta).unwrap();
        let p = t.probabilities.as_ref().unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let e: f64 = p.iter().enumerate().map(|(b, p)| p * h.energy_index(b as u64)).sum();
        assert!((e - t.mean_energy).abs() < 1e-10);
    }
    assert!((enumerate_boltzmann(&h, 0.0).unwrap().ln_z - 8.0 * 2f64.ln()).abs() < 1e-12);
}

#[test]
fn long_cold_chain_stays_finite() {
    let h = gen_ising_chain(400, 1).unwrap();
    let t = transfer_matrix(&h, 50.0).unwrap();
    assert!(t.ln_z.is_finite() && t.mean_energy.is_finite());
    assert!(t.magnetization.iter().all(|m| m.abs() <= 1.0 + 1e-12));
    assert!((transfer_matrix(&h, 0.0).unwrap().ln_z - 400.0 * 2f64.ln()).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mean_energy_non_increasing(seed in 0u64..1000, n in 2usize..10, b in 0.0f64..20.0, db in 1e-3f64..2.0) {
        let h = gen_spin_glass(n, 1.0, seed).unwrap();
        prop_assert!(exact_mean_energy(&h, b + db).unwrap() <= exact_mean_energy(&h, b).unwrap() + 1e-12);
        let c = gen_ising_chain(n, seed).unwrap();
        prop_assert!(exact_mean_energy(&c, b + db).unwrap() <= exact_mean_energy(&c, b).unwrap() + 1e-9);
    }
}
