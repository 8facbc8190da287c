mod common;

use std::path::PathBuf;

use num_complex::Complex64 as C;
use proptest::prelude::*;
use sha2::{Digest, Sha256};

use dcqs::bits::BitString;
use dcqs::exact::Spectrum;
use dcqs::hamiltonian::{
    gen_spin_glass, gen_three_body, load_instance_with_metadata, parse_instance, to_canonical_json, DiagonalHamiltonian,
};
use dcqs::harness::{cmd_generate, InstanceSource};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn bundled_hashes() -> Vec<(String, String)> {
    std::fs::read_to_string(fixtures().join("SHA256SUMS"))
        .unwrap()
        .lines()
        .map(|l| {
            let (hash, name) = l.split_once("  ").unwrap();
            (name.to_string(), hash.to_string())
        })
        .collect()
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[test]
fn fixtures_regenerate_from_their_metadata() {
    let dir = tempfile::tempdir().unwrap();
    for (name, hash) in bundled_hashes() {
        let file = load_instance_with_metadata(fixtures().join(&name)).unwrap();
        let mut meta = file.metadata.clone().unwrap();
        meta.as_object_mut().unwrap().remove("ground_energy");
        let source: InstanceSource = serde_json::from_value(meta).unwrap();
        let path = cmd_generate(&source, dir.path()).unwrap();
        assert_eq!(path.file_name().unwrap().to_string_lossy(), name);
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(sha256_hex(&bytes), hash, "{name}");
        assert_eq!(sha256_hex(&std::fs::read(fixtures().join(&name)).unwrap()), hash);
    }
}

#[test]
fn recorded_ground_energies_match_enumeration() {
    for name in
        ["ising_chain_n18_s0.json", "spin_glass_n18_s0.json", "three_body_n16_s0.json", "spin_glass_n10_s0.json"]
    {
        let file = load_instance_with_metadata(fixtures().join(name)).unwrap();
        let recorded = file.metadata.unwrap()["ground_energy"].as_f64().unwrap();
        let e0 = Spectrum::new(&file.hamiltonian).unwrap().ground_energy();
        assert!((recorded - e0).abs() < 1e-12, "{name}");
    }
}

#[test]
fn full_scale_three_body_shape() {
    let h = gen_three_body(156, 176, 244, 0).unwrap();
    assert_eq!(h.len(), 576);
    assert_eq!(h.locality_counts(), vec![0, 156, 176, 244]);
    assert_eq!(gen_spin_glass(18, 1.0, 0).unwrap().len(), 171);
}

/// `Σ c Π Z` assembled from dense Kronecker products.
fn dense_energy(h: &DiagonalHamiltonian) -> Vec<f64> {
    let n = h.n_qubits();
    let mut diag = vec![0.0; 1 << n];
    for t in h.terms() {
        let letters: Vec<(usize, char)> = t.support.iter().map(|&q| (q, 'Z')).collect();
        let m = common::dense_letters(n, &letters, C::new(t.coef, 0.0));
        diag.iter_mut().enumerate().for_each(|(b, d)| *d += m[b][b].re);
    }
    diag
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn energy_matches_dense_diagonal(seed in any::<u64>(), n in 2usize..8) {
        let h = gen_three_body(n.max(3), n.max(3), 1, seed).unwrap();
        let dense = dense_energy(&h);
        for (b, &e) in dense.iter().enumerate() {
            let s = BitString::from_index(b as u64, h.n_qubits());
            prop_assert!((h.energy(&s).unwrap() - e).abs() < 1e-12);
            prop_assert!((h.energy_index(b as u64) - e).abs() < 1e-12);
        }
    }

    #[test]
    fn instance_text_round_trips(seed in any::<u64>(), n in 2usize..12) {
        let h = gen_spin_glass(n, 0.7, seed).unwrap();
        let text = to_canonical_json(&h, None);
        let back = parse_instance(&text, "inline").unwrap().hamiltonian;
        prop_assert_eq!(back, h);
    }

    #[test]
    fn duplicate_supports_merge(seed in any::<u64>()) {
        let h = gen_spin_glass(5, 1.0, seed).unwrap();
        let mut split: Vec<(Vec<usize>, f64)> = Vec::new();
        for t in h.terms() {
            let mut rev = t.support.clone();
            rev.reverse();
            split.push((t.support.clone(), 0.25 * t.coef));
            split.push((rev, 0.75 * t.coef));
        }
        split.reverse();
        let merged = DiagonalHamiltonian::new(5, split).unwrap();
        for b in 0..32u64 {
            prop_assert!((merged.energy_index(b) - h.energy_index(b)).abs() < 1e-12);
        }
    }
}
