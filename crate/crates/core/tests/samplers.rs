mod common;

use std::path::PathBuf;

use proptest::prelude::*;

use dcqs::bits::BitString;
use dcqs::error::Error;
use dcqs::exact::enumerate_boltzmann;
use dcqs::hamiltonian::{gen_spin_glass, load_instance, DiagonalHamiltonian};
use dcqs::pool::SamplePool;
use dcqs::reweight::ln_z_tilde;
use dcqs::samplers::{
    acceptance_probability, adapt_ladder, adapt_ladder_with_cap, greedy_pp, mh_run, mh_run_budget, pt_run,
    swap_probability, PtOptions, ReplicaLadder,
};

fn fixture(name: &str) -> DiagonalHamiltonian {
    load_instance(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)).unwrap()
}

#[test]
fn acceptance_rules() {
    assert_eq!(acceptance_probability(0.0, 12.5), 1.0);
    assert!((acceptance_probability(1.0, 2f64.ln()) - 0.5).abs() < 1e-15);
    assert_eq!(acceptance_probability(f64::INFINITY, 0.0), 0.0);
    assert_eq!(acceptance_probability(f64::INFINITY, -1e-9), 1.0);
    assert_eq!(swap_probability(-3.0, -3.0, 0.2, 4.0), 1.0);
    assert_eq!(swap_probability(-3.0, 5.0, 2.0, 2.0), 1.0);
}

#[test]
fn mh_matches_boltzmann_at_t2() {
    let h = fixture("spin_glass_n10_s0.json");
    let exact = enumerate_boltzmann(&h, 0.5).unwrap();
    let pool = mh_run_budget(&h, 0.5, 10, 1_000_000, 3).unwrap();
    assert_eq!(pool.total_samples(), 1_000_000);
    let tvd = common::empirical_tvd(&pool, exact.probabilities.as_ref().unwrap());
    assert!(tvd < 0.02, "TVD {tvd}");
}

#[test]
fn two_replica_pt_is_stationary() {
    let h = gen_spin_glass(8, 1.0, 5).unwrap();
    let ladder = ReplicaLadder::new(vec![0.4, 1.0]).unwrap();
    let out = pt_run(&h, &ladder, &PtOptions::sweeps(1_000_000), 8).unwrap();
    for (pool, &beta) in out.pools.iter().zip(ladder.betas()) {
        let exact = enumerate_boltzmann(&h, beta).unwrap();
        let tvd = common::empirical_tvd(pool, exact.probabilities.as_ref().unwrap());
        assert!(tvd < 0.03, "beta {beta}: TVD {tvd}");
    }
    assert!(out.ladder.acceptance_ratios()[0] > 0.0);
}

#[test]
fn adapted_ladder_meets_target() {
    let h = gen_spin_glass(12, 1.0, 12).unwrap();
    let ladder = adapt_ladder(&h, 0.05, 10.0, 0.3, 4_000, 1).unwrap();
    assert!(ladder.len() > 2);
    assert!(ladder.betas().windows(2).all(|w| w[0] < w[1]));
    assert!(ladder.acceptance_ratios().iter().all(|&r| r >= 0.3));
}

#[test]
fn ladder_refinement_and_cap() {
    let ladder = ReplicaLadder::new(vec![0.01, 50.0]).unwrap();
    assert_eq!(ladder.refined(&[true]).betas(), &[0.01, 25.005, 50.0]);
    let h = gen_spin_glass(10, 1.0, 1).unwrap();
    match adapt_ladder_with_cap(&h, 0.01, 50.0, 0.99, 200, 0, 2) {
        Err(Error::LadderNotConverged { partial, iterations, .. }) => {
            assert_eq!(iterations, 2);
            assert!(partial.len() > 2);
        }
        other => panic!("expected a non-converged ladder, got {other:?}"),
    }
}

/// Ferromagnetic ring with a weak field: all-zero is the global minimum,
/// all-one a local one.
fn planted(n: usize) -> DiagonalHamiltonian {
    let terms = (0..n).flat_map(|i| [(vec![i, (i + 1) % n], -1.0), (vec![i], -0.05)]);
    DiagonalHamiltonian::new(n, terms).unwrap()
}

#[test]
fn pp_descends_into_planted_minimum() {
    let h = planted(10);
    let ground = BitString::zeros(10);
    let e0 = h.energy(&ground).unwrap();
    // the minimum is the unique lowest state in the flip neighbourhood of each start
    let mut found = 0;
    for k in 0..10 {
        let mut start = BitString::zeros(10);
        start.flip(k);
        let mut neighbours: Vec<f64> = (0..10)
            .map(|i| {
                let mut s = start.clone();
                s.flip(i);
                h.energy(&s).unwrap()
            })
            .collect();
        neighbours.sort_by(f64::total_cmp);
        assert_eq!(neighbours[0], e0);
        assert!(neighbours[1] > e0);

        let mut pool = SamplePool::new(10);
        pool.record(&start, h.energy(&start).unwrap());
        let one_sweep = greedy_pp(&h, &pool, 1, 1, 0.0, k as u64).unwrap();
        found += usize::from(one_sweep.contains(&ground));
        let three = greedy_pp(&h, &pool, 1, 3, 0.0, k as u64).unwrap();
        let (best, entry) = three.by_energy()[0];
        if three.contains(&ground) {
            assert_eq!((best, entry.energy), (&ground, e0));
        }
    }
    // each single sweep proposes the right flip with probability 1 − 0.9^10 ≈ 0.65
    assert!(found >= 4, "found in {found} of 10 single sweeps");
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let h = gen_spin_glass(11, 1.0, 8).unwrap();
    let run = || {
        let mh = mh_run(&h, 0.7, 6, 500, 2).unwrap();
        let pp = greedy_pp(&h, &mh, 20, 2, 0.02, 3).unwrap();
        let pt = pt_run(&h, &ReplicaLadder::new(vec![0.2, 0.7, 2.0]).unwrap(), &PtOptions::samples(3_001), 4).unwrap();
        (mh, pp, pt.union())
    };
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(run);
    let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(run);
    assert_eq!(one, many);
    assert_eq!(one.2.total_samples(), 3_001);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn pp_accounting_and_monotone_support(seed in 0u64..500, n_pp in 1usize..6, n_sweeps in 1u64..4, beta in 0.0f64..20.0) {
        let h = gen_spin_glass(8, 1.0, seed).unwrap();
        let pool = mh_run(&h, 0.5, 2, 40, seed).unwrap();
        let n_pp = n_pp.min(pool.len());
        let out = greedy_pp(&h, &pool, n_pp, n_sweeps, 0.02, seed + 1).unwrap();
        prop_assert_eq!(out.total_samples() - pool.total_samples(), n_pp as u64 * n_sweeps * 8);
        prop_assert!(ln_z_tilde(&out, beta).unwrap() >= ln_z_tilde(&pool, beta).unwrap());
        prop_assert!(pool.iter().all(|(s, e)| out.get(s).map(|o| o.first_sample) == Some(e.first_sample)));
    }

    #[test]
    fn mh_pools_hold_the_budget(seed in 0u64..500, walkers in 1usize..8, extra in 0u64..50) {
        let h = gen_spin_glass(6, 1.0, seed).unwrap();
        let total = walkers as u64 + extra;
        let pool = mh_run_budget(&h, 1.0, walkers, total, seed).unwrap();
        prop_assert_eq!(pool.total_samples(), total);
        prop_assert!(pool.verify_energies(&h, 1e-12).is_ok());
    }
}
