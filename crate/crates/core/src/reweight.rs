//! Boltzmann reweighting of sample pools.
//!
//! A pool's distinct states define a support set `S`. Reweighting assigns
//! every state in `S` its exact Boltzmann weight and renormalizes with
//! `ln Z̃ = ln Σ_{s∈S} exp(−βE(s))`. Multiplicities play no role here; they
//! only enter the empirical distribution used for comparison.

use std::io::Write;

use serde::Serialize;

use crate::bits::{BitString, SpinConvention};
use crate::error::{Error, Result};
use crate::exact::Spectrum;
use crate::numeric::LogSumExp;
use crate::pool::SamplePool;

#[derive(Debug, Clone)]
pub struct ReweightedDistribution {
    pub beta: f64,
    pub ln_z_tilde: f64,
    pub n_qubits: usize,
    pub states: Vec<BitString>,
    pub energies: Vec<f64>,
    pub weights: Vec<f64>,
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::invalid(format!("beta must be finite and >= 0, got {beta}")));
    }
    Ok(())
}

pub fn ln_z_tilde(pool: &SamplePool, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    let mut acc = LogSumExp::new();
    pool.iter().for_each(|(_, e)| acc.push(-beta * e.energy));
    Ok(acc.value())
}

pub fn reweight(pool: &SamplePool, beta: f64) -> Result<ReweightedDistribution> {
    let ln_z_tilde = ln_z_tilde(pool, beta)?;
    let energies = pool.energies();
    let weights = energies.iter().map(|&e| (-beta * e - ln_z_tilde).exp()).collect();
    Ok(ReweightedDistribution {
        beta,
        ln_z_tilde,
        n_qubits: pool.n_qubits(),
        states: pool.states().cloned().collect(),
        energies,
        weights,
    })
}

/// Thermal averages reported for every method and temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Observables {
    /// `(1/N) Σ_i ⟨Z_i⟩`.
    pub magnetization: f64,
    /// `(1/N) Σ_i (⟨Z_i Z_{i+1}⟩ − ⟨Z_i⟩⟨Z_{i+1}⟩)` over ring bonds.
    pub correlator: f64,
    pub energy: f64,
}

impl ReweightedDistribution {
    /// `Σ_s μ̃(s) O(s)`.
    pub fn expectation(&self, observable: impl Fn(&BitString, f64) -> f64) -> f64 {
        self.states.iter().zip(&self.energies).zip(&self.weights).map(|((s, &e), &w)| w * observable(s, e)).sum()
    }

    pub fn site_magnetization(&self) -> Vec<f64> {
        (0..self.n_qubits).map(|i| self.expectation(|s, _| SpinConvention::spin_f64(s.get(i)))).collect()
    }

    pub fn observables(&self) -> Observables {
        let n = self.n_qubits;
        let m = self.site_magnetization();
        let correlator = if n < 2 {
            0.0
        } else {
            (0..n)
                .map(|i| {
                    let j = (i + 1) % n;
                    let zz = self
                        .expectation(|s, _| SpinConvention::spin_f64(s.get(i)) * SpinConvention::spin_f64(s.get(j)));
                    zz - m[i] * m[j]
                })
                .sum::<f64>()
                / n as f64
        };
        Observables {
            magnetization: m.iter().sum::<f64>() / n.max(1) as f64,
            correlator,
            energy: self.expectation(|_, e| e),
        }
    }
}

pub fn expectation(rw: &ReweightedDistribution, observable: impl Fn(&BitString, f64) -> f64) -> f64 {
    rw.expectation(observable)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Divergences {
    pub ln_z_tilde: f64,
    pub kl: f64,
    pub tvd: f64,
}

/// Reweighted-vs-exact divergences from the partition functions alone:
/// `KL = ln Z − ln Z̃` and `TVD = 1 − Z̃/Z`.
pub fn divergences(pool: &SamplePool, beta: f64, exact_ln_z: f64) -> Result<Divergences> {
    let lzt = ln_z_tilde(pool, beta)?;
    if lzt > exact_ln_z + 1e-9 {
        return Err(Error::OracleMismatch { ln_z: exact_ln_z, ln_z_tilde: lzt });
    }
    let kl = (exact_ln_z - lzt).max(0.0);
    Ok(Divergences { ln_z_tilde: lzt, kl, tvd: -(-kl).exp_m1() })
}

/// Cumulative `ln Z̃` as states arrive; one point per distinct state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FomTrace {
    pub beta: f64,
    /// Samples collected when each distinct state first appeared.
    pub samples: Vec<u64>,
    pub ln_z_tilde: Vec<f64>,
}

impl FomTrace {
    pub fn final_value(&self) -> Option<f64> {
        self.ln_z_tilde.last().copied()
    }

    /// `ln Z̃` after the first `n_samples` samples (−∞ before the first).
    pub fn value_at(&self, n_samples: u64) -> f64 {
        let k = self.samples.partition_point(|&s| s <= n_samples);
        if k == 0 {
            f64::NEG_INFINITY
        } else {
            self.ln_z_tilde[k - 1]
        }
    }

    pub fn write_csv_rows<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        for (s, v) in self.samples.iter().zip(&self.ln_z_tilde) {
            writeln!(out, "{s},{v},{}", self.beta)?;
        }
        Ok(())
    }
}

pub const FOM_CSV_HEADER: &str = "samples,ln_z_tilde,beta";

/// CSV with one block of rows per trace.
pub fn fom_csv(traces: &[FomTrace]) -> String {
    let mut buf = Vec::new();
    writeln!(buf, "{FOM_CSV_HEADER}").expect("memory write");
    for t in traces {
        t.write_csv_rows(&mut buf).expect("memory write");
    }
    String::from_utf8(buf).expect("ascii")
}

pub fn cumulative_fom(pool: &SamplePool, betas: &[f64]) -> Result<Vec<FomTrace>> {
    betas
        .iter()
        .map(|&beta| {
            check_beta(beta)?;
            let mut acc = LogSumExp::new();
            let mut samples = Vec::with_capacity(pool.len());
            let mut values = Vec::with_capacity(pool.len());
            for (_, e) in pool.iter() {
                acc.push(-beta * e.energy);
                samples.push(e.first_sample + 1);
                values.push(acc.value());
            }
            Ok(FomTrace { beta, samples, ln_z_tilde: values })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TemperatureFit {
    pub beta_eff: f64,
    pub t_eff: f64,
    pub residual: f64,
    pub bracket: (f64, f64),
    /// The empirical energy lies below `⟨E⟩(beta_hi)`; `beta_eff` is pinned to `beta_hi`.
    pub saturated: bool,
    pub iterations: usize,
}

/// Solves `⟨E⟩(β) = empirical` by bisection on a non-increasing
/// `mean_energy`, to `|Δβ| < 1e-8` or a residual below `1e-9`.
pub fn fit_effective_temperature(
    empirical_mean_energy: f64,
    mut mean_energy: impl FnMut(f64) -> Result<f64>,
    bracket: (f64, f64),
) -> Result<TemperatureFit> {
    let (lo0, hi0) = bracket;
    if !(lo0 >= 0.0 && lo0 < hi0 && hi0.is_finite()) {
        return Err(Error::invalid(format!("bracket must satisfy 0 <= lo < hi, got ({lo0}, {hi0})")));
    }
    if !empirical_mean_energy.is_finite() {
        return Err(Error::invalid("empirical mean energy is not finite"));
    }
    let e_lo = mean_energy(lo0)?;
    let e_hi = mean_energy(hi0)?;
    let fit = |beta: f64, residual: f64, saturated: bool, iterations: usize| TemperatureFit {
        beta_eff: beta,
        t_eff: 1.0 / beta,
        residual,
        bracket,
        saturated,
        iterations,
    };
    if empirical_mean_energy > e_lo + 1e-9 {
        return Err(Error::Bracket { empirical: empirical_mean_energy, low: e_hi, high: e_lo });
    }
    if empirical_mean_energy <= e_hi {
        return Ok(fit(hi0, (e_hi - empirical_mean_energy).abs(), true, 0));
    }
    let (mut lo, mut hi) = (lo0, hi0);
    let mut iterations = 0;
    let mut best = (lo, (e_lo - empirical_mean_energy).abs());
    while hi - lo >= 1e-8 {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        let e = mean_energy(mid)?;
        let r = (e - empirical_mean_energy).abs();
        best = (mid, r);
        if r < 1e-9 {
            break;
        }
        if e > empirical_mean_energy {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(fit(best.0, best.1, false, iterations))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistributionComparison {
    pub kl_empirical: f64,
    pub kl_reweighted: f64,
    pub tvd_empirical: f64,
    pub tvd_reweighted: f64,
}

/// Direct-sum divergences of the empirical (multiplicity) and reweighted
/// distributions from the exact Boltzmann table.
pub fn empirical_vs_reweighted(pool: &SamplePool, beta: f64, spectrum: &Spectrum) -> Result<DistributionComparison> {
    if pool.n_qubits() != spectrum.n_qubits() {
        return Err(Error::SizeMismatch { left: pool.n_qubits(), right: spectrum.n_qubits() });
    }
    let rw = reweight(pool, beta)?;
    let ln_z = spectrum.ln_z(beta);
    let energies = spectrum.energies();
    let total = pool.total_samples() as f64;
    let (mut kl_e, mut kl_r, mut abs_e, mut abs_r, mut covered) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (k, (s, entry)) in pool.iter().enumerate() {
        let ln_mu = -beta * energies[s.index() as usize] - ln_z;
        let mu = ln_mu.exp();
        let emp = entry.multiplicity as f64 / total;
        let rew = rw.weights[k];
        kl_e += emp * (emp.ln() - ln_mu);
        if rew > 0.0 {
            kl_r += rew * (rew.ln() - ln_mu);
        }
        abs_e += (emp - mu).abs();
        abs_r += (rew - mu).abs();
        covered += mu;
    }
    let missing = (1.0 - covered).max(0.0);
    Ok(DistributionComparison {
        kl_empirical: kl_e,
        kl_reweighted: kl_r,
        tvd_empirical: 0.5 * (abs_e + missing),
        tvd_reweighted: 0.5 * (abs_r + missing),
    })
}
