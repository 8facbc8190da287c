//! Deduplicating sample pools.
//!
//! A [`SamplePool`] keeps distinct bitstrings in first-arrival order together
//! with their exact energy and how often they were drawn. The position of an
//! entry is its first-arrival index; `first_sample` is the global sample count
//! at which it was first seen, which is the natural x-axis for cumulative
//! traces.

use std::io::Write;
use std::path::Path;

use indexmap::IndexMap;

use crate::bits::{words_for, BitString, SpinConvention};
use crate::error::{Error, Result};
use crate::hamiltonian::DiagonalHamiltonian;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoolEntry {
    pub energy: f64,
    pub multiplicity: u64,
    /// Zero-based index of the sample that first produced this state.
    pub first_sample: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplePool {
    n_qubits: usize,
    entries: IndexMap<BitString, PoolEntry>,
    total_samples: u64,
}

pub const CSV_HEADER: &str = "bitstring,energy,multiplicity,first_arrival_index";

impl SamplePool {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, entries: IndexMap::new(), total_samples: 0 }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Number of distinct states.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_samples(&self) -> u64 {
        self.total_samples
    }

    pub fn get(&self, state: &BitString) -> Option<&PoolEntry> {
        self.entries.get(state.words())
    }

    pub fn contains(&self, state: &BitString) -> bool {
        self.entries.contains_key(state.words())
    }

    pub fn first_arrival_index(&self, state: &BitString) -> Option<usize> {
        self.entries.get_index_of(state.words())
    }

    pub fn get_index(&self, i: usize) -> Option<(&BitString, &PoolEntry)> {
        self.entries.get_index(i)
    }

    /// Entries in first-arrival order.
    pub fn iter(&self) -> impl ExactSizeIterator<Item = (&BitString, &PoolEntry)> + '_ {
        self.entries.iter()
    }

    pub fn states(&self) -> impl ExactSizeIterator<Item = &BitString> + '_ {
        self.entries.keys()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.entries.values().map(|e| e.energy).collect()
    }

    /// Records one draw. `energy` is evaluated only for unseen states; the
    /// stored (exact) energy is returned either way.
    #[inline]
    pub fn record_with(&mut self, words: &[u64], energy: impl FnOnce() -> f64) -> f64 {
        let index = self.total_samples;
        self.total_samples += 1;
        if let Some(entry) = self.entries.get_mut(words) {
            entry.multiplicity += 1;
            return entry.energy;
        }
        let e = energy();
        self.entries.insert(
            BitString::from_words(words.to_vec()),
            PoolEntry { energy: e, multiplicity: 1, first_sample: index },
        );
        e
    }

    pub fn record(&mut self, state: &BitString, energy: f64) {
        self.record_with(state.words(), || energy);
    }

    /// Records `count` identical draws of one state.
    pub fn record_many(&mut self, state: &BitString, energy: f64, count: u64) {
        if count == 0 {
            return;
        }
        let index = self.total_samples;
        self.total_samples += count;
        self.entries.entry(state.clone()).and_modify(|e| e.multiplicity += count).or_insert(PoolEntry {
            energy,
            multiplicity: count,
            first_sample: index,
        });
    }

    /// Appends every draw of `other` after the draws already held.
    pub fn extend(&mut self, other: &SamplePool) {
        let offset = self.total_samples;
        for (s, e) in &other.entries {
            self.entries
                .entry(s.clone())
                .and_modify(|x| x.multiplicity += e.multiplicity)
                .or_insert(PoolEntry { first_sample: offset + e.first_sample, ..*e });
        }
        self.total_samples += other.total_samples;
    }

    /// Merges per-worker pools as if their draws were interleaved round-robin
    /// (step 0 of every worker, then step 1, ...). Ties within a step go to
    /// the lower worker id, so the result does not depend on scheduling.
    pub fn merge_interleaved(n_qubits: usize, parts: &[SamplePool]) -> SamplePool {
        let lens: Vec<u64> = parts.iter().map(|p| p.total_samples).collect();
        let global_index = |worker: usize, step: u64| -> u64 {
            let before: u64 = lens.iter().map(|&l| l.min(step)).sum();
            let same_step = lens[..worker].iter().filter(|&&l| l > step).count() as u64;
            before + same_step
        };
        let mut merged: IndexMap<BitString, PoolEntry> = IndexMap::new();
        for (w, part) in parts.iter().enumerate() {
            for (s, e) in &part.entries {
                let g = global_index(w, e.first_sample);
                merged
                    .entry(s.clone())
                    .and_modify(|x| {
                        x.multiplicity += e.multiplicity;
                        x.first_sample = x.first_sample.min(g);
                    })
                    .or_insert(PoolEntry { first_sample: g, ..*e });
            }
        }
        merged.sort_by(|_, a, _, b| a.first_sample.cmp(&b.first_sample));
        SamplePool { n_qubits, entries: merged, total_samples: lens.iter().sum() }
    }

    /// Sub-pool of the draws with global index below `n_samples`.
    pub fn prefix_states(&self, n_samples: u64) -> impl Iterator<Item = (&BitString, &PoolEntry)> + '_ {
        self.entries.iter().take_while(move |(_, e)| e.first_sample < n_samples)
    }

    pub fn min_energy(&self) -> Option<f64> {
        self.entries.values().map(|e| e.energy).min_by(f64::total_cmp)
    }

    /// Mean energy over draws (multiplicity-weighted).
    pub fn mean_energy(&self) -> Option<f64> {
        if self.total_samples == 0 {
            return None;
        }
        let sum: f64 = self.entries.values().map(|e| e.energy * e.multiplicity as f64).sum();
        Some(sum / self.total_samples as f64)
    }

    /// Distinct states ordered by energy, ties by first arrival.
    pub fn by_energy(&self) -> Vec<(&BitString, &PoolEntry)> {
        let mut v: Vec<_> = self.entries.iter().collect();
        v.sort_by(|a, b| a.1.energy.total_cmp(&b.1.energy));
        v
    }

    /// Multiplicity-weighted mean spin of each qubit over the `n` lowest-energy draws.
    pub fn lowest_shot_magnetization(&self, n: u64) -> Result<Vec<f64>> {
        if n == 0 || self.total_samples < n {
            return Err(Error::InsufficientShots { needed: n, available: self.total_samples });
        }
        let mut sums = vec![0.0; self.n_qubits];
        let mut left = n;
        for (s, e) in self.by_energy() {
            let take = e.multiplicity.min(left);
            for (i, m) in sums.iter_mut().enumerate() {
                *m += take as f64 * SpinConvention::spin_f64(s.get(i));
            }
            left -= take;
            if left == 0 {
                break;
            }
        }
        Ok(sums.into_iter().map(|m| m / n as f64).collect())
    }

    /// Checks every stored energy against the Hamiltonian.
    pub fn verify_energies(&self, h: &DiagonalHamiltonian, tol: f64) -> Result<()> {
        if h.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch { left: self.n_qubits, right: h.n_qubits() });
        }
        for (s, e) in &self.entries {
            let exact = h.energy(s)?;
            if (exact - e.energy).abs() > tol {
                return Err(Error::invalid(format!(
                    "stored energy {} of {} differs from recomputed {}",
                    e.energy,
                    s.to_text(self.n_qubits),
                    exact
                )));
            }
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for (k, (s, e)) in self.entries.iter().enumerate() {
            writeln!(out, "{},{},{},{}", s.to_text(self.n_qubits), e.energy, e.multiplicity, k)?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii")
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    /// Parses the CSV export. Rows may appear in any order; they are placed
    /// by their `first_arrival_index`, which must be dense.
    pub fn parse_csv(text: &str, source_name: &str) -> Result<SamplePool> {
        let err = |line: usize, column: usize, message: String| Error::Parse {
            source_name: source_name.to_string(),
            line,
            column,
            message,
        };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, header)) if header.trim() == CSV_HEADER => {}
            Some((i, _)) => return Err(err(i + 1, 1, format!("expected header `{CSV_HEADER}`"))),
            None => return Err(err(1, 1, "empty file".into())),
        }
        let mut rows: Vec<(usize, BitString, f64, u64)> = Vec::new();
        let mut n_qubits = None;
        for (i, line) in lines {
            let fields: Vec<&str> = line.trim().split(',').collect();
            if fields.len() != 4 {
                return Err(err(i + 1, 1, format!("expected 4 fields, found {}", fields.len())));
            }
            let text = fields[0].trim();
            let state = BitString::parse(text).map_err(|e| err(i + 1, 1, e.to_string()))?;
            match n_qubits {
                None => n_qubits = Some(text.len()),
                Some(n) if n != text.len() => {
                    return Err(err(i + 1, 1, format!("bitstring length {} differs from {n}", text.len())))
                }
                _ => {}
            }
            let energy: f64 = fields[1].trim().parse().map_err(|e| err(i + 1, 2, format!("bad energy: {e}")))?;
            let mult: u64 = fields[2].trim().parse().map_err(|e| err(i + 1, 3, format!("bad multiplicity: {e}")))?;
            if mult == 0 {
                return Err(err(i + 1, 3, "multiplicity must be positive".into()));
            }
            let arrival: usize =
                fields[3].trim().parse().map_err(|e| err(i + 1, 4, format!("bad first_arrival_index: {e}")))?;
            rows.push((arrival, state, energy, mult));
        }
        let n = n_qubits.ok_or_else(|| err(1, 1, "no samples".into()))?;
        rows.sort_by_key(|r| r.0);
        let mut pool = SamplePool::new(n);
        for (k, (arrival, state, energy, mult)) in rows.into_iter().enumerate() {
            if arrival != k {
                return Err(err(0, 4, format!("first_arrival_index values are not dense at {k}")));
            }
            if pool.contains(&state) {
                return Err(err(0, 1, format!("duplicate bitstring {}", state.to_text(n))));
            }
            let mut words = state.words().to_vec();
            words.resize(words_for(n), 0);
            pool.record_many(&BitString::from_words(words), energy, mult);
        }
        Ok(pool)
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<SamplePool> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_csv(&text, &path.display().to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(t: &str) -> BitString {
        BitString::parse(t).unwrap()
    }

    #[test]
    fn records_multiplicity_and_arrival() {
        let mut p = SamplePool::new(3);
        p.record(&bs("010"), -1.0);
        p.record(&bs("110"), 2.0);
        p.record(&bs("010"), -1.0);
        assert_eq!(p.len(), 2);
        assert_eq!(p.total_samples(), 3);
        assert_eq!(p.get(&bs("010")).unwrap().multiplicity, 2);
        assert_eq!(p.first_arrival_index(&bs("110")), Some(1));
        assert_eq!(p.get(&bs("110")).unwrap().first_sample, 1);
        assert_eq!(p.mean_energy(), Some(0.0));
    }

    #[test]
    fn interleaved_merge_orders_by_step_then_worker() {
        let mut a = SamplePool::new(2);
        a.record(&bs("00"), 0.0);
        a.record(&bs("01"), 1.0);
        a.record(&bs("11"), 3.0);
        let mut b = SamplePool::new(2);
        b.record(&bs("01"), 1.0);
        b.record(&bs("10"), 2.0);
        let m = SamplePool::merge_interleaved(2, &[a, b]);
        let order: Vec<String> = m.states().map(|s| s.to_text(2)).collect();
        assert_eq!(order, ["00", "01", "10", "11"]);
        let firsts: Vec<u64> = m.iter().map(|(_, e)| e.first_sample).collect();
        assert_eq!(firsts, [0, 1, 3, 4]);
        assert_eq!(m.total_samples(), 5);
        assert_eq!(m.get(&bs("01")).unwrap().multiplicity, 2);
    }

    #[test]
    fn csv_round_trip() {
        let mut p = SamplePool::new(4);
        p.record_many(&bs("0101"), -0.125, 3);
        p.record(&bs("1111"), 1.0 / 3.0);
        let q = SamplePool::parse_csv(&p.to_csv(), "mem").unwrap();
        assert_eq!(q.len(), 2);
        assert_eq!(q.get(&bs("0101")).unwrap().multiplicity, 3);
        assert_eq!(q.get(&bs("1111")).unwrap().energy, 1.0 / 3.0);
        assert_eq!(q.to_csv(), p.to_csv());
    }

    #[test]
    fn malformed_csv_is_rejected() {
        assert!(matches!(SamplePool::parse_csv("a,b\n", "x"), Err(Error::Parse { .. })));
        let bad = format!("{CSV_HEADER}\n0101,abc,1,0\n");
        match SamplePool::parse_csv(&bad, "x") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 2)),
            other => panic!("{other:?}"),
        }
        let gap = format!("{CSV_HEADER}\n01,0.5,1,0\n10,0.5,1,2\n");
        assert!(SamplePool::parse_csv(&gap, "x").is_err());
    }

    #[test]
    fn lowest_shots_count_multiplicity() {
        let mut p = SamplePool::new(2);
        p.record_many(&bs("00"), -2.0, 3);
        p.record_many(&bs("11"), -1.0, 5);
        assert_eq!(p.lowest_shot_magnetization(2).unwrap(), vec![1.0, 1.0]);
        assert_eq!(p.lowest_shot_magnetization(6).unwrap(), vec![0.0, 0.0]);
        assert!(matches!(p.lowest_shot_magnetization(9), Err(Error::InsufficientShots { .. })));
    }
}
