//! Dense-matrix oracles shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64 as C;

use dcqs::cd::BiasField;
use dcqs::hamiltonian::DiagonalHamiltonian;
use dcqs::pauli::{PauliString, PauliSum};
use dcqs::pool::SamplePool;

pub type Mat = Vec<Vec<C>>;

pub fn zeros(d: usize) -> Mat {
    vec![vec![C::new(0.0, 0.0); d]; d]
}

pub fn eye(d: usize) -> Mat {
    let mut m = zeros(d);
    (0..d).for_each(|i| m[i][i] = C::new(1.0, 0.0));
    m
}

pub fn single(letter: char) -> Mat {
    let (o, l, i) = (C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 1.0));
    match letter {
        'I' => vec![vec![l, o], vec![o, l]],
        'X' => vec![vec![o, l], vec![l, o]],
        'Y' => vec![vec![o, -i], vec![i, o]],
        'Z' => vec![vec![l, o], vec![o, -l]],
        _ => panic!("not a Pauli letter: {letter}"),
    }
}

/// `a ⊗ b` where `a` acts on the higher qubit index.
pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (da, db) = (a.len(), b.len());
    let mut out = zeros(da * db);
    for i in 0..da {
        for j in 0..da {
            for k in 0..db {
                for l in 0..db {
                    out[i * db + k][j * db + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let d = a.len();
    let mut out = zeros(d);
    for i in 0..d {
        for k in 0..d {
            let aik = a[i][k];
            if aik == C::new(0.0, 0.0) {
                continue;
            }
            for j in 0..d {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn add(a: &Mat, b: &Mat, s: C) -> Mat {
    a.iter().zip(b).map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + s * y).collect()).collect()
}

pub fn scale(a: &Mat, s: C) -> Mat {
    a.iter().map(|r| r.iter().map(|x| x * s).collect()).collect()
}

pub fn commutator(a: &Mat, b: &Mat) -> Mat {
    add(&matmul(a, b), &matmul(b, a), C::new(-1.0, 0.0))
}

pub fn trace(a: &Mat) -> C {
    (0..a.len()).map(|i| a[i][i]).sum()
}

pub fn dagger(a: &Mat) -> Mat {
    let d = a.len();
    (0..d).map(|i| (0..d).map(|j| a[j][i].conj()).collect()).collect()
}

/// `Tr(a† b)`.
pub fn frobenius(a: &Mat, b: &Mat) -> C {
    let mut acc = C::new(0.0, 0.0);
    for (ra, rb) in a.iter().zip(b) {
        for (x, y) in ra.iter().zip(rb) {
            acc += x.conj() * y;
        }
    }
    acc
}

pub fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    a.iter().zip(b).flat_map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| (x - y).norm())).fold(0.0, f64::max)
}

/// Dense matrix of one Pauli string from its letters; basis index bit `i` is qubit `i`.
pub fn dense_letters(n: usize, letters: &[(usize, char)], coef: C) -> Mat {
    let mut m = eye(1);
    for q in (0..n).rev() {
        let l = letters.iter().find(|(i, _)| *i == q).map_or('I', |(_, c)| *c);
        m = kron(&m, &single(l));
    }
    scale(&m, coef)
}

pub fn dense_string(p: &PauliString) -> Mat {
    let letters = p.key.letters(p.n_qubits);
    dense_letters(p.n_qubits, &letters, p.coefficient)
}

pub fn dense_sum(s: &PauliSum) -> Mat {
    let d = 1 << s.n_qubits();
    s.strings().fold(zeros(d), |acc, p| add(&acc, &dense_string(&p), C::new(1.0, 0.0)))
}

/// Diagonal matrix of `h` built from its energy function.
pub fn dense_diagonal(h: &DiagonalHamiltonian) -> Mat {
    let d = 1usize << h.n_qubits();
    let mut m = zeros(d);
    (0..d).for_each(|b| m[b][b] = C::new(h.energy_index(b as u64), 0.0));
    m
}

pub fn one_norm(a: &Mat) -> f64 {
    (0..a.len()).map(|j| a.iter().map(|r| r[j].norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// `exp(a)` by scaling and squaring around a Taylor series.
pub fn expm(a: &Mat) -> Mat {
    let norm = one_norm(a);
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = scale(a, C::new(0.5f64.powi(s), 0.0));
    let d = a.len();
    let mut result = eye(d);
    let mut term = eye(d);
    for k in 1..=30 {
        term = scale(&matmul(&term, &scaled), C::new(1.0 / k as f64, 0.0));
        result = add(&result, &term, C::new(1.0, 0.0));
    }
    for _ in 0..s {
        result = matmul(&result, &result);
    }
    result
}

pub fn apply(m: &Mat, v: &[C]) -> Vec<C> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// Total variation distance between a pool's empirical distribution and `mu`.
pub fn empirical_tvd(pool: &SamplePool, mu: &[f64]) -> f64 {
    let total = pool.total_samples() as f64;
    let mut acc = 0.0;
    let mut covered = 0.0;
    for (s, e) in pool.iter() {
        let p = mu[s.index() as usize];
        acc += (e.multiplicity as f64 / total - p).abs();
        covered += p;
    }
    0.5 * (acc + (1.0 - covered).max(0.0))
}

/// `−Σ (X_i + w b_i Z_i)` assembled from Kronecker products.
pub fn dense_initial(bias: &BiasField) -> Mat {
    let n = bias.n_qubits();
    let mut h = zeros(1 << n);
    for i in 0..n {
        h = add(&h, &dense_letters(n, &[(i, 'X')], C::new(-1.0, 0.0)), C::new(1.0, 0.0));
        let c = bias.w() * bias.b()[i];
        h = add(&h, &dense_letters(n, &[(i, 'Z')], C::new(-c, 0.0)), C::new(1.0, 0.0));
    }
    h
}

/// Lowest eigenvector of each qubit's 2×2 block, tensored together.
pub fn dense_ground(bias: &BiasField) -> Vec<C> {
    let mut state = vec![C::new(1.0, 0.0)];
    for &b in bias.b() {
        let c = bias.w() * b;
        // −(X + cZ) = [[−c, −1], [−1, c]]
        let lambda = -(c * c + 1.0).sqrt();
        let (v0, v1) = (1.0, -(lambda + c));
        let norm = (v0 * v0 + v1 * v1).sqrt();
        let q = [v0 / norm, v1 / norm];
        state = q.iter().flat_map(|&a| state.iter().map(move |&s| s * a)).collect();
    }
    state
}

pub fn dense_alpha(hi: &Mat, hf: &Mat, lambda: f64) -> (f64, Mat) {
    let o0 = add(hf, hi, C::new(-1.0, 0.0));
    let had = add(&scale(hi, C::new(1.0 - lambda, 0.0)), hf, C::new(lambda, 0.0));
    let o1 = commutator(&had, &o0);
    let o2 = commutator(&had, &o1);
    (-frobenius(&o1, &o1).re / frobenius(&o2, &o2).re, o1)
}

pub fn all_letters(n: usize) -> Vec<Vec<(usize, char)>> {
    let mut out = vec![vec![]];
    for q in 0..n {
        out = out
            .into_iter()
            .flat_map(|l| {
                ['I', 'X', 'Y', 'Z'].into_iter().map(move |c| {
                    let mut l = l.clone();
                    if c != 'I' {
                        l.push((q, c));
                    }
                    l
                })
            })
            .collect();
    }
    out
}
