//! Oracles and seeded corpora shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pqpcp::generate::{generate, GenKind, GenParams};
use pqpcp::hamiltonian::LocalTerm;
use pqpcp::slh::{Assignment, SlhInstance};
use pqpcp::Limits;

pub type M = DMatrix<Complex64>;

/// Lifts a term to `n` qubits entry by entry: `⟨x|H|y⟩ = op[x_S, y_S]` when
/// `x` and `y` agree off the support. Qubit 0 is the most significant bit.
pub fn lift_oracle(n: usize, term: &LocalTerm) -> M {
    let dim = 1usize << n;
    let support = term.support();
    let op = term.op().matrix();
    let bit = |x: usize, q: usize| (x >> (n - 1 - q)) & 1;
    let local = |x: usize| support.iter().fold(0, |acc, &q| (acc << 1) | bit(x, q));
    let off_mask: usize = (0..n).filter(|q| !support.contains(q)).map(|q| 1 << (n - 1 - q)).sum();
    M::from_fn(dim, dim, |x, y| {
        if x & off_mask == y & off_mask {
            op[(local(x), local(y))]
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

pub fn hamiltonian_oracle(slh: &SlhInstance, f: &Assignment) -> M {
    let dim = 1usize << slh.n();
    let mut h = M::zeros(dim, dim);
    for (i, &c) in f.values().iter().enumerate() {
        h += lift_oracle(slh.n(), slh.term(i, c));
    }
    h
}

/// Smallest eigenvalue by nalgebra's Hermitian eigensolver, called directly.
pub fn min_eigenvalue(h: &M) -> f64 {
    h.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// `E_min` by enumerating every assignment against the dense oracle.
pub fn emin_oracle(slh: &SlhInstance) -> f64 {
    let count = (slh.l() as u128).pow(slh.m() as u32);
    (0..count)
        .map(|idx| min_eigenvalue(&hamiltonian_oracle(slh, &Assignment::from_index(idx, slh.m(), slh.l()))))
        .fold(f64::INFINITY, f64::min)
}

pub fn expectation(h: &M, v: &nalgebra::DVector<Complex64>) -> f64 {
    (v.adjoint() * h * v)[(0, 0)].re
}

/// Seeded instance with `n ≤ max_n`, `m ≤ max_m`, `l ≤ max_l`, `k ≤ max_k`,
/// each drawn from the top two values of its range.
/// The kind cycles through planted YES, certified NO and unlabeled random.
pub fn corpus_instance(seed: u64, max_n: usize, max_m: usize, max_l: usize, max_k: usize) -> SlhInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE ^ seed);
    let n = rng.random_range(max_n.saturating_sub(1).max(1)..=max_n);
    let params = GenParams {
        n,
        m: rng.random_range(max_m.saturating_sub(1).max(1)..=max_m),
        l: rng.random_range(max_l.saturating_sub(1).max(1)..=max_l),
        k: rng.random_range(1..=max_k.min(n)),
        a: 0.1,
        b: 0.5,
        seed,
    };
    let kind = match seed % 3 {
        0 => GenKind::SlhYes,
        1 => GenKind::SlhNo,
        _ => GenKind::SlhRandom,
    };
    generate(kind, &params, &Limits::default()).unwrap().instance
}
