//! k-local terms and plain Local Hamiltonian instances.

use serde::{Deserialize, Serialize};

use crate::config::{Limits, Tolerances};
use crate::linalg::{embed_local, ground_state, reduced_state, CMatrix, HilbertShape, QOperator, QState};
use crate::{Error, Result};

/// Outcome of a promise problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Yes,
    No,
    PromiseViolated,
}

impl Verdict {
    /// Minimisation promise: YES at or below `yes_max`, NO at or above `no_min`.
    pub fn from_low(value: f64, yes_max: f64, no_min: f64, slack: f64) -> Verdict {
        if value <= yes_max + slack {
            Verdict::Yes
        } else if value >= no_min - slack {
            Verdict::No
        } else {
            Verdict::PromiseViolated
        }
    }

    /// Maximisation promise: YES at or above `yes_min`, NO at or below `no_max`.
    pub fn from_high(value: f64, yes_min: f64, no_max: f64, slack: f64) -> Verdict {
        if value >= yes_min - slack {
            Verdict::Yes
        } else if value <= no_max + slack {
            Verdict::No
        } else {
            Verdict::PromiseViolated
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "YES",
            Verdict::No => "NO",
            Verdict::PromiseViolated => "PROMISE_VIOLATED",
        })
    }
}

/// A positive contraction acting on a few qubits of an `n`-qubit register.
///
/// The support is stored in ascending order; the operator's factor `t` acts on
/// qubit `support[t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTerm {
    n: usize,
    support: Vec<usize>,
    op: QOperator,
}

impl LocalTerm {
    /// Validates `0 ≤ matrix ≤ I` and re-orders the support ascending,
    /// permuting the matrix's tensor factors to match.
    pub fn new(n: usize, support: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        Self::with_tolerances(n, support, matrix, &Tolerances::DEFAULT)
    }

    pub fn with_tolerances(n: usize, support: Vec<usize>, matrix: CMatrix, tol: &Tolerances) -> Result<Self> {
        let mut seen = vec![false; n];
        for &q in &support {
            if q >= n {
                return Err(Error::IndexOutOfRange { index: q, bound: n });
            }
            if seen[q] {
                return Err(Error::DuplicateIndex(q));
            }
            seen[q] = true;
        }
        let shape = HilbertShape::local(vec![2; support.len()])?;
        let op = QOperator::new(shape.clone(), matrix)?;
        op.ensure_effect(tol)?;

        let mut sorted = support.clone();
        sorted.sort_unstable();
        let op = if sorted == support {
            op
        } else {
            let positions: Vec<usize> = support
                .iter()
                .map(|q| sorted.binary_search(q).expect("member of sorted support"))
                .collect();
            embed_local(&op, &positions, &shape)?
        };
        Ok(LocalTerm { n, support: sorted, op })
    }

    /// The zero term (empty support).
    pub fn zero(n: usize) -> Self {
        LocalTerm {
            n,
            support: Vec::new(),
            op: QOperator::zeros(HilbertShape::local(Vec::new()).expect("empty shape")),
        }
    }

    /// The identity on the given qubits.
    pub fn identity(n: usize, support: Vec<usize>) -> Result<Self> {
        let d = 1usize << support.len();
        Self::new(n, support, CMatrix::identity(d, d))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn locality(&self) -> usize {
        self.support.len()
    }

    pub fn op(&self) -> &QOperator {
        &self.op
    }

    /// The term as an operator on all `n` qubits.
    pub fn lift(&self, limits: &Limits) -> Result<QOperator> {
        let shape = HilbertShape::qubits(self.n, limits)?;
        embed_local(&self.op, &self.support, &shape)
    }

    /// `⟨ψ|H|ψ⟩` computed on the reduced state of the support.
    pub fn expectation(&self, psi: &QState) -> Result<f64> {
        if psi.shape().factors() != vec![2; self.n].as_slice() {
            return Err(Error::DimensionMismatch {
                expected: 1 << self.n,
                actual: psi.shape().dim(),
            });
        }
        reduced_state(psi, &self.support)?.expectation(&self.op)
    }
}

/// A Local Hamiltonian promise instance: `m` terms, locality `k`, thresholds `a < b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LhInstance {
    n: usize,
    k: usize,
    terms: Vec<LocalTerm>,
    a: f64,
    b: f64,
}

impl LhInstance {
    pub fn new(n: usize, k: usize, terms: Vec<LocalTerm>, a: f64, b: f64) -> Result<Self> {
        if a.partial_cmp(&b) != Some(std::cmp::Ordering::Less) {
            return Err(Error::InvalidThresholds(format!("need a < b, got a={a}, b={b}")));
        }
        for (j, t) in terms.iter().enumerate() {
            if t.n() != n {
                return Err(Error::InvalidInstance(format!(
                    "term {j} acts on {} qubits, instance has {n}",
                    t.n()
                )));
            }
            if t.locality() > k {
                return Err(Error::InvalidInstance(format!(
                    "term {j} has support {} > k={k}",
                    t.locality()
                )));
            }
        }
        Ok(LhInstance { n, k, terms, a, b })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[LocalTerm] {
        &self.terms
    }

    pub fn thresholds(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// `H = Σ_j H_j` on the full register.
    pub fn assemble(&self, limits: &Limits) -> Result<QOperator> {
        let shape = HilbertShape::qubits(self.n, limits)?;
        let mut acc = QOperator::zeros(shape);
        for t in &self.terms {
            acc = acc.add(&t.lift(limits)?)?;
        }
        Ok(acc)
    }

    /// Minimum eigenvalue of the assembled Hamiltonian and a state attaining it.
    pub fn groundstate_energy(&self, limits: &Limits) -> Result<(f64, QState)> {
        ground_state(&self.assemble(limits)?)
    }

    /// `⟨φ|H|φ⟩`.
    pub fn energy(&self, phi: &QState) -> Result<f64> {
        self.terms.iter().map(|t| t.expectation(phi)).sum()
    }

    pub fn decide(&self, limits: &Limits, tol: &Tolerances) -> Result<Verdict> {
        let (e, _) = self.groundstate_energy(limits)?;
        let m = self.m() as f64;
        Ok(Verdict::from_low(e, self.a * m, self.b * m, tol.decision))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{gates, random, C64};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn limits() -> Limits {
        Limits::default()
    }

    #[test]
    fn term_validation() {
        assert!(LocalTerm::new(2, vec![0], gates::pauli_z()).is_err());
        assert!(matches!(
            LocalTerm::new(2, vec![2], gates::ket_bra(1)),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            LocalTerm::new(2, vec![1, 1], CMatrix::identity(4, 4)),
            Err(Error::DuplicateIndex(1))
        ));
        assert!(LocalTerm::new(2, vec![0], CMatrix::identity(4, 4)).is_err());
    }

    #[test]
    fn unsorted_support_is_canonicalized() {
        // |1⟩⟨1| ⊗ |0⟩⟨0| on (qubit 2, qubit 0) == |0⟩⟨0| ⊗ |1⟩⟨1| on (0, 2)
        let m = gates::ket_bra(1).kronecker(&gates::ket_bra(0));
        let t = LocalTerm::new(3, vec![2, 0], m).unwrap();
        assert_eq!(t.support(), &[0, 2]);
        let want = gates::ket_bra(0).kronecker(&gates::ket_bra(1));
        assert_eq!(t.op().matrix(), &want);
    }

    #[test]
    fn assemble_empty_is_zero() {
        let inst = LhInstance::new(2, 2, vec![], 0.1, 0.5).unwrap();
        assert_eq!(inst.assemble(&limits()).unwrap().matrix(), &CMatrix::zeros(4, 4));
        let (e, _) = inst.groundstate_energy(&limits()).unwrap();
        assert!(e.abs() < 1e-15);
    }

    #[test]
    fn assemble_diagonal_sum() {
        let t = LocalTerm::new(1, vec![0], gates::ket_bra(1)).unwrap();
        let inst = LhInstance::new(1, 1, vec![t.clone(), t], 0.1, 0.5).unwrap();
        let h = inst.assemble(&limits()).unwrap();
        let want = CMatrix::from_diagonal(&crate::linalg::CVector::from_vec(vec![
            C64::new(0.0, 0.0),
            C64::new(2.0, 0.0),
        ]));
        assert_eq!(h.matrix(), &want);
    }

    #[test]
    fn assemble_two_qubit_projectors_matches_explicit_4x4() {
        let t1 = LocalTerm::new(2, vec![0], gates::ket_bra(1)).unwrap();
        let t2 = LocalTerm::new(2, vec![1], gates::ket_bra(1)).unwrap();
        let inst = LhInstance::new(2, 1, vec![t1, t2], 0.1, 0.5).unwrap();
        let h = inst.assemble(&limits()).unwrap();
        // explicit: diag over |00>,|01>,|10>,|11> counts ones
        for (idx, ones) in [(0, 0.0), (1, 1.0), (2, 1.0), (3, 2.0)] {
            assert!((h.matrix()[(idx, idx)].re - ones).abs() < 1e-15);
        }
        assert!((h.matrix()[(3, 3)].re - 2.0).abs() < 1e-15);
    }

    #[test]
    fn groundstate_single_projector() {
        let t = LocalTerm::new(1, vec![0], gates::ket_bra(1)).unwrap();
        let inst = LhInstance::new(1, 1, vec![t], 0.1, 0.5).unwrap();
        let (e, psi) = inst.groundstate_energy(&limits()).unwrap();
        assert!(e.abs() < 1e-14);
        assert!((psi.amplitudes()[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn groundstate_mixed_projectors_residual() {
        let t1 = LocalTerm::new(2, vec![0], gates::ket_bra(1)).unwrap();
        let t2 = LocalTerm::new(2, vec![1], gates::ket_bra(1)).unwrap();
        let t3 = LocalTerm::new(2, vec![0, 1], gates::phi_plus()).unwrap();
        let inst = LhInstance::new(2, 2, vec![t1, t2, t3], 0.1, 0.5).unwrap();
        let h = inst.assemble(&limits()).unwrap();
        let (e, v) = inst.groundstate_energy(&limits()).unwrap();
        let residual = h.apply(&v).unwrap() - v.amplitudes().scale(e);
        assert!(residual.norm() < 1e-9);
        assert!((inst.energy(&v).unwrap() - e).abs() < 1e-10);
    }

    #[test]
    fn energy_bounds_and_monotonicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let n = 3;
            let mut terms = Vec::new();
            for _ in 0..3 {
                let q = rng.random_range(0..n);
                terms.push(LocalTerm::new(n, vec![q], random::effect(2, 0.0, 1.0, &mut rng)).unwrap());
            }
            let inst = LhInstance::new(n, 2, terms.clone(), 0.1, 0.5).unwrap();
            let (e, _) = inst.groundstate_energy(&limits()).unwrap();
            assert!(e >= -1e-12 && e <= inst.m() as f64 + 1e-12);
            terms.push(LocalTerm::new(n, vec![0, 2], random::effect(4, 0.0, 1.0, &mut rng)).unwrap());
            let bigger = LhInstance::new(n, 2, terms, 0.1, 0.5).unwrap();
            let (e2, _) = bigger.groundstate_energy(&limits()).unwrap();
            assert!(e2 >= e - 1e-12);
        }
    }

    #[test]
    fn decide_trichotomy() {
        let z = LocalTerm::zero(2);
        let inst = LhInstance::new(2, 1, vec![z.clone(), z], 0.1, 0.5).unwrap();
        assert_eq!(inst.decide(&limits(), &Tolerances::DEFAULT).unwrap(), Verdict::Yes);
        let id = LocalTerm::identity(2, vec![0]).unwrap();
        let inst = LhInstance::new(2, 1, vec![id.clone(), id], 0.1, 0.9).unwrap();
        assert_eq!(inst.decide(&limits(), &Tolerances::DEFAULT).unwrap(), Verdict::No);
        let half = LocalTerm::new(1, vec![0], CMatrix::identity(2, 2).scale(0.5)).unwrap();
        let inst = LhInstance::new(1, 1, vec![half], 0.1, 0.9).unwrap();
        assert_eq!(
            inst.decide(&limits(), &Tolerances::DEFAULT).unwrap(),
            Verdict::PromiseViolated
        );
    }

    #[test]
    fn thresholds_must_be_ordered() {
        assert!(LhInstance::new(1, 1, vec![], 0.5, 0.5).is_err());
    }
}
