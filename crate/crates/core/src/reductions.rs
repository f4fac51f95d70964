//! Pointer QPCP verifiers and the reductions between the three formulations:
//! verifier → SLH, SLH → CRESP game, CRESP game → verifier.

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{checked_pow, falling_factorial, Limits, Tolerances};
use crate::game::{tuple_rank, tuple_unrank, CrespGame, CrespStrategy};
use crate::hamiltonian::LocalTerm;
use crate::linalg::{top_state, HilbertShape, QOperator, QState};
use crate::slh::{Assignment, SlhInstance};
use crate::{Error, Result};

/// A verifier given extensionally: for position `i` and symbol `j`, the
/// rejection effect it measures on the quantum proof.
#[derive(Debug, Clone, PartialEq)]
pub struct PointerQpcpVerifier {
    m: usize,
    l: usize,
    p: usize,
    q: usize,
    checks: Vec<Vec<LocalTerm>>,
}

/// Classical part `y` and quantum part `ψ` of a proof.
#[derive(Debug, Clone, PartialEq)]
pub struct PointerProof {
    pub y: Vec<usize>,
    pub psi: QState,
}

impl PointerQpcpVerifier {
    pub fn new(m: usize, l: usize, p: usize, q: usize, checks: Vec<Vec<LocalTerm>>) -> Result<Self> {
        if checks.len() != m {
            return Err(Error::InvalidInstance(format!("{} check rows for m={m}", checks.len())));
        }
        if l == 0 {
            return Err(Error::InvalidInstance("alphabet must be nonempty".into()));
        }
        for (i, row) in checks.iter().enumerate() {
            if row.len() != l {
                return Err(Error::InvalidInstance(format!(
                    "position {i} has {} checks, expected {l}",
                    row.len()
                )));
            }
            for (j, r) in row.iter().enumerate() {
                if r.n() != p {
                    return Err(Error::InvalidInstance(format!(
                        "check ({i},{j}) acts on {} qubits, proof has {p}",
                        r.n()
                    )));
                }
                if r.locality() > q {
                    return Err(Error::InvalidInstance(format!(
                        "check ({i},{j}) touches {} qubits, locality is {q}",
                        r.locality()
                    )));
                }
            }
        }
        Ok(PointerQpcpVerifier { m, l, p, q, checks })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn checks(&self) -> &[Vec<LocalTerm>] {
        &self.checks
    }

    pub fn check(&self, i: usize, j: usize) -> &LocalTerm {
        &self.checks[i][j]
    }

    pub fn check_proof(&self, proof: &PointerProof) -> Result<()> {
        if proof.y.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                actual: proof.y.len(),
            });
        }
        if let Some(&bad) = proof.y.iter().find(|&&v| v >= self.l) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                bound: self.l,
            });
        }
        if proof.psi.shape().factors() != vec![2; self.p].as_slice() {
            return Err(Error::DimensionMismatch {
                expected: 1 << self.p,
                actual: proof.psi.shape().dim(),
            });
        }
        Ok(())
    }
}

/// `1 − (1/m) Σ_i ⟨ψ|R_{i,y_i}|ψ⟩`.
pub fn pqpcp_accept(verifier: &PointerQpcpVerifier, proof: &PointerProof) -> Result<f64> {
    verifier.check_proof(proof)?;
    if verifier.m == 0 {
        return Ok(1.0);
    }
    let mut reject = 0.0;
    for (i, &y) in proof.y.iter().enumerate() {
        reject += verifier.checks[i][y].expectation(&proof.psi)?;
    }
    Ok(1.0 - reject / verifier.m as f64)
}

/// Best proof by enumerating every classical string and taking the top
/// eigenvector of the resulting acceptance operator. Ties go to the
/// lexicographically smallest `y`.
pub fn max_acceptance(verifier: &PointerQpcpVerifier, limits: &Limits) -> Result<(f64, PointerProof)> {
    let count = checked_pow(verifier.l as u128, verifier.m);
    limits.check_enum(count)?;
    let shape = HilbertShape::qubits(verifier.p, limits)?;
    if verifier.m == 0 {
        let (v, psi) = top_state(&QOperator::identity(shape))?;
        return Ok((v, PointerProof { y: vec![], psi }));
    }
    let w = 1.0 / verifier.m as f64;
    let lifted: Vec<Vec<QOperator>> = verifier
        .checks
        .iter()
        .map(|row| {
            row.iter()
                .map(|r| Ok(r.lift(limits)?.scale(w)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let best = (0..count as u64)
        .into_par_iter()
        .map(|idx| {
            let y = Assignment::from_index(idx as u128, verifier.m, verifier.l);
            let mut acc = QOperator::identity(shape.clone());
            for (i, &v) in y.0.iter().enumerate() {
                acc = acc.sub(&lifted[i][v])?;
            }
            top_state(&acc).map(|(v, s)| (v, idx, s))
        })
        .try_reduce_with(|x, y| {
            Ok(match y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)) {
                std::cmp::Ordering::Greater => y,
                _ => x,
            })
        })
        .expect("at least one classical string")?;
    let y = Assignment::from_index(best.1 as u128, verifier.m, verifier.l).0;
    Ok((best.0, PointerProof { y, psi: best.2 }))
}

/// SLH with `H_{i,j} = R_{i,j}` and thresholds `(1 − α, 1 − β)`.
pub fn pqpcp_to_slh(verifier: &PointerQpcpVerifier, alpha: f64, beta: f64) -> Result<SlhInstance> {
    if alpha.partial_cmp(&beta) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::InvalidThresholds(format!(
            "need alpha > beta, got alpha={alpha}, beta={beta}"
        )));
    }
    SlhInstance::with_set_size(
        verifier.p,
        verifier.q,
        verifier.l,
        verifier.checks.clone(),
        1.0 - alpha,
        1.0 - beta,
    )
}

pub fn proof_to_assignment(proof: &PointerProof) -> (Assignment, QState) {
    (Assignment(proof.y.clone()), proof.psi.clone())
}

pub fn assignment_to_proof(f: &Assignment, state: &QState) -> PointerProof {
    PointerProof {
        y: f.0.clone(),
        psi: state.clone(),
    }
}

pub fn slh_to_game(instance: &SlhInstance) -> Result<CrespGame> {
    CrespGame::new(instance.clone())
}

/// Symbol encoding for verifiers built from games: `y = rank(s)·l + c`, with
/// `s` an injective `k`-tuple ranked lexicographically and `c` the classical
/// answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AlphabetCodec {
    pub n: usize,
    pub k: usize,
    pub l: usize,
}

impl AlphabetCodec {
    pub fn size(&self) -> u128 {
        falling_factorial(self.n, self.k).saturating_mul(self.l as u128)
    }

    pub fn encode(&self, tuple: &[usize], c: usize) -> Result<usize> {
        if tuple.len() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                actual: tuple.len(),
            });
        }
        if c >= self.l {
            return Err(Error::IndexOutOfRange {
                index: c,
                bound: self.l,
            });
        }
        Ok(tuple_rank(self.n, tuple)? * self.l + c)
    }

    pub fn decode(&self, y: usize) -> Result<(Vec<usize>, usize)> {
        Ok((tuple_unrank(self.n, self.k, y / self.l)?, y % self.l))
    }
}

/// The verifier that simulates all provers: position `i` holds the pair
/// (answer tuple, classical answer) for question `i`, and the rejection effect
/// is `I − A_i` on the answered qubits.
pub fn cresp_to_pqpcp(game: &CrespGame, limits: &Limits) -> Result<(PointerQpcpVerifier, AlphabetCodec)> {
    let codec = AlphabetCodec {
        n: game.n(),
        k: game.k(),
        l: game.slh().l(),
    };
    limits.check_enum(codec.size())?;
    let size = codec.size() as usize;
    let tol = Tolerances::DEFAULT;
    let checks = (0..game.m())
        .into_par_iter()
        .map(|i| {
            (0..size)
                .map(|y| {
                    let (tuple, c) = codec.decode(y)?;
                    let test = game.question_test(i, c, &tuple)?;
                    let d = test.accept.dim();
                    let reject = crate::linalg::CMatrix::identity(d, d) - test.accept.matrix();
                    LocalTerm::with_tolerances(game.n(), test.support, reject, &tol)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let verifier = PointerQpcpVerifier::new(game.m(), size, game.n(), game.k(), checks)?;
    Ok((verifier, codec))
}

pub fn strategy_to_proof(codec: &AlphabetCodec, game: &CrespGame, strategy: &CrespStrategy) -> Result<PointerProof> {
    strategy.validate(game)?;
    let y = strategy
        .answers
        .iter()
        .zip(&strategy.assignment.0)
        .map(|(s, &c)| codec.encode(s, c))
        .collect::<Result<_>>()?;
    Ok(PointerProof {
        y,
        psi: strategy.phi.clone(),
    })
}

pub fn proof_to_strategy(codec: &AlphabetCodec, game: &CrespGame, proof: &PointerProof) -> Result<CrespStrategy> {
    let mut f = Vec::with_capacity(proof.y.len());
    let mut answers = Vec::with_capacity(proof.y.len());
    for &y in &proof.y {
        let (s, c) = codec.decode(y)?;
        f.push(c);
        answers.push(s);
    }
    let strategy = CrespStrategy {
        assignment: Assignment(f),
        answers,
        phi: proof.psi.clone(),
    };
    strategy.validate(game)?;
    Ok(strategy)
}
