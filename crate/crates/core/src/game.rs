//! CRESP games built from Set Local Hamiltonian instances.
//!
//! The verifier asks question `i`; the classical prover names `c = f(i)`; the
//! swap-only quantum provers move the encoded blocks listed in `answers[i]`
//! into the message slots. Slot `t` is checked against requested qubit
//! `support(H_{i,c})[t]`; slots past the term's support are ignored.
//!
//! Because the shared state is `E(φ)` and `E` is a product of block isometries,
//! the whole test for one question reduces to an operator on the answered
//! logical qubits:
//!
//! ```text
//! A_i = ½ ⊗_t pass_t + ½ (⊗_t transfer_t)† (I − H_{i,c}) (⊗_t transfer_t)
//! ```
//!
//! with `pass_t`, `transfer_t` from [`SlotChannel`]. [`AcceptMode::DenseOracle`]
//! recomputes the same probability on the explicit qudit space.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{checked_pow, falling_factorial, Limits, Tolerances};
use crate::encoding::{encode_state, EncodingLayout, SlotChannel};
use crate::hamiltonian::{LocalTerm, Verdict};
use crate::linalg::{
    embed_local, reduced_state, top_state, trace_of_product, CMatrix, HilbertShape, QOperator, QState,
};
use crate::slh::{Assignment, SlhInstance};
use crate::{Error, Result};

/// All injective `k`-tuples over `0..n` in lexicographic order.
pub fn injective_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn extend(n: usize, k: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == k {
            out.push(prefix.clone());
            return;
        }
        for q in 0..n {
            if !prefix.contains(&q) {
                prefix.push(q);
                extend(n, k, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    if k <= n {
        extend(n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// Lexicographic rank of an injective tuple among [`injective_tuples`].
pub fn tuple_rank(n: usize, tuple: &[usize]) -> Result<usize> {
    let k = tuple.len();
    let mut rank = 0usize;
    let mut used = vec![false; n];
    for (pos, &q) in tuple.iter().enumerate() {
        if q >= n {
            return Err(Error::IndexOutOfRange { index: q, bound: n });
        }
        if used[q] {
            return Err(Error::DuplicateIndex(q));
        }
        let smaller_free = (0..q).filter(|&x| !used[x]).count();
        rank += smaller_free * falling_factorial(n - pos - 1, k - pos - 1) as usize;
        used[q] = true;
    }
    Ok(rank)
}

/// Inverse of [`tuple_rank`].
pub fn tuple_unrank(n: usize, k: usize, mut rank: usize) -> Result<Vec<usize>> {
    let total = falling_factorial(n, k) as usize;
    if rank >= total {
        return Err(Error::IndexOutOfRange {
            index: rank,
            bound: total,
        });
    }
    let mut free: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(k);
    for pos in 0..k {
        let block = falling_factorial(n - pos - 1, k - pos - 1) as usize;
        let idx = rank / block;
        rank %= block;
        out.push(free.remove(idx));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrespGame {
    slh: SlhInstance,
    layout: EncodingLayout,
    k: usize,
}

impl CrespGame {
    /// The game for `slh`. Each quantum prover answers `min(k, n)` blocks.
    pub fn new(slh: SlhInstance) -> Result<Self> {
        if slh.m() == 0 {
            return Err(Error::InvalidInstance(
                "a game needs at least one question (m ≥ 1)".into(),
            ));
        }
        let layout = EncodingLayout::new(slh.n())?;
        let k = slh.k().min(slh.n());
        Ok(CrespGame { slh, layout, k })
    }

    pub fn slh(&self) -> &SlhInstance {
        &self.slh
    }

    pub fn layout(&self) -> &EncodingLayout {
        &self.layout
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.slh.m()
    }

    pub fn n(&self) -> usize {
        self.slh.n()
    }

    /// Completeness and soundness thresholds `(1 − a/2, 1 − b/2)`.
    pub fn thresholds(&self) -> (f64, f64) {
        let (a, b) = self.slh.thresholds();
        (1.0 - a / 2.0, 1.0 - b / 2.0)
    }

    /// Answer tuples available to the quantum provers for one question.
    pub fn answer_tuple_count(&self) -> u128 {
        falling_factorial(self.n(), self.k)
    }

    /// `(l · n!/(n−k)!)^m` discrete strategies.
    pub fn strategy_count(&self) -> u128 {
        checked_pow(
            (self.slh.l() as u128).saturating_mul(self.answer_tuple_count()),
            self.m(),
        )
    }

    /// Honest answers for choice `c` on question `i`: the term's support,
    /// padded with the smallest unused qubits up to `k` slots.
    pub fn honest_answer(&self, i: usize, c: usize) -> Vec<usize> {
        let mut out = self.slh.term(i, c).support().to_vec();
        let mut q = 0;
        while out.len() < self.k {
            if !out.contains(&q) {
                out.push(q);
            }
            q += 1;
        }
        out
    }

    fn check_question(&self, i: usize, c: usize, slots: &[usize]) -> Result<()> {
        if i >= self.m() {
            return Err(Error::IndexOutOfRange {
                index: i,
                bound: self.m(),
            });
        }
        if c >= self.slh.l() {
            return Err(Error::IndexOutOfRange {
                index: c,
                bound: self.slh.l(),
            });
        }
        if slots.len() != self.k {
            return Err(Error::InvalidStrategy {
                invariant: "answer-length",
                detail: format!("question {i}: {} slots, expected {}", slots.len(), self.k),
            });
        }
        for (t, &q) in slots.iter().enumerate() {
            if q >= self.n() {
                return Err(Error::InvalidStrategy {
                    invariant: "answer-range",
                    detail: format!("question {i}: slot {t} names qubit {q} ≥ n={}", self.n()),
                });
            }
            if slots[..t].contains(&q) {
                return Err(Error::InvalidStrategy {
                    invariant: "answer-distinct",
                    detail: format!("question {i}: qubit {q} answered twice"),
                });
            }
        }
        Ok(())
    }

    /// The verifier's test for question `i` when the classical prover says `c`
    /// and the quantum provers answer `slots`.
    pub fn question_test(&self, i: usize, c: usize, slots: &[usize]) -> Result<QuestionTest> {
        self.check_question(i, c, slots)?;
        let term: &LocalTerm = self.slh.term(i, c);
        let requested = term.support();
        let r = requested.len();
        let mut pass = CMatrix::identity(1, 1);
        let mut transfer = CMatrix::identity(1, 1);
        for t in 0..r {
            let ch = SlotChannel::closed_form(&self.layout, requested[t], slots[t])?;
            pass = pass.kronecker(&ch.pass);
            transfer = transfer.kronecker(&ch.transfer);
        }
        let d = 1usize << r;
        let reward = CMatrix::identity(d, d) - term.op().matrix();
        let accept = (pass.clone() + transfer.adjoint() * reward * &transfer).scale(0.5);
        let shape = HilbertShape::local(vec![2; r])?;
        Ok(QuestionTest {
            support: slots[..r].to_vec(),
            pass: QOperator::new(shape.clone(), pass)?,
            accept: QOperator::new(shape, accept)?,
        })
    }
}

/// One question's test as operators on the answered logical qubits.
#[derive(Debug, Clone)]
pub struct QuestionTest {
    /// Answered qubits the verifier inspects, in slot order.
    pub support: Vec<usize>,
    /// Effect of passing the codespace test.
    pub pass: QOperator,
    /// Effect of overall acceptance.
    pub accept: QOperator,
}

/// Classical answers, per-question swap choices and the shared logical state.
#[derive(Debug, Clone, PartialEq)]
pub struct CrespStrategy {
    pub assignment: Assignment,
    pub answers: Vec<Vec<usize>>,
    pub phi: QState,
}

impl CrespStrategy {
    pub fn honest(game: &CrespGame, assignment: Assignment, phi: QState) -> Result<Self> {
        game.slh.check_assignment(&assignment)?;
        let answers = (0..game.m()).map(|i| game.honest_answer(i, assignment.0[i])).collect();
        let s = CrespStrategy {
            assignment,
            answers,
            phi,
        };
        s.validate(game)?;
        Ok(s)
    }

    pub fn validate(&self, game: &CrespGame) -> Result<()> {
        game.slh
            .check_assignment(&self.assignment)
            .map_err(|e| Error::InvalidStrategy {
                invariant: "assignment",
                detail: e.to_string(),
            })?;
        if self.answers.len() != game.m() {
            return Err(Error::InvalidStrategy {
                invariant: "answer-count",
                detail: format!("{} answer lists for {} questions", self.answers.len(), game.m()),
            });
        }
        for (i, slots) in self.answers.iter().enumerate() {
            game.check_question(i, self.assignment.0[i], slots)?;
        }
        if self.phi.shape().factors() != vec![2; game.n()].as_slice() {
            return Err(Error::InvalidStrategy {
                invariant: "state-shape",
                detail: format!("shared state has dimension {}", self.phi.shape().dim()),
            });
        }
        Ok(())
    }

    /// Every question answers the requested blocks in the requested slots.
    pub fn is_honest(&self, game: &CrespGame) -> bool {
        self.answers.iter().enumerate().all(|(i, slots)| {
            let req = game.slh.term(i, self.assignment.0[i]).support();
            slots[..req.len()] == *req
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuestionStats {
    pub pass_t1: f64,
    pub accept: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameOutcomeStats {
    pub questions: Vec<QuestionStats>,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcceptMode {
    /// Logical-subspace evaluation with the closed-form slot channels.
    Structured,
    /// Explicit encoded state, codespace projections and decoding.
    DenseOracle,
}

pub fn accept_probability(game: &CrespGame, strategy: &CrespStrategy) -> Result<f64> {
    Ok(outcome_stats(game, strategy, AcceptMode::Structured, &Limits::default())?.value)
}

pub fn outcome_stats(
    game: &CrespGame,
    strategy: &CrespStrategy,
    mode: AcceptMode,
    limits: &Limits,
) -> Result<GameOutcomeStats> {
    strategy.validate(game)?;
    let questions = match mode {
        AcceptMode::Structured => structured_stats(game, strategy)?,
        AcceptMode::DenseOracle => dense_stats(game, strategy, limits)?,
    };
    let value = questions.iter().map(|q| q.accept).sum::<f64>() / game.m() as f64;
    Ok(GameOutcomeStats { questions, value })
}

fn structured_stats(game: &CrespGame, strategy: &CrespStrategy) -> Result<Vec<QuestionStats>> {
    (0..game.m())
        .map(|i| {
            let test = game.question_test(i, strategy.assignment.0[i], &strategy.answers[i])?;
            let rho = reduced_state(&strategy.phi, &test.support)?;
            Ok(QuestionStats {
                pass_t1: rho.expectation(&test.pass)?,
                accept: rho.expectation(&test.accept)?,
            })
        })
        .collect()
}

fn dense_stats(game: &CrespGame, strategy: &CrespStrategy, limits: &Limits) -> Result<Vec<QuestionStats>> {
    let layout = game.layout();
    let all: Vec<usize> = (0..game.n()).collect();
    let (encoded, factors) = encode_state(layout, &strategy.phi, &all, limits)?;
    (0..game.m())
        .map(|i| {
            let term = game.slh.term(i, strategy.assignment.0[i]);
            let requested = term.support();
            let slots = &strategy.answers[i][..requested.len()];
            let keep: Vec<usize> = slots.iter().flat_map(|&q| factors[q].clone()).collect();
            let message = reduced_state(&encoded, &keep)?;

            let mut check = CMatrix::identity(1, 1);
            let mut decode = CMatrix::identity(1, 1);
            for &q in requested {
                check = check.kronecker(layout.block_check(q)?.matrix());
                decode = decode.kronecker(&layout.isometry(q)?.matrix().adjoint());
            }
            let pass_t1 = trace_of_product(&check, message.matrix()).re;
            let projected = &check * message.matrix() * &check;
            let decoded = &decode * projected * decode.adjoint();
            let d = decoded.nrows();
            let reward = CMatrix::identity(d, d) - term.op().matrix();
            let t3 = trace_of_product(&reward, &decoded).re;
            Ok(QuestionStats {
                pass_t1,
                accept: 0.5 * pass_t1 + 0.5 * t3,
            })
        })
        .collect()
}

/// The operator `A` with `accept_probability = ⟨φ|A|φ⟩` for the discrete
/// strategy `(f, answers)`.
pub fn acceptance_operator(
    game: &CrespGame,
    assignment: &Assignment,
    answers: &[Vec<usize>],
    limits: &Limits,
) -> Result<QOperator> {
    game.slh.check_assignment(assignment)?;
    if answers.len() != game.m() {
        return Err(Error::InvalidStrategy {
            invariant: "answer-count",
            detail: format!("{} answer lists for {} questions", answers.len(), game.m()),
        });
    }
    let shape = HilbertShape::qubits(game.n(), limits)?;
    let mut acc = QOperator::zeros(shape.clone());
    for (i, slots) in answers.iter().enumerate() {
        let test = game.question_test(i, assignment.0[i], slots)?;
        acc = acc.add(&embed_local(&test.accept, &test.support, &shape)?)?;
    }
    Ok(acc.scale(1.0 / game.m() as f64))
}

/// Maximum acceptance probability over all discrete strategies, each paired
/// with the top eigenvector of its acceptance operator.
///
/// Ties go to the lowest strategy index (assignment-major, then answer tuple
/// rank per question), independent of the parallel schedule.
pub fn game_value(game: &CrespGame, limits: &Limits) -> Result<(f64, CrespStrategy)> {
    let count = game.strategy_count();
    limits.check_enum(count)?;
    let shape = HilbertShape::qubits(game.n(), limits)?;
    let tuples = injective_tuples(game.n(), game.k);
    let options = game.slh.l() * tuples.len();
    // lifted[i][c * |tuples| + t] = (1/m) · A_{i,c,t} on the full register
    let scale = 1.0 / game.m() as f64;
    let lifted: Vec<Vec<QOperator>> = (0..game.m())
        .map(|i| {
            (0..options)
                .map(|o| {
                    let test = game.question_test(i, o / tuples.len(), &tuples[o % tuples.len()])?;
                    Ok(embed_local(&test.accept, &test.support, &shape)?.scale(scale))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let best = (0..count as u64)
        .into_par_iter()
        .map(|idx| {
            let choice = Assignment::from_index(idx as u128, game.m(), options);
            let mut a = QOperator::zeros(shape.clone());
            for (i, &o) in choice.0.iter().enumerate() {
                a = a.add(&lifted[i][o])?;
            }
            top_state(&a).map(|(v, s)| (v, idx, s))
        })
        .try_reduce_with(|x, y| {
            Ok(match y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)) {
                std::cmp::Ordering::Greater => y,
                _ => x,
            })
        })
        .expect("at least one strategy")?;

    let choice = Assignment::from_index(best.1 as u128, game.m(), options);
    let strategy = CrespStrategy {
        assignment: Assignment(choice.0.iter().map(|&o| o / tuples.len()).collect()),
        answers: choice.0.iter().map(|&o| tuples[o % tuples.len()].clone()).collect(),
        phi: best.2,
    };
    Ok((best.0, strategy))
}

pub fn decide_cresp(game: &CrespGame, alpha: f64, beta: f64, limits: &Limits, tol: &Tolerances) -> Result<Verdict> {
    if alpha.partial_cmp(&beta) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::InvalidThresholds(format!(
            "need alpha > beta, got alpha={alpha}, beta={beta}"
        )));
    }
    let (value, _) = game_value(game, limits)?;
    Ok(Verdict::from_high(value, alpha, beta, tol.decision))
}

/// Empirical acceptance over repeated plays.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleStats {
    pub plays: u64,
    pub accepted: u64,
    pub frequency: f64,
    pub std_error: f64,
}

/// Plays the game `plays` times, drawing the question, the codespace test
/// outcome, the coin and the energy measurement from their exact outcome
/// probabilities. Debugging aid only.
pub fn sample_play(game: &CrespGame, strategy: &CrespStrategy, plays: u64, seed: u64) -> Result<SampleStats> {
    let stats = outcome_stats(game, strategy, AcceptMode::Structured, &Limits::default())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut accepted = 0u64;
    for _ in 0..plays {
        let q = &stats.questions[rng.random_range(0..game.m())];
        if rng.random::<f64>() >= q.pass_t1 {
            continue;
        }
        if rng.random::<bool>() {
            accepted += 1;
            continue;
        }
        // Pr[T3 | T1] = (2·accept − pass) / pass
        let t3 = if q.pass_t1 > 0.0 {
            ((2.0 * q.accept - q.pass_t1) / q.pass_t1).clamp(0.0, 1.0)
        } else {
            0.0
        };
        if rng.random::<f64>() < t3 {
            accepted += 1;
        }
    }
    let frequency = if plays > 0 { accepted as f64 / plays as f64 } else { 0.0 };
    let std_error = if plays > 0 {
        (frequency * (1.0 - frequency) / plays as f64).sqrt()
    } else {
        0.0
    };
    Ok(SampleStats {
        plays,
        accepted,
        frequency,
        std_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{gates, random};

    fn limits() -> Limits {
        Limits::default()
    }

    fn proj1(n: usize, q: usize) -> LocalTerm {
        LocalTerm::new(n, vec![q], gates::ket_bra(1)).unwrap()
    }

    fn basis(n: usize, idx: usize) -> QState {
        QState::basis(HilbertShape::qubits(n, &limits()).unwrap(), idx).unwrap()
    }

    #[test]
    fn tuples_and_ranks() {
        let t = injective_tuples(3, 2);
        assert_eq!(t.len(), 6);
        assert_eq!(t[0], vec![0, 1]);
        assert_eq!(t[5], vec![2, 1]);
        for (r, tup) in t.iter().enumerate() {
            assert_eq!(tuple_rank(3, tup).unwrap(), r);
            assert_eq!(&tuple_unrank(3, 2, r).unwrap(), tup);
        }
        assert_eq!(injective_tuples(2, 3).len(), 0);
        assert_eq!(injective_tuples(3, 0), vec![Vec::<usize>::new()]);
        assert!(tuple_rank(3, &[1, 1]).is_err());
        assert!(tuple_unrank(3, 2, 6).is_err());
    }

    #[test]
    fn all_identity_terms_accept_with_half() {
        let id = LocalTerm::identity(3, vec![0]).unwrap();
        let slh = SlhInstance::new(3, 1, vec![vec![id]], 0.1, 0.5).unwrap();
        let game = CrespGame::new(slh).unwrap();
        let s = CrespStrategy::honest(&game, Assignment(vec![0]), basis(3, 5)).unwrap();
        assert!((accept_probability(&game, &s).unwrap() - 0.5).abs() < 1e-15);
        let a = acceptance_operator(&game, &s.assignment, &s.answers, &limits()).unwrap();
        assert!((a.matrix() - CMatrix::identity(8, 8).scale(0.5)).camax() < 1e-15);
    }

    #[test]
    fn cheating_answer_matches_dense_oracle() {
        let slh = SlhInstance::new(3, 1, vec![vec![proj1(3, 0)]], 0.1, 0.5).unwrap();
        let game = CrespGame::new(slh).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let shape = HilbertShape::qubits(3, &limits()).unwrap();
        for _ in 0..5 {
            let phi = random::state(&shape, &mut rng);
            let s = CrespStrategy {
                assignment: Assignment(vec![0]),
                answers: vec![vec![1]],
                phi,
            };
            assert!(!s.is_honest(&game));
            let structured = outcome_stats(&game, &s, AcceptMode::Structured, &limits()).unwrap();
            let dense = outcome_stats(&game, &s, AcceptMode::DenseOracle, &limits()).unwrap();
            assert!((structured.value - dense.value).abs() < 1e-9);
            let t1 = crate::encoding::mixed_answer_pass_probability(game.layout(), 0, 1, 1.0).unwrap();
            assert!((dense.questions[0].pass_t1 - t1).abs() < 1e-10);
        }
    }

    #[test]
    fn invalid_strategies_name_their_invariant() {
        let slh = SlhInstance::new(3, 2, vec![vec![LocalTerm::identity(3, vec![0, 1]).unwrap()]], 0.1, 0.5).unwrap();
        let game = CrespGame::new(slh).unwrap();
        let s = CrespStrategy {
            assignment: Assignment(vec![0]),
            answers: vec![vec![2, 2]],
            phi: basis(3, 0),
        };
        match s.validate(&game) {
            Err(Error::InvalidStrategy { invariant, .. }) => assert_eq!(invariant, "answer-distinct"),
            other => panic!("unexpected {other:?}"),
        }
        let s = CrespStrategy {
            answers: vec![vec![0]],
            ..s
        };
        assert!(matches!(
            s.validate(&game),
            Err(Error::InvalidStrategy {
                invariant: "answer-length",
                ..
            })
        ));
    }

    #[test]
    fn short_support_uses_padding_slots() {
        let slh = SlhInstance::new(3, 2, vec![vec![proj1(3, 2)]], 0.1, 0.5).unwrap();
        let game = CrespGame::new(slh).unwrap();
        assert_eq!(game.honest_answer(0, 0), vec![2, 0]);
        let s = CrespStrategy::honest(&game, Assignment(vec![0]), basis(3, 0)).unwrap();
        assert!((accept_probability(&game, &s).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sampled_play_tracks_exact_value() {
        let slh = SlhInstance::new(2, 1, vec![vec![proj1(2, 0)], vec![proj1(2, 1)]], 0.1, 0.5).unwrap();
        let game = CrespGame::new(slh).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let phi = random::state(&HilbertShape::qubits(2, &limits()).unwrap(), &mut rng);
        let s = CrespStrategy {
            assignment: Assignment(vec![0, 0]),
            answers: vec![vec![0], vec![0]],
            phi,
        };
        let exact = accept_probability(&game, &s).unwrap();
        let sample = sample_play(&game, &s, 20_000, 1).unwrap();
        assert!((sample.frequency - exact).abs() < 4.0 * sample.std_error + 1e-12);
    }

    #[test]
    fn game_requires_questions() {
        let slh = SlhInstance::new(2, 1, vec![], 0.1, 0.5).unwrap();
        assert!(CrespGame::new(slh).is_err());
    }
}
