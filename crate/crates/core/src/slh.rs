//! The Set Local Hamiltonian problem: `m` sets of `l` candidate terms, one
//! representative chosen per set by an assignment `f`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{checked_pow, Limits, Tolerances};
use crate::hamiltonian::{LhInstance, LocalTerm, Verdict};
use crate::linalg::{ground_state, HilbertShape, QOperator, QState};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SlhInstance {
    n: usize,
    k: usize,
    l: usize,
    sets: Vec<Vec<LocalTerm>>,
    a: f64,
    b: f64,
}

/// A choice function `f : [m] → [l]` (zero-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(pub Vec<usize>);

impl Assignment {
    pub fn values(&self) -> &[usize] {
        &self.0
    }

    /// The `index`-th assignment in lexicographic order (`f[0]` most significant).
    pub fn from_index(mut index: u128, m: usize, l: usize) -> Assignment {
        let mut f = vec![0; m];
        for slot in f.iter_mut().rev() {
            *slot = (index % l as u128) as usize;
            index /= l as u128;
        }
        Assignment(f)
    }
}

/// Best assignment found together with its groundstate.
#[derive(Debug, Clone)]
pub struct SlhSolution {
    pub energy: f64,
    pub assignment: Assignment,
    pub state: QState,
}

impl SlhInstance {
    /// Builds an instance whose set size is the longest given set; shorter sets
    /// are padded by repeating their last term.
    pub fn new(n: usize, k: usize, sets: Vec<Vec<LocalTerm>>, a: f64, b: f64) -> Result<Self> {
        let l = sets.iter().map(Vec::len).max().unwrap_or(0);
        Self::with_set_size(n, k, l, sets, a, b)
    }

    pub fn with_set_size(n: usize, k: usize, l: usize, mut sets: Vec<Vec<LocalTerm>>, a: f64, b: f64) -> Result<Self> {
        if a.partial_cmp(&b) != Some(std::cmp::Ordering::Less) {
            return Err(Error::InvalidThresholds(format!("need a < b, got a={a}, b={b}")));
        }
        if !sets.is_empty() && l == 0 {
            return Err(Error::InvalidInstance("set size l must be at least 1".into()));
        }
        for (i, set) in sets.iter_mut().enumerate() {
            if set.is_empty() {
                return Err(Error::InvalidInstance(format!("set {i} is empty")));
            }
            if set.len() > l {
                return Err(Error::InvalidInstance(format!(
                    "set {i} has {} terms, more than l={l}",
                    set.len()
                )));
            }
            for (j, t) in set.iter().enumerate() {
                if t.n() != n {
                    return Err(Error::InvalidInstance(format!(
                        "term ({i},{j}) acts on {} qubits, instance has {n}",
                        t.n()
                    )));
                }
                if t.locality() > k {
                    return Err(Error::InvalidInstance(format!(
                        "term ({i},{j}) has support {} > k={k}",
                        t.locality()
                    )));
                }
            }
            let last = set.last().cloned().expect("non-empty set");
            set.resize(l, last);
        }
        Ok(SlhInstance { n, k, l, sets, a, b })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.sets.len()
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn sets(&self) -> &[Vec<LocalTerm>] {
        &self.sets
    }

    pub fn term(&self, i: usize, j: usize) -> &LocalTerm {
        &self.sets[i][j]
    }

    pub fn thresholds(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// Number of assignments `l^m`.
    pub fn assignment_count(&self) -> u128 {
        checked_pow(self.l as u128, self.m())
    }

    pub fn check_assignment(&self, f: &Assignment) -> Result<()> {
        if f.0.len() != self.m() {
            return Err(Error::DimensionMismatch {
                expected: self.m(),
                actual: f.0.len(),
            });
        }
        for &j in &f.0 {
            if j >= self.l {
                return Err(Error::IndexOutOfRange {
                    index: j,
                    bound: self.l,
                });
            }
        }
        Ok(())
    }

    /// The Local Hamiltonian instance `(H_{1,f(1)}, …, H_{m,f(m)})`.
    pub fn select(&self, f: &Assignment) -> Result<LhInstance> {
        self.check_assignment(f)?;
        let terms = f.0.iter().enumerate().map(|(i, &j)| self.sets[i][j].clone()).collect();
        LhInstance::new(self.n, self.k, terms, self.a, self.b)
    }

    fn lifted_terms(&self, limits: &Limits) -> Result<Vec<Vec<QOperator>>> {
        self.sets
            .iter()
            .map(|set| set.iter().map(|t| t.lift(limits)).collect())
            .collect()
    }

    fn evaluate(&self, lifted: &[Vec<QOperator>], f: &[usize], limits: &Limits) -> Result<(f64, QState)> {
        let shape = HilbertShape::qubits(self.n, limits)?;
        let mut h = QOperator::zeros(shape);
        for (i, &j) in f.iter().enumerate() {
            h = h.add(&lifted[i][j])?;
        }
        ground_state(&h)
    }

    /// Minimum groundstate energy over all `l^m` assignments.
    ///
    /// Ties are resolved to the lexicographically smallest assignment, so the
    /// result does not depend on the parallel schedule.
    pub fn solve_exact(&self, limits: &Limits) -> Result<SlhSolution> {
        let count = self.assignment_count();
        limits.check_enum(count)?;
        HilbertShape::qubits(self.n, limits)?;
        let lifted = self.lifted_terms(limits)?;
        let best = (0..count as u64)
            .into_par_iter()
            .map(|idx| {
                let f = Assignment::from_index(idx as u128, self.m(), self.l.max(1));
                self.evaluate(&lifted, &f.0, limits).map(|(e, state)| (e, idx, state))
            })
            .try_reduce_with(|x, y| {
                Ok(match x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)) {
                    std::cmp::Ordering::Greater => y,
                    _ => x,
                })
            })
            .expect("at least one assignment")?;
        Ok(SlhSolution {
            energy: best.0,
            assignment: Assignment::from_index(best.1 as u128, self.m(), self.l.max(1)),
            state: best.2,
        })
    }

    /// Single-site local search over assignments with random restarts.
    ///
    /// Each unit of `budget` re-optimizes one coordinate of `f` by trying every
    /// value in its set (lowest energy wins, lowest index on ties). A full
    /// sweep without strict improvement triggers a restart from a fresh random
    /// assignment. `budget = 0` evaluates the seeded initial assignment only.
    pub fn solve_heuristic(&self, budget: usize, seed: u64, limits: &Limits) -> Result<SlhSolution> {
        let lifted = self.lifted_terms(limits)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = self.m();
        let random_f = |rng: &mut ChaCha8Rng| -> Vec<usize> { (0..m).map(|_| rng.random_range(0..self.l)).collect() };

        let mut f = random_f(&mut rng);
        let (mut energy, mut state) = self.evaluate(&lifted, &f, limits)?;
        let mut best = SlhSolution {
            energy,
            assignment: Assignment(f.clone()),
            state: state.clone(),
        };
        if m == 0 {
            return Ok(best);
        }

        let mut coord = 0;
        let mut stale = 0;
        for _ in 0..budget {
            let mut choice = (energy, f[coord], state.clone());
            for j in 0..self.l {
                if j == f[coord] {
                    continue;
                }
                let mut trial = f.clone();
                trial[coord] = j;
                let (e, s) = self.evaluate(&lifted, &trial, limits)?;
                if e < choice.0 || (e == choice.0 && j < choice.1) {
                    choice = (e, j, s);
                }
            }
            if choice.0 < energy {
                stale = 0;
            } else {
                stale += 1;
            }
            f[coord] = choice.1;
            energy = choice.0;
            state = choice.2;
            if energy < best.energy {
                best = SlhSolution {
                    energy,
                    assignment: Assignment(f.clone()),
                    state: state.clone(),
                };
            }
            coord = (coord + 1) % m;
            if stale >= m {
                f = random_f(&mut rng);
                let (e, s) = self.evaluate(&lifted, &f, limits)?;
                energy = e;
                state = s;
                if energy < best.energy {
                    best = SlhSolution {
                        energy,
                        assignment: Assignment(f.clone()),
                        state: state.clone(),
                    };
                }
                stale = 0;
                coord = 0;
            }
        }
        Ok(best)
    }

    pub fn decide(&self, limits: &Limits, tol: &Tolerances) -> Result<Verdict> {
        let sol = self.solve_exact(limits)?;
        Ok(self.verdict_for(sol.energy, tol))
    }

    /// Classifies a minimum energy against `a·m` / `b·m`.
    pub fn verdict_for(&self, energy: f64, tol: &Tolerances) -> Verdict {
        let m = self.m() as f64;
        Verdict::from_low(energy, self.a * m, self.b * m, tol.decision)
    }
}
