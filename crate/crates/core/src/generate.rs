//! Seeded SLH instance generators.
//!
//! * `SlhRandom`: random effects on random supports.
//! * `SlhYes`: plants a product state and an assignment whose energy is at
//!   most `a·m/2`.
//! * `SlhNo`: every term has spectrum in `[b, 1]`, so every assignment has
//!   energy at least `b·m`.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{Limits, Tolerances};
use crate::hamiltonian::{LocalTerm, Verdict};
use crate::linalg::{random, reduced_state, CMatrix, HilbertShape, QState};
use crate::slh::{Assignment, SlhInstance};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    SlhRandom,
    SlhYes,
    SlhNo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GenParams {
    pub n: usize,
    pub m: usize,
    pub l: usize,
    pub k: usize,
    pub a: f64,
    pub b: f64,
    pub seed: u64,
}

/// A planted witness: assignment, state and its energy.
#[derive(Debug, Clone)]
pub struct Planted {
    pub assignment: Assignment,
    pub state: QState,
    pub energy: f64,
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub instance: SlhInstance,
    pub planted: Option<Planted>,
    /// Label certified by construction, if any.
    pub label: Option<Verdict>,
}

fn check_params(p: &GenParams, limits: &Limits) -> Result<()> {
    if p.n == 0 || p.k == 0 || p.l == 0 {
        return Err(Error::InvalidInstance("n, k and l must all be at least 1".into()));
    }
    if !(0.0 <= p.a && p.a < p.b && p.b <= 1.0) {
        return Err(Error::InvalidThresholds(format!(
            "need 0 ≤ a < b ≤ 1, got a={}, b={}",
            p.a, p.b
        )));
    }
    HilbertShape::qubits(p.n, limits)?;
    Ok(())
}

fn random_support<R: Rng>(n: usize, k: usize, rng: &mut R) -> Vec<usize> {
    let size = rng.random_range(1..=k.min(n));
    let mut s = sample(rng, n, size).into_vec();
    s.sort_unstable();
    s
}

fn random_term<R: Rng>(n: usize, k: usize, lo: f64, rng: &mut R) -> Result<LocalTerm> {
    let support = random_support(n, k, rng);
    let d = 1usize << support.len();
    LocalTerm::new(n, support, random::effect(d, lo, 1.0, rng))
}

pub fn generate(kind: GenKind, params: &GenParams, limits: &Limits) -> Result<Generated> {
    check_params(params, limits)?;
    let p = *params;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    match kind {
        GenKind::SlhRandom => {
            let sets = (0..p.m)
                .map(|_| (0..p.l).map(|_| random_term(p.n, p.k, 0.0, &mut rng)).collect())
                .collect::<Result<Vec<Vec<_>>>>()?;
            Ok(Generated {
                instance: SlhInstance::with_set_size(p.n, p.k, p.l, sets, p.a, p.b)?,
                planted: None,
                label: None,
            })
        }
        GenKind::SlhNo => {
            let sets = (0..p.m)
                .map(|_| (0..p.l).map(|_| random_term(p.n, p.k, p.b, &mut rng)).collect())
                .collect::<Result<Vec<Vec<_>>>>()?;
            Ok(Generated {
                instance: SlhInstance::with_set_size(p.n, p.k, p.l, sets, p.a, p.b)?,
                planted: None,
                label: Some(Verdict::No),
            })
        }
        GenKind::SlhYes => plant_yes(&p, &mut rng, limits),
    }
}

fn plant_yes(p: &GenParams, rng: &mut ChaCha8Rng, limits: &Limits) -> Result<Generated> {
    let qubit = HilbertShape::local(vec![2])?;
    let mut amps = CMatrix::identity(1, 1);
    for _ in 0..p.n {
        let v = random::state(&qubit, rng);
        amps = amps.kronecker(v.amplitudes());
    }
    let state = QState::normalized(HilbertShape::qubits(p.n, limits)?, amps.column(0).into())?;
    let f: Vec<usize> = (0..p.m).map(|_| rng.random_range(0..p.l)).collect();

    let mut sets = Vec::with_capacity(p.m);
    for &fi in &f {
        let mut set = Vec::with_capacity(p.l);
        for j in 0..p.l {
            if j != fi {
                set.push(random_term(p.n, p.k, 0.0, rng)?);
                continue;
            }
            // Low-energy term: eigenvalue a·u on the planted local state.
            let support = random_support(p.n, p.k, rng);
            let d = 1usize << support.len();
            let local = reduced_state(&state, &support)?;
            let v = local_pure_vector(local.matrix());
            let proj = &v * v.adjoint();
            let rest = CMatrix::identity(d, d) - &proj;
            let low = p.a * rng.random_range(0.0..=0.5);
            let w = random::effect(d, 0.0, 1.0, rng);
            let op = proj.scale(low) + &rest * w * &rest;
            set.push(LocalTerm::new(p.n, support, op)?);
        }
        sets.push(set);
    }
    let instance = SlhInstance::with_set_size(p.n, p.k, p.l, sets, p.a, p.b)?;
    let assignment = Assignment(f);
    let energy = instance.select(&assignment)?.energy(&state)?;
    let label = instance.verdict_for(energy, &Tolerances::DEFAULT);
    debug_assert_eq!(label, Verdict::Yes);
    Ok(Generated {
        instance,
        planted: Some(Planted {
            assignment,
            state,
            energy,
        }),
        label: Some(Verdict::Yes),
    })
}

/// Column vector of a rank-one density matrix (largest column, normalized).
fn local_pure_vector(rho: &CMatrix) -> CMatrix {
    let j = (0..rho.ncols())
        .max_by(|&x, &y| rho[(x, x)].re.total_cmp(&rho[(y, y)].re))
        .expect("nonempty");
    let col = rho.column(j).into_owned();
    let norm = col.norm();
    CMatrix::from_column_slice(rho.nrows(), 1, (col / crate::linalg::C64::new(norm, 0.0)).as_slice())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(seed: u64) -> GenParams {
        GenParams {
            n: 3,
            m: 2,
            l: 2,
            k: 2,
            a: 0.1,
            b: 0.5,
            seed,
        }
    }

    #[test]
    fn planted_yes_instances_decide_yes() {
        for seed in 0..5 {
            let g = generate(GenKind::SlhYes, &params(seed), &Limits::default()).unwrap();
            let planted = g.planted.unwrap();
            assert!(planted.energy <= 0.1 * 2.0 / 2.0 + 1e-12);
            assert_eq!(
                g.instance.decide(&Limits::default(), &Tolerances::DEFAULT).unwrap(),
                Verdict::Yes
            );
        }
    }

    #[test]
    fn no_instances_decide_no() {
        for seed in 0..5 {
            let g = generate(GenKind::SlhNo, &params(seed), &Limits::default()).unwrap();
            assert_eq!(
                g.instance.decide(&Limits::default(), &Tolerances::DEFAULT).unwrap(),
                Verdict::No
            );
        }
    }

    #[test]
    fn same_seed_same_instance() {
        for kind in [GenKind::SlhRandom, GenKind::SlhYes, GenKind::SlhNo] {
            let x = generate(kind, &params(7), &Limits::default()).unwrap();
            let y = generate(kind, &params(7), &Limits::default()).unwrap();
            assert_eq!(x.instance, y.instance);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut p = params(0);
        p.a = 0.6;
        assert!(generate(GenKind::SlhRandom, &p, &Limits::default()).is_err());
        let mut p = params(0);
        p.l = 0;
        assert!(generate(GenKind::SlhRandom, &p, &Limits::default()).is_err());
    }
}
