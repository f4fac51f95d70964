//! JSON interchange. Complex numbers are `[re, im]` pairs; matrices are flat
//! row-major lists of pairs; states are lists of amplitudes.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::{Limits, Tolerances};
use crate::encoding::QUDIT_DIM;
use crate::game::{CrespGame, CrespStrategy};
use crate::hamiltonian::LocalTerm;
use crate::linalg::{CMatrix, CVector, HilbertShape, QState, C64};
use crate::reductions::{AlphabetCodec, PointerProof, PointerQpcpVerifier};
use crate::slh::{Assignment, SlhInstance};
use crate::{Error, Result};

pub type Pair = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub support: Vec<usize>,
    pub matrix: Vec<Pair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlhDoc {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub l: usize,
    pub a: f64,
    pub b: f64,
    pub sets: Vec<Vec<TermDoc>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutDoc {
    pub provers: usize,
    pub qudit_dim: usize,
    pub answered_blocks: usize,
    pub subsets: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameDoc {
    pub layout: LayoutDoc,
    pub instance: SlhDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyDoc {
    pub f: Vec<usize>,
    pub answers: Vec<Vec<usize>>,
    pub phi: Vec<Pair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckDoc {
    pub i: usize,
    pub j: usize,
    pub support: Vec<usize>,
    pub matrix: Vec<Pair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphabetDoc {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub encoding: String,
}

const ALPHABET_ENCODING: &str = "y = rank(s) * l + c; s ranked lexicographically among injective k-tuples over 0..n";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifierDoc {
    pub m: usize,
    pub l: usize,
    pub p: usize,
    pub q: usize,
    pub checks: Vec<CheckDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphabet: Option<AlphabetDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProofDoc {
    pub y: Vec<usize>,
    pub psi: Vec<Pair>,
}

fn pairs(values: impl Iterator<Item = C64>) -> Vec<Pair> {
    values.map(|z| [z.re, z.im]).collect()
}

pub fn state_pairs(state: &QState) -> Vec<Pair> {
    pairs(state.amplitudes().iter().copied())
}

fn matrix_pairs(m: &CMatrix) -> Vec<Pair> {
    // nalgebra stores column-major; emit row-major
    pairs(m.transpose().iter().copied())
}

fn matrix_from_pairs(path: &str, dim: usize, entries: &[Pair]) -> Result<CMatrix> {
    if entries.len() != dim * dim {
        return Err(Error::input(
            path,
            format!("expected {} entries ({dim}×{dim}), got {}", dim * dim, entries.len()),
        ));
    }
    if let Some(t) = entries.iter().position(|p| !p[0].is_finite() || !p[1].is_finite()) {
        return Err(Error::input(format!("{path}[{t}]"), "non-finite entry"));
    }
    Ok(CMatrix::from_row_iterator(
        dim,
        dim,
        entries.iter().map(|p| C64::new(p[0], p[1])),
    ))
}

fn state_from_pairs(path: &str, n: usize, entries: &[Pair], limits: &Limits) -> Result<QState> {
    let shape = HilbertShape::qubits(n, limits)?;
    if entries.len() != shape.dim() {
        return Err(Error::input(
            path,
            format!("expected {} amplitudes, got {}", shape.dim(), entries.len()),
        ));
    }
    let amps = CVector::from_iterator(shape.dim(), entries.iter().map(|p| C64::new(p[0], p[1])));
    QState::new(shape, amps).map_err(|e| Error::input(path, e))
}

fn term_from_parts(
    path: &str,
    n: usize,
    k: usize,
    support: &[usize],
    matrix: &[Pair],
    tol: &Tolerances,
) -> Result<LocalTerm> {
    if support.len() > k {
        return Err(Error::input(
            format!("{path}.support"),
            format!("{} qubits exceeds locality k={k}", support.len()),
        ));
    }
    let dim = 1usize << support.len();
    let m = matrix_from_pairs(&format!("{path}.matrix"), dim, matrix)?;
    LocalTerm::with_tolerances(n, support.to_vec(), m, tol).map_err(|e| Error::input(path, e))
}

fn term_doc(t: &LocalTerm) -> TermDoc {
    TermDoc {
        support: t.support().to_vec(),
        matrix: matrix_pairs(t.op().matrix()),
    }
}

pub fn slh_to_doc(instance: &SlhInstance) -> SlhDoc {
    let (a, b) = instance.thresholds();
    SlhDoc {
        n: instance.n(),
        k: instance.k(),
        m: instance.m(),
        l: instance.l(),
        a,
        b,
        sets: instance
            .sets()
            .iter()
            .map(|set| set.iter().map(term_doc).collect())
            .collect(),
    }
}

pub fn slh_from_doc(doc: &SlhDoc, tol: &Tolerances) -> Result<SlhInstance> {
    if doc.sets.len() != doc.m {
        return Err(Error::input(
            "sets",
            format!("{} sets, header says m={}", doc.sets.len(), doc.m),
        ));
    }
    if doc.a.partial_cmp(&doc.b) != Some(std::cmp::Ordering::Less) {
        return Err(Error::input("a", format!("need a < b, got a={}, b={}", doc.a, doc.b)));
    }
    let mut sets = Vec::with_capacity(doc.m);
    for (i, set) in doc.sets.iter().enumerate() {
        if set.len() != doc.l {
            return Err(Error::input(
                format!("sets[{i}]"),
                format!("{} terms, header says l={}", set.len(), doc.l),
            ));
        }
        let terms = set
            .iter()
            .enumerate()
            .map(|(j, t)| term_from_parts(&format!("sets[{i}][{j}]"), doc.n, doc.k, &t.support, &t.matrix, tol))
            .collect::<Result<Vec<_>>>()?;
        sets.push(terms);
    }
    SlhInstance::with_set_size(doc.n, doc.k, doc.l, sets, doc.a, doc.b)
}

pub fn game_to_doc(game: &CrespGame) -> GameDoc {
    let layout = game.layout();
    GameDoc {
        layout: LayoutDoc {
            provers: layout.provers(),
            qudit_dim: QUDIT_DIM,
            answered_blocks: game.k(),
            subsets: layout.subsets().to_vec(),
        },
        instance: slh_to_doc(game.slh()),
    }
}

/// Loads a game; the layout header must match the one derived from `n`.
pub fn game_from_doc(doc: &GameDoc, tol: &Tolerances) -> Result<CrespGame> {
    let game = CrespGame::new(slh_from_doc(&doc.instance, tol)?)?;
    let expected = game_to_doc(&game).layout;
    if doc.layout != expected {
        return Err(Error::input(
            "layout",
            format!(
                "header does not match the layout derived from n={} (expected {} provers, {} answered blocks)",
                game.n(),
                expected.provers,
                expected.answered_blocks
            ),
        ));
    }
    Ok(game)
}

pub fn strategy_to_doc(s: &CrespStrategy) -> StrategyDoc {
    StrategyDoc {
        f: s.assignment.0.clone(),
        answers: s.answers.clone(),
        phi: state_pairs(&s.phi),
    }
}

pub fn strategy_from_doc(doc: &StrategyDoc, game: &CrespGame, limits: &Limits) -> Result<CrespStrategy> {
    let phi = state_from_pairs("phi", game.n(), &doc.phi, limits)?;
    let s = CrespStrategy {
        assignment: Assignment(doc.f.clone()),
        answers: doc.answers.clone(),
        phi,
    };
    s.validate(game)?;
    Ok(s)
}

pub fn verifier_to_doc(v: &PointerQpcpVerifier, codec: Option<&AlphabetCodec>) -> VerifierDoc {
    let mut checks = Vec::with_capacity(v.m() * v.l());
    for (i, row) in v.checks().iter().enumerate() {
        for (j, r) in row.iter().enumerate() {
            checks.push(CheckDoc {
                i,
                j,
                support: r.support().to_vec(),
                matrix: matrix_pairs(r.op().matrix()),
            });
        }
    }
    VerifierDoc {
        m: v.m(),
        l: v.l(),
        p: v.p(),
        q: v.q(),
        checks,
        alphabet: codec.map(|c| AlphabetDoc {
            n: c.n,
            k: c.k,
            l: c.l,
            encoding: ALPHABET_ENCODING.into(),
        }),
    }
}

pub fn verifier_from_doc(doc: &VerifierDoc, tol: &Tolerances) -> Result<(PointerQpcpVerifier, Option<AlphabetCodec>)> {
    let mut slots: Vec<Vec<Option<LocalTerm>>> = vec![vec![None; doc.l]; doc.m];
    for (t, c) in doc.checks.iter().enumerate() {
        let path = format!("checks[{t}]");
        if c.i >= doc.m || c.j >= doc.l {
            return Err(Error::input(
                path,
                format!("(i={}, j={}) outside m={}, l={}", c.i, c.j, doc.m, doc.l),
            ));
        }
        if slots[c.i][c.j].is_some() {
            return Err(Error::input(path, format!("duplicate check (i={}, j={})", c.i, c.j)));
        }
        slots[c.i][c.j] = Some(term_from_parts(&path, doc.p, doc.q, &c.support, &c.matrix, tol)?);
    }
    let mut checks = Vec::with_capacity(doc.m);
    for (i, row) in slots.into_iter().enumerate() {
        let mut out = Vec::with_capacity(doc.l);
        for (j, r) in row.into_iter().enumerate() {
            out.push(r.ok_or_else(|| Error::input("checks", format!("missing check (i={i}, j={j})")))?);
        }
        checks.push(out);
    }
    let codec = match &doc.alphabet {
        None => None,
        Some(a) => {
            let codec = AlphabetCodec { n: a.n, k: a.k, l: a.l };
            if codec.size() != doc.l as u128 {
                return Err(Error::input(
                    "alphabet",
                    format!("describes {} symbols, verifier has l={}", codec.size(), doc.l),
                ));
            }
            Some(codec)
        }
    };
    Ok((PointerQpcpVerifier::new(doc.m, doc.l, doc.p, doc.q, checks)?, codec))
}

pub fn proof_to_doc(p: &PointerProof) -> ProofDoc {
    ProofDoc {
        y: p.y.clone(),
        psi: state_pairs(&p.psi),
    }
}

pub fn proof_from_doc(doc: &ProofDoc, v: &PointerQpcpVerifier, limits: &Limits) -> Result<PointerProof> {
    let psi = state_from_pairs("psi", v.p(), &doc.psi, limits)?;
    let proof = PointerProof { y: doc.y.clone(), psi };
    v.check_proof(&proof).map_err(|e| Error::input("y", e))?;
    Ok(proof)
}

/// Parses JSON text; syntax and shape errors carry `origin:line:column`.
pub fn parse_json<T: DeserializeOwned>(origin: &str, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::input(format!("{origin}:{}:{}", e.line(), e.column()), e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    parse_json(&path.display().to_string(), &text)
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}
