//! GHZ-like qudit encoding of logical qubits across the quantum provers.
//!
//! Logical qubit `q` (zero-based) is spread over one four-level qudit per
//! prover. The provers holding the GHZ-like part are the 1-bits of `q + 1`,
//! so prover `p` belongs to `Q_q` iff bit `p` of `q + 1` is set. Inside a
//! block the qudits are ordered by prover index, prover 0 most significant.
//!
//! ```text
//! E_q|0⟩ = (|0…0⟩ + |1…1⟩)/√2 on S_q  ⊗  |0…0⟩ elsewhere
//! E_q|1⟩ = (|2…2⟩ + |3…3⟩)/√2 on S_q  ⊗  |0…0⟩ elsewhere
//! ```

use std::f64::consts::FRAC_1_SQRT_2;

use serde::Serialize;

use crate::config::Limits;
use crate::linalg::{
    apply_factor_map, embed_local, CMatrix, CVector, DensityMatrix, HilbertShape, QOperator, QState, C64,
};
use crate::{Error, Result};

/// Local dimension of one prover's share of a logical qubit.
pub const QUDIT_DIM: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EncodingLayout {
    n: usize,
    provers: usize,
    subsets: Vec<Vec<usize>>,
}

impl EncodingLayout {
    /// Canonical bitmask layout for `n ≥ 1` logical qubits on `⌈log₂(n+1)⌉` provers.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInstance(
                "encoding needs at least one logical qubit".into(),
            ));
        }
        let provers = (usize::BITS - n.leading_zeros()) as usize;
        let subsets = (0..n)
            .map(|q| (0..provers).filter(|p| (q + 1) >> p & 1 == 1).collect())
            .collect();
        Ok(EncodingLayout { n, provers, subsets })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn provers(&self) -> usize {
        self.provers
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::IndexOutOfRange {
                index: q,
                bound: self.n,
            });
        }
        Ok(())
    }

    /// Provers holding the GHZ-like part of qubit `q`, ascending.
    pub fn subset(&self, q: usize) -> Result<&[usize]> {
        self.check_qubit(q)?;
        Ok(&self.subsets[q])
    }

    pub fn mask(&self, q: usize) -> usize {
        q + 1
    }

    /// `Q_req ⊂ Q_ans` (proper subset).
    pub fn is_proper_subset(&self, req: usize, ans: usize) -> bool {
        let (a, b) = (self.mask(req), self.mask(ans));
        a != b && a & b == a
    }

    /// `|Q_req ∩ Q_ans|`.
    pub fn overlap(&self, req: usize, ans: usize) -> usize {
        (self.mask(req) & self.mask(ans)).count_ones() as usize
    }

    /// The `P` qudits of one encoded block.
    pub fn block_shape(&self) -> HilbertShape {
        HilbertShape::local(vec![QUDIT_DIM; self.provers]).expect("block fits default cap")
    }

    pub fn isometry(&self, q: usize) -> Result<BlockIsometry> {
        self.check_qubit(q)?;
        let shape = self.block_shape();
        let mut matrix = CMatrix::zeros(shape.dim(), 2);
        for bit in 0..2 {
            for sym in [2 * bit, 2 * bit + 1] {
                let digits: Vec<usize> = (0..self.provers)
                    .map(|p| if self.subsets[q].contains(&p) { sym } else { 0 })
                    .collect();
                matrix[(shape.index_of(&digits), bit)] = C64::new(FRAC_1_SQRT_2, 0.0);
            }
        }
        Ok(BlockIsometry {
            qubit: q,
            ghz_len: self.subsets[q].len(),
            matrix,
        })
    }

    pub fn projector(&self, q: usize) -> Result<CodespaceProjector> {
        self.check_qubit(q)?;
        Ok(CodespaceProjector::new(q, self.subsets[q].len()))
    }

    /// `Π_q` on the `S_q` positions of a block, identity on the others.
    pub fn block_check(&self, q: usize) -> Result<QOperator> {
        let proj = self.projector(q)?;
        embed_local(&proj.operator(), &self.subsets[q], &self.block_shape())
    }
}

/// `E_q : ℂ² → (ℂ⁴)^{⊗P}`, stored as a `4^P × 2` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockIsometry {
    qubit: usize,
    ghz_len: usize,
    matrix: CMatrix,
}

impl BlockIsometry {
    pub fn qubit(&self) -> usize {
        self.qubit
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// The GHZ-like factor of `E_q|bit⟩` on `S_q` alone.
    pub fn ghz_part(&self, bit: usize) -> CVector {
        let shape = HilbertShape::local(vec![QUDIT_DIM; self.ghz_len]).expect("small");
        let mut v = CVector::zeros(shape.dim());
        for sym in [2 * bit, 2 * bit + 1] {
            v[shape.index_of(&vec![sym; self.ghz_len])] = C64::new(FRAC_1_SQRT_2, 0.0);
        }
        v
    }
}

/// Rank-2 projector onto `span{E_q|0⟩, E_q|1⟩}` restricted to `S_q`.
#[derive(Debug, Clone, PartialEq)]
pub struct CodespaceProjector {
    qubit: usize,
    matrix: CMatrix,
}

impl CodespaceProjector {
    fn new(qubit: usize, size: usize) -> Self {
        let shape = HilbertShape::local(vec![QUDIT_DIM; size]).expect("small");
        let d = shape.dim();
        let mut matrix = CMatrix::zeros(d, d);
        let half = C64::new(0.5, 0.0);
        for class in [[0usize, 1], [2, 3]] {
            for &u in &class {
                for &v in &class {
                    let r = shape.index_of(&vec![u; size]);
                    let c = shape.index_of(&vec![v; size]);
                    matrix[(r, c)] += half;
                }
            }
        }
        CodespaceProjector { qubit, matrix }
    }

    pub fn qubit(&self) -> usize {
        self.qubit
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn operator(&self) -> QOperator {
        let size = (self.matrix.nrows() as f64).log(QUDIT_DIM as f64).round() as usize;
        QOperator::new(
            HilbertShape::local(vec![QUDIT_DIM; size]).expect("small"),
            self.matrix.clone(),
        )
        .expect("square")
    }
}

/// Per-qubit factor positions of an encoded state.
pub type FactorMap = Vec<Vec<usize>>;

/// Applies `E_q` to every qubit in `blocks`, leaving the others as qubits.
///
/// Factors stay in qubit order: an encoded qubit contributes `P` qudit factors,
/// an untouched one a single qubit factor. The returned map lists, for each
/// logical qubit, its factor indices in the output shape.
pub fn encode_state(
    layout: &EncodingLayout,
    phi: &QState,
    blocks: &[usize],
    limits: &Limits,
) -> Result<(QState, FactorMap)> {
    let n = layout.n();
    if phi.shape().factors() != vec![2; n].as_slice() {
        return Err(Error::DimensionMismatch {
            expected: 1 << n,
            actual: phi.shape().dim(),
        });
    }
    let mut selected = vec![false; n];
    for &q in blocks {
        layout.check_qubit(q)?;
        if selected[q] {
            return Err(Error::DuplicateIndex(q));
        }
        selected[q] = true;
    }
    let encoded_dim = (0..n).try_fold(1usize, |acc, q| {
        acc.checked_mul(if selected[q] {
            QUDIT_DIM.pow(layout.provers() as u32)
        } else {
            2
        })
    });
    match encoded_dim {
        Some(d) => limits.check_dim(d)?,
        None => {
            return Err(Error::DimensionCap {
                dim: usize::MAX,
                cap: limits.max_dim,
            })
        }
    }

    let mut amps = phi.amplitudes().clone();
    let mut shape = phi.shape().clone();
    for q in (0..n).rev().filter(|&q| selected[q]) {
        let iso = layout.isometry(q)?;
        let (a, s) = apply_factor_map(
            &amps,
            &shape,
            q,
            iso.matrix(),
            &vec![QUDIT_DIM; layout.provers()],
            limits,
        )?;
        amps = a;
        shape = s;
    }
    let mut map = Vec::with_capacity(n);
    let mut next = 0;
    for &sel in &selected {
        let width = if sel { layout.provers() } else { 1 };
        map.push((next..next + width).collect());
        next += width;
    }
    Ok((QState::normalized(shape, amps)?, map))
}

/// Inverts `E_q` on a block: returns `E_q† ρ E_q` and the mass `1 − Tr` lost
/// outside the image of the isometry.
pub fn decode_block(layout: &EncodingLayout, q: usize, rho: &DensityMatrix) -> Result<(DensityMatrix, f64)> {
    let iso = layout.isometry(q)?;
    if rho.shape() != &layout.block_shape() {
        return Err(Error::DimensionMismatch {
            expected: layout.block_shape().dim(),
            actual: rho.shape().dim(),
        });
    }
    let e = iso.matrix();
    let logical = e.adjoint() * rho.matrix() * e;
    let logical = DensityMatrix::subnormalized(HilbertShape::local(vec![2])?, logical)?;
    let fail = (rho.trace() - logical.trace()).clamp(0.0, 1.0);
    Ok((logical, fail))
}

/// Probability that the block of qubit `answered` passes the codespace test of
/// qubit `requested`.
///
/// `sigma_overlap` is `⟨0^s|σ|0^s⟩` for the answered block's state `σ` on the
/// `s = |Q_req ∩ Q_ans|` shared positions (1 when `s = 0`). When
/// `Q_req ⊂ Q_ans` the result is exactly 1/2; otherwise it is
/// `sigma_overlap / 2`, never above 1/2.
pub fn mixed_answer_pass_probability(
    layout: &EncodingLayout,
    requested: usize,
    answered: usize,
    sigma_overlap: f64,
) -> Result<f64> {
    layout.check_qubit(requested)?;
    layout.check_qubit(answered)?;
    if requested == answered {
        return Err(Error::InvalidInstance(
            "mixed answer needs distinct requested and answered qubits".into(),
        ));
    }
    if !(-1e-12..=1.0 + 1e-12).contains(&sigma_overlap) {
        return Err(Error::InvalidInstance(format!(
            "sigma overlap {sigma_overlap} outside [0, 1]"
        )));
    }
    if layout.is_proper_subset(requested, answered) {
        return Ok(0.5);
    }
    Ok(0.5 * sigma_overlap.clamp(0.0, 1.0))
}

/// `⟨0^s|σ|0^s⟩` for the answered block holding the logical basis state `bit`.
pub fn basis_sigma_overlap(layout: &EncodingLayout, requested: usize, answered: usize, bit: usize) -> f64 {
    match (layout.overlap(requested, answered), bit) {
        (0, _) => 1.0,
        (_, 0) => 0.5,
        _ => 0.0,
    }
}

/// Effect of answering block `answered` into a slot that should hold `requested`,
/// expressed on the answered logical qubit.
///
/// `pass = E_a† (Π_r ⊗ I) E_a` is the codespace-test effect and
/// `transfer = E_r† E_a` the decoding map applied to the answered qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotChannel {
    pub pass: CMatrix,
    pub transfer: CMatrix,
}

impl SlotChannel {
    /// Closed form from the block scalars of the mixed-answer analysis.
    pub fn closed_form(layout: &EncodingLayout, requested: usize, answered: usize) -> Result<Self> {
        layout.check_qubit(requested)?;
        layout.check_qubit(answered)?;
        if requested == answered {
            return Ok(SlotChannel {
                pass: CMatrix::identity(2, 2),
                transfer: CMatrix::identity(2, 2),
            });
        }
        let mut pass = CMatrix::zeros(2, 2);
        for bit in 0..2 {
            let ov = basis_sigma_overlap(layout, requested, answered, bit);
            pass[(bit, bit)] = C64::new(mixed_answer_pass_probability(layout, requested, answered, ov)?, 0.0);
        }
        // ⟨E_r 0|E_a 0⟩ = 1/2 (only |0…0⟩ is shared), every other overlap vanishes
        let mut transfer = CMatrix::zeros(2, 2);
        transfer[(0, 0)] = C64::new(0.5, 0.0);
        Ok(SlotChannel { pass, transfer })
    }

    /// Same quantities by dense products of the block isometries.
    pub fn from_blocks(layout: &EncodingLayout, requested: usize, answered: usize) -> Result<Self> {
        let ea = layout.isometry(answered)?;
        let er = layout.isometry(requested)?;
        let check = layout.block_check(requested)?;
        Ok(SlotChannel {
            pass: ea.matrix().adjoint() * check.matrix() * ea.matrix(),
            transfer: er.matrix().adjoint() * ea.matrix(),
        })
    }
}
