//! Dense complex linear algebra over small tensor-product Hilbert spaces.
//!
//! Factor ordering is big-endian: factor 0 is the most significant digit of a
//! basis index. Every state and operator carries its [`HilbertShape`] so local
//! operators can be placed on the right tensor factors.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::config::{Limits, Tolerances};
use crate::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Local dimensions of a tensor-product space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HilbertShape {
    factors: Vec<usize>,
    dim: usize,
}

impl HilbertShape {
    pub fn new(factors: Vec<usize>, limits: &Limits) -> Result<Self> {
        let mut dim: usize = 1;
        for &f in &factors {
            if f < 2 {
                return Err(Error::InvalidFactor(f));
            }
            dim = dim.checked_mul(f).ok_or(Error::DimensionCap {
                dim: usize::MAX,
                cap: limits.max_dim,
            })?;
        }
        limits.check_dim(dim)?;
        Ok(HilbertShape { factors, dim })
    }

    pub fn qubits(n: usize, limits: &Limits) -> Result<Self> {
        Self::new(vec![2; n], limits)
    }

    /// Shape of a handful of local factors; only the default cap applies.
    pub fn local(factors: Vec<usize>) -> Result<Self> {
        Self::new(factors, &Limits::default())
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Place value of each factor's digit in a flat basis index.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.factors.len()];
        for i in (0..self.factors.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.factors[i + 1];
        }
        strides
    }

    /// Digits of `index`, most significant first.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for (slot, &f) in out.iter_mut().zip(&self.factors).rev() {
            *slot = index % f;
            index /= f;
        }
        out
    }

    pub fn index_of(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.factors).fold(0, |acc, (&d, &f)| acc * f + d)
    }

    fn check_indices(&self, indices: &[usize]) -> Result<()> {
        let mut seen = vec![false; self.factors.len()];
        for &i in indices {
            if i >= self.factors.len() {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    bound: self.factors.len(),
                });
            }
            if seen[i] {
                return Err(Error::DuplicateIndex(i));
            }
            seen[i] = true;
        }
        Ok(())
    }

    /// Shape of the listed factors, in the listed order.
    pub fn select(&self, indices: &[usize]) -> Result<HilbertShape> {
        self.check_indices(indices)?;
        let factors: Vec<usize> = indices.iter().map(|&i| self.factors[i]).collect();
        let dim = factors.iter().product();
        Ok(HilbertShape { factors, dim })
    }

    /// Flat-index offset contributed by each basis state of the listed factors.
    fn offsets(&self, indices: &[usize]) -> Vec<usize> {
        let strides = self.strides();
        let sub: Vec<usize> = indices.iter().map(|&i| self.factors[i]).collect();
        let count: usize = sub.iter().product();
        let mut out = Vec::with_capacity(count);
        let mut digits = vec![0usize; indices.len()];
        for _ in 0..count {
            out.push(digits.iter().zip(indices).map(|(&d, &i)| d * strides[i]).sum());
            for t in (0..digits.len()).rev() {
                digits[t] += 1;
                if digits[t] < sub[t] {
                    break;
                }
                digits[t] = 0;
            }
        }
        out
    }

    fn complement(&self, indices: &[usize]) -> Vec<usize> {
        (0..self.factors.len()).filter(|i| !indices.contains(i)).collect()
    }
}

/// A unit vector.
#[derive(Debug, Clone, PartialEq)]
pub struct QState {
    shape: HilbertShape,
    amps: CVector,
}

impl QState {
    pub fn new(shape: HilbertShape, amps: CVector) -> Result<Self> {
        if amps.len() != shape.dim() {
            return Err(Error::DimensionMismatch {
                expected: shape.dim(),
                actual: amps.len(),
            });
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > Tolerances::DEFAULT.norm {
            return Err(Error::NotNormalized(norm));
        }
        Ok(QState { shape, amps })
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(shape: HilbertShape, amps: CVector) -> Result<Self> {
        let norm = amps.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        Self::new(shape, amps.unscale(norm))
    }

    pub fn basis(shape: HilbertShape, index: usize) -> Result<Self> {
        if index >= shape.dim() {
            return Err(Error::IndexOutOfRange {
                index,
                bound: shape.dim(),
            });
        }
        let mut amps = CVector::zeros(shape.dim());
        amps[index] = ONE;
        Ok(QState { shape, amps })
    }

    pub fn shape(&self) -> &HilbertShape {
        &self.shape
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn inner(&self, other: &QState) -> C64 {
        self.amps.dotc(&other.amps)
    }

    /// `⟨ψ|M|ψ⟩` (real part; `M` is expected Hermitian).
    pub fn expectation(&self, op: &QOperator) -> Result<f64> {
        if op.dim() != self.amps.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amps.len(),
                actual: op.dim(),
            });
        }
        Ok(self.amps.dotc(&(&op.mat * &self.amps)).re)
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            shape: self.shape.clone(),
            mat: &self.amps * self.amps.adjoint(),
        }
    }
}

/// A square operator on a shaped space. Hermiticity and spectral bounds are
/// checked on demand with the `ensure_*` methods.
#[derive(Debug, Clone, PartialEq)]
pub struct QOperator {
    shape: HilbertShape,
    mat: CMatrix,
}

impl QOperator {
    pub fn new(shape: HilbertShape, mat: CMatrix) -> Result<Self> {
        if mat.nrows() != shape.dim() || mat.ncols() != shape.dim() {
            return Err(Error::DimensionMismatch {
                expected: shape.dim(),
                actual: if mat.nrows() != shape.dim() {
                    mat.nrows()
                } else {
                    mat.ncols()
                },
            });
        }
        Ok(QOperator { shape, mat })
    }

    pub fn identity(shape: HilbertShape) -> Self {
        let d = shape.dim();
        QOperator {
            shape,
            mat: CMatrix::identity(d, d),
        }
    }

    pub fn zeros(shape: HilbertShape) -> Self {
        let d = shape.dim();
        QOperator {
            shape,
            mat: CMatrix::zeros(d, d),
        }
    }

    /// `|v⟩⟨v|`.
    pub fn projector(state: &QState) -> Self {
        QOperator {
            shape: state.shape.clone(),
            mat: &state.amps * state.amps.adjoint(),
        }
    }

    pub fn shape(&self) -> &HilbertShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.shape.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn adjoint(&self) -> Self {
        QOperator {
            shape: self.shape.clone(),
            mat: self.mat.adjoint(),
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        QOperator {
            shape: self.shape.clone(),
            mat: self.mat.scale(factor),
        }
    }

    pub fn add(&self, other: &QOperator) -> Result<Self> {
        if self.shape != other.shape {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(QOperator {
            shape: self.shape.clone(),
            mat: &self.mat + &other.mat,
        })
    }

    pub fn sub(&self, other: &QOperator) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &QOperator) -> Result<Self> {
        if self.shape != other.shape {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(QOperator {
            shape: self.shape.clone(),
            mat: &self.mat * &other.mat,
        })
    }

    /// Tensor product, `self` on the leading factors.
    pub fn kron(&self, other: &QOperator) -> Result<Self> {
        let mut factors = self.shape.factors.clone();
        factors.extend_from_slice(&other.shape.factors);
        let shape = HilbertShape::local(factors)?;
        Ok(QOperator {
            shape,
            mat: self.mat.kronecker(&other.mat),
        })
    }

    pub fn apply(&self, state: &QState) -> Result<CVector> {
        if state.shape != self.shape {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: state.amps.len(),
            });
        }
        Ok(&self.mat * &state.amps)
    }

    /// Largest entrywise deviation from `M = M†`.
    pub fn hermitian_deviation(&self) -> f64 {
        hermitian_deviation(&self.mat)
    }

    pub fn ensure_hermitian(&self, tol: f64) -> Result<()> {
        let dev = self.hermitian_deviation();
        if dev > tol {
            return Err(Error::NotHermitian(dev));
        }
        Ok(())
    }

    /// Checks `0 ≤ M ≤ I` within `tol.spectral`.
    pub fn ensure_effect(&self, tol: &Tolerances) -> Result<()> {
        self.ensure_hermitian(tol.hermitian)?;
        let (min, max) = spectral_range(&self.mat);
        if min < -tol.spectral || max > 1.0 + tol.spectral {
            return Err(Error::NotEffect { min, max });
        }
        Ok(())
    }

    /// Checks `M ≥ 0` within `tol.spectral`.
    pub fn ensure_psd(&self, tol: &Tolerances) -> Result<()> {
        self.ensure_hermitian(tol.hermitian)?;
        let (min, max) = spectral_range(&self.mat);
        if min < -tol.spectral {
            return Err(Error::NotEffect { min, max });
        }
        Ok(())
    }
}

/// A (possibly subnormalized) density operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    shape: HilbertShape,
    mat: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, positivity and unit trace.
    pub fn new(shape: HilbertShape, mat: CMatrix) -> Result<Self> {
        let rho = Self::subnormalized(shape, mat)?;
        let tr = rho.trace();
        if (tr - 1.0).abs() > Tolerances::DEFAULT.trace {
            return Err(Error::InvalidDensity(format!("trace {tr} != 1")));
        }
        Ok(rho)
    }

    /// Validates Hermiticity, positivity and trace in `[0, 1]`.
    pub fn subnormalized(shape: HilbertShape, mat: CMatrix) -> Result<Self> {
        let tol = Tolerances::DEFAULT;
        let op = QOperator::new(shape, mat)?;
        op.ensure_psd(&tol).map_err(|e| Error::InvalidDensity(e.to_string()))?;
        let tr = op.trace().re;
        if tr < -tol.trace || tr > 1.0 + tol.trace {
            return Err(Error::InvalidDensity(format!("trace {tr} outside [0, 1]")));
        }
        Ok(DensityMatrix {
            shape: op.shape,
            mat: op.mat,
        })
    }

    pub fn shape(&self) -> &HilbertShape {
        &self.shape
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// `Tr(Mρ)`.
    pub fn expectation(&self, op: &QOperator) -> Result<f64> {
        if op.dim() != self.mat.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.mat.nrows(),
                actual: op.dim(),
            });
        }
        Ok(trace_of_product(op.matrix(), &self.mat).re)
    }

    pub fn kron(&self, other: &DensityMatrix) -> Result<Self> {
        let mut factors = self.shape.factors.clone();
        factors.extend_from_slice(&other.shape.factors);
        Ok(DensityMatrix {
            shape: HilbertShape::local(factors)?,
            mat: self.mat.kronecker(&other.mat),
        })
    }
}

/// `Tr(AB)` without forming the product.
pub fn trace_of_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let mut acc = ZERO;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

pub(crate) fn hermitian_deviation(mat: &CMatrix) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..mat.nrows() {
        for j in i..mat.ncols() {
            dev = dev.max((mat[(i, j)] - mat[(j, i)].conj()).norm());
        }
    }
    dev
}

fn hermitian_part(mat: &CMatrix) -> CMatrix {
    (mat + mat.adjoint()).scale(0.5)
}

/// Eigensystem of the Hermitian part, computed on `H + s·I` and shifted back.
///
/// nalgebra's QR iteration can return `-inf`/`NaN` on exactly low-rank
/// matrices with a zero diagonal (the deflation test underflows). Moving the
/// spectrum away from zero avoids that at a cost of about `eps·s`.
fn shifted_eigen(mat: &CMatrix) -> nalgebra::SymmetricEigen<Complex64, nalgebra::Dyn> {
    let shift = max_abs(mat);
    let n = mat.nrows();
    let mut h = hermitian_part(mat);
    for i in 0..n {
        h[(i, i)] += Complex64::new(shift, 0.0);
    }
    let mut eig = h.symmetric_eigen();
    eig.eigenvalues.iter_mut().for_each(|v| *v -= shift);
    eig
}

fn spectral_range(mat: &CMatrix) -> (f64, f64) {
    if mat.nrows() == 0 {
        return (0.0, 0.0);
    }
    let values = shifted_eigen(mat).eigenvalues;
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (min, max)
}

/// Places `op` on the factors `support` of `shape` and the identity elsewhere.
///
/// Factor `t` of `op` lands on ambient factor `support[t]`, so the support may
/// be listed in any order.
pub fn embed_local(op: &QOperator, support: &[usize], shape: &HilbertShape) -> Result<QOperator> {
    let sub = shape.select(support)?;
    if sub.factors != op.shape.factors {
        return Err(Error::DimensionMismatch {
            expected: sub.dim(),
            actual: op.dim(),
        });
    }
    let d = shape.dim();
    let dl = op.dim();
    let offsets = shape.offsets(support);
    let strides = shape.strides();
    let local_strides = sub.strides();
    let mut out = CMatrix::zeros(d, d);
    for r in 0..d {
        let lr: usize = support
            .iter()
            .zip(&local_strides)
            .map(|(&s, &ls)| ((r / strides[s]) % shape.factors[s]) * ls)
            .sum();
        let base = r - offsets[lr];
        for lc in 0..dl {
            let v = op.mat[(lr, lc)];
            if v != ZERO {
                out[(r, base + offsets[lc])] = v;
            }
        }
    }
    Ok(QOperator {
        shape: shape.clone(),
        mat: out,
    })
}

/// Partial trace of an operator matrix over everything outside `keep`; the
/// result's factors follow the order of `keep`.
pub(crate) fn partial_trace_matrix(
    mat: &CMatrix,
    shape: &HilbertShape,
    keep: &[usize],
) -> Result<(CMatrix, HilbertShape)> {
    let kept = shape.select(keep)?;
    let traced = shape.complement(keep);
    let keep_off = shape.offsets(keep);
    let trace_off = shape.offsets(&traced);
    let dk = kept.dim();
    let mut out = CMatrix::zeros(dk, dk);
    for i in 0..dk {
        for j in 0..dk {
            let mut acc = ZERO;
            for &t in &trace_off {
                acc += mat[(keep_off[i] + t, keep_off[j] + t)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok((out, kept))
}

pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let (mat, shape) = partial_trace_matrix(&rho.mat, &rho.shape, keep)?;
    Ok(DensityMatrix { shape, mat })
}

/// Reduced density matrix of a pure state on the factors `keep`, in that order.
pub fn reduced_state(state: &QState, keep: &[usize]) -> Result<DensityMatrix> {
    let kept = state.shape.select(keep)?;
    let traced = state.shape.complement(keep);
    let keep_off = state.shape.offsets(keep);
    let trace_off = state.shape.offsets(&traced);
    let mut coeffs = CMatrix::zeros(keep_off.len(), trace_off.len());
    for (i, &ko) in keep_off.iter().enumerate() {
        for (t, &to) in trace_off.iter().enumerate() {
            coeffs[(i, t)] = state.amps[ko + to];
        }
    }
    Ok(DensityMatrix {
        shape: kept,
        mat: &coeffs * coeffs.adjoint(),
    })
}

/// Applies a linear map to one tensor factor of a state vector, replacing that
/// factor by `out_factors` (whose product must equal the map's row count).
pub fn apply_factor_map(
    amps: &CVector,
    shape: &HilbertShape,
    factor: usize,
    map: &CMatrix,
    out_factors: &[usize],
    limits: &Limits,
) -> Result<(CVector, HilbertShape)> {
    if factor >= shape.len() {
        return Err(Error::IndexOutOfRange {
            index: factor,
            bound: shape.len(),
        });
    }
    let d_in = shape.factors[factor];
    let d_out: usize = out_factors.iter().product();
    if map.ncols() != d_in || map.nrows() != d_out || amps.len() != shape.dim() {
        return Err(Error::DimensionMismatch {
            expected: d_in,
            actual: map.ncols(),
        });
    }
    let mut factors = shape.factors[..factor].to_vec();
    factors.extend_from_slice(out_factors);
    factors.extend_from_slice(&shape.factors[factor + 1..]);
    let new_shape = HilbertShape::new(factors, limits)?;
    let left: usize = shape.factors[..factor].iter().product();
    let right: usize = shape.factors[factor + 1..].iter().product();
    let mut out = CVector::zeros(new_shape.dim());
    for l in 0..left {
        for i in 0..d_in {
            for r in 0..right {
                let a = amps[(l * d_in + i) * right + r];
                if a == ZERO {
                    continue;
                }
                for o in 0..d_out {
                    let m = map[(o, i)];
                    if m != ZERO {
                        out[(l * d_out + o) * right + r] += m * a;
                    }
                }
            }
        }
    }
    Ok((out, new_shape))
}

/// Spectral decomposition, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Vec<QState>,
}

pub fn hermitian_eig(op: &QOperator) -> Result<Eigen> {
    op.ensure_hermitian(Tolerances::DEFAULT.hermitian.max(1e-12 * max_abs(&op.mat)))?;
    let eig = shifted_eigen(&op.mat);
    if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("eigensolver produced non-finite values".into()));
    }
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| {
            let v = eig.eigenvectors.column(i).into_owned();
            QState::normalized(op.shape.clone(), v)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Eigen { values, vectors })
}

fn max_abs(mat: &CMatrix) -> f64 {
    mat.iter().map(|z| z.norm()).fold(1.0, f64::max)
}

/// Lowest eigenpair.
pub fn ground_state(op: &QOperator) -> Result<(f64, QState)> {
    let mut eig = hermitian_eig(op)?;
    if eig.values.is_empty() {
        return Err(Error::DimensionMismatch { expected: 1, actual: 0 });
    }
    Ok((eig.values[0], eig.vectors.swap_remove(0)))
}

/// Highest eigenpair.
pub fn top_state(op: &QOperator) -> Result<(f64, QState)> {
    let mut eig = hermitian_eig(op)?;
    let last = eig
        .values
        .len()
        .checked_sub(1)
        .ok_or(Error::DimensionMismatch { expected: 1, actual: 0 })?;
    Ok((eig.values[last], eig.vectors.swap_remove(last)))
}

/// Pauli and projector matrices used throughout the tests and generators.
pub mod gates {
    use super::*;

    pub fn pauli_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
    }

    pub fn pauli_z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
    }

    /// `|b⟩⟨b|` on one qubit.
    pub fn ket_bra(b: usize) -> CMatrix {
        let mut m = CMatrix::zeros(2, 2);
        m[(b, b)] = ONE;
        m
    }

    /// Projector onto the Bell state `(|00⟩ + |11⟩)/√2`.
    pub fn phi_plus() -> CMatrix {
        let mut v = CVector::zeros(4);
        v[0] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        v[3] = v[0];
        &v * v.adjoint()
    }

    /// Projector onto the singlet `(|01⟩ - |10⟩)/√2`.
    pub fn psi_minus() -> CMatrix {
        let mut v = CVector::zeros(4);
        v[1] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        v[2] = -v[1];
        &v * v.adjoint()
    }
}

/// Seeded random matrices and states.
pub mod random {
    use super::*;

    pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    }

    /// Haar-random pure state.
    pub fn state<R: Rng + ?Sized>(shape: &HilbertShape, rng: &mut R) -> QState {
        let amps = CVector::from_fn(shape.dim(), |_, _| gaussian(rng));
        QState::normalized(shape.clone(), amps).expect("gaussian vector is nonzero")
    }

    /// Haar-random unitary (QR of a Ginibre matrix with phase fix).
    pub fn unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
        let g = CMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
        let qr = g.qr();
        let mut q = qr.q();
        let r = qr.r();
        for j in 0..dim {
            let d = r[(j, j)];
            let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
            for i in 0..dim {
                q[(i, j)] *= phase;
            }
        }
        q
    }

    /// `U diag(λ) U†` with the given spectrum and a Haar-random basis.
    pub fn with_spectrum<R: Rng + ?Sized>(spectrum: &[f64], rng: &mut R) -> CMatrix {
        let u = unitary(spectrum.len(), rng);
        let d = CMatrix::from_diagonal(&CVector::from_iterator(
            spectrum.len(),
            spectrum.iter().map(|&x| C64::new(x, 0.0)),
        ));
        let m = &u * d * u.adjoint();
        hermitian_part(&m)
    }

    /// Random operator with spectrum drawn uniformly from `[lo, hi]`.
    pub fn effect<R: Rng + ?Sized>(dim: usize, lo: f64, hi: f64, rng: &mut R) -> CMatrix {
        let spectrum: Vec<f64> = (0..dim).map(|_| rng.random_range(lo..=hi)).collect();
        with_spectrum(&spectrum, rng)
    }

    /// Random Hermitian matrix with Gaussian entries.
    pub fn hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
        let g = CMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
        hermitian_part(&g)
    }
}
