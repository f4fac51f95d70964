//! Numerical tolerances and size caps shared by every module.

/// Default cap on the dimension of any dense Hilbert space.
pub const DEFAULT_MAX_DIM: usize = 1 << 20;

/// Default cap on brute-force enumerations (assignments, strategies, alphabets).
pub const DEFAULT_MAX_ENUM: u128 = 1_000_000;

/// Tolerances used when validating inputs and checking identities.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Tolerances {
    /// Entrywise `M = M†`.
    pub hermitian: f64,
    /// Lower and upper spectral bounds of PSD operators and contractions.
    pub spectral: f64,
    /// Euclidean norm of a state vector.
    pub norm: f64,
    /// Trace of a density matrix.
    pub trace: f64,
    /// Slack applied when comparing a computed value against a promise threshold.
    pub decision: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermitian: 1e-12,
        spectral: 1e-10,
        norm: 1e-12,
        trace: 1e-10,
        decision: 1e-9,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Size caps. Exceeding one fails fast with [`crate::Error::DimensionCap`]
/// or [`crate::Error::EnumerationCap`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_dim: usize,
    pub max_enum: u128,
}

impl Limits {
    pub fn check_dim(&self, dim: usize) -> crate::Result<()> {
        if dim > self.max_dim {
            return Err(crate::Error::DimensionCap { dim, cap: self.max_dim });
        }
        Ok(())
    }

    pub fn check_enum(&self, count: u128) -> crate::Result<()> {
        if count > self.max_enum {
            return Err(crate::Error::EnumerationCap {
                count,
                cap: self.max_enum,
            });
        }
        Ok(())
    }
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_dim: DEFAULT_MAX_DIM,
            max_enum: DEFAULT_MAX_ENUM,
        }
    }
}

/// Saturating `base^exp` used for enumeration-size estimates.
pub(crate) fn checked_pow(base: u128, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
    }
    acc
}

/// Number of injective `k`-tuples drawn from `n` items, `n!/(n-k)!`.
pub(crate) fn falling_factorial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128))
}
