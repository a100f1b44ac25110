//! Dense complex linear algebra for the small matrices that appear in
//! bipartite and tripartite state analysis (dimension up to a few dozen).
//!
//! Everything here is a pure function on immutable values. The
//! eigensolver is cyclic Jacobi; the SVD is assembled from the
//! eigendecomposition of `m†m` with a fixed phase convention so that
//! repeated runs return bit-identical factors.

mod eig;
mod lu;
mod matrix;
mod svd;

use thiserror::Error;

pub use self::eig::{hermitian_eig, EigenDecomposition};
pub use self::lu::det;
pub use self::matrix::{inner, vec_norm, ComplexMatrix};
pub use self::svd::{polar_unitary, rank, svd, Svd};

/// Complex scalar used throughout the crate.
pub type Complex = num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (‖m − m†‖_F = {defect:e})")]
    NonHermitian { defect: f64 },
    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("expected {expected} entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("Jacobi iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(&'static str),
}

/// Numerical thresholds realizing the exact conditions `det ≠ 0`,
/// `λ_j = λ_k` and `[a, b] = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Absolute threshold below which a quantity counts as zero.
    pub eps_zero: f64,
    /// Largest eigenvalue gap still treated as a degeneracy.
    pub eps_eig: f64,
    /// Tolerance for comparing invariants and witness residuals.
    pub eps_match: f64,
}

impl Tolerance {
    pub const DEFAULT_EPS_ZERO: f64 = 1e-9;
    pub const DEFAULT_EPS_EIG: f64 = 1e-7;
    pub const DEFAULT_EPS_MATCH: f64 = 1e-8;

    pub fn new(eps_zero: f64, eps_eig: f64, eps_match: f64) -> Result<Self, LinalgError> {
        let tol = Self {
            eps_zero,
            eps_eig,
            eps_match,
        };
        tol.check()?;
        Ok(tol)
    }

    pub fn check(&self) -> Result<(), LinalgError> {
        let all = [self.eps_zero, self.eps_eig, self.eps_match];
        if all.iter().any(|e| !e.is_finite() || *e <= 0.0) {
            return Err(LinalgError::InvalidTolerance("all tolerances must be finite and positive"));
        }
        if self.eps_zero > self.eps_match {
            return Err(LinalgError::InvalidTolerance("eps_zero must not exceed eps_match"));
        }
        Ok(())
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            eps_zero: Self::DEFAULT_EPS_ZERO,
            eps_eig: Self::DEFAULT_EPS_EIG,
            eps_match: Self::DEFAULT_EPS_MATCH,
        }
    }
}

/// Multiplies `v` by the phase that makes its largest-magnitude entry real
/// and positive. Ties go to the lowest index.
pub(crate) fn fix_phase(v: &mut [Complex]) {
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, z) in v.iter().enumerate() {
        let m = z.norm();
        // Relative slack keeps the choice stable against last-bit noise.
        if m > best_mag * (1.0 + 1e-9) {
            best = i;
            best_mag = m;
        }
    }
    if best_mag > 0.0 {
        let phase = v[best].conj() / best_mag;
        for z in v.iter_mut() {
            *z *= phase;
        }
        v[best] = Complex::new(v[best].re, 0.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_tolerances() {
        let t = Tolerance::default();
        assert_eq!((t.eps_zero, t.eps_eig, t.eps_match), (1e-9, 1e-7, 1e-8));
        assert!(t.check().is_ok());
    }

    #[test]
    fn tolerance_ordering_enforced() {
        assert!(Tolerance::new(1e-6, 1e-7, 1e-8).is_err());
        assert!(Tolerance::new(0.0, 1e-7, 1e-8).is_err());
        assert!(Tolerance::new(1e-10, 1e-7, 1e-8).is_ok());
    }
}
