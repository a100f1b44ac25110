//! Bipartite and tripartite state containers, validation, reshaping and
//! partial traces.
//!
//! The composite basis of `H_A ⊗ H_B` is ordered A-major: the basis vector
//! `|e_k⟩ ⊗ |f_l⟩` has index `k·N_B + l`. Under this convention an
//! eigenvector reshapes row-major into its coefficient matrix `A` with
//! `A[k][l] = a_{kl}`.

use alloc::vec::Vec;
use core::ops::Range;

#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

use crate::numerics::{hermitian_eig, vec_norm, Complex, ComplexMatrix, LinalgError, Tolerance};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("density matrix is not Hermitian (‖ρ − ρ†‖_F = {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("density matrix does not have unit trace (trace = {trace})")]
    NotUnitTrace { trace: f64 },
    #[error("density matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("state vector is not normalized (‖ψ‖ = {norm})")]
    NotNormalized { norm: f64 },
    #[error("subsystem dimensions must be positive")]
    ZeroDimension,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A validated density matrix on `H_A ⊗ H_B`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    dim_a: usize,
    dim_b: usize,
    rho: ComplexMatrix,
}

impl BipartiteState {
    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    /// `N = min(N_A, N_B)`.
    pub fn min_dim(&self) -> usize {
        self.dim_a.min(self.dim_b)
    }

    /// Projector onto a normalized pure state.
    pub fn from_pure(psi: &[Complex], dim_a: usize, dim_b: usize, tol: &Tolerance) -> Result<Self, StateError> {
        if psi.len() != dim_a * dim_b {
            return Err(StateError::DimensionMismatch {
                expected: dim_a * dim_b,
                found: psi.len(),
            });
        }
        let norm = vec_norm(psi);
        if (norm - 1.0).abs() > tol.eps_zero {
            return Err(StateError::NotNormalized { norm });
        }
        validate(ComplexMatrix::outer(psi, psi), dim_a, dim_b, tol)
    }

    /// `(u⊗w) ρ (u⊗w)†`.
    pub fn conjugate_local(&self, u: &ComplexMatrix, w: &ComplexMatrix) -> Self {
        assert_eq!(u.rows(), self.dim_a);
        assert_eq!(w.rows(), self.dim_b);
        self.conjugate(&u.kron(w))
    }

    /// `U ρ U†` for a unitary on the full space.
    pub fn conjugate(&self, unitary: &ComplexMatrix) -> Self {
        let rho = &(unitary * &self.rho) * &unitary.dagger();
        Self {
            dim_a: self.dim_a,
            dim_b: self.dim_b,
            rho: rho.hermitian_part().expect("square"),
        }
    }

    pub(crate) fn from_parts(dim_a: usize, dim_b: usize, rho: ComplexMatrix) -> Self {
        Self { dim_a, dim_b, rho }
    }
}

/// Checks that `raw` is a density matrix on `H_A ⊗ H_B` and wraps it.
///
/// Checks run in order: shape, Hermiticity, positivity, unit trace. The
/// stored matrix is the Hermitian part of `raw`.
pub fn validate(raw: ComplexMatrix, dim_a: usize, dim_b: usize, tol: &Tolerance) -> Result<BipartiteState, StateError> {
    if dim_a == 0 || dim_b == 0 {
        return Err(StateError::ZeroDimension);
    }
    let d = dim_a * dim_b;
    if raw.rows() != d || raw.cols() != d {
        return Err(StateError::DimensionMismatch {
            expected: d,
            found: if raw.rows() != d { raw.rows() } else { raw.cols() },
        });
    }
    if !raw.is_finite() {
        return Err(LinalgError::NonFinite.into());
    }
    let defect = raw.hermiticity_defect()?;
    if defect > tol.eps_zero * raw.frobenius_norm().max(1.0) {
        return Err(StateError::NotHermitian { defect });
    }
    let rho = raw.hermitian_part()?;
    let eig = hermitian_eig(&rho, tol)?;
    let min_eigenvalue = eig.values.last().copied().unwrap_or(0.0);
    if min_eigenvalue < -tol.eps_zero {
        return Err(StateError::NotPositive { min_eigenvalue });
    }
    let trace = rho.trace()?.re;
    if (trace - 1.0).abs() > tol.eps_zero {
        return Err(StateError::NotUnitTrace { trace });
    }
    Ok(BipartiteState { dim_a, dim_b, rho })
}

/// A normalized pure state on `H_A ⊗ H_B ⊗ H_C`, index `(a·N_B + b)·N_C + c`.
#[derive(Debug, Clone, PartialEq)]
pub struct TripartiteState {
    dims: [usize; 3],
    psi: Vec<Complex>,
}

impl TripartiteState {
    pub fn new(psi: Vec<Complex>, dims: [usize; 3], tol: &Tolerance) -> Result<Self, StateError> {
        if dims.contains(&0) {
            return Err(StateError::ZeroDimension);
        }
        let expected = dims.iter().product();
        if psi.len() != expected {
            return Err(StateError::DimensionMismatch {
                expected,
                found: psi.len(),
            });
        }
        if psi.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite.into());
        }
        let norm = vec_norm(&psi);
        if (norm - 1.0).abs() > tol.eps_zero {
            return Err(StateError::NotNormalized { norm });
        }
        Ok(Self { dims, psi })
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn psi(&self) -> &[Complex] {
        &self.psi
    }

    /// `(u_A ⊗ u_B ⊗ u_C) |ψ⟩`.
    pub fn apply_local(&self, ua: &ComplexMatrix, ub: &ComplexMatrix, uc: &ComplexMatrix) -> Self {
        let full = ua.kron(ub).kron(uc);
        Self {
            dims: self.dims,
            psi: full.mul_vec(&self.psi),
        }
    }

    /// `ψ` viewed as an `N_A × (N_B·N_C)` matrix.
    pub fn as_matrix(&self) -> ComplexMatrix {
        let [a, b, c] = self.dims;
        ComplexMatrix::from_vec(a, b * c, self.psi.clone()).expect("length checked on construction")
    }

    pub(crate) fn from_parts(dims: [usize; 3], psi: Vec<Complex>) -> Self {
        Self { dims, psi }
    }
}

/// Spectral data of a bipartite state restricted to its support.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub dim_a: usize,
    pub dim_b: usize,
    /// Nonzero eigenvalues, descending.
    pub lambdas: Vec<f64>,
    /// Unit eigenvectors matching `lambdas`.
    pub phis: Vec<Vec<Complex>>,
    /// `A_i`, the row-major reshape of `phis[i]` into `N_A × N_B`.
    pub coeff_mats: Vec<ComplexMatrix>,
    /// Maximal runs of indices whose eigenvalues agree within `eps_eig`.
    pub degeneracy_blocks: Vec<Range<usize>>,
}

impl EigenSystem {
    pub fn rank(&self) -> usize {
        self.lambdas.len()
    }

    /// True when every degeneracy block is a singleton.
    pub fn is_nondegenerate(&self) -> bool {
        self.degeneracy_blocks.iter().all(|b| b.len() == 1)
    }

    /// `Σ_i λ_i |φ_i⟩⟨φ_i|`.
    pub fn reassemble(&self) -> ComplexMatrix {
        let d = self.dim_a * self.dim_b;
        let mut rho = ComplexMatrix::zeros(d, d);
        for (l, phi) in self.lambdas.iter().zip(&self.phis) {
            rho = &rho + &ComplexMatrix::outer(phi, phi).scale_real(*l);
        }
        rho
    }
}

/// Eigendecomposition of `ρ` keeping eigenvalues above `eps_zero`.
pub fn eigensystem(state: &BipartiteState, tol: &Tolerance) -> Result<EigenSystem, LinalgError> {
    let eig = hermitian_eig(state.rho(), tol)?;
    let mut lambdas = Vec::new();
    let mut phis = Vec::new();
    let mut coeff_mats = Vec::new();
    for (j, &l) in eig.values.iter().enumerate() {
        if l <= tol.eps_zero {
            break;
        }
        let phi = eig.vector(j);
        coeff_mats.push(vector_to_coeff(&phi, state.dim_a, state.dim_b));
        phis.push(phi);
        lambdas.push(l);
    }
    let degeneracy_blocks = degeneracy_blocks(&lambdas, tol.eps_eig);
    Ok(EigenSystem {
        dim_a: state.dim_a,
        dim_b: state.dim_b,
        lambdas,
        phis,
        coeff_mats,
        degeneracy_blocks,
    })
}

/// Splits a descending sequence into maximal runs whose consecutive gaps are
/// at most `eps`.
pub fn degeneracy_blocks(values: &[f64], eps: f64) -> Vec<Range<usize>> {
    let mut blocks = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || (values[i - 1] - values[i]).abs() > eps {
            if i > start {
                blocks.push(start..i);
            }
            start = i;
        }
    }
    blocks
}

/// Row-major reshape of a vector on `H_A ⊗ H_B` into its `N_A × N_B`
/// coefficient matrix.
pub fn vector_to_coeff(phi: &[Complex], dim_a: usize, dim_b: usize) -> ComplexMatrix {
    ComplexMatrix::from_vec(dim_a, dim_b, phi.to_vec()).expect("vector length must be dim_a·dim_b")
}

/// Inverse of [`vector_to_coeff`].
pub fn coeff_to_vector(a: &ComplexMatrix) -> Vec<Complex> {
    a.as_slice().to_vec()
}

/// `Tr_B m` for an operator on `H_A ⊗ H_B`.
pub fn trace_out_b(m: &ComplexMatrix, dim_a: usize, dim_b: usize) -> ComplexMatrix {
    assert_eq!(m.rows(), dim_a * dim_b);
    let mut out = ComplexMatrix::zeros(dim_a, dim_a);
    for k in 0..dim_a {
        for kp in 0..dim_a {
            let mut s = Complex::new(0.0, 0.0);
            for l in 0..dim_b {
                s += m[(k * dim_b + l, kp * dim_b + l)];
            }
            out[(k, kp)] = s;
        }
    }
    out
}

/// `Tr_A m` for an operator on `H_A ⊗ H_B`.
pub fn trace_out_a(m: &ComplexMatrix, dim_a: usize, dim_b: usize) -> ComplexMatrix {
    assert_eq!(m.rows(), dim_a * dim_b);
    let mut out = ComplexMatrix::zeros(dim_b, dim_b);
    for l in 0..dim_b {
        for lp in 0..dim_b {
            let mut s = Complex::new(0.0, 0.0);
            for k in 0..dim_a {
                s += m[(k * dim_b + l, k * dim_b + lp)];
            }
            out[(l, lp)] = s;
        }
    }
    out
}

/// Reduced state on `H_A`.
pub fn partial_trace_b(state: &BipartiteState) -> ComplexMatrix {
    trace_out_b(&state.rho, state.dim_a, state.dim_b)
}

/// Reduced state on `H_B`.
pub fn partial_trace_a_bip(state: &BipartiteState) -> ComplexMatrix {
    trace_out_a(&state.rho, state.dim_a, state.dim_b)
}

/// `Tr_A |ψ⟩⟨ψ|` as a state on `H_B ⊗ H_C`:
/// `ρ[(b c),(b' c')] = Σ_a ψ[a b c] ψ*[a b' c']`.
pub fn partial_trace_a(state: &TripartiteState) -> BipartiteState {
    let [na, nb, nc] = state.dims;
    let d = nb * nc;
    let mut rho = ComplexMatrix::zeros(d, d);
    for a in 0..na {
        let row = &state.psi[a * d..(a + 1) * d];
        for i in 0..d {
            for j in 0..d {
                rho[(i, j)] += row[i] * row[j].conj();
            }
        }
    }
    let rho = rho.hermitian_part().expect("square");
    BipartiteState::from_parts(nb, nc, rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64) -> Complex {
        Complex::new(re, 0.0)
    }

    fn bell() -> Vec<Complex> {
        let h = 0.5f64.sqrt();
        vec![c(h), c(0.0), c(0.0), c(h)]
    }

    #[test]
    fn maximally_mixed_is_valid() {
        let rho = ComplexMatrix::identity(4).scale_real(0.25);
        assert!(validate(rho, 2, 2, &Tolerance::default()).is_ok());
    }

    #[test]
    fn slightly_negative_is_rejected_before_trace() {
        let rho = ComplexMatrix::from_real_diag(&[0.5, 0.5, 0.0, -1e-6]);
        assert!(matches!(
            validate(rho, 2, 2, &Tolerance::default()),
            Err(StateError::NotPositive { .. })
        ));
    }

    #[test]
    fn other_validation_errors() {
        let tol = Tolerance::default();
        assert!(matches!(
            validate(ComplexMatrix::identity(3), 2, 2, &tol),
            Err(StateError::DimensionMismatch { expected: 4, found: 3 })
        ));
        assert!(matches!(
            validate(ComplexMatrix::identity(4), 2, 2, &tol),
            Err(StateError::NotUnitTrace { .. })
        ));
        let mut m = ComplexMatrix::identity(4).scale_real(0.25);
        m[(0, 1)] = c(0.1);
        assert!(matches!(validate(m, 2, 2, &tol), Err(StateError::NotHermitian { .. })));
    }

    #[test]
    fn bell_projector_rank_one() {
        let tol = Tolerance::default();
        let s = BipartiteState::from_pure(&bell(), 2, 2, &tol).unwrap();
        let es = eigensystem(&s, &tol).unwrap();
        assert_eq!(es.rank(), 1);
        assert!((es.lambdas[0] - 1.0).abs() < 1e-14);
        // A_1 = I/√2 up to a global phase.
        let a = &es.coeff_mats[0];
        let phase = a[(0, 0)] / a[(0, 0)].norm();
        let expected = ComplexMatrix::identity(2).scale(phase * 0.5f64.sqrt());
        assert!((a - &expected).frobenius_norm() < 1e-14);
    }

    #[test]
    fn degenerate_mixture_forms_one_block() {
        let tol = Tolerance::default();
        let rho = ComplexMatrix::from_real_diag(&[0.5, 0.0, 0.0, 0.5]);
        let es = eigensystem(&validate(rho, 2, 2, &tol).unwrap(), &tol).unwrap();
        assert_eq!(es.rank(), 2);
        assert_eq!(es.lambdas, vec![0.5, 0.5]);
        assert_eq!(es.degeneracy_blocks, vec![0..2]);
    }

    #[test]
    fn blocks_split_on_gaps() {
        assert_eq!(degeneracy_blocks(&[0.5, 0.3, 0.2], 1e-7), vec![0..1, 1..2, 2..3]);
        assert_eq!(degeneracy_blocks(&[0.5, 0.25, 0.25], 1e-7), vec![0..1, 1..3]);
        assert!(degeneracy_blocks(&[], 1e-7).is_empty());
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let tol = Tolerance::default();
        let s = BipartiteState::from_pure(&bell(), 2, 2, &tol).unwrap();
        let expected = ComplexMatrix::identity(2).scale_real(0.5);
        assert!((&partial_trace_b(&s) - &expected).frobenius_norm() < 1e-15);
        assert!((&partial_trace_a_bip(&s) - &expected).frobenius_norm() < 1e-15);
    }

    #[test]
    fn product_marginal() {
        let tol = Tolerance::default();
        let ra = ComplexMatrix::from_real_diag(&[0.7, 0.3]);
        let rb = ComplexMatrix::from_real_diag(&[0.2, 0.5, 0.3]);
        let s = validate(ra.kron(&rb), 2, 3, &tol).unwrap();
        assert!((&partial_trace_b(&s) - &ra).frobenius_norm() < 1e-15);
        assert!((&partial_trace_a_bip(&s) - &rb).frobenius_norm() < 1e-15);
    }

    #[test]
    fn tripartite_traces() {
        let tol = Tolerance::default();
        let mut psi = vec![c(0.0); 8];
        psi[0] = c(1.0);
        let product = TripartiteState::new(psi, [2, 2, 2], &tol).unwrap();
        let r = partial_trace_a(&product);
        assert_eq!(r.dims(), (2, 2));
        assert!((r.rho()[(0, 0)] - c(1.0)).norm() < 1e-15);
        assert!((r.rho().trace().unwrap() - c(1.0)).norm() < 1e-15);

        let h = 0.5f64.sqrt();
        let mut ghz = vec![c(0.0); 8];
        ghz[0] = c(h);
        ghz[7] = c(h);
        let g = TripartiteState::new(ghz, [2, 2, 2], &tol).unwrap();
        let expected = ComplexMatrix::from_real_diag(&[0.5, 0.0, 0.0, 0.5]);
        assert!((partial_trace_a(&g).rho() - &expected).frobenius_norm() < 1e-15);
    }

    #[test]
    fn tripartite_rejects_unnormalized() {
        let tol = Tolerance::default();
        assert!(matches!(
            TripartiteState::new(vec![c(1.0), c(1.0)], [1, 1, 2], &tol),
            Err(StateError::NotNormalized { .. })
        ));
        assert!(matches!(
            TripartiteState::new(vec![c(1.0)], [1, 1, 2], &tol),
            Err(StateError::DimensionMismatch { .. })
        ));
    }
}
