//! Local-unitary invariants of a bipartite state and the genericity
//! classification built on them.
//!
//! For eigenvectors `|φ_i⟩` with coefficient matrices `A_i` the reduced
//! families are `ρ_i = A_i A_i†` (on `H_A`) and `θ_i = A_i† A_i` (on `H_B`).
//! From them:
//!
//! * `Ω_ij = Tr(ρ_i ρ_j)`, `Θ_ij = Tr(θ_i θ_j)`, zero-padded to `N² × N²`
//!   with `N = min(N_A, N_B)`;
//! * `X_ijk = Tr(ρ_i ρ_j ρ_k)`, `Y_ijk = Tr(θ_i θ_j θ_k)`;
//! * `J^s = Tr ρ^s = Σ_i λ_i^s`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

use crate::numerics::{det, rank, Complex, ComplexMatrix, LinalgError, Tolerance};
use crate::states::{eigensystem, BipartiteState, EigenSystem};

/// Bound on the imaginary part of quantities that are real in exact
/// arithmetic.
pub const IMAGINARY_GUARD: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InvariantError {
    #[error("{name}[{i}][{j}] has residual imaginary part {im:e}")]
    ResidualImaginary {
        name: &'static str,
        i: usize,
        j: usize,
        im: f64,
    },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Dense real square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn from_vec(dim: usize, data: Vec<f64>) -> Option<Self> {
        (data.len() == dim * dim).then_some(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Leading `n × n` block.
    pub fn leading_block(&self, n: usize) -> Self {
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, self.get(i, j));
            }
        }
        out
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        let data = self.data.iter().map(|&x| Complex::new(x, 0.0)).collect();
        ComplexMatrix::from_vec(self.dim, self.dim, data).expect("shape")
    }

    pub fn det(&self) -> f64 {
        det(&self.to_complex()).expect("square").re
    }
}

/// Cubic complex tensor `T[i][j][k]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    dim: usize,
    data: Vec<Complex>,
}

impl Tensor3 {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex::new(0.0, 0.0); dim * dim * dim],
        }
    }

    pub fn from_vec(dim: usize, data: Vec<Complex>) -> Option<Self> {
        (data.len() == dim * dim * dim).then_some(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> Complex {
        self.data[(i * self.dim + j) * self.dim + k]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: Complex) {
        self.data[(i * self.dim + j) * self.dim + k] = v;
    }

    pub fn as_slice(&self) -> &[Complex] {
        &self.data
    }
}

/// The families `{ρ_i}` and `{θ_i}`.
#[derive(Debug, Clone)]
pub struct ReducedFamily {
    pub rhos: Vec<ComplexMatrix>,
    pub thetas: Vec<ComplexMatrix>,
}

impl ReducedFamily {
    pub fn n(&self) -> usize {
        self.rhos.len()
    }
}

/// `ρ_i = A_i A_i†`, `θ_i = A_i† A_i`.
pub fn reduced_family(es: &EigenSystem) -> ReducedFamily {
    let rhos = es.coeff_mats.iter().map(|a| a * &a.dagger()).collect();
    let thetas = es.coeff_mats.iter().map(|a| &a.dagger() * a).collect();
    ReducedFamily { rhos, thetas }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantSet {
    /// `J^1 … J^n`.
    pub j_moments: Vec<f64>,
    pub omega: RealMatrix,
    pub theta_mat: RealMatrix,
    pub x_tensor: Tensor3,
    pub y_tensor: Tensor3,
    /// Rank of the state.
    pub n: usize,
    /// `N² = min(N_A, N_B)²`.
    pub n_sq: usize,
}

/// Gram matrix of `family` under the Hilbert–Schmidt product, padded with
/// zeros to `size × size`.
fn gram(family: &[ComplexMatrix], size: usize, name: &'static str) -> Result<RealMatrix, InvariantError> {
    let n = family.len();
    let mut g = RealMatrix::zeros(size.max(n));
    for i in 0..n {
        for j in i..n {
            let t = family[i].matmul(&family[j])?.trace()?;
            if t.im.abs() >= IMAGINARY_GUARD {
                return Err(InvariantError::ResidualImaginary {
                    name,
                    i: i + 1,
                    j: j + 1,
                    im: t.im,
                });
            }
            g.set(i, j, t.re);
            g.set(j, i, t.re);
        }
    }
    Ok(g)
}

/// `(Ω, Θ)`, each padded to `max(n, n_sq)`.
pub fn metric_tensors(rf: &ReducedFamily, n_sq: usize) -> Result<(RealMatrix, RealMatrix), InvariantError> {
    Ok((gram(&rf.rhos, n_sq, "Omega")?, gram(&rf.thetas, n_sq, "Theta")?))
}

fn trilinear(family: &[ComplexMatrix], name: &'static str) -> Result<Tensor3, InvariantError> {
    let n = family.len();
    let mut t = Tensor3::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let p = family[i].matmul(&family[j])?;
            for k in 0..n {
                t.set(i, j, k, p.matmul(&family[k])?.trace()?);
            }
        }
    }
    // X_ijk + X_kji is real for Hermitian families.
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let s = t.get(i, j, k) + t.get(k, j, i);
                if s.im.abs() >= IMAGINARY_GUARD {
                    return Err(InvariantError::ResidualImaginary {
                        name,
                        i: i + 1,
                        j: j + 1,
                        im: s.im,
                    });
                }
            }
        }
    }
    Ok(t)
}

/// `(X, Y)`, stored complex: they are real only for commuting families.
pub fn trilinear_tensors(rf: &ReducedFamily) -> Result<(Tensor3, Tensor3), InvariantError> {
    Ok((trilinear(&rf.rhos, "X")?, trilinear(&rf.thetas, "Y")?))
}

/// `J^s = Σ_i λ_i^s` for `s = 1..n`.
pub fn j_moments(es: &EigenSystem) -> Vec<f64> {
    (1..=es.rank())
        .map(|s| es.lambdas.iter().map(|l| l.powi(s as i32)).sum())
        .collect()
}

pub fn invariant_set(es: &EigenSystem, rf: &ReducedFamily) -> Result<InvariantSet, InvariantError> {
    let nmin = es.dim_a.min(es.dim_b);
    let n_sq = nmin * nmin;
    let (omega, theta_mat) = metric_tensors(rf, n_sq)?;
    let (x_tensor, y_tensor) = trilinear_tensors(rf)?;
    Ok(InvariantSet {
        j_moments: j_moments(es),
        omega,
        theta_mat,
        x_tensor,
        y_tensor,
        n: es.rank(),
        n_sq,
    })
}

/// Whether the full-rank condition must hold for every `ρ_i` or for at least
/// one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FullRankMode {
    #[default]
    All,
    Any,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ClassLabel {
    NonGeneric,
    HighGeneric,
    Generic,
    Chg,
}

impl ClassLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassLabel::NonGeneric => "NonGeneric",
            ClassLabel::HighGeneric => "HighGeneric",
            ClassLabel::Generic => "Generic",
            ClassLabel::Chg => "CHG",
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of [`classify`] with the quantities it was decided on.
///
/// `label` is the most specific class: CHG, then Generic, then HighGeneric.
/// The individual predicates stay available, so a CHG state also reports
/// `high_generic` and possibly `generic`.
#[derive(Debug, Clone, PartialEq)]
pub struct GenericityClass {
    pub label: ClassLabel,
    pub generic: bool,
    pub high_generic: bool,
    pub commuting: bool,
    pub full_rank: bool,
    /// `det Ω_n` on the leading rank-`n` block.
    pub det_omega: f64,
    /// `det Θ_n` on the leading rank-`n` block.
    pub det_theta: f64,
    /// `max_{i<j} max(‖[ρ_i,ρ_j]‖_F, ‖[θ_i,θ_j]‖_F)`.
    pub max_commutator: f64,
    pub min_rho_rank: usize,
}

impl GenericityClass {
    pub fn is_chg(&self) -> bool {
        self.label == ClassLabel::Chg
    }

    pub fn omega_nondegenerate(&self, tol: &Tolerance) -> bool {
        self.det_omega.abs() > tol.eps_zero
    }

    pub fn theta_nondegenerate(&self, tol: &Tolerance) -> bool {
        self.det_theta.abs() > tol.eps_zero
    }
}

/// Generic / HighGeneric / CHG classification.
///
/// Determinants are taken on the leading `n × n` blocks: the padded
/// `N² × N²` matrices are singular whenever `n < N²`.
pub fn classify(
    es: &EigenSystem,
    rf: &ReducedFamily,
    inv: &InvariantSet,
    tol: &Tolerance,
    mode: FullRankMode,
) -> Result<GenericityClass, LinalgError> {
    let n = inv.n;
    let det_omega = if n == 0 { 0.0 } else { inv.omega.leading_block(n).det() };
    let det_theta = if n == 0 { 0.0 } else { inv.theta_mat.leading_block(n).det() };
    let omega_ok = det_omega.abs() > tol.eps_zero;
    let theta_ok = det_theta.abs() > tol.eps_zero;

    let mut max_commutator: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let cr = ComplexMatrix::commutator(&rf.rhos[i], &rf.rhos[j])?.frobenius_norm();
            let ct = ComplexMatrix::commutator(&rf.thetas[i], &rf.thetas[j])?.frobenius_norm();
            max_commutator = max_commutator.max(cr).max(ct);
        }
    }

    let mut ranks = Vec::with_capacity(n);
    for r in &rf.rhos {
        ranks.push(rank(r, tol)?);
    }
    let min_rho_rank = ranks.iter().copied().min().unwrap_or(0);
    let full = |r: &usize| *r == es.dim_a;
    let full_rank = n > 0
        && match mode {
            FullRankMode::All => ranks.iter().all(full),
            FullRankMode::Any => ranks.iter().any(full),
        };

    let generic = omega_ok && theta_ok;
    let high_generic = omega_ok || theta_ok;
    let commuting = max_commutator < tol.eps_zero;
    let label = if high_generic && commuting && full_rank {
        ClassLabel::Chg
    } else if generic {
        ClassLabel::Generic
    } else if high_generic {
        ClassLabel::HighGeneric
    } else {
        ClassLabel::NonGeneric
    };
    Ok(GenericityClass {
        label,
        generic,
        high_generic,
        commuting,
        full_rank,
        det_omega,
        det_theta,
        max_commutator,
        min_rho_rank,
    })
}

/// Everything derived from one state.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub eigensystem: EigenSystem,
    pub family: ReducedFamily,
    pub invariants: InvariantSet,
    pub class: GenericityClass,
}

pub fn analyze(state: &BipartiteState, tol: &Tolerance, mode: FullRankMode) -> Result<Analysis, InvariantError> {
    let eigensystem = eigensystem(state, tol)?;
    let family = reduced_family(&eigensystem);
    let invariants = invariant_set(&eigensystem, &family)?;
    let class = classify(&eigensystem, &family, &invariants, tol, mode)?;
    Ok(Analysis {
        eigensystem,
        family,
        invariants,
        class,
    })
}
