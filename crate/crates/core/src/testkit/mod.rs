//! Seeded generators and an independent invariant oracle.
//!
//! Every generator is a deterministic function of its parameters and a
//! 64-bit seed.

mod oracle;
mod rng;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

use crate::invariants::{analyze, classify, invariant_set, reduced_family, FullRankMode};
use crate::numerics::{hermitian_eig, inner, vec_norm, Complex, ComplexMatrix, Tolerance};
use crate::states::{degeneracy_blocks, validate, vector_to_coeff, BipartiteState, EigenSystem, TripartiteState};

pub use self::oracle::oracle_invariants;
pub use self::rng::Xoshiro256StarStar;

pub type Seed = u64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenerationError {
    #[error("invalid generator parameters: {0}")]
    InvalidParameters(String),
    #[error("no admissible state after {attempts} attempts")]
    GenerationFailed { attempts: usize },
}

fn invalid(msg: &str) -> GenerationError {
    GenerationError::InvalidParameters(String::from(msg))
}

/// Haar-distributed unitary: Gram–Schmidt QR of a complex Ginibre matrix.
/// Gram–Schmidt leaves a positive real `R` diagonal, which is the phase
/// correction that makes the distribution Haar.
pub fn haar_unitary(dim: usize, seed: Seed) -> ComplexMatrix {
    haar_unitary_from(&mut Xoshiro256StarStar::seed_from_u64(seed), dim)
}

pub fn haar_unitary_from(rng: &mut Xoshiro256StarStar, dim: usize) -> ComplexMatrix {
    assert!(dim >= 1, "dimension must be positive");
    loop {
        let cols: Vec<Vec<Complex>> = (0..dim).map(|_| (0..dim).map(|_| rng.complex_normal()).collect()).collect();
        if let Some(q) = gram_schmidt(cols) {
            return ComplexMatrix::from_columns(dim, &q);
        }
    }
}

/// Orthonormalizes the vectors in order; `None` if they are numerically
/// dependent.
fn gram_schmidt(mut vs: Vec<Vec<Complex>>) -> Option<Vec<Vec<Complex>>> {
    for j in 0..vs.len() {
        let start = vec_norm(&vs[j]);
        for _ in 0..2 {
            for i in 0..j {
                let p = inner(&vs[i], &vs[j]);
                let (head, tail) = vs.split_at_mut(j);
                for (x, y) in tail[0].iter_mut().zip(&head[i]) {
                    *x -= p * y;
                }
            }
        }
        let n = vec_norm(&vs[j]);
        if !(n > 1e-8 * start) {
            return None;
        }
        for x in vs[j].iter_mut() {
            *x /= n;
        }
    }
    Some(vs)
}

/// How the eigenvalues of a generated state are drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectrumMode {
    /// Distinct eigenvalues with the given minimum pairwise gap.
    Distinct { min_gap: f64 },
    /// The two smallest eigenvalues are made equal (rank ≥ 2).
    Degenerate,
}

impl Default for SpectrumMode {
    fn default() -> Self {
        SpectrumMode::Distinct {
            min_gap: 10.0 * Tolerance::DEFAULT_EPS_EIG,
        }
    }
}

/// Descending probability vector of length `rank`.
pub fn random_spectrum(rng: &mut Xoshiro256StarStar, rank: usize, mode: SpectrumMode) -> Vec<f64> {
    loop {
        let mut l: Vec<f64> = (0..rank).map(|_| 0.05 + rng.uniform()).collect();
        if let (SpectrumMode::Degenerate, true) = (mode, rank >= 2) {
            l.sort_by(|a, b| b.partial_cmp(a).unwrap());
            l[rank - 1] = l[rank - 2];
        }
        let total: f64 = l.iter().sum();
        for x in l.iter_mut() {
            *x /= total;
        }
        l.sort_by(|a, b| b.partial_cmp(a).unwrap());
        match mode {
            SpectrumMode::Distinct { min_gap } => {
                if l.windows(2).all(|w| w[0] - w[1] >= min_gap) {
                    return l;
                }
            }
            SpectrumMode::Degenerate => {
                if rank < 3 || l[rank - 3] - l[rank - 2] >= 10.0 * Tolerance::DEFAULT_EPS_EIG {
                    return l;
                }
            }
        }
    }
}

fn mixture(lambdas: &[f64], phis: &[Vec<Complex>]) -> ComplexMatrix {
    let d = phis[0].len();
    let mut rho = ComplexMatrix::zeros(d, d);
    for (l, phi) in lambdas.iter().zip(phis) {
        rho = &rho + &ComplexMatrix::outer(phi, phi).scale_real(*l);
    }
    rho.hermitian_part().expect("square")
}

/// Random state of the given rank with Haar-random eigenvectors and a
/// distinct spectrum.
pub fn random_state(dim_a: usize, dim_b: usize, rank: usize, seed: Seed) -> Result<BipartiteState, GenerationError> {
    let d = dim_a * dim_b;
    if rank == 0 || rank > d {
        return Err(invalid("rank must lie in 1..=dim_a·dim_b"));
    }
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    let basis = haar_unitary_from(&mut rng, d);
    let phis: Vec<Vec<Complex>> = (0..rank).map(|j| basis.column(j)).collect();
    let lambdas = random_spectrum(&mut rng, rank, SpectrumMode::default());
    validate(mixture(&lambdas, &phis), dim_a, dim_b, &Tolerance::default())
        .map_err(|_| GenerationError::GenerationFailed { attempts: 1 })
}

/// Random pure state on `H_A ⊗ H_B ⊗ H_C`.
pub fn random_pure_tripartite(dims: [usize; 3], seed: Seed) -> TripartiteState {
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    let d: usize = dims.iter().product();
    let mut psi: Vec<Complex> = (0..d).map(|_| rng.complex_normal()).collect();
    let n = vec_norm(&psi);
    for z in psi.iter_mut() {
        *z /= n;
    }
    TripartiteState::from_parts(dims, psi)
}

/// Parameters for [`random_chg_state_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChgParams {
    pub dim_a: usize,
    pub dim_b: usize,
    pub rank: usize,
    pub spectrum: SpectrumMode,
    pub max_attempts: usize,
}

impl ChgParams {
    pub fn new(dim_a: usize, dim_b: usize, rank: usize) -> Self {
        Self {
            dim_a,
            dim_b,
            rank,
            spectrum: SpectrumMode::default(),
            max_attempts: 64,
        }
    }
}

/// A generated CHG state with the spectral data it was assembled from.
#[derive(Debug, Clone)]
pub struct ChgSample {
    pub state: BipartiteState,
    pub lambdas: Vec<f64>,
    pub phis: Vec<Vec<Complex>>,
}

pub fn random_chg_state(
    dim_a: usize,
    dim_b: usize,
    rank: usize,
    seed: Seed,
    max_attempts: usize,
) -> Result<BipartiteState, GenerationError> {
    let params = ChgParams {
        max_attempts,
        ..ChgParams::new(dim_a, dim_b, rank)
    };
    random_chg_state_with(&params, seed).map(|s| s.state)
}

/// Random CHG state built in a shared pair of local bases.
///
/// With Haar-random `P` on `H_A` and `Q` on `H_B`, each eigenvector has
/// coefficient matrix `A_i = P M_i Q†`, where row `k` of `M_i` holds a
/// single nonzero entry `d_ik` in column `(k + g_i) mod N_B`. Then every
/// `ρ_i = P |D_i|² P†` and every `θ_i` is diagonal in `Q`, so both families
/// commute exactly; `|d_ik| > 0` makes each `ρ_i` full rank. Eigenvectors in
/// the same shift group `g` are orthonormal through their `d` vectors, and
/// different groups are orthogonal because their supports are disjoint.
/// Attempts are repeated until the classification reports CHG.
pub fn random_chg_state_with(params: &ChgParams, seed: Seed) -> Result<ChgSample, GenerationError> {
    let ChgParams {
        dim_a,
        dim_b,
        rank,
        spectrum,
        max_attempts,
    } = *params;
    if dim_a == 0 || dim_b == 0 {
        return Err(invalid("dimensions must be positive"));
    }
    if dim_a > dim_b {
        return Err(invalid("dim_a must not exceed dim_b"));
    }
    let nmin = dim_a.min(dim_b);
    if rank == 0 || rank > nmin * nmin {
        return Err(invalid("rank must lie in 1..=min(dim_a, dim_b)²"));
    }
    if matches!(spectrum, SpectrumMode::Degenerate) && rank < 2 {
        return Err(invalid("a degenerate spectrum needs rank ≥ 2"));
    }
    let tol = Tolerance::default();
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    for _ in 0..max_attempts {
        let Some((lambdas, phis)) = chg_candidate(&mut rng, dim_a, dim_b, rank, spectrum) else {
            continue;
        };
        let Ok(state) = validate(mixture(&lambdas, &phis), dim_a, dim_b, &tol) else {
            continue;
        };
        let chg = match spectrum {
            SpectrumMode::Distinct { .. } => analyze(&state, &tol, FullRankMode::All)
                .is_ok_and(|a| a.class.is_chg() && a.eigensystem.rank() == rank),
            // A degenerate block has no preferred eigenbasis; check the one built here.
            SpectrumMode::Degenerate => constructed_is_chg(&lambdas, &phis, dim_a, dim_b, &tol),
        };
        if chg {
            return Ok(ChgSample { state, lambdas, phis });
        }
    }
    Err(GenerationError::GenerationFailed { attempts: max_attempts })
}

fn constructed_is_chg(lambdas: &[f64], phis: &[Vec<Complex>], dim_a: usize, dim_b: usize, tol: &Tolerance) -> bool {
    let es = EigenSystem {
        dim_a,
        dim_b,
        lambdas: lambdas.to_vec(),
        phis: phis.to_vec(),
        coeff_mats: phis.iter().map(|p| vector_to_coeff(p, dim_a, dim_b)).collect(),
        degeneracy_blocks: degeneracy_blocks(lambdas, tol.eps_eig),
    };
    let rf = reduced_family(&es);
    invariant_set(&es, &rf)
        .ok()
        .and_then(|inv| classify(&es, &rf, &inv, tol, FullRankMode::All).ok())
        .is_some_and(|c| c.is_chg())
}

type Components = (Vec<f64>, Vec<Vec<Complex>>);

fn chg_candidate(
    rng: &mut Xoshiro256StarStar,
    dim_a: usize,
    dim_b: usize,
    rank: usize,
    spectrum: SpectrumMode,
) -> Option<Components> {
    let p = haar_unitary_from(rng, dim_a);
    let q = haar_unitary_from(rng, dim_b);
    let q_dag = q.dagger();
    // Coordinates of the diagonal vectors, dim_a per shift group.
    let groups = rank.div_ceil(dim_a);
    if groups > dim_b {
        return None;
    }
    let mut phis = Vec::with_capacity(rank);
    let floor = 0.1 / (dim_a as f64).sqrt();
    for g in 0..groups {
        let count = (rank - g * dim_a).min(dim_a);
        let raw: Vec<Vec<Complex>> = (0..count).map(|_| (0..dim_a).map(|_| rng.complex_normal()).collect()).collect();
        let ds = gram_schmidt(raw)?;
        if ds.iter().flatten().any(|z| z.norm() < floor) {
            return None;
        }
        for d in ds {
            let mut m = ComplexMatrix::zeros(dim_a, dim_b);
            for (k, &z) in d.iter().enumerate() {
                m[(k, (k + g) % dim_b)] = z;
            }
            let a = &(&p * &m) * &q_dag;
            phis.push(a.into_vec());
        }
    }
    let lambdas = random_spectrum(rng, rank, spectrum);
    Some((lambdas, phis))
}

/// Pure state on `H_A ⊗ H_B ⊗ H_C` whose reduction `Tr_A` is a random CHG
/// state on `H_B ⊗ H_C`: `ψ = Σ_i √λ_i |a_i⟩ ⊗ |φ_i⟩` with Haar-random
/// orthonormal `|a_i⟩`.
pub fn random_tripartite_chg(
    dims: [usize; 3],
    rank: usize,
    spectrum: SpectrumMode,
    seed: Seed,
) -> Result<TripartiteState, GenerationError> {
    let [na, nb, nc] = dims;
    if rank > na {
        return Err(invalid("rank of Tr_A cannot exceed dim_a"));
    }
    let params = ChgParams {
        spectrum,
        ..ChgParams::new(nb, nc, rank)
    };
    let sample = random_chg_state_with(&params, seed)?;
    let ua = haar_unitary(na, seed ^ 0xA5A5_A5A5_A5A5_A5A5);
    let d = nb * nc;
    let mut psi = vec![Complex::new(0.0, 0.0); na * d];
    for (i, (l, phi)) in sample.lambdas.iter().zip(&sample.phis).enumerate() {
        let w = l.sqrt();
        for a in 0..na {
            let ca = ua[(a, i)] * w;
            for (j, &z) in phi.iter().enumerate() {
                psi[a * d + j] += ca * z;
            }
        }
    }
    let n = vec_norm(&psi);
    for z in psi.iter_mut() {
        *z /= n;
    }
    Ok(TripartiteState::from_parts(dims, psi))
}

/// `(u, w)` Haar-random on `H_A` and `H_B`.
pub fn random_local_unitaries(dim_a: usize, dim_b: usize, seed: Seed) -> (ComplexMatrix, ComplexMatrix) {
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    let u = haar_unitary_from(&mut rng, dim_a);
    let w = haar_unitary_from(&mut rng, dim_b);
    (u, w)
}

/// Random Hermitian matrix (GUE-like) with unit Frobenius norm.
pub fn random_hermitian(rng: &mut Xoshiro256StarStar, dim: usize) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            h[(i, j)] = rng.complex_normal();
        }
    }
    let h = h.hermitian_part().expect("square");
    let n = h.frobenius_norm();
    h.scale_real(1.0 / n)
}

/// `exp(i·t·H)` for Hermitian `H`.
pub fn unitary_exp(h: &ComplexMatrix, t: f64) -> ComplexMatrix {
    let eig = hermitian_eig(h, &Tolerance::default()).expect("Hermitian input");
    let phases: Vec<Complex> = eig.values.iter().map(|&l| Complex::from_polar(1.0, t * l)).collect();
    &(&eig.vectors * &ComplexMatrix::from_diag(&phases)) * &eig.vectors.dagger()
}

/// Conjugates `ρ` by `exp(iεH)` for a random Hermitian `H` on the whole of
/// `H_A ⊗ H_B` with `‖H‖_F = 1`. The spectrum is preserved; local-unitary
/// relatedness generically is not.
pub fn perturb_nonlocal(state: &BipartiteState, magnitude: f64, seed: Seed) -> Result<BipartiteState, GenerationError> {
    if !(magnitude > 0.0 && magnitude < 1.0) {
        return Err(invalid("magnitude must lie in (0, 1)"));
    }
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    let d = state.rho().rows();
    let h = random_hermitian(&mut rng, d);
    Ok(state.conjugate(&unitary_exp(&h, magnitude)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{rank as mat_rank, svd};

    #[test]
    fn haar_dim_one_is_a_phase() {
        let u = haar_unitary(1, 3);
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn haar_is_deterministic_and_unitary() {
        assert_eq!(haar_unitary(4, 99), haar_unitary(4, 99));
        assert_ne!(haar_unitary(4, 99), haar_unitary(4, 100));
        // Gram matrix check.
        let u = haar_unitary(3, 5);
        let g = &u.dagger() * &u;
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((g[(i, j)] - Complex::new(e, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn chg_generator_two_by_two() {
        let tol = Tolerance::default();
        let s = random_chg_state(2, 2, 2, 42, 64).unwrap();
        let a = analyze(&s, &tol, FullRankMode::All).unwrap();
        assert!(a.class.is_chg());
        // Independent check on the raw family.
        let fam = &a.family;
        let k = ComplexMatrix::commutator(&fam.rhos[0], &fam.rhos[1]).unwrap();
        assert!(k.frobenius_norm() < 1e-12);
        let k = ComplexMatrix::commutator(&fam.thetas[0], &fam.thetas[1]).unwrap();
        assert!(k.frobenius_norm() < 1e-12);
        for r in &fam.rhos {
            assert_eq!(mat_rank(r, &tol).unwrap(), 2);
        }
    }

    #[test]
    fn chg_generator_rectangular() {
        let tol = Tolerance::default();
        let s = random_chg_state(2, 3, 2, 11, 64).unwrap();
        let a = analyze(&s, &tol, FullRankMode::All).unwrap();
        assert!(a.class.is_chg());
        for (r, t) in a.family.rhos.iter().zip(&a.family.thetas) {
            assert_eq!(mat_rank(r, &tol).unwrap(), 2);
            assert!(mat_rank(t, &tol).unwrap() <= 2);
            assert_eq!(t.rows(), 3);
        }
    }

    #[test]
    fn chg_generator_rank_one_is_entangled_pure_state() {
        let tol = Tolerance::default();
        let s = random_chg_state(2, 2, 1, 8, 64).unwrap();
        let a = analyze(&s, &tol, FullRankMode::All).unwrap();
        assert_eq!(a.eigensystem.rank(), 1);
        let sv = svd(&a.eigensystem.coeff_mats[0]).unwrap().s;
        assert!(sv[1] > 1e-3, "Schmidt rank 2 expected");
        assert!((sv[0] - sv[1]).abs() > 1e-6 || sv[0] > 0.0);
    }

    #[test]
    fn chg_generator_parameter_errors() {
        assert!(matches!(random_chg_state(2, 2, 5, 1, 8), Err(GenerationError::InvalidParameters(_))));
        assert!(matches!(random_chg_state(3, 2, 1, 1, 8), Err(GenerationError::InvalidParameters(_))));
        // Rank above N_B cannot be high generic when N_A = N_B.
        assert!(matches!(
            random_chg_state(2, 2, 3, 1, 4),
            Err(GenerationError::GenerationFailed { attempts: 4 })
        ));
    }

    #[test]
    fn chg_generator_shifted_groups() {
        // N_A < rank ≤ N_B needs a second shift group.
        let tol = Tolerance::default();
        let s = random_chg_state(2, 3, 3, 5, 128).unwrap();
        let a = analyze(&s, &tol, FullRankMode::All).unwrap();
        assert_eq!(a.eigensystem.rank(), 3);
        assert!(a.class.is_chg());
        assert!(a.class.theta_nondegenerate(&tol));
    }

    #[test]
    fn degenerate_spectrum_mode() {
        let params = ChgParams {
            spectrum: SpectrumMode::Degenerate,
            ..ChgParams::new(2, 2, 2)
        };
        let s = random_chg_state_with(&params, 3).unwrap();
        assert!((s.lambdas[0] - s.lambdas[1]).abs() < 1e-15);
    }

    #[test]
    fn perturbation_preserves_spectrum() {
        let tol = Tolerance::default();
        let h = 0.5f64.sqrt();
        let c = |x: f64| Complex::new(x, 0.0);
        let bell = BipartiteState::from_pure(&[c(h), c(0.0), c(0.0), c(h)], 2, 2, &tol).unwrap();
        let p = perturb_nonlocal(&bell, 0.3, 17).unwrap();
        let e = hermitian_eig(p.rho(), &tol).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-12);
        assert!(e.values[1..].iter().all(|x| x.abs() < 1e-12));
        assert_eq!(p, perturb_nonlocal(&bell, 0.3, 17).unwrap());
        // Small magnitudes move the state by O(ε).
        let small = perturb_nonlocal(&bell, 1e-6, 17).unwrap();
        assert!((small.rho() - bell.rho()).frobenius_norm() < 1e-5);
        assert!(perturb_nonlocal(&bell, 1.5, 1).is_err());
    }

    #[test]
    fn tripartite_purification_reduces_to_chg() {
        let tol = Tolerance::default();
        let t = random_tripartite_chg([2, 2, 2], 2, SpectrumMode::default(), 21).unwrap();
        assert!((vec_norm(t.psi()) - 1.0).abs() < 1e-12);
        let r = crate::states::partial_trace_a(&t);
        let a = analyze(&r, &tol, FullRankMode::All).unwrap();
        assert!(a.class.is_chg());
        assert_eq!(a.eigensystem.rank(), 2);
    }
}
