//! Construction of `u⊗w` with `A'_j = e^{iα_j} u A_j wᵀ`.
//!
//! Starting points come from a joint eigenbasis of the commuting families
//! and from the singular vectors of individual coefficient matrices. Each is
//! refined by alternating Procrustes steps and accepted only if every
//! coefficient matrix and the reassembled density matrix match.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec;
use alloc::vec::Vec;

use super::simdiag::{joint_eigenbasis, CombinationWeights};
use super::{EquivalenceError, OrderingCandidate};
use crate::invariants::reduced_family;
use crate::numerics::{inner, svd, Complex, ComplexMatrix, Tolerance};
use crate::states::{coeff_to_vector, EigenSystem};

const POLISH_SWEEPS: usize = 60;
const EDGE_THRESHOLD: f64 = 1e-6;
const WEIGHT_SEED: u64 = 0x5EED_0F_1A7;

/// Local unitaries relating two states, with the achieved accuracy.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    /// Acts on subsystem A.
    pub u: ComplexMatrix,
    /// Acts on subsystem B.
    pub w: ComplexMatrix,
    /// Unitary on the purifying party, present for tripartite witnesses.
    pub ancilla: Option<ComplexMatrix>,
    /// `‖ρ' − (u⊗w) ρ (u⊗w)†‖_F`, or the state-vector distance for
    /// tripartite witnesses.
    pub residual: f64,
    /// `min_α ‖A'_j − e^{iα} u A_j wᵀ‖_F` per eigenstate.
    pub coefficient_residuals: Vec<f64>,
}

/// Phase `e^{iα}` best aligning `x` with `y`, or 1 when they are orthogonal.
fn align_phase(x: &ComplexMatrix, y: &ComplexMatrix) -> Complex {
    let z = inner(x.as_slice(), y.as_slice());
    if z.norm() > 1e-300 {
        z / z.norm()
    } else {
        Complex::new(1.0, 0.0)
    }
}

fn transformed(u: &ComplexMatrix, a: &ComplexMatrix, wt: &ComplexMatrix) -> ComplexMatrix {
    &(u * a) * wt
}

/// Per-matrix residuals after optimal phase alignment.
pub(crate) fn coefficient_residuals(
    a: &[ComplexMatrix],
    b: &[ComplexMatrix],
    u: &ComplexMatrix,
    w: &ComplexMatrix,
) -> Vec<f64> {
    let wt = w.transpose();
    a.iter()
        .zip(b)
        .map(|(aj, bj)| {
            let t = transformed(u, aj, &wt);
            let e = align_phase(&t, bj);
            (bj - &t.scale(e)).frobenius_norm()
        })
        .collect()
}

/// `‖ρ' − (u⊗w) ρ (u⊗w)†‖_F` on arbitrary density matrices.
pub(crate) fn density_residual(
    rho1: &ComplexMatrix,
    rho2: &ComplexMatrix,
    u: &ComplexMatrix,
    w: &ComplexMatrix,
) -> f64 {
    let k = u.kron(w);
    let moved = &(&k * rho1) * &k.dagger();
    (rho2 - &moved).frobenius_norm()
}

/// Unitary `X` maximizing `Re Tr(X M)`.
fn procrustes(m: &ComplexMatrix) -> Result<ComplexMatrix, EquivalenceError> {
    let d = svd(m)?;
    Ok(&d.v * &d.u.dagger())
}

/// Alternating maximization of `Re Σ_j Tr(B_j† e^{iα_j} u A_j wᵀ)`.
fn polish(
    a: &[ComplexMatrix],
    b: &[ComplexMatrix],
    mut u: ComplexMatrix,
    mut w: ComplexMatrix,
) -> Result<(ComplexMatrix, ComplexMatrix), EquivalenceError> {
    let mut previous = f64::INFINITY;
    for _ in 0..POLISH_SWEEPS {
        let wt = w.transpose();
        let phases: Vec<Complex> = a.iter().zip(b).map(|(aj, bj)| align_phase(&transformed(&u, aj, &wt), bj)).collect();

        let na = u.rows();
        let mut m = ComplexMatrix::zeros(na, na);
        for ((aj, bj), e) in a.iter().zip(b).zip(&phases) {
            m = &m + &(&(aj * &wt) * &bj.dagger()).scale(*e);
        }
        u = procrustes(&m)?;

        let nb = w.rows();
        let mut n = ComplexMatrix::zeros(nb, nb);
        for ((aj, bj), e) in a.iter().zip(b).zip(&phases) {
            n = &n + &(&(&bj.dagger() * &u) * aj).scale(*e);
        }
        w = procrustes(&n)?.transpose();

        let misfit: f64 = coefficient_residuals(a, b, &u, &w).iter().map(|r| r * r).sum();
        if misfit < 1e-30 || (previous - misfit).abs() <= 1e-16 * previous.max(1e-300) {
            break;
        }
        previous = misfit;
    }
    Ok((u, w))
}

/// Solves `α_j + φ_k − ψ_l = arg(C'_j[k,l] / C_j[k,l])` by propagation.
/// Unconstrained variables are pinned to zero.
fn solve_phases(c1: &[ComplexMatrix], c2: &[ComplexMatrix]) -> Option<(Vec<f64>, Vec<f64>)> {
    let (na, nb) = (c1[0].rows(), c1[0].cols());
    let n = c1.len();
    // Variables: α_0..α_n, φ_0..φ_na, ψ_0..ψ_nb.
    let mut edges: Vec<(f64, [usize; 3], f64)> = Vec::new();
    for j in 0..n {
        for k in 0..na {
            for l in 0..nb {
                let x = c1[j][(k, l)];
                let y = c2[j][(k, l)];
                if (x.norm() - y.norm()).abs() > 1e-6 {
                    return None;
                }
                if x.norm() > EDGE_THRESHOLD {
                    edges.push((x.norm(), [j, n + k, n + na + l], (y / x).arg()));
                }
            }
        }
    }
    edges.sort_by(|p, q| q.0.total_cmp(&p.0));
    let sign = [1.0, 1.0, -1.0];
    let mut value: Vec<Option<f64>> = vec![None; n + na + nb];
    loop {
        let mut progress = false;
        let mut stuck: Option<usize> = None;
        for (_, vars, delta) in &edges {
            let unknown: Vec<usize> = (0..3).filter(|&p| value[vars[p]].is_none()).collect();
            match unknown.len() {
                0 => {}
                1 => {
                    let p = unknown[0];
                    let mut rest = *delta;
                    for q in 0..3 {
                        if q != p {
                            rest -= sign[q] * value[vars[q]].unwrap_or(0.0);
                        }
                    }
                    value[vars[p]] = Some(rest * sign[p]);
                    progress = true;
                }
                _ => {
                    if stuck.is_none() {
                        stuck = Some(vars[unknown[0]]);
                    }
                }
            }
        }
        if !progress {
            match stuck {
                Some(v) => value[v] = Some(0.0),
                None => break,
            }
        }
    }
    let phi = (0..na).map(|k| value[n + k].unwrap_or(0.0)).collect();
    let psi = (0..nb).map(|l| value[n + na + l].unwrap_or(0.0)).collect();
    Some((phi, psi))
}

fn phase_diag(angles: &[f64], conj: bool) -> ComplexMatrix {
    let d: Vec<Complex> = angles
        .iter()
        .map(|&t| Complex::from_polar(1.0, if conj { -t } else { t }))
        .collect();
    ComplexMatrix::from_diag(&d)
}

/// Candidate from joint eigenbases of `{ρ_i}` and `{θ_i}` on both sides.
fn joint_basis_candidate(
    es1: &EigenSystem,
    a2: &[ComplexMatrix],
    tol: &Tolerance,
) -> Result<Option<(ComplexMatrix, ComplexMatrix)>, EquivalenceError> {
    let rf1 = reduced_family(es1);
    let rhos2: Vec<ComplexMatrix> = a2.iter().map(|a| a * &a.dagger()).collect();
    let thetas2: Vec<ComplexMatrix> = a2.iter().map(|a| &a.dagger() * a).collect();
    let weights = CombinationWeights::new(a2.len(), WEIGHT_SEED);

    let p1 = joint_eigenbasis(&rf1.rhos, &weights, tol)?;
    let p2 = joint_eigenbasis(&rhos2, &weights, tol)?;
    let q1 = joint_eigenbasis(&rf1.thetas, &weights, tol)?;
    let q2 = joint_eigenbasis(&thetas2, &weights, tol)?;

    let c1: Vec<ComplexMatrix> = es1.coeff_mats.iter().map(|a| &(&p1.dagger() * a) * &q1).collect();
    let c2: Vec<ComplexMatrix> = a2.iter().map(|a| &(&p2.dagger() * a) * &q2).collect();
    let Some((phi, psi)) = solve_phases(&c1, &c2) else {
        return Ok(None);
    };
    let u = &(&p2 * &phase_diag(&phi, false)) * &p1.dagger();
    // wᵀ = Q Ψ̄ Q'†, so w = conj(Q') Ψ̄ Qᵀ.
    let w = &(&q2.conj() * &phase_diag(&psi, true)) * &q1.transpose();
    Ok(Some((u, w)))
}

/// Smallest gap between consecutive singular values; used to rank references.
fn singular_gap(s: &[f64]) -> f64 {
    s.windows(2).map(|p| p[0] - p[1]).fold(f64::INFINITY, f64::min)
}

/// Builds `(u, w)` relating the eigenstates of two states under `ordering`.
///
/// Fails with [`EquivalenceError::WitnessNotFound`] when the singular values
/// of some pair `A_j`, `A'_j` differ, or when no candidate reaches
/// `eps_match` on every coefficient matrix and on the reassembled state.
pub fn extract_witness(
    es1: &EigenSystem,
    es2: &EigenSystem,
    ordering: &OrderingCandidate,
    tol: &Tolerance,
) -> Result<Witness, EquivalenceError> {
    let n = es1.rank();
    if es2.rank() != n || ordering.len() != n || (es1.dim_a, es1.dim_b) != (es2.dim_a, es2.dim_b) {
        return Err(EquivalenceError::WitnessNotFound);
    }
    let a1 = &es1.coeff_mats;
    let a2: Vec<ComplexMatrix> = (0..n).map(|j| es2.coeff_mats[ordering.map(j)].clone()).collect();
    let lambdas2: Vec<f64> = (0..n).map(|j| es2.lambdas[ordering.map(j)]).collect();

    let mut svds1 = Vec::with_capacity(n);
    let mut svds2 = Vec::with_capacity(n);
    for j in 0..n {
        let s1 = svd(&a1[j])?;
        let s2 = svd(&a2[j])?;
        if s1.s.iter().zip(&s2.s).any(|(x, y)| (x - y).abs() > tol.eps_match) {
            return Err(EquivalenceError::WitnessNotFound);
        }
        svds1.push(s1);
        svds2.push(s2);
    }

    let rho1 = es1.reassemble();
    let rho2 = {
        let mut r = ComplexMatrix::zeros(rho1.rows(), rho1.cols());
        for (a, &l) in a2.iter().zip(&lambdas2) {
            let v = coeff_to_vector(a);
            r = &r + &ComplexMatrix::outer(&v, &v).scale_real(l);
        }
        r
    };

    let accept = |u: &ComplexMatrix, w: &ComplexMatrix| -> Option<Witness> {
        let coeff = coefficient_residuals(a1, &a2, u, w);
        if coeff.iter().any(|r| !(*r <= tol.eps_match)) {
            return None;
        }
        let residual = density_residual(&rho1, &rho2, u, w);
        (residual <= tol.eps_match).then(|| Witness {
            u: u.clone(),
            w: w.clone(),
            ancilla: None,
            residual,
            coefficient_residuals: coeff,
        })
    };

    let mut starts: Vec<(ComplexMatrix, ComplexMatrix)> = Vec::new();
    if let Some(c) = joint_basis_candidate(es1, &a2, tol)? {
        starts.push(c);
    }
    let mut refs: Vec<usize> = (0..n).collect();
    refs.sort_by(|&x, &y| singular_gap(&svds1[y].s).total_cmp(&singular_gap(&svds1[x].s)));
    for &r in &refs {
        let u = &svds2[r].u * &svds1[r].u.dagger();
        let w = &svds2[r].v.conj() * &svds1[r].v.transpose();
        starts.push((u, w));
    }

    for (u, w) in starts {
        if let Some(wit) = accept(&u, &w) {
            return Ok(wit);
        }
        let (u, w) = polish(a1, &a2, u, w)?;
        if let Some(wit) = accept(&u, &w) {
            return Ok(wit);
        }
    }
    Err(EquivalenceError::WitnessNotFound)
}
