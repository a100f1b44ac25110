//! Second, independent computation of the invariant set.
//!
//! The reduced families come from contracting `|φ_i⟩⟨φ_i|` index by index,
//! never from the coefficient matrices, and every trace is an explicit sum.
//! `J^s` is taken from `ρ^s` followed by the two nested partial traces
//! rather than from the eigenvalues.

use alloc::vec;
use alloc::vec::Vec;

use crate::invariants::{RealMatrix, Tensor3};
use crate::invariants::InvariantSet;
use crate::numerics::{hermitian_eig, Complex, LinalgError, Tolerance};
use crate::states::BipartiteState;

type Dense = Vec<Vec<Complex>>;

fn zero(n: usize, m: usize) -> Dense {
    vec![vec![Complex::new(0.0, 0.0); m]; n]
}

/// `Tr_B |φ⟩⟨φ|`: `out[k][k'] = Σ_l φ[k·N_B + l] φ*[k'·N_B + l]`.
fn reduce_b(phi: &[Complex], na: usize, nb: usize) -> Dense {
    let mut out = zero(na, na);
    for k in 0..na {
        for kp in 0..na {
            for l in 0..nb {
                out[k][kp] += phi[k * nb + l] * phi[kp * nb + l].conj();
            }
        }
    }
    out
}

/// `(Tr_A |φ⟩⟨φ|)*`.
fn reduce_a_conj(phi: &[Complex], na: usize, nb: usize) -> Dense {
    let mut out = zero(nb, nb);
    for l in 0..nb {
        for lp in 0..nb {
            let mut s = Complex::new(0.0, 0.0);
            for k in 0..na {
                s += phi[k * nb + l] * phi[k * nb + lp].conj();
            }
            out[l][lp] = s.conj();
        }
    }
    out
}

fn trace2(a: &Dense, b: &Dense) -> Complex {
    let n = a.len();
    let mut s = Complex::new(0.0, 0.0);
    for x in 0..n {
        for y in 0..n {
            s += a[x][y] * b[y][x];
        }
    }
    s
}

fn trace3(a: &Dense, b: &Dense, c: &Dense) -> Complex {
    let n = a.len();
    let mut s = Complex::new(0.0, 0.0);
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                s += a[x][y] * b[y][z] * c[z][x];
            }
        }
    }
    s
}

fn square_mul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut out = zero(n, n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

/// Independent recomputation of `(J, Ω, Θ, X, Y)` for cross-validation.
///
/// Eigenvectors are taken from the Hermitian eigensolver on `ρ` directly;
/// eigenvalues above `eps_zero` define the rank.
pub fn oracle_invariants(state: &BipartiteState, tol: &Tolerance) -> Result<InvariantSet, LinalgError> {
    let (na, nb) = state.dims();
    let eig = hermitian_eig(state.rho(), tol)?;
    let n = eig.values.iter().take_while(|&&l| l > tol.eps_zero).count();
    let phis: Vec<Vec<Complex>> = (0..n).map(|j| eig.vector(j)).collect();

    let rhos: Vec<Dense> = phis.iter().map(|p| reduce_b(p, na, nb)).collect();
    let thetas: Vec<Dense> = phis.iter().map(|p| reduce_a_conj(p, na, nb)).collect();

    let nmin = na.min(nb);
    let n_sq = nmin * nmin;
    let size = n_sq.max(n);
    let mut omega = RealMatrix::zeros(size);
    let mut theta_mat = RealMatrix::zeros(size);
    let mut x_tensor = Tensor3::zeros(n);
    let mut y_tensor = Tensor3::zeros(n);
    for i in 0..n {
        for j in 0..n {
            omega.set(i, j, trace2(&rhos[i], &rhos[j]).re);
            theta_mat.set(i, j, trace2(&thetas[i], &thetas[j]).re);
            for k in 0..n {
                x_tensor.set(i, j, k, trace3(&rhos[i], &rhos[j], &rhos[k]));
                y_tensor.set(i, j, k, trace3(&thetas[i], &thetas[j], &thetas[k]));
            }
        }
    }

    // J^s = Tr_B(Tr_A ρ^s).
    let d = na * nb;
    let rho: Dense = (0..d).map(|i| (0..d).map(|j| state.rho()[(i, j)]).collect()).collect();
    let mut power = rho.clone();
    let mut j_moments = Vec::with_capacity(n);
    for s in 1..=n {
        if s > 1 {
            power = square_mul(&power, &rho);
        }
        let mut reduced = zero(nb, nb);
        for l in 0..nb {
            for lp in 0..nb {
                for k in 0..na {
                    reduced[l][lp] += power[k * nb + l][k * nb + lp];
                }
            }
        }
        let total: Complex = (0..nb).map(|l| reduced[l][l]).sum();
        j_moments.push(total.re);
    }

    Ok(InvariantSet {
        j_moments,
        omega,
        theta_mat,
        x_tensor,
        y_tensor,
        n,
        n_sq,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_oracle() {
        let tol = Tolerance::default();
        let h = 0.5f64.sqrt();
        let c = |x: f64| Complex::new(x, 0.0);
        let s = BipartiteState::from_pure(&[c(h), c(0.0), c(0.0), c(h)], 2, 2, &tol).unwrap();
        let inv = oracle_invariants(&s, &tol).unwrap();
        assert!((inv.omega.get(0, 0) - 0.5).abs() < 1e-12);
        assert!((inv.x_tensor.get(0, 0, 0) - c(0.25)).norm() < 1e-12);
    }

    #[test]
    fn product_oracle() {
        let tol = Tolerance::default();
        let c = |x: f64| Complex::new(x, 0.0);
        let s = BipartiteState::from_pure(&[c(1.0), c(0.0), c(0.0), c(0.0)], 2, 2, &tol).unwrap();
        let inv = oracle_invariants(&s, &tol).unwrap();
        assert!((inv.x_tensor.get(0, 0, 0) - c(1.0)).norm() < 1e-12);
        assert!((inv.y_tensor.get(0, 0, 0) - c(1.0)).norm() < 1e-12);
    }
}
