use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{Complex, ComplexMatrix, LinalgError, Tolerance};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in descending order with the matching orthonormal
/// eigenvectors stored as columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// `V diag(λ) V†`.
    pub fn reassemble(&self) -> ComplexMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            for i in 0..n {
                scaled[(i, j)] *= self.values[j];
            }
        }
        &scaled * &self.vectors.dagger()
    }

    pub fn vector(&self, j: usize) -> Vec<Complex> {
        self.vectors.column(j)
    }
}

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
///
/// The input is accepted when `‖m − m†‖_F ≤ eps_zero · max(1, ‖m‖_F)`; its
/// Hermitian part is then diagonalized.
pub fn hermitian_eig(m: &ComplexMatrix, tol: &Tolerance) -> Result<EigenDecomposition, LinalgError> {
    m.require_square()?;
    if !m.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let norm = m.frobenius_norm();
    let defect = m.hermiticity_defect()?;
    if defect > tol.eps_zero * norm.max(1.0) {
        return Err(LinalgError::NonHermitian { defect });
    }

    let n = m.rows();
    let mut a = m.hermitian_part()?;
    let mut v = ComplexMatrix::identity(n);

    let mut converged = n <= 1;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let off = off_diagonal_norm(&a);
        if off <= 1e-15 * norm || off == 0.0 {
            converged = true;
            break;
        }
        // Skip negligible pivots; the sweep still visits every pair.
        let skip = 1e-18 * norm;
        for p in 0..n {
            for q in (p + 1)..n {
                let g = a[(p, q)];
                let g_abs = g.norm();
                if g_abs <= skip {
                    continue;
                }
                rotate(&mut a, &mut v, p, q, g, g_abs);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > 1e-15 * norm {
        return Err(LinalgError::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    // Descending; stable ties keep the Jacobi column order.
    order.sort_by(|&i, &j| a[(j, j)].re.partial_cmp(&a[(i, i)].re).unwrap());
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &v.column(src));
    }
    Ok(EigenDecomposition { values, vectors })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            s += a[(p, q)].norm_sqr();
        }
    }
    (2.0 * s).sqrt()
}

/// Applies `a ← J† a J`, `v ← v J` for the unitary plane rotation that
/// annihilates `a[p][q]`.
///
/// With `e = g/|g|` the rotation is `J_pp = J_qq = c`, `J_pq = s·e`,
/// `J_qp = −s·e*`, i.e. a real Jacobi rotation conjugated by `diag(1, e*)`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, g: Complex, g_abs: f64) {
    let n = a.rows();
    let e = g / g_abs;
    let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * g_abs);
    let t = if tau == 0.0 {
        1.0
    } else {
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let se = e * s;
    let se_conj = se.conj();

    // Columns: B = A J.
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * se_conj;
        a[(k, q)] = akp * se + akq * c;
    }
    // Rows: J† B.
    for k in 0..n {
        let bpk = a[(p, k)];
        let bqk = a[(q, k)];
        a[(p, k)] = bpk * c - bqk * se;
        a[(q, k)] = bpk * se_conj + bqk * c;
    }
    a[(p, q)] = Complex::new(0.0, 0.0);
    a[(q, p)] = Complex::new(0.0, 0.0);
    a[(p, p)] = Complex::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * se_conj;
        v[(k, q)] = vkp * se + vkq * c;
    }
}
