use alloc::vec::Vec;


use super::matrix::{inner, vec_norm};
use super::{fix_phase, hermitian_eig, Complex, ComplexMatrix, LinalgError, Tolerance};

/// `m = U diag(s) V†` with `U` (rows × rows) and `V` (cols × cols) unitary and
/// `s` (length `min(rows, cols)`) descending and nonnegative.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub s: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn reassemble(&self) -> ComplexMatrix {
        let (r, c) = (self.u.rows(), self.v.rows());
        let mut sigma = ComplexMatrix::zeros(r, c);
        for (i, &s) in self.s.iter().enumerate() {
            sigma[(i, i)] = Complex::new(s, 0.0);
        }
        &(&self.u * &sigma) * &self.v.dagger()
    }
}

/// Singular value decomposition through the Hermitian eigenproblem of `m†m`.
///
/// Right singular vectors are phase-fixed (largest-magnitude entry real and
/// positive); left singular vectors are `m v_j / s_j`, re-orthogonalized, and
/// completed from the eigenvectors of `m m†` when `m` is rank deficient.
pub fn svd(m: &ComplexMatrix) -> Result<Svd, LinalgError> {
    if !m.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let (r, c) = (m.rows(), m.cols());
    let k = r.min(c);
    let loose = Tolerance::default();

    let gram = &m.dagger() * m;
    let eig = hermitian_eig(&gram, &loose)?;

    let mut cols: Vec<(f64, Vec<Complex>, Vec<Complex>)> = (0..c)
        .map(|j| {
            let mut vj = eig.vector(j);
            fix_phase(&mut vj);
            let y = m.mul_vec(&vj);
            (vec_norm(&y), vj, y)
        })
        .collect();
    // Norms of m v_j are accurate to working precision even where the
    // eigenvalues of m†m are not; reorder by them.
    cols.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());

    let s_max = cols.first().map(|t| t.0).unwrap_or(0.0);
    let mut s = Vec::with_capacity(k);
    let mut u_cols: Vec<Vec<Complex>> = Vec::with_capacity(r);
    for (sj, _, y) in cols.iter().take(k) {
        s.push(*sj);
        if *sj > 1e-13 * s_max && *sj > 0.0 {
            let mut uj: Vec<Complex> = y.iter().map(|z| z / *sj).collect();
            if orthonormalize_against(&mut uj, &u_cols) {
                u_cols.push(uj);
                continue;
            }
        }
        // Negligible singular value; the remaining columns are completed below.
        break;
    }
    if u_cols.len() < r {
        let left = hermitian_eig(&(m * &m.dagger()), &loose)?;
        let mut candidates: Vec<Vec<Complex>> = (0..r).rev().map(|j| left.vector(j)).collect();
        for i in 0..r {
            let mut e = alloc::vec![Complex::new(0.0, 0.0); r];
            e[i] = Complex::new(1.0, 0.0);
            candidates.push(e);
        }
        for mut cand in candidates {
            if u_cols.len() == r {
                break;
            }
            if orthonormalize_against(&mut cand, &u_cols) {
                fix_phase(&mut cand);
                u_cols.push(cand);
            }
        }
    }
    while s.len() < k {
        let j = s.len();
        s.push(cols[j].0);
    }

    let u = ComplexMatrix::from_columns(r, &u_cols);
    let v_cols: Vec<Vec<Complex>> = cols.into_iter().map(|(_, v, _)| v).collect();
    let v = ComplexMatrix::from_columns(c, &v_cols);
    Ok(Svd { u, s, v })
}

/// Two passes of Gram–Schmidt against `basis`; returns false when `v` is
/// (numerically) in their span.
fn orthonormalize_against(v: &mut [Complex], basis: &[Vec<Complex>]) -> bool {
    let start = vec_norm(v);
    if start == 0.0 {
        return false;
    }
    for _ in 0..2 {
        for b in basis {
            let p = inner(b, v);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= p * y;
            }
        }
    }
    let n = vec_norm(v);
    if n <= 1e-6 * start {
        return false;
    }
    for x in v.iter_mut() {
        *x /= n;
    }
    true
}

/// Numerical rank: singular values above `eps_zero · s_max`.
pub fn rank(m: &ComplexMatrix, tol: &Tolerance) -> Result<usize, LinalgError> {
    let d = svd(m)?;
    let s_max = d.s.first().copied().unwrap_or(0.0);
    if s_max == 0.0 {
        return Ok(0);
    }
    Ok(d.s.iter().filter(|&&s| s > tol.eps_zero * s_max).count())
}

/// Closest unitary to a square matrix in Frobenius norm (`U V†`).
pub fn polar_unitary(m: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    m.require_square()?;
    let d = svd(m)?;
    Ok(&d.u * &d.v.dagger())
}
