use super::{Complex, ComplexMatrix, LinalgError};

/// Determinant by LU factorization with partial pivoting.
pub fn det(m: &ComplexMatrix) -> Result<Complex, LinalgError> {
    m.require_square()?;
    let n = m.rows();
    let mut a = m.clone();
    let mut d = Complex::new(1.0, 0.0);
    for k in 0..n {
        let mut piv = k;
        let mut best = a[(k, k)].norm();
        for i in (k + 1)..n {
            let v = a[(i, k)].norm();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best == 0.0 {
            return Ok(Complex::new(0.0, 0.0));
        }
        if piv != k {
            for j in 0..n {
                let tmp = a[(k, j)];
                a[(k, j)] = a[(piv, j)];
                a[(piv, j)] = tmp;
            }
            d = -d;
        }
        let pivot = a[(k, k)];
        d *= pivot;
        for i in (k + 1)..n {
            let f = a[(i, k)] / pivot;
            if f.norm_sqr() == 0.0 {
                continue;
            }
            for j in (k + 1)..n {
                let akj = a[(k, j)];
                a[(i, j)] -= f * akj;
            }
        }
    }
    Ok(d)
}
