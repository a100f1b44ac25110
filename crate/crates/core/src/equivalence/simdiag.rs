//! Joint eigenbasis of a commuting Hermitian family.
//!
//! A random combination `Σ c_i F_i` is diagonalized; clusters of equal
//! eigenvalues are then split with a second, independent combination
//! projected onto each cluster.

use alloc::vec::Vec;

use crate::numerics::{hermitian_eig, Complex, ComplexMatrix, LinalgError, Tolerance};
use crate::states::degeneracy_blocks;
use crate::testkit::Xoshiro256StarStar;

/// Weights for the two combination rounds, drawn from a fixed seed so that
/// both states of a pair see the same combinations.
#[derive(Debug, Clone)]
pub(crate) struct CombinationWeights {
    first: Vec<f64>,
    second: Vec<f64>,
}

impl CombinationWeights {
    pub(crate) fn new(n: usize, seed: u64) -> Self {
        let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
        let first = (0..n).map(|_| 0.5 + rng.uniform()).collect();
        let second = (0..n).map(|_| 0.5 + rng.uniform()).collect();
        Self { first, second }
    }
}

fn combine(family: &[ComplexMatrix], weights: &[f64]) -> ComplexMatrix {
    let d = family[0].rows();
    let mut h = ComplexMatrix::zeros(d, d);
    for (f, &c) in family.iter().zip(weights) {
        h = &h + &f.scale_real(c);
    }
    h
}

/// Unitary whose columns simultaneously diagonalize `family`.
pub(crate) fn joint_eigenbasis(
    family: &[ComplexMatrix],
    weights: &CombinationWeights,
    tol: &Tolerance,
) -> Result<ComplexMatrix, LinalgError> {
    let h1 = combine(family, &weights.first);
    let first = hermitian_eig(&h1, tol)?;
    let mut basis = first.vectors.clone();
    let d = basis.rows();

    let h2 = combine(family, &weights.second);
    for block in degeneracy_blocks(&first.values, tol.eps_eig) {
        if block.len() < 2 {
            continue;
        }
        let sub = basis.submatrix(0, d, block.start, block.end);
        let projected = &(&sub.dagger() * &h2) * &sub;
        let refine = hermitian_eig(&projected, tol)?;
        let rotated = &sub * &refine.vectors;
        for (offset, j) in block.enumerate() {
            let col: Vec<Complex> = rotated.column(offset);
            basis.set_column(j, &col);
        }
    }
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::haar_unitary;

    #[test]
    fn diagonalizes_commuting_family() {
        let tol = Tolerance::default();
        let p = haar_unitary(3, 4);
        let f1 = &(&p * &ComplexMatrix::from_real_diag(&[0.5, 0.5, 0.0])) * &p.dagger();
        let f2 = &(&p * &ComplexMatrix::from_real_diag(&[0.2, 0.3, 0.5])) * &p.dagger();
        let family = [f1, f2];
        let basis = joint_eigenbasis(&family, &CombinationWeights::new(2, 1), &tol).unwrap();
        assert!(basis.unitarity_defect() < 1e-12);
        for f in &family {
            let d = &(&basis.dagger() * f) * &basis;
            for i in 0..3 {
                for j in 0..3 {
                    if i != j {
                        assert!(d[(i, j)].norm() < 1e-12);
                    }
                }
            }
        }
    }
}
