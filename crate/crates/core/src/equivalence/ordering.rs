use alloc::vec::Vec;
use core::ops::Range;

use super::EquivalenceError;
use crate::numerics::Tolerance;
use crate::states::EigenSystem;

/// Default cap on the number of enumerated orderings (`7!·2`).
pub const DEFAULT_MAX_ORDERINGS: usize = 10_080;

/// Matches eigenstate `i` of the first state with eigenstate `perm[i]` of
/// the second. Only indices within one degeneracy block are exchanged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderingCandidate {
    perm: Vec<usize>,
}

impl OrderingCandidate {
    pub fn identity(n: usize) -> Self {
        Self { perm: (0..n).collect() }
    }

    pub fn from_perm(perm: Vec<usize>) -> Self {
        Self { perm }
    }

    #[inline]
    pub fn map(&self, i: usize) -> usize {
        self.perm[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }
}

/// First index where the two spectra disagree beyond `eps_eig`, if any.
pub(crate) fn spectrum_mismatch(es1: &EigenSystem, es2: &EigenSystem, tol: &Tolerance) -> Option<usize> {
    if es1.rank() != es2.rank() {
        return Some(es1.rank().min(es2.rank()));
    }
    es1.lambdas
        .iter()
        .zip(&es2.lambdas)
        .position(|(a, b)| (a - b).abs() > tol.eps_eig)
}

fn factorial_capped(n: usize, cap: usize) -> Option<usize> {
    (1..=n).try_fold(1usize, |acc, k| acc.checked_mul(k).filter(|v| *v <= cap))
}

/// All block-respecting orderings, identity first.
///
/// Empty when the ranks or the eigenvalue sequences differ (within
/// `eps_eig`), or when the degeneracy blocks do not line up.
pub fn ordering_candidates(
    es1: &EigenSystem,
    es2: &EigenSystem,
    tol: &Tolerance,
    max_orderings: usize,
) -> Result<Vec<OrderingCandidate>, EquivalenceError> {
    if spectrum_mismatch(es1, es2, tol).is_some() || es1.degeneracy_blocks != es2.degeneracy_blocks {
        return Ok(Vec::new());
    }
    let blocks = &es1.degeneracy_blocks;
    let mut total: usize = 1;
    for b in blocks {
        total = factorial_capped(b.len(), max_orderings)
            .and_then(|f| total.checked_mul(f))
            .filter(|t| *t <= max_orderings)
            .ok_or(EquivalenceError::TooManyOrderings { cap: max_orderings })?;
    }

    let n = es1.rank();
    let mut per_block: Vec<Vec<usize>> = blocks.iter().map(|b| b.clone().collect()).collect();
    let mut out = Vec::with_capacity(total);
    loop {
        let mut perm = Vec::with_capacity(n);
        for p in &per_block {
            perm.extend_from_slice(p);
        }
        out.push(OrderingCandidate { perm });
        // Odometer over blocks; the last block advances fastest.
        let mut advanced = false;
        for (idx, block) in blocks.iter().enumerate().rev() {
            if next_permutation(&mut per_block[idx]) {
                advanced = true;
                break;
            }
            per_block[idx] = block.clone().collect();
        }
        if !advanced {
            break;
        }
    }
    debug_assert_eq!(out.len(), total);
    Ok(out)
}

/// Lexicographic successor; false (and unchanged) at the last permutation.
fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// True when `i` and `j` lie in the same degeneracy block.
pub(crate) fn same_block(blocks: &[Range<usize>], i: usize, j: usize) -> bool {
    blocks.iter().any(|b| b.contains(&i) && b.contains(&j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::degeneracy_blocks;
    use alloc::vec;

    fn es(lambdas: &[f64]) -> EigenSystem {
        EigenSystem {
            dim_a: 2,
            dim_b: 2,
            lambdas: lambdas.to_vec(),
            phis: Vec::new(),
            coeff_mats: Vec::new(),
            degeneracy_blocks: degeneracy_blocks(lambdas, Tolerance::default().eps_eig),
        }
    }

    #[test]
    fn distinct_spectrum_single_candidate() {
        let t = Tolerance::default();
        let a = es(&[0.5, 0.3, 0.2]);
        let c = ordering_candidates(&a, &a, &t, DEFAULT_MAX_ORDERINGS).unwrap();
        assert_eq!(c, vec![OrderingCandidate::identity(3)]);
    }

    #[test]
    fn one_degenerate_pair() {
        let t = Tolerance::default();
        let a = es(&[0.5, 0.25, 0.25]);
        let c = ordering_candidates(&a, &a, &t, DEFAULT_MAX_ORDERINGS).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].as_slice(), &[0, 1, 2]);
        assert_eq!(c[1].as_slice(), &[0, 2, 1]);
    }

    #[test]
    fn differing_spectra_give_nothing() {
        let t = Tolerance::default();
        let c = ordering_candidates(&es(&[0.6, 0.4]), &es(&[0.5, 0.5]), &t, DEFAULT_MAX_ORDERINGS).unwrap();
        assert!(c.is_empty());
        let c = ordering_candidates(&es(&[1.0]), &es(&[0.5, 0.5]), &t, DEFAULT_MAX_ORDERINGS).unwrap();
        assert!(c.is_empty());
    }

    #[test]
    fn cap_enforced() {
        let t = Tolerance::default();
        let a = es(&[0.25; 4]);
        assert_eq!(ordering_candidates(&a, &a, &t, 24).unwrap().len(), 24);
        assert!(matches!(
            ordering_candidates(&a, &a, &t, 23),
            Err(EquivalenceError::TooManyOrderings { cap: 23 })
        ));
    }

    #[test]
    fn product_of_block_factorials() {
        let t = Tolerance::default();
        let a = es(&[0.2, 0.2, 0.15, 0.15, 0.15, 0.15]);
        let c = ordering_candidates(&a, &a, &t, DEFAULT_MAX_ORDERINGS).unwrap();
        assert_eq!(c.len(), 2 * 24);
        for cand in &c {
            for (i, &p) in cand.as_slice().iter().enumerate() {
                assert!(same_block(&a.degeneracy_blocks, i, p));
            }
        }
    }
}
