use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::witness::extract_witness;
use super::{
    compare_ordered, finish, ordering_candidates, screen, DecisionOptions, EquivalenceError, EquivalenceVerdict,
    InvariantKind, InvariantMismatch, Screen,
};
use crate::invariants::analyze;
use crate::numerics::{polar_unitary, Complex, Tolerance};
use crate::states::{partial_trace_a, TripartiteState};

/// Evaluates a further family of LU invariants on a pure tripartite state.
/// Two states are compared entrywise within `eps_match`.
pub type ExternalInvariants<'a> = &'a dyn Fn(&TripartiteState) -> Vec<f64>;

const CONDITIONAL_NOTE: &str = "invariants of the reduced state on BC agree; the remaining invariant family of the pure state was not evaluated";

/// Decides LU equivalence of pure tripartite states through `ρ_BC = Tr_A`.
///
/// Without `external`, matching reduced invariants give `Conditional`. With
/// it, matching external values lead to an explicit `u_A⊗u_B⊗u_C` witness;
/// the witness for the BC part sits in `u`, `w`, the A part in `ancilla`.
pub fn decide_tripartite(
    psi1: &TripartiteState,
    psi2: &TripartiteState,
    tol: &Tolerance,
    opts: &DecisionOptions,
    external: Option<ExternalInvariants<'_>>,
) -> Result<EquivalenceVerdict, EquivalenceError> {
    if psi1.dims() != psi2.dims() {
        return Err(EquivalenceError::DimensionMismatch {
            left: psi1.dims().to_vec(),
            right: psi2.dims().to_vec(),
        });
    }
    let (r1, r2) = (partial_trace_a(psi1), partial_trace_a(psi2));
    let a1 = analyze(&r1, tol, opts.full_rank)?;
    let a2 = analyze(&r2, tol, opts.full_rank)?;
    let branch = match screen(&a1, &a2, tol, opts) {
        Screen::Done(v) => return Ok(v),
        Screen::Proceed(b) => b,
    };

    let (e1, e2) = (&a1.eigensystem, &a2.eigensystem);
    let blocks = opts.restrict_to_degenerate_pairs.then_some(e1.degeneracy_blocks.as_slice());
    let mut matching = Vec::new();
    let mut last = None;
    for cand in ordering_candidates(e1, e2, tol, opts.max_orderings)? {
        match compare_ordered(&a1.invariants, &a2.invariants, &cand, branch, tol, blocks) {
            Some(m) => last = Some(m),
            None => matching.push(cand),
        }
    }
    if matching.is_empty() {
        return Ok(finish(false, last, e1.is_nondegenerate()));
    }

    let Some(external) = external else {
        return Ok(EquivalenceVerdict::Conditional(String::from(CONDITIONAL_NOTE)));
    };
    let (x1, x2) = (external(psi1), external(psi2));
    if x1.len() != x2.len() {
        return Ok(EquivalenceVerdict::Inequivalent(InvariantMismatch {
            invariant: InvariantKind::External,
            indices: Vec::new(),
            left: Complex::new(x1.len() as f64, 0.0),
            right: Complex::new(x2.len() as f64, 0.0),
        }));
    }
    if let Some(i) = x1.iter().zip(&x2).position(|(a, b)| (a - b).abs() > tol.eps_match) {
        return Ok(EquivalenceVerdict::Inequivalent(InvariantMismatch {
            invariant: InvariantKind::External,
            indices: vec![i + 1],
            left: Complex::new(x1[i], 0.0),
            right: Complex::new(x2[i], 0.0),
        }));
    }

    for cand in &matching {
        let mut wit = match extract_witness(e1, e2, cand, tol) {
            Ok(w) => w,
            Err(EquivalenceError::WitnessNotFound) => continue,
            Err(e) => return Err(e),
        };
        let m1 = psi1.as_matrix();
        let m2 = psi2.as_matrix();
        let moved = &m1 * &wit.u.kron(&wit.w).transpose();
        let ua = polar_unitary(&(&m2 * &moved.dagger()))?;
        let residual = (&m2 - &(&ua * &moved)).frobenius_norm();
        if residual <= tol.eps_match {
            wit.ancilla = Some(ua);
            wit.residual = residual;
            return Ok(EquivalenceVerdict::Equivalent(wit));
        }
    }
    Ok(finish(true, None, true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::{haar_unitary, random_tripartite_chg, SpectrumMode};

    fn pair(seed: u64) -> (TripartiteState, TripartiteState) {
        let psi = random_tripartite_chg([3, 2, 3], 3, SpectrumMode::default(), seed).unwrap();
        let moved = psi.apply_local(&haar_unitary(3, seed + 1), &haar_unitary(2, seed + 2), &haar_unitary(3, seed + 3));
        (psi, moved)
    }

    #[test]
    fn conditional_without_hook() {
        let tol = Tolerance::default();
        let (psi, _) = pair(3);
        let v = decide_tripartite(&psi, &psi, &tol, &DecisionOptions::default(), None).unwrap();
        assert!(matches!(v, EquivalenceVerdict::Conditional(_)), "{v:?}");
    }

    #[test]
    fn hook_yields_full_witness() {
        let tol = Tolerance::default();
        let (psi, moved) = pair(11);
        let hook = |_: &TripartiteState| vec![1.0];
        let v = decide_tripartite(&psi, &moved, &tol, &DecisionOptions::default(), Some(&hook)).unwrap();
        let EquivalenceVerdict::Equivalent(wit) = v else { panic!("{v:?}") };
        let ua = wit.ancilla.as_ref().unwrap();
        let image = psi.apply_local(ua, &wit.u, &wit.w);
        let d: f64 = image.psi().iter().zip(moved.psi()).map(|(a, b)| (a - b).norm_sqr()).sum();
        assert!(d.sqrt() < 1e-8);
    }

    #[test]
    fn hook_mismatch_is_inequivalent() {
        let tol = Tolerance::default();
        let (psi, moved) = pair(21);
        let hook = |p: &TripartiteState| vec![p.psi()[0].re];
        let v = decide_tripartite(&psi, &moved, &tol, &DecisionOptions::default(), Some(&hook)).unwrap();
        assert!(v.is_inequivalent());
    }
}
