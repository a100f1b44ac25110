//! Local-unitary equivalence decisions.

mod ordering;
mod simdiag;
mod tripartite;
mod witness;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

pub use ordering::{ordering_candidates, OrderingCandidate, DEFAULT_MAX_ORDERINGS};
pub use tripartite::{decide_tripartite, ExternalInvariants};
pub use witness::{extract_witness, Witness};

use crate::invariants::{analyze, Analysis, ClassLabel, FullRankMode, InvariantError, InvariantSet};
use crate::numerics::{Complex, LinalgError, Tolerance};
use crate::states::BipartiteState;
use ordering::{same_block, spectrum_mismatch};

#[derive(Debug, thiserror::Error)]
pub enum EquivalenceError {
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch { left: Vec<usize>, right: Vec<usize> },
    #[error("number of eigenvector orderings exceeds the cap of {cap}")]
    TooManyOrderings { cap: usize },
    #[error("no local-unitary witness found")]
    WitnessNotFound,
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Which invariant pair decides CHG pairs: `(Ω, X)` or `(Θ, Y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Omega,
    Theta,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Omega => "omega",
            Branch::Theta => "theta",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionOptions {
    pub force_branch: Option<Branch>,
    pub max_orderings: usize,
    /// Compare only index tuples within one degeneracy block (tripartite).
    pub restrict_to_degenerate_pairs: bool,
    pub full_rank: FullRankMode,
}

impl Default for DecisionOptions {
    fn default() -> Self {
        Self {
            force_branch: None,
            max_orderings: DEFAULT_MAX_ORDERINGS,
            restrict_to_degenerate_pairs: false,
            full_rank: FullRankMode::All,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvariantKind {
    Rank,
    Spectrum,
    JMoment,
    Omega,
    Theta,
    X,
    Y,
    DetOmega,
    DetTheta,
    MaxCommutator,
    MinRhoRank,
    External,
}

impl InvariantKind {
    pub fn as_str(self) -> &'static str {
        match self {
            InvariantKind::Rank => "rank",
            InvariantKind::Spectrum => "spectrum",
            InvariantKind::JMoment => "J",
            InvariantKind::Omega => "Omega",
            InvariantKind::Theta => "Theta",
            InvariantKind::X => "X",
            InvariantKind::Y => "Y",
            InvariantKind::DetOmega => "det_Omega",
            InvariantKind::DetTheta => "det_Theta",
            InvariantKind::MaxCommutator => "max_commutator",
            InvariantKind::MinRhoRank => "min_rho_rank",
            InvariantKind::External => "external",
        }
    }
}

/// First invariant found to differ. Indices are 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantMismatch {
    pub invariant: InvariantKind,
    pub indices: Vec<usize>,
    pub left: Complex,
    pub right: Complex,
}

impl InvariantMismatch {
    fn real(invariant: InvariantKind, indices: Vec<usize>, left: f64, right: f64) -> Self {
        Self {
            invariant,
            indices,
            left: Complex::new(left, 0.0),
            right: Complex::new(right, 0.0),
        }
    }
}

impl fmt::Display for InvariantMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.invariant.as_str())?;
        for i in &self.indices {
            write!(f, "[{i}]")?;
        }
        let show = |z: Complex| if z.im == 0.0 { format!("{}", z.re) } else { format!("{z}") };
        write!(f, ": {} vs {}", show(self.left), show(self.right))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InconclusiveReason {
    /// Spectra and moments agree but at least one state is not CHG.
    NotChg { left: ClassLabel, right: ClassLabel },
    /// Neither `det Ω` nor `det Θ` is nonzero for both states.
    NoCommonBranch,
    /// The forced branch is degenerate for one of the states.
    BranchUnavailable(Branch),
    /// No ordering matched, but degenerate eigenvalues leave the eigenbasis
    /// choice open.
    DegenerateSpectrum,
    /// Invariants matched but no witness reached tolerance.
    WitnessNotFound,
}

impl fmt::Display for InconclusiveReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InconclusiveReason::NotChg { left, right } => {
                write!(f, "not both CHG ({left}, {right}); invariants are necessary only")
            }
            InconclusiveReason::NoCommonBranch => f.write_str("neither Omega nor Theta is nondegenerate for both states"),
            InconclusiveReason::BranchUnavailable(b) => write!(f, "forced branch {} is degenerate", b.as_str()),
            InconclusiveReason::DegenerateSpectrum => {
                f.write_str("no ordering matched and the spectrum is degenerate")
            }
            InconclusiveReason::WitnessNotFound => f.write_str("invariants match but no witness reached tolerance"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EquivalenceVerdict {
    Equivalent(Witness),
    Inequivalent(InvariantMismatch),
    Inconclusive(InconclusiveReason),
    /// Bipartite invariants of `ρ_BC` agree; the remaining invariant family
    /// of the pure tripartite state was not evaluated.
    Conditional(String),
}

impl EquivalenceVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            EquivalenceVerdict::Equivalent(_) => "Equivalent",
            EquivalenceVerdict::Inequivalent(_) => "Inequivalent",
            EquivalenceVerdict::Inconclusive(_) => "Inconclusive",
            EquivalenceVerdict::Conditional(_) => "Conditional",
        }
    }

    pub fn is_equivalent(&self) -> bool {
        matches!(self, EquivalenceVerdict::Equivalent(_))
    }

    pub fn is_inequivalent(&self) -> bool {
        matches!(self, EquivalenceVerdict::Inequivalent(_))
    }
}

pub(crate) enum Screen {
    Done(EquivalenceVerdict),
    Proceed(Branch),
}

fn inequivalent(m: InvariantMismatch) -> Screen {
    Screen::Done(EquivalenceVerdict::Inequivalent(m))
}

/// Checks that do not depend on an eigenvector ordering, then picks the
/// branch used for the ordered comparison.
pub(crate) fn screen(a1: &Analysis, a2: &Analysis, tol: &Tolerance, opts: &DecisionOptions) -> Screen {
    let (e1, e2) = (&a1.eigensystem, &a2.eigensystem);
    if e1.rank() != e2.rank() {
        return inequivalent(InvariantMismatch::real(
            InvariantKind::Rank,
            Vec::new(),
            e1.rank() as f64,
            e2.rank() as f64,
        ));
    }
    if let Some(i) = spectrum_mismatch(e1, e2, tol) {
        return inequivalent(InvariantMismatch::real(
            InvariantKind::Spectrum,
            vec![i + 1],
            e1.lambdas[i],
            e2.lambdas[i],
        ));
    }
    if e1.degeneracy_blocks != e2.degeneracy_blocks {
        let i = e1
            .degeneracy_blocks
            .iter()
            .zip(&e2.degeneracy_blocks)
            .position(|(x, y)| x != y)
            .map_or(0, |b| e1.degeneracy_blocks[b].start);
        return inequivalent(InvariantMismatch::real(
            InvariantKind::Spectrum,
            vec![i + 1],
            e1.lambdas[i],
            e2.lambdas[i],
        ));
    }
    let (j1, j2) = (&a1.invariants.j_moments, &a2.invariants.j_moments);
    if let Some(s) = j1.iter().zip(j2).position(|(x, y)| (x - y).abs() > tol.eps_match) {
        return inequivalent(InvariantMismatch::real(InvariantKind::JMoment, vec![s + 1], j1[s], j2[s]));
    }

    let (c1, c2) = (&a1.class, &a2.class);
    if !(c1.is_chg() && c2.is_chg()) {
        // With a nondegenerate spectrum every quantity below is fixed by the
        // state, so any difference rules equivalence out.
        if e1.is_nondegenerate() {
            if c1.min_rho_rank != c2.min_rho_rank {
                return inequivalent(InvariantMismatch::real(
                    InvariantKind::MinRhoRank,
                    Vec::new(),
                    c1.min_rho_rank as f64,
                    c2.min_rho_rank as f64,
                ));
            }
            let diagnostics = [
                (InvariantKind::DetOmega, c1.det_omega, c2.det_omega),
                (InvariantKind::DetTheta, c1.det_theta, c2.det_theta),
                (InvariantKind::MaxCommutator, c1.max_commutator, c2.max_commutator),
            ];
            for (kind, x, y) in diagnostics {
                if (x - y).abs() > tol.eps_match {
                    return inequivalent(InvariantMismatch::real(kind, Vec::new(), x, y));
                }
            }
        }
        return Screen::Done(EquivalenceVerdict::Inconclusive(InconclusiveReason::NotChg {
            left: c1.label,
            right: c2.label,
        }));
    }

    let omega_ok = c1.omega_nondegenerate(tol) && c2.omega_nondegenerate(tol);
    let theta_ok = c1.theta_nondegenerate(tol) && c2.theta_nondegenerate(tol);
    let branch = match opts.force_branch {
        Some(Branch::Omega) if !omega_ok => None,
        Some(Branch::Theta) if !theta_ok => None,
        Some(b) => Some(b),
        None if omega_ok => Some(Branch::Omega),
        None if theta_ok => Some(Branch::Theta),
        None => None,
    };
    match (branch, opts.force_branch) {
        (Some(b), _) => Screen::Proceed(b),
        (None, Some(b)) => Screen::Done(EquivalenceVerdict::Inconclusive(InconclusiveReason::BranchUnavailable(b))),
        (None, None) => Screen::Done(EquivalenceVerdict::Inconclusive(InconclusiveReason::NoCommonBranch)),
    }
}

/// Compares the chosen branch under an ordering. With `blocks`, only index
/// tuples inside one degeneracy block are compared.
pub(crate) fn compare_ordered(
    i1: &InvariantSet,
    i2: &InvariantSet,
    perm: &OrderingCandidate,
    branch: Branch,
    tol: &Tolerance,
    blocks: Option<&[core::ops::Range<usize>]>,
) -> Option<InvariantMismatch> {
    let n = i1.n;
    let keep2 = |i: usize, j: usize| blocks.map_or(true, |b| same_block(b, i, j));
    let (m1, m2, kind2) = match branch {
        Branch::Omega => (&i1.omega, &i2.omega, InvariantKind::Omega),
        Branch::Theta => (&i1.theta_mat, &i2.theta_mat, InvariantKind::Theta),
    };
    for i in 0..n {
        for j in 0..n {
            if !keep2(i, j) {
                continue;
            }
            let (x, y) = (m1.get(i, j), m2.get(perm.map(i), perm.map(j)));
            if (x - y).abs() > tol.eps_match {
                return Some(InvariantMismatch::real(kind2, vec![i + 1, j + 1], x, y));
            }
        }
    }
    let (t1, t2, kind3) = match branch {
        Branch::Omega => (&i1.x_tensor, &i2.x_tensor, InvariantKind::X),
        Branch::Theta => (&i1.y_tensor, &i2.y_tensor, InvariantKind::Y),
    };
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if !(keep2(i, j) && keep2(j, k)) {
                    continue;
                }
                let x = t1.get(i, j, k);
                let y = t2.get(perm.map(i), perm.map(j), perm.map(k));
                if (x - y).norm() > tol.eps_match {
                    return Some(InvariantMismatch {
                        invariant: kind3,
                        indices: vec![i + 1, j + 1, k + 1],
                        left: x,
                        right: y,
                    });
                }
            }
        }
    }
    None
}

/// Decides whether `ρ' = (u⊗w) ρ (u⊗w)†` for some local unitaries.
///
/// `Equivalent` always carries a verified witness. For CHG pairs a mismatch
/// under every admissible ordering is conclusive; otherwise the invariants
/// only rule equivalence out, never in.
pub fn decide_bipartite(
    s1: &BipartiteState,
    s2: &BipartiteState,
    tol: &Tolerance,
    opts: &DecisionOptions,
) -> Result<EquivalenceVerdict, EquivalenceError> {
    if s1.dims() != s2.dims() {
        return Err(EquivalenceError::DimensionMismatch {
            left: vec![s1.dim_a(), s1.dim_b()],
            right: vec![s2.dim_a(), s2.dim_b()],
        });
    }
    let a1 = analyze(s1, tol, opts.full_rank)?;
    let a2 = analyze(s2, tol, opts.full_rank)?;
    let branch = match screen(&a1, &a2, tol, opts) {
        Screen::Done(v) => return Ok(v),
        Screen::Proceed(b) => b,
    };

    let (e1, e2) = (&a1.eigensystem, &a2.eigensystem);
    let mut last = None;
    let mut matched = false;
    for cand in ordering_candidates(e1, e2, tol, opts.max_orderings)? {
        if let Some(m) = compare_ordered(&a1.invariants, &a2.invariants, &cand, branch, tol, None) {
            last = Some(m);
            continue;
        }
        matched = true;
        match extract_witness(e1, e2, &cand, tol) {
            Ok(mut wit) => {
                wit.residual = wit.residual.max(witness::density_residual(s1.rho(), s2.rho(), &wit.u, &wit.w));
                if wit.residual <= tol.eps_match {
                    return Ok(EquivalenceVerdict::Equivalent(wit));
                }
            }
            Err(EquivalenceError::WitnessNotFound) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(finish(matched, last, e1.is_nondegenerate()))
}

pub(crate) fn finish(matched: bool, last: Option<InvariantMismatch>, nondegenerate: bool) -> EquivalenceVerdict {
    match last {
        _ if matched => EquivalenceVerdict::Inconclusive(InconclusiveReason::WitnessNotFound),
        Some(m) if nondegenerate => EquivalenceVerdict::Inequivalent(m),
        _ => EquivalenceVerdict::Inconclusive(InconclusiveReason::DegenerateSpectrum),
    }
}
