//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use lueq_core::equivalence::{decide_bipartite, decide_tripartite, Branch, DecisionOptions, EquivalenceVerdict};
use lueq_core::invariants::{analyze, ClassLabel, FullRankMode, InvariantSet};
use lueq_core::numerics::{hermitian_eig, inner, svd, Complex, ComplexMatrix, Tolerance};
use lueq_core::states::{eigensystem, partial_trace_a, validate, BipartiteState, TripartiteState};
use lueq_core::testkit::{
    haar_unitary, oracle_invariants, perturb_nonlocal, random_chg_state, random_local_unitaries, random_state,
    random_tripartite_chg, SpectrumMode,
};

const ORACLE_TOL: f64 = 1e-10;
const INVARIANCE_TOL: f64 = 1e-8;
const RESIDUAL_TOL: f64 = 1e-8;
const SINGULAR_TOL: f64 = 1e-10;
const PERTURBATION: f64 = 0.3;
const MIN_INEQUIVALENT: usize = 95;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn max_diff(a: &InvariantSet, b: &InvariantSet) -> f64 {
    if a.n != b.n || a.j_moments.len() != b.j_moments.len() || a.omega.dim() != b.omega.dim() {
        return f64::INFINITY;
    }
    let mut m = 0.0f64;
    for (x, y) in a.j_moments.iter().zip(&b.j_moments) {
        m = m.max((x - y).abs());
    }
    for (x, y) in a.omega.as_slice().iter().zip(b.omega.as_slice()) {
        m = m.max((x - y).abs());
    }
    for (x, y) in a.theta_mat.as_slice().iter().zip(b.theta_mat.as_slice()) {
        m = m.max((x - y).abs());
    }
    for (x, y) in a.x_tensor.as_slice().iter().zip(b.x_tensor.as_slice()) {
        m = m.max((x - y).norm());
    }
    for (x, y) in a.y_tensor.as_slice().iter().zip(b.y_tensor.as_slice()) {
        m = m.max((x - y).norm());
    }
    m
}

fn c(x: f64) -> Complex {
    Complex::new(x, 0.0)
}

fn criterion_1(tol: &Tolerance) -> Outcome {
    let dims = [(2, 2), (2, 3), (3, 3)];
    let mut worst = 0.0f64;
    for i in 0..100u64 {
        let (na, nb) = dims[i as usize % 3];
        let rank = 1 + (i as usize / 3) % 4;
        let s = random_state(na, nb, rank, 1_000 + i).expect("generator");
        let main = analyze(&s, tol, FullRankMode::All).expect("analysis").invariants;
        let oracle = oracle_invariants(&s, tol).expect("oracle");
        worst = worst.max(max_diff(&main, &oracle));
    }
    outcome(worst <= ORACLE_TOL, format!("max |main - oracle| = {worst:.3e} over 100 states"))
}

fn criterion_2(tol: &Tolerance) -> Outcome {
    let dims = [(2, 2), (2, 3), (3, 3)];
    let mut worst = 0.0f64;
    for i in 0..100u64 {
        let (na, nb) = dims[i as usize % 3];
        let rank = 1 + (i as usize / 3) % 4;
        let s = random_state(na, nb, rank, 2_000 + i).expect("generator");
        let (u, w) = random_local_unitaries(na, nb, 3_000 + i);
        let t = s.conjugate_local(&u, &w);
        let a1 = analyze(&s, tol, FullRankMode::All).expect("analysis");
        let a2 = analyze(&t, tol, FullRankMode::All).expect("analysis");
        assert!(a1.eigensystem.is_nondegenerate());
        for (x, y) in a1.eigensystem.lambdas.iter().zip(&a2.eigensystem.lambdas) {
            worst = worst.max((x - y).abs());
        }
        worst = worst.max(max_diff(&a1.invariants, &a2.invariants));
    }
    outcome(worst <= INVARIANCE_TOL, format!("max deviation = {worst:.3e} over 100 triples"))
}

fn chg_cases() -> Vec<(usize, usize, usize)> {
    let shapes = [(2, 2, 1), (2, 2, 2), (2, 3, 1), (2, 3, 2), (2, 3, 3)];
    (0..200).map(|i| shapes[i % shapes.len()]).collect()
}

/// `min_α ‖A' − e^{iα} u A wᵀ‖_F`, computed here rather than taken from the witness.
fn aligned_distance(a: &ComplexMatrix, b: &ComplexMatrix, u: &ComplexMatrix, w: &ComplexMatrix) -> f64 {
    let t = &(u * a) * &w.transpose();
    let z = inner(t.as_slice(), b.as_slice());
    let phase = if z.norm() > 0.0 { z / z.norm() } else { c(1.0) };
    (b - &t.scale(phase)).frobenius_norm()
}

fn criteria_3_and_7(tol: &Tolerance) -> (Outcome, Outcome) {
    let start = Instant::now();
    let mut equivalent = 0;
    let mut worst_residual = 0.0f64;
    let mut worst_coeff = 0.0f64;
    let mut worst_singular = 0.0f64;
    let mut failures = Vec::new();
    for (i, (na, nb, rank)) in chg_cases().into_iter().enumerate() {
        let seed = 4_000 + i as u64;
        let s = random_chg_state(na, nb, rank, seed, 64).expect("generator");
        let (u, w) = random_local_unitaries(na, nb, seed ^ 0xABCD);
        let t = s.conjugate_local(&u, &w);
        match decide_bipartite(&s, &t, tol, &DecisionOptions::default()).expect("decision") {
            EquivalenceVerdict::Equivalent(wit) => {
                let k = wit.u.kron(&wit.w);
                let moved = &(&k * s.rho()) * &k.dagger();
                let residual = (t.rho() - &moved).frobenius_norm();
                worst_residual = worst_residual.max(residual);
                if residual <= RESIDUAL_TOL {
                    equivalent += 1;
                } else {
                    failures.push(i);
                }
                let e1 = eigensystem(&s, tol).expect("eigensystem");
                let e2 = eigensystem(&t, tol).expect("eigensystem");
                for (a, b) in e1.coeff_mats.iter().zip(&e2.coeff_mats) {
                    worst_coeff = worst_coeff.max(aligned_distance(a, b, &wit.u, &wit.w));
                    let (sa, sb) = (svd(a).expect("svd").s, svd(b).expect("svd").s);
                    for (x, y) in sa.iter().zip(&sb) {
                        worst_singular = worst_singular.max((x - y).abs());
                    }
                }
            }
            _ => failures.push(i),
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let c3 = outcome(
        equivalent == 200,
        format!("{equivalent}/200 Equivalent, max residual {worst_residual:.3e}, {secs:.2} s, failing cases {failures:?}"),
    );
    let c7 = outcome(
        equivalent > 0 && worst_coeff <= RESIDUAL_TOL && worst_singular <= SINGULAR_TOL,
        format!("max ‖A'_j − e^(iα) u A_j wᵀ‖ = {worst_coeff:.3e}, max singular value gap = {worst_singular:.3e}"),
    );
    (c3, c7)
}

fn criterion_4(tol: &Tolerance) -> Outcome {
    let shapes = [(2, 2, 1), (2, 2, 2), (2, 3, 1), (2, 3, 2), (2, 3, 3)];
    let mut inequivalent = 0;
    let mut bad_equivalent = 0;
    let mut other = Vec::new();
    for i in 0..100u64 {
        let (na, nb, rank) = shapes[i as usize % shapes.len()];
        let s = random_chg_state(na, nb, rank, 5_000 + i, 64).expect("generator");
        let p = perturb_nonlocal(&s, PERTURBATION, 6_000 + i).expect("perturbation");
        match decide_bipartite(&s, &p, tol, &DecisionOptions::default()).expect("decision") {
            EquivalenceVerdict::Inequivalent(_) => inequivalent += 1,
            EquivalenceVerdict::Equivalent(wit) if wit.residual <= RESIDUAL_TOL => bad_equivalent += 1,
            v => other.push((i, v.name())),
        }
    }
    outcome(
        inequivalent >= MIN_INEQUIVALENT && bad_equivalent == 0,
        format!("{inequivalent}/100 Inequivalent, {bad_equivalent} Equivalent, others {other:?}"),
    )
}

fn is_generic(s: &BipartiteState, tol: &Tolerance) -> bool {
    analyze(s, tol, FullRankMode::All).map(|a| a.class.generic).unwrap_or(false)
}

fn criterion_5(tol: &Tolerance) -> Outcome {
    let mut pairs: Vec<(BipartiteState, BipartiteState)> = Vec::new();
    let mut seed = 7_000u64;
    while pairs.len() < 100 {
        seed += 1;
        let (na, nb) = if seed % 2 == 0 { (2, 2) } else { (2, 3) };
        let s = random_chg_state(na, nb, 2, seed, 64).expect("generator");
        let other = match seed % 3 {
            0 => {
                let (u, w) = random_local_unitaries(na, nb, seed ^ 0x1234);
                s.conjugate_local(&u, &w)
            }
            1 => perturb_nonlocal(&s, PERTURBATION, seed ^ 0x4321).expect("perturbation"),
            _ => random_chg_state(na, nb, 2, seed ^ 0x9999, 64).expect("generator"),
        };
        if is_generic(&s, tol) && is_generic(&other, tol) {
            pairs.push((s, other));
        }
    }
    let mut disagreements = Vec::new();
    let mut tally = [0usize; 2];
    for (i, (s, t)) in pairs.iter().enumerate() {
        let run = |b| {
            let opts = DecisionOptions { force_branch: Some(b), ..Default::default() };
            decide_bipartite(s, t, tol, &opts).expect("decision")
        };
        let (o, th) = (run(Branch::Omega), run(Branch::Theta));
        if o.name() != th.name() || !(o.is_equivalent() || o.is_inequivalent()) {
            disagreements.push((i, o.name(), th.name()));
        }
        tally[0] += o.is_equivalent() as usize;
        tally[1] += o.is_inequivalent() as usize;
    }
    outcome(
        disagreements.is_empty(),
        format!(
            "100 Generic pairs: {} Equivalent, {} Inequivalent under both branches; disagreements {disagreements:?}",
            tally[0], tally[1]
        ),
    )
}

fn criterion_6(tol: &Tolerance) -> Outcome {
    let h = 0.5f64.sqrt();
    let bell = BipartiteState::from_pure(&[c(h), c(0.0), c(0.0), c(h)], 2, 2, tol).expect("bell");
    let mut werner = bell.rho().scale_real(0.5);
    werner = &werner + &ComplexMatrix::identity(4).scale_real(0.5 / 4.0);
    let werner = validate(werner, 2, 2, tol).expect("werner");
    let mixture = validate(ComplexMatrix::from_real_diag(&[0.5, 0.0, 0.0, 0.5]), 2, 2, tol).expect("mixture");

    let class = |s: &BipartiteState| analyze(s, tol, FullRankMode::All).expect("analysis").class;
    let (cb, cw, cm) = (class(&bell), class(&werner), class(&mixture));
    let pass = cb.label == ClassLabel::Chg
        && cw.label == ClassLabel::NonGeneric
        && cm.high_generic
        && !cm.is_chg();
    outcome(
        pass,
        format!(
            "Bell → {}, Werner(0.5) → {}, classical mixture → {} (high generic {}, CHG {})",
            cb.label,
            cw.label,
            cm.label,
            cm.high_generic,
            cm.is_chg()
        ),
    )
}

fn spectrum_bc(psi: &TripartiteState, tol: &Tolerance) -> Vec<f64> {
    hermitian_eig(partial_trace_a(psi).rho(), tol).expect("eig").values
}

fn criterion_8(tol: &Tolerance) -> Outcome {
    let shapes: [([usize; 3], usize); 3] = [([2, 2, 2], 2), ([2, 2, 3], 2), ([3, 2, 3], 3)];
    let mut conditional = 0;
    let mut inequivalent = 0;
    let mut problems = Vec::new();
    for i in 0..50u64 {
        let (dims, rank) = shapes[i as usize % 3];
        let psi = random_tripartite_chg(dims, rank, SpectrumMode::default(), 8_000 + i).expect("generator");
        let moved = psi.apply_local(
            &haar_unitary(dims[0], 9_000 + 3 * i),
            &haar_unitary(dims[1], 9_001 + 3 * i),
            &haar_unitary(dims[2], 9_002 + 3 * i),
        );
        match decide_tripartite(&psi, &moved, tol, &DecisionOptions::default(), None).expect("decision") {
            EquivalenceVerdict::Conditional(_) => conditional += 1,
            v => problems.push(("positive", i, v.name())),
        }

        let other = random_tripartite_chg(dims, rank, SpectrumMode::default(), 10_000 + i).expect("generator");
        let (s1, s2) = (spectrum_bc(&psi, tol), spectrum_bc(&other, tol));
        let mismatched = s1.iter().zip(&s2).any(|(x, y)| (x - y).abs() > tol.eps_eig);
        if !mismatched {
            problems.push(("spectra coincide", i, ""));
            continue;
        }
        match decide_tripartite(&psi, &other, tol, &DecisionOptions::default(), None).expect("decision") {
            EquivalenceVerdict::Inequivalent(_) => inequivalent += 1,
            v => problems.push(("negative", i, v.name())),
        }
    }
    outcome(
        conditional == 50 && inequivalent == 50,
        format!("{conditional}/50 Conditional, {inequivalent}/50 Inequivalent, problems {problems:?}"),
    )
}

fn main() -> ExitCode {
    let tol = Tolerance::default();
    let (c3, c7) = criteria_3_and_7(&tol);
    let results = [
        ("1 oracle agreement", criterion_1(&tol)),
        ("2 local-unitary invariance", criterion_2(&tol)),
        ("3 positive decisions", c3),
        ("4 negative decisions", criterion_4(&tol)),
        ("5 omega/theta branch agreement", criterion_5(&tol)),
        ("6 classification fixtures", criterion_6(&tol)),
        ("7 witness fidelity", c7),
        ("8 tripartite layer", criterion_8(&tol)),
    ];
    let mut all = true;
    for (name, o) in &results {
        println!("{} criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        all &= o.pass;
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
