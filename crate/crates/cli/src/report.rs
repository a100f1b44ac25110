//! Reports printed by the commands, as JSON or text.

use std::fmt::Write as _;

use indexmap::IndexMap;
use lueq_core::equivalence::{EquivalenceVerdict, Witness};
use lueq_core::invariants::{Analysis, GenericityClass, InvariantSet, RealMatrix, Tensor3};
use lueq_core::numerics::Tolerance;
use serde::{Deserialize, Serialize};

use crate::format::{matrix_rows, StateKind};

pub const SCHEMA: u32 = 1;
const TEXT_LIMIT: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub tolerances: ToleranceReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<PairReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceReport {
    pub eps_zero: f64,
    pub eps_eig: f64,
    pub eps_match: f64,
}

impl From<&Tolerance> for ToleranceReport {
    fn from(t: &Tolerance) -> Self {
        Self {
            eps_zero: t.eps_zero,
            eps_eig: t.eps_eig,
            eps_match: t.eps_match,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub kind: StateKind,
    pub dims: Vec<usize>,
    /// For pure tripartite states everything below refers to `Tr_A`.
    pub analyzed: String,
    pub rank: usize,
    pub lambdas: Vec<f64>,
    /// 1-based index groups of equal eigenvalues.
    pub degeneracy_blocks: Vec<Vec<usize>>,
    pub classification: ClassificationReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invariants: Option<InvariantReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassificationReport {
    pub class: String,
    pub generic: bool,
    pub high_generic: bool,
    pub commuting: bool,
    pub full_rank: bool,
    pub det_omega_n: f64,
    pub det_theta_n: f64,
    pub max_commutator_norm: f64,
    pub min_rho_rank: usize,
}

impl From<&GenericityClass> for ClassificationReport {
    fn from(c: &GenericityClass) -> Self {
        Self {
            class: c.label.as_str().into(),
            generic: c.generic,
            high_generic: c.high_generic,
            commuting: c.commuting,
            full_rank: c.full_rank,
            det_omega_n: c.det_omega,
            det_theta_n: c.det_theta,
            max_commutator_norm: c.max_commutator,
            min_rho_rank: c.min_rho_rank,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvariantReport {
    #[serde(rename = "J")]
    pub j_moments: Vec<f64>,
    #[serde(rename = "Omega")]
    pub omega: Vec<Vec<f64>>,
    #[serde(rename = "Theta")]
    pub theta: Vec<Vec<f64>>,
    /// Keys are 1-based `"i,j,k"`.
    #[serde(rename = "X")]
    pub x: IndexMap<String, [f64; 2]>,
    #[serde(rename = "Y")]
    pub y: IndexMap<String, [f64; 2]>,
}

fn real_rows(m: &RealMatrix) -> Vec<Vec<f64>> {
    (0..m.dim()).map(|i| (0..m.dim()).map(|j| m.get(i, j)).collect()).collect()
}

fn tensor_map(t: &Tensor3) -> IndexMap<String, [f64; 2]> {
    let n = t.dim();
    let mut out = IndexMap::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let z = t.get(i, j, k);
                out.insert(format!("{},{},{}", i + 1, j + 1, k + 1), [z.re, z.im]);
            }
        }
    }
    out
}

impl From<&InvariantSet> for InvariantReport {
    fn from(inv: &InvariantSet) -> Self {
        Self {
            j_moments: inv.j_moments.clone(),
            omega: real_rows(&inv.omega),
            theta: real_rows(&inv.theta_mat),
            x: tensor_map(&inv.x_tensor),
            y: tensor_map(&inv.y_tensor),
        }
    }
}

impl StateReport {
    pub fn new(
        label: Option<String>,
        kind: StateKind,
        dims: Vec<usize>,
        analysis: &Analysis,
        with_invariants: bool,
    ) -> Self {
        let es = &analysis.eigensystem;
        Self {
            label,
            kind,
            dims,
            analyzed: match kind {
                StateKind::BipartiteDensity => "rho".into(),
                StateKind::TripartitePure => "Tr_A".into(),
            },
            rank: es.rank(),
            lambdas: es.lambdas.clone(),
            degeneracy_blocks: es.degeneracy_blocks.iter().map(|b| b.clone().map(|i| i + 1).collect()).collect(),
            classification: (&analysis.class).into(),
            invariants: with_invariants.then(|| (&analysis.invariants).into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairReport {
    pub verdict: String,
    pub exit_code: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mismatch: Option<MismatchReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessReport>,
    pub left: StateReport,
    pub right: StateReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MismatchReport {
    pub invariant: String,
    pub indices: Vec<usize>,
    pub left: [f64; 2],
    pub right: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessReport {
    pub residual: f64,
    pub coefficient_residuals: Vec<f64>,
    /// Tripartite witnesses only: unitary on A.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_a: Option<Vec<Vec<[f64; 2]>>>,
    /// On A (bipartite) or B (tripartite).
    pub u: Vec<Vec<[f64; 2]>>,
    /// On B (bipartite) or C (tripartite).
    pub w: Vec<Vec<[f64; 2]>>,
}

impl From<&Witness> for WitnessReport {
    fn from(w: &Witness) -> Self {
        Self {
            residual: w.residual,
            coefficient_residuals: w.coefficient_residuals.clone(),
            u_a: w.ancilla.as_ref().map(matrix_rows),
            u: matrix_rows(&w.u),
            w: matrix_rows(&w.w),
        }
    }
}

impl PairReport {
    pub fn new(verdict: &EquivalenceVerdict, exit_code: u8, branch: Option<String>, left: StateReport, right: StateReport) -> Self {
        let mut report = Self {
            verdict: verdict.name().into(),
            exit_code,
            branch,
            reason: None,
            mismatch: None,
            witness: None,
            left,
            right,
        };
        match verdict {
            EquivalenceVerdict::Equivalent(w) => report.witness = Some(w.into()),
            EquivalenceVerdict::Inequivalent(m) => {
                report.reason = Some(m.to_string());
                report.mismatch = Some(MismatchReport {
                    invariant: m.invariant.as_str().into(),
                    indices: m.indices.clone(),
                    left: [m.left.re, m.left.im],
                    right: [m.right.re, m.right.im],
                });
            }
            EquivalenceVerdict::Inconclusive(r) => report.reason = Some(r.to_string()),
            EquivalenceVerdict::Conditional(note) => report.reason = Some(note.clone()),
        }
        report
    }
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self, full: bool) -> String {
        let mut out = String::new();
        if let Some(s) = &self.state {
            render_state(&mut out, s, full, "");
        }
        if let Some(p) = &self.pair {
            render_pair(&mut out, p, full);
        }
        out
    }
}

/// Human-readable number: short fixed notation for moderate magnitudes,
/// scientific otherwise.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let a = x.abs();
    if (1e-4..1e6).contains(&a) {
        let s = format!("{x:.12}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" {
            "0".into()
        } else {
            s.into()
        }
    } else {
        format!("{x:.6e}")
    }
}

pub fn fmt_complex(re: f64, im: f64) -> String {
    if im.abs() <= 1e-12 * re.abs().max(1.0) {
        fmt_num(re)
    } else if re.abs() <= 1e-12 * im.abs() {
        format!("{}i", fmt_num(im))
    } else {
        let sign = if im < 0.0 { '-' } else { '+' };
        format!("{} {sign} {}i", fmt_num(re), fmt_num(im.abs()))
    }
}

fn render_state(out: &mut String, s: &StateReport, full: bool, prefix: &str) {
    let dims: Vec<String> = s.dims.iter().map(ToString::to_string).collect();
    if let Some(label) = &s.label {
        let _ = writeln!(out, "{prefix}label: {label}");
    }
    let _ = writeln!(out, "{prefix}kind: {} ({})", s.kind.as_str(), dims.join("x"));
    if s.kind == StateKind::TripartitePure {
        let _ = writeln!(out, "{prefix}analyzed: reduced state Tr_A");
    }
    let c = &s.classification;
    let _ = writeln!(out, "{prefix}class: {}", c.class);
    let _ = writeln!(
        out,
        "{prefix}generic: {}, high generic: {}, commuting: {}, full rank: {}",
        c.generic, c.high_generic, c.commuting, c.full_rank
    );
    let _ = writeln!(out, "{prefix}det Omega_n = {}", fmt_num(c.det_omega_n));
    let _ = writeln!(out, "{prefix}det Theta_n = {}", fmt_num(c.det_theta_n));
    let _ = writeln!(out, "{prefix}max commutator norm = {}", fmt_num(c.max_commutator_norm));
    let _ = writeln!(out, "{prefix}min rank of rho_i = {}", c.min_rho_rank);
    let _ = writeln!(out, "{prefix}rank: {}", s.rank);
    let lambdas: Vec<String> = s.lambdas.iter().map(|&l| fmt_num(l)).collect();
    let _ = writeln!(out, "{prefix}lambda: {}", lambdas.join(", "));

    let Some(inv) = &s.invariants else {
        return;
    };
    for (i, j) in inv.j_moments.iter().enumerate() {
        let _ = writeln!(out, "{prefix}J^{} = {}", i + 1, fmt_num(*j));
    }
    let limit = if full { usize::MAX } else { TEXT_LIMIT };
    let mut truncated = false;
    for (name, m) in [("Omega", &inv.omega), ("Theta", &inv.theta)] {
        truncated |= m.len() > limit;
        for (i, row) in m.iter().enumerate().take(limit) {
            for (j, v) in row.iter().enumerate().take(limit) {
                let _ = writeln!(out, "{prefix}{name}[{}][{}] = {}", i + 1, j + 1, fmt_num(*v));
            }
        }
    }
    for (name, t) in [("X", &inv.x), ("Y", &inv.y)] {
        for (key, z) in t {
            let idx: Vec<usize> = key.split(',').filter_map(|p| p.parse().ok()).collect();
            if idx.iter().any(|&i| i > limit) {
                truncated = true;
                continue;
            }
            let _ = writeln!(out, "{prefix}{name}[{}][{}][{}] = {}", idx[0], idx[1], idx[2], fmt_complex(z[0], z[1]));
        }
    }
    if truncated {
        let _ = writeln!(out, "{prefix}(entries beyond index {TEXT_LIMIT} omitted; use --full)");
    }
}

fn render_matrix(out: &mut String, name: &str, rows: &[Vec<[f64; 2]>]) {
    let _ = writeln!(out, "{name} =");
    for row in rows {
        let cells: Vec<String> = row.iter().map(|z| fmt_complex(z[0], z[1])).collect();
        let _ = writeln!(out, "  [{}]", cells.join(", "));
    }
}

fn render_pair(out: &mut String, p: &PairReport, full: bool) {
    let _ = writeln!(out, "verdict: {}", p.verdict);
    if let Some(b) = &p.branch {
        let _ = writeln!(out, "branch: {b}");
    }
    if let Some(r) = &p.reason {
        let _ = writeln!(out, "reason: {r}");
    }
    if let Some(w) = &p.witness {
        let _ = writeln!(out, "residual = {}", fmt_num(w.residual));
        if let Some(ua) = &w.u_a {
            render_matrix(out, "u_A", ua);
        }
        render_matrix(out, "u", &w.u);
        render_matrix(out, "w", &w.w);
    }
    if full {
        let _ = writeln!(out, "-- left");
        render_state(out, &p.left, true, "  ");
        let _ = writeln!(out, "-- right");
        render_state(out, &p.right, true, "  ");
    } else {
        let _ = writeln!(out, "left class: {}", p.left.classification.class);
        let _ = writeln!(out, "right class: {}", p.right.classification.class);
    }
}
