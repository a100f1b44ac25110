use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use lueq_core::equivalence::{decide_bipartite, decide_tripartite, Branch, DecisionOptions, DEFAULT_MAX_ORDERINGS};
use lueq_core::invariants::{analyze, Analysis, FullRankMode};
use lueq_core::numerics::{Tolerance, ComplexMatrix};
use lueq_core::states::{partial_trace_a, TripartiteState};
use lueq_core::testkit::{
    haar_unitary, perturb_nonlocal, random_chg_state_with, random_hermitian, random_local_unitaries,
    random_tripartite_chg, unitary_exp, ChgParams, SpectrumMode, Xoshiro256StarStar,
};

use crate::format::{LoadedState, StateFile, UnitariesFile};
use crate::report::{PairReport, Report, StateReport, ToleranceReport, SCHEMA};
use crate::{exit, verdict_exit_code, CliError};

const LOCAL_SALT: u64 = 0x4C55_4551_0000_0001;
const PERTURB_SALT: u64 = 0x4C55_4551_0000_0002;

#[derive(Debug, Parser)]
#[command(name = "lueq", version, about = "Local-unitary invariants and equivalence of quantum states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the invariant set and classification of a state.
    Invariants(SingleArgs),
    /// Print the classification of a state.
    Classify(SingleArgs),
    /// Decide local-unitary equivalence of two states.
    Equiv(EquivArgs),
    /// Generate seeded test states.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RankMode {
    All,
    Any,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Threshold below which a number counts as zero.
    #[arg(long, env = "LUEQ_TOL_ZERO", default_value_t = Tolerance::DEFAULT_EPS_ZERO)]
    pub tol_zero: f64,
    /// Eigenvalues closer than this are degenerate.
    #[arg(long, default_value_t = Tolerance::DEFAULT_EPS_EIG)]
    pub tol_eig: f64,
    /// Tolerance for comparing invariants and verifying witnesses.
    #[arg(long, default_value_t = Tolerance::DEFAULT_EPS_MATCH)]
    pub tol_match: f64,
    #[arg(long, conflicts_with = "text")]
    pub json: bool,
    #[arg(long)]
    pub text: bool,
    /// Print matrices of any size and per-state details.
    #[arg(long)]
    pub full: bool,
    /// Require every reduced ρ_i (all) or at least one (any) to be of full rank.
    #[arg(long, value_enum, default_value_t = RankMode::All)]
    pub full_rank: RankMode,
}

impl CommonArgs {
    fn tolerance(&self) -> Result<Tolerance, CliError> {
        Tolerance::new(self.tol_zero, self.tol_eig, self.tol_match).map_err(|e| CliError::Parameter(e.to_string()))
    }

    fn rank_mode(&self) -> FullRankMode {
        match self.full_rank {
            RankMode::All => FullRankMode::All,
            RankMode::Any => FullRankMode::Any,
        }
    }

    fn render(&self, report: &Report) -> String {
        if self.json {
            report.to_json()
        } else {
            report.to_text(self.full)
        }
    }
}

#[derive(Debug, Args)]
pub struct SingleArgs {
    pub file: PathBuf,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchArg {
    Omega,
    Theta,
}

#[derive(Debug, Args)]
pub struct EquivArgs {
    pub file1: PathBuf,
    pub file2: PathBuf,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Decide with (Omega, X) or (Theta, Y) only.
    #[arg(long, value_enum)]
    pub force_branch: Option<BranchArg>,
    /// Give up when more eigenvector orderings than this would be needed.
    #[arg(long, default_value_t = DEFAULT_MAX_ORDERINGS)]
    pub max_orderings: usize,
    /// Tripartite inputs: compare only index tuples of equal eigenvalues.
    #[arg(long)]
    pub restrict_degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Chg,
    HaarPair,
    Perturbed,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Two (bipartite) or three (tripartite) comma-separated dimensions.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub dims: Vec<usize>,
    /// Rank of the density matrix (of Tr_A for tripartite states).
    #[arg(long)]
    pub rank: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = GenKind::Chg)]
    pub kind: GenKind,
    /// Output file; companions are named after its stem.
    #[arg(long)]
    pub out: PathBuf,
    /// Strength of the nonlocal perturbation.
    #[arg(long, default_value_t = 0.3)]
    pub magnitude: f64,
    /// Make the two smallest eigenvalues equal.
    #[arg(long)]
    pub degenerate: bool,
    #[arg(long, default_value_t = 64)]
    pub max_attempts: usize,
}

/// What a command prints and the process exit code.
#[derive(Debug)]
pub struct Outcome {
    pub stdout: String,
    pub code: u8,
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Invariants(a) => single(a, "invariants", true),
        Command::Classify(a) => single(a, "classify", false),
        Command::Equiv(a) => equiv(a),
        Command::Gen(a) => gen(a),
    }
}

fn load(path: &Path, tol: &Tolerance) -> Result<(StateFile, LoadedState), CliError> {
    let file = StateFile::read(path)?;
    let state = file.load(tol)?;
    Ok((file, state))
}

fn analyze_loaded(state: &LoadedState, tol: &Tolerance, mode: FullRankMode) -> Result<Analysis, CliError> {
    let result = match state {
        LoadedState::Bipartite(s) => analyze(s, tol, mode),
        LoadedState::Tripartite(s) => analyze(&partial_trace_a(s), tol, mode),
    };
    result.map_err(|e| CliError::Numerical(e.to_string()))
}

fn single(args: &SingleArgs, command: &str, with_invariants: bool) -> Result<Outcome, CliError> {
    let tol = args.common.tolerance()?;
    let (file, state) = load(&args.file, &tol)?;
    let analysis = analyze_loaded(&state, &tol, args.common.rank_mode())?;
    let report = Report {
        schema: SCHEMA,
        command: command.into(),
        tolerances: ToleranceReport::from(&tol),
        state: Some(StateReport::new(file.label.clone(), file.kind, file.dims.clone(), &analysis, with_invariants)),
        pair: None,
    };
    Ok(Outcome {
        stdout: args.common.render(&report),
        code: exit::SUCCESS,
    })
}

fn equiv(args: &EquivArgs) -> Result<Outcome, CliError> {
    let tol = args.common.tolerance()?;
    let (f1, s1) = load(&args.file1, &tol)?;
    let (f2, s2) = load(&args.file2, &tol)?;
    if s1.kind() != s2.kind() || s1.dims() != s2.dims() {
        return Err(CliError::Malformed(format!(
            "inputs differ in kind or dims: {} {:?} vs {} {:?}",
            s1.kind().as_str(),
            s1.dims(),
            s2.kind().as_str(),
            s2.dims()
        )));
    }
    let opts = DecisionOptions {
        force_branch: args.force_branch.map(|b| match b {
            BranchArg::Omega => Branch::Omega,
            BranchArg::Theta => Branch::Theta,
        }),
        max_orderings: args.max_orderings,
        restrict_to_degenerate_pairs: args.restrict_degenerate,
        full_rank: args.common.rank_mode(),
    };
    let verdict = match (&s1, &s2) {
        (LoadedState::Bipartite(a), LoadedState::Bipartite(b)) => decide_bipartite(a, b, &tol, &opts)?,
        (LoadedState::Tripartite(a), LoadedState::Tripartite(b)) => decide_tripartite(a, b, &tol, &opts, None)?,
        _ => unreachable!("kinds checked above"),
    };
    let code = verdict_exit_code(&verdict);
    let mode = args.common.rank_mode();
    let left = StateReport::new(f1.label.clone(), f1.kind, f1.dims.clone(), &analyze_loaded(&s1, &tol, mode)?, true);
    let right = StateReport::new(f2.label.clone(), f2.kind, f2.dims.clone(), &analyze_loaded(&s2, &tol, mode)?, true);
    let branch = opts.force_branch.map_or("auto", Branch::as_str).to_string();
    let report = Report {
        schema: SCHEMA,
        command: "equiv".into(),
        tolerances: ToleranceReport::from(&tol),
        state: None,
        pair: Some(PairReport::new(&verdict, code, Some(branch), left, right)),
    };
    Ok(Outcome {
        stdout: args.common.render(&report),
        code,
    })
}

/// `x.json` → `x`, so companions become `x.lu.json` and so on.
fn stem(path: &Path) -> PathBuf {
    let s = path.to_string_lossy();
    PathBuf::from(s.strip_suffix(".json").unwrap_or(&s).to_string())
}

fn companion(path: &Path, suffix: &str) -> PathBuf {
    let mut s = stem(path).into_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

fn write_state(path: &Path, file: &StateFile, written: &mut Vec<PathBuf>) -> Result<(), CliError> {
    file.write(path)?;
    written.push(path.to_path_buf());
    Ok(())
}

fn write_unitaries(path: &Path, dims: Vec<usize>, factors: &[(&str, &ComplexMatrix)], written: &mut Vec<PathBuf>) -> Result<(), CliError> {
    std::fs::write(path, UnitariesFile::new(dims, factors).to_json())
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    written.push(path.to_path_buf());
    Ok(())
}

fn gen(args: &GenArgs) -> Result<Outcome, CliError> {
    let tol = Tolerance::default();
    if !(args.magnitude > 0.0 && args.magnitude < 1.0) {
        return Err(CliError::Parameter("--magnitude must lie in (0, 1)".into()));
    }
    let spectrum = if args.degenerate { SpectrumMode::Degenerate } else { SpectrumMode::default() };
    let dims_text: Vec<String> = args.dims.iter().map(ToString::to_string).collect();
    let label = format!("{:?} dims={} rank={} seed={}", args.kind, dims_text.join(","), args.rank, args.seed).to_lowercase();
    let mut written = Vec::new();
    match args.dims.as_slice() {
        &[na, nb] => {
            let params = ChgParams {
                spectrum,
                max_attempts: args.max_attempts,
                ..ChgParams::new(na, nb, args.rank)
            };
            let base = random_chg_state_with(&params, args.seed)?.state;
            write_state(&args.out, &StateFile::bipartite(&base, Some(label.clone())), &mut written)?;
            match args.kind {
                GenKind::Chg => {}
                GenKind::HaarPair => {
                    let (u, w) = random_local_unitaries(na, nb, args.seed ^ LOCAL_SALT);
                    let moved = base.conjugate_local(&u, &w);
                    let file = StateFile::bipartite(&moved, Some(format!("{label} conjugated by u⊗w")));
                    write_state(&companion(&args.out, ".lu.json"), &file, &mut written)?;
                    write_unitaries(&companion(&args.out, ".unitaries.json"), vec![na, nb], &[("A", &u), ("B", &w)], &mut written)?;
                }
                GenKind::Perturbed => {
                    let p = perturb_nonlocal(&base, args.magnitude, args.seed ^ PERTURB_SALT)?;
                    let file = StateFile::bipartite(&p, Some(format!("{label} perturbed by {}", args.magnitude)));
                    write_state(&companion(&args.out, ".perturbed.json"), &file, &mut written)?;
                }
            }
        }
        &[na, nb, nc] => {
            let dims = [na, nb, nc];
            let base = random_tripartite_chg(dims, args.rank, spectrum, args.seed)?;
            write_state(&args.out, &StateFile::tripartite(&base, Some(label.clone())), &mut written)?;
            match args.kind {
                GenKind::Chg => {}
                GenKind::HaarPair => {
                    let s = args.seed ^ LOCAL_SALT;
                    let (ua, ub, uc) = (haar_unitary(na, s), haar_unitary(nb, s.wrapping_add(1)), haar_unitary(nc, s.wrapping_add(2)));
                    let moved = base.apply_local(&ua, &ub, &uc);
                    let file = StateFile::tripartite(&moved, Some(format!("{label} transformed by u_A⊗u_B⊗u_C")));
                    write_state(&companion(&args.out, ".lu.json"), &file, &mut written)?;
                    write_unitaries(
                        &companion(&args.out, ".unitaries.json"),
                        dims.to_vec(),
                        &[("A", &ua), ("B", &ub), ("C", &uc)],
                        &mut written,
                    )?;
                }
                GenKind::Perturbed => {
                    let mut rng = Xoshiro256StarStar::seed_from_u64(args.seed ^ PERTURB_SALT);
                    let h = random_hermitian(&mut rng, na * nb * nc);
                    let psi = unitary_exp(&h, args.magnitude).mul_vec(base.psi());
                    let p = TripartiteState::new(psi, dims, &tol).map_err(|e| CliError::GenerationFailed(e.to_string()))?;
                    let file = StateFile::tripartite(&p, Some(format!("{label} perturbed by {}", args.magnitude)));
                    write_state(&companion(&args.out, ".perturbed.json"), &file, &mut written)?;
                }
            }
        }
        _ => return Err(CliError::Parameter("--dims takes two or three values".into())),
    }
    let stdout = written.iter().map(|p| format!("wrote {}\n", p.display())).collect();
    Ok(Outcome {
        stdout,
        code: exit::SUCCESS,
    })
}
