//! File formats, reports and commands behind the `lueq` binary.

pub mod cli;
pub mod format;
pub mod report;

use lueq_core::equivalence::{EquivalenceError, EquivalenceVerdict};
use lueq_core::testkit::GenerationError;

pub mod exit {
    pub const SUCCESS: u8 = 0;
    pub const EQUIVALENT: u8 = 0;
    pub const INEQUIVALENT: u8 = 1;
    pub const MALFORMED: u8 = 2;
    pub const VALIDATION: u8 = 3;
    pub const INCONCLUSIVE: u8 = 4;
    pub const CONDITIONAL: u8 = 5;
    pub const TOO_MANY_ORDERINGS: u8 = 6;
    pub const GENERATION_FAILED: u8 = 7;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("invalid parameters: {0}")]
    Parameter(String),
    #[error("{0}")]
    Io(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("too many eigenvector orderings (cap {cap}); raise --max-orderings")]
    TooManyOrderings { cap: usize },
    #[error("generation failed: {0}")]
    GenerationFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Malformed(_) | CliError::Parameter(_) | CliError::Io(_) => exit::MALFORMED,
            CliError::Validation(_) | CliError::Numerical(_) => exit::VALIDATION,
            CliError::TooManyOrderings { .. } => exit::TOO_MANY_ORDERINGS,
            CliError::GenerationFailed(_) => exit::GENERATION_FAILED,
        }
    }
}

impl From<EquivalenceError> for CliError {
    fn from(e: EquivalenceError) -> Self {
        match e {
            EquivalenceError::TooManyOrderings { cap } => CliError::TooManyOrderings { cap },
            EquivalenceError::DimensionMismatch { .. } => CliError::Malformed(e.to_string()),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<GenerationError> for CliError {
    fn from(e: GenerationError) -> Self {
        match e {
            GenerationError::InvalidParameters(m) => CliError::Parameter(m),
            other => CliError::GenerationFailed(other.to_string()),
        }
    }
}

pub fn verdict_exit_code(v: &EquivalenceVerdict) -> u8 {
    match v {
        EquivalenceVerdict::Equivalent(_) => exit::EQUIVALENT,
        EquivalenceVerdict::Inequivalent(_) => exit::INEQUIVALENT,
        EquivalenceVerdict::Inconclusive(_) => exit::INCONCLUSIVE,
        EquivalenceVerdict::Conditional(_) => exit::CONDITIONAL,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use lueq_core::equivalence::{InconclusiveReason, InvariantKind, InvariantMismatch};
    use lueq_core::numerics::Complex;

    #[test]
    fn verdict_codes_are_distinct() {
        let z = Complex::new(0.0, 0.0);
        let verdicts = [
            EquivalenceVerdict::Inequivalent(InvariantMismatch {
                invariant: InvariantKind::Omega,
                indices: vec![1, 1],
                left: z,
                right: z,
            }),
            EquivalenceVerdict::Inconclusive(InconclusiveReason::NoCommonBranch),
            EquivalenceVerdict::Conditional(String::new()),
        ];
        let mut codes: Vec<u8> = verdicts.iter().map(verdict_exit_code).collect();
        codes.push(exit::EQUIVALENT);
        codes.extend([exit::MALFORMED, exit::VALIDATION, exit::TOO_MANY_ORDERINGS, exit::GENERATION_FAILED]);
        let mut sorted = codes.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), codes.len());
        assert_eq!(sorted, (0..=7).collect::<Vec<u8>>());
    }
}
