//! JSON state files.
//!
//! Complex numbers are `[re, im]` pairs of doubles. Density matrices are
//! stored row-major over the composite index `k·N_B + l` (`k` on A, `l` on
//! B); pure tripartite states use `(a·N_B + b)·N_C + c`.

use std::fs;
use std::path::Path;

use lueq_core::numerics::{Complex, ComplexMatrix, Tolerance};
use lueq_core::states::{validate, BipartiteState, TripartiteState};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const BIPARTITE_COMMENT: &str =
    "bipartite density matrix, row-major; row/column index k*N_B + l with k on A and l on B; entries [re, im]";
pub const TRIPARTITE_COMMENT: &str =
    "pure state vector; index (a*N_B + b)*N_C + c with a on A, b on B, c on C; entries [re, im]";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    BipartiteDensity,
    TripartitePure,
}

impl StateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StateKind::BipartiteDensity => "bipartite_density",
            StateKind::TripartitePure => "tripartite_pure",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub kind: StateKind,
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comment: Option<String>,
    pub data: Vec<[f64; 2]>,
}

/// A validated state loaded from a [`StateFile`].
#[derive(Debug, Clone)]
pub enum LoadedState {
    Bipartite(BipartiteState),
    Tripartite(TripartiteState),
}

impl LoadedState {
    pub fn kind(&self) -> StateKind {
        match self {
            LoadedState::Bipartite(_) => StateKind::BipartiteDensity,
            LoadedState::Tripartite(_) => StateKind::TripartitePure,
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        match self {
            LoadedState::Bipartite(s) => vec![s.dim_a(), s.dim_b()],
            LoadedState::Tripartite(s) => s.dims().to_vec(),
        }
    }
}

pub fn to_pairs(values: &[Complex]) -> Vec<[f64; 2]> {
    values.iter().map(|z| [z.re, z.im]).collect()
}

pub fn from_pairs(values: &[[f64; 2]]) -> Vec<Complex> {
    values.iter().map(|p| Complex::new(p[0], p[1])).collect()
}

pub fn matrix_rows(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    m.as_slice().chunks(m.cols().max(1)).map(to_pairs).collect()
}

pub fn matrix_from_rows(rows: &[Vec<[f64; 2]>]) -> Result<ComplexMatrix, CliError> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(CliError::Malformed("ragged matrix rows".into()));
    }
    let data = rows.iter().flat_map(|row| from_pairs(row)).collect();
    ComplexMatrix::from_vec(r, c, data).map_err(|e| CliError::Malformed(e.to_string()))
}

impl StateFile {
    pub fn bipartite(state: &BipartiteState, label: Option<String>) -> Self {
        Self {
            kind: StateKind::BipartiteDensity,
            dims: vec![state.dim_a(), state.dim_b()],
            label,
            comment: Some(BIPARTITE_COMMENT.into()),
            data: to_pairs(state.rho().as_slice()),
        }
    }

    pub fn tripartite(state: &TripartiteState, label: Option<String>) -> Self {
        Self {
            kind: StateKind::TripartitePure,
            dims: state.dims().to_vec(),
            label,
            comment: Some(TRIPARTITE_COMMENT.into()),
            data: to_pairs(state.psi()),
        }
    }

    pub fn from_state(state: &LoadedState, label: Option<String>) -> Self {
        match state {
            LoadedState::Bipartite(s) => Self::bipartite(s, label),
            LoadedState::Tripartite(s) => Self::tripartite(s, label),
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let file: StateFile = serde_json::from_str(text).map_err(|e| CliError::Malformed(e.to_string()))?;
        file.check_shape()?;
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Malformed(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Malformed(m) => CliError::Malformed(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("state files always serialize");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        fs::write(path, self.to_json()).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
    }

    fn check_shape(&self) -> Result<(), CliError> {
        let expected_dims = match self.kind {
            StateKind::BipartiteDensity => 2,
            StateKind::TripartitePure => 3,
        };
        if self.dims.len() != expected_dims {
            return Err(CliError::Malformed(format!(
                "{} needs {expected_dims} dims, found {}",
                self.kind.as_str(),
                self.dims.len()
            )));
        }
        if self.dims.contains(&0) {
            return Err(CliError::Malformed("dims must be positive".into()));
        }
        let d: usize = self.dims.iter().product();
        let expected_len = match self.kind {
            StateKind::BipartiteDensity => d * d,
            StateKind::TripartitePure => d,
        };
        if self.data.len() != expected_len {
            return Err(CliError::Malformed(format!(
                "data has {} entries, expected {expected_len}",
                self.data.len()
            )));
        }
        if self.data.iter().flatten().any(|x| !x.is_finite()) {
            return Err(CliError::Malformed("data contains non-finite numbers".into()));
        }
        Ok(())
    }

    /// Checks the physical constraints and builds the state.
    pub fn load(&self, tol: &Tolerance) -> Result<LoadedState, CliError> {
        self.check_shape()?;
        let values = from_pairs(&self.data);
        match self.kind {
            StateKind::BipartiteDensity => {
                let (na, nb) = (self.dims[0], self.dims[1]);
                let raw = ComplexMatrix::from_vec(na * nb, na * nb, values)
                    .map_err(|e| CliError::Malformed(e.to_string()))?;
                validate(raw, na, nb, tol)
                    .map(LoadedState::Bipartite)
                    .map_err(|e| CliError::Validation(e.to_string()))
            }
            StateKind::TripartitePure => {
                let dims = [self.dims[0], self.dims[1], self.dims[2]];
                TripartiteState::new(values, dims, tol)
                    .map(LoadedState::Tripartite)
                    .map_err(|e| CliError::Validation(e.to_string()))
            }
        }
    }
}

/// Local unitaries written next to a generated pair, one matrix per party.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitariesFile {
    pub comment: String,
    pub dims: Vec<usize>,
    pub unitaries: Vec<NamedMatrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedMatrix {
    pub subsystem: String,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl UnitariesFile {
    pub fn new(dims: Vec<usize>, factors: &[(&str, &ComplexMatrix)]) -> Self {
        Self {
            comment: "the second state equals the first conjugated by the tensor product of these unitaries, in subsystem order; matrices row-major, entries [re, im]".into(),
            dims,
            unitaries: factors
                .iter()
                .map(|(name, m)| NamedMatrix {
                    subsystem: (*name).into(),
                    matrix: matrix_rows(m),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("unitary files always serialize");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Malformed(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use lueq_core::testkit::random_chg_state;

    #[test]
    fn round_trip_is_bit_identical() {
        let s = random_chg_state(2, 3, 2, 5, 64).unwrap();
        let file = StateFile::bipartite(&s, Some("x".into()));
        let text = file.to_json();
        let back = StateFile::parse(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_json(), text);
        let bits: Vec<u64> = file.data.iter().flatten().map(|x| x.to_bits()).collect();
        let back_bits: Vec<u64> = back.data.iter().flatten().map(|x| x.to_bits()).collect();
        assert_eq!(bits, back_bits);
    }

    #[test]
    fn shape_errors_are_malformed() {
        let text = r#"{"kind":"bipartite_density","dims":[2,2],"data":[[1,0]]}"#;
        assert!(matches!(StateFile::parse(text), Err(CliError::Malformed(_))));
        let text = r#"{"kind":"tripartite_pure","dims":[2,2],"data":[[1,0]]}"#;
        assert!(matches!(StateFile::parse(text), Err(CliError::Malformed(_))));
        assert!(matches!(StateFile::parse("{"), Err(CliError::Malformed(_))));
    }

    #[test]
    fn physical_errors_are_validation() {
        let mut data = vec![[0.0, 0.0]; 16];
        data[0] = [0.5, 0.0];
        data[5] = [0.5, 0.0];
        data[1] = [0.1, 0.0];
        let file = StateFile {
            kind: StateKind::BipartiteDensity,
            dims: vec![2, 2],
            label: None,
            comment: None,
            data,
        };
        match file.load(&Tolerance::default()) {
            Err(CliError::Validation(msg)) => assert!(msg.to_lowercase().contains("hermitian"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }
}
