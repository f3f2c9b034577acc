use serde::{Deserialize, Serialize};

use super::{BipartiteState, QstateError};
use crate::hermlin::ComplexMatrix;

/// On-disk state: row-major real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub d_a: usize,
    pub d_b: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&BipartiteState> for StateFile {
    fn from(s: &BipartiteState) -> Self {
        Self {
            d_a: s.d_a(),
            d_b: s.d_b(),
            re: s.rho().re_rows(),
            im: s.rho().im_rows(),
        }
    }
}

impl TryFrom<StateFile> for BipartiteState {
    type Error = QstateError;

    fn try_from(f: StateFile) -> Result<Self, QstateError> {
        let n = f.d_a * f.d_b;
        let shape_ok =
            f.re.len() == n && f.im.len() == n && f.re.iter().chain(&f.im).all(|r| r.len() == n);
        if !shape_ok {
            return Err(QstateError::InvalidState {
                invariant: "dimension",
                detail: format!(
                    "re/im must be {n}x{n} arrays for d_a={} d_b={}",
                    f.d_a, f.d_b
                ),
            });
        }
        let rho = ComplexMatrix::from_parts(&f.re, &f.im)?;
        BipartiteState::new(rho, f.d_a, f.d_b)
    }
}

pub fn read_state_json(text: &str) -> Result<BipartiteState, QstateError> {
    let f: StateFile =
        serde_json::from_str(text).map_err(|e| QstateError::Format(e.to_string()))?;
    f.try_into()
}

pub fn write_state_json(state: &BipartiteState) -> String {
    serde_json::to_string_pretty(&StateFile::from(state)).expect("plain data serializes")
}
