//! JSON state and polytope files.
//!
//! A state file is `{ "dim": d, "data": [[re, im], ...] }` with d² row-major
//! entries. A polytope file is a JSON array of state objects.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, QuantumState, Tolerances, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dim: usize,
    pub data: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn from_matrix(m: &CMatrix) -> Self {
        StateFile {
            dim: m.rows(),
            data: m.data().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn from_state(s: &QuantumState) -> Self {
        Self::from_matrix(s.matrix())
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.dim == 0 {
            return Err(Error::Parse("dim must be positive".into()));
        }
        if self.data.len() != self.dim * self.dim {
            return Err(Error::Parse(format!(
                "expected {} entries for dim {}, found {}",
                self.dim * self.dim,
                self.dim,
                self.data.len()
            )));
        }
        Ok(CMatrix::from_vec(
            self.dim,
            self.dim,
            self.data.iter().map(|&[re, im]| C64::new(re, im)).collect(),
        ))
    }

    /// Converts to a validated state; `validate = false` skips PSD/trace checks.
    pub fn to_state(&self, validate: bool, tol: &Tolerances) -> Result<QuantumState> {
        let m = self.to_matrix()?;
        if validate {
            QuantumState::validate_with(m, tol)
        } else {
            Ok(QuantumState::from_matrix_unchecked(m))
        }
    }
}

/// A list of Kraus operators, each `dout × din` row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KrausFile {
    pub din: usize,
    pub dout: usize,
    pub kraus: Vec<Vec<[f64; 2]>>,
}

impl KrausFile {
    pub fn from_channel(ch: &KrausChannel) -> Self {
        KrausFile {
            din: ch.din(),
            dout: ch.dout(),
            kraus: ch
                .kraus()
                .iter()
                .map(|k| k.data().iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }

    pub fn to_channel(&self) -> Result<KrausChannel> {
        let mut ops = Vec::with_capacity(self.kraus.len());
        for k in &self.kraus {
            if k.len() != self.din * self.dout {
                return Err(Error::Parse(format!(
                    "Kraus operator with {} entries, expected {}",
                    k.len(),
                    self.din * self.dout
                )));
            }
            ops.push(CMatrix::from_vec(
                self.dout,
                self.din,
                k.iter().map(|&[re, im]| C64::new(re, im)).collect(),
            ));
        }
        KrausChannel::new(ops)
    }
}

pub fn channel_from_json(text: &str) -> Result<KrausChannel> {
    let f: KrausFile = serde_json::from_str(text)?;
    f.to_channel()
}

pub fn channel_to_json(ch: &KrausChannel) -> String {
    serde_json::to_string(&KrausFile::from_channel(ch)).expect("Kraus file serializes")
}

pub fn state_to_json(s: &QuantumState) -> String {
    serde_json::to_string(&StateFile::from_state(s)).expect("state serializes")
}

pub fn state_from_json(text: &str, validate: bool, tol: &Tolerances) -> Result<QuantumState> {
    let f: StateFile = serde_json::from_str(text)?;
    f.to_state(validate, tol)
}

pub fn read_state(path: impl AsRef<Path>, validate: bool, tol: &Tolerances) -> Result<QuantumState> {
    let text = fs::read_to_string(path)?;
    state_from_json(&text, validate, tol)
}

pub fn write_state(path: impl AsRef<Path>, s: &QuantumState) -> Result<()> {
    fs::write(path, state_to_json(s))?;
    Ok(())
}

pub fn states_to_json(states: &[QuantumState]) -> String {
    let files: Vec<StateFile> = states.iter().map(StateFile::from_state).collect();
    serde_json::to_string(&files).expect("states serialize")
}

pub fn states_from_json(text: &str, validate: bool, tol: &Tolerances) -> Result<Vec<QuantumState>> {
    let files: Vec<StateFile> = serde_json::from_str(text)?;
    files.iter().map(|f| f.to_state(validate, tol)).collect()
}
