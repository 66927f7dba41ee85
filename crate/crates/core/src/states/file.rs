//! On-disk state files.
//!
//! A state file is a JSON object with a `dims` list and either a `matrix`
//! (row-major D² complex entries, each encoded `[re, im]`) or a `vector`
//! (D complex amplitudes) field. Loading validates the state; the repair
//! flag routes near-states through symmetrize/clip/renormalize instead of
//! rejecting them.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DensityMatrix, PureState};
use crate::algebra::{C64, CMat, CVec, Dims};
use crate::error::{Error, Result};

/// Parsed contents of a state file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateFile {
    /// A density matrix, row-major.
    Density {
        /// Local dimensions.
        dims: Vec<usize>,
        /// D² entries as `[re, im]` pairs.
        matrix: Vec<[f64; 2]>,
    },
    /// A pure-state amplitude vector.
    Pure {
        /// Local dimensions.
        dims: Vec<usize>,
        /// D entries as `[re, im]` pairs.
        vector: Vec<[f64; 2]>,
    },
}

impl StateFile {
    /// Encodes a density matrix.
    pub fn from_density(state: &DensityMatrix) -> Self {
        StateFile::Density {
            dims: state.dims().as_slice().to_vec(),
            matrix: row_major_pairs(state.matrix()),
        }
    }

    /// Encodes a pure state.
    pub fn from_pure(state: &PureState) -> Self {
        StateFile::Pure {
            dims: state.dims().as_slice().to_vec(),
            vector: state.amplitudes().iter().map(|x| [x.re, x.im]).collect(),
        }
    }

    /// Decodes into a density matrix (pure files become projectors).
    ///
    /// # Errors
    /// [`Error::Parse`] on an entry-count mismatch; validation errors from
    /// [`DensityMatrix::new`] (or from [`DensityMatrix::repair`] when
    /// `repair` is set) otherwise.
    pub fn into_density(self, repair: bool) -> Result<DensityMatrix> {
        match self {
            StateFile::Density { dims, matrix } => {
                let dims = Dims::new(dims)?;
                let d = dims.total();
                if matrix.len() != d * d {
                    return Err(Error::Parse(format!(
                        "matrix field has {} entries, dims {dims} require {}",
                        matrix.len(),
                        d * d
                    )));
                }
                let mat = CMat::from_fn(d, d, |i, j| {
                    let [re, im] = matrix[i * d + j];
                    C64::new(re, im)
                });
                if repair {
                    DensityMatrix::repair(dims, mat)
                } else {
                    DensityMatrix::new(dims, mat)
                }
            }
            StateFile::Pure { .. } => Ok(self.into_pure()?.density()),
        }
    }

    /// Decodes a pure-state file.
    ///
    /// # Errors
    /// [`Error::Parse`] when the file holds a density matrix or the entry
    /// count is off; normalization errors from [`PureState::new`].
    pub fn into_pure(self) -> Result<PureState> {
        match self {
            StateFile::Pure { dims, vector } => {
                let dims = Dims::new(dims)?;
                if vector.len() != dims.total() {
                    return Err(Error::Parse(format!(
                        "vector field has {} entries, dims {dims} require {}",
                        vector.len(),
                        dims.total()
                    )));
                }
                let amps =
                    CVec::from_iterator(vector.len(), vector.iter().map(|&[re, im]| C64::new(re, im)));
                PureState::new(dims, amps)
            }
            StateFile::Density { .. } => Err(Error::Parse(
                "expected a pure-state file with a `vector` field".into(),
            )),
        }
    }

    /// Serializes to a JSON string.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("state file serialization cannot fail")
    }

    /// Parses from a JSON string.
    ///
    /// # Errors
    /// [`Error::Parse`] on malformed JSON or a shape matching neither
    /// variant.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("state file does not parse: {e}")))
    }

    /// Writes the file.
    ///
    /// # Errors
    /// Propagates I/O failures.
    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    /// Reads and parses a file.
    ///
    /// # Errors
    /// I/O failures and [`Error::Parse`] on malformed contents.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        StateFile::from_json(&text)
    }
}

fn row_major_pairs(mat: &CMat) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(mat.nrows() * mat.ncols());
    for i in 0..mat.nrows() {
        for j in 0..mat.ncols() {
            let x = mat[(i, j)];
            out.push([x.re, x.im]);
        }
    }
    out
}
