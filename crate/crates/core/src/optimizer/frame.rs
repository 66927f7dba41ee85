//! Per-particle unitary frames and their angle parameterization.

use nalgebra::DMatrix;

use crate::algebra::{kron_all, C64, CMat, Dims};
use crate::error::{Error, Result};
use crate::states::DensityMatrix;
use crate::tol::UNITARITY_TOL;

/// A product of per-particle unitaries U_n, understood as a change of
/// local operator bases g ↦ U g U†. Applying the frame to a state gives
/// the matrix of that state in the rotated product basis,
/// ρ ↦ (⊗U)† ρ (⊗U), so that basis-dependent criteria evaluated on the
/// rotated state equal the original criteria in the rotated bases.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalFrame {
    unitaries: Vec<CMat>,
}

impl LocalFrame {
    /// Builds a frame from per-particle matrices, checking unitarity.
    ///
    /// # Errors
    /// [`Error::Validation`] if any matrix is non-square or fails
    /// ‖U†U − 𝟙‖_max ≤ 1e-10.
    pub fn new(unitaries: Vec<CMat>) -> Result<Self> {
        for (n, u) in unitaries.iter().enumerate() {
            if u.nrows() != u.ncols() {
                return Err(Error::Validation(format!(
                    "frame matrix for particle {n} is {}×{}",
                    u.nrows(),
                    u.ncols()
                )));
            }
            let gram = u.adjoint() * u;
            let dev = (&gram - CMat::identity(u.nrows(), u.ncols()))
                .iter()
                .map(|c| c.norm())
                .fold(0.0, f64::max);
            if dev > UNITARITY_TOL {
                return Err(Error::Validation(format!(
                    "frame matrix for particle {n} is not unitary (deviation {dev:.3e})"
                )));
            }
        }
        Ok(LocalFrame { unitaries })
    }

    /// The identity frame for the given local dimensions.
    pub fn identity(dims: &Dims) -> Self {
        LocalFrame {
            unitaries: dims
                .as_slice()
                .iter()
                .map(|&d| CMat::identity(d, d))
                .collect(),
        }
    }

    /// Per-particle unitaries.
    pub fn unitaries(&self) -> &[CMat] {
        &self.unitaries
    }

    /// Number of particles the frame covers.
    pub fn len(&self) -> usize {
        self.unitaries.len()
    }

    /// Whether the frame covers no particles.
    pub fn is_empty(&self) -> bool {
        self.unitaries.is_empty()
    }

    pub(crate) fn check_dims(&self, dims: &Dims) -> Result<()> {
        let sizes: Vec<usize> = self.unitaries.iter().map(CMat::nrows).collect();
        if sizes != dims.as_slice() {
            return Err(Error::DimMismatch(format!(
                "frame is for dimensions {sizes:?}, state has {:?}",
                dims.as_slice()
            )));
        }
        Ok(())
    }

    /// The state expressed in this frame's rotated product basis:
    /// (⊗U)† ρ (⊗U).
    ///
    /// # Errors
    /// [`Error::DimMismatch`] if the frame does not match the state's
    /// dimensions.
    pub fn apply_to_state(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.check_dims(rho.dims())?;
        let full = kron_all(&self.unitaries);
        let rotated = full.adjoint() * rho.matrix() * &full;
        Ok(DensityMatrix::trusted(rho.dims().clone(), rotated))
    }

    /// Extends this frame by per-site rotations expressed in the frame's
    /// own rotated basis: particle n's unitary becomes
    /// `self[n] · inner[n]`, so applying the result to a state equals
    /// applying `inner` to the state already rotated by `self`.
    pub(crate) fn composed_with(&self, inner: &[CMat]) -> Self {
        debug_assert_eq!(inner.len(), self.unitaries.len());
        LocalFrame {
            unitaries: self
                .unitaries
                .iter()
                .zip(inner)
                .map(|(base, delta)| base * delta)
                .collect(),
        }
    }

    /// Serializes the frame as per-particle row-major matrices of
    /// `[re, im]` entries.
    pub fn to_json(&self) -> String {
        let data: Vec<Vec<[f64; 2]>> = self
            .unitaries
            .iter()
            .map(|u| {
                let d = u.nrows();
                let mut rows = Vec::with_capacity(d * d);
                for i in 0..d {
                    for j in 0..d {
                        let c = u[(i, j)];
                        rows.push([c.re, c.im]);
                    }
                }
                rows
            })
            .collect();
        serde_json::to_string(&data).expect("plain nested arrays always serialize")
    }

    /// Parses a frame serialized by [`LocalFrame::to_json`].
    ///
    /// # Errors
    /// [`Error::Parse`] on malformed JSON or a non-square entry count;
    /// [`Error::Validation`] if a parsed matrix is not unitary.
    pub fn from_json(text: &str) -> Result<Self> {
        let data: Vec<Vec<[f64; 2]>> = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("frame JSON: {e}")))?;
        let mut unitaries = Vec::with_capacity(data.len());
        for (n, entries) in data.iter().enumerate() {
            let d = (entries.len() as f64).sqrt().round() as usize;
            if d * d != entries.len() {
                return Err(Error::Parse(format!(
                    "frame matrix for particle {n} has {} entries, not a square count",
                    entries.len()
                )));
            }
            let mat = DMatrix::from_fn(d, d, |i, j| {
                let [re, im] = entries[i * d + j];
                C64::new(re, im)
            });
            unitaries.push(mat);
        }
        LocalFrame::new(unitaries)
    }
}

/// Hermitian matrix from d² real angles: the first d set the diagonal and
/// the remaining d(d−1) fill the strict upper triangle as (re, im) pairs
/// in row-major (i < j) order.
fn hermitian_from_angles(angles: &[f64], d: usize) -> CMat {
    debug_assert_eq!(angles.len(), d * d);
    let mut h = CMat::zeros(d, d);
    for i in 0..d {
        h[(i, i)] = C64::new(angles[i], 0.0);
    }
    let mut pos = d;
    for i in 0..d {
        for j in (i + 1)..d {
            let entry = C64::new(angles[pos], angles[pos + 1]);
            pos += 2;
            h[(i, j)] = entry;
            h[(j, i)] = entry.conj();
        }
    }
    h
}

/// The unitary exp(iH) for the Hermitian generator encoded by `angles`
/// (see [`angle_count`]); zero angles give the identity.
pub(crate) fn unitary_from_angles(angles: &[f64], d: usize) -> CMat {
    let h = hermitian_from_angles(angles, d);
    let eig = h.symmetric_eigen();
    let phases: Vec<C64> = eig
        .eigenvalues
        .iter()
        .map(|&l| C64::new(l.cos(), l.sin()))
        .collect();
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (k, phase) in phases.iter().enumerate() {
        for i in 0..d {
            scaled[(i, k)] = v[(i, k)] * phase;
        }
    }
    scaled * v.adjoint()
}

/// Number of real angles parameterizing a d×d unitary generator.
pub(crate) fn angle_count(d: usize) -> usize {
    d * d
}
