//! The GHZ-aligned product bases behind the 1-uniform witness.
//!
//! The defining requirement is exact reconstruction: summing the N-fold
//! products of the basis elements over the shared index must give d times
//! the GHZ projector, so that the witness value equals d·⟨GHZ|ρ|GHZ⟩ in
//! this frame. The matrix units E_ij = |i⟩⟨j| satisfy it identically,
//! Σ_{ij} E_ij^⊗N = d·P_GHZ, and they are trace-orthonormal, hence a valid
//! UNIT basis. No Hermitian basis family can do the same job — already for
//! N = 2, Σ_μ g_μ ⊗ g_μ over any Hermitian orthonormal family is the SWAP
//! operator, not a projector — which is why [`OperatorBasis`] deliberately
//! does not require Hermiticity.

use crate::algebra::basis::{Normalization, OperatorBasis};
use crate::algebra::{C64, CMat, Dims};
use crate::error::{Error, Result};
use crate::states::{ghz_state, one_uniform_state};

/// Matrix-unit basis |i⟩⟨j| of local dimension `dim`, embedded in a space
/// of dimension `full` (zero-padded when `full > dim`), element order
/// row-major over (i, j).
fn matrix_units(full: usize, dim: usize) -> Vec<CMat> {
    let mut out = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            let mut m = CMat::zeros(full, full);
            m[(i, j)] = C64::new(1.0, 0.0);
            out.push(m);
        }
    }
    out
}

/// Canonical GHZ-aligned bases for N particles of equal dimension d: the
/// matrix units on every particle. Verified on construction to reproduce
/// the GHZ projector through the defining sum (via
/// [`one_uniform_state`]); a failure there is an internal error, not an
/// input error.
///
/// # Errors
/// [`Error::InvalidDimension`] for d < 2 or N < 2.
pub fn canonical_ghz_bases(d: usize, n: usize) -> Result<Vec<OperatorBasis>> {
    if d < 2 || n < 2 {
        return Err(Error::InvalidDimension(format!(
            "canonical bases need d ≥ 2 and N ≥ 2, got d={d}, N={n}"
        )));
    }
    let bases: Vec<OperatorBasis> = (0..n)
        .map(|p| OperatorBasis::new(p, d, Normalization::Unit, matrix_units(d, d)))
        .collect::<Result<_>>()?;

    let reconstructed = one_uniform_state(&bases)
        .map_err(|e| Error::Internal(format!("canonical bases fail reconstruction: {e}")))?;
    let ghz = ghz_state(d, n)?.density();
    let dev = (reconstructed.matrix() - ghz.matrix()).norm();
    if dev > 1e-10 {
        return Err(Error::Internal(format!(
            "canonical bases reproduce GHZ only to {dev:.3e}"
        )));
    }
    Ok(bases)
}

/// GHZ-aligned bases on unequal local dimensions: matrix units of the
/// smallest dimension d = min_n d_n, zero-padded on larger particles. The
/// defining sum then reconstructs the embedded d-level GHZ state living on
/// the first d levels of every particle.
///
/// # Errors
/// [`Error::InvalidDimension`] for fewer than two particles (via `dims`
/// construction upstream).
pub fn embedded_ghz_bases(dims: &Dims) -> Result<Vec<OperatorBasis>> {
    if dims.len() < 2 {
        return Err(Error::InvalidDimension(
            "embedded bases need at least two particles".into(),
        ));
    }
    let d = dims.min_dim();
    dims.as_slice()
        .iter()
        .enumerate()
        .map(|(p, &full)| OperatorBasis::new(p, full, Normalization::Unit, matrix_units(full, d)))
        .collect()
}
