//! Dense complex linear algebra over multi-qudit Hilbert spaces.
//!
//! Tensor structure, partial traces, bipartition reshaping, operator bases,
//! and matrix norms. Every operation here follows one computational-basis
//! ordering: **row-major over the particle list**, so the joint basis index
//! of a multi-index (i_1, …, i_N) is Σ_n i_n·s_n with strides
//! s_n = Π_{m>n} d_m. Keeping a single convention across reshapes, traces,
//! and tensor contractions is what prevents transpose bugs between modules.

pub mod basis;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type C64 = Complex<f64>;
/// Dense complex matrix.
pub type CMat = DMatrix<C64>;
/// Dense complex vector.
pub type CVec = DVector<C64>;

/// Ordered list of local dimensions d_n ≥ 2 of a multi-qudit system.
///
/// The total Hilbert-space dimension is D = Π_n d_n. The particle order is
/// significant: it fixes the computational-basis ordering used by every
/// reshape and trace in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Dims(Vec<usize>);

impl Dims {
    /// Builds a dimension list, requiring every local dimension ≥ 2.
    ///
    /// # Errors
    /// [`Error::InvalidDimension`] if the list is empty or any entry is < 2.
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidDimension(
                "dimension list must be non-empty".into(),
            ));
        }
        if let Some(&bad) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidDimension(format!(
                "every local dimension must be ≥ 2, got {bad}"
            )));
        }
        Ok(Dims(dims))
    }

    /// Number of particles N.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false: construction rejects empty lists.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Total Hilbert-space dimension D = Π_n d_n.
    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    /// Local dimensions as a slice.
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Smallest local dimension, written d in witness thresholds.
    pub fn min_dim(&self) -> usize {
        *self.0.iter().min().expect("non-empty by construction")
    }

    /// The common local dimension if all particles share one, else `None`.
    pub fn equal_dim(&self) -> Option<usize> {
        let d = self.0[0];
        self.0.iter().all(|&x| x == d).then_some(d)
    }

    /// Row-major strides: s_n = Π_{m>n} d_m.
    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1usize; self.0.len()];
        for n in (0..self.0.len().saturating_sub(1)).rev() {
            s[n] = s[n + 1] * self.0[n + 1];
        }
        s
    }
}

impl std::fmt::Display for Dims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl std::str::FromStr for Dims {
    type Err = Error;

    /// Parses a comma-separated dimension list such as `"3,3,3"`.
    fn from_str(s: &str) -> Result<Self> {
        let dims: Vec<usize> = s
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad dimension entry {part:?} in {s:?}")))
            })
            .collect::<Result<_>>()?;
        Dims::new(dims)
    }
}

/// Flattens a multi-index into the joint basis index (row-major).
pub fn flatten_index(idx: &[usize], dims: &Dims) -> usize {
    debug_assert_eq!(idx.len(), dims.len());
    let strides = dims.strides();
    idx.iter().zip(&strides).map(|(&i, &s)| i * s).sum()
}

/// Splits a joint basis index back into its multi-index (row-major).
pub fn unflatten_index(mut flat: usize, dims: &Dims) -> Vec<usize> {
    let strides = dims.strides();
    strides
        .iter()
        .map(|&s| {
            let q = flat / s;
            flat %= s;
            q
        })
        .collect()
}

/// Visits every multi-index over `shape` in row-major order (last index
/// fastest), without per-step allocation.
pub fn for_each_index(shape: &[usize], mut f: impl FnMut(&[usize])) {
    if shape.iter().any(|&d| d == 0) {
        return;
    }
    let mut idx = vec![0usize; shape.len()];
    loop {
        f(&idx);
        let mut pos = shape.len();
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < shape[pos] {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Joint-space offsets of every index combination over the particle subset
/// `set` (ascending particle order, row-major enumeration within the set).
///
/// The full joint index of (subset combination r, complement combination c)
/// is `offsets(set)[r] + offsets(complement)[c]`, which is how reshapes and
/// partial traces below address the big matrix without re-deriving strides.
pub(crate) fn subset_offsets(dims: &Dims, set: &[usize]) -> Vec<usize> {
    let strides = dims.strides();
    let set_dims: Vec<usize> = set.iter().map(|&p| dims.as_slice()[p]).collect();
    let total: usize = set_dims.iter().product();
    let mut out = Vec::with_capacity(total);
    for_each_index(&set_dims, |idx| {
        out.push(idx.iter().zip(set).map(|(&i, &p)| i * strides[p]).sum());
    });
    out
}

/// Validates a particle subset: in range, duplicate-free; returns it sorted.
fn checked_subset(dims: &Dims, set: &[usize]) -> Result<Vec<usize>> {
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != set.len() {
        return Err(Error::InvalidPartition(format!(
            "duplicate particle in subset {set:?}"
        )));
    }
    if let Some(&bad) = sorted.iter().find(|&&p| p >= dims.len()) {
        return Err(Error::InvalidPartition(format!(
            "particle index {bad} out of range for {} particles",
            dims.len()
        )));
    }
    Ok(sorted)
}

/// Complement of a (sorted, validated) particle subset.
pub(crate) fn complement(dims: &Dims, set: &[usize]) -> Vec<usize> {
    (0..dims.len()).filter(|p| !set.contains(p)).collect()
}

/// Kronecker product of a list of matrices, in the given order.
///
/// An empty list yields the 1×1 identity, the neutral element.
pub fn kron_all(factors: &[CMat]) -> CMat {
    let mut out = CMat::identity(1, 1);
    for f in factors {
        out = out.kronecker(f);
    }
    out
}

/// Partial trace of a D×D matrix over all particles *not* in `keep`.
///
/// Works on raw matrices; the state-level wrapper with validation lives on
/// [`crate::states::DensityMatrix`]. The kept particles appear in ascending
/// particle order. `keep` may be empty (full trace, 1×1 result) or full (a
/// copy) — callers that require a proper subset enforce that themselves.
///
/// # Errors
/// [`Error::InvalidPartition`] on out-of-range or duplicated indices;
/// [`Error::DimMismatch`] if the matrix is not D×D for the given dims.
pub fn partial_trace_mat(mat: &CMat, dims: &Dims, keep: &[usize]) -> Result<CMat> {
    let d_total = dims.total();
    if mat.nrows() != d_total || mat.ncols() != d_total {
        return Err(Error::DimMismatch(format!(
            "matrix is {}×{}, dims {} require {d_total}×{d_total}",
            mat.nrows(),
            mat.ncols(),
            dims
        )));
    }
    let keep_sorted = checked_subset(dims, keep)?;
    let comp = complement(dims, &keep_sorted);
    let keep_off = subset_offsets(dims, &keep_sorted);
    let comp_off = subset_offsets(dims, &comp);
    let dk = keep_off.len();
    let mut out = CMat::zeros(dk, dk);
    for (r, &ro) in keep_off.iter().enumerate() {
        for (c, &co) in keep_off.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for &e in &comp_off {
                acc += mat[(ro + e, co + e)];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(out)
}

/// tr(M²) of a Hermitian matrix, returned as a real number.
///
/// For a density matrix this is the purity, 1/D ≤ tr(ρ²) ≤ 1. The input is
/// assumed Hermitian (the imaginary part of the trace is discarded).
pub fn purity_mat(mat: &CMat) -> f64 {
    let n = mat.nrows();
    debug_assert_eq!(n, mat.ncols());
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += mat[(i, j)] * mat[(j, i)];
        }
    }
    acc.re
}

/// Trace norm ‖M‖₁ = sum of singular values, for any rectangular complex
/// matrix.
pub fn trace_norm(mat: &CMat) -> f64 {
    mat.clone().svd(false, false).singular_values.iter().sum()
}

/// Reshapes a pure-state amplitude vector into the coefficient matrix of the
/// bipartition (`members` | rest).
///
/// Rows enumerate the joint computational basis of `members`, columns that
/// of the complement, both row-major in ascending particle order. The rank
/// of the result is the Schmidt rank of the state across the bipartition,
/// and its singular values squared are the Schmidt coefficients.
///
/// # Errors
/// [`Error::InvalidPartition`] if `members` is empty, full, duplicated, or
/// out of range; [`Error::DimMismatch`] if the vector length is not D.
pub fn bipartition_reshape_mat(amps: &CVec, dims: &Dims, members: &[usize]) -> Result<CMat> {
    if amps.len() != dims.total() {
        return Err(Error::DimMismatch(format!(
            "amplitude vector has length {}, dims {} require {}",
            amps.len(),
            dims,
            dims.total()
        )));
    }
    let sorted = checked_subset(dims, members)?;
    if sorted.is_empty() || sorted.len() == dims.len() {
        return Err(Error::InvalidPartition(
            "bipartition side must be a non-empty proper subset".into(),
        ));
    }
    let comp = complement(dims, &sorted);
    let row_off = subset_offsets(dims, &sorted);
    let col_off = subset_offsets(dims, &comp);
    let mut out = CMat::zeros(row_off.len(), col_off.len());
    for (r, &ro) in row_off.iter().enumerate() {
        for (c, &co) in col_off.iter().enumerate() {
            out[(r, c)] = amps[ro + co];
        }
    }
    Ok(out)
}
