//! Numerical tolerances used by validation and exclusion logic.
//!
//! All certification decisions in this crate are one-sided: a candidate is
//! excluded only when a witness value clears its threshold by more than
//! [`EXCLUSION_SLACK`], so floating-point noise can never manufacture a
//! false exclusion. The remaining constants bound how far an input may
//! deviate from an exact mathematical property before we refuse to treat it
//! as a state, a unitary, or an orthonormal operator family.

/// Maximum absolute deviation `|M - M†|` tolerated when validating a
/// Hermitian operator.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Maximum deviation of `tr ρ` from one for a density matrix.
pub const TRACE_TOL: f64 = 1e-10;

/// Most negative eigenvalue tolerated when validating positive
/// semidefiniteness.
pub const PSD_EIGENVALUE_FLOOR: f64 = -1e-10;

/// Maximum deviation of `⟨ψ|ψ⟩` from one for a pure-state vector.
pub const PURE_NORM_TOL: f64 = 1e-12;

/// Maximum deviation from the declared Gram matrix tolerated when validating
/// an operator basis.
pub const BASIS_ORTHO_TOL: f64 = 1e-12;

/// Maximum deviation `|U†U - 1|` tolerated for a local unitary frame.
pub const UNITARITY_TOL: f64 = 1e-10;

/// One-sided slack applied to every exclusion threshold: a bound must be
/// violated by more than this before a candidate vector is ruled out.
pub const EXCLUSION_SLACK: f64 = 1e-9;

/// Singular values above this threshold count towards a Schmidt rank.
pub const RANK_SV_THRESHOLD: f64 = 1e-8;
