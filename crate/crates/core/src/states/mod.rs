//! State construction and validation: pure and mixed multi-qudit states,
//! the named states used throughout the benchmarks, and noise mixing.
//!
//! Validation is strict by default — Hermiticity and unit trace to 1e-10,
//! eigenvalues above −1e-10, unit norm to 1e-12 — because every certificate
//! downstream is only as sound as the state it was computed on. A separate
//! [`DensityMatrix::repair`] entry point symmetrizes, clips, and
//! renormalizes for ingesting externally produced state files.

pub mod file;
pub mod sampler;

use nalgebra::DMatrix;

use crate::algebra::basis::OperatorBasis;
use crate::algebra::{flatten_index, kron_all, partial_trace_mat, purity_mat, C64, CMat, CVec, Dims};
use crate::error::{Error, Result};
use crate::tol::{HERMITICITY_TOL, PSD_EIGENVALUE_FLOOR, PURE_NORM_TOL, RANK_SV_THRESHOLD, TRACE_TOL};

/// A pure state |ψ⟩: unit-norm amplitude vector over the joint
/// computational basis (row-major multi-index order).
#[derive(Debug, Clone)]
pub struct PureState {
    dims: Dims,
    amps: CVec,
}

impl PureState {
    /// Builds a pure state, validating length and unit norm (1e-12).
    ///
    /// # Errors
    /// [`Error::DimMismatch`] on a length mismatch;
    /// [`Error::Validation`] when the norm deviates from one.
    pub fn new(dims: Dims, amps: CVec) -> Result<Self> {
        if amps.len() != dims.total() {
            return Err(Error::DimMismatch(format!(
                "amplitude vector has length {}, dims {} require {}",
                amps.len(),
                dims,
                dims.total()
            )));
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > PURE_NORM_TOL {
            return Err(Error::Validation(format!(
                "pure state norm {norm} deviates from 1 beyond {PURE_NORM_TOL:e}"
            )));
        }
        Ok(PureState { dims, amps })
    }

    /// Local dimensions.
    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    /// Amplitudes in computational-basis order.
    pub fn amplitudes(&self) -> &CVec {
        &self.amps
    }

    /// Projector |ψ⟩⟨ψ| as a density matrix.
    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::trusted(self.dims.clone(), &self.amps * self.amps.adjoint())
    }

    /// Coefficient matrix of the bipartition (`members` | rest);
    /// see [`crate::algebra::bipartition_reshape_mat`].
    ///
    /// # Errors
    /// Propagates invalid partitions.
    pub fn bipartition_reshape(&self, members: &[usize]) -> Result<CMat> {
        crate::algebra::bipartition_reshape_mat(&self.amps, &self.dims, members)
    }

    /// Schmidt rank across (`members` | rest): singular values above the
    /// 1e-8 rank threshold.
    ///
    /// # Errors
    /// Propagates invalid partitions.
    pub fn schmidt_rank(&self, members: &[usize]) -> Result<u32> {
        let m = self.bipartition_reshape(members)?;
        let sv = m.svd(false, false).singular_values;
        Ok(sv.iter().filter(|&&s| s > RANK_SV_THRESHOLD).count() as u32)
    }
}

/// A density matrix ρ: Hermitian, unit-trace, positive semidefinite.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    dims: Dims,
    mat: CMat,
}

impl DensityMatrix {
    /// Builds a density matrix under full validation: shape, Hermiticity
    /// (1e-10 elementwise), trace (1e-10), and eigenvalues ≥ −1e-10.
    ///
    /// # Errors
    /// [`Error::DimMismatch`] on shape mismatch; [`Error::NotAState`]
    /// naming the first failed check otherwise.
    pub fn new(dims: Dims, mat: CMat) -> Result<Self> {
        let d = dims.total();
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Error::DimMismatch(format!(
                "matrix is {}×{}, dims {} require {d}×{d}",
                mat.nrows(),
                mat.ncols(),
                dims
            )));
        }
        let herm_dev = (&mat - mat.adjoint())
            .iter()
            .map(|x| x.norm())
            .fold(0.0, f64::max);
        if herm_dev > HERMITICITY_TOL {
            return Err(Error::NotAState(format!(
                "hermiticity violated by {herm_dev:.3e}"
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::NotAState(format!(
                "trace {} + {}i deviates from 1",
                tr.re, tr.im
            )));
        }
        let min_eig = hermitian_eigenvalues(&mat)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < PSD_EIGENVALUE_FLOOR {
            return Err(Error::NotAState(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(DensityMatrix { dims, mat })
    }

    /// Constructs without re-validating; for internal paths whose outputs
    /// are valid by construction (projectors of unit vectors, marginals,
    /// convex mixtures of validated states). Debug builds still check.
    pub(crate) fn trusted(dims: Dims, mat: CMat) -> Self {
        debug_assert!(
            {
                let tr = mat.trace();
                (tr.re - 1.0).abs() < 1e-8 && tr.im.abs() < 1e-8
            },
            "trusted density matrix with bad trace"
        );
        DensityMatrix { dims, mat }
    }

    /// Repairs a near-state: symmetrizes (M+M†)/2, clips negative
    /// eigenvalues to zero, renormalizes the trace, then validates.
    ///
    /// # Errors
    /// [`Error::DimMismatch`] on shape mismatch; [`Error::NotAState`] if
    /// the input is beyond repair (zero trace after clipping).
    pub fn repair(dims: Dims, mat: CMat) -> Result<Self> {
        let d = dims.total();
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Error::DimMismatch(format!(
                "matrix is {}×{}, dims {} require {d}×{d}",
                mat.nrows(),
                mat.ncols(),
                dims
            )));
        }
        let sym = (&mat + mat.adjoint()) * C64::new(0.5, 0.0);
        let eig = sym.symmetric_eigen();
        let clipped: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        if total <= 0.0 {
            return Err(Error::NotAState(
                "repair failed: no positive spectral weight".into(),
            ));
        }
        let mut out = CMat::zeros(d, d);
        for (k, &l) in clipped.iter().enumerate() {
            if l > 0.0 {
                let col = eig.eigenvectors.column(k);
                out += (col * col.adjoint()) * C64::new(l / total, 0.0);
            }
        }
        DensityMatrix::new(dims, out)
    }

    /// Local dimensions.
    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    /// The underlying D×D matrix.
    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    /// Purity tr(ρ²).
    pub fn purity(&self) -> f64 {
        purity_mat(&self.mat)
    }

    /// Eigenvalues (unsorted) of the state.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.mat)
    }

    /// Marginal on the particles `keep` (ascending order in the output).
    ///
    /// # Errors
    /// [`Error::InvalidPartition`] unless `keep` is a non-empty proper
    /// subset of the particles.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        if keep.is_empty() || keep.len() >= self.dims.len() {
            return Err(Error::InvalidPartition(
                "partial trace keeps a non-empty proper subset".into(),
            ));
        }
        let mat = partial_trace_mat(&self.mat, &self.dims, keep)?;
        let mut sorted = keep.to_vec();
        sorted.sort_unstable();
        let sub = Dims::new(sorted.iter().map(|&p| self.dims.as_slice()[p]).collect())?;
        Ok(DensityMatrix::trusted(sub, mat))
    }
}

/// Eigenvalues of a (near-)Hermitian matrix, via its symmetrized form.
fn hermitian_eigenvalues(mat: &CMat) -> Vec<f64> {
    let sym = (mat + mat.adjoint()) * C64::new(0.5, 0.0);
    sym.symmetric_eigen().eigenvalues.iter().cloned().collect()
}

/// The GHZ state (1/√d) Σ_i |i⟩^⊗N.
///
/// # Errors
/// [`Error::InvalidDimension`] for d < 2 or N < 2.
pub fn ghz_state(d: usize, n: usize) -> Result<PureState> {
    if d < 2 || n < 2 {
        return Err(Error::InvalidDimension(format!(
            "GHZ state needs d ≥ 2 and N ≥ 2, got d={d}, N={n}"
        )));
    }
    let dims = Dims::new(vec![d; n])?;
    let mut amps = CVec::zeros(dims.total());
    let amp = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    // |i⟩^⊗N sits at joint index i · (1 + s_0) where the stride sum
    // telescopes to (d^N − 1)/(d − 1); summing strides directly is clearer.
    let strides = dims.strides();
    let step: usize = strides.iter().sum();
    for i in 0..d {
        amps[i * step] = amp;
    }
    PureState::new(dims, amps)
}

/// The ψ₄₃₂ family over local dims (2,3,4):
/// c₁|000⟩ + c₂|111⟩ + c₃|012⟩ + c₄|123⟩, ket digits mapping to the
/// dimension list left-to-right (the only assignment under which all four
/// kets are valid).
///
/// # Errors
/// [`Error::Validation`] unless c has unit norm to 1e-12.
pub fn psi432_state(c: &[C64; 4]) -> Result<PureState> {
    let norm: f64 = c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > PURE_NORM_TOL {
        return Err(Error::Validation(format!(
            "coefficient vector norm {norm} deviates from 1"
        )));
    }
    let dims = Dims::new(vec![2, 3, 4])?;
    let kets: [[usize; 3]; 4] = [[0, 0, 0], [1, 1, 1], [0, 1, 2], [1, 2, 3]];
    let mut amps = CVec::zeros(dims.total());
    for (coeff, ket) in c.iter().zip(&kets) {
        amps[flatten_index(ket, &dims)] = *coeff;
    }
    PureState::new(dims, amps)
}

/// Candidate 1-uniform state (1/d) Σ_{μ<d²} g_μ^(1) ⊗ … ⊗ g_μ^(N) from
/// per-particle bases, where d is the smallest participating local
/// dimension. Returned only if the sum is an actual pure-state projector:
/// it must pass density-matrix validation *and* be rank one.
///
/// # Errors
/// [`Error::BasisMismatch`] when a basis holds fewer than d² elements;
/// [`Error::NotAState`] naming the failed check (Hermiticity, trace,
/// positivity, or rank) — generic local bases do not satisfy the defining
/// constraint, only specially aligned ones do.
pub fn one_uniform_state(bases: &[OperatorBasis]) -> Result<DensityMatrix> {
    if bases.is_empty() {
        return Err(Error::BasisMismatch("no bases supplied".into()));
    }
    let d = bases.iter().map(|b| b.dim()).min().expect("non-empty");
    let needed = d * d;
    for b in bases {
        if b.len() < needed {
            return Err(Error::BasisMismatch(format!(
                "basis for particle {} has {} elements, need d²={needed}",
                b.particle(),
                b.len()
            )));
        }
    }
    let dims = Dims::new(bases.iter().map(|b| b.dim()).collect())?;
    let total = dims.total();
    let mut sum = CMat::zeros(total, total);
    for mu in 0..needed {
        let factors: Vec<CMat> = bases.iter().map(|b| b.elements()[mu].clone()).collect();
        sum += kron_all(&factors);
    }
    sum /= C64::new(d as f64, 0.0);

    let state = DensityMatrix::new(dims, sum)?;
    // Rank-one check: one eigenvalue ≈ 1, the rest ≈ 0.
    let mut eigs = state.eigenvalues();
    eigs.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    if eigs.len() > 1 && eigs[1] > RANK_SV_THRESHOLD {
        return Err(Error::NotAState(format!(
            "candidate operator is not rank-1: second eigenvalue {:.3e}",
            eigs[1]
        )));
    }
    Ok(state)
}

/// A convex noise mixture p·signal + (1−p)·noise.
#[derive(Debug, Clone)]
pub struct NoiseMix {
    /// Mixing weight of the signal, in [0,1].
    pub p: f64,
    /// The state being certified.
    pub signal: DensityMatrix,
    /// The admixed noise state.
    pub noise: DensityMatrix,
}

/// Evaluates a noise mixture.
///
/// # Errors
/// [`Error::Validation`] for p outside [0,1];
/// [`Error::DimMismatch`] when signal and noise dims differ.
pub fn mix(noise_mix: &NoiseMix) -> Result<DensityMatrix> {
    let NoiseMix { p, signal, noise } = noise_mix;
    if !(0.0..=1.0).contains(p) {
        return Err(Error::Validation(format!("mixing weight {p} outside [0,1]")));
    }
    if signal.dims() != noise.dims() {
        return Err(Error::DimMismatch(format!(
            "signal dims {} vs noise dims {}",
            signal.dims(),
            noise.dims()
        )));
    }
    let mat =
        signal.matrix() * C64::new(*p, 0.0) + noise.matrix() * C64::new(1.0 - *p, 0.0);
    Ok(DensityMatrix::trusted(signal.dims().clone(), mat))
}

/// The maximally mixed state 𝟙/D.
pub fn maximally_mixed(dims: &Dims) -> DensityMatrix {
    let d = dims.total();
    let mat = DMatrix::identity(d, d) * C64::new(1.0 / d as f64, 0.0);
    DensityMatrix::trusted(dims.clone(), mat)
}
