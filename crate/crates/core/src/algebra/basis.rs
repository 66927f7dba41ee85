//! Per-particle operator bases: generalized Gell-Mann families and the
//! trace-orthogonality bookkeeping shared by every basis-dependent witness.
//!
//! Two normalization conventions coexist deliberately. Covariance-based
//! witnesses use UNIT bases (tr(g_μ g_ν) = δ_μν), while the
//! correlation-tensor bound is only dimensionally consistent under SCALED
//! bases (tr(σ_μ σ_ν) = d·δ_μν). Making the convention an explicit enum on
//! the basis type keeps the two families from being mixed accidentally.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{C64, CMat};
use crate::error::{Error, Result};
use crate::tol::BASIS_ORTHO_TOL;

/// Trace-normalization convention of an operator basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    /// tr(g_μ g_ν) = δ_μν.
    Unit,
    /// tr(σ_μ σ_ν) = d·δ_μν.
    Scaled,
}

impl Normalization {
    /// Diagonal value of the Gram matrix tr(g_μ† g_ν) under this convention
    /// in local dimension `d`.
    pub fn gram_scale(self, d: usize) -> f64 {
        match self {
            Normalization::Unit => 1.0,
            Normalization::Scaled => d as f64,
        }
    }
}

/// Trace-orthogonal operator basis attached to one particle.
///
/// The standard constructors ([`gellmann_basis`]) produce the full Hermitian
/// family: the normalized identity followed by the d²−1 generalized
/// Gell-Mann generators. The GHZ-aligned witness family
/// ([`crate::optimizer::canonical_ghz_bases`]) instead stores the operator
/// Schmidt units of the GHZ projector, which are trace-orthonormal but not
/// Hermitian; no Hermitian family reproduces that projector exactly, so the
/// witness contract wins over Hermiticity there (see that constructor's
/// docs). Code that requires Hermitian observables should check
/// [`OperatorBasis::is_hermitian`].
#[derive(Debug, Clone)]
pub struct OperatorBasis {
    particle: usize,
    dim: usize,
    normalization: Normalization,
    elements: Vec<CMat>,
}

impl OperatorBasis {
    /// Builds a basis after validating shapes and pairwise
    /// trace-orthogonality under the declared normalization.
    ///
    /// # Errors
    /// [`Error::BasisMismatch`] on empty input, shape mismatch, more than d²
    /// elements, or Gram-matrix deviation beyond 1e-12 per entry.
    pub fn new(
        particle: usize,
        dim: usize,
        normalization: Normalization,
        elements: Vec<CMat>,
    ) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::BasisMismatch("empty operator basis".into()));
        }
        if elements.len() > dim * dim {
            return Err(Error::BasisMismatch(format!(
                "{} elements exceed the d²={} limit for d={dim}",
                elements.len(),
                dim * dim
            )));
        }
        for (mu, el) in elements.iter().enumerate() {
            if el.nrows() != dim || el.ncols() != dim {
                return Err(Error::BasisMismatch(format!(
                    "element {mu} is {}×{}, expected {dim}×{dim}",
                    el.nrows(),
                    el.ncols()
                )));
            }
        }
        let scale = normalization.gram_scale(dim);
        for mu in 0..elements.len() {
            for nu in mu..elements.len() {
                let gram = (elements[mu].adjoint() * &elements[nu]).trace();
                let expect = if mu == nu { scale } else { 0.0 };
                let dev = (gram - C64::new(expect, 0.0)).norm();
                if dev > BASIS_ORTHO_TOL * scale.max(1.0) {
                    return Err(Error::BasisMismatch(format!(
                        "elements {mu},{nu} violate trace-orthogonality by {dev:.3e}"
                    )));
                }
            }
        }
        Ok(OperatorBasis {
            particle,
            dim,
            normalization,
            elements,
        })
    }

    /// Index of the particle this basis is attached to.
    pub fn particle(&self) -> usize {
        self.particle
    }

    /// Local dimension d.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Declared normalization convention.
    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    /// Basis elements, in construction order.
    pub fn elements(&self) -> &[CMat] {
        &self.elements
    }

    /// Number of elements (d² for complete bases).
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    /// True only for the degenerate case `new` rejects; kept for clippy.
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Whether every element is Hermitian to 1e-12.
    pub fn is_hermitian(&self) -> bool {
        self.elements
            .iter()
            .all(|el| (el - el.adjoint()).iter().all(|x| x.norm() <= 1e-12))
    }

    /// Returns the same basis tagged with a different particle index.
    pub fn with_particle(mut self, particle: usize) -> Self {
        self.particle = particle;
        self
    }

    /// Conjugates every element by a unitary: g_μ ↦ U g_μ U†.
    ///
    /// # Errors
    /// [`Error::DimMismatch`] if `u` is not d×d.
    pub fn rotated(&self, u: &CMat) -> Result<Self> {
        if u.nrows() != self.dim || u.ncols() != self.dim {
            return Err(Error::DimMismatch(format!(
                "rotation is {}×{}, basis dimension is {}",
                u.nrows(),
                u.ncols(),
                self.dim
            )));
        }
        let ud = u.adjoint();
        let elements = self.elements.iter().map(|g| u * g * &ud).collect();
        Ok(OperatorBasis {
            particle: self.particle,
            dim: self.dim,
            normalization: self.normalization,
            elements,
        })
    }

    /// Expansion coefficients of `m` in this basis: c_μ = tr(g_μ† m)/s with
    /// s the Gram scale. For a complete basis, `reconstruct(expand(m)) = m`.
    ///
    /// # Errors
    /// [`Error::DimMismatch`] if `m` is not d×d.
    pub fn expand(&self, m: &CMat) -> Result<Vec<C64>> {
        if m.nrows() != self.dim || m.ncols() != self.dim {
            return Err(Error::DimMismatch(format!(
                "operand is {}×{}, basis dimension is {}",
                m.nrows(),
                m.ncols(),
                self.dim
            )));
        }
        let scale = self.normalization.gram_scale(self.dim);
        Ok(self
            .elements
            .iter()
            .map(|g| (g.adjoint() * m).trace() / scale)
            .collect())
    }

    /// Linear combination Σ_μ c_μ g_μ.
    ///
    /// # Errors
    /// [`Error::BasisMismatch`] if the coefficient count differs from the
    /// element count.
    pub fn reconstruct(&self, coeffs: &[C64]) -> Result<CMat> {
        if coeffs.len() != self.elements.len() {
            return Err(Error::BasisMismatch(format!(
                "{} coefficients for {} elements",
                coeffs.len(),
                self.elements.len()
            )));
        }
        let mut out = CMat::zeros(self.dim, self.dim);
        for (c, g) in coeffs.iter().zip(&self.elements) {
            out += g * *c;
        }
        Ok(out)
    }
}

/// Builds the generalized Gell-Mann basis of local dimension `d`:
/// the normalized identity, then the symmetric, antisymmetric, and diagonal
/// generator families, orthonormalized per `normalization`.
///
/// Element order: identity; (i,j)-symmetric for i<j in lexicographic order;
/// (i,j)-antisymmetric likewise; then the d−1 diagonal generators. The
/// basis is tagged to particle 0; re-tag with
/// [`OperatorBasis::with_particle`] when assembling per-particle lists.
///
/// # Errors
/// [`Error::InvalidDimension`] for d < 2.
pub fn gellmann_basis(d: usize, normalization: Normalization) -> Result<OperatorBasis> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!(
            "gell-mann basis needs d ≥ 2, got {d}"
        )));
    }
    let mut elements: Vec<CMat> = Vec::with_capacity(d * d);
    let inv_sqrt_d = 1.0 / (d as f64).sqrt();
    elements.push(CMat::identity(d, d) * C64::new(inv_sqrt_d, 0.0));

    let s = 1.0 / 2.0_f64.sqrt();
    for i in 0..d {
        for j in (i + 1)..d {
            let mut m = CMat::zeros(d, d);
            m[(i, j)] = C64::new(s, 0.0);
            m[(j, i)] = C64::new(s, 0.0);
            elements.push(m);
        }
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let mut m = CMat::zeros(d, d);
            m[(i, j)] = C64::new(0.0, -s);
            m[(j, i)] = C64::new(0.0, s);
            elements.push(m);
        }
    }
    for l in 1..d {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut m = CMat::zeros(d, d);
        for k in 0..l {
            m[(k, k)] = C64::new(norm, 0.0);
        }
        m[(l, l)] = C64::new(-(l as f64) * norm, 0.0);
        elements.push(m);
    }

    if normalization == Normalization::Scaled {
        let f = C64::new((d as f64).sqrt(), 0.0);
        for el in &mut elements {
            *el *= f;
        }
    }
    OperatorBasis::new(0, d, normalization, elements)
}

/// One UNIT Gell-Mann basis per particle, tagged in particle order.
pub fn gellmann_bases(dims: &super::Dims, normalization: Normalization) -> Result<Vec<OperatorBasis>> {
    dims.as_slice()
        .iter()
        .enumerate()
        .map(|(n, &d)| Ok(gellmann_basis(d, normalization)?.with_particle(n)))
        .collect()
}

/// Gram matrix tr(g_μ† g_ν) of a basis, mainly for tests and diagnostics.
pub fn gram_matrix(basis: &OperatorBasis) -> DMatrix<C64> {
    let k = basis.len();
    DMatrix::from_fn(k, k, |mu, nu| {
        (basis.elements()[mu].adjoint() * &basis.elements()[nu]).trace()
    })
}

/// Full expectation tensor T[μ₁…μ_N] = tr(m · g_μ₁ ⊗ … ⊗ g_μ_N) over
/// complete per-particle bases, flattened row-major over the per-particle
/// basis indices (particle 0 slowest, each index running over d_n²).
///
/// Computed by contracting one particle mode at a time, so the cost is
/// O(D² Σ_n d_n²) rather than the O(D⁴) of evaluating every product
/// operator separately. The flat layout matches the strides of the
/// squared-dimension list, so subsets of indices can be addressed with the
/// same machinery as joint-space indices.
///
/// # Errors
/// [`Error::BasisMismatch`] unless there is exactly one complete
/// (d_n²-element) basis per particle with matching local dimension;
/// [`Error::DimMismatch`] if `mat` is not D×D.
pub fn expectation_tensor(
    mat: &CMat,
    dims: &super::Dims,
    bases: &[OperatorBasis],
) -> Result<Vec<C64>> {
    let n = dims.len();
    if bases.len() != n {
        return Err(Error::BasisMismatch(format!(
            "{} bases for {n} particles",
            bases.len()
        )));
    }
    for (k, b) in bases.iter().enumerate() {
        let d = dims.as_slice()[k];
        if b.dim() != d {
            return Err(Error::BasisMismatch(format!(
                "basis {k} has dimension {}, particle has {d}",
                b.dim()
            )));
        }
        if b.len() != d * d {
            return Err(Error::BasisMismatch(format!(
                "basis {k} has {} elements, a complete basis needs {}",
                b.len(),
                d * d
            )));
        }
    }
    let d_total = dims.total();
    if mat.nrows() != d_total || mat.ncols() != d_total {
        return Err(Error::DimMismatch(format!(
            "operand is {}×{}, dims {dims} require {d_total}×{d_total}",
            mat.nrows(),
            mat.ncols()
        )));
    }

    let dvec = dims.as_slice();
    let sq: Vec<usize> = dvec.iter().map(|&d| d * d).collect();
    let mut strides = vec![0usize; n];
    let mut acc = 1usize;
    for k in (0..n).rev() {
        strides[k] = acc;
        acc *= sq[k];
    }
    let total = acc; // = D²

    // Working tensor: per-particle blocks hold the pair (i_n, j_n) as
    // i_n·d_n + j_n until that particle is contracted, after which the
    // block coordinate is the basis index μ_n. tr(m·A) = Σ m[i,j]·A[j,i].
    let mut cur = vec![C64::new(0.0, 0.0); total];
    for i in 0..d_total {
        let iv = super::unflatten_index(i, dims);
        for j in 0..d_total {
            let jv = super::unflatten_index(j, dims);
            let mut idx = 0;
            for k in 0..n {
                idx += (iv[k] * dvec[k] + jv[k]) * strides[k];
            }
            cur[idx] = mat[(i, j)];
        }
    }

    for site in 0..n {
        let d = dvec[site];
        let b = sq[site];
        // gmat[μ·b + (i·d + j)] = g_μ[j, i], the factor each pair picks up.
        let mut gmat = vec![C64::new(0.0, 0.0); b * b];
        for (mu, el) in bases[site].elements().iter().enumerate() {
            for i in 0..d {
                for j in 0..d {
                    gmat[mu * b + (i * d + j)] = el[(j, i)];
                }
            }
        }
        let stride = strides[site];
        let outer = total / (b * stride);
        let mut next = vec![C64::new(0.0, 0.0); total];
        for o in 0..outer {
            let base_o = o * b * stride;
            for inner in 0..stride {
                let base = base_o + inner;
                for mu in 0..b {
                    let mut sum = C64::new(0.0, 0.0);
                    for p in 0..b {
                        sum += gmat[mu * b + p] * cur[base + p * stride];
                    }
                    next[base + mu * stride] = sum;
                }
            }
        }
        cur = next;
    }
    Ok(cur)
}
