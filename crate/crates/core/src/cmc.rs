//! Covariance-based certification: cross-covariance witness values f_α,
//! the majorization feasibility system over all bipartitions, and the
//! 1-uniform product-basis witness W.
//!
//! For each bipartition α, f_α combines the nuclear norm of the
//! cross-covariance block between the two sides with their marginal
//! purities; a pure state of Schmidt rank r across α satisfies f_α ≤ r, so
//! the vector of f values majorizes information about the entire
//! entanglement-dimensionality vector at once. The witness W is a single
//! basis-dependent number bounding the smallest entry of that vector.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::algebra::basis::{expectation_tensor, gellmann_bases, Normalization, OperatorBasis};
use crate::algebra::{kron_all, subset_offsets, C64, Dims};
use crate::error::{Error, Result};
use crate::lattice::majorization::majorization_feasible;
use crate::lattice::{enumerate_bipartitions, Bipartition, CandidateVector, CriterionReport, RankSemantics};
use crate::states::DensityMatrix;
use crate::tol::EXCLUSION_SLACK;

/// Cross-covariance block of a state across one bipartition: entries
/// ⟨g_K ⊗ g_L⟩ − ⟨g_K⟩⟨g_L⟩ over UNIT product bases of the two sides,
/// rows indexed by the α side (row-major over member particles' basis
/// indices), columns by the complement.
#[derive(Debug, Clone)]
pub struct CrossCovariance {
    /// The bipartition the block refers to.
    pub alpha: Bipartition,
    /// Real matrix of shape D_α² × D_ᾱ².
    pub matrix: DMatrix<f64>,
}

/// Shared per-state context: the full expectation tensor in UNIT bases
/// plus the squared-dimension addressing. Computing it once serves every
/// bipartition of the same state.
struct UnitTensor {
    flat: Vec<C64>,
    sq_dims: Dims,
    dims: Dims,
}

impl UnitTensor {
    fn build(rho: &DensityMatrix, bases: &[OperatorBasis]) -> Result<Self> {
        for b in bases {
            if b.normalization() != Normalization::Unit {
                return Err(Error::BasisMismatch(
                    "cross-covariances require UNIT-normalized bases".into(),
                ));
            }
        }
        let dims = rho.dims().clone();
        let flat = expectation_tensor(rho.matrix(), &dims, bases)?;
        let sq_dims = Dims::new(dims.as_slice().iter().map(|&d| d * d).collect())?;
        Ok(UnitTensor {
            flat,
            sq_dims,
            dims,
        })
    }

    fn canonical(rho: &DensityMatrix) -> Result<Self> {
        let bases = gellmann_bases(rho.dims(), Normalization::Unit)?;
        Self::build(rho, &bases)
    }

    /// Cross-covariance block for one bipartition. The subtracted product
    /// uses ⟨g_K⟩ = √D_ᾱ·T[K,0] (the identity element of a UNIT basis is
    /// 𝟙/√d, so padding the complement with identities rescales by √D_ᾱ).
    fn cross_covariance(&self, alpha: &Bipartition) -> Result<CrossCovariance> {
        let n = self.dims.len();
        let comp = alpha.complement(n);
        let rows = subset_offsets(&self.sq_dims, alpha.members());
        let cols = subset_offsets(&self.sq_dims, &comp);
        let scale = (self.dims.total() as f64).sqrt();
        let mut matrix = DMatrix::zeros(rows.len(), cols.len());
        let mut worst_imag = 0.0_f64;
        for (r, &ro) in rows.iter().enumerate() {
            let marg_r = self.flat[ro];
            for (c, &co) in cols.iter().enumerate() {
                let x = self.flat[ro + co] - marg_r * self.flat[co] * scale;
                worst_imag = worst_imag.max(x.im.abs());
                matrix[(r, c)] = x.re;
            }
        }
        if worst_imag > 1e-10 {
            return Err(Error::Validation(format!(
                "cross-covariance has imaginary parts up to {worst_imag:.3e}; \
                 the bases are not Hermitian"
            )));
        }
        Ok(CrossCovariance {
            alpha: alpha.clone(),
            matrix,
        })
    }

    /// 1 − tr ρ_side² from the tensor alone: the marginal's squared Bloch
    /// components sum to its purity (Parseval under a UNIT basis).
    fn purity_complement(&self, side: &[usize]) -> f64 {
        let n = self.dims.len();
        let other: Vec<usize> = (0..n).filter(|p| !side.contains(p)).collect();
        let other_dim: usize = other.iter().map(|&p| self.dims.as_slice()[p]).product();
        let offsets = subset_offsets(&self.sq_dims, side);
        let sum: f64 = offsets.iter().map(|&o| self.flat[o].norm_sqr()).sum();
        (1.0 - other_dim as f64 * sum).max(0.0)
    }

    fn f_value(&self, alpha: &Bipartition) -> Result<f64> {
        let block = self.cross_covariance(alpha)?;
        let nuclear: f64 = block
            .matrix
            .svd(false, false)
            .singular_values
            .iter()
            .sum();
        let e_alpha = self.purity_complement(alpha.members());
        let comp = alpha.complement(self.dims.len());
        let e_comp = self.purity_complement(&comp);
        Ok(nuclear - (e_alpha * e_comp).sqrt() + 1.0)
    }
}

/// Cross-covariance block of `rho` across `alpha` in the given UNIT bases.
///
/// # Errors
/// Basis-normalization mismatches and shape errors; a validation error if
/// the entries come out non-real (non-Hermitian bases).
pub fn cross_covariance(
    rho: &DensityMatrix,
    alpha: &Bipartition,
    bases: &[OperatorBasis],
) -> Result<CrossCovariance> {
    UnitTensor::build(rho, bases)?.cross_covariance(alpha)
}

/// f_α in explicitly supplied UNIT bases; the value is basis-independent,
/// so this entry point exists for invariance tests and diagnostics.
///
/// # Errors
/// Same as [`cross_covariance`].
pub fn f_value_with(
    rho: &DensityMatrix,
    alpha: &Bipartition,
    bases: &[OperatorBasis],
) -> Result<f64> {
    UnitTensor::build(rho, bases)?.f_value(alpha)
}

/// f_α = tr|X^(α)| − √((1−tr ρ_α²)(1−tr ρ_ᾱ²)) + 1 in the canonical
/// Gell-Mann frame. A pure state of Schmidt rank r across α has f_α ≤ r.
///
/// # Errors
/// Propagates internal basis-construction failures only.
pub fn f_value(rho: &DensityMatrix, alpha: &Bipartition) -> Result<f64> {
    UnitTensor::canonical(rho)?.f_value(alpha)
}

/// f values for every bipartition (in [`enumerate_bipartitions`] order),
/// sharing one expectation tensor across cuts.
///
/// # Errors
/// Propagates internal basis-construction failures only.
pub fn f_values(rho: &DensityMatrix) -> Result<Vec<f64>> {
    let tensor = UnitTensor::canonical(rho)?;
    enumerate_bipartitions(rho.dims())
        .iter()
        .map(|alpha| tensor.f_value(alpha))
        .collect()
}

/// Certification by the feasibility system: a candidate vector v survives
/// iff some R ≥ f with R majorized by v exists (decided by the LP in
/// [`majorization_feasible`]). The report carries every f_α under keys
/// "f_1"… and the max-element bound ⌈max_α f_α⌉ under "sn1_lower".
///
/// # Errors
/// Propagates f-value failures; reports with an empty feasible set become
/// [`Error::Inconsistent`] downstream when queried for a certified vector.
pub fn exclusion_by_system(
    rho: &DensityMatrix,
    candidates: &[CandidateVector],
) -> Result<CriterionReport> {
    let f = f_values(rho)?;
    let mut witness_values = BTreeMap::new();
    for (k, &value) in f.iter().enumerate() {
        witness_values.insert(format!("f_{}", k + 1), value);
    }
    let max_f = f.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    witness_values.insert(
        "sn1_lower".into(),
        (max_f - EXCLUSION_SLACK).ceil().max(1.0),
    );

    let excluded: Vec<CandidateVector> = candidates
        .iter()
        .filter(|v| !majorization_feasible(&f, v))
        .cloned()
        .collect();
    CriterionReport::from_exclusions(
        "cmc-system",
        RankSemantics::SnVector,
        candidates,
        excluded,
        witness_values,
    )
}

/// The product-basis witness W = Σ_{μ<d²} ⟨g_μ^(1) ⊗ … ⊗ g_μ^(N)⟩ with
/// d = min_n d_n. In the GHZ-aligned frame this equals d·⟨GHZ|ρ|GHZ⟩.
///
/// # Errors
/// [`Error::BasisMismatch`] when a basis holds fewer than d² elements or
/// the particle count differs from the state's.
pub fn product_basis_witness(rho: &DensityMatrix, bases: &[OperatorBasis]) -> Result<f64> {
    let dims = rho.dims();
    if bases.len() != dims.len() {
        return Err(Error::BasisMismatch(format!(
            "{} bases for {} particles",
            bases.len(),
            dims.len()
        )));
    }
    for (b, &d) in bases.iter().zip(dims.as_slice()) {
        if b.dim() != d {
            return Err(Error::BasisMismatch(format!(
                "basis for particle {} has dimension {}, state has {d}",
                b.particle(),
                b.dim()
            )));
        }
    }
    let d_min = dims.min_dim();
    let needed = d_min * d_min;
    for b in bases {
        if b.len() < needed {
            return Err(Error::BasisMismatch(format!(
                "basis for particle {} has {} elements, the witness sum needs d²={needed}",
                b.particle(),
                b.len()
            )));
        }
    }
    // Σ_μ ⊗_n g_μ is assembled once; W = tr(ρ·S). The witness is real for
    // any family whose defining sum is Hermitian (all families used here).
    let total = dims.total();
    let mut s = nalgebra::DMatrix::zeros(total, total);
    for mu in 0..needed {
        let factors: Vec<_> = bases.iter().map(|b| b.elements()[mu].clone()).collect();
        s += kron_all(&factors);
    }
    let w = (rho.matrix() * s).trace();
    debug_assert!(w.im.abs() < 1e-8, "witness imaginary part {:.3e}", w.im);
    Ok(w.re)
}

/// Exclusion by the witness: v is excluded iff its smallest entry v_𝒩
/// falls below W − 1e-9. `basis_label` records which frame produced W
/// (canonical, optimized, …) in the criterion name.
///
/// # Errors
/// Same as [`product_basis_witness`].
pub fn exclusion_by_witness(
    rho: &DensityMatrix,
    bases: &[OperatorBasis],
    basis_label: &str,
    candidates: &[CandidateVector],
) -> Result<CriterionReport> {
    let w = product_basis_witness(rho, bases)?;
    exclusion_from_witness_value(w, basis_label, candidates)
}

/// Builds the witness report from an already-computed W (the optimizer
/// calls this after maximizing over frames).
///
/// # Errors
/// Report-construction failures only.
pub fn exclusion_from_witness_value(
    w: f64,
    basis_label: &str,
    candidates: &[CandidateVector],
) -> Result<CriterionReport> {
    let mut witness_values = BTreeMap::new();
    witness_values.insert("W".into(), w);
    let excluded: Vec<CandidateVector> = candidates
        .iter()
        .filter(|v| {
            let v_last = *v.entries().last().expect("non-empty candidate") as f64;
            v_last < w - EXCLUSION_SLACK
        })
        .cloned()
        .collect();
    CriterionReport::from_exclusions(
        format!("product-witness[{basis_label}]"),
        RankSemantics::SnVector,
        candidates,
        excluded,
        witness_values,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::CVec;
    use crate::lattice::enumerate_candidates;
    use crate::optimizer::canonical_ghz_bases;
    use crate::states::sampler::{haar_random_pure, haar_unitary, stream_rng, unit_sphere_coeffs};
    use crate::states::{ghz_state, maximally_mixed, mix, psi432_state, NoiseMix, PureState};
    use approx::assert_relative_eq;
    use rand::Rng;

    fn dims333() -> Dims {
        Dims::new(vec![3, 3, 3]).unwrap()
    }

    fn noisy_ghz(p: f64) -> DensityMatrix {
        let ghz = ghz_state(3, 3).unwrap().density();
        mix(&NoiseMix {
            p,
            signal: ghz.clone(),
            noise: maximally_mixed(ghz.dims()),
        })
        .unwrap()
    }

    /// Random pure product state on the given dims.
    fn product_pure(dims: &Dims, seed: u64) -> PureState {
        let mut rng = stream_rng(seed, 0);
        let factors: Vec<CVec> = dims
            .as_slice()
            .iter()
            .map(|&d| CVec::from_vec(unit_sphere_coeffs(d, &mut rng)))
            .collect();
        let mut amps = CVec::from_element(1, C64::new(1.0, 0.0));
        for f in &factors {
            amps = amps.kronecker(f);
        }
        PureState::new(dims.clone(), amps).unwrap()
    }

    #[test]
    fn product_states_have_unit_f_and_zero_covariance() {
        let dims = dims333();
        let bases = gellmann_bases(&dims, Normalization::Unit).unwrap();
        for seed in 0..5 {
            let rho = product_pure(&dims, seed).density();
            for alpha in enumerate_bipartitions(&dims) {
                let block = cross_covariance(&rho, &alpha, &bases).unwrap();
                assert!(
                    block.matrix.iter().all(|x| x.abs() < 1e-10),
                    "covariance does not factorize"
                );
                let f = f_value(&rho, &alpha).unwrap();
                assert_relative_eq!(f, 1.0, epsilon = 1e-9);
            }
        }

        // Mixed product states also have vanishing cross-covariance.
        let mut rng = stream_rng(50, 0);
        let single = Dims::new(vec![3]).unwrap();
        let parts: Vec<_> = (0..3)
            .map(|_| {
                crate::states::sampler::haar_random_density(&single, &mut rng)
                    .matrix()
                    .clone()
            })
            .collect();
        let rho = DensityMatrix::new(dims.clone(), kron_all(&parts)).unwrap();
        for alpha in enumerate_bipartitions(&dims) {
            let block = cross_covariance(&rho, &alpha, &bases).unwrap();
            assert!(block.matrix.iter().all(|x| x.abs() < 1e-10));
        }
    }

    #[test]
    fn ghz_nuclear_norm_and_f_anchors() {
        // tr|X| across a single-particle cut of GHZ(3,3) is 2 + 2/3.
        let ghz3 = ghz_state(3, 3).unwrap().density();
        let bases = gellmann_bases(&dims333(), Normalization::Unit).unwrap();
        let cuts = enumerate_bipartitions(&dims333());
        let block = cross_covariance(&ghz3, &cuts[0], &bases).unwrap();
        let nuclear: f64 = block.matrix.svd(false, false).singular_values.iter().sum();
        assert_relative_eq!(nuclear, 8.0 / 3.0, epsilon = 1e-9);

        // f hits the local dimension on every cut, for d = 2, 3, 4.
        for d in [2usize, 3, 4] {
            let rho = ghz_state(d, 3).unwrap().density();
            for alpha in enumerate_bipartitions(rho.dims()) {
                let f = f_value(&rho, &alpha).unwrap();
                assert_relative_eq!(f, d as f64, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn maximally_mixed_state_excludes_nothing() {
        let rho = maximally_mixed(&dims333());
        let bases = gellmann_bases(&dims333(), Normalization::Unit).unwrap();
        for alpha in enumerate_bipartitions(&dims333()) {
            let block = cross_covariance(&rho, &alpha, &bases).unwrap();
            assert!(block.matrix.iter().all(|x| x.abs() < 1e-12));
            assert!(f_value(&rho, &alpha).unwrap() <= 1.0);
        }
        let candidates = enumerate_candidates(&dims333());
        let report = exclusion_by_system(&rho, &candidates).unwrap();
        assert!(report.excluded.is_empty());
        assert_eq!(report.certified_vector().entries(), &[1, 1, 1]);
    }

    /// At the witness crossing p = 17/26 the f value has a closed form:
    /// tr|X(p)| = p·8/3 (only the GHZ tensor survives; the subtracted
    /// products vanish because every single-particle marginal stays
    /// maximally mixed), and the two-particle marginal purity is
    /// 3(p/3 + (1−p)/9)² + 6((1−p)/9)².
    #[test]
    fn noisy_ghz_f_matches_closed_form_at_crossing() {
        let p = 17.0 / 26.0;
        let rho = noisy_ghz(p);
        let two_party_purity =
            3.0 * (p / 3.0 + (1.0 - p) / 9.0).powi(2) + 6.0 * ((1.0 - p) / 9.0).powi(2);
        let expect = p * 8.0 / 3.0 - (2.0 / 3.0 * (1.0 - two_party_purity)).sqrt() + 1.0;
        for (k, f) in f_values(&rho).unwrap().into_iter().enumerate() {
            assert_relative_eq!(f, expect, epsilon = 1e-9);
            assert!(f > 2.0 && f < 3.0, "f_{k} = {f} outside (2,3)");
        }
    }

    #[test]
    fn f_is_invariant_under_local_basis_rotations() {
        let mut rng = stream_rng(314, 0);
        let states = [noisy_ghz(0.8), haar_random_pure(&dims333(), &mut rng).density()];
        let base = gellmann_bases(&dims333(), Normalization::Unit).unwrap();
        let cuts = enumerate_bipartitions(&dims333());
        for rho in &states {
            let reference: Vec<f64> = cuts.iter().map(|a| f_value(rho, a).unwrap()).collect();
            for _ in 0..10 {
                let rotated: Vec<OperatorBasis> = base
                    .iter()
                    .map(|b| b.rotated(&haar_unitary(3, &mut rng)).unwrap())
                    .collect();
                for (alpha, &expect) in cuts.iter().zip(&reference) {
                    let f = f_value_with(rho, alpha, &rotated).unwrap();
                    assert!(
                        (f - expect).abs() < 1e-8,
                        "rotation moved f from {expect} to {f}"
                    );
                }
            }
        }
    }

    /// For pure states, f_α never exceeds the Schmidt rank across α.
    #[test]
    fn pure_state_f_is_bounded_by_schmidt_rank() {
        for dims in [dims333(), Dims::new(vec![2, 3, 4]).unwrap()] {
            let mut rng = stream_rng(271, 1);
            for _ in 0..50 {
                let psi = haar_random_pure(&dims, &mut rng);
                let rho = psi.density();
                for alpha in enumerate_bipartitions(&dims) {
                    let rank = psi.schmidt_rank(alpha.members()).unwrap();
                    let f = f_value(&rho, &alpha).unwrap();
                    assert!(
                        f <= rank as f64 + 1e-8,
                        "f = {f} exceeds rank {rank} on cut {alpha}"
                    );
                }
            }
        }
    }

    #[test]
    fn ghz_system_certifies_the_full_vector() {
        let candidates = enumerate_candidates(&dims333());
        let report =
            exclusion_by_system(&ghz_state(3, 3).unwrap().density(), &candidates).unwrap();
        assert_eq!(report.certified_vector().entries(), &[3, 3, 3]);
        assert_eq!(report.excluded.len(), candidates.len() - 1);
        assert_relative_eq!(report.witness_values["sn1_lower"], 3.0, epsilon = 1e-12);
        assert_relative_eq!(report.witness_values["f_1"], 3.0, epsilon = 1e-9);
    }

    /// Candidates feasible for both mixture components stay feasible for
    /// the mixture (f is concave under mixing, and the feasible f-region
    /// of a fixed candidate is convex and downward closed).
    #[test]
    fn mixtures_preserve_jointly_feasible_candidates() {
        let candidates = enumerate_candidates(&dims333());
        let mut rng = stream_rng(999, 0);
        for trial in 0..30 {
            let (a, b) = if trial < 15 {
                (
                    haar_random_pure(&dims333(), &mut rng).density(),
                    haar_random_pure(&dims333(), &mut rng).density(),
                )
            } else {
                (
                    noisy_ghz(0.5 + 0.5 * rng.gen::<f64>()),
                    noisy_ghz(0.5 + 0.5 * rng.gen::<f64>()),
                )
            };
            let p: f64 = rng.gen();
            let mixed = mix(&NoiseMix {
                p,
                signal: a.clone(),
                noise: b.clone(),
            })
            .unwrap();
            let fa = f_values(&a).unwrap();
            let fb = f_values(&b).unwrap();
            let fm = f_values(&mixed).unwrap();
            for v in &candidates {
                if majorization_feasible(&fa, v) && majorization_feasible(&fb, v) {
                    assert!(
                        majorization_feasible(&fm, v),
                        "candidate {} lost under mixing (p={p:.3})",
                        v.compact()
                    );
                }
            }
        }
    }

    /// An equal mixture of a (4,2,2)-rank and a (3,3,2)-rank pure state in
    /// dims (2,3,4) must keep candidate (322) feasible, and the mixture's
    /// f values must respect the averaged per-cut rank bounds.
    #[test]
    fn rank_structured_mixture_keeps_322_feasible() {
        let dims = Dims::new(vec![2, 3, 4]).unwrap();
        let mut rng = stream_rng(606, 3);

        // State A: rank 4 across the dim-4 particle, rank 2 across the
        // others — Σ_j √μ_j |χ_j⟩_{01} |e_j⟩_2 with the χ_j confined to
        // C² ⊗ span{|0⟩,|1⟩} so the dim-3 marginal has rank 2.
        let mut amps_a = CVec::zeros(24);
        let weights = [0.4_f64, 0.3, 0.2, 0.1];
        for (j, &w) in weights.iter().enumerate() {
            let chi = unit_sphere_coeffs(4, &mut rng); // (i0, i1) ∈ {0,1}²
            for i0 in 0..2 {
                for i1 in 0..2 {
                    let joint = i0 * 12 + i1 * 4 + j;
                    amps_a[joint] += C64::new(w.sqrt(), 0.0) * chi[i0 * 2 + i1];
                }
            }
        }
        amps_a /= C64::new(amps_a.norm(), 0.0);
        let a = PureState::new(dims.clone(), amps_a).unwrap();
        assert_eq!(a.schmidt_rank(&[0]).unwrap(), 2);
        assert_eq!(a.schmidt_rank(&[1]).unwrap(), 2);
        assert_eq!(a.schmidt_rank(&[2]).unwrap(), 4);

        // State B: rank 3 across the dim-3 and dim-4 particles, rank 2
        // across the qubit — Σ_j √ν_j |f_j⟩_1 |ξ_j⟩_{02} with the ξ_j
        // confined to C² ⊗ span{|0⟩,|1⟩,|2⟩} so the dim-4 marginal keeps
        // rank 3.
        let mut amps_b = CVec::zeros(24);
        let nu = [0.5_f64, 0.3, 0.2];
        for (j, &w) in nu.iter().enumerate() {
            let xi = unit_sphere_coeffs(6, &mut rng); // (i0, i2) ∈ {0,1}×{0,1,2}
            for i0 in 0..2 {
                for i2 in 0..3 {
                    let joint = i0 * 12 + j * 4 + i2;
                    amps_b[joint] += C64::new(w.sqrt(), 0.0) * xi[i0 * 3 + i2];
                }
            }
        }
        amps_b /= C64::new(amps_b.norm(), 0.0);
        let b = PureState::new(dims.clone(), amps_b).unwrap();
        assert_eq!(b.schmidt_rank(&[0]).unwrap(), 2);
        assert_eq!(b.schmidt_rank(&[1]).unwrap(), 3);
        assert_eq!(b.schmidt_rank(&[2]).unwrap(), 3);

        let mixed = mix(&NoiseMix {
            p: 0.5,
            signal: a.density(),
            noise: b.density(),
        })
        .unwrap();
        let f = f_values(&mixed).unwrap();
        let cuts = enumerate_bipartitions(&dims);
        for (alpha, &fv) in cuts.iter().zip(&f) {
            let ra = a.schmidt_rank(alpha.members()).unwrap() as f64;
            let rb = b.schmidt_rank(alpha.members()).unwrap() as f64;
            assert!(
                fv <= 0.5 * (ra + rb) + 1e-8,
                "f on {alpha} is {fv}, above the averaged bound {}",
                0.5 * (ra + rb)
            );
        }
        let candidates = enumerate_candidates(&dims);
        let report = exclusion_by_system(&mixed, &candidates).unwrap();
        let v322 = CandidateVector::new(vec![3, 2, 2]).unwrap();
        assert!(
            !report.excluded.contains(&v322),
            "candidate (322) wrongly excluded; f = {f:?}"
        );
    }

    #[test]
    fn witness_equals_scaled_fidelity_on_ghz() {
        let ghz = ghz_state(3, 3).unwrap();
        let rho = ghz.density();
        let bases = canonical_ghz_bases(3, 3).unwrap();
        let w = product_basis_witness(&rho, &bases).unwrap();
        let fidelity =
            (ghz.amplitudes().adjoint() * rho.matrix() * ghz.amplitudes())[(0, 0)].re;
        assert_relative_eq!(w, 3.0 * fidelity, epsilon = 1e-9);
        assert_relative_eq!(w, 3.0, epsilon = 1e-9);
    }

    /// W(p) = 3p + (1−p)/9 on the noisy-GHZ family, crossing 2 exactly at
    /// p = 17/26. Exclusion of the two-everywhere candidates flips there.
    #[test]
    fn witness_crossing_matches_closed_form()  {
        let bases = canonical_ghz_bases(3, 3).unwrap();
        let candidates = enumerate_candidates(&dims333());
        for p in [0.0, 0.3, 17.0 / 26.0, 0.8, 1.0] {
            let w = product_basis_witness(&noisy_ghz(p), &bases).unwrap();
            assert_relative_eq!(w, 3.0 * p + (1.0 - p) / 9.0, epsilon = 1e-9);
        }
        let at_crossing = product_basis_witness(&noisy_ghz(17.0 / 26.0), &bases).unwrap();
        assert_relative_eq!(at_crossing, 2.0, epsilon = 1e-9);

        // Just above the crossing W > 2 rules out every candidate whose
        // smallest entry is below 3, leaving only (333).
        let above = exclusion_by_witness(
            &noisy_ghz(17.0 / 26.0 + 1e-3),
            &bases,
            "canonical-ghz",
            &candidates,
        )
        .unwrap();
        assert_eq!(above.certified_vector().entries(), &[3, 3, 3]);
        assert_eq!(above.excluded.len(), candidates.len() - 1);
        // Just below, min-entry-2 candidates survive (W is still above 1,
        // so the min-entry-1 candidates stay excluded).
        let below = exclusion_by_witness(
            &noisy_ghz(17.0 / 26.0 - 1e-3),
            &bases,
            "canonical-ghz",
            &candidates,
        )
        .unwrap();
        assert_eq!(below.certified_vector().entries(), &[2, 2, 2]);
        assert!(below
            .excluded
            .iter()
            .all(|v| *v.entries().last().unwrap() == 1));
    }

    #[test]
    fn product_states_keep_witness_at_most_one() {
        let dims = dims333();
        let mut rng = stream_rng(11, 7);
        let canonical = canonical_ghz_bases(3, 3).unwrap();
        for seed in 0..100 {
            let rho = product_pure(&dims, 1000 + seed).density();
            let bases: Vec<OperatorBasis> = canonical
                .iter()
                .map(|b| b.rotated(&haar_unitary(3, &mut rng)).unwrap())
                .collect();
            let w = product_basis_witness(&rho, &bases).unwrap();
            assert!(w <= 1.0 + 1e-9, "product state has W = {w}");
        }
    }

    /// W never exceeds max_α f_α (the witness is a weakening of the
    /// covariance system), checked across random and structured states.
    #[test]
    fn witness_is_bounded_by_max_f() {
        let bases = canonical_ghz_bases(3, 3).unwrap();
        let mut rng = stream_rng(2718, 0);
        for trial in 0..200 {
            let rho = if trial % 2 == 0 {
                crate::states::sampler::haar_random_density(&dims333(), &mut rng)
            } else {
                noisy_ghz(rng.gen::<f64>())
            };
            let w = product_basis_witness(&rho, &bases).unwrap();
            let max_f = f_values(&rho)
                .unwrap()
                .into_iter()
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(
                w <= max_f + 1e-8,
                "W = {w} exceeds max f = {max_f} on trial {trial}"
            );
        }
    }

    #[test]
    fn exclusion_by_system_regression_on_noisy_ghz() {
        // At p = 17/26 every f is ≈ 2.016, which kills all candidates with
        // a largest entry of 2 or less but keeps (322), (331), (332),
        // (333): the certified componentwise floor is (3,2,1). The system
        // beats the witness in the first component and trades away the
        // last one — frozen behavior for the mixture family.
        let candidates = enumerate_candidates(&dims333());
        let report = exclusion_by_system(&noisy_ghz(17.0 / 26.0), &candidates).unwrap();
        assert_eq!(report.certified_vector().entries(), &[3, 2, 1]);
        let pure = exclusion_by_system(&noisy_ghz(1.0), &candidates).unwrap();
        assert_eq!(pure.certified_vector().entries(), &[3, 3, 3]);
        let mixed = exclusion_by_system(&noisy_ghz(0.0), &candidates).unwrap();
        assert_eq!(mixed.certified_vector().entries(), &[1, 1, 1]);
    }

    #[test]
    fn psi432_witness_and_f_behave_on_unequal_dims() {
        let half = C64::new(0.5, 0.0);
        let psi = psi432_state(&[half, half, half, half]).unwrap();
        let rho = psi.density();
        // f across each cut is bounded by the cut rank (soundness), and
        // the witness through the embedded bases equals d·F with d = 2.
        let cuts = enumerate_bipartitions(rho.dims());
        for alpha in &cuts {
            let rank = psi.schmidt_rank(alpha.members()).unwrap();
            let f = f_value(&rho, alpha).unwrap();
            assert!(f <= rank as f64 + 1e-8);
        }
        let bases = crate::optimizer::embedded_ghz_bases(rho.dims()).unwrap();
        let w = product_basis_witness(&rho, &bases).unwrap();
        // The embedded witness sees |c₁ + c₂|²... projected onto the first
        // two levels: W = 2·|⟨GHZ₂|ψ⟩|² with ⟨GHZ₂|ψ⟩ = (c₁+c₂)/√2.
        assert_relative_eq!(w, (0.5 + 0.5_f64).powi(2), epsilon = 1e-9);
    }
}
