//! Fidelity-based certification: Schmidt spectra of a pure target, the
//! per-candidate maximal-fidelity bound F̂, and the resulting exclusions.
//!
//! For a candidate vector v, F̂(v, Ψ) bounds the fidelity any state
//! compatible with v can reach with the target Ψ: it maximizes, over
//! per-bipartition rank assignments s consistent with v, the smallest
//! partial sum of the target's squared Schmidt coefficients. Measuring a
//! fidelity above F̂(v, Ψ) therefore excludes v. The bound is cheap to
//! precompute per target and reused across samples.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lattice::{
    enumerate_bipartitions, Bipartition, CandidateVector, CriterionReport, RankSemantics,
};
use crate::states::{DensityMatrix, PureState};
use crate::tol::EXCLUSION_SLACK;

/// Squared Schmidt coefficients of a pure state across one bipartition,
/// in non-increasing order, summing to one.
#[derive(Debug, Clone)]
pub struct SchmidtSpectrum {
    /// The bipartition the spectrum belongs to.
    pub alpha: Bipartition,
    /// Non-increasing squared Schmidt coefficients, Σλ = 1 ± 1e-10.
    pub lambdas: Vec<f64>,
}

impl SchmidtSpectrum {
    fn new(alpha: Bipartition, mut lambdas: Vec<f64>) -> Result<Self> {
        lambdas.sort_by(|a, b| b.partial_cmp(a).expect("finite Schmidt coefficients"));
        let total: f64 = lambdas.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::Validation(format!(
                "Schmidt spectrum sums to {total}, expected 1"
            )));
        }
        Ok(SchmidtSpectrum { alpha, lambdas })
    }

    /// Partial sums P[s] = Σ_{i<s} λ_i (P[0] = 0), clamped to 1.
    fn prefix_sums(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.lambdas.len() + 1);
        let mut acc = 0.0;
        out.push(0.0);
        for &l in &self.lambdas {
            acc += l;
            out.push(acc.min(1.0));
        }
        out
    }
}

/// Schmidt spectra of `target` across every bipartition, in
/// [`enumerate_bipartitions`] order.
///
/// # Errors
/// Propagates reshape failures (they indicate an internal inconsistency).
pub fn schmidt_spectra(target: &PureState) -> Result<Vec<SchmidtSpectrum>> {
    enumerate_bipartitions(target.dims())
        .into_iter()
        .map(|alpha| {
            let m = target.bipartition_reshape(alpha.members())?;
            let lambdas: Vec<f64> = m
                .svd(false, false)
                .singular_values
                .iter()
                .map(|s| s * s)
                .collect();
            SchmidtSpectrum::new(alpha, lambdas)
        })
        .collect()
}

/// Fidelity ⟨Ψ|ρ|Ψ⟩ of a state with a pure target.
///
/// # Errors
/// [`Error::DimMismatch`] when the dimension lists differ.
pub fn fidelity(rho: &DensityMatrix, target: &PureState) -> Result<f64> {
    if rho.dims() != target.dims() {
        return Err(Error::DimMismatch(format!(
            "state dims {} vs target dims {}",
            rho.dims(),
            target.dims()
        )));
    }
    let amps = target.amplitudes();
    Ok((amps.adjoint() * rho.matrix() * amps)[(0, 0)].re)
}

/// Maximal-fidelity bound F̂(v, Ψ): max over rank assignments s (one rank
/// 1 ≤ s_α ≤ cap_α per bipartition, with sorted(s) elementwise below v)
/// of min_α Σ_{i≤s_α} λ_i^(α).
///
/// # Errors
/// [`Error::DimMismatch`] if v's length differs from the number of
/// bipartitions.
pub fn fidelity_bound(target: &PureState, v: &CandidateVector) -> Result<f64> {
    let spectra = schmidt_spectra(target)?;
    bound_from_spectra(&spectra, v)
}

fn bound_from_spectra(spectra: &[SchmidtSpectrum], v: &CandidateVector) -> Result<f64> {
    let n = spectra.len();
    if v.len() != n {
        return Err(Error::DimMismatch(format!(
            "candidate has {} entries for {n} bipartitions",
            v.len()
        )));
    }
    let prefix: Vec<Vec<f64>> = spectra.iter().map(SchmidtSpectrum::prefix_sums).collect();
    let caps: Vec<u32> = spectra.iter().map(|s| s.lambdas.len() as u32).collect();

    // Exhaustive odometer over assignments; the search space is Π cap_α,
    // at most a few dozen for the systems handled here.
    let mut s = vec![1u32; n];
    let mut sorted = vec![0u32; n];
    let mut best = 0.0_f64;
    loop {
        sorted.copy_from_slice(&s);
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        if sorted.iter().zip(v.entries()).all(|(a, b)| a <= b) {
            let worst = s
                .iter()
                .enumerate()
                .map(|(alpha, &sa)| prefix[alpha][sa as usize])
                .fold(f64::INFINITY, f64::min);
            best = best.max(worst);
        }
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(best);
            }
            k -= 1;
            if s[k] < caps[k] {
                s[k] += 1;
                for entry in s.iter_mut().skip(k + 1) {
                    *entry = 1;
                }
                break;
            }
        }
    }
}

/// Precomputed F̂ values of one target over a candidate list, shared
/// read-only across sample evaluations.
#[derive(Debug, Clone)]
pub struct FidelityBoundTable {
    target: PureState,
    entries: Vec<(CandidateVector, f64)>,
}

impl FidelityBoundTable {
    /// Computes the table.
    ///
    /// # Errors
    /// Propagates spectra and shape failures.
    pub fn new(target: &PureState, candidates: &[CandidateVector]) -> Result<Self> {
        let spectra = schmidt_spectra(target)?;
        let entries = candidates
            .iter()
            .map(|v| Ok((v.clone(), bound_from_spectra(&spectra, v)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(FidelityBoundTable {
            target: target.clone(),
            entries,
        })
    }

    /// The target the table was built for.
    pub fn target(&self) -> &PureState {
        &self.target
    }

    /// Candidate/bound pairs in candidate-list order.
    pub fn entries(&self) -> &[(CandidateVector, f64)] {
        &self.entries
    }

    /// F̂ for one tabulated candidate.
    pub fn bound(&self, v: &CandidateVector) -> Option<f64> {
        self.entries
            .iter()
            .find(|(c, _)| c == v)
            .map(|&(_, b)| b)
    }

    /// Largest F̂ among candidates whose minimal element equals `m` — the
    /// per-minimal-element view F_max(v_𝒩) (for a GHZ target this is
    /// exactly m/d, independent of the rest of the vector).
    pub fn min_element_bound(&self, m: u32) -> Option<f64> {
        self.entries
            .iter()
            .filter(|(c, _)| *c.entries().last().expect("non-empty") == m)
            .map(|&(_, b)| b)
            .fold(None, |acc, b| Some(acc.map_or(b, |a: f64| a.max(b))))
    }

    /// Exclusion against a measured fidelity: v is excluded iff
    /// F > F̂(v) + 1e-9.
    fn excluded_for(&self, fidelity_value: f64) -> Vec<CandidateVector> {
        self.entries
            .iter()
            .filter(|&&(_, bound)| fidelity_value > bound + EXCLUSION_SLACK)
            .map(|(c, _)| c.clone())
            .collect()
    }
}

/// Certification by fidelity: excludes every candidate v with
/// fidelity(ρ, Ψ) > F̂(v, Ψ) + 1e-9. The report carries the measured
/// fidelity under "fidelity" and each bound under "Fhat_<v>".
///
/// # Errors
/// Dimension mismatches between state and target.
pub fn exclusion_by_fidelity(
    rho: &DensityMatrix,
    target: &PureState,
    candidates: &[CandidateVector],
) -> Result<CriterionReport> {
    let table = FidelityBoundTable::new(target, candidates)?;
    exclusion_from_table(rho, &table, candidates)
}

/// Exclusion using a precomputed bound table (the per-sample fast path).
///
/// # Errors
/// Dimension mismatches between state and target.
pub fn exclusion_from_table(
    rho: &DensityMatrix,
    table: &FidelityBoundTable,
    candidates: &[CandidateVector],
) -> Result<CriterionReport> {
    let f = fidelity(rho, table.target())?;
    let mut witness_values = BTreeMap::new();
    witness_values.insert("fidelity".into(), f);
    for (v, bound) in table.entries() {
        let key: String = v.entries().iter().map(u32::to_string).collect();
        witness_values.insert(format!("Fhat_{key}"), *bound);
    }
    CriterionReport::from_exclusions(
        "fidelity",
        RankSemantics::SnVector,
        candidates,
        table.excluded_for(f),
        witness_values,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{C64, CVec, Dims};
    use crate::lattice::{elementwise_leq, enumerate_candidates};
    use crate::states::sampler::{stream_rng, unit_sphere_coeffs};
    use crate::states::{ghz_state, maximally_mixed, mix, psi432_state, NoiseMix};
    use approx::assert_relative_eq;
    use rand::Rng;

    fn psi432_half() -> PureState {
        let h = C64::new(0.5, 0.0);
        psi432_state(&[h, h, h, h]).unwrap()
    }

    fn noisy(signal: &PureState, p: f64) -> DensityMatrix {
        mix(&NoiseMix {
            p,
            signal: signal.density(),
            noise: maximally_mixed(signal.dims()),
        })
        .unwrap()
    }

    /// Random pure state confined to the first k_n levels of each
    /// particle, so its cut ranks are known generically.
    fn subspace_pure(dims: &Dims, sub: &[usize], rng: &mut impl Rng) -> PureState {
        let count: usize = sub.iter().product();
        let coeffs = unit_sphere_coeffs(count, rng);
        let mut amps = CVec::zeros(dims.total());
        // Walk the sub-box via mixed radix over `sub` (handles k = 1).
        let mut idx = vec![0usize; sub.len()];
        for coeff in coeffs {
            let joint: usize = idx
                .iter()
                .zip(dims.strides())
                .map(|(&i, s)| i * s)
                .sum();
            amps[joint] = coeff;
            for k in (0..idx.len()).rev() {
                idx[k] += 1;
                if idx[k] < sub[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        PureState::new(dims.clone(), amps).unwrap()
    }

    #[test]
    fn ghz_and_psi432_spectra() {
        let ghz = ghz_state(3, 3).unwrap();
        for spec in schmidt_spectra(&ghz).unwrap() {
            assert_eq!(spec.lambdas.len(), 3);
            for &l in &spec.lambdas {
                assert_relative_eq!(l, 1.0 / 3.0, epsilon = 1e-12);
            }
        }

        let psi = psi432_half();
        let spectra = schmidt_spectra(&psi).unwrap();
        // Canonical cuts (each contains particle 0): {0} splits off the
        // qubit, {0,1} the dim-4 particle, {0,2} the dim-3 particle.
        assert_eq!(spectra[0].lambdas.len(), 2);
        assert_relative_eq!(spectra[0].lambdas[0], 0.5, epsilon = 1e-12);
        assert_relative_eq!(spectra[0].lambdas[1], 0.5, epsilon = 1e-12);
        assert_eq!(spectra[1].lambdas.len(), 4);
        for &l in &spectra[1].lambdas {
            assert_relative_eq!(l, 0.25, epsilon = 1e-12);
        }
        let dim3_cut = [0.5, 0.25, 0.25];
        assert_eq!(spectra[2].lambdas.len(), 3);
        for (l, e) in spectra[2].lambdas.iter().zip(dim3_cut) {
            assert_relative_eq!(*l, e, epsilon = 1e-12);
        }

        // Product state: a single unit coefficient per cut.
        let zero = C64::new(0.0, 0.0);
        let product = psi432_state(&[C64::new(1.0, 0.0), zero, zero, zero]).unwrap();
        for spec in schmidt_spectra(&product).unwrap() {
            assert_relative_eq!(spec.lambdas[0], 1.0, epsilon = 1e-12);
            for &l in &spec.lambdas[1..] {
                assert!(l < 1e-12);
            }
        }
    }

    #[test]
    fn fidelity_closed_forms() {
        let ghz = ghz_state(3, 3).unwrap();
        assert_relative_eq!(
            fidelity(&ghz.density(), &ghz).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        for p in [0.0, 0.4, 0.9] {
            assert_relative_eq!(
                fidelity(&noisy(&ghz, p), &ghz).unwrap(),
                p + (1.0 - p) / 27.0,
                epsilon = 1e-12
            );
        }
        let psi = psi432_half();
        for p in [0.2, 17.0 / 23.0, 0.95] {
            assert_relative_eq!(
                fidelity(&noisy(&psi, p), &psi).unwrap(),
                p + (1.0 - p) / 24.0,
                epsilon = 1e-12
            );
        }
        // Dimension mismatch is an error.
        assert!(fidelity(&ghz.density(), &psi).is_err());
    }

    #[test]
    fn ghz_bound_depends_only_on_the_minimal_element() {
        for d in [2usize, 3, 4] {
            let ghz = ghz_state(d, 3).unwrap();
            let dims = Dims::new(vec![d; 3]).unwrap();
            for v in enumerate_candidates(&dims).iter() {
                let bound = fidelity_bound(&ghz, v).unwrap();
                let m = *v.entries().last().unwrap() as f64;
                assert_relative_eq!(bound, m / d as f64, epsilon = 1e-12);
            }
        }
        // The per-minimal-element view of the table agrees.
        let ghz = ghz_state(3, 3).unwrap();
        let dims = Dims::new(vec![3, 3, 3]).unwrap();
        let table = FidelityBoundTable::new(&ghz, &enumerate_candidates(&dims)).unwrap();
        for m in 1..=3u32 {
            assert_relative_eq!(
                table.min_element_bound(m).unwrap(),
                m as f64 / 3.0,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn psi432_bound_anchors() {
        let psi = psi432_half();
        let v = |e: &[u32]| CandidateVector::new(e.to_vec()).unwrap();
        assert_relative_eq!(
            fidelity_bound(&psi, &v(&[4, 2, 2])).unwrap(),
            0.75,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            fidelity_bound(&psi, &v(&[3, 3, 2])).unwrap(),
            0.75,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            fidelity_bound(&psi, &v(&[4, 3, 2])).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            fidelity_bound(&psi, &v(&[3, 3, 1])).unwrap(),
            0.5,
            epsilon = 1e-12
        );
    }

    #[test]
    fn bounds_are_monotone_in_the_candidate_order() {
        let targets: Vec<(PureState, Dims)> = vec![
            (ghz_state(3, 3).unwrap(), Dims::new(vec![3, 3, 3]).unwrap()),
            (psi432_half(), Dims::new(vec![2, 3, 4]).unwrap()),
        ];
        for (target, dims) in &targets {
            let candidates = enumerate_candidates(dims);
            for a in candidates.iter() {
                for b in candidates.iter() {
                    if elementwise_leq(a, b).unwrap() {
                        let fa = fidelity_bound(target, a).unwrap();
                        let fb = fidelity_bound(target, b).unwrap();
                        assert!(
                            fa <= fb + 1e-12,
                            "F̂({}) = {fa} > F̂({}) = {fb}",
                            a.compact(),
                            b.compact()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn exclusion_certifies_ghz_and_spares_the_mixed_state() {
        let ghz = ghz_state(3, 3).unwrap();
        let dims = Dims::new(vec![3, 3, 3]).unwrap();
        let candidates = enumerate_candidates(&dims);
        let report = exclusion_by_fidelity(&ghz.density(), &ghz, &candidates).unwrap();
        assert_eq!(report.certified_vector().entries(), &[3, 3, 3]);
        assert_relative_eq!(report.witness_values["fidelity"], 1.0, epsilon = 1e-12);
        assert_relative_eq!(report.witness_values["Fhat_332"], 2.0 / 3.0, epsilon = 1e-12);

        let mixed = exclusion_by_fidelity(&maximally_mixed(&dims), &ghz, &candidates).unwrap();
        assert!(mixed.excluded.is_empty());
    }

    #[test]
    fn psi432_threshold_certifies_the_cap_vector() {
        let psi = psi432_half();
        let dims = Dims::new(vec![2, 3, 4]).unwrap();
        let candidates = enumerate_candidates(&dims);
        let above = exclusion_by_fidelity(&noisy(&psi, 17.0 / 23.0 + 1e-3), &psi, &candidates)
            .unwrap();
        assert_eq!(above.certified_vector().entries(), &[4, 3, 2]);
        let v422 = CandidateVector::new(vec![4, 2, 2]).unwrap();
        let v332 = CandidateVector::new(vec![3, 3, 2]).unwrap();
        assert!(above.excluded.contains(&v422));
        assert!(above.excluded.contains(&v332));

        let below = exclusion_by_fidelity(&noisy(&psi, 17.0 / 23.0 - 1e-3), &psi, &candidates)
            .unwrap();
        assert!(!below.excluded.contains(&v422));
        assert!(!below.excluded.contains(&v332));
    }

    /// Brute-force soundness: no pure state beats F̂ at its own rank
    /// vector, for either target family.
    #[test]
    fn bound_is_sound_on_structured_pure_states() {
        let mut rng = stream_rng(1618, 0);
        let cases: Vec<(PureState, Dims)> = vec![
            (ghz_state(3, 3).unwrap(), Dims::new(vec![3, 3, 3]).unwrap()),
            (psi432_half(), Dims::new(vec![2, 3, 4]).unwrap()),
        ];
        for (target, dims) in &cases {
            for _ in 0..250 {
                let sub: Vec<usize> = dims
                    .as_slice()
                    .iter()
                    .map(|&d| rng.gen_range(1..=d))
                    .collect();
                let phi = subspace_pure(dims, &sub, &mut rng);
                let mut ranks: Vec<u32> = enumerate_bipartitions(dims)
                    .iter()
                    .map(|a| phi.schmidt_rank(a.members()).unwrap())
                    .collect();
                ranks.sort_unstable_by(|a, b| b.cmp(a));
                let rv = CandidateVector::new(ranks).unwrap();
                let overlap = fidelity(&phi.density(), target).unwrap();
                let bound = fidelity_bound(target, &rv).unwrap();
                assert!(
                    overlap <= bound + 1e-8,
                    "overlap {overlap} beats F̂({}) = {bound}",
                    rv.compact()
                );
            }
        }
    }
}
