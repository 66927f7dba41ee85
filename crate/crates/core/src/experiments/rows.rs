//! Shared per-sample criterion evaluation: each bench row (and the
//! certify command) funnels through one engine holding the per-run
//! immutables — candidate lattice, witness bases, entropy pair sets.

use crate::algebra::basis::OperatorBasis;
use crate::algebra::Dims;
use crate::baselines::{
    default_pair_sets, exclusion_by_corrtensor, exclusion_by_linentropy, IndexPairSet,
};
use crate::cmc::{exclusion_by_system, exclusion_from_witness_value, product_basis_witness};
use crate::error::Result;
use crate::lattice::{enumerate_candidates, CandidateVector, CriterionReport};
use crate::optimizer::{
    canonical_ghz_bases, embedded_ghz_bases, refine_frame, svd_initial_frame, LocalFrame,
    OptimizerConfig,
};
use crate::states::DensityMatrix;

/// Per-run immutables for criterion evaluation.
pub(crate) struct RowEngine {
    candidates: Vec<CandidateVector>,
    bases: Vec<OperatorBasis>,
    pair_sets: Vec<IndexPairSet>,
}

impl RowEngine {
    pub(crate) fn new(dims: &Dims) -> Result<Self> {
        let bases = match dims.equal_dim() {
            Some(d) => canonical_ghz_bases(d, dims.len())?,
            None => embedded_ghz_bases(dims)?,
        };
        Ok(RowEngine {
            candidates: enumerate_candidates(dims),
            bases,
            pair_sets: default_pair_sets(dims)?,
        })
    }

    pub(crate) fn candidates(&self) -> &[CandidateVector] {
        &self.candidates
    }

    pub(crate) fn pair_sets(&self) -> &[IndexPairSet] {
        &self.pair_sets
    }

    pub(crate) fn bases(&self) -> &[OperatorBasis] {
        &self.bases
    }

    /// Whole-system covariance feasibility (basis-independent).
    pub(crate) fn cmc(&self, rho: &DensityMatrix) -> Result<CriterionReport> {
        exclusion_by_system(rho, &self.candidates)
    }

    /// Correlation-tensor norm exclusion (basis-independent, equal dims).
    pub(crate) fn corrtensor(&self, rho: &DensityMatrix) -> Result<CriterionReport> {
        exclusion_by_corrtensor(rho)
    }

    /// Frame-optimized product-basis witness: refines `init`, then reports
    /// the witness value reached and its exclusions.
    pub(crate) fn witness(
        &self,
        rho: &DensityMatrix,
        init: &LocalFrame,
        opt: &OptimizerConfig,
    ) -> Result<(CriterionReport, f64)> {
        let frame = refine_frame(rho, init, opt)?;
        let aligned = frame.apply_to_state(rho)?;
        let w = product_basis_witness(&aligned, &self.bases)?;
        let report = exclusion_from_witness_value(w, "optimized", &self.candidates)?;
        Ok((report, w))
    }

    /// Frame-optimized linear-entropy vector bound.
    pub(crate) fn linentropy(
        &self,
        rho: &DensityMatrix,
        init: &LocalFrame,
        opt: &OptimizerConfig,
    ) -> Result<CriterionReport> {
        let frame = refine_frame(rho, init, opt)?;
        let aligned = frame.apply_to_state(rho)?;
        exclusion_by_linentropy(&aligned, &self.pair_sets)
    }

    /// The spectral initial frame shared by both optimized rows.
    pub(crate) fn initial_frame(&self, rho: &DensityMatrix) -> LocalFrame {
        svd_initial_frame(rho)
    }
}
