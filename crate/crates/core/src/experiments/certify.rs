//! Single-state certification and state-file generation.

use serde::{Deserialize, Serialize};

use crate::algebra::{CVec, Dims, C64};
use crate::error::{Error, Result};
use crate::fidelity::exclusion_by_fidelity;
use crate::lattice::{combine_reports, CriterionReport, RankSemantics};
use crate::optimizer::OptimizerConfig;
use crate::states::file::StateFile;
use crate::states::sampler::{draw, SamplerConfig, SamplerMode};
use crate::states::{DensityMatrix, PureState};

use super::rows::RowEngine;
use super::{bench_entropy_optimizer, bench_witness_optimizer, Criterion};

/// Options for certifying a single state.
#[derive(Debug, Clone)]
pub struct CertifyOptions {
    /// Criteria to evaluate; inapplicable ones (the correlation-tensor
    /// norm on unequal local dimensions) are skipped and reported.
    pub criteria: Vec<Criterion>,
    /// Product-witness search budget. Unlike the benchmark rows this
    /// defaults to no early stop: certification wants the best witness
    /// value the budget affords.
    pub witness_opt: OptimizerConfig,
    /// Linear-entropy search budget.
    pub entropy_opt: OptimizerConfig,
    /// Fidelity target; `None` selects [`default_fidelity_target`].
    pub fidelity_target: Option<PureState>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        let mut witness_opt = bench_witness_optimizer();
        witness_opt.stop_when = None;
        CertifyOptions {
            criteria: Criterion::ALL.to_vec(),
            witness_opt,
            entropy_opt: bench_entropy_optimizer(),
            fidelity_target: None,
        }
    }
}

/// Certification outcome for one state.
#[derive(Debug, Clone, Serialize)]
pub struct CertifyReport {
    /// Local dimensions of the state.
    pub dims: Vec<usize>,
    /// Per-criterion reports, in the order requested.
    pub reports: Vec<CriterionReport>,
    /// Criteria skipped as inapplicable, with reasons.
    pub skipped: Vec<String>,
    /// Combination of all comparable (Schmidt-number-vector) reports; the
    /// single remaining report when only marginal-rank criteria ran.
    pub combined: CriterionReport,
    /// The certified entanglement-dimensionality vector (raw, possibly
    /// off the candidate lattice).
    pub certified: Vec<u32>,
}

/// The default fidelity target for `dims`: the GHZ state for equal local
/// dimensions, and for mixed dimensions the GHZ of the smallest
/// dimension embedded along the joint diagonal.
///
/// # Errors
/// Propagates state-construction failures.
pub fn default_fidelity_target(dims: &Dims) -> Result<PureState> {
    let d = dims.min_dim();
    let step: usize = dims.strides().iter().sum();
    let amp = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut amps = CVec::zeros(dims.total());
    for i in 0..d {
        amps[i * step] = amp;
    }
    PureState::new(dims.clone(), amps)
}

/// Runs the selected criteria on one state and combines the comparable
/// reports into a single certified vector.
///
/// # Errors
/// [`Error::Config`] on an empty or fully inapplicable criterion list or
/// mismatched optimizer objectives; propagated evaluation failures.
pub fn certify(rho: &DensityMatrix, opts: &CertifyOptions) -> Result<CertifyReport> {
    if opts.criteria.is_empty() {
        return Err(Error::Config("criterion list must not be empty".into()));
    }
    if opts.witness_opt.objective != crate::optimizer::Objective::ProductWitness {
        return Err(Error::Config(
            "witness optimizer must target the product witness".into(),
        ));
    }
    if opts.entropy_opt.objective != crate::optimizer::Objective::LinearEntropyBound {
        return Err(Error::Config(
            "entropy optimizer must target the linear-entropy bound".into(),
        ));
    }
    let dims = rho.dims();
    let engine = RowEngine::new(dims)?;
    let needs_frame = opts
        .criteria
        .iter()
        .any(|c| matches!(c, Criterion::ProductWitness | Criterion::Linentropy));
    let init = needs_frame.then(|| engine.initial_frame(rho));

    let mut reports = Vec::new();
    let mut skipped = Vec::new();
    for criterion in &opts.criteria {
        match criterion {
            Criterion::CmcSystem => reports.push(engine.cmc(rho)?),
            Criterion::ProductWitness => {
                let frame = init.as_ref().expect("frame prepared above");
                let (report, _) = engine.witness(rho, frame, &opts.witness_opt)?;
                reports.push(report);
            }
            Criterion::Fidelity => {
                let target = match &opts.fidelity_target {
                    Some(t) => t.clone(),
                    None => default_fidelity_target(dims)?,
                };
                reports.push(exclusion_by_fidelity(rho, &target, engine.candidates())?);
            }
            Criterion::Corrtensor => {
                if dims.equal_dim().is_some() {
                    reports.push(engine.corrtensor(rho)?);
                } else {
                    skipped.push(
                        "corrtensor: needs equal local dimensions, certifies marginal \
                         ranks only"
                            .to_string(),
                    );
                }
            }
            Criterion::Linentropy => {
                let frame = init.as_ref().expect("frame prepared above");
                reports.push(engine.linentropy(rho, frame, &opts.entropy_opt)?);
            }
        }
    }
    if reports.is_empty() {
        return Err(Error::Config(
            "no applicable criteria for these dimensions".into(),
        ));
    }

    let comparable: Vec<CriterionReport> = reports
        .iter()
        .filter(|r| r.rank_semantics == RankSemantics::SnVector)
        .cloned()
        .collect();
    let combined = if comparable.is_empty() {
        reports.last().expect("non-empty").clone()
    } else {
        combine_reports(&comparable, engine.candidates())?
    };
    let certified = combined.certified.clone();
    Ok(CertifyReport {
        dims: dims.as_slice().to_vec(),
        reports,
        skipped,
        combined,
        certified,
    })
}

/// Sidecar metadata of one generated state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenMetadata {
    /// Always `"gen"`.
    pub experiment: String,
    /// Spectral ensemble the state was drawn from.
    pub mode: SamplerMode,
    /// Local dimensions.
    pub dims: Vec<usize>,
    /// Run seed.
    pub seed: u64,
    /// Sample index; `(seed, index)` reproduces the state exactly.
    pub index: u64,
    /// Recorded largest eigenvalue (spectrum-stratified mode only).
    pub lambda1: Option<f64>,
}

/// One generated state with its sidecar metadata.
#[derive(Debug, Clone)]
pub struct GeneratedState {
    /// Serializable state payload.
    pub file: StateFile,
    /// Sidecar metadata.
    pub meta: GenMetadata,
}

/// Draws `samples` random states from the `(seed, index)` streams.
pub fn generate_states(
    dims: &Dims,
    mode: SamplerMode,
    seed: u64,
    samples: u64,
) -> Vec<GeneratedState> {
    let config = SamplerConfig {
        mode,
        seed,
        dims: dims.clone(),
    };
    (0..samples)
        .map(|index| {
            let sample = draw(&config, index);
            GeneratedState {
                file: StateFile::from_density(&sample.state),
                meta: GenMetadata {
                    experiment: "gen".into(),
                    mode,
                    dims: dims.as_slice().to_vec(),
                    seed,
                    index,
                    lambda1: sample.lambda1,
                },
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{ghz_state, maximally_mixed, psi432_state};

    fn quick_opts(criteria: Vec<Criterion>) -> CertifyOptions {
        let mut opts = CertifyOptions {
            criteria,
            ..CertifyOptions::default()
        };
        // Small budgets keep the unit tests fast; the states below are
        // already optimally framed.
        opts.witness_opt.max_evals = 90;
        opts.witness_opt.restarts = 0;
        opts.entropy_opt.max_evals = 90;
        opts.entropy_opt.restarts = 0;
        opts
    }

    #[test]
    fn ghz3_certifies_the_top_vector_on_all_criteria() {
        let rho = ghz_state(3, 3).unwrap().density();
        let report = certify(&rho, &quick_opts(Criterion::ALL.to_vec())).unwrap();
        assert_eq!(report.certified, vec![3, 3, 3]);
        assert_eq!(report.reports.len(), 5);
        assert!(report.skipped.is_empty());
        for r in &report.reports {
            assert_eq!(r.certified, vec![3, 3, 3], "criterion {}", r.criterion);
        }
        assert_eq!(report.dims, vec![3, 3, 3]);
    }

    #[test]
    fn maximally_mixed_certifies_the_trivial_vector() {
        let rho = maximally_mixed(&Dims::new(vec![2, 2]).unwrap());
        let report = certify(&rho, &quick_opts(Criterion::ALL.to_vec())).unwrap();
        assert_eq!(report.certified, vec![1]);
        assert!(report.combined.excluded.is_empty());
    }

    #[test]
    fn psi432_certifies_432_from_covariance_plus_fidelity() {
        let h = C64::new(0.5, 0.0);
        let rho = psi432_state(&[h, h, h, h]).unwrap().density();
        let opts = quick_opts(vec![Criterion::CmcSystem, Criterion::Fidelity]);
        let report = certify(&rho, &opts).unwrap();
        assert_eq!(report.certified, vec![4, 3, 2]);
        assert!(report.skipped.is_empty());
        assert_eq!(report.combined.criterion, "cmc-system+fidelity");
    }

    #[test]
    fn corrtensor_is_skipped_on_unequal_dims() {
        let h = C64::new(0.5, 0.0);
        let rho = psi432_state(&[h, h, h, h]).unwrap().density();
        let report = certify(&rho, &quick_opts(Criterion::ALL.to_vec())).unwrap();
        assert_eq!(report.reports.len(), 4);
        assert_eq!(report.skipped.len(), 1);
        assert!(report.skipped[0].contains("corrtensor"));
        // All four remaining reports combine.
        assert_eq!(report.certified, vec![4, 3, 2]);
    }

    #[test]
    fn corrtensor_alone_on_unequal_dims_is_an_error() {
        let h = C64::new(0.5, 0.0);
        let rho = psi432_state(&[h, h, h, h]).unwrap().density();
        let result = certify(&rho, &quick_opts(vec![Criterion::Corrtensor]));
        assert!(matches!(result, Err(Error::Config(_))));
    }

    #[test]
    fn empty_criteria_are_rejected() {
        let rho = maximally_mixed(&Dims::new(vec![2, 2]).unwrap());
        assert!(matches!(
            certify(&rho, &quick_opts(Vec::new())),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn default_target_embeds_the_smallest_ghz() {
        // Equal dims: exactly the GHZ state.
        let dims = Dims::new(vec![3, 3, 3]).unwrap();
        let target = default_fidelity_target(&dims).unwrap();
        let ghz = ghz_state(3, 3).unwrap();
        assert_eq!(target.amplitudes(), ghz.amplitudes());
        // Mixed dims: (|000⟩ + |111⟩)/√2 along the joint diagonal.
        let dims = Dims::new(vec![2, 3, 4]).unwrap();
        let target = default_fidelity_target(&dims).unwrap();
        let amps = target.amplitudes();
        let expect = 1.0 / 2.0_f64.sqrt();
        assert!((amps[0].re - expect).abs() < 1e-12);
        assert!((amps[12 + 4 + 1].re - expect).abs() < 1e-12);
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn generation_is_deterministic_with_sidecars() {
        let dims = Dims::new(vec![3, 3, 3]).unwrap();
        let a = generate_states(&dims, SamplerMode::FixedLambda1, 5, 3);
        let b = generate_states(&dims, SamplerMode::FixedLambda1, 5, 3);
        assert_eq!(a.len(), 3);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.file.to_json(), y.file.to_json());
            assert_eq!(x.meta.lambda1, y.meta.lambda1);
            assert!(x.meta.lambda1.is_some());
        }
        assert_eq!(a[0].meta.index, 0);
        assert_eq!(a[2].meta.index, 2);
        assert_eq!(a[0].meta.experiment, "gen");

        let plain = generate_states(&dims, SamplerMode::Lebesgue, 5, 1);
        assert_eq!(plain[0].meta.lambda1, None);
        let json = serde_json::to_string(&plain[0].meta).unwrap();
        assert!(json.contains("\"lebesgue\""));
    }
}
