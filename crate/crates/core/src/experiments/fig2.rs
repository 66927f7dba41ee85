//! White-noise robustness comparison on the ψ₄₃₂ pure-state family:
//! for each sampled state, the critical mixing weight p* below which a
//! criterion stops excluding its target vectors, found by bisection.

use serde::Serialize;

use crate::algebra::C64;
use crate::baselines::exclusion_by_linentropy;
use crate::cmc::{f_values, product_basis_witness};
use crate::error::{Error, Result};
use crate::fidelity::{exclusion_from_table, fidelity, fidelity_bound, FidelityBoundTable};
use crate::lattice::majorization::majorization_feasible;
use crate::lattice::combine_reports;
use crate::states::sampler::{stream_rng, unit_sphere_coeffs};
use crate::states::{maximally_mixed, mix, psi432_state, NoiseMix, PureState};
use crate::tol::EXCLUSION_SLACK;

use super::output::fmt_g6;
use super::rows::RowEngine;
use super::{ExperimentConfig, Fig2Target, SampleRecord};

/// Bisection halvings on p ∈ [0, 1]; the reported threshold is the final
/// interval midpoint, accurate to 2⁻¹⁷ ≈ 8·10⁻⁶.
const BISECT_ITERS: usize = 16;

/// Concurrence bound above which a sample counts as strongly entangled
/// in the summary.
const HIGH_CGM: f64 = 0.8;

/// Critical white-noise thresholds of one pure state: the least p for
/// which ρ(p) = p·|ψ⟩⟨ψ| + (1−p)·𝟙/D still excludes every target
/// vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fig2Thresholds {
    /// Covariance-criterion threshold; `None` when even the pure state
    /// is not detected.
    pub p_cmc: Option<f64>,
    /// Fidelity-witness threshold; `None` when even the pure state is
    /// not detected.
    pub p_fid: Option<f64>,
}

impl Fig2Thresholds {
    /// Which route tolerates more noise: the lower threshold wins.
    pub fn winner(&self) -> &'static str {
        match (self.p_cmc, self.p_fid) {
            (None, None) => "neither",
            (Some(_), None) => "cmc",
            (None, Some(_)) => "fidelity",
            (Some(a), Some(b)) if a < b => "cmc",
            (Some(a), Some(b)) if a > b => "fidelity",
            _ => "tie",
        }
    }
}

/// Bisection for the detection threshold of a monotone-in-p criterion.
/// Protocol: if detection fails at p = 1 the state is undetectable
/// (`None`); if it holds at p = 0 the threshold is 0; otherwise 16
/// halvings of [0, 1] return the final midpoint.
fn bisect(detect: &mut impl FnMut(f64) -> Result<bool>) -> Result<Option<f64>> {
    if !detect(1.0)? {
        return Ok(None);
    }
    if detect(0.0)? {
        return Ok(Some(0.0));
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..BISECT_ITERS {
        let mid = 0.5 * (lo + hi);
        if detect(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// Computes both critical thresholds of `psi` under white noise.
///
/// Detection means every vector of `target` is excluded: by
/// majorization infeasibility of the covariance values on the one hand,
/// by the fidelity to ψ itself exceeding F̂ on the other.
///
/// # Errors
/// Propagates evaluation failures (dimension mismatches and the like).
pub fn fig2_thresholds(psi: &PureState, target: Fig2Target) -> Result<Fig2Thresholds> {
    let targets = target.vectors();
    let signal = psi.density();
    let noise = maximally_mixed(psi.dims());
    let state_at = |p: f64| {
        mix(&NoiseMix {
            p,
            signal: signal.clone(),
            noise: noise.clone(),
        })
    };

    let mut detect_cmc = |p: f64| -> Result<bool> {
        let f = f_values(&state_at(p)?)?;
        Ok(targets.iter().all(|v| !majorization_feasible(&f, v)))
    };
    let p_cmc = bisect(&mut detect_cmc)?;

    let bounds: Vec<f64> = targets
        .iter()
        .map(|v| fidelity_bound(psi, v))
        .collect::<Result<_>>()?;
    let mut detect_fid = |p: f64| -> Result<bool> {
        let f = fidelity(&state_at(p)?, psi)?;
        Ok(bounds.iter().all(|&b| f > b + EXCLUSION_SLACK))
    };
    let p_fid = bisect(&mut detect_fid)?;

    Ok(Fig2Thresholds { p_cmc, p_fid })
}

/// Aggregated robustness comparison.
#[derive(Debug, Clone, Serialize)]
pub struct Fig2Summary {
    /// Experiment label (`"fig2"`).
    pub experiment: String,
    /// Local dimensions (always 2, 3, 4).
    pub dims: Vec<usize>,
    /// Number of sampled states.
    pub samples: u64,
    /// Run seed.
    pub seed: u64,
    /// Detection-target label.
    pub target: String,
    /// The vectors that must all be excluded, dashed.
    pub target_vectors: Vec<String>,
    /// Samples where the covariance criterion had the lower threshold.
    pub cmc_wins: u64,
    /// Samples where the fidelity witness had the lower threshold.
    pub fidelity_wins: u64,
    /// Samples with exactly equal thresholds.
    pub ties: u64,
    /// Samples neither route detected even at p = 1.
    pub neither: u64,
    /// `cmc_wins` as a percentage of all samples.
    pub cmc_win_percent: f64,
    /// Samples the covariance route never detected.
    pub cmc_undetectable: u64,
    /// Samples the fidelity route never detected.
    pub fidelity_undetectable: u64,
    /// Samples with a concurrence bound above 0.8.
    pub high_cgm: u64,
}

/// Runs the robustness comparison on uniformly random ψ₄₃₂ coefficient
/// vectors (one per sample, drawn from the (seed, index) stream).
///
/// Per-sample features are evaluated on the *pure* state at the identity
/// frame; the thresholds come from [`fig2_thresholds`]. The record's `p`
/// column is the covariance threshold; the fidelity threshold is
/// recoverable from the recorded bound F̂ as (F̂ + slack − 1/24)/(23/24).
///
/// # Errors
/// [`Error::Config`] unless dims are (2,3,4); propagated evaluation
/// failures.
pub fn run_fig2(config: &ExperimentConfig) -> Result<(Fig2Summary, Vec<SampleRecord>)> {
    config.validate()?;
    if config.dims.as_slice() != [2, 3, 4] {
        return Err(Error::Config(format!(
            "fig2 requires local dimensions [2, 3, 4], got {:?}",
            config.dims.as_slice()
        )));
    }
    let engine = RowEngine::new(&config.dims)?;
    let targets = config.fig2_target.vectors();
    let n_cuts = targets[0].len();
    let mut records = Vec::with_capacity(config.samples as usize);
    let (mut cmc_wins, mut fidelity_wins, mut ties, mut neither) = (0u64, 0u64, 0u64, 0u64);
    let (mut cmc_undetectable, mut fidelity_undetectable) = (0u64, 0u64);
    let mut high_cgm = 0u64;

    for idx in 0..config.samples {
        let mut rng = stream_rng(config.seed, idx);
        let coeffs = unit_sphere_coeffs(4, &mut rng);
        let c: [C64; 4] = coeffs.clone().try_into().expect("four coefficients");
        let psi = psi432_state(&c)?;
        let rho = psi.density();

        let cmc = engine.cmc(&rho)?;
        let w = product_basis_witness(&rho, engine.bases())?;
        let table = FidelityBoundTable::new(&psi, engine.candidates())?;
        let fid = exclusion_from_table(&rho, &table, engine.candidates())?;
        let linent = exclusion_by_linentropy(&rho, engine.pair_sets())?;
        let combined = combine_reports(&[cmc.clone(), fid.clone()], engine.candidates())?;

        let fhat_eff = targets
            .iter()
            .map(|v| {
                table
                    .bound(v)
                    .ok_or_else(|| Error::Internal(format!("target {v:?} missing a bound")))
            })
            .try_fold(f64::NEG_INFINITY, |acc, b| b.map(|b| acc.max(b)))?;

        let thresholds = fig2_thresholds(&psi, config.fig2_target)?;
        let winner = thresholds.winner();
        match winner {
            "cmc" => cmc_wins += 1,
            "fidelity" => fidelity_wins += 1,
            "tie" => ties += 1,
            _ => neither += 1,
        }
        if thresholds.p_cmc.is_none() {
            cmc_undetectable += 1;
        }
        if thresholds.p_fid.is_none() {
            fidelity_undetectable += 1;
        }
        let pick = |key: &str| linent.witness_values.get(key).copied();
        let cgm = pick("cgm_lower");
        if cgm.unwrap_or(0.0) > HIGH_CGM {
            high_cgm += 1;
        }

        records.push(SampleRecord {
            idx,
            seed: config.seed,
            p: thresholds.p_cmc,
            lambda1: None,
            coeffs: Some(coeffs.iter().map(|z| [z.re, z.im]).collect()),
            f: (1..=n_cuts)
                .filter_map(|k| cmc.witness_values.get(&format!("f_{k}")).copied())
                .collect(),
            witness: Some(w),
            fidelity: Some(fhat_eff),
            c2: None,
            entropy_bounds: (1..=n_cuts)
                .filter_map(|k| pick(&format!("B_{k}")))
                .collect(),
            cgm,
            cert_cmc: cmc.certified_vector().dashed(),
            cert_fid: Some(fid.certified_vector().dashed()),
            cert_combined: combined.certified_vector().dashed(),
            winner: Some(winner.into()),
        });
    }

    let summary = Fig2Summary {
        experiment: "fig2".into(),
        dims: config.dims.as_slice().to_vec(),
        samples: config.samples,
        seed: config.seed,
        target: config.fig2_target.label().into(),
        target_vectors: targets.iter().map(|v| v.dashed()).collect(),
        cmc_wins,
        fidelity_wins,
        ties,
        neither,
        cmc_win_percent: 100.0 * cmc_wins as f64 / config.samples as f64,
        cmc_undetectable,
        fidelity_undetectable,
        high_cgm,
    };
    Ok((summary, records))
}

/// Metadata lines for the per-sample CSV of a robustness run (without
/// the leading `# `).
pub fn fig2_metadata(summary: &Fig2Summary, config: &ExperimentConfig) -> Vec<String> {
    vec![
        "snvec bench fig2".to_string(),
        format!(
            "dims = {}",
            summary
                .dims
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("x")
        ),
        format!("samples = {}", summary.samples),
        format!("seed = {}", summary.seed),
        "sampler = psi432 family, coefficients uniform on the unit 7-sphere".to_string(),
        format!(
            "detection target = {} (exclude all of: {})",
            summary.target,
            summary.target_vectors.join(" ")
        ),
        format!(
            "thresholds: bisection, {BISECT_ITERS} halvings of p in [0,1] on \
             p*state + (1-p)*I/24"
        ),
        "p column = covariance-criterion threshold (empty if undetectable)".to_string(),
        "fidelity column = effective bound Fhat; fidelity threshold = \
         (Fhat + 1e-9 - 1/24)/(23/24), capped at 1"
            .to_string(),
        "features (f, W, B, cgm, cert_*) evaluated on the pure state at the \
         identity frame"
            .to_string(),
        format!(
            "summary: cmc wins {} ({}%), fidelity wins {}, ties {}, neither {}",
            summary.cmc_wins,
            fmt_g6(summary.cmc_win_percent),
            summary.fidelity_wins,
            summary.ties,
            summary.neither
        ),
        format!(
            "undetectable: cmc {}, fidelity {}; concurrence bound > {} on {} samples",
            summary.cmc_undetectable,
            summary.fidelity_undetectable,
            fmt_g6(HIGH_CGM),
            summary.high_cgm
        ),
        format!("fig2 target flag = {}", config.fig2_target),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Dims;
    use crate::states::sampler::stream_rng;

    use super::super::{ExperimentConfig, ExperimentKind};

    fn balanced() -> PureState {
        let h = C64::new(0.5, 0.0);
        psi432_state(&[h, h, h, h]).unwrap()
    }

    fn random_psi(seed: u64, idx: u64) -> (PureState, Vec<C64>) {
        let mut rng = stream_rng(seed, idx);
        let coeffs = unit_sphere_coeffs(4, &mut rng);
        let c: [C64; 4] = coeffs.clone().try_into().unwrap();
        (psi432_state(&c).unwrap(), coeffs)
    }

    /// The closed-form fidelity threshold: F(p) = p + (1−p)/24 crosses
    /// F̂_eff + slack at p = (F̂_eff + slack − 1/24)/(23/24).
    fn closed_form_p_fid(psi: &PureState, target: Fig2Target) -> Option<f64> {
        let fhat = target
            .vectors()
            .iter()
            .map(|v| fidelity_bound(psi, v).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        let p = (fhat + EXCLUSION_SLACK - 1.0 / 24.0) / (23.0 / 24.0);
        if p > 1.0 {
            None
        } else {
            Some(p.max(0.0))
        }
    }

    #[test]
    fn balanced_state_fidelity_threshold_hits_the_anchor() {
        // F̂ = 3/4 for both coatoms of the balanced state, so the
        // fidelity route detects exactly above p = 17/23. Full top-vector
        // certification by majorization needs f₂ within one of its cap,
        // which white noise erodes faster: fidelity wins this state.
        let t = fig2_thresholds(&balanced(), Fig2Target::Coatoms).unwrap();
        let p_fid = t.p_fid.expect("balanced state is fidelity-detectable");
        assert!(
            (p_fid - 17.0 / 23.0).abs() < 1e-4,
            "p_fid = {p_fid}, expected 17/23 ≈ {}",
            17.0 / 23.0
        );
        let p_cmc = t.p_cmc.expect("balanced state is cmc-detectable");
        assert!(p_cmc > p_fid, "p_cmc = {p_cmc} vs p_fid = {p_fid}");
        assert_eq!(t.winner(), "fidelity");
    }

    #[test]
    fn balanced_state_beyond_221_threshold() {
        // F̂(2,2,1) = 1/2 for the balanced state: fidelity threshold
        // 11/23. The covariance route tolerates slightly more noise on
        // this easier target and takes the win.
        let t = fig2_thresholds(&balanced(), Fig2Target::Beyond221).unwrap();
        let p_fid = t.p_fid.unwrap();
        assert!((p_fid - 11.0 / 23.0).abs() < 1e-4, "p_fid = {p_fid}");
        let p_cmc = t.p_cmc.unwrap();
        assert!(p_cmc < p_fid, "p_cmc = {p_cmc} vs p_fid = {p_fid}");
        assert_eq!(t.winner(), "cmc");
    }

    #[test]
    fn product_state_is_undetectable() {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let psi = psi432_state(&[one, zero, zero, zero]).unwrap();
        for target in [Fig2Target::Coatoms, Fig2Target::Beyond221] {
            let t = fig2_thresholds(&psi, target).unwrap();
            assert_eq!(t.p_cmc, None);
            assert_eq!(t.p_fid, None);
            assert_eq!(t.winner(), "neither");
        }
    }

    #[test]
    fn bisection_agrees_with_the_closed_form() {
        // The fidelity of the white-noise family is affine in p, so the
        // bisected threshold must land on the closed form for any state.
        for i in 0..12 {
            let (psi, _) = random_psi(91, i);
            for target in [Fig2Target::Coatoms, Fig2Target::Beyond221] {
                let bisected = fig2_thresholds(&psi, target).unwrap().p_fid;
                let closed = closed_form_p_fid(&psi, target);
                match (bisected, closed) {
                    (None, None) => {}
                    (Some(b), Some(c)) => {
                        assert!((b - c).abs() < 2e-5, "sample {i}: {b} vs {c}");
                    }
                    other => panic!("sample {i}: routes disagree: {other:?}"),
                }
            }
        }
    }

    #[test]
    fn winner_covers_all_pairings() {
        let t = |a: Option<f64>, b: Option<f64>| Fig2Thresholds { p_cmc: a, p_fid: b };
        assert_eq!(t(Some(0.2), Some(0.4)).winner(), "cmc");
        assert_eq!(t(Some(0.4), Some(0.2)).winner(), "fidelity");
        assert_eq!(t(Some(0.3), Some(0.3)).winner(), "tie");
        assert_eq!(t(Some(0.3), None).winner(), "cmc");
        assert_eq!(t(None, Some(0.3)).winner(), "fidelity");
        assert_eq!(t(None, None).winner(), "neither");
    }

    #[test]
    fn rejects_wrong_dims() {
        let config = ExperimentConfig::new(
            ExperimentKind::Fig2,
            Dims::new(vec![3, 3, 3]).unwrap(),
        );
        assert!(matches!(run_fig2(&config), Err(Error::Config(_))));
    }

    #[test]
    fn small_run_is_deterministic_and_consistent() {
        let mut config =
            ExperimentConfig::new(ExperimentKind::Fig2, Dims::new(vec![2, 3, 4]).unwrap());
        config.samples = 6;
        config.seed = 3;
        config.fig2_target = Fig2Target::Beyond221;
        let (summary_a, records_a) = run_fig2(&config).unwrap();
        let (_, records_b) = run_fig2(&config).unwrap();
        assert_eq!(records_a, records_b);

        assert_eq!(
            summary_a.cmc_wins + summary_a.fidelity_wins + summary_a.ties + summary_a.neither,
            6
        );
        assert_eq!(summary_a.target_vectors, vec!["2-2-1".to_string()]);
        for r in &records_a {
            let coeffs = r.coeffs.as_ref().unwrap();
            assert_eq!(coeffs.len(), 4);
            let norm: f64 = coeffs.iter().map(|c| c[0] * c[0] + c[1] * c[1]).sum();
            assert!((norm - 1.0).abs() < 1e-9);
            assert_eq!(r.f.len(), 3);
            assert_eq!(r.entropy_bounds.len(), 3);
            assert!(r.cert_fid.is_some());
            let fhat = r.fidelity.unwrap();
            assert!((0.0..=1.0).contains(&fhat));
            if let Some(p) = r.p {
                assert!((0.0..=1.0).contains(&p));
            }
            assert!(["cmc", "fidelity", "tie", "neither"]
                .contains(&r.winner.as_deref().unwrap()));
            // The record's threshold matches a direct recomputation.
            let (psi, _) = random_psi(3, r.idx);
            let t = fig2_thresholds(&psi, Fig2Target::Beyond221).unwrap();
            assert_eq!(r.p, t.p_cmc);
            assert_eq!(r.winner.as_deref(), Some(t.winner()));
        }
    }
}
