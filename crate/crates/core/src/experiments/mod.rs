//! Benchmark experiments and single-state certification: random-state
//! detection-rate tables, the white-noise robustness comparison, state
//! generation, and the per-sample record/summary plumbing around them.

mod certify;
mod fig2;
mod output;
mod rows;
mod tables;

pub use certify::{
    certify, default_fidelity_target, generate_states, CertifyOptions, CertifyReport,
    GenMetadata, GeneratedState,
};
pub use fig2::{fig2_metadata, fig2_thresholds, run_fig2, Fig2Summary, Fig2Thresholds};
pub use output::records_csv;
pub use tables::{run_table1, run_table2, table_metadata, TableRow, TableSummary};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::Dims;
use crate::error::{Error, Result};
use crate::optimizer::{Objective, OptimizerConfig};

/// Which experiment a configuration drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Detection rates on spectrally-stratified random states.
    Table1,
    /// Detection rates on GHZ + random-state mixtures.
    Table2,
    /// White-noise robustness comparison on a random pure-state family.
    Fig2,
    /// Single-state certification.
    Certify,
    /// State-file generation.
    Gen,
}

impl ExperimentKind {
    /// Stable kebab-case label.
    pub fn label(self) -> &'static str {
        match self {
            ExperimentKind::Table1 => "table1",
            ExperimentKind::Table2 => "table2",
            ExperimentKind::Fig2 => "fig2",
            ExperimentKind::Certify => "certify",
            ExperimentKind::Gen => "gen",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One certification criterion, as selectable on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    /// Whole-system covariance feasibility (basis-independent).
    CmcSystem,
    /// Frame-optimized product-basis witness.
    ProductWitness,
    /// Fidelity witness against a pure target.
    Fidelity,
    /// Correlation-tensor norm (single-particle ranks).
    Corrtensor,
    /// Linear-entropy vector bound.
    Linentropy,
}

impl Criterion {
    /// Every criterion, in the canonical listing order.
    pub const ALL: [Criterion; 5] = [
        Criterion::CmcSystem,
        Criterion::ProductWitness,
        Criterion::Fidelity,
        Criterion::Corrtensor,
        Criterion::Linentropy,
    ];

    /// Stable kebab-case name.
    pub fn name(self) -> &'static str {
        match self {
            Criterion::CmcSystem => "cmc-system",
            Criterion::ProductWitness => "product-witness",
            Criterion::Fidelity => "fidelity",
            Criterion::Corrtensor => "corrtensor",
            Criterion::Linentropy => "linentropy",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Criterion::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown criterion {s:?}; expected one of cmc-system, \
                     product-witness, fidelity, corrtensor, linentropy"
                ))
            })
    }
}

/// Which exclusions count as "detected" in the robustness comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fig2Target {
    /// Exclude both maximal non-top candidates (4,2,2) and (3,3,2): full
    /// top-vector certification.
    #[default]
    Coatoms,
    /// Exclude (2,2,1): certification strictly beyond two entangled
    /// dimensions on one cut.
    Beyond221,
}

impl Fig2Target {
    /// Stable kebab-case label.
    pub fn label(self) -> &'static str {
        match self {
            Fig2Target::Coatoms => "coatoms",
            Fig2Target::Beyond221 => "beyond-221",
        }
    }

    /// The candidate vectors that must all be excluded for detection.
    pub(crate) fn vectors(self) -> Vec<crate::lattice::CandidateVector> {
        let raw: &[&[u32]] = match self {
            Fig2Target::Coatoms => &[&[4, 2, 2], &[3, 3, 2]],
            Fig2Target::Beyond221 => &[&[2, 2, 1]],
        };
        raw.iter()
            .map(|v| {
                crate::lattice::CandidateVector::new(v.to_vec())
                    .expect("target vectors are valid by construction")
            })
            .collect()
    }
}

impl fmt::Display for Fig2Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Fig2Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coatoms" => Ok(Fig2Target::Coatoms),
            "beyond-221" => Ok(Fig2Target::Beyond221),
            _ => Err(Error::Config(format!(
                "unknown fig2 target {s:?}; expected coatoms or beyond-221"
            ))),
        }
    }
}

/// The witness-row search budget used by the benchmark tables: 400
/// evaluations per site visit over three sweeps of three particles, two
/// random restarts, early exit once the top tally class is decided.
pub fn bench_witness_optimizer() -> OptimizerConfig {
    OptimizerConfig {
        max_evals: 3600,
        restarts: 2,
        objective: Objective::ProductWitness,
        stop_when: Some(2.0 + 1e-6),
        ..OptimizerConfig::default()
    }
}

/// The entropy-row search budget used by the benchmark tables: 300
/// evaluations per site visit, one random restart besides the unrotated
/// start.
pub fn bench_entropy_optimizer() -> OptimizerConfig {
    OptimizerConfig {
        max_evals: 2700,
        restarts: 1,
        objective: Objective::LinearEntropyBound,
        stop_when: None,
        ..OptimizerConfig::default()
    }
}

/// Full configuration of one experiment run.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    /// Which experiment to run.
    pub experiment: ExperimentKind,
    /// Number of samples (≥ 1).
    pub samples: u64,
    /// Run-level seed; per-sample streams derive from (seed, index).
    pub seed: u64,
    /// Local dimensions of the sampled states.
    pub dims: Dims,
    /// Criteria to evaluate (certify); the bench tables run their fixed
    /// five rows regardless.
    pub criteria: Vec<Criterion>,
    /// Search budget for the product-witness row; the seed field is
    /// overridden per sample.
    pub witness_opt: OptimizerConfig,
    /// Search budget for the linear-entropy row; the seed field is
    /// overridden per sample.
    pub entropy_opt: OptimizerConfig,
    /// Debug override pinning the table-2 mixing weight.
    pub force_p: Option<f64>,
    /// Detection target of the robustness comparison.
    pub fig2_target: Fig2Target,
}

impl ExperimentConfig {
    /// A configuration with the benchmark defaults (10000 samples, seed 0,
    /// all criteria, table-tuned optimizer budgets).
    pub fn new(experiment: ExperimentKind, dims: Dims) -> Self {
        let mut witness_opt = bench_witness_optimizer();
        let mut entropy_opt = bench_entropy_optimizer();
        witness_opt.seed = 0;
        entropy_opt.seed = 0;
        ExperimentConfig {
            experiment,
            samples: 10000,
            seed: 0,
            dims,
            criteria: Criterion::ALL.to_vec(),
            witness_opt,
            entropy_opt,
            force_p: None,
            fig2_target: Fig2Target::default(),
        }
    }

    /// Checks the cross-field invariants.
    ///
    /// # Errors
    /// [`Error::Config`] on zero samples, an empty criterion list, a
    /// mixing override outside [0, 1], or mismatched objectives.
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        if self.criteria.is_empty() {
            return Err(Error::Config("criterion list must not be empty".into()));
        }
        if let Some(p) = self.force_p {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!(
                    "forced mixing weight must lie in [0, 1], got {p}"
                )));
            }
        }
        if self.witness_opt.objective != Objective::ProductWitness {
            return Err(Error::Config(
                "witness optimizer must target the product witness".into(),
            ));
        }
        if self.entropy_opt.objective != Objective::LinearEntropyBound {
            return Err(Error::Config(
                "entropy optimizer must target the linear-entropy bound".into(),
            ));
        }
        Ok(())
    }
}

/// One evaluated sample: generator metadata, per-criterion witness
/// scalars, and certified vectors (raw, before any tally rounding), in
/// the fixed benchmark CSV layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    /// Sample index within the run.
    pub idx: u64,
    /// Run-level seed (constant per run; with `idx` it reproduces the
    /// sample).
    pub seed: u64,
    /// Mixing weight: the sampled p (table 2) or the critical noise
    /// threshold p* of the covariance criterion (fig 2).
    pub p: Option<f64>,
    /// Recorded largest eigenvalue (table 1).
    pub lambda1: Option<f64>,
    /// Pure-family coefficients as `[re, im]` pairs (fig 2).
    pub coeffs: Option<Vec<[f64; 2]>>,
    /// Per-cut covariance values f_α, in bipartition order.
    pub f: Vec<f64>,
    /// Product-basis witness W (frame-optimized in the tables, identity
    /// frame in fig 2).
    pub witness: Option<f64>,
    /// Detection-deciding fidelity bound F̂ of the sample's own target
    /// (fig 2 only).
    pub fidelity: Option<f64>,
    /// Correlation-tensor norm C₂ (equal dimensions only).
    pub c2: Option<f64>,
    /// Linear-entropy bounds B₁ ≥ … ≥ B_𝒩.
    pub entropy_bounds: Vec<f64>,
    /// Concurrence lower bound (equals the last entropy bound).
    pub cgm: Option<f64>,
    /// Certified vector of the covariance criterion, dashed.
    pub cert_cmc: String,
    /// Certified vector of the fidelity criterion, dashed (fig 2).
    pub cert_fid: Option<String>,
    /// Certified vector of the combined criterion, dashed.
    pub cert_combined: String,
    /// Robustness winner: `cmc`, `fidelity`, `tie`, or `neither`.
    pub winner: Option<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn criterion_names_round_trip() {
        for c in Criterion::ALL {
            assert_eq!(c.name().parse::<Criterion>().unwrap(), c);
        }
        assert!(matches!(
            "witness".parse::<Criterion>(),
            Err(Error::Config(_))
        ));
        let json = serde_json::to_string(&Criterion::CmcSystem).unwrap();
        assert_eq!(json, "\"cmc-system\"");
    }

    #[test]
    fn fig2_target_round_trip_and_vectors() {
        assert_eq!("coatoms".parse::<Fig2Target>().unwrap(), Fig2Target::Coatoms);
        assert_eq!(
            "beyond-221".parse::<Fig2Target>().unwrap(),
            Fig2Target::Beyond221
        );
        assert!("both".parse::<Fig2Target>().is_err());
        let coatoms = Fig2Target::Coatoms.vectors();
        assert_eq!(coatoms.len(), 2);
        assert_eq!(coatoms[0].entries(), &[4, 2, 2]);
        assert_eq!(coatoms[1].entries(), &[3, 3, 2]);
        assert_eq!(Fig2Target::Beyond221.vectors()[0].entries(), &[2, 2, 1]);
    }

    #[test]
    fn config_validation() {
        let dims = Dims::new(vec![3, 3, 3]).unwrap();
        let config = ExperimentConfig::new(ExperimentKind::Table1, dims.clone());
        assert_eq!(config.samples, 10000);
        config.validate().unwrap();

        let mut bad = config.clone();
        bad.samples = 0;
        assert!(matches!(bad.validate(), Err(Error::Config(_))));

        let mut bad = config.clone();
        bad.criteria.clear();
        assert!(matches!(bad.validate(), Err(Error::Config(_))));

        let mut bad = config.clone();
        bad.force_p = Some(1.5);
        assert!(matches!(bad.validate(), Err(Error::Config(_))));

        let mut bad = config;
        bad.entropy_opt = bench_witness_optimizer();
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn bench_optimizer_budgets() {
        let w = bench_witness_optimizer();
        assert_eq!(w.max_evals, 3600);
        assert_eq!(w.restarts, 2);
        assert_eq!(w.stop_when, Some(2.0 + 1e-6));
        let e = bench_entropy_optimizer();
        assert_eq!(e.max_evals, 2700);
        assert_eq!(e.restarts, 1);
        assert_eq!(e.objective, Objective::LinearEntropyBound);
    }
}
