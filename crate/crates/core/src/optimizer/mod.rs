//! Local-basis optimization: per-particle unitary frames, the canonical
//! GHZ-aligned witness bases, spectral initialization, and the
//! derivative-free search that maximizes basis-dependent witnesses.

mod bases;
mod frame;
mod init;
mod nm;
mod objective;

pub use bases::{canonical_ghz_bases, embedded_ghz_bases};
pub use frame::LocalFrame;
pub use init::svd_initial_frame;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::CMat;
use crate::baselines::default_pair_sets;
use crate::error::{Error, Result};
use crate::states::DensityMatrix;

use frame::{angle_count, unitary_from_angles};
use objective::{EntropyObjective, SiteObjective, WitnessObjective};

/// The frame-dependent quantity [`refine_frame`] maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Objective {
    /// The product-basis witness W (sum of matched product correlators).
    #[default]
    ProductWitness,
    /// The leading component of the linear-entropy vector bound, before
    /// clamping; every component is then read off at the best frame.
    LinearEntropyBound,
}

impl Objective {
    /// Spread of the random restart angles: witness landscapes are well
    /// conditioned near good frames, entropy bounds need wider exploration.
    fn restart_sigma(self) -> f64 {
        match self {
            Objective::ProductWitness => 0.8,
            Objective::LinearEntropyBound => 1.5,
        }
    }
}

/// Number of cyclic passes over all particles per run.
const SWEEPS: usize = 3;

/// Budget and strategy knobs for [`refine_frame`].
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    /// Total function-evaluation budget of one run, split evenly across
    /// the cyclic site visits (each run makes three sweeps over all
    /// particles). Zero disables the search and returns the init frame.
    pub max_evals: usize,
    /// Extra runs from random starting angles; the first run always
    /// starts at the (unrotated) init frame.
    pub restarts: usize,
    /// Simplex collapse tolerance; must be positive.
    pub step_tol: f64,
    /// The quantity to maximize.
    pub objective: Objective,
    /// Seed for the restart-angle draws.
    pub seed: u64,
    /// Optional early-exit threshold: once the best value reaches it the
    /// remaining budget is skipped. Sound whenever only the comparison
    /// against the threshold matters, because stopping early can only
    /// under-report the maximum.
    pub stop_when: Option<f64>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            max_evals: 2000,
            restarts: 4,
            step_tol: 1e-6,
            objective: Objective::ProductWitness,
            seed: 0,
            stop_when: None,
        }
    }
}

/// Maximizes the configured objective over local product frames composed
/// on top of `init`, returning the best frame found — or `init` itself
/// when no strict improvement was found.
///
/// # Errors
/// [`Error::Config`] on a non-positive `step_tol`,
/// [`Error::DimMismatch`] when `init` does not fit `rho`, and propagated
/// construction failures of the underlying objective.
pub fn refine_frame(
    rho: &DensityMatrix,
    init: &LocalFrame,
    config: &OptimizerConfig,
) -> Result<LocalFrame> {
    refine_frame_with_trace(rho, init, config).map(|(frame, _)| frame)
}

/// Like [`refine_frame`], also returning the best-so-far objective value
/// after every site visit (a non-decreasing trace).
///
/// # Errors
/// Same conditions as [`refine_frame`].
pub fn refine_frame_with_trace(
    rho: &DensityMatrix,
    init: &LocalFrame,
    config: &OptimizerConfig,
) -> Result<(LocalFrame, Vec<f64>)> {
    if !(config.step_tol > 0.0) {
        return Err(Error::Config(format!(
            "optimizer step_tol must be positive, got {}",
            config.step_tol
        )));
    }
    init.check_dims(rho.dims())?;
    if config.max_evals == 0 {
        return Ok((init.clone(), Vec::new()));
    }
    let rho_eff = init.apply_to_state(rho)?;
    let dims = rho_eff.dims().clone();
    let slice: Vec<usize> = dims.as_slice().to_vec();
    let n_sites = slice.len();
    let mut objective = build_objective(&rho_eff, config.objective)?;
    let maxfev_site = (config.max_evals / (SWEEPS * n_sites)).max(1);
    let init_value = objective.eval_frame(&LocalFrame::identity(&dims));
    let sigma = config.objective.restart_sigma();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut best_value = init_value;
    let mut best_angles: Option<Vec<Vec<f64>>> = None;
    let mut trace = Vec::new();
    'runs: for run in 0..=config.restarts {
        let mut angles: Vec<Vec<f64>> = slice
            .iter()
            .map(|&d| vec![0.0f64; angle_count(d)])
            .collect();
        if run > 0 {
            for site_angles in &mut angles {
                for a in site_angles.iter_mut() {
                    let g: f64 = rng.sample(StandardNormal);
                    *a = sigma * g;
                }
            }
        }
        let mut run_value = f64::NEG_INFINITY;
        for _sweep in 0..SWEEPS {
            for site in 0..n_sites {
                let delta = delta_frame(&angles, &slice);
                objective.begin_site(site, &delta);
                let d = slice[site];
                let mut f = |x: &[f64]| objective.eval_site(&unitary_from_angles(x, d));
                let outcome = nm::maximize(&mut f, &angles[site], maxfev_site, config.step_tol);
                if outcome.value > run_value {
                    run_value = outcome.value;
                    angles[site] = outcome.x;
                }
                if run_value > best_value {
                    best_value = run_value;
                    best_angles = Some(angles.clone());
                }
                trace.push(best_value);
                if let Some(threshold) = config.stop_when {
                    if best_value >= threshold {
                        break 'runs;
                    }
                }
            }
        }
    }
    let refined = match best_angles {
        Some(per_site) => {
            let units: Vec<CMat> = per_site
                .iter()
                .zip(&slice)
                .map(|(a, &d)| unitary_from_angles(a, d))
                .collect();
            init.composed_with(&units)
        }
        None => init.clone(),
    };
    Ok((refined, trace))
}

fn build_objective(rho: &DensityMatrix, which: Objective) -> Result<Box<dyn SiteObjective>> {
    let dims = rho.dims();
    Ok(match which {
        Objective::ProductWitness => {
            let bases = match dims.equal_dim() {
                Some(d) => canonical_ghz_bases(d, dims.len())?,
                None => embedded_ghz_bases(dims)?,
            };
            Box::new(WitnessObjective::new(rho, &bases)?)
        }
        Objective::LinearEntropyBound => {
            let mut sets = default_pair_sets(dims)?;
            Box::new(EntropyObjective::new(rho, sets.remove(0))?)
        }
    })
}

/// The delta frame the current angle state encodes.
fn delta_frame(angles: &[Vec<f64>], slice: &[usize]) -> LocalFrame {
    let units: Vec<CMat> = angles
        .iter()
        .zip(slice)
        .map(|(a, &d)| unitary_from_angles(a, d))
        .collect();
    LocalFrame::new(units).expect("angle-generated matrices are unitary")
}
