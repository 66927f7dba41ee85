//! Random-state sampling for the benchmark ensembles.
//!
//! Two ensembles are provided: eigenvector frames Haar-distributed with
//! spectra uniform on the probability simplex (`Lebesgue`), and the same
//! construction with the first spectral entry Λ₁ drawn uniformly on [0,1]
//! and recorded per sample (`FixedLambda1`), which sweeps states from the
//! maximally-mixed region to nearly pure ones.
//!
//! Reproducibility contract: each sample is a pure function of
//! `(config.seed, index)`. The per-sample generator is derived by mixing
//! seed and index into a fresh ChaCha8 key, so any subset of samples can be
//! regenerated in any order, bit for bit.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use super::DensityMatrix;
use crate::algebra::{C64, CMat, Dims};

/// Which spectral ensemble to draw from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerMode {
    /// Haar eigenvectors, spectrum uniform on the simplex.
    Lebesgue,
    /// Haar eigenvectors; Λ₁ ~ U[0,1] recorded, remaining weight 1−Λ₁
    /// spread uniformly on the lower-dimensional simplex.
    FixedLambda1,
}

/// Sampling configuration shared by a whole run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SamplerConfig {
    /// Spectral ensemble.
    pub mode: SamplerMode,
    /// Run-level seed; combined with the sample index per draw.
    pub seed: u64,
    /// Local dimensions of the sampled states.
    pub dims: Dims,
}

/// One drawn sample with its bookkeeping.
#[derive(Debug, Clone)]
pub struct Sample {
    /// The sampled state.
    pub state: DensityMatrix,
    /// Recorded Λ₁ for [`SamplerMode::FixedLambda1`]; `None` otherwise.
    pub lambda1: Option<f64>,
}

/// SplitMix64 finalizer, used to decorrelate seed/index words.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic per-sample generator for `(seed, index)`.
///
/// The raw seed and index occupy the first two key words — distinct pairs
/// can never collide — and two mixed words decorrelate nearby streams.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&index.to_le_bytes());
    key[16..24].copy_from_slice(&splitmix64(seed ^ 0xA5A5_A5A5_A5A5_A5A5).to_le_bytes());
    key[24..32]
        .copy_from_slice(&splitmix64(index.wrapping_add(splitmix64(seed))).to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Haar-random d×d unitary: QR of a complex Ginibre matrix with the R
/// diagonal's phases absorbed into Q, which makes the distribution exactly
/// Haar rather than QR-convention-dependent.
pub fn haar_unitary(d: usize, rng: &mut impl Rng) -> CMat {
    let g = CMat::from_fn(d, d, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..d {
        let rkk = r[(k, k)];
        let mag = rkk.norm();
        let phase = if mag > 0.0 { rkk / mag } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, k)] *= phase;
        }
    }
    q
}

/// Uniform point on the (k−1)-simplex: normalized exponential variates.
pub fn simplex_point(k: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut v: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = v.iter().sum();
    for x in &mut v {
        *x /= total;
    }
    v
}

/// ρ = U diag(λ) U† from spectral data.
fn spectral_density(dims: &Dims, u: &CMat, lam: &[f64]) -> DensityMatrix {
    let mut scaled = u.clone();
    for (k, &l) in lam.iter().enumerate() {
        let factor = C64::new(l, 0.0);
        for i in 0..scaled.nrows() {
            scaled[(i, k)] *= factor;
        }
    }
    DensityMatrix::trusted(dims.clone(), &scaled * u.adjoint())
}

/// One state from the Lebesgue ensemble.
pub fn haar_random_density(dims: &Dims, rng: &mut impl Rng) -> DensityMatrix {
    let d = dims.total();
    let u = haar_unitary(d, rng);
    let lam = simplex_point(d, rng);
    spectral_density(dims, &u, &lam)
}

/// One state with the first spectral entry pinned to `lambda1`; the
/// remaining weight is uniform on the (D−2)-simplex. `lambda1 = 1` yields
/// a Haar-random pure state.
pub fn fixed_lambda1_density_at(
    dims: &Dims,
    lambda1: f64,
    rng: &mut impl Rng,
) -> DensityMatrix {
    let d = dims.total();
    let u = haar_unitary(d, rng);
    let rest = simplex_point(d - 1, rng);
    let mut lam = Vec::with_capacity(d);
    lam.push(lambda1);
    lam.extend(rest.into_iter().map(|x| x * (1.0 - lambda1)));
    spectral_density(dims, &u, &lam)
}

/// One state from the FixedLambda1 ensemble; returns the state and the
/// recorded Λ₁.
pub fn fixed_lambda1_density(dims: &Dims, rng: &mut impl Rng) -> (DensityMatrix, f64) {
    let lambda1: f64 = rng.gen();
    let state = fixed_lambda1_density_at(dims, lambda1, rng);
    (state, lambda1)
}

/// The sample at `index` under `config` — a pure function of its arguments.
pub fn draw(config: &SamplerConfig, index: u64) -> Sample {
    let mut rng = stream_rng(config.seed, index);
    match config.mode {
        SamplerMode::Lebesgue => Sample {
            state: haar_random_density(&config.dims, &mut rng),
            lambda1: None,
        },
        SamplerMode::FixedLambda1 => {
            let (state, lambda1) = fixed_lambda1_density(&config.dims, &mut rng);
            Sample {
                state,
                lambda1: Some(lambda1),
            }
        }
    }
}

/// Uniform point on the complex unit sphere in k dimensions (normalized
/// complex Gaussians); used to sample coefficient vectors for pure-state
/// families.
pub fn unit_sphere_coeffs(k: usize, rng: &mut impl Rng) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..k)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Haar-random pure state on the joint space.
pub fn haar_random_pure(dims: &Dims, rng: &mut impl Rng) -> super::PureState {
    let coeffs = unit_sphere_coeffs(dims.total(), rng);
    let amps = crate::algebra::CVec::from_vec(coeffs);
    super::PureState::new(dims.clone(), amps).expect("normalized by construction")
}
