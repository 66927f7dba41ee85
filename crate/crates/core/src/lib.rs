//! Certified lower bounds on Schmidt-number vectors of multipartite qudit
//! states.
//!
//! A pure state of N qudits carries a Schmidt rank across each of the
//! 𝒩 = 2^(N−1) − 1 bipartitions; sorting those ranks non-increasingly gives
//! its Schmidt-number vector, and the mixed-state extension takes the
//! componentwise-best decomposition. This crate implements several
//! experimentally-minded criteria that certify lower bounds on that vector
//! from a density matrix:
//!
//! * a covariance-matrix criterion built on trace norms of cross-covariance
//!   blocks, combined across bipartitions through a majorization feasibility
//!   test ([`cmc`], [`lattice`]);
//! * a product-basis witness `W = Σ_μ ⟨g_μ ⊗ … ⊗ g_μ⟩` targeting
//!   GHZ-like 1-uniform states ([`cmc`], [`optimizer`]);
//! * fidelity witnesses with exact rank-constrained fidelity bounds
//!   ([`fidelity`]);
//! * correlation-tensor-norm and linear-entropy-vector baselines
//!   ([`baselines`]).
//!
//! [`experiments`] drives the Monte-Carlo benchmarks comparing the criteria
//! on random-state ensembles, and the `snvec` binary exposes them on the
//! command line.

pub mod algebra;
pub mod baselines;
pub mod cmc;
pub mod error;
pub mod experiments;
pub mod fidelity;
pub mod lattice;
pub mod optimizer;
pub mod states;
pub mod tol;

pub use error::{Error, Result};
