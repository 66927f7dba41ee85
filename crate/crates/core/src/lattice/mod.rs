//! Bipartition and candidate-vector bookkeeping: the combinatorial layer
//! that turns per-criterion exclusions into one certified lower bound.
//!
//! For N particles there are 𝒩 = 2^(N−1) − 1 bipartitions (α | ᾱ). A
//! candidate Schmidt-number vector v₁ ≥ … ≥ v_𝒩 is constrained by the
//! sorted dimension caps min(D_α, D_ᾱ) and, for N = 3, by the pure-state
//! rank-consistency filter v₁ ≤ v₂·v₃. Criteria exclude candidates; the
//! certified vector is the componentwise minimum over the survivors, which
//! is sound because every criterion refutes only vectors that no
//! decomposition of the state can realize.

pub mod majorization;

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::algebra::Dims;
use crate::error::{Error, Result};

/// One bipartition (α | ᾱ), stored as the canonical side α containing
/// particle 0, members sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bipartition {
    members: Vec<usize>,
    index: usize,
}

impl Bipartition {
    /// Particle indices of the canonical side α (sorted, contains 0).
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// Position of this bipartition in the canonical enumeration,
    /// 0-based (the math notation counts 1…𝒩).
    pub fn index(&self) -> usize {
        self.index
    }

    /// Particle indices of the complement side ᾱ.
    pub fn complement(&self, n_particles: usize) -> Vec<usize> {
        (0..n_particles)
            .filter(|p| !self.members.contains(p))
            .collect()
    }

    /// Product of local dimensions on the canonical side, D_α.
    pub fn dim_alpha(&self, dims: &Dims) -> usize {
        self.members.iter().map(|&p| dims.as_slice()[p]).product()
    }

    /// Product of local dimensions on the complement side, D_ᾱ.
    pub fn dim_complement(&self, dims: &Dims) -> usize {
        dims.total() / self.dim_alpha(dims)
    }

    /// Largest Schmidt rank any pure state can have across this split.
    pub fn cap(&self, dims: &Dims) -> u32 {
        self.dim_alpha(dims).min(self.dim_complement(dims)) as u32
    }
}

impl std::fmt::Display for Bipartition {
    /// Human-readable 1-based form, e.g. `1|23` for α = {0} of three
    /// particles. The complement is omitted (it is implied), so the same
    /// rendering works without knowing N: `12` means α = {0,1}.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for p in &self.members {
            write!(f, "{}", p + 1)?;
        }
        Ok(())
    }
}

/// Canonical bipartition list: every subset containing particle 0 except
/// the full set, ordered by size then lexicographically.
///
/// N = 3 gives [{0}, {0,1}, {0,2}] (𝒩 = 3); N = 2 gives [{0}]; a
/// single-particle system has no bipartitions.
pub fn enumerate_bipartitions(dims: &Dims) -> Vec<Bipartition> {
    let n = dims.len();
    if n < 2 {
        return Vec::new();
    }
    let mut sets: Vec<Vec<usize>> = Vec::new();
    // Subsets of {1, …, N−1} joined with {0}; the full set is skipped.
    let full = (1usize << (n - 1)) - 1;
    for mask in 0..full {
        let mut members = vec![0usize];
        for p in 1..n {
            if mask & (1 << (p - 1)) != 0 {
                members.push(p);
            }
        }
        sets.push(members);
    }
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    sets.into_iter()
        .enumerate()
        .map(|(index, members)| Bipartition { members, index })
        .collect()
}

/// Sorted (non-increasing) rank caps c₁ ≥ … ≥ c_𝒩 over all bipartitions.
pub fn bipartition_caps(dims: &Dims) -> Vec<u32> {
    let mut caps: Vec<u32> = enumerate_bipartitions(dims)
        .iter()
        .map(|b| b.cap(dims))
        .collect();
    caps.sort_unstable_by(|a, b| b.cmp(a));
    caps
}

/// A non-increasing vector of candidate Schmidt numbers v₁ ≥ … ≥ v_𝒩 ≥ 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CandidateVector(Vec<u32>);

impl CandidateVector {
    /// Builds a candidate vector, validating positivity and ordering.
    ///
    /// # Errors
    /// [`Error::Validation`] if empty, any entry is 0, or the entries
    /// increase anywhere.
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Validation("empty candidate vector".into()));
        }
        if entries.iter().any(|&v| v == 0) {
            return Err(Error::Validation(
                "candidate entries must be positive".into(),
            ));
        }
        if entries.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Validation(format!(
                "candidate entries must be non-increasing, got {entries:?}"
            )));
        }
        Ok(CandidateVector(entries))
    }

    /// Entries v₁ ≥ … ≥ v_𝒩.
    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// Number of bipartitions 𝒩 this vector addresses.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; construction rejects empty vectors.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Compact digit form used in summary tables, e.g. `(332)`.
    pub fn compact(&self) -> String {
        let inner: String = self.0.iter().map(|v| v.to_string()).collect();
        format!("({inner})")
    }

    /// Dash-separated form used in CSV cells, e.g. `3-3-2`.
    pub fn dashed(&self) -> String {
        self.0
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join("-")
    }
}

impl std::fmt::Display for CandidateVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.compact())
    }
}

/// True iff a_k ≤ b_k for every position.
///
/// # Errors
/// [`Error::DimMismatch`] on length mismatch.
pub fn elementwise_leq(a: &CandidateVector, b: &CandidateVector) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::DimMismatch(format!(
            "candidate lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.entries().iter().zip(b.entries()).all(|(&x, &y)| x <= y))
}

fn candidate_cache() -> &'static Mutex<HashMap<Vec<usize>, Arc<Vec<CandidateVector>>>> {
    static CACHE: OnceLock<Mutex<HashMap<Vec<usize>, Arc<Vec<CandidateVector>>>>> =
        OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// All candidate Schmidt-number vectors for `dims`, sorted lexicographically
/// descending. Results are memoized per dimension list.
///
/// The filter applies the sorted dimension caps positionwise and, for
/// N = 3, the pure-state rank consistency condition v₁ ≤ v₂·v₃. For N > 3
/// only the caps are used: over-inclusion of candidates can only weaken
/// certified bounds, never falsify them.
pub fn enumerate_candidates(dims: &Dims) -> Vec<CandidateVector> {
    if let Some(hit) = candidate_cache()
        .lock()
        .expect("candidate cache poisoned")
        .get(dims.as_slice())
    {
        return hit.as_ref().clone();
    }
    let caps = bipartition_caps(dims);
    let mut out: Vec<CandidateVector> = Vec::new();
    let mut current: Vec<u32> = Vec::with_capacity(caps.len());
    fill_candidates(&caps, dims.len(), &mut current, &mut out);
    out.sort_by(|a, b| b.cmp(a));
    candidate_cache()
        .lock()
        .expect("candidate cache poisoned")
        .insert(dims.as_slice().to_vec(), Arc::new(out.clone()));
    out
}

fn fill_candidates(
    caps: &[u32],
    n_particles: usize,
    current: &mut Vec<u32>,
    out: &mut Vec<CandidateVector>,
) {
    let k = current.len();
    if k == caps.len() {
        if n_particles == 3 {
            // Pure-state rank consistency across three parties.
            let (v1, v2, v3) = (current[0], current[1], current[2]);
            if v1 > v2 * v3 {
                return;
            }
        }
        out.push(CandidateVector(current.clone()));
        return;
    }
    let upper = caps[k].min(if k == 0 { u32::MAX } else { current[k - 1] });
    for v in 1..=upper {
        current.push(v);
        fill_candidates(caps, n_particles, current, out);
        current.pop();
    }
}

/// Largest candidate that is elementwise ≤ `target`: the join of the
/// below-set, used to bucket certified vectors into table columns.
///
/// `target` need not itself be a candidate (e.g. a componentwise minimum
/// taken over a feasible set); the all-ones candidate guarantees the
/// below-set is never empty.
///
/// # Errors
/// [`Error::DimMismatch`] on length mismatch with the candidate list;
/// [`Error::Internal`] if the below-set's join is not itself in the list
/// (the candidate lattices used here are join-closed downward).
pub fn round_down(target: &[u32], candidates: &[CandidateVector]) -> Result<CandidateVector> {
    let len = candidates
        .first()
        .ok_or_else(|| Error::Validation("empty candidate list".into()))?
        .len();
    if target.len() != len {
        return Err(Error::DimMismatch(format!(
            "target length {} vs candidate length {len}",
            target.len()
        )));
    }
    let mut join = vec![1u32; len];
    for cand in candidates {
        if cand.entries().iter().zip(target).all(|(&c, &t)| c <= t) {
            for (j, &c) in join.iter_mut().zip(cand.entries()) {
                *j = (*j).max(c);
            }
        }
    }
    candidates
        .iter()
        .find(|c| c.entries() == join.as_slice())
        .cloned()
        .ok_or_else(|| {
            Error::Internal(format!(
                "below-set join {join:?} of target {target:?} is not a candidate"
            ))
        })
}

/// Interpretation of a report's certified vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RankSemantics {
    /// Sorted Schmidt-number vector across bipartitions.
    #[serde(rename = "sn-vector")]
    SnVector,
    /// Per-particle marginal ranks (correlation-tensor criterion); in
    /// general a different object from the SN vector.
    #[serde(rename = "single-particle-ranks")]
    SingleParticleRanks,
}

/// Outcome of running one criterion (or a combination) on one state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionReport {
    /// Criterion name, e.g. `"cmc-system"` or `"cmc-system+product-witness"`.
    pub criterion: String,
    /// What the certified vector means.
    pub rank_semantics: RankSemantics,
    /// Candidates refuted by this criterion.
    pub excluded: Vec<CandidateVector>,
    /// Componentwise minimum over the surviving candidates: the certified
    /// lower bound. Non-increasing by construction.
    pub certified: Vec<u32>,
    /// Named witness scalars backing the exclusions (f_α values, W,
    /// fidelities, C₂, entropy bounds). Ordered map for stable JSON.
    pub witness_values: BTreeMap<String, f64>,
}

impl CriterionReport {
    /// Assembles a report from an exclusion set, computing the certified
    /// vector from the surviving candidates.
    ///
    /// # Errors
    /// [`Error::Inconsistent`] if every candidate is excluded — a sound
    /// criterion never empties the feasible set on a valid state.
    pub fn from_exclusions(
        criterion: impl Into<String>,
        rank_semantics: RankSemantics,
        candidates: &[CandidateVector],
        excluded: Vec<CandidateVector>,
        witness_values: BTreeMap<String, f64>,
    ) -> Result<Self> {
        let criterion = criterion.into();
        let certified = certified_minimum(candidates, &excluded, &criterion)?;
        Ok(CriterionReport {
            criterion,
            rank_semantics,
            excluded,
            certified,
            witness_values,
        })
    }

    /// The certified vector as a [`CandidateVector`].
    pub fn certified_vector(&self) -> CandidateVector {
        CandidateVector(self.certified.clone())
    }
}

/// Componentwise minimum of the candidates not excluded.
fn certified_minimum(
    candidates: &[CandidateVector],
    excluded: &[CandidateVector],
    criterion: &str,
) -> Result<Vec<u32>> {
    let feasible: Vec<&CandidateVector> = candidates
        .iter()
        .filter(|c| !excluded.contains(c))
        .collect();
    let Some(first) = feasible.first() else {
        return Err(Error::Inconsistent(format!(
            "criterion {criterion:?} excluded every candidate"
        )));
    };
    let mut certified = first.entries().to_vec();
    for cand in &feasible[1..] {
        for (c, &v) in certified.iter_mut().zip(cand.entries()) {
            *c = (*c).min(v);
        }
    }
    Ok(certified)
}

/// Combines criterion reports by taking the union of their exclusions and
/// recomputing the certified vector over the intersected feasible set.
///
/// # Errors
/// [`Error::Validation`] on empty input; [`Error::Config`] when mixing rank
/// semantics (per-particle ranks cannot be meaningfully intersected with SN
/// vectors); [`Error::Inconsistent`] if the combined feasible set is empty.
pub fn combine_reports(
    reports: &[CriterionReport],
    candidates: &[CandidateVector],
) -> Result<CriterionReport> {
    let Some(first) = reports.first() else {
        return Err(Error::Validation("no reports to combine".into()));
    };
    if reports
        .iter()
        .any(|r| r.rank_semantics != first.rank_semantics)
    {
        return Err(Error::Config(
            "cannot combine reports with different rank semantics".into(),
        ));
    }
    let mut excluded: Vec<CandidateVector> = Vec::new();
    let mut witness_values = BTreeMap::new();
    let mut names: Vec<&str> = Vec::new();
    for report in reports {
        names.push(&report.criterion);
        for e in &report.excluded {
            if !excluded.contains(e) {
                excluded.push(e.clone());
            }
        }
        for (k, v) in &report.witness_values {
            witness_values.entry(k.clone()).or_insert(*v);
        }
    }
    excluded.sort_by(|a, b| b.cmp(a));
    let criterion = names.join("+");
    let certified = certified_minimum(candidates, &excluded, &criterion)?;
    Ok(CriterionReport {
        criterion,
        rank_semantics: first.rank_semantics,
        excluded,
        certified,
        witness_values,
    })
}
