//! Objective evaluation for the frame search, with per-site contraction
//! caches: fixing every site but one reduces both witness and entropy
//! objectives to cheap functions of the remaining site's unitary.

use crate::algebra::basis::OperatorBasis;
use crate::algebra::{kron_all, C64, CMat, Dims};
use crate::baselines::{entropy_combine, pair_terms, IndexPairSet, PairTerms};
use crate::error::Result;
use crate::lattice::enumerate_bipartitions;
use crate::states::DensityMatrix;

use super::frame::LocalFrame;

/// A frame objective that can be specialized to one varying site.
pub(crate) trait SiteObjective {
    /// Prepares the cache for varying `site` while every other site stays
    /// at `frame`'s unitary.
    fn begin_site(&mut self, site: usize, frame: &LocalFrame);
    /// Objective value with `u` at the prepared site.
    fn eval_site(&self, u: &CMat) -> f64;
    /// Objective value of a whole frame (cache-free reference path).
    fn eval_frame(&self, frame: &LocalFrame) -> f64;
}

/// Flat-index interleaving table: full index of (rest-index, site-index).
fn interleave_table(dims: &Dims, site: usize) -> Vec<Vec<usize>> {
    let slice = dims.as_slice();
    let rest_dims: Vec<usize> = slice
        .iter()
        .enumerate()
        .filter(|&(n, _)| n != site)
        .map(|(_, &d)| d)
        .collect();
    let d_rest: usize = rest_dims.iter().product();
    let d_site = slice[site];
    let mut table = vec![vec![0usize; d_site]; d_rest];
    for (rest, row) in table.iter_mut().enumerate() {
        // Decompose the rest index in its own mixed radix, then weave the
        // site digit back in.
        let mut digits = Vec::with_capacity(slice.len());
        let mut r = rest;
        for &d in rest_dims.iter().rev() {
            digits.push(r % d);
            r /= d;
        }
        digits.reverse();
        for (s, slot) in row.iter_mut().enumerate() {
            let mut full = 0usize;
            let mut rest_pos = 0usize;
            for (n, &d) in slice.iter().enumerate() {
                let digit = if n == site {
                    s
                } else {
                    let v = digits[rest_pos];
                    rest_pos += 1;
                    v
                };
                full = full * d + digit;
            }
            *slot = full;
        }
    }
    table
}

/// The 1-uniform product-basis witness W = Σ_μ ⟨⊗_n U g_μ U†⟩ as a frame
/// objective.
pub(crate) struct WitnessObjective {
    rho: CMat,
    dims: Dims,
    /// Reference basis elements per site; the witness sums one product per
    /// shared index μ.
    site_elements: Vec<Vec<CMat>>,
    /// Per μ: coefficient matrix C_μ with value Σ_μ Σ_{a,b} X_μ[a,b]·C_μ[a,b]
    /// for X_μ = U g_μ U† at the prepared site.
    coeff: Vec<CMat>,
    site: usize,
}

impl WitnessObjective {
    pub(crate) fn new(rho: &DensityMatrix, bases: &[OperatorBasis]) -> Result<Self> {
        let dims = rho.dims().clone();
        let site_elements: Vec<Vec<CMat>> = bases
            .iter()
            .map(|b| b.elements().to_vec())
            .collect();
        Ok(WitnessObjective {
            rho: rho.matrix().clone(),
            dims,
            site_elements,
            coeff: Vec::new(),
            site: 0,
        })
    }

    fn n_terms(&self) -> usize {
        self.site_elements[0].len()
    }

    fn rotated_element(&self, n: usize, mu: usize, frame: &LocalFrame) -> CMat {
        let u = &frame.unitaries()[n];
        u * &self.site_elements[n][mu] * u.adjoint()
    }
}

impl SiteObjective for WitnessObjective {
    fn begin_site(&mut self, site: usize, frame: &LocalFrame) {
        self.site = site;
        let d_site = self.dims.as_slice()[site];
        let table = interleave_table(&self.dims, site);
        let d_rest = table.len();
        self.coeff.clear();
        for mu in 0..self.n_terms() {
            let others: Vec<CMat> = (0..self.dims.len())
                .filter(|&n| n != site)
                .map(|n| self.rotated_element(n, mu, frame))
                .collect();
            let rest_op = if others.is_empty() {
                CMat::identity(1, 1)
            } else {
                kron_all(&others)
            };
            let mut c = CMat::zeros(d_site, d_site);
            for jr in 0..d_rest {
                for ir in 0..d_rest {
                    let weight = rest_op[(jr, ir)];
                    if weight == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for a in 0..d_site {
                        let col = table[jr][a];
                        for b in 0..d_site {
                            let row = table[ir][b];
                            c[(a, b)] += self.rho[(row, col)] * weight;
                        }
                    }
                }
            }
            self.coeff.push(c);
        }
    }

    fn eval_site(&self, u: &CMat) -> f64 {
        let ud = u.adjoint();
        let mut total = C64::new(0.0, 0.0);
        for (mu, c) in self.coeff.iter().enumerate() {
            let x = u * &self.site_elements[self.site][mu] * &ud;
            for a in 0..x.nrows() {
                for b in 0..x.ncols() {
                    total += x[(a, b)] * c[(a, b)];
                }
            }
        }
        total.re
    }

    fn eval_frame(&self, frame: &LocalFrame) -> f64 {
        let mut total = C64::new(0.0, 0.0);
        for mu in 0..self.n_terms() {
            let factors: Vec<CMat> = (0..self.dims.len())
                .map(|n| self.rotated_element(n, mu, frame))
                .collect();
            let product = kron_all(&factors);
            for i in 0..self.rho.nrows() {
                for j in 0..self.rho.ncols() {
                    total += self.rho[(i, j)] * product[(j, i)];
                }
            }
        }
        total.re
    }
}

/// The raw last-component entropy bound — the genuine-multipartite
/// concurrence lower bound — as a frame objective (before clamping);
/// pushing the weakest component rewards bases that lift every cut at
/// once, which is what the vector criterion needs. All matrix elements
/// the pair set touches are gathered from per-site cached blocks.
pub(crate) struct EntropyObjective {
    rho: CMat,
    dims: Dims,
    set: IndexPairSet,
    n_cuts: usize,
    /// Unique (η, η′) multi-index pairs whose rotated matrix elements are
    /// needed: one off-diagonal per pair, two diagonals per pair and cut.
    entries: Vec<(Vec<usize>, Vec<usize>)>,
    /// Per pair: entry index of its off-diagonal element.
    a_slots: Vec<usize>,
    /// Per pair and cut: entry indices of the two swap-image diagonals.
    b_slots: Vec<Vec<(usize, usize)>>,
    /// Per needed entry: the d×d block over the prepared site's indices.
    blocks: Vec<CMat>,
    /// Per needed entry: the prepared site's components of (η, η′).
    site_components: Vec<(usize, usize)>,
}

impl EntropyObjective {
    pub(crate) fn new(rho: &DensityMatrix, set: IndexPairSet) -> Result<Self> {
        let dims = rho.dims().clone();
        let cuts = enumerate_bipartitions(&dims);
        let mut entries: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        let index_of = |entries: &mut Vec<(Vec<usize>, Vec<usize>)>,
                            eta: Vec<usize>,
                            etap: Vec<usize>|
         -> usize {
            if let Some(pos) = entries.iter().position(|e| e.0 == eta && e.1 == etap) {
                pos
            } else {
                entries.push((eta, etap));
                entries.len() - 1
            }
        };
        let mut a_slots = Vec::with_capacity(set.pairs().len());
        let mut b_slots = Vec::with_capacity(set.pairs().len());
        for (eta, etap) in set.pairs() {
            a_slots.push(index_of(&mut entries, eta.clone(), etap.clone()));
            let mut per_cut = Vec::with_capacity(cuts.len());
            for cut in &cuts {
                let mut eta_sw = eta.clone();
                let mut etap_sw = etap.clone();
                for &p in cut.members() {
                    eta_sw[p] = etap[p];
                    etap_sw[p] = eta[p];
                }
                let d1 = index_of(&mut entries, eta_sw.clone(), eta_sw);
                let d2 = index_of(&mut entries, etap_sw.clone(), etap_sw);
                per_cut.push((d1, d2));
            }
            b_slots.push(per_cut);
        }
        Ok(EntropyObjective {
            rho: rho.matrix().clone(),
            dims,
            set,
            n_cuts: cuts.len(),
            entries,
            a_slots,
            b_slots,
            blocks: Vec::new(),
            site_components: Vec::new(),
        })
    }

    fn terms_from_values(&self, values: &[C64]) -> PairTerms {
        let a = self.a_slots.iter().map(|&s| values[s].norm()).collect();
        let b = self
            .b_slots
            .iter()
            .map(|per_cut| {
                per_cut
                    .iter()
                    .map(|&(d1, d2)| {
                        (values[d1].re.max(0.0) * values[d2].re.max(0.0)).sqrt()
                    })
                    .collect()
            })
            .collect();
        PairTerms { a, b }
    }
}

impl SiteObjective for EntropyObjective {
    fn begin_site(&mut self, site: usize, frame: &LocalFrame) {
        // Conjugate the state by every fixed site's unitary, then slice
        // the needed entries into d×d blocks over the varying site.
        let slice = self.dims.as_slice();
        let fixed: Vec<CMat> = (0..slice.len())
            .map(|n| {
                if n == site {
                    CMat::identity(slice[n], slice[n])
                } else {
                    frame.unitaries()[n].clone()
                }
            })
            .collect();
        let full = kron_all(&fixed);
        let conjugated = full.adjoint() * &self.rho * &full;
        let strides = self.dims.strides();
        let d_site = slice[site];
        self.blocks.clear();
        self.site_components.clear();
        for (eta, etap) in &self.entries {
            let base_row: usize = eta
                .iter()
                .zip(&strides)
                .enumerate()
                .map(|(n, (&i, &s))| if n == site { 0 } else { i * s })
                .sum();
            let base_col: usize = etap
                .iter()
                .zip(&strides)
                .enumerate()
                .map(|(n, (&i, &s))| if n == site { 0 } else { i * s })
                .sum();
            let block = CMat::from_fn(d_site, d_site, |a, b| {
                conjugated[(base_row + a * strides[site], base_col + b * strides[site])]
            });
            self.blocks.push(block);
            self.site_components.push((eta[site], etap[site]));
        }
    }

    fn eval_site(&self, u: &CMat) -> f64 {
        let values: Vec<C64> = self
            .blocks
            .iter()
            .zip(&self.site_components)
            .map(|(block, &(i, j))| {
                let ui = u.column(i);
                let uj = u.column(j);
                let mut v = C64::new(0.0, 0.0);
                for a in 0..block.nrows() {
                    for b in 0..block.ncols() {
                        v += ui[a].conj() * block[(a, b)] * uj[b];
                    }
                }
                v
            })
            .collect();
        let terms = self.terms_from_values(&values);
        entropy_combine(&terms, self.n_cuts, self.n_cuts, 2.0)
    }

    fn eval_frame(&self, frame: &LocalFrame) -> f64 {
        let rotated = frame
            .apply_to_state(&DensityMatrix::trusted(self.dims.clone(), self.rho.clone()))
            .expect("frame built for these dimensions");
        let terms = pair_terms(&rotated, &self.set).expect("set built for these dimensions");
        entropy_combine(&terms, self.n_cuts, self.n_cuts, 2.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::default_pair_sets;
    use crate::optimizer::canonical_ghz_bases;
    use crate::states::sampler::{haar_random_density, haar_unitary, stream_rng};
    use crate::states::{ghz_state, maximally_mixed, mix, NoiseMix};

    fn dims3() -> Dims {
        Dims::new(vec![3, 3, 3]).unwrap()
    }

    fn random_frame(rng: &mut impl rand::Rng) -> LocalFrame {
        LocalFrame::new((0..3).map(|_| haar_unitary(3, rng)).collect()).unwrap()
    }

    #[test]
    fn witness_site_cache_matches_full_evaluation() {
        let mut rng = stream_rng(61, 0);
        let rho = mix(&NoiseMix {
            p: 0.6,
            signal: ghz_state(3, 3).unwrap().density(),
            noise: haar_random_density(&dims3(), &mut rng),
        })
        .unwrap();
        let bases = canonical_ghz_bases(3, 3).unwrap();
        let mut obj = WitnessObjective::new(&rho, &bases).unwrap();
        for trial in 0..5 {
            let mut rng = stream_rng(61, 10 + trial);
            let frame = random_frame(&mut rng);
            let full = obj.eval_frame(&frame);
            for site in 0..3 {
                obj.begin_site(site, &frame);
                let cached = obj.eval_site(&frame.unitaries()[site]);
                assert!(
                    (full - cached).abs() < 1e-10,
                    "site {site}: {cached} vs {full}"
                );
                // Swapping in a different unitary changes only that site.
                let mut rng2 = stream_rng(61, 100 + trial);
                let other = haar_unitary(3, &mut rng2);
                let mut replaced = frame.unitaries().to_vec();
                replaced[site] = other.clone();
                let replaced_frame = LocalFrame::new(replaced).unwrap();
                let expect = obj.eval_frame(&replaced_frame);
                let got = obj.eval_site(&other);
                assert!(
                    (expect - got).abs() < 1e-10,
                    "site {site}: {got} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn witness_identity_frame_matches_direct_witness() {
        let rho = mix(&NoiseMix {
            p: 17.0 / 26.0,
            signal: ghz_state(3, 3).unwrap().density(),
            noise: maximally_mixed(&dims3()),
        })
        .unwrap();
        let bases = canonical_ghz_bases(3, 3).unwrap();
        let obj = WitnessObjective::new(&rho, &bases).unwrap();
        let w = obj.eval_frame(&LocalFrame::identity(&dims3()));
        let direct = crate::cmc::product_basis_witness(&rho, &bases).unwrap();
        assert!((w - direct).abs() < 1e-10);
        assert!((w - 2.0).abs() < 1e-9, "crossing-point witness: {w}");
    }

    #[test]
    fn entropy_site_cache_matches_full_evaluation() {
        let mut rng = stream_rng(62, 0);
        let rho = mix(&NoiseMix {
            p: 0.7,
            signal: ghz_state(3, 3).unwrap().density(),
            noise: haar_random_density(&dims3(), &mut rng),
        })
        .unwrap();
        let set = default_pair_sets(&dims3()).unwrap().remove(0);
        let mut obj = EntropyObjective::new(&rho, set).unwrap();
        for trial in 0..5 {
            let mut rng = stream_rng(62, 10 + trial);
            let frame = random_frame(&mut rng);
            let full = obj.eval_frame(&frame);
            for site in 0..3 {
                obj.begin_site(site, &frame);
                let cached = obj.eval_site(&frame.unitaries()[site]);
                assert!(
                    (full - cached).abs() < 1e-10,
                    "site {site}: {cached} vs {full}"
                );
            }
        }
    }

    #[test]
    fn entropy_identity_frame_matches_raw_bound() {
        // On the 0.9-GHZ mixture the raw and clamped bounds agree (the
        // value is inside the clamp window), pinning the shared path.
        let rho = mix(&NoiseMix {
            p: 0.9,
            signal: ghz_state(3, 3).unwrap().density(),
            noise: maximally_mixed(&dims3()),
        })
        .unwrap();
        let sets = default_pair_sets(&dims3()).unwrap();
        let obj = EntropyObjective::new(&rho, sets[0].clone()).unwrap();
        let raw = obj.eval_frame(&LocalFrame::identity(&dims3()));
        let clamped = crate::baselines::linear_entropy_bound(&rho, 1, &sets[0]).unwrap();
        assert!((raw - clamped).abs() < 1e-12, "{raw} vs {clamped}");
    }
}
