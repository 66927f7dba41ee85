//! Calibration probe: entropy-row detection rates under several search
//! budgets, compared to the reference distributions.

use snvec_core::algebra::Dims;
use snvec_core::baselines::{default_pair_sets, exclusion_by_linentropy};
use snvec_core::optimizer::{
    refine_frame, svd_initial_frame, LocalFrame, Objective, OptimizerConfig,
};
use snvec_core::states::sampler::{fixed_lambda1_density, haar_random_density, stream_rng};
use snvec_core::states::{ghz_state, mix, NoiseMix};
use rand::Rng;
use std::collections::BTreeMap;

fn entropy_cfg(max_evals: usize, restarts: usize, seed: u64) -> OptimizerConfig {
    OptimizerConfig {
        max_evals,
        restarts,
        step_tol: 1e-6,
        objective: Objective::LinearEntropyBound,
        seed,
        stop_when: None,
    }
}

fn main() {
    let dims = Dims::new(vec![3, 3, 3]).unwrap();
    let sets = default_pair_sets(&dims).unwrap();
    let n = 200u64;
    let configs: &[(&str, usize, usize)] = &[
        ("id-0", 0, 0),
        ("id-150", 150, 0),
        ("id-300", 300, 0),
        ("id-600", 600, 0),
        ("id-1200", 1200, 0),
        ("svd-0", 0, 0),
        ("svd-300", 300, 0),
        ("svd-2700", 2700, 0),
    ];
    for table in [1, 2] {
        let seed = if table == 1 { 1001 } else { 2002 };
        let ghz = ghz_state(3, 3).unwrap().density();
        println!("== table{table} seed {seed} n={n} ==");
        for (name, evals, restarts) in configs {
            let mut counts: BTreeMap<String, usize> = BTreeMap::new();
            for idx in 0..n {
                let mut rng = stream_rng(seed, idx);
                let rho = if table == 1 {
                    fixed_lambda1_density(&dims, &mut rng).0
                } else {
                    let p: f64 = rng.gen();
                    let noise = haar_random_density(&dims, &mut rng);
                    mix(&NoiseMix {
                        p,
                        signal: ghz.clone(),
                        noise,
                    })
                    .unwrap()
                };
                let _witness_seed: u64 = rng.gen();
                let entropy_seed: u64 = rng.gen();
                let init = if name.starts_with("svd") {
                    svd_initial_frame(&rho)
                } else {
                    LocalFrame::identity(&dims)
                };
                let cfg = entropy_cfg(*evals, *restarts, entropy_seed);
                let frame = refine_frame(&rho, &init, &cfg).unwrap();
                let aligned = frame.apply_to_state(&rho).unwrap();
                let report = exclusion_by_linentropy(&aligned, &sets).unwrap();
                *counts
                    .entry(report.certified_vector().dashed())
                    .or_default() += 1;
            }
            let line: Vec<String> = counts
                .iter()
                .map(|(v, c)| format!("{v}:{:.1}%", 100.0 * *c as f64 / n as f64))
                .collect();
            println!("  {name:9} {}", line.join("  "));
        }
    }
}
