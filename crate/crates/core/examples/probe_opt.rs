use snvec_core::algebra::Dims;
use snvec_core::cmc::product_basis_witness;
use snvec_core::optimizer::{canonical_ghz_bases, refine_frame, svd_initial_frame, LocalFrame, Objective, OptimizerConfig};
use snvec_core::states::sampler::{fixed_lambda1_density_at, haar_random_pure, haar_unitary, stream_rng};
use snvec_core::baselines::{default_pair_sets, linear_entropy_bound};

fn main() {
    let dims = Dims::new(vec![3, 3, 3]).unwrap();
    let bases = canonical_ghz_bases(3, 3).unwrap();
    let sets = default_pair_sets(&dims).unwrap();

    for i in 0..3u64 {
        let mut rng = stream_rng(500, i);
        let psi = haar_random_pure(&dims, &mut rng);
        let rho = psi.density();
        let init = svd_initial_frame(&rho);
        let w_id = product_basis_witness(&rho, &bases).unwrap();
        let w_init = product_basis_witness(&init.apply_to_state(&rho).unwrap(), &bases).unwrap();

        // Bench budget.
        let cfg = OptimizerConfig { max_evals: 3600, restarts: 2, objective: Objective::ProductWitness, seed: 42, ..Default::default() };
        let f = refine_frame(&rho, &init, &cfg).unwrap();
        let w_bench = product_basis_witness(&f.apply_to_state(&rho).unwrap(), &bases).unwrap();

        // Big budget.
        let cfg = OptimizerConfig { max_evals: 45000, restarts: 9, objective: Objective::ProductWitness, seed: 42, ..Default::default() };
        let f = refine_frame(&rho, &init, &cfg).unwrap();
        let w_big = product_basis_witness(&f.apply_to_state(&rho).unwrap(), &bases).unwrap();

        // Random-frame search baseline: 2000 Haar product frames.
        let mut w_rand: f64 = f64::NEG_INFINITY;
        for _ in 0..2000 {
            let us: Vec<_> = (0..3).map(|_| haar_unitary(3, &mut rng)).collect();
            let frame = LocalFrame::new(us).unwrap();
            let w = product_basis_witness(&frame.apply_to_state(&rho).unwrap(), &bases).unwrap();
            w_rand = w_rand.max(w);
        }
        println!("pure {i}: W id {w_id:.4} | init {w_init:.4} | bench {w_bench:.4} | big {w_big:.4} | rand2000 {w_rand:.4}");

        // Entropy: B1 at init vs bench vs big.
        let b_at = |frame: &LocalFrame| {
            let aligned = frame.apply_to_state(&rho).unwrap();
            linear_entropy_bound(&aligned, 1, &sets[0]).unwrap()
        };
        let cfg = OptimizerConfig { max_evals: 2700, restarts: 1, objective: Objective::LinearEntropyBound, seed: 42, ..Default::default() };
        let fb = refine_frame(&rho, &init, &cfg).unwrap();
        let cfg = OptimizerConfig { max_evals: 45000, restarts: 9, objective: Objective::LinearEntropyBound, seed: 42, ..Default::default() };
        let fbig = refine_frame(&rho, &init, &cfg).unwrap();
        println!("        B1 id {:.4} | init {:.4} | bench {:.4} | big {:.4}", b_at(&LocalFrame::identity(&dims)), b_at(&init), b_at(&fb), b_at(&fbig));
    }

    // One mixed sample with high lambda1.
    let mut rng = stream_rng(501, 0);
    let rho = fixed_lambda1_density_at(&dims, 0.85, &mut rng);
    let l1 = 0.85;
    let init = svd_initial_frame(&rho);
    let cfg = OptimizerConfig { max_evals: 3600, restarts: 2, objective: Objective::ProductWitness, seed: 42, ..Default::default() };
    let f = refine_frame(&rho, &init, &cfg).unwrap();
    let w_bench = product_basis_witness(&f.apply_to_state(&rho).unwrap(), &bases).unwrap();
    let cfg = OptimizerConfig { max_evals: 45000, restarts: 9, objective: Objective::ProductWitness, seed: 42, ..Default::default() };
    let f = refine_frame(&rho, &init, &cfg).unwrap();
    let w_big = product_basis_witness(&f.apply_to_state(&rho).unwrap(), &bases).unwrap();
    println!("mixed l1={l1}: W bench {w_bench:.4} | big {w_big:.4}");
}
