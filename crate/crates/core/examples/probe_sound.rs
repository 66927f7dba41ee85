use nalgebra::DVector;
use snvec_core::algebra::{kron_all, C64, CMat, Dims};
use snvec_core::baselines::{default_pair_sets, linear_entropy_bound};
use snvec_core::cmc::product_basis_witness;
use snvec_core::optimizer::{canonical_ghz_bases, refine_frame, svd_initial_frame, Objective, OptimizerConfig};
use snvec_core::states::sampler::{fixed_lambda1_density_at, stream_rng, unit_sphere_coeffs};
use snvec_core::states::{DensityMatrix, PureState};
use rand::Rng;

fn random_product_density(dims: &Dims, rng: &mut impl Rng) -> CMat {
    let factors: Vec<CMat> = dims.as_slice().iter().map(|&d| {
        let v = unit_sphere_coeffs(d, rng);
        let vec = DVector::from_vec(v);
        &vec * vec.adjoint()
    }).collect();
    kron_all(&factors)
}

fn main() {
    let dims = Dims::new(vec![3, 3, 3]).unwrap();
    let sets = default_pair_sets(&dims).unwrap();
    let bases = canonical_ghz_bases(3, 3).unwrap();
    let wcfg = OptimizerConfig { max_evals: 3600, restarts: 2, objective: Objective::ProductWitness, seed: 7, ..Default::default() };
    let ecfg = OptimizerConfig { max_evals: 2700, restarts: 1, objective: Objective::LinearEntropyBound, seed: 7, ..Default::default() };

    let mut max_b: f64 = 0.0;
    let mut max_w: f64 = f64::NEG_INFINITY;
    for i in 0..20u64 {
        let mut rng = stream_rng(700, i);
        let k = rng.gen_range(2..=8);
        let weights: Vec<f64> = (0..k).map(|_| rng.gen::<f64>()).collect();
        let total: f64 = weights.iter().sum();
        let mut mat = CMat::zeros(27, 27);
        for w in &weights {
            mat += random_product_density(&dims, &mut rng) * C64::new(w / total, 0.0);
        }
        let rho = DensityMatrix::new(dims.clone(), mat).unwrap();
        let init = svd_initial_frame(&rho);
        let fe = refine_frame(&rho, &init, &ecfg).unwrap();
        let b = linear_entropy_bound(&fe.apply_to_state(&rho).unwrap(), 1, &sets[0]).unwrap();
        let fw = refine_frame(&rho, &init, &wcfg).unwrap();
        let w = product_basis_witness(&fw.apply_to_state(&rho).unwrap(), &bases).unwrap();
        max_b = max_b.max(b);
        max_w = max_w.max(w);
    }
    println!("separable mixed: max B1 = {max_b:.3e}, max W = {max_w:.6}");

    // Low-lambda1 stratified states: where does B turn on?
    for &l1 in &[0.05, 0.1, 0.15, 0.2, 0.3, 0.5] {
        let mut detected = 0;
        let mut bmax: f64 = 0.0;
        for i in 0..10u64 {
            let mut rng = stream_rng(701, (l1 * 1000.0) as u64 + i);
            let rho = fixed_lambda1_density_at(&dims, l1, &mut rng);
            let init = svd_initial_frame(&rho);
            let fe = refine_frame(&rho, &init, &ecfg).unwrap();
            let b = linear_entropy_bound(&fe.apply_to_state(&rho).unwrap(), 1, &sets[0]).unwrap();
            if b > 1e-7 { detected += 1; }
            bmax = bmax.max(b);
        }
        println!("lambda1={l1}: detected {detected}/10, max B1 {bmax:.4}");
    }
}
