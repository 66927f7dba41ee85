use std::time::Instant;
use snvec_core::algebra::Dims;
use snvec_core::experiments::{run_fig2, run_table1, run_table2, ExperimentConfig, ExperimentKind, Fig2Target};

fn main() {
    let d333 = Dims::new(vec![3, 3, 3]).unwrap();
    let d234 = Dims::new(vec![2, 3, 4]).unwrap();
    let n = 100;

    let mut c = ExperimentConfig::new(ExperimentKind::Table1, d333.clone());
    c.samples = n; c.seed = 1001;
    let t = Instant::now();
    let (s1, _) = run_table1(&c).unwrap();
    println!("table1 {n} samples: {:.2?} -> 10000 est {:.1} min", t.elapsed(), t.elapsed().as_secs_f64() * 100.0 / 60.0);
    for r in &s1.rows { println!("  {}: {:?}", r.criterion, r.percent); }

    let mut c = ExperimentConfig::new(ExperimentKind::Table2, d333);
    c.samples = n; c.seed = 2002;
    let t = Instant::now();
    let (s2, _) = run_table2(&c).unwrap();
    println!("table2 {n} samples: {:.2?} -> 10000 est {:.1} min", t.elapsed(), t.elapsed().as_secs_f64() * 100.0 / 60.0);
    for r in &s2.rows { println!("  {}: {:?}", r.criterion, r.percent); }

    let mut c = ExperimentConfig::new(ExperimentKind::Fig2, d234);
    c.samples = n; c.seed = 3003; c.fig2_target = Fig2Target::Beyond221;
    let t = Instant::now();
    let (s3, _) = run_fig2(&c).unwrap();
    println!("fig2 {n} samples: {:.2?} -> 10000 est {:.1} min", t.elapsed(), t.elapsed().as_secs_f64() * 100.0 / 60.0);
    println!("  cmc win {}% ties {} neither {} undetectable cmc {} fid {}",
        s3.cmc_win_percent, s3.ties, s3.neither, s3.cmc_undetectable, s3.fidelity_undetectable);
}
