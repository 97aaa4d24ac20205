//! Cross-check the tree search against exhaustive enumeration on small problems.

use l0peel::instance::{calibrate_big_m, default_m0, generate_instance, ExperimentConfig};
use l0peel::oracle::brute_force_global;
use l0peel::{solve, SolverConfig};

fn main() -> l0peel::Result<()> {
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let config = ExperimentConfig {
            m: 10,
            n: 12,
            k: 2,
            seed,
            ..ExperimentConfig::default()
        };
        let (inst, _) = generate_instance(&config)?;
        let oracle = brute_force_global(&inst, inst.n())?;
        let calib = calibrate_big_m(&inst, 3.0, 1.1, default_m0(&inst), &SolverConfig::default())?;
        let report = solve(&inst, &calib.bounds(inst.n()), &SolverConfig::default())?;
        let gap = (report.p_star - oracle.value).abs();
        worst = worst.max(gap);
        println!(
            "seed {seed:2}: bnb {:.10} ({:4} nodes)  oracle {:.10} ({} supports)  {}",
            report.p_star,
            report.node_count,
            oracle.value,
            oracle.enumerated_count,
            if report.support() == oracle.support {
                "same support"
            } else {
                "SUPPORT DIFFERS"
            }
        );
    }
    println!("largest |p*_bnb - p*_oracle| = {worst:.2e}");
    Ok(())
}
