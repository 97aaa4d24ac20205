//! Solve one instance with and without peeling on the same Big-M box.

use l0peel::instance::{calibrate_big_m, default_m0, generate_instance, ExperimentConfig};
use l0peel::{solve, SolverConfig};

fn main() -> l0peel::Result<()> {
    let config = ExperimentConfig {
        seed: 3,
        gamma: 2.0,
        ..ExperimentConfig::default()
    };
    let (inst, truth) = generate_instance(&config)?;
    let calib = calibrate_big_m(
        &inst,
        config.gamma,
        1.1,
        default_m0(&inst),
        &SolverConfig::default(),
    )?;
    let bounds = calib.bounds(inst.n());
    println!(
        "M = {:.4} after {} calibration rounds",
        calib.big_m, calib.rounds
    );

    for peeling in [false, true] {
        let report = solve(
            &inst,
            &bounds,
            &SolverConfig {
                peeling,
                ..SolverConfig::default()
            },
        )?;
        println!(
            "peeling={:<5}  p* = {:.10}  nodes = {:6}  peels = {:6}  time = {:.3}s  support = {:?}",
            peeling,
            report.p_star,
            report.node_count,
            report.peel_fire_count,
            report.wall_time.as_secs_f64(),
            report.support()
        );
    }
    println!("planted support {:?}", truth.support);
    Ok(())
}
