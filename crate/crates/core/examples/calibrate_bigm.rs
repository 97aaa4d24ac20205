//! Grow the Big-M box until the optimum is strictly inside, then scale by γ.

use l0peel::instance::{calibrate_big_m, default_m0, generate_instance, ExperimentConfig};
use l0peel::SolverConfig;

fn main() -> l0peel::Result<()> {
    let (inst, truth) = generate_instance(&ExperimentConfig {
        seed: 2,
        ..ExperimentConfig::default()
    })?;
    let m0 = default_m0(&inst);
    println!("M0 = {m0:.4}");
    for gamma in [1.0, 1.5, 3.0] {
        let c = calibrate_big_m(&inst, gamma, 1.1, m0, &SolverConfig::default())?;
        let norm = c.x_star.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        println!(
            "gamma {gamma:3}: M = {:.4}  ‖x*‖∞ = {norm:.4}  last box {:.4}  rounds {}",
            c.big_m, c.last_box, c.rounds
        );
    }
    let max_true = truth.x_dagger.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    println!("‖x†‖∞ = {max_true:.4}");
    Ok(())
}
