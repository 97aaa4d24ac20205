//! Draw a synthetic instance and look at what came out.
//!
//! cargo run --example generate_instance -- 7

use l0peel::instance::{generate_instance, ExperimentConfig};

fn main() -> l0peel::Result<()> {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0);
    let config = ExperimentConfig {
        seed,
        ..ExperimentConfig::default()
    };
    let (inst, truth) = generate_instance(&config)?;

    println!(
        "m = {}, n = {}, k = {}, rho = {}",
        inst.m(),
        inst.n(),
        config.k,
        config.rho
    );
    println!("lambda     = {:.5} ({:?})", inst.lambda(), config.lambda);
    println!("lambda_max = {:.5}", inst.lambda_max());
    println!("support    = {:?}", truth.support);
    for &j in &truth.support {
        println!("  x[{j:2}] = {:+.4}", truth.x_dagger[j]);
    }
    let signal: Vec<f64> = {
        let x = nalgebra::DVector::from_column_slice(&truth.x_dagger);
        (inst.a() * x).iter().copied().collect()
    };
    let noise: f64 = inst
        .y()
        .iter()
        .zip(&signal)
        .map(|(y, s)| (y - s).powi(2))
        .sum();
    let power: f64 = signal.iter().map(|s| s * s).sum();
    println!("realized SNR = {:.6} dB", 10.0 * (power / noise).log10());
    println!(
        "objective at x = 0:  {:.5}",
        inst.objective(&vec![0.0; inst.n()])
    );
    println!(
        "objective at x†:     {:.5}",
        inst.objective(&truth.x_dagger)
    );
    Ok(())
}
