//! A small γ sweep written to a temporary directory.

use l0peel::instance::ExperimentConfig;
use l0peel::sweep::{aggregate_path, run_sweep_to_csv, SweepSpec, SweepVariable};

fn main() -> l0peel::Result<()> {
    let dir = std::env::temp_dir().join("l0peel-sweep-example");
    std::fs::create_dir_all(&dir)?;
    let out = dir.join("gamma.csv");
    let base = ExperimentConfig {
        m: 20,
        n: 25,
        seed: 1,
        ..ExperimentConfig::default()
    };
    let spec = SweepSpec::new(base, SweepVariable::Gamma, vec![1.0, 2.0, 5.0], 4);
    for a in run_sweep_to_csv(&spec, &out)? {
        for v in &a.variants {
            println!(
                "gamma {:3}  {:8} nodes {:8.1}  peels {:9.1}  ratio {:.2}",
                a.value, v.name, v.mean_nodes, v.mean_peels, v.node_ratio
            );
        }
    }
    println!("{}", out.display());
    println!("{}", aggregate_path(&out).display());
    Ok(())
}
