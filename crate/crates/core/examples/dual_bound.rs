//! Weak duality at a node: any dual point gives a lower bound on the
//! relaxation, and the coordinate-descent residual closes the gap.

use l0peel::dual::dual_objective;
use l0peel::instance::{generate_instance, ExperimentConfig};
use l0peel::relax::{relax_objective, solve_relaxation, RelaxSettings};
use l0peel::{BoxBounds, NodePartition};

fn main() -> l0peel::Result<()> {
    let (inst, _) = generate_instance(&ExperimentConfig {
        seed: 5,
        ..ExperimentConfig::default()
    })?;
    let n = inst.n();
    let node = NodePartition::from_sets(n, &[1, 2, 3], &[0, 10])?;
    let bounds = BoxBounds::big_m(n, 3.0)?;

    let w_zero = vec![0.0; inst.m()];
    let w_y = inst.y().to_vec();
    println!(
        "D(0) = {:.6}",
        dual_objective(&w_zero, None, &node, &bounds, &inst).value
    );
    println!(
        "D(y) = {:.6}",
        dual_objective(&w_y, None, &node, &bounds, &inst).value
    );

    for max_iter in [1, 2, 5, 20, 1000] {
        let mut b = bounds.clone();
        let settings = RelaxSettings {
            max_iter,
            ..RelaxSettings::default()
        };
        let res = solve_relaxation(&node, &mut b, &inst, &settings, None, None);
        let primal = relax_objective(&res.x_hat, &node, &b, &inst);
        let dual = dual_objective(&res.w, Some(&res.corr), &node, &b, &inst).value;
        println!(
            "{:4} sweeps  primal {:.9}  dual {:.9}  gap {:.2e}",
            res.iterations,
            primal,
            dual,
            primal - dual
        );
    }
    Ok(())
}
