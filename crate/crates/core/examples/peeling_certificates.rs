//! Run the root relaxation, then peel the root box using the zero incumbent
//! and print every certificate that fired.

use l0peel::dual::dual_objective;
use l0peel::instance::{generate_instance, ExperimentConfig};
use l0peel::peel::peel_all;
use l0peel::relax::{solve_relaxation, RelaxSettings};
use l0peel::{BoxBounds, NodePartition};

fn main() -> l0peel::Result<()> {
    let config = ExperimentConfig {
        m: 20,
        n: 12,
        k: 2,
        seed: 11,
        ..ExperimentConfig::default()
    };
    let (inst, truth) = generate_instance(&config)?;
    let n = inst.n();
    let node = NodePartition::root(n);
    let mut bounds = BoxBounds::big_m(n, 5.0)?;

    // a decent incumbent: least squares on the planted support
    let p_bar = {
        let sub = inst.a().select_columns(&truth.support);
        let y = nalgebra::DVector::from_column_slice(inst.y());
        let coef = sub.svd(true, true).solve(&y, 1e-12).expect("svd");
        let mut x = vec![0.0; n];
        for (&j, c) in truth.support.iter().zip(coef.iter()) {
            x[j] = *c;
        }
        inst.objective(&x)
    };

    let res = solve_relaxation(
        &node,
        &mut bounds,
        &inst,
        &RelaxSettings::default(),
        None,
        None,
    );
    let d = dual_objective(&res.w, None, &node, &bounds, &inst);
    println!(
        "relaxation {:.6}  dual {:.6}  incumbent {:.6}",
        res.value, d.value, p_bar
    );

    let out = peel_all(
        &node,
        &d.corr,
        d.value,
        p_bar,
        &bounds,
        inst.lambda(),
        1e-16,
    );
    println!("{} bounds tightened", out.fired());
    for e in &out.events {
        println!(
            "  x[{:2}] {:5}  {:+.4} -> {:+.4}   corr {:+.4}  psi {:.4}",
            e.j,
            e.side.as_str(),
            e.old,
            e.new,
            e.corr,
            e.psi
        );
    }
    if !out.implied_zero.is_empty() {
        println!("coordinates forced to zero: {:?}", out.implied_zero);
    }
    Ok(())
}
