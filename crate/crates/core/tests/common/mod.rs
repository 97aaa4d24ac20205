#![allow(dead_code)]

use l0peel::{BoxBounds, Fixing, NodePartition, ProblemInstance};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_instance(rng: &mut ChaCha8Rng, m: usize, n: usize) -> ProblemInstance {
    let a = DMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0));
    let y = (0..m).map(|_| rng.random_range(-2.0..2.0)).collect();
    let lambda = rng.random_range(0.05..1.0);
    ProblemInstance::new(y, a, lambda).unwrap()
}

/// Each coordinate independently in S0, S1 or S̄.
pub fn random_node(rng: &mut ChaCha8Rng, n: usize) -> NodePartition {
    let mut node = NodePartition::root(n);
    for j in 0..n {
        match rng.random_range(0..4) {
            0 => node.set(j, Fixing::Zero),
            1 => node.set(j, Fixing::One),
            _ => {}
        }
    }
    node
}

/// `l ∈ [−2, 0]`, `u ∈ [0, 2]`, with occasional one-sided slots. S0
/// coordinates get `[0, 0]`, S1 coordinates a non-degenerate slot.
pub fn random_box(rng: &mut ChaCha8Rng, node: &NodePartition) -> BoxBounds {
    let n = node.len();
    let mut lower = vec![0.0; n];
    let mut upper = vec![0.0; n];
    for j in 0..n {
        if node.status(j) == Fixing::Zero {
            continue;
        }
        lower[j] = -rng.random_range(0.05..2.0);
        upper[j] = rng.random_range(0.05..2.0);
        match rng.random_range(0..8) {
            0 => lower[j] = 0.0,
            1 => upper[j] = 0.0,
            _ => {}
        }
    }
    BoxBounds::new(lower, upper).unwrap()
}

/// Uniform point of the node's box (zero on S0).
pub fn random_feasible(rng: &mut ChaCha8Rng, bounds: &BoxBounds) -> Vec<f64> {
    (0..bounds.len())
        .map(|j| {
            let (l, u) = (bounds.lower_at(j), bounds.upper_at(j));
            if l == u {
                l
            } else {
                rng.random_range(l..=u)
            }
        })
        .collect()
}

pub fn random_w(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    (0..m).map(|_| rng.random_range(-2.0..2.0)).collect()
}

/// Proximal-gradient reference for the node relaxation. The nonsmooth part
/// `λ([t]₊/u − [−t]₊/l) + 1{t ∈ [l, u]}` has a closed-form prox (asymmetric
/// soft threshold, then clip); on S1 the prox is a clip and on S0 it is 0.
pub fn prox_grad_relaxation(
    inst: &ProblemInstance,
    node: &NodePartition,
    bounds: &BoxBounds,
    x0: &[f64],
    tol: f64,
) -> Vec<f64> {
    let n = inst.n();
    let a = inst.a();
    let gram = a.transpose() * a;
    let lip = gram.symmetric_eigenvalues().max().max(1e-12);
    let aty = a.transpose() * nalgebra::DVector::from_column_slice(inst.y());
    let lambda = inst.lambda();
    let mut x = nalgebra::DVector::from_column_slice(x0);
    for _ in 0..2_000_000 {
        let grad = &gram * &x - &aty;
        let z = &x - grad / lip;
        let mut next = z.clone();
        for j in 0..n {
            let (l, u) = (bounds.lower_at(j), bounds.upper_at(j));
            next[j] = match node.status(j) {
                Fixing::Zero => 0.0,
                Fixing::One => z[j].clamp(l, u),
                Fixing::Free => {
                    let t = if z[j] > 0.0 {
                        if u > 0.0 {
                            (z[j] - lambda / (u * lip)).max(0.0)
                        } else {
                            0.0
                        }
                    } else if l < 0.0 {
                        (z[j] - lambda / (l * lip)).min(0.0)
                    } else {
                        0.0
                    };
                    t.clamp(l, u)
                }
            };
        }
        let delta = (&next - &x).amax();
        x = next;
        if delta <= tol {
            break;
        }
    }
    x.as_slice().to_vec()
}

/// `sup_{x ∈ grid(l, u)} v x − f(x)`, grid of step `step` containing `l`, `0` and `u`.
pub fn grid_sup(lower: f64, upper: f64, step: f64, v: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mut best = v * 0.0 - f(0.0);
    let mut visit = |x: f64| best = best.max(v * x - f(x));
    let mut x = 0.0;
    while x < upper {
        visit(x);
        x += step;
    }
    visit(upper);
    let mut x = 0.0;
    while x > lower {
        visit(x);
        x -= step;
    }
    visit(lower);
    best
}
