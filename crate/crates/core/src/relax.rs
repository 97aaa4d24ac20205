//! Node relaxation and its coordinate-descent solver.
//!
//! At a node `(S0, S1, S̄)` with box `[l, u]` the relaxed objective is
//!
//! ```text
//! ½‖y − Ax‖² + λ Σ_{i∈S̄} ([x_i]₊/u_i − [−x_i]₊/l_i) + λ|S1|
//!     s.t. x_{S0} = 0, l ≤ x ≤ u
//! ```
//!
//! with the convention `0/0 = 0`.

use std::ops::ControlFlow;

use crate::instance::{BoxBounds, ProblemInstance};
use crate::linalg::{axpy, dot, sq_norm};
use crate::{Error, Result};

/// Branching state of one coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fixing {
    /// In S0: forced to zero.
    Zero,
    /// In S1: forced nonzero.
    One,
    /// In S̄: undecided.
    Free,
}

/// Disjoint index sets `S0`, `S1` and their complement `S̄`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NodePartition {
    status: Vec<Fixing>,
}

impl NodePartition {
    /// Every coordinate free.
    pub fn root(n: usize) -> Self {
        Self {
            status: vec![Fixing::Free; n],
        }
    }

    pub fn from_sets(n: usize, zero: &[usize], one: &[usize]) -> Result<Self> {
        let mut status = vec![Fixing::Free; n];
        for (set, fix) in [(zero, Fixing::Zero), (one, Fixing::One)] {
            for &j in set {
                if j >= n {
                    return Err(Error::InvalidParameter(format!(
                        "index {j} out of range for n = {n}"
                    )));
                }
                if status[j] != Fixing::Free {
                    return Err(Error::InvalidParameter(format!(
                        "index {j} appears twice in S0 ∪ S1"
                    )));
                }
                status[j] = fix;
            }
        }
        Ok(Self { status })
    }

    pub fn len(&self) -> usize {
        self.status.len()
    }

    pub fn is_empty(&self) -> bool {
        self.status.is_empty()
    }

    pub fn status(&self, j: usize) -> Fixing {
        self.status[j]
    }

    pub fn set(&mut self, j: usize, fixing: Fixing) {
        self.status[j] = fixing;
    }

    fn indices(&self, which: Fixing) -> impl Iterator<Item = usize> + '_ {
        self.status
            .iter()
            .enumerate()
            .filter(move |(_, s)| **s == which)
            .map(|(j, _)| j)
    }

    pub fn zero_set(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices(Fixing::Zero)
    }

    pub fn one_set(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices(Fixing::One)
    }

    pub fn free_set(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices(Fixing::Free)
    }

    pub fn n_one(&self) -> usize {
        self.one_set().count()
    }
}

/// Output of [`solve_relaxation`].
#[derive(Debug, Clone)]
pub struct RelaxationResult {
    /// Zero on S0, inside the final box.
    pub x_hat: Vec<f64>,
    /// Relaxed objective at `x_hat` under the final box.
    pub value: f64,
    /// Dual point `y − A x_hat`.
    pub w: Vec<f64>,
    /// `Aᵀw`
    pub corr: Vec<f64>,
    /// Full sweeps performed.
    pub iterations: usize,
    pub converged: bool,
    /// The hook asked to stop before convergence.
    pub interrupted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxSettings {
    /// Stop once the largest coordinate change in a sweep is at most this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for RelaxSettings {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 1000,
        }
    }
}

/// Per-sweep callback: receives `w = y − Ax` and `Aᵀw` for the current
/// iterate, may shrink the box, and may ask the solver to stop.
pub type SweepHook<'a> = dyn FnMut(&[f64], &[f64], &mut BoxBounds) -> ControlFlow<()> + 'a;

const RESIDUAL_REFRESH: usize = 50;

/// Relaxed objective, `+∞` outside `{x_{S0} = 0} ∩ [l, u]`.
pub fn relax_objective(
    x: &[f64],
    node: &NodePartition,
    bounds: &BoxBounds,
    inst: &ProblemInstance,
) -> f64 {
    assert_eq!(x.len(), inst.n());
    if !bounds.contains_point(x) {
        return f64::INFINITY;
    }
    let lambda = inst.lambda();
    let mut penalty = 0.0;
    for (j, &xj) in x.iter().enumerate() {
        match node.status(j) {
            Fixing::Zero if xj != 0.0 => return f64::INFINITY,
            Fixing::Zero => {}
            Fixing::One => penalty += lambda,
            Fixing::Free => {
                if xj > 0.0 {
                    penalty += lambda * xj / bounds.upper_at(j);
                } else if xj < 0.0 {
                    penalty += lambda * xj / bounds.lower_at(j);
                }
            }
        }
    }
    0.5 * sq_norm(&inst.residual(x)) + penalty
}

/// Exact minimizer over `t ∈ [lower, upper]` of
/// `½ s t² − c t + pen(t)`, where `pen` is `0` on S1 and
/// `λ([t]₊/u − [−t]₊/l)` on S̄.
///
/// `c` is `a_jᵀ` times the residual with coordinate `j` removed and `s = ‖a_j‖²`.
pub fn coordinate_update(
    c: f64,
    s: f64,
    fixing: Fixing,
    lower: f64,
    upper: f64,
    lambda: f64,
) -> f64 {
    match fixing {
        Fixing::Zero => 0.0,
        Fixing::One => {
            if s > 0.0 {
                (c / s).clamp(lower, upper)
            } else if c > 0.0 {
                upper
            } else if c < 0.0 {
                lower
            } else {
                0.0
            }
        }
        Fixing::Free => {
            if upper > 0.0 {
                let slope = c - lambda / upper;
                if slope > 0.0 {
                    return if s > 0.0 {
                        (slope / s).min(upper)
                    } else {
                        upper
                    };
                }
            }
            if lower < 0.0 {
                let slope = c + lambda / -lower;
                if slope < 0.0 {
                    return if s > 0.0 {
                        (slope / s).max(lower)
                    } else {
                        lower
                    };
                }
            }
            0.0
        }
    }
}

/// Cyclic coordinate descent on the node relaxation, S1 first then S̄,
/// each in ascending order.
///
/// After every sweep `hook` (if any) sees the current dual point and
/// correlations and may tighten `bounds`; the iterate is projected back into
/// the new box before the next sweep. The returned fields are consistent
/// with the final `bounds`.
pub fn solve_relaxation(
    node: &NodePartition,
    bounds: &mut BoxBounds,
    inst: &ProblemInstance,
    settings: &RelaxSettings,
    warm_start: Option<&[f64]>,
    mut hook: Option<&mut SweepHook<'_>>,
) -> RelaxationResult {
    let n = inst.n();
    assert_eq!(node.len(), n);
    assert_eq!(bounds.len(), n);
    let lambda = inst.lambda();

    let mut x = match warm_start {
        Some(ws) => {
            assert_eq!(ws.len(), n, "warm start must have length n");
            ws.to_vec()
        }
        None => vec![0.0; n],
    };
    for j in node.zero_set() {
        x[j] = 0.0;
    }
    bounds.project(&mut x);

    let order: Vec<usize> = node.one_set().chain(node.free_set()).collect();
    let mut r = inst.residual(&x);
    let mut iterations = 0;
    let mut converged = order.is_empty();
    let mut interrupted = false;

    while !converged && iterations < settings.max_iter {
        let mut max_delta = 0.0_f64;
        for &j in &order {
            let (lo, hi) = (bounds.lower_at(j), bounds.upper_at(j));
            let old = x[j];
            let new = if lo == hi {
                lo
            } else {
                let col = inst.column(j);
                let s = inst.col_sq_norm(j);
                let c = dot(col, &r) + s * old;
                coordinate_update(c, s, node.status(j), lo, hi, lambda)
            };
            if new != old {
                axpy(old - new, inst.column(j), &mut r);
                x[j] = new;
                max_delta = max_delta.max((new - old).abs());
            }
        }
        iterations += 1;
        if iterations % RESIDUAL_REFRESH == 0 {
            r = inst.residual(&x);
        }

        if let Some(h) = hook.as_mut() {
            let corr = inst.correlations(&r);
            if h(&r, &corr, bounds).is_break() {
                interrupted = true;
                bounds.project(&mut x);
                break;
            }
            let clipped = bounds.project(&mut x);
            if clipped > 0.0 {
                r = inst.residual(&x);
                max_delta = max_delta.max(clipped);
            }
        }
        converged = max_delta <= settings.tol;
    }

    let w = inst.residual(&x);
    let corr = inst.correlations(&w);
    let value = relax_objective(&x, node, bounds, inst);
    RelaxationResult {
        x_hat: x,
        value,
        w,
        corr,
        iterations,
        converged,
        interrupted,
    }
}
