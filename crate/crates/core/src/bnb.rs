//! Depth-first branch-and-bound with safe peeling.
//!
//! Each node runs the coordinate-descent relaxation with a per-sweep hook
//! that evaluates the dual bound (stopping early once the node is dominated)
//! and, when enabled, peels the node box. Children start from the parent's
//! final box, so tightening accumulates down the tree.

use std::ops::ControlFlow;
use std::time::{Duration, Instant};

use crate::dual::dual_value;
use crate::instance::{BoxBounds, ProblemInstance};
use crate::linalg::least_squares;
use crate::peel::{peel_all, PeelEvent};
use crate::relax::{solve_relaxation, Fixing, NodePartition, RelaxSettings};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchRule {
    /// Free coordinate with the largest `|x̂_j|`, ties to the smallest index.
    #[default]
    LargestMagnitude,
    /// Smallest free index.
    SmallestIndex,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub peeling: bool,
    pub relax: RelaxSettings,
    /// A node is pruned when its lower bound exceeds `p̄ + eps_prune`.
    pub eps_prune: f64,
    /// Added to the peeling threshold `ᾱ`.
    pub eps_alpha: f64,
    /// Relaxed entries above this magnitude enter the incumbent support.
    pub supp_tol: f64,
    pub max_nodes: Option<usize>,
    pub time_limit: Option<Duration>,
    pub branching: BranchRule,
    /// Keep a [`NodeRecord`] for every explored node.
    pub record_trace: bool,
    /// Keep every fired [`PeelEvent`].
    pub record_peels: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            peeling: true,
            relax: RelaxSettings::default(),
            eps_prune: 1e-10,
            eps_alpha: 1e-16,
            supp_tol: 1e-8,
            max_nodes: None,
            time_limit: None,
            branching: BranchRule::default(),
            record_trace: false,
            record_peels: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BnbNode {
    pub id: usize,
    pub partition: NodePartition,
    pub bounds: BoxBounds,
    pub warm_start: Vec<f64>,
    pub depth: usize,
    pub parent: Option<usize>,
}

impl BnbNode {
    pub fn root(root_bounds: BoxBounds) -> Self {
        let n = root_bounds.len();
        Self {
            id: 0,
            partition: NodePartition::root(n),
            bounds: root_bounds,
            warm_start: vec![0.0; n],
            depth: 0,
            parent: None,
        }
    }
}

/// Best point found so far and its objective `p̄`.
#[derive(Debug, Clone, PartialEq)]
pub struct Incumbent {
    pub x: Vec<f64>,
    pub value: f64,
}

impl Incumbent {
    /// `x = 0`, `p̄ = ½‖y‖²`.
    pub fn zero(inst: &ProblemInstance) -> Self {
        let x = vec![0.0; inst.n()];
        let value = inst.objective(&x);
        Self { x, value }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Optimal,
    BudgetExhausted,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::Optimal => "optimal",
            Termination::BudgetExhausted => "budget_exhausted",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeOutcome {
    Pruned,
    Leaf,
    Branched,
}

/// What happened at one explored node (kept when `record_trace` is set).
#[derive(Debug, Clone, PartialEq)]
pub struct NodeRecord {
    pub id: usize,
    pub parent: Option<usize>,
    pub depth: usize,
    pub partition: NodePartition,
    /// Box after peeling at this node.
    pub bounds: BoxBounds,
    pub lower_bound: f64,
    /// Incumbent value when the node was decided.
    pub p_bar: f64,
    pub outcome: NodeOutcome,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub x_star: Vec<f64>,
    pub p_star: f64,
    pub node_count: usize,
    pub peel_fire_count: usize,
    /// Coordinate-descent sweeps summed over all nodes.
    pub relax_sweeps: usize,
    pub wall_time: Duration,
    pub status: Termination,
    pub trace: Vec<NodeRecord>,
    /// `(node id, event)` pairs.
    pub peel_log: Vec<(usize, PeelEvent)>,
}

impl SolveReport {
    /// Whether `x_star` is certified optimal.
    pub fn valid(&self) -> bool {
        self.status == Termination::Optimal
    }

    /// Indices of the nonzero entries of `x_star`.
    pub fn support(&self) -> Vec<usize> {
        (0..self.x_star.len())
            .filter(|&j| self.x_star[j] != 0.0)
            .collect()
    }
}

/// `lower_bound > p_bar + eps_prune`. Ties never prune.
pub fn prune_test(lower_bound: f64, p_bar: f64, eps_prune: f64) -> bool {
    lower_bound > p_bar + eps_prune
}

fn branch_index(node: &BnbNode, x_hat: &[f64], rule: BranchRule) -> Option<usize> {
    let mut candidates = node
        .partition
        .free_set()
        .filter(|&j| !node.bounds.is_degenerate(j));
    match rule {
        BranchRule::SmallestIndex => candidates.next(),
        BranchRule::LargestMagnitude => {
            candidates.fold(None, |best: Option<usize>, j| match best {
                Some(b) if x_hat[b].abs() >= x_hat[j].abs() => Some(b),
                _ => Some(j),
            })
        }
    }
}

/// Split `node` on a free coordinate `j*`. The first child puts `j*` in S0
/// (box slot `[0, 0]`), the second in S1. Coordinates whose box has already
/// collapsed to `[0, 0]` are never branched on.
pub fn branch(
    node: &BnbNode,
    x_hat: &[f64],
    rule: BranchRule,
    ids: (usize, usize),
) -> Result<(BnbNode, BnbNode)> {
    let j = branch_index(node, x_hat, rule).ok_or(Error::NothingToBranch)?;

    let mut zero = BnbNode {
        id: ids.0,
        partition: node.partition.clone(),
        bounds: node.bounds.clone(),
        warm_start: x_hat.to_vec(),
        depth: node.depth + 1,
        parent: Some(node.id),
    };
    zero.partition.set(j, Fixing::Zero);
    zero.bounds.fix_zero(j);
    zero.warm_start[j] = 0.0;

    let mut one = BnbNode {
        id: ids.1,
        partition: node.partition.clone(),
        bounds: node.bounds.clone(),
        warm_start: x_hat.to_vec(),
        depth: node.depth + 1,
        parent: Some(node.id),
    };
    one.partition.set(j, Fixing::One);
    Ok((zero, one))
}

/// Round `x_hat` to a support (S1 plus entries above `supp_tol`), fit least
/// squares on it inside `bounds`, and keep the result if it beats the
/// incumbent. Returns whether the incumbent changed.
pub fn update_incumbent(
    x_hat: &[f64],
    node: &NodePartition,
    bounds: &BoxBounds,
    inst: &ProblemInstance,
    incumbent: &mut Incumbent,
    supp_tol: f64,
) -> bool {
    let n = inst.n();
    let support: Vec<usize> = (0..n)
        .filter(|&j| node.status(j) != Fixing::Zero && !bounds.is_degenerate(j))
        .filter(|&j| node.status(j) == Fixing::One || x_hat[j].abs() > supp_tol)
        .collect();
    let candidate = box_least_squares(inst, bounds, &support);
    let value = inst.objective(&candidate);
    if value < incumbent.value {
        incumbent.x = candidate;
        incumbent.value = value;
        true
    } else {
        false
    }
}

/// `argmin ½‖y − Ax‖²` over `x` supported on `support` inside `bounds`.
fn box_least_squares(inst: &ProblemInstance, bounds: &BoxBounds, support: &[usize]) -> Vec<f64> {
    let n = inst.n();
    let mut x = vec![0.0; n];
    let coef = least_squares(inst.a(), inst.y(), support);
    for (&j, &c) in support.iter().zip(&coef) {
        x[j] = c;
    }
    if bounds.contains_point(&x) {
        return x;
    }
    // active constraints: fall back to coordinate descent on the support
    let zero: Vec<usize> = (0..n).filter(|j| !support.contains(j)).collect();
    let part = NodePartition::from_sets(n, &zero, support).expect("disjoint by construction");
    bounds.project(&mut x);
    let settings = RelaxSettings {
        tol: 1e-13,
        max_iter: 100_000,
    };
    let mut b = bounds.clone();
    solve_relaxation(&part, &mut b, inst, &settings, Some(&x), None).x_hat
}

/// Exact minimization of `½‖y − Ax‖² + λ‖x‖₀` over `root_bounds`.
///
/// `root_bounds` must contain every minimizer of the unconstrained problem
/// for the result to be its optimum (see
/// [`calibrate_big_m`](crate::instance::calibrate_big_m)).
pub fn solve(
    inst: &ProblemInstance,
    root_bounds: &BoxBounds,
    config: &SolverConfig,
) -> Result<SolveReport> {
    let n = inst.n();
    if root_bounds.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "root box has length {} but n = {n}",
            root_bounds.len()
        )));
    }
    let start = Instant::now();
    let lambda = inst.lambda();
    let mut incumbent = Incumbent::zero(inst);
    let mut stack = vec![BnbNode::root(root_bounds.clone())];
    let mut next_id = 1;
    let mut node_count = 0;
    let mut peel_fire_count = 0;
    let mut relax_sweeps = 0;
    let mut trace = Vec::new();
    let mut peel_log = Vec::new();
    let mut status = Termination::Optimal;

    while let Some(node) = stack.pop() {
        let over_nodes = config.max_nodes.is_some_and(|cap| node_count >= cap);
        let over_time = config.time_limit.is_some_and(|t| start.elapsed() >= t);
        if over_nodes || over_time {
            status = Termination::BudgetExhausted;
            break;
        }
        node_count += 1;

        let p_bar = incumbent.value;
        let mut bounds = node.bounds.clone();
        let partition = &node.partition;
        let mut fired_here = 0;
        let mut hook = |w: &[f64], corr: &[f64], b: &mut BoxBounds| {
            let d = dual_value(w, corr, partition, b, inst);
            if prune_test(d, p_bar, config.eps_prune) {
                return ControlFlow::Break(());
            }
            if config.peeling {
                let out = peel_all(partition, corr, d, p_bar, b, lambda, config.eps_alpha);
                if out.fired() > 0 {
                    fired_here += out.fired();
                    if config.record_peels {
                        peel_log.extend(out.events.iter().map(|e| (node.id, *e)));
                    }
                    *b = out.bounds;
                }
            }
            ControlFlow::Continue(())
        };
        let res = solve_relaxation(
            partition,
            &mut bounds,
            inst,
            &config.relax,
            Some(&node.warm_start),
            Some(&mut hook),
        );
        peel_fire_count += fired_here;
        relax_sweeps += res.iterations;
        debug_assert!(bounds.is_subset_of(&node.bounds));

        let lower = dual_value(&res.w, &res.corr, partition, &bounds, inst);
        if !res.interrupted {
            update_incumbent(
                &res.x_hat,
                partition,
                root_bounds,
                inst,
                &mut incumbent,
                config.supp_tol,
            );
        }

        let outcome = if prune_test(lower, incumbent.value, config.eps_prune) {
            NodeOutcome::Pruned
        } else {
            let decided = BnbNode {
                bounds: bounds.clone(),
                ..node.clone()
            };
            match branch(
                &decided,
                &res.x_hat,
                config.branching,
                (next_id, next_id + 1),
            ) {
                Ok((zero, one)) => {
                    next_id += 2;
                    // S1 child on top: explored first
                    stack.push(zero);
                    stack.push(one);
                    NodeOutcome::Branched
                }
                Err(Error::NothingToBranch) => NodeOutcome::Leaf,
                Err(e) => return Err(e),
            }
        };

        if config.record_trace {
            trace.push(NodeRecord {
                id: node.id,
                parent: node.parent,
                depth: node.depth,
                partition: node.partition.clone(),
                bounds,
                lower_bound: lower,
                p_bar: incumbent.value,
                outcome,
            });
        }
    }

    Ok(SolveReport {
        p_star: incumbent.value,
        x_star: incumbent.x,
        node_count,
        peel_fire_count,
        relax_sweeps,
        wall_time: start.elapsed(),
        status,
        trace,
        peel_log,
    })
}
