//! Fenchel-dual lower bounds for node relaxations.
//!
//! For any `w ∈ Rᵐ`,
//!
//! ```text
//! D(w) = ½‖y‖² − ½‖y − w‖² + λ|S1| − Σ_{i∈S1} π_{0,i}(a_iᵀw) − Σ_{i∈S̄} π_{λ,i}(a_iᵀw)
//! π_{ρ,i}(v) = [u_i v − ρ]₊ + [l_i v − ρ]₊
//! ```
//!
//! is a lower bound on the relaxed node value, hence on the node value itself.

use crate::instance::{BoxBounds, ProblemInstance};
use crate::linalg::{pos, sq_norm};
use crate::relax::{Fixing, NodePartition};

/// `[u v − ρ]₊ + [l v − ρ]₊`
#[inline]
pub fn pivot(rho: f64, lower: f64, upper: f64, v: f64) -> f64 {
    pos(upper * v - rho) + pos(lower * v - rho)
}

/// Conjugate of `x ↦ b + 1{x ∈ [l, u]}`: `u[v]₊ − l[−v]₊ − b`.
#[inline]
pub fn conjugate_box_const(b: f64, lower: f64, upper: f64, v: f64) -> f64 {
    upper * pos(v) - lower * pos(-v) - b
}

/// Conjugate of `x ↦ 1{x ∈ [l, u]} + (a/u)[x]₊ − (a/l)[−x]₊` (with `0/0 = 0`):
/// `[u v − a]₊ + [l v − a]₊`.
#[inline]
pub fn conjugate_box_linear(a: f64, lower: f64, upper: f64, v: f64) -> f64 {
    pos(upper * v - a) + pos(lower * v - a)
}

/// Dual point, the dual objective at it, and the correlations `Aᵀw`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualEvaluation {
    pub w: Vec<f64>,
    pub value: f64,
    pub corr: Vec<f64>,
}

/// `D(w)` given precomputed correlations `corr = Aᵀw`. O(n + m).
pub fn dual_value(
    w: &[f64],
    corr: &[f64],
    node: &NodePartition,
    bounds: &BoxBounds,
    inst: &ProblemInstance,
) -> f64 {
    debug_assert_eq!(corr.len(), inst.n());
    let lambda = inst.lambda();
    let y = inst.y();
    let y_minus_w: f64 = y.iter().zip(w).map(|(a, b)| (a - b) * (a - b)).sum();
    let mut value = 0.5 * sq_norm(y) - 0.5 * y_minus_w;
    for (j, &v) in corr.iter().enumerate() {
        let (l, u) = (bounds.lower_at(j), bounds.upper_at(j));
        match node.status(j) {
            Fixing::Zero => {}
            Fixing::One => value += lambda - pivot(0.0, l, u, v),
            Fixing::Free => value -= pivot(lambda, l, u, v),
        }
    }
    value
}

/// Evaluate `D(w)`, computing `Aᵀw` when `corr` is not supplied.
pub fn dual_objective(
    w: &[f64],
    corr: Option<&[f64]>,
    node: &NodePartition,
    bounds: &BoxBounds,
    inst: &ProblemInstance,
) -> DualEvaluation {
    assert_eq!(w.len(), inst.m(), "w must have length m");
    let corr = match corr {
        Some(c) => c.to_vec(),
        None => inst.correlations(w),
    };
    let value = dual_value(w, &corr, node, bounds, inst);
    DualEvaluation {
        w: w.to_vec(),
        value,
        corr,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    #[test]
    fn pivot_examples() {
        assert_eq!(pivot(0.7, -1.0, 2.0, 0.0), 0.0);
        assert_eq!(pivot(0.5, -1.0, 2.0, 1.0), 1.5);
        assert_eq!(pivot(0.0, -1.0, 2.0, -1.0), 1.0);
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(conjugate_box_const(0.4, -1.0, 2.0, 0.0), -0.4);
        for v in [-3.0, 0.0, 2.5] {
            assert_eq!(conjugate_box_const(0.3, 0.0, 0.0, v), -0.3);
            assert_eq!(conjugate_box_const(0.0, 0.0, 0.0, v), 0.0);
            assert_eq!(conjugate_box_linear(0.7, 0.0, 0.0, v), 0.0);
        }
        assert_eq!(conjugate_box_linear(0.7, -2.0, 1.0, 0.0), 0.0);
    }

    fn inst() -> ProblemInstance {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, -0.5, 0.3, 0.2, 0.8, -1.0]);
        ProblemInstance::new(vec![0.9, -1.3], a, 0.5).unwrap()
    }

    #[test]
    fn zero_dual_point_gives_lambda_s1() {
        let inst = inst();
        let node = NodePartition::from_sets(3, &[], &[0, 2]).unwrap();
        let b = BoxBounds::big_m(3, 1.5).unwrap();
        let d = dual_objective(&[0.0, 0.0], None, &node, &b, &inst);
        assert_eq!(d.value, 1.0);
    }

    #[test]
    fn fully_fixed_node_has_no_gap_at_y() {
        let inst = inst();
        let node = NodePartition::from_sets(3, &[0, 1, 2], &[]).unwrap();
        let b = BoxBounds::big_m(3, 1.5).unwrap();
        let d = dual_objective(inst.y(), None, &node, &b, &inst);
        assert_eq!(d.value, 0.5 * sq_norm(inst.y()));
    }

    #[test]
    fn precomputed_corr_is_bitwise_identical() {
        let inst = inst();
        let node = NodePartition::from_sets(3, &[1], &[0]).unwrap();
        let b = BoxBounds::new(vec![-1.0, -2.0, -0.5], vec![2.0, 1.0, 0.7]).unwrap();
        let w = [0.3, -0.8];
        let corr = inst.correlations(&w);
        let with = dual_objective(&w, Some(&corr), &node, &b, &inst);
        let without = dual_objective(&w, None, &node, &b, &inst);
        assert_eq!(with.value.to_bits(), without.value.to_bits());
    }
}
