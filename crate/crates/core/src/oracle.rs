//! Brute-force reference solvers. Exponential in `n`; meant for checking the
//! tree search and the peeling certificates on small problems.

use nalgebra::{DMatrix, DVector};

use crate::instance::{BoxBounds, ProblemInstance};
use crate::peel::Side;
use crate::relax::{Fixing, NodePartition};
use crate::{Error, Result};

const SUPPORT_BUDGET: u128 = 1_000_000;
/// `x_j > α` is enforced as `x_j ≥ α + STRICT_GAP`.
const STRICT_GAP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub x: Vec<f64>,
    pub value: f64,
    /// Nonzero entries of `x`.
    pub support: Vec<usize>,
    pub enumerated_count: usize,
    /// False when the infimum is only approached: the minimizer has a zero
    /// entry on S1, or the node is empty.
    pub attained: bool,
}

/// Extra constraint `x_j > α` (upper side) or `x_j < −α` (lower side).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfLine {
    pub j: usize,
    pub side: Side,
    pub alpha: f64,
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Advance `idx` to the next `k`-combination of `0..n` in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for pos in (0..k).rev() {
        if idx[pos] < n - k + pos {
            idx[pos] += 1;
            for q in pos + 1..k {
                idx[q] = idx[q - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn pinv_solve(sub: &DMatrix<f64>, rhs: &DVector<f64>) -> DVector<f64> {
    let (m, k) = sub.shape();
    let svd = sub.clone().svd(true, true);
    let cutoff = svd.singular_values.max() * (m.max(k) as f64) * f64::EPSILON;
    svd.pseudo_inverse(cutoff)
        .map(|p| p * rhs)
        .unwrap_or_else(|_| DVector::zeros(k))
}

fn nonzeros(x: &[f64]) -> Vec<usize> {
    (0..x.len()).filter(|&j| x[j] != 0.0).collect()
}

/// Global minimizer of `½‖y − Ax‖² + λ‖x‖₀` over supports of size at most
/// `max_support`, by least squares on every support. Ties go to the
/// lexicographically smallest support.
pub fn brute_force_global(inst: &ProblemInstance, max_support: usize) -> Result<OracleResult> {
    let n = inst.n();
    let max_support = max_support.min(n);
    let count: u128 = (0..=max_support).map(|s| binomial(n, s)).sum();
    if count > SUPPORT_BUDGET {
        return Err(Error::BudgetExceeded {
            count,
            budget: SUPPORT_BUDGET,
        });
    }
    let y = DVector::from_column_slice(inst.y());
    let mut best_x = vec![0.0; n];
    let mut best_value = inst.objective(&best_x);
    let mut best_support: Vec<usize> = Vec::new();
    let mut enumerated = 1;
    for size in 1..=max_support {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            enumerated += 1;
            let coef = pinv_solve(&inst.a().select_columns(&idx), &y);
            let mut x = vec![0.0; n];
            for (&j, c) in idx.iter().zip(coef.iter()) {
                x[j] = *c;
            }
            let value = inst.objective(&x);
            let supp = nonzeros(&x);
            if value < best_value || (value == best_value && supp < best_support) {
                best_value = value;
                best_x = x;
                best_support = supp;
            }
            if !next_combination(&mut idx, n) {
                break;
            }
        }
    }
    Ok(OracleResult {
        x: best_x,
        value: best_value,
        support: best_support,
        enumerated_count: enumerated,
        attained: true,
    })
}

/// Node value `inf { P(x) : x_{S0} = 0, x_{S1} ≠ 0, x ∈ [l, u] }`, optionally
/// with the extra half-line constraint, by box-constrained least squares on
/// every support `S1 ⊆ S ⊆ S1 ∪ S̄`.
pub fn brute_force_node(
    inst: &ProblemInstance,
    node: &NodePartition,
    bounds: &BoxBounds,
    extra: Option<HalfLine>,
) -> Result<OracleResult> {
    let n = inst.n();
    let ones: Vec<usize> = node.one_set().collect();
    let free: Vec<usize> = node.free_set().collect();
    if free.len() >= 64 || (1u128 << free.len()) > SUPPORT_BUDGET {
        return Err(Error::BudgetExceeded {
            count: 1u128 << free.len().min(127),
            budget: SUPPORT_BUDGET,
        });
    }
    let empty = OracleResult {
        x: vec![0.0; n],
        value: f64::INFINITY,
        support: Vec::new(),
        enumerated_count: 0,
        attained: false,
    };
    if ones.iter().any(|&j| bounds.is_degenerate(j)) {
        return Ok(empty);
    }

    let y = DVector::from_column_slice(inst.y());
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut enumerated = 0;
    for mask in 0u64..(1u64 << free.len()) {
        let mut support = ones.clone();
        support.extend(
            free.iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &j)| j),
        );
        support.sort_unstable();
        let mut lo: Vec<f64> = support.iter().map(|&j| bounds.lower_at(j)).collect();
        let mut hi: Vec<f64> = support.iter().map(|&j| bounds.upper_at(j)).collect();
        if let Some(h) = extra {
            let Some(pos) = support.iter().position(|&j| j == h.j) else {
                continue;
            };
            match h.side {
                Side::Upper => lo[pos] = lo[pos].max(h.alpha + STRICT_GAP),
                Side::Lower => hi[pos] = hi[pos].min(-h.alpha - STRICT_GAP),
            }
            if lo[pos] > hi[pos] {
                continue;
            }
        }
        enumerated += 1;
        let sub = inst.a().select_columns(&support);
        let coef = box_least_squares_pg(&sub, &y, &lo, &hi);
        let r = &y - &sub * DVector::from_column_slice(&coef);
        let value = 0.5 * r.norm_squared() + inst.lambda() * support.len() as f64;
        if best.as_ref().is_none_or(|(v, _)| value < *v) {
            let mut x = vec![0.0; n];
            for (&j, &c) in support.iter().zip(&coef) {
                x[j] = c;
            }
            best = Some((value, x));
        }
    }
    match best {
        None => Ok(OracleResult {
            enumerated_count: enumerated,
            ..empty
        }),
        Some((value, x)) => {
            let attained = (0..n)
                .filter(|&j| node.status(j) == Fixing::One)
                .all(|j| x[j] != 0.0);
            Ok(OracleResult {
                support: nonzeros(&x),
                x,
                value,
                enumerated_count: enumerated,
                attained,
            })
        }
    }
}

/// `argmin ½‖y − Bz‖²` over `lo ≤ z ≤ hi` by projected gradient with step
/// `1/L`, `L` from 20 power iterations on `BᵀB`. Every 50 steps the active
/// set is guessed from the iterate and solved exactly; the guess is accepted
/// when it is feasible and satisfies the KKT sign conditions.
fn box_least_squares_pg(b: &DMatrix<f64>, y: &DVector<f64>, lo: &[f64], hi: &[f64]) -> Vec<f64> {
    let k = b.ncols();
    if k == 0 {
        return Vec::new();
    }
    let inside = |z: &DVector<f64>| (0..k).all(|i| lo[i] <= z[i] && z[i] <= hi[i]);
    let unconstrained = pinv_solve(b, y);
    if inside(&unconstrained) {
        return unconstrained.as_slice().to_vec();
    }

    let gram = b.transpose() * b;
    let mut v = DVector::from_element(k, 1.0);
    let mut lip = 0.0;
    for _ in 0..20 {
        let gv = &gram * &v;
        let nrm = gv.norm();
        if nrm == 0.0 {
            break;
        }
        lip = nrm / v.norm();
        v = gv / nrm;
    }
    let lip = 1.1 * lip;
    let clamp = |z: &mut DVector<f64>| {
        for i in 0..k {
            z[i] = z[i].clamp(lo[i], hi[i]);
        }
    };
    let mut z = unconstrained;
    clamp(&mut z);
    if lip == 0.0 {
        return z.as_slice().to_vec();
    }
    let bty = b.transpose() * y;
    let kkt_tol = 1e-9 * (1.0 + bty.amax());

    for it in 1..=200_000 {
        let grad = &gram * &z - &bty;
        let mut next = &z - grad / lip;
        clamp(&mut next);
        let delta = (&next - &z).amax();
        z = next;
        if it % 50 == 0 || delta == 0.0 {
            if let Some(p) = polish(b, y, &z, lo, hi, &gram, &bty, kkt_tol) {
                return p;
            }
        }
        if delta <= 1e-16 * (1.0 + z.amax()) {
            break;
        }
    }
    z.as_slice().to_vec()
}

#[allow(clippy::too_many_arguments)]
fn polish(
    b: &DMatrix<f64>,
    y: &DVector<f64>,
    z: &DVector<f64>,
    lo: &[f64],
    hi: &[f64],
    gram: &DMatrix<f64>,
    bty: &DVector<f64>,
    kkt_tol: f64,
) -> Option<Vec<f64>> {
    let k = z.len();
    let free: Vec<usize> = (0..k).filter(|&i| z[i] != lo[i] && z[i] != hi[i]).collect();
    let mut cand = z.clone();
    if !free.is_empty() {
        let mut rhs = y.clone();
        for i in (0..k).filter(|i| !free.contains(i)) {
            rhs -= b.column(i) * z[i];
        }
        let coef = pinv_solve(&b.select_columns(&free), &rhs);
        for (&i, c) in free.iter().zip(coef.iter()) {
            cand[i] = *c;
        }
    }
    if !(0..k).all(|i| lo[i] <= cand[i] && cand[i] <= hi[i]) {
        return None;
    }
    let grad = gram * &cand - bty;
    for i in 0..k {
        let ok = if free.contains(&i) {
            grad[i].abs() <= kkt_tol
        } else if cand[i] == lo[i] && cand[i] == hi[i] {
            true
        } else if cand[i] == lo[i] {
            grad[i] >= -kkt_tol
        } else {
            grad[i] <= kkt_tol
        };
        if !ok {
            return None;
        }
    }
    Some(cand.as_slice().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_are_lexicographic() {
        let mut idx = vec![0, 1];
        let mut all = vec![idx.clone()];
        while next_combination(&mut idx, 4) {
            all.push(idx.clone());
        }
        assert_eq!(
            all,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(binomial(10, 3), 120);
        assert_eq!(binomial(4, 0), 1);
    }

    #[test]
    fn single_column_two_supports() {
        let a = DMatrix::from_column_slice(3, 1, &[1.0, 2.0, -1.0]);
        let y = vec![1.0, 1.0, 0.5];
        for lambda in [0.05, 0.4, 2.0] {
            let inst = ProblemInstance::new(y.clone(), a.clone(), lambda).unwrap();
            let c = (1.0 + 2.0 - 0.5) / 6.0;
            let fit: f64 = 0.5
                * [1.0 - c, 1.0 - 2.0 * c, 0.5 + c]
                    .iter()
                    .map(|v| v * v)
                    .sum::<f64>();
            let expected = (0.5 * 2.25_f64).min(fit + lambda);
            let res = brute_force_global(&inst, 1).unwrap();
            assert!((res.value - expected).abs() < 1e-14);
            assert_eq!(res.enumerated_count, 2);
        }
    }

    #[test]
    fn huge_lambda_selects_empty_support() {
        let a = DMatrix::from_fn(3, 4, |i, j| (i as f64 + 1.0) * (j as f64 - 1.5));
        let inst = ProblemInstance::new(vec![1.0, 0.0, -1.0], a, 10.0).unwrap();
        let res = brute_force_global(&inst, 4).unwrap();
        assert!(res.support.is_empty());
        assert_eq!(res.value, 1.0);
    }

    #[test]
    fn fully_fixed_node_is_zero() {
        let a = DMatrix::from_fn(3, 3, |i, j| (i * 3 + j) as f64);
        let inst = ProblemInstance::new(vec![1.0, 2.0, 3.0], a, 0.5).unwrap();
        let node = NodePartition::from_sets(3, &[0, 1, 2], &[]).unwrap();
        let res = brute_force_node(&inst, &node, &BoxBounds::big_m(3, 1.0).unwrap(), None).unwrap();
        assert_eq!(res.value, 7.0);
        assert_eq!(res.x, vec![0.0; 3]);
    }

    #[test]
    fn empty_slab_is_infeasible() {
        let a = DMatrix::from_fn(3, 3, |i, j| ((i + j) as f64).cos());
        let inst = ProblemInstance::new(vec![1.0, 2.0, 3.0], a, 0.5).unwrap();
        let extra = HalfLine {
            j: 1,
            side: Side::Upper,
            alpha: 1.0,
        };
        let res = brute_force_node(
            &inst,
            &NodePartition::root(3),
            &BoxBounds::big_m(3, 1.0).unwrap(),
            Some(extra),
        )
        .unwrap();
        assert_eq!(res.value, f64::INFINITY);
        assert!(!res.attained);
    }

    #[test]
    fn box_least_squares_matches_clipped_solution_on_orthogonal_columns() {
        let b = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 2.0, 0.0, 0.0]);
        let y = DVector::from_column_slice(&[3.0, -4.0, 1.0]);
        let z = box_least_squares_pg(&b, &y, &[-1.0, -1.5], &[1.0, 1.5]);
        assert_eq!(z, vec![1.0, -1.5]);
    }

    #[test]
    fn budget_guard() {
        let a = DMatrix::from_element(2, 40, 1.0);
        let inst = ProblemInstance::new(vec![1.0, 1.0], a, 1.0).unwrap();
        assert!(matches!(
            brute_force_global(&inst, 40),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
