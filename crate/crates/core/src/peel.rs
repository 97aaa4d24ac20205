//! Safe peeling of the node box.
//!
//! For a free coordinate `j` and any dual point `w`, every point of the node
//! with `x_j > α` has node objective at least
//!
//! ```text
//! D(w) + ψ_j(w) + α[−a_jᵀw]₊,    ψ_j = π_{λ,j}(a_jᵀw) − u_j[a_jᵀw]₊ + λ
//! ```
//!
//! so whenever this exceeds the incumbent value `p̄`, the slab `(α, u_j]` can
//! be cut from the box without changing any pruning decision. The lower side
//! is the mirror image under `x ↦ −x`:
//!
//! ```text
//! D(w) + ψ'_j(w) + α[a_jᵀw]₊,    ψ'_j = π_{λ,j}(a_jᵀw) + l_j[−a_jᵀw]₊ + λ
//! ```
//!
//! Cuts obtained for different coordinates from the same `(w, p̄)` are valid
//! simultaneously, so [`peel_all`] intersects them.

use crate::dual::pivot;
use crate::instance::BoxBounds;
use crate::linalg::pos;
use crate::relax::NodePartition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Upper,
    Lower,
}

impl Side {
    pub fn as_str(&self) -> &'static str {
        match self {
            Side::Upper => "upper",
            Side::Lower => "lower",
        }
    }
}

/// One fired peel with the numbers that justified it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeelEvent {
    pub j: usize,
    pub side: Side,
    pub corr: f64,
    pub dual_value: f64,
    pub psi: f64,
    pub p_bar: f64,
    pub old: f64,
    pub new: f64,
}

impl PeelEvent {
    /// `D + ψ + |new|·slope − p̄`, positive when the certificate holds.
    pub fn certificate_margin(&self) -> f64 {
        let slope = match self.side {
            Side::Upper => pos(-self.corr),
            Side::Lower => pos(self.corr),
        };
        let alpha = self.new.abs();
        let linear = if alpha == 0.0 { 0.0 } else { alpha * slope };
        self.dual_value + self.psi + linear - self.p_bar
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeelOutcome {
    pub bounds: BoxBounds,
    pub n_upper_peeled: usize,
    pub n_lower_peeled: usize,
    /// Free coordinates whose box collapsed to `[0, 0]`.
    pub implied_zero: Vec<usize>,
    pub events: Vec<PeelEvent>,
}

impl PeelOutcome {
    pub fn fired(&self) -> usize {
        self.n_upper_peeled + self.n_lower_peeled
    }
}

/// `π_{λ,j}(c) − u_j[c]₊ + λ`
pub fn psi_upper(j: usize, corr_j: f64, bounds: &BoxBounds, lambda: f64) -> f64 {
    let (l, u) = (bounds.lower_at(j), bounds.upper_at(j));
    pivot(lambda, l, u, corr_j) - u * pos(corr_j) + lambda
}

/// `π_{λ,j}(c) + l_j[−c]₊ + λ`
pub fn psi_lower(j: usize, corr_j: f64, bounds: &BoxBounds, lambda: f64) -> f64 {
    let (l, u) = (bounds.lower_at(j), bounds.upper_at(j));
    pivot(lambda, l, u, corr_j) + l * pos(-corr_j) + lambda
}

/// Smallest float `α` with `α ≥ threshold + eps` and `α > threshold`.
fn strictly_above(threshold: f64, eps: f64) -> f64 {
    let a = threshold + eps;
    if a > threshold {
        a
    } else {
        threshold.next_up()
    }
}

/// New upper bound for coordinate `j`, if the certificate fires. The result
/// lies in `[0, u_j)`.
pub fn peel_upper(
    j: usize,
    corr_j: f64,
    dual_value: f64,
    p_bar: f64,
    bounds: &BoxBounds,
    lambda: f64,
    eps_alpha: f64,
) -> Option<f64> {
    let u = bounds.upper_at(j);
    if u <= 0.0 {
        return None;
    }
    let base = dual_value + psi_upper(j, corr_j, bounds, lambda);
    if corr_j >= 0.0 {
        return (base > p_bar).then_some(0.0);
    }
    let alpha_bar = (p_bar - base) / -corr_j;
    if alpha_bar < 0.0 {
        return Some(0.0);
    }
    let alpha = strictly_above(alpha_bar, eps_alpha);
    (alpha < u).then_some(alpha)
}

/// New lower bound for coordinate `j`, if the certificate fires. The result
/// lies in `(l_j, 0]`.
pub fn peel_lower(
    j: usize,
    corr_j: f64,
    dual_value: f64,
    p_bar: f64,
    bounds: &BoxBounds,
    lambda: f64,
    eps_alpha: f64,
) -> Option<f64> {
    let l = bounds.lower_at(j);
    if l >= 0.0 {
        return None;
    }
    let base = dual_value + psi_lower(j, corr_j, bounds, lambda);
    if corr_j <= 0.0 {
        return (base > p_bar).then_some(0.0);
    }
    let alpha_bar = (p_bar - base) / corr_j;
    if alpha_bar < 0.0 {
        return Some(0.0);
    }
    let alpha = strictly_above(alpha_bar, eps_alpha);
    (alpha < -l).then_some(-alpha)
}

/// Apply both tests to every free coordinate with the same `(D, p̄)` and
/// intersect the results. O(n) given `corr = Aᵀw`.
pub fn peel_all(
    node: &NodePartition,
    corr: &[f64],
    dual_value: f64,
    p_bar: f64,
    bounds: &BoxBounds,
    lambda: f64,
    eps_alpha: f64,
) -> PeelOutcome {
    let mut out = bounds.clone();
    let mut events = Vec::new();
    let (mut n_upper, mut n_lower) = (0, 0);
    for j in node.free_set() {
        let c = corr[j];
        if let Some(u) = peel_upper(j, c, dual_value, p_bar, bounds, lambda, eps_alpha) {
            events.push(PeelEvent {
                j,
                side: Side::Upper,
                corr: c,
                dual_value,
                psi: psi_upper(j, c, bounds, lambda),
                p_bar,
                old: bounds.upper_at(j),
                new: u,
            });
            out.tighten_upper(j, u);
            n_upper += 1;
        }
        if let Some(l) = peel_lower(j, c, dual_value, p_bar, bounds, lambda, eps_alpha) {
            events.push(PeelEvent {
                j,
                side: Side::Lower,
                corr: c,
                dual_value,
                psi: psi_lower(j, c, bounds, lambda),
                p_bar,
                old: bounds.lower_at(j),
                new: l,
            });
            out.tighten_lower(j, l);
            n_lower += 1;
        }
    }
    debug_assert!(out.is_subset_of(bounds));
    let implied_zero = node.free_set().filter(|&j| out.is_degenerate(j)).collect();
    PeelOutcome {
        bounds: out,
        n_upper_peeled: n_upper,
        n_lower_peeled: n_lower,
        implied_zero,
        events,
    }
}
