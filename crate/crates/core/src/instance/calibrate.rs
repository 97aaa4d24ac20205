use super::{BoxBounds, ProblemInstance};
use crate::bnb::{solve, SolverConfig, Termination};
use crate::linalg::dot;
use crate::{Error, Result};

const MAX_ROUNDS: usize = 500;

#[derive(Debug, Clone)]
pub struct Calibration {
    /// `γ‖x*‖∞`
    pub big_m: f64,
    pub x_star: Vec<f64>,
    pub p_star: f64,
    /// Box half-width of the last round, the one whose solution cleared the margin.
    pub last_box: f64,
    pub rounds: usize,
}

impl Calibration {
    pub fn bounds(&self, n: usize) -> BoxBounds {
        BoxBounds::big_m(n, self.big_m).expect("big_m is non-negative")
    }
}

/// Largest single-coordinate least-squares coefficient, `max_j |a_jᵀy| / ‖a_j‖²`.
/// A convenient starting half-width for [`calibrate_big_m`].
pub fn default_m0(inst: &ProblemInstance) -> f64 {
    let m0 = (0..inst.n())
        .filter(|&j| inst.col_sq_norm(j) > 0.0)
        .map(|j| dot(inst.column(j), inst.y()).abs() / inst.col_sq_norm(j))
        .fold(0.0, f64::max);
    if m0 > 0.0 {
        m0
    } else {
        1.0
    }
}

/// Stopping margin used by [`calibrate_big_m`].
pub const DEFAULT_MARGIN: f64 = 2.0;

/// Solve the problem under the boxes `[−M, M]` for `M = M0, ηM0, η²M0, …`
/// until the box optimum satisfies `‖x*‖∞ < M / 2`, then return `M = γ‖x*‖∞`.
///
/// Interior box optima need not be global ones; the margin makes it less
/// likely to stop at a local one. See [`calibrate_big_m_with_margin`].
pub fn calibrate_big_m(
    inst: &ProblemInstance,
    gamma: f64,
    eta: f64,
    m0: f64,
    solver: &SolverConfig,
) -> Result<Calibration> {
    calibrate_big_m_with_margin(inst, gamma, eta, m0, DEFAULT_MARGIN, solver)
}

/// As [`calibrate_big_m`], stopping once `‖x*‖∞ < M / margin`.
/// `margin = 1` is the plain strict-interiority rule.
pub fn calibrate_big_m_with_margin(
    inst: &ProblemInstance,
    gamma: f64,
    eta: f64,
    m0: f64,
    margin: f64,
    solver: &SolverConfig,
) -> Result<Calibration> {
    if !(margin >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "margin must be ≥ 1, got {margin}"
        )));
    }
    if !(gamma >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "gamma must be ≥ 1, got {gamma}"
        )));
    }
    if !(eta > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eta must be > 1, got {eta}"
        )));
    }
    if !(m0 > 0.0) || !m0.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "M0 must be positive, got {m0}"
        )));
    }
    let mut half_width = m0;
    let mut last_norm = f64::NAN;
    for round in 1..=MAX_ROUNDS {
        let bounds = BoxBounds::big_m(inst.n(), half_width)?;
        let report = solve(inst, &bounds, solver)?;
        if report.status != Termination::Optimal {
            return Err(Error::CalibrationFailed {
                iterations: round,
                last_m: half_width,
                last_norm: f64::NAN,
            });
        }
        let norm = report
            .x_star
            .iter()
            .fold(0.0_f64, |acc, v| acc.max(v.abs()));
        if norm * margin < half_width {
            return Ok(Calibration {
                big_m: gamma * norm,
                x_star: report.x_star,
                p_star: report.p_star,
                last_box: half_width,
                rounds: round,
            });
        }
        last_norm = norm;
        half_width *= eta;
    }
    Err(Error::CalibrationFailed {
        iterations: MAX_ROUNDS,
        last_m: half_width / eta,
        last_norm,
    })
}
