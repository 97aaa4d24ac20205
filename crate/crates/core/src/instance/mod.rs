//! Problem data, synthetic instances, Big-M calibration and the text file format.

mod calibrate;
mod generate;
mod io;

pub use calibrate::{
    calibrate_big_m, calibrate_big_m_with_margin, default_m0, Calibration, DEFAULT_MARGIN,
};
pub use generate::{
    generate_dictionary, generate_ground_truth, generate_instance, generate_observation,
    lambda_grid, ExperimentConfig, GroundTruth, LambdaRule,
};
pub use io::{load_instance, save_instance};

use nalgebra::DMatrix;

use crate::linalg::{column, dot, sq_norm};
use crate::{Error, Result};

/// Data `(y, A, λ)` of an l0-regularized least-squares problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    y: Vec<f64>,
    a: DMatrix<f64>,
    lambda: f64,
    col_sq_norms: Vec<f64>,
}

impl ProblemInstance {
    pub fn new(y: Vec<f64>, a: DMatrix<f64>, lambda: f64) -> Result<Self> {
        let (m, n) = a.shape();
        if m == 0 || n == 0 {
            return Err(Error::InvalidParameter(format!(
                "dictionary must be non-empty, got {m}×{n}"
            )));
        }
        if y.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "y has length {} but A has {m} rows",
                y.len()
            )));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "lambda must be positive and finite, got {lambda}"
            )));
        }
        if y.iter().chain(a.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "y and A must contain only finite entries".into(),
            ));
        }
        let col_sq_norms = (0..n).map(|j| sq_norm(column(&a, j))).collect();
        Ok(Self {
            y,
            a,
            lambda,
            col_sq_norms,
        })
    }

    /// Same data with a different regularization weight.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.y.clone(), self.a.clone(), lambda)
    }

    pub fn m(&self) -> usize {
        self.a.nrows()
    }

    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn column(&self, j: usize) -> &[f64] {
        column(&self.a, j)
    }

    /// ‖a_j‖²
    pub fn col_sq_norm(&self, j: usize) -> f64 {
        self.col_sq_norms[j]
    }

    /// `y − Ax`
    pub fn residual(&self, x: &[f64]) -> Vec<f64> {
        let mut r = self.y.clone();
        for (j, &xj) in x.iter().enumerate() {
            if xj != 0.0 {
                crate::linalg::axpy(-xj, self.column(j), &mut r);
            }
        }
        r
    }

    /// `Aᵀw`
    pub fn correlations(&self, w: &[f64]) -> Vec<f64> {
        (0..self.n()).map(|j| dot(self.column(j), w)).collect()
    }

    /// ½‖y − Ax‖² + λ‖x‖₀, counting exact nonzeros.
    pub fn objective(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.n(), "x must have length n");
        let nnz = x.iter().filter(|v| **v != 0.0).count();
        0.5 * sq_norm(&self.residual(x)) + self.lambda * nnz as f64
    }

    /// Smallest λ at which no single coordinate improves on `x = 0`:
    /// `max_j (a_jᵀy)² / (2‖a_j‖²)`.
    pub fn lambda_max(&self) -> f64 {
        (0..self.n())
            .filter(|&j| self.col_sq_norms[j] > 0.0)
            .map(|j| {
                let c = dot(self.column(j), &self.y);
                c * c / (2.0 * self.col_sq_norms[j])
            })
            .fold(0.0, f64::max)
    }
}

/// Componentwise interval `[l, u]` with `l ≤ 0 ≤ u`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxBounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxBounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch(format!(
                "lower has length {} but upper has {}",
                lower.len(),
                upper.len()
            )));
        }
        for (j, (&l, &u)) in lower.iter().zip(&upper).enumerate() {
            if !(l <= 0.0 && u >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "bounds must satisfy l ≤ 0 ≤ u, got [{l}, {u}] at index {j}"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The Big-M box `[−M·1, M·1]`.
    pub fn big_m(n: usize, m: f64) -> Result<Self> {
        if !(m >= 0.0) {
            return Err(Error::InvalidParameter(format!("M must be ≥ 0, got {m}")));
        }
        Ok(Self {
            lower: vec![-m; n],
            upper: vec![m; n],
        })
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn lower_at(&self, j: usize) -> f64 {
        self.lower[j]
    }

    pub fn upper_at(&self, j: usize) -> f64 {
        self.upper[j]
    }

    /// Lower the upper bound of `j`. The new value must stay in `[0, u_j]`.
    pub fn tighten_upper(&mut self, j: usize, u: f64) {
        assert!(
            (0.0..=self.upper[j]).contains(&u),
            "upper bound of {j} can only shrink within [0, {}], got {u}",
            self.upper[j]
        );
        self.upper[j] = u;
    }

    /// Raise the lower bound of `j`. The new value must stay in `[l_j, 0]`.
    pub fn tighten_lower(&mut self, j: usize, l: f64) {
        assert!(
            (self.lower[j]..=0.0).contains(&l),
            "lower bound of {j} can only shrink within [{}, 0], got {l}",
            self.lower[j]
        );
        self.lower[j] = l;
    }

    /// Pin coordinate `j` to zero.
    pub fn fix_zero(&mut self, j: usize) {
        self.lower[j] = 0.0;
        self.upper[j] = 0.0;
    }

    /// `l_j = u_j = 0`
    pub fn is_degenerate(&self, j: usize) -> bool {
        self.lower[j] == 0.0 && self.upper[j] == 0.0
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        x.len() == self.len()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| *l <= *v && *v <= *u)
    }

    /// True when `self ⊆ other` componentwise.
    pub fn is_subset_of(&self, other: &BoxBounds) -> bool {
        self.len() == other.len()
            && (0..self.len())
                .all(|j| self.lower[j] >= other.lower[j] && self.upper[j] <= other.upper[j])
    }

    /// Componentwise intersection `[max(l, l'), min(u, u')]`.
    pub fn intersect(&self, other: &BoxBounds) -> BoxBounds {
        assert_eq!(self.len(), other.len());
        BoxBounds {
            lower: self
                .lower
                .iter()
                .zip(&other.lower)
                .map(|(a, b)| a.max(*b))
                .collect(),
            upper: self
                .upper
                .iter()
                .zip(&other.upper)
                .map(|(a, b)| a.min(*b))
                .collect(),
        }
    }

    /// Clip `x` into the box in place. Returns the largest absolute change.
    pub fn project(&self, x: &mut [f64]) -> f64 {
        let mut delta = 0.0_f64;
        for (j, v) in x.iter_mut().enumerate() {
            let c = v.clamp(self.lower[j], self.upper[j]);
            delta = delta.max((c - *v).abs());
            *v = c;
        }
        delta
    }
}
