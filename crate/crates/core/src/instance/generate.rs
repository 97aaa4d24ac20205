use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::ProblemInstance;
use crate::bnb::SolverConfig;
use crate::linalg::sq_norm;
use crate::{Error, Result};

/// Planted signal behind a synthetic instance.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub x_dagger: Vec<f64>,
    /// Sorted, 0-based.
    pub support: Vec<usize>,
    pub sigma: f64,
    /// Set once an observation has been drawn for this signal.
    pub snr_db: Option<f64>,
}

/// How λ is picked for a generated instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaRule {
    Fixed(f64),
    /// `ratio · λ_max` with `λ_max` from [`ProblemInstance::lambda_max`].
    RatioOfMax(f64),
}

impl LambdaRule {
    pub fn resolve(&self, y: &[f64], a: &DMatrix<f64>) -> Result<f64> {
        match *self {
            LambdaRule::Fixed(l) => Ok(l),
            LambdaRule::RatioOfMax(r) => {
                if !(r > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "lambda ratio must be positive, got {r}"
                    )));
                }
                // a dummy λ only to reuse the λ_max computation
                let probe = ProblemInstance::new(y.to_vec(), a.clone(), 1.0)?;
                let lmax = probe.lambda_max();
                if lmax > 0.0 {
                    Ok(r * lmax)
                } else {
                    // y ⟂ every column: any positive λ gives x* = 0
                    Ok(r)
                }
            }
        }
    }
}

/// Parameters of one synthetic experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    /// Correlation of the dictionary rows, `K_ij = ρ^|i−j|`.
    pub rho: f64,
    pub snr_db: f64,
    pub sigma: f64,
    /// Big-M slack factor, `M = γ‖x*‖∞`.
    pub gamma: f64,
    pub seed: u64,
    pub lambda: LambdaRule,
    pub solver: SolverConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            m: 30,
            n: 40,
            k: 3,
            rho: 0.1,
            snr_db: 15.0,
            sigma: 1.0,
            gamma: 3.0,
            seed: 0,
            lambda: LambdaRule::RatioOfMax(0.05),
            solver: SolverConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 || self.k == 0 {
            return Err(Error::InvalidParameter(
                "m, n and k must be positive".into(),
            ));
        }
        if self.k > self.n {
            return Err(Error::InvalidParameter(format!(
                "k = {} exceeds n = {}",
                self.k, self.n
            )));
        }
        if !(self.gamma >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be ≥ 1, got {}",
                self.gamma
            )));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return Err(Error::InvalidParameter(format!(
                "rho must lie in [0, 1), got {}",
                self.rho
            )));
        }
        if !(self.sigma >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be ≥ 0, got {}",
                self.sigma
            )));
        }
        Ok(())
    }
}

/// Draw an `m×n` dictionary whose rows are i.i.d. `N(0, K)` with
/// `K_ij = ρ^|i−j|`, by applying the Cholesky factor of `K` to standard normals.
pub fn generate_dictionary<R: Rng + ?Sized>(
    m: usize,
    n: usize,
    rho: f64,
    rng: &mut R,
) -> Result<DMatrix<f64>> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidParameter(format!(
            "rho must lie in [0, 1), got {rho}"
        )));
    }
    let mut z = DMatrix::<f64>::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            z[(i, j)] = rng.sample(StandardNormal);
        }
    }
    if rho == 0.0 {
        return Ok(z);
    }
    let k = DMatrix::from_fn(n, n, |i, j| rho.powi(i.abs_diff(j) as i32));
    let chol = k.cholesky().ok_or_else(|| {
        Error::InvalidParameter(format!(
            "covariance for rho = {rho} is not positive definite"
        ))
    })?;
    // row_i ← L z_i, i.e. A = Z Lᵀ
    Ok(z * chol.l().transpose())
}

/// Planted `k`-sparse vector with support `{0, s, 2s, …}`, `s = ⌊n/k⌋`, and
/// entries `sign(r) + r`, `r ~ N(0, σ²)`, `sign(0) = +1`.
pub fn generate_ground_truth<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    sigma: f64,
    rng: &mut R,
) -> Result<GroundTruth> {
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "support size k = {k} must lie in [1, n = {n}]"
        )));
    }
    if !(sigma >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sigma must be ≥ 0, got {sigma}"
        )));
    }
    let step = n / k;
    let support: Vec<usize> = (0..k).map(|t| t * step).collect();
    let mut x_dagger = vec![0.0; n];
    for &j in &support {
        let z: f64 = rng.sample(StandardNormal);
        let r = sigma * z;
        let sign = if r < 0.0 { -1.0 } else { 1.0 };
        x_dagger[j] = sign + r;
    }
    Ok(GroundTruth {
        x_dagger,
        support,
        sigma,
        snr_db: None,
    })
}

/// `y = A x† + ε`, with white Gaussian `ε` rescaled so that the realized
/// `10·log10(‖Ax†‖²/‖ε‖²)` equals `snr_db`. `snr_db = +∞` gives `y = Ax†`.
pub fn generate_observation<R: Rng + ?Sized>(
    a: &DMatrix<f64>,
    x_dagger: &[f64],
    snr_db: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if x_dagger.len() != a.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "x has length {} but A has {} columns",
            x_dagger.len(),
            a.ncols()
        )));
    }
    if snr_db.is_nan() || snr_db == f64::NEG_INFINITY {
        return Err(Error::InvalidParameter(format!("invalid SNR {snr_db}")));
    }
    let signal = a * nalgebra::DVector::from_column_slice(x_dagger);
    let mut y = signal.as_slice().to_vec();
    if snr_db == f64::INFINITY {
        return Ok(y);
    }
    let signal_energy = sq_norm(&y);
    if signal_energy == 0.0 {
        return Err(Error::ZeroSignal);
    }
    let noise: Vec<f64> = (0..a.nrows()).map(|_| rng.sample(StandardNormal)).collect();
    let noise_energy = sq_norm(&noise);
    let scale = (signal_energy / noise_energy / 10f64.powf(snr_db / 10.0)).sqrt();
    for (yi, e) in y.iter_mut().zip(&noise) {
        *yi += scale * e;
    }
    Ok(y)
}

/// Build a full synthetic instance from `config`. All randomness is drawn
/// from a ChaCha8 stream seeded with `config.seed`, in the order
/// dictionary, planted signal, noise.
pub fn generate_instance(config: &ExperimentConfig) -> Result<(ProblemInstance, GroundTruth)> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let a = generate_dictionary(config.m, config.n, config.rho, &mut rng)?;
    let mut truth = generate_ground_truth(config.n, config.k, config.sigma, &mut rng)?;
    let y = generate_observation(&a, &truth.x_dagger, config.snr_db, &mut rng)?;
    truth.snr_db = Some(config.snr_db);
    let lambda = config.lambda.resolve(&y, &a)?;
    Ok((ProblemInstance::new(y, a, lambda)?, truth))
}

/// `count` log-spaced values from `lambda_max` down to `lambda_max · min_ratio`.
pub fn lambda_grid(lambda_max: f64, count: usize, min_ratio: f64) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lambda_max],
        _ => {
            let log_step = min_ratio.ln() / (count - 1) as f64;
            (0..count)
                .map(|i| lambda_max * (log_step * i as f64).exp())
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn rho_outside_unit_interval_rejected() {
        assert!(generate_dictionary(3, 3, 1.0, &mut rng(0)).is_err());
        assert!(generate_dictionary(3, 3, -0.1, &mut rng(0)).is_err());
    }

    #[test]
    fn support_is_evenly_spaced() {
        let t = generate_ground_truth(150, 5, 1.0, &mut rng(1)).unwrap();
        assert_eq!(t.support, vec![0, 30, 60, 90, 120]);
        for j in 0..150 {
            assert_eq!(t.x_dagger[j] != 0.0, t.support.contains(&j));
        }
    }

    #[test]
    fn zero_sigma_gives_unit_entries() {
        let t = generate_ground_truth(10, 3, 0.0, &mut rng(2)).unwrap();
        for &j in &t.support {
            assert_eq!(t.x_dagger[j], 1.0);
        }
    }

    #[test]
    fn nonzero_entries_have_magnitude_at_least_one() {
        let t = generate_ground_truth(50, 50, 2.0, &mut rng(3)).unwrap();
        assert!(t.x_dagger.iter().all(|v| v.abs() >= 1.0));
    }

    #[test]
    fn k_larger_than_n_rejected() {
        assert!(generate_ground_truth(4, 5, 1.0, &mut rng(0)).is_err());
        assert!(generate_ground_truth(4, 0, 1.0, &mut rng(0)).is_err());
    }

    #[test]
    fn infinite_snr_is_noiseless() {
        let mut r = rng(4);
        let a = generate_dictionary(6, 4, 0.2, &mut r).unwrap();
        let x = [1.0, 0.0, -2.0, 0.0];
        let y = generate_observation(&a, &x, f64::INFINITY, &mut r).unwrap();
        let s = &a * nalgebra::DVector::from_column_slice(&x);
        assert_eq!(y, s.as_slice());
    }

    #[test]
    fn realized_snr_is_exact() {
        let mut r = rng(5);
        let a = generate_dictionary(20, 8, 0.1, &mut r).unwrap();
        let x = [1.0, 0.0, 0.0, -1.5, 0.0, 0.0, 2.0, 0.0];
        let s = &a * nalgebra::DVector::from_column_slice(&x);
        for snr in [0.0, 15.0, -3.0, 40.0] {
            let y = generate_observation(&a, &x, snr, &mut r).unwrap();
            let noise: Vec<f64> = y.iter().zip(s.iter()).map(|(a, b)| a - b).collect();
            let realized = 10.0 * (s.norm_squared() / sq_norm(&noise)).log10();
            assert!((realized - snr).abs() < 1e-10, "{realized} vs {snr}");
        }
    }

    #[test]
    fn zero_signal_with_finite_snr_is_an_error() {
        let a = DMatrix::zeros(3, 2);
        assert!(matches!(
            generate_observation(&a, &[1.0, 1.0], 10.0, &mut rng(0)),
            Err(Error::ZeroSignal)
        ));
    }

    #[test]
    fn lambda_grid_is_log_spaced() {
        let g = lambda_grid(10.0, 5, 1e-2);
        assert_eq!(g.len(), 5);
        assert!((g[0] - 10.0).abs() < 1e-12);
        assert!((g[4] - 0.1).abs() < 1e-12);
        for w in g.windows(3) {
            assert!(((w[0] / w[1]) - (w[1] / w[2])).abs() < 1e-12);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = ExperimentConfig {
            m: 10,
            n: 12,
            k: 2,
            seed: 99,
            ..Default::default()
        };
        let (a, ta) = generate_instance(&cfg).unwrap();
        let (b, tb) = generate_instance(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(ta, tb);
    }
}
