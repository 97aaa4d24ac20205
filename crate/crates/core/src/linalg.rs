//! Small dense helpers shared by the solvers. Summation is always in
//! ascending index order so results are reproducible bit for bit.

use nalgebra::{DMatrix, DVector};

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn sq_norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum()
}

/// `y += alpha * x`
#[inline]
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[inline]
pub(crate) fn pos(x: f64) -> f64 {
    x.max(0.0)
}

/// Column `j` of a column-major matrix as a slice.
#[inline]
pub(crate) fn column(a: &DMatrix<f64>, j: usize) -> &[f64] {
    let m = a.nrows();
    &a.as_slice()[j * m..(j + 1) * m]
}

/// Least-squares coefficients of `y` on the columns of `a` listed in
/// `support`. Uses Householder QR when the restricted matrix has full column
/// rank and falls back to the minimum-norm SVD solution otherwise.
pub(crate) fn least_squares(a: &DMatrix<f64>, y: &[f64], support: &[usize]) -> Vec<f64> {
    if support.is_empty() {
        return Vec::new();
    }
    let sub = a.select_columns(support);
    let rhs = DVector::from_column_slice(y);
    let (m, k) = sub.shape();
    if k <= m {
        let qr = sub.clone().qr();
        let r = qr.r();
        let scale = r.diagonal().iter().fold(0.0_f64, |acc, d| acc.max(d.abs()));
        let well_posed = r
            .diagonal()
            .iter()
            .all(|d| d.abs() > scale * 1e-10 * m as f64);
        if well_posed {
            let qtb = qr.q().transpose() * &rhs;
            if let Some(x) = r.solve_upper_triangular(&qtb) {
                return x.as_slice().to_vec();
            }
        }
    }
    min_norm_least_squares(sub, rhs)
}

pub(crate) fn min_norm_least_squares(sub: DMatrix<f64>, rhs: DVector<f64>) -> Vec<f64> {
    let (m, k) = sub.shape();
    let svd = sub.svd(true, true);
    let smax = svd.singular_values.max();
    let cutoff = smax * (m.max(k) as f64) * f64::EPSILON;
    svd.solve(&rhs, cutoff)
        .map(|x| x.as_slice().to_vec())
        .unwrap_or_else(|_| vec![0.0; k])
}
