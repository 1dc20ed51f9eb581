//! Covariance of consecutive state differences `Δ_i = S_i - S_{i-1}`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::{rho_lower_bound, StateCovariance};

/// `(1-rho) * tridiag(-1, 2, -1)` of size `M-1`.
pub fn delta_covariance(m: usize, rho: f64) -> Result<DMatrix<f64>> {
    check(m, rho)?;
    let n = m - 1;
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let t = match i.abs_diff(j) {
            0 => 2.0,
            1 => -1.0,
            _ => 0.0,
        };
        (1.0 - rho) * t
    }))
}

/// Variance of `Δ_{k+1}` given `Δ_2..Δ_k`, for `k = 1..M-1`:
/// `(1-rho)(k+1)/k`.
pub fn delta_conditional_variances(m: usize, rho: f64) -> Result<Vec<f64>> {
    check(m, rho)?;
    Ok((1..m)
        .map(|k| (1.0 - rho) * (k as f64 + 1.0) / k as f64)
        .collect())
}

fn check(m: usize, rho: f64) -> Result<()> {
    if m < 2 {
        return Err(Error::InvalidM(m));
    }
    if !rho.is_finite() || !StateCovariance::new(m, rho).feasible {
        return Err(Error::InfeasibleRho {
            m,
            rho,
            lower: rho_lower_bound(m),
        });
    }
    Ok(())
}

/// Sequential conditional variances of a dense covariance by Schur
/// complements: entry `k` is `Var(X_k | X_0..X_{k-1})`.
pub fn conditional_variances_dense(cov: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = cov.nrows();
    let mut out = Vec::with_capacity(n);
    out.push(cov[(0, 0)]);
    for k in 1..n {
        let block = cov.view((0, 0), (k, k)).into_owned();
        let cross = cov.view((0, k), (k, 1)).into_owned();
        let chol = block.cholesky().ok_or_else(|| {
            Error::DegenerateCovariance(format!("leading {k}x{k} block is not positive definite"))
        })?;
        let solved = chol.solve(&cross);
        out.push(cov[(k, k)] - cross.dot(&solved));
    }
    Ok(out)
}
