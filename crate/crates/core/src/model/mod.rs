//! Channel parameters and the equal-correlation state covariance.
//!
//! Receiver `m` observes `Y_m = X + c S_m + Z_m` with unit-variance noise and
//! unit-variance states sharing one pairwise correlation `rho`.

mod decomposition;
pub mod sampling;

pub use decomposition::{
    decompose_states, Coefficient, DecompositionKind, Latent, StateDecomposition, SymbolicWeight,
};
pub use sampling::sample_states;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tolerance;

/// One channel instance: `M` receivers, power `P`, state gain `c` and
/// pairwise state correlation `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelParams {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "P")]
    pub p: f64,
    pub c: f64,
    pub rho: f64,
}

impl ChannelParams {
    pub fn new(m: usize, p: f64, c: f64, rho: f64) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidM(m));
        }
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::InvalidPower(p));
        }
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::InvalidGain(c));
        }
        if !rho.is_finite() || !StateCovariance::new(m, rho).feasible {
            return Err(Error::InfeasibleRho {
                m,
                rho,
                lower: rho_lower_bound(m),
            });
        }
        Ok(ChannelParams { m, p, c, rho })
    }

    /// Same as [`ChannelParams::new`] but takes the squared gain.
    pub fn with_c2(m: usize, p: f64, c2: f64, rho: f64) -> Result<Self> {
        if !(c2.is_finite() && c2 >= 0.0) {
            return Err(Error::InvalidGain(c2));
        }
        Self::new(m, p, c2.sqrt(), rho)
    }

    pub fn c2(&self) -> f64 {
        self.c * self.c
    }

    pub fn is_independent(&self) -> bool {
        self.rho == 0.0
    }

    /// Copy with a different gain; the gain must be a valid one.
    pub fn with_gain(&self, c: f64) -> Self {
        debug_assert!(c.is_finite() && c >= 0.0);
        ChannelParams { c, ..*self }
    }

    pub fn covariance(&self) -> StateCovariance {
        StateCovariance::new(self.m, self.rho)
    }
}

/// Smallest feasible correlation for `m` equally correlated unit-variance states.
pub fn rho_lower_bound(m: usize) -> f64 {
    if m < 2 {
        f64::NEG_INFINITY
    } else {
        -1.0 / (m as f64 - 1.0)
    }
}

/// `(1 - rho) I + rho 11^T` together with its spectral summary.
///
/// Construction never fails; infeasible correlations are reported through
/// `feasible` so the boundary can be scanned.
#[derive(Debug, Clone, PartialEq)]
pub struct StateCovariance {
    pub m: usize,
    pub rho: f64,
    pub entries: DMatrix<f64>,
    pub min_eigenvalue: f64,
    pub feasible: bool,
    pub singular: bool,
}

impl StateCovariance {
    pub fn new(m: usize, rho: f64) -> Self {
        assert!(m >= 1, "covariance needs at least one state");
        let entries = DMatrix::from_fn(m, m, |i, j| if i == j { 1.0 } else { rho });
        let min_eigenvalue = Self::eigenvalues_of(m, rho)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        StateCovariance {
            m,
            rho,
            entries,
            min_eigenvalue,
            feasible: min_eigenvalue >= -tolerance::FEASIBILITY,
            singular: min_eigenvalue.abs() <= tolerance::SINGULAR,
        }
    }

    fn eigenvalues_of(m: usize, rho: f64) -> Vec<f64> {
        let mut ev = vec![1.0 - rho; m - 1];
        ev.push(1.0 + (m as f64 - 1.0) * rho);
        ev
    }

    /// Eigenvalues with multiplicity: `1 - rho` (M-1 times) and `1 + (M-1) rho`.
    pub fn eigenvalues(&self) -> Vec<f64> {
        Self::eigenvalues_of(self.m, self.rho)
    }

    /// Determinant of the leading `k x k` block, `(1-rho)^k (1 + k rho / (1-rho))`,
    /// written as `(1-rho)^(k-1) (1 + (k-1) rho)` so that `rho = 1` is finite.
    pub fn leading_minor(&self, k: usize) -> f64 {
        assert!(k >= 1 && k <= self.m);
        let rho = self.rho;
        (1.0 - rho).powi(k as i32 - 1) * (1.0 + (k as f64 - 1.0) * rho)
    }

    /// Feasibility read off the principal minors. Every principal minor of
    /// size `k` equals the leading one, so checking `k = 1..=M` suffices.
    pub fn minors_feasible(&self) -> bool {
        (1..=self.m).all(|k| self.leading_minor(k) >= -tolerance::FEASIBILITY)
    }
}

pub fn build_covariance(params: &ChannelParams) -> StateCovariance {
    params.covariance()
}
