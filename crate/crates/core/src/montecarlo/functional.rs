//! Gaussian mutual information from second moments.
//!
//! All variables are linear combinations (rows) of one base vector `b`, so
//! every covariance needed is `A Σ Aᵀ` for the base second-moment matrix `Σ`.
//! An information expression is a weighted sum of conditional mutual
//! informations, each a signed sum of `½ log2 det` terms.

use nalgebra::{DMatrix, RowDVector};
use statrs::function::gamma::digamma;

use crate::error::{Error, Result};
use crate::tolerance;

pub type Row = RowDVector<f64>;

/// `weight · I(X; Y | Z)`.
#[derive(Debug, Clone)]
pub struct MiTerm {
    pub weight: f64,
    pub x: Vec<Row>,
    pub y: Vec<Row>,
    pub given: Vec<Row>,
}

impl MiTerm {
    pub fn new(weight: f64, x: Vec<Row>, y: Vec<Row>, given: Vec<Row>) -> Self {
        MiTerm {
            weight,
            x,
            y,
            given,
        }
    }

    /// `(sign, rows)` pairs whose `½ log2 det` sum to the information.
    fn log_dets(&self) -> Vec<(f64, Vec<Row>)> {
        let cat = |parts: &[&Vec<Row>]| {
            parts
                .iter()
                .flat_map(|p| p.iter().cloned())
                .collect::<Vec<_>>()
        };
        let mut out = vec![
            (1.0, cat(&[&self.x, &self.given])),
            (1.0, cat(&[&self.y, &self.given])),
            (-1.0, cat(&[&self.x, &self.y, &self.given])),
        ];
        if !self.given.is_empty() {
            out.push((-1.0, self.given.clone()));
        }
        out
    }
}

/// A weighted sum of conditional mutual informations, in bits.
#[derive(Debug, Clone, Default)]
pub struct InfoFunctional {
    pub terms: Vec<MiTerm>,
}

/// Value with its delta-method standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluated {
    pub value: f64,
    pub stderr: f64,
}

fn stack(rows: &[Row]) -> DMatrix<f64> {
    let d = rows[0].len();
    DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j])
}

/// `E[ln det(S)] - ln det(Σ)` for `S` the mean of `n` outer products of
/// `p`-dimensional `N(0, Σ)` vectors.
fn log_det_bias(p: usize, n: usize) -> f64 {
    let nf = n as f64;
    (1..=p)
        .map(|i| digamma((nf - i as f64 + 1.0) / 2.0) + (2.0 / nf).ln())
        .sum()
}

impl InfoFunctional {
    pub fn new(terms: Vec<MiTerm>) -> Self {
        InfoFunctional { terms }
    }

    pub fn push(&mut self, term: MiTerm) {
        self.terms.push(term);
    }

    /// Evaluates at base second moments `sigma`. With `n = Some(samples)` the
    /// log-determinants are bias-corrected for an empirical `sigma` and the
    /// standard error is estimated; with `None` `sigma` is treated as exact.
    pub fn evaluate(&self, sigma: &DMatrix<f64>, n: Option<usize>) -> Result<Evaluated> {
        let dim = sigma.nrows();
        let ln2 = std::f64::consts::LN_2;
        let mut value = 0.0;
        let mut grad = DMatrix::<f64>::zeros(dim, dim);
        let mut floor = 0.0;
        for term in &self.terms {
            for (sign, rows) in term.log_dets() {
                if rows.is_empty() {
                    continue;
                }
                let a = stack(&rows);
                let cov = &a * sigma * a.transpose();
                let chol = cholesky_checked(&cov)?;
                let ln_det = 2.0 * chol.l().diagonal().iter().map(|x| x.ln()).sum::<f64>();
                let corrected = match n {
                    Some(n) => ln_det - log_det_bias(rows.len(), n),
                    None => ln_det,
                };
                let coef = term.weight * sign / (2.0 * ln2);
                value += coef * corrected;
                if n.is_some() {
                    grad += coef * a.transpose() * chol.inverse() * &a;
                }
            }
            if let Some(n) = n {
                let d = (term.x.len() * term.y.len()) as f64;
                floor += term.weight.powi(2) * d / (2.0 * (n as f64).powi(2) * ln2 * ln2);
            }
        }
        let stderr = match n {
            Some(n) => {
                let gs = &grad * sigma;
                let delta = 2.0 * (&gs * &gs).trace() / n as f64;
                (delta.max(0.0) + floor).sqrt()
            }
            None => 0.0,
        };
        if !value.is_finite() {
            return Err(Error::DegenerateCovariance(
                "non-finite information value".into(),
            ));
        }
        Ok(Evaluated { value, stderr })
    }
}

fn cholesky_checked(cov: &DMatrix<f64>) -> Result<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    let chol = cov
        .clone()
        .cholesky()
        .ok_or_else(|| Error::DegenerateCovariance("covariance is not positive definite".into()))?;
    let l = chol.l();
    for i in 0..cov.nrows() {
        let pivot = l[(i, i)] * l[(i, i)];
        let floor = tolerance::DEGENERATE_PIVOT * cov[(i, i)].abs().max(f64::MIN_POSITIVE);
        if pivot.is_nan() || pivot <= floor {
            return Err(Error::DegenerateCovariance(format!("pivot {i} vanishes")));
        }
    }
    Ok(chol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::sampling::standard_normal_moments;

    fn e(d: usize, i: usize) -> Row {
        let mut r = Row::zeros(d);
        r[i] = 1.0;
        r
    }

    #[test]
    fn awgn_information_exact() {
        // X = sqrt(P) b0, Y = X + b1
        let p: f64 = 10.0;
        let x = e(2, 0) * p.sqrt();
        let y = &x + e(2, 1);
        let f = InfoFunctional::new(vec![MiTerm::new(1.0, vec![x], vec![y], vec![])]);
        let v = f.evaluate(&DMatrix::identity(2, 2), None).unwrap();
        assert!((v.value - 0.5 * 11f64.log2()).abs() < 1e-12);
        assert_eq!(v.stderr, 0.0);
    }

    #[test]
    fn conditional_information_exact() {
        // I(X; X + Z + W | W) = I(X; X + Z)
        let x = e(3, 0);
        let w = e(3, 2);
        let y = &x + e(3, 1) + &w;
        let f = InfoFunctional::new(vec![MiTerm::new(1.0, vec![x], vec![y], vec![w])]);
        let v = f.evaluate(&DMatrix::identity(3, 3), None).unwrap();
        assert!((v.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_is_reported() {
        let x = Row::zeros(2);
        let y = e(2, 1);
        let f = InfoFunctional::new(vec![MiTerm::new(1.0, vec![x], vec![y], vec![])]);
        let err = f.evaluate(&DMatrix::identity(2, 2), None).unwrap_err();
        assert_eq!(err.kind(), "DegenerateCovariance");
    }

    #[test]
    fn bias_matches_wishart_mean() {
        // E ln det of a 3x3 Wishart/n average, by simulation over many seeds.
        let n = 200;
        let mean: f64 = (0..400)
            .map(|s| standard_normal_moments(3, n, s).matrix().determinant().ln())
            .sum::<f64>()
            / 400.0;
        assert!(
            (mean - log_det_bias(3, n)).abs() < 0.02,
            "{mean} vs {}",
            log_det_bias(3, n)
        );
    }

    #[test]
    fn stderr_matches_seed_spread() {
        let p: f64 = 3.0;
        let x = e(2, 0) * p.sqrt();
        let y = &x + e(2, 1);
        let f = InfoFunctional::new(vec![MiTerm::new(1.0, vec![x], vec![y], vec![])]);
        let n = 20_000;
        let runs: Vec<Evaluated> = (0..60)
            .map(|s| {
                f.evaluate(&standard_normal_moments(2, n, s).matrix(), Some(n))
                    .unwrap()
            })
            .collect();
        let mean = runs.iter().map(|r| r.value).sum::<f64>() / runs.len() as f64;
        let spread = (runs.iter().map(|r| (r.value - mean).powi(2)).sum::<f64>()
            / (runs.len() - 1) as f64)
            .sqrt();
        let se = runs.iter().map(|r| r.stderr).sum::<f64>() / runs.len() as f64;
        assert!(
            (spread / se - 1.0).abs() < 0.3,
            "spread {spread} stderr {se}"
        );
        assert!((mean - 1.0).abs() < 3.0 * se / (runs.len() as f64).sqrt() + 1e-3);
    }
}
