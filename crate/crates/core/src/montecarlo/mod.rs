//! Monte Carlo cross-checks of the superposition/precoding rates.
//!
//! One draw is a base vector of independent standard normals
//! `[W_san, W_pas, latents.., Z_1..Z_M]`; codewords, states, outputs and
//! auxiliaries are fixed linear rows over it. A run accumulates the base
//! second-moment matrix once and evaluates every information term from it.

mod functional;

pub use functional::{Evaluated, InfoFunctional, MiTerm, Row};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::bounds::{self, PowerSplit};
use crate::error::{Error, Result};
use crate::model::sampling::{empirical_covariance, sample_states, standard_normal_moments};
use crate::model::{ChannelParams, StateCovariance, StateDecomposition};

pub const MIN_SAMPLES: usize = 1_000;
pub const MIN_DECOMPOSITION_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    /// State-as-noise (common) layer rate.
    San,
    /// Precoded layer rate.
    Gp,
    /// Common rate plus time-shared precoded rate, worst receiver.
    #[default]
    Scheme,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimulationConfig {
    pub params: ChannelParams,
    pub samples: usize,
    pub seed: u64,
    pub alpha_bar: f64,
    pub target: Target,
    /// Receiver for the single-term estimators.
    pub receiver: usize,
    /// Replaces the MMSE inflation factor in the precoded auxiliary.
    pub gp_lambda: Option<f64>,
}

impl SimulationConfig {
    pub fn new(
        params: ChannelParams,
        samples: usize,
        seed: u64,
        alpha_bar: f64,
        target: Target,
    ) -> Result<Self> {
        if samples < MIN_SAMPLES {
            return Err(Error::InvalidSampleCount {
                min: MIN_SAMPLES,
                got: samples,
            });
        }
        PowerSplit::new(alpha_bar)?;
        Ok(SimulationConfig {
            params,
            samples,
            seed,
            alpha_bar,
            target,
            receiver: 0,
            gp_lambda: None,
        })
    }

    pub fn with_receiver(mut self, receiver: usize) -> Self {
        self.receiver = receiver;
        self
    }

    pub fn with_gp_lambda(mut self, lambda: f64) -> Self {
        self.gp_lambda = Some(lambda);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MiEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
    pub closed_form: f64,
    pub z_score: f64,
}

impl MiEstimate {
    fn new(e: Evaluated, samples: usize, closed_form: f64) -> Self {
        MiEstimate {
            value: e.value,
            stderr: e.stderr,
            samples,
            closed_form,
            z_score: (e.value - closed_form) / e.stderr,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReceiverRates {
    pub san: MiEstimate,
    /// `None` when no power is on the precoded layer.
    pub gp: Option<MiEstimate>,
    /// `san + gp / M`, estimated jointly.
    pub combined: MiEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemeRate {
    pub per_receiver: Vec<ReceiverRates>,
    /// Worst receiver's combined estimate.
    pub combined: MiEstimate,
    pub worst_receiver: usize,
}

/// Rows of all scheme variables over the base vector.
#[derive(Debug, Clone)]
pub struct Layout {
    pub params: ChannelParams,
    pub split: PowerSplit,
    pub decomposition: StateDecomposition,
    pub dim: usize,
}

impl Layout {
    pub fn new(params: ChannelParams, alpha_bar: f64) -> Result<Self> {
        let split = PowerSplit::new(alpha_bar)?;
        let decomposition = StateDecomposition::new(params.m, params.rho)?;
        let dim = 2 + decomposition.latent_count() + params.m;
        Ok(Layout {
            params,
            split,
            decomposition,
            dim,
        })
    }

    fn unit(&self, i: usize) -> Row {
        let mut r = Row::zeros(self.dim);
        r[i] = 1.0;
        r
    }

    pub fn w_san(&self) -> Row {
        self.unit(0)
    }

    pub fn w_pas(&self) -> Row {
        self.unit(1)
    }

    pub fn latent(&self, j: usize) -> Row {
        self.unit(2 + j)
    }

    pub fn noise(&self, m: usize) -> Row {
        self.unit(2 + self.decomposition.latent_count() + m)
    }

    pub fn x_san(&self) -> Row {
        self.w_san() * (self.split.alpha * self.params.p).sqrt()
    }

    pub fn x_pas(&self) -> Row {
        self.w_pas() * (self.split.alpha_bar * self.params.p).sqrt()
    }

    pub fn state(&self, m: usize) -> Row {
        let mut r = Row::zeros(self.dim);
        for j in 0..self.decomposition.latent_count() {
            r[2 + j] = self.decomposition.coefficient(m, j);
        }
        r
    }

    pub fn output(&self, m: usize) -> Row {
        self.x_san() + self.x_pas() + self.state(m) * self.params.c + self.noise(m)
    }

    /// MMSE inflation factor for the precoded layer, `āP / (āP + 1)`.
    pub fn gp_lambda(&self) -> f64 {
        let q = self.split.alpha_bar * self.params.p;
        q / (q + 1.0)
    }

    /// Common-layer rate at receiver `m`. With a shared positive common
    /// state component and power on the common layer, the common codeword is
    /// precoded against it: `V = X_san + λ_c c ℓ S_c`, rate
    /// `I(V; Y) - I(V; S_c)`. Otherwise `I(W_san; Y)`.
    pub fn san_term(&self, m: usize, weight: f64) -> Vec<MiTerm> {
        let y = self.output(m);
        match self.common_precoding() {
            Some((k, loading)) => {
                let (ab, p, c) = (self.split.alpha_bar, self.params.p, self.params.c);
                let signal = self.split.alpha * p;
                let residual = c * c * (1.0 - loading * loading);
                let lambda = signal / (signal + ab * p + residual + 1.0);
                let s_c = self.latent(k);
                let v = self.x_san() + &s_c * (lambda * c * loading);
                vec![
                    MiTerm::new(weight, vec![v.clone()], vec![y], vec![]),
                    MiTerm::new(-weight, vec![v], vec![s_c], vec![]),
                ]
            }
            None => vec![MiTerm::new(weight, vec![self.w_san()], vec![y], vec![])],
        }
    }

    fn common_precoding(&self) -> Option<(usize, f64)> {
        if self.params.rho > 0.0 && self.split.alpha > 0.0 && self.params.c > 0.0 {
            self.decomposition.shared_common()
        } else {
            None
        }
    }

    /// Precoded-layer rate at receiver `m`, `I(Y; U | W_san) - I(U; S_m)` with
    /// `U = X_pas + λ c S_m`.
    pub fn gp_term(&self, m: usize, weight: f64, lambda: Option<f64>) -> Result<Vec<MiTerm>> {
        if self.split.alpha_bar == 0.0 {
            return Err(Error::InvalidSplit(0.0));
        }
        let lambda = lambda.unwrap_or_else(|| self.gp_lambda());
        let s = self.state(m);
        let u = self.x_pas() + &s * (lambda * self.params.c);
        Ok(vec![
            MiTerm::new(
                weight,
                vec![self.output(m)],
                vec![u.clone()],
                vec![self.w_san()],
            ),
            MiTerm::new(-weight, vec![u], vec![s], vec![]),
        ])
    }

    /// Value of `terms` under the exact base covariance (the identity).
    pub fn exact(&self, terms: Vec<MiTerm>) -> Result<f64> {
        Ok(InfoFunctional::new(terms)
            .evaluate(&DMatrix::identity(self.dim, self.dim), None)?
            .value)
    }

    pub fn san_closed_form(&self) -> f64 {
        let x = bounds::es_effective_gain(&self.params).powi(2);
        let (a, ab, p) = (self.split.alpha, self.split.alpha_bar, self.params.p);
        0.5 * (1.0 + a * p / (1.0 + ab * p + x)).log2()
    }

    pub fn gp_closed_form(&self) -> f64 {
        0.5 * (1.0 + self.split.alpha_bar * self.params.p).log2()
    }

    pub fn scheme_closed_form(&self) -> Result<f64> {
        Ok(bounds::ccdp_m_inner_raw(&self.params, self.split.alpha_bar)?.value)
    }
}

/// Base second moments of one seeded run.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub layout: Layout,
    pub samples: usize,
    pub moments: DMatrix<f64>,
}

impl Experiment {
    pub fn sample(layout: Layout, samples: usize, seed: u64) -> Result<Self> {
        if samples < MIN_SAMPLES {
            return Err(Error::InvalidSampleCount {
                min: MIN_SAMPLES,
                got: samples,
            });
        }
        let moments = standard_normal_moments(layout.dim, samples, seed).matrix();
        Ok(Experiment {
            layout,
            samples,
            moments,
        })
    }

    pub fn from_config(config: &SimulationConfig) -> Result<Self> {
        Self::sample(
            Layout::new(config.params, config.alpha_bar)?,
            config.samples,
            config.seed,
        )
    }

    pub fn estimate(&self, terms: Vec<MiTerm>, closed_form: f64) -> Result<MiEstimate> {
        let e = InfoFunctional::new(terms).evaluate(&self.moments, Some(self.samples))?;
        Ok(MiEstimate::new(e, self.samples, closed_form))
    }

    pub fn san(&self, m: usize) -> Result<MiEstimate> {
        self.estimate(self.layout.san_term(m, 1.0), self.layout.san_closed_form())
    }

    pub fn gp(&self, m: usize, lambda: Option<f64>) -> Result<MiEstimate> {
        let closed = match lambda {
            None => self.layout.gp_closed_form(),
            Some(l) => gp_closed_form_at(&self.layout, l),
        };
        self.estimate(self.layout.gp_term(m, 1.0, lambda)?, closed)
    }

    pub fn scheme(&self) -> Result<SchemeRate> {
        let l = &self.layout;
        let m_count = l.params.m;
        let closed = l.scheme_closed_form()?;
        let mut per_receiver = Vec::with_capacity(m_count);
        for m in 0..m_count {
            let san = self.san(m)?;
            let mut terms = l.san_term(m, 1.0);
            let gp = if l.split.alpha_bar > 0.0 {
                terms.extend(l.gp_term(m, 1.0 / m_count as f64, None)?);
                Some(self.gp(m, None)?)
            } else {
                None
            };
            let combined = self.estimate(terms, closed)?;
            per_receiver.push(ReceiverRates { san, gp, combined });
        }
        let worst_receiver = (0..m_count)
            .min_by(|&a, &b| {
                per_receiver[a]
                    .combined
                    .value
                    .total_cmp(&per_receiver[b].combined.value)
            })
            .expect("at least two receivers");
        let combined = per_receiver[worst_receiver].combined;
        Ok(SchemeRate {
            per_receiver,
            combined,
            worst_receiver,
        })
    }
}

/// Precoded-layer rate for an arbitrary inflation factor `λ` (Costa's
/// expression with unit noise and state variance `c²`).
pub fn gp_closed_form_at(layout: &Layout, lambda: f64) -> f64 {
    let q = layout.split.alpha_bar * layout.params.p;
    let s = layout.params.c * layout.params.c;
    let num = q * (q + s + 1.0);
    let den = q * s * (1.0 - lambda).powi(2) + q + lambda * lambda * s;
    0.5 * (num / den).log2()
}

pub fn estimate_san_rate(config: &SimulationConfig) -> Result<MiEstimate> {
    check_receiver(config)?;
    Experiment::from_config(config)?.san(config.receiver)
}

pub fn estimate_gp_rate(config: &SimulationConfig) -> Result<MiEstimate> {
    check_receiver(config)?;
    if config.alpha_bar == 0.0 {
        return Err(Error::InvalidSplit(0.0));
    }
    Experiment::from_config(config)?.gp(config.receiver, config.gp_lambda)
}

pub fn verify_scheme_rate(config: &SimulationConfig) -> Result<SchemeRate> {
    Experiment::from_config(config)?.scheme()
}

fn check_receiver(config: &SimulationConfig) -> Result<()> {
    if config.receiver >= config.params.m {
        return Err(Error::Domain(format!(
            "receiver index {} out of range for M = {}",
            config.receiver, config.params.m
        )));
    }
    Ok(())
}

/// Empirical precoded-layer rate at each `λ`, all from the same sample.
pub fn gp_lambda_scan(config: &SimulationConfig, lambdas: &[f64]) -> Result<Vec<(f64, f64)>> {
    check_receiver(config)?;
    let exp = Experiment::from_config(config)?;
    lambdas
        .iter()
        .map(|&l| Ok((l, exp.gp(config.receiver, Some(l))?.value)))
        .collect()
}

/// Max absolute entry error between the empirical covariance of `n` sampled
/// state vectors and the target equal-correlation covariance.
pub fn verify_decomposition_stats(decomp: &StateDecomposition, n: usize, seed: u64) -> Result<f64> {
    if n < MIN_DECOMPOSITION_SAMPLES {
        return Err(Error::InvalidSampleCount {
            min: MIN_DECOMPOSITION_SAMPLES,
            got: n,
        });
    }
    let emp = empirical_covariance(&sample_states(decomp, n, seed));
    let target = StateCovariance::new(decomp.m, decomp.rho).entries;
    Ok((emp - target).abs().max())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GainReductionCheck {
    /// Gain of the channel seen after the known part is removed.
    pub reduced_gain: f64,
    /// Max absolute difference of the correlation matrices of `(X, Y'_1..Y'_M)`.
    pub max_correlation_error: f64,
}

/// Splits the state as `S = √t S' + √(1-t) S''` with `S', S''` independent
/// copies of the state process, reveals `S'` to everyone and subtracts
/// `c√t S'` from every output. The remaining channel should be statistically
/// the channel with gain `c√(1-t)`.
pub fn verify_gain_reduction(
    params: &ChannelParams,
    t: f64,
    n: usize,
    seed: u64,
) -> Result<GainReductionCheck> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("split fraction {t} outside [0, 1]")));
    }
    if n < MIN_SAMPLES {
        return Err(Error::InvalidSampleCount {
            min: MIN_SAMPLES,
            got: n,
        });
    }
    let decomp = StateDecomposition::new(params.m, params.rho)?;
    let (m, k) = (params.m, decomp.latent_count());
    // base: [W, latents', latents'', Z_1..Z_M]
    let dim = 1 + 2 * k + m;
    let row = |i: usize| {
        let mut r = Row::zeros(dim);
        r[i] = 1.0;
        r
    };
    let state = |offset: usize, i: usize| {
        let mut r = Row::zeros(dim);
        for j in 0..k {
            r[offset + j] = decomp.coefficient(i, j);
        }
        r
    };
    let x = row(0) * params.p.sqrt();
    let (c, a, b) = (params.c, t.sqrt(), (1.0 - t).sqrt());
    let mut rows = vec![x.clone()];
    for i in 0..m {
        let s = state(1, i) * a + state(1 + k, i) * b;
        let y = &x + &s * c + row(1 + 2 * k + i);
        let known = state(1, i) * (c * a);
        rows.push(y - known);
    }
    let moments = standard_normal_moments(dim, n, seed).matrix();
    let a_mat = DMatrix::from_fn(rows.len(), dim, |i, j| rows[i][j]);
    let emp = &a_mat * moments * a_mat.transpose();

    let reduced = c * b;
    let sigma = StateCovariance::new(m, params.rho).entries;
    let expected = DMatrix::from_fn(m + 1, m + 1, |i, j| match (i, j) {
        (0, 0) => params.p,
        (0, _) | (_, 0) => params.p,
        (i, j) => {
            params.p + reduced * reduced * sigma[(i - 1, j - 1)] + if i == j { 1.0 } else { 0.0 }
        }
    });
    let corr = |mat: &DMatrix<f64>| {
        DMatrix::from_fn(mat.nrows(), mat.ncols(), |i, j| {
            mat[(i, j)] / (mat[(i, i)] * mat[(j, j)]).sqrt()
        })
    };
    let max_correlation_error = (corr(&emp) - corr(&expected)).abs().max();
    Ok(GainReductionCheck {
        reduced_gain: reduced,
        max_correlation_error,
    })
}

#[cfg(test)]
mod tests;
