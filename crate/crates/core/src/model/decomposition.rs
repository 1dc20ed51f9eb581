//! Latent-factor representations of equally correlated states.
//!
//! Each state is written as a signed combination of independent standard
//! normal latents. Loadings are stored symbolically as `sign * sqrt(w)` with
//! `w` an integer-affine function of `rho`, so the implied Gram matrix can be
//! checked exactly rather than only in floating point.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::Serialize;

use super::ChannelParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecompositionKind {
    /// Two states sharing one common latent with loading `sqrt|rho|` (sign of
    /// `rho` on the second state).
    TwoUserCommon,
    /// `S_m = sqrt(rho) S_c + sqrt(1 - rho) S~_m`, any `M`, `rho >= 0`.
    PositiveCommon,
    /// One latent per unordered pair, entering the two states with opposite
    /// signs, plus a private residual; any `M`, `rho < 0`.
    NegativePairwise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Latent {
    Common,
    Private(usize),
    /// Latent shared by states `i < j`.
    Pairwise(usize, usize),
}

/// `constant + rho_coeff * rho`, exact in integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SymbolicWeight {
    pub constant: i64,
    pub rho_coeff: i64,
}

impl SymbolicWeight {
    pub const ZERO: SymbolicWeight = SymbolicWeight {
        constant: 0,
        rho_coeff: 0,
    };
    pub const ONE: SymbolicWeight = SymbolicWeight {
        constant: 1,
        rho_coeff: 0,
    };
    pub const RHO: SymbolicWeight = SymbolicWeight {
        constant: 0,
        rho_coeff: 1,
    };

    pub const fn new(constant: i64, rho_coeff: i64) -> Self {
        SymbolicWeight {
            constant,
            rho_coeff,
        }
    }

    /// Numeric value, clipped at zero (the residual weight is exactly zero at
    /// the feasibility boundary but may round slightly negative).
    pub fn eval(&self, rho: f64) -> f64 {
        (self.constant as f64 + self.rho_coeff as f64 * rho).max(0.0)
    }

    fn scaled(self, s: i64) -> Self {
        SymbolicWeight::new(self.constant * s, self.rho_coeff * s)
    }

    fn plus(self, other: Self) -> Self {
        SymbolicWeight::new(
            self.constant + other.constant,
            self.rho_coeff + other.rho_coeff,
        )
    }
}

/// Loading `sign * sqrt(weight(rho))`; `sign == 0` means the latent is absent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Coefficient {
    pub sign: i8,
    pub weight: SymbolicWeight,
}

impl Coefficient {
    const ABSENT: Coefficient = Coefficient {
        sign: 0,
        weight: SymbolicWeight::ZERO,
    };

    fn new(sign: i8, weight: SymbolicWeight) -> Self {
        Coefficient { sign, weight }
    }

    pub fn value(&self, rho: f64) -> f64 {
        f64::from(self.sign) * self.weight.eval(rho).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateDecomposition {
    pub kind: DecompositionKind,
    pub m: usize,
    pub rho: f64,
    pub latents: Vec<Latent>,
    /// `loadings[state][latent]`.
    pub loadings: Vec<Vec<Coefficient>>,
}

pub fn decompose_states(params: &ChannelParams) -> Result<StateDecomposition> {
    StateDecomposition::new(params.m, params.rho)
}

impl StateDecomposition {
    pub fn new(m: usize, rho: f64) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidM(m));
        }
        let cov = super::StateCovariance::new(m, rho);
        if !rho.is_finite() || !cov.feasible {
            return Err(Error::InfeasibleRho {
                m,
                rho,
                lower: super::rho_lower_bound(m),
            });
        }
        Ok(if m == 2 {
            Self::two_user(rho)
        } else if rho >= 0.0 {
            Self::positive_common(m, rho)
        } else {
            Self::negative_pairwise(m, rho)
        })
    }

    fn two_user(rho: f64) -> Self {
        // a = sqrt|rho|; second state carries rho / a = sign(rho) sqrt|rho|.
        let (abs_rho, one_minus_abs) = if rho >= 0.0 {
            (SymbolicWeight::RHO, SymbolicWeight::new(1, -1))
        } else {
            (SymbolicWeight::new(0, -1), SymbolicWeight::new(1, 1))
        };
        let second_sign = if rho < 0.0 { -1 } else { 1 };
        let latents = vec![Latent::Common, Latent::Private(0), Latent::Private(1)];
        let loadings = vec![
            vec![
                Coefficient::new(1, abs_rho),
                Coefficient::new(1, one_minus_abs),
                Coefficient::ABSENT,
            ],
            vec![
                Coefficient::new(second_sign, abs_rho),
                Coefficient::ABSENT,
                Coefficient::new(1, one_minus_abs),
            ],
        ];
        StateDecomposition {
            kind: DecompositionKind::TwoUserCommon,
            m: 2,
            rho,
            latents,
            loadings,
        }
    }

    fn positive_common(m: usize, rho: f64) -> Self {
        let mut latents = vec![Latent::Common];
        latents.extend((0..m).map(Latent::Private));
        let loadings = (0..m)
            .map(|state| {
                latents
                    .iter()
                    .map(|latent| match *latent {
                        Latent::Common => Coefficient::new(1, SymbolicWeight::RHO),
                        Latent::Private(k) if k == state => {
                            Coefficient::new(1, SymbolicWeight::new(1, -1))
                        }
                        _ => Coefficient::ABSENT,
                    })
                    .collect()
            })
            .collect();
        StateDecomposition {
            kind: DecompositionKind::PositiveCommon,
            m,
            rho,
            latents,
            loadings,
        }
    }

    fn negative_pairwise(m: usize, rho: f64) -> Self {
        let abs_rho = SymbolicWeight::new(0, -1);
        // 1 - (M-1)|rho| with rho < 0
        let residual = SymbolicWeight::new(1, m as i64 - 1);
        let mut latents = Vec::with_capacity(m * (m - 1) / 2 + m);
        for i in 0..m {
            for j in i + 1..m {
                latents.push(Latent::Pairwise(i, j));
            }
        }
        latents.extend((0..m).map(Latent::Private));
        let loadings = (0..m)
            .map(|state| {
                latents
                    .iter()
                    .map(|latent| match *latent {
                        Latent::Pairwise(i, _) if i == state => Coefficient::new(1, abs_rho),
                        Latent::Pairwise(_, j) if j == state => Coefficient::new(-1, abs_rho),
                        Latent::Private(k) if k == state => Coefficient::new(1, residual),
                        _ => Coefficient::ABSENT,
                    })
                    .collect()
            })
            .collect();
        StateDecomposition {
            kind: DecompositionKind::NegativePairwise,
            m,
            rho,
            latents,
            loadings,
        }
    }

    pub fn latent_count(&self) -> usize {
        self.latents.len()
    }

    pub fn coefficient(&self, state: usize, latent: usize) -> f64 {
        self.loadings[state][latent].value(self.rho)
    }

    /// Nonzero loadings keyed by `(state, latent)`.
    pub fn coefficients(&self) -> BTreeMap<(usize, Latent), f64> {
        let mut out = BTreeMap::new();
        for (state, row) in self.loadings.iter().enumerate() {
            for (k, coef) in row.iter().enumerate() {
                let v = coef.value(self.rho);
                if coef.sign != 0 && v != 0.0 {
                    out.insert((state, self.latents[k]), v);
                }
            }
        }
        out
    }

    /// `M x K` numeric loading matrix.
    pub fn loading_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.m, self.latent_count(), |i, k| self.coefficient(i, k))
    }

    pub fn numeric_gram(&self) -> DMatrix<f64> {
        let l = self.loading_matrix();
        &l * l.transpose()
    }

    /// Gram matrix computed in exact integer arithmetic on the symbolic
    /// weights. Returns `None` if two states load one latent with different
    /// magnitudes, in which case the product is not expressible exactly.
    pub fn symbolic_gram(&self) -> Option<Vec<Vec<SymbolicWeight>>> {
        let mut gram = vec![vec![SymbolicWeight::ZERO; self.m]; self.m];
        for (i, row) in gram.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let mut acc = SymbolicWeight::ZERO;
                for k in 0..self.latent_count() {
                    let (a, b) = (self.loadings[i][k], self.loadings[j][k]);
                    if a.sign == 0 || b.sign == 0 {
                        continue;
                    }
                    if a.weight != b.weight {
                        return None;
                    }
                    acc = acc.plus(a.weight.scaled(i64::from(a.sign * b.sign)));
                }
                *cell = acc;
            }
        }
        Some(gram)
    }

    /// Loading of the private residual latent of `state`
    /// (for the pairwise kind, `sqrt(1 - (M-1)|rho|)`).
    pub fn residual_weight(&self, state: usize) -> f64 {
        let k = self
            .latents
            .iter()
            .position(|l| *l == Latent::Private(state))
            .expect("every decomposition has a private latent per state");
        self.coefficient(state, k)
    }

    /// Index and loading of a common latent that enters every state with the
    /// same positive loading, i.e. one that can be precoded against once for
    /// all receivers.
    pub fn shared_common(&self) -> Option<(usize, f64)> {
        let k = self.latents.iter().position(|l| *l == Latent::Common)?;
        let first = self.coefficient(0, k);
        if first <= 0.0 {
            return None;
        }
        let shared = (0..self.m).all(|i| self.coefficient(i, k) == first);
        shared.then_some((k, first))
    }
}
