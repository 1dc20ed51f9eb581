//! Piecewise closed forms in the squared (possibly effective) state gain.

use super::Branch;
use crate::error::{Error, Result};

/// Fixed channel quantities a formula may read.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Ctx {
    pub m: f64,
    pub p: f64,
}

impl Ctx {
    /// `(M-1) / 2M`
    pub fn tail_weight(&self) -> f64 {
        (self.m - 1.0) / (2.0 * self.m)
    }

    /// `(M-1)(P+1)`
    pub fn upper_cut(&self) -> f64 {
        (self.m - 1.0) * (self.p + 1.0)
    }
}

pub(crate) type Formula = fn(&Ctx, f64) -> Result<f64>;

pub(crate) struct Piece {
    pub branch: Branch,
    /// Regime label; `x` stands for the gain argument.
    pub label: &'static str,
    pub formula: Formula,
}

/// Boundary between consecutive pieces. An argument equal to `at` belongs to
/// the lower piece iff `lower_closed`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Cut {
    pub at: f64,
    pub lower_closed: bool,
}

pub(crate) struct Piecewise {
    pub pieces: Vec<Piece>,
    pub cuts: Vec<Cut>,
}

/// Jump of a piecewise expression across one boundary.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Jump {
    /// Boundary value of the gain argument.
    pub at: f64,
    pub left: f64,
    pub right: f64,
}

impl Jump {
    pub fn size(&self) -> f64 {
        self.right - self.left
    }
}

impl Piecewise {
    pub fn select(&self, x: f64) -> usize {
        debug_assert_eq!(self.pieces.len(), self.cuts.len() + 1);
        self.cuts
            .iter()
            .position(|cut| {
                if cut.lower_closed {
                    x <= cut.at
                } else {
                    x < cut.at
                }
            })
            .unwrap_or(self.cuts.len())
    }

    pub fn eval(&self, ctx: &Ctx, x: f64) -> Result<(f64, &Piece)> {
        let piece = &self.pieces[self.select(x)];
        Ok(((piece.formula)(ctx, x)?, piece))
    }

    /// Both neighbouring formulas evaluated at every boundary.
    pub fn jumps(&self, ctx: &Ctx) -> Result<Vec<Jump>> {
        self.cuts
            .iter()
            .enumerate()
            .map(|(i, cut)| {
                Ok(Jump {
                    at: cut.at,
                    left: (self.pieces[i].formula)(ctx, cut.at)?,
                    right: (self.pieces[i + 1].formula)(ctx, cut.at)?,
                })
            })
            .collect()
    }
}

/// `log2` that refuses non-positive arguments instead of returning `-inf`/NaN.
pub(crate) fn lg(x: f64) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x.log2())
    } else {
        Err(Error::Domain(format!("log2 of {x}")))
    }
}
