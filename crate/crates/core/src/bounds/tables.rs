//! Branch tables for every piecewise bound. Argument `x` is the squared gain
//! (or the squared effective gain for equivalent states).

use super::piecewise::{lg, Ctx, Cut, Piece, Piecewise};
use super::{Branch, InnerForm, OuterVariant};
use crate::error::Result;

fn cut(at: f64, lower_closed: bool) -> Cut {
    Cut { at, lower_closed }
}

fn single(label: &'static str, formula: super::piecewise::Formula) -> Piecewise {
    Piecewise {
        pieces: vec![Piece {
            branch: Branch::Single,
            label,
            formula,
        }],
        cuts: vec![],
    }
}

fn three(
    labels: [&'static str; 3],
    formulas: [super::piecewise::Formula; 3],
    cuts: [Cut; 2],
) -> Piecewise {
    let branches = [Branch::Low, Branch::Middle, Branch::High];
    Piecewise {
        pieces: (0..3)
            .map(|i| Piece {
                branch: branches[i],
                label: labels[i],
                formula: formulas[i],
            })
            .collect(),
        cuts: cuts.to_vec(),
    }
}

pub(crate) fn awgn() -> Piecewise {
    single("n/a", |ctx, _| Ok(0.5 * lg(1.0 + ctx.p)?))
}

/// Single-letter bound for two independent states, branch point `x = 4`.
pub(crate) fn lapidoth_outer_2() -> Piecewise {
    fn low(ctx: &Ctx, x: f64) -> Result<f64> {
        let p = ctx.p;
        let cross = 1.0 + p + x + 2.0 * (x * p).sqrt();
        let q = x / 4.0 + 1.0;
        Ok(0.25 * lg((1.0 + p) / q)? + 0.25 * lg(cross / q)?)
    }
    fn high(ctx: &Ctx, x: f64) -> Result<f64> {
        let p = ctx.p;
        let cross = 1.0 + p + x + 2.0 * (x * p).sqrt();
        Ok(0.25 * lg(1.0 + p)? - 0.25 * lg(x)? + 0.25 * lg(cross)?)
    }
    Piecewise {
        pieces: vec![
            Piece {
                branch: Branch::Low,
                label: "{g}<4",
                formula: low,
            },
            Piece {
                branch: Branch::High,
                label: "{g}≥4",
                formula: high,
            },
        ],
        cuts: vec![cut(4.0, false)],
    }
}

pub(crate) fn lapidoth_inner_2(ctx: &Ctx) -> Piecewise {
    three(
        ["{g}/2≤1", "middle", "{g}/2≥P+1"],
        [
            |ctx, x| Ok(0.5 * lg(1.0 + ctx.p / (x / 2.0 + 1.0))?),
            |ctx, x| Ok(0.5 * lg((ctx.p + x / 2.0 + 1.0) / x)? + 0.25 * lg(x / 2.0)?),
            |ctx, _| Ok(0.25 * lg(ctx.p + 1.0)?),
        ],
        [cut(2.0, true), cut(2.0 * (ctx.p + 1.0), false)],
    )
}

/// M-receiver bound for independent states; the positive part switches on
/// above `x = M(P+1)`.
pub(crate) fn lapidoth_outer_m(ctx: &Ctx) -> Piecewise {
    fn base(ctx: &Ctx, x: f64) -> Result<f64> {
        let (m, p) = (ctx.m, ctx.p);
        Ok(0.5 * lg(p + x + 2.0 * (x * p).sqrt())?
            - ctx.tail_weight() * lg(x)?
            - lg(m)? / (2.0 * m))
    }
    fn clamped(ctx: &Ctx, x: f64) -> Result<f64> {
        Ok(base(ctx, x)? - lg(x / (ctx.m * (ctx.p + 1.0)))? / (2.0 * ctx.m))
    }
    Piecewise {
        pieces: vec![
            Piece {
                branch: Branch::Low,
                label: "{g}≤M(P+1)",
                formula: base,
            },
            Piece {
                branch: Branch::High,
                label: "{g}>M(P+1)",
                formula: clamped,
            },
        ],
        cuts: vec![cut(ctx.m * (ctx.p + 1.0), true)],
    }
}

pub(crate) fn two_user_outer(ctx: &Ctx, variant: OuterVariant) -> Piecewise {
    let middle: super::piecewise::Formula = match variant {
        OuterVariant::TheoremStatement => {
            |ctx, x| Ok(0.5 * lg(ctx.p + x + 1.0)? - 0.25 * lg(x + 1.0)? + 0.5)
        }
        OuterVariant::Appendix => |ctx, x| Ok(0.5 * lg(ctx.p + x + 1.0)? - 0.25 * lg(x)? + 0.5),
    };
    three(
        ["{g}≤1", "middle", "{g}≥P+1"],
        [
            |ctx, _| Ok(0.5 * lg(ctx.p + 1.0)?),
            middle,
            |ctx, _| Ok(0.25 * lg(ctx.p + 1.0)? + 1.0),
        ],
        [cut(1.0, true), cut(ctx.p + 1.0, false)],
    )
}

/// Two-receiver equivalent-state outer bound; the last branch carries `+1/2`
/// where the independent-state version carries `+1`.
pub(crate) fn es_outer_two_user(ctx: &Ctx) -> Piecewise {
    three(
        ["{g}≤1", "middle", "{g}≥P+1"],
        [
            |ctx, _| Ok(0.5 * lg(ctx.p + 1.0)?),
            |ctx, x| Ok(0.5 * lg(ctx.p + x + 1.0)? - 0.25 * lg(x)? + 0.5),
            |ctx, _| Ok(0.25 * lg(ctx.p + 1.0)? + 0.5),
        ],
        [cut(1.0, true), cut(ctx.p + 1.0, false)],
    )
}

pub(crate) fn two_user_inner(ctx: &Ctx) -> Piecewise {
    three(
        ["{g}<1", "middle", "{g}≥P+1"],
        [
            |ctx, x| Ok(0.5 * lg(1.0 + ctx.p / (x + 1.0))?),
            |ctx, x| Ok(0.5 * lg(1.0 + x + ctx.p)? - 0.25 * lg(x)? - 0.5),
            |ctx, _| Ok(0.25 * lg(ctx.p + 1.0)?),
        ],
        [cut(1.0, false), cut(ctx.p + 1.0, false)],
    )
}

pub(crate) fn m_user_inner(ctx: &Ctx, form: InnerForm) -> Piecewise {
    let middle: super::piecewise::Formula = match form {
        InnerForm::Stated => {
            |ctx, x| Ok(0.5 * lg(ctx.p + x + 1.0)? - ctx.tail_weight() * lg(x)? - 0.5)
        }
        InnerForm::Optimal => |ctx, x| {
            let m = ctx.m;
            Ok(0.5 * lg(ctx.p + x + 1.0)? - ctx.tail_weight() * lg(x)?
                + ctx.tail_weight() * lg(m - 1.0)?
                - 0.5 * lg(m)?)
        },
    };
    three(
        ["{g}<M−1", "middle", "{g}>(M−1)(P+1)"],
        [
            |ctx, x| Ok(0.5 * lg(1.0 + ctx.p / (1.0 + x))?),
            middle,
            |ctx, _| Ok(lg(1.0 + ctx.p)? / (2.0 * ctx.m)),
        ],
        [cut(ctx.m - 1.0, false), cut(ctx.upper_cut(), true)],
    )
}

/// Outer bound before the gain minimization.
pub(crate) fn m_user_outer_free(ctx: &Ctx, x: f64) -> Result<f64> {
    Ok(0.5 * lg(1.0 + ctx.p + x)? - ctx.tail_weight() * lg(x)? + 1.5)
}

pub(crate) fn m_user_outer(ctx: &Ctx, variant: OuterVariant) -> Piecewise {
    match variant {
        OuterVariant::TheoremStatement => three(
            ["{g}≤M−1", "middle", "{g}>(M−1)(P+1)"],
            [
                |ctx, x| Ok(0.5 * lg(1.0 + ctx.p / (1.0 + x))? + 2.25),
                |ctx, x| Ok(lg(1.0 + ctx.p)? / (2.0 * ctx.m) + ctx.tail_weight() * lg(x)? + 1.5),
                |ctx, _| Ok(lg(1.0 + ctx.p)? / (2.0 * ctx.m) + 2.0),
            ],
            [cut(ctx.m - 1.0, true), cut(ctx.upper_cut(), true)],
        ),
        OuterVariant::Appendix => three(
            ["{g}≤M−1", "middle", "{g}>(M−1)(P+1) (clamped)"],
            [
                |ctx, x| Ok(0.5 * lg(1.0 + ctx.p / (1.0 + x))? + 0.25 + 2.0),
                m_user_outer_free,
                |ctx, _| m_user_outer_free(ctx, ctx.upper_cut()),
            ],
            [cut(ctx.m - 1.0, true), cut(ctx.upper_cut(), true)],
        ),
    }
}
