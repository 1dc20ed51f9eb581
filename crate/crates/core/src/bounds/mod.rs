//! Closed-form inner and outer capacity bounds, in bits per channel use.
//!
//! Every bound is a piecewise expression in the squared state gain `c²` (for
//! equivalent states, the effective `c²ρ̄⁺`). Branch tables live in
//! [`tables`]; this module selects the right table for a [`Bound`], checks that
//! the channel model matches, and packages the result.

mod delta;
mod piecewise;
mod tables;

pub use delta::{conditional_variances_dense, delta_conditional_variances, delta_covariance};
pub use piecewise::Jump;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ChannelParams;
use piecewise::{Ctx, Piecewise};

/// Which piece of a piecewise bound was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    Single,
    Low,
    Middle,
    High,
}

/// Provenance of the expression that produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Closed-form capacity, no bounding involved.
    Exact,
    TheoremStatement,
    AppendixLoosened,
    AppendixForm,
    RawUnoptimized,
    /// Inner bound at the exact optimal power split.
    Optimized,
}

impl Variant {
    pub fn label(&self) -> &'static str {
        match self {
            Variant::Exact => "exact",
            Variant::TheoremStatement => "theorem-statement",
            Variant::AppendixLoosened => "appendix-loosened",
            Variant::AppendixForm => "appendix-form",
            Variant::RawUnoptimized => "raw-unoptimized",
            Variant::Optimized => "optimized",
        }
    }
}

/// Selects between the outer bound as stated in the theorems and the form
/// produced by the converse derivation (loosened middle branch for two
/// receivers, gain-minimized form for M receivers).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum OuterVariant {
    TheoremStatement,
    #[default]
    Appendix,
}

impl OuterVariant {
    pub fn label(&self) -> &'static str {
        match self {
            OuterVariant::TheoremStatement => "theorem-statement",
            OuterVariant::Appendix => "appendix",
        }
    }
}

/// M-receiver inner bound: the stated closed form (middle-branch constant
/// `-1/2`) or the value at the exact optimal power split (constant
/// `((M-1)/2M) log(M-1) - 1/2 log M`, which is `-1/2` at `M = 2` and larger
/// beyond).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum InnerForm {
    #[default]
    Stated,
    Optimal,
}

impl InnerForm {
    pub fn label(&self) -> &'static str {
        match self {
            InnerForm::Stated => "stated",
            InnerForm::Optimal => "optimal",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundResult {
    pub value: f64,
    pub branch: Branch,
    /// Human-readable regime, e.g. `c²≤1` or `middle`.
    pub branch_label: String,
    pub variant: Variant,
    /// `None` only for the state-free AWGN benchmark.
    pub params: Option<ChannelParams>,
}

/// Power split between the state-as-noise layer (`alpha`) and the precoded
/// layer (`alpha_bar`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerSplit {
    pub alpha_bar: f64,
    pub alpha: f64,
}

impl PowerSplit {
    pub fn new(alpha_bar: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha_bar) {
            return Err(Error::InvalidSplit(alpha_bar));
        }
        Ok(PowerSplit {
            alpha_bar,
            alpha: 1.0 - alpha_bar,
        })
    }
}

/// Every bound family the crate evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    Awgn,
    LapidothOuter2,
    LapidothInner2,
    LapidothOuterM,
    TwoUserOuter(OuterVariant),
    TwoUserInner,
    MUserOuter(OuterVariant),
    MUserInner(InnerForm),
    EsOuter(OuterVariant),
    EsInner(InnerForm),
}

impl Bound {
    pub fn name(&self) -> String {
        match self {
            Bound::Awgn => "awgn".into(),
            Bound::LapidothOuter2 => "lapidoth-outer-2".into(),
            Bound::LapidothInner2 => "lapidoth-inner-2".into(),
            Bound::LapidothOuterM => "lapidoth-outer-m".into(),
            Bound::TwoUserOuter(v) => format!("two-user-outer/{}", v.label()),
            Bound::TwoUserInner => "two-user-inner".into(),
            Bound::MUserOuter(v) => format!("m-user-outer/{}", v.label()),
            Bound::MUserInner(f) => format!("m-user-inner/{}", f.label()),
            Bound::EsOuter(v) => format!("es-outer/{}", v.label()),
            Bound::EsInner(f) => format!("es-inner/{}", f.label()),
        }
    }

    pub fn is_inner(&self) -> bool {
        matches!(
            self,
            Bound::LapidothInner2 | Bound::TwoUserInner | Bound::MUserInner(_) | Bound::EsInner(_)
        )
    }

    pub fn variant(&self, m: usize) -> Variant {
        match self {
            Bound::Awgn => Variant::Exact,
            Bound::LapidothOuter2 | Bound::LapidothInner2 | Bound::LapidothOuterM => {
                Variant::TheoremStatement
            }
            Bound::TwoUserOuter(OuterVariant::TheoremStatement)
            | Bound::MUserOuter(OuterVariant::TheoremStatement)
            | Bound::EsOuter(OuterVariant::TheoremStatement) => Variant::TheoremStatement,
            Bound::TwoUserOuter(OuterVariant::Appendix) => Variant::AppendixLoosened,
            Bound::MUserOuter(OuterVariant::Appendix) | Bound::EsOuter(OuterVariant::Appendix) => {
                Variant::AppendixForm
            }
            Bound::TwoUserInner => Variant::Optimized,
            Bound::MUserInner(InnerForm::Optimal) | Bound::EsInner(InnerForm::Optimal) => {
                Variant::Optimized
            }
            Bound::MUserInner(InnerForm::Stated) | Bound::EsInner(InnerForm::Stated) => {
                if m == 2 {
                    Variant::Optimized
                } else {
                    Variant::AppendixForm
                }
            }
        }
    }

    /// Fails with `WrongModel` when `params` lies outside the bound's model.
    pub fn check_model(&self, params: &ChannelParams) -> Result<()> {
        let two_user = matches!(
            self,
            Bound::LapidothOuter2
                | Bound::LapidothInner2
                | Bound::TwoUserOuter(_)
                | Bound::TwoUserInner
        );
        let independent = two_user
            || matches!(
                self,
                Bound::LapidothOuterM | Bound::MUserOuter(_) | Bound::MUserInner(_)
            );
        if two_user && params.m != 2 {
            return Err(Error::WrongModel(format!(
                "{} needs M = 2, got M = {}",
                self.name(),
                params.m
            )));
        }
        if independent && params.rho != 0.0 {
            return Err(Error::WrongModel(format!(
                "{} needs independent states, got rho = {}",
                self.name(),
                params.rho
            )));
        }
        Ok(())
    }

    fn table(&self, ctx: &Ctx) -> Piecewise {
        match *self {
            Bound::Awgn => tables::awgn(),
            Bound::LapidothOuter2 => tables::lapidoth_outer_2(),
            Bound::LapidothInner2 => tables::lapidoth_inner_2(ctx),
            Bound::LapidothOuterM => tables::lapidoth_outer_m(ctx),
            Bound::TwoUserOuter(v) => tables::two_user_outer(ctx, v),
            Bound::TwoUserInner => tables::two_user_inner(ctx),
            Bound::MUserOuter(v) => tables::m_user_outer(ctx, v),
            Bound::MUserInner(f) => tables::m_user_inner(ctx, f),
            Bound::EsOuter(OuterVariant::TheoremStatement) if ctx.m == 2.0 => {
                tables::es_outer_two_user(ctx)
            }
            Bound::EsOuter(v) => tables::m_user_outer(ctx, v),
            Bound::EsInner(_) if ctx.m == 2.0 => tables::two_user_inner(ctx),
            Bound::EsInner(f) => tables::m_user_inner(ctx, f),
        }
    }

    fn gain_symbol(&self) -> &'static str {
        match self {
            Bound::EsOuter(_) | Bound::EsInner(_) => "c²ρ̄⁺",
            _ => "c²",
        }
    }

    /// Argument of the branch table: `c²`, or `c²ρ̄⁺` for equivalent states.
    pub fn argument(&self, params: &ChannelParams) -> f64 {
        match self {
            Bound::EsOuter(_) | Bound::EsInner(_) => es_effective_gain(params).powi(2),
            _ => params.c2(),
        }
    }

    pub fn evaluate(&self, params: &ChannelParams) -> Result<BoundResult> {
        self.check_model(params)?;
        let ctx = Ctx {
            m: params.m as f64,
            p: params.p,
        };
        let table = self.table(&ctx);
        let (value, piece) = table.eval(&ctx, self.argument(params))?;
        Ok(BoundResult {
            value,
            branch: piece.branch,
            branch_label: piece.label.replace("{g}", self.gain_symbol()),
            variant: self.variant(params.m),
            params: Some(*params),
        })
    }

    /// Values of both adjacent branches at every branch point, for `(M, P)`.
    pub fn jumps(&self, m: usize, p: f64) -> Result<Vec<Jump>> {
        let ctx = Ctx { m: m as f64, p };
        self.table(&ctx).jumps(&ctx)
    }
}

/// A branch point where adjacent closed forms disagree by more than the
/// report threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discontinuity {
    pub bound: String,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "P")]
    pub p: f64,
    pub jump: Jump,
}

/// Every jump above [`crate::tolerance::JUMP_REPORT`] among `bounds` at `(M, P)`.
pub fn continuity_report(bounds: &[Bound], m: usize, p: f64) -> Result<Vec<Discontinuity>> {
    let mut out = Vec::new();
    for b in bounds {
        for jump in b.jumps(m, p)? {
            if jump.size().abs() > crate::tolerance::JUMP_REPORT {
                out.push(Discontinuity {
                    bound: b.name(),
                    m,
                    p,
                    jump,
                });
            }
        }
    }
    Ok(out)
}

pub fn awgn_capacity(p: f64) -> Result<BoundResult> {
    if !(p.is_finite() && p > 0.0) {
        return Err(Error::InvalidPower(p));
    }
    let ctx = Ctx { m: 1.0, p };
    let (value, _) = tables::awgn().eval(&ctx, 0.0)?;
    Ok(BoundResult {
        value,
        branch: Branch::Single,
        branch_label: "n/a".into(),
        variant: Variant::Exact,
        params: None,
    })
}

pub fn lapidoth_outer_2(params: &ChannelParams) -> Result<BoundResult> {
    Bound::LapidothOuter2.evaluate(params)
}

pub fn lapidoth_inner_2(params: &ChannelParams) -> Result<BoundResult> {
    Bound::LapidothInner2.evaluate(params)
}

pub fn lapidoth_outer_m(params: &ChannelParams) -> Result<BoundResult> {
    Bound::LapidothOuterM.evaluate(params)
}

pub fn ccdp2_outer(params: &ChannelParams, variant: OuterVariant) -> Result<BoundResult> {
    Bound::TwoUserOuter(variant).evaluate(params)
}

pub fn ccdp2_inner(params: &ChannelParams) -> Result<BoundResult> {
    Bound::TwoUserInner.evaluate(params)
}

pub fn ccdp_m_outer(params: &ChannelParams, variant: OuterVariant) -> Result<BoundResult> {
    Bound::MUserOuter(variant).evaluate(params)
}

pub fn ccdp_m_inner(params: &ChannelParams, form: InnerForm) -> Result<BoundResult> {
    Bound::MUserInner(form).evaluate(params)
}

pub fn ccdp_es_outer(params: &ChannelParams, variant: OuterVariant) -> Result<BoundResult> {
    Bound::EsOuter(variant).evaluate(params)
}

pub fn ccdp_es_inner(params: &ChannelParams, form: InnerForm) -> Result<BoundResult> {
    Bound::EsInner(form).evaluate(params)
}

/// `c sqrt(1 - max(rho, 0))`: the state amplitude left after the common
/// component has been precoded away.
pub fn es_effective_gain(params: &ChannelParams) -> f64 {
    params.c * (1.0 - params.rho.max(0.0)).sqrt()
}

/// Optimal precoded-power fraction `clamp((c²+1-M) / (P(M-1)), 0, 1)` at the
/// (effective) squared gain `c2`.
pub fn alpha_star(m: usize, p: f64, c2: f64) -> PowerSplit {
    let m = m as f64;
    let alpha_bar = ((c2 + 1.0 - m) / (p * (m - 1.0))).clamp(0.0, 1.0);
    PowerSplit {
        alpha_bar,
        alpha: 1.0 - alpha_bar,
    }
}

/// [`alpha_star`] at the effective gain of `params` (the plain gain when
/// `rho <= 0`).
pub fn alpha_star_m(params: &ChannelParams) -> PowerSplit {
    alpha_star(params.m, params.p, es_effective_gain(params).powi(2))
}

/// Superposition rate `1/2 log(1 + aP/(c²+āP+1)) + (1/2M) log(1+āP)` for a
/// given split. The effective gain is used, so for `rho > 0` this is the rate
/// of the scheme that also precodes the common state component.
pub fn ccdp_m_inner_raw(params: &ChannelParams, alpha_bar: f64) -> Result<BoundResult> {
    let split = PowerSplit::new(alpha_bar)?;
    let value = m_user_raw_rate(params.m, params.p, es_effective_gain(params).powi(2), split);
    Ok(BoundResult {
        value,
        branch: Branch::Single,
        branch_label: "n/a".into(),
        variant: Variant::RawUnoptimized,
        params: Some(*params),
    })
}

pub(crate) fn m_user_raw_rate(m: usize, p: f64, c2: f64, split: PowerSplit) -> f64 {
    let (a, ab) = (split.alpha, split.alpha_bar);
    0.5 * (1.0 + a * p / (c2 + ab * p + 1.0)).log2() + (1.0 + ab * p).log2() / (2.0 * m as f64)
}

/// Two-receiver outer bound before minimizing over the genie gain,
/// `1/2 log(P+c²+1) - 1/4 log c² + 1/2`. Its minimum over `c² ∈ (0, C]` sits at
/// `min(C, P+1)`.
pub fn two_user_outer_unoptimized(p: f64, c2: f64) -> Result<f64> {
    Ok(0.5 * piecewise::lg(p + c2 + 1.0)? - 0.25 * piecewise::lg(c2)? + 0.5)
}

/// M-receiver outer bound before minimizing over the genie gain,
/// `1/2 log(1+P+c²) - ((M-1)/2M) log c² + 3/2`.
pub fn m_user_outer_unoptimized(m: usize, p: f64, c2: f64) -> Result<f64> {
    tables::m_user_outer_free(&Ctx { m: m as f64, p }, c2)
}
