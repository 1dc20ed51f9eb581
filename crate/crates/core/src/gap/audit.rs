//! Checks that bounds are non-increasing in the state gain.

use rayon::prelude::*;
use serde::Serialize;

use super::SweepGrid;
use crate::bounds::{Bound, InnerForm, OuterVariant};
use crate::model::ChannelParams;
use crate::tolerance;

/// An increase between two adjacent gains of one `(M, P, rho)` slice.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub bound: String,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "P")]
    pub p: f64,
    pub rho: f64,
    pub c_low: f64,
    pub c_high: f64,
    pub value_low: f64,
    pub value_high: f64,
}

/// Gain-optimized inner and outer bounds, all expected non-increasing in `c`.
pub fn optimized_families() -> Vec<Bound> {
    vec![
        Bound::TwoUserOuter(OuterVariant::Appendix),
        Bound::TwoUserInner,
        Bound::MUserOuter(OuterVariant::Appendix),
        Bound::MUserInner(InnerForm::Optimal),
        Bound::EsOuter(OuterVariant::Appendix),
        Bound::EsInner(InnerForm::Optimal),
    ]
}

/// Every adjacent-gain increase above [`tolerance::MONOTONE`] for each bound
/// in `families` over each `(M, P, rho)` slice of `grid`. Slices outside a
/// bound's model are skipped, as are points where it fails to evaluate.
pub fn monotonicity_audit(grid: &SweepGrid, families: &[Bound]) -> Vec<Violation> {
    let mut cs = grid.c.clone();
    cs.sort_by(f64::total_cmp);
    let mut slices = Vec::new();
    for &m in &grid.m {
        for &p in &grid.p {
            for rho in grid.rho.for_m(m) {
                for &b in families {
                    slices.push((b, m, p, rho));
                }
            }
        }
    }
    slices
        .into_par_iter()
        .flat_map_iter(|(bound, m, p, rho)| {
            let values: Vec<(f64, f64)> = cs
                .iter()
                .filter_map(|&c| {
                    let params = ChannelParams::new(m, p, c, rho).ok()?;
                    Some((c, bound.evaluate(&params).ok()?.value))
                })
                .collect();
            values
                .windows(2)
                .filter(|w| w[1].1 - w[0].1 > tolerance::MONOTONE)
                .map(|w| Violation {
                    bound: bound.name(),
                    m,
                    p,
                    rho,
                    c_low: w[0].0,
                    c_high: w[1].0,
                    value_low: w[0].1,
                    value_high: w[1].1,
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gap::{linspace, Model, RhoAxis};

    #[test]
    fn raw_single_letter_bound_is_flagged() {
        let grid = SweepGrid::new(
            Model::TwoUser,
            vec![2],
            vec![10.0],
            linspace(0.1, 10.0, 200),
            RhoAxis::Values(vec![0.0]),
            OuterVariant::Appendix,
            InnerForm::Stated,
        )
        .unwrap();
        assert!(!monotonicity_audit(&grid, &[Bound::LapidothOuter2]).is_empty());
    }

    #[test]
    fn fully_correlated_slice_is_flat() {
        let grid = SweepGrid::new(
            Model::Es,
            vec![2, 3, 6],
            vec![10.0],
            linspace(0.0, 30.0, 50),
            RhoAxis::Values(vec![1.0]),
            OuterVariant::Appendix,
            InnerForm::Stated,
        )
        .unwrap();
        let all = [
            Bound::EsOuter(OuterVariant::TheoremStatement),
            Bound::EsOuter(OuterVariant::Appendix),
            Bound::EsInner(InnerForm::Stated),
            Bound::EsInner(InnerForm::Optimal),
        ];
        assert!(monotonicity_audit(&grid, &all).is_empty());
    }

    #[test]
    fn statement_outer_is_flagged() {
        let grid = SweepGrid::standard(
            Model::MUser,
            vec![4],
            RhoAxis::Values(vec![0.0]),
            OuterVariant::TheoremStatement,
            InnerForm::Stated,
        );
        assert!(
            !monotonicity_audit(&grid, &[Bound::MUserOuter(OuterVariant::TheoremStatement)])
                .is_empty()
        );
    }
}
