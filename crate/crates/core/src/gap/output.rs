//! Fixed-schema CSV for sweep rows.

use std::io::{self, Write};

use super::GapReport;

pub const CSV_HEADER: &str =
    "M,P,c,rho,variant,inner_bpcu,outer_bpcu,gap_bpcu,inner_branch,outer_branch";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Header row plus one line per grid point. Floats use the shortest
/// representation that round-trips. Failed points leave the value columns
/// empty and carry the error kind in `outer_branch`.
pub fn write_csv<W: Write>(report: &GapReport, out: &mut W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in &report.rows {
        let outer_branch = match &r.error {
            Some(e) => format!("error:{}", e.split(':').next().unwrap_or(e)),
            None => r.outer_branch.clone(),
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.params.m,
            r.params.p,
            r.params.c,
            r.params.rho,
            r.variant,
            opt(r.inner),
            opt(r.outer),
            opt(r.gap),
            r.inner_branch,
            outer_branch
        )?;
    }
    Ok(())
}
