//! Typed parsing of the resolved config and the six commands.

use std::fmt::Write as _;
use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};

use super::{CliError, Command, RunConfig, EXIT_NOT_CERTIFIED, EXIT_OK};
use crate::bounds::{self, Bound, InnerForm, OuterVariant};
use crate::gap::{
    self, certify_theorem, fig3_curve, monotonicity_audit, optimized_families, run_sweep,
    Fig3Source, GapReport, Model, RhoAxis, SweepGrid, Theorem,
};
use crate::model::ChannelParams;
use crate::montecarlo::{self, Experiment, Layout, MiEstimate, Target};

pub(super) struct Outcome {
    pub body: Vec<u8>,
    pub exit_code: i32,
}

const STANDARD_P: &str = "3.01:10000:50:log";
const STANDARD_C2: &str = "3.01:1000000:50:log";

/// Per-command defaults; `probe` (file overlaid by flags) picks the theorem
/// whose grid certify defaults to.
pub(super) fn defaults(command: Command, probe: &RunConfig) -> Result<RunConfig, CliError> {
    let mut d = RunConfig::default();
    d.set("variant", "appendix");
    d.set("inner", "stated");
    d.set("format", "csv");
    d.set("seed", "0");
    if let Ok(t) = std::env::var("CCDP_THREADS") {
        d.set("threads", t);
    }
    let point = |d: &mut RunConfig| {
        d.set("M", "2");
        d.set("P", "10");
        d.set("c2", "4");
        d.set("rho", "0");
    };
    match command {
        Command::Bounds => {
            point(&mut d);
            d.set("model", "auto");
        }
        Command::Sweep => {
            d.set("M", "2");
            d.set("P", STANDARD_P);
            d.set("c2", STANDARD_C2);
            d.set("rho", "0");
            d.set("model", "auto");
        }
        Command::Certify => {
            let theorem = parse_theorem(probe.get("theorem").unwrap_or("Th3"))?;
            d.set("theorem", format!("{theorem:?}"));
            let (m, rho) = match theorem {
                Theorem::Th3 => ("2", "0"),
                Theorem::Th4 => ("2:8", "0"),
                Theorem::Th5 => ("2", "feasible:13"),
                Theorem::Th6 => ("2:8", "feasible:13"),
            };
            d.set("M", m);
            d.set("rho", rho);
            d.set("P", STANDARD_P);
            d.set("c2", STANDARD_C2);
            d.set("model", model_name(theorem.model()));
        }
        Command::Fig3 => {
            d.set("P", "10");
            d.set("c", "0.1:10:200:lin");
            d.set("source", "lapidoth");
        }
        Command::Simulate => {
            point(&mut d);
            d.set("alpha-bar", "auto");
            d.set("samples", "1000000");
            d.set("target", "scheme");
        }
        Command::Audit => {
            d.set("M", "2:8");
            d.set("P", STANDARD_P);
            d.set("c2", STANDARD_C2);
            d.set("rho", "feasible:13");
            d.set("inner", "optimal");
        }
    }
    Ok(d)
}

fn usage(key: &str, value: &str, expected: &str) -> CliError {
    CliError::Usage(format!(
        "invalid value `{value}` for --{key} (expected {expected})"
    ))
}

fn parse_f64(key: &str, s: &str) -> Result<f64, CliError> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| usage(key, s, "a number"))
}

/// `a,b,c` or `lo:hi:n:log|lin`.
pub(super) fn parse_axis(key: &str, s: &str) -> Result<Vec<f64>, CliError> {
    let expected = "a comma list or lo:hi:n:log|lin";
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [single] => single.split(',').map(|v| parse_f64(key, v)).collect(),
        [lo, hi, n, kind] => {
            let (lo, hi) = (parse_f64(key, lo)?, parse_f64(key, hi)?);
            let n: usize = n
                .trim()
                .parse()
                .ok()
                .filter(|&n| n >= 1)
                .ok_or_else(|| usage(key, s, expected))?;
            match kind.trim() {
                "log" if lo > 0.0 && hi > 0.0 => Ok(gap::logspace(lo, hi, n)),
                "lin" => Ok(gap::linspace(lo, hi, n)),
                _ => Err(usage(key, s, expected)),
            }
        }
        _ => Err(usage(key, s, expected)),
    }
}

/// `2,3,5` or `lo:hi` (inclusive).
fn parse_m(s: &str) -> Result<Vec<usize>, CliError> {
    let bad = || usage("M", s, "integers as a comma list or lo:hi");
    let mut out = Vec::new();
    for part in s.split(',') {
        match part.split_once(':') {
            Some((lo, hi)) => {
                let lo: usize = lo.trim().parse().map_err(|_| bad())?;
                let hi: usize = hi.trim().parse().map_err(|_| bad())?;
                if lo > hi {
                    return Err(bad());
                }
                out.extend(lo..=hi);
            }
            None => out.push(part.trim().parse().map_err(|_| bad())?),
        }
    }
    Ok(out)
}

fn parse_rho(s: &str) -> Result<RhoAxis, CliError> {
    match s.strip_prefix("feasible:") {
        Some(n) => n
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n >= 1)
            .map(RhoAxis::Feasible)
            .ok_or_else(|| usage("rho", s, "feasible:n with n >= 1")),
        None => Ok(RhoAxis::Values(parse_axis("rho", s)?)),
    }
}

fn parse_theorem(s: &str) -> Result<Theorem, CliError> {
    Theorem::from_str(s, true).map_err(|_| usage("theorem", s, "one of Th3, Th4, Th5, Th6"))
}

fn parse_variant(s: &str) -> Result<OuterVariant, CliError> {
    match s {
        "appendix" | "appendix-loosened" | "appendix-form" => Ok(OuterVariant::Appendix),
        "theorem-statement" => Ok(OuterVariant::TheoremStatement),
        _ => Err(usage(
            "variant",
            s,
            "appendix, appendix-loosened, appendix-form or theorem-statement",
        )),
    }
}

fn parse_inner(s: &str) -> Result<InnerForm, CliError> {
    match s {
        "stated" => Ok(InnerForm::Stated),
        "optimal" => Ok(InnerForm::Optimal),
        _ => Err(usage("inner", s, "stated or optimal")),
    }
}

fn model_name(m: Model) -> &'static str {
    match m {
        Model::TwoUser => "two-user",
        Model::MUser => "m-user",
        Model::Es => "es",
    }
}

fn parse_model(s: &str) -> Result<Option<Model>, CliError> {
    match s {
        "auto" => Ok(None),
        "two-user" => Ok(Some(Model::TwoUser)),
        "m-user" => Ok(Some(Model::MUser)),
        "es" => Ok(Some(Model::Es)),
        _ => Err(usage("model", s, "auto, two-user, m-user or es")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

/// Typed view of a resolved config.
struct Resolved<'a> {
    cfg: &'a RunConfig,
    format: Format,
    seed: u64,
    outer: OuterVariant,
    inner: InnerForm,
}

impl<'a> Resolved<'a> {
    fn new(cfg: &'a RunConfig) -> Result<Self, CliError> {
        let format = match cfg.get("format").unwrap_or("csv") {
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => return Err(usage("format", other, "csv or json")),
        };
        let seed_s = cfg.get("seed").unwrap_or("0");
        let seed = seed_s
            .parse()
            .map_err(|_| usage("seed", seed_s, "a non-negative integer"))?;
        Ok(Resolved {
            cfg,
            format,
            seed,
            outer: parse_variant(cfg.get("variant").unwrap_or("appendix"))?,
            inner: parse_inner(cfg.get("inner").unwrap_or("stated"))?,
        })
    }

    fn required(&self, key: &str) -> Result<&str, CliError> {
        self.cfg
            .get(key)
            .ok_or_else(|| CliError::Usage(format!("missing --{key}")))
    }

    fn m(&self) -> Result<Vec<usize>, CliError> {
        parse_m(self.required("M")?)
    }

    fn p(&self) -> Result<Vec<f64>, CliError> {
        parse_axis("P", self.required("P")?)
    }

    fn rho(&self) -> Result<RhoAxis, CliError> {
        parse_rho(self.required("rho")?)
    }

    /// Gain axis from `c`, or from `c2` by square roots.
    fn c(&self) -> Result<Vec<f64>, CliError> {
        if let Some(c) = self.cfg.get("c") {
            return parse_axis("c", c);
        }
        let c2 = parse_axis("c2", self.required("c2")?)?;
        if let Some(&bad) = c2.iter().find(|&&x| !(x.is_finite() && x >= 0.0)) {
            return Err(crate::Error::InvalidGain(bad).into());
        }
        Ok(c2.iter().map(|x| x.sqrt()).collect())
    }

    fn model(&self, m: &[usize], rho: &RhoAxis) -> Result<Model, CliError> {
        if let Some(model) = parse_model(self.cfg.get("model").unwrap_or("auto"))? {
            return Ok(model);
        }
        let independent = matches!(rho, RhoAxis::Values(v) if v.iter().all(|&r| r == 0.0));
        Ok(match (independent, m.iter().all(|&m| m == 2)) {
            (true, true) => Model::TwoUser,
            (true, false) => Model::MUser,
            (false, _) => Model::Es,
        })
    }

    fn grid(&self) -> Result<SweepGrid, CliError> {
        let (m, rho) = (self.m()?, self.rho()?);
        let model = self.model(&m, &rho)?;
        Ok(SweepGrid::new(
            model,
            m,
            self.p()?,
            self.c()?,
            rho,
            self.outer,
            self.inner,
        )?)
    }
}

pub(super) fn run(
    command: Command,
    cfg: &RunConfig,
    err: &mut dyn Write,
) -> Result<Outcome, CliError> {
    let r = Resolved::new(cfg)?;
    match command {
        Command::Bounds => bounds_cmd(&r, err),
        Command::Sweep => sweep_cmd(&r, err),
        Command::Certify => certify_cmd(&r, err),
        Command::Fig3 => fig3_cmd(&r, err),
        Command::Simulate => simulate_cmd(&r, err),
        Command::Audit => audit_cmd(&r, err),
    }
}

fn metadata_header(r: &Resolved) -> String {
    let mut h = String::new();
    writeln!(h, "# ccdp {}", env!("CARGO_PKG_VERSION")).unwrap();
    writeln!(h, "# config-sha256 {}", r.cfg.hash()).unwrap();
    writeln!(h, "# seed {}", r.seed).unwrap();
    for (k, v) in r.cfg.echoed() {
        writeln!(h, "# {k} = {v}").unwrap();
    }
    h
}

fn json_body(
    r: &Resolved,
    results: Value,
    max_gap: Option<f64>,
    certified: Option<bool>,
    warnings: &[String],
) -> Vec<u8> {
    let mut config = r.cfg.to_json();
    config["tool-version"] = json!(env!("CARGO_PKG_VERSION"));
    config["config-sha256"] = json!(r.cfg.hash());
    let doc = json!({
        "config": config,
        "results": results,
        "maxGap": max_gap,
        "certified": certified,
        "warnings": warnings,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

fn csv_body(r: &Resolved, table: &[u8]) -> Vec<u8> {
    let mut body = metadata_header(r).into_bytes();
    body.extend_from_slice(table);
    body
}

fn gap_csv(report: &GapReport) -> Vec<u8> {
    let mut buf = Vec::new();
    gap::write_csv(report, &mut buf).expect("write to vec");
    buf
}

fn gap_results(report: &GapReport) -> Value {
    json!({
        "grid": report.grid,
        "points": report.rows.len(),
        "argmax": report.argmax,
        "minGap": report.min_gap,
        "claimedGap": report.claimed_gap,
        "rows": report.rows,
    })
}

fn bounds_cmd(r: &Resolved, err: &mut dyn Write) -> Result<Outcome, CliError> {
    let grid = r.grid()?;
    // surface invalid points as errors rather than skipping them
    for &m in &grid.m {
        if let RhoAxis::Values(v) = &grid.rho {
            for &rho in v {
                ChannelParams::new(m, grid.p[0], grid.c[0], rho)?;
            }
        }
    }
    let report = run_sweep(&grid);
    if let Some(row) = report.rows.iter().find(|row| row.error.is_some()) {
        return Err(CliError::Usage(row.error.clone().unwrap_or_default()));
    }
    let single = report.rows.len() == 1;
    for row in &report.rows {
        let prefix = if single {
            String::new()
        } else {
            format!(
                "M={} P={} c2={} rho={}: ",
                row.params.m,
                row.params.p,
                row.params.c2(),
                row.params.rho
            )
        };
        writeln!(
            err,
            "{prefix}inner {:.6} outer({}) {:.6} gap {:.6}",
            row.inner.unwrap_or(f64::NAN),
            r.outer.label(),
            row.outer.unwrap_or(f64::NAN),
            row.gap.unwrap_or(f64::NAN)
        )?;
    }
    let body = match r.format {
        Format::Csv => csv_body(r, &gap_csv(&report)),
        Format::Json => {
            let catalog: Vec<Value> = report
                .rows
                .iter()
                .map(|row| {
                    json!({
                        "params": row.params,
                        "inner": row.inner,
                        "outer": row.outer,
                        "gap": row.gap,
                        "innerBranch": row.inner_branch,
                        "outerBranch": row.outer_branch,
                        "bounds": bound_catalog(&row.params),
                    })
                })
                .collect();
            json_body(
                r,
                Value::Array(catalog),
                report.max_gap,
                None,
                &report.warnings,
            )
        }
    };
    Ok(Outcome {
        body,
        exit_code: EXIT_OK,
    })
}

/// Every bound that applies to `params`.
fn bound_catalog(params: &ChannelParams) -> Vec<Value> {
    let mut all = vec![
        Bound::LapidothOuter2,
        Bound::LapidothInner2,
        Bound::LapidothOuterM,
    ];
    for v in [OuterVariant::TheoremStatement, OuterVariant::Appendix] {
        all.extend([
            Bound::TwoUserOuter(v),
            Bound::MUserOuter(v),
            Bound::EsOuter(v),
        ]);
    }
    all.push(Bound::TwoUserInner);
    for f in [InnerForm::Stated, InnerForm::Optimal] {
        all.extend([Bound::MUserInner(f), Bound::EsInner(f)]);
    }
    let mut out = vec![
        json!({"bound": "awgn", "value": bounds::awgn_capacity(params.p).map(|b| b.value).ok()}),
    ];
    for b in all {
        if let Ok(res) = b.evaluate(params) {
            out.push(json!({
                "bound": b.name(),
                "value": res.value,
                "branch": res.branch_label,
                "variant": res.variant.label(),
            }));
        }
    }
    out
}

fn sweep_cmd(r: &Resolved, err: &mut dyn Write) -> Result<Outcome, CliError> {
    let grid = r.grid()?;
    writeln!(err, "grid: {} points", grid.size())?;
    let report = run_sweep(&grid);
    summarize_gap(&report, err)?;
    let body = match r.format {
        Format::Csv => csv_body(r, &gap_csv(&report)),
        Format::Json => json_body(
            r,
            gap_results(&report),
            report.max_gap,
            None,
            &report.warnings,
        ),
    };
    Ok(Outcome {
        body,
        exit_code: EXIT_OK,
    })
}

fn summarize_gap(report: &GapReport, err: &mut dyn Write) -> Result<(), CliError> {
    if let (Some(g), Some(p)) = (report.max_gap, report.argmax) {
        writeln!(
            err,
            "maxGap={g:.6} at M={} P={} c2={} rho={}",
            p.m,
            p.p,
            p.c2(),
            p.rho
        )?;
    }
    for w in &report.warnings {
        writeln!(err, "warning: {w}")?;
    }
    Ok(())
}

fn certify_cmd(r: &Resolved, err: &mut dyn Write) -> Result<Outcome, CliError> {
    let theorem = parse_theorem(r.required("theorem")?)?;
    let grid = r.grid()?;
    writeln!(err, "grid: {} points", grid.size())?;
    let report = certify_theorem(theorem, &grid)?;
    let certified = report.certified.unwrap_or(false);
    writeln!(
        err,
        "maxGap={:.6} certified={certified}",
        report.max_gap.unwrap_or(f64::NAN)
    )?;
    if let Some(p) = report.argmax {
        writeln!(
            err,
            "argmax M={} P={} c2={} rho={}",
            p.m,
            p.p,
            p.c2(),
            p.rho
        )?;
    }
    for w in &report.warnings {
        writeln!(err, "warning: {w}")?;
    }
    let exit_code = if !certified && r.outer == OuterVariant::Appendix {
        EXIT_NOT_CERTIFIED
    } else {
        EXIT_OK
    };
    let body = match r.format {
        Format::Csv => csv_body(r, &gap_csv(&report)),
        Format::Json => json_body(
            r,
            gap_results(&report),
            report.max_gap,
            report.certified,
            &report.warnings,
        ),
    };
    Ok(Outcome { body, exit_code })
}

fn fig3_cmd(r: &Resolved, err: &mut dyn Write) -> Result<Outcome, CliError> {
    let p = r.p()?;
    let [p] = p.as_slice() else {
        return Err(CliError::Usage("fig3 takes a single --P".into()));
    };
    if !(p.is_finite() && *p > 0.0) {
        return Err(crate::Error::InvalidPower(*p).into());
    }
    let source = match r.cfg.get("source").unwrap_or("lapidoth") {
        "lapidoth" => Fig3Source::Lapidoth,
        "two-user" => Fig3Source::TwoUser,
        other => return Err(usage("source", other, "lapidoth or two-user")),
    };
    let cs = r.c()?;
    let rows = fig3_curve(*p, &cs, source)?;
    if let Some(min) = rows
        .iter()
        .min_by(|a, b| a.raw_outer.total_cmp(&b.raw_outer))
    {
        writeln!(
            err,
            "fig3: {} rows, raw outer minimum {:.6} at c={}",
            rows.len(),
            min.raw_outer,
            min.c
        )?;
    }
    let body = match r.format {
        Format::Csv => {
            let mut t = String::from("c,raw_outer,optimized_outer,argmin_c\n");
            for row in &rows {
                writeln!(
                    t,
                    "{},{},{},{}",
                    row.c, row.raw_outer, row.optimized_outer, row.argmin_c
                )
                .unwrap();
            }
            csv_body(r, t.as_bytes())
        }
        Format::Json => json_body(
            r,
            serde_json::to_value(&rows).expect("serializable"),
            None,
            None,
            &[],
        ),
    };
    Ok(Outcome {
        body,
        exit_code: EXIT_OK,
    })
}

#[derive(Serialize)]
struct SimRow {
    #[serde(flatten)]
    params: ChannelParams,
    alpha_bar: f64,
    target: &'static str,
    receiver: String,
    #[serde(flatten)]
    estimate: MiEstimate,
}

fn simulate_cmd(r: &Resolved, err: &mut dyn Write) -> Result<Outcome, CliError> {
    let target = match r.required("target")? {
        "san" => Target::San,
        "gp" => Target::Gp,
        "scheme" => Target::Scheme,
        other => return Err(usage("target", other, "san, gp or scheme")),
    };
    let samples_s = r.required("samples")?;
    let samples: usize = samples_s
        .parse()
        .map_err(|_| usage("samples", samples_s, "an integer >= 1000"))?;
    let alpha = r.required("alpha-bar")?;
    let fixed_alpha = match alpha {
        "auto" => None,
        a => Some(parse_f64("alpha-bar", a)?),
    };
    let grid = r.grid()?;
    let mut rows = Vec::new();
    for params in grid.points() {
        let ab = fixed_alpha.unwrap_or_else(|| bounds::alpha_star_m(&params).alpha_bar);
        let cfg = montecarlo::SimulationConfig::new(params, samples, r.seed, ab, target)?;
        let exp = Experiment::sample(Layout::new(params, ab)?, samples, r.seed)?;
        let mut push = |target: &'static str, receiver: String, estimate: MiEstimate| {
            rows.push(SimRow {
                params,
                alpha_bar: ab,
                target,
                receiver,
                estimate,
            })
        };
        match cfg.target {
            Target::San => {
                for m in 0..params.m {
                    push("san", (m + 1).to_string(), exp.san(m)?);
                }
            }
            Target::Gp => {
                for m in 0..params.m {
                    push("gp", (m + 1).to_string(), exp.gp(m, None)?);
                }
            }
            Target::Scheme => {
                let rate = exp.scheme()?;
                for (m, rr) in rate.per_receiver.iter().enumerate() {
                    push("scheme", (m + 1).to_string(), rr.combined);
                }
                push("scheme", "min".into(), rate.combined);
            }
        }
    }
    for row in &rows {
        let e = &row.estimate;
        writeln!(
            err,
            "{} receiver {}: {:.6} ± {:.6} (closed form {:.6}, z {:.2})",
            row.target, row.receiver, e.value, e.stderr, e.closed_form, e.z_score
        )?;
    }
    let body = match r.format {
        Format::Csv => {
            let mut t = String::from(
                "M,P,c,rho,alpha_bar,target,receiver,value,stderr,closed_form,z_score,samples\n",
            );
            for row in &rows {
                let (p, e) = (&row.params, &row.estimate);
                writeln!(
                    t,
                    "{},{},{},{},{},{},{},{},{},{},{},{}",
                    p.m,
                    p.p,
                    p.c,
                    p.rho,
                    row.alpha_bar,
                    row.target,
                    row.receiver,
                    e.value,
                    e.stderr,
                    e.closed_form,
                    e.z_score,
                    e.samples
                )
                .unwrap();
            }
            csv_body(r, t.as_bytes())
        }
        Format::Json => json_body(
            r,
            serde_json::to_value(&rows).expect("serializable"),
            None,
            None,
            &[],
        ),
    };
    Ok(Outcome {
        body,
        exit_code: EXIT_OK,
    })
}

fn audit_cmd(r: &Resolved, err: &mut dyn Write) -> Result<Outcome, CliError> {
    let grid = r.grid()?;
    let families: Vec<Bound> = optimized_families()
        .into_iter()
        .map(|b| match (b, r.outer, r.inner) {
            (Bound::TwoUserOuter(_), v, _) => Bound::TwoUserOuter(v),
            (Bound::MUserOuter(_), v, _) => Bound::MUserOuter(v),
            (Bound::EsOuter(_), v, _) => Bound::EsOuter(v),
            (Bound::MUserInner(_), _, f) => Bound::MUserInner(f),
            (Bound::EsInner(_), _, f) => Bound::EsInner(f),
            (b, _, _) => b,
        })
        .collect();
    writeln!(
        err,
        "grid: {} points x {} bound families",
        grid.size(),
        families.len()
    )?;
    let violations = monotonicity_audit(&grid, &families);
    let mut warnings = Vec::new();
    let mut discontinuities = Vec::new();
    for &m in &grid.m {
        for &p in &grid.p {
            let applicable: Vec<Bound> = families
                .iter()
                .copied()
                .filter(|b| !matches!(b, Bound::TwoUserOuter(_) | Bound::TwoUserInner) || m == 2)
                .collect();
            discontinuities.extend(bounds::continuity_report(&applicable, m, p)?);
        }
    }
    for d in &discontinuities {
        warnings.push(format!(
            "{} jumps by {:+.6} at gain argument {} (M={}, P={})",
            d.bound,
            d.jump.size(),
            d.jump.at,
            d.m,
            d.p
        ));
    }
    writeln!(
        err,
        "audit: {} monotonicity violations, {} branch-point jumps",
        violations.len(),
        discontinuities.len()
    )?;
    let body = match r.format {
        Format::Csv => {
            let mut t = String::from("bound,M,P,rho,c_low,c_high,value_low,value_high\n");
            for v in &violations {
                writeln!(
                    t,
                    "{},{},{},{},{},{},{},{}",
                    v.bound, v.m, v.p, v.rho, v.c_low, v.c_high, v.value_low, v.value_high
                )
                .unwrap();
            }
            csv_body(r, t.as_bytes())
        }
        Format::Json => json_body(
            r,
            json!({"violations": violations, "discontinuities": discontinuities}),
            None,
            None,
            &warnings,
        ),
    };
    Ok(Outcome {
        body,
        exit_code: EXIT_OK,
    })
}
