//! `ccdp` command-line front end.
//!
//! ```text
//! ccdp <bounds|sweep|certify|fig3|simulate|audit> [--M ..] [--P ..] [--c2 ..|--c ..] [--rho ..] ...
//! ```
//!
//! Axis values are comma lists (`1,4,9`) or ranges `lo:hi:n:log|lin`; `--M`
//! also takes `lo:hi` and `--rho` also takes `feasible:n`. Every flag has a
//! config-file key of the same name. Precedence: flags, then `--config` file,
//! then per-command defaults (`CCDP_THREADS` seeds `threads`).

mod commands;
mod config;

pub use config::{RunConfig, KEYS};

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

/// Exit status for a successful run.
pub const EXIT_OK: i32 = 0;
/// Exit status when an appendix-variant certification fails its claimed gap.
pub const EXIT_NOT_CERTIFIED: i32 = 1;
/// Exit status for invalid input.
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Model(#[from] crate::Error),
    #[error("I/O: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Inner/outer bounds and gap at given points.
    Bounds,
    /// Gap over a parameter grid.
    Sweep,
    /// Constant-gap certification of a theorem over its grid.
    Certify,
    /// Raw and gain-minimized outer bound versus c.
    Fig3,
    /// Monte Carlo estimates of the scheme's rates.
    Simulate,
    /// Monotonicity in c and branch-point continuity.
    Audit,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Bounds => "bounds",
            Command::Sweep => "sweep",
            Command::Certify => "certify",
            Command::Fig3 => "fig3",
            Command::Simulate => "simulate",
            Command::Audit => "audit",
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "ccdp",
    version,
    about = "Capacity bounds and gap certification for the carbon-copy-onto-dirty-paper channel"
)]
struct Args {
    /// Command to run (may also come from the config file).
    command: Option<Command>,
    /// Number of receivers.
    #[arg(long = "M")]
    m: Option<String>,
    /// Transmit power.
    #[arg(long = "P")]
    p: Option<String>,
    /// Squared state gain.
    #[arg(long)]
    c2: Option<String>,
    /// State gain (alternative to --c2).
    #[arg(long)]
    c: Option<String>,
    /// Pairwise state correlation.
    #[arg(long)]
    rho: Option<String>,
    /// auto | two-user | m-user | es
    #[arg(long)]
    model: Option<String>,
    /// Th3 | Th4 | Th5 | Th6
    #[arg(long)]
    theorem: Option<String>,
    /// Outer bound form: appendix (alias appendix-loosened, appendix-form) | theorem-statement
    #[arg(long)]
    variant: Option<String>,
    /// M-receiver inner bound form: stated | optimal
    #[arg(long)]
    inner: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    /// Precoded power fraction, or `auto` for the optimal split.
    #[arg(long = "alpha-bar")]
    alpha_bar: Option<String>,
    /// san | gp | scheme
    #[arg(long)]
    target: Option<String>,
    /// fig3 curve: lapidoth | two-user
    #[arg(long)]
    source: Option<String>,
    /// csv | json
    #[arg(long)]
    format: Option<String>,
    /// Output file (default: standard output).
    #[arg(long)]
    output: Option<String>,
    /// Worker threads (default: $CCDP_THREADS, else all cores).
    #[arg(long)]
    threads: Option<String>,
    /// Config file with `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the fully resolved config and exit.
    #[arg(long)]
    dump_config: bool,
}

impl Args {
    fn flags(&self) -> RunConfig {
        let mut cfg = RunConfig::default();
        if let Some(c) = self.command {
            cfg.set("command", c.name());
        }
        let pairs: [(&str, &Option<String>); 17] = [
            ("M", &self.m),
            ("P", &self.p),
            ("c2", &self.c2),
            ("c", &self.c),
            ("rho", &self.rho),
            ("model", &self.model),
            ("theorem", &self.theorem),
            ("variant", &self.variant),
            ("inner", &self.inner),
            ("seed", &self.seed),
            ("samples", &self.samples),
            ("alpha-bar", &self.alpha_bar),
            ("target", &self.target),
            ("source", &self.source),
            ("format", &self.format),
            ("output", &self.output),
            ("threads", &self.threads),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                cfg.set(k, v.clone());
            }
        }
        cfg
    }
}

/// Runs the CLI with process stdout/stderr and returns the exit status.
pub fn main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Same as [`main`] with explicit sinks for standard output and error.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = e.exit_code();
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    match execute(&args, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INVALID
        }
    }
}

fn execute(args: &Args, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let file = match &args.config {
        Some(path) => RunConfig::parse(&std::fs::read_to_string(path).map_err(|e| {
            CliError::Usage(format!("cannot read config file {}: {e}", path.display()))
        })?)?,
        None => RunConfig::default(),
    };
    let flags = args.flags();
    let mut probe = file.clone();
    probe.overlay(&flags);
    let command_name = probe
        .get("command")
        .ok_or_else(|| {
            CliError::Usage(
                "no command given (bounds, sweep, certify, fig3, simulate, audit)".into(),
            )
        })?
        .to_string();
    let command = Command::from_str(&command_name, true)
        .map_err(|_| CliError::Usage(format!("unknown command `{command_name}`")))?;
    let mut cfg = commands::defaults(command, &probe)?;
    cfg.overlay(&file);
    cfg.overlay(&flags);
    cfg.set("command", command.name());

    if args.dump_config {
        out.write_all(cfg.dump().as_bytes())?;
        return Ok(EXIT_OK);
    }

    let threads = match cfg.get("threads") {
        Some(t) => Some(t.parse::<usize>().ok().filter(|&n| n > 0).ok_or_else(|| {
            CliError::Usage(format!(
                "invalid value `{t}` for --threads (expected an integer >= 1)"
            ))
        })?),
        None => None,
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}")))?;
    let mut log = Vec::new();
    let outcome = pool.install(|| commands::run(command, &cfg, &mut log));
    err.write_all(&log)?;
    let outcome = outcome?;

    match cfg.get("output") {
        Some(path) => std::fs::write(path, &outcome.body)?,
        None => out.write_all(&outcome.body)?,
    }
    Ok(outcome.exit_code)
}
