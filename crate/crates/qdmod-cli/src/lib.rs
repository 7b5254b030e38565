//! Implementation of the `qdmod` binary.
//!
//! Exit codes: 0 success, 1 parse or configuration error, 2 numeric failure,
//! 3 verification failure.

pub mod commands;
pub mod config;
pub mod qdspec;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use qdmod::QdError;

use config::{parse_complex, parse_list, parse_tolerance, Command, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "qdmod", version, about = "Modules of quadratic differentials on nested disks")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Evaluate the module (and growth functionals when --w is given).
    Compute(Opts),
    /// Run the property matrix over the corpus.
    Verify(Opts),
    /// Draw a trajectory portrait as SVG.
    Trace(Opts),
    /// Evaluate over a ψ grid on [0, π].
    Sweep(Opts),
}

#[derive(Args, Debug, Default)]
struct Opts {
    /// key=value file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Map descriptor, e.g. "pick m=0.5" or "nested base=(scale s=0.9) s=0.8".
    #[arg(long)]
    map: Option<String>,
    /// Quadratic differential: "growth r=.. psi=..", "dz2_over_z2" or "neg_dz2".
    #[arg(long)]
    qd: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    r: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    psi: Option<String>,
    /// Complex point, e.g. 0.5 or 0.3+0.2i.
    #[arg(long, allow_hyphen_values = true)]
    w: Option<String>,
    /// Comma-separated contour radii.
    #[arg(long)]
    radii: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    /// Comma-separated subset of A,B,C.
    #[arg(long)]
    paths: Option<String>,
    #[arg(long)]
    perfect_square: bool,
    #[arg(long)]
    seed_slit: bool,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Restrict verify to these suites (repeatable or comma-separated).
    #[arg(long)]
    only: Vec<String>,
    #[arg(long)]
    inject_fault: Option<String>,
    /// Tolerance override key:value (repeatable).
    #[arg(long)]
    tol: Vec<String>,
}

fn build_config(command: Command, o: Opts) -> Result<RunConfig, QdError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &o.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| QdError::Parse(format!("{}: {e}", path.display())))?;
        cfg.apply_text(&text)?;
    }
    cfg.command = command;
    let set = |cfg: &mut RunConfig, k: &str, v: &Option<String>| match v {
        Some(v) => cfg.set(k, v),
        None => Ok(()),
    };
    set(&mut cfg, "map", &o.map)?;
    set(&mut cfg, "qd", &o.qd)?;
    set(&mut cfg, "r", &o.r)?;
    set(&mut cfg, "psi", &o.psi)?;
    if let Some(w) = &o.w {
        cfg.w = Some(parse_complex(w)?);
    }
    set(&mut cfg, "radii", &o.radii)?;
    set(&mut cfg, "samples", &o.samples)?;
    set(&mut cfg, "paths", &o.paths)?;
    cfg.perfect_square |= o.perfect_square;
    cfg.seed_slit |= o.seed_slit;
    if o.csv.is_some() {
        cfg.csv = o.csv;
    }
    if o.svg.is_some() {
        cfg.svg = o.svg;
    }
    if !o.only.is_empty() {
        cfg.only = o.only.iter().map(|s| parse_list("only", s)).collect::<Result<Vec<_>, _>>()?.concat();
    }
    set(&mut cfg, "inject_fault", &o.inject_fault)?;
    for t in &o.tol {
        let (k, x) = parse_tolerance(t)?;
        cfg.tolerances.retain(|(old, _)| *old != k);
        cfg.tolerances.push((k, x));
    }
    Ok(cfg)
}

/// Worker count from `QDMOD_WORKERS`; unset means rayon's default.
pub fn workers_from_env() -> Result<Option<usize>, QdError> {
    match std::env::var("QDMOD_WORKERS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(QdError::Parse(format!("QDMOD_WORKERS must be a positive integer, got {v:?}"))),
        },
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Reports go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let (command, opts) = match cli.command {
        Sub::Compute(o) => (Command::Compute, o),
        Sub::Verify(o) => (Command::Verify, o),
        Sub::Trace(o) => (Command::Trace, o),
        Sub::Sweep(o) => (Command::Sweep, o),
    };
    let cfg = match build_config(command, opts) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_PARSE;
        }
    };
    let pool = match workers_from_env().and_then(|n| {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = n {
            b = b.num_threads(n);
        }
        b.build().map_err(|e| QdError::Parse(e.to_string()))
    }) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_PARSE;
        }
    };
    pool.install(|| commands::dispatch(&cfg, out, err))
}
