use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use qdmod::inequalities::{argument_bounds, growth_functional, pick_lower, pick_upper};
use qdmod::invariant::{
    module_closed_form, module_contour_with, module_perfect_square, module_perfect_square_contour,
    module_residue, ContourOptions, ModuleResult,
};
use qdmod::maps::{pick_slit_tip, MapDescriptor, MapKind};
use qdmod::qdiff::{
    segments_to_svg, slit_is_trajectory_check, trace_trajectory, QuadraticDifferential, SvgMarker,
    TrajectorySegment,
};
use qdmod::report::{write_csv, CsvRow};
use qdmod::verify::{run_verify, VerifyOptions};
use qdmod::QdError;
use rayon::prelude::*;

use crate::config::{Command, PathSel, RunConfig};
use crate::qdspec::QdSpec;
use crate::{EXIT_NUMERIC, EXIT_OK, EXIT_PARSE, EXIT_VERIFY};

/// A failed command with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

fn parse_err(msg: impl Into<String>) -> Failure {
    Failure { code: EXIT_PARSE, message: msg.into() }
}

fn numeric(e: QdError) -> Failure {
    Failure { code: EXIT_NUMERIC, message: e.to_string() }
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure { code: EXIT_NUMERIC, message: format!("{}: {e}", path.display()) }
}

pub fn dispatch(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let res = match cfg.command {
        Command::Compute => cmd_compute(cfg, out),
        Command::Verify => cmd_verify(cfg, out, err),
        Command::Trace => cmd_trace(cfg, out, err),
        Command::Sweep => cmd_sweep(cfg, out),
    };
    match res {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn require_map(cfg: &RunConfig) -> Result<MapDescriptor, Failure> {
    let text = cfg.map.as_deref().ok_or_else(|| parse_err("--map is required"))?;
    text.parse().map_err(|e: QdError| parse_err(format!("map {text:?}: {e}")))
}

fn contour_options(cfg: &RunConfig) -> ContourOptions {
    let mut opts = ContourOptions::default();
    if !cfg.radii.is_empty() {
        opts.radii = cfg.radii.clone();
    }
    opts
}

fn emit_csv(cfg: &RunConfig, rows: &[CsvRow], out: &mut dyn Write) -> Result<(), Failure> {
    match &cfg.csv {
        Some(path) => {
            let file = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
            write_csv(std::io::BufWriter::new(file), rows).map_err(numeric)
        }
        None => write_csv(out, rows).map_err(numeric),
    }
}

fn module_rows(
    f: &MapDescriptor,
    r: f64,
    psi: f64,
    paths: &[PathSel],
    opts: &ContourOptions,
) -> Result<Vec<CsvRow>, QdError> {
    paths
        .iter()
        .map(|p| {
            let res: ModuleResult = match p {
                PathSel::A => module_closed_form(f, r, psi)?,
                PathSel::B => module_residue(f, r, psi)?,
                PathSel::C => module_contour_with(f, r, psi, opts)?,
            };
            Ok(CsvRow::from_module(f, Some(r), Some(psi), &res))
        })
        .collect()
}

fn inequality_rows(f: &MapDescriptor, w: Complex64, psi: Option<f64>) -> Result<Vec<CsvRow>, QdError> {
    let (a1, a2) = argument_bounds(f, w)?;
    let mut reps = vec![pick_lower(f, w)?, pick_upper(f, w)?, a1, a2];
    if let Some(psi) = psi {
        reps.push(growth_functional(f, w, psi)?);
    }
    Ok(reps.iter().map(CsvRow::from_inequality).collect())
}

fn default_paths(cfg: &RunConfig, default: &[PathSel]) -> Vec<PathSel> {
    if cfg.paths.is_empty() {
        default.to_vec()
    } else {
        cfg.paths.clone()
    }
}

pub fn cmd_compute(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    let f = require_map(cfg)?;
    let opts = contour_options(cfg);
    let mut rows = Vec::new();
    if cfg.perfect_square {
        for p in default_paths(cfg, &[PathSel::A]) {
            let res = match p {
                PathSel::A => module_perfect_square(&f),
                PathSel::C => module_perfect_square_contour(&f, &opts).map_err(numeric)?,
                PathSel::B => return Err(parse_err("the perfect-square module has no path B")),
            };
            rows.push(CsvRow::from_module(&f, None, None, &res));
        }
    } else {
        if cfg.r.is_none() && cfg.w.is_none() {
            return Err(parse_err("compute needs --r (module) or --w (growth functionals)"));
        }
        if let Some(r) = cfg.r {
            let psi = cfg.psi.ok_or_else(|| parse_err("--psi is required with --r"))?;
            let paths = default_paths(cfg, &[PathSel::A, PathSel::B]);
            rows.extend(module_rows(&f, r, psi, &paths, &opts).map_err(numeric)?);
        }
        if let Some(w) = cfg.w {
            rows.extend(inequality_rows(&f, w, cfg.psi).map_err(numeric)?);
        }
    }
    emit_csv(cfg, &rows, out)?;
    Ok(EXIT_OK)
}

pub fn cmd_verify(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let opts = VerifyOptions {
        only: cfg.only.clone(),
        fault: cfg.fault,
        tolerances: cfg.resolved_tolerances(),
    };
    let summary = run_verify(&opts);
    let io = |e: std::io::Error| Failure { code: EXIT_NUMERIC, message: e.to_string() };
    for (suite, passed, total) in summary.per_suite() {
        writeln!(out, "{suite}: {passed}/{total} passed").map_err(io)?;
    }
    writeln!(out, "total: {} passed, {} failed", summary.passed(), summary.failed()).map_err(io)?;
    if let Some(c) = summary.first_failure() {
        writeln!(err, "first failure [{}]: {}", c.suite, c.detail).map_err(io)?;
        writeln!(err, "inputs: {} fault={} {}", c.inputs, cfg.fault, tolerance_text(cfg)).map_err(io)?;
        return Ok(EXIT_VERIFY);
    }
    Ok(EXIT_OK)
}

fn tolerance_text(cfg: &RunConfig) -> String {
    let t = cfg.resolved_tolerances();
    format!("tolerances={t:?}")
}

/// Seeds on a square grid inside the disk, away from singular points.
fn grid_seeds<Q: QuadraticDifferential + ?Sized>(qd: &Q, n: usize) -> Vec<Complex64> {
    let sing = qd.singular_points();
    let mut seeds = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let x = -0.9 + 1.8 * i as f64 / (n - 1) as f64;
            let y = -0.9 + 1.8 * j as f64 / (n - 1) as f64;
            let z = Complex64::new(x, y);
            if z.norm() < 0.95 && sing.iter().all(|p| (z - p).norm() > 0.05) {
                seeds.push(z);
            }
        }
    }
    seeds
}

pub fn cmd_trace(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let text = cfg.qd.as_deref().ok_or_else(|| parse_err("--qd is required"))?;
    let spec: QdSpec = text.parse().map_err(|e: QdError| parse_err(e.to_string()))?;
    let qd = spec.build().map_err(|e| parse_err(e.to_string()))?;
    let n = cfg.samples.unwrap_or(7);
    if n < 2 {
        return Err(parse_err("trace needs --samples ≥ 2"));
    }
    let mut seeds = grid_seeds(&qd, n);
    let mut markers: Vec<SvgMarker> = Vec::new();
    if cfg.seed_slit {
        let tip = match cfg.map.as_deref().map(str::parse::<MapDescriptor>) {
            None => pick_slit_tip(0.5),
            Some(Ok(f)) => match f.kind() {
                MapKind::PickSlit { m } => pick_slit_tip(*m),
                _ => return Err(parse_err("--seed-slit needs a pick map")),
            },
            Some(Err(e)) => return Err(parse_err(e.to_string())),
        };
        let dev = slit_is_trajectory_check(&qd, tip, 400).map_err(numeric)?;
        writeln!(err, "slit [-1, {tip:.6}]: max trajectory deviation {dev:.3e}")
            .map_err(|e| numeric(QdError::Io(e.to_string())))?;
        for k in 1..=5 {
            let z = Complex64::new(-1.0 + (tip + 1.0) * k as f64 / 6.0, 0.0);
            markers.push(SvgMarker::Seed(z));
            seeds.push(z);
        }
    }
    let traced: Vec<Option<TrajectorySegment>> = seeds
        .par_iter()
        .flat_map_iter(|&z| [1.0, -1.0].map(|sign| trace_trajectory(&qd, z, sign, 2.0 * PI).ok()))
        .collect();
    let segments: Vec<TrajectorySegment> = traced.into_iter().flatten().collect();
    if segments.is_empty() {
        return Err(Failure { code: EXIT_NUMERIC, message: "every seed failed to trace".into() });
    }
    let visible = |z: Complex64| z.norm() <= 1.0 + 1e-9;
    for s in qd.zeros().iter().filter(|s| visible(s.location)) {
        markers.push(SvgMarker::Zero(s.location));
    }
    for s in qd.poles().iter().filter(|s| visible(s.location)) {
        markers.push(SvgMarker::Pole(s.location));
    }
    let svg = segments_to_svg(&segments, &markers);
    match &cfg.svg {
        Some(path) => std::fs::write(path, svg).map_err(|e| io_err(path, e))?,
        None => out.write_all(svg.as_bytes()).map_err(|e| numeric(QdError::Io(e.to_string())))?,
    }
    Ok(EXIT_OK)
}

/// `samples` equally spaced values of ψ on `[0, π]`, endpoints included.
pub fn psi_grid(samples: usize) -> Vec<f64> {
    (0..samples).map(|k| PI * k as f64 / (samples - 1) as f64).collect()
}

pub fn cmd_sweep(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    let f = require_map(cfg)?;
    let n = cfg.samples.unwrap_or(64);
    if n < 2 {
        return Err(parse_err("sweep needs --samples ≥ 2"));
    }
    let grid = psi_grid(n);
    let opts = contour_options(cfg);
    let rows: Vec<Vec<CsvRow>> = match (cfg.r, cfg.w) {
        (_, Some(w)) => grid
            .par_iter()
            .map(|&psi| Ok(vec![CsvRow::from_inequality(&growth_functional(&f, w, psi)?)]))
            .collect::<Result<_, QdError>>(),
        (Some(r), None) => {
            let paths = default_paths(cfg, &[PathSel::A, PathSel::B]);
            grid.par_iter().map(|&psi| module_rows(&f, r, psi, &paths, &opts)).collect()
        }
        (None, None) => return Err(parse_err("sweep needs --r (module) or --w (growth functional)")),
    }
    .map_err(numeric)?;
    emit_csv(cfg, &rows.concat(), out)?;
    Ok(EXIT_OK)
}
