//! `RunConfig` and its `key=value` textual form.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;
use qdmod::verify::{Fault, Suite, Tolerances};
use qdmod::{QdError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Command {
    #[default]
    Compute,
    Verify,
    Trace,
    Sweep,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Compute => "compute",
            Command::Verify => "verify",
            Command::Trace => "trace",
            Command::Sweep => "sweep",
        }
    }
}

impl FromStr for Command {
    type Err = QdError;
    fn from_str(s: &str) -> Result<Self> {
        [Command::Compute, Command::Verify, Command::Trace, Command::Sweep]
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| QdError::Parse(format!("unknown command {s:?}")))
    }
}

/// Evaluation path selector of `--paths`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PathSel {
    A,
    B,
    C,
}

impl FromStr for PathSel {
    type Err = QdError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(PathSel::A),
            "B" | "b" => Ok(PathSel::B),
            "C" | "c" => Ok(PathSel::C),
            _ => Err(QdError::Parse(format!("unknown path {s:?}"))),
        }
    }
}

impl fmt::Display for PathSel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

pub const TOLERANCE_KEYS: [&str; 9] = [
    "slack",
    "closed_vs_residue",
    "residue_vs_contour",
    "rotation",
    "equality",
    "slit_deviation",
    "j_vs_pick",
    "perfect_square",
    "remainder_gap",
];

fn tolerance_slot<'a>(t: &'a mut Tolerances, key: &str) -> Result<&'a mut f64> {
    Ok(match key {
        "slack" => &mut t.slack,
        "closed_vs_residue" => &mut t.closed_vs_residue,
        "residue_vs_contour" => &mut t.residue_vs_contour,
        "rotation" => &mut t.rotation,
        "equality" => &mut t.equality,
        "slit_deviation" => &mut t.slit_deviation,
        "j_vs_pick" => &mut t.j_vs_pick,
        "perfect_square" => &mut t.perfect_square,
        "remainder_gap" => &mut t.remainder_gap,
        _ => return Err(QdError::Parse(format!("unknown tolerance {key:?}"))),
    })
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub command: Command,
    /// Map descriptor in the maps grammar.
    pub map: Option<String>,
    /// Quadratic differential in the trace grammar.
    pub qd: Option<String>,
    pub r: Option<f64>,
    pub psi: Option<f64>,
    pub w: Option<Complex64>,
    pub radii: Vec<f64>,
    pub samples: Option<usize>,
    pub paths: Vec<PathSel>,
    pub perfect_square: bool,
    pub seed_slit: bool,
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub only: Vec<Suite>,
    pub fault: Fault,
    pub tolerances: Vec<(String, f64)>,
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim().parse().map_err(|_| QdError::Parse(format!("{key}: invalid number {v:?}")))
}

pub fn parse_complex(v: &str) -> Result<Complex64> {
    v.trim().parse().map_err(|_| QdError::Parse(format!("invalid complex number {v:?}")))
}

pub fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse().map_err(|_| QdError::Parse(format!("{key}: invalid entry {s:?}"))))
        .collect()
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.trim() {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(QdError::Parse(format!("{key}: expected true or false, got {v:?}"))),
    }
}

pub fn parse_tolerance(v: &str) -> Result<(String, f64)> {
    let (k, x) = v
        .split_once(':')
        .ok_or_else(|| QdError::Parse(format!("tolerance {v:?} must read key:value")))?;
    let k = k.trim().to_string();
    tolerance_slot(&mut Tolerances::default(), &k)?;
    Ok((k.clone(), parse_f64(&k, x)?))
}

fn join<T: fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    /// Sets one `key=value` entry.
    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "command" => self.command = v.trim().parse()?,
            "map" => self.map = Some(v.trim().to_string()),
            "qd" => self.qd = Some(v.trim().to_string()),
            "r" => self.r = Some(parse_f64(key, v)?),
            "psi" => self.psi = Some(parse_f64(key, v)?),
            "w" => self.w = Some(parse_complex(v)?),
            "radii" => self.radii = parse_list(key, v)?,
            "samples" => {
                self.samples =
                    Some(v.trim().parse().map_err(|_| QdError::Parse(format!("samples: {v:?}")))?)
            }
            "paths" => self.paths = parse_list(key, v)?,
            "perfect_square" => self.perfect_square = parse_bool(key, v)?,
            "seed_slit" => self.seed_slit = parse_bool(key, v)?,
            "csv" => self.csv = Some(PathBuf::from(v.trim())),
            "svg" => self.svg = Some(PathBuf::from(v.trim())),
            "only" => self.only = parse_list(key, v)?,
            "inject_fault" => self.fault = v.trim().parse()?,
            _ => match key.strip_prefix("tol.") {
                Some(t) => {
                    let (k, x) = parse_tolerance(&format!("{t}:{v}"))?;
                    self.tolerances.retain(|(old, _)| *old != k);
                    self.tolerances.push((k, x));
                }
                None => return Err(QdError::Parse(format!("unknown config key {key:?}"))),
            },
        }
        Ok(())
    }

    /// Parses `key=value` lines; blank lines and lines starting with `#` are
    /// skipped.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| QdError::Parse(format!("line {}: expected key=value", n + 1)))?;
            self.set(k.trim(), v).map_err(|e| QdError::Parse(format!("line {}: {e}", n + 1)))?;
        }
        Ok(())
    }

    /// The textual form; `from_text(to_text())` reproduces the config.
    pub fn to_text(&self) -> String {
        let mut lines = vec![format!("command={}", self.command.name())];
        let mut push = |k: &str, v: String| lines.push(format!("{k}={v}"));
        if let Some(m) = &self.map {
            push("map", m.clone());
        }
        if let Some(q) = &self.qd {
            push("qd", q.clone());
        }
        if let Some(r) = self.r {
            push("r", r.to_string());
        }
        if let Some(p) = self.psi {
            push("psi", p.to_string());
        }
        if let Some(w) = self.w {
            push("w", w.to_string());
        }
        if !self.radii.is_empty() {
            push("radii", join(&self.radii));
        }
        if let Some(n) = self.samples {
            push("samples", n.to_string());
        }
        if !self.paths.is_empty() {
            push("paths", join(&self.paths));
        }
        if self.perfect_square {
            push("perfect_square", "true".into());
        }
        if self.seed_slit {
            push("seed_slit", "true".into());
        }
        if let Some(p) = &self.csv {
            push("csv", p.display().to_string());
        }
        if let Some(p) = &self.svg {
            push("svg", p.display().to_string());
        }
        if !self.only.is_empty() {
            push("only", join(&self.only));
        }
        if self.fault != Fault::None {
            push("inject_fault", self.fault.to_string());
        }
        for (k, x) in &self.tolerances {
            push(&format!("tol.{k}"), x.to_string());
        }
        lines.join("\n") + "\n"
    }

    pub fn resolved_tolerances(&self) -> Tolerances {
        let mut t = Tolerances::default();
        for (k, x) in &self.tolerances {
            *tolerance_slot(&mut t, k).expect("keys are validated on parse") = *x;
        }
        t
    }
}
