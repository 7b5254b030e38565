//! The property matrix: every checkable claim about the module and the growth
//! functionals, run over the map corpus.
//!
//! Each suite expands into independent cases that are evaluated in parallel
//! on the current rayon pool and reported in a fixed order.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{QdError, Result};
use crate::inequalities::{
    argument_bounds, growth_functional, j_functionals_for_map, pick_lower, pick_upper,
};
use crate::invariant::{
    module_closed_form_with, module_contour, module_perfect_square,
    module_perfect_square_contour, module_residue, remainder_identity_check, ContourOptions,
    C2_CALIBRATED,
};
use crate::maps::{corpus, pick_slit_tip, MapDescriptor};
use crate::qdiff::{growth_qd, slit_is_trajectory_check};

/// Tolerances of the property matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Slack for `m ≤ 0`, monotonicity and the inequality bounds.
    pub slack: f64,
    pub closed_vs_residue: f64,
    /// Floor for `|B - C|`; the bound is `max(floor, 3 est_error)`.
    pub residue_vs_contour: f64,
    pub rotation: f64,
    pub equality: f64,
    pub slit_deviation: f64,
    pub j_vs_pick: f64,
    pub perfect_square: f64,
    pub remainder_gap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            slack: 1e-9,
            closed_vs_residue: 1e-9,
            residue_vs_contour: 1e-4,
            rotation: 1e-9,
            equality: 1e-6,
            slit_deviation: 1e-3,
            j_vs_pick: 1e-12,
            perfect_square: 1e-5,
            remainder_gap: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Positivity,
    Monotonicity,
    Rotation,
    Agreement,
    Equality,
    Bounds,
    PerfectSquare,
    Remainder,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Positivity,
        Suite::Monotonicity,
        Suite::Rotation,
        Suite::Agreement,
        Suite::Equality,
        Suite::Bounds,
        Suite::PerfectSquare,
        Suite::Remainder,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Positivity => "positivity",
            Suite::Monotonicity => "monotonicity",
            Suite::Rotation => "rotation",
            Suite::Agreement => "agreement",
            Suite::Equality => "equality",
            Suite::Bounds => "bounds",
            Suite::PerfectSquare => "perfect-square",
            Suite::Remainder => "remainder",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = QdError;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| QdError::Parse(format!("unknown suite {s:?}")))
    }
}

/// Deliberate faults used to check that the matrix detects errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// Runs path A with `-c₂`.
    NegateC2,
}

impl FromStr for Fault {
    type Err = QdError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Fault::None),
            "negate-c2" => Ok(Fault::NegateC2),
            _ => Err(QdError::Parse(format!("unknown fault {s:?}"))),
        }
    }
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fault::None => "none",
            Fault::NegateC2 => "negate-c2",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerifyOptions {
    /// Suites to run; empty means all.
    pub only: Vec<Suite>,
    pub fault: Fault,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseOutcome {
    pub suite: Suite,
    /// Full inputs of the case in `key=value` form.
    pub inputs: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerifySummary {
    pub cases: Vec<CaseOutcome>,
}

impl VerifySummary {
    pub fn passed(&self) -> usize {
        self.cases.iter().filter(|c| c.passed).count()
    }

    pub fn failed(&self) -> usize {
        self.cases.len() - self.passed()
    }

    pub fn first_failure(&self) -> Option<&CaseOutcome> {
        self.cases.iter().find(|c| !c.passed)
    }

    /// `(suite, passed, total)` in suite order.
    pub fn per_suite(&self) -> Vec<(Suite, usize, usize)> {
        Suite::ALL
            .into_iter()
            .filter_map(|s| {
                let of: Vec<_> = self.cases.iter().filter(|c| c.suite == s).collect();
                (!of.is_empty()).then(|| (s, of.iter().filter(|c| c.passed).count(), of.len()))
            })
            .collect()
    }
}

pub const PSI_GRID: [f64; 4] = [0.0, PI / 2.0, -PI / 2.0, PI];
pub const R_GRID: [f64; 2] = [0.25, 0.5];

type Check = Box<dyn Fn() -> Result<(bool, String)> + Send + Sync>;

struct Case {
    suite: Suite,
    inputs: String,
    check: Check,
}

fn case(suite: Suite, inputs: String, check: impl Fn() -> Result<(bool, String)> + Send + Sync + 'static) -> Case {
    Case { suite, inputs, check: Box::new(check) }
}

fn module_inputs(f: &MapDescriptor, r: f64, psi: f64) -> String {
    format!("map=({f}) r={r} psi={psi}")
}

/// Configurations of the module suites: corpus × r × ψ with `r ∈ f(𝔻)`.
pub fn module_grid() -> Vec<(MapDescriptor, f64, f64)> {
    let mut out = Vec::new();
    for f in corpus() {
        for r in R_GRID {
            if !f.contains(Complex64::new(r, 0.0)) {
                continue;
            }
            for psi in PSI_GRID {
                out.push((f.clone(), r, psi));
            }
        }
    }
    out
}

/// The twelve configurations on which path C is compared with path B.
pub fn contour_grid() -> Vec<(MapDescriptor, f64, f64)> {
    let pick = MapDescriptor::pick_slit(0.5).unwrap();
    let maps = [MapDescriptor::scale(0.9).unwrap(), pick.nested_family(0.9).unwrap(), pick];
    let mut out = Vec::new();
    for f in maps {
        for r in R_GRID {
            for psi in [0.0, PI / 2.0] {
                out.push((f.clone(), r, psi));
            }
        }
    }
    out
}

/// Points `w` at which the growth functionals are evaluated.
pub const W_GRID: [Complex64; 4] = [
    Complex64::new(0.5, 0.0),
    Complex64::new(0.0, 0.3),
    Complex64::new(-0.2, 0.5),
    Complex64::new(0.1, -0.7),
];

fn positivity(t: Tolerances) -> Vec<Case> {
    module_grid()
        .into_iter()
        .map(|(f, r, psi)| {
            case(Suite::Positivity, module_inputs(&f, r, psi), move || {
                let m = module_residue(&f, r, psi)?.value;
                Ok((m <= t.slack, format!("m = {m:e}")))
            })
        })
        .collect()
}

const S_CHAIN: [f64; 6] = [0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

fn monotonicity(t: Tolerances) -> Vec<Case> {
    let mut cases = Vec::new();
    for f in corpus() {
        for psi in [0.0, PI] {
            let r = 0.25;
            let f = f.clone();
            let inputs = format!("map=({f}) r={r} psi={psi} s={S_CHAIN:?}");
            cases.push(case(Suite::Monotonicity, inputs, move || {
                let mut values = Vec::new();
                for s in S_CHAIN {
                    let g = if s == 1.0 { f.clone() } else { f.nested_family(s)? };
                    values.push(module_residue(&g, r, psi)?.value);
                }
                let mut ok = values.windows(2).all(|p| p[1] >= p[0] - t.slack);
                if f.to_string() == "id" {
                    ok &= values[values.len() - 1].abs() <= t.slack;
                }
                Ok((ok, format!("m(s) = {values:?}")))
            }));
        }
    }
    cases
}

fn rotation(t: Tolerances) -> Vec<Case> {
    let mut cases = Vec::new();
    for (k, (f, r, psi)) in module_grid().into_iter().enumerate().step_by(3) {
        let theta = 0.37 + 1.1 * k as f64;
        let inputs = format!("{} theta={theta}", module_inputs(&f, r, psi));
        cases.push(case(Suite::Rotation, inputs, move || {
            let g = MapDescriptor::reparametrized(f.clone(), theta)?;
            let a = module_residue(&f, r, psi)?.value;
            let b = module_residue(&g, r, psi)?.value;
            Ok(((a - b).abs() <= t.rotation, format!("|Δm| = {:e}", (a - b).abs())))
        }));
    }
    for f in corpus() {
        for w in W_GRID {
            let theta = 0.9;
            let inputs = format!("map=({f}) w={w} theta={theta}");
            let f = f.clone();
            cases.push(case(Suite::Rotation, inputs, move || {
                let g = MapDescriptor::rotated_conjugate(f.clone(), theta)?;
                let gw = w * Complex64::from_polar(1.0, -theta);
                let mut worst: f64 = 0.0;
                for psi in PSI_GRID {
                    let a = growth_functional(&f, w, psi)?.value;
                    let b = growth_functional(&g, gw, psi)?.value;
                    worst = worst.max((a - b).abs());
                }
                Ok((worst <= 1e-10, format!("max |ΔI| = {worst:e}")))
            }));
        }
    }
    cases
}

fn agreement(t: Tolerances, fault: Fault) -> Vec<Case> {
    let c2 = match fault {
        Fault::None => C2_CALIBRATED,
        Fault::NegateC2 => -C2_CALIBRATED,
    };
    let mut cases: Vec<Case> = module_grid()
        .into_iter()
        .map(|(f, r, psi)| {
            case(Suite::Agreement, format!("{} paths=A,B c2={c2}", module_inputs(&f, r, psi)), move || {
                let a = module_closed_form_with(&f, r, psi, c2)?.value;
                let b = module_residue(&f, r, psi)?.value;
                Ok(((a - b).abs() <= t.closed_vs_residue, format!("|A - B| = {:e}", (a - b).abs())))
            })
        })
        .collect();
    for (f, r, psi) in contour_grid() {
        cases.push(case(Suite::Agreement, format!("{} paths=B,C", module_inputs(&f, r, psi)), move || {
            let b = module_residue(&f, r, psi)?.value;
            let c = module_contour(&f, r, psi)?;
            let gap = (b - c.value).abs();
            let tol = t.residue_vs_contour.max(3.0 * c.est_error);
            Ok((gap <= tol, format!("|B - C| = {gap:e}, tol = {tol:e}")))
        }));
    }
    cases
}

fn equality(t: Tolerances) -> Vec<Case> {
    let mut cases = Vec::new();
    for m in [0.3, 0.5, 0.8] {
        for r in [0.1, 0.25] {
            let inputs = format!("map=(pick m={m}) r={r} psi=0");
            cases.push(case(Suite::Equality, inputs, move || {
                let f = MapDescriptor::pick_slit(m)?;
                let w0 = f.inverse(Complex64::new(r, 0.0))?;
                let v = module_residue(&f, r, 0.0)?.value;
                let dev = slit_is_trajectory_check(&growth_qd(r, 0.0)?, pick_slit_tip(m), 400)?;
                let ok = w0.re > 0.0
                    && w0.re < 1.0
                    && w0.im.abs() < 1e-12
                    && v.abs() <= t.equality
                    && dev < t.slit_deviation;
                Ok((ok, format!("w0 = {w0}, m = {v:e}, slit deviation = {dev:e}")))
            }));
        }
    }
    cases
}

fn bounds(t: Tolerances) -> Vec<Case> {
    let mut cases = Vec::new();
    for f in corpus() {
        for w in W_GRID {
            let inputs = format!("map=({f}) w={w}");
            let f = f.clone();
            cases.push(case(Suite::Bounds, inputs, move || {
                let lo = pick_lower(&f, w)?.value;
                let up = pick_upper(&f, w)?.value;
                let (jl, ju) = j_functionals_for_map(&f, w)?;
                let (a1, a2) = argument_bounds(&f, w)?;
                let mut growth = f64::NEG_INFINITY;
                for psi in PSI_GRID {
                    growth = growth.max(growth_functional(&f, w, psi)?.value);
                }
                let j_gap = (jl.ln() - lo).abs().max((ju.ln() - up).abs());
                let worst = lo.max(up).max(jl.ln()).max(ju.ln()).max(a1.value).max(a2.value).max(growth);
                Ok((
                    worst <= t.slack && j_gap <= t.j_vs_pick,
                    format!("max functional = {worst:e}, |log J - I| = {j_gap:e}"),
                ))
            }));
        }
    }
    cases
}

fn perfect_square(t: Tolerances) -> Vec<Case> {
    let pick = MapDescriptor::pick_slit(0.5).unwrap();
    let maps = [
        MapDescriptor::scale(0.5).unwrap(),
        MapDescriptor::scale(0.9).unwrap(),
        pick.nested_family(0.9).unwrap(),
    ];
    maps.into_iter()
        .map(|f| {
            case(Suite::PerfectSquare, format!("map=({f}) qd=dz2_over_z2"), move || {
                let a = module_perfect_square(&f).value;
                let c = module_perfect_square_contour(&f, &ContourOptions::default())?.value;
                let expect = 4.0 * PI * f.origin_deriv().norm().ln();
                let gap = (a - c).abs();
                Ok((gap <= t.perfect_square && a == expect, format!("|closed - contour| = {gap:e}")))
            })
        })
        .collect()
}

fn remainder(t: Tolerances) -> Vec<Case> {
    let configs = [
        (MapDescriptor::identity(), 0.9, 0.3, PI),
        (MapDescriptor::scale(0.9).unwrap(), 0.8, 0.3, 1.0),
    ];
    configs
        .into_iter()
        .map(|(f, s, r, psi)| {
            case(Suite::Remainder, format!("{} s={s}", module_inputs(&f, r, psi)), move || {
                let rep = remainder_identity_check(&f, s, r, psi)?;
                Ok((
                    rep.gap < t.remainder_gap && rep.lhs <= t.slack,
                    format!("lhs = {:e}, rhs = {:e}, gap = {:e}", rep.lhs, rep.rhs, rep.gap),
                ))
            })
        })
        .collect()
}

fn build(suite: Suite, opts: &VerifyOptions) -> Vec<Case> {
    let t = opts.tolerances;
    match suite {
        Suite::Positivity => positivity(t),
        Suite::Monotonicity => monotonicity(t),
        Suite::Rotation => rotation(t),
        Suite::Agreement => agreement(t, opts.fault),
        Suite::Equality => equality(t),
        Suite::Bounds => bounds(t),
        Suite::PerfectSquare => perfect_square(t),
        Suite::Remainder => remainder(t),
    }
}

/// Runs the selected suites. A numeric error inside a case counts as a
/// failure of that case.
pub fn run_verify(opts: &VerifyOptions) -> VerifySummary {
    let suites: Vec<Suite> =
        if opts.only.is_empty() { Suite::ALL.to_vec() } else { opts.only.clone() };
    let cases: Vec<Case> = suites.into_iter().flat_map(|s| build(s, opts)).collect();
    let cases = cases
        .par_iter()
        .map(|c| {
            let (passed, detail) = match (c.check)() {
                Ok(x) => x,
                Err(e) => (false, format!("error: {e}")),
            };
            CaseOutcome { suite: c.suite, inputs: c.inputs.clone(), passed, detail }
        })
        .collect();
    VerifySummary { cases }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn only(s: Suite) -> VerifyOptions {
        VerifyOptions { only: vec![s], ..Default::default() }
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("everything".parse::<Suite>().is_err());
        assert_eq!("negate-c2".parse::<Fault>().unwrap(), Fault::NegateC2);
    }

    #[test]
    fn filtering_restricts_cases() {
        let sum = run_verify(&only(Suite::Positivity));
        assert!(!sum.cases.is_empty());
        assert!(sum.cases.iter().all(|c| c.suite == Suite::Positivity));
        assert_eq!(sum.failed(), 0, "{:?}", sum.first_failure());
        assert_eq!(sum.per_suite(), vec![(Suite::Positivity, sum.cases.len(), sum.cases.len())]);
    }

    #[test]
    fn negated_weight_is_caught() {
        let opts = VerifyOptions { fault: Fault::NegateC2, ..only(Suite::Agreement) };
        let sum = run_verify(&opts);
        let first = sum.first_failure().expect("fault must be detected");
        assert!(first.inputs.contains("paths=A,B"));
    }

    #[test]
    fn grids_have_expected_size() {
        assert_eq!(contour_grid().len(), 12);
        assert!(module_grid().len() >= 60);
    }
}
