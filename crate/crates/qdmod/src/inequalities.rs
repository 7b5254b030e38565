//! Growth functionals derived from the module: the interpolating functional
//! `I(f, w, ψ)`, the two Pick bounds, their hyperbolic-metric form `J`, and
//! the argument estimates.
//!
//! Every functional is normalized so that the inequality reads `value ≤ 0`.

use num_complex::Complex64;

use crate::error::{QdError, Result};
use crate::geom::{hyperbolic, hyperbolic_mapped, DiskChart, HyperbolicData};
use crate::invariant::{closed_form_terms, tracked_log_ratio, C2_CALIBRATED};
use crate::maps::MapDescriptor;
use crate::ComplexValue;

/// Slack allowed above the bound before a functional counts as violated.
pub const SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub functional_name: String,
    pub map: String,
    pub w: ComplexValue,
    pub psi: Option<f64>,
    pub value: f64,
    pub bound: f64,
    pub satisfied: bool,
    /// `value - bound`; negative when the inequality holds strictly.
    pub margin: f64,
}

impl InequalityReport {
    fn new(name: &str, f: &MapDescriptor, w: ComplexValue, psi: Option<f64>, value: f64) -> Self {
        InequalityReport {
            functional_name: name.to_string(),
            map: f.to_string(),
            w,
            psi,
            value,
            bound: 0.0,
            satisfied: value <= SLACK,
            margin: value,
        }
    }
}

fn check_point(w: ComplexValue) -> Result<()> {
    let a = w.norm();
    if !(a > 0.0 && a < 1.0) {
        return Err(QdError::InvalidParameter(format!("w = {w} must satisfy 0 < |w| < 1")));
    }
    Ok(())
}

/// `log[(1+|f(w)|)(1-|w|) / ((1-|f(w)|)(1+|w|))]`, never positive by the
/// Schwarz-Pick lemma.
fn distance_term(fw: f64, w: f64) -> f64 {
    ((1.0 + fw) * (1.0 - w) / ((1.0 - fw) * (1.0 + w))).ln()
}

/// `I(f, w, ψ) = 4π Re[-e^{iψ} log X] + c₂ Λ` with
/// `X = w f'(0)/f(w) · (1-|f(w)|²)/(1-|w|²)`, `log X` continued along the
/// radius to `w`, and the calibrated weight `c₂`.
pub fn growth_functional(f: &MapDescriptor, w: ComplexValue, psi: f64) -> Result<InequalityReport> {
    check_point(w)?;
    let (first, lambda) = closed_form_terms(f, w, psi)?;
    let value = first + C2_CALIBRATED * lambda;
    Ok(InequalityReport::new("growth", f, w, Some(psi), value))
}

/// `log[|w||f'(0)|(1+|f(w)|)² / ((1+|w|)²|f(w)|)]`.
pub fn pick_lower(f: &MapDescriptor, w: ComplexValue) -> Result<InequalityReport> {
    check_point(w)?;
    let fw = f.eval(w)?.norm();
    let aw = w.norm();
    let d = f.origin_deriv().norm();
    let value = (aw * d * (1.0 + fw).powi(2) / ((1.0 + aw).powi(2) * fw)).ln();
    Ok(InequalityReport::new("pick_lower", f, w, None, value))
}

/// `log[|f(w)|(1-|w|)² / ((1-|f(w)|)²|w||f'(0)|)]`.
pub fn pick_upper(f: &MapDescriptor, w: ComplexValue) -> Result<InequalityReport> {
    check_point(w)?;
    let fw = f.eval(w)?.norm();
    let aw = w.norm();
    let d = f.origin_deriv().norm();
    let value = (fw * (1.0 - aw).powi(2) / ((1.0 - fw).powi(2) * aw * d)).ln();
    Ok(InequalityReport::new("pick_upper", f, w, None, value))
}

/// `(J_lower, J_upper)` from hyperbolic data of `D ⊇ D₁` at a common pair of
/// points; `big` and `small` hold the density at the first point and the
/// distance between the two.
pub fn j_functionals(big: &HyperbolicData, small: &HyperbolicData) -> Result<(f64, f64)> {
    if !(big.distance > 0.0 && small.distance > 0.0) {
        return Err(QdError::InvalidParameter("points must be distinct".into()));
    }
    let lower = ((-4.0 * small.distance).exp_m1() / (-4.0 * big.distance).exp_m1())
        * (big.density / small.density);
    let upper = ((4.0 * big.distance).exp_m1() / (4.0 * small.distance).exp_m1())
        * (small.density / big.density);
    Ok((lower, upper))
}

/// The chart `f⁻¹` of `f(𝔻)`.
pub struct InverseChart<'a>(pub &'a MapDescriptor);

impl DiskChart for InverseChart<'_> {
    fn chart(&self, z: ComplexValue) -> Result<(ComplexValue, ComplexValue)> {
        let u = self.0.inverse(z)?;
        Ok((u, self.0.deriv(u)?.inv()))
    }
}

/// `J` for `D = 𝔻`, `D₁ = f(𝔻)`, `u = 0`, `v = f(w)`.
pub fn j_functionals_for_map(f: &MapDescriptor, w: ComplexValue) -> Result<(f64, f64)> {
    check_point(w)?;
    let u = Complex64::new(0.0, 0.0);
    let v = f.eval(w)?;
    let big = hyperbolic(u, v)?;
    let small = hyperbolic_mapped(&InverseChart(f), u, v)?;
    j_functionals(&big, &small)
}

/// The two argument estimates `∓arg R + Λ ≤ 0` with `R = f(w)/(w f'(0))`,
/// its argument continued along the radius from 0, and
/// `Λ = log[(1+|f(w)|)(1-|w|)/((1-|f(w)|)(1+|w|))]`.
pub fn argument_bounds(
    f: &MapDescriptor,
    w: ComplexValue,
) -> Result<(InequalityReport, InequalityReport)> {
    check_point(w)?;
    let arg = tracked_log_ratio(f, w)?.im;
    let lambda = distance_term(f.eval(w)?.norm(), w.norm());
    Ok((
        InequalityReport::new("arg_minus", f, w, None, -arg + lambda),
        InequalityReport::new("arg_plus", f, w, None, arg + lambda),
    ))
}
