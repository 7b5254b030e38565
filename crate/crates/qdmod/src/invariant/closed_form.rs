use std::f64::consts::PI;

use num_complex::Complex64;

use super::{check_r, EvalPath, ModuleResult};
use crate::error::{QdError, Result};
use crate::maps::MapDescriptor;
use crate::ComplexValue;

/// Weight of the second term as printed alongside the closed formula.
pub const C2_LITERAL: f64 = 1.0;

/// Weight of the second term obtained by evaluating the residue formula in
/// closed form; [`calibrate_c2`] reproduces it numerically.
pub const C2_CALIBRATED: f64 = 4.0 * PI;

/// `log(f(w)/(w f'(0)))` with the branch continuous along
/// `t ↦ f(tw)/(tw f'(0))` from `t = 0`, where the quotient is 1.
pub fn tracked_log_ratio(f: &MapDescriptor, w: ComplexValue) -> Result<ComplexValue> {
    if w.norm() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let fp0 = f.origin_deriv();
    let ratio = |t: f64| -> Result<Complex64> {
        let z = w * t;
        Ok(f.eval(z)? / (z * fp0))
    };
    let mut t: f64 = 0.0;
    let mut prev = Complex64::new(1.0, 0.0);
    let mut arg = 0.0;
    let mut step = 1.0 / 16.0;
    while t < 1.0 {
        let t1 = (t + step).min(1.0);
        let q = ratio(t1)?;
        if q.norm() < 1e-300 {
            return Err(QdError::BranchTracking(format!("quotient vanishes at t = {t1}")));
        }
        let turn = (q / prev).arg();
        if turn.abs() < 0.2 {
            arg += turn;
            prev = q;
            t = t1;
            step *= 1.5;
        } else {
            step /= 2.0;
            if step < 1e-10 {
                return Err(QdError::BranchTracking(format!("argument jumps near t = {t}")));
            }
        }
    }
    Ok(Complex64::new(prev.norm().ln(), arg))
}

/// Closed form with the calibrated second-term weight.
pub fn module_closed_form(f: &MapDescriptor, r: f64, psi: f64) -> Result<ModuleResult> {
    module_closed_form_with(f, r, psi, C2_CALIBRATED)
}

/// `4π Re[-e^{iψ} log X] + c₂ Λ` with
/// `X = w₀f'(0)/f(w₀) · (1-r²)/(1-|w₀|²)`,
/// `Λ = log[(1+r)(1-|w₀|) / ((1-r)(1+|w₀|))]` and `w₀ = f⁻¹(r)`.
pub fn module_closed_form_with(
    f: &MapDescriptor,
    r: f64,
    psi: f64,
    c2: f64,
) -> Result<ModuleResult> {
    check_r(r)?;
    let w0 = f.inverse(Complex64::new(r, 0.0))?;
    let (first, lambda) = closed_form_terms(f, w0, psi)?;
    let value = first + c2 * lambda;
    let est = 64.0 * f64::EPSILON * (first.abs() + (c2 * lambda).abs() + 1.0);
    let mut res = ModuleResult::new(value, EvalPath::ClosedForm, est);
    res.branch_log.push(format!("w0 = {w0}; log X continued along the radius to w0"));
    Ok(res)
}

/// The two terms `4π Re[-e^{iψ} log X]` and `Λ` at a point `w` with
/// arbitrary `f(w)`; `|f(w)|` replaces `r`.
pub(crate) fn closed_form_terms(f: &MapDescriptor, w: ComplexValue, psi: f64) -> Result<(f64, f64)> {
    let fw = f.eval(w)?;
    let rw = fw.norm();
    let aw = w.norm();
    let log_x = Complex64::new(((1.0 - rw * rw) / (1.0 - aw * aw)).ln(), 0.0)
        - tracked_log_ratio(f, w)?;
    let first = 4.0 * PI * (-Complex64::from_polar(1.0, psi) * log_x).re;
    let lambda = ((1.0 + rw) * (1.0 - aw) / ((1.0 - rw) * (1.0 + aw))).ln();
    Ok((first, lambda))
}

/// Fits the second-term weight so that the closed form reproduces the
/// residue path on `Scale(0.9)`, `r = 0.5`, `ψ = π`.
pub fn calibrate_c2() -> Result<f64> {
    let f = MapDescriptor::scale(0.9)?;
    let (r, psi) = (0.5, PI);
    let target = super::module_residue(&f, r, psi)?.value;
    let w0 = f.inverse(Complex64::new(r, 0.0))?;
    let (first, lambda) = closed_form_terms(&f, w0, psi)?;
    Ok((target - first) / lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_gives_zero() {
        let id = MapDescriptor::identity();
        for psi in [0.0, 1.0, PI] {
            assert!(module_closed_form(&id, 0.4, psi).unwrap().value.abs() < 1e-14);
        }
    }

    #[test]
    fn tracked_log_of_linear_maps_is_constant() {
        let f = MapDescriptor::scale(0.7).unwrap();
        assert!(tracked_log_ratio(&f, c(0.3, 0.4)).unwrap().norm() < 1e-15);
        let f = MapDescriptor::rotation(2.0).unwrap();
        assert!(tracked_log_ratio(&f, c(-0.6, 0.1)).unwrap().norm() < 1e-15);
    }

    #[test]
    fn tracked_log_matches_principal_for_small_arguments() {
        let f = MapDescriptor::pick_slit(0.5).unwrap();
        let w = c(0.3, 0.2);
        let q = f.eval(w).unwrap() / (w * f.origin_deriv());
        assert!((tracked_log_ratio(&f, w).unwrap() - q.ln()).norm() < 1e-13);
    }

    #[test]
    fn scale_at_psi_pi_has_real_first_term() {
        // -e^{iπ} = 1 and X is real positive for scalings
        let f = MapDescriptor::scale(0.9).unwrap();
        let w0 = f.inverse(c(0.5, 0.0)).unwrap();
        let (first, lambda) = closed_form_terms(&f, w0, PI).unwrap();
        let expect = 4.0 * PI * ((1.0 - 0.25) / (1.0 - w0.norm_sqr())).ln();
        assert!((first - expect).abs() < 1e-13);
        assert!(lambda < 0.0);
    }

    #[test]
    fn literal_weight_is_selectable() {
        let f = MapDescriptor::scale(0.8).unwrap();
        let a = module_closed_form_with(&f, 0.3, 0.0, C2_LITERAL).unwrap().value;
        let b = module_closed_form(&f, 0.3, 0.0).unwrap().value;
        assert!((a - b).abs() > 1e-3);
    }

    #[test]
    fn calibration_reproduces_frozen_weight() {
        let c2 = calibrate_c2().unwrap();
        assert!((c2 - C2_CALIBRATED).abs() < 1e-9, "{c2}");
    }

    #[test]
    fn small_r_rejected() {
        let f = MapDescriptor::identity();
        assert!(module_closed_form(&f, 1e-4, 0.0).is_err());
    }
}
