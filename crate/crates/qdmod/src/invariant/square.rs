use std::f64::consts::PI;

use num_complex::Complex64;

use super::contour::{extrapolate_to_one, harmonic_coefficients, harmonic_d_eta, tail_energy};
use super::{ContourOptions, EvalPath, ModuleResult};
use crate::error::Result;
use crate::maps::MapDescriptor;

/// `m = 4π log|f'(0)|` for `α = dz²/z²`.
pub fn module_perfect_square(f: &MapDescriptor) -> ModuleResult {
    let value = 4.0 * PI * f.origin_deriv().norm().ln();
    ModuleResult::new(value, EvalPath::ClosedForm, 16.0 * f64::EPSILON * (1.0 + value.abs()))
}

/// The same value as `2 lim ∮ q₁ ∗dq₂` over `|u| = ρ` in the source disk,
/// with `q₁ = log|f(u)|` and `q₂ = q₁ - U`, `U` harmonic with boundary values
/// `log|f|`.
pub fn module_perfect_square_contour(
    f: &MapDescriptor,
    opts: &ContourOptions,
) -> Result<ModuleResult> {
    let mut branch_log = Vec::new();
    let mut radii = opts.radii.clone();
    if !f.has_analytic_boundary() {
        radii.retain(|&r| r <= 0.995);
        if radii.len() < 3 {
            radii = vec![0.98, 0.99, 0.995];
        }
        branch_log.push(format!("non-analytic boundary: radii {radii:?}"));
    }
    let m = opts.nodes;
    let b = (0..m)
        .map(|j| Ok(f.boundary_eval(2.0 * PI * j as f64 / m as f64)?.norm().ln()))
        .collect::<Result<Vec<f64>>>()?;
    let coeffs = harmonic_coefficients(&b);
    let mut warnings = Vec::new();
    let tail = tail_energy(&coeffs);
    if tail > 1e-6 {
        warnings.push(format!("boundary data under-resolved: tail energy {tail:.3e}"));
    }
    let mut values = Vec::new();
    for &rho in &radii {
        let du = harmonic_d_eta(&coeffs, rho, m);
        let mut sum = 0.0;
        for (j, du) in du.iter().enumerate() {
            let u = Complex64::from_polar(rho, 2.0 * PI * j as f64 / m as f64);
            let fu = f.eval(u)?;
            let dq1 = f.deriv(u)? / fu * 0.5;
            sum += fu.norm().ln() * (u * (dq1 - du) * 2.0).re;
        }
        values.push(2.0 * sum * 2.0 * PI / m as f64);
    }
    let (value, est) = extrapolate_to_one(&radii, &values);
    branch_log.push(format!("radii {radii:?} gave {values:?}"));
    Ok(ModuleResult { value, path: EvalPath::Contour, est_error: est, branch_log, warnings })
}
