use std::f64::consts::PI;

use num_complex::Complex64;

use super::{check_r, EvalPath, ModuleResult};
use crate::cover::{build_lift, GrowthCover, LiftedMap};
use crate::error::{QdError, Result};
use crate::maps::MapDescriptor;

const PROBE: f64 = 1e-6;

/// `m = 2π Re[β (x - x₁)(-i√r) - β (x - x₁)(i√r)]`.
///
/// At `ζ₀ = ±i√r` both log quotients of the first pair blow up; their ratio
/// has the finite limit `C` and the difference of principal logs is
/// `Log C + 2πik`, with `k` read off at a probe point just outside `ζ₀`.
pub fn module_residue(f: &MapDescriptor, r: f64, psi: f64) -> Result<ModuleResult> {
    check_r(r)?;
    let cover = GrowthCover::new(r, psi)?;
    let lift = build_lift(&cover, f)?;
    let mut log = Vec::new();
    let e_plus = singular_value(&lift, 1.0, &mut log)?;
    let e_minus = singular_value(&lift, -1.0, &mut log)?;
    let beta = cover.beta();
    let value = 2.0 * PI * (beta * e_minus - beta * e_plus).re;
    // x - x₁ is odd, so the two values should cancel
    let est = 2.0 * PI * (e_minus + e_plus).norm() + 1e-14 * (1.0 + value.abs());
    let mut res = ModuleResult::new(value, EvalPath::Residue, est);
    res.branch_log = log;
    Ok(res)
}

fn singular_value(lift: &LiftedMap, sigma: f64, log: &mut Vec<String>) -> Result<Complex64> {
    let cover = lift.cover();
    let c = cover.branch_point();
    let beta = cover.beta();
    let a = lift.a();
    let zeta0 = c * sigma;
    let g0 = a * sigma;
    let gp = lift.g_tilde_prime_given(zeta0, g0)?;
    let limit = if sigma > 0.0 { c * gp / a } else { a / (c * gp) };
    if limit.re < 0.0 && limit.im.abs() < 1e-12 {
        return Err(QdError::BranchTracking(format!(
            "limit quotient {limit} lies on the negative axis"
        )));
    }
    // the cut of the lifted log leaves ζ₀ in direction -σa/G̃'; it must not
    // run along the outward probe direction
    let cut = -g0 / gp;
    if (cut / zeta0).arg().abs() < 1e-3 {
        return Err(QdError::BranchTracking(format!(
            "probe direction runs along the cut at {zeta0}"
        )));
    }
    let probe = zeta0 * (1.0 + PROBE);
    let p = (probe + c) / (probe - c);
    let gt = lift.g_tilde(probe)?;
    let p1 = (gt + a) / (gt - a);
    let ratio = p / p1;
    if (ratio.ln() - limit.ln()).norm() > 0.5 {
        return Err(QdError::BranchTracking(format!(
            "quotient at the probe {ratio} is far from its limit {limit}"
        )));
    }
    let k = ((p.ln() - p1.ln() - ratio.ln()).im / (2.0 * PI)).round();
    log.push(format!("zeta0 = {zeta0}: limit = {limit}, k = {k}"));

    let one = Complex64::new(1.0, 0.0);
    let b = (one - c * zeta0) / (one + c * zeta0);
    let b1 = (one + a.conj() * g0) / (one - a.conj() * g0);
    let first = limit.ln() + Complex64::new(0.0, 2.0 * PI * k);
    Ok(beta * first - beta.conj() * (b.ln() - b1.ln()))
}
