use super::contour::{contour_integral, Coordinates};
use super::{check_r, module_residue, ContourOptions};
use crate::cover::{build_lift, GrowthCover};
use crate::error::Result;
use crate::maps::MapDescriptor;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemainderReport {
    /// `m(𝔻, D₂) - m(𝔻, D₁)` from the residue path.
    pub lhs: f64,
    /// `∮ q₁ ∗dq₂` over the boundary of the lifted `D₂`, with `q₁` the real
    /// part of the primitive belonging to `D₁`.
    pub rhs: f64,
    pub rhs_est_error: f64,
    pub gap: f64,
}

/// Compares the difference of modules for `D₁ = f(𝔻)` and
/// `D₂ = f(s𝔻)` with the remainder integral over `∂D̃₂`.
pub fn remainder_identity_check(
    f_outer: &MapDescriptor,
    s_inner: f64,
    r: f64,
    psi: f64,
) -> Result<RemainderReport> {
    check_r(r)?;
    let inner = if s_inner == 1.0 { f_outer.clone() } else { f_outer.nested_family(s_inner)? };
    let lhs = module_residue(&inner, r, psi)?.value - module_residue(f_outer, r, psi)?.value;
    if s_inner == 1.0 {
        // D₂ = D₁: the Dirichlet solution reproduces q₁, so q₂ vanishes
        return Ok(RemainderReport { lhs, rhs: 0.0, rhs_est_error: 0.0, gap: lhs.abs() });
    }
    let cover = GrowthCover::new(r, psi)?;
    let outer_lift = build_lift(&cover, f_outer)?;
    let inner_lift = build_lift(&cover, &inner)?;
    let opts = ContourOptions::default();
    let rhs = contour_integral(&outer_lift, &inner_lift, &opts, Coordinates::Disk)?;
    Ok(RemainderReport {
        lhs,
        rhs: rhs.value,
        rhs_est_error: rhs.est_error,
        gap: (lhs - rhs.value).abs(),
    })
}
