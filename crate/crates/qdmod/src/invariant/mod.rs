//! The module `m(𝔻, f(𝔻), α)` of the growth differential, evaluated three
//! independent ways, together with the perfect-square case and the
//! remainder identity for nested domains.
//!
//! * [`module_closed_form`] evaluates the two-term closed formula.
//! * [`module_residue`] applies the residue theorem on the cover.
//! * [`module_contour`] integrates `q₁ ∗dq₂` on circles near the boundary
//!   and extrapolates; it is the definition, and the slowest path.

mod closed_form;
mod contour;
mod remainder;
mod residue;
mod square;

use std::fmt;

use crate::error::{QdError, Result};

pub use closed_form::{
    calibrate_c2, module_closed_form, module_closed_form_with, tracked_log_ratio, C2_CALIBRATED,
    C2_LITERAL,
};
pub use contour::{
    extrapolate_to_one, module_contour, module_contour_cover_coords, module_contour_with,
    ContourOptions, OuterPrimitive,
};
pub(crate) use closed_form::closed_form_terms;
pub use remainder::{remainder_identity_check, RemainderReport};
pub use residue::module_residue;
pub use square::{module_perfect_square, module_perfect_square_contour};

/// Smallest `r` accepted; below it the simple pole at `r` merges with the
/// double pole at 0.
pub const MIN_R: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EvalPath {
    ClosedForm,
    Residue,
    Contour,
}

impl fmt::Display for EvalPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvalPath::ClosedForm => "A-closed-form",
            EvalPath::Residue => "B-residue",
            EvalPath::Contour => "C-contour",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModuleResult {
    pub value: f64,
    pub path: EvalPath,
    pub est_error: f64,
    /// Branch decisions taken while evaluating logs and square roots.
    pub branch_log: Vec<String>,
    /// Numerical diagnostics that did not abort the evaluation.
    pub warnings: Vec<String>,
}

impl ModuleResult {
    fn new(value: f64, path: EvalPath, est_error: f64) -> Self {
        ModuleResult { value, path, est_error, branch_log: Vec::new(), warnings: Vec::new() }
    }
}

pub(crate) fn check_r(r: f64) -> Result<()> {
    if !(r >= MIN_R && r < 1.0) {
        return Err(QdError::InvalidParameter(format!(
            "r = {r} must lie in [{MIN_R}, 1)"
        )));
    }
    Ok(())
}
