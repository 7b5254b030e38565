//! Möbius transformations and the hyperbolic geometry of the unit disk.
//!
//! Every [`MoebiusMap`] is stored with its coefficients scaled so that
//! `ad - bc = 1`; composition and inversion stay within that normalization.

use num_complex::Complex64;

use crate::error::{QdError, Result};
use crate::ComplexValue;

const POLE_TOL: f64 = 1e-14;

/// `z ↦ (az + b) / (cz + d)` with `ad - bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusMap {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

impl MoebiusMap {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        if det.norm() < POLE_TOL {
            return Err(QdError::DegenerateMoebius(det.norm()));
        }
        let k = det.sqrt().inv();
        let m = MoebiusMap { a: a * k, b: b * k, c: c * k, d: d * k };
        let det = m.a * m.d - m.b * m.c;
        if det.norm() < POLE_TOL {
            return Err(QdError::DegenerateMoebius(det.norm()));
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        MoebiusMap { a: one, b: zero, c: zero, d: one }
    }

    /// `w ↦ (w + a) / (1 + ā w)`, the disk automorphism sending 0 to `a`.
    pub fn disk_shift(a: ComplexValue) -> Result<Self> {
        if a.norm() >= 1.0 {
            return Err(QdError::OutsideDisk(a));
        }
        let one = Complex64::new(1.0, 0.0);
        Self::new(one, a, a.conj(), one)
    }

    /// `z ↦ e^{iθ} (z - a) / (1 - ā z)`.
    pub fn disk_automorphism(theta: f64, a: ComplexValue) -> Result<Self> {
        if a.norm() >= 1.0 {
            return Err(QdError::OutsideDisk(a));
        }
        let rot = Complex64::from_polar(1.0, theta);
        let one = Complex64::new(1.0, 0.0);
        Self::new(rot, -rot * a, -a.conj(), one)
    }

    pub fn rotation(theta: f64) -> Self {
        let half = Complex64::from_polar(1.0, theta / 2.0);
        let zero = Complex64::new(0.0, 0.0);
        MoebiusMap { a: half, b: zero, c: zero, d: half.conj() }
    }

    pub fn coefficients(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn apply(&self, z: ComplexValue) -> Result<ComplexValue> {
        let den = self.c * z + self.d;
        if den.norm() < POLE_TOL {
            return Err(QdError::PoleOfMap(z));
        }
        Ok((self.a * z + self.b) / den)
    }

    /// Derivative `1 / (cz + d)^2`.
    pub fn deriv(&self, z: ComplexValue) -> Result<ComplexValue> {
        let den = self.c * z + self.d;
        if den.norm() < POLE_TOL {
            return Err(QdError::PoleOfMap(z));
        }
        Ok((den * den).inv())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MoebiusMap) -> MoebiusMap {
        let m = MoebiusMap {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        };
        // products of unit-determinant matrices drift slowly; renormalize
        MoebiusMap::new(m.a, m.b, m.c, m.d).unwrap_or(m)
    }

    pub fn inverse(&self) -> MoebiusMap {
        MoebiusMap { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }
}

/// Hyperbolic line element at the first point and distance between two points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicData {
    pub density: f64,
    pub distance: f64,
}

fn check_in_disk(z: ComplexValue) -> Result<()> {
    if z.norm() < 1.0 && z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(QdError::OutsideDisk(z))
    }
}

/// Pseudo-hyperbolic distance `|(u - v) / (1 - v̄ u)|`.
pub fn pseudo_distance(u: ComplexValue, v: ComplexValue) -> f64 {
    ((u - v) / (Complex64::new(1.0, 0.0) - v.conj() * u)).norm()
}

/// Density `1/(1-|u|²)` at `u` and distance `½ log((1+δ)/(1-δ))` with δ the
/// pseudo-hyperbolic distance.
pub fn hyperbolic(u: ComplexValue, v: ComplexValue) -> Result<HyperbolicData> {
    check_in_disk(u)?;
    check_in_disk(v)?;
    let delta = pseudo_distance(u, v);
    Ok(HyperbolicData {
        density: 1.0 / (1.0 - u.norm_sqr()),
        distance: delta.atanh(),
    })
}

/// A conformal bijection `F` from some simply connected domain onto the disk.
pub trait DiskChart {
    /// Returns `(F(z), F'(z))`.
    fn chart(&self, z: ComplexValue) -> Result<(ComplexValue, ComplexValue)>;
}

impl DiskChart for MoebiusMap {
    fn chart(&self, z: ComplexValue) -> Result<(ComplexValue, ComplexValue)> {
        Ok((self.apply(z)?, self.deriv(z)?))
    }
}

/// `F ∘ M` for a chart `F` and a Möbius map `M`; the chart of `M⁻¹(D)`.
pub struct PrecomposedChart<'a, C: DiskChart + ?Sized> {
    pub chart: &'a C,
    pub pre: MoebiusMap,
}

impl<C: DiskChart + ?Sized> DiskChart for PrecomposedChart<'_, C> {
    fn chart(&self, z: ComplexValue) -> Result<(ComplexValue, ComplexValue)> {
        let m = self.pre.apply(z)?;
        let (f, fp) = self.chart.chart(m)?;
        Ok((f, fp * self.pre.deriv(z)?))
    }
}

/// Hyperbolic data of the domain charted by `chart`: density
/// `|F'(u)| / (1 - |F(u)|²)` and distance `d_𝔻(F(u), F(v))`.
pub fn hyperbolic_mapped<C: DiskChart + ?Sized>(
    chart: &C,
    u: ComplexValue,
    v: ComplexValue,
) -> Result<HyperbolicData> {
    let (fu, fpu) = chart.chart(u)?;
    let (fv, _) = chart.chart(v)?;
    let h = hyperbolic(fu, fv)?;
    Ok(HyperbolicData {
        density: fpu.norm() / (1.0 - fu.norm_sqr()),
        distance: h.distance,
    })
}

/// Endpoints `(ρ, τ)` on the unit circle of the geodesic through `u` and `v`,
/// ordered `ρ, u, v, τ` along it.
pub fn geodesic_endpoints(
    u: ComplexValue,
    v: ComplexValue,
) -> Result<(ComplexValue, ComplexValue)> {
    check_in_disk(u)?;
    check_in_disk(v)?;
    if (u - v).norm() < 1e-14 {
        return Err(QdError::DegeneratePair(u, v));
    }
    // g sends u to 0; geodesics through 0 are diameters
    let g = MoebiusMap::disk_automorphism(0.0, u)?;
    let v0 = g.apply(v)?;
    let dir = v0 / v0.norm();
    let ginv = g.inverse();
    let rho = ginv.apply(-dir)?;
    let tau = ginv.apply(dir)?;
    Ok((rho / rho.norm(), tau / tau.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_map_fixes_points() {
        let z = c(0.3, 0.1);
        assert_eq!(MoebiusMap::identity().apply(z).unwrap(), z);
    }

    #[test]
    fn shift_by_r_sends_zero_to_r() {
        let t = MoebiusMap::disk_shift(c(0.5, 0.0)).unwrap();
        assert!((t.apply(c(0.0, 0.0)).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn shift_inverse_recovers_point() {
        let s = MoebiusMap::disk_shift(c(0.2, 0.0)).unwrap();
        let w = c(-0.2, 0.0);
        let image = s.apply(w).unwrap();
        assert!(image.norm() < 1e-15);
        assert!((s.inverse().apply(image).unwrap() - w).norm() < 1e-15);
    }

    #[test]
    fn pole_is_reported() {
        let m = MoebiusMap::new(c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(-0.5, 0.0)).unwrap();
        assert!(matches!(m.apply(c(0.5, 0.0)), Err(QdError::PoleOfMap(_))));
    }

    #[test]
    fn degenerate_coefficients_rejected() {
        let one = c(1.0, 0.0);
        assert!(MoebiusMap::new(one, one, one, one).is_err());
    }

    #[test]
    fn hyperbolic_basic_values() {
        let h = hyperbolic(c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_eq!(h.density, 1.0);
        assert_eq!(h.distance, 0.0);
        let h = hyperbolic(c(0.0, 0.0), c(0.5, 0.0)).unwrap();
        assert!((h.distance - 0.5 * 3f64.ln()).abs() < 1e-15);
        assert!(hyperbolic(c(1.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn scaled_disk_density() {
        // D = s𝔻 with chart z ↦ z/s
        let s = 0.7;
        let chart = MoebiusMap::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)).unwrap();
        let h = hyperbolic_mapped(&chart, c(0.0, 0.0), c(0.1, 0.0)).unwrap();
        assert!((h.density - 1.0 / s).abs() < 1e-14);
        let id = hyperbolic_mapped(&MoebiusMap::identity(), c(0.1, 0.2), c(-0.3, 0.0)).unwrap();
        let direct = hyperbolic(c(0.1, 0.2), c(-0.3, 0.0)).unwrap();
        assert!((id.density - direct.density).abs() < 1e-15);
        assert!((id.distance - direct.distance).abs() < 1e-15);
    }

    #[test]
    fn geodesic_endpoints_of_diameters() {
        let (rho, tau) = geodesic_endpoints(c(0.0, 0.0), c(0.5, 0.0)).unwrap();
        assert!((rho - c(-1.0, 0.0)).norm() < 1e-14);
        assert!((tau - c(1.0, 0.0)).norm() < 1e-14);
        let (rho, tau) = geodesic_endpoints(c(0.0, 0.0), c(0.0, 0.5)).unwrap();
        assert!((rho - c(0.0, -1.0)).norm() < 1e-14);
        assert!((tau - c(0.0, 1.0)).norm() < 1e-14);
        let (rho, tau) = geodesic_endpoints(c(0.2, 0.0), c(0.5, 0.0)).unwrap();
        assert!((rho - c(-1.0, 0.0)).norm() < 1e-14);
        assert!((tau - c(1.0, 0.0)).norm() < 1e-14);
        assert!(geodesic_endpoints(c(0.2, 0.0), c(0.2, 0.0)).is_err());
    }
}
