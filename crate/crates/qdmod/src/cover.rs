//! The branched double cover `ζ ↦ T(ζ²)` of the growth family and the
//! square-root primitives `x` and `x₁` on it.
//!
//! With `T(w) = (w + r)/(1 + rw)` and `β = i e^{iψ/2}`, the primitive
//!
//! ```text
//! x(ζ) = β log((ζ + i√r)/(ζ - i√r)) - β̄ log((1 - i√r ζ)/(1 + i√r ζ))
//! ```
//!
//! satisfies `x'(ζ)² dζ² = π*(Q dz²)` for the growth differential `Q`, and
//! `Re x = 0` on the unit circle. For a map `f` with `f(w₀) = r` the lift
//! `G̃(ζ) = √(G(ζ²))`, `G = S⁻¹ ∘ f⁻¹ ∘ T`, carries the cover of `f(𝔻)` onto the
//! disk, and `x₁` is `x` transported along it.

use num_complex::Complex64;

use crate::error::{QdError, Result};
use crate::geom::MoebiusMap;
use crate::maps::MapDescriptor;
use crate::ComplexValue;

const SINGULAR_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthCover {
    r: f64,
    psi: f64,
    t: MoebiusMap,
    beta: Complex64,
}

impl GrowthCover {
    pub fn new(r: f64, psi: f64) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(QdError::InvalidParameter(format!("r = {r} must lie in (0, 1)")));
        }
        if !psi.is_finite() {
            return Err(QdError::InvalidParameter(format!("psi = {psi}")));
        }
        let beta = Complex64::i() * Complex64::from_polar(1.0, psi / 2.0);
        let check = beta * beta + Complex64::from_polar(1.0, psi);
        debug_assert!(check.norm() < 1e-15);
        Ok(GrowthCover {
            r,
            psi,
            t: MoebiusMap::disk_shift(Complex64::new(r, 0.0))?,
            beta,
        })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    /// `T(w) = (w + r)/(1 + rw)`.
    pub fn t_map(&self) -> &MoebiusMap {
        &self.t
    }

    /// The branch point `i√r` over `0`.
    pub fn branch_point(&self) -> Complex64 {
        Complex64::new(0.0, self.r.sqrt())
    }

    /// `π(ζ) = T(ζ²)`.
    pub fn project(&self, zeta: ComplexValue) -> Result<ComplexValue> {
        self.t.apply(zeta * zeta)
    }

    pub fn project_deriv(&self, zeta: ComplexValue) -> Result<ComplexValue> {
        Ok(self.t.deriv(zeta * zeta)? * zeta * 2.0)
    }

    fn check_regular(&self, zeta: ComplexValue) -> Result<()> {
        let c = self.branch_point();
        if (zeta - c).norm() < SINGULAR_TOL || (zeta + c).norm() < SINGULAR_TOL {
            return Err(QdError::Singularity(zeta));
        }
        Ok(())
    }

    pub fn x_eval(&self, zeta: ComplexValue) -> Result<ComplexValue> {
        self.check_regular(zeta)?;
        let c = self.branch_point();
        let one = Complex64::new(1.0, 0.0);
        let a = (zeta + c) / (zeta - c);
        let b = (one - c * zeta) / (one + c * zeta);
        Ok(self.beta * a.ln() - self.beta.conj() * b.ln())
    }

    /// `2√r e^{iψ/2}/(ζ² + r) + 2√r e^{-iψ/2}/(1 + rζ²)`.
    pub fn x_prime(&self, zeta: ComplexValue) -> Result<ComplexValue> {
        self.check_regular(zeta)?;
        let sr = self.r.sqrt();
        let e = Complex64::from_polar(1.0, self.psi / 2.0);
        let z2 = zeta * zeta;
        Ok(e * (2.0 * sr) / (z2 + self.r) + e.conj() * (2.0 * sr) / (z2 * self.r + 1.0))
    }
}

/// Continues `√(h(t))` for `t` from 0 to 1 starting from the root `root0` of
/// `h(0)`, choosing at each node the root nearest the previous one.
pub(crate) fn continued_sqrt<H>(h: H, root0: Complex64) -> Result<Complex64>
where
    H: Fn(f64) -> Result<Complex64>,
{
    let mut t: f64 = 0.0;
    let mut root = root0;
    let mut step = 1.0 / 16.0;
    while t < 1.0 {
        let t1 = (t + step).min(1.0);
        let s = h(t1)?.sqrt();
        let s = if (s - root).norm() <= (s + root).norm() { s } else { -s };
        if (s - root).norm() <= 0.25 * root.norm() {
            t = t1;
            root = s;
            step *= 1.5;
        } else {
            step /= 2.0;
            if step < 1e-9 {
                return Err(QdError::BranchTracking(format!("square root lost near t = {t}")));
            }
        }
    }
    Ok(root)
}

/// The lift of `f` to the covers: `G = S⁻¹ ∘ f⁻¹ ∘ T` with
/// `S(w) = (w + w₀)/(1 + w̄₀ w)`, `w₀ = f⁻¹(r)`, and its odd square root `G̃`.
#[derive(Debug, Clone)]
pub struct LiftedMap {
    f: MapDescriptor,
    cover: GrowthCover,
    w0: Complex64,
    s: MoebiusMap,
    s_inv: MoebiusMap,
    root0: Complex64,
    a: Complex64,
}

/// Builds the lift of `f` over the cover; requires `r ∈ f(𝔻)`.
pub fn build_lift(cover: &GrowthCover, f: &MapDescriptor) -> Result<LiftedMap> {
    let w0 = f.inverse(Complex64::new(cover.r, 0.0))?;
    let s = MoebiusMap::disk_shift(w0)?;
    let mut lift = LiftedMap {
        f: f.clone(),
        cover: cover.clone(),
        w0,
        s,
        s_inv: s.inverse(),
        root0: Complex64::new(1.0, 0.0),
        a: Complex64::new(0.0, 0.0),
    };
    lift.root0 = lift.g_prime(Complex64::new(0.0, 0.0))?.sqrt();
    lift.a = lift.g_tilde(cover.branch_point())?;
    Ok(lift)
}

impl LiftedMap {
    pub fn map(&self) -> &MapDescriptor {
        &self.f
    }

    pub fn cover(&self) -> &GrowthCover {
        &self.cover
    }

    pub fn w0(&self) -> Complex64 {
        self.w0
    }

    pub fn s_map(&self) -> &MoebiusMap {
        &self.s
    }

    /// `a = G̃(i√r)`; `a² = -w₀`.
    pub fn a(&self) -> Complex64 {
        self.a
    }

    /// `G̃'(0) = √G'(0)`, the root fixing the branch of `G̃`.
    pub fn origin_root(&self) -> Complex64 {
        self.root0
    }

    pub fn g(&self, t: ComplexValue) -> Result<ComplexValue> {
        let u = self.f.inverse(self.cover.t.apply(t)?)?;
        self.s_inv.apply(u)
    }

    pub fn g_prime(&self, t: ComplexValue) -> Result<ComplexValue> {
        let u = self.f.inverse(self.cover.t.apply(t)?)?;
        Ok(self.s_inv.deriv(u)? / self.f.deriv(u)? * self.cover.t.deriv(t)?)
    }

    /// `G̃(ζ) = ζ √(G(ζ²)/ζ²)` with the root continued along `[0, ζ²]`.
    pub fn g_tilde(&self, zeta: ComplexValue) -> Result<ComplexValue> {
        let tau = zeta * zeta;
        if tau.norm() < 1e-300 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let g0 = self.root0 * self.root0;
        let h = |t: f64| -> Result<Complex64> {
            if t * tau.norm() < 1e-12 {
                return Ok(g0);
            }
            let p = tau * t;
            Ok(self.g(p)? / p)
        };
        Ok(zeta * continued_sqrt(h, self.root0)?)
    }

    /// `G̃'(ζ) = ζ G'(ζ²)/G̃(ζ)`.
    pub fn g_tilde_prime(&self, zeta: ComplexValue) -> Result<ComplexValue> {
        let gt = self.g_tilde(zeta)?;
        self.g_tilde_prime_given(zeta, gt)
    }

    pub(crate) fn g_tilde_prime_given(
        &self,
        zeta: ComplexValue,
        gt: ComplexValue,
    ) -> Result<ComplexValue> {
        if gt.norm() < 1e-12 {
            return Ok(self.root0);
        }
        Ok(zeta * self.g_prime(zeta * zeta)? / gt)
    }

    /// `x₁` as a function of `η = G̃(ζ)`.
    pub fn x1_of_eta(&self, eta: ComplexValue) -> Result<ComplexValue> {
        let a = self.a;
        if (eta - a).norm() < SINGULAR_TOL || (eta + a).norm() < SINGULAR_TOL {
            return Err(QdError::Singularity(eta));
        }
        let beta = self.cover.beta;
        let one = Complex64::new(1.0, 0.0);
        let p = (eta + a) / (eta - a);
        let q = (one + a.conj() * eta) / (one - a.conj() * eta);
        Ok(beta * p.ln() - beta.conj() * q.ln())
    }

    /// `dx₁/dη`.
    pub fn x1_prime_of_eta(&self, eta: ComplexValue) -> Result<ComplexValue> {
        let a = self.a;
        if (eta - a).norm() < SINGULAR_TOL || (eta + a).norm() < SINGULAR_TOL {
            return Err(QdError::Singularity(eta));
        }
        let beta = self.cover.beta;
        let ac = a.conj();
        let one = Complex64::new(1.0, 0.0);
        Ok(beta * ((eta + a).inv() - (eta - a).inv())
            - beta.conj() * (ac / (one + ac * eta) + ac / (one - ac * eta)))
    }

    /// `x₁(ζ) = β log((G̃ + a)/(G̃ - a)) - β̄ log((1 + āG̃)/(1 - āG̃))`.
    pub fn x1_eval(&self, zeta: ComplexValue) -> Result<ComplexValue> {
        self.x1_of_eta(self.g_tilde(zeta)?)
    }

    pub fn x1_prime(&self, zeta: ComplexValue) -> Result<ComplexValue> {
        let gt = self.g_tilde(zeta)?;
        Ok(self.x1_prime_of_eta(gt)? * self.g_tilde_prime_given(zeta, gt)?)
    }

    /// `(x - x₁)(ζ)` at a regular point, each log principal.
    pub fn x_minus_x1(&self, zeta: ComplexValue) -> Result<ComplexValue> {
        Ok(self.cover.x_eval(zeta)? - self.x1_eval(zeta)?)
    }

    /// `h(τ) = T⁻¹(f(S(τ)))`, the inverse of `G`, and its derivative.
    pub fn g_inverse(&self, tau: ComplexValue) -> Result<(ComplexValue, ComplexValue)> {
        let u = self.s.apply(tau)?;
        let v = self.f.eval(u)?;
        let t_inv = self.cover.t.inverse();
        let h = t_inv.apply(v)?;
        let hp = t_inv.deriv(v)? * self.f.deriv(u)? * self.s.deriv(tau)?;
        Ok((h, hp))
    }

    /// `h` on the unit circle through the boundary extension of `f`.
    pub fn g_inverse_boundary(&self, tau: ComplexValue) -> Result<ComplexValue> {
        let u = self.s.apply(tau)?;
        let v = self.f.boundary_eval(u.arg())?;
        self.cover.t.inverse().apply(v)
    }

    /// `G̃⁻¹(η) = η √(h(η²)/η²)` and its derivative `η h'(η²)/G̃⁻¹(η)`,
    /// continued along `[0, η²]` from `1/G̃'(0)`.
    pub fn g_tilde_inverse(&self, eta: ComplexValue) -> Result<(ComplexValue, ComplexValue)> {
        let tau = eta * eta;
        let root0 = self.root0.inv();
        if tau.norm() < 1e-300 {
            return Ok((Complex64::new(0.0, 0.0), root0));
        }
        let h0 = root0 * root0;
        let h = |t: f64| -> Result<Complex64> {
            if t * tau.norm() < 1e-12 {
                return Ok(h0);
            }
            let p = tau * t;
            Ok(self.g_inverse(p)?.0 / p)
        };
        let zeta = eta * continued_sqrt(h, root0)?;
        let hp = self.g_inverse(tau)?.1;
        Ok((zeta, eta * hp / zeta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qdiff::{growth_qd, QuadraticDifferential};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn beta_squares_to_minus_rotation() {
        for psi in [0.0, 1.0, PI, -2.5] {
            let cv = GrowthCover::new(0.4, psi).unwrap();
            assert!((cv.beta() * cv.beta() + Complex64::from_polar(1.0, psi)).norm() < 1e-15);
        }
        assert!(GrowthCover::new(0.0, 0.0).is_err());
    }

    #[test]
    fn projection_basics() {
        let cv = GrowthCover::new(0.3, 0.5).unwrap();
        assert!((cv.project(c(0.0, 0.0)).unwrap() - c(0.3, 0.0)).norm() < 1e-15);
        assert!(cv.project(cv.branch_point()).unwrap().norm() < 1e-15);
    }

    #[test]
    fn x_is_imaginary_on_circle() {
        for psi in [0.0, 0.8, PI, -1.9] {
            let cv = GrowthCover::new(0.5, psi).unwrap();
            // principal logs give x(1) = -4i·atan(√r)·sin(ψ/2); only Re x matters
            let x1 = cv.x_eval(c(1.0, 0.0)).unwrap();
            let expect = c(0.0, -4.0 * 0.5f64.sqrt().atan() * (psi / 2.0).sin());
            assert!((x1 - expect).norm() < 1e-14, "{x1}");
            for k in 0..256 {
                let z = Complex64::from_polar(1.0, 2.0 * PI * (k as f64 + 0.5) / 256.0);
                assert!(cv.x_eval(z).unwrap().re.abs() < 1e-10);
            }
        }
        let cv = GrowthCover::new(0.5, 0.0).unwrap();
        assert!(cv.x_eval(c(1.0, 0.0)).unwrap().norm() < 1e-15);
        assert!(matches!(cv.x_eval(cv.branch_point()), Err(QdError::Singularity(_))));
    }

    #[test]
    fn x_prime_squared_is_the_pullback() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &(r, psi) in &[(0.5, PI), (0.3, 0.7), (0.8, -2.0)] {
            let cv = GrowthCover::new(r, psi).unwrap();
            let q = growth_qd(r, psi).unwrap();
            for _ in 0..100 {
                let z = Complex64::from_polar(rng.gen_range(0.05..0.95), rng.gen_range(-PI..PI));
                let lhs = cv.x_prime(z).unwrap().powu(2);
                let pd = cv.project_deriv(z).unwrap();
                let rhs = q.eval(cv.project(z).unwrap()).unwrap() * pd * pd;
                assert!((lhs - rhs).norm() < 1e-10 * (1.0 + lhs.norm()), "{z}: {lhs} {rhs}");
            }
        }
    }

    #[test]
    fn x_prime_matches_difference_quotient() {
        let cv = GrowthCover::new(0.4, 1.2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = 1e-5;
        let mut n = 0;
        while n < 100 {
            let z = c(rng.gen_range(-0.9..0.9), rng.gen_range(-0.9..0.9));
            let sr = 0.4f64.sqrt();
            // keep clear of the log cut between ±i√r
            if z.norm() > 0.95 || (z.re.abs() < 0.05 && z.im.abs() < sr + 0.05) {
                continue;
            }
            let fd = (cv.x_eval(z + h).unwrap() - cv.x_eval(z - h).unwrap()) / (2.0 * h);
            assert!((fd - cv.x_prime(z).unwrap()).norm() < 1e-7);
            n += 1;
        }
    }

    #[test]
    fn lift_of_identity_is_identity() {
        let cv = GrowthCover::new(0.4, 0.3).unwrap();
        let lift = build_lift(&cv, &MapDescriptor::identity()).unwrap();
        assert!((lift.w0() - c(0.4, 0.0)).norm() < 1e-15);
        assert!((lift.g(c(-0.4, 0.0)).unwrap() + 0.4).norm() < 1e-15);
        for z in [c(0.3, 0.2), c(-0.5, 0.6), c(0.1, -0.7)] {
            assert!((lift.g_tilde(z).unwrap() - z).norm() < 1e-12);
            let d = (lift.x1_eval(z).unwrap() - cv.x_eval(z).unwrap()).norm();
            assert!(d < 1e-10);
        }
    }

    #[test]
    fn lift_of_scale() {
        let cv = GrowthCover::new(0.5, PI).unwrap();
        let lift = build_lift(&cv, &MapDescriptor::scale(0.9).unwrap()).unwrap();
        assert!((lift.w0() - c(0.5 / 0.9, 0.0)).norm() < 1e-15);
        assert!(lift.g(c(0.0, 0.0)).unwrap().norm() < 1e-14);
        assert!((lift.g(c(-0.5, 0.0)).unwrap() + lift.w0()).norm() < 1e-10);
        assert!((lift.a() * lift.a() + lift.w0()).norm() < 1e-10);
    }

    #[test]
    fn g_tilde_is_odd() {
        let cv = GrowthCover::new(0.3, 0.0).unwrap();
        let lift = build_lift(&cv, &MapDescriptor::pick_slit(0.5).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let z = Complex64::from_polar(rng.gen_range(0.0..0.8), rng.gen_range(-PI..PI));
            let s = lift.g_tilde(z).unwrap() + lift.g_tilde(-z).unwrap();
            assert!(s.norm() < 1e-10);
        }
    }

    #[test]
    fn g_tilde_prime_matches_difference_quotient() {
        let cv = GrowthCover::new(0.3, 1.0).unwrap();
        let lift = build_lift(&cv, &MapDescriptor::pick_slit(0.8).unwrap()).unwrap();
        let h = 1e-5;
        for z in [c(0.2, 0.3), c(-0.4, 0.1), c(0.1, -0.6)] {
            let fd = (lift.g_tilde(z + h).unwrap() - lift.g_tilde(z - h).unwrap()) / (2.0 * h);
            assert!((fd - lift.g_tilde_prime(z).unwrap()).norm() < 1e-7);
            let fd = (lift.x1_eval(z + h).unwrap() - lift.x1_eval(z - h).unwrap()) / (2.0 * h);
            assert!((fd - lift.x1_prime(z).unwrap()).norm() < 1e-6);
        }
    }

    #[test]
    fn inverse_lift_round_trip() {
        let cv = GrowthCover::new(0.5, PI).unwrap();
        let lift = build_lift(&cv, &MapDescriptor::scale(0.9).unwrap()).unwrap();
        for eta in [c(0.3, 0.4), c(-0.6, -0.2), c(0.1, -0.9)] {
            let (z, zp) = lift.g_tilde_inverse(eta).unwrap();
            assert!((lift.g_tilde(z).unwrap() - eta).norm() < 1e-11);
            assert!((zp * lift.g_tilde_prime(z).unwrap() - 1.0).norm() < 1e-10);
        }
    }

    #[test]
    fn x1_is_imaginary_near_lifted_boundary() {
        let cv = GrowthCover::new(0.5, 0.4).unwrap();
        let lift = build_lift(&cv, &MapDescriptor::scale(0.9).unwrap()).unwrap();
        for k in 0..64 {
            let eta = Complex64::from_polar(0.999, 2.0 * PI * (k as f64 + 0.5) / 64.0);
            let (z, _) = lift.g_tilde_inverse(eta).unwrap();
            assert!(lift.x1_eval(z).unwrap().re.abs() < 5e-3);
        }
    }

    #[test]
    fn difference_vanishes_as_r_shrinks() {
        let z = c(0.5, 0.2);
        for r in [1e-2, 1e-3] {
            let cv = GrowthCover::new(r, 0.7).unwrap();
            let lift = build_lift(&cv, &MapDescriptor::identity()).unwrap();
            let d = lift.x_minus_x1(z).unwrap().norm();
            assert!(d < 1e-10);
        }
    }

    #[test]
    fn difference_is_single_valued_on_loops() {
        let cv = GrowthCover::new(0.5, 0.9).unwrap();
        let lift = build_lift(&cv, &MapDescriptor::scale(0.8).unwrap()).unwrap();
        let center = c(0.45, 0.1);
        let n = 400;
        let vals: Vec<_> = (0..=n)
            .map(|k| {
                let z = center + Complex64::from_polar(0.2, 2.0 * PI * k as f64 / n as f64);
                lift.x_minus_x1(z).unwrap()
            })
            .collect();
        for w in vals.windows(2) {
            assert!((w[1] - w[0]).norm() < 0.05);
        }
        assert!((vals[n] - vals[0]).norm() < 1e-10);
    }
}
