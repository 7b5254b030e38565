//! A small corpus of bounded univalent maps `f: 𝔻 → 𝔻` with `f(0) = 0`.
//!
//! Each map is a [`MapDescriptor`] built from a handful of closed-form
//! pieces: rotations, dilations, the Pick radial-slit maps, and three ways
//! of combining them. Descriptors have a one-line textual form:
//!
//! ```text
//! id
//! rot theta=1.0471975511965976
//! scale s=0.9
//! pick m=0.5
//! nested base=(pick m=0.5) s=0.9
//! conj base=(pick m=0.5) theta=0.7
//! reparam base=(scale s=0.8) theta=2
//! ```

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{QdError, Result};
use crate::ComplexValue;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Koebe function `k(z) = z / (1 - z)²`.
pub fn koebe(z: ComplexValue) -> ComplexValue {
    let d = ONE - z;
    z / (d * d)
}

/// `k'(z) = (1 + z) / (1 - z)³`.
pub fn koebe_deriv(z: ComplexValue) -> ComplexValue {
    let d = ONE - z;
    (ONE + z) / (d * d * d)
}

/// Solves `w / (1 - w)² = c` for the root inside the closed unit disk.
fn koebe_inverse_inside(c: Complex64, at: Complex64) -> Result<Complex64> {
    if c == ZERO {
        return Ok(ZERO);
    }
    // c w² - (2c + 1) w + c = 0; the roots multiply to 1
    let p = 2.0 * c + 1.0;
    let sq = (4.0 * c + 1.0).sqrt();
    let (d1, d2) = (p + sq, p - sq);
    let den = if d1.norm() >= d2.norm() { d1 } else { d2 };
    let w = 2.0 * c / den;
    if w.norm() >= 1.0 {
        return Err(QdError::RootSelection(at));
    }
    Ok(w)
}

/// Pick function `P_m = k⁻¹(m·k(z))`, mapping 𝔻 onto 𝔻 minus a radial slit on
/// the negative axis.
pub fn pick_eval(m: f64, z: ComplexValue) -> Result<ComplexValue> {
    koebe_inverse_inside(m * koebe(z), z)
}

/// Tip of the slit omitted by `P_m`: `P_m(𝔻) = 𝔻 ∖ [-1, tip]`.
pub fn pick_slit_tip(m: f64) -> f64 {
    let u = ((2.0 - m) - 2.0 * (1.0 - m).sqrt()) / m;
    -u
}

fn pick_boundary(m: f64, theta: f64) -> Complex64 {
    let half = (theta / 2.0).sin();
    if half.abs() < 1e-300 {
        return ONE;
    }
    let c = -m / (4.0 * half * half);
    let disc = 4.0 * c + 1.0;
    if disc >= 0.0 {
        // both roots negative reals; the inner one lies on the slit
        Complex64::new(2.0 * c / ((2.0 * c + 1.0) + disc.sqrt()), 0.0)
    } else {
        let im = (-disc).sqrt() / (2.0 * c);
        let re = (2.0 * c + 1.0) / (2.0 * c);
        // the upper half disk is invariant
        if theta.sin() >= 0.0 {
            Complex64::new(re, -im)
        } else {
            Complex64::new(re, im)
        }
    }
}

/// Structural variant of a [`MapDescriptor`].
#[derive(Debug, Clone, PartialEq)]
pub enum MapKind {
    Identity,
    /// `z ↦ e^{iθ} z`
    Rotation { theta: f64 },
    /// `z ↦ s z`
    Scale { s: f64 },
    /// Pick radial-slit map with `f'(0) = m`.
    PickSlit { m: f64 },
    /// `z ↦ base(s z)`
    Precomposed { base: Box<MapDescriptor>, s: f64 },
    /// `z ↦ e^{-iθ} base(e^{iθ} z)`
    RotatedConjugate { base: Box<MapDescriptor>, theta: f64 },
    /// `z ↦ base(e^{iθ} z)`; same image as `base`.
    Reparametrized { base: Box<MapDescriptor>, theta: f64 },
}

/// A univalent self-map of the disk fixing 0.
#[derive(Debug, Clone, PartialEq)]
pub struct MapDescriptor {
    kind: MapKind,
    origin_deriv: Complex64,
}

fn check_unit_interval(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v <= 1.0 && v.is_finite() {
        Ok(())
    } else {
        Err(QdError::InvalidParameter(format!("{name} = {v} must lie in (0, 1]")))
    }
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(QdError::InvalidParameter(format!("{name} must be finite")))
    }
}

impl MapDescriptor {
    fn from_kind(kind: MapKind) -> Self {
        let origin_deriv = match &kind {
            MapKind::Identity => ONE,
            MapKind::Rotation { theta } => Complex64::from_polar(1.0, *theta),
            MapKind::Scale { s } => Complex64::new(*s, 0.0),
            MapKind::PickSlit { m } => Complex64::new(*m, 0.0),
            MapKind::Precomposed { base, s } => base.origin_deriv * *s,
            MapKind::RotatedConjugate { base, .. } => base.origin_deriv,
            MapKind::Reparametrized { base, theta } => {
                base.origin_deriv * Complex64::from_polar(1.0, *theta)
            }
        };
        MapDescriptor { kind, origin_deriv }
    }

    pub fn identity() -> Self {
        Self::from_kind(MapKind::Identity)
    }

    pub fn rotation(theta: f64) -> Result<Self> {
        check_finite("theta", theta)?;
        Ok(Self::from_kind(MapKind::Rotation { theta }))
    }

    pub fn scale(s: f64) -> Result<Self> {
        check_unit_interval("s", s)?;
        Ok(Self::from_kind(MapKind::Scale { s }))
    }

    pub fn pick_slit(m: f64) -> Result<Self> {
        check_unit_interval("m", m)?;
        Ok(Self::from_kind(MapKind::PickSlit { m }))
    }

    pub fn precomposed(base: MapDescriptor, s: f64) -> Result<Self> {
        check_unit_interval("s", s)?;
        Ok(Self::from_kind(MapKind::Precomposed { base: Box::new(base), s }))
    }

    pub fn rotated_conjugate(base: MapDescriptor, theta: f64) -> Result<Self> {
        check_finite("theta", theta)?;
        Ok(Self::from_kind(MapKind::RotatedConjugate { base: Box::new(base), theta }))
    }

    pub fn reparametrized(base: MapDescriptor, theta: f64) -> Result<Self> {
        check_finite("theta", theta)?;
        Ok(Self::from_kind(MapKind::Reparametrized { base: Box::new(base), theta }))
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    /// `z ↦ f(s z)` for `0 < s < 1`. The images are nested in `s`.
    pub fn nested_family(&self, s: f64) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(QdError::InvalidParameter(format!("s = {s} must lie in (0, 1)")));
        }
        match self.kind {
            MapKind::Identity => Self::scale(s),
            _ => Self::precomposed(self.clone(), s),
        }
    }

    pub fn origin_deriv(&self) -> ComplexValue {
        self.origin_deriv
    }

    /// Whether `f` extends analytically across the unit circle.
    pub fn has_analytic_boundary(&self) -> bool {
        match &self.kind {
            MapKind::Identity | MapKind::Rotation { .. } | MapKind::Scale { .. } => true,
            MapKind::PickSlit { m } => *m == 1.0,
            MapKind::Precomposed { base, s } => *s < 1.0 || base.has_analytic_boundary(),
            MapKind::RotatedConjugate { base, .. } | MapKind::Reparametrized { base, .. } => {
                base.has_analytic_boundary()
            }
        }
    }

    pub fn eval(&self, z: ComplexValue) -> Result<ComplexValue> {
        if !(z.norm() < 1.0) {
            return Err(QdError::OutsideDisk(z));
        }
        self.eval_unchecked(z)
    }

    fn eval_unchecked(&self, z: ComplexValue) -> Result<ComplexValue> {
        match &self.kind {
            MapKind::Identity => Ok(z),
            MapKind::Rotation { theta } => Ok(Complex64::from_polar(1.0, *theta) * z),
            MapKind::Scale { s } => Ok(z * *s),
            MapKind::PickSlit { m } => pick_eval(*m, z),
            MapKind::Precomposed { base, s } => base.eval_unchecked(z * *s),
            MapKind::RotatedConjugate { base, theta } => {
                let rot = Complex64::from_polar(1.0, *theta);
                Ok(base.eval_unchecked(rot * z)? * rot.conj())
            }
            MapKind::Reparametrized { base, theta } => {
                base.eval_unchecked(Complex64::from_polar(1.0, *theta) * z)
            }
        }
    }

    pub fn deriv(&self, z: ComplexValue) -> Result<ComplexValue> {
        if !(z.norm() < 1.0) {
            return Err(QdError::OutsideDisk(z));
        }
        self.deriv_unchecked(z)
    }

    fn deriv_unchecked(&self, z: ComplexValue) -> Result<ComplexValue> {
        match &self.kind {
            MapKind::Identity => Ok(ONE),
            MapKind::Rotation { theta } => Ok(Complex64::from_polar(1.0, *theta)),
            MapKind::Scale { s } => Ok(Complex64::new(*s, 0.0)),
            MapKind::PickSlit { m } => {
                // k'(P) P' = m k'(z)
                let p = pick_eval(*m, z)?;
                Ok(koebe_deriv(z) * *m / koebe_deriv(p))
            }
            MapKind::Precomposed { base, s } => Ok(base.deriv_unchecked(z * *s)? * *s),
            MapKind::RotatedConjugate { base, theta } => {
                base.deriv_unchecked(Complex64::from_polar(1.0, *theta) * z)
            }
            MapKind::Reparametrized { base, theta } => {
                let rot = Complex64::from_polar(1.0, *theta);
                Ok(base.deriv_unchecked(rot * z)? * rot)
            }
        }
    }

    /// Boundary value `f(e^{iθ})` of the continuous extension to the circle.
    ///
    /// For slit maps the two sides of the slit are reached from `θ` and `-θ`.
    pub fn boundary_eval(&self, theta: f64) -> Result<ComplexValue> {
        match &self.kind {
            MapKind::Identity => Ok(Complex64::from_polar(1.0, theta)),
            MapKind::Rotation { theta: t } => Ok(Complex64::from_polar(1.0, theta + t)),
            MapKind::Scale { s } => Ok(Complex64::from_polar(*s, theta)),
            MapKind::PickSlit { m } => Ok(pick_boundary(*m, theta)),
            MapKind::Precomposed { base, s } => {
                if *s < 1.0 {
                    base.eval_unchecked(Complex64::from_polar(*s, theta))
                } else {
                    base.boundary_eval(theta)
                }
            }
            MapKind::RotatedConjugate { base, theta: t } => {
                Ok(base.boundary_eval(theta + t)? * Complex64::from_polar(1.0, -t))
            }
            MapKind::Reparametrized { base, theta: t } => base.boundary_eval(theta + t),
        }
    }

    /// Preimage `f⁻¹(w)`.
    ///
    /// Closed forms are used where available; slit maps go through Newton's
    /// method continued along the segment from 0 to `w`.
    pub fn inverse(&self, w: ComplexValue) -> Result<ComplexValue> {
        let z = match &self.kind {
            MapKind::Identity => w,
            MapKind::Rotation { theta } => w * Complex64::from_polar(1.0, -theta),
            MapKind::Scale { s } => w / *s,
            MapKind::PickSlit { .. } => self.newton_inverse(w)?,
            MapKind::Precomposed { base, s } => base.inverse(w)? / *s,
            MapKind::RotatedConjugate { base, theta } => {
                let rot = Complex64::from_polar(1.0, *theta);
                base.inverse(rot * w)? * rot.conj()
            }
            MapKind::Reparametrized { base, theta } => {
                base.inverse(w)? * Complex64::from_polar(1.0, -theta)
            }
        };
        if !(z.norm() < 1.0) {
            return Err(QdError::NotInImage(w));
        }
        Ok(z)
    }

    /// Newton's method continued from 0 to `w` in 20 equal steps.
    pub fn newton_inverse(&self, w: ComplexValue) -> Result<ComplexValue> {
        if w == ZERO {
            return Ok(ZERO);
        }
        if !(w.norm() < 1.0) {
            return Err(QdError::NotInImage(w));
        }
        const STEPS: usize = 20;
        let mut z = ZERO;
        for j in 1..=STEPS {
            let target = w * (j as f64 / STEPS as f64);
            z = self.newton_solve(target, z).map_err(|_| QdError::NotInImage(w))?;
        }
        let residual = (self.eval(z)? - w).norm();
        if residual >= 1e-12 {
            return Err(QdError::NotInImage(w));
        }
        Ok(z)
    }

    fn newton_solve(&self, target: Complex64, seed: Complex64) -> Result<Complex64> {
        let mut z = seed;
        let mut best = f64::INFINITY;
        let mut stalled = 0;
        for _ in 0..200 {
            let fz = self.eval(z)?;
            let res = (fz - target).norm();
            if res < 1e-14 {
                return Ok(z);
            }
            if res < best {
                best = res;
                stalled = 0;
            } else {
                stalled += 1;
                if stalled >= 50 {
                    break;
                }
            }
            let mut step = (fz - target) / self.deriv(z)?;
            // damp until the iterate stays in the disk
            while !((z - step).norm() < 1.0) {
                step *= 0.5;
                if step.norm() < 1e-300 {
                    return Err(QdError::NotInImage(target));
                }
            }
            z -= step;
            if step.norm() < 1e-16 * (1.0 + z.norm()) {
                let res = (self.eval(z)? - target).norm();
                if res < 1e-12 {
                    return Ok(z);
                }
            }
        }
        if best < 1e-12 {
            return Ok(z);
        }
        Err(QdError::NotInImage(target))
    }

    /// Whether `w ∈ f(𝔻)`, decided by inversion.
    pub fn contains(&self, w: ComplexValue) -> bool {
        self.inverse(w).is_ok()
    }
}

/// Smallest distance between images of distinct points of a polar grid with
/// `n_r` rings in `(0, r_max]` and `n_theta` rays, together with the largest
/// image modulus. Used as a sampled univalence witness.
pub fn sampled_injectivity(
    f: &MapDescriptor,
    n_r: usize,
    n_theta: usize,
    r_max: f64,
) -> Result<(f64, f64)> {
    let mut images = Vec::with_capacity(n_r * n_theta);
    for i in 1..=n_r {
        let rad = r_max * i as f64 / n_r as f64;
        for j in 0..n_theta {
            let z = Complex64::from_polar(rad, 2.0 * PI * j as f64 / n_theta as f64);
            images.push(f.eval(z)?);
        }
    }
    let max_mod = images.iter().map(|w| w.norm()).fold(0.0, f64::max);
    let mut min_sep = f64::INFINITY;
    for (i, a) in images.iter().enumerate() {
        for b in &images[i + 1..] {
            min_sep = min_sep.min((a - b).norm());
        }
    }
    Ok((min_sep, max_mod))
}

/// The default test corpus.
pub fn corpus() -> Vec<MapDescriptor> {
    let pick5 = MapDescriptor::pick_slit(0.5).unwrap();
    let pick8 = MapDescriptor::pick_slit(0.8).unwrap();
    vec![
        MapDescriptor::identity(),
        MapDescriptor::rotation(PI / 3.0).unwrap(),
        MapDescriptor::scale(0.8).unwrap(),
        MapDescriptor::scale(0.9).unwrap(),
        pick5.clone(),
        pick8.clone(),
        pick5.nested_family(0.9).unwrap(),
        pick8.nested_family(0.7).unwrap(),
        MapDescriptor::rotated_conjugate(pick5, 0.7).unwrap(),
        MapDescriptor::reparametrized(MapDescriptor::scale(0.9).unwrap(), 2.0).unwrap(),
    ]
}

impl fmt::Display for MapDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            MapKind::Identity => write!(f, "id"),
            MapKind::Rotation { theta } => write!(f, "rot theta={theta}"),
            MapKind::Scale { s } => write!(f, "scale s={s}"),
            MapKind::PickSlit { m } => write!(f, "pick m={m}"),
            MapKind::Precomposed { base, s } => write!(f, "nested base=({base}) s={s}"),
            MapKind::RotatedConjugate { base, theta } => {
                write!(f, "conj base=({base}) theta={theta}")
            }
            MapKind::Reparametrized { base, theta } => {
                write!(f, "reparam base=({base}) theta={theta}")
            }
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> QdError {
        QdError::Parse(format!("{msg} at offset {} in {:?}", self.pos, self.src))
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.src[self.pos..].chars().next().map_or(1, char::len_utf8);
        }
    }

    fn word(&mut self) -> &'a str {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let end = rest
            .find(|c: char| c.is_whitespace() || c == '=' || c == '(' || c == ')')
            .unwrap_or(rest.len());
        self.pos += end;
        &rest[..end]
    }

    fn expect(&mut self, c: char) -> Result<()> {
        self.skip_ws();
        if self.src[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.err(&format!("expected {c:?}")))
        }
    }

    fn number(&mut self) -> Result<f64> {
        let w = self.word();
        w.parse::<f64>().map_err(|_| self.err(&format!("invalid number {w:?}")))
    }

    fn descriptor(&mut self) -> Result<MapDescriptor> {
        let head = self.word();
        let mut base = None;
        let mut params: Vec<(&str, f64)> = Vec::new();
        loop {
            self.skip_ws();
            if self.pos >= self.src.len() || self.src[self.pos..].starts_with(')') {
                break;
            }
            let key = self.word();
            if key.is_empty() {
                return Err(self.err("expected key"));
            }
            self.expect('=')?;
            if key == "base" {
                self.expect('(')?;
                base = Some(self.descriptor()?);
                self.expect(')')?;
            } else {
                let v = self.number()?;
                params.push((key, v));
            }
        }
        let get = |name: &str| -> Result<f64> {
            params
                .iter()
                .find(|(k, _)| *k == name)
                .map(|(_, v)| *v)
                .ok_or_else(|| QdError::Parse(format!("{head}: missing {name}")))
        };
        let need_base = |b: Option<MapDescriptor>| {
            b.ok_or_else(|| QdError::Parse(format!("{head}: missing base")))
        };
        let allowed: &[&str] = match head {
            "id" | "identity" => &[],
            "rot" => &["theta"],
            "scale" => &["s"],
            "pick" => &["m"],
            "nested" => &["s"],
            "conj" | "reparam" => &["theta"],
            _ => return Err(QdError::Parse(format!("unknown map {head:?}"))),
        };
        if let Some((k, _)) = params.iter().find(|(k, _)| !allowed.contains(k)) {
            return Err(QdError::Parse(format!("{head}: unexpected key {k:?}")));
        }
        let takes_base = matches!(head, "nested" | "conj" | "reparam");
        if base.is_some() && !takes_base {
            return Err(QdError::Parse(format!("{head}: unexpected base")));
        }
        match head {
            "id" | "identity" => Ok(MapDescriptor::identity()),
            "rot" => MapDescriptor::rotation(get("theta")?),
            "scale" => MapDescriptor::scale(get("s")?),
            "pick" => MapDescriptor::pick_slit(get("m")?),
            "nested" => MapDescriptor::precomposed(need_base(base)?, get("s")?),
            "conj" => MapDescriptor::rotated_conjugate(need_base(base)?, get("theta")?),
            _ => MapDescriptor::reparametrized(need_base(base)?, get("theta")?),
        }
    }
}

impl FromStr for MapDescriptor {
    type Err = QdError;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { src: s, pos: 0 };
        let d = p.descriptor()?;
        p.skip_ws();
        if p.pos != s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_and_trivial_pick() {
        let id = MapDescriptor::identity();
        assert_eq!(id.eval(c(0.3, 0.0)).unwrap(), c(0.3, 0.0));
        let p1 = MapDescriptor::pick_slit(1.0).unwrap();
        for z in [c(0.3, 0.2), c(-0.7, 0.1), c(0.0, -0.9)] {
            assert!((p1.eval(z).unwrap() - z).norm() < 1e-14);
        }
    }

    #[test]
    fn pick_half_satisfies_defining_equation() {
        let w = pick_eval(0.5, c(0.5, 0.0)).unwrap();
        assert!((koebe(w) - c(1.0, 0.0)).norm() < 1e-12);
        assert!(w.norm() < 1.0);
    }

    #[test]
    fn pick_origin_derivative_matches_finite_difference() {
        for m in [0.3, 0.5, 0.8] {
            let f = MapDescriptor::pick_slit(m).unwrap();
            let h = 1e-6;
            let fd = (f.eval(c(h, 0.0)).unwrap() - f.eval(c(-h, 0.0)).unwrap()) / (2.0 * h);
            assert!((fd - c(m, 0.0)).norm() < 1e-8);
            assert!((f.deriv(c(0.0, 0.0)).unwrap() - c(m, 0.0)).norm() < 1e-14);
            assert_eq!(f.origin_deriv(), c(m, 0.0));
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-6;
        for f in corpus() {
            for z in [c(0.3, 0.4), c(-0.5, 0.2), c(0.1, -0.7)] {
                let fd = (f.eval(z + h).unwrap() - f.eval(z - h).unwrap()) / (2.0 * h);
                assert!((fd - f.deriv(z).unwrap()).norm() < 1e-7, "{f} at {z}");
            }
        }
    }

    #[test]
    fn scale_and_nested_derivatives() {
        let s = MapDescriptor::scale(0.7).unwrap();
        assert_eq!(s.deriv(c(0.4, 0.1)).unwrap(), c(0.7, 0.0));
        let p = MapDescriptor::pick_slit(0.5).unwrap();
        let n = p.nested_family(0.9).unwrap();
        assert!((n.origin_deriv() - c(0.45, 0.0)).norm() < 1e-15);
        assert_eq!(MapDescriptor::identity().nested_family(0.4).unwrap(), s_of(0.4));
    }

    fn s_of(s: f64) -> MapDescriptor {
        MapDescriptor::scale(s).unwrap()
    }

    #[test]
    fn inverse_examples() {
        for f in corpus() {
            assert_eq!(f.inverse(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        }
        assert!((s_of(0.9).inverse(c(0.45, 0.0)).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
        let p = MapDescriptor::pick_slit(0.5).unwrap();
        let w = p.eval(c(0.3, 0.0)).unwrap();
        assert!((p.inverse(w).unwrap() - c(0.3, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn inverse_rejects_points_outside_image() {
        assert!(matches!(s_of(0.5).inverse(c(0.6, 0.0)), Err(QdError::NotInImage(_))));
        let p = MapDescriptor::pick_slit(0.5).unwrap();
        // on the omitted slit
        assert!(p.inverse(c(-0.5, 0.0)).is_err());
    }

    #[test]
    fn slit_tip_values() {
        let m: f64 = 0.5;
        let u = -pick_slit_tip(m);
        assert!((u - 0.171_572_875_253_809_9).abs() < 1e-12);
        assert!((m * u * u + (2.0 * m - 4.0) * u + m).abs() < 1e-12);
        assert!((koebe(c(-u, 0.0)) - c(-m / 4.0, 0.0)).norm() < 1e-12);
        assert!((pick_slit_tip(1.0 - 1e-12) + 1.0).abs() < 1e-5);
    }

    #[test]
    fn pick_maps_negative_radius_into_segment() {
        let m = 0.5;
        let tip = pick_slit_tip(m);
        for i in 1..200 {
            let x = -(i as f64) / 200.0;
            let w = pick_eval(m, c(x, 0.0)).unwrap();
            assert!(w.im.abs() < 1e-14);
            assert!(w.re <= 0.0 && w.re > tip, "x = {x}, w = {w}");
        }
    }

    #[test]
    fn pick_boundary_traces_the_slit() {
        let m = 0.5;
        let tip = pick_slit_tip(m);
        let at_pi = pick_boundary(m, PI);
        assert!((at_pi - c(tip, 0.0)).norm() < 1e-12);
        for k in 1..64 {
            let th = 2.0 * PI * k as f64 / 64.0;
            let b = pick_boundary(m, th);
            let inner = pick_eval(m, Complex64::from_polar(1.0 - 1e-9, th)).unwrap();
            assert!((b - inner).norm() < 1e-3, "θ = {th}: {b} vs {inner}");
        }
    }

    #[test]
    fn nested_images_are_strictly_nested() {
        let f = MapDescriptor::pick_slit(0.5).unwrap();
        let inner = f.nested_family(0.9).unwrap();
        let n = 720;
        let outer_max = (0..n)
            .map(|k| f.boundary_eval(2.0 * PI * k as f64 / n as f64).unwrap().norm())
            .fold(0.0, f64::max);
        let inner_max = (0..n)
            .map(|k| inner.boundary_eval(2.0 * PI * k as f64 / n as f64).unwrap().norm())
            .fold(0.0, f64::max);
        assert!(inner_max < outer_max);
        // every inner boundary point lies in the outer image
        for k in 0..90 {
            let w = inner.boundary_eval(2.0 * PI * k as f64 / 90.0).unwrap();
            assert!(f.contains(w));
        }
    }

    #[test]
    fn univalence_witness_on_corpus() {
        for f in corpus() {
            let (sep, max_mod) = sampled_injectivity(&f, 64, 64, 0.98).unwrap();
            assert!(sep > 1e-10, "{f}: {sep}");
            assert!(max_mod < 1.0, "{f}: {max_mod}");
        }
    }

    #[test]
    fn text_forms_parse() {
        let d: MapDescriptor = "nested base=(pick m=0.5) s=0.9".parse().unwrap();
        assert_eq!(d, MapDescriptor::pick_slit(0.5).unwrap().nested_family(0.9).unwrap());
        assert_eq!("scale s=0.9".parse::<MapDescriptor>().unwrap(), s_of(0.9));
        assert_eq!("id".parse::<MapDescriptor>().unwrap(), MapDescriptor::identity());
        assert!("scale".parse::<MapDescriptor>().is_err());
        assert!("scale s=1.5".parse::<MapDescriptor>().is_err());
        assert!("pick m=0.5 s=0.1".parse::<MapDescriptor>().is_err());
        assert!("nested s=0.5".parse::<MapDescriptor>().is_err());
        assert!("blob".parse::<MapDescriptor>().is_err());
        assert!("pick m=0.5)".parse::<MapDescriptor>().is_err());
    }

    #[test]
    fn schwarz_bound_on_corpus() {
        for f in corpus() {
            let d = f.origin_deriv().norm();
            let rigid = matches!(f.kind(), MapKind::Identity | MapKind::Rotation { .. });
            if rigid {
                assert!((d - 1.0).abs() < 1e-15);
            } else {
                assert!(d < 1.0, "{f}");
            }
        }
    }
}
