//! Rational quadratic differentials `Q(z) dz²` on the disk.
//!
//! A trajectory is a curve `γ` along which `Q(γ) γ'² < 0`. A differential is
//! admissible for the disk when the unit circle is, up to finitely many
//! points, a union of trajectories.

mod export;
mod trajectory;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{QdError, Result};
use crate::maps::MapDescriptor;
use crate::ComplexValue;

pub use export::{segment_to_csv, segments_to_svg, SvgMarker};
pub use trajectory::{
    trace_trajectory, trace_trajectory_with, trajectory_condition_deviation, TerminalEvent,
    TraceOptions,
    TrajectorySegment,
};

/// Anything that can be evaluated as the coefficient `Q(z)` of `Q(z) dz²`.
pub trait QuadraticDifferential: Sync {
    fn eval(&self, z: ComplexValue) -> Result<ComplexValue>;

    /// Known zeros and poles, used to keep tracing steps short near them.
    fn singular_points(&self) -> Vec<ComplexValue> {
        Vec::new()
    }
}

/// A point with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Singularity {
    pub location: ComplexValue,
    pub order: u32,
}

/// `scale · Π (z - zᵢ)^{mᵢ} / Π (z - pⱼ)^{nⱼ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalQD {
    scale: ComplexValue,
    zeros: Vec<Singularity>,
    poles: Vec<Singularity>,
}

impl RationalQD {
    pub fn new(
        scale: ComplexValue,
        zeros: Vec<(ComplexValue, u32)>,
        poles: Vec<(ComplexValue, u32)>,
    ) -> Result<Self> {
        if scale == Complex64::new(0.0, 0.0) {
            return Err(QdError::InvalidParameter("scale must be nonzero".into()));
        }
        let to_sing = |v: Vec<(ComplexValue, u32)>| -> Result<Vec<Singularity>> {
            v.into_iter()
                .map(|(location, order)| {
                    if order == 0 {
                        Err(QdError::InvalidParameter("multiplicity must be positive".into()))
                    } else {
                        Ok(Singularity { location, order })
                    }
                })
                .collect()
        };
        let zeros = to_sing(zeros)?;
        let poles = to_sing(poles)?;
        let all: Vec<_> = zeros.iter().chain(poles.iter()).map(|s| s.location).collect();
        for (i, a) in all.iter().enumerate() {
            if all[i + 1..].iter().any(|b| (a - b).norm() < 1e-14) {
                return Err(QdError::InvalidParameter(format!("repeated location {a}")));
            }
        }
        Ok(RationalQD { scale, zeros, poles })
    }

    /// `dz² / z²`.
    pub fn dz2_over_z2() -> Self {
        Self::new(Complex64::new(1.0, 0.0), vec![], vec![(Complex64::new(0.0, 0.0), 2)]).unwrap()
    }

    /// The constant differential `c dz²`.
    pub fn constant(c: ComplexValue) -> Result<Self> {
        Self::new(c, vec![], vec![])
    }

    pub fn scale(&self) -> ComplexValue {
        self.scale
    }

    pub fn zeros(&self) -> &[Singularity] {
        &self.zeros
    }

    pub fn poles(&self) -> &[Singularity] {
        &self.poles
    }
}

impl QuadraticDifferential for RationalQD {
    fn eval(&self, z: ComplexValue) -> Result<ComplexValue> {
        let mut num = self.scale;
        for s in &self.zeros {
            num *= (z - s.location).powu(s.order);
        }
        let mut den = Complex64::new(1.0, 0.0);
        for p in &self.poles {
            let d = z - p.location;
            if d.norm() < 1e-300 {
                return Err(QdError::PoleEvaluation(z));
            }
            den *= d.powu(p.order);
        }
        let v = num / den;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(QdError::PoleEvaluation(z));
        }
        Ok(v)
    }

    fn singular_points(&self) -> Vec<ComplexValue> {
        self.zeros.iter().chain(self.poles.iter()).map(|s| s.location).collect()
    }
}

/// The growth family
/// `Q(z) = -e^{-iψ} (e^{iψ} + z)² / (z² (z - r)(z - 1/r))`:
/// double pole at 0, simple poles at `r` and `1/r`, double zero at `-e^{iψ}`.
pub fn growth_qd(r: f64, psi: f64) -> Result<RationalQD> {
    if !(r > 0.0 && r < 1.0) {
        return Err(QdError::InvalidParameter(format!("r = {r} must lie in (0, 1)")));
    }
    let e = Complex64::from_polar(1.0, psi);
    RationalQD::new(
        -e.conj(),
        vec![(-e, 2)],
        vec![
            (Complex64::new(0.0, 0.0), 2),
            (Complex64::new(r, 0.0), 1),
            (Complex64::new(1.0 / r, 0.0), 1),
        ],
    )
}

/// `z ↦ Q(f(z)) f'(z)²`.
pub struct Pullback<'a, Q: QuadraticDifferential + ?Sized> {
    pub qd: &'a Q,
    pub map: &'a MapDescriptor,
}

impl<'a, Q: QuadraticDifferential + ?Sized> Pullback<'a, Q> {
    pub fn new(qd: &'a Q, map: &'a MapDescriptor) -> Self {
        Pullback { qd, map }
    }
}

impl<Q: QuadraticDifferential + ?Sized> QuadraticDifferential for Pullback<'_, Q> {
    fn eval(&self, z: ComplexValue) -> Result<ComplexValue> {
        let fp = self.map.deriv(z)?;
        Ok(self.qd.eval(self.map.eval(z)?)? * fp * fp)
    }

    fn singular_points(&self) -> Vec<ComplexValue> {
        self.qd
            .singular_points()
            .into_iter()
            .filter_map(|p| self.map.inverse(p).ok())
            .collect()
    }
}

/// Boundary diagnostic of [`admissibility_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    /// Largest of `|Im v|` and `max(Re v, 0)` over the regular samples, where
    /// `v(θ) = Q(e^{iθ}) (i e^{iθ})²`.
    pub max_violation: f64,
    /// Angular intervals `(θ_start, θ_end)` of isolated exceptional samples:
    /// near-zeros of `v` or points where `Q` could not be evaluated.
    pub exceptional_arcs: Vec<(f64, f64)>,
}

/// Samples `v(θ) = Q(e^{iθ}) (i e^{iθ})²` at `n_samples` equally spaced angles.
///
/// Admissibility means `v ≤ 0` except at finitely many points, so isolated
/// clusters where `|v|` nearly vanishes or `Q` blows up are reported as
/// exceptional arcs rather than counted as violations.
pub fn admissibility_check<Q: QuadraticDifferential + ?Sized>(
    qd: &Q,
    n_samples: usize,
) -> Result<AdmissibilityReport> {
    if n_samples < 64 {
        return Err(QdError::InvalidParameter("n_samples must be at least 64".into()));
    }
    let samples: Vec<(f64, Option<Complex64>)> = (0..n_samples)
        .map(|k| {
            let th = 2.0 * PI * k as f64 / n_samples as f64;
            let z = Complex64::from_polar(1.0, th);
            let dz = Complex64::i() * z;
            let v = qd.eval(z).ok().map(|q| q * dz * dz);
            (th, v.filter(|v| v.re.is_finite() && v.im.is_finite()))
        })
        .collect();

    let mut mags: Vec<f64> = samples.iter().filter_map(|(_, v)| v.map(|v| v.norm())).collect();
    mags.sort_by(f64::total_cmp);
    let median = mags.get(mags.len() / 2).copied().unwrap_or(0.0);

    let n = samples.len();
    let mag = |k: usize| samples[k % n].1.map_or(f64::INFINITY, |v| v.norm());
    let exceptional: Vec<bool> = (0..n)
        .map(|k| match samples[k].1 {
            None => true,
            Some(v) => {
                let m = v.norm();
                m < 1e-2 * median && m <= mag(k + n - 1) && m <= mag(k + 1)
            }
        })
        .collect();

    let mut max_violation: f64 = 0.0;
    for (k, (_, v)) in samples.iter().enumerate() {
        if exceptional[k] {
            continue;
        }
        if let Some(v) = v {
            max_violation = max_violation.max(v.im.abs()).max(v.re.max(0.0));
        }
    }

    let mut arcs = Vec::new();
    let mut k = 0;
    while k < n {
        if exceptional[k] {
            let start = k;
            while k + 1 < n && exceptional[k + 1] {
                k += 1;
            }
            arcs.push((samples[start].0, samples[k].0));
        }
        k += 1;
    }
    // merge a cluster that wraps through θ = 0
    if arcs.len() > 1 && exceptional[0] && exceptional[n - 1] {
        let last = arcs.pop().unwrap();
        arcs[0].0 = last.0 - 2.0 * PI;
    }
    Ok(AdmissibilityReport { max_violation, exceptional_arcs: arcs })
}

/// Angles `φ` of the critical rays `zero + t e^{iφ}` leaving a zero of `Q`.
///
/// Along a ray the trajectory condition reads `Q(z) e^{2iφ} < 0`. Starting
/// from `n_seeds` equally spaced angles on a circle of the given radius,
/// Newton's method is run on `arg(-Q e^{2iφ})`; converged angles are
/// clustered and returned sorted in `[0, 2π)`. A zero of order `n` yields
/// `n + 2` equally spaced rays.
pub fn critical_directions<Q: QuadraticDifferential + ?Sized>(
    qd: &Q,
    zero: ComplexValue,
    radius: f64,
    n_seeds: usize,
) -> Result<Vec<f64>> {
    let g = |phi: f64| -> Result<f64> {
        let e = Complex64::from_polar(1.0, phi);
        let v = -qd.eval(zero + e * radius)? * e * e;
        Ok(v.arg())
    };
    let mut found: Vec<f64> = Vec::new();
    for j in 0..n_seeds {
        let mut phi = 2.0 * PI * j as f64 / n_seeds as f64;
        let mut ok = false;
        for _ in 0..60 {
            let val = g(phi)?;
            if val.abs() < 1e-13 {
                ok = true;
                break;
            }
            let h = 1e-7;
            let slope = (g(phi + h)? - g(phi - h)?) / (2.0 * h);
            if !(slope.abs() > 1e-8) {
                break;
            }
            let mut step = val / slope;
            step = step.clamp(-0.3, 0.3);
            phi -= step;
        }
        if !ok {
            continue;
        }
        let phi = phi.rem_euclid(2.0 * PI);
        let dup = found.iter().any(|&p| {
            let d = (p - phi).rem_euclid(2.0 * PI);
            d.min(2.0 * PI - d) < 1e-6
        });
        if !dup {
            found.push(phi);
        }
    }
    found.sort_by(f64::total_cmp);
    Ok(found)
}

/// Largest deviation of `arg(Q(x) dx²)` from `π` along the real segment
/// `[a, b]`, sampled at `n` interior points. Zero deviation means the segment
/// is (a union of) trajectory arcs.
pub fn real_segment_deviation<Q: QuadraticDifferential + ?Sized>(
    qd: &Q,
    a: f64,
    b: f64,
    n: usize,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 1..=n {
        let x = a + (b - a) * k as f64 / (n + 1) as f64;
        let v = qd.eval(Complex64::new(x, 0.0))?;
        let dev = (v.arg().abs() - PI).abs();
        worst = worst.max(dev);
    }
    Ok(worst)
}

/// Checks that the slit `[-1, tip]` omitted by a Pick map lies on
/// trajectories of `qd`; returns the maximal argument deviation.
pub fn slit_is_trajectory_check<Q: QuadraticDifferential + ?Sized>(
    qd: &Q,
    slit_tip: f64,
    n: usize,
) -> Result<f64> {
    real_segment_deviation(qd, -1.0, slit_tip, n)
}
