use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{check_r, EvalPath, ModuleResult};
use crate::cover::{build_lift, GrowthCover, LiftedMap};
use crate::error::{QdError, Result};
use crate::maps::MapDescriptor;
use crate::ComplexValue;

/// Radii and quadrature size for the contour path.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourOptions {
    /// Increasing radii in `(0, 1)` at which the integral is evaluated.
    pub radii: Vec<f64>,
    /// Nodes on each circle; also the number of boundary samples.
    pub nodes: usize,
}

impl Default for ContourOptions {
    fn default() -> Self {
        ContourOptions {
            radii: vec![0.95, 0.96, 0.97, 0.98, 0.99, 0.995, 0.9975],
            nodes: 4096,
        }
    }
}

const SLIT_MAX_RADIUS: f64 = 0.995;
const SLIT_FALLBACK: [f64; 3] = [0.98, 0.99, 0.995];
const SLIT_MIN_NODES: usize = 65536;
const DECAY_WARN: f64 = 1e-6;

impl ContourOptions {
    fn validate(&self) -> Result<()> {
        if self.nodes < 1024 || self.nodes % 2 != 0 {
            return Err(QdError::InvalidParameter(format!("nodes = {}", self.nodes)));
        }
        if self.radii.len() < 2 {
            return Err(QdError::InvalidParameter("at least two radii are needed".into()));
        }
        if self.radii.windows(2).any(|w| !(w[0] < w[1]))
            || self.radii.iter().any(|&r| !(r > 0.0 && r < 1.0))
        {
            return Err(QdError::InvalidParameter(format!(
                "radii {:?} must increase within (0, 1)",
                self.radii
            )));
        }
        Ok(())
    }

    /// Drops radii above 0.995 and raises the node count for maps whose
    /// boundary is not analytic.
    fn for_map(&self, f: &MapDescriptor, log: &mut Vec<String>) -> ContourOptions {
        if f.has_analytic_boundary() {
            return self.clone();
        }
        let mut radii: Vec<f64> =
            self.radii.iter().copied().filter(|&r| r <= SLIT_MAX_RADIUS).collect();
        if radii.len() < 3 {
            radii = SLIT_FALLBACK.to_vec();
        }
        if radii != self.radii {
            log.push(format!("non-analytic boundary: radii reduced to {radii:?}"));
        }
        let nodes = self.nodes.max(SLIT_MIN_NODES);
        if nodes != self.nodes {
            log.push(format!("non-analytic boundary: {nodes} nodes"));
        }
        ContourOptions { radii, nodes }
    }
}

/// A primitive `x` on the cover whose real part is the first function `q₁`.
pub trait OuterPrimitive: Sync {
    /// `(x(ζ), x'(ζ))`.
    fn value_and_derivative(&self, zeta: ComplexValue) -> Result<(ComplexValue, ComplexValue)>;
}

impl OuterPrimitive for GrowthCover {
    fn value_and_derivative(&self, zeta: ComplexValue) -> Result<(ComplexValue, ComplexValue)> {
        Ok((self.x_eval(zeta)?, self.x_prime(zeta)?))
    }
}

impl OuterPrimitive for LiftedMap {
    fn value_and_derivative(&self, zeta: ComplexValue) -> Result<(ComplexValue, ComplexValue)> {
        let eta = self.g_tilde(zeta)?;
        let d = self.x1_prime_of_eta(eta)? * self.g_tilde_prime_given(zeta, eta)?;
        Ok((self.x1_of_eta(eta)?, d))
    }
}

/// Samples of `ζ = G̃⁻¹(η)` on the circle `|η| = ρ`; derivatives are only
/// available inside the disk.
struct CircleSamples {
    eta: Vec<Complex64>,
    zeta: Vec<Complex64>,
    zeta_prime: Vec<Complex64>,
}

fn nearest(s: Complex64, prev: Complex64) -> Result<Complex64> {
    let s = if (s - prev).norm() <= (s + prev).norm() { s } else { -s };
    if (s - prev).norm() > 0.25 * prev.norm() {
        return Err(QdError::BranchTracking(format!(
            "square root jumps from {prev} to {s}; increase the node count"
        )));
    }
    Ok(s)
}

fn lifted_circle(lift: &LiftedMap, rho: f64, nodes: usize) -> Result<CircleSamples> {
    let boundary = rho >= 1.0;
    let inner = if boundary { 0.999 } else { rho };
    let mut root = lift.origin_root().inv();
    let radial = 256;
    for j in 1..=radial {
        let e = Complex64::new(inner * j as f64 / radial as f64, 0.0);
        let tau = e * e;
        root = nearest((lift.g_inverse(tau)?.0 / tau).sqrt(), root)?;
    }
    let mut out = CircleSamples {
        eta: Vec::with_capacity(nodes),
        zeta: Vec::with_capacity(nodes),
        zeta_prime: Vec::new(),
    };
    for j in 0..nodes {
        let eta = Complex64::from_polar(rho, 2.0 * PI * j as f64 / nodes as f64);
        let tau = eta * eta;
        let (h, hp) = if boundary {
            (lift.g_inverse_boundary(tau)?, None)
        } else {
            let (h, hp) = lift.g_inverse(tau)?;
            (h, Some(hp))
        };
        root = nearest((h / tau).sqrt(), root)?;
        let zeta = eta * root;
        out.eta.push(eta);
        out.zeta.push(zeta);
        if let Some(hp) = hp {
            out.zeta_prime.push(eta * hp / zeta);
        }
    }
    Ok(out)
}

/// Coefficients `A_k`, `0 ≤ k < M/2`, of the harmonic function
/// `Re Σ A_k η^k` with boundary values `b` at equally spaced angles.
pub(crate) fn harmonic_coefficients(b: &[f64]) -> Vec<Complex64> {
    let m = b.len();
    let mut buf: Vec<Complex64> = b.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    (0..m / 2)
        .map(|k| buf[k] / m as f64 * if k == 0 { 1.0 } else { 2.0 })
        .collect()
}

/// Share of the coefficient energy carried by the top decile of modes.
pub(crate) fn tail_energy(coeffs: &[Complex64]) -> f64 {
    let total: f64 = coeffs[1..].iter().map(|c| c.norm_sqr()).sum();
    // rounding noise of identically vanishing data
    if total < 1e-24 {
        return 0.0;
    }
    let start = coeffs.len() - coeffs.len() / 10;
    coeffs[start..].iter().map(|c| c.norm_sqr()).sum::<f64>() / total
}

/// `∂U/∂η = ½ Σ k A_k η^{k-1}` at `ρ e^{2πij/M}`.
pub(crate) fn harmonic_d_eta(coeffs: &[Complex64], rho: f64, m: usize) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    let mut pow = 1.0;
    for (k, a) in coeffs.iter().enumerate().skip(1) {
        buf[k] = *a * (k as f64 * pow);
        pow *= rho;
    }
    FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
    buf.iter()
        .enumerate()
        .map(|(j, v)| *v * Complex64::from_polar(0.5, -2.0 * PI * j as f64 / m as f64))
        .collect()
}

/// Spectral derivative `dz/dφ` of a closed curve sampled at equal angles.
fn spectral_derivative(z: &[Complex64]) -> Vec<Complex64> {
    let m = z.len();
    let mut planner = FftPlanner::new();
    let mut buf = z.to_vec();
    planner.plan_fft_forward(m).process(&mut buf);
    for (k, v) in buf.iter_mut().enumerate() {
        let freq = if k < m / 2 {
            k as f64
        } else if k == m / 2 {
            0.0
        } else {
            k as f64 - m as f64
        };
        *v *= Complex64::new(0.0, freq / m as f64);
    }
    planner.plan_fft_inverse(m).process(&mut buf);
    buf
}

fn lagrange_at_one(radii: &[f64], values: &[f64]) -> f64 {
    let n = radii.len();
    let mut sum = 0.0;
    for i in 0..n {
        let mut w = 1.0;
        for j in 0..n {
            if i != j {
                w *= (1.0 - radii[j]) / (radii[i] - radii[j]);
            }
        }
        sum += w * values[i];
    }
    sum
}

/// Evaluates the Lagrange polynomial through `(radii, values)` at 1; the
/// error estimate is its distance to the extrapolant that omits the
/// smallest radius.
pub fn extrapolate_to_one(radii: &[f64], values: &[f64]) -> (f64, f64) {
    let full = lagrange_at_one(radii, values);
    let reduced = lagrange_at_one(&radii[1..], &values[1..]);
    (full, (full - reduced).abs())
}

/// Contour path with the default options.
pub fn module_contour(f: &MapDescriptor, r: f64, psi: f64) -> Result<ModuleResult> {
    module_contour_with(f, r, psi, &ContourOptions::default())
}

/// `lim ∮ q₁ ∗dq₂` over `|η| = ρ` in the coordinate `η = G̃(ζ)` of the
/// lifted domain, with `q₁ = Re x` and `q₂ = q₁ - U`, `U` harmonic with the
/// boundary values of `q₁`.
pub fn module_contour_with(
    f: &MapDescriptor,
    r: f64,
    psi: f64,
    opts: &ContourOptions,
) -> Result<ModuleResult> {
    check_r(r)?;
    let cover = GrowthCover::new(r, psi)?;
    let lift = build_lift(&cover, f)?;
    contour_integral(&cover, &lift, opts, Coordinates::Disk)
}

/// The same limit computed in cover coordinates: `dζ` by spectral
/// differentiation of the sampled curve and `∂U/∂ζ = ∂U/∂η · G̃'(ζ)`.
pub fn module_contour_cover_coords(
    f: &MapDescriptor,
    r: f64,
    psi: f64,
    opts: &ContourOptions,
) -> Result<ModuleResult> {
    check_r(r)?;
    let cover = GrowthCover::new(r, psi)?;
    let lift = build_lift(&cover, f)?;
    contour_integral(&cover, &lift, opts, Coordinates::Cover)
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum Coordinates {
    Disk,
    Cover,
}

/// Core of the contour path: `outer` supplies `q₁`, `lift` the domain whose
/// boundary carries the Dirichlet data.
pub(crate) fn contour_integral<P: OuterPrimitive + ?Sized>(
    outer: &P,
    lift: &LiftedMap,
    opts: &ContourOptions,
    coords: Coordinates,
) -> Result<ModuleResult> {
    opts.validate()?;
    let mut branch_log = Vec::new();
    let opts = opts.for_map(lift.map(), &mut branch_log);
    let (values, tail) = circle_integrals(outer, lift, &opts.radii, opts.nodes, coords)?;
    let mut warnings = Vec::new();
    if tail > DECAY_WARN {
        warnings.push(format!(
            "boundary data under-resolved: top decile of modes holds {tail:.3e} of the energy"
        ));
    }
    // the same radii with half the nodes measure the quadrature error
    let (coarse, _) = circle_integrals(outer, lift, &opts.radii, opts.nodes / 2, coords)?;
    let (value, extrapolation) = extrapolate_to_one(&opts.radii, &values);
    let resolution = (value - extrapolate_to_one(&opts.radii, &coarse).0).abs();
    let est = extrapolation + resolution;
    branch_log.push(format!("radii {:?} gave {:?}", opts.radii, values));
    Ok(ModuleResult {
        value,
        path: EvalPath::Contour,
        est_error: est,
        branch_log,
        warnings,
    })
}


/// `∮ q₁ ∗dq₂` on each circle `|η| = ρ` with `m` nodes, and the tail energy
/// of the boundary data.
fn circle_integrals<P: OuterPrimitive + ?Sized>(
    outer: &P,
    lift: &LiftedMap,
    radii: &[f64],
    m: usize,
    coords: Coordinates,
) -> Result<(Vec<f64>, f64)> {

    let edge = lifted_circle(lift, 1.0, m)?;
    let b = edge
        .zeta
        .iter()
        .map(|&z| Ok(outer.value_and_derivative(z)?.0.re))
        .collect::<Result<Vec<f64>>>()?;
    let coeffs = harmonic_coefficients(&b);
    let tail = tail_energy(&coeffs);

    let mut values = Vec::with_capacity(radii.len());
    for &rho in radii {
        let circ = lifted_circle(lift, rho, m)?;
        let du = harmonic_d_eta(&coeffs, rho, m);
        let dzeta = match coords {
            Coordinates::Disk => Vec::new(),
            Coordinates::Cover => spectral_derivative(&circ.zeta),
        };
        let mut sum = 0.0;
        for j in 0..m {
            let (x, xp) = outer.value_and_derivative(circ.zeta[j])?;
            let q1 = x.re;
            let star = match coords {
                Coordinates::Disk => {
                    let dq1 = xp * circ.zeta_prime[j] * 0.5;
                    (circ.eta[j] * (dq1 - du[j]) * 2.0).re
                }
                Coordinates::Cover => {
                    let gp = lift.g_tilde_prime_given(circ.zeta[j], circ.eta[j])?;
                    let d = xp * 0.5 - du[j] * gp;
                    (d * dzeta[j] * Complex64::new(0.0, -2.0)).re
                }
            };
            sum += q1 * star;
        }
        values.push(sum * 2.0 * PI / m as f64);
    }
    Ok((values, tail))
}
