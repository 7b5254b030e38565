use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use super::QuadraticDifferential;
use crate::error::{QdError, Result};
use crate::ComplexValue;

/// Why tracing stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminalEvent {
    StepLimit,
    ReachedBoundary,
    HitSingularPoint,
}

impl fmt::Display for TerminalEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TerminalEvent::StepLimit => "step-limit",
            TerminalEvent::ReachedBoundary => "reached-boundary",
            TerminalEvent::HitSingularPoint => "hit-singular-point",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySegment {
    pub points: Vec<ComplexValue>,
    pub terminal_event: TerminalEvent,
}

impl TrajectorySegment {
    pub fn arclength(&self) -> f64 {
        self.points.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }
}

/// Step control for [`trace_trajectory_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOptions {
    pub max_step: f64,
    pub min_step: f64,
    /// Largest turn of the direction field accepted within one step, radians.
    pub max_turn: f64,
    /// Largest `|arg(Q(m)Δ²) - π|` accepted for a step chord `Δ` with midpoint `m`.
    pub max_chord_deviation: f64,
    pub boundary_eps: f64,
    pub q_min: f64,
    pub q_max: f64,
    pub max_steps: usize,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            max_step: 5e-3,
            min_step: 1e-12,
            max_turn: 0.1,
            max_chord_deviation: 2e-4,
            boundary_eps: 1e-6,
            q_min: 1e-10,
            q_max: 1e10,
            max_steps: 1_000_000,
        }
    }
}

enum Field {
    Dir(Complex64),
    Singular,
}

struct Tracer<'a, Q: QuadraticDifferential + ?Sized> {
    qd: &'a Q,
    opts: TraceOptions,
    singular: Vec<ComplexValue>,
}

impl<Q: QuadraticDifferential + ?Sized> Tracer<'_, Q> {
    /// Unit vector `± i/√Q(z)` closest to `prev`.
    fn direction(&self, z: ComplexValue, prev: Complex64) -> Field {
        let q = match self.qd.eval(z) {
            Ok(q) => q,
            Err(_) => return Field::Singular,
        };
        let m = q.norm();
        if !(m >= self.opts.q_min && m <= self.opts.q_max) {
            return Field::Singular;
        }
        let d = Complex64::i() / q.sqrt();
        let d = d / d.norm();
        if (d * prev.conj()).re >= 0.0 {
            Field::Dir(d)
        } else {
            Field::Dir(-d)
        }
    }

    fn singular_distance(&self, z: ComplexValue) -> f64 {
        self.singular.iter().map(|p| (z - p).norm()).fold(f64::INFINITY, f64::min)
    }

    /// One RK4 step; `None` if a stage lands on a singular point or the chord
    /// strays from the trajectory condition.
    fn rk4(&self, z: ComplexValue, d0: Complex64, h: f64) -> Option<(ComplexValue, Complex64)> {
        let get = |z, prev| match self.direction(z, prev) {
            Field::Dir(d) => Some(d),
            Field::Singular => None,
        };
        let k1 = d0;
        let k2 = get(z + k1 * (h / 2.0), k1)?;
        let k3 = get(z + k2 * (h / 2.0), k2)?;
        let k4 = get(z + k3 * h, k3)?;
        let z1 = z + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        let d1 = get(z1, k4)?;
        let delta = z1 - z;
        let v = self.qd.eval(z + delta * 0.5).ok()? * delta * delta;
        if PI - v.arg().abs() > self.opts.max_chord_deviation {
            return None;
        }
        Some((z1, d1))
    }
}

fn turn(a: Complex64, b: Complex64) -> f64 {
    (b * a.conj()).arg().abs()
}

/// [`trace_trajectory_with`] using [`TraceOptions::default`].
pub fn trace_trajectory<Q: QuadraticDifferential + ?Sized>(
    qd: &Q,
    z0: ComplexValue,
    direction_sign: f64,
    max_len: f64,
) -> Result<TrajectorySegment> {
    trace_trajectory_with(qd, z0, direction_sign, max_len, &TraceOptions::default())
}

/// Integrates the unit-speed field `ż = ± i/√Q(z)` from `z0`.
///
/// The sign of the initial direction is that of `direction_sign` applied to
/// the principal root; afterwards the root nearest the previous direction is
/// kept. Tracing stops near the unit circle, where `|Q|` leaves
/// `[q_min, q_max]`, or once the arclength reaches `max_len`.
pub fn trace_trajectory_with<Q: QuadraticDifferential + ?Sized>(
    qd: &Q,
    z0: ComplexValue,
    direction_sign: f64,
    max_len: f64,
    opts: &TraceOptions,
) -> Result<TrajectorySegment> {
    if !(max_len > 0.0) {
        return Err(QdError::InvalidParameter(format!("max_len = {max_len}")));
    }
    if !(z0.norm() < 1.0 - opts.boundary_eps) {
        return Err(QdError::ImmediateSingularity(z0));
    }
    let tracer = Tracer { qd, opts: *opts, singular: qd.singular_points() };
    let q0 = qd.eval(z0).map_err(|_| QdError::ImmediateSingularity(z0))?;
    let principal = Complex64::i() / q0.sqrt();
    let seed = if direction_sign < 0.0 { -principal } else { principal };
    let mut d = match tracer.direction(z0, seed) {
        Field::Dir(d) => d,
        Field::Singular => return Err(QdError::ImmediateSingularity(z0)),
    };

    let mut z = z0;
    let mut points = vec![z0];
    let mut length = 0.0;
    let mut h = opts.max_step;
    for _ in 0..opts.max_steps {
        let remaining = max_len - length;
        if remaining <= 1e-15 * max_len {
            return Ok(TrajectorySegment { points, terminal_event: TerminalEvent::StepLimit });
        }
        let sing = tracer.singular_distance(z);
        let room = 1.0 - z.norm();
        let cap = opts
            .max_step
            .min(0.5 * sing)
            .min((0.5 * room).max(0.5 * opts.boundary_eps))
            .min(remaining);
        h = (2.0 * h).min(cap);
        loop {
            if h < opts.min_step {
                return Ok(TrajectorySegment {
                    points,
                    terminal_event: TerminalEvent::HitSingularPoint,
                });
            }
            match tracer.rk4(z, d, h) {
                Some((z1, d1)) if turn(d, d1) <= opts.max_turn => {
                    length += h;
                    z = z1;
                    d = d1;
                    points.push(z);
                    break;
                }
                _ => h /= 2.0,
            }
        }
        if z.norm() > 1.0 - opts.boundary_eps {
            return Ok(TrajectorySegment { points, terminal_event: TerminalEvent::ReachedBoundary });
        }
        match qd.eval(z) {
            Ok(q) if q.norm() >= opts.q_min && q.norm() <= opts.q_max => {}
            _ => {
                return Ok(TrajectorySegment {
                    points,
                    terminal_event: TerminalEvent::HitSingularPoint,
                })
            }
        }
    }
    Ok(TrajectorySegment { points, terminal_event: TerminalEvent::StepLimit })
}

/// Largest `|arg(Q(m)·Δ²) - π|` over the chords of the polyline, with `m` the
/// chord midpoint and `Δ` the chord.
pub fn trajectory_condition_deviation<Q: QuadraticDifferential + ?Sized>(
    qd: &Q,
    segment: &TrajectorySegment,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for w in segment.points.windows(2) {
        let delta = w[1] - w[0];
        if delta.norm() == 0.0 {
            continue;
        }
        let v = qd.eval((w[0] + w[1]) * 0.5)? * delta * delta;
        worst = worst.max(PI - v.arg().abs());
    }
    Ok(worst)
}
