//! Rotation numbers around a reference point `q0`.
//!
//! The polar angle of `ζ(t) - q0` is tracked continuously along the dense
//! output, so `rot_m(z0, q0) = (θ(0) - θ(mβ)) / 2π` counts clockwise turns as
//! positive. Near passes are resolved by subdividing until consecutive angle
//! increments are below `π/2`; a pass closer than `rho_floor` is reported as a
//! hit, since the angle is undefined there.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rayon::prelude::*;

use crate::flow::{self, IntegratorSettings, PhaseState, Trajectory, VectorField};
use crate::numeric::GaussLegendre;
use crate::{Error, Result};

pub const RHO_FLOOR: f64 = 1e-8;
pub const R_INIT: f64 = 1.0;
pub const R_MAX: f64 = 1e6;
pub const DEFAULT_CIRCLE_SAMPLES: usize = 64;

/// Rotation accepted on the outer circle during the search.
pub const OUTER_MARGIN: f64 = 0.75;

const MAX_SUBDIVISION: u32 = 48;
const BASE_SUBSTEPS: usize = 4;

/// Unwrapped polar angle of a trajectory about `q0`.
#[derive(Clone, Debug)]
pub struct AngleRecord {
    pub q0: PhaseState,
    /// `(t, θ(t))` with `t` increasing.
    pub theta: Vec<(f64, f64)>,
    pub rho_min: f64,
    /// Time at which `rho_min` was observed.
    pub rho_min_t: f64,
}

impl AngleRecord {
    pub fn start(&self) -> f64 {
        self.theta[0].1
    }

    pub fn end(&self) -> f64 {
        self.theta[self.theta.len() - 1].1
    }

    /// Clockwise turns over the whole record.
    pub fn clockwise_turns(&self) -> f64 {
        (self.start() - self.end()) / TAU
    }

    /// Largest increment between consecutive samples.
    pub fn max_increment(&self) -> f64 {
        self.theta
            .windows(2)
            .map(|w| (w[1].1 - w[0].1).abs())
            .fold(0.0, f64::max)
    }
}

/// Continuous angle of `traj` about `q0`, with `θ(t0) ∈ (-π, π]`.
pub fn unwrap_angle(traj: &Trajectory, q0: PhaseState) -> Result<AngleRecord> {
    unwrap_angle_with_floor(traj, q0, RHO_FLOOR)
}

pub fn unwrap_angle_with_floor(traj: &Trajectory, q0: PhaseState, rho_floor: f64) -> Result<AngleRecord> {
    let mut rec = Tracker::new(q0, rho_floor);
    let t0 = traj.t0();
    rec.start(t0, traj.start())?;
    if traj.dense_steps().is_empty() {
        // sparse trajectories only carry step boundaries
        for &(t, z) in &traj.samples()[1..] {
            rec.push_sparse(t, z)?;
        }
        return Ok(rec.finish());
    }
    for step in traj.dense_steps() {
        let eval = |t: f64| step.eval(t);
        for j in 1..=BASE_SUBSTEPS {
            let t = step.t + step.h * j as f64 / BASE_SUBSTEPS as f64;
            rec.advance(&eval, t, 0)?;
        }
    }
    Ok(rec.finish())
}

struct Tracker {
    q0: PhaseState,
    floor: f64,
    theta: Vec<(f64, f64)>,
    last_raw: f64,
    rho_min: f64,
    rho_min_t: f64,
}

impl Tracker {
    fn new(q0: PhaseState, floor: f64) -> Self {
        Tracker {
            q0,
            floor,
            theta: Vec::new(),
            last_raw: 0.0,
            rho_min: f64::INFINITY,
            rho_min_t: 0.0,
        }
    }

    fn polar(&mut self, t: f64, z: PhaseState) -> Result<f64> {
        let d = z - self.q0;
        let rho = d.norm();
        if !rho.is_finite() {
            return Err(Error::IntegrationFailure {
                t,
                reason: "non-finite state while tracking angle".into(),
            });
        }
        if rho < self.rho_min {
            self.rho_min = rho;
            self.rho_min_t = t;
        }
        if rho < self.floor {
            return Err(Error::TrajectoryHitsReference { t, distance: rho });
        }
        Ok(d.y.atan2(d.x))
    }

    fn start(&mut self, t: f64, z: PhaseState) -> Result<()> {
        let raw = self.polar(t, z)?;
        self.theta.push((t, raw));
        self.last_raw = raw;
        Ok(())
    }

    fn increment(&self, raw: f64) -> f64 {
        let mut d = raw - self.last_raw;
        if d > PI {
            d -= TAU;
        } else if d <= -PI {
            d += TAU;
        }
        d
    }

    fn commit(&mut self, t: f64, raw: f64, d: f64) {
        let prev = self.theta[self.theta.len() - 1].1;
        self.theta.push((t, prev + d));
        self.last_raw = raw;
    }

    fn push_sparse(&mut self, t: f64, z: PhaseState) -> Result<()> {
        let raw = self.polar(t, z)?;
        let d = self.increment(raw);
        self.commit(t, raw, d);
        Ok(())
    }

    /// Moves the record to `t`, inserting intermediate samples from `eval`
    /// whenever the increment would reach `π/2`.
    fn advance<E: Fn(f64) -> PhaseState>(&mut self, eval: &E, t: f64, depth: u32) -> Result<()> {
        let raw = self.polar(t, eval(t))?;
        let d = self.increment(raw);
        if d.abs() < FRAC_PI_2 {
            self.commit(t, raw, d);
            return Ok(());
        }
        let t_prev = self.theta[self.theta.len() - 1].0;
        if depth >= MAX_SUBDIVISION || t - t_prev <= 1e-15 * t.abs().max(1.0) {
            return Err(Error::TrajectoryHitsReference {
                t,
                distance: self.rho_min,
            });
        }
        let mid = 0.5 * (t_prev + t);
        self.advance(eval, mid, depth + 1)?;
        self.advance(eval, t, depth + 1)
    }

    fn finish(self) -> AngleRecord {
        AngleRecord {
            q0: self.q0,
            theta: self.theta,
            rho_min: self.rho_min,
            rho_min_t: self.rho_min_t,
        }
    }
}

/// Clockwise turns of the solution through `(t0, z0)` about `q0` over
/// `[t0, t1]`.
pub fn rot_over<F: VectorField + ?Sized>(
    field: &F,
    z0: PhaseState,
    q0: PhaseState,
    t0: f64,
    t1: f64,
    s: &IntegratorSettings,
) -> Result<f64> {
    let traj = flow::integrate(field, z0, t0, t1, s)?;
    Ok(unwrap_angle(&traj, q0)?.clockwise_turns())
}

/// `rot_m(z0, q0) = (θ(0) - θ(mβ)) / 2π`.
pub fn rot_m<F: VectorField + ?Sized>(
    z0: PhaseState,
    q0: PhaseState,
    m: u32,
    field: &F,
    s: &IntegratorSettings,
) -> Result<f64> {
    check_m(m)?;
    rot_over(field, z0, q0, 0.0, m as f64 * field.period(), s)
}

fn check_m(m: u32) -> Result<()> {
    if m == 0 {
        return Err(Error::param("m", "period multiple must be positive"));
    }
    Ok(())
}

/// Quadrature value of the integral formula for the rotation number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegralRotation {
    pub value: f64,
    /// The integrand's numerator uses `(x, y)` rather than `ζ - q0`, so it only
    /// measures the angle about `q0` when `q0` is the origin.
    pub nonstandard: bool,
}

/// `(1/2π) ∫ (y² + x h(t, x)) / ρ² dt` over `[0, mβ]` with
/// `ρ = ‖ζ(t) - q0‖`, evaluated by Gauss–Legendre on every dense-output step.
///
/// For a general field `(f_x, f_y)` the numerator is `y f_x - x f_y`, which is
/// `y² + x h` for the Nagumo system.
pub fn rot_integral<F: VectorField + ?Sized>(
    z0: PhaseState,
    q0: PhaseState,
    m: u32,
    field: &F,
    s: &IntegratorSettings,
) -> Result<IntegralRotation> {
    check_m(m)?;
    let t1 = m as f64 * field.period();
    let traj = flow::integrate(field, z0, 0.0, t1, s)?;
    // run the unwrap first so near passes surface as the same error as rot_m
    unwrap_angle(&traj, q0)?;
    let rule = GaussLegendre::new(12);
    let mut acc = 0.0;
    for step in traj.dense_steps() {
        let grid = traj.grid().iter().find(|g| g.t == step.t);
        let piece = grid.map_or((step.t, step.t_end()), |g| g.piece);
        let branch = grid.map_or_else(|| flow::branch_of(field, step.eval(step.t).x), |g| g.branch);
        acc += rule.integrate(step.t, step.t_end(), |t| {
            let z = step.eval(t);
            let f = field.derivative_in(t, z, piece, branch);
            let d = z - q0;
            (z.y * f.x - z.x * f.y) / (d.x * d.x + d.y * d.y)
        });
    }
    Ok(IntegralRotation {
        value: acc / TAU,
        nonstandard: q0.norm() != 0.0,
    })
}

/// Result of the outer radius search.
#[derive(Clone, Debug)]
pub struct OuterRadius {
    pub radius: f64,
    /// Largest sampled rotation on the accepted circle.
    pub max_rot: f64,
    /// Samples on the accepted circle in angular order.
    pub samples: Vec<CurveSample>,
}

/// One point of an adaptively sampled closed curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveSample {
    /// Curve parameter in `[0, 2π[`.
    pub angle: f64,
    pub z: PhaseState,
    /// `rot_m(z, q0)`, or `None` when the trajectory meets `q0`.
    pub rot: Option<f64>,
}

/// `rot_m` at `n` equally spaced parameters of the closed curve `point`,
/// refined between neighbours whose values differ by more than 0.25 or where
/// one of them is undefined. Output is in parameter order.
pub fn sample_closed_curve<F, P>(
    point: P,
    q0: PhaseState,
    m: u32,
    field: &F,
    s: &IntegratorSettings,
    n: usize,
) -> Result<Vec<CurveSample>>
where
    F: VectorField + ?Sized,
    P: Fn(f64) -> PhaseState + Sync,
{
    let eval = |phi: f64| -> Result<CurveSample> {
        let z = point(phi);
        let rot = match rot_m(z, q0, m, field, s) {
            Ok(r) => Some(r),
            Err(Error::TrajectoryHitsReference { .. }) => None,
            Err(e) => return Err(e),
        };
        Ok(CurveSample { angle: phi, z, rot })
    };
    let n = n.max(3);
    let angles: Vec<f64> = (0..n).map(|j| TAU * j as f64 / n as f64).collect();
    let mut samples: Vec<CurveSample> = angles.par_iter().map(|&phi| eval(phi)).collect::<Result<_>>()?;
    for _ in 0..4 {
        let count = samples.len();
        let gaps: Vec<f64> = (0..count)
            .filter(|&i| match (samples[i].rot, samples[(i + 1) % count].rot) {
                (Some(a), Some(b)) => (a - b).abs() > 0.25,
                _ => true,
            })
            .map(|i| {
                let next = if i + 1 == count { TAU } else { samples[i + 1].angle };
                0.5 * (samples[i].angle + next)
            })
            .collect();
        if gaps.is_empty() || count >= 4096 {
            break;
        }
        let extra: Vec<CurveSample> = gaps.par_iter().map(|&phi| eval(phi)).collect::<Result<_>>()?;
        samples.extend(extra);
        samples.sort_by(|a, b| a.angle.total_cmp(&b.angle));
    }
    Ok(samples)
}

/// [`sample_closed_curve`] on the circle `‖z‖ = radius` about the origin.
pub fn sample_circle<F: VectorField + ?Sized>(
    q0: PhaseState,
    m: u32,
    field: &F,
    s: &IntegratorSettings,
    radius: f64,
    n: usize,
) -> Result<Vec<CurveSample>> {
    sample_closed_curve(
        |phi| PhaseState::new(radius * phi.cos(), radius * phi.sin()),
        q0,
        m,
        field,
        s,
        n,
    )
}

/// Doubles `R` from [`R_INIT`] until every sampled `rot_m` on the circle
/// `‖z‖ = R` stays below [`OUTER_MARGIN`].
pub fn outer_radius_search<F: VectorField + ?Sized>(
    q0: PhaseState,
    m: u32,
    field: &F,
    s: &IntegratorSettings,
    n_samples: usize,
) -> Result<OuterRadius> {
    check_m(m)?;
    if q0.norm() > 1.0 {
        return Err(Error::param("q0", format!("‖q0‖ = {} exceeds 1", q0.norm())));
    }
    let mut radius = R_INIT;
    let mut max_rot = f64::INFINITY;
    while radius <= R_MAX {
        let samples = sample_circle(q0, m, field, s, radius, n_samples)?;
        max_rot = samples
            .iter()
            .map(|c| c.rot.unwrap_or(f64::INFINITY))
            .fold(f64::NEG_INFINITY, f64::max);
        if max_rot < OUTER_MARGIN {
            return Ok(OuterRadius {
                radius,
                max_rot,
                samples,
            });
        }
        radius *= 2.0;
    }
    Err(Error::RadiusSearchFailure { r_max: R_MAX, max_rot })
}
