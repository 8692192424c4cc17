//! Twist annulus around `(a_n̄, 0)`, numerical verification of the twist
//! conditions, and the search for fixed points of `φ^m` inside the annulus.
//!
//! The inner boundary is a level curve `Γ` of the autonomous comparison
//! system. The outer boundary is a circle about the origin on which every
//! sampled solution turns less than once. When the inner rotation exceeds `N`
//! the twist theorem predicts at least two fixed points of `φ^m` for each
//! rotation number `k = 1..N`; [`find_fixed_points`] looks for them with a
//! damped Newton iteration on the displacement `φ^m(z) - z`.

use std::f64::consts::TAU;

use rayon::prelude::*;

use crate::energy::{self, choose_band, level_curve, AutonomousSystem, Band, LevelCurve, LevelRule};
use crate::flow::{self, IntegratorSettings, PhaseState, Trajectory, VectorField};
use crate::model::SystemParams;
use crate::numeric::gcd;
use crate::rotation::{self, sample_circle, sample_closed_curve, DEFAULT_CIRCLE_SAMPLES};
use crate::{Error, Result};

pub const DEDUP_TOL: f64 = 1e-6;
pub const CLASS_TOL: f64 = 1e-6;
pub const FIXED_POINT_TOL: f64 = 1e-9;
/// Smallest `‖φ^i(z0) - z0‖`, `0 < i < m`, accepted as proof that `z0` is not
/// `iβ`-periodic.
pub const MIN_SHIFT_DISPLACEMENT: f64 = 1e-4;

/// Energy tolerance used to group fixed points of an autonomous system that
/// lie on the same closed orbit.
const CONTINUUM_ENERGY_TOL: f64 = 1e-7;

/// Open region between `Γ` and the circle `‖z‖ = R`.
#[derive(Clone, Debug)]
pub struct Annulus {
    pub inner: LevelCurve,
    pub outer_radius: f64,
    pub q0: PhaseState,
    /// Largest rotation sampled on the outer circle during construction.
    pub outer_max_rot: f64,
}

impl Annulus {
    /// True for points of the closed annulus.
    pub fn contains(&self, z: PhaseState) -> bool {
        let d = z - self.q0;
        let theta = d.y.atan2(d.x);
        d.norm() >= self.inner.radius_at(theta) * (1.0 - 1e-12) && z.norm() <= self.outer_radius * (1.0 + 1e-12)
    }

    /// Distance from `q0` to the outer circle along the ray at angle `theta`.
    pub fn outer_distance_at(&self, theta: f64) -> f64 {
        let (sin, cos) = theta.sin_cos();
        let proj = self.q0.x * cos + self.q0.y * sin;
        let q2 = self.q0.x * self.q0.x + self.q0.y * self.q0.y;
        -proj + (proj * proj - q2 + self.outer_radius * self.outer_radius).sqrt()
    }
}

/// Annulus with `Γ = lc` and the outer radius from
/// [`rotation::outer_radius_search`]. The radius is doubled further if `Γ`
/// does not fit inside both `B(0, R)` and `B(q0, R)`.
pub fn build_annulus(lc: &LevelCurve, m: u32, p: &SystemParams, s: &IntegratorSettings) -> Result<Annulus> {
    let q0 = lc.center();
    let found = rotation::outer_radius_search(q0, m, p, s, DEFAULT_CIRCLE_SAMPLES)?;
    let mut radius = found.radius;
    let mut outer_max_rot = found.max_rot;
    let reach = lc
        .boundary
        .iter()
        .map(|z| z.norm().max(z.dist(q0)))
        .fold(0.0, f64::max);
    while reach >= radius {
        radius *= 2.0;
        if radius > rotation::R_MAX {
            return Err(Error::RadiusSearchFailure {
                r_max: rotation::R_MAX,
                max_rot: outer_max_rot,
            });
        }
        outer_max_rot = max_rot(&sample_circle(q0, m, p, s, radius, DEFAULT_CIRCLE_SAMPLES)?);
    }
    Ok(Annulus {
        inner: lc.clone(),
        outer_radius: radius,
        q0,
        outer_max_rot,
    })
}

fn max_rot(samples: &[rotation::CurveSample]) -> f64 {
    samples
        .iter()
        .map(|c| c.rot.unwrap_or(f64::INFINITY))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Everything between a parameter set and its annulus.
#[derive(Clone, Debug)]
pub struct TwistSetup {
    pub system: AutonomousSystem,
    pub band: Band,
    pub annulus: Annulus,
}

/// Comparison system at the weight's `n̄`, band, level curve from `rule` and
/// the annulus for `φ^m`.
pub fn twist_setup(p: &SystemParams, m: u32, rule: LevelRule, s: &IntegratorSettings) -> Result<TwistSetup> {
    let system = AutonomousSystem::from_params(p)?;
    let band = choose_band(&system)?;
    let lc = level_curve(&system, &band, rule)?;
    let annulus = build_annulus(&lc, m, p, s)?;
    Ok(TwistSetup { system, band, annulus })
}

/// Measured twist data for `φ^m` on an annulus.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistCertificate {
    pub m: u32,
    pub n: u32,
    pub inner_min_rot: f64,
    pub outer_max_rot: f64,
    /// No sampled trajectory from `Γ` came within `rho_floor` of `q0`.
    pub nonq_ok: bool,
    pub inner_samples: usize,
    pub nonq_checks: usize,
}

impl TwistCertificate {
    pub fn is_valid(&self) -> bool {
        self.inner_min_rot > self.n as f64 && self.outer_max_rot < 1.0 && self.nonq_ok
    }

    /// Largest `N` this measurement certifies, 0 if none.
    pub fn max_certified_n(&self) -> u32 {
        if !(self.outer_max_rot < 1.0 && self.nonq_ok) || !(self.inner_min_rot > 1.0) {
            return 0;
        }
        (self.inner_min_rot.ceil() - 1.0) as u32
    }
}

/// Number of starting times per period used for the non-collision check.
const NONQ_TIMES_PER_PERIOD: usize = 8;
const NONQ_CURVE_POINTS: usize = 32;

/// Samples `rot_m` on `Γ` and on the outer circle, and checks that
/// trajectories leaving `Γ` at shifted starting times avoid `q0`.
///
/// Starting times are `jβ/8` together with the weight's breakpoints in
/// `[0, mβ[`.
pub fn verify_twist(ann: &Annulus, m: u32, n: u32, p: &SystemParams, s: &IntegratorSettings) -> Result<TwistCertificate> {
    if m == 0 || n == 0 {
        return Err(Error::param("m, N", "period multiple and N must be positive"));
    }
    let lc = &ann.inner;
    let inner = sample_closed_curve(|phi| lc.point_at(phi), ann.q0, m, p, s, DEFAULT_CIRCLE_SAMPLES)?;
    let mut nonq_ok = inner.iter().all(|c| c.rot.is_some());
    let inner_min_rot = inner
        .iter()
        .map(|c| c.rot.unwrap_or(f64::NEG_INFINITY))
        .fold(f64::INFINITY, f64::min);
    let outer = sample_circle(ann.q0, m, p, s, ann.outer_radius, DEFAULT_CIRCLE_SAMPLES)?;
    let outer_max_rot = max_rot(&outer);

    let beta = p.beta();
    let span = m as f64 * beta;
    let mut starts: Vec<f64> = (1..NONQ_TIMES_PER_PERIOD * m as usize)
        .map(|j| j as f64 * beta / NONQ_TIMES_PER_PERIOD as f64)
        .collect();
    starts.extend(p.weight.breakpoints(0.0, span));
    starts.sort_by(f64::total_cmp);
    starts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let jobs: Vec<(f64, PhaseState)> = starts
        .iter()
        .flat_map(|&t0| lc.sample(NONQ_CURVE_POINTS).into_iter().map(move |z| (t0, z)))
        .collect();
    let hits = jobs
        .par_iter()
        .map(|&(t0, z)| match rotation::rot_over(p, z, ann.q0, t0, t0 + span, s) {
            Ok(_) => Ok(false),
            Err(Error::TrajectoryHitsReference { .. }) => Ok(true),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<bool>>>()?;
    nonq_ok &= !hits.iter().any(|&h| h);

    Ok(TwistCertificate {
        m,
        n,
        inner_min_rot,
        outer_max_rot,
        nonq_ok,
        inner_samples: inner.len(),
        nonq_checks: inner.len() + jobs.len(),
    })
}

/// An `mβ`-periodic solution found as a fixed point of `φ^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicOrbit {
    pub z0: PhaseState,
    pub m: u32,
    /// Measured rotation around `q0` before rounding.
    pub rot: f64,
    pub rot_k: i64,
    /// Sign changes of `x(t) - q0.x` on `[0, mβ[`.
    pub zero_crossings: usize,
    /// `‖φ^m(z0) - z0‖`.
    pub residual: f64,
    /// `(min x, max x)` over `[0, mβ]`.
    pub range: (f64, f64),
    /// `φ^i(z0)` for `i = 0..m`.
    pub shifts: Vec<PhaseState>,
    pub minimal_period_certified: bool,
    pub class_id: usize,
    /// First orbit of its periodicity class in the output order.
    pub representative: bool,
    /// Stands for a whole closed orbit of fixed points (autonomous weight).
    pub continuum: bool,
    /// The equilibrium `v ≡ 0`.
    pub trivial: bool,
}

impl PeriodicOrbit {
    /// `‖φ^i(z0) - z0‖` for `i = 1..m`.
    pub fn shift_displacements(&self) -> Vec<f64> {
        self.shifts[1..].iter().map(|z| z.dist(self.z0)).collect()
    }

    /// Range strictly inside `]0, 1[`.
    pub fn range_in_unit_interval(&self) -> bool {
        self.range.0 > 0.0 && self.range.1 < 1.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NewtonOptions {
    pub max_iter: usize,
    pub max_halvings: usize,
    pub tol: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            max_iter: 50,
            max_halvings: 20,
            tol: FIXED_POINT_TOL,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchOptions {
    pub angular: usize,
    pub radial: usize,
    /// Starting phases `t0 = iβ/phases` at which the seeds are used.
    pub phases: usize,
    /// When set, seeds and phases are doubled once if some `k ∈ 1..=N` has
    /// fewer than two periodicity classes.
    pub target_n: Option<u32>,
    pub newton: NewtonOptions,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            angular: 48,
            radial: 24,
            phases: 2,
            target_n: None,
            newton: NewtonOptions::default(),
        }
    }
}

impl SearchOptions {
    pub fn with_seeds(angular: usize, radial: usize) -> Self {
        SearchOptions {
            angular,
            radial,
            ..Default::default()
        }
    }
}

/// Polar grid about `q0`: `angular` rays, `radial` points per ray between `Γ`
/// and the outer circle, spaced quadratically so the region next to `Γ` is
/// seeded more densely.
pub fn seed_grid(ann: &Annulus, angular: usize, radial: usize) -> Vec<PhaseState> {
    let mut seeds = Vec::with_capacity(angular * radial);
    for i in 0..angular {
        let theta = TAU * (i as f64 + 0.5) / angular as f64;
        let r_in = ann.inner.radius_at(theta);
        let r_out = ann.outer_distance_at(theta);
        for j in 0..radial {
            let u = (j as f64 + 0.5) / radial as f64;
            let r = r_in + (r_out - r_in) * u * u;
            seeds.push(ann.q0 + PhaseState::new(r * theta.cos(), r * theta.sin()));
        }
    }
    seeds
}

/// Solves `A x = b` for 2×2 `A`; `None` when `A` is numerically singular.
fn solve2(a: [[f64; 2]; 2], b: [f64; 2]) -> Option<[f64; 2]> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    Some([
        (b[0] * a[1][1] - a[0][1] * b[1]) / det,
        (a[0][0] * b[1] - b[0] * a[1][0]) / det,
    ])
}

/// Minimum-norm least-squares step restricted to the dominant singular
/// direction of `A`; used when the Newton step fails near a degenerate root.
fn dominant_direction_step(a: [[f64; 2]; 2], b: [f64; 2]) -> Option<[f64; 2]> {
    // eigen-decomposition of AᵀA
    let p = a[0][0] * a[0][0] + a[1][0] * a[1][0];
    let q = a[0][0] * a[0][1] + a[1][0] * a[1][1];
    let r = a[0][1] * a[0][1] + a[1][1] * a[1][1];
    let mean = 0.5 * (p + r);
    let lambda = mean + (0.25 * (p - r) * (p - r) + q * q).sqrt();
    if !(lambda > 0.0) {
        return None;
    }
    let v = if q.abs() > 1e-300 {
        let (x, y) = (q, lambda - p);
        let n = x.hypot(y);
        [x / n, y / n]
    } else if p >= r {
        [1.0, 0.0]
    } else {
        [0.0, 1.0]
    };
    let sigma = lambda.sqrt();
    let u = [(a[0][0] * v[0] + a[0][1] * v[1]) / sigma, (a[1][0] * v[0] + a[1][1] * v[1]) / sigma];
    let c = (u[0] * b[0] + u[1] * b[1]) / sigma;
    Some([c * v[0], c * v[1]])
}

/// Damped Newton iteration on `D(z) = φ^m(z) - z`. Returns the root and its
/// residual when the residual falls below `opts.tol`.
pub fn newton_fixed_point<F: VectorField + ?Sized>(
    p: &F,
    z_start: PhaseState,
    m: u32,
    s: &IntegratorSettings,
    opts: &NewtonOptions,
    bound: f64,
) -> Option<(PhaseState, f64)> {
    let residual = |z: PhaseState| -> Option<f64> {
        let r = flow::poincare_map(p, z, m, s).ok()?.dist(z);
        r.is_finite().then_some(r)
    };
    let mut z = z_start;
    let mut polish = 0;
    for _ in 0..opts.max_iter {
        let jac = flow::poincare_jacobian(p, z, m, s).ok()?;
        let d = jac.image - z;
        let r = d.norm();
        if !r.is_finite() {
            return None;
        }
        if r < opts.tol {
            // a couple of extra iterations push the root to the noise floor,
            // which keeps duplicates from different seeds within DEDUP_TOL
            polish += 1;
            if polish > 2 || r < 1e-13 {
                return Some((z, r));
            }
        }
        let mut a = jac.matrix;
        a[0][0] -= 1.0;
        a[1][1] -= 1.0;
        let rhs = [-d.x, -d.y];
        let candidates = [solve2(a, rhs), dominant_direction_step(a, rhs)];
        let mut moved = false;
        for step in candidates.into_iter().flatten() {
            let mut lambda = 1.0;
            for _ in 0..=opts.max_halvings {
                let trial = z + PhaseState::new(step[0], step[1]) * lambda;
                if trial.norm() > bound || !trial.is_finite() {
                    lambda *= 0.5;
                    continue;
                }
                if let Some(rt) = residual(trial) {
                    if rt < r {
                        z = trial;
                        moved = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if moved {
                break;
            }
        }
        if !moved {
            return (r < opts.tol).then_some((z, r));
        }
    }
    let r = residual(z)?;
    (r < opts.tol).then_some((z, r))
}

/// Rotation, crossings, range and shifts of the solution through `z0`.
pub fn analyze_orbit(
    p: &SystemParams,
    z0: PhaseState,
    m: u32,
    q0: PhaseState,
    s: &IntegratorSettings,
) -> Result<PeriodicOrbit> {
    let beta = p.beta();
    let span = m as f64 * beta;
    let traj = flow::integrate(p, z0, 0.0, span, s)?;
    let end = traj.end();
    let trivial = z0.norm() < DEDUP_TOL;
    let rot = if trivial {
        0.0
    } else {
        match rotation::unwrap_angle(&traj, q0) {
            Ok(rec) => rec.clockwise_turns(),
            Err(Error::TrajectoryHitsReference { .. }) => f64::NAN,
            Err(e) => return Err(e),
        }
    };
    let rot_k = if rot.is_finite() { rot.round() as i64 } else { -1 };
    let shifts: Vec<PhaseState> = (0..m).map(|i| traj.eval(i as f64 * beta)).collect();
    Ok(PeriodicOrbit {
        z0,
        m,
        rot,
        rot_k,
        zero_crossings: zero_crossings(&traj, q0.x),
        residual: end.dist(z0),
        range: x_range(&traj),
        shifts,
        minimal_period_certified: false,
        class_id: 0,
        representative: false,
        continuum: false,
        trivial,
    })
}

/// Sign changes of `x(t) - level` over the trajectory.
pub fn zero_crossings(traj: &Trajectory, level: f64) -> usize {
    let event = |_: f64, z: PhaseState| z.x - level;
    traj.crossings(event, true).len() + traj.crossings(event, false).len()
}

/// `(min x, max x)` from 1000 equally spaced samples and the step boundaries.
pub fn x_range(traj: &Trajectory) -> (f64, f64) {
    let dt = (traj.t_end() - traj.t0()) / 1000.0;
    traj.resample(dt)
        .iter()
        .chain(traj.samples())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, z)| (lo.min(z.x), hi.max(z.x)))
}

/// Fixed points of `φ^m` in the closed annulus from a polar seed grid.
///
/// Roots closer than [`DEDUP_TOL`] are merged. For a time-independent weight
/// every closed orbit whose period divides `mβ` consists of fixed points; such
/// circles are reduced to one representative flagged `continuum`. Orbits are
/// returned sorted by rotation number and position, with periodicity classes
/// and minimality filled in.
pub fn find_fixed_points(
    ann: &Annulus,
    m: u32,
    p: &SystemParams,
    s: &IntegratorSettings,
    opts: &SearchOptions,
) -> Result<Vec<PeriodicOrbit>> {
    if m == 0 {
        return Err(Error::param("m", "period multiple must be positive"));
    }
    let mut orbits = search_once(ann, m, p, s, opts, opts.angular, opts.radial, opts.phases)?;
    if let Some(n) = opts.target_n {
        if !two_classes_per_rotation(&orbits, n) {
            orbits = search_once(ann, m, p, s, opts, 2 * opts.angular, 2 * opts.radial, 2 * opts.phases)?;
        }
    }
    Ok(orbits)
}

/// At least two periodicity classes for every `k ∈ 1..=n`.
pub fn two_classes_per_rotation(orbits: &[PeriodicOrbit], n: u32) -> bool {
    (1..=n as i64).all(|k| {
        let mut ids: Vec<usize> = orbits.iter().filter(|o| o.rot_k == k).map(|o| o.class_id).collect();
        ids.sort_unstable();
        ids.dedup();
        ids.len() >= 2
    })
}

fn search_once(
    ann: &Annulus,
    m: u32,
    p: &SystemParams,
    s: &IntegratorSettings,
    opts: &SearchOptions,
    angular: usize,
    radial: usize,
    phases: usize,
) -> Result<Vec<PeriodicOrbit>> {
    let seeds = seed_grid(ann, angular, radial);
    let bound = 4.0 * ann.outer_radius;
    let mut unique: Vec<PhaseState> = Vec::new();
    for phase in 0..phases.max(1) {
        let offset = phase as f64 * p.beta() / phases.max(1) as f64;
        for z in phase_roots(p, &seeds, m, offset, s, &opts.newton, bound) {
            if ann.contains(z) && unique.iter().all(|u| u.dist(z) >= DEDUP_TOL) {
                unique.push(z);
            }
        }
    }
    let mut orbits: Vec<PeriodicOrbit> = unique
        .par_iter()
        .map(|&z| analyze_orbit(p, z, m, ann.q0, s).ok())
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    orbits.sort_by(|a, b| {
        a.rot_k
            .cmp(&b.rot_k)
            .then(a.z0.x.total_cmp(&b.z0.x))
            .then(a.z0.y.total_cmp(&b.z0.y))
    });

    if p.weight.is_constant() {
        orbits = collapse_continua(orbits, p)?;
    }
    assign_classes(&mut orbits);
    for o in &mut orbits {
        o.minimal_period_certified = minimal_period_check(o);
    }
    Ok(orbits)
}

/// Fixed points of the period map started at `offset`, carried to time
/// `mβ` and polished there, so every returned point is a fixed point of `φ^m`.
///
/// Near a separatrix `φ^m` is so sensitive that a fixed point is only
/// reachable by Newton from very close seeds; the same solution sampled at
/// another phase can be far better conditioned.
fn phase_roots(
    p: &SystemParams,
    seeds: &[PhaseState],
    m: u32,
    offset: f64,
    s: &IntegratorSettings,
    newton: &NewtonOptions,
    bound: f64,
) -> Vec<PhaseState> {
    let shifted = flow::Shifted { field: p, offset };
    let roots: Vec<Option<(PhaseState, f64)>> = seeds
        .par_iter()
        .map(|&z| newton_fixed_point(&shifted, z, m, s, newton, bound))
        .collect();
    let mut distinct: Vec<PhaseState> = Vec::new();
    for (z, _) in roots.into_iter().flatten() {
        if distinct.iter().all(|u| u.dist(z) >= DEDUP_TOL) {
            distinct.push(z);
        }
    }
    if offset == 0.0 {
        return distinct;
    }
    let span = m as f64 * p.beta();
    distinct
        .par_iter()
        .map(|&z| {
            let carried = flow::integrate_sparse(p, z, offset, span, s).ok()?.end();
            newton_fixed_point(p, carried, m, s, newton, bound).map(|(r, _)| r)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

fn collapse_continua(orbits: Vec<PeriodicOrbit>, p: &SystemParams) -> Result<Vec<PeriodicOrbit>> {
    let sys = AutonomousSystem::new(p.g, p.weight.eval(0.0), p.nonlinearity.clone())?;
    let mut kept: Vec<(PeriodicOrbit, f64, usize)> = Vec::new();
    for o in orbits {
        let e = energy::energy(o.z0, &sys);
        match kept
            .iter_mut()
            .find(|(k, ek, _)| k.rot_k == o.rot_k && (ek - e).abs() < CONTINUUM_ENERGY_TOL)
        {
            Some(entry) => entry.2 += 1,
            None => kept.push((o, e, 1)),
        }
    }
    Ok(kept
        .into_iter()
        .map(|(mut o, _, count)| {
            o.continuum = count > 1 && !o.trivial;
            o
        })
        .collect())
}

fn shifted_match(o1: &PeriodicOrbit, o2: &PeriodicOrbit) -> bool {
    o1.m == o2.m && o1.rot_k == o2.rot_k && o1.shifts.iter().any(|z| z.dist(o2.z0) < CLASS_TOL)
}

fn assign_classes(orbits: &mut [PeriodicOrbit]) {
    let mut next = 0;
    for i in 0..orbits.len() {
        let found = (0..i).find(|&j| orbits[j].representative && shifted_match(&orbits[j], &orbits[i]));
        match found {
            Some(j) => {
                orbits[i].class_id = orbits[j].class_id;
                orbits[i].representative = false;
            }
            None => {
                orbits[i].class_id = next;
                orbits[i].representative = true;
                next += 1;
            }
        }
    }
}

/// Distinct periodicity classes with `k ∈ 1..=n`.
pub fn count_classes(orbits: &[PeriodicOrbit], n: u32) -> usize {
    let mut ids: Vec<usize> = orbits
        .iter()
        .filter(|o| o.rot_k >= 1 && o.rot_k <= n as i64)
        .map(|o| o.class_id)
        .collect();
    ids.sort_unstable();
    ids.dedup();
    ids.len()
}

/// True when `ζ(jβ, 0, o1.z0)` meets `o2.z0` within [`CLASS_TOL`] for some
/// `j ∈ 0..m`. Orbits with different rotation numbers are never in the same
/// class.
pub fn same_periodicity_class(o1: &PeriodicOrbit, o2: &PeriodicOrbit, p: &SystemParams, s: &IntegratorSettings) -> bool {
    if o1.m != o2.m || o1.rot_k != o2.rot_k {
        return false;
    }
    if o1.z0.dist(o2.z0) < CLASS_TOL {
        return true;
    }
    let beta = p.beta();
    let Ok(traj) = flow::integrate(p, o1.z0, 0.0, o1.m as f64 * beta, s) else {
        return false;
    };
    (1..o1.m).any(|j| traj.eval(j as f64 * beta).dist(o2.z0) < CLASS_TOL)
}

/// `gcd(m, k) = 1` and `φ^i(z0)` moved away from `z0` for every `0 < i < m`.
pub fn minimal_period_check(o: &PeriodicOrbit) -> bool {
    if o.m == 1 {
        return true;
    }
    if o.rot_k <= 0 || gcd(o.m as u64, o.rot_k as u64) != 1 {
        return false;
    }
    o.shift_displacements().iter().all(|&d| d > MIN_SHIFT_DISPLACEMENT)
}

/// The first `k` positive integers co-prime with `m`.
pub fn coprime_rotation_set(m: u32, k: u32) -> Vec<u32> {
    (1..).filter(|&l| gcd(m as u64, l as u64) == 1).take(k as usize).collect()
}

/// Outcome of the empirical perturbation-budget search.
#[derive(Clone, Debug)]
pub struct EpsilonEstimate {
    /// Largest amplitude seen with a valid certificate.
    pub amplitude: f64,
    pub ntilde_l1: f64,
    pub certificate: TwistCertificate,
    /// Smallest amplitude seen with an invalid certificate, if any.
    pub failed_at: Option<f64>,
}

/// Bisects the amplitude `θ ∈ [0, 1]` of the perturbation built by `build`
/// for the boundary where the twist certificate for `(m, n)` stops being
/// valid. `build(0)` must certify.
pub fn epsilon_search<B>(
    build: B,
    m: u32,
    n: u32,
    rule: LevelRule,
    s: &IntegratorSettings,
    iterations: usize,
) -> Result<EpsilonEstimate>
where
    B: Fn(f64) -> Result<SystemParams>,
{
    let certify = |theta: f64| -> Result<(TwistCertificate, f64)> {
        let p = build(theta)?;
        let setup = twist_setup(&p, m, rule, s)?;
        Ok((verify_twist(&setup.annulus, m, n, &p, s)?, p.weight.ntilde_l1()))
    };
    let (cert0, l1_0) = certify(0.0)?;
    if !cert0.is_valid() {
        return Err(Error::HypothesisViolation(format!(
            "unperturbed system does not certify N = {n} (inner rot {})",
            cert0.inner_min_rot
        )));
    }
    let mut best = (0.0, l1_0, cert0);
    let attempt = |theta: f64| certify(theta).ok().filter(|(c, _)| c.is_valid());
    if let Some((c, l1)) = attempt(1.0) {
        return Ok(EpsilonEstimate {
            amplitude: 1.0,
            ntilde_l1: l1,
            certificate: c,
            failed_at: None,
        });
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..iterations {
        let mid = 0.5 * (lo + hi);
        match attempt(mid) {
            Some((c, l1)) => {
                lo = mid;
                best = (mid, l1, c);
            }
            None => hi = mid,
        }
    }
    Ok(EpsilonEstimate {
        amplitude: best.0,
        ntilde_l1: best.1,
        certificate: best.2,
        failed_at: Some(hi),
    })
}
