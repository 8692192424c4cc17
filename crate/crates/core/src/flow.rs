//! Integration of the planar system `x' = y, y' = -h(t, x)`, the Poincaré map
//! `φ: z0 ↦ ζ(β, 0, z0)` and its iterates.
//!
//! Integration uses the Dormand–Prince 8(5,3) pair with its 7th-order dense
//! output. Weight discontinuities are restart points: no step straddles one,
//! and every right-hand side evaluation inside a step sees the weight of the
//! smooth piece the step belongs to. The modified nonlinearity has kinks at
//! `x = 0` and `x = 1`; a step that crosses one is shortened to end on it,
//! and steps outside `[0, 1]` are kept short against the length scale of the
//! junction there.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::model::{ModifiedNonlinearity, SystemParams};
use crate::{Error, Result};

mod dop853;

/// A point `(x, y) = (v, v')` of the phase plane.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PhaseState {
    pub x: f64,
    pub y: f64,
}

impl PhaseState {
    pub const ORIGIN: PhaseState = PhaseState { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        PhaseState { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: PhaseState) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for PhaseState {
    type Output = PhaseState;
    #[inline]
    fn add(self, o: PhaseState) -> PhaseState {
        PhaseState::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for PhaseState {
    #[inline]
    fn add_assign(&mut self, o: PhaseState) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for PhaseState {
    type Output = PhaseState;
    #[inline]
    fn sub(self, o: PhaseState) -> PhaseState {
        PhaseState::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for PhaseState {
    type Output = PhaseState;
    #[inline]
    fn mul(self, s: f64) -> PhaseState {
        PhaseState::new(self.x * s, self.y * s)
    }
}

impl Neg for PhaseState {
    type Output = PhaseState;
    #[inline]
    fn neg(self) -> PhaseState {
        PhaseState::new(-self.x, -self.y)
    }
}

/// A time-dependent planar vector field with period `period()` in `t`.
pub trait VectorField: Sync {
    fn derivative(&self, t: f64, z: PhaseState) -> PhaseState;

    /// Evaluation on the smooth piece `[start, end]`, using one-sided limits at
    /// its ends. Fields without discontinuities can keep the default.
    fn derivative_on(&self, t: f64, z: PhaseState, _start: f64, _end: f64) -> PhaseState {
        self.derivative(t, z)
    }

    fn period(&self) -> f64;

    /// Discontinuities of the field in `]t0, t1[`, sorted.
    fn breakpoints(&self, _t0: f64, _t1: f64) -> Vec<f64> {
        Vec::new()
    }

    /// Evaluation on the time piece `[start, end]` and on branch `branch` in
    /// `x`. Branch `k` is the formula the field follows between the switching
    /// levels `k - 1` and `k`, continued smoothly past them, so that the stages
    /// of a step ending on a level never see the kink.
    fn derivative_in(&self, t: f64, z: PhaseState, piece: (f64, f64), _branch: usize) -> PhaseState {
        self.derivative_on(t, z, piece.0, piece.1)
    }

    /// Sorted values of `x` across which the field is continuous but not
    /// smooth. A step that crosses one is cut at the crossing.
    fn switching_levels(&self) -> &[f64] {
        &[]
    }

    /// Length in `x` over which the field varies appreciably somewhere in
    /// `[min(x0, x1), max(x0, x1)]`. Steps are kept short against it, since
    /// an error estimate cannot notice a feature the step jumps over.
    fn feature_scale(&self, _x0: f64, _x1: f64) -> f64 {
        f64::INFINITY
    }
}

/// `(y, -h(t, x)) = (y, g x - n(t) F0(x))`.
#[inline]
pub fn rhs(t: f64, z: PhaseState, p: &SystemParams) -> PhaseState {
    PhaseState::new(z.y, -p.h(t, z.x))
}

impl VectorField for SystemParams {
    #[inline]
    fn derivative(&self, t: f64, z: PhaseState) -> PhaseState {
        rhs(t, z, self)
    }

    #[inline]
    fn derivative_on(&self, t: f64, z: PhaseState, start: f64, end: f64) -> PhaseState {
        let n = self.weight.eval_on_piece(t, start, end);
        PhaseState::new(z.y, self.g * z.x - n * self.nonlinearity.eval(z.x))
    }

    #[inline]
    fn derivative_in(&self, t: f64, z: PhaseState, piece: (f64, f64), branch: usize) -> PhaseState {
        let n = self.weight.eval_on_piece(t, piece.0, piece.1);
        PhaseState::new(z.y, self.g * z.x - n * self.nonlinearity.eval_branch(z.x, branch))
    }

    fn period(&self) -> f64 {
        self.weight.beta()
    }

    fn breakpoints(&self, t0: f64, t1: f64) -> Vec<f64> {
        self.weight.breakpoints(t0, t1)
    }

    fn switching_levels(&self) -> &[f64] {
        &ModifiedNonlinearity::KINKS
    }

    fn feature_scale(&self, x0: f64, x1: f64) -> f64 {
        ModifiedNonlinearity::feature_scale(x0, x1)
    }
}

/// Branch of `field` whose interval contains `x`; a point on a switching
/// level belongs to the branch below it.
pub fn branch_of<F: VectorField + ?Sized>(field: &F, x: f64) -> usize {
    field.switching_levels().iter().filter(|&&c| x > c).count()
}

/// Time reversal `s ↦ -f(-s, z)`: integrating it forward over `[0, T]`
/// traces the original field backward over `[-T, 0]`.
pub struct Reversed<'a, F: ?Sized>(pub &'a F);

impl<F: VectorField + ?Sized> VectorField for Reversed<'_, F> {
    fn derivative(&self, s: f64, z: PhaseState) -> PhaseState {
        -self.0.derivative(-s, z)
    }

    fn derivative_on(&self, s: f64, z: PhaseState, start: f64, end: f64) -> PhaseState {
        -self.0.derivative_on(-s, z, -end, -start)
    }

    fn derivative_in(&self, s: f64, z: PhaseState, piece: (f64, f64), branch: usize) -> PhaseState {
        -self.0.derivative_in(-s, z, (-piece.1, -piece.0), branch)
    }

    fn period(&self) -> f64 {
        self.0.period()
    }

    fn breakpoints(&self, t0: f64, t1: f64) -> Vec<f64> {
        let mut b: Vec<f64> = self.0.breakpoints(-t1, -t0).into_iter().map(|t| -t).collect();
        b.reverse();
        b
    }

    fn switching_levels(&self) -> &[f64] {
        self.0.switching_levels()
    }

    fn feature_scale(&self, x0: f64, x1: f64) -> f64 {
        self.0.feature_scale(x0, x1)
    }
}

/// Time shift `s ↦ f(s + offset, z)`: its Poincaré map is the period map of
/// the original field started at `offset`.
pub struct Shifted<'a, F: ?Sized> {
    pub field: &'a F,
    pub offset: f64,
}

impl<F: VectorField + ?Sized> VectorField for Shifted<'_, F> {
    fn derivative(&self, s: f64, z: PhaseState) -> PhaseState {
        self.field.derivative(s + self.offset, z)
    }

    fn derivative_on(&self, s: f64, z: PhaseState, start: f64, end: f64) -> PhaseState {
        self.field
            .derivative_on(s + self.offset, z, start + self.offset, end + self.offset)
    }

    fn derivative_in(&self, s: f64, z: PhaseState, piece: (f64, f64), branch: usize) -> PhaseState {
        let shifted = (piece.0 + self.offset, piece.1 + self.offset);
        self.field.derivative_in(s + self.offset, z, shifted, branch)
    }

    fn period(&self) -> f64 {
        self.field.period()
    }

    fn breakpoints(&self, t0: f64, t1: f64) -> Vec<f64> {
        self.field
            .breakpoints(t0 + self.offset, t1 + self.offset)
            .into_iter()
            .map(|t| t - self.offset)
            .collect()
    }

    fn switching_levels(&self) -> &[f64] {
        self.field.switching_levels()
    }

    fn feature_scale(&self, x0: f64, x1: f64) -> f64 {
        self.field.feature_scale(x0, x1)
    }
}

/// Tolerances and step cap for the adaptive integrator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        IntegratorSettings {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 0.25,
        }
    }
}

impl IntegratorSettings {
    pub fn new(rel_tol: f64, abs_tol: f64, max_step: f64) -> Result<Self> {
        let s = IntegratorSettings {
            rel_tol,
            abs_tol,
            max_step,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("tol.rel", self.rel_tol), ("tol.abs", self.abs_tol)] {
            if !(v > 0.0 && v <= 1e-2) {
                return Err(Error::param(
                    if name == "tol.rel" { "tol.rel" } else { "tol.abs" },
                    format!("{v} must lie in ]0, 1e-2]"),
                ));
            }
        }
        if !(self.max_step > 0.0) {
            return Err(Error::param("tol.max_step", format!("{} must be positive", self.max_step)));
        }
        Ok(())
    }

    /// Both tolerances divided by `factor`.
    pub fn tightened(&self, factor: f64) -> Self {
        IntegratorSettings {
            rel_tol: self.rel_tol / factor,
            abs_tol: self.abs_tol / factor,
            max_step: self.max_step,
        }
    }
}

/// One accepted step with its dense-output polynomial.
#[derive(Clone, Debug)]
pub struct DenseStep {
    pub t: f64,
    pub h: f64,
    cont: [PhaseState; 8],
}

impl DenseStep {
    pub fn t_end(&self) -> f64 {
        self.t + self.h
    }

    pub fn eval(&self, t: f64) -> PhaseState {
        let s = (t - self.t) / self.h;
        let s1 = 1.0 - s;
        let c = &self.cont;
        let conpar = c[4] + (c[5] + (c[6] + c[7] * s) * s1) * s;
        c[0] + (c[1] + (c[2] + (c[3] + conpar * s1) * s) * s1) * s
    }
}

/// Step boundaries and the smooth piece each step lives on; enough to replay
/// the same discretization from a nearby initial point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridStep {
    pub t: f64,
    pub h: f64,
    pub piece: (f64, f64),
    pub branch: usize,
}

/// A solution `ζ(t) = ζ(t, t0, z0)` sampled at the accepted steps, with dense
/// output when requested.
#[derive(Clone, Debug)]
pub struct Trajectory {
    samples: Vec<(f64, PhaseState)>,
    dense: Vec<DenseStep>,
    grid: Vec<GridStep>,
}

impl Trajectory {
    pub fn t0(&self) -> f64 {
        self.samples[0].0
    }

    pub fn t_end(&self) -> f64 {
        self.samples[self.samples.len() - 1].0
    }

    pub fn start(&self) -> PhaseState {
        self.samples[0].1
    }

    pub fn end(&self) -> PhaseState {
        self.samples[self.samples.len() - 1].1
    }

    /// `(t, z)` at every accepted step boundary, `t` strictly increasing.
    pub fn samples(&self) -> &[(f64, PhaseState)] {
        &self.samples
    }

    pub fn dense_steps(&self) -> &[DenseStep] {
        &self.dense
    }

    pub fn grid(&self) -> &[GridStep] {
        &self.grid
    }

    pub fn has_dense_output(&self) -> bool {
        !self.dense.is_empty() || self.samples.len() == 1
    }

    /// `ζ(t)` from the dense output; clamps to the covered interval.
    pub fn eval(&self, t: f64) -> PhaseState {
        assert!(self.has_dense_output(), "trajectory was integrated without dense output");
        if self.dense.is_empty() {
            return self.start();
        }
        if t <= self.t0() {
            return self.start();
        }
        if t >= self.t_end() {
            return self.end();
        }
        let i = self.dense.partition_point(|s| s.t_end() < t);
        self.dense[i.min(self.dense.len() - 1)].eval(t)
    }

    /// Samples at `t0, t0 + dt, ...` plus the final time.
    pub fn resample(&self, dt: f64) -> Vec<(f64, PhaseState)> {
        let t0 = self.t0();
        let t1 = self.t_end();
        let n = ((t1 - t0) / dt).floor() as usize;
        let mut out: Vec<(f64, PhaseState)> = (0..=n).map(|i| t0 + i as f64 * dt).map(|t| (t, self.eval(t))).collect();
        if out.last().map_or(true, |&(t, _)| t1 - t > 1e-12 * dt) {
            out.push((t1, self.end()));
        }
        out
    }

    /// Times in `]t0, t_end[` where `event` changes sign from positive to
    /// non-positive (`downward`) or from negative to non-negative, refined by
    /// bisection on the dense output.
    pub fn crossings<G: Fn(f64, PhaseState) -> f64>(&self, event: G, downward: bool) -> Vec<f64> {
        let mut out = Vec::new();
        const SUB: usize = 8;
        for step in &self.dense {
            let mut prev_t = step.t;
            let mut prev_v = event(prev_t, step.eval(prev_t));
            for j in 1..=SUB {
                let t = step.t + step.h * j as f64 / SUB as f64;
                let v = event(t, step.eval(t));
                let hit = if downward {
                    prev_v > 0.0 && v <= 0.0
                } else {
                    prev_v < 0.0 && v >= 0.0
                };
                if hit {
                    let root = crate::numeric::bisect(|s| event(s, step.eval(s)), prev_t, t, 1e-15 * t.abs().max(1.0))
                        .unwrap_or(t);
                    out.push(root);
                }
                prev_t = t;
                prev_v = v;
            }
        }
        out
    }
}

/// Integrates from `(t0, z0)` to `t1 > t0` with dense output.
pub fn integrate<F: VectorField + ?Sized>(
    field: &F,
    z0: PhaseState,
    t0: f64,
    t1: f64,
    s: &IntegratorSettings,
) -> Result<Trajectory> {
    integrate_impl(field, z0, t0, t1, s, true)
}

/// Integrates from `(t0, z0)` to `t1 > t0` keeping only step boundaries.
pub fn integrate_sparse<F: VectorField + ?Sized>(
    field: &F,
    z0: PhaseState,
    t0: f64,
    t1: f64,
    s: &IntegratorSettings,
) -> Result<Trajectory> {
    integrate_impl(field, z0, t0, t1, s, false)
}

fn integrate_impl<F: VectorField + ?Sized>(
    field: &F,
    z0: PhaseState,
    t0: f64,
    t1: f64,
    s: &IntegratorSettings,
    dense: bool,
) -> Result<Trajectory> {
    if !(t1 > t0) {
        return Err(Error::param("t1", format!("end time {t1} must exceed start time {t0}")));
    }
    if !z0.is_finite() {
        return Err(Error::IntegrationFailure {
            t: t0,
            reason: "non-finite initial state".into(),
        });
    }
    let mut knots = vec![t0];
    knots.extend(field.breakpoints(t0, t1));
    knots.push(t1);

    let mut traj = Trajectory {
        samples: vec![(t0, z0)],
        dense: Vec::new(),
        grid: Vec::new(),
    };
    let mut z = z0;
    let mut h_guess = None;
    for piece in knots.windows(2) {
        let (a, b) = (piece[0], piece[1]);
        if b - a <= 0.0 {
            continue;
        }
        let mut solver = dop853::Solver::new(field, (a, b), z, s, h_guess);
        while !solver.finished() {
            let accepted = solver.step()?;
            traj.samples.push((accepted.t + accepted.h, accepted.y_new));
            traj.grid.push(GridStep {
                t: accepted.t,
                h: accepted.h,
                piece: (a, b),
                branch: accepted.branch,
            });
            if dense {
                traj.dense.push(solver.dense_output(&accepted));
            }
        }
        z = solver.state();
        h_guess = Some(solver.last_h());
    }
    Ok(traj)
}

/// Re-runs the step sequence of `grid` from a different initial point. The
/// resulting map `z0 ↦ end` is smooth in `z0`, which makes finite differences
/// of it accurate to the truncation error.
pub fn replay<F: VectorField + ?Sized>(field: &F, z0: PhaseState, grid: &[GridStep]) -> PhaseState {
    let mut z = z0;
    let mut k1: Option<(f64, usize, PhaseState)> = None;
    for step in grid {
        let f0 = match k1 {
            Some((t, branch, k)) if t == step.t && branch == step.branch => k,
            _ => field.derivative_in(step.t, z, step.piece, step.branch),
        };
        let out = dop853::rk_stages(field, step.piece, step.branch, step.t, z, f0, step.h);
        z = out.y_new;
        let t_end = step.t + step.h;
        k1 = Some((t_end, step.branch, field.derivative_in(t_end, z, step.piece, step.branch)));
    }
    z
}

/// `φ^m(z0) = ζ(mβ, 0, z0)`.
pub fn poincare_map<F: VectorField + ?Sized>(
    field: &F,
    z0: PhaseState,
    m: u32,
    s: &IntegratorSettings,
) -> Result<PhaseState> {
    check_m(m)?;
    let t1 = m as f64 * field.period();
    Ok(integrate_sparse(field, z0, 0.0, t1, s)?.end())
}

/// Central finite-difference Jacobian of `φ^m` with the image point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoincareJacobian {
    pub image: PhaseState,
    /// `matrix[i][j] = ∂φ^m_i / ∂z_j`.
    pub matrix: [[f64; 2]; 2],
    pub det: f64,
}

/// Finite-difference step `1e-6 · max(1, ‖z0‖)`.
pub fn fd_step(z0: PhaseState) -> f64 {
    1e-6 * z0.norm().max(1.0)
}

/// Jacobian of `φ^m` at `z0` by central differences. The four perturbed
/// solutions reuse the step sequence of the base solution.
pub fn poincare_jacobian<F: VectorField + ?Sized>(
    field: &F,
    z0: PhaseState,
    m: u32,
    s: &IntegratorSettings,
) -> Result<PoincareJacobian> {
    check_m(m)?;
    let t1 = m as f64 * field.period();
    let base = integrate_sparse(field, z0, 0.0, t1, s)?;
    let grid = base.grid();
    let h = fd_step(z0);
    let ex = PhaseState::new(h, 0.0);
    let ey = PhaseState::new(0.0, h);
    let dx = (replay(field, z0 + ex, grid) - replay(field, z0 - ex, grid)) * (0.5 / h);
    let dy = (replay(field, z0 + ey, grid) - replay(field, z0 - ey, grid)) * (0.5 / h);
    let matrix = [[dx.x, dy.x], [dx.y, dy.y]];
    let det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
    if !det.is_finite() {
        return Err(Error::IntegrationFailure {
            t: t1,
            reason: "non-finite Jacobian".into(),
        });
    }
    Ok(PoincareJacobian {
        image: base.end(),
        matrix,
        det,
    })
}

fn check_m(m: u32) -> Result<()> {
    if m == 0 {
        Err(Error::param("m", "period multiple must be at least 1"))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Weight;

    struct Harmonic;
    impl VectorField for Harmonic {
        fn derivative(&self, _t: f64, z: PhaseState) -> PhaseState {
            PhaseState::new(z.y, -z.x)
        }
        fn period(&self) -> f64 {
            1.0
        }
    }

    struct Free;
    impl VectorField for Free {
        fn derivative(&self, _t: f64, z: PhaseState) -> PhaseState {
            PhaseState::new(z.y, 0.0)
        }
        fn period(&self) -> f64 {
            1.0
        }
    }

    fn constant_params() -> SystemParams {
        SystemParams::reference(Weight::constant(1.0, 20.0).unwrap())
    }

    #[test]
    fn rhs_examples() {
        let p = constant_params();
        let d = rhs(0.0, PhaseState::new(0.6, 0.0), &p);
        assert_eq!(d.x, 0.0);
        assert!((d.y - 0.06).abs() < 1e-15);
        let d = rhs(0.0, PhaseState::new(0.6, 0.3), &p);
        assert_eq!(d.x, 0.3);
        assert!((d.y - 0.06).abs() < 1e-15);
    }

    #[test]
    fn harmonic_oscillator_is_accurate() {
        let s = IntegratorSettings::default();
        let z0 = PhaseState::new(1.0, 0.0);
        let traj = integrate(&Harmonic, z0, 0.0, 10.0, &s).unwrap();
        let end = traj.end();
        assert!((end.x - 10f64.cos()).abs() < 1e-9);
        assert!((end.y + 10f64.sin()).abs() < 1e-9);
        for i in 0..100 {
            let t = 0.1 * i as f64 + 0.037;
            let z = traj.eval(t);
            assert!((z.x - t.cos()).abs() < 1e-9, "dense output off at t = {t}");
        }
        let stamps: Vec<f64> = traj.samples().iter().map(|s| s.0).collect();
        assert!(stamps.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn free_particle_jacobian_is_shear() {
        let s = IntegratorSettings::default();
        for m in 1..=3 {
            let j = poincare_jacobian(&Free, PhaseState::new(0.3, -0.2), m, &s).unwrap();
            assert!((j.matrix[0][0] - 1.0).abs() < 1e-8);
            assert!((j.matrix[0][1] - m as f64).abs() < 1e-8);
            assert!(j.matrix[1][0].abs() < 1e-8);
            assert!((j.matrix[1][1] - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn steps_do_not_straddle_breakpoints() {
        let p = SystemParams::reference(Weight::two_level(1.0, 0.8, 20.0, 1.0).unwrap());
        let traj = integrate(&p, PhaseState::new(0.5, 0.1), 0.0, 2.0, &IntegratorSettings::default()).unwrap();
        for step in traj.grid() {
            for b in [0.8, 1.0, 1.8] {
                assert!(!(step.t < b - 1e-14 && step.t + step.h > b + 1e-14));
            }
        }
        let times: Vec<f64> = traj.samples().iter().map(|s| s.0).collect();
        for b in [0.8, 1.0, 1.8] {
            assert!(times.iter().any(|&t| (t - b).abs() < 1e-14));
        }
    }

    #[test]
    fn steps_end_on_the_kinks_of_f0() {
        // runs left through x = 1 and then through x = 0
        let p = constant_params();
        let traj = integrate_sparse(&p, PhaseState::new(1.2, -3.0), 0.0, 1.0, &IntegratorSettings::default()).unwrap();
        let xs: Vec<f64> = traj.samples().iter().map(|s| s.1.x).collect();
        for level in ModifiedNonlinearity::KINKS {
            // a step may start or end a hair off the seam
            let crossings = xs
                .windows(2)
                .filter(|w| w.iter().all(|x| (x - level).abs() > 1e-9) && (w[0] - level) * (w[1] - level) < 0.0)
                .count();
            let landings = xs.iter().filter(|&&x| (x - level).abs() < 1e-9).count();
            assert_eq!(crossings, 0, "a step jumped over x = {level}");
            assert!(landings > 0, "never reached x = {level}");
        }
    }

    #[test]
    fn junction_onset_is_resolved() {
        let p = constant_params();
        let traj = integrate_sparse(&p, PhaseState::new(1.0, 0.8), 0.0, 1.0, &IntegratorSettings::default()).unwrap();
        for w in traj.samples().windows(2) {
            let (a, b) = (w[0].1.x, w[1].1.x);
            assert!((b - a).abs() <= 4.0 * ModifiedNonlinearity::feature_scale(a, b) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn equilibrium_stays_put() {
        // g x = n F(x) at x = 0 for any weight
        let p = SystemParams::reference(Weight::two_level(1.0, 0.8, 20.0, 1.0).unwrap());
        let z = poincare_map(&p, PhaseState::ORIGIN, 3, &IntegratorSettings::default()).unwrap();
        assert_eq!(z, PhaseState::ORIGIN);
    }

    #[test]
    fn reversed_field_runs_backward() {
        let s = IntegratorSettings::default();
        let p = SystemParams::reference(Weight::two_level(1.0, 0.8, 20.0, 1.0).unwrap());
        let z0 = PhaseState::new(0.55, 0.05);
        let forward = integrate(&p, z0, 0.0, 1.7, &s).unwrap().end();
        // backward from 1.7 to 0 is forward in s = -t from -1.7 to 0
        let back = integrate(&Reversed(&p), forward, -1.7, 0.0, &s).unwrap().end();
        assert!(back.dist(z0) < 1e-8);
    }

    #[test]
    fn crossing_detection_on_harmonic() {
        let traj = integrate(&Harmonic, PhaseState::new(1.0, 0.0), 0.0, 7.0, &IntegratorSettings::default()).unwrap();
        // y = -sin t crosses zero upward at π
        let up = traj.crossings(|_, z| z.y, false);
        assert_eq!(up.len(), 1);
        assert!((up[0] - std::f64::consts::PI).abs() < 1e-10);
        let down = traj.crossings(|_, z| z.y, true);
        assert_eq!(down.len(), 1);
        assert!((down[0] - 2.0 * std::f64::consts::PI).abs() < 1e-10);
    }

    #[test]
    fn settings_validation() {
        assert!(IntegratorSettings::new(0.1, 1e-12, 0.1).is_err());
        assert!(IntegratorSettings::new(1e-8, 0.0, 0.1).is_err());
        assert!(IntegratorSettings::new(1e-8, 1e-10, 0.0).is_err());
        assert!(IntegratorSettings::new(1e-8, 1e-10, 0.5).is_ok());
    }

    #[test]
    fn rejects_bad_interval_and_m() {
        let s = IntegratorSettings::default();
        assert!(integrate(&Harmonic, PhaseState::ORIGIN, 1.0, 1.0, &s).is_err());
        assert!(poincare_map(&Harmonic, PhaseState::ORIGIN, 0, &s).is_err());
    }
}
