//! The autonomous comparison system `x' = y, y' = g x - n̄ F0(x)`: its center
//! `(a_n̄, 0)`, the convexity band `[a, b]`, closed energy level curves around
//! the center and their periods.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::flow::{self, IntegratorSettings, PhaseState, VectorField};
use crate::model::{ModifiedNonlinearity, SystemParams};
use crate::numeric::{adaptive_integrate, bisect, golden_max, GaussLegendre};
use crate::{Error, Result};

const PRIMITIVE_CELLS: usize = 4096;
const SCAN_POINTS: usize = 4096;

/// Cached `𝓕0(x) = ∫₀ˣ F0`: cumulative 8-point Gauss–Legendre sums on a
/// uniform grid over `[0, 1]`, plus a partial-cell rule for the remainder.
#[derive(Debug)]
struct Primitive {
    cumulative: Vec<f64>,
    rule: GaussLegendre,
}

impl Primitive {
    fn new(f0: &ModifiedNonlinearity) -> Self {
        let rule = GaussLegendre::new(8);
        let h = 1.0 / PRIMITIVE_CELLS as f64;
        let mut cumulative = Vec::with_capacity(PRIMITIVE_CELLS + 1);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for i in 0..PRIMITIVE_CELLS {
            let lo = i as f64 * h;
            acc += rule.integrate(lo, lo + h, |s| f0.eval(s));
            cumulative.push(acc);
        }
        Primitive { cumulative, rule }
    }

    fn eval(&self, f0: &ModifiedNonlinearity, x: f64) -> f64 {
        if x < 0.0 {
            -adaptive_integrate(&|s| f0.eval(s), x, 0.0, 1e-15)
        } else if x > 1.0 {
            self.cumulative[PRIMITIVE_CELLS] + adaptive_integrate(&|s| f0.eval(s), 1.0, x, 1e-15)
        } else {
            let pos = x * PRIMITIVE_CELLS as f64;
            let i = (pos.floor() as usize).min(PRIMITIVE_CELLS - 1);
            let lo = i as f64 / PRIMITIVE_CELLS as f64;
            self.cumulative[i] + self.rule.integrate(lo, x, |s| f0.eval(s))
        }
    }
}

/// `v'' - g v + n̄ F0(v) = 0` as a conservative planar system.
#[derive(Clone, Debug)]
pub struct AutonomousSystem {
    g: f64,
    nbar: f64,
    f0: ModifiedNonlinearity,
    primitive: Arc<Primitive>,
    gap_rule: Arc<GaussLegendre>,
}

impl AutonomousSystem {
    pub fn new(g: f64, nbar: f64, f0: ModifiedNonlinearity) -> Result<Self> {
        if !(g > 0.0) {
            return Err(Error::param("g", format!("g = {g} must be positive")));
        }
        if !(nbar > 0.0 && nbar.is_finite()) {
            return Err(Error::param("nbar", format!("n̄ = {nbar} must be positive")));
        }
        let primitive = Arc::new(Primitive::new(&f0));
        Ok(AutonomousSystem {
            g,
            nbar,
            f0,
            primitive,
            gap_rule: Arc::new(GaussLegendre::new(16)),
        })
    }

    /// Comparison system for `p`, using the weight's current `n̄`.
    pub fn from_params(p: &SystemParams) -> Result<Self> {
        Self::new(p.g, p.weight.nbar(), p.nonlinearity.clone())
    }

    /// Same `g` and `F0` with another `n̄`; reuses the cached primitive.
    pub fn with_nbar(&self, nbar: f64) -> Result<Self> {
        if !(nbar > 0.0 && nbar.is_finite()) {
            return Err(Error::param("nbar", format!("n̄ = {nbar} must be positive")));
        }
        Ok(AutonomousSystem { nbar, ..self.clone() })
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn nbar(&self) -> f64 {
        self.nbar
    }

    pub fn nonlinearity(&self) -> &ModifiedNonlinearity {
        &self.f0
    }

    /// `𝓕0(x)` from the cached grid.
    pub fn primitive(&self, x: f64) -> f64 {
        self.primitive.eval(&self.f0, x)
    }

    /// `E(x, 0) = -g x²/2 + n̄ 𝓕0(x)`.
    pub fn potential(&self, x: f64) -> f64 {
        -0.5 * self.g * x * x + self.nbar * self.primitive(x)
    }

    /// `∂E/∂x (x, 0) = -g x + n̄ F0(x)`.
    pub fn potential_slope(&self, x: f64) -> f64 {
        -self.g * x + self.nbar * self.f0.eval(x)
    }

    /// `E(v, 0) - E(u, 0)` integrated directly, free of cancellation when
    /// `u` and `v` are close.
    pub fn potential_gap(&self, u: f64, v: f64) -> f64 {
        self.gap_rule.integrate(u, v, |x| self.potential_slope(x))
    }

    /// Average of `∂E/∂x` over `[end - w, end]`, stable as `w → 0`.
    fn mean_slope(&self, end: f64, w: f64) -> f64 {
        self.gap_rule.integrate(0.0, 1.0, |s| self.potential_slope(end - w * s))
    }
}

impl VectorField for AutonomousSystem {
    fn derivative(&self, _t: f64, z: PhaseState) -> PhaseState {
        PhaseState::new(z.y, self.g * z.x - self.nbar * self.f0.eval(z.x))
    }

    fn derivative_in(&self, _t: f64, z: PhaseState, _piece: (f64, f64), branch: usize) -> PhaseState {
        PhaseState::new(z.y, self.g * z.x - self.nbar * self.f0.eval_branch(z.x, branch))
    }

    /// The field does not depend on time; a unit period is reported so the
    /// generic flow routines can be used.
    fn period(&self) -> f64 {
        1.0
    }

    fn switching_levels(&self) -> &[f64] {
        &ModifiedNonlinearity::KINKS
    }

    fn feature_scale(&self, x0: f64, x1: f64) -> f64 {
        ModifiedNonlinearity::feature_scale(x0, x1)
    }
}

/// `E_n̄(x, y) = y²/2 - g x²/2 + n̄ 𝓕0(x)`.
pub fn energy(z: PhaseState, sys: &AutonomousSystem) -> f64 {
    0.5 * z.y * z.y + sys.potential(z.x)
}

/// The center `a_n̄ ∈ ]a, 1[` solving `g s = n̄ F0(s)`: the first sign change
/// of `g s - n̄ F0(s)` to the right of `a`, refined by bisection.
pub fn equilibrium(sys: &AutonomousSystem) -> Result<f64> {
    let a = sys.f0.a();
    let phi = |s: f64| sys.g * s - sys.nbar * sys.f0.eval(s);
    let h = (1.0 - a) / SCAN_POINTS as f64;
    let mut prev = a;
    for i in 1..SCAN_POINTS {
        let s = a + i as f64 * h;
        if phi(s) < 0.0 {
            return bisect(phi, prev, s, 1e-15).ok_or(Error::NoEquilibrium { nbar: sys.nbar });
        }
        prev = s;
    }
    // the dip may be narrower than the scan grid when n̄ sits just above the
    // threshold; look at the minimum directly
    let (s_min, neg) = golden_max(|s| -phi(s), a, 1.0, 1e-14);
    if neg > 0.0 {
        return bisect(phi, a, s_min, 1e-15).ok_or(Error::NoEquilibrium { nbar: sys.nbar });
    }
    Err(Error::NoEquilibrium { nbar: sys.nbar })
}

/// Interval `[a, b]` on which `F0' ≥ d0 > 0`, with `μ0 = g / d0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Band {
    pub a: f64,
    pub b: f64,
    pub d0: f64,
    pub mu0: f64,
    /// Smallest `n̄` for which `a < a_n̄ < b` also holds: `max(μ0, g b / F0(b))`.
    pub nbar_threshold: f64,
}

impl Band {
    /// `2π / √(n̄ d0 - g)`, the period bound for level curves inside the band.
    pub fn period_bound(&self, g: f64, nbar: f64) -> f64 {
        period_bound(nbar, self.d0, g)
    }
}

pub fn period_bound(nbar: f64, d0: f64, g: f64) -> f64 {
    2.0 * PI / (nbar * d0 - g).sqrt()
}

/// Picks `b` as the point where `F0'` first falls to `F0'(a)/2`, `d0` as the
/// minimum of `F0'` on `[a, b]`, and checks `a < a_n̄ < b` when `n̄ > μ0`.
pub fn choose_band(sys: &AutonomousSystem) -> Result<Band> {
    let f0 = &sys.f0;
    let a = f0.a();
    let slope_a = f0.deriv(a);
    if !(slope_a > 0.0) {
        return Err(Error::HypothesisViolation(format!("F'(a) = {slope_a} must be positive")));
    }
    let half = 0.5 * slope_a;
    let h = (1.0 - a) / SCAN_POINTS as f64;
    let mut b = a + (SCAN_POINTS - 1) as f64 * h;
    for i in 1..SCAN_POINTS {
        let s = a + i as f64 * h;
        if f0.deriv(s) < half {
            let prev = s - h;
            b = bisect(|x| f0.deriv(x) - half, prev, s, 1e-15).unwrap_or(prev);
            break;
        }
    }
    let d0 = min_on(|x| f0.deriv(x), a, b);
    let mu0 = sys.g / d0;
    let nbar_threshold = mu0.max(sys.g * b / f0.eval(b));
    let band = Band {
        a,
        b,
        d0,
        mu0,
        nbar_threshold,
    };
    if sys.nbar > mu0 {
        let a_n = equilibrium(sys).map_err(|_| {
            Error::HypothesisViolation(format!(
                "n̄ = {} has no center in ]a, b[; need n̄ > {nbar_threshold}",
                sys.nbar
            ))
        })?;
        if !(a_n > a && a_n < b) {
            return Err(Error::HypothesisViolation(format!(
                "a_n̄ = {a_n} outside ]{a}, {b}[; need n̄ > {nbar_threshold}"
            )));
        }
    }
    Ok(band)
}

fn min_on<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> f64 {
    let n = 2048;
    let h = (hi - lo) / n as f64;
    let mut best = (lo, f(lo));
    for i in 1..=n {
        let x = lo + i as f64 * h;
        let v = f(x);
        if v < best.1 {
            best = (x, v);
        }
    }
    let (_, neg) = golden_max(|x| -f(x), (best.0 - h).max(lo), (best.0 + h).min(hi), 1e-12);
    best.1.min(-neg)
}

/// How the level `c` of the inner curve is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LevelRule {
    /// `c = min{E(a, 0), E(b, 0)}`.
    MaxAllowed,
    /// `c = E(a_n̄, 0) + λ (min{E(a,0), E(b,0)} - E(a_n̄, 0))`, `λ ∈ ]0, 1]`.
    Fraction(f64),
}

/// Closed level set `Γ = {E = c}` around `(a_n̄, 0)`, star-shaped about the
/// center.
#[derive(Clone, Debug)]
pub struct LevelCurve {
    pub nbar: f64,
    pub c: f64,
    pub a_nbar: f64,
    pub b_minus: f64,
    pub b_plus: f64,
    /// `c - E(a_n̄, 0)`.
    pub depth: f64,
    /// Points of `Γ` at equally spaced polar angles about the center,
    /// counter-clockwise from the positive `x` direction.
    pub boundary: Vec<PhaseState>,
    sys: AutonomousSystem,
}

const BOUNDARY_POINTS: usize = 512;

/// Builds `Γ` for `n̄ > μ0` with level chosen by `rule`.
pub fn level_curve(sys: &AutonomousSystem, band: &Band, rule: LevelRule) -> Result<LevelCurve> {
    if !(sys.nbar > band.nbar_threshold) {
        return Err(Error::HypothesisViolation(format!(
            "n̄ = {} must exceed {} (μ0 = {})",
            sys.nbar, band.nbar_threshold, band.mu0
        )));
    }
    let a_nbar = equilibrium(sys)?;
    let e_min = sys.potential(a_nbar);
    let max_depth = sys.potential_gap(a_nbar, band.a).min(sys.potential_gap(a_nbar, band.b));
    let depth = match rule {
        LevelRule::MaxAllowed => max_depth,
        LevelRule::Fraction(lambda) => lambda * max_depth,
    };
    let c = e_min + depth;
    if !(depth > 0.0 && depth <= max_depth) {
        return Err(Error::InvalidLevel {
            c,
            lower: e_min,
            upper: e_min + max_depth,
        });
    }
    let gap = |x: f64| sys.potential_gap(a_nbar, x) - depth;
    let b_minus = if sys.potential_gap(a_nbar, band.a) == depth {
        band.a
    } else {
        bisect(gap, band.a, a_nbar, 1e-16).expect("E(·,0) - c changes sign on [a, a_n̄]")
    };
    let b_plus = if sys.potential_gap(a_nbar, band.b) == depth {
        band.b
    } else {
        bisect(gap, a_nbar, band.b, 1e-16).expect("E(·,0) - c changes sign on [a_n̄, b]")
    };
    let mut lc = LevelCurve {
        nbar: sys.nbar,
        c,
        a_nbar,
        b_minus,
        b_plus,
        depth,
        boundary: Vec::new(),
        sys: sys.clone(),
    };
    lc.boundary = (0..BOUNDARY_POINTS)
        .map(|j| lc.point_at(2.0 * PI * j as f64 / BOUNDARY_POINTS as f64))
        .collect();
    Ok(lc)
}

impl LevelCurve {
    pub fn center(&self) -> PhaseState {
        PhaseState::new(self.a_nbar, 0.0)
    }

    pub fn system(&self) -> &AutonomousSystem {
        &self.sys
    }

    /// Distance from the center to `Γ` along the ray at polar angle `theta`.
    /// Energy increases strictly along every such ray inside the band, so the
    /// crossing is unique.
    pub fn radius_at(&self, theta: f64) -> f64 {
        let (sin, cos) = theta.sin_cos();
        let excess = |r: f64| {
            0.5 * (r * sin).powi(2) + self.sys.potential_gap(self.a_nbar, self.a_nbar + r * cos) - self.depth
        };
        let r_max = (self.b_plus - self.a_nbar)
            .max(self.a_nbar - self.b_minus)
            .hypot((2.0 * self.depth).sqrt());
        bisect(excess, 0.0, r_max * (1.0 + 1e-9), 1e-16).unwrap_or(r_max)
    }

    pub fn point_at(&self, theta: f64) -> PhaseState {
        let r = self.radius_at(theta);
        PhaseState::new(self.a_nbar + r * theta.cos(), r * theta.sin())
    }

    /// `n` points of `Γ` at equally spaced angles.
    pub fn sample(&self, n: usize) -> Vec<PhaseState> {
        (0..n).map(|j| self.point_at(2.0 * PI * j as f64 / n as f64)).collect()
    }

    /// True when `z` lies in the open region bounded by `Γ`.
    pub fn encloses(&self, z: PhaseState) -> bool {
        let d = z - self.center();
        let rho = d.norm();
        rho < self.radius_at(d.y.atan2(d.x))
    }
}

const TIME_MAP_START: usize = 128;
const TIME_MAP_MAX: usize = 8192;

/// Period `τ_n̄` of `Γ` from the time-map integrals on each side of `a_n̄`.
///
/// Each branch is mapped by `u = a_n̄ ± L sin φ`, and the inverse square-root
/// endpoint singularity is cancelled analytically rather than numerically; the
/// rule size doubles from 128 nodes until successive estimates agree to 1e-9.
pub fn time_map(sys: &AutonomousSystem, lc: &LevelCurve) -> Result<f64> {
    let mut n = TIME_MAP_START;
    let mut prev = time_map_with(sys, lc, n);
    loop {
        n *= 2;
        let next = time_map_with(sys, lc, n);
        let change = (next - prev).abs();
        if change < 1e-9 {
            return Ok(next);
        }
        if n >= TIME_MAP_MAX || !next.is_finite() {
            return Err(Error::QuadratureNonConvergence { estimate: next, change });
        }
        prev = next;
    }
}

fn time_map_with(sys: &AutonomousSystem, lc: &LevelCurve, nodes: usize) -> f64 {
    let rule = GaussLegendre::new(nodes);
    let branch = |end: f64| {
        let len = end - lc.a_nbar;
        rule.integrate(0.0, 0.5 * PI, |phi| {
            // with ψ = π/4 - φ/2 the distance to the turning point is
            // w = 2 L sin²ψ and cos φ = 2 sin ψ cos ψ, so the sin ψ factors
            // cancel against √(E(end) - E(u)) = √(w · mean slope)
            let psi = 0.25 * PI - 0.5 * phi;
            let w = 2.0 * len * psi.sin().powi(2);
            let slope = sys.mean_slope(end, w) * len.signum();
            (2.0 * len.abs()).sqrt() * psi.cos() / slope.sqrt()
        })
    };
    2f64.sqrt() * (branch(lc.b_minus) + branch(lc.b_plus))
}

/// Time for the autonomous flow started at `(b⁺, 0)` to come back to the
/// positive `x` side of the center with `y` crossing zero downward.
pub fn first_return_time(sys: &AutonomousSystem, lc: &LevelCurve, s: &IntegratorSettings) -> Result<f64> {
    let z0 = PhaseState::new(lc.b_plus, 0.0);
    let slope = sys.potential_slope(lc.a_nbar + 1e-3 * (lc.b_plus - lc.a_nbar)).max(1e-12);
    let linear_period = 2.0 * PI / (slope / (1e-3 * (lc.b_plus - lc.a_nbar))).sqrt();
    let mut horizon = 2.0 * linear_period.max(1e-3);
    for _ in 0..20 {
        let traj = flow::integrate(sys, z0, 0.0, horizon, s)?;
        let center = lc.a_nbar;
        if let Some(&t) = traj
            .crossings(|_, z| if z.x > center { z.y } else { -1.0 }, true)
            .first()
        {
            return Ok(t);
        }
        horizon *= 2.0;
    }
    Err(Error::IntegrationFailure {
        t: horizon,
        reason: "no return to the starting half-line".into(),
    })
}

/// `⌊mβ / τ⌋`.
pub fn rotation_floor(tau: f64, m: u32, beta: f64) -> u64 {
    (m as f64 * beta / tau).floor() as u64
}

/// Lower bound `⌊mβ / τ_n̄⌋` on the autonomous rotation number along `Γ`.
pub fn rot_floor(sys: &AutonomousSystem, lc: &LevelCurve, m: u32, beta: f64) -> Result<u64> {
    Ok(rotation_floor(time_map(sys, lc)?, m, beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Nonlinearity;

    fn reference(nbar: f64) -> AutonomousSystem {
        let f0 = ModifiedNonlinearity::with_default_k0(Nonlinearity::cubic(0.6).unwrap()).unwrap();
        AutonomousSystem::new(0.1, nbar, f0).unwrap()
    }

    /// Root of (1 - s)(s - 0.6) = q nearest to 0.6, from the quadratic formula.
    fn equilibrium_oracle(g: f64, nbar: f64) -> f64 {
        let q = g / nbar;
        (1.6 - (0.16 - 4.0 * q).sqrt()) / 2.0
    }

    #[test]
    fn energy_symmetry_and_origin() {
        let sys = reference(20.0);
        assert_eq!(energy(PhaseState::ORIGIN, &sys), 0.0);
        for &(x, y) in &[(0.3, 0.2), (0.7, -1.1), (-0.4, 0.5), (1.6, 2.0)] {
            let e1 = energy(PhaseState::new(x, y), &sys);
            let e2 = energy(PhaseState::new(x, -y), &sys);
            assert_eq!(e1, e2);
        }
    }

    #[test]
    fn cached_primitive_matches_exact_antiderivative() {
        let sys = reference(20.0);
        let base = sys.nonlinearity().base().clone();
        for i in 0..=200 {
            let x = i as f64 / 200.0;
            let exact = base.antiderivative(x).unwrap();
            assert!((sys.primitive(x) - exact).abs() < 1e-15, "x = {x}");
        }
        // outside [0,1] the primitive keeps F0's sign: increasing left of 0 going left means negative
        assert!(sys.primitive(-1.0) < 0.0);
    }

    #[test]
    fn equilibrium_matches_quadratic_oracle() {
        let sys = reference(20.0);
        let a20 = equilibrium(&sys).unwrap();
        let oracle = equilibrium_oracle(0.1, 20.0);
        assert!((a20 - oracle).abs() < 1e-12);
        assert!((a20 - 0.612917).abs() < 1e-6);
        let a200 = equilibrium(&reference(200.0)).unwrap();
        assert!(a200 > 0.6 && a200 - 0.6 < a20 - 0.6);
    }

    #[test]
    fn no_equilibrium_for_small_nbar() {
        // max of (1-s)(s-0.6) is 0.04, so n̄ < 2.5 has no intersection
        assert!(matches!(
            equilibrium(&reference(2.0)),
            Err(Error::NoEquilibrium { .. })
        ));
        assert!(equilibrium(&reference(2.6)).is_ok());
    }

    #[test]
    fn band_for_reference_cubic() {
        let sys = reference(20.0);
        let band = choose_band(&sys).unwrap();
        assert!((sys.nonlinearity().deriv(0.6) - 0.24).abs() < 1e-15);
        // oracle: root of -3s^2 + 3.2s - 0.6 = 0.12 on ]0.6, 1[
        let b_oracle = (3.2 + 1.6f64.sqrt()) / 6.0;
        assert!((band.b - b_oracle).abs() < 1e-12);
        assert!((band.d0 - 0.12).abs() < 1e-10);
        assert!((band.mu0 - 0.1 / 0.12).abs() < 1e-8);
    }

    #[test]
    fn band_rejects_degenerate_slope() {
        let f = Nonlinearity::new(0.5, |s| s * (1.0 - s) * (s - 0.5).powi(3), |s| {
            let u = s - 0.5;
            (1.0 - 2.0 * s) * u.powi(3) + 3.0 * s * (1.0 - s) * u * u
        })
        .unwrap();
        let f0 = ModifiedNonlinearity::with_default_k0(f).unwrap();
        let sys = AutonomousSystem::new(0.1, 20.0, f0).unwrap();
        assert!(matches!(choose_band(&sys), Err(Error::HypothesisViolation(_))));
    }

    #[test]
    fn level_curve_properties() {
        let sys = reference(20.0);
        let band = choose_band(&sys).unwrap();
        let lc = level_curve(&sys, &band, LevelRule::MaxAllowed).unwrap();
        assert!(lc.b_minus < lc.a_nbar && lc.a_nbar < lc.b_plus);
        assert!((sys.potential(lc.b_minus) - lc.c).abs() < 1e-12);
        assert!((sys.potential(lc.b_plus) - lc.c).abs() < 1e-12);
        for z in &lc.boundary {
            assert!((energy(*z, &sys) - lc.c).abs() < 1e-10);
        }
        // polar angle about the center strictly increases along the boundary
        let angles: Vec<f64> = lc
            .boundary
            .iter()
            .map(|z| (z.y).atan2(z.x - lc.a_nbar).rem_euclid(2.0 * PI))
            .collect();
        assert!(angles.windows(2).all(|w| w[1] > w[0]));
        assert!(lc.encloses(lc.center()));
        assert!(!lc.encloses(PhaseState::new(lc.b_plus + 1e-6, 0.0)));
    }

    #[test]
    fn level_rules_and_errors() {
        let sys = reference(20.0);
        let band = choose_band(&sys).unwrap();
        let full = level_curve(&sys, &band, LevelRule::MaxAllowed).unwrap();
        let half = level_curve(&sys, &band, LevelRule::Fraction(0.5)).unwrap();
        assert!(half.c < full.c);
        assert!((half.depth - 0.5 * full.depth).abs() < 1e-15);
        assert!(matches!(
            level_curve(&sys, &band, LevelRule::Fraction(1.5)),
            Err(Error::InvalidLevel { .. })
        ));
        assert!(matches!(
            level_curve(&sys, &band, LevelRule::Fraction(0.0)),
            Err(Error::InvalidLevel { .. })
        ));
        let weak = reference(0.5);
        assert!(level_curve(&weak, &band, LevelRule::MaxAllowed).is_err());
    }

    #[test]
    fn time_map_respects_bound_and_flow() {
        let s = IntegratorSettings::default();
        for &nbar in &[20.0, 80.0] {
            let sys = reference(nbar);
            let band = choose_band(&sys).unwrap();
            let lc = level_curve(&sys, &band, LevelRule::MaxAllowed).unwrap();
            let tau = time_map(&sys, &lc).unwrap();
            assert!(tau <= band.period_bound(0.1, nbar));
            let ret = first_return_time(&sys, &lc, &s).unwrap();
            assert!((tau - ret).abs() < 1e-6, "n̄ = {nbar}: {tau} vs {ret}");
        }
    }

    #[test]
    fn bound_example_value() {
        assert!((period_bound(20.0, 0.12, 0.1) - 2.0 * PI / 2.3f64.sqrt()).abs() < 1e-12);
        assert!((period_bound(20.0, 0.12, 0.1) - 4.143).abs() < 1e-3);
    }

    #[test]
    fn rotation_floor_values() {
        assert_eq!(rotation_floor(4.0, 1, 1.0), 0);
        assert_eq!(rotation_floor(0.3, 1, 1.0), 3);
        assert_eq!(rotation_floor(0.3, 2, 1.5), 10);
    }
}
