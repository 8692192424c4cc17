//! The nonlinearity `F`, its bounded modification `F0` outside `[0, 1]`, and
//! β-periodic weights with the splitting `n = n̄ + ñ`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::numeric::sampled_max;
use crate::{Error, Result};

/// Middle zero used by the reference experiments.
pub const DEFAULT_A: f64 = 0.6;
/// Decay constant used by the reference experiments.
pub const DEFAULT_G: f64 = 0.1;
/// Weight period used when none is given.
pub const DEFAULT_BETA: f64 = 1.0;

const SIGN_GRID: usize = 512;
const ZERO_TOL: f64 = 1e-12;
const EXTREMUM_TOL: f64 = 1e-10;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A nonlinearity with zeros `0 < a < 1`, negative on `]0, a[` and positive on
/// `]a, 1[`.
#[derive(Clone)]
pub struct Nonlinearity {
    a: f64,
    eval: ScalarFn,
    deriv: ScalarFn,
    antiderivative: Option<ScalarFn>,
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Nonlinearity")
            .field("a", &self.a)
            .field("exact_antiderivative", &self.antiderivative.is_some())
            .finish()
    }
}

impl Nonlinearity {
    /// Wraps user-supplied `F` and `F'`, checking the zeros and the sign
    /// pattern on a sampling grid.
    pub fn new<E, D>(a: f64, eval: E, deriv: D) -> Result<Self>
    where
        E: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::InvalidNonlinearity(format!("middle zero a = {a} not in ]0,1[")));
        }
        let f = Nonlinearity {
            a,
            eval: Arc::new(eval),
            deriv: Arc::new(deriv),
            antiderivative: None,
        };
        f.check_invariants()?;
        Ok(f)
    }

    /// `F(s) = s (1 - s) (s - a)` with its exact antiderivative attached.
    pub fn cubic(a: f64) -> Result<Self> {
        let f = Nonlinearity::new(
            a,
            move |s| s * (1.0 - s) * (s - a),
            move |s| -3.0 * s * s + 2.0 * (1.0 + a) * s - a,
        )?;
        Ok(f.with_antiderivative(move |s| {
            let s2 = s * s;
            -s2 * s2 / 4.0 + (1.0 + a) * s2 * s / 3.0 - a * s2 / 2.0
        }))
    }

    /// Attaches a closed-form `∫₀ˢ F`, used to cross-check the cached primitive.
    pub fn with_antiderivative<P>(mut self, p: P) -> Self
    where
        P: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.antiderivative = Some(Arc::new(p));
        self
    }

    fn check_invariants(&self) -> Result<()> {
        let scale = (1..SIGN_GRID)
            .map(|i| self.eval(i as f64 / SIGN_GRID as f64).abs())
            .fold(0.0, f64::max)
            .max(1e-300);
        for (label, s) in [("0", 0.0), ("a", self.a), ("1", 1.0)] {
            let v = self.eval(s);
            if !v.is_finite() || v.abs() > ZERO_TOL * scale.max(1.0) {
                return Err(Error::InvalidNonlinearity(format!("F({label}) = {v} is not zero")));
            }
        }
        for i in 1..SIGN_GRID {
            let frac = i as f64 / SIGN_GRID as f64;
            let left = frac * self.a;
            let right = self.a + frac * (1.0 - self.a);
            if !(self.eval(left) < 0.0) {
                return Err(Error::InvalidNonlinearity(format!(
                    "F({left}) = {} must be negative on ]0,a[",
                    self.eval(left)
                )));
            }
            if !(self.eval(right) > 0.0) {
                return Err(Error::InvalidNonlinearity(format!(
                    "F({right}) = {} must be positive on ]a,1[",
                    self.eval(right)
                )));
            }
        }
        Ok(())
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn eval(&self, s: f64) -> f64 {
        (self.eval)(s)
    }

    pub fn deriv(&self, s: f64) -> f64 {
        (self.deriv)(s)
    }

    pub fn antiderivative(&self, s: f64) -> Option<f64> {
        self.antiderivative.as_ref().map(|p| p(s))
    }

    pub fn has_exact_antiderivative(&self) -> bool {
        self.antiderivative.is_some()
    }

    /// `c0 = max_{[0,1]} |F|` and where it is attained.
    pub fn max_abs(&self) -> (f64, f64) {
        let (s, v) = sampled_max(|s| self.eval(s).abs(), 0.0, 1.0, 4097, EXTREMUM_TOL);
        (v, s)
    }
}

/// Cutoff `δ(s) = max{0, min{s, 1}}`.
pub fn cutoff(s: f64) -> f64 {
    s.clamp(0.0, 1.0)
}

/// The smooth junction function: `exp(1/s)` left of 0, zero on `[0, 1]`,
/// `-exp(1/(1-s))` right of 1.
pub fn junction(s: f64) -> f64 {
    if s < 0.0 {
        (1.0 / s).exp()
    } else if s > 1.0 {
        -(1.0 / (1.0 - s)).exp()
    } else {
        0.0
    }
}

pub fn junction_deriv(s: f64) -> f64 {
    if s < 0.0 {
        -(1.0 / s).exp() / (s * s)
    } else if s > 1.0 {
        let u = 1.0 - s;
        -(1.0 / u).exp() / (u * u)
    } else {
        0.0
    }
}

/// `F0(s) = F(δ(s)) + k0 ℓ(s)`: equal to `F` on `[0, 1]`, bounded by `c0`,
/// positive for `s < 0` and negative for `s > 1`.
#[derive(Clone, Debug)]
pub struct ModifiedNonlinearity {
    base: Nonlinearity,
    k0: f64,
    c0: f64,
    c0_at: f64,
    lipschitz_l0: f64,
}

impl ModifiedNonlinearity {
    /// Builds `F0` with an explicit `k0 ∈ ]0, c0]`.
    pub fn new(base: Nonlinearity, k0: f64) -> Result<Self> {
        let (c0, c0_at) = base.max_abs();
        if !(k0 > 0.0) || k0 > c0 * (1.0 + 1e-12) {
            return Err(Error::param("k0", format!("k0 = {k0} must lie in ]0, c0 = {c0}]")));
        }
        let k0 = k0.min(c0);
        let mut f0 = ModifiedNonlinearity {
            base,
            k0,
            c0,
            c0_at,
            lipschitz_l0: 0.0,
        };
        f0.lipschitz_l0 = f0.sampled_lipschitz();
        Ok(f0)
    }

    /// Builds `F0` with the default `k0 = c0`.
    pub fn with_default_k0(base: Nonlinearity) -> Result<Self> {
        let (c0, _) = base.max_abs();
        Self::new(base, c0)
    }

    fn sampled_lipschitz(&self) -> f64 {
        // |ℓ'| peaks at s = -1/2 and s = 3/2; [-4, 5] covers both tails well
        // past the point where they fall below the interior slope.
        let inner = sampled_max(|s| self.base.deriv(s).abs(), 0.0, 1.0, 4097, EXTREMUM_TOL).1;
        let left = sampled_max(|s| self.k0 * junction_deriv(s).abs(), -4.0, -1e-3, 8193, EXTREMUM_TOL).1;
        let right = sampled_max(|s| self.k0 * junction_deriv(s).abs(), 1.0 + 1e-3, 5.0, 8193, EXTREMUM_TOL).1;
        inner.max(left).max(right)
    }

    pub fn base(&self) -> &Nonlinearity {
        &self.base
    }

    pub fn a(&self) -> f64 {
        self.base.a
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    /// Abscissa where `|F|` attains `c0`.
    pub fn c0_at(&self) -> f64 {
        self.c0_at
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz_l0
    }

    /// Points where the extension meets `F`: `F0` is continuous there but its
    /// derivative jumps.
    pub const KINKS: [f64; 2] = [0.0, 1.0];

    /// Distance past a seam below which `exp(-1/u)` is under `1e-16`.
    const JUNCTION_ONSET: f64 = 1.0 / 37.0;

    /// Length over which `F0` varies on the `x`-interval spanned by `x0` and
    /// `x1`. `F0` is a cubic on `[0, 1]`; past a seam at distance `u` the
    /// junction `exp(-1/u)` changes by a factor `e` over about `u²`.
    pub fn feature_scale(x0: f64, x1: f64) -> f64 {
        let (lo, hi) = if x0 <= x1 { (x0, x1) } else { (x1, x0) };
        let mut u = f64::INFINITY;
        if hi > 1.0 {
            u = u.min(lo.max(1.0) - 1.0);
        }
        if lo < 0.0 {
            u = u.min(-hi.min(0.0));
        }
        let u = u.max(Self::JUNCTION_ONSET);
        u * u
    }

    #[inline]
    pub fn eval(&self, s: f64) -> f64 {
        if (0.0..=1.0).contains(&s) {
            self.base.eval(s)
        } else {
            self.base.eval(cutoff(s)) + self.k0 * junction(s)
        }
    }

    /// The formula `F0` follows on branch `0`, `1` or `2` (left of 0, on
    /// `[0, 1]`, right of 1), continued past the seams: the inner branch by the
    /// tangent of `F` at the seam, the outer ones by their constant value there,
    /// which the flat junction joins to all orders. Agrees with [`Self::eval`]
    /// on the branch's own interval.
    #[inline]
    pub fn eval_branch(&self, s: f64, branch: usize) -> f64 {
        match branch {
            0 => self.base.eval(0.0) + self.k0 * junction(s.min(0.0)),
            1 if s < 0.0 => self.base.eval(0.0) + self.base.deriv(0.0) * s,
            1 if s > 1.0 => self.base.eval(1.0) + self.base.deriv(1.0) * (s - 1.0),
            1 => self.base.eval(s),
            _ => self.base.eval(1.0) + self.k0 * junction(s.max(1.0)),
        }
    }

    #[inline]
    pub fn deriv(&self, s: f64) -> f64 {
        if (0.0..=1.0).contains(&s) {
            self.base.deriv(s)
        } else {
            self.k0 * junction_deriv(s)
        }
    }
}

/// Shape of a weight over one period.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightProfile {
    /// `(t_end, value)` pairs: the value holds on `[t_prev, t_end[`.
    Piecewise(Vec<(f64, f64)>),
    /// `(t, value)` samples on `[0, β[`, linearly interpolated and wrapped.
    Sampled(Vec<(f64, f64)>),
}

/// Decomposition rule for `n = n̄ + ñ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SplitStrategy {
    Mean,
    PlateauValue,
    Explicit(f64),
}

impl fmt::Display for SplitStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SplitStrategy::Mean => f.write_str("mean"),
            SplitStrategy::PlateauValue => f.write_str("plateau-value"),
            SplitStrategy::Explicit(_) => f.write_str("explicit"),
        }
    }
}

impl FromStr for SplitStrategy {
    type Err = Error;

    /// Parses `mean`, `plateau-value` or `explicit(<nbar>)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "mean" => Ok(SplitStrategy::Mean),
            "plateau-value" | "plateau" => Ok(SplitStrategy::PlateauValue),
            _ => {
                let inner = s
                    .strip_prefix("explicit(")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| Error::config("split.strategy", format!("unknown strategy `{s}`")))?;
                let v: f64 = inner
                    .trim()
                    .parse()
                    .map_err(|_| Error::config("split.strategy", format!("bad n̄ in `{s}`")))?;
                Ok(SplitStrategy::Explicit(v))
            }
        }
    }
}

/// A positive β-periodic weight together with its splitting `n = n̄ + ñ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Weight {
    beta: f64,
    profile: WeightProfile,
    strategy: SplitStrategy,
    nbar: f64,
    ntilde_l1: f64,
}

impl Weight {
    pub fn constant(beta: f64, value: f64) -> Result<Self> {
        Self::piecewise(beta, vec![(beta, value)])
    }

    /// Piecewise-constant weight from `(t_end, value)` pairs; the last `t_end`
    /// must equal `beta`.
    pub fn piecewise(beta: f64, mut segments: Vec<(f64, f64)>) -> Result<Self> {
        check_beta(beta)?;
        if segments.is_empty() {
            return Err(Error::InvalidWeight("no segments".into()));
        }
        let mut prev = 0.0;
        for &(end, value) in &segments {
            if !(end > prev) || !end.is_finite() {
                return Err(Error::InvalidWeight(format!(
                    "segment ends must increase strictly from 0 (got {end} after {prev})"
                )));
            }
            check_positive(value)?;
            prev = end;
        }
        let last = segments.last_mut().expect("non-empty");
        if (last.0 - beta).abs() > 1e-12 * beta.max(1.0) {
            return Err(Error::InvalidWeight(format!(
                "last segment ends at {} but beta = {beta}",
                last.0
            )));
        }
        last.0 = beta;
        Weight::with_mean_split(beta, WeightProfile::Piecewise(segments))
    }

    /// Two-level profile: `n1` on `]0, alpha[`, `n0` on `]alpha, beta[`.
    pub fn two_level(beta: f64, alpha: f64, n1: f64, n0: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= beta) {
            return Err(Error::param("alpha", format!("alpha = {alpha} must lie in ]0, beta]")));
        }
        if alpha == beta {
            return Self::constant(beta, n1);
        }
        Self::piecewise(beta, vec![(alpha, n1), (beta, n0)])
    }

    /// Sampled weight with piecewise-linear periodic interpolation; sample
    /// times must start at 0 and stay below `beta`.
    pub fn sampled(beta: f64, samples: Vec<(f64, f64)>) -> Result<Self> {
        check_beta(beta)?;
        if samples.is_empty() {
            return Err(Error::InvalidWeight("no samples".into()));
        }
        if samples[0].0 != 0.0 {
            return Err(Error::InvalidWeight("first sample must be at t = 0".into()));
        }
        let mut prev = f64::NEG_INFINITY;
        for &(t, v) in &samples {
            if !(t > prev) || !(t < beta) {
                return Err(Error::InvalidWeight(format!(
                    "sample times must increase strictly within [0, beta[ (got {t})"
                )));
            }
            check_positive(v)?;
            prev = t;
        }
        Weight::with_mean_split(beta, WeightProfile::Sampled(samples))
    }

    fn with_mean_split(beta: f64, profile: WeightProfile) -> Result<Self> {
        let mut w = Weight {
            beta,
            profile,
            strategy: SplitStrategy::Mean,
            nbar: 0.0,
            ntilde_l1: 0.0,
        };
        w.nbar = w.mean();
        w.ntilde_l1 = w.deviation_l1(w.nbar);
        Ok(w)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn profile(&self) -> &WeightProfile {
        &self.profile
    }

    pub fn strategy(&self) -> SplitStrategy {
        self.strategy
    }

    /// Constant part `n̄`.
    pub fn nbar(&self) -> f64 {
        self.nbar
    }

    /// `|ñ|₁` over one period.
    pub fn ntilde_l1(&self) -> f64 {
        self.ntilde_l1
    }

    /// `|ñ|₁` over `[0, mβ]`.
    pub fn l1_norm_over(&self, m: u32) -> f64 {
        m as f64 * self.ntilde_l1
    }

    /// True when the weight does not depend on `t`.
    pub fn is_constant(&self) -> bool {
        match &self.profile {
            WeightProfile::Piecewise(s) => s.iter().all(|&(_, v)| v == s[0].1),
            WeightProfile::Sampled(s) => s.iter().all(|&(_, v)| v == s[0].1),
        }
    }

    /// `n(t)`, right-continuous at breakpoints.
    pub fn eval(&self, t: f64) -> f64 {
        let tau = t.rem_euclid(self.beta);
        match &self.profile {
            WeightProfile::Piecewise(segs) => {
                let i = segs.partition_point(|&(end, _)| end <= tau);
                segs[i.min(segs.len() - 1)].1
            }
            WeightProfile::Sampled(samples) => {
                let i = samples.partition_point(|&(ts, _)| ts <= tau);
                let (t0, v0) = samples[i - 1];
                let (t1, v1) = if i < samples.len() {
                    samples[i]
                } else {
                    (self.beta, samples[0].1)
                };
                v0 + (v1 - v0) * (tau - t0) / (t1 - t0)
            }
        }
    }

    /// `n` restricted to the smooth piece `[start, end]` that contains `t`:
    /// piecewise weights are constant there, so jumps at the piece ends are
    /// seen as one-sided limits.
    #[inline]
    pub fn eval_on_piece(&self, t: f64, start: f64, end: f64) -> f64 {
        match &self.profile {
            WeightProfile::Piecewise(segs) if segs.len() == 1 => segs[0].1,
            WeightProfile::Piecewise(_) => self.eval(0.5 * (start + end)),
            WeightProfile::Sampled(_) => self.eval(t),
        }
    }

    /// `ñ(t) = n(t) - n̄`.
    pub fn perturbation(&self, t: f64) -> f64 {
        self.eval(t) - self.nbar
    }

    /// Points in the open interval `]t0, t1[` where `n` is not smooth.
    pub fn breakpoints(&self, t0: f64, t1: f64) -> Vec<f64> {
        let mut out = Vec::new();
        if self.is_constant() || !(t1 > t0) {
            return out;
        }
        let local: Vec<f64> = match &self.profile {
            WeightProfile::Piecewise(segs) => {
                let mut v: Vec<f64> = segs.iter().map(|&(end, _)| end).collect();
                // the period boundary is a jump only when first and last values differ
                if segs[0].1 == segs[segs.len() - 1].1 {
                    v.pop();
                }
                v
            }
            WeightProfile::Sampled(samples) => samples.iter().map(|&(t, _)| t).collect(),
        };
        let first = (t0 / self.beta).floor() as i64 - 1;
        let last = (t1 / self.beta).ceil() as i64 + 1;
        for k in first..=last {
            let base = k as f64 * self.beta;
            for &lt in &local {
                let b = base + lt;
                if b > t0 && b < t1 {
                    out.push(b);
                }
            }
        }
        out.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
        out.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * a.abs().max(1.0));
        out
    }

    /// `(1/β) ∫₀^β n`, exact for both profile kinds.
    pub fn mean(&self) -> f64 {
        let total: f64 = match &self.profile {
            WeightProfile::Piecewise(segs) => {
                let mut prev = 0.0;
                segs.iter()
                    .map(|&(end, v)| {
                        let len = end - prev;
                        prev = end;
                        len * v
                    })
                    .sum()
            }
            WeightProfile::Sampled(_) => self.linear_pieces().map(|(t0, v0, t1, v1)| 0.5 * (v0 + v1) * (t1 - t0)).sum(),
        };
        total / self.beta
    }

    /// `∫₀^β |n - level|`, exact for both profile kinds.
    pub fn deviation_l1(&self, level: f64) -> f64 {
        match &self.profile {
            WeightProfile::Piecewise(segs) => {
                let mut prev = 0.0;
                segs.iter()
                    .map(|&(end, v)| {
                        let len = end - prev;
                        prev = end;
                        len * (v - level).abs()
                    })
                    .sum()
            }
            WeightProfile::Sampled(_) => self
                .linear_pieces()
                .map(|(t0, v0, t1, v1)| abs_linear_integral(v0 - level, v1 - level, t1 - t0))
                .sum(),
        }
    }

    fn linear_pieces(&self) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        let samples: &[(f64, f64)] = match &self.profile {
            WeightProfile::Sampled(s) => s,
            WeightProfile::Piecewise(_) => &[],
        };
        (0..samples.len()).map(move |i| {
            let (t0, v0) = samples[i];
            let (t1, v1) = samples.get(i + 1).copied().unwrap_or((self.beta, samples[0].1));
            (t0, v0, t1, v1)
        })
    }

    /// Value held on the longest constant stretch (adjacent equal segments
    /// merged, wrapping around the period).
    fn plateau_value(&self) -> Result<f64> {
        let segs = match &self.profile {
            WeightProfile::Piecewise(s) => s,
            WeightProfile::Sampled(_) => return Err(Error::UnsupportedStrategy("plateau-value")),
        };
        let mut runs: Vec<(f64, f64)> = Vec::new();
        let mut prev = 0.0;
        for &(end, v) in segs {
            match runs.last_mut() {
                Some(run) if run.1 == v => run.0 += end - prev,
                _ => runs.push((end - prev, v)),
            }
            prev = end;
        }
        if runs.len() > 1 && runs[0].1 == runs[runs.len() - 1].1 {
            let tail = runs.pop().expect("len > 1");
            runs[0].0 += tail.0;
        }
        let mut best = runs[0];
        for &run in &runs[1..] {
            if run.0 > best.0 {
                best = run;
            }
        }
        Ok(best.1)
    }

    /// Returns a copy with `n̄` chosen by `strategy` and `|ñ|₁` recomputed.
    pub fn split(&self, strategy: SplitStrategy) -> Result<Weight> {
        let nbar = match strategy {
            SplitStrategy::Mean => self.mean(),
            SplitStrategy::PlateauValue => self.plateau_value()?,
            SplitStrategy::Explicit(v) => {
                check_positive(v).map_err(|_| Error::param("split.nbar", format!("n̄ = {v} must be positive")))?;
                v
            }
        };
        Ok(Weight {
            beta: self.beta,
            profile: self.profile.clone(),
            strategy,
            nbar,
            ntilde_l1: self.deviation_l1(nbar),
        })
    }
}

/// `∫₀^len |u(s)| ds` for `u` linear from `u0` to `u1`.
fn abs_linear_integral(u0: f64, u1: f64, len: f64) -> f64 {
    if u0 * u1 >= 0.0 {
        0.5 * (u0.abs() + u1.abs()) * len
    } else {
        let frac = u0.abs() / (u0.abs() + u1.abs());
        0.5 * len * (u0.abs() * frac + u1.abs() * (1.0 - frac))
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::param("beta", format!("period beta = {beta} must be positive")))
    }
}

fn check_positive(v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidWeight(format!("weight value {v} must be positive")))
    }
}

/// `g`, the weight and `F0`: everything that defines `h(t, s) = -g s + n(t) F0(s)`.
#[derive(Clone, Debug)]
pub struct SystemParams {
    pub g: f64,
    pub weight: Weight,
    pub nonlinearity: ModifiedNonlinearity,
}

impl SystemParams {
    pub fn new(g: f64, weight: Weight, nonlinearity: ModifiedNonlinearity) -> Result<Self> {
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::param("g", format!("g = {g} must be positive")));
        }
        Ok(SystemParams { g, weight, nonlinearity })
    }

    /// Cubic `F` with `a = 0.6`, `g = 0.1` and `k0 = c0` around the given weight.
    pub fn reference(weight: Weight) -> Self {
        let f = Nonlinearity::cubic(DEFAULT_A).expect("reference cubic is valid");
        let f0 = ModifiedNonlinearity::with_default_k0(f).expect("k0 = c0 is admissible");
        SystemParams::new(DEFAULT_G, weight, f0).expect("g > 0")
    }

    pub fn beta(&self) -> f64 {
        self.weight.beta()
    }

    /// `h(t, s) = -g s + n(t) F0(s)`.
    #[inline]
    pub fn h(&self, t: f64, s: f64) -> f64 {
        -self.g * s + self.weight.eval(t) * self.nonlinearity.eval(s)
    }

    /// Same system with a different weight.
    pub fn with_weight(&self, weight: Weight) -> Self {
        SystemParams {
            g: self.g,
            weight,
            nonlinearity: self.nonlinearity.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic() -> Nonlinearity {
        Nonlinearity::cubic(0.6).unwrap()
    }

    #[test]
    fn cutoff_and_junction_values() {
        assert_eq!(cutoff(1.5), 1.0);
        assert_eq!(cutoff(-0.3), 0.0);
        assert_eq!(junction(0.5), 0.0);
        assert!(junction(-1.0) > 0.0);
        assert!(junction(2.0) < 0.0);
    }

    #[test]
    fn modified_matches_hand_evaluation() {
        let f0 = ModifiedNonlinearity::with_default_k0(cubic()).unwrap();
        // 0.8 * 0.2 * 0.2
        assert!((f0.eval(0.8) - 0.032).abs() < 1e-15);
    }

    #[test]
    fn c0_located_by_extremum_search() {
        let f0 = ModifiedNonlinearity::with_default_k0(cubic()).unwrap();
        // oracle: F' = 0 on ]0, a[ at s = (3.2 - sqrt(3.04)) / 6
        let s_star = (3.2 - 3.04f64.sqrt()) / 6.0;
        let c0 = (s_star * (1.0 - s_star) * (s_star - 0.6)).abs();
        assert!((f0.c0() - c0).abs() < 1e-12);
        assert!((f0.c0_at() - s_star).abs() < 1e-6);
        assert!((f0.c0() - 0.0657).abs() < 1e-4);
        assert!((f0.c0_at() - 0.2427).abs() < 1e-4);
    }

    #[test]
    fn lipschitz_covers_interior_and_tails() {
        let f0 = ModifiedNonlinearity::with_default_k0(cubic()).unwrap();
        // F' = -3s^2 + 3.2s - 0.6 on [0,1] peaks in magnitude at s = 0
        assert!((f0.lipschitz() - 0.6).abs() < 1e-9);
        let tail = f0.k0() * 4.0 * (-2.0f64).exp();
        assert!(tail < f0.lipschitz());
    }

    #[test]
    fn rejects_bad_k0() {
        assert!(matches!(
            ModifiedNonlinearity::new(cubic(), 0.0),
            Err(Error::InvalidParameter { name: "k0", .. })
        ));
        assert!(ModifiedNonlinearity::new(cubic(), 0.07).is_err());
        assert!(ModifiedNonlinearity::new(cubic(), 0.03).is_ok());
    }

    #[test]
    fn rejects_wrong_sign_pattern() {
        // -F has the wrong orientation
        let bad = Nonlinearity::new(0.6, |s| -s * (1.0 - s) * (s - 0.6), |s| 3.0 * s * s - 3.2 * s + 0.6);
        assert!(matches!(bad, Err(Error::InvalidNonlinearity(_))));
        let shifted = Nonlinearity::new(0.6, |s| s * (1.0 - s) * (s - 0.6) + 0.01, |_| 0.0);
        assert!(shifted.is_err());
        assert!(Nonlinearity::cubic(1.2).is_err());
    }

    #[test]
    fn modified_sign_outside_unit_interval() {
        let f0 = ModifiedNonlinearity::with_default_k0(cubic()).unwrap();
        for i in 1..200 {
            let d = i as f64 * 0.05;
            assert!(f0.eval(-d) > 0.0, "F0({}) not positive", -d);
            assert!(f0.eval(1.0 + d) < 0.0, "F0({}) not negative", 1.0 + d);
            assert!(f0.eval(-d).abs() <= f0.c0() && f0.eval(1.0 + d).abs() <= f0.c0());
        }
    }

    #[test]
    fn junction_is_flat_at_the_seams() {
        for &eps in &[1e-1, 1e-2, 1e-3] {
            assert!((junction(-eps) / eps).abs() < 1.0);
            assert!((junction(1.0 + eps) / eps).abs() < 1.0);
        }
    }

    #[test]
    fn branches_agree_with_f0_on_their_intervals() {
        let f0 = ModifiedNonlinearity::with_default_k0(cubic()).unwrap();
        for i in 0..=60 {
            let s = -1.5 + i as f64 * 0.0625;
            let branch = ModifiedNonlinearity::KINKS.iter().filter(|&&c| s > c).count();
            assert_eq!(f0.eval_branch(s, branch), f0.eval(s), "s = {s}");
        }
        // continued branches stay finite and continuous across the seams
        for branch in 0..3 {
            for s in [-1e-9, 0.0, 1e-9, 1.0 - 1e-9, 1.0, 1.0 + 1e-9] {
                assert!((f0.eval_branch(s, branch) - f0.eval(s)).abs() < 1e-8, "branch {branch}, s = {s}");
            }
        }
    }

    #[test]
    fn feature_scale_of_f0() {
        assert_eq!(ModifiedNonlinearity::feature_scale(0.2, 0.9), f64::INFINITY);
        assert!((ModifiedNonlinearity::feature_scale(1.5, 1.3) - 0.09).abs() < 1e-15);
        assert!((ModifiedNonlinearity::feature_scale(-0.5, -2.0) - 0.25).abs() < 1e-15);
        // an interval reaching into [0, 1] is judged at the seam
        let floor = ModifiedNonlinearity::feature_scale(0.5, 1.0 + 1e-6);
        assert_eq!(floor, ModifiedNonlinearity::feature_scale(-1e-6, 0.5));
        assert!(floor > 0.0 && floor < 1e-3);
    }

    fn example_weight() -> Weight {
        Weight::two_level(1.0, 0.8, 20.0, 1.0).unwrap()
    }

    #[test]
    fn piecewise_lookup_and_periodicity() {
        let w = example_weight();
        assert_eq!(w.eval(0.5), 20.0);
        assert_eq!(w.eval(0.9), 1.0);
        assert_eq!(w.eval(1.3), 20.0);
        // right-continuous at the jump
        assert_eq!(w.eval(0.8), 1.0);
        assert_eq!(w.eval(1.0), 20.0);
        assert_eq!(w.eval(-0.1), 1.0);
    }

    #[test]
    fn split_strategies() {
        let w = example_weight();
        let plateau = w.split(SplitStrategy::PlateauValue).unwrap();
        assert_eq!(plateau.nbar(), 20.0);
        assert!((plateau.ntilde_l1() - 3.8).abs() < 1e-12);
        let mean = w.split(SplitStrategy::Mean).unwrap();
        assert!((mean.nbar() - 16.2).abs() < 1e-12);
        let constant = Weight::constant(1.0, 20.0).unwrap().split(SplitStrategy::PlateauValue).unwrap();
        assert_eq!(constant.nbar(), 20.0);
        assert_eq!(constant.ntilde_l1(), 0.0);
        let explicit = w.split(SplitStrategy::Explicit(10.0)).unwrap();
        assert!((explicit.ntilde_l1() - (10.0 * 0.8 + 9.0 * 0.2)).abs() < 1e-12);
    }

    #[test]
    fn l1_norm_scales_with_period_multiple() {
        let w = example_weight().split(SplitStrategy::PlateauValue).unwrap();
        assert!((w.l1_norm_over(2) - 7.6).abs() < 1e-12);
        assert!((w.l1_norm_over(1) - 3.8).abs() < 1e-12);
        let c = Weight::constant(1.0, 20.0).unwrap();
        assert_eq!(c.l1_norm_over(7), 0.0);
    }

    #[test]
    fn plateau_merges_across_period_boundary() {
        let w = Weight::piecewise(1.0, vec![(0.3, 5.0), (0.5, 2.0), (0.6, 9.0), (1.0, 5.0)]).unwrap();
        assert_eq!(w.split(SplitStrategy::PlateauValue).unwrap().nbar(), 5.0);
        assert_eq!(w.breakpoints(0.0, 1.0), vec![0.3, 0.5, 0.6]);
    }

    #[test]
    fn sampled_weight_interpolates_and_rejects_plateau() {
        let w = Weight::sampled(2.0, vec![(0.0, 1.0), (1.0, 3.0)]).unwrap();
        assert!((w.eval(0.5) - 2.0).abs() < 1e-15);
        assert!((w.eval(1.5) - 2.0).abs() < 1e-15);
        assert!((w.eval(2.25) - 1.5).abs() < 1e-15);
        assert!((w.mean() - 2.0).abs() < 1e-15);
        // |n - 2| is a pair of triangles of height 1
        assert!((w.ntilde_l1() - 1.0).abs() < 1e-15);
        assert!(matches!(
            w.split(SplitStrategy::PlateauValue),
            Err(Error::UnsupportedStrategy("plateau-value"))
        ));
    }

    #[test]
    fn weight_validation() {
        assert!(Weight::piecewise(1.0, vec![(0.5, 1.0), (0.9, 2.0)]).is_err());
        assert!(Weight::piecewise(1.0, vec![(0.5, 1.0), (1.0, -2.0)]).is_err());
        assert!(Weight::constant(0.0, 1.0).is_err());
        assert!(Weight::sampled(1.0, vec![(0.1, 1.0)]).is_err());
        assert!(Weight::two_level(1.0, 1.5, 2.0, 1.0).is_err());
    }

    #[test]
    fn breakpoints_cover_several_periods() {
        let w = example_weight();
        let b = w.breakpoints(0.0, 2.5);
        let expected = [0.8, 1.0, 1.8, 2.0];
        assert_eq!(b.len(), expected.len());
        for (x, e) in b.iter().zip(expected) {
            assert!((x - e).abs() < 1e-15);
        }
        assert!(Weight::constant(1.0, 3.0).unwrap().breakpoints(0.0, 10.0).is_empty());
    }

    #[test]
    fn split_strategy_parsing() {
        assert_eq!("mean".parse::<SplitStrategy>().unwrap(), SplitStrategy::Mean);
        assert_eq!(
            "explicit(12.5)".parse::<SplitStrategy>().unwrap(),
            SplitStrategy::Explicit(12.5)
        );
        assert!("median".parse::<SplitStrategy>().is_err());
    }

    #[test]
    fn params_require_positive_g() {
        let f0 = ModifiedNonlinearity::with_default_k0(cubic()).unwrap();
        assert!(SystemParams::new(0.0, example_weight(), f0).is_err());
    }
}
