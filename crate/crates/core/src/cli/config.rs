//! Scenario files.
//!
//! One scenario per file, one `key = value` assignment per line. Keys are
//! flat and dotted (`weight.kind`, `tol.rel`); `#` starts a comment. Values:
//!
//! ```text
//! value  := number | word | word '(' number ')' | string | tuple | list
//! tuple  := '(' number (',' number)* ')'
//! list   := '[' [value (',' value)*] [','] ']'
//! string := '"' chars '"'
//! word   := [A-Za-z_][A-Za-z0-9_-]*
//! ```
//!
//! Every key is optional and falls back to the default listed in
//! [`Scenario::default`]. Unknown or duplicated keys are errors, as are keys
//! that do not apply to the chosen `weight.kind`. [`Scenario::to_config`]
//! writes every key, so parsing its output gives back the same scenario.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use crate::energy::LevelRule;
use crate::error::{Error, Result};
use crate::flow::IntegratorSettings;
use crate::model::{self, ModifiedNonlinearity, Nonlinearity, SplitStrategy, SystemParams, Weight};

/// What a scenario computes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Task {
    Portrait,
    Timemap,
    Rotation,
    OuterRadius,
    FindOrbits,
    Subharmonics,
    Sweep,
}

impl Task {
    pub const ALL: [Task; 7] = [
        Task::Portrait,
        Task::Timemap,
        Task::Rotation,
        Task::OuterRadius,
        Task::FindOrbits,
        Task::Subharmonics,
        Task::Sweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::Portrait => "portrait",
            Task::Timemap => "timemap",
            Task::Rotation => "rotation",
            Task::OuterRadius => "outer-radius",
            Task::FindOrbits => "find-orbits",
            Task::Subharmonics => "subharmonics",
            Task::Sweep => "sweep",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Task::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::config("task", format!("unknown task `{s}`")))
    }
}

/// The weight before splitting.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightSpec {
    Constant(f64),
    /// `(t_end, value)` pairs ending at `beta`.
    Piecewise(Vec<(f64, f64)>),
    /// `n1` on `]0, alpha[` and `n0` on `]alpha, beta[`.
    TwoLevel { alpha: f64, n1: f64, n0: f64 },
    /// `(t, value)` samples on `[0, beta[`.
    Sampled(Vec<(f64, f64)>),
}

impl WeightSpec {
    pub fn build(&self, beta: f64) -> Result<Weight> {
        match self {
            WeightSpec::Constant(v) => Weight::constant(beta, *v),
            WeightSpec::Piecewise(seg) => Weight::piecewise(beta, seg.clone()),
            WeightSpec::TwoLevel { alpha, n1, n0 } => Weight::two_level(beta, *alpha, *n1, *n0),
            WeightSpec::Sampled(samples) => Weight::sampled(beta, samples.clone()),
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            WeightSpec::Constant(_) => "constant",
            WeightSpec::Piecewise(_) => "piecewise",
            WeightSpec::TwoLevel { .. } => "two-level",
            WeightSpec::Sampled(_) => "sampled",
        }
    }
}

/// Seed grid of the fixed point search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Seeds {
    pub angular: usize,
    pub radial: usize,
    pub phases: usize,
}

impl Default for Seeds {
    fn default() -> Self {
        Seeds {
            angular: 48,
            radial: 24,
            phases: 2,
        }
    }
}

impl FromStr for Seeds {
    type Err = Error;

    /// `A`, `AxR` or `AxRxP`; omitted parts keep their defaults.
    fn from_str(s: &str) -> Result<Self> {
        let d = Seeds::default();
        let mut counts = [d.angular, d.radial, d.phases];
        let parts: Vec<&str> = s.split('x').collect();
        if parts.len() > 3 {
            return Err(Error::config("seeds", format!("expected A[xR[xP]], got `{s}`")));
        }
        for (slot, part) in counts.iter_mut().zip(parts) {
            let v: usize = part
                .trim()
                .parse()
                .map_err(|_| Error::config("seeds", format!("`{part}` is not a count")))?;
            if v == 0 {
                return Err(Error::config("seeds", "counts must be positive"));
            }
            *slot = v;
        }
        let [angular, radial, phases] = counts;
        Ok(Seeds { angular, radial, phases })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PortraitConfig {
    /// Initial points `(x0, 0)`.
    pub x0: Vec<f64>,
    /// Each segment covers `[-half_span, half_span]`.
    pub half_span: f64,
    /// Weights `n` for which `n F(s)` is tabulated against `g s`.
    pub curve_n: Vec<f64>,
}

impl Default for PortraitConfig {
    fn default() -> Self {
        PortraitConfig {
            x0: (1..=10).map(|i| i as f64 / 10.0).collect(),
            half_span: 5.0,
            curve_n: vec![5.0, 20.0, 80.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RotationConfig {
    pub points: Vec<(f64, f64)>,
    /// Reference point; `None` means the center `(a_n̄, 0)`.
    pub q0: Option<(f64, f64)>,
    /// Circle samples for `outer-radius`.
    pub samples: usize,
}

impl Default for RotationConfig {
    fn default() -> Self {
        RotationConfig {
            points: Vec::new(),
            q0: None,
            samples: crate::rotation::DEFAULT_CIRCLE_SAMPLES,
        }
    }
}

/// Grid of two-level weights for the multiplicity sweep. Each cell uses
/// `n1 = nbar` on `]0, alpha[`, `n0` elsewhere, and the plateau split.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepGrid {
    pub nbar: Vec<f64>,
    pub alpha: Vec<f64>,
    pub m: Vec<u32>,
    pub n0: f64,
}

impl Default for SweepGrid {
    fn default() -> Self {
        SweepGrid {
            nbar: Vec::new(),
            alpha: Vec::new(),
            m: vec![1],
            n0: 1.0,
        }
    }
}

/// A complete experiment description.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub task: Option<Task>,
    pub g: f64,
    pub a: f64,
    pub beta: f64,
    /// `None` selects `k0 = c0`.
    pub k0: Option<f64>,
    pub weight: WeightSpec,
    pub split: SplitStrategy,
    pub m: u32,
    pub n: Option<u32>,
    pub k: Option<u32>,
    pub level: LevelRule,
    pub tol: IntegratorSettings,
    pub dt_out: f64,
    pub seeds: Seeds,
    pub out_dir: PathBuf,
    pub portrait: PortraitConfig,
    pub timemap_nbar: Vec<f64>,
    pub rotation: RotationConfig,
    pub sweep: SweepGrid,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            task: None,
            g: model::DEFAULT_G,
            a: model::DEFAULT_A,
            beta: model::DEFAULT_BETA,
            k0: None,
            weight: WeightSpec::Constant(20.0),
            split: SplitStrategy::Mean,
            m: 1,
            n: None,
            k: None,
            level: LevelRule::MaxAllowed,
            tol: IntegratorSettings::default(),
            dt_out: 0.01,
            seeds: Seeds::default(),
            out_dir: PathBuf::from("out"),
            portrait: PortraitConfig::default(),
            timemap_nbar: vec![20.0, 80.0, 320.0],
            rotation: RotationConfig::default(),
            sweep: SweepGrid::default(),
        }
    }
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Scenario> {
        let mut entries = Entries::read(text)?;
        let mut sc = Scenario::default();
        let def = Scenario::default();

        if let Some(v) = entries.take("task") {
            sc.task = Some(v.word("task")?.parse()?);
        }
        sc.g = entries.number_or("g", def.g)?;
        sc.a = entries.number_or("a", def.a)?;
        sc.beta = entries.number_or("beta", def.beta)?;
        if let Some(v) = entries.take("k0") {
            sc.k0 = match v {
                Value::Word(w, None) if w == "c0" => None,
                other => Some(other.number("k0")?),
            };
        }

        let kind = match entries.take("weight.kind") {
            Some(v) => v.word("weight.kind")?,
            None => "constant".to_string(),
        };
        sc.weight = match kind.as_str() {
            "constant" => WeightSpec::Constant(entries.number_or("weight.value", 20.0)?),
            "piecewise" => WeightSpec::Piecewise(entries.require("weight.segments")?.pairs("weight.segments")?),
            "two-level" => WeightSpec::TwoLevel {
                alpha: entries.require("weight.alpha")?.number("weight.alpha")?,
                n1: entries.require("weight.n1")?.number("weight.n1")?,
                n0: entries.require("weight.n0")?.number("weight.n0")?,
            },
            "sampled" => WeightSpec::Sampled(entries.require("weight.samples")?.pairs("weight.samples")?),
            other => return Err(Error::config("weight.kind", format!("unknown weight kind `{other}`"))),
        };
        if let Some(v) = entries.take("split.strategy") {
            sc.split = parse_split(v)?;
        }

        sc.m = entries.count_or("m", def.m)?;
        if let Some(v) = entries.take("N") {
            sc.n = Some(v.count("N")?);
        }
        if let Some(v) = entries.take("K") {
            sc.k = Some(v.count("K")?);
        }
        if let Some(v) = entries.take("level.rule") {
            sc.level = parse_level(v)?;
        }

        sc.tol.rel_tol = entries.number_or("tol.rel", def.tol.rel_tol)?;
        sc.tol.abs_tol = entries.number_or("tol.abs", def.tol.abs_tol)?;
        sc.tol.max_step = entries.number_or("tol.max_step", def.tol.max_step)?;
        sc.dt_out = entries.number_or("dt_out", def.dt_out)?;
        sc.seeds.angular = entries.count_or("seeds.angular", def.seeds.angular as u32)? as usize;
        sc.seeds.radial = entries.count_or("seeds.radial", def.seeds.radial as u32)? as usize;
        sc.seeds.phases = entries.count_or("seeds.phases", def.seeds.phases as u32)? as usize;
        if let Some(v) = entries.take("output.dir") {
            sc.out_dir = PathBuf::from(v.string("output.dir")?);
        }

        if let Some(v) = entries.take("portrait.x0") {
            sc.portrait.x0 = v.numbers("portrait.x0")?;
        }
        sc.portrait.half_span = entries.number_or("portrait.T", def.portrait.half_span)?;
        if let Some(v) = entries.take("portrait.curve_n") {
            sc.portrait.curve_n = v.numbers("portrait.curve_n")?;
        }
        if let Some(v) = entries.take("timemap.nbar_grid") {
            sc.timemap_nbar = v.numbers("timemap.nbar_grid")?;
        }
        if let Some(v) = entries.take("rotation.points") {
            sc.rotation.points = v.pairs("rotation.points")?;
        }
        if let Some(v) = entries.take("rotation.q0") {
            sc.rotation.q0 = match v {
                Value::Word(w, None) if w == "center" => None,
                other => Some(other.pair("rotation.q0")?),
            };
        }
        sc.rotation.samples = entries.count_or("rotation.samples", def.rotation.samples as u32)? as usize;
        if let Some(v) = entries.take("sweep.nbar") {
            sc.sweep.nbar = v.numbers("sweep.nbar")?;
        }
        if let Some(v) = entries.take("sweep.alpha") {
            sc.sweep.alpha = v.numbers("sweep.alpha")?;
        }
        if let Some(v) = entries.take("sweep.m") {
            sc.sweep.m = v
                .list("sweep.m")?
                .into_iter()
                .map(|x| x.count("sweep.m"))
                .collect::<Result<_>>()?;
        }
        sc.sweep.n0 = entries.number_or("sweep.n0", def.sweep.n0)?;

        entries.finish()?;
        sc.validate()?;
        Ok(sc)
    }

    /// Canonical text form listing every key.
    pub fn to_config(&self) -> String {
        let mut out = String::new();
        let mut put = |key: &str, value: String| {
            let _ = writeln!(out, "{key} = {value}");
        };
        if let Some(task) = self.task {
            put("task", task.to_string());
        }
        put("g", num(self.g));
        put("a", num(self.a));
        put("beta", num(self.beta));
        put("k0", self.k0.map_or_else(|| "c0".to_string(), num));
        put("weight.kind", self.weight.kind().to_string());
        match &self.weight {
            WeightSpec::Constant(v) => put("weight.value", num(*v)),
            WeightSpec::Piecewise(seg) => put("weight.segments", pairs(seg)),
            WeightSpec::TwoLevel { alpha, n1, n0 } => {
                put("weight.alpha", num(*alpha));
                put("weight.n1", num(*n1));
                put("weight.n0", num(*n0));
            }
            WeightSpec::Sampled(s) => put("weight.samples", pairs(s)),
        }
        put(
            "split.strategy",
            match self.split {
                SplitStrategy::Explicit(v) => format!("explicit({})", num(v)),
                other => other.to_string(),
            },
        );
        put("m", self.m.to_string());
        if let Some(n) = self.n {
            put("N", n.to_string());
        }
        if let Some(k) = self.k {
            put("K", k.to_string());
        }
        put(
            "level.rule",
            match self.level {
                LevelRule::MaxAllowed => "max-allowed".to_string(),
                LevelRule::Fraction(l) => format!("fraction({})", num(l)),
            },
        );
        put("tol.rel", num(self.tol.rel_tol));
        put("tol.abs", num(self.tol.abs_tol));
        put("tol.max_step", num(self.tol.max_step));
        put("dt_out", num(self.dt_out));
        put("seeds.angular", self.seeds.angular.to_string());
        put("seeds.radial", self.seeds.radial.to_string());
        put("seeds.phases", self.seeds.phases.to_string());
        put("output.dir", quote(&self.out_dir.to_string_lossy()));
        put("portrait.x0", list(&self.portrait.x0));
        put("portrait.T", num(self.portrait.half_span));
        put("portrait.curve_n", list(&self.portrait.curve_n));
        put("timemap.nbar_grid", list(&self.timemap_nbar));
        put("rotation.points", pairs(&self.rotation.points));
        put(
            "rotation.q0",
            self.rotation.q0.map_or_else(|| "center".to_string(), |(x, y)| format!("({}, {})", num(x), num(y))),
        );
        put("rotation.samples", self.rotation.samples.to_string());
        put("sweep.nbar", list(&self.sweep.nbar));
        put("sweep.alpha", list(&self.sweep.alpha));
        put(
            "sweep.m",
            format!(
                "[{}]",
                self.sweep.m.iter().map(u32::to_string).collect::<Vec<_>>().join(", ")
            ),
        );
        put("sweep.n0", num(self.sweep.n0));
        out
    }

    /// Range checks that do not depend on the task.
    pub fn validate(&self) -> Result<()> {
        positive("g", self.g)?;
        positive("beta", self.beta)?;
        if !(self.a > 0.0 && self.a < 1.0) {
            return Err(Error::config("a", format!("a = {} must lie in ]0, 1[", self.a)));
        }
        if let Some(k0) = self.k0 {
            positive("k0", k0)?;
        }
        match &self.weight {
            WeightSpec::Constant(v) => positive("weight.value", *v)?,
            WeightSpec::TwoLevel { alpha, n1, n0 } => {
                positive("weight.alpha", *alpha)?;
                positive("weight.n1", *n1)?;
                positive("weight.n0", *n0)?;
                if *alpha > self.beta {
                    return Err(Error::config("weight.alpha", "alpha must not exceed beta"));
                }
            }
            WeightSpec::Piecewise(_) | WeightSpec::Sampled(_) => {}
        }
        if let SplitStrategy::Explicit(v) = self.split {
            positive("split.strategy", v)?;
        }
        if self.m == 0 {
            return Err(Error::config("m", "must be positive"));
        }
        if let LevelRule::Fraction(l) = self.level {
            if !(l > 0.0 && l <= 1.0) {
                return Err(Error::config("level.rule", format!("fraction {l} must lie in ]0, 1]")));
            }
        }
        positive("tol.rel", self.tol.rel_tol)?;
        positive("tol.abs", self.tol.abs_tol)?;
        positive("tol.max_step", self.tol.max_step)?;
        positive("dt_out", self.dt_out)?;
        positive("portrait.T", self.portrait.half_span)?;
        for &n in &self.portrait.curve_n {
            positive("portrait.curve_n", n)?;
        }
        for &n in &self.timemap_nbar {
            positive("timemap.nbar_grid", n)?;
        }
        if self.rotation.samples == 0 {
            return Err(Error::config("rotation.samples", "must be positive"));
        }
        for &n in &self.sweep.nbar {
            positive("sweep.nbar", n)?;
        }
        for &al in &self.sweep.alpha {
            positive("sweep.alpha", al)?;
            if al > self.beta {
                return Err(Error::config("sweep.alpha", format!("alpha = {al} exceeds beta")));
            }
        }
        if self.sweep.m.contains(&0) {
            return Err(Error::config("sweep.m", "entries must be positive"));
        }
        positive("sweep.n0", self.sweep.n0)?;
        // the weight constructors carry the remaining structural checks
        self.weight
            .build(self.beta)
            .map_err(|e| Error::config("weight", e.to_string()))?;
        Ok(())
    }

    /// Fields a task cannot run without.
    pub fn validate_for(&self, task: Task) -> Result<()> {
        if let Some(t) = self.task {
            if t != task {
                return Err(Error::config("task", format!("config declares `{t}` but `{task}` was requested")));
            }
        }
        match task {
            Task::Portrait if self.portrait.x0.is_empty() => Err(Error::config("portrait.x0", "no initial points")),
            Task::Timemap if self.timemap_nbar.is_empty() => Err(Error::config("timemap.nbar_grid", "empty grid")),
            Task::Rotation if self.rotation.points.is_empty() => {
                Err(Error::config("rotation.points", "no initial points"))
            }
            Task::Subharmonics if self.m < 2 => Err(Error::config("m", "subharmonics need m >= 2")),
            Task::Subharmonics if self.k.is_none() => Err(Error::config("K", "required for subharmonics")),
            Task::Sweep if self.sweep.nbar.is_empty() => Err(Error::config("sweep.nbar", "empty grid")),
            Task::Sweep if self.sweep.alpha.is_empty() => Err(Error::config("sweep.alpha", "empty grid")),
            Task::Sweep if self.sweep.m.is_empty() => Err(Error::config("sweep.m", "empty grid")),
            _ => Ok(()),
        }
    }

    /// Cubic `F` with zero at `a`, modified outside `[0, 1]` with `k0`.
    pub fn nonlinearity(&self) -> Result<ModifiedNonlinearity> {
        let f = Nonlinearity::cubic(self.a)?;
        match self.k0 {
            None => ModifiedNonlinearity::with_default_k0(f),
            Some(k0) => ModifiedNonlinearity::new(f, k0),
        }
    }

    /// System parameters with the configured weight and split.
    pub fn params(&self) -> Result<SystemParams> {
        let weight = self.weight.build(self.beta)?.split(self.split)?;
        SystemParams::new(self.g, weight, self.nonlinearity()?)
    }
}

fn positive(path: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(path, format!("{v} must be positive and finite")))
    }
}

fn parse_split(v: Value) -> Result<SplitStrategy> {
    match v {
        Value::Word(w, None) if w == "mean" => Ok(SplitStrategy::Mean),
        Value::Word(w, None) if w == "plateau-value" => Ok(SplitStrategy::PlateauValue),
        Value::Word(w, Some(x)) if w == "explicit" => Ok(SplitStrategy::Explicit(x)),
        other => Err(Error::config(
            "split.strategy",
            format!("expected mean, plateau-value or explicit(<n̄>), got {other}"),
        )),
    }
}

fn parse_level(v: Value) -> Result<LevelRule> {
    match v {
        Value::Word(w, None) if w == "max-allowed" => Ok(LevelRule::MaxAllowed),
        Value::Word(w, Some(x)) if w == "fraction" => Ok(LevelRule::Fraction(x)),
        other => Err(Error::config(
            "level.rule",
            format!("expected max-allowed or fraction(<λ>), got {other}"),
        )),
    }
}

/// Shortest decimal form that parses back to the same `f64`.
fn num(v: f64) -> String {
    format!("{v:?}")
}

fn list(values: &[f64]) -> String {
    format!("[{}]", values.iter().map(|&v| num(v)).collect::<Vec<_>>().join(", "))
}

fn pairs(values: &[(f64, f64)]) -> String {
    format!(
        "[{}]",
        values
            .iter()
            .map(|&(a, b)| format!("({}, {})", num(a), num(b)))
            .collect::<Vec<_>>()
            .join(", ")
    )
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

/// A parsed right-hand side.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Number(f64),
    /// Bare word with an optional single numeric argument, as in `fraction(0.5)`.
    Word(String, Option<f64>),
    Str(String),
    Tuple(Vec<f64>),
    List(Vec<Value>),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Number(v) => write!(f, "{}", num(*v)),
            Value::Word(w, None) => write!(f, "{w}"),
            Value::Word(w, Some(x)) => write!(f, "{w}({})", num(*x)),
            Value::Str(s) => write!(f, "{}", quote(s)),
            Value::Tuple(t) => write!(f, "({})", t.iter().map(|&v| num(v)).collect::<Vec<_>>().join(", ")),
            Value::List(items) => {
                f.write_str("[")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str("]")
            }
        }
    }
}

impl Value {
    fn number(self, path: &str) -> Result<f64> {
        match self {
            Value::Number(v) => Ok(v),
            other => Err(Error::config(path, format!("expected a number, got {other}"))),
        }
    }

    fn count(self, path: &str) -> Result<u32> {
        let v = self.number(path)?;
        if v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
            Ok(v as u32)
        } else {
            Err(Error::config(path, format!("expected a positive integer, got {}", num(v))))
        }
    }

    fn word(self, path: &str) -> Result<String> {
        match self {
            Value::Word(w, None) => Ok(w),
            other => Err(Error::config(path, format!("expected a word, got {other}"))),
        }
    }

    fn string(self, path: &str) -> Result<String> {
        match self {
            Value::Str(s) | Value::Word(s, None) => Ok(s),
            other => Err(Error::config(path, format!("expected a string, got {other}"))),
        }
    }

    fn pair(self, path: &str) -> Result<(f64, f64)> {
        match self {
            Value::Tuple(t) if t.len() == 2 => Ok((t[0], t[1])),
            other => Err(Error::config(path, format!("expected a pair (x, y), got {other}"))),
        }
    }

    fn list(self, path: &str) -> Result<Vec<Value>> {
        match self {
            Value::List(items) => Ok(items),
            other => Err(Error::config(path, format!("expected a list, got {other}"))),
        }
    }

    fn numbers(self, path: &str) -> Result<Vec<f64>> {
        self.list(path)?.into_iter().map(|v| v.number(path)).collect()
    }

    fn pairs(self, path: &str) -> Result<Vec<(f64, f64)>> {
        self.list(path)?.into_iter().map(|v| v.pair(path)).collect()
    }
}

/// Parses a single value.
pub fn parse_value(text: &str) -> Result<Value> {
    let mut p = ValueParser {
        src: text.as_bytes(),
        text,
        pos: 0,
    };
    let v = p.value()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("trailing characters"));
    }
    Ok(v)
}

/// Parses a comma-separated list of finite numbers, as taken by `--nbar-grid`.
pub fn parse_float_list(text: &str) -> Result<Vec<f64>> {
    let items: Vec<&str> = text.split(',').map(str::trim).collect();
    if items.iter().all(|s| s.is_empty()) {
        return Err(Error::config("list", "empty list"));
    }
    items
        .into_iter()
        .map(|s| match s.parse::<f64>() {
            Ok(v) if v.is_finite() && is_numeric_literal(s) => Ok(v),
            _ => Err(Error::config("list", format!("`{s}` is not a finite number"))),
        })
        .collect()
}

fn is_numeric_literal(s: &str) -> bool {
    s.bytes().all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'-' | b'+' | b'e' | b'E'))
}

struct ValueParser<'a> {
    src: &'a [u8],
    text: &'a str,
    pos: usize,
}

impl ValueParser<'_> {
    fn error(&self, what: &str) -> Error {
        Error::config("value", format!("{what} at column {} in `{}`", self.pos + 1, self.text))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn value(&mut self) -> Result<Value> {
        match self.peek() {
            None => Err(self.error("missing value")),
            Some(b'[') => self.list(),
            Some(b'(') => Ok(Value::Tuple(self.tuple()?)),
            Some(b'"') => self.string(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.word(),
            Some(_) => Ok(Value::Number(self.number()?)),
        }
    }

    fn list(&mut self) -> Result<Value> {
        self.expect(b'[')?;
        let mut items = Vec::new();
        loop {
            if self.peek() == Some(b']') {
                self.pos += 1;
                return Ok(Value::List(items));
            }
            items.push(self.value()?);
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(b']') => {}
                _ => return Err(self.error("expected `,` or `]`")),
            }
        }
    }

    fn tuple(&mut self) -> Result<Vec<f64>> {
        self.expect(b'(')?;
        let mut items = vec![self.number()?];
        loop {
            match self.peek() {
                Some(b',') => {
                    self.pos += 1;
                    items.push(self.number()?);
                }
                Some(b')') => {
                    self.pos += 1;
                    return Ok(items);
                }
                _ => return Err(self.error("expected `,` or `)`")),
            }
        }
    }

    fn string(&mut self) -> Result<Value> {
        self.expect(b'"')?;
        let mut out = String::new();
        let rest = &self.text[self.pos..];
        let mut chars = rest.char_indices();
        while let Some((i, c)) = chars.next() {
            match c {
                '"' => {
                    self.pos += i + 1;
                    return Ok(Value::Str(out));
                }
                '\\' => match chars.next() {
                    Some((_, e @ ('"' | '\\'))) => out.push(e),
                    _ => {
                        self.pos += i;
                        return Err(self.error("bad escape"));
                    }
                },
                c => out.push(c),
            }
        }
        self.pos = self.src.len();
        Err(self.error("unterminated string"))
    }

    fn word(&mut self) -> Result<Value> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || matches!(self.src[self.pos], b'_' | b'-'))
        {
            self.pos += 1;
        }
        let word = self.text[start..self.pos].to_string();
        if self.src.get(self.pos) == Some(&b'(') {
            let args = self.tuple()?;
            if args.len() != 1 {
                return Err(self.error("expected exactly one argument"));
            }
            return Ok(Value::Word(word, Some(args[0])));
        }
        Ok(Value::Word(word, None))
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && matches!(self.src[self.pos], b'0'..=b'9' | b'.' | b'-' | b'+' | b'e' | b'E') {
            self.pos += 1;
        }
        let lit = &self.text[start..self.pos];
        match lit.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => {
                self.pos = start;
                Err(self.error("expected a finite number"))
            }
        }
    }
}

/// `key = value` lines keyed by name, consumed as the scenario is assembled.
struct Entries {
    map: BTreeMap<String, (usize, Value)>,
}

impl Entries {
    fn read(text: &str) -> Result<Entries> {
        let mut map = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let lineno = idx + 1;
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::config(format!("line {lineno}"), "expected `key = value`"))?;
            let key = key.trim();
            if key.is_empty() || !key.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'.') {
                return Err(Error::config(format!("line {lineno}"), format!("malformed key `{key}`")));
            }
            let value = parse_value(value).map_err(|e| match e {
                Error::Config { reason, .. } => Error::config(key, format!("line {lineno}: {reason}")),
                other => other,
            })?;
            if map.insert(key.to_string(), (lineno, value)).is_some() {
                return Err(Error::config(key, format!("line {lineno}: duplicate key")));
            }
        }
        Ok(Entries { map })
    }

    fn take(&mut self, key: &str) -> Option<Value> {
        self.map.remove(key).map(|(_, v)| v)
    }

    fn require(&mut self, key: &str) -> Result<Value> {
        self.take(key).ok_or_else(|| Error::config(key, "missing"))
    }

    fn number_or(&mut self, key: &str, default: f64) -> Result<f64> {
        self.take(key).map_or(Ok(default), |v| v.number(key))
    }

    fn count_or(&mut self, key: &str, default: u32) -> Result<u32> {
        self.take(key).map_or(Ok(default), |v| v.count(key))
    }

    fn finish(self) -> Result<()> {
        match self.map.into_iter().next() {
            None => Ok(()),
            Some((key, (lineno, _))) => Err(Error::config(
                key,
                format!("line {lineno}: unknown key or not applicable here"),
            )),
        }
    }
}

/// Drops a trailing `#` comment that is not inside a string.
fn strip_comment(line: &str) -> &str {
    let mut in_str = false;
    let mut escaped = false;
    for (i, c) in line.char_indices() {
        match c {
            _ if escaped => escaped = false,
            '\\' if in_str => escaped = true,
            '"' => in_str = !in_str,
            '#' if !in_str => return &line[..i],
            _ => {}
        }
    }
    line
}
