//! Dormand–Prince 8(5,3) stepping with step-size control and dense output,
//! restricted to one smooth piece of the vector field.
//!
//! Each step also lives on one branch of the field in `x`. A step whose end
//! point lies past a switching level is redone ending on the level, unless the
//! crossing is at its very start; then the step is redone on the branch it
//! moves into.

use super::{branch_of, DenseStep, IntegratorSettings, PhaseState, VectorField};
use crate::{Error, Result};

const SAFE: f64 = 0.9;
const FAC1: f64 = 0.333;
const FAC2: f64 = 6.0;
const MAX_STEPS: usize = 10_000_000;
/// Largest step, in units of the field's feature scale, that `x` may move.
const RESOLVE: f64 = 4.0;
/// Relative distance to a switching level at which a point counts as on it.
const SEAM_TOL: f64 = 1e-9;

type P = PhaseState;

enum Crossing {
    None,
    /// the step leaves a level right away: redo it on this branch
    AtStart(usize),
    /// the step crosses a level at this time: redo it ending there
    Inside(f64),
}

/// Stage values of one attempted step.
pub(crate) struct Stages {
    pub y_new: P,
    k: [P; 12],
}

pub(crate) struct Accepted {
    pub t: f64,
    pub h: f64,
    pub branch: usize,
    pub y: P,
    pub y_new: P,
    /// derivative at the end point (first stage of the next step)
    pub f_end: P,
    k: [P; 12],
}

/// Evaluates the twelve stages of one step of size `h` from `(t, y)`.
pub(crate) fn rk_stages<F: VectorField + ?Sized>(
    field: &F,
    piece: (f64, f64),
    branch: usize,
    t: f64,
    y: P,
    k1: P,
    h: f64,
) -> Stages {
    let f = |tt: f64, z: P| field.derivative_in(tt, z, piece, branch);
    let k2 = f(t + C2 * h, y + k1 * (A21 * h));
    let k3 = f(t + C3 * h, y + (k1 * A31 + k2 * A32) * h);
    let k4 = f(t + C4 * h, y + (k1 * A41 + k3 * A43) * h);
    let k5 = f(t + C5 * h, y + (k1 * A51 + k3 * A53 + k4 * A54) * h);
    let k6 = f(t + C6 * h, y + (k1 * A61 + k4 * A64 + k5 * A65) * h);
    let k7 = f(t + C7 * h, y + (k1 * A71 + k4 * A74 + k5 * A75 + k6 * A76) * h);
    let k8 = f(t + C8 * h, y + (k1 * A81 + k4 * A84 + k5 * A85 + k6 * A86 + k7 * A87) * h);
    let k9 = f(
        t + C9 * h,
        y + (k1 * A91 + k4 * A94 + k5 * A95 + k6 * A96 + k7 * A97 + k8 * A98) * h,
    );
    let k10 = f(
        t + C10 * h,
        y + (k1 * A101 + k4 * A104 + k5 * A105 + k6 * A106 + k7 * A107 + k8 * A108 + k9 * A109) * h,
    );
    let k11 = f(
        t + C11 * h,
        y + (k1 * A111 + k4 * A114 + k5 * A115 + k6 * A116 + k7 * A117 + k8 * A118 + k9 * A119 + k10 * A1110) * h,
    );
    let t_new = t + h;
    let yy1 = y + (k1 * A121
        + k4 * A124
        + k5 * A125
        + k6 * A126
        + k7 * A127
        + k8 * A128
        + k9 * A129
        + k10 * A1210
        + k11 * A1211)
        * h;
    let k12 = f(t_new, yy1);
    let incr = k1 * B1 + k6 * B6 + k7 * B7 + k8 * B8 + k9 * B9 + k10 * B10 + k11 * B11 + k12 * B12;
    Stages {
        y_new: y + incr * h,
        k: [k1, k2, k3, k4, k5, k6, k7, k8, k9, k10, k11, k12],
    }
}

/// Scaled error norm of a step (Hairer's combination of the 5th and 3rd order
/// estimators).
fn error_norm(st: &Stages, y: P, h: f64, s: &IntegratorSettings) -> f64 {
    let k = &st.k;
    let incr = k[0] * B1 + k[5] * B6 + k[6] * B7 + k[7] * B8 + k[8] * B9 + k[9] * B10 + k[10] * B11 + k[11] * B12;
    let e3 = incr - k[0] * BHH1 - k[8] * BHH2 - k[11] * BHH3;
    let e5 = k[0] * ER1 + k[5] * ER6 + k[6] * ER7 + k[7] * ER8 + k[8] * ER9 + k[9] * ER10 + k[10] * ER11 + k[11] * ER12;
    let sx = s.abs_tol + s.rel_tol * y.x.abs().max(st.y_new.x.abs());
    let sy = s.abs_tol + s.rel_tol * y.y.abs().max(st.y_new.y.abs());
    let err = (e5.x / sx).powi(2) + (e5.y / sy).powi(2);
    let err2 = (e3.x / sx).powi(2) + (e3.y / sy).powi(2);
    let mut deno = err + 0.01 * err2;
    if deno <= 0.0 {
        deno = 1.0;
    }
    h.abs() * err * (1.0 / (2.0 * deno)).sqrt()
}

pub(crate) struct Solver<'a, F: VectorField + ?Sized> {
    field: &'a F,
    piece: (f64, f64),
    branch: usize,
    settings: &'a IntegratorSettings,
    t: f64,
    y: P,
    k1: P,
    h: f64,
    facold: f64,
    last_rejected: bool,
    steps: usize,
    last_h: f64,
    /// step size to resume with after a step cut at a switching level
    resume_h: Option<f64>,
}

impl<'a, F: VectorField + ?Sized> Solver<'a, F> {
    pub fn new(field: &'a F, piece: (f64, f64), y0: P, settings: &'a IntegratorSettings, h_guess: Option<f64>) -> Self {
        let a = piece.0;
        let branch = branch_of(field, y0.x);
        let k1 = field.derivative_in(a, y0, piece, branch);
        let mut solver = Solver {
            field,
            piece,
            branch,
            settings,
            t: a,
            y: y0,
            k1,
            h: 0.0,
            facold: 1e-4,
            last_rejected: false,
            steps: 0,
            last_h: 0.0,
            resume_h: None,
        };
        // the field may change abruptly at a piece boundary, so the step
        // carried over from the previous piece is only an upper bound
        let h = match h_guess {
            Some(h) if h > 0.0 => h.min(solver.initial_step()),
            _ => solver.initial_step(),
        };
        solver.h = h.min(settings.max_step).min(piece.1 - a);
        solver
    }

    fn initial_step(&self) -> f64 {
        let s = self.settings;
        let (y, f0) = (self.y, self.k1);
        let sx = s.abs_tol + s.rel_tol * y.x.abs();
        let sy = s.abs_tol + s.rel_tol * y.y.abs();
        let dnf = (f0.x / sx).powi(2) + (f0.y / sy).powi(2);
        let dny = (y.x / sx).powi(2) + (y.y / sy).powi(2);
        let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
            1e-6
        } else {
            (dny / dnf).sqrt() * 0.01
        };
        h = h.min(s.max_step);
        let y1 = y + f0 * h;
        let f1 = self.field.derivative_in(self.t + h, y1, self.piece, self.branch);
        let d = f1 - f0;
        let der2 = ((d.x / sx).powi(2) + (d.y / sy).powi(2)).sqrt() / h;
        let der12 = der2.abs().max(dnf.sqrt());
        let h1 = if der12 <= 1e-15 {
            (h.abs() * 1e-3).max(1e-6)
        } else {
            (0.01 / der12).powf(1.0 / 8.0)
        };
        (100.0 * h).min(h1).min(s.max_step)
    }

    pub fn finished(&self) -> bool {
        self.t >= self.piece.1
    }

    pub fn state(&self) -> P {
        self.y
    }

    pub fn last_h(&self) -> f64 {
        self.last_h
    }

    /// Advances by one accepted step, retrying with smaller steps on rejection.
    pub fn step(&mut self) -> Result<Accepted> {
        let b = self.piece.1;
        self.set_branch(branch_of(self.field, self.y.x));
        loop {
            self.steps += 1;
            if self.steps > MAX_STEPS {
                return Err(Error::IntegrationFailure {
                    t: self.t,
                    reason: "maximum number of steps exceeded".into(),
                });
            }
            let mut h = self.h.min(self.settings.max_step);
            let remaining = b - self.t;
            // land exactly on the piece end instead of leaving a sliver
            if h >= remaining || remaining - h < 1e-10 * remaining.max(h) {
                h = remaining;
            }
            if h < 1e-14 * self.t.abs().max(1.0) {
                return Err(Error::IntegrationFailure {
                    t: self.t,
                    reason: format!("step size underflow (h = {h:e})"),
                });
            }
            let st = rk_stages(self.field, self.piece, self.branch, self.t, self.y, self.k1, h);
            if !st.y_new.is_finite() {
                self.h = 0.25 * h;
                self.last_rejected = true;
                continue;
            }
            let err = error_norm(&st, self.y, h, self.settings);
            let fac11 = err.powf(1.0 / 8.0);
            let fac = (1.0 / FAC2).max((1.0 / FAC1).min(fac11 / SAFE));
            let mut h_new = h / fac;
            let t_new = if h == remaining { b } else { self.t + h };
            let f_end = self.field.derivative_in(t_new, st.y_new, self.piece, self.branch);
            match self.crossing(&st, t_new, f_end) {
                Crossing::None => {}
                Crossing::AtStart(branch) => {
                    self.set_branch(branch);
                    continue;
                }
                Crossing::Inside(tc) => {
                    // the error estimate is unreliable across a kink, so redo
                    // the step ending on it and resume with the current size
                    if self.resume_h.is_none() {
                        self.resume_h = Some(if err <= 1.0 { h } else { h / (1.0 / FAC1).min(fac11 / SAFE) });
                    }
                    self.h = tc - self.t;
                    continue;
                }
            }
            let dx = (st.y_new.x - self.y.x).abs();
            let limit = RESOLVE * self.field.feature_scale(self.y.x, st.y_new.x);
            if dx > limit {
                self.h = h * 0.9 * limit / dx;
                self.last_rejected = true;
                self.resume_h = None;
                continue;
            }
            if err <= 1.0 {
                self.facold = err.max(1e-4);
                if self.last_rejected {
                    h_new = h_new.min(h);
                }
                if let Some(resume) = self.resume_h.take() {
                    h_new = resume;
                }
                self.last_rejected = false;
                let accepted = Accepted {
                    t: self.t,
                    h: t_new - self.t,
                    branch: self.branch,
                    y: self.y,
                    y_new: st.y_new,
                    f_end,
                    k: st.k,
                };
                self.t = t_new;
                self.y = st.y_new;
                self.k1 = f_end;
                self.h = h_new;
                self.last_h = h_new;
                return Ok(accepted);
            }
            self.h = h / (1.0 / FAC1).min(fac11 / SAFE);
            self.last_rejected = true;
            self.resume_h = None;
        }
    }

    fn set_branch(&mut self, branch: usize) {
        if branch != self.branch {
            self.branch = branch;
            self.k1 = self.field.derivative_in(self.t, self.y, self.piece, branch);
        }
    }

    /// Earliest switching level the trial step crosses, located on its dense
    /// output. A crossing within a tiny fraction of the end is left alone,
    /// since the kink then sits on a step boundary already.
    fn crossing(&self, st: &Stages, t_new: f64, f_end: P) -> Crossing {
        let levels = self.field.switching_levels();
        let (x0, x1) = (self.y.x, st.y_new.x);
        let crossed = |c: f64| (x0 > c) != (x1 > c);
        if !levels.iter().any(|&c| crossed(c)) {
            return Crossing::None;
        }
        let h = t_new - self.t;
        let trial = Accepted {
            t: self.t,
            h,
            branch: self.branch,
            y: self.y,
            y_new: st.y_new,
            f_end,
            k: st.k,
        };
        let dense = self.dense_output(&trial);
        let margin = 1e-6 * h;
        let tol = 1e-15 * t_new.abs().max(1.0);
        let mut first: Option<(f64, usize)> = None;
        for (i, &c) in levels.iter().enumerate() {
            if !crossed(c) {
                continue;
            }
            let beyond = if x1 > c { i + 1 } else { i };
            // starting on the level already, on the branch it moves into
            if beyond == self.branch && (x0 - c).abs() <= SEAM_TOL * c.abs().max(1.0) {
                continue;
            }
            let Some(tc) = crate::numeric::bisect(|t| dense.eval(t).x - c, self.t, t_new, tol) else {
                continue;
            };
            if first.map_or(true, |(t, _)| tc < t) {
                first = Some((tc, beyond));
            }
        }
        match first {
            Some((tc, beyond)) if tc <= self.t + margin && beyond != self.branch => Crossing::AtStart(beyond),
            Some((tc, _)) if tc > self.t + margin && tc < t_new - margin => Crossing::Inside(tc),
            _ => Crossing::None,
        }
    }

    /// Dense-output coefficients of an accepted step (three extra stages).
    pub fn dense_output(&self, acc: &Accepted) -> DenseStep {
        let f = |tt: f64, z: P| self.field.derivative_in(tt, z, self.piece, acc.branch);
        let (t, h, y) = (acc.t, acc.h, acc.y);
        let k = &acc.k;
        let (k1, k6, k7, k8, k9, k10, k11, k12) = (k[0], k[5], k[6], k[7], k[8], k[9], k[10], k[11]);
        let k_end = acc.f_end;
        let ydiff = acc.y_new - y;
        let bspl = k1 * h - ydiff;
        let mut cont = [P::default(); 8];
        cont[0] = y;
        cont[1] = ydiff;
        cont[2] = bspl;
        cont[3] = ydiff - k_end * h - bspl;
        cont[4] = k1 * D41 + k6 * D46 + k7 * D47 + k8 * D48 + k9 * D49 + k10 * D410 + k11 * D411 + k12 * D412;
        cont[5] = k1 * D51 + k6 * D56 + k7 * D57 + k8 * D58 + k9 * D59 + k10 * D510 + k11 * D511 + k12 * D512;
        cont[6] = k1 * D61 + k6 * D66 + k7 * D67 + k8 * D68 + k9 * D69 + k10 * D610 + k11 * D611 + k12 * D612;
        cont[7] = k1 * D71 + k6 * D76 + k7 * D77 + k8 * D78 + k9 * D79 + k10 * D710 + k11 * D711 + k12 * D712;
        let k14 = f(
            t + C14 * h,
            y + (k1 * A141 + k7 * A147 + k8 * A148 + k9 * A149 + k10 * A1410 + k11 * A1411 + k12 * A1412 + k_end * A1413)
                * h,
        );
        let k15 = f(
            t + C15 * h,
            y + (k1 * A151 + k6 * A156 + k7 * A157 + k8 * A158 + k11 * A1511 + k12 * A1512 + k_end * A1513 + k14 * A1514)
                * h,
        );
        let k16 = f(
            t + C16 * h,
            y + (k1 * A161 + k6 * A166 + k7 * A167 + k8 * A168 + k9 * A169 + k_end * A1613 + k14 * A1614 + k15 * A1615)
                * h,
        );
        cont[4] = (cont[4] + k_end * D413 + k14 * D414 + k15 * D415 + k16 * D416) * h;
        cont[5] = (cont[5] + k_end * D513 + k14 * D514 + k15 * D515 + k16 * D516) * h;
        cont[6] = (cont[6] + k_end * D613 + k14 * D614 + k15 * D615 + k16 * D616) * h;
        cont[7] = (cont[7] + k_end * D713 + k14 * D714 + k15 * D715 + k16 * D716) * h;
        DenseStep { t, h, cont }
    }
}

// Dormand–Prince 8(5,3) coefficients (Hairer, Nørsett & Wanner).
#[allow(clippy::excessive_precision)]
const A21: f64 = 5.26001519587677318785587544488E-2;
#[allow(clippy::excessive_precision)]
const A31: f64 = 1.97250569845378994544595329183E-2;
#[allow(clippy::excessive_precision)]
const A32: f64 = 5.91751709536136983633785987549E-2;
#[allow(clippy::excessive_precision)]
const A41: f64 = 2.95875854768068491816892993775E-2;
#[allow(clippy::excessive_precision)]
const A43: f64 = 8.87627564304205475450678981324E-2;
#[allow(clippy::excessive_precision)]
const A51: f64 = 2.41365134159266685502369798665E-1;
#[allow(clippy::excessive_precision)]
const A53: f64 = -8.84549479328286085344864962717E-1;
#[allow(clippy::excessive_precision)]
const A54: f64 = 9.24834003261792003115737966543E-1;
#[allow(clippy::excessive_precision)]
const A61: f64 = 3.7037037037037037037037037037E-2;
#[allow(clippy::excessive_precision)]
const A64: f64 = 1.70828608729473871279604482173E-1;
#[allow(clippy::excessive_precision)]
const A65: f64 = 1.25467687566822425016691814123E-1;
#[allow(clippy::excessive_precision)]
const A71: f64 = 3.7109375E-2;
#[allow(clippy::excessive_precision)]
const A74: f64 = 1.70252211019544039314978060272E-1;
#[allow(clippy::excessive_precision)]
const A75: f64 = 6.02165389804559606850219397283E-2;
#[allow(clippy::excessive_precision)]
const A76: f64 = -1.7578125E-2;

#[allow(clippy::excessive_precision)]
const A81: f64 = 3.70920001185047927108779319836E-2;
#[allow(clippy::excessive_precision)]
const A84: f64 = 1.70383925712239993810214054705E-1;
#[allow(clippy::excessive_precision)]
const A85: f64 = 1.07262030446373284651809199168E-1;
#[allow(clippy::excessive_precision)]
const A86: f64 = -1.53194377486244017527936158236E-2;
#[allow(clippy::excessive_precision)]
const A87: f64 = 8.27378916381402288758473766002E-3;
#[allow(clippy::excessive_precision)]
const A91: f64 = 6.24110958716075717114429577812E-1;
#[allow(clippy::excessive_precision)]
const A94: f64 = -3.36089262944694129406857109825E0;
#[allow(clippy::excessive_precision)]
const A95: f64 = -8.68219346841726006818189891453E-1;
#[allow(clippy::excessive_precision)]
const A96: f64 = 2.75920996994467083049415600797E1;
#[allow(clippy::excessive_precision)]
const A97: f64 = 2.01540675504778934086186788979E1;
#[allow(clippy::excessive_precision)]
const A98: f64 = -4.34898841810699588477366255144E1;
#[allow(clippy::excessive_precision)]
const A101: f64 = 4.77662536438264365890433908527E-1;
#[allow(clippy::excessive_precision)]
const A104: f64 = -2.48811461997166764192642586468E0;
#[allow(clippy::excessive_precision)]
const A105: f64 = -5.90290826836842996371446475743E-1;
#[allow(clippy::excessive_precision)]
const A106: f64 = 2.12300514481811942347288949897E1;
#[allow(clippy::excessive_precision)]
const A107: f64 = 1.52792336328824235832596922938E1;
#[allow(clippy::excessive_precision)]
const A108: f64 = -3.32882109689848629194453265587E1;
#[allow(clippy::excessive_precision)]
const A109: f64 = -2.03312017085086261358222928593E-2;

#[allow(clippy::excessive_precision)]
const A111: f64 = -9.3714243008598732571704021658E-1;
#[allow(clippy::excessive_precision)]
const A114: f64 = 5.18637242884406370830023853209E0;
#[allow(clippy::excessive_precision)]
const A115: f64 = 1.09143734899672957818500254654E0;
#[allow(clippy::excessive_precision)]
const A116: f64 = -8.14978701074692612513997267357E0;
#[allow(clippy::excessive_precision)]
const A117: f64 = -1.85200656599969598641566180701E1;
#[allow(clippy::excessive_precision)]
const A118: f64 = 2.27394870993505042818970056734E1;
#[allow(clippy::excessive_precision)]
const A119: f64 = 2.49360555267965238987089396762E0;
#[allow(clippy::excessive_precision)]
const A1110: f64 = -3.0467644718982195003823669022E0;
#[allow(clippy::excessive_precision)]
const A121: f64 = 2.27331014751653820792359768449E0;
#[allow(clippy::excessive_precision)]
const A124: f64 = -1.05344954667372501984066689879E1;
#[allow(clippy::excessive_precision)]
const A125: f64 = -2.00087205822486249909675718444E0;
#[allow(clippy::excessive_precision)]
const A126: f64 = -1.79589318631187989172765950534E1;
#[allow(clippy::excessive_precision)]
const A127: f64 = 2.79488845294199600508499808837E1;
#[allow(clippy::excessive_precision)]
const A128: f64 = -2.85899827713502369474065508674E0;
#[allow(clippy::excessive_precision)]
const A129: f64 = -8.87285693353062954433549289258E0;
#[allow(clippy::excessive_precision)]
const A1210: f64 = 1.23605671757943030647266201528E1;
#[allow(clippy::excessive_precision)]
const A1211: f64 = 6.43392746015763530355970484046E-1;

#[allow(clippy::excessive_precision)]
const A141: f64 = 5.61675022830479523392909219681E-2;
#[allow(clippy::excessive_precision)]
const A147: f64 = 2.53500210216624811088794765333E-1;
#[allow(clippy::excessive_precision)]
const A148: f64 = -2.46239037470802489917441475441E-1;
#[allow(clippy::excessive_precision)]
const A149: f64 = -1.24191423263816360469010140626E-1;
#[allow(clippy::excessive_precision)]
const A1410: f64 = 1.5329179827876569731206322685E-1;
#[allow(clippy::excessive_precision)]
const A1411: f64 = 8.20105229563468988491666602057E-3;
#[allow(clippy::excessive_precision)]
const A1412: f64 = 7.56789766054569976138603589584E-3;
#[allow(clippy::excessive_precision)]
const A1413: f64 = -8.298E-3;

#[allow(clippy::excessive_precision)]
const A151: f64 = 3.18346481635021405060768473261E-2;
#[allow(clippy::excessive_precision)]
const A156: f64 = 2.83009096723667755288322961402E-2;
#[allow(clippy::excessive_precision)]
const A157: f64 = 5.35419883074385676223797384372E-2;
#[allow(clippy::excessive_precision)]
const A158: f64 = -5.49237485713909884646569340306E-2;
#[allow(clippy::excessive_precision)]
const A1511: f64 = -1.08347328697249322858509316994E-4;
#[allow(clippy::excessive_precision)]
const A1512: f64 = 3.82571090835658412954920192323E-4;
#[allow(clippy::excessive_precision)]
const A1513: f64 = -3.40465008687404560802977114492E-4;
#[allow(clippy::excessive_precision)]
const A1514: f64 = 1.41312443674632500278074618366E-1;
#[allow(clippy::excessive_precision)]
const A161: f64 = -4.28896301583791923408573538692E-1;
#[allow(clippy::excessive_precision)]
const A166: f64 = -4.69762141536116384314449447206E0;
#[allow(clippy::excessive_precision)]
const A167: f64 = 7.68342119606259904184240953878E0;
#[allow(clippy::excessive_precision)]
const A168: f64 = 4.06898981839711007970213554331E0;
#[allow(clippy::excessive_precision)]
const A169: f64 = 3.56727187455281109270669543021E-1;
#[allow(clippy::excessive_precision)]
const A1613: f64 = -1.39902416515901462129418009734E-3;
#[allow(clippy::excessive_precision)]
const A1614: f64 = 2.9475147891527723389556272149E0;
#[allow(clippy::excessive_precision)]
const A1615: f64 = -9.15095847217987001081870187138E0;

#[allow(clippy::excessive_precision)]
const B1: f64 = 5.42937341165687622380535766363E-2;
#[allow(clippy::excessive_precision)]
const B6: f64 = 4.45031289275240888144113950566E0;
#[allow(clippy::excessive_precision)]
const B7: f64 = 1.89151789931450038304281599044E0;
#[allow(clippy::excessive_precision)]
const B8: f64 = -5.8012039600105847814672114227E0;
#[allow(clippy::excessive_precision)]
const B9: f64 = 3.1116436695781989440891606237E-1;
#[allow(clippy::excessive_precision)]
const B10: f64 = -1.52160949662516078556178806805E-1;
#[allow(clippy::excessive_precision)]
const B11: f64 = 2.01365400804030348374776537501E-1;
#[allow(clippy::excessive_precision)]
const B12: f64 = 4.47106157277725905176885569043E-2;

#[allow(clippy::excessive_precision)]
const BHH1: f64 = 0.244094488188976377952755905512E+00;
#[allow(clippy::excessive_precision)]
const BHH2: f64 = 0.733846688281611857341361741547E+00;
#[allow(clippy::excessive_precision)]
const BHH3: f64 = 0.220588235294117647058823529412E-01;

#[allow(clippy::excessive_precision)]
const C2: f64 = 0.526001519587677318785587544488E-01;
#[allow(clippy::excessive_precision)]
const C3: f64 = 0.789002279381515978178381316732E-01;
#[allow(clippy::excessive_precision)]
const C4: f64 = 0.118350341907227396726757197510E+00;
#[allow(clippy::excessive_precision)]
const C5: f64 = 0.281649658092772603273242802490E+00;
#[allow(clippy::excessive_precision)]
const C6: f64 = 0.333333333333333333333333333333E+00;
#[allow(clippy::excessive_precision)]
const C7: f64 = 0.25E+00;
#[allow(clippy::excessive_precision)]
const C8: f64 = 0.307692307692307692307692307692E+00;
#[allow(clippy::excessive_precision)]
const C9: f64 = 0.651282051282051282051282051282E+00;
#[allow(clippy::excessive_precision)]
const C10: f64 = 0.6E+00;
#[allow(clippy::excessive_precision)]
const C11: f64 = 0.857142857142857142857142857142E+00;
#[allow(clippy::excessive_precision)]
const C14: f64 = 0.1E+00;
#[allow(clippy::excessive_precision)]
const C15: f64 = 0.2E+00;
#[allow(clippy::excessive_precision)]
const C16: f64 = 0.777777777777777777777777777778E+00;

#[allow(clippy::excessive_precision)]
const ER1: f64 = 0.1312004499419488073250102996E-01;
#[allow(clippy::excessive_precision)]
const ER6: f64 = -0.1225156446376204440720569753E+01;
#[allow(clippy::excessive_precision)]
const ER7: f64 = -0.4957589496572501915214079952E+00;
#[allow(clippy::excessive_precision)]
const ER8: f64 = 0.1664377182454986536961530415E+01;
#[allow(clippy::excessive_precision)]
const ER9: f64 = -0.3503288487499736816886487290E+00;
#[allow(clippy::excessive_precision)]
const ER10: f64 = 0.3341791187130174790297318841E+00;
#[allow(clippy::excessive_precision)]
const ER11: f64 = 0.8192320648511571246570742613E-01;
#[allow(clippy::excessive_precision)]
const ER12: f64 = -0.2235530786388629525884427845E-01;

#[allow(clippy::excessive_precision)]
const D41: f64 = -0.84289382761090128651353491142E+01;
#[allow(clippy::excessive_precision)]
const D46: f64 = 0.56671495351937776962531783590E+00;
#[allow(clippy::excessive_precision)]
const D47: f64 = -0.30689499459498916912797304727E+01;
#[allow(clippy::excessive_precision)]
const D48: f64 = 0.23846676565120698287728149680E+01;
#[allow(clippy::excessive_precision)]
const D49: f64 = 0.21170345824450282767155149946E+01;
#[allow(clippy::excessive_precision)]
const D410: f64 = -0.87139158377797299206789907490E+00;
#[allow(clippy::excessive_precision)]
const D411: f64 = 0.22404374302607882758541771650E+01;
#[allow(clippy::excessive_precision)]
const D412: f64 = 0.63157877876946881815570249290E+00;
#[allow(clippy::excessive_precision)]
const D413: f64 = -0.88990336451333310820698117400E-01;
#[allow(clippy::excessive_precision)]
const D414: f64 = 0.18148505520854727256656404962E+02;
#[allow(clippy::excessive_precision)]
const D415: f64 = -0.91946323924783554000451984436E+01;
#[allow(clippy::excessive_precision)]
const D416: f64 = -0.44360363875948939664310572000E+01;

#[allow(clippy::excessive_precision)]
const D51: f64 = 0.10427508642579134603413151009E+02;
#[allow(clippy::excessive_precision)]
const D56: f64 = 0.24228349177525818288430175319E+03;
#[allow(clippy::excessive_precision)]
const D57: f64 = 0.16520045171727028198505394887E+03;
#[allow(clippy::excessive_precision)]
const D58: f64 = -0.37454675472269020279518312152E+03;
#[allow(clippy::excessive_precision)]
const D59: f64 = -0.22113666853125306036270938578E+02;
#[allow(clippy::excessive_precision)]
const D510: f64 = 0.77334326684722638389603898808E+01;
#[allow(clippy::excessive_precision)]
const D511: f64 = -0.30674084731089398182061213626E+02;
#[allow(clippy::excessive_precision)]
const D512: f64 = -0.93321305264302278729567221706E+01;
#[allow(clippy::excessive_precision)]
const D513: f64 = 0.15697238121770843886131091075E+02;
#[allow(clippy::excessive_precision)]
const D514: f64 = -0.31139403219565177677282850411E+02;
#[allow(clippy::excessive_precision)]
const D515: f64 = -0.93529243588444783865713862664E+01;
#[allow(clippy::excessive_precision)]
const D516: f64 = 0.35816841486394083752465898540E+02;

#[allow(clippy::excessive_precision)]
const D61: f64 = 0.19985053242002433820987653617E+02;
#[allow(clippy::excessive_precision)]
const D66: f64 = -0.38703730874935176555105901742E+03;
#[allow(clippy::excessive_precision)]
const D67: f64 = -0.18917813819516756882830838328E+03;
#[allow(clippy::excessive_precision)]
const D68: f64 = 0.52780815920542364900561016686E+03;
#[allow(clippy::excessive_precision)]
const D69: f64 = -0.11573902539959630126141871134E+02;
#[allow(clippy::excessive_precision)]
const D610: f64 = 0.68812326946963000169666922661E+01;
#[allow(clippy::excessive_precision)]
const D611: f64 = -0.10006050966910838403183860980E+01;
#[allow(clippy::excessive_precision)]
const D612: f64 = 0.77771377980534432092869265740E+00;
#[allow(clippy::excessive_precision)]
const D613: f64 = -0.27782057523535084065932004339E+01;
#[allow(clippy::excessive_precision)]
const D614: f64 = -0.60196695231264120758267380846E+02;
#[allow(clippy::excessive_precision)]
const D615: f64 = 0.84320405506677161018159903784E+02;
#[allow(clippy::excessive_precision)]
const D616: f64 = 0.11992291136182789328035130030E+02;

#[allow(clippy::excessive_precision)]
const D71: f64 = -0.25693933462703749003312586129E+02;
#[allow(clippy::excessive_precision)]
const D76: f64 = -0.15418974869023643374053993627E+03;
#[allow(clippy::excessive_precision)]
const D77: f64 = -0.23152937917604549567536039109E+03;
#[allow(clippy::excessive_precision)]
const D78: f64 = 0.35763911791061412378285349910E+03;
#[allow(clippy::excessive_precision)]
const D79: f64 = 0.93405324183624310003907691704E+02;
#[allow(clippy::excessive_precision)]
const D710: f64 = -0.37458323136451633156875139351E+02;
#[allow(clippy::excessive_precision)]
const D711: f64 = 0.10409964950896230045147246184E+03;
#[allow(clippy::excessive_precision)]
const D712: f64 = 0.29840293426660503123344363579E+02;
#[allow(clippy::excessive_precision)]
const D713: f64 = -0.43533456590011143754432175058E+02;
#[allow(clippy::excessive_precision)]
const D714: f64 = 0.96324553959188282948394950600E+02;
#[allow(clippy::excessive_precision)]
const D715: f64 = -0.39177261675615439165231486172E+02;
#[allow(clippy::excessive_precision)]
const D716: f64 = -0.14972683625798562581422125276E+03;