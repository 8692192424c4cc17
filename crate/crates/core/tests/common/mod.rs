//! Helpers shared by the integration tests: independent oracles and the
//! property checks used both by the proptest suite and the acceptance run.

#![allow(dead_code)]

use std::f64::consts::PI;

use nerve_orbits::energy::{self, AutonomousSystem, LevelRule};
use nerve_orbits::flow::{self, IntegratorSettings, PhaseState};
use nerve_orbits::model::{ModifiedNonlinearity, Nonlinearity, SplitStrategy, SystemParams, Weight};
use nerve_orbits::orbits::{Annulus, DEDUP_TOL};
use nerve_orbits::rotation;
use nerve_orbits::Result;

pub const G: f64 = 0.1;
pub const A: f64 = 0.6;

/// Plain bisection, written out so it shares no code with the library.
pub fn oracle_bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    assert!(flo * f(hi) <= 0.0, "no sign change on [{lo}, {hi}]");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Center of the cubic model: the root of `(1 - s)(s - a) = g / n̄` right of
/// `a` and left of the parabola's vertex.
pub fn center_oracle(nbar: f64) -> f64 {
    let vertex = 0.5 * (1.0 + A);
    oracle_bisect(|s| (1.0 - s) * (s - A) - G / nbar, A, vertex)
}

pub fn cubic_f0() -> ModifiedNonlinearity {
    ModifiedNonlinearity::with_default_k0(Nonlinearity::cubic(A).unwrap()).unwrap()
}

pub fn constant(nbar: f64) -> SystemParams {
    SystemParams::reference(Weight::constant(1.0, nbar).unwrap())
}

/// Two-level weight `n1` on `]0, alpha[`, `n0` on `]alpha, beta[` split at the plateau.
pub fn two_level(beta: f64, alpha: f64, n1: f64, n0: f64) -> SystemParams {
    let w = Weight::two_level(beta, alpha, n1, n0)
        .unwrap()
        .split(SplitStrategy::PlateauValue)
        .unwrap();
    SystemParams::reference(w)
}

pub fn autonomous(nbar: f64) -> AutonomousSystem {
    AutonomousSystem::new(G, nbar, cubic_f0()).unwrap()
}

/// `max |E(z(t)) - E(z0)|` along the constant-weight flow from a point of the
/// level curve at angle `theta` and level fraction `lambda`.
pub fn energy_drift(nbar: f64, lambda: f64, theta: f64, span: f64, s: &IntegratorSettings) -> Result<(f64, f64)> {
    let sys = autonomous(nbar);
    let band = energy::choose_band(&sys)?;
    let lc = energy::level_curve(&sys, &band, LevelRule::Fraction(lambda))?;
    let z0 = lc.point_at(theta);
    let p = SystemParams::reference(Weight::constant(1.0, nbar)?);
    let traj = flow::integrate(&p, z0, 0.0, span, s)?;
    let e0 = energy::energy(z0, &sys);
    let drift = traj
        .resample(span / 400.0)
        .iter()
        .map(|&(_, z)| (energy::energy(z, &sys) - e0).abs())
        .fold(0.0, f64::max);
    Ok((drift, e0))
}

/// Distance between `ζ(t2, t0, z0)` and `ζ(t2, t1, ζ(t1, t0, z0))`, and the
/// integrator tolerance `rel · max ‖ζ‖ + abs` along the direct solution.
pub fn semigroup_gap(p: &SystemParams, z0: PhaseState, t0: f64, t1: f64, t2: f64, s: &IntegratorSettings) -> Result<(f64, f64)> {
    let direct = flow::integrate_sparse(p, z0, t0, t2, s)?;
    let mid = flow::integrate_sparse(p, z0, t0, t1, s)?.end();
    let composed = flow::integrate_sparse(p, mid, t1, t2, s)?.end();
    let scale = direct.samples().iter().map(|(_, z)| z.norm()).fold(0.0, f64::max);
    Ok((direct.end().dist(composed), s.rel_tol * scale + s.abs_tol))
}

/// `rot_m` at `s` and at ten times tighter tolerances.
pub fn rot_refinement(p: &SystemParams, z0: PhaseState, q0: PhaseState, m: u32, s: &IntegratorSettings) -> Result<(f64, f64)> {
    let coarse = rotation::rot_m(z0, q0, m, p, s)?;
    let fine = rotation::rot_m(z0, q0, m, p, &s.tightened(10.0))?;
    Ok((coarse, fine))
}

/// Exhaustive fixed-point oracle for `φ^m` on the annulus.
///
/// The displacement `d(z) = φ^m(z) - z` is tabulated on a Cartesian grid
/// covering the outer disc. The winding number of `d` around each cell is
/// computed with edges subdivided until `d` turns by less than a right angle
/// between neighbouring samples, so that fast rotation of `d` near strongly
/// unstable orbits is not aliased. Cells around which `d` winds, or turns by
/// more than a half turn, are refined as a quadtree; grid points where `|d|` is a local minimum below
/// `candidate_cut` are added as candidates too. Each candidate is polished by
/// compass search on `|d|`, and points with `|d| < accept` that lie in the
/// annulus are kept, merged at [`DEDUP_TOL`].
pub struct GridOracle {
    pub cells: usize,
    pub candidate_cut: f64,
    pub accept: f64,
    /// Bisection depth for cell edges and for the quadtree.
    pub depth: u32,
    /// A cell is cleared when `min |d| > exclusion · max |d_i - d_j|` over
    /// its corners.
    pub exclusion: f64,
}

impl Default for GridOracle {
    fn default() -> Self {
        GridOracle {
            cells: 160,
            candidate_cut: 0.25,
            accept: 1e-9,
            depth: 10,
            exclusion: 2.0,
        }
    }
}

impl GridOracle {
    pub fn run(&self, ann: &Annulus, m: u32, p: &SystemParams, s: &IntegratorSettings) -> Vec<PhaseState> {
        let r = ann.outer_radius.max(ann.q0.norm() + ann.outer_radius);
        let n = self.cells;
        let h = 2.0 * r / n as f64;
        let node = |i: usize, j: usize| PhaseState::new(-r + i as f64 * h, -r + j as f64 * h);
        let disp = |z: PhaseState| -> Option<PhaseState> {
            flow::poincare_map(p, z, m, s).ok().filter(|w| w.is_finite()).map(|w| w - z)
        };

        let mut grid = vec![None; (n + 1) * (n + 1)];
        for i in 0..=n {
            for j in 0..=n {
                let z = node(i, j);
                // points far outside the outer disc can never be accepted
                if z.norm() <= r + 2.0 * h {
                    grid[i * (n + 1) + j] = disp(z);
                }
            }
        }
        let at = |i: usize, j: usize| grid[i * (n + 1) + j];

        let mut candidates = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let corners = [at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)];
                if corners.iter().any(Option::is_none) {
                    continue;
                }
                let cell = Cell {
                    corner: node(i, j),
                    size: h,
                    d: corners.map(Option::unwrap),
                };
                let (suspicious, winding) = self.suspicious(&cell, &disp);
                if suspicious {
                    self.refine(cell, winding, &disp, self.depth, &mut candidates);
                }
            }
        }
        for i in 1..n {
            for j in 1..n {
                let Some(d) = at(i, j) else { continue };
                let v = d.norm();
                if v > self.candidate_cut {
                    continue;
                }
                let is_min = (i - 1..=i + 1)
                    .flat_map(|a| (j - 1..=j + 1).map(move |b| (a, b)))
                    .filter(|&ab| ab != (i, j))
                    .all(|(a, b)| at(a, b).map_or(true, |w| w.norm() >= v));
                if is_min {
                    candidates.push((node(i, j), h));
                }
            }
        }

        let mut found: Vec<PhaseState> = Vec::new();
        let norm = |z: PhaseState| disp(z).map_or(f64::INFINITY, |d| d.norm());
        for (c, step) in candidates {
            // compass search stalls in the narrow valleys of |d| around
            // strongly unstable orbits, where a difference Newton step does not
            let compass = compass_minimize(norm, c, step);
            let newton = secant_polish(&disp, c);
            let (z, v) = if newton.1 < compass.1 { newton } else { compass };
            if v < self.accept && ann.contains(z) && found.iter().all(|f| f.dist(z) >= DEDUP_TOL) {
                found.push(z);
            }
        }
        found.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        found
    }

    /// Winding number of `d` along the boundary of `cell`, counter-clockwise,
    /// and the total absolute angle `d` turns on the way.
    fn cell_winding(&self, cell: &Cell, disp: &impl Fn(PhaseState) -> Option<PhaseState>) -> (i32, f64) {
        let z = cell.corners();
        let (mut total, mut turning) = (0.0, 0.0);
        for k in 0..4 {
            let (a, b) = (z[k], z[(k + 1) % 4]);
            let (net, abs) = edge_turn(disp, a, cell.d[k], b, cell.d[(k + 1) % 4], self.depth);
            total += net;
            turning += abs;
        }
        ((total / (2.0 * PI)).round() as i32, turning)
    }

    /// A cell may hide zeros unless `d` is far from zero at every corner
    /// compared with how much it varies across the cell. Winding around the
    /// cell settles it too; a pair of zeros of opposite index, though, has net
    /// winding zero and is caught only by the first test.
    fn suspicious(&self, cell: &Cell, disp: &impl Fn(PhaseState) -> Option<PhaseState>) -> (bool, i32) {
        let (w, _) = self.cell_winding(cell, disp);
        let smallest = cell.d.iter().map(|d| d.norm()).fold(f64::INFINITY, f64::min);
        let spread = (0..4)
            .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
            .map(|(i, j)| cell.d[i].dist(cell.d[j]))
            .fold(0.0, f64::max);
        (w != 0 || smallest <= self.exclusion * spread, w)
    }

    /// Descends into the quarters of `cell` that may hide zeros; the centers
    /// of the smallest cells with nonzero winding become candidates.
    fn refine(
        &self,
        cell: Cell,
        winding: i32,
        disp: &impl Fn(PhaseState) -> Option<PhaseState>,
        depth: u32,
        out: &mut Vec<(PhaseState, f64)>,
    ) {
        let center = cell.corner + PhaseState::new(0.5 * cell.size, 0.5 * cell.size);
        if depth == 0 || cell.size < 1e-9 {
            if winding != 0 {
                out.push((center, cell.size));
            }
            return;
        }
        let half = 0.5 * cell.size;
        let c = cell.corner;
        let mid = |dx: f64, dy: f64| -> Option<PhaseState> { disp(c + PhaseState::new(dx, dy)) };
        let (Some(bottom), Some(right), Some(top), Some(left), Some(middle)) = (
            mid(half, 0.0),
            mid(cell.size, half),
            mid(half, cell.size),
            mid(0.0, half),
            mid(half, half),
        ) else {
            out.push((center, cell.size));
            return;
        };
        let [d00, d10, d11, d01] = cell.d;
        let quarters = [
            Cell { corner: c, size: half, d: [d00, bottom, middle, left] },
            Cell { corner: c + PhaseState::new(half, 0.0), size: half, d: [bottom, d10, right, middle] },
            Cell { corner: c + PhaseState::new(half, half), size: half, d: [middle, right, d11, top] },
            Cell { corner: c + PhaseState::new(0.0, half), size: half, d: [left, middle, top, d01] },
        ];
        let mut inner_winding = 0;
        for q in quarters {
            let (suspicious, w) = self.suspicious(&q, disp);
            inner_winding += w;
            if suspicious {
                self.refine(q, w, disp, depth - 1, out);
            }
        }
        // the quarters lose winding when a zero sits on one of their edges
        if inner_winding != winding {
            out.push((center, cell.size));
        }
    }
}

/// Square cell with lower-left `corner` and the displacement at its corners,
/// counter-clockwise from the lower-left.
#[derive(Clone, Copy)]
struct Cell {
    corner: PhaseState,
    size: f64,
    d: [PhaseState; 4],
}

impl Cell {
    fn corners(&self) -> [PhaseState; 4] {
        let (c, h) = (self.corner, self.size);
        [c, c + PhaseState::new(h, 0.0), c + PhaseState::new(h, h), c + PhaseState::new(0.0, h)]
    }
}

/// Net and absolute angle `d` turns along the segment `a → b`, bisecting
/// while neighbouring samples differ by a right angle or more.
fn edge_turn(
    disp: &impl Fn(PhaseState) -> Option<PhaseState>,
    a: PhaseState,
    da: PhaseState,
    b: PhaseState,
    db: PhaseState,
    depth: u32,
) -> (f64, f64) {
    let delta = principal_angle(db.y.atan2(db.x) - da.y.atan2(da.x));
    if delta.abs() < 0.5 * PI || depth == 0 {
        return (delta, delta.abs());
    }
    let m = a + (b - a) * 0.5;
    match disp(m) {
        Some(dm) => {
            let (n1, a1) = edge_turn(disp, a, da, m, dm, depth - 1);
            let (n2, a2) = edge_turn(disp, m, dm, b, db, depth - 1);
            (n1 + n2, a1 + a2)
        }
        None => (delta, delta.abs()),
    }
}

fn principal_angle(mut delta: f64) -> f64 {
    while delta > PI {
        delta -= 2.0 * PI;
    }
    while delta < -PI {
        delta += 2.0 * PI;
    }
    delta
}

/// Winding number of a closed polygon of displacement vectors.
pub fn winding(d: &[PhaseState]) -> i32 {
    let total: f64 = (0..d.len())
        .map(|k| {
            let (a, b) = (d[k], d[(k + 1) % d.len()]);
            principal_angle(b.y.atan2(b.x) - a.y.atan2(a.x))
        })
        .sum();
    (total / (2.0 * PI)).round() as i32
}

/// Derivative-free pattern search over eight compass directions.
pub fn compass_minimize(f: impl Fn(PhaseState) -> f64, start: PhaseState, step0: f64) -> (PhaseState, f64) {
    let dirs = [
        (1.0, 0.0),
        (-1.0, 0.0),
        (0.0, 1.0),
        (0.0, -1.0),
        (0.7071067811865476, 0.7071067811865476),
        (-0.7071067811865476, 0.7071067811865476),
        (0.7071067811865476, -0.7071067811865476),
        (-0.7071067811865476, -0.7071067811865476),
    ];
    let mut z = start;
    let mut v = f(z);
    let mut step = step0;
    let mut evals = 0;
    while step > 1e-13 && v > 1e-14 && evals < 20_000 {
        let mut best = (z, v);
        for &(dx, dy) in &dirs {
            let trial = z + PhaseState::new(step * dx, step * dy);
            let fv = f(trial);
            evals += 1;
            if fv < best.1 {
                best = (trial, fv);
            }
        }
        if best.1 < v {
            (z, v) = best;
            step *= 1.5;
        } else {
            step *= 0.5;
        }
    }
    (z, v)
}

/// Newton's method on `d` with central-difference Jacobians, keeping only
/// iterates that reduce `|d|`.
pub fn secant_polish(disp: &impl Fn(PhaseState) -> Option<PhaseState>, start: PhaseState) -> (PhaseState, f64) {
    let norm = |z: PhaseState| disp(z).map_or(f64::INFINITY, |d| d.norm());
    let mut z = start;
    let mut v = norm(z);
    for _ in 0..30 {
        let Some(d) = disp(z) else { break };
        let e = 1e-7 * z.norm().max(1.0);
        let column = |dz: PhaseState| -> Option<PhaseState> { Some((disp(z + dz)? - disp(z - dz)?) * (0.5 / e)) };
        let (Some(cx), Some(cy)) = (column(PhaseState::new(e, 0.0)), column(PhaseState::new(0.0, e))) else { break };
        let det = cx.x * cy.y - cy.x * cx.y;
        if !(det.abs() > 0.0) {
            break;
        }
        let step = PhaseState::new((cy.y * d.x - cy.x * d.y) / det, (cx.x * d.y - cx.y * d.x) / det);
        let mut t = 1.0;
        let mut improved = false;
        while t > 1e-4 {
            let trial = z - step * t;
            let tv = norm(trial);
            if tv < v {
                (z, v) = (trial, tv);
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved || v < 1e-14 {
            break;
        }
    }
    (z, v)
}

/// Every point of `a` has a partner in `b` within `tol`.
pub fn covered(a: &[PhaseState], b: &[PhaseState], tol: f64) -> bool {
    a.iter().all(|x| b.iter().any(|y| x.dist(*y) < tol))
}
