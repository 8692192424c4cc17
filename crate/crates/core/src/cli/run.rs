//! Scenario runners. Each returns a [`Report`]; nothing here touches the
//! file system.

use std::fmt::Write as _;

use rayon::prelude::*;

use super::config::{Scenario, Task};
use crate::energy::{self, AutonomousSystem};
use crate::error::{Error, Result};
use crate::flow::{self, PhaseState, Reversed};
use crate::model::{SplitStrategy, SystemParams, Weight};
use crate::orbits::{self, PeriodicOrbit, SearchOptions, TwistCertificate, TwistSetup};
use crate::rotation;

/// A CSV table with its file name.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub file: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    /// Also printed on standard output.
    pub echo: bool,
}

impl Table {
    fn new(file: impl Into<String>, header: &[&'static str]) -> Self {
        Table {
            file: file.into(),
            header: header.to_vec(),
            rows: Vec::new(),
            echo: false,
        }
    }

    fn echoed(mut self) -> Self {
        self.echo = true;
        self
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Summary lines plus the tables to write.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub summary: Vec<String>,
    pub tables: Vec<Table>,
}

impl Report {
    fn line(&mut self, text: impl Into<String>) {
        self.summary.push(text.into());
    }

    pub fn table(&self, file: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.file == file)
    }
}

/// Extra switches that only affect what is emitted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Tabulate every found orbit over one period.
    pub emit_orbits: bool,
}

pub fn run_scenario(sc: &Scenario, task: Task, opts: RunOptions) -> Result<Report> {
    sc.validate_for(task)?;
    sc.tol.validate()?;
    match task {
        Task::Portrait => portrait(sc),
        Task::Timemap => timemap(sc),
        Task::Rotation => rotation_table(sc),
        Task::OuterRadius => outer_radius(sc),
        Task::FindOrbits => find_orbits(sc, opts),
        Task::Subharmonics => subharmonics(sc, opts),
        Task::Sweep => sweep(sc),
    }
}

fn fmt(v: f64) -> String {
    format!("{v:?}")
}

fn portrait(sc: &Scenario) -> Result<Report> {
    let p = sc.params()?;
    let t = sc.portrait.half_span;
    let mut report = Report::default();
    report.line(format!(
        "portrait: n̄ = {}, g = {}, a = {}, {} segments over [-{t}, {t}]",
        p.weight.nbar(),
        sc.g,
        sc.a,
        sc.portrait.x0.len()
    ));

    let segments: Vec<Result<Vec<(f64, PhaseState)>>> = sc
        .portrait
        .x0
        .par_iter()
        .map(|&x0| {
            let z0 = PhaseState::new(x0, 0.0);
            let fwd = flow::integrate(&p, z0, 0.0, t, &sc.tol)?.resample(sc.dt_out);
            let bwd = flow::integrate(&Reversed(&p), z0, 0.0, t, &sc.tol)?.resample(sc.dt_out);
            let mut seg: Vec<(f64, PhaseState)> = bwd.into_iter().skip(1).rev().map(|(s, z)| (-s, z)).collect();
            seg.extend(fwd);
            Ok(seg)
        })
        .collect();
    for (i, (seg, &x0)) in segments.into_iter().zip(&sc.portrait.x0).enumerate() {
        let mut table = Table::new(format!("portrait_{i:03}.csv"), &["t", "x", "y"]);
        for (s, z) in seg? {
            table.push(vec![fmt(s), fmt(z.x), fmt(z.y)]);
        }
        report.line(format!("  segment {i}: x0 = {x0}"));
        report.tables.push(table);
    }

    // g s against n F(s) for the equilibrium picture
    let f = sc.nonlinearity()?;
    let mut curves = Table::new("curves.csv", &["s", "gs", "n", "nF"]);
    for &n in &sc.portrait.curve_n {
        for i in 0..=200 {
            let s = i as f64 / 200.0;
            curves.push(vec![fmt(s), fmt(sc.g * s), fmt(n), fmt(n * f.eval(s))]);
        }
        let sys = AutonomousSystem::new(sc.g, n, f.clone())?;
        match energy::equilibrium(&sys) {
            Ok(c) => report.line(format!("  n = {n}: center a_n = {c:.9}")),
            Err(_) => report.line(format!("  n = {n}: no center in ]a, 1[")),
        }
    }
    report.tables.push(curves);
    Ok(report)
}

fn timemap(sc: &Scenario) -> Result<Report> {
    let f0 = sc.nonlinearity()?;
    let mut report = Report::default();
    let mut table = Table::new("timemap.csv", &["nbar", "a_nbar", "c", "b_minus", "b_plus", "tau", "bound"]).echoed();
    for &nbar in &sc.timemap_nbar {
        let sys = AutonomousSystem::new(sc.g, nbar, f0.clone())?;
        let band = energy::choose_band(&sys)?;
        let lc = energy::level_curve(&sys, &band, sc.level)?;
        let tau = energy::time_map(&sys, &lc)?;
        let bound = band.period_bound(sc.g, nbar);
        table.push(vec![
            fmt(nbar),
            fmt(lc.a_nbar),
            fmt(lc.c),
            fmt(lc.b_minus),
            fmt(lc.b_plus),
            fmt(tau),
            fmt(bound),
        ]);
        if table.rows.len() == 1 {
            report.line(format!(
                "band [a, b] = [{}, {}], d0 = {}, mu0 = {}",
                band.a, band.b, band.d0, band.mu0
            ));
        }
    }
    report.line(format!("time map over {} values of n̄", table.rows.len()));
    report.tables.push(table);
    Ok(report)
}

/// Configured reference point, or the center of the comparison system.
fn reference_point(sc: &Scenario, p: &SystemParams) -> Result<PhaseState> {
    match sc.rotation.q0 {
        Some((x, y)) => Ok(PhaseState::new(x, y)),
        None => {
            let sys = AutonomousSystem::from_params(p)?;
            Ok(PhaseState::new(energy::equilibrium(&sys)?, 0.0))
        }
    }
}

fn rotation_table(sc: &Scenario) -> Result<Report> {
    let p = sc.params()?;
    let q0 = reference_point(sc, &p)?;
    let rots: Vec<Result<f64>> = sc
        .rotation
        .points
        .par_iter()
        .map(|&(x, y)| rotation::rot_m(PhaseState::new(x, y), q0, sc.m, &p, &sc.tol))
        .collect();
    let mut table = Table::new("rotation.csv", &["x0", "y0", "rot"]).echoed();
    for (&(x, y), rot) in sc.rotation.points.iter().zip(rots) {
        table.push(vec![fmt(x), fmt(y), fmt(rot?)]);
    }
    let mut report = Report::default();
    report.line(format!("rot_{} about q0 = ({}, {})", sc.m, q0.x, q0.y));
    report.tables.push(table);
    Ok(report)
}

fn outer_radius(sc: &Scenario) -> Result<Report> {
    let p = sc.params()?;
    let q0 = reference_point(sc, &p)?;
    let found = rotation::outer_radius_search(q0, sc.m, &p, &sc.tol, sc.rotation.samples)?;
    let mut report = Report::default();
    report.line(format!("outer radius R0 = {}", found.radius));
    report.line(format!("sampled max rot_{} = {}", sc.m, found.max_rot));
    let mut table = Table::new("outer_circle.csv", &["x0", "y0", "rot"]);
    for c in &found.samples {
        table.push(vec![fmt(c.z.x), fmt(c.z.y), c.rot.map_or_else(String::new, fmt)]);
    }
    report.tables.push(table);
    Ok(report)
}

fn search_options(sc: &Scenario, target_n: u32) -> SearchOptions {
    SearchOptions {
        angular: sc.seeds.angular,
        radial: sc.seeds.radial,
        phases: sc.seeds.phases,
        target_n: (target_n > 0).then_some(target_n),
        ..SearchOptions::default()
    }
}

fn certificate_lines(report: &mut Report, p: &SystemParams, setup: &TwistSetup, cert: &TwistCertificate) {
    let lc = &setup.annulus.inner;
    report.line(format!("n̄ = {}, |ñ|₁ = {}", p.weight.nbar(), p.weight.ntilde_l1()));
    report.line(format!(
        "center a_n̄ = {}, level c = {}, b- = {}, b+ = {}",
        lc.a_nbar, lc.c, lc.b_minus, lc.b_plus
    ));
    report.line(format!("outer radius R = {}", setup.annulus.outer_radius));
    report.line(format!(
        "certificate m = {}, N = {}: inner min rot = {}, outer max rot = {}, non-q = {}, valid = {}",
        cert.m,
        cert.n,
        cert.inner_min_rot,
        cert.outer_max_rot,
        cert.nonq_ok,
        cert.is_valid()
    ));
    report.line(format!("largest certified N = {}", cert.max_certified_n()));
}

fn certificate_table(p: &SystemParams, setup: &TwistSetup, cert: &TwistCertificate) -> Table {
    let mut t = Table::new(
        "certificate.csv",
        &[
            "m",
            "N",
            "nbar",
            "ntilde_l1",
            "a_nbar",
            "c",
            "outer_radius",
            "inner_min_rot",
            "outer_max_rot",
            "nonq_ok",
            "valid",
            "max_certified_N",
        ],
    );
    t.push(vec![
        cert.m.to_string(),
        cert.n.to_string(),
        fmt(p.weight.nbar()),
        fmt(p.weight.ntilde_l1()),
        fmt(setup.annulus.inner.a_nbar),
        fmt(setup.annulus.inner.c),
        fmt(setup.annulus.outer_radius),
        fmt(cert.inner_min_rot),
        fmt(cert.outer_max_rot),
        cert.nonq_ok.to_string(),
        cert.is_valid().to_string(),
        cert.max_certified_n().to_string(),
    ]);
    t
}

const ORBIT_HEADER: [&str; 10] = [
    "x0", "y0", "m", "k", "crossings", "residual", "xmin", "xmax", "minimal", "class_id",
];

fn orbit_table(file: &str, orbits: &[&PeriodicOrbit]) -> Table {
    let mut t = Table::new(file, &ORBIT_HEADER).echoed();
    for o in orbits {
        t.push(vec![
            fmt(o.z0.x),
            fmt(o.z0.y),
            o.m.to_string(),
            o.rot_k.to_string(),
            o.zero_crossings.to_string(),
            fmt(o.residual),
            fmt(o.range.0),
            fmt(o.range.1),
            o.minimal_period_certified.to_string(),
            o.class_id.to_string(),
        ]);
    }
    t
}

fn orbit_trajectories(sc: &Scenario, p: &SystemParams, orbits: &[&PeriodicOrbit]) -> Result<Vec<Table>> {
    orbits
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let traj = flow::integrate(p, o.z0, 0.0, o.m as f64 * p.beta(), &sc.tol)?;
            let mut t = Table::new(format!("orbit_{i:03}.csv"), &["t", "x", "y"]);
            for (s, z) in traj.resample(sc.dt_out) {
                t.push(vec![fmt(s), fmt(z.x), fmt(z.y)]);
            }
            Ok(t)
        })
        .collect()
}

fn class_counts(report: &mut Report, orbits: &[&PeriodicOrbit], ks: &[u32]) {
    for &k in ks {
        let mut ids: Vec<usize> = orbits
            .iter()
            .filter(|o| o.rot_k == k as i64)
            .map(|o| o.class_id)
            .collect();
        ids.sort_unstable();
        ids.dedup();
        report.line(format!("  k = {k}: {} periodicity classes", ids.len()));
    }
}

fn find_orbits(sc: &Scenario, opts: RunOptions) -> Result<Report> {
    let p = sc.params()?;
    let setup = orbits::twist_setup(&p, sc.m, sc.level, &sc.tol)?;
    let probe = orbits::verify_twist(&setup.annulus, sc.m, sc.n.unwrap_or(1), &p, &sc.tol)?;
    let n = sc.n.unwrap_or_else(|| probe.max_certified_n());
    let cert = if n == probe.n {
        probe
    } else {
        orbits::verify_twist(&setup.annulus, sc.m, n, &p, &sc.tol)?
    };

    let mut report = Report::default();
    certificate_lines(&mut report, &p, &setup, &cert);
    let found = orbits::find_fixed_points(&setup.annulus, sc.m, &p, &sc.tol, &search_options(sc, n))?;
    let all: Vec<&PeriodicOrbit> = found.iter().collect();
    report.line(format!(
        "found {} fixed points of φ^{}, {} classes with k in 1..={n}",
        found.len(),
        sc.m,
        orbits::count_classes(&found, n)
    ));
    class_counts(&mut report, &all, &(1..=n).collect::<Vec<_>>());
    report.tables.push(certificate_table(&p, &setup, &cert));
    report.tables.push(orbit_table("orbits.csv", &all));
    if opts.emit_orbits {
        report.tables.extend(orbit_trajectories(sc, &p, &all)?);
    }
    Ok(report)
}

fn subharmonics(sc: &Scenario, opts: RunOptions) -> Result<Report> {
    let k = sc.k.ok_or_else(|| Error::config("K", "required for subharmonics"))?;
    let p = sc.params()?;
    let wanted = orbits::coprime_rotation_set(sc.m, k);
    let n = *wanted.last().expect("K >= 1");
    let setup = orbits::twist_setup(&p, sc.m, sc.level, &sc.tol)?;
    let cert = orbits::verify_twist(&setup.annulus, sc.m, n, &p, &sc.tol)?;

    let mut report = Report::default();
    report.line(format!(
        "rotation numbers co-prime with m = {}: {:?} (N = {n})",
        sc.m, wanted
    ));
    certificate_lines(&mut report, &p, &setup, &cert);
    let found = orbits::find_fixed_points(&setup.annulus, sc.m, &p, &sc.tol, &search_options(sc, n))?;
    let picked: Vec<&PeriodicOrbit> = found
        .iter()
        .filter(|o| o.rot_k > 0 && wanted.contains(&(o.rot_k as u32)))
        .collect();
    let reps: Vec<&PeriodicOrbit> = picked.iter().copied().filter(|o| o.representative).collect();
    let minimal = reps.iter().filter(|o| o.minimal_period_certified).count();
    let distinct = reps.iter().enumerate().all(|(i, a)| {
        reps[i + 1..]
            .iter()
            .all(|b| !orbits::same_periodicity_class(a, b, &p, &sc.tol))
    });
    report.line(format!(
        "{} orbits with k in {:?}, {} classes, {} with certified minimal period {}β",
        picked.len(),
        wanted,
        reps.len(),
        minimal,
        sc.m
    ));
    report.line(format!("class representatives pairwise distinct: {distinct}"));
    class_counts(&mut report, &picked, &wanted);
    report.tables.push(certificate_table(&p, &setup, &cert));
    report.tables.push(orbit_table("subharmonics.csv", &picked));
    if opts.emit_orbits {
        report.tables.extend(orbit_trajectories(sc, &p, &picked)?);
    }
    Ok(report)
}

/// Short machine-readable tag for a failed sweep cell.
pub fn failure_code(e: &Error) -> &'static str {
    match e {
        Error::NoEquilibrium { .. } => "no-equilibrium",
        Error::HypothesisViolation(_) => "hypothesis",
        Error::RadiusSearchFailure { .. } => "radius-search",
        Error::TrajectoryHitsReference { .. } => "hits-reference",
        Error::IntegrationFailure { .. } => "integration",
        Error::InvalidLevel { .. } => "invalid-level",
        Error::QuadratureNonConvergence { .. } => "quadrature",
        e if e.is_config() => "invalid-input",
        _ => "error",
    }
}

#[derive(Clone, Debug, PartialEq)]
struct Cell {
    nbar: f64,
    alpha: f64,
    m: u32,
}

#[derive(Clone, Debug, PartialEq)]
struct CellResult {
    ntilde_l1: Option<f64>,
    certified_n: u32,
    orbits_found: usize,
    status: &'static str,
}

fn sweep_cell(sc: &Scenario, cell: &Cell) -> CellResult {
    let mut ntilde_l1 = None;
    let outcome = (|| -> Result<(u32, usize)> {
        let weight = Weight::two_level(sc.beta, cell.alpha, cell.nbar, sc.sweep.n0)?.split(SplitStrategy::PlateauValue)?;
        ntilde_l1 = Some(weight.ntilde_l1());
        let p = SystemParams::new(sc.g, weight, sc.nonlinearity()?)?;
        let sys = AutonomousSystem::from_params(&p)?;
        energy::equilibrium(&sys)?;
        let setup = orbits::twist_setup(&p, cell.m, sc.level, &sc.tol)?;
        let cert = orbits::verify_twist(&setup.annulus, cell.m, 1, &p, &sc.tol)?;
        let n = cert.max_certified_n();
        if n == 0 {
            return Ok((0, 0));
        }
        let found = orbits::find_fixed_points(&setup.annulus, cell.m, &p, &sc.tol, &search_options(sc, n))?;
        Ok((n, orbits::count_classes(&found, n)))
    })();
    match outcome {
        Ok((certified_n, orbits_found)) => CellResult {
            ntilde_l1,
            certified_n,
            orbits_found,
            status: "ok",
        },
        Err(e) => CellResult {
            ntilde_l1,
            certified_n: 0,
            orbits_found: 0,
            status: failure_code(&e),
        },
    }
}

fn sweep(sc: &Scenario) -> Result<Report> {
    let mut cells = Vec::new();
    for &nbar in &sc.sweep.nbar {
        for &alpha in &sc.sweep.alpha {
            for &m in &sc.sweep.m {
                cells.push(Cell { nbar, alpha, m });
            }
        }
    }
    // results come back in grid order whatever the scheduling
    let results: Vec<CellResult> = cells.par_iter().map(|c| sweep_cell(sc, c)).collect();
    let mut table = Table::new(
        "sweep.csv",
        &["nbar", "alpha", "ntilde_l1", "m", "certified_N", "orbits_found", "status"],
    )
    .echoed();
    let mut failed = 0;
    for (c, r) in cells.iter().zip(&results) {
        if r.status != "ok" {
            failed += 1;
        }
        table.push(vec![
            fmt(c.nbar),
            fmt(c.alpha),
            r.ntilde_l1.map_or_else(String::new, fmt),
            c.m.to_string(),
            r.certified_n.to_string(),
            r.orbits_found.to_string(),
            r.status.to_string(),
        ]);
    }
    let mut report = Report::default();
    let mut line = format!("sweep: {} cells", cells.len());
    if failed > 0 {
        let _ = write!(line, ", {failed} failed");
    }
    report.line(line);
    report.tables.push(table);
    Ok(report)
}
