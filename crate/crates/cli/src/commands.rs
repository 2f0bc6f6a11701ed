//! One function per subcommand. Each returns the text for stdout and the
//! files to write; nothing here touches the filesystem.

use std::fmt::Write as _;

use mht_core::atlas::{
    bracket_and_solve_homoclinic, solve_ch, sweep_diagram, Axis, BifurcationDiagram, CurveKind, SweepOptions,
};
use mht_core::basins::{compute_basin, scan_b, BasinModel, BasinOptions, BasinReport};
use mht_core::dynamics::default_events;
use mht_core::equilibria::{all_equilibria, discriminant, positive_equilibria, Classification};
use mht_core::export::{basin_csv, dim_metadata, fmt, model_metadata, nondim_metadata, nullclines, Csv, Svg};
use mht_core::integrator::{integrate, IntegrateOptions, Termination};
use mht_core::manifolds::{saddle_branches, solve_homoclinic, BranchOptions, ManifoldStability};
use mht_core::model::{DimOrbitField, Frame, NondimParams, State};

use crate::config::{parse_list, parse_pair, CliError, CliResult, Params, RunConfig};

#[derive(Debug, Default, Clone, PartialEq)]
pub struct Output {
    pub stdout: String,
    pub files: Vec<(String, String)>,
}

impl Output {
    fn file(&mut self, name: &str, content: String) {
        self.files.push((name.to_string(), content));
    }
}

fn classification_style(c: Classification) -> (&'static str, &'static str) {
    if c.is_attractor() {
        ("black", "black")
    } else if c.is_repeller() {
        ("white", "black")
    } else {
        ("#888888", "black")
    }
}

pub fn equilibria(cfg: &RunConfig) -> CliResult<Output> {
    let p = cfg.nondim()?;
    let d = discriminant(&p);
    let mut out = Output::default();
    let mut csv = Csv::new("equilibria", nondim_metadata(&p), &["kind", "u", "v", "re1", "im1", "re2", "im2", "classification"]);
    let _ = writeln!(out.stdout, "Delta = {}", fmt(d.value));
    if positive_equilibria(&p).is_empty() {
        let _ = writeln!(out.stdout, "no positive equilibria");
    }
    let _ = writeln!(out.stdout, "{:<16} {:>12} {:>12}  {:<44} classification", "equilibrium", "u", "v", "eigenvalues");
    for e in all_equilibria(&p) {
        let [u, v] = e.xy();
        let [l1, l2] = e.eigenvalues;
        let eig = format!("{:.6e}{:+.6e}i, {:.6e}{:+.6e}i", l1.re, l1.im, l2.re, l2.im);
        let _ = writeln!(out.stdout, "{:<16} {u:>12.8} {v:>12.8}  {eig:<44} {}", e.kind.name(), e.classification.name());
        csv.row(vec![
            e.kind.name().into(),
            fmt(u),
            fmt(v),
            fmt(l1.re),
            fmt(l1.im),
            fmt(l2.re),
            fmt(l2.im),
            e.classification.name().into(),
        ]);
    }
    out.file("equilibria.csv", csv.render());
    Ok(out)
}

pub fn simulate(cfg: &RunConfig) -> CliResult<Output> {
    let start = cfg
        .get("start")
        .ok_or_else(|| CliError::Invalid("simulate needs `start = u,v`".into()))?;
    let (u0, v0) = parse_pair("start", start)?;
    if !(u0 >= 0.0 && v0 >= 0.0) {
        return Err(CliError::Invalid("start must lie in the closed first quadrant".into()));
    }
    let (field_meta, traj) = match cfg.params {
        Params::Nondim(p) => {
            let opts = IntegrateOptions {
                t_max: cfg.tmax.unwrap_or(1e3),
                tol: cfg.tol.unwrap_or(1e-9),
                ..IntegrateOptions::default()
            };
            let t = mht_core::dynamics::simulate(&p, State::nondim(u0, v0), &opts, &default_events(&p))?;
            (nondim_metadata(&p), t)
        }
        Params::Dim(d) => {
            let opts = IntegrateOptions {
                t_max: cfg.tmax.unwrap_or(1e3),
                tol: cfg.tol.unwrap_or(1e-9),
                frame: Frame::Dimensional,
                ..IntegrateOptions::default()
            };
            (dim_metadata(&d), integrate(&DimOrbitField(d), [u0, v0], &opts, &[]))
        }
    };
    let mut out = Output::default();
    let mut csv = Csv::new("simulate", field_meta, &["t", "u", "v"]);
    csv.meta("start", format!("{u0},{v0}"));
    csv.meta("termination", format!("{:?}", traj.termination));
    for (t, s) in traj.times.iter().zip(&traj.points) {
        csv.row(vec![fmt(*t), fmt(s[0]), fmt(s[1])]);
    }
    let [u, v] = traj.last();
    let _ = writeln!(
        out.stdout,
        "termination: {:?}\nfinal time: {}\nfinal state: ({}, {})\nsteps: {}",
        traj.termination,
        fmt(traj.final_time()),
        fmt(u),
        fmt(v),
        traj.accepted_steps
    );
    if matches!(traj.termination, Termination::StepFailure) {
        return Err(CliError::Numerical("step size underflow".into()));
    }
    out.file("trajectory.csv", csv.render());
    Ok(out)
}

fn basin_options(cfg: &RunConfig) -> BasinOptions {
    let d = BasinOptions::default();
    BasinOptions {
        t_max: cfg.tmax.unwrap_or(d.t_max),
        tol: cfg.tol.unwrap_or(d.tol),
        ..d
    }
}

fn branch_options(cfg: &RunConfig) -> CliResult<BranchOptions> {
    let mut bo = BranchOptions::default();
    if let Some(v) = cfg.get("eps") {
        bo.eps = crate::config::parse_f64("eps", v)?;
    }
    if let Some(v) = cfg.get("budget") {
        bo.budget = crate::config::parse_f64("budget", v)?;
    }
    Ok(bo)
}

fn params_title(p: &NondimParams) -> String {
    format!("M={} B={} C={} S={} Q={}", p.m, p.b, p.c, p.s, p.q)
}

pub fn portrait(cfg: &RunConfig) -> CliResult<Output> {
    let p = cfg.nondim()?;
    let window = cfg.window.unwrap_or_else(|| BasinModel::Nondim(p).default_window());
    let mut svg = Svg::new((window.u0, window.u1), (window.v0, window.v1));
    svg.title(&params_title(&p));
    if cfg.flag("basin")? {
        let (nx, ny) = cfg.res.unwrap_or((64, 64));
        let g = compute_basin(&BasinModel::Nondim(p), window, nx, ny, &basin_options(cfg))?;
        svg.basin(&g);
    }
    let (prey, pred) = nullclines(&p, window.u1, 400);
    svg.polyline(&prey, "#2a7f2a", 1.5, Some("6,3"));
    svg.polyline(&pred, "#7f2a7f", 1.5, Some("6,3"));

    let mut csv = Csv::new("portrait", nondim_metadata(&p), &["curve", "index", "u", "v"]);
    let n_traj: usize = match cfg.get("trajectories") {
        Some(v) => v
            .parse()
            .map_err(|_| CliError::Invalid(format!("trajectories: `{v}` is not an integer")))?,
        None => 4,
    };
    let opts = IntegrateOptions {
        t_max: cfg.tmax.unwrap_or(2e3),
        tol: cfg.tol.unwrap_or(1e-9),
        ..IntegrateOptions::default()
    };
    let events = default_events(&p);
    for i in 0..n_traj {
        for j in 0..n_traj {
            let s0 = [
                window.u0 + (window.u1 - window.u0) * (i as f64 + 0.5) / n_traj as f64,
                window.v0 + (window.v1 - window.v0) * (j as f64 + 0.5) / n_traj as f64,
            ];
            let t = integrate(&p, s0, &opts, &events);
            svg.polyline(&t.points, "#999999", 0.8, None);
            let name = format!("trajectory-{i}-{j}");
            for (k, s) in t.points.iter().enumerate() {
                csv.row(vec![name.clone(), k.to_string(), fmt(s[0]), fmt(s[1])]);
            }
        }
    }

    let mut out = Output::default();
    if positive_equilibria(&p).len() == 2 {
        match saddle_branches(&p, &branch_options(cfg)?) {
            Ok(branches) => {
                for (name, b) in ["Wu_up", "Wu_down", "Ws_up", "Ws_down"].iter().zip(&branches) {
                    let color = match b.stability {
                        ManifoldStability::Unstable => "#d62728",
                        ManifoldStability::Stable => "#1f77b4",
                    };
                    let pts = b.points();
                    svg.polyline(&pts, color, 2.0, None);
                    for (k, s) in pts.iter().enumerate() {
                        csv.row(vec![name.to_string(), k.to_string(), fmt(s[0]), fmt(s[1])]);
                    }
                    let _ = writeln!(out.stdout, "{name}: {}", b.terminus.describe());
                }
            }
            Err(e) => {
                let _ = writeln!(out.stdout, "warning: manifolds not traced ({e})");
            }
        }
    } else {
        let _ = writeln!(out.stdout, "no saddle P1; no manifolds drawn");
    }
    for e in all_equilibria(&p) {
        let (fill, stroke) = classification_style(e.classification);
        svg.circle(e.xy(), 5.0, fill, stroke);
        svg.text(e.xy(), e.kind.name());
    }
    out.file("portrait.svg", svg.render());
    out.file("portrait.csv", csv.render());
    Ok(out)
}

fn parse_axis(cfg: &RunConfig) -> CliResult<Axis> {
    match cfg.get("axis").unwrap_or("Q") {
        "Q" | "q" => Ok(Axis::Q),
        "B" | "b" => Ok(Axis::B),
        other => Err(CliError::Invalid(format!("axis must be Q or B, got `{other}`"))),
    }
}

pub fn diagram(cfg: &RunConfig) -> CliResult<Output> {
    let p = cfg.nondim()?;
    let axis = parse_axis(cfg)?;
    let x_range = match cfg.get("range") {
        Some(v) => parse_pair("range", v)?,
        None => match axis {
            Axis::Q => (0.2, 1.2),
            Axis::B => (0.01, 0.8),
        },
    };
    let c_range = match cfg.get("c_range") {
        Some(v) => parse_pair("c_range", v)?,
        None => (0.0, 1.5),
    };
    if !(x_range.1 > x_range.0 && x_range.0 > 0.0 && c_range.1 > c_range.0 && c_range.0 >= 0.0) {
        return Err(CliError::Invalid("range and c_range must be increasing and positive".into()));
    }
    let resolution = cfg.res.map(|r| r.0).unwrap_or(16);
    let mut so = SweepOptions::new(axis, x_range, c_range, resolution);
    so.region.branch = branch_options(cfg)?;
    let d = sweep_diagram(&p, &so)?;
    let mut out = Output::default();
    for n in &d.notes {
        let _ = writeln!(out.stdout, "warning: {n}");
    }
    write_diagram_summary(&mut out.stdout, &d);
    let mut csv = Csv::new("diagram", nondim_metadata(&p), &["curve", "x", "C", "residual"]);
    csv.meta("axis", axis.name());
    for c in &d.curves {
        for pt in &c.points {
            csv.row(vec![c.kind.name().into(), fmt(pt.x), fmt(pt.c), fmt(pt.residual)]);
        }
    }
    if let Some(bt) = d.bt {
        csv.row(vec!["bogdanov-takens".into(), fmt(bt.x), fmt(bt.c), fmt(bt.delta_residual.hypot(bt.trace_residual))]);
    }
    for (x, c, r) in &d.regions {
        csv.row(vec![format!("region-{}", r.panel.roman()), fmt(*x), fmt(*c), "0".into()]);
    }
    let mut svg = Svg::new(x_range, c_range);
    svg.title(&format!("({}, C) plane", axis.name()));
    for (kind, color) in [
        (CurveKind::SaddleNode, "#d62728"),
        (CurveKind::Hopf, "#1f77b4"),
        (CurveKind::Homoclinic, "#2ca02c"),
    ] {
        if let Some(c) = d.curve(kind) {
            let pts: Vec<[f64; 2]> = c.points.iter().map(|p| [p.x, p.c]).collect();
            svg.polyline(&pts, color, 2.0, None);
        }
    }
    if let Some(bt) = d.bt {
        svg.circle([bt.x, bt.c], 5.0, "black", "black");
        svg.text([bt.x, bt.c], "BT");
    }
    for (x, c, r) in &d.regions {
        svg.text([*x, *c], r.panel.roman());
    }
    out.file("diagram.csv", csv.render());
    out.file("diagram.svg", svg.render());
    Ok(out)
}

fn write_diagram_summary(s: &mut String, d: &BifurcationDiagram) {
    for c in &d.curves {
        let _ = writeln!(s, "{}: {} points", c.kind.name(), c.points.len());
    }
    match d.bt {
        Some(bt) => {
            let _ = writeln!(
                s,
                "Bogdanov-Takens: {}={} C={} ({:?}, L20={}, L11={})",
                d.axis.name(),
                fmt(bt.x),
                fmt(bt.c),
                bt.method,
                fmt(bt.cusp.l20),
                fmt(bt.cusp.l11)
            );
        }
        None => {
            let _ = writeln!(s, "Bogdanov-Takens: not found in range");
        }
    }
    if !d.ordering_violations.is_empty() {
        let _ = writeln!(s, "warning: C_HOM < C_H < C_SN fails at {} columns", d.ordering_violations.len());
    }
    for (x, c, r) in &d.regions {
        let _ = writeln!(s, "region ({}, {}): panel {}", fmt(*x), fmt(*c), r.panel.roman());
    }
}

fn report_text(r: &BasinReport) -> String {
    format!(
        "area to-P2: {}\narea to-(0,C): {}\narea undecided: {}\nboundary uncertainty: {}\n{}",
        fmt(r.area_p2),
        fmt(r.area_0c),
        fmt(r.undecided),
        fmt(r.boundary_area),
        if r.flagged { "warning: undecided fraction is at least 5%\n" } else { "" }
    )
}

pub fn basin(cfg: &RunConfig) -> CliResult<Output> {
    let model = match cfg.params {
        Params::Nondim(p) => BasinModel::Nondim(p),
        Params::Dim(d) => BasinModel::Dim(d),
    };
    let window = cfg.window.unwrap_or_else(|| model.default_window());
    let (nx, ny) = cfg.res.unwrap_or((128, 128));
    let bo = BasinOptions {
        find_cycle: true,
        ..basin_options(cfg)
    };
    let g = compute_basin(&model, window, nx, ny, &bo)?;
    let r = BasinReport::from_grid(&g);
    let mut out = Output {
        stdout: report_text(&r),
        ..Output::default()
    };
    let mut svg = Svg::new((window.u0, window.u1), (window.v0, window.v1));
    svg.basin(&g);
    if let BasinModel::Nondim(p) = model {
        svg.title(&params_title(&p));
        let (prey, pred) = nullclines(&p, window.u1, 400);
        svg.polyline(&prey, "#2a7f2a", 1.5, Some("6,3"));
        svg.polyline(&pred, "#7f2a7f", 1.5, Some("6,3"));
        if positive_equilibria(&p).len() == 2 {
            if let Ok(b) = saddle_branches(&p, &branch_options(cfg)?) {
                svg.polyline(&b[2].points(), "#1f77b4", 2.0, None);
                svg.polyline(&b[3].points(), "#1f77b4", 2.0, None);
            }
        }
        if let Some(c) = &g.cycle {
            svg.polyline(c, "#d62728", 2.0, Some("4,2"));
            let _ = writeln!(out.stdout, "unstable cycle around P2 overlaid");
        }
        for e in all_equilibria(&p) {
            let (fill, stroke) = classification_style(e.classification);
            svg.circle(e.xy(), 5.0, fill, stroke);
        }
    }
    out.file("basin.csv", basin_csv(&g).render());
    out.file("basin.svg", svg.render());
    Ok(out)
}

pub fn homoclinic(cfg: &RunConfig) -> CliResult<Output> {
    let p = cfg.nondim()?;
    let bo = branch_options(cfg)?;
    let tol = cfg.tol.unwrap_or(1e-8);
    let (c_hom, lo, hi, gap) = match cfg.get("bracket") {
        Some(v) => {
            let (lo, hi) = parse_pair("bracket", v)?;
            if !(hi > lo && lo > 0.0) {
                return Err(CliError::Invalid("bracket must satisfy 0 < lo < hi".into()));
            }
            let s = solve_homoclinic(&p, (lo, hi), tol, &bo)?;
            (s.c_hom, s.lo, s.hi, s.gap)
        }
        None => {
            let c_h = solve_ch(&p)?[0].c;
            let s = bracket_and_solve_homoclinic(&p, c_h, 1e-6, 24, tol, &bo)?;
            (s.c_hom, s.lo, s.hi, s.gap)
        }
    };
    let mut out = Output::default();
    let _ = writeln!(out.stdout, "C_HOM = {}\nbracket = [{}, {}]\ngap = {}", fmt(c_hom), fmt(lo), fmt(hi), fmt(gap));
    let mut csv = Csv::new("homoclinic", nondim_metadata(&p), &["c_hom", "lo", "hi", "gap"]);
    csv.row(vec![fmt(c_hom), fmt(lo), fmt(hi), fmt(gap)]);
    out.file("homoclinic.csv", csv.render());
    Ok(out)
}

pub fn scan_b_cmd(cfg: &RunConfig) -> CliResult<Output> {
    let Params::Dim(d) = cfg.params else {
        return Err(CliError::Invalid("scan-b needs the dimensional parameter set".into()));
    };
    let bs = match cfg.get("b_values") {
        Some(v) => parse_list("b_values", v)?,
        None => (0..=18).map(|k| if k == 0 { 1.0 } else { 5.0 * k as f64 }).collect(),
    };
    if bs.iter().any(|&b| b <= 0.0) {
        return Err(CliError::Invalid("b_values must be positive".into()));
    }
    let (nx, ny) = cfg.res.unwrap_or((64, 64));
    let r = scan_b(&d, &bs, nx, ny, &basin_options(cfg))?;
    let mut out = Output::default();
    let mut csv = Csv::new("scan-b", model_metadata(&BasinModel::Dim(d)), &["b", "area_p2_multiple", "area_p2_strong", "undecided_multiple"]);
    csv.meta("resolution", format!("{nx},{ny}"));
    let _ = writeln!(out.stdout, "strong-allee area: {}", fmt(r.strong.area_p2));
    for (b, rep) in &r.multiple {
        let _ = writeln!(out.stdout, "b = {}: multiple-allee area {}", fmt(*b), fmt(rep.area_p2));
        csv.row(vec![fmt(*b), fmt(rep.area_p2), fmt(r.strong.area_p2), fmt(rep.undecided)]);
    }
    match r.b_cr {
        Some(b) => {
            let _ = writeln!(out.stdout, "b_cr = {}", fmt(b));
        }
        None => {
            let _ = writeln!(out.stdout, "no crossing of the strong-allee level in the scanned b values");
        }
    }
    let b_max = bs.iter().cloned().fold(f64::MIN, f64::max);
    let a_max = r.strong.window.area();
    let mut svg = Svg::new((0.0, b_max), (0.0, a_max));
    svg.title("P2 basin area against b");
    svg.polyline(&[[0.0, r.strong.area_p2], [b_max, r.strong.area_p2]], "#d62728", 2.0, None);
    let pts: Vec<[f64; 2]> = r.multiple.iter().map(|(b, rep)| [*b, rep.area_p2]).collect();
    svg.polyline(&pts, "#1f77b4", 2.0, None);
    out.file("scan_b.csv", csv.render());
    out.file("scan_b.svg", svg.render());
    Ok(out)
}
