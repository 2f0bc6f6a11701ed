//! Bifurcation curves in two-parameter planes and the phase-portrait
//! regions they separate.

use rayon::prelude::*;

use crate::dynamics::{find_limit_cycle, CycleOptions, TimeDirection};
use crate::equilibria::{
    cusp_coefficients, delta_tolerance, discriminant, jacobian_on_nullcline, saddle_and_focus,
    trace_function_f, Classification, CuspCoefficients, EquilibriumKind,
};
use crate::error::{Error, Result};
use crate::manifolds::{
    homoclinic_gap, saddle_branches, solve_homoclinic, BranchOptions, HomoclinicSolution, BranchTerminus, WindowEdge,
};
use crate::model::{jacobian_nondim, NondimParams, State};

/// Second parameter of a two-parameter plane; the first is always `C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Q,
    B,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Q => "Q",
            Axis::B => "B",
        }
    }

    pub fn set(self, p: &NondimParams, x: f64) -> NondimParams {
        match self {
            Axis::Q => p.with_q(x),
            Axis::B => p.with_b(x),
        }
    }

    pub fn get(self, p: &NondimParams) -> f64 {
        match self {
            Axis::Q => p.q,
            Axis::B => p.b,
        }
    }
}

/// `Δ` as a function of `C` at the other parameters of `p`.
fn delta_at(p: &NondimParams, c: f64) -> f64 {
    discriminant(&p.with_c(c)).value
}

/// Saddle-node value of `C`: the smallest positive root of the quadratic
/// `Δ(C) = Q²C² − (2aQ + 4BQ(1 + Q))C + a² − 4M(1 + Q)`, `a = 1 + M − QB`,
/// with `1 + M − Q(B + C) > 0`.
pub fn solve_csn(p: &NondimParams) -> Result<f64> {
    let a = 1.0 + p.m - p.q * p.b;
    let qa = p.q * p.q;
    let qb = -(2.0 * a * p.q + 4.0 * p.b * p.q * (1.0 + p.q));
    let qc = a * a - 4.0 * p.m * (1.0 + p.q);
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return Err(Error::NoPositiveRoot("Δ(C) has no real root".into()));
    }
    let big = if qb >= 0.0 {
        (-qb - disc.sqrt()) / (2.0 * qa)
    } else {
        (-qb + disc.sqrt()) / (2.0 * qa)
    };
    let small = qc / (qa * big);
    let mut roots = [small, big];
    roots.sort_by(f64::total_cmp);
    let c = roots
        .into_iter()
        .find(|&c| c > 0.0 && a - p.q * c > 0.0)
        .ok_or_else(|| Error::NoPositiveRoot("no admissible positive root of Δ(C)".into()))?;
    let residual = delta_at(p, c).abs();
    if residual >= 1e-10 {
        return Err(Error::NoPositiveRoot(format!("Δ(C_SN) residual {residual:e}")));
    }
    Ok(c)
}

/// `f(u2(C)) − C`, proportional to the trace at `P2`.
fn hopf_function(p: &NondimParams, c: f64) -> Option<f64> {
    let q = p.with_c(c);
    let u2 = discriminant(&q).u2?;
    trace_function_f(&q, u2).ok().map(|f| f - c)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopfPoint {
    pub c: f64,
    pub trace: f64,
    pub det: f64,
}

/// Hopf values of `C` in `(0, C_SN)`: sign changes of `f(u2(C)) − C` on a
/// 256-point scan, refined by bisection and checked for `|trace| < 10⁻⁸`
/// and `det > 0` at `P2`.
pub fn solve_ch(p: &NondimParams) -> Result<Vec<HopfPoint>> {
    let c_sn = solve_csn(p)?;
    let n = 256;
    let grid: Vec<f64> = (1..=n).map(|k| c_sn * k as f64 / (n + 1) as f64).collect();
    let vals: Vec<Option<f64>> = grid.iter().map(|&c| hopf_function(p, c)).collect();
    let mut out = Vec::new();
    for k in 1..n {
        let (Some(g0), Some(g1)) = (vals[k - 1], vals[k]) else {
            continue;
        };
        if g0.signum() == g1.signum() {
            continue;
        }
        let (mut lo, mut hi) = (grid[k - 1], grid[k]);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            match hopf_function(p, mid) {
                Some(g) if g.signum() == g0.signum() => lo = mid,
                Some(_) => hi = mid,
                None => break,
            }
        }
        let c = 0.5 * (lo + hi);
        let q = p.with_c(c);
        let Some(u2) = discriminant(&q).u2 else { continue };
        let j = jacobian_nondim(&q, [u2, u2 + c]);
        if j.trace().abs() < 1e-8 && j.det() > 0.0 {
            out.push(HopfPoint {
                c,
                trace: j.trace(),
                det: j.det(),
            });
        }
    }
    if out.is_empty() {
        return Err(Error::NoSignChange { lo: 0.0, hi: c_sn });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BtMethod {
    Newton,
    Bisection,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BtPoint {
    pub axis: Axis,
    /// Value of the axis parameter.
    pub x: f64,
    pub c: f64,
    pub delta_residual: f64,
    /// `f(u3) − C`.
    pub trace_residual: f64,
    pub det_p3: f64,
    pub trace_p3: f64,
    pub cusp: CuspCoefficients,
    pub method: BtMethod,
    pub iterations: usize,
}

/// `(Δ, f(u3) − C)` at the axis value `x` and `C`.
fn bt_system(p: &NondimParams, axis: Axis, x: f64, c: f64) -> Option<[f64; 2]> {
    let q = axis.set(p, x).with_c(c);
    let d = discriminant(&q);
    let u3 = d.u3?;
    Some([d.value, trace_function_f(&q, u3).ok()? - c])
}

/// `f(u3) − C` along the saddle-node curve.
fn bt_along_csn(p: &NondimParams, axis: Axis, x: f64) -> Option<(f64, f64)> {
    let q = axis.set(p, x);
    let c = solve_csn(&q).ok()?;
    Some((bt_system(p, axis, x, c)?[1], c))
}

/// Bogdanov–Takens point in the `(axis, C)` plane over `range`: damped
/// Newton on `{Δ = 0, f(u3) = C}` from the best point of a 64-point scan
/// along the saddle-node curve, with bisection along that curve as the
/// fallback.
pub fn locate_bt(p: &NondimParams, axis: Axis, range: (f64, f64)) -> Result<BtPoint> {
    let n = 64;
    let scan: Vec<(f64, Option<(f64, f64)>)> = (0..=n)
        .map(|k| {
            let x = range.0 + (range.1 - range.0) * k as f64 / n as f64;
            (x, bt_along_csn(p, axis, x))
        })
        .collect();
    let bracket = scan.windows(2).find_map(|w| match (w[0].1, w[1].1) {
        (Some((h0, _)), Some((h1, _))) if h0.signum() != h1.signum() => Some((w[0].0, w[1].0)),
        _ => None,
    });
    let Some((lo, hi)) = bracket else {
        return Err(Error::NoSignChange {
            lo: range.0,
            hi: range.1,
        });
    };
    let (x0, c0) = {
        let x = 0.5 * (lo + hi);
        let c = bt_along_csn(p, axis, x).map(|v| v.1).unwrap_or(0.0);
        (x, c)
    };
    let (x, c, method, iterations) = match newton_bt(p, axis, x0, c0) {
        Ok((x, c, it)) => (x, c, BtMethod::Newton, it),
        Err(_) => {
            let (x, c, it) = bisect_bt(p, axis, lo, hi)?;
            (x, c, BtMethod::Bisection, it)
        }
    };
    finish_bt(p, axis, x, c, method, iterations)
}

fn finish_bt(p: &NondimParams, axis: Axis, x: f64, c: f64, method: BtMethod, iterations: usize) -> Result<BtPoint> {
    let q = axis.set(p, x).with_c(c);
    let r = bt_system(p, axis, x, c).ok_or(Error::NewtonDivergence { iterations })?;
    let u3 = discriminant(&q).u3.ok_or(Error::NewtonDivergence { iterations })?;
    let j = jacobian_on_nullcline(&q, u3);
    Ok(BtPoint {
        axis,
        x,
        c,
        delta_residual: r[0],
        trace_residual: r[1],
        det_p3: j.det(),
        trace_p3: j.trace(),
        cusp: cusp_coefficients(&q)?,
        method,
        iterations,
    })
}

/// Newton with a finite-difference Jacobian; each step is halved until the
/// residual norm decreases. At most 50 iterations.
pub(crate) fn newton_bt(p: &NondimParams, axis: Axis, x0: f64, c0: f64) -> Result<(f64, f64, usize)> {
    let (mut x, mut c) = (x0, c0);
    let norm = |r: [f64; 2]| r[0].hypot(r[1]);
    let mut r = bt_system(p, axis, x, c).ok_or(Error::NewtonDivergence { iterations: 0 })?;
    for it in 1..=50 {
        if norm(r) < 1e-14 {
            return Ok((x, c, it - 1));
        }
        let h = 1e-7;
        let rx = bt_system(p, axis, x + h, c).ok_or(Error::NewtonDivergence { iterations: it })?;
        let rc = bt_system(p, axis, x, c + h).ok_or(Error::NewtonDivergence { iterations: it })?;
        let j = [
            [(rx[0] - r[0]) / h, (rc[0] - r[0]) / h],
            [(rx[1] - r[1]) / h, (rc[1] - r[1]) / h],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            return Err(Error::NewtonDivergence { iterations: it });
        }
        let dx = -(j[1][1] * r[0] - j[0][1] * r[1]) / det;
        let dc = -(-j[1][0] * r[0] + j[0][0] * r[1]) / det;
        let mut step = 1.0;
        loop {
            let (xn, cn) = (x + step * dx, c + step * dc);
            if let Some(rn) = bt_system(p, axis, xn, cn).filter(|_| xn > 0.0 && cn > 0.0) {
                if norm(rn) < norm(r) {
                    x = xn;
                    c = cn;
                    r = rn;
                    break;
                }
            }
            step *= 0.5;
            if step < 1e-6 {
                if norm(r) < 1e-12 {
                    return Ok((x, c, it));
                }
                return Err(Error::NewtonDivergence { iterations: it });
            }
        }
    }
    if norm(r) < 1e-12 {
        Ok((x, c, 50))
    } else {
        Err(Error::NewtonDivergence { iterations: 50 })
    }
}

/// Bisection in the axis parameter on `f(u3) − C` along the saddle-node curve.
pub(crate) fn bisect_bt(p: &NondimParams, axis: Axis, mut lo: f64, mut hi: f64) -> Result<(f64, f64, usize)> {
    let h = |x: f64| bt_along_csn(p, axis, x);
    let (h_lo, _) = h(lo).ok_or(Error::NoSignChange { lo, hi })?;
    let mut it = 0;
    while hi - lo > 1e-14 * (1.0 + lo.abs()) && it < 200 {
        let mid = 0.5 * (lo + hi);
        let Some((hm, _)) = h(mid) else {
            return Err(Error::NoSignChange { lo, hi });
        };
        if hm.signum() == h_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
        it += 1;
    }
    let x = 0.5 * (lo + hi);
    let (_, c) = h(x).ok_or(Error::NoSignChange { lo, hi })?;
    Ok((x, c, it))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Panel {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
    VIII,
}

impl Panel {
    pub fn roman(self) -> &'static str {
        match self {
            Panel::I => "i",
            Panel::II => "ii",
            Panel::III => "iii",
            Panel::IV => "iv",
            Panel::V => "v",
            Panel::VI => "vi",
            Panel::VII => "vii",
            Panel::VIII => "viii",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum P2Stability {
    Attractor,
    Repeller,
    Absent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionClass {
    pub n_positive: u8,
    pub p2_stability: P2Stability,
    pub cycle: bool,
    pub panel: Panel,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionOptions {
    /// `|gap|` at or below this is a homoclinic connection.
    pub hom_tol: f64,
    /// Offset of the cycle-search seed from `P2` along the section.
    pub cycle_seed: f64,
    pub branch: BranchOptions,
    pub cycle: CycleOptions,
}

impl Default for RegionOptions {
    fn default() -> Self {
        RegionOptions {
            hom_tol: 1e-5,
            cycle_seed: 1e-5,
            branch: BranchOptions::default(),
            cycle: CycleOptions::default(),
        }
    }
}

/// Assigns one of the eight phase-portrait panels.
///
/// * no positive equilibrium: (viii); a double one: (vii);
/// * `P2` a repeller: (vi);
/// * `P2` an attractor: (iv) when the homoclinic gap vanishes, (v) when the
///   gap is positive and a reversed-time cycle surrounds `P2`, otherwise
///   (i), (ii), (iii) as `W^s_↙` comes from the top edge of Φ, the right
///   edge, or `(M, 0)`.
pub fn region_classify(p: &NondimParams, ro: &RegionOptions) -> Result<RegionClass> {
    let d = discriminant(p);
    if d.value.abs() <= delta_tolerance(p) && d.u3.is_some() {
        return Ok(RegionClass {
            n_positive: 1,
            p2_stability: P2Stability::Absent,
            cycle: false,
            panel: Panel::VII,
        });
    }
    let Some((_, p2)) = saddle_and_focus(p) else {
        return Ok(RegionClass {
            n_positive: 0,
            p2_stability: P2Stability::Absent,
            cycle: false,
            panel: Panel::VIII,
        });
    };
    let seed = State::nondim(p2.xy()[0] + ro.cycle_seed, p2.xy()[1]);
    match p2.classification {
        c if c.is_repeller() => {
            let cycle = find_limit_cycle(p, seed, TimeDirection::Forward, &ro.cycle)?.is_some();
            if cycle {
                return Err(Error::Undecided(
                    "a stable cycle surrounds the repelling P2".into(),
                ));
            }
            Ok(RegionClass {
                n_positive: 2,
                p2_stability: P2Stability::Repeller,
                cycle: false,
                panel: Panel::VI,
            })
        }
        c if c.is_attractor() => {
            let region = |panel, cycle| RegionClass {
                n_positive: 2,
                p2_stability: P2Stability::Attractor,
                cycle,
                panel,
            };
            let gap = match homoclinic_gap(p, &ro.branch) {
                Ok(g) => Some(g.gap),
                Err(Error::NoSectionCrossing { .. }) => None,
                Err(e) => return Err(e),
            };
            if gap.is_some_and(|g| g.abs() <= ro.hom_tol) {
                return Ok(region(Panel::IV, false));
            }
            if gap.is_none_or(|g| g > 0.0) {
                let cyc = find_limit_cycle(p, seed, TimeDirection::Reversed, &ro.cycle)?;
                if cyc.as_ref().is_some_and(|c| c.surrounded_equilibrium.is_some()) {
                    return Ok(region(Panel::V, true));
                }
                if gap.is_some() {
                    return Err(Error::Undecided(
                        "homoclinic gap is positive but no unstable cycle was found".into(),
                    ));
                }
            }
            let [_, _, _, ws_down] = saddle_branches(p, &ro.branch)?;
            match ws_down.terminus {
                BranchTerminus::ReachedWindowEdge { edge: WindowEdge::Top, .. } => {
                    Ok(region(Panel::I, false))
                }
                BranchTerminus::ReachedWindowEdge { edge: WindowEdge::Right, .. }
                | BranchTerminus::ReachedBoundaryPoint(EquilibriumKind::Carrying) => {
                    Ok(region(Panel::II, false))
                }
                BranchTerminus::ReachedBoundaryPoint(EquilibriumKind::AlleeThreshold) => {
                    Ok(region(Panel::III, false))
                }
                other => Err(Error::Undecided(format!("W^s_↙ ends at {}", other.describe()))),
            }
        }
        Classification::CenterCandidate => {
            Err(Error::Undecided("P2 is at a Hopf point".into()))
        }
        other => Err(Error::Undecided(format!("P2 is {}", other.name()))),
    }
}

/// One vertex of a bifurcation curve with its defining residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub x: f64,
    pub c: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    SaddleNode,
    Hopf,
    Homoclinic,
}

impl CurveKind {
    pub fn name(self) -> &'static str {
        match self {
            CurveKind::SaddleNode => "saddle-node",
            CurveKind::Hopf => "hopf",
            CurveKind::Homoclinic => "homoclinic",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub kind: CurveKind,
    pub points: Vec<CurvePoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    pub axis: Axis,
    pub x_range: (f64, f64),
    pub c_range: (f64, f64),
    pub resolution: usize,
    /// Bracket width at which homoclinic bisection stops.
    pub hom_tol: f64,
    /// Gap evaluations used to bracket the homoclinic value below `C_H`.
    pub hom_scan: usize,
    pub region: RegionOptions,
}

impl SweepOptions {
    pub fn new(axis: Axis, x_range: (f64, f64), c_range: (f64, f64), resolution: usize) -> Self {
        SweepOptions {
            axis,
            x_range,
            c_range,
            resolution,
            hom_tol: 1e-7,
            hom_scan: 24,
            region: RegionOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationDiagram {
    pub axis: Axis,
    pub x_range: (f64, f64),
    pub c_range: (f64, f64),
    pub fixed: NondimParams,
    pub curves: Vec<Curve>,
    pub bt: Option<BtPoint>,
    pub regions: Vec<(f64, f64, RegionClass)>,
    /// Columns where `C_HOM < C_H < C_SN` failed.
    pub ordering_violations: Vec<f64>,
    pub notes: Vec<String>,
}

impl BifurcationDiagram {
    pub fn curve(&self, kind: CurveKind) -> Option<&Curve> {
        self.curves.iter().find(|c| c.kind == kind)
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Column {
    x: f64,
    sn: Option<CurvePoint>,
    hopf: Option<CurvePoint>,
    hom: Option<CurvePoint>,
}

/// Homoclinic value below `c_h`: scan the gap downward from `c_h` at
/// geometrically growing distances `(c_h − c_min)·10^(−4 + 4k/(scan − 1))`
/// for a sign change, then bisect.
pub fn bracket_and_solve_homoclinic(
    p: &NondimParams,
    c_h: f64,
    c_min: f64,
    scan: usize,
    tol: f64,
    bo: &BranchOptions,
) -> Result<HomoclinicSolution> {
    let gap = |c: f64| homoclinic_gap(&p.with_c(c), bo).ok().map(|g| g.gap);
    let mut prev: Option<(f64, f64)> = None;
    let span = c_h - c_min;
    for k in 0..scan {
        let c = c_h - span * 10f64.powf(-4.0 + 4.0 * k as f64 / (scan.max(2) - 1) as f64);
        if c <= c_min {
            break;
        }
        let Some(g) = gap(c) else { continue };
        if let Some((c_prev, g_prev)) = prev {
            if g.signum() != g_prev.signum() {
                return solve_homoclinic(p, (c, c_prev), tol, bo);
            }
        }
        prev = Some((c, g));
    }
    Err(Error::NoSignChange { lo: c_min, hi: c_h })
}

fn solve_column(fixed: &NondimParams, so: &SweepOptions, x: f64) -> (Column, Vec<String>) {
    let p = so.axis.set(fixed, x);
    let mut col = Column {
        x,
        ..Column::default()
    };
    let mut notes = Vec::new();
    let c_sn = match solve_csn(&p) {
        Ok(c) => c,
        Err(e) => {
            notes.push(format!("{}={x:.6}: no saddle-node ({e})", so.axis.name()));
            return (col, notes);
        }
    };
    col.sn = Some(CurvePoint {
        x,
        c: c_sn,
        residual: delta_at(&p, c_sn).abs(),
    });
    let c_h = match solve_ch(&p) {
        Ok(h) => {
            if h.len() > 1 {
                notes.push(format!("{}={x:.6}: {} Hopf roots, first kept", so.axis.name(), h.len()));
            }
            h[0]
        }
        Err(_) => return (col, notes),
    };
    col.hopf = Some(CurvePoint {
        x,
        c: c_h.c,
        residual: c_h.trace.abs(),
    });
    // the homoclinic curve sits below the Hopf curve only where P2 attracts below C_H
    if hopf_function(&p, 0.5 * c_h.c).is_some_and(|g| g < 0.0) {
        match bracket_and_solve_homoclinic(&p, c_h.c, so.c_range.0.max(1e-6), so.hom_scan, so.hom_tol, &so.region.branch) {
            Ok(sol) => {
                col.hom = Some(CurvePoint {
                    x,
                    c: sol.c_hom,
                    residual: sol.gap.abs(),
                });
            }
            Err(e) => notes.push(format!("{}={x:.6}: no homoclinic ({e})", so.axis.name())),
        }
    }
    (col, notes)
}

/// Solves `C_SN`, `C_H` and `C_HOM` on each of `resolution` columns of the
/// `(axis, C)` plane, locates the BT point, and classifies one sample per
/// region on the column where all three curves exist.
pub fn sweep_diagram(fixed: &NondimParams, so: &SweepOptions) -> Result<BifurcationDiagram> {
    if so.resolution < 16 {
        return Err(Error::InvalidParams("resolution must be at least 16".into()));
    }
    let xs: Vec<f64> = (0..so.resolution)
        .map(|k| so.x_range.0 + (so.x_range.1 - so.x_range.0) * k as f64 / (so.resolution - 1) as f64)
        .collect();
    let solved: Vec<(Column, Vec<String>)> = xs.par_iter().map(|&x| solve_column(fixed, so, x)).collect();
    let mut notes: Vec<String> = Vec::new();
    let mut curves = vec![
        Curve { kind: CurveKind::SaddleNode, points: vec![] },
        Curve { kind: CurveKind::Hopf, points: vec![] },
        Curve { kind: CurveKind::Homoclinic, points: vec![] },
    ];
    let mut ordering_violations = Vec::new();
    for (col, n) in &solved {
        notes.extend(n.iter().cloned());
        for (k, pt) in [col.sn, col.hopf, col.hom].into_iter().enumerate() {
            if let Some(pt) = pt {
                curves[k].points.push(pt);
            }
        }
        if let (Some(sn), Some(h), Some(hom)) = (col.sn, col.hopf, col.hom) {
            if !(hom.c < h.c && h.c < sn.c) {
                ordering_violations.push(col.x);
            }
        }
    }
    let bt = match locate_bt(fixed, so.axis, so.x_range) {
        Ok(bt) => Some(bt),
        Err(e) => {
            notes.push(format!("no Bogdanov–Takens point in range ({e})"));
            None
        }
    };
    let mut regions = Vec::new();
    let full: Vec<&Column> = solved
        .iter()
        .map(|(c, _)| c)
        .filter(|c| c.sn.is_some() && c.hopf.is_some() && c.hom.is_some())
        .collect();
    if let Some(col) = full.get(full.len() / 2) {
        let (sn, h, hom) = (col.sn.unwrap().c, col.hopf.unwrap().c, col.hom.unwrap().c);
        let p = so.axis.set(fixed, col.x);
        let samples = [0.5 * hom, 0.5 * (hom + h), 0.5 * (h + sn), sn + 0.5 * (sn - h)];
        for c in samples {
            match region_classify(&p.with_c(c), &so.region) {
                Ok(r) => regions.push((col.x, c, r)),
                Err(e) => notes.push(format!("region at ({:.6}, {c:.6}) undecided: {e}", col.x)),
            }
        }
    } else {
        notes.push("no column carries all three curves; regions not sampled".into());
    }
    Ok(BifurcationDiagram {
        axis: so.axis,
        x_range: so.x_range,
        c_range: so.c_range,
        fixed: *fixed,
        curves,
        bt,
        regions,
        ordering_violations,
        notes,
    })
}
