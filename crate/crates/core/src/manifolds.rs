//! Invariant manifolds of the interior saddle `P1`, the separatrix they
//! form, and the homoclinic connection.
//!
//! Branches are named by the direction of the forward flow along them, with
//! `UpRight` meaning motion along `+e` for the eigenvector `e` oriented with a
//! non-negative prey component. An unstable branch moves away from `P1`, so
//! `W^u_↗` lies on the `+e` side; a stable branch moves towards `P1`, so
//! `W^s_↗` lies on the `−e` side (it arrives from `(M, 0)`) and `W^s_↙` on
//! the `+e` side.

use crate::dynamics::{attractor_events, nondim_attractors, ID_P2, ID_PREDATOR_ONLY};
use crate::equilibria::{saddle_and_focus, Classification, Equilibrium, EquilibriumKind};
use crate::error::{Error, Result};
use crate::integrator::{integrate, Direction, Event, IntegrateOptions, Reversed, Termination, Trajectory};
use crate::linalg::{dot, norm, sub};
use crate::model::{jacobian_nondim, NondimParams, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ManifoldStability {
    Stable,
    Unstable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BranchDirection {
    UpRight,
    DownLeft,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowEdge {
    Right,
    Top,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BranchTerminus {
    /// Entered the ball of an equilibrium that attracts in the direction of
    /// integration: `(0, C)` forward, or `P2`.
    ReachedAttractor(EquilibriumKind),
    /// Entered the ball of `(M, 0)`, `(1, 0)` or `(0, 0)`.
    ReachedBoundaryPoint(EquilibriumKind),
    /// Left Φ through `u = 1` or `v = 1 + C`.
    ReachedWindowEdge { edge: WindowEdge, at: [f64; 2] },
    LengthBudget,
}

impl BranchTerminus {
    pub fn describe(&self) -> String {
        match self {
            BranchTerminus::ReachedAttractor(k) => format!("reached-attractor {}", k.name()),
            BranchTerminus::ReachedBoundaryPoint(k) => {
                format!("reached-boundary-point {}", k.name())
            }
            BranchTerminus::ReachedWindowEdge { edge, at } => {
                format!("reached-window-edge {:?} at ({:.6}, {:.6})", edge, at[0], at[1])
            }
            BranchTerminus::LengthBudget => "length-budget".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldBranch {
    pub saddle: Equilibrium,
    pub stability: ManifoldStability,
    pub direction: BranchDirection,
    /// From the seed outward, in the direction of integration (reversed time
    /// for stable branches).
    pub polyline: Vec<State>,
    pub terminus: BranchTerminus,
    /// Unit eigenvector of `J(P1)` for this branch, oriented as in the module docs.
    pub eigenvector: [f64; 2],
    pub eigenvalue: f64,
}

impl ManifoldBranch {
    pub fn points(&self) -> Vec<[f64; 2]> {
        self.polyline.iter().map(State::xy).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchOptions {
    /// Offset of the seed from `P1` along the eigenvector.
    pub eps: f64,
    /// Arc-length budget per branch.
    pub budget: f64,
    pub t_max: f64,
    pub tol: f64,
    /// Radius of the balls around the terminal equilibria.
    pub radius: f64,
}

impl Default for BranchOptions {
    fn default() -> Self {
        BranchOptions {
            eps: 1e-6,
            budget: 20.0,
            t_max: 1e5,
            tol: 1e-10,
            radius: 1e-3,
        }
    }
}

const ID_ALLEE: usize = 10;
const ID_CARRYING: usize = 11;
const ID_ORIGIN: usize = 12;

/// `P1`, `P2` and the unstable and stable eigenpairs of `J(P1)`.
struct Saddle {
    p1: Equilibrium,
    p2: Equilibrium,
    unstable: (f64, [f64; 2]),
    stable: (f64, [f64; 2]),
}

fn saddle(p: &NondimParams) -> Result<Saddle> {
    let (p1, p2) = saddle_and_focus(p)
        .ok_or_else(|| Error::Precondition("P1 does not exist (Δ ≤ 0)".into()))?;
    if p1.classification != Classification::Saddle {
        return Err(Error::Precondition(format!(
            "P1 is not a saddle ({})",
            p1.classification.name()
        )));
    }
    let j = jacobian_nondim(p, p1.xy());
    let ev = j.eigenvalues();
    let (lu, ls) = (ev[0].re, ev[1].re);
    Ok(Saddle {
        p1,
        p2,
        unstable: (lu, j.eigenvector(lu)),
        stable: (ls, j.eigenvector(ls)),
    })
}

fn branch_events(p: &NondimParams, p2: &Equilibrium, stability: ManifoldStability, radius: f64) -> Vec<Event> {
    let mut ev = vec![
        Event::Window {
            lo: [-1.0, -1.0],
            hi: [1.0, 1.0 + p.c],
        },
        Event::ball(ID_ALLEE, [p.m, 0.0], radius),
        Event::ball(ID_CARRYING, [1.0, 0.0], radius),
        Event::ball(ID_ORIGIN, [0.0, 0.0], radius),
    ];
    match stability {
        ManifoldStability::Unstable => {
            ev.extend(attractor_events(&nondim_attractors(p), radius));
        }
        ManifoldStability::Stable => {
            if p2.classification.is_repeller() {
                ev.push(Event::ball(ID_P2, p2.xy(), radius));
            }
        }
    }
    ev
}

fn terminus_of(p: &NondimParams, traj: &Trajectory) -> BranchTerminus {
    match traj.termination {
        Termination::EnteredAttractor(ID_PREDATOR_ONLY) => {
            BranchTerminus::ReachedAttractor(EquilibriumKind::PredatorOnly)
        }
        Termination::EnteredAttractor(ID_P2) => BranchTerminus::ReachedAttractor(EquilibriumKind::P2),
        Termination::EnteredAttractor(ID_ALLEE) => {
            BranchTerminus::ReachedBoundaryPoint(EquilibriumKind::AlleeThreshold)
        }
        Termination::EnteredAttractor(ID_CARRYING) => {
            BranchTerminus::ReachedBoundaryPoint(EquilibriumKind::Carrying)
        }
        Termination::EnteredAttractor(ID_ORIGIN) => {
            BranchTerminus::ReachedBoundaryPoint(EquilibriumKind::Origin)
        }
        Termination::LeftWindow => {
            let at = traj.last();
            let edge = if (at[0] - 1.0).abs() <= (at[1] - 1.0 - p.c).abs() {
                WindowEdge::Right
            } else {
                WindowEdge::Top
            };
            BranchTerminus::ReachedWindowEdge { edge, at }
        }
        _ => BranchTerminus::LengthBudget,
    }
}

fn trace(
    p: &NondimParams,
    start: [f64; 2],
    stability: ManifoldStability,
    opts: &IntegrateOptions,
    events: &[Event],
) -> Trajectory {
    match stability {
        ManifoldStability::Unstable => integrate(p, start, opts, events),
        ManifoldStability::Stable => integrate(&Reversed(*p), start, opts, events),
    }
}

fn branch_integrate_options(bo: &BranchOptions) -> IntegrateOptions {
    IntegrateOptions {
        t_max: bo.t_max,
        tol: bo.tol,
        h_init: 1e-3,
        h_max: 1.0,
        max_arc_length: Some(bo.budget),
        ..IntegrateOptions::default()
    }
}

/// Seeds at `P1 ± eps·e` for both eigenvectors; unstable branches are
/// integrated forward, stable ones in reversed time. Order: `W^u_↗`,
/// `W^u_↙`, `W^s_↗`, `W^s_↙`.
pub fn saddle_branches(p: &NondimParams, bo: &BranchOptions) -> Result<[ManifoldBranch; 4]> {
    let sd = saddle(p)?;
    let c1 = sd.p1.xy();
    let opts = branch_integrate_options(bo);
    let make = |stability: ManifoldStability, direction: BranchDirection| {
        let (lambda, e) = match stability {
            ManifoldStability::Unstable => sd.unstable,
            ManifoldStability::Stable => sd.stable,
        };
        let sign = match (stability, direction) {
            (ManifoldStability::Unstable, BranchDirection::UpRight)
            | (ManifoldStability::Stable, BranchDirection::DownLeft) => 1.0,
            _ => -1.0,
        };
        let seed = [c1[0] + sign * bo.eps * e[0], c1[1] + sign * bo.eps * e[1]];
        let events = branch_events(p, &sd.p2, stability, bo.radius);
        let traj = trace(p, seed, stability, &opts, &events);
        ManifoldBranch {
            saddle: sd.p1,
            stability,
            direction,
            polyline: traj.points.iter().map(|s| State::nondim(s[0], s[1])).collect(),
            terminus: terminus_of(p, &traj),
            eigenvector: e,
            eigenvalue: lambda,
        }
    };
    Ok([
        make(ManifoldStability::Unstable, BranchDirection::UpRight),
        make(ManifoldStability::Unstable, BranchDirection::DownLeft),
        make(ManifoldStability::Stable, BranchDirection::UpRight),
        make(ManifoldStability::Stable, BranchDirection::DownLeft),
    ])
}

/// Crossing distances along the reference ray of the two branches forming
/// the loop around `P2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomoclinicGap {
    /// `r_unstable − r_stable`.
    pub gap: f64,
    pub r_unstable: f64,
    pub r_stable: f64,
    pub ray_origin: [f64; 2],
    pub ray_direction: [f64; 2],
}

/// Signed distance between the first crossings of `W^u_↗` (forward) and
/// `W^s_↙` (reversed time) with the ray from `P2` pointing away from `P1`.
/// Positive when `W^u_↗` crosses farther from `P2`.
pub fn homoclinic_gap(p: &NondimParams, bo: &BranchOptions) -> Result<HomoclinicGap> {
    let sd = saddle(p)?;
    let (c1, c2) = (sd.p1.xy(), sd.p2.xy());
    let diff = sub(c2, c1);
    let d = [diff[0] / norm(diff), diff[1] / norm(diff)];
    let section = Event::Section {
        id: 0,
        point: c2,
        normal: [-d[1], d[0]],
        along: Some(d),
        direction: Direction::Either,
        terminal: true,
    };
    let opts = branch_integrate_options(bo);
    let mut r = [0.0; 2];
    for (k, stability) in [ManifoldStability::Unstable, ManifoldStability::Stable]
        .into_iter()
        .enumerate()
    {
        let e = match stability {
            ManifoldStability::Unstable => sd.unstable.1,
            ManifoldStability::Stable => sd.stable.1,
        };
        let seed = [c1[0] + bo.eps * e[0], c1[1] + bo.eps * e[1]];
        let mut events = vec![section];
        events.extend(branch_events(p, &sd.p2, stability, bo.radius));
        let traj = trace(p, seed, stability, &opts, &events);
        if traj.termination != Termination::ReachedSection(0) {
            let name = match stability {
                ManifoldStability::Unstable => "W^u_↗",
                ManifoldStability::Stable => "W^s_↙",
            };
            return Err(Error::NoSectionCrossing {
                branch: name.into(),
                terminus: terminus_of(p, &traj).describe(),
            });
        }
        r[k] = dot(sub(traj.last(), c2), d);
    }
    Ok(HomoclinicGap {
        gap: r[0] - r[1],
        r_unstable: r[0],
        r_stable: r[1],
        ray_origin: c2,
        ray_direction: d,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomoclinicSolution {
    pub c_hom: f64,
    /// Final bracket.
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
    /// Gap at the returned value.
    pub gap: f64,
}

/// Bisection in `C` on [`homoclinic_gap`] until the bracket is narrower
/// than `tol`; returns the midpoint.
pub fn solve_homoclinic(
    p: &NondimParams,
    bracket: (f64, f64),
    tol: f64,
    bo: &BranchOptions,
) -> Result<HomoclinicSolution> {
    let (mut lo, mut hi) = bracket;
    let g = |c: f64| homoclinic_gap(&p.with_c(c), bo).map(|h| h.gap);
    let (g_lo, g_hi) = (g(lo)?, g(hi)?);
    if g_lo.signum() == g_hi.signum() {
        return Err(Error::NoSignChange { lo, hi });
    }
    let lo_sign = g_lo.signum();
    let mut iterations = 0;
    while hi - lo >= tol {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid)?;
        if gm == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if gm.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let c_hom = 0.5 * (lo + hi);
    Ok(HomoclinicSolution {
        c_hom,
        lo,
        hi,
        iterations,
        gap: g(c_hom)?,
    })
}

/// Region bounded by the stable manifold of `P1` on the side containing
/// `P2`, closed along the boundary of Φ. In a bistable regime without a
/// cycle this is the basin of `P2`.
///
/// Built from `W^s_↗` (reversed, from `(M, 0)` to `P1`) and `W^s_↙`, closed
/// according to where the latter comes from:
/// via `(1, 1 + C)` and `(1, 0)` from the top edge, via `(1, 0)` from the
/// right edge, or directly when it ends at `(M, 0)`.
pub fn separatrix_polygon(p: &NondimParams, branches: &[ManifoldBranch; 4]) -> Result<Vec<[f64; 2]>> {
    let down = &branches[2];
    let up = &branches[3];
    if down.terminus != BranchTerminus::ReachedBoundaryPoint(EquilibriumKind::AlleeThreshold) {
        return Err(Error::Undecided(format!(
            "W^s_↗ ends at {}",
            down.terminus.describe()
        )));
    }
    let mut poly: Vec<[f64; 2]> = vec![[p.m, 0.0]];
    poly.extend(down.points().iter().rev());
    poly.push(down.saddle.xy());
    poly.extend(up.points());
    match up.terminus {
        BranchTerminus::ReachedWindowEdge { edge: WindowEdge::Top, .. } => {
            poly.push([1.0, 1.0 + p.c]);
            poly.push([1.0, 0.0]);
        }
        BranchTerminus::ReachedWindowEdge { edge: WindowEdge::Right, .. }
        | BranchTerminus::ReachedBoundaryPoint(EquilibriumKind::Carrying) => {
            poly.push([1.0, 0.0]);
        }
        BranchTerminus::ReachedBoundaryPoint(EquilibriumKind::AlleeThreshold) => {}
        other => {
            return Err(Error::Undecided(format!(
                "W^s_↙ ends at {}",
                other.describe()
            )))
        }
    }
    Ok(poly)
}

/// Even-odd rule.
pub fn point_in_polygon(poly: &[[f64; 2]], pt: [f64; 2]) -> bool {
    let mut inside = false;
    let n = poly.len();
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a[1] > pt[1]) != (b[1] > pt[1]) {
            let x = a[0] + (pt[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if pt[0] < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Shoelace area (absolute).
pub fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    let mut s = 0.0;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        s += a[0] * b[1] - b[0] * a[1];
    }
    0.5 * s.abs()
}

/// Distance from `pt` to the polyline.
pub fn distance_to_polyline(poly: &[[f64; 2]], pt: [f64; 2]) -> f64 {
    if poly.len() == 1 {
        return norm(sub(pt, poly[0]));
    }
    poly.windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let ab = sub(b, a);
            let len2 = dot(ab, ab);
            let t = if len2 > 0.0 {
                (dot(sub(pt, a), ab) / len2).clamp(0.0, 1.0)
            } else {
                0.0
            };
            norm(sub(pt, [a[0] + t * ab[0], a[1] + t * ab[1]]))
        })
        .fold(f64::INFINITY, f64::min)
}

/// Symmetric Hausdorff distance between two polylines.
pub fn hausdorff(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    let one = |x: &[[f64; 2]], y: &[[f64; 2]]| {
        x.iter()
            .map(|&pt| distance_to_polyline(y, pt))
            .fold(0.0_f64, f64::max)
    };
    one(a, b).max(one(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn slice(c: f64) -> NondimParams {
        NondimParams::new(0.05, 0.1, c, 0.071080895, 0.75).unwrap()
    }

    #[test]
    fn branch_tangency_and_seed_offset() {
        let p = slice(0.3);
        let bo = BranchOptions::default();
        for br in saddle_branches(&p, &bo).unwrap() {
            let pts = br.points();
            let c1 = br.saddle.xy();
            assert!((norm(sub(pts[0], c1)) - bo.eps).abs() < 1e-12);
            let seg = sub(pts[1], pts[0]);
            let cos = dot(seg, br.eigenvector).abs() / norm(seg);
            assert!(cos > (5.0_f64).to_radians().cos(), "{:?} {:?}", br.stability, br.direction);
        }
    }

    #[test]
    fn branch_termini_on_the_slice() {
        let p = slice(0.3);
        let [uu, ud, su, sd] = saddle_branches(&p, &BranchOptions::default()).unwrap();
        assert_eq!(ud.terminus, BranchTerminus::ReachedAttractor(EquilibriumKind::PredatorOnly));
        assert_eq!(uu.terminus, BranchTerminus::ReachedAttractor(EquilibriumKind::P2));
        assert_eq!(
            su.terminus,
            BranchTerminus::ReachedBoundaryPoint(EquilibriumKind::AlleeThreshold)
        );
        assert!(matches!(
            sd.terminus,
            BranchTerminus::ReachedWindowEdge { edge: WindowEdge::Right, .. }
        ));
        // panel (iii): W^s_↙ also comes from (M, 0)
        let [_, _, _, sd] = saddle_branches(&slice(0.305), &BranchOptions::default()).unwrap();
        assert_eq!(
            sd.terminus,
            BranchTerminus::ReachedBoundaryPoint(EquilibriumKind::AlleeThreshold)
        );
    }

    #[test]
    fn halving_eps_barely_moves_branches() {
        let p = slice(0.3);
        let bo = BranchOptions::default();
        let half = BranchOptions {
            eps: 0.5 * bo.eps,
            ..bo
        };
        let a = saddle_branches(&p, &bo).unwrap();
        let b = saddle_branches(&p, &half).unwrap();
        for (x, y) in a.iter().zip(&b) {
            let h = hausdorff(&x.points(), &y.points());
            assert!(h < 10.0 * bo.eps, "{:?} {:?}: {h:e}", x.stability, x.direction);
        }
    }

    #[test]
    fn gap_changes_sign_across_the_connection() {
        let bo = BranchOptions::default();
        let below = homoclinic_gap(&slice(0.30), &bo).unwrap().gap;
        let above = homoclinic_gap(&slice(0.31), &bo).unwrap().gap;
        assert!(below < 0.0 && above > 0.0, "{below} {above}");
        assert!((below - (-0.0179)).abs() < 1e-3);
        assert!((above - 0.0085).abs() < 1e-3);
    }

    #[test]
    fn gap_requires_a_saddle() {
        let p = slice(0.4);
        assert!(matches!(
            homoclinic_gap(&p, &BranchOptions::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn polygon_helpers() {
        let sq = [[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [0.0, 1.0]];
        assert_eq!(polygon_area(&sq), 2.0);
        assert!(point_in_polygon(&sq, [1.0, 0.5]));
        assert!(!point_in_polygon(&sq, [2.5, 0.5]));
        assert!((distance_to_polyline(&sq, [1.0, 2.0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn separatrix_contains_p2() {
        let p = NondimParams::new(0.07, 0.0645, 0.32, 0.15, 0.736).unwrap();
        let br = saddle_branches(&p, &BranchOptions::default()).unwrap();
        let poly = separatrix_polygon(&p, &br).unwrap();
        let (_, p2) = saddle_and_focus(&p).unwrap();
        assert!(point_in_polygon(&poly, p2.xy()));
        assert!(!point_in_polygon(&poly, [0.01, p.c]));
    }
}
