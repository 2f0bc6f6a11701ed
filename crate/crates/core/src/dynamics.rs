//! Trajectories of the nondimensional system: attractor targets, the
//! invariant region Φ and limit-cycle detection by Poincaré return.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::equilibria::{boundary_equilibria, positive_equilibria, Equilibrium, EquilibriumKind};
use crate::error::{Error, Result};
use crate::integrator::{integrate, Direction, Event, IntegrateOptions, Reversed, Termination, Trajectory};
use crate::model::{Frame, NondimParams, State};

/// Radius of the ball around an attractor whose entry counts as convergence.
pub const ATTRACTOR_RADIUS: f64 = 1e-3;
/// Attractor id of `(0, C)`.
pub const ID_PREDATOR_ONLY: usize = 0;
/// Attractor id of `P2`.
pub const ID_P2: usize = 1;

/// A candidate attractor: its location, the per-axis scale of its ball and
/// the eigenvalues of its linearisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Attractor {
    pub id: usize,
    pub center: [f64; 2],
    pub scale: [f64; 2],
    pub eigenvalues: [Complex64; 2],
}

impl Attractor {
    /// Both eigenvalues have negative real part.
    pub fn is_stable(&self) -> bool {
        self.eigenvalues.iter().all(|z| z.re < 0.0)
    }

    fn from_equilibrium(id: usize, e: &Equilibrium) -> Self {
        Attractor {
            id,
            center: e.xy(),
            scale: [1.0, 1.0],
            eigenvalues: e.eigenvalues,
        }
    }
}

/// `(0, C)` and, when it exists, `P2`, whatever its stability.
pub fn nondim_attractors(p: &NondimParams) -> Vec<Attractor> {
    let mut out = Vec::new();
    if let Some(e) = boundary_equilibria(p)
        .iter()
        .find(|e| e.kind == EquilibriumKind::PredatorOnly)
    {
        out.push(Attractor::from_equilibrium(ID_PREDATOR_ONLY, e));
    }
    if let Some(e) = positive_equilibria(p)
        .iter()
        .find(|e| e.kind == EquilibriumKind::P2)
    {
        out.push(Attractor::from_equilibrium(ID_P2, e));
    }
    out
}

/// Ball events for the stable members of `attractors`. Unstable candidates
/// get no ball, so trajectories are never declared converged to them.
pub fn attractor_events(attractors: &[Attractor], radius: f64) -> Vec<Event> {
    attractors
        .iter()
        .filter(|a| a.is_stable())
        .map(|a| Event::Ball {
            id: a.id,
            center: a.center,
            scale: a.scale,
            radius,
        })
        .collect()
}

/// The half-plane `u < threshold` with `threshold < M`. There `du/dτ < 0`,
/// so `u` decreases to 0 and every start with `v > 0` ends at `(0, C)`.
pub fn prey_collapse_event(threshold: f64) -> Event {
    Event::HalfPlane {
        id: ID_PREDATOR_ONLY,
        normal: [1.0, 0.0],
        offset: threshold,
    }
}

/// Ball events for `(0, C)` and a stable `P2`, plus the prey-collapse
/// half-plane at `0.999 M`.
pub fn default_events(p: &NondimParams) -> Vec<Event> {
    let mut ev = attractor_events(&nondim_attractors(p), ATTRACTOR_RADIUS);
    ev.push(prey_collapse_event(0.999 * p.m));
    ev
}

fn check_start(s0: [f64; 2], opts: &IntegrateOptions) -> Result<()> {
    if !(s0[0] >= 0.0 && s0[1] >= 0.0 && s0[0].is_finite() && s0[1].is_finite()) {
        return Err(Error::InvalidParams(format!(
            "start ({}, {}) is not in the closed first quadrant",
            s0[0], s0[1]
        )));
    }
    if !(opts.tol > 0.0) || !(opts.t_max > 0.0) {
        return Err(Error::InvalidParams("tol and t_max must be positive".into()));
    }
    Ok(())
}

/// Forward integration of the nondimensional system from `s0`.
pub fn simulate(
    p: &NondimParams,
    s0: State,
    opts: &IntegrateOptions,
    events: &[Event],
) -> Result<Trajectory> {
    if s0.frame != Frame::Nondimensional {
        return Err(Error::InvalidParams("simulate expects a nondimensional start".into()));
    }
    check_start(s0.xy(), opts)?;
    Ok(integrate(p, s0.xy(), opts, events))
}

/// `Φ = [0, 1] × [0, 1 + C]`.
pub fn phi(p: &NondimParams) -> ([f64; 2], [f64; 2]) {
    ([0.0, 0.0], [1.0, 1.0 + p.c])
}

fn in_phi(p: &NondimParams, s: [f64; 2], margin: f64) -> bool {
    s[0] <= 1.0 + margin && s[1] <= 1.0 + p.c + margin && s[0] >= -margin && s[1] >= -margin
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InvariantFailure {
    NeverEntered { last: [f64; 2] },
    LeftAfterEntry { t: f64, state: [f64; 2] },
    NotMonotone { t: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantReport {
    pub samples: usize,
    pub passed: usize,
    pub witnesses: Vec<([f64; 2], InvariantFailure)>,
}

impl InvariantReport {
    pub fn all_passed(&self) -> bool {
        self.passed == self.samples
    }
}

/// Check one trajectory: it reaches Φ (with `margin`) and stays there.
/// While `u > 1 + margin` with `v < u + C`, `u` must be decreasing.
pub fn check_invariance(p: &NondimParams, traj: &Trajectory, margin: f64) -> std::result::Result<(), InvariantFailure> {
    let entry = traj.points.iter().position(|&s| in_phi(p, s, margin));
    let Some(first) = entry else {
        return Err(InvariantFailure::NeverEntered { last: traj.last() });
    };
    for i in 0..first {
        let (a, b) = (traj.points[i], traj.points[i + 1]);
        if a[0] > 1.0 + margin && a[1] < a[0] + p.c && b[0] > a[0] {
            return Err(InvariantFailure::NotMonotone { t: traj.times[i] });
        }
    }
    for (&t, &s) in traj.times[first..].iter().zip(&traj.points[first..]) {
        if !in_phi(p, s, margin) {
            return Err(InvariantFailure::LeftAfterEntry { t, state: s });
        }
    }
    Ok(())
}

/// Integrates `n_samples` seeded random starts in `[0, 3] × [0, 3(1 + C)]`
/// over `opts.t_max` and checks each with [`check_invariance`] at margin 10⁻⁶.
pub fn verify_invariant_region(
    p: &NondimParams,
    n_samples: usize,
    seed: u64,
    opts: &IntegrateOptions,
) -> InvariantReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<[f64; 2]> = (0..n_samples)
        .map(|_| [rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0 * (1.0 + p.c))])
        .collect();
    let mut report = InvariantReport {
        samples: n_samples,
        passed: 0,
        witnesses: Vec::new(),
    };
    let opts = IntegrateOptions {
        record: true,
        ..*opts
    };
    for s0 in starts {
        let traj = integrate(p, s0, &opts, &[]);
        match check_invariance(p, &traj, 1e-6) {
            Ok(()) => report.passed += 1,
            Err(f) => report.witnesses.push((s0, f)),
        }
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeDirection {
    Forward,
    Reversed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleStability {
    Stable,
    Unstable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitCycle {
    /// One loop, starting and ending at the anchor, ordered along the forward flow.
    pub points: Vec<State>,
    pub period: f64,
    pub stability: CycleStability,
    pub surrounded_equilibrium: Option<Equilibrium>,
    /// Crossing of the section `{v = v(P2), u > u(P2)}` on the last loop.
    pub anchor: [f64; 2],
    /// `|crossing_{n+1} − crossing_n|` on the last loop.
    pub residual: f64,
    pub loops: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleOptions {
    /// Convergence threshold on successive section crossings.
    pub tol: f64,
    pub max_loops: usize,
    /// Time budget for a single return.
    pub loop_t_max: f64,
    /// Local error tolerance of the integrator.
    pub integrator_tol: f64,
    /// Crossings closer than this to `P2` count as converging to it.
    pub equilibrium_radius: f64,
}

impl Default for CycleOptions {
    fn default() -> Self {
        CycleOptions {
            tol: 1e-8,
            max_loops: 400,
            loop_t_max: 1e5,
            integrator_tol: 1e-12,
            equilibrium_radius: 1e-6,
        }
    }
}

/// Winding number of the closed polyline `poly` around `pt`.
pub fn winding_number(poly: &[[f64; 2]], pt: [f64; 2]) -> i32 {
    let mut total = 0.0;
    let n = poly.len();
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let (ax, ay) = (a[0] - pt[0], a[1] - pt[1]);
        let (bx, by) = (b[0] - pt[0], b[1] - pt[1]);
        total += (ax * by - ay * bx).atan2(ax * bx + ay * by);
    }
    (total / std::f64::consts::TAU).round() as i32
}

/// One Poincaré return from `start` (on the section) to the next crossing.
fn poincare_return(
    p: &NondimParams,
    start: [f64; 2],
    direction: TimeDirection,
    events: &[Event],
    opts: &IntegrateOptions,
) -> Trajectory {
    match direction {
        TimeDirection::Forward => integrate(p, start, opts, events),
        TimeDirection::Reversed => integrate(&Reversed(*p), start, opts, events),
    }
}

/// Iterate the return map of the section `{v = v(P2), u > u(P2)}` from the
/// first crossing after `seed`. Integrate in reversed time to find cycles
/// that are unstable in forward time.
///
/// Returns `Ok(None)` when the crossings approach `P2`, the orbit leaves a
/// neighbourhood of Φ, enters an attractor, or the loop budget runs out.
/// Fails with `NoSectionCrossing` when the orbit never returns.
pub fn find_limit_cycle(
    p: &NondimParams,
    seed: State,
    direction: TimeDirection,
    copts: &CycleOptions,
) -> Result<Option<LimitCycle>> {
    let p2 = positive_equilibria(p)
        .into_iter()
        .find(|e| e.kind == EquilibriumKind::P2)
        .ok_or_else(|| Error::Precondition("P2 does not exist".into()))?;
    let c2 = p2.xy();
    let (sect_dir, stability) = match direction {
        TimeDirection::Forward => (Direction::Rising, CycleStability::Stable),
        TimeDirection::Reversed => (Direction::Falling, CycleStability::Unstable),
    };
    let section = Event::Section {
        id: 0,
        point: c2,
        normal: [0.0, 1.0],
        along: Some([1.0, 0.0]),
        direction: sect_dir,
        terminal: true,
    };
    let (lo, hi) = phi(p);
    let pad = 0.05 * (1.0 + p.c);
    let mut events = vec![
        section,
        Event::Window {
            lo: [lo[0] - pad, lo[1] - pad],
            hi: [hi[0] + pad, hi[1] + pad],
        },
        Event::ball(usize::MAX, c2, copts.equilibrium_radius),
    ];
    if direction == TimeDirection::Forward {
        events.extend(
            attractor_events(&nondim_attractors(p), ATTRACTOR_RADIUS)
                .into_iter()
                .filter(|e| !matches!(e, Event::Ball { id, .. } if *id == ID_P2)),
        );
        events.push(prey_collapse_event(0.999 * p.m));
    }
    let opts = IntegrateOptions {
        t_max: copts.loop_t_max,
        tol: copts.integrator_tol,
        ..IntegrateOptions::default()
    };

    let first = poincare_return(p, seed.xy(), direction, &events, &opts);
    if first.termination != Termination::ReachedSection(0) {
        return match first.termination {
            Termination::MaxTime | Termination::StepLimit => Err(Error::NoSectionCrossing {
                branch: "cycle seed".into(),
                terminus: format!("{:?}", first.termination),
            }),
            _ => Ok(None),
        };
    }
    let mut d = first.last()[0] - c2[0];
    let mut history: Vec<f64> = vec![d];
    for loops in 1..=copts.max_loops {
        if d < copts.equilibrium_radius {
            return Ok(None);
        }
        let start = [c2[0] + d, c2[1]];
        let traj = poincare_return(p, start, direction, &events, &opts);
        if traj.termination != Termination::ReachedSection(0) {
            return Ok(None);
        }
        let next = traj.last()[0] - c2[0];
        let residual = (next - d).abs();
        if residual < copts.tol {
            let mut pts: Vec<[f64; 2]> = traj.points.clone();
            if direction == TimeDirection::Reversed {
                pts.reverse();
            }
            return Ok(Some(LimitCycle {
                points: pts.iter().map(|s| State::nondim(s[0], s[1])).collect(),
                period: traj.final_time(),
                stability,
                surrounded_equilibrium: (winding_number(&pts, c2) != 0).then_some(p2),
                anchor: [c2[0] + next, c2[1]],
                residual,
                loops,
            }));
        }
        history.push(next);
        d = next;
        // Aitken extrapolation once the iterates contract monotonically
        if history.len() >= 3 && loops % 3 == 0 {
            let n = history.len();
            let (x0, x1, x2) = (history[n - 3], history[n - 2], history[n - 1]);
            let ratio = (x2 - x1) / (x1 - x0);
            if ratio > 0.0 && ratio < 0.95 {
                let guess = x2 + ratio / (1.0 - ratio) * (x2 - x1);
                if guess > copts.equilibrium_radius && c2[0] + guess < hi[0] {
                    d = guess;
                    history.push(guess);
                }
            }
        }
    }
    Ok(None)
}
