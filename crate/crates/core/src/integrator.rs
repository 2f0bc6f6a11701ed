//! Adaptive Dormand–Prince 5(4) integration of planar fields with event
//! location on the continuous extension.

use crate::model::{Frame, State};

/// An autonomous planar vector field.
pub trait VectorField: Sync {
    fn eval(&self, s: [f64; 2]) -> [f64; 2];
}

impl<F: VectorField + ?Sized> VectorField for &F {
    #[inline]
    fn eval(&self, s: [f64; 2]) -> [f64; 2] {
        (**self).eval(s)
    }
}

/// The field with time reversed.
#[derive(Debug, Clone, Copy)]
pub struct Reversed<F>(pub F);

impl<F: VectorField> VectorField for Reversed<F> {
    #[inline]
    fn eval(&self, s: [f64; 2]) -> [f64; 2] {
        let [a, b] = self.0.eval(s);
        [-a, -b]
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IntegrateOptions {
    pub t_max: f64,
    /// Mixed absolute/relative local error bound per step.
    pub tol: f64,
    pub h_init: f64,
    /// Step-size floor; falling below it ends the run with `StepFailure`.
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
    /// Keep every accepted step in the trajectory.
    pub record: bool,
    /// Stop once the polyline exceeds this length.
    pub max_arc_length: Option<f64>,
    /// Clip tiny negative components to zero after each step.
    pub clip: bool,
    pub frame: Frame,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self {
            t_max: 1.0e4,
            tol: 1.0e-9,
            h_init: 1.0e-2,
            h_min: 1.0e-12,
            h_max: 50.0,
            max_steps: 5_000_000,
            record: true,
            max_arc_length: None,
            clip: true,
            frame: Frame::Nondimensional,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Rising,
    Falling,
    Either,
}

/// Event functions watched during integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Event {
    /// Terminal: enters the ellipse `|(s − center) / scale| ≤ radius`.
    Ball {
        id: usize,
        center: [f64; 2],
        scale: [f64; 2],
        radius: f64,
    },
    /// Terminal: enters the half-plane `normal · s < offset`, an absorbing
    /// set attributed to attractor `id`.
    HalfPlane {
        id: usize,
        normal: [f64; 2],
        offset: f64,
    },
    /// Terminal: leaves the box `[lo, hi]`.
    Window { lo: [f64; 2], hi: [f64; 2] },
    /// Crossing of the line through `point` with the given `normal`,
    /// restricted to the ray side `(s − point) · along > 0` when `along` is set.
    Section {
        id: usize,
        point: [f64; 2],
        normal: [f64; 2],
        along: Option<[f64; 2]>,
        direction: Direction,
        terminal: bool,
    },
}

impl Event {
    pub fn ball(id: usize, center: [f64; 2], radius: f64) -> Self {
        Event::Ball {
            id,
            center,
            scale: [1.0, 1.0],
            radius,
        }
    }

    fn value(&self, s: [f64; 2]) -> f64 {
        match *self {
            Event::Ball {
                center,
                scale,
                radius,
                ..
            } => ((s[0] - center[0]) / scale[0]).hypot((s[1] - center[1]) / scale[1]) - radius,
            Event::HalfPlane { normal, offset, .. } => normal[0] * s[0] + normal[1] * s[1] - offset,
            Event::Window { lo, hi } => (s[0] - lo[0])
                .min(hi[0] - s[0])
                .min(s[1] - lo[1])
                .min(hi[1] - s[1]),
            Event::Section { point, normal, .. } => {
                (s[0] - point[0]) * normal[0] + (s[1] - point[1]) * normal[1]
            }
        }
    }

    fn triggered(&self, g0: f64, g1: f64) -> bool {
        match *self {
            Event::Ball { .. } | Event::HalfPlane { .. } => g0 > 0.0 && g1 <= 0.0,
            Event::Window { .. } => g0 >= 0.0 && g1 < 0.0,
            Event::Section { direction, .. } => match direction {
                Direction::Rising => g0 < 0.0 && g1 >= 0.0,
                Direction::Falling => g0 > 0.0 && g1 <= 0.0,
                Direction::Either => (g0 < 0.0 && g1 >= 0.0) || (g0 > 0.0 && g1 <= 0.0),
            },
        }
    }

    fn accepts(&self, s: [f64; 2]) -> bool {
        match *self {
            Event::Section {
                point,
                along: Some(d),
                ..
            } => (s[0] - point[0]) * d[0] + (s[1] - point[1]) * d[1] > 0.0,
            _ => true,
        }
    }

    fn is_terminal(&self) -> bool {
        match *self {
            Event::Section { terminal, .. } => terminal,
            _ => true,
        }
    }

    fn termination(&self) -> Termination {
        match *self {
            Event::Ball { id, .. } | Event::HalfPlane { id, .. } => {
                Termination::EnteredAttractor(id)
            }
            Event::Window { .. } => Termination::LeftWindow,
            Event::Section { id, .. } => Termination::ReachedSection(id),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    MaxTime,
    EnteredAttractor(usize),
    LeftWindow,
    ConvergedToCycle,
    StepFailure,
    StepLimit,
    ArcLength,
    ReachedSection(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub section: usize,
    pub t: f64,
    pub state: [f64; 2],
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub frame: Frame,
    pub times: Vec<f64>,
    pub points: Vec<[f64; 2]>,
    pub termination: Termination,
    pub crossings: Vec<Crossing>,
    /// Smallest state component produced by a step, before clipping.
    pub min_component: f64,
    pub arc_length: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Trajectory {
    pub fn last(&self) -> [f64; 2] {
        *self.points.last().expect("trajectory always holds its start")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory always holds its start")
    }

    pub fn states(&self) -> impl Iterator<Item = (f64, State)> + '_ {
        let frame = self.frame;
        self.times.iter().zip(&self.points).map(move |(&t, p)| {
            (
                t,
                State {
                    u: p[0],
                    v: p[1],
                    frame,
                },
            )
        })
    }
}

// Dormand–Prince 5(4) tableau; the field is autonomous so the nodes are unused.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// continuous extension
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

struct Dense {
    r: [[f64; 2]; 5],
}

impl Dense {
    fn at(&self, theta: f64) -> [f64; 2] {
        let t1 = 1.0 - theta;
        let r = &self.r;
        let mut out = [0.0; 2];
        for i in 0..2 {
            out[i] = r[0][i] + theta * (r[1][i] + t1 * (r[2][i] + theta * (r[3][i] + t1 * r[4][i])));
        }
        out
    }
}

#[inline]
fn axpy(y: [f64; 2], h: f64, terms: &[(f64, [f64; 2])]) -> [f64; 2] {
    let mut out = y;
    for &(a, k) in terms {
        out[0] += h * a * k[0];
        out[1] += h * a * k[1];
    }
    out
}

/// Integrate `field` from `s0` until `opts.t_max` or a terminal event.
pub fn integrate<F: VectorField + ?Sized>(
    field: &F,
    s0: [f64; 2],
    opts: &IntegrateOptions,
    events: &[Event],
) -> Trajectory {
    let mut traj = Trajectory {
        frame: opts.frame,
        times: vec![0.0],
        points: vec![s0],
        termination: Termination::MaxTime,
        crossings: Vec::new(),
        min_component: s0[0].min(s0[1]),
        arc_length: 0.0,
        accepted_steps: 0,
        rejected_steps: 0,
    };

    for ev in events {
        let inside = match ev {
            Event::Ball { .. } | Event::HalfPlane { .. } => ev.value(s0) <= 0.0,
            Event::Window { .. } => ev.value(s0) < 0.0,
            Event::Section { .. } => false,
        };
        if inside {
            traj.termination = ev.termination();
            return traj;
        }
    }

    let mut t = 0.0;
    let mut y = s0;
    let mut k1 = field.eval(y);
    let mut h = opts.h_init.min(opts.h_max).min(opts.t_max);
    let mut steps = 0usize;
    let mut values: Vec<f64> = events.iter().map(|e| e.value(y)).collect();

    loop {
        if t >= opts.t_max {
            traj.termination = Termination::MaxTime;
            break;
        }
        if steps >= opts.max_steps {
            traj.termination = Termination::StepLimit;
            break;
        }
        h = h.min(opts.h_max).min(opts.t_max - t);

        let k2 = field.eval(axpy(y, h, &[(A21, k1)]));
        let k3 = field.eval(axpy(y, h, &[(A31, k1), (A32, k2)]));
        let k4 = field.eval(axpy(y, h, &[(A41, k1), (A42, k2), (A43, k3)]));
        let k5 = field.eval(axpy(y, h, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]));
        let k6 = field.eval(axpy(
            y,
            h,
            &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)],
        ));
        let y_new = axpy(
            y,
            h,
            &[(A71, k1), (A73, k3), (A74, k4), (A75, k5), (A76, k6)],
        );
        let k7 = field.eval(y_new);

        let mut err = 0.0_f64;
        for i in 0..2 {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.tol * (1.0 + y[i].abs().max(y_new[i].abs()));
            err = err.max((e / sc).abs());
        }

        if !err.is_finite() || !y_new[0].is_finite() || !y_new[1].is_finite() || err > 1.0 {
            traj.rejected_steps += 1;
            let factor = if err.is_finite() {
                (0.9 * err.powf(-0.2)).clamp(0.1, 0.9)
            } else {
                0.1
            };
            h *= factor;
            if h < opts.h_min {
                traj.termination = Termination::StepFailure;
                break;
            }
            continue;
        }

        steps += 1;
        traj.accepted_steps += 1;
        traj.min_component = traj.min_component.min(y_new[0]).min(y_new[1]);
        let mut y1 = y_new;
        if opts.clip {
            y1 = [y1[0].max(0.0), y1[1].max(0.0)];
        }

        // events on this step
        let mut dense: Option<Dense> = None;
        let mut stop: Option<(f64, usize)> = None;
        let mut pending: Vec<Crossing> = Vec::new();
        for (idx, ev) in events.iter().enumerate() {
            let g0 = values[idx];
            let g1 = ev.value(y1);
            values[idx] = g1;
            if !ev.triggered(g0, g1) {
                continue;
            }
            let d = dense.get_or_insert_with(|| {
                let dy = [y_new[0] - y[0], y_new[1] - y[1]];
                let mut r = [[0.0; 2]; 5];
                for i in 0..2 {
                    r[0][i] = y[i];
                    r[1][i] = dy[i];
                    r[2][i] = h * k1[i] - dy[i];
                    r[3][i] = dy[i] - h * k7[i] - r[2][i];
                    r[4][i] = h
                        * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i]
                            + D7 * k7[i]);
                }
                Dense { r }
            });
            let theta = locate(ev, d, g0, opts.clip);
            let mut s = d.at(theta);
            if opts.clip {
                s = [s[0].max(0.0), s[1].max(0.0)];
            }
            if !ev.accepts(s) {
                continue;
            }
            if ev.is_terminal() {
                if stop.is_none_or(|(th, _)| theta < th) {
                    stop = Some((theta, idx));
                }
            } else if let Event::Section { id, .. } = *ev {
                pending.push(Crossing {
                    section: id,
                    t: t + theta * h,
                    state: s,
                });
            }
        }

        if let Some((theta, idx)) = stop {
            let d = dense.as_ref().expect("dense output built for triggered event");
            let mut s = d.at(theta);
            if opts.clip {
                s = [s[0].max(0.0), s[1].max(0.0)];
            }
            let t_ev = t + theta * h;
            pending.retain(|c| c.t <= t_ev);
            pending.sort_by(|a, b| a.t.total_cmp(&b.t));
            traj.crossings.extend(pending);
            if let Event::Section { id, .. } = events[idx] {
                traj.crossings.push(Crossing {
                    section: id,
                    t: t_ev,
                    state: s,
                });
            }
            traj.arc_length += (s[0] - y[0]).hypot(s[1] - y[1]);
            traj.times.push(t_ev);
            traj.points.push(s);
            traj.termination = events[idx].termination();
            return traj;
        }
        pending.sort_by(|a, b| a.t.total_cmp(&b.t));
        traj.crossings.extend(pending);

        traj.arc_length += (y1[0] - y[0]).hypot(y1[1] - y[1]);
        t += h;
        y = y1;
        k1 = if opts.clip && y1 != y_new {
            field.eval(y1)
        } else {
            k7
        };
        if opts.record {
            traj.times.push(t);
            traj.points.push(y);
        }
        if let Some(limit) = opts.max_arc_length {
            if traj.arc_length >= limit {
                traj.termination = Termination::ArcLength;
                break;
            }
        }

        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if h < opts.h_min {
            traj.termination = Termination::StepFailure;
            break;
        }
    }

    if traj.times.last() != Some(&t) {
        traj.times.push(t);
        traj.points.push(y);
    }
    traj
}

/// Bisection on the continuous extension for the first sign change in (0, 1].
fn locate(ev: &Event, d: &Dense, g0: f64, clip: bool) -> f64 {
    let value = |theta: f64| {
        let mut s = d.at(theta);
        if clip {
            s = [s[0].max(0.0), s[1].max(0.0)];
        }
        ev.value(s)
    };
    let fired = |g: f64| ev.triggered(g0, g);
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if fired(value(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    hi
}
