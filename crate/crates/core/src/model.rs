//! Parameters, vector fields and the change of variables between the
//! dimensional predator-prey system and its nondimensional polynomial form.
//!
//! The nondimensional system is
//!
//! ```text
//! du/dτ = u (u + C) ((u − M)(1 − u) − Q (u + B) v)
//! dv/dτ = S v (u + B) (u − v + C)
//! ```
//!
//! obtained from the dimensional multiple-Allee system with
//! `x = K u`, `y = n K v` and a positive, state-dependent rescaling of time.

use crate::error::{Error, Result};
use crate::integrator::VectorField;
use crate::linalg::Mat2;

/// Nondimensional parameters `(M, B, C, S, Q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NondimParams {
    /// Allee threshold, in (0, 1).
    pub m: f64,
    /// Non-fertile prey population.
    pub b: f64,
    /// Alternative food for the predator.
    pub c: f64,
    /// Predator intrinsic growth relative to the prey.
    pub s: f64,
    /// Predation rate.
    pub q: f64,
}

impl NondimParams {
    pub fn new(m: f64, b: f64, c: f64, s: f64, q: f64) -> Result<Self> {
        let p = Self { m, b, c, s, q };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("M", self.m),
            ("B", self.b),
            ("C", self.c),
            ("S", self.s),
            ("Q", self.q),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParams(format!(
                    "{name} must be finite and > 0 (got {v})"
                )));
            }
        }
        if self.m >= 1.0 {
            return Err(Error::InvalidParams(format!(
                "M must lie in (0, 1) (got {})",
                self.m
            )));
        }
        Ok(())
    }

    pub fn with_c(self, c: f64) -> Self {
        Self { c, ..self }
    }

    pub fn with_q(self, q: f64) -> Self {
        Self { q, ..self }
    }

    pub fn with_b(self, b: f64) -> Self {
        Self { b, ..self }
    }

    pub fn with_s(self, s: f64) -> Self {
        Self { s, ..self }
    }
}

/// Prey growth law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GrowthLaw {
    Logistic,
    StrongAllee,
    MultipleAllee,
}

impl GrowthLaw {
    pub fn name(self) -> &'static str {
        match self {
            GrowthLaw::Logistic => "logistic",
            GrowthLaw::StrongAllee => "strong-allee",
            GrowthLaw::MultipleAllee => "multiple-allee",
        }
    }
}

impl std::str::FromStr for GrowthLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "logistic" => Ok(GrowthLaw::Logistic),
            "strong-allee" | "strong" => Ok(GrowthLaw::StrongAllee),
            "multiple-allee" | "multiple" => Ok(GrowthLaw::MultipleAllee),
            other => Err(Error::InvalidParams(format!("unknown growth law `{other}`"))),
        }
    }
}

/// Dimensional parameters of the predator-prey system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimParams {
    /// Prey intrinsic growth rate.
    pub r: f64,
    /// Prey carrying capacity.
    pub k: f64,
    /// Allee threshold (minimum viable population).
    pub m: f64,
    /// Per-capita predation rate.
    pub q: f64,
    /// Predator intrinsic growth rate.
    pub s: f64,
    /// Quality of the prey as food for the predator.
    pub n: f64,
    /// Non-fertile prey population; unused by the strong-Allee law.
    pub b: f64,
    /// Alternative food available to the predator.
    pub c: f64,
    /// Strong or multiple Allee growth.
    pub variant: GrowthLaw,
}

impl DimParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("r", self.r),
            ("K", self.k),
            ("m", self.m),
            ("q", self.q),
            ("s", self.s),
            ("n", self.n),
            ("b", self.b),
            ("c", self.c),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParams(format!(
                    "{name} must be finite and > 0 (got {v})"
                )));
            }
        }
        if self.m >= self.k {
            return Err(Error::InvalidParams(format!(
                "Allee threshold m must satisfy m < K (got m = {}, K = {})",
                self.m, self.k
            )));
        }
        if self.variant == GrowthLaw::Logistic {
            return Err(Error::InvalidParams(
                "dimensional model requires strong-allee or multiple-allee growth".into(),
            ));
        }
        Ok(())
    }

    pub fn with_b(self, b: f64) -> Self {
        Self { b, ..self }
    }

    pub fn with_variant(self, variant: GrowthLaw) -> Self {
        Self { variant, ..self }
    }

    /// Predator carrying capacity `n x + c` at prey density `x`.
    pub fn predator_capacity(&self, x: f64) -> f64 {
        self.n * x + self.c
    }
}

/// Coordinate frame of a [`State`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Frame {
    Dimensional,
    Nondimensional,
}

/// A point of the closed first quadrant: prey `u` (or `x`), predator `v` (or `y`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub u: f64,
    pub v: f64,
    pub frame: Frame,
}

impl State {
    pub fn nondim(u: f64, v: f64) -> Self {
        Self {
            u,
            v,
            frame: Frame::Nondimensional,
        }
    }

    pub fn dim(x: f64, y: f64) -> Self {
        Self {
            u: x,
            v: y,
            frame: Frame::Dimensional,
        }
    }

    pub fn xy(&self) -> [f64; 2] {
        [self.u, self.v]
    }

    pub fn norm(&self) -> f64 {
        self.u.hypot(self.v)
    }

    pub fn is_admissible(&self) -> bool {
        self.u.is_finite() && self.v.is_finite() && self.u >= 0.0 && self.v >= 0.0
    }
}

/// `(M, B, C, S, Q) = (m/K, b/K, c/(nK), s/r, qnK/r)`.
pub fn nondimensionalize(p: &DimParams) -> Result<NondimParams> {
    p.validate()?;
    NondimParams::new(
        p.m / p.k,
        p.b / p.k,
        p.c / (p.n * p.k),
        p.s / p.r,
        p.q * p.n * p.k / p.r,
    )
}

/// Nondimensional state to dimensional state: `(x, y) = (K u, n K v)`.
///
/// Only orbits correspond under the change of variables; the time
/// rescaling depends on the state, so timed samples are not mapped.
pub fn map_state(p: &DimParams, s: State) -> Result<State> {
    if s.frame != Frame::Nondimensional {
        return Err(Error::InvalidParams(
            "map_state expects a nondimensional state".into(),
        ));
    }
    Ok(State::dim(p.k * s.u, p.n * p.k * s.v))
}

/// Inverse of [`map_state`].
pub fn unmap_state(p: &DimParams, s: State) -> Result<State> {
    if s.frame != Frame::Dimensional {
        return Err(Error::InvalidParams(
            "unmap_state expects a dimensional state".into(),
        ));
    }
    Ok(State::nondim(s.u / p.k, s.v / (p.n * p.k)))
}

/// Right-hand side of the nondimensional system.
#[inline]
pub fn field_nondim(p: &NondimParams, s: [f64; 2]) -> [f64; 2] {
    let [u, v] = s;
    [
        u * (u + p.c) * ((u - p.m) * (1.0 - u) - p.q * (u + p.b) * v),
        p.s * v * (u + p.b) * (u - v + p.c),
    ]
}

/// Right-hand side of the dimensional system in its own time.
pub fn field_dim(p: &DimParams, s: [f64; 2]) -> Result<[f64; 2]> {
    let [x, y] = s;
    let capacity = p.predator_capacity(x);
    if capacity == 0.0 {
        return Err(Error::InvalidParams(
            "predator carrying capacity n x + c vanished".into(),
        ));
    }
    let prey = match p.variant {
        GrowthLaw::MultipleAllee => {
            x * (p.r / (x + p.b)) * (1.0 - x / p.k) * (x - p.m) - p.q * x * y
        }
        GrowthLaw::StrongAllee => p.r * x * (1.0 - x / p.k) * (x - p.m) - p.q * x * y,
        GrowthLaw::Logistic => p.r * x * (1.0 - x / p.k) - p.q * x * y,
    };
    Ok([prey, p.s * y * (1.0 - y / capacity)])
}

/// Positive factor `g(x, y)` such that `g · field_dim` is polynomial.
///
/// Multiplying a planar field by a positive function preserves its oriented
/// orbits. For the multiple-Allee law `g = (x + b)(n x + c) / (r K · nK)`,
/// which turns `field_dim` into the pull-back of [`field_nondim`]; for the
/// strong-Allee law `g = (n x + c) / (r K · nK)`.
pub fn orbit_time_factor(p: &DimParams, s: [f64; 2]) -> f64 {
    let [x, _] = s;
    let nk = p.n * p.k;
    match p.variant {
        GrowthLaw::MultipleAllee => (x + p.b) * p.predator_capacity(x) / (p.r * p.k * nk),
        GrowthLaw::StrongAllee | GrowthLaw::Logistic => {
            p.predator_capacity(x) / (p.r * p.k * nk)
        }
    }
}

/// Analytic Jacobian of [`field_nondim`].
pub fn jacobian_nondim(p: &NondimParams, s: [f64; 2]) -> Mat2 {
    let [u, v] = s;
    let growth = (u - p.m) * (1.0 - u) - p.q * (u + p.b) * v;
    let d_growth_du = 1.0 + p.m - 2.0 * u - p.q * v;
    let w = u * (u + p.c);
    Mat2([
        [
            (2.0 * u + p.c) * growth + w * d_growth_du,
            -p.q * w * (u + p.b),
        ],
        [
            p.s * v * (2.0 * u + p.b + p.c - v),
            p.s * (u + p.b) * (u + p.c - 2.0 * v),
        ],
    ])
}

/// Second derivatives of [`field_nondim`]: entry `i` is the Hessian of
/// component `i` with respect to `(u, v)`.
pub fn hessian_nondim(p: &NondimParams, s: [f64; 2]) -> [Mat2; 2] {
    let [u, v] = s;
    let growth = (u - p.m) * (1.0 - u) - p.q * (u + p.b) * v;
    let d_growth_du = 1.0 + p.m - 2.0 * u - p.q * v;
    let w = u * (u + p.c);
    let f_uu = 2.0 * growth + 2.0 * (2.0 * u + p.c) * d_growth_du - 2.0 * w;
    let f_uv = -p.q * ((2.0 * u + p.c) * (u + p.b) + w);
    let g_uu = 2.0 * p.s * v;
    let g_uv = p.s * (2.0 * u + p.b + p.c - 2.0 * v);
    let g_vv = -2.0 * p.s * (u + p.b);
    [
        Mat2([[f_uu, f_uv], [f_uv, 0.0]]),
        Mat2([[g_uu, g_uv], [g_uv, g_vv]]),
    ]
}

/// Parameters of a prey growth law, used by [`per_capita_growth`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthParams {
    pub r: f64,
    pub k: f64,
    pub m: f64,
    pub b: f64,
}

impl From<&DimParams> for GrowthParams {
    fn from(p: &DimParams) -> Self {
        Self {
            r: p.r,
            k: p.k,
            m: p.m,
            b: p.b,
        }
    }
}

/// Per-capita prey growth rate at density `x`.
pub fn per_capita_growth(law: GrowthLaw, p: &GrowthParams, x: f64) -> f64 {
    let logistic = p.r * (1.0 - x / p.k);
    match law {
        GrowthLaw::Logistic => logistic,
        GrowthLaw::StrongAllee => logistic * (x - p.m),
        GrowthLaw::MultipleAllee => logistic * (x - p.m) / (x + p.b),
    }
}

/// Interval of prey densities where per-capita growth is positive and
/// increasing. `None` for the logistic law, which has no depensation.
pub fn depensation_interval(law: GrowthLaw, b: f64, k: f64, m: f64) -> Option<(f64, f64)> {
    match law {
        GrowthLaw::Logistic => None,
        GrowthLaw::StrongAllee => Some((m, 0.5 * (k + m))),
        GrowthLaw::MultipleAllee => Some((m, -b + ((b + k) * (b + m)).sqrt())),
    }
}

impl VectorField for NondimParams {
    #[inline]
    fn eval(&self, s: [f64; 2]) -> [f64; 2] {
        field_nondim(self, s)
    }
}

/// Dimensional field reparametrized by [`orbit_time_factor`]; same orbits as
/// [`field_dim`] without the fast prey time scale.
#[derive(Debug, Clone, Copy)]
pub struct DimOrbitField(pub DimParams);

impl VectorField for DimOrbitField {
    #[inline]
    fn eval(&self, s: [f64; 2]) -> [f64; 2] {
        let g = orbit_time_factor(&self.0, s);
        match field_dim(&self.0, s) {
            Ok([fx, fy]) => [fx * g, fy * g],
            Err(_) => [f64::NAN, f64::NAN],
        }
    }
}
