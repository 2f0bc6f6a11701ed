//! Equilibria of the nondimensional system, their linear classification,
//! the trace function `f`, and the local bifurcation quantities at the
//! double equilibrium `P3`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::model::{field_nondim, hessian_nondim, jacobian_nondim, NondimParams, State};

/// Relative tolerance for the det/trace classification decisions.
pub const CLASSIFY_TOL: f64 = 1e-8;
/// Relative tolerance for `Δ = 0` when locating a single positive equilibrium.
pub const DELTA_TOL: f64 = 1e-8;
/// Relative tolerance for the preconditions of [`sotomayor_quantities`] and
/// [`cusp_coefficients`].
pub const LOCAL_BIFURCATION_TOL: f64 = 1e-6;
/// Threshold on `|L11|` above which the cusp is reported as codimension two.
pub const L11_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EquilibriumKind {
    Origin,
    /// `(M, 0)`
    AlleeThreshold,
    /// `(1, 0)`
    Carrying,
    /// `(0, C)`
    PredatorOnly,
    P1,
    P2,
    P3,
}

impl EquilibriumKind {
    pub fn name(self) -> &'static str {
        match self {
            EquilibriumKind::Origin => "origin",
            EquilibriumKind::AlleeThreshold => "allee-threshold",
            EquilibriumKind::Carrying => "carrying",
            EquilibriumKind::PredatorOnly => "predator-only",
            EquilibriumKind::P1 => "P1",
            EquilibriumKind::P2 => "P2",
            EquilibriumKind::P3 => "P3",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Saddle,
    RepellerNode,
    RepellerFocus,
    AttractorNode,
    AttractorFocus,
    SaddleNodeAttractor,
    SaddleNodeRepeller,
    Cusp,
    CenterCandidate,
}

impl Classification {
    pub fn name(self) -> &'static str {
        match self {
            Classification::Saddle => "saddle",
            Classification::RepellerNode => "repeller-node",
            Classification::RepellerFocus => "repeller-focus",
            Classification::AttractorNode => "attractor-node",
            Classification::AttractorFocus => "attractor-focus",
            Classification::SaddleNodeAttractor => "nonhyperbolic-saddle-node-attractor",
            Classification::SaddleNodeRepeller => "nonhyperbolic-saddle-node-repeller",
            Classification::Cusp => "cusp",
            Classification::CenterCandidate => "center-candidate",
        }
    }

    /// Hyperbolic attractor (both eigenvalues in the open left half-plane).
    pub fn is_attractor(self) -> bool {
        matches!(
            self,
            Classification::AttractorNode | Classification::AttractorFocus
        )
    }

    /// Hyperbolic repeller.
    pub fn is_repeller(self) -> bool {
        matches!(
            self,
            Classification::RepellerNode | Classification::RepellerFocus
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    pub location: State,
    pub kind: EquilibriumKind,
    pub eigenvalues: [Complex64; 2],
    pub classification: Classification,
}

impl Equilibrium {
    pub fn xy(&self) -> [f64; 2] {
        self.location.xy()
    }
}

/// Discriminant of the quadratic whose roots are the prey coordinates of
/// the positive equilibria, with the roots themselves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discriminant {
    pub value: f64,
    pub u1: Option<f64>,
    pub u2: Option<f64>,
    pub u3: Option<f64>,
}

/// `1 + M − Q(B + C)`, the linear coefficient of the equilibrium quadratic.
fn linear_coeff(p: &NondimParams) -> f64 {
    1.0 + p.m - p.q * (p.b + p.c)
}

/// Absolute tolerance on `Δ`: `DELTA_TOL · (1 + M + Q(B + C))²`.
pub fn delta_tolerance(p: &NondimParams) -> f64 {
    let s = 1.0 + p.m + p.q * (p.b + p.c);
    DELTA_TOL * s * s
}

/// `Δ = (1 + M − Q(B + C))² − 4(M + BCQ)(1 + Q)` and the roots
/// `u1,2 = (1 + M − Q(B + C) ∓ √Δ) / (2(1 + Q))`, `u3` the vertex.
///
/// Roots are reported only when they are positive, which requires
/// `1 + M − Q(B + C) > 0`; otherwise both roots of the quadratic are negative.
pub fn discriminant(p: &NondimParams) -> Discriminant {
    let a = linear_coeff(p);
    let prod = (p.m + p.b * p.c * p.q) / (1.0 + p.q);
    let value = a * a - 4.0 * (p.m + p.b * p.c * p.q) * (1.0 + p.q);
    let u3 = (a > 0.0).then(|| a / (2.0 * (1.0 + p.q)));
    let (u1, u2) = if value >= 0.0 && a > 0.0 {
        // larger root first, the smaller from the product of the roots
        let big = (a + value.sqrt()) / (2.0 * (1.0 + p.q));
        (Some(prod / big), Some(big))
    } else {
        (None, None)
    };
    Discriminant { value, u1, u2, u3 }
}

fn residual(p: &NondimParams, s: [f64; 2]) -> f64 {
    let f = field_nondim(p, s);
    f[0].hypot(f[1])
}

/// Largest field residual accepted at an equilibrium of the given kind.
///
/// `P3` is placed at the vertex of the quadratic while `|Δ|` may be as large
/// as [`delta_tolerance`]; there the prey component of the field equals
/// `u(u + C) Δ / (4(1 + Q))`, which is added to the base allowance.
fn residual_allowance(p: &NondimParams, kind: EquilibriumKind, s: [f64; 2]) -> f64 {
    let base = 1e-10 * (1.0 + s[0].hypot(s[1]));
    if kind == EquilibriumKind::P3 {
        base + s[0] * (s[0] + p.c) * delta_tolerance(p) / (4.0 * (1.0 + p.q))
    } else {
        base
    }
}

/// Eigenvalues and classification of the linearisation at `s`, with
/// `tol_det = rel_tol · scale²` and `tol_tr = rel_tol · scale`, where
/// `scale` is the largest absolute Jacobian entry.
pub fn classify_at(p: &NondimParams, s: [f64; 2], rel_tol: f64) -> (Classification, [Complex64; 2]) {
    let j = jacobian_nondim(p, s);
    classify_matrix(&j, rel_tol)
}

pub(crate) fn classify_matrix(j: &Mat2, rel_tol: f64) -> (Classification, [Complex64; 2]) {
    let scale = if j.scale() > 0.0 { j.scale() } else { 1.0 };
    let tol_tr = rel_tol * scale;
    let tol_det = rel_tol * scale * scale;
    let (tr, det) = (j.trace(), j.det());
    let ev = j.eigenvalues();
    let class = if det.abs() <= tol_det {
        if tr.abs() <= tol_tr {
            Classification::Cusp
        } else if tr < 0.0 {
            Classification::SaddleNodeAttractor
        } else {
            Classification::SaddleNodeRepeller
        }
    } else if det < 0.0 {
        Classification::Saddle
    } else if tr.abs() <= tol_tr {
        Classification::CenterCandidate
    } else {
        let node = tr * tr - 4.0 * det >= 0.0;
        match (tr < 0.0, node) {
            (true, true) => Classification::AttractorNode,
            (true, false) => Classification::AttractorFocus,
            (false, true) => Classification::RepellerNode,
            (false, false) => Classification::RepellerFocus,
        }
    };
    (class, ev)
}

/// Jacobian at `(u, u + C)` with the prey growth factor
/// `(u − M)(1 − u) − Q(u + B)v` set to zero, its value at any positive
/// equilibrium.
pub fn jacobian_on_nullcline(p: &NondimParams, u: f64) -> Mat2 {
    let v = u + p.c;
    let mut j = jacobian_nondim(p, [u, v]);
    j.0[0][0] = u * (u + p.c) * (1.0 + p.m - 2.0 * u - p.q * v);
    j
}

/// Jacobian used to classify an equilibrium of the given kind. `P3` sits at
/// the vertex of the quadratic, where `Δ` is only zero within tolerance, so
/// it uses the on-nullcline form.
pub fn equilibrium_jacobian(p: &NondimParams, s: [f64; 2], kind: EquilibriumKind) -> Mat2 {
    if kind == EquilibriumKind::P3 {
        jacobian_on_nullcline(p, s[0])
    } else {
        jacobian_nondim(p, s)
    }
}

/// Reclassify `e` from the Jacobian at its location.
pub fn classify(p: &NondimParams, e: &Equilibrium) -> Result<Classification> {
    let s = e.xy();
    let r = residual(p, s);
    if !(r <= residual_allowance(p, e.kind, s)) {
        return Err(Error::NotFixedPoint { residual: r });
    }
    Ok(classify_matrix(&equilibrium_jacobian(p, s, e.kind), CLASSIFY_TOL).0)
}

/// Build an [`Equilibrium`] at `s`, rejecting points that are not fixed.
pub fn equilibrium_at(p: &NondimParams, s: [f64; 2], kind: EquilibriumKind) -> Result<Equilibrium> {
    let r = residual(p, s);
    if !(r <= residual_allowance(p, kind, s)) {
        return Err(Error::NotFixedPoint { residual: r });
    }
    let (classification, eigenvalues) =
        classify_matrix(&equilibrium_jacobian(p, s, kind), CLASSIFY_TOL);
    Ok(Equilibrium {
        location: State::nondim(s[0], s[1]),
        kind,
        eigenvalues,
        classification,
    })
}

/// Interior equilibria `(u_i, u_i + C)`: none, `P3` alone when `|Δ|` is
/// within tolerance, or `[P1, P2]`.
pub fn positive_equilibria(p: &NondimParams) -> Vec<Equilibrium> {
    let d = discriminant(p);
    let tol = delta_tolerance(p);
    let mut out = Vec::new();
    if d.value.abs() <= tol {
        if let Some(u3) = d.u3 {
            out.extend(equilibrium_at(p, [u3, u3 + p.c], EquilibriumKind::P3).ok());
        }
    } else if let (Some(u1), Some(u2)) = (d.u1, d.u2) {
        out.extend(equilibrium_at(p, [u1, u1 + p.c], EquilibriumKind::P1).ok());
        out.extend(equilibrium_at(p, [u2, u2 + p.c], EquilibriumKind::P2).ok());
    }
    out
}

/// `P1` and `P2` when `Δ` exceeds its tolerance.
pub fn saddle_and_focus(p: &NondimParams) -> Option<(Equilibrium, Equilibrium)> {
    let eq = positive_equilibria(p);
    match eq.as_slice() {
        [a, b] if a.kind == EquilibriumKind::P1 => Some((*a, *b)),
        _ => None,
    }
}

/// `(0,0)`, `(M,0)`, `(1,0)`, `(0,C)`.
pub fn boundary_equilibria(p: &NondimParams) -> Vec<Equilibrium> {
    [
        ([0.0, 0.0], EquilibriumKind::Origin),
        ([p.m, 0.0], EquilibriumKind::AlleeThreshold),
        ([1.0, 0.0], EquilibriumKind::Carrying),
        ([0.0, p.c], EquilibriumKind::PredatorOnly),
    ]
    .into_iter()
    .map(|(s, kind)| {
        let (classification, eigenvalues) = classify_at(p, s, CLASSIFY_TOL);
        Equilibrium {
            location: State::nondim(s[0], s[1]),
            kind,
            eigenvalues,
            classification,
        }
    })
    .collect()
}

/// All equilibria, boundary first.
pub fn all_equilibria(p: &NondimParams) -> Vec<Equilibrium> {
    let mut v = boundary_equilibria(p);
    v.extend(positive_equilibria(p));
    v
}

/// `f(u) = (u(M − 2u − Qu + 1) − S(B + u)) / (uQ)`; at a positive
/// equilibrium the Jacobian trace is `Q u (u + C)(f(u) − C)`, so its sign is
/// the sign of `f(u) − C`.
pub fn trace_function_f(p: &NondimParams, u: f64) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::Precondition(format!("f(u) needs u > 0, got {u}")));
    }
    Ok((u * (p.m - 2.0 * u - p.q * u + 1.0) - p.s * (p.b + u)) / (u * p.q))
}

/// Transversality quantities of the saddle-node in `Q` at `P3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sotomayor {
    pub u3: f64,
    /// Left null vector `(−2S(Q + 1) / (Q(1 + M − Q(B + C))), 1)`.
    pub w: [f64; 2],
    /// `∂F/∂Q` at `P3`.
    pub f_q: [f64; 2],
    /// `D²F(P3)(U, U)` with `U = (1, 1)`.
    pub d2f_uu: [f64; 2],
    pub wfq: f64,
    pub wd2f: f64,
}

fn require_p3(p: &NondimParams) -> Result<f64> {
    let d = discriminant(p);
    let s = 1.0 + p.m + p.q * (p.b + p.c);
    if d.value.abs() > LOCAL_BIFURCATION_TOL * s * s {
        return Err(Error::Precondition(format!(
            "Δ = {:e} is not zero within tolerance",
            d.value
        )));
    }
    match d.u3 {
        Some(u3) if u3 < 1.0 => Ok(u3),
        _ => Err(Error::Precondition("P3 is not in (0, 1)".into())),
    }
}

/// `W · F_Q(P3)` and `W · D²F(P3)(U, U)`; nonzero values make `P3` a
/// nondegenerate saddle-node in `Q`.
pub fn sotomayor_quantities(p: &NondimParams) -> Result<Sotomayor> {
    let u = require_p3(p)?;
    let s3 = [u, u + p.c];
    let w = [-2.0 * p.s * (p.q + 1.0) / (p.q * linear_coeff(p)), 1.0];
    let f_q = [-u * (u + p.c) * (u + p.b) * s3[1], 0.0];
    let hess = hessian_nondim(p, s3);
    let uu = |h: &Mat2| h.0[0][0] + 2.0 * h.0[0][1] + h.0[1][1];
    let d2f_uu = [uu(&hess[0]), uu(&hess[1])];
    Ok(Sotomayor {
        u3: u,
        w,
        f_q,
        d2f_uu,
        wfq: w[0] * f_q[0] + w[1] * f_q[1],
        wd2f: w[0] * d2f_uu[0] + w[1] * d2f_uu[1],
    })
}

/// Coefficients of `dU/dτ = V`, `dV/dτ = L20 U² + L11 U V` at `P3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CuspCoefficients {
    /// Closed form `S(S+BQ)(S+CQ)(Q²+S³+BQS²+CQS²+BCQ²S)/Q⁴`.
    pub l20: f64,
    /// Closed form for `L11`.
    pub l11: f64,
    /// `|l11| > L11_TOL`.
    pub codim2: bool,
    /// `L20` of the same reduction computed from the Jacobian and Hessian.
    pub l20_from_taylor: f64,
    /// `L11` of the same reduction computed from the Jacobian and Hessian.
    pub l11_from_taylor: f64,
}

/// Closed-form `L20`.
pub fn l20_closed_form(p: &NondimParams) -> f64 {
    let (b, c, q, s) = (p.b, p.c, p.q, p.s);
    s * (s + b * q) * (s + c * q) * (q * q + s.powi(3) + b * q * s * s + c * q * s * s + b * c * q * q * s)
        / q.powi(4)
}

/// Closed-form `L11`.
pub fn l11_closed_form(p: &NondimParams) -> f64 {
    let (m, b, c, q, s) = (p.m, p.b, p.c, p.q, p.s);
    let (q2, q3) = (q * q, q * q * q);
    let long = 2.0 * c + 2.0 * m - 2.0 * b * q2 + c * q2 - 2.0 * c * c * q
        + 3.0 * b * b * q2
        + 2.0 * b * b * q3
        - 2.0 * c * c * q2
        - c * c * q3
        + 2.0 * c * m
        - 4.0 * b * q
        + c * q
        + m * m
        - 3.0 * b * c * q2
        - b * c * q3
        - 2.0 * b * m * q2
        + c * m * q2
        - 4.0 * b * c * q
        - 4.0 * b * m * q
        + c * m * q
        + 1.0;
    let first = 4.0 * s * s * (s + b * q) * (s + c * q) * (q + 1.0)
        * (3.0 * b - c + m + 2.0 * b * q - 2.0 * c * q + 1.0);
    let second = q2
        * (q * (m - b * q - c * q + 1.0) * (2.0 * c + m - b * q + c * q + 1.0) - 2.0 * long);
    (first + second) / (4.0 * q2 * (q + 1.0) * (q + 1.0))
}

/// `(L20, L11)` of the quadratic reduction in the basis `U = X`,
/// `V = J11 X + J12 Y` (`X, Y` offsets from `s`), computed from the second
/// order Taylor coefficients of the field.
///
/// With `dU = V + a20 U² + a11 U V + a02 V²` and
/// `dV = b20 U² + b11 U V + b02 V²`, the reduction gives `L20 = b20`,
/// `L11 = b11 + 2 a20`. Requires `J12 ≠ 0`.
pub fn reduced_quadratic_coefficients(p: &NondimParams, s: [f64; 2]) -> (f64, f64) {
    let j = jacobian_nondim(p, s).0;
    let hess = hessian_nondim(p, s);
    let (j11, j12) = (j[0][0], j[0][1]);
    // Taylor coefficients of the two components in X², XY, Y²
    let tay = |h: &Mat2| [0.5 * h.0[0][0], h.0[0][1], 0.5 * h.0[1][1]];
    let f = tay(&hess[0]);
    let g = tay(&hess[1]);
    let r = j11 / j12;
    // substitute Y = (V − J11 U) / J12
    let a20 = f[0] - f[1] * r + f[2] * r * r;
    let h = [
        j11 * f[0] + j12 * g[0],
        j11 * f[1] + j12 * g[1],
        j11 * f[2] + j12 * g[2],
    ];
    let b20 = h[0] - h[1] * r + h[2] * r * r;
    let b11 = h[1] / j12 - 2.0 * h[2] * j11 / (j12 * j12);
    (b20, b11 + 2.0 * a20)
}

/// Cusp coefficients at `P3`; requires `Δ ≈ 0` and `f(u3) ≈ C`.
pub fn cusp_coefficients(p: &NondimParams) -> Result<CuspCoefficients> {
    let u = require_p3(p)?;
    let gap = trace_function_f(p, u)? - p.c;
    if gap.abs() > LOCAL_BIFURCATION_TOL * (1.0 + p.c) {
        return Err(Error::Precondition(format!(
            "f(u3) − C = {gap:e} is not zero within tolerance"
        )));
    }
    let l20 = l20_closed_form(p);
    let l11 = l11_closed_form(p);
    let (l20_t, l11_t) = reduced_quadratic_coefficients(p, [u, u + p.c]);
    Ok(CuspCoefficients {
        l20,
        l11,
        codim2: l11.abs() > L11_TOL,
        l20_from_taylor: l20_t,
        l11_from_taylor: l11_t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{admissible_strategy, bistable_strategy};
    use proptest::prelude::*;

    fn fig4() -> NondimParams {
        NondimParams::new(0.05, 0.05, 0.5, 0.175, 0.8).unwrap()
    }
    fn fig5(s: f64) -> NondimParams {
        NondimParams::new(0.07, 0.0645, 0.32, s, 0.736).unwrap()
    }
    fn fig7() -> NondimParams {
        NondimParams::new(0.05, 0.05, 0.58951256, 0.125, 0.60821818).unwrap()
    }

    /// Roots of `p(u) − Q d(u)` on (0, 1) by a dense sign scan and bisection.
    fn scan_roots(p: &NondimParams, n: usize) -> Vec<f64> {
        let g = |u: f64| (u - p.m) * (1.0 - u) - p.q * (u + p.b) * (u + p.c);
        let mut roots = Vec::new();
        let mut prev = g(0.0);
        for i in 1..=n {
            let u = i as f64 / n as f64;
            let cur = g(u);
            if prev == 0.0 || prev.signum() != cur.signum() {
                let (mut lo, mut hi) = ((i - 1) as f64 / n as f64, u);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if g(lo).signum() == g(mid).signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
            prev = cur;
        }
        roots
    }

    #[test]
    fn fig4_discriminant_negative() {
        let d = discriminant(&fig4());
        assert!((d.value - (-0.1319)).abs() < 5e-4, "{}", d.value);
        assert!(positive_equilibria(&fig4()).is_empty());
    }

    #[test]
    fn fig5_roots_match_scan() {
        let p = fig5(0.15);
        let scan = scan_roots(&p, 1_000_000);
        assert_eq!(scan.len(), 2);
        let d = discriminant(&p);
        assert!((d.u1.unwrap() - scan[0]).abs() < 1e-10);
        assert!((d.u2.unwrap() - scan[1]).abs() < 1e-10);
        assert!((scan[0] - 0.1786).abs() < 1e-4 && (scan[1] - 0.2747).abs() < 1e-4);
        let eq = positive_equilibria(&p);
        assert_eq!(eq.len(), 2);
        assert!(eq.iter().all(|e| e.xy()[0] > p.m && e.xy()[0] < 1.0));
    }

    #[test]
    fn fig7_single_tangent_point() {
        let p = fig7();
        let d = discriminant(&p);
        assert!(d.value.abs() < 1e-4);
        let eq = positive_equilibria(&p);
        assert_eq!(eq.len(), 1);
        assert_eq!(eq[0].kind, EquilibriumKind::P3);
        assert!((eq[0].xy()[0] - 0.2055).abs() < 1e-4);
        // the scan sees a tangency: the quadratic never becomes positive
        let g = |u: f64| (u - p.m) * (1.0 - u) - p.q * (u + p.b) * (u + p.c);
        let max = (0..=100_000).map(|i| g(i as f64 / 1e5)).fold(f64::MIN, f64::max);
        assert!(max.abs() < 1e-8);
    }

    #[test]
    fn small_q_limit() {
        let p = NondimParams::new(0.2, 0.3, 0.4, 0.1, 1e-9).unwrap();
        let d = discriminant(&p);
        assert!((d.value - 0.64).abs() < 1e-7);
        assert!((d.u1.unwrap() - 0.2).abs() < 1e-8);
        assert!((d.u2.unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn negative_linear_coefficient_gives_no_positive_roots() {
        // Δ > 0 but both roots of the quadratic are negative
        let p = NondimParams::new(0.01, 1.0, 0.001, 0.1, 2.0).unwrap();
        let d = discriminant(&p);
        assert!(d.value > 0.0);
        assert!(d.u1.is_none() && d.u2.is_none());
        assert!(positive_equilibria(&p).is_empty());
    }

    #[test]
    fn fig5_stability_follows_trace() {
        let (_, p2) = saddle_and_focus(&fig5(0.15)).unwrap();
        assert!(p2.classification.is_attractor());
        let (_, p2) = saddle_and_focus(&fig5(0.05)).unwrap();
        assert!(p2.classification.is_repeller());
        // f(u2) − C changes sign between the two values of S
        let g = |s: f64| {
            let p = fig5(s);
            trace_function_f(&p, discriminant(&p).u2.unwrap()).unwrap() - p.c
        };
        assert!((g(0.15) - (-0.13905)).abs() < 1e-4);
        assert!((g(0.05) - 0.02872).abs() < 1e-4);
    }

    #[test]
    fn trace_identity_at_fig5() {
        let p = fig5(0.15);
        let u2 = discriminant(&p).u2.unwrap();
        let tr = jacobian_nondim(&p, [u2, u2 + p.c]).trace();
        let gap = trace_function_f(&p, u2).unwrap() - p.c;
        let rhs = p.q * u2 * (u2 + p.c) * gap;
        assert!(((tr - rhs) / rhs).abs() < 1e-10);
        // the prefactor (u + B)(u + C) gives the same sign but not the value
        let alt = (u2 + p.b) * (u2 + p.c) * gap;
        assert_eq!(alt.signum(), tr.signum());
        assert!(((tr - alt) / alt).abs() > 0.1);
    }

    #[test]
    fn f_rejects_zero() {
        assert!(trace_function_f(&fig4(), 0.0).is_err());
    }

    #[test]
    fn classify_rejects_non_fixed_points() {
        let p = fig5(0.15);
        let mut e = boundary_equilibria(&p)[0];
        e.location = State::nondim(0.3, 0.3);
        assert!(matches!(classify(&p, &e), Err(Error::NotFixedPoint { .. })));
    }

    #[test]
    fn fig7_is_nonhyperbolic_and_a_cusp_at_relaxed_tolerance() {
        let p = fig7();
        let e = positive_equilibria(&p)[0];
        assert!(
            matches!(
                e.classification,
                Classification::SaddleNodeRepeller | Classification::Cusp
            ),
            "{:?} {:?}",
            e.classification,
            jacobian_nondim(&p, e.xy())
        );
        let j = jacobian_on_nullcline(&p, e.xy()[0]);
        assert_eq!(classify_matrix(&j, 1e-6).0, Classification::Cusp);
        assert!(j.det().abs() < 1e-15 && j.trace().abs() < 1e-8);
    }

    #[test]
    fn sotomayor_against_finite_differences() {
        let p = fig7();
        let so = sotomayor_quantities(&p).unwrap();
        let s3 = [so.u3, so.u3 + p.c];
        // W is a left null vector of J(P3)
        let j = jacobian_nondim(&p, s3).transpose().mul_vec(so.w);
        assert!(j[0].abs() < 1e-7 && j[1].abs() < 1e-7);
        let h = 1e-6;
        let fp = field_nondim(&p.with_q(p.q + h), s3);
        let fm = field_nondim(&p.with_q(p.q - h), s3);
        let fd = (so.w[0] * (fp[0] - fm[0]) + so.w[1] * (fp[1] - fm[1])) / (2.0 * h);
        assert!(((fd - so.wfq) / so.wfq).abs() < 1e-4);
        // second directional difference along U = (1, 1)
        let k = 1e-4;
        let f = |t: f64| field_nondim(&p, [s3[0] + t, s3[1] + t]);
        let (a, b, c) = (f(k), f(0.0), f(-k));
        let dd = [(a[0] - 2.0 * b[0] + c[0]) / (k * k), (a[1] - 2.0 * b[1] + c[1]) / (k * k)];
        let fd2 = so.w[0] * dd[0] + so.w[1] * dd[1];
        assert!(((fd2 - so.wd2f) / so.wd2f).abs() < 1e-4);
        // frozen values
        assert!((so.wfq - 0.0331926).abs() < 1e-6, "{}", so.wfq);
        assert!((so.wd2f - 0.52554).abs() < 1e-4, "{}", so.wd2f);
        assert!(so.d2f_uu[1].abs() < 1e-15);
    }

    #[test]
    fn sotomayor_rejects_nonzero_delta() {
        assert!(sotomayor_quantities(&fig5(0.15)).is_err());
    }

    /// Least-squares fit of the field on a grid around `s` by a full
    /// polynomial of degree four, then the same reduction on the fitted
    /// linear and quadratic terms.
    fn fitted_reduction(p: &NondimParams, s: [f64; 2]) -> (f64, f64) {
        use nalgebra::{DMatrix, DVector};
        let h = 1e-2;
        let mut rows = Vec::new();
        let mut rhs0 = Vec::new();
        let mut rhs1 = Vec::new();
        for i in -4i32..=4 {
            for k in -4i32..=4 {
                let (x, y) = (i as f64 * h, k as f64 * h);
                let f = field_nondim(p, [s[0] + x, s[1] + y]);
                // x, y, then x², xy, y², then cubic and quartic monomials
                for deg in 1..=4 {
                    for e in (0..=deg).rev() {
                        rows.push(x.powi(e) * y.powi(deg - e));
                    }
                }
                rows.push(1.0);
                rhs0.push(f[0]);
                rhs1.push(f[1]);
            }
        }
        let a = DMatrix::from_row_slice(rhs0.len(), 15, &rows);
        let svd = a.svd(true, true);
        let c0 = svd.solve(&DVector::from_vec(rhs0), 1e-14).unwrap();
        let c1 = svd.solve(&DVector::from_vec(rhs1), 1e-14).unwrap();
        let (j11, j12) = (c0[0], c0[1]);
        let f = [c0[2], c0[3], c0[4]];
        let g = [c1[2], c1[3], c1[4]];
        let r = j11 / j12;
        let a20 = f[0] - f[1] * r + f[2] * r * r;
        let hq = [j11 * f[0] + j12 * g[0], j11 * f[1] + j12 * g[1], j11 * f[2] + j12 * g[2]];
        let b20 = hq[0] - hq[1] * r + hq[2] * r * r;
        let b11 = hq[1] / j12 - 2.0 * hq[2] * j11 / (j12 * j12);
        (b20, b11 + 2.0 * a20)
    }

    #[test]
    fn cusp_coefficients_at_fig7() {
        let p = fig7();
        let cc = cusp_coefficients(&p).unwrap();
        assert!(cc.l20 > 0.0);
        assert!((cc.l20 - 0.026037935).abs() < 1e-8, "{}", cc.l20);
        assert!((cc.l11 - (-0.2707599363)).abs() < 1e-9, "{}", cc.l11);
        assert!(cc.codim2);
        let u3 = discriminant(&p).u3.unwrap();
        let (l20_fit, l11_fit) = fitted_reduction(&p, [u3, u3 + p.c]);
        assert!(((l20_fit - cc.l20_from_taylor) / cc.l20_from_taylor).abs() < 1e-6, "{l20_fit}");
        assert!(((l11_fit - cc.l11_from_taylor) / cc.l11_from_taylor).abs() < 1e-6, "{l11_fit}");
        assert!((cc.l20_from_taylor - (-0.0066726)).abs() < 1e-6, "{}", cc.l20_from_taylor);
        assert!((cc.l11_from_taylor - (-0.401988)).abs() < 1e-5, "{}", cc.l11_from_taylor);
        // both routes certify a codimension-two point
        assert!(cc.l11_from_taylor.abs() > L11_TOL);
    }

    #[test]
    fn l11_is_continuous_near_the_cusp() {
        let p = fig7();
        let base = l11_closed_form(&p);
        let offsets = [
            (1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (0.7, 0.7),
            (-0.7, 0.7), (0.7, -0.7), (-0.7, -0.7), (0.3, -0.9), (-0.9, 0.3),
        ];
        for (dq, dc) in offsets {
            let q = p.with_q(p.q + 1e-6 * dq).with_c(p.c + 1e-6 * dc);
            let l = l11_closed_form(&q);
            assert_eq!(l.signum(), base.signum());
            assert!((l - base).abs() < 1e-4);
        }
    }

    #[test]
    fn cusp_rejects_off_curve_parameters() {
        assert!(cusp_coefficients(&fig7().with_c(0.5)).is_err());
        assert!(cusp_coefficients(&fig5(0.15)).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(512))]

        #[test]
        fn boundary_tags_are_parameter_independent(p in admissible_strategy()) {
            let tags: Vec<_> = boundary_equilibria(&p).iter().map(|e| e.classification).collect();
            prop_assert_eq!(tags[0], Classification::Saddle);
            prop_assert!(tags[1].is_repeller());
            prop_assert_eq!(tags[2], Classification::Saddle);
            prop_assert!(tags[3].is_attractor());
        }

        #[test]
        fn origin_and_predator_axis_eigenvalues(p in admissible_strategy()) {
            let b = boundary_equilibria(&p);
            let mut o: Vec<f64> = b[0].eigenvalues.iter().map(|z| z.re).collect();
            o.sort_by(f64::total_cmp);
            let mut want = [-p.c * p.m, p.b * p.c * p.s];
            want.sort_by(f64::total_cmp);
            prop_assert!((o[0] - want[0]).abs() < 1e-12 && (o[1] - want[1]).abs() < 1e-12);
            let mut pc: Vec<f64> = b[3].eigenvalues.iter().map(|z| z.re).collect();
            pc.sort_by(f64::total_cmp);
            let mut want = [-p.c * (p.b * p.c * p.q + p.m), -p.b * p.c * p.s];
            want.sort_by(f64::total_cmp);
            prop_assert!((pc[0] - want[0]).abs() < 1e-12 && (pc[1] - want[1]).abs() < 1e-12);
        }

        #[test]
        fn interior_roots_ordered(p in bistable_strategy()) {
            let d = discriminant(&p);
            let (u1, u2, u3) = (d.u1.unwrap(), d.u2.unwrap(), d.u3.unwrap());
            prop_assert!(p.m < u1 && u1 < u3 && u3 < u2 && u2 < 1.0);
        }

        #[test]
        fn saddle_and_antisaddle_determinants(p in bistable_strategy()) {
            let (p1, p2) = saddle_and_focus(&p).unwrap();
            prop_assert!(jacobian_nondim(&p, p1.xy()).det() < 0.0);
            prop_assert!(jacobian_nondim(&p, p2.xy()).det() > 0.0);
            prop_assert_eq!(p1.classification, Classification::Saddle);
        }

        #[test]
        fn trace_identity(p in bistable_strategy()) {
            for e in positive_equilibria(&p) {
                let u = e.xy()[0];
                let tr = jacobian_nondim(&p, e.xy()).trace();
                let rhs = p.q * u * (u + p.c) * (trace_function_f(&p, u).unwrap() - p.c);
                let scale = jacobian_nondim(&p, e.xy()).scale();
                prop_assert!((tr - rhs).abs() <= 1e-10 * tr.abs().max(scale));
            }
        }

        #[test]
        fn returned_equilibria_are_fixed(p in admissible_strategy()) {
            for e in all_equilibria(&p) {
                prop_assert!(classify(&p, &e).is_ok());
            }
        }

        #[test]
        fn l20_closed_form_positive(p in admissible_strategy()) {
            prop_assert!(l20_closed_form(&p) > 0.0);
        }
    }
}
