//! Basin-of-attraction maps on grids of initial conditions and their areas,
//! including the scan over the non-fertile population `b`.

use rayon::prelude::*;

use crate::dynamics::{
    find_limit_cycle, nondim_attractors, Attractor, CycleOptions, TimeDirection, ID_P2,
    ID_PREDATOR_ONLY,
};
use crate::equilibria::saddle_and_focus;
use crate::error::{Error, Result};
use crate::integrator::{integrate, Event, IntegrateOptions, Termination, VectorField};
use crate::linalg::Mat2;
use crate::manifolds::{point_in_polygon, saddle_branches, separatrix_polygon, BranchOptions};
use crate::model::{nondimensionalize, DimOrbitField, DimParams, Frame, GrowthLaw, NondimParams, State};

/// Parameters of a basin computation, in either frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasinModel {
    Nondim(NondimParams),
    Dim(DimParams),
}

impl BasinModel {
    pub fn frame(&self) -> Frame {
        match self {
            BasinModel::Nondim(_) => Frame::Nondimensional,
            BasinModel::Dim(_) => Frame::Dimensional,
        }
    }

    /// `Φ` in this frame: `[0, 1] × [0, 1 + C]` or `[0, K] × [0, nK + c]`.
    pub fn default_window(&self) -> Window {
        match self {
            BasinModel::Nondim(p) => Window::new(0.0, 1.0, 0.0, 1.0 + p.c),
            BasinModel::Dim(d) => Window::new(0.0, d.k, 0.0, d.n * d.k + d.c),
        }
    }

    /// Per-axis scale used for attractor balls and tolerances.
    fn scale(&self) -> [f64; 2] {
        match self {
            BasinModel::Nondim(_) => [1.0, 1.0],
            BasinModel::Dim(d) => [d.k, d.n * d.k],
        }
    }

    /// Prey level below which every start with positive predator ends at the
    /// predator-only equilibrium.
    fn collapse_threshold(&self) -> f64 {
        match self {
            BasinModel::Nondim(p) => 0.999 * p.m,
            BasinModel::Dim(d) => 0.999 * d.m,
        }
    }

    /// The predator-only equilibrium and, when it exists, the interior
    /// equilibrium with the larger prey density.
    pub fn attractors(&self) -> Result<Vec<Attractor>> {
        match self {
            BasinModel::Nondim(p) => Ok(nondim_attractors(p)),
            BasinModel::Dim(d) => {
                d.validate()?;
                let scale = [d.k, d.n * d.k];
                let f = DimOrbitField(*d);
                let at = |id, center: [f64; 2]| Attractor {
                    id,
                    center,
                    scale,
                    eigenvalues: fd_jacobian(&f, center, scale).eigenvalues(),
                };
                let mut out = vec![at(ID_PREDATOR_ONLY, [0.0, d.c])];
                if let Some(u2) = dim_interior_prey(d)? {
                    let x = d.k * u2;
                    out.push(at(ID_P2, [x, d.predator_capacity(x)]));
                }
                Ok(out)
            }
        }
    }
}

/// Larger positive root on `y = n x + c` of the prey nullcline, as `x / K`.
fn dim_interior_prey(d: &DimParams) -> Result<Option<f64>> {
    match d.variant {
        GrowthLaw::MultipleAllee => {
            let p = nondimensionalize(d)?;
            Ok(saddle_and_focus(&p).map(|(_, p2)| p2.xy()[0]))
        }
        GrowthLaw::StrongAllee => {
            // u² − (1 + M − Q')u + M + Q'C = 0 with Q' = qn/r
            let (m, c, q) = (d.m / d.k, d.c / (d.n * d.k), d.q * d.n / d.r);
            let a = 1.0 + m - q;
            let disc = a * a - 4.0 * (m + q * c);
            if disc <= 0.0 || a <= 0.0 {
                return Ok(None);
            }
            Ok(Some(0.5 * (a + disc.sqrt())))
        }
        GrowthLaw::Logistic => Err(Error::InvalidParams(
            "basins are defined for the Allee growth laws".into(),
        )),
    }
}

/// Central-difference Jacobian with per-axis steps `1e-6 · scale`.
fn fd_jacobian<F: VectorField>(f: &F, s: [f64; 2], scale: [f64; 2]) -> Mat2 {
    let mut j = [[0.0; 2]; 2];
    for k in 0..2 {
        let h = 1e-6 * scale[k];
        let (mut sp, mut sm) = (s, s);
        sp[k] += h;
        sm[k] -= h;
        let (fp, fm) = (f.eval(sp), f.eval(sm));
        for i in 0..2 {
            j[i][k] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    Mat2(j)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl Window {
    pub fn new(u0: f64, u1: f64, v0: f64, v1: f64) -> Self {
        Window { u0, u1, v0, v1 }
    }

    pub fn area(&self) -> f64 {
        (self.u1 - self.u0) * (self.v1 - self.v0)
    }

    fn validate(&self) -> Result<()> {
        let ok = [self.u0, self.u1, self.v0, self.v1].iter().all(|x| x.is_finite())
            && self.u0 >= 0.0
            && self.v0 >= 0.0
            && self.u1 > self.u0
            && self.v1 > self.v0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!(
                "window {self:?} must be a nonempty box in the closed first quadrant"
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasinLabel {
    ToPredatorOnly,
    ToP2,
    Undecided,
}

impl BasinLabel {
    pub fn name(self) -> &'static str {
        match self {
            BasinLabel::ToPredatorOnly => "to-(0,C)",
            BasinLabel::ToP2 => "to-P2",
            BasinLabel::Undecided => "undecided",
        }
    }

    pub fn code(self) -> u8 {
        match self {
            BasinLabel::ToPredatorOnly => 0,
            BasinLabel::ToP2 => 1,
            BasinLabel::Undecided => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasinOptions {
    pub t_max: f64,
    pub tol: f64,
    /// Ball radius around each attractor, relative to the frame scale.
    pub radius: f64,
    /// Look for an unstable cycle around an attracting `P2` and keep it for
    /// overlays.
    pub find_cycle: bool,
}

impl Default for BasinOptions {
    fn default() -> Self {
        BasinOptions {
            t_max: 2e4,
            tol: 1e-8,
            radius: 1e-3,
            find_cycle: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasinGrid {
    pub model: BasinModel,
    pub window: Window,
    pub nx: usize,
    pub ny: usize,
    /// Row-major from the bottom row: cell `(ix, iy)` is `labels[iy * nx + ix]`.
    pub labels: Vec<BasinLabel>,
    pub frame: Frame,
    pub options: BasinOptions,
    /// Unstable cycle around `P2`, nondimensional frame only.
    pub cycle: Option<Vec<[f64; 2]>>,
}

impl BasinGrid {
    pub fn cell_size(&self) -> [f64; 2] {
        [
            (self.window.u1 - self.window.u0) / self.nx as f64,
            (self.window.v1 - self.window.v0) / self.ny as f64,
        ]
    }

    pub fn cell_area(&self) -> f64 {
        let [dx, dy] = self.cell_size();
        dx * dy
    }

    pub fn center(&self, ix: usize, iy: usize) -> [f64; 2] {
        let [dx, dy] = self.cell_size();
        [
            self.window.u0 + (ix as f64 + 0.5) * dx,
            self.window.v0 + (iy as f64 + 0.5) * dy,
        ]
    }

    pub fn label(&self, ix: usize, iy: usize) -> BasinLabel {
        self.labels[iy * self.nx + ix]
    }

    pub fn fraction(&self, which: BasinLabel) -> f64 {
        self.labels.iter().filter(|&&l| l == which).count() as f64 / self.labels.len() as f64
    }

    /// Cells with a 4-neighbour of a different label.
    pub fn boundary_cells(&self) -> usize {
        let mut n = 0;
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                let l = self.label(ix, iy);
                let differs = (ix > 0 && self.label(ix - 1, iy) != l)
                    || (ix + 1 < self.nx && self.label(ix + 1, iy) != l)
                    || (iy > 0 && self.label(ix, iy - 1) != l)
                    || (iy + 1 < self.ny && self.label(ix, iy + 1) != l);
                n += differs as usize;
            }
        }
        n
    }
}

/// Undecided fractions at or above this are flagged in reports.
pub const UNDECIDED_FLAG: f64 = 0.05;

fn label_start<F: VectorField>(
    field: &F,
    s0: [f64; 2],
    events: &[Event],
    threshold: f64,
    opts: &IntegrateOptions,
) -> BasinLabel {
    if s0[0] < threshold && s0[1] > 0.0 {
        return BasinLabel::ToPredatorOnly;
    }
    for ev in events {
        if let Event::Ball { id, center, scale, radius } = *ev {
            if ((s0[0] - center[0]) / scale[0]).hypot((s0[1] - center[1]) / scale[1]) <= radius {
                return id_label(id);
            }
        }
    }
    match integrate(field, s0, opts, events).termination {
        Termination::EnteredAttractor(id) => id_label(id),
        _ => BasinLabel::Undecided,
    }
}

fn id_label(id: usize) -> BasinLabel {
    match id {
        ID_PREDATOR_ONLY => BasinLabel::ToPredatorOnly,
        ID_P2 => BasinLabel::ToP2,
        _ => BasinLabel::Undecided,
    }
}

/// Labels each cell center of an `nx × ny` grid over `window` by the
/// attractor its forward orbit enters, or undecided when the horizon
/// expires first.
pub fn compute_basin(
    model: &BasinModel,
    window: Window,
    nx: usize,
    ny: usize,
    bo: &BasinOptions,
) -> Result<BasinGrid> {
    window.validate()?;
    if nx == 0 || ny == 0 {
        return Err(Error::InvalidParams("grid resolution must be positive".into()));
    }
    if let BasinModel::Nondim(p) = model {
        p.validate()?;
    }
    let scale = model.scale();
    let events: Vec<Event> = model
        .attractors()?
        .iter()
        .filter(|a| a.is_stable())
        .map(|a| Event::Ball {
            id: a.id,
            center: a.center,
            scale,
            radius: bo.radius,
        })
        .chain(std::iter::once(Event::HalfPlane {
            id: ID_PREDATOR_ONLY,
            normal: [1.0, 0.0],
            offset: model.collapse_threshold(),
        }))
        .collect();
    let opts = IntegrateOptions {
        t_max: bo.t_max,
        tol: bo.tol,
        h_init: 1e-2,
        h_max: 50.0,
        record: false,
        frame: model.frame(),
        ..IntegrateOptions::default()
    };
    let mut grid = BasinGrid {
        model: *model,
        window,
        nx,
        ny,
        labels: Vec::new(),
        frame: model.frame(),
        options: *bo,
        cycle: None,
    };
    let threshold = model.collapse_threshold();
    let labels: Vec<BasinLabel> = (0..ny)
        .into_par_iter()
        .flat_map_iter(|iy| {
            let grid = &grid;
            let events = &events;
            let opts = &opts;
            (0..nx).map(move |ix| {
                let s0 = grid.center(ix, iy);
                match grid.model {
                    BasinModel::Nondim(p) => label_start(&p, s0, events, threshold, opts),
                    BasinModel::Dim(d) => label_start(&DimOrbitField(d), s0, events, threshold, opts),
                }
            })
        })
        .collect();
    grid.labels = labels;
    if let (true, BasinModel::Nondim(p)) = (bo.find_cycle, model) {
        if let Some((_, p2)) = saddle_and_focus(p).filter(|(_, p2)| p2.classification.is_attractor()) {
            let seed = State::nondim(p2.xy()[0] + 1e-5, p2.xy()[1]);
            if let Ok(Some(c)) = find_limit_cycle(p, seed, TimeDirection::Reversed, &CycleOptions::default()) {
                grid.cycle = Some(c.points.iter().map(State::xy).collect());
            }
        }
    }
    Ok(grid)
}

/// Cell count times cell area for `which`.
pub fn basin_area(g: &BasinGrid, which: BasinLabel) -> f64 {
    g.labels.iter().filter(|&&l| l == which).count() as f64 * g.cell_area()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasinReport {
    pub model: BasinModel,
    pub window: Window,
    pub nx: usize,
    pub ny: usize,
    pub area_p2: f64,
    pub area_0c: f64,
    pub undecided: f64,
    /// Area of the cells on a basin boundary; the uncertainty of each area.
    pub boundary_area: f64,
    /// Undecided fraction reached [`UNDECIDED_FLAG`].
    pub flagged: bool,
}

impl BasinReport {
    pub fn from_grid(g: &BasinGrid) -> Self {
        BasinReport {
            model: g.model,
            window: g.window,
            nx: g.nx,
            ny: g.ny,
            area_p2: basin_area(g, BasinLabel::ToP2),
            area_0c: basin_area(g, BasinLabel::ToPredatorOnly),
            undecided: basin_area(g, BasinLabel::Undecided),
            boundary_area: g.boundary_cells() as f64 * g.cell_area(),
            flagged: g.fraction(BasinLabel::Undecided) >= UNDECIDED_FLAG,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanB {
    pub strong: BasinReport,
    pub multiple: Vec<(f64, BasinReport)>,
    /// Linear interpolation of the first sign change of
    /// `area_P2(multiple) − area_P2(strong)` in `b`.
    pub b_cr: Option<f64>,
}

/// `P2` basin areas over `[0, K] × [0, nK + c]` for the multiple-Allee law
/// at each `b`, and once for the strong-Allee law.
pub fn scan_b(template: &DimParams, b_values: &[f64], nx: usize, ny: usize, bo: &BasinOptions) -> Result<ScanB> {
    let strong_model = BasinModel::Dim(template.with_variant(GrowthLaw::StrongAllee));
    let window = strong_model.default_window();
    let strong = BasinReport::from_grid(&compute_basin(&strong_model, window, nx, ny, bo)?);
    let mut multiple = Vec::with_capacity(b_values.len());
    for &b in b_values {
        let m = BasinModel::Dim(template.with_b(b).with_variant(GrowthLaw::MultipleAllee));
        multiple.push((b, BasinReport::from_grid(&compute_basin(&m, window, nx, ny, bo)?)));
    }
    let b_cr = crossing(&multiple, strong.area_p2);
    Ok(ScanB { strong, multiple, b_cr })
}

fn crossing(curve: &[(f64, BasinReport)], level: f64) -> Option<f64> {
    curve.windows(2).find_map(|w| {
        let (b0, g0) = (w[0].0, w[0].1.area_p2 - level);
        let (b1, g1) = (w[1].0, w[1].1.area_p2 - level);
        if g0 == 0.0 {
            Some(b0)
        } else if g0 * g1 < 0.0 {
            Some(b0 + (b1 - b0) * g0 / (g0 - g1))
        } else {
            None
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparatrixAgreement {
    /// Fraction of cells whose label matches the side of `W^s(P1)`.
    pub agreement: f64,
    pub polygon: Vec<[f64; 2]>,
    pub polygon_area: f64,
}

/// Compares grid labels with the region bounded by the traced stable
/// manifold of `P1`: inside is the basin of `P2`, outside that of `(0, C)`.
/// Undecided cells count as disagreements.
pub fn separatrix_agreement(g: &BasinGrid, bo: &BranchOptions) -> Result<SeparatrixAgreement> {
    let BasinModel::Nondim(p) = g.model else {
        return Err(Error::InvalidParams("separatrix comparison needs a nondimensional grid".into()));
    };
    let branches = saddle_branches(&p, bo)?;
    let polygon = separatrix_polygon(&p, &branches)?;
    let mut agree = 0usize;
    for iy in 0..g.ny {
        for ix in 0..g.nx {
            let inside = point_in_polygon(&polygon, g.center(ix, iy));
            let expected = if inside { BasinLabel::ToP2 } else { BasinLabel::ToPredatorOnly };
            agree += (g.label(ix, iy) == expected) as usize;
        }
    }
    Ok(SeparatrixAgreement {
        agreement: agree as f64 / g.labels.len() as f64,
        polygon_area: crate::manifolds::polygon_area(&polygon),
        polygon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig5a() -> NondimParams {
        NondimParams::new(0.07, 0.0645, 0.32, 0.15, 0.736).unwrap()
    }

    fn fig10(b: f64, variant: GrowthLaw) -> DimParams {
        DimParams {
            r: 14.0,
            k: 150.0,
            m: 15.0,
            q: 1.08,
            s: 1.25,
            n: 0.05,
            b,
            c: 0.75,
            variant,
        }
    }

    #[test]
    fn fig4_all_to_predator_only() {
        let p = NondimParams::new(0.05, 0.05, 0.5, 0.175, 0.8).unwrap();
        let m = BasinModel::Nondim(p);
        let g = compute_basin(&m, m.default_window(), 24, 24, &BasinOptions::default()).unwrap();
        assert_eq!(g.fraction(BasinLabel::ToP2), 0.0);
        assert_eq!(basin_area(&g, BasinLabel::ToP2), 0.0);
        assert!(g.fraction(BasinLabel::Undecided) < 0.05);
    }

    #[test]
    fn fig5a_is_bistable_and_matches_separatrix() {
        let m = BasinModel::Nondim(fig5a());
        let g = compute_basin(&m, m.default_window(), 48, 48, &BasinOptions::default()).unwrap();
        let r = BasinReport::from_grid(&g);
        assert!(r.area_p2 > 0.0 && r.area_0c > 0.0);
        assert!(!r.flagged);
        let total = r.area_p2 + r.area_0c + r.undecided;
        assert!((total - g.window.area()).abs() <= g.cell_area());
        let s = separatrix_agreement(&g, &BranchOptions::default()).unwrap();
        assert!(s.agreement >= 0.97, "{}", s.agreement);
        assert!((r.area_p2 - s.polygon_area).abs() <= r.boundary_area, "{} vs {}", r.area_p2, s.polygon_area);
    }

    #[test]
    fn bad_windows_are_rejected() {
        let m = BasinModel::Nondim(fig5a());
        let bo = BasinOptions::default();
        assert!(compute_basin(&m, Window::new(-0.1, 1.0, 0.0, 1.0), 16, 16, &bo).is_err());
        assert!(compute_basin(&m, Window::new(0.5, 0.5, 0.0, 1.0), 16, 16, &bo).is_err());
    }

    #[test]
    fn dim_attractors_map_from_nondim() {
        let d = fig10(10.0, GrowthLaw::MultipleAllee);
        let p = nondimensionalize(&d).unwrap();
        let dim = BasinModel::Dim(d).attractors().unwrap();
        let nd = nondim_attractors(&p);
        assert_eq!(dim.len(), nd.len());
        for (a, b) in dim.iter().zip(&nd) {
            assert!((a.center[0] - d.k * b.center[0]).abs() < 1e-9 * d.k);
            assert!((a.center[1] - d.n * d.k * b.center[1]).abs() < 1e-9 * d.k);
            assert_eq!(a.is_stable(), b.is_stable());
        }
    }

    #[test]
    fn strong_interior_equilibrium_is_fixed() {
        let d = fig10(10.0, GrowthLaw::StrongAllee);
        let u2 = dim_interior_prey(&d).unwrap().unwrap();
        let x = d.k * u2;
        let f = crate::model::field_dim(&d, [x, d.predator_capacity(x)]).unwrap();
        assert!(f[0].abs() < 1e-9 * d.r * d.k * d.k && f[1].abs() < 1e-12);
    }

    #[test]
    fn frames_agree() {
        let d = fig10(20.0, GrowthLaw::MultipleAllee);
        let p = nondimensionalize(&d).unwrap();
        let (mn, md) = (BasinModel::Nondim(p), BasinModel::Dim(d));
        let bo = BasinOptions::default();
        let gn = compute_basin(&mn, mn.default_window(), 24, 24, &bo).unwrap();
        let gd = compute_basin(&md, md.default_window(), 24, 24, &bo).unwrap();
        let same = gn.labels.iter().zip(&gd.labels).filter(|(a, b)| a == b).count();
        assert!(same as f64 / gn.labels.len() as f64 >= 0.97);
    }

    #[test]
    fn longer_horizon_never_adds_undecided() {
        let m = BasinModel::Nondim(fig5a());
        let mut bo = BasinOptions { t_max: 50.0, ..BasinOptions::default() };
        let mut prev = 1.0;
        for _ in 0..4 {
            let u = compute_basin(&m, m.default_window(), 16, 16, &bo).unwrap().fraction(BasinLabel::Undecided);
            assert!(u <= prev);
            prev = u;
            bo.t_max *= 2.0;
        }
    }

    #[test]
    fn refinement_bound() {
        let m = BasinModel::Nondim(fig5a());
        let bo = BasinOptions::default();
        let coarse = compute_basin(&m, m.default_window(), 24, 24, &bo).unwrap();
        let fine = compute_basin(&m, m.default_window(), 48, 48, &bo).unwrap();
        let bound = 2.0 * coarse.cell_area() * coarse.boundary_cells() as f64;
        let d = (basin_area(&coarse, BasinLabel::ToP2) - basin_area(&fine, BasinLabel::ToP2)).abs();
        assert!(d < bound, "{d} vs {bound}");
    }

    #[test]
    fn crossing_interpolates() {
        let m = BasinModel::Nondim(fig5a());
        let mk = |a: f64| BasinReport {
            model: m,
            window: m.default_window(),
            nx: 1,
            ny: 1,
            area_p2: a,
            area_0c: 0.0,
            undecided: 0.0,
            boundary_area: 0.0,
            flagged: false,
        };
        let curve = vec![(1.0, mk(3.0)), (2.0, mk(2.0)), (3.0, mk(0.0))];
        assert_eq!(crossing(&curve, 1.0), Some(2.5));
        assert_eq!(crossing(&curve, 5.0), None);
    }
}
