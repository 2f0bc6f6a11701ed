//! CSV tables with `#` metadata headers and plain SVG rendering.

use std::fmt::Write as _;

use crate::basins::{BasinGrid, BasinLabel, BasinModel};
use crate::model::{DimParams, NondimParams};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// `# key = value` lines naming the tool version and every parameter.
pub fn nondim_metadata(p: &NondimParams) -> Vec<(String, String)> {
    vec![
        ("frame".into(), "nondimensional".into()),
        ("M".into(), fmt(p.m)),
        ("B".into(), fmt(p.b)),
        ("C".into(), fmt(p.c)),
        ("S".into(), fmt(p.s)),
        ("Q".into(), fmt(p.q)),
    ]
}

pub fn dim_metadata(d: &DimParams) -> Vec<(String, String)> {
    vec![
        ("frame".into(), "dimensional".into()),
        ("r".into(), fmt(d.r)),
        ("K".into(), fmt(d.k)),
        ("m".into(), fmt(d.m)),
        ("q".into(), fmt(d.q)),
        ("s".into(), fmt(d.s)),
        ("n".into(), fmt(d.n)),
        ("b".into(), fmt(d.b)),
        ("c".into(), fmt(d.c)),
        ("variant".into(), d.variant.name().into()),
    ]
}

pub fn model_metadata(m: &BasinModel) -> Vec<(String, String)> {
    match m {
        BasinModel::Nondim(p) => nondim_metadata(p),
        BasinModel::Dim(d) => dim_metadata(d),
    }
}

/// Shortest round-trip decimal form.
pub fn fmt(x: f64) -> String {
    format!("{x}")
}

/// A CSV table: metadata lines, a header row, then data rows.
#[derive(Debug, Clone, Default)]
pub struct Csv {
    meta: Vec<(String, String)>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(command: &str, meta: Vec<(String, String)>, header: &[&str]) -> Self {
        let mut all = vec![
            ("tool".to_string(), format!("mht {VERSION}")),
            ("command".to_string(), command.to_string()),
        ];
        all.extend(meta);
        Csv {
            meta: all,
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<String>) {
        self.meta.push((key.into(), value.into()));
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k} = {v}");
        }
        let _ = writeln!(out, "{}", self.header.join(","));
        for r in &self.rows {
            let _ = writeln!(out, "{}", r.join(","));
        }
        out
    }
}

/// Basin labels as `ix,iy,u,v,label` rows.
pub fn basin_csv(g: &BasinGrid) -> Csv {
    let mut csv = Csv::new("basin", model_metadata(&g.model), &["ix", "iy", "u", "v", "label"]);
    csv.meta("window", format!("{},{},{},{}", g.window.u0, g.window.u1, g.window.v0, g.window.v1));
    csv.meta("resolution", format!("{},{}", g.nx, g.ny));
    for iy in 0..g.ny {
        for ix in 0..g.nx {
            let [u, v] = g.center(ix, iy);
            csv.row(vec![
                ix.to_string(),
                iy.to_string(),
                fmt(u),
                fmt(v),
                g.label(ix, iy).name().to_string(),
            ]);
        }
    }
    csv
}

const SIZE: f64 = 800.0;
const MARGIN: f64 = 40.0;

/// An SVG canvas over a data window, drawn in a fixed 800×800 viewBox.
#[derive(Debug, Clone)]
pub struct Svg {
    x: (f64, f64),
    y: (f64, f64),
    body: String,
}

impl Svg {
    pub fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        let mut s = Svg {
            x,
            y,
            body: String::new(),
        };
        s.frame();
        s
    }

    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        let w = SIZE - 2.0 * MARGIN;
        let px = MARGIN + (p[0] - self.x.0) / (self.x.1 - self.x.0) * w;
        let py = SIZE - MARGIN - (p[1] - self.y.0) / (self.y.1 - self.y.0) * w;
        (px, py)
    }

    fn frame(&mut self) {
        let _ = writeln!(
            self.body,
            r#"<rect x="{MARGIN}" y="{MARGIN}" width="{w}" height="{w}" fill="none" stroke="black"/>"#,
            w = SIZE - 2.0 * MARGIN
        );
        let labels = [
            (self.x.0, MARGIN, SIZE - MARGIN + 16.0, "start"),
            (self.x.1, SIZE - MARGIN, SIZE - MARGIN + 16.0, "end"),
        ];
        for (v, px, py, anchor) in labels {
            let _ = writeln!(
                self.body,
                r#"<text x="{px:.2}" y="{py:.2}" font-size="12" text-anchor="{anchor}">{}</text>"#,
                short(v)
            );
        }
        for (v, py) in [(self.y.0, SIZE - MARGIN), (self.y.1, MARGIN + 10.0)] {
            let _ = writeln!(
                self.body,
                r#"<text x="{:.2}" y="{py:.2}" font-size="12" text-anchor="end">{}</text>"#,
                MARGIN - 4.0,
                short(v)
            );
        }
    }

    /// Draws the parts of `points` inside the window; non-finite points break
    /// the line.
    pub fn polyline(&mut self, points: &[[f64; 2]], color: &str, width: f64, dash: Option<&str>) {
        let inside = |p: &[f64; 2]| {
            p[0].is_finite()
                && p[1].is_finite()
                && p[0] >= self.x.0
                && p[0] <= self.x.1
                && p[1] >= self.y.0
                && p[1] <= self.y.1
        };
        let dash = dash.map(|d| format!(r#" stroke-dasharray="{d}""#)).unwrap_or_default();
        for run in points.split(|p| !inside(p)) {
            if run.len() < 2 {
                continue;
            }
            let mut pts = String::new();
            for p in run {
                let (px, py) = self.map(*p);
                let _ = write!(pts, "{px:.2},{py:.2} ");
            }
            let _ = writeln!(
                self.body,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="{width}"{dash}/>"#,
                pts.trim_end()
            );
        }
    }

    pub fn circle(&mut self, p: [f64; 2], r: f64, fill: &str, stroke: &str) {
        let (px, py) = self.map(p);
        let _ = writeln!(
            self.body,
            r#"<circle cx="{px:.2}" cy="{py:.2}" r="{r}" fill="{fill}" stroke="{stroke}"/>"#
        );
    }

    pub fn text(&mut self, p: [f64; 2], s: &str) {
        let (px, py) = self.map(p);
        let _ = writeln!(
            self.body,
            r#"<text x="{:.2}" y="{:.2}" font-size="12">{}</text>"#,
            px + 6.0,
            py - 6.0,
            escape(s)
        );
    }

    pub fn title(&mut self, s: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{}" y="24" font-size="14" text-anchor="middle">{}</text>"#,
            SIZE / 2.0,
            escape(s)
        );
    }

    /// Filled cells, one rectangle per horizontal run of equal labels.
    pub fn basin(&mut self, g: &BasinGrid) {
        let [dx, dy] = g.cell_size();
        for iy in 0..g.ny {
            let mut ix = 0;
            while ix < g.nx {
                let l = g.label(ix, iy);
                let start = ix;
                while ix < g.nx && g.label(ix, iy) == l {
                    ix += 1;
                }
                let lo = [g.window.u0 + start as f64 * dx, g.window.v0 + iy as f64 * dy];
                let hi = [g.window.u0 + ix as f64 * dx, g.window.v0 + (iy + 1) as f64 * dy];
                let (x0, y1) = self.map(lo);
                let (x1, y0) = self.map(hi);
                let _ = writeln!(
                    self.body,
                    r#"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="{}" stroke="none"/>"#,
                    x1 - x0,
                    y1 - y0,
                    basin_color(l)
                );
            }
        }
    }

    pub fn render(&self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {SIZE} {SIZE}\" width=\"{SIZE}\" height=\"{SIZE}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body
        )
    }
}

pub fn basin_color(l: BasinLabel) -> &'static str {
    match l {
        BasinLabel::ToPredatorOnly => "#f6c08a",
        BasinLabel::ToP2 => "#a8d8f0",
        BasinLabel::Undecided => "#d0d0d0",
    }
}

fn short(v: f64) -> String {
    format!("{v:.3}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Prey nullcline `v = (u − M)(1 − u) / (Q(u + B))` and predator nullcline
/// `v = u + C` sampled on `[0, u_max]`.
pub fn nullclines(p: &NondimParams, u_max: f64, n: usize) -> (Vec<[f64; 2]>, Vec<[f64; 2]>) {
    let us = (0..=n).map(|k| u_max * k as f64 / n as f64);
    let prey = us
        .clone()
        .map(|u| [u, (u - p.m) * (1.0 - u) / (p.q * (u + p.b))])
        .collect();
    let pred = us.map(|u| [u, u + p.c]).collect();
    (prey, pred)
}
