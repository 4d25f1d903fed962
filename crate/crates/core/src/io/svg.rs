//! Deterministic SVG figures for 1-D and 2-D scenes. Regions are rasterized: every
//! pixel center is an exact rational point at which the layer sums are evaluated, and
//! the first layer with a nonzero value colors the pixel. Rays and markers are drawn
//! in floating point and only serve as decoration.

use std::fmt::Write;
use std::sync::Arc;

use crate::arith::{fmt_rational, q, qq, to_f64, Q};
use crate::cones::{Cone, Space};
use crate::error::{Error, Result};
use crate::fan::{build_relative_fan, EmbeddingConfig, RelativeFan};
use crate::indicator::{fan_refinement_terms, gamma, sigma, tau, SignedCellSum};

const PALETTE: [&str; 10] = [
    "#1f4e9c", "#9ec1f0", "#e0913a", "#5aa469", "#c45a8c", "#7f6bc4", "#d9c34a", "#4fb3bf", "#b0413e", "#8c8c8c",
];

/// `color(i)` cycles through a fixed palette.
pub fn color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

#[derive(Clone, Debug)]
pub struct Layer {
    pub label: String,
    pub sum: SignedCellSum,
    pub color: String,
}

#[derive(Clone, Debug)]
pub enum Mark {
    Point { at: Vec<Q>, label: String },
    Ray { dir: Vec<Q>, label: String },
}

/// World window `[x0, x1] × [y0, y1]` (the `y` range is ignored in 1-D).
#[derive(Clone, Debug)]
pub struct Window {
    pub x: (Q, Q),
    pub y: (Q, Q),
}

impl Window {
    pub fn square(r: i64) -> Self {
        Window { x: (q(-r), q(r)), y: (q(-r), q(r)) }
    }
}

#[derive(Clone, Debug)]
pub struct Panel {
    pub title: String,
    pub dim: usize,
    pub window: Window,
    pub layers: Vec<Layer>,
    pub marks: Vec<Mark>,
}

#[derive(Clone, Debug)]
pub struct SvgScene {
    pub title: String,
    /// Raster cells per axis.
    pub resolution: usize,
    /// Screen pixels per raster cell.
    pub cell_px: usize,
    pub panels: Vec<Panel>,
}

const STRIP: usize = 28;
const MARGIN: usize = 24;
const TITLE: usize = 22;
const LEGEND_ROW: usize = 16;

impl SvgScene {
    fn panel_size(&self, p: &Panel) -> (usize, usize) {
        let w = self.resolution * self.cell_px;
        let h = if p.dim == 1 { STRIP } else { w };
        (w, h + TITLE + LEGEND_ROW * p.layers.len() + 8)
    }

    pub fn render(&self) -> Result<String> {
        if self.resolution == 0 || self.cell_px == 0 {
            return Err(Error::Input("resolution must be positive".into()));
        }
        for p in &self.panels {
            if p.dim == 0 || p.dim > 2 {
                return Err(Error::FigureDim(p.dim));
            }
        }
        let vertical = self.panels.iter().all(|p| p.dim == 1);
        let sizes: Vec<(usize, usize)> = self.panels.iter().map(|p| self.panel_size(p)).collect();
        let (w, h) = if vertical {
            (
                sizes.iter().map(|s| s.0).max().unwrap_or(0) + 2 * MARGIN,
                sizes.iter().map(|s| s.1 + MARGIN).sum::<usize>() + MARGIN + TITLE,
            )
        } else {
            (
                sizes.iter().map(|s| s.0 + MARGIN).sum::<usize>() + MARGIN,
                sizes.iter().map(|s| s.1).max().unwrap_or(0) + 2 * MARGIN + TITLE,
            )
        };
        let mut out = String::new();
        writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#)
            .unwrap();
        writeln!(out, r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#).unwrap();
        writeln!(
            out,
            r#"<text x="{MARGIN}" y="{}" font-family="sans-serif" font-size="14">{}</text>"#,
            MARGIN,
            escape(&self.title)
        )
        .unwrap();
        let (mut ox, mut oy) = (MARGIN, MARGIN + TITLE);
        for (p, s) in self.panels.iter().zip(&sizes) {
            self.render_panel(&mut out, p, ox, oy);
            if vertical {
                oy += s.1 + MARGIN;
            } else {
                ox += s.0 + MARGIN;
            }
        }
        out.push_str("</svg>\n");
        Ok(out)
    }

    fn render_panel(&self, out: &mut String, p: &Panel, ox: usize, oy: usize) {
        let n = self.resolution;
        let px = self.cell_px;
        let w = n * px;
        let h = if p.dim == 1 { STRIP } else { w };
        writeln!(out, r#"<g transform="translate({ox},{oy})">"#).unwrap();
        writeln!(out, r#"<text x="0" y="14" font-family="sans-serif" font-size="12">{}</text>"#, escape(&p.title)).unwrap();
        let top = TITLE;
        writeln!(out, r##"<rect x="0" y="{top}" width="{w}" height="{h}" fill="#ffffff" stroke="#444444"/>"##).unwrap();
        let (x0, x1) = &p.window.x;
        let (y0, y1) = &p.window.y;
        let dx = (x1 - x0) / Q::from_integer(n.into());
        let dy = (y1 - y0) / Q::from_integer(n.into());
        let half = qq(1, 2);
        let rows = if p.dim == 1 { 1 } else { n };
        let row_h = if p.dim == 1 { STRIP } else { px };
        for j in 0..rows {
            // rows run top to bottom, so y decreases
            let y = y1 - &dy * (Q::from_integer(j.into()) + &half);
            let labels: Vec<Option<usize>> = (0..n)
                .map(|i| {
                    let x = x0 + &dx * (Q::from_integer(i.into()) + &half);
                    let h: Vec<Q> = if p.dim == 1 { vec![x] } else { vec![x, y.clone()] };
                    p.layers.iter().position(|l| l.sum.eval(&h) != 0)
                })
                .collect();
            let mut i = 0;
            while i < n {
                let mut k = i + 1;
                while k < n && labels[k] == labels[i] {
                    k += 1;
                }
                if let Some(l) = labels[i] {
                    writeln!(
                        out,
                        r#"<rect x="{}" y="{}" width="{}" height="{row_h}" fill="{}"/>"#,
                        i * px,
                        top + j * row_h,
                        (k - i) * px,
                        p.layers[l].color
                    )
                    .unwrap();
                }
                i = k;
            }
        }
        let to_sx = |x: f64| (x - to_f64(x0)) / (to_f64(x1) - to_f64(x0)) * w as f64;
        let to_sy = |y: f64| {
            if p.dim == 1 {
                (top + STRIP / 2) as f64
            } else {
                top as f64 + (to_f64(y1) - y) / (to_f64(y1) - to_f64(y0)) * h as f64
            }
        };
        // integer grid
        let grid = |a: &Q, b: &Q| -> Vec<i64> {
            let lo = a.ceil().to_integer();
            let hi = b.floor().to_integer();
            let (lo, hi): (i64, i64) = (lo.try_into().unwrap_or(0), hi.try_into().unwrap_or(0));
            if hi - lo > 40 {
                Vec::new()
            } else {
                (lo..=hi).collect()
            }
        };
        for gx in grid(x0, x1) {
            let sx = to_sx(gx as f64);
            let stroke = if gx == 0 { "#555555" } else { "#d0d0d0" };
            writeln!(out, r#"<line x1="{sx:.2}" y1="{top}" x2="{sx:.2}" y2="{}" stroke="{stroke}" stroke-width="0.6"/>"#, top + h)
                .unwrap();
        }
        if p.dim == 2 {
            for gy in grid(y0, y1) {
                let sy = to_sy(gy as f64);
                let stroke = if gy == 0 { "#555555" } else { "#d0d0d0" };
                writeln!(out, r#"<line x1="0" y1="{sy:.2}" x2="{w}" y2="{sy:.2}" stroke="{stroke}" stroke-width="0.6"/>"#)
                    .unwrap();
            }
        }
        for m in &p.marks {
            match m {
                Mark::Point { at, label } => {
                    let (sx, sy) = (to_sx(to_f64(&at[0])), to_sy(at.get(1).map(to_f64).unwrap_or(0.0)));
                    writeln!(out, r#"<circle cx="{sx:.2}" cy="{sy:.2}" r="3" fill="black"/>"#).unwrap();
                    writeln!(
                        out,
                        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11">{}</text>"#,
                        sx + 4.0,
                        sy - 4.0,
                        escape(label)
                    )
                    .unwrap();
                }
                Mark::Ray { dir, label } => {
                    let d: Vec<f64> = dir.iter().map(to_f64).collect();
                    let (ex, ey) = if p.dim == 1 {
                        let e = if d[0] > 0.0 { to_f64(x1) } else { to_f64(x0) };
                        (e, 0.0)
                    } else {
                        let lim = |v: f64, lo: &Q, hi: &Q| {
                            if v > 0.0 {
                                to_f64(hi) / v
                            } else if v < 0.0 {
                                to_f64(lo) / v
                            } else {
                                f64::INFINITY
                            }
                        };
                        let s = lim(d[0], x0, x1).min(lim(d[1], y0, y1));
                        (d[0] * s, d[1] * s)
                    };
                    writeln!(
                        out,
                        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-width="1.2"/>"#,
                        to_sx(0.0),
                        to_sy(0.0),
                        to_sx(ex),
                        to_sy(ey)
                    )
                    .unwrap();
                    if !label.is_empty() {
                        writeln!(
                            out,
                            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11">{}</text>"#,
                            to_sx(ex * 0.85),
                            to_sy(ey * 0.85) - 4.0,
                            escape(label)
                        )
                        .unwrap();
                    }
                }
            }
        }
        for (k, l) in p.layers.iter().enumerate() {
            let y = top + h + 8 + k * LEGEND_ROW;
            writeln!(out, r#"<rect x="0" y="{y}" width="12" height="12" fill="{}"/>"#, l.color).unwrap();
            writeln!(
                out,
                r#"<text x="18" y="{}" font-family="sans-serif" font-size="11">{}</text>"#,
                y + 10,
                escape(&l.label)
            )
            .unwrap();
        }
        out.push_str("</g>\n");
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn fmt_point(v: &[Q]) -> String {
    format!("({})", v.iter().map(fmt_rational).collect::<Vec<_>>().join(", "))
}

/// Inputs for [`emit_figure`]; unset fields take per-figure defaults.
#[derive(Clone, Debug, Default)]
pub struct FigureParams {
    pub cone: Option<Cone>,
    pub t: Option<Vec<Q>>,
    pub config: Option<EmbeddingConfig>,
    pub resolution: Option<usize>,
}

/// Pixels per side used when no resolution is given.
pub const DEFAULT_RESOLUTION: usize = 120;

pub const FIGURES: [&str; 4] = ["fig3", "fig6", "fig7", "fig8"];

fn acute(a: &[i64], b: &[i64]) -> Cone {
    let s = Space::euclidean(2);
    let v = |x: &[i64]| x.iter().map(|&k| q(k)).collect::<Vec<Q>>();
    Cone::from_generators(&s, &[v(a), v(b)], &[]).expect("two rays")
}

fn check_dim(c: &Cone) -> Result<()> {
    match c.ambient_dim() {
        1 | 2 => Ok(()),
        d => Err(Error::FigureDim(d)),
    }
}

fn window_for(d: usize, r: i64) -> Window {
    if d == 1 {
        Window { x: (q(-r), q(r)), y: (q(0), q(0)) }
    } else {
        Window::square(r)
    }
}

/// The `Γ` region of a cone at `T`, over the cone itself.
pub fn gamma_scene(c: &Cone, t: &[Q], resolution: usize) -> Result<SvgScene> {
    check_dim(c)?;
    let arc = Arc::new(c.clone());
    let d = c.ambient_dim();
    let mut marks = vec![Mark::Point { at: c.space().zero_vector(), label: "0".into() }];
    marks.push(Mark::Point { at: t.to_vec(), label: "T".into() });
    marks.extend(c.rays().iter().map(|r| Mark::Ray { dir: r.clone(), label: String::new() }));
    let panel = Panel {
        title: format!("Gamma(C, H, T), T = {}", fmt_point(t)),
        dim: d,
        window: window_for(d, 3),
        layers: vec![
            Layer { label: "Gamma(C, ., T)".into(), sum: gamma(c, t)?, color: color(0).into() },
            Layer { label: "rint C".into(), sum: tau(&arc), color: color(1).into() },
        ],
        marks,
    };
    Ok(SvgScene { title: "Truncated region".into(), resolution, cell_px: 3, panels: vec![panel] })
}

/// `[rint C^∨] = [rint C] + Σ σ(F, C)` over the facets `F` of a 2-D cone.
pub fn sigma_scene(c: &Cone, resolution: usize) -> Result<SvgScene> {
    check_dim(c)?;
    let arc = Arc::new(c.clone());
    let d = c.ambient_dim();
    let mut layers = vec![Layer { label: "rint C".into(), sum: tau(&arc), color: color(0).into() }];
    for (k, fd) in c.face_data()?.iter().enumerate() {
        if fd.dim() + 1 == c.dim() {
            let label = format!("sigma(F{}, C)", layers.len());
            layers.push(Layer { label, sum: sigma(c, k)?, color: color(layers.len()).into() });
        }
    }
    let mut marks = vec![Mark::Point { at: c.space().zero_vector(), label: "0".into() }];
    marks.extend(c.rays().iter().enumerate().map(|(i, r)| Mark::Ray { dir: r.clone(), label: format!("F{}", i + 1) }));
    let panel = Panel { title: "Decomposition of the dual cone".into(), dim: d, window: window_for(d, 3), layers, marks };
    Ok(SvgScene { title: "sigma regions".into(), resolution, cell_px: 3, panels: vec![panel] })
}

/// The cells of a relative fan and, when `T` is given, the refinement of the base
/// chamber into `Γ` pieces attached to cell faces shifted by `T`.
pub fn fan_scene(fan: &RelativeFan, t: Option<&[Q]>, resolution: usize) -> Result<SvgScene> {
    let d = fan.dim();
    if d == 0 || d > 2 {
        return Err(Error::FigureDim(d));
    }
    let r = 3;
    let origin = Mark::Point { at: fan.space().zero_vector(), label: "0".into() };
    let mut cells: Vec<_> = fan.cells().iter().filter(|c| c.cone.dim() == d).collect();
    cells.sort_by_key(|c| c.id());
    let layers = cells
        .iter()
        .enumerate()
        .map(|(i, c)| Layer { label: format!("C{} = z{}", i + 1, c.id()), sum: tau(&c.cone), color: color(i + 1).into() })
        .collect();
    let mut marks = vec![origin.clone()];
    for c in fan.cells() {
        if c.cone.dim() == 1 + c.cone.lineality_dim() && c.cone.dim() < d {
            for ray in c.cone.rays() {
                marks.push(Mark::Ray { dir: ray.clone(), label: String::new() });
            }
        }
        if c.cone.lineality_dim() > 0 && c.cone.dim() < d {
            for l in c.cone.lineality() {
                marks.push(Mark::Ray { dir: l.clone(), label: String::new() });
                marks.push(Mark::Ray { dir: l.iter().map(|x| -x.clone()).collect(), label: String::new() });
            }
        }
    }
    let mut panels =
        vec![Panel { title: format!("cells of {}", fan.config.name), dim: d, window: window_for(d, r), layers, marks }];
    if let Some(t) = t {
        fan.space().check(t)?;
        let base = fan.base_chamber();
        let tops = fan.top_cells();
        let terms = fan_refinement_terms(&base, &tops, t)?;
        let mut layers: Vec<Layer> = Vec::new();
        for term in &terms {
            let idx = cells.iter().position(|c| c.cone.is_subset_of(&term.piece) || term.piece.is_subset_of(&c.cone));
            let name = match (term.piece.dim(), idx) {
                (k, Some(i)) if k == d => format!("C{} + T", i + 1),
                (k, _) => format!("{k}-dim face piece"),
            };
            let label = if term.face.dim() == base.lineality_dim() { name } else { format!("{name} (face dim {})", term.face.dim()) };
            layers.push(Layer { label, sum: term.sum.clone(), color: color(layers.len() + 1).into() });
        }
        panels.push(Panel {
            title: format!("refinement at T = {}", fmt_point(t)),
            dim: d,
            window: window_for(d, r),
            layers,
            marks: vec![origin, Mark::Point { at: t.to_vec(), label: "T".into() }],
        });
    }
    Ok(SvgScene { title: format!("relative fan {}", fan.config.name), resolution, cell_px: 3, panels })
}

/// Named figures: `fig3` (Γ region), `fig6` (the line fan), `fig7` (the plane fan
/// refinement), `fig8` (σ regions).
pub fn emit_figure(name: &str, params: &FigureParams) -> Result<String> {
    let res = params.resolution.unwrap_or(DEFAULT_RESOLUTION);
    let scene = match name {
        "fig3" | "gamma" => {
            let c = params.cone.clone().unwrap_or_else(|| acute(&[1, 0], &[1, 1]));
            let t = params.t.clone().unwrap_or_else(|| match c.ambient_dim() {
                1 => vec![q(1)],
                _ => vec![qq(3, 2), qq(1, 2)],
            });
            c.space().check(&t)?;
            gamma_scene(&c, &t, res)?
        }
        "fig8" | "sigma" => {
            let c = params.cone.clone().unwrap_or_else(|| acute(&[1, 0], &[3, 2]));
            sigma_scene(&c, res)?
        }
        "fig6" | "fig7" | "fan" => {
            let cfg = match &params.config {
                Some(c) => c.clone(),
                None => EmbeddingConfig::builtin(if name == "fig7" { "gl2_in_gl3_corner" } else { "gl1_in_gl2_corner" })?,
            };
            let fan = build_relative_fan(&cfg)?;
            let t = params.t.clone().unwrap_or_else(|| match fan.dim() {
                1 => vec![q(1)],
                _ => vec![qq(3, 2), qq(1, 2)],
            });
            fan_scene(&fan, Some(&t), res)?
        }
        other => return Err(Error::Unknown { kind: "figure", name: other.to_string() }),
    };
    scene.render()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figures_are_deterministic() {
        for f in FIGURES {
            let p = FigureParams { resolution: Some(40), ..Default::default() };
            let a = emit_figure(f, &p).unwrap();
            let b = emit_figure(f, &p).unwrap();
            assert_eq!(a, b, "{f}");
            assert!(a.starts_with("<svg") && a.ends_with("</svg>\n"));
        }
    }

    #[test]
    fn gamma_half_line_pixels() {
        let s = Space::euclidean(1);
        let c = Cone::from_generators(&s, &[vec![q(1)]], &[]).unwrap();
        // (0, 1] is one run of the Γ color on a 12-cell strip over [-3, 3]
        let svg = gamma_scene(&c, &[q(1)], 12).unwrap().render().unwrap();
        let runs: Vec<&str> = svg.lines().filter(|l| l.contains(color(0)) && l.starts_with("<rect x=")).collect();
        assert_eq!(runs.len(), 2, "{svg}");
        assert!(runs[0].contains(r#"x="18" y="22" width="6""#), "{}", runs[0]);
    }

    #[test]
    fn rejects_three_dimensions() {
        let s = Space::euclidean(3);
        let c = Cone::full(&s);
        let p = FigureParams { cone: Some(c), t: Some(vec![q(0); 3]), ..Default::default() };
        assert!(matches!(emit_figure("fig3", &p), Err(Error::FigureDim(3))));
        let p = FigureParams { resolution: Some(0), ..Default::default() };
        assert!(matches!(emit_figure("fig3", &p), Err(Error::Input(_))));
        assert!(matches!(emit_figure("fig9", &FigureParams::default()), Err(Error::Unknown { .. })));
    }
}
