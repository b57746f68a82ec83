//! Pictures of `f(𝔻)` as deformed polar grids: the images of concentric
//! circles and radial segments, written as SVG, plus a filled raster mask.

use std::fmt::Write as _;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::EXCLUSION;
use crate::fieldmap::Mapping;
use crate::{is_finite_c, lit, to_f64, Error, Real, Result};

/// Plot bounds `[x_min, x_max] × [y_min, y_max]` in the image plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Bounds {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let ok = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite()) && x_min < x_max && y_min < y_max;
        if !ok {
            return Err(Error::ParameterOutOfRange(format!(
                "viewport [{x_min}, {x_max}] x [{y_min}, {y_max}] is empty or not finite"
            )));
        }
        Ok(Self { x_min, x_max, y_min, y_max })
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    fn contains(&self, p: [f64; 2]) -> bool {
        p[0] >= self.x_min && p[0] <= self.x_max && p[1] >= self.y_min && p[1] <= self.y_max
    }

    fn padded(&self, fraction: f64) -> Self {
        let (dx, dy) = (self.width() * fraction, self.height() * fraction);
        Self { x_min: self.x_min - dx, x_max: self.x_max + dx, y_min: self.y_min - dy, y_max: self.y_max + dy }
    }

    /// Smallest box around `points`; degenerate extents are widened to 1.
    fn around<'a>(points: impl Iterator<Item = &'a [f64; 2]>) -> Option<Self> {
        let mut b: Option<Self> = None;
        for p in points {
            b = Some(match b {
                None => Self { x_min: p[0], x_max: p[0], y_min: p[1], y_max: p[1] },
                Some(b) => Self {
                    x_min: b.x_min.min(p[0]),
                    x_max: b.x_max.max(p[0]),
                    y_min: b.y_min.min(p[1]),
                    y_max: b.y_max.max(p[1]),
                },
            });
        }
        b.map(|mut b| {
            if b.width() <= 0.0 {
                b.x_min -= 0.5;
                b.x_max += 0.5;
            }
            if b.height() <= 0.0 {
                b.y_min -= 0.5;
                b.y_max += 0.5;
            }
            b
        })
    }
}

impl Default for Bounds {
    fn default() -> Self {
        Self { x_min: -1.0, x_max: 1.0, y_min: -1.0, y_max: 1.0 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub enum Viewport {
    /// Bounding box of the samples; padded by [`AUTO_PADDING`] for SVG.
    #[default]
    Auto,
    Explicit(Bounds),
}

/// Relative padding of the automatic SVG viewport on every side.
pub const AUTO_PADDING: f64 = 0.05;
pub const MIN_SAMPLES: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenderSpec {
    /// Radii of the source circles, each in `(0, r_max]`.
    pub circles: Vec<f64>,
    pub rays: usize,
    pub samples: usize,
    pub r_max: f64,
    pub viewport: Viewport,
    /// Stroke widths in output pixels.
    pub circle_width: f64,
    pub ray_width: f64,
    /// Width of the SVG document in pixels; the height follows the viewport.
    pub width_px: f64,
}

impl Default for RenderSpec {
    fn default() -> Self {
        Self::with_counts(12, 24, 0.97)
    }
}

impl RenderSpec {
    /// `circles` circles at `r = k/circles · r_max` and `rays` rays at
    /// `θ = 2πj/rays`.
    pub fn with_counts(circles: usize, rays: usize, r_max: f64) -> Self {
        Self {
            circles: (1..=circles).map(|k| k as f64 / circles as f64 * r_max).collect(),
            rays,
            samples: 512,
            r_max,
            viewport: Viewport::Auto,
            circle_width: 1.0,
            ray_width: 0.75,
            width_px: 800.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_max > 0.0 && self.r_max < 1.0) {
            return Err(Error::ParameterOutOfRange(format!("r_max = {} must lie in (0, 1)", self.r_max)));
        }
        if self.samples < MIN_SAMPLES {
            return Err(Error::ParameterOutOfRange(format!(
                "{} samples per curve, at least {MIN_SAMPLES} needed",
                self.samples
            )));
        }
        if let Some(r) = self.circles.iter().find(|r| !(**r > 0.0 && **r <= self.r_max)) {
            return Err(Error::ParameterOutOfRange(format!("circle radius {r} outside (0, r_max]")));
        }
        let strokes = [self.circle_width, self.ray_width, self.width_px];
        if strokes.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::ParameterOutOfRange("stroke widths and document width must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum CurveKind {
    Circle { r: f64 },
    Ray { theta: f64 },
}

/// The image of one circle or ray, split into polylines wherever samples
/// were skipped.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Curve {
    pub kind: CurveKind,
    pub segments: Vec<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Picture {
    pub label: String,
    pub curves: Vec<Curve>,
    pub warnings: Vec<String>,
}

impl Picture {
    pub fn points(&self) -> impl Iterator<Item = &[f64; 2]> {
        self.curves.iter().flat_map(|c| c.segments.iter().flatten())
    }
}

fn singular_angles<T: Real, M: Mapping<T> + ?Sized>(map: &M) -> Vec<f64> {
    map.singular_points()
        .iter()
        .map(|s| (to_f64(s.re), to_f64(s.im)))
        .filter(|(x, y)| x.hypot(*y) > 1e-12)
        .map(|(x, y)| y.atan2(x))
        .collect()
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d)
}

fn excluded(theta: f64, singular: &[f64]) -> bool {
    singular.iter().any(|s| angle_gap(theta, *s) < EXCLUSION)
}

fn evaluate<T: Real, M: Mapping<T> + ?Sized>(map: &M, points: &[Option<Complex<T>>]) -> Vec<Option<[f64; 2]>> {
    let live: Vec<Complex<T>> = points.iter().flatten().copied().collect();
    let mut values = map.values_along(&live).into_iter();
    points
        .iter()
        .map(|p| {
            p.and_then(|_| {
                let w = values.next()?.ok().filter(|w| is_finite_c(*w))?;
                Some([to_f64(w.re), to_f64(w.im)])
            })
        })
        .collect()
}

fn split(values: Vec<Option<[f64; 2]>>) -> Vec<Vec<[f64; 2]>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    for v in values {
        match v {
            Some(p) => cur.push(p),
            None if !cur.is_empty() => out.push(std::mem::take(&mut cur)),
            None => {}
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn polar<T: Real>(r: f64, theta: f64) -> Complex<T> {
    Complex::new(lit(r * theta.cos()), lit(r * theta.sin()))
}

fn circle_curve<T: Real, M: Mapping<T> + ?Sized>(map: &M, r: f64, n: usize, singular: &[f64]) -> Curve {
    let points: Vec<Option<Complex<T>>> = (0..n)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / n as f64;
            (!excluded(t, singular)).then(|| polar(r, t))
        })
        .collect();
    let values = evaluate(map, &points);
    let segments = match values.iter().position(Option::is_none) {
        // closed curve
        None => {
            let mut all: Vec<[f64; 2]> = values.into_iter().flatten().collect();
            all.push(all[0]);
            vec![all]
        }
        // start right after a gap so the piece through θ = 0 stays whole
        Some(gap) => {
            let mut rotated = values[gap..].to_vec();
            rotated.extend_from_slice(&values[..gap]);
            split(rotated)
        }
    };
    Curve { kind: CurveKind::Circle { r }, segments }
}

fn ray_curve<T: Real, M: Mapping<T> + ?Sized>(map: &M, theta: f64, r_max: f64, n: usize, singular: &[f64]) -> Curve {
    let skip = excluded(theta, singular);
    let points: Vec<Option<Complex<T>>> = (0..n)
        .map(|k| (!skip).then(|| polar(r_max * k as f64 / (n - 1) as f64, theta)))
        .collect();
    Curve { kind: CurveKind::Ray { theta }, segments: split(evaluate(map, &points)) }
}

/// Samples every circle and ray image of `spec`. Curves whose samples all
/// fail or lie on a singular direction are left out with a warning.
pub fn sample_curves<T: Real, M: Mapping<T> + ?Sized>(map: &M, spec: &RenderSpec) -> Result<Picture> {
    spec.validate()?;
    let singular = singular_angles(map);
    let kinds: Vec<CurveKind> = spec
        .circles
        .iter()
        .map(|&r| CurveKind::Circle { r })
        .chain((0..spec.rays).map(|j| CurveKind::Ray { theta: std::f64::consts::TAU * j as f64 / spec.rays as f64 }))
        .collect();
    let sampled: Vec<Curve> = kinds
        .par_iter()
        .map(|k| match *k {
            CurveKind::Circle { r } => circle_curve(map, r, spec.samples, &singular),
            CurveKind::Ray { theta } => ray_curve(map, theta, spec.r_max, spec.samples, &singular),
        })
        .collect();
    let mut curves = Vec::new();
    let mut warnings = Vec::new();
    for c in sampled {
        if c.segments.is_empty() {
            warnings.push(match c.kind {
                CurveKind::Circle { r } => format!("circle r={r} omitted: no sample could be evaluated"),
                CurveKind::Ray { theta } => {
                    format!("ray theta={theta:.9} omitted: it lies on a singular direction or no sample could be evaluated")
                }
            });
        } else {
            curves.push(c);
        }
    }
    Ok(Picture { label: map.label(), curves, warnings })
}

/// Cuts polylines where they leave `keep`, so that points far outside an
/// explicit viewport are not written.
fn clip(segments: &[Vec<[f64; 2]>], keep: &Bounds) -> Vec<Vec<[f64; 2]>> {
    segments
        .iter()
        .flat_map(|s| split(s.iter().map(|p| keep.contains(*p).then_some(*p)).collect()))
        .filter(|s| s.len() > 1)
        .collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// SVG 1.1 document with one polyline per circle or ray image piece. The
/// output is a pure function of `map` and `spec`.
pub fn render_svg<T: Real, M: Mapping<T> + ?Sized>(map: &M, spec: &RenderSpec) -> Result<String> {
    let picture = sample_curves(map, spec)?;
    Ok(svg_document(&picture, spec))
}

pub fn svg_document(picture: &Picture, spec: &RenderSpec) -> String {
    let view = match spec.viewport {
        Viewport::Explicit(b) => b,
        Viewport::Auto => Bounds::around(picture.points()).unwrap_or_default().padded(AUTO_PADDING),
    };
    let keep = view.padded(1.0);
    let px = view.width() / spec.width_px;
    let height_px = spec.width_px * view.height() / view.width();
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{:.3}" height="{:.3}" viewBox="{:.6} {:.6} {:.6} {:.6}">"#,
        spec.width_px,
        height_px,
        view.x_min,
        -view.y_max,
        view.width(),
        view.height()
    );
    let _ = writeln!(s, "<title>{}</title>", escape(&picture.label));
    let _ = writeln!(
        s,
        "<desc>circles={} rays={} samples={} r_max={}</desc>",
        spec.circles.len(),
        spec.rays,
        spec.samples,
        spec.r_max
    );
    if !picture.warnings.is_empty() {
        let _ = writeln!(s, "<metadata>");
        for w in &picture.warnings {
            let _ = writeln!(s, "warning: {}", escape(w));
        }
        let _ = writeln!(s, "</metadata>");
    }
    for (class, width, color) in [("circles", spec.circle_width, "#1f4e79"), ("rays", spec.ray_width, "#a33b20")] {
        let _ = writeln!(
            s,
            r#"<g class="{class}" fill="none" stroke="{color}" stroke-width="{:.6}" stroke-linejoin="round">"#,
            width * px
        );
        for c in &picture.curves {
            let is_circle = matches!(c.kind, CurveKind::Circle { .. });
            if is_circle != (class == "circles") {
                continue;
            }
            let segments = match spec.viewport {
                Viewport::Explicit(_) => clip(&c.segments, &keep),
                Viewport::Auto => c.segments.clone(),
            };
            for seg in segments {
                s.push_str("<polyline points=\"");
                for (i, p) in seg.iter().enumerate() {
                    if i > 0 {
                        s.push(' ');
                    }
                    let _ = write!(s, "{:.6},{:.6}", p[0], -p[1]);
                }
                s.push_str("\"/>\n");
            }
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}

/// Binary mask of the image region, row 0 at the top.
#[derive(Clone, Debug, PartialEq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub viewport: Bounds,
    pub mask: Vec<bool>,
}

impl Raster {
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.mask[y * self.width + x]
    }

    /// Centre of pixel `(x, y)` in the image plane.
    pub fn pixel_center(&self, x: usize, y: usize) -> [f64; 2] {
        let v = &self.viewport;
        [
            v.x_min + (x as f64 + 0.5) * v.width() / self.width as f64,
            v.y_max - (y as f64 + 0.5) * v.height() / self.height as f64,
        ]
    }

    pub fn filled_fraction(&self) -> f64 {
        if self.mask.is_empty() {
            return 0.0;
        }
        self.mask.iter().filter(|b| **b).count() as f64 / self.mask.len() as f64
    }

    /// Binary PPM (P6): filled pixels black, the rest white.
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.reserve(self.mask.len() * 3);
        for &b in &self.mask {
            let c = if b { 0 } else { 255 };
            out.extend_from_slice(&[c, c, c]);
        }
        out
    }

    fn fill_triangle(&mut self, a: [f64; 2], b: [f64; 2], c: [f64; 2]) {
        let v = self.viewport;
        let (sx, sy) = (self.width as f64 / v.width(), self.height as f64 / v.height());
        // pixel coordinates, y downwards
        let to_px = |p: [f64; 2]| [(p[0] - v.x_min) * sx, (v.y_max - p[1]) * sy];
        let (a, b, c) = (to_px(a), to_px(b), to_px(c));
        let area = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
        if area == 0.0 || !area.is_finite() {
            return;
        }
        let lo = |i: usize| a[i].min(b[i]).min(c[i]).floor().max(0.0);
        let hi = |i: usize, n: usize| a[i].max(b[i]).max(c[i]).ceil().min(n as f64);
        let (x0, x1) = (lo(0) as usize, hi(0, self.width).max(0.0) as usize);
        let (y0, y1) = (lo(1) as usize, hi(1, self.height).max(0.0) as usize);
        let edge = |p: [f64; 2], q: [f64; 2], x: f64, y: f64| ((q[0] - p[0]) * (y - p[1]) - (q[1] - p[1]) * (x - p[0])) * area.signum();
        for y in y0..y1 {
            for x in x0..x1 {
                let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
                if edge(a, b, px, py) >= 0.0 && edge(b, c, px, py) >= 0.0 && edge(c, a, px, py) >= 0.0 {
                    self.mask[y * self.width + x] = true;
                }
            }
        }
    }
}

/// Deepest subdivision of a raster cell.
pub const MAX_REFINE: u32 = 5;

type Triangle = [[f64; 2]; 3];

/// A polar cell `[r0, r1] × [t0, t1]` with the images of its corners at
/// `(r0, t0), (r1, t0), (r1, t1), (r0, t1)`.
#[derive(Clone, Copy)]
struct Cell {
    r: [f64; 2],
    t: [f64; 2],
    corners: [[f64; 2]; 4],
}

fn value_at<T: Real, M: Mapping<T> + ?Sized>(map: &M, r: f64, t: f64) -> Option<[f64; 2]> {
    evaluate(map, &[Some(polar::<T>(r, t))])[0]
}

fn outside(points: &[[f64; 2]], v: &Bounds) -> bool {
    points.iter().all(|p| p[0] < v.x_min)
        || points.iter().all(|p| p[0] > v.x_max)
        || points.iter().all(|p| p[1] < v.y_min)
        || points.iter().all(|p| p[1] > v.y_max)
}

/// Triangulates the image of `cell`. A cell is drawn as two triangles once
/// the image of its centre lies within `tol` of the corner average;
/// otherwise it is split in four, and dropped at depth [`MAX_REFINE`].
fn triangulate<T: Real, M: Mapping<T> + ?Sized>(map: &M, cell: Cell, view: &Bounds, tol: f64, depth: u32, out: &mut Vec<Triangle>) {
    let [r0, r1] = cell.r;
    let [t0, t1] = cell.t;
    let (rm, tm) = ((r0 + r1) / 2.0, (t0 + t1) / 2.0);
    let Some(mid) = value_at(map, rm, tm) else { return };
    let [a, b, c, d] = cell.corners;
    if outside(&[a, b, c, d, mid], view) {
        return;
    }
    let guess = [(a[0] + b[0] + c[0] + d[0]) / 4.0, (a[1] + b[1] + c[1] + d[1]) / 4.0];
    if (mid[0] - guess[0]).hypot(mid[1] - guess[1]) <= tol {
        out.push([a, b, c]);
        out.push([a, c, d]);
        return;
    }
    if depth == MAX_REFINE {
        return;
    }
    let edges = [value_at(map, rm, t0), value_at(map, r1, tm), value_at(map, rm, t1), value_at(map, r0, tm)];
    let [Some(e0), Some(e1), Some(e2), Some(e3)] = edges else { return };
    let quads = [
        ([r0, rm], [t0, tm], [a, e0, mid, e3]),
        ([rm, r1], [t0, tm], [e0, b, e1, mid]),
        ([rm, r1], [tm, t1], [mid, e1, c, e2]),
        ([r0, rm], [tm, t1], [e3, mid, e2, d]),
    ];
    for (r, t, corners) in quads {
        triangulate(map, Cell { r, t, corners }, view, tol, depth + 1, out);
    }
}

/// Fills the image of the disk bounded by the outermost circle of `spec`.
/// The disk is cut into polar cells, `spec.samples` angles (offset by half a
/// step) by `spec.samples / 2` radii; cells whose image is not resolved to
/// half a pixel are subdivided, so regions of extreme stretching are not
/// bridged by straight edges. A spec without circles gives a blank image.
/// The automatic viewport is the unpadded bounding box of the base grid,
/// widened to the pixel aspect ratio.
pub fn render_raster<T: Real, M: Mapping<T> + ?Sized>(map: &M, spec: &RenderSpec, width: usize, height: usize) -> Result<Raster> {
    spec.validate()?;
    if width == 0 || height == 0 {
        return Err(Error::ParameterOutOfRange("raster resolution must be positive".into()));
    }
    let blank = |viewport| Raster { width, height, viewport, mask: vec![false; width * height] };
    let Some(outer) = spec.circles.iter().copied().reduce(f64::max) else {
        return Ok(blank(match spec.viewport {
            Viewport::Explicit(b) => b,
            Viewport::Auto => Bounds::default(),
        }));
    };
    let singular = singular_angles(map);
    let n = spec.samples;
    let rings = (spec.samples / 2).max(2);
    let step = std::f64::consts::TAU / n as f64;
    let angles: Vec<f64> = (0..=n).map(|k| step * (k as f64 + 0.5)).collect();
    let radius = |j: usize| outer * j as f64 / rings as f64;
    let origin = evaluate(map, &[Some(Complex::<T>::new(T::zero(), T::zero()))])[0];
    let grid: Vec<Vec<Option<[f64; 2]>>> = (0..=rings)
        .into_par_iter()
        .map(|j| {
            if j == 0 {
                return vec![origin; n + 1];
            }
            let points: Vec<Option<Complex<T>>> =
                angles.iter().map(|t| (!excluded(*t, &singular)).then(|| polar(radius(j), *t))).collect();
            evaluate(map, &points)
        })
        .collect();
    let viewport = match spec.viewport {
        Viewport::Explicit(b) => b,
        Viewport::Auto => {
            let b = Bounds::around(grid.iter().flatten().flatten()).unwrap_or_default();
            // equal scale on both axes
            let scale = (b.width() / width as f64).max(b.height() / height as f64);
            let (cx, cy) = ((b.x_min + b.x_max) / 2.0, (b.y_min + b.y_max) / 2.0);
            let (hw, hh) = (scale * width as f64 / 2.0, scale * height as f64 / 2.0);
            Bounds { x_min: cx - hw, x_max: cx + hw, y_min: cy - hh, y_max: cy + hh }
        }
    };
    let tol = 0.5 * (viewport.width() / width as f64).min(viewport.height() / height as f64);
    let triangles: Vec<Vec<Triangle>> = (0..rings)
        .into_par_iter()
        .map(|j| {
            let mut out = Vec::new();
            for k in 0..n {
                let corners = [grid[j][k], grid[j + 1][k], grid[j + 1][k + 1], grid[j][k + 1]];
                let [Some(a), Some(b), Some(c), Some(d)] = corners else { continue };
                let cell = Cell { r: [radius(j), radius(j + 1)], t: [angles[k], angles[k + 1]], corners: [a, b, c, d] };
                triangulate(map, cell, &viewport, tol, 0, &mut out);
            }
            out
        })
        .collect();
    let mut raster = blank(viewport);
    for [a, b, c] in triangles.into_iter().flatten() {
        raster.fill_triangle(a, b, c);
    }
    Ok(raster)
}

#[cfg(test)]
mod tests {
    use std::sync::Mutex;

    use super::*;
    use crate::fieldmap::{catalog, CatalogEntry, CatalogParams, WirtingerJet};

    fn map(name: &str) -> CatalogEntry<f64> {
        catalog(name, &CatalogParams::default()).unwrap()
    }

    #[test]
    fn identity_samples_are_inputs() {
        let spec = RenderSpec::with_counts(3, 4, 0.9);
        let p = sample_curves(&map("identity"), &spec).unwrap();
        assert_eq!(p.curves.len(), 7);
        assert!(p.warnings.is_empty());
        let CurveKind::Circle { r } = p.curves[1].kind else { panic!() };
        let seg = &p.curves[1].segments[0];
        assert_eq!(seg.len(), 513);
        for (k, w) in seg.iter().take(512).enumerate() {
            let t = std::f64::consts::TAU * k as f64 / 512.0;
            assert!((w[0] - r * t.cos()).abs() < 1e-15 && (w[1] - r * t.sin()).abs() < 1e-15);
        }
        let ray = p.curves[6].segments[0].clone();
        assert!((ray[511][0] - 0.0).abs() < 1e-15 && (ray[511][1] + 0.9).abs() < 1e-15);
    }

    #[test]
    fn half_plane_picture_stays_right_of_the_line() {
        let p = sample_curves(&map("half_plane_lh"), &RenderSpec::default()).unwrap();
        let bound = -1.0 / (2.0 * std::f64::consts::E) - 1e-3;
        assert!(p.points().all(|w| w[0] > bound));
        assert_eq!(p.warnings.len(), 1, "{:?}", p.warnings);
    }

    #[test]
    fn two_slits_are_avoided() {
        let p = sample_curves(&map("two_slits_lh"), &RenderSpec::default()).unwrap();
        let e = (-1.0f64).exp();
        assert!(p.points().count() > 10_000);
        assert!(!p.points().any(|w| w[1].abs() > e + 1e-2 && w[0].abs() < 1e-3));
    }

    #[test]
    fn svg_is_deterministic_and_reports_omissions() {
        let f = map("koebe_lh");
        let spec = RenderSpec { viewport: Viewport::Explicit(Bounds::new(-1.0, 3.0, -2.0, 2.0).unwrap()), ..Default::default() };
        let a = render_svg(&f, &spec).unwrap();
        assert_eq!(a, render_svg(&f, &spec).unwrap());
        assert!(a.contains("<metadata>") && a.contains("ray theta=0.000000000 omitted"));
        assert!(a.starts_with("<?xml") && a.ends_with("</svg>\n"));
    }

    #[test]
    fn identity_raster_is_a_disk() {
        let r = render_raster(&map("identity"), &RenderSpec::default(), 256, 256).unwrap();
        let ratio = r.filled_fraction() / std::f64::consts::FRAC_PI_4;
        assert!((ratio - 1.0).abs() < 0.02, "{ratio}");
        let ppm = r.to_ppm();
        assert!(ppm.starts_with(b"P6\n256 256\n255\n"));
        assert_eq!(ppm.len(), 15 + 256 * 256 * 3);
    }

    #[test]
    fn empty_spec_gives_blank_raster() {
        let spec = RenderSpec::with_counts(0, 0, 0.97);
        let r = render_raster(&map("koebe_lh"), &spec, 32, 16).unwrap();
        assert_eq!(r.filled_fraction(), 0.0);
        assert_eq!(r.to_ppm().len(), 13 + 32 * 16 * 3);
        let svg = render_svg(&map("koebe_lh"), &spec).unwrap();
        assert!(!svg.contains("<polyline"));
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let id = map("identity");
        assert!(sample_curves(&id, &RenderSpec::with_counts(2, 2, 1.0)).is_err());
        assert!(sample_curves(&id, &RenderSpec { samples: 63, ..Default::default() }).is_err());
        assert!(sample_curves(&id, &RenderSpec { circles: vec![0.98], ..Default::default() }).is_err());
    }

    /// Records the largest modulus it is evaluated at.
    struct Probe<'a> {
        inner: &'a CatalogEntry<f64>,
        seen: Mutex<f64>,
    }

    impl Mapping<f64> for Probe<'_> {
        fn label(&self) -> String {
            "probe".into()
        }
        fn value(&self, z: Complex<f64>) -> Result<Complex<f64>> {
            let mut s = self.seen.lock().unwrap();
            *s = s.max(z.norm());
            self.inner.value(z)
        }
        fn jet(&self, z: Complex<f64>) -> Result<WirtingerJet<f64>> {
            self.inner.jet(z)
        }
        fn singular_points(&self) -> Vec<Complex<f64>> {
            self.inner.singular_points()
        }
    }

    #[test]
    fn never_evaluates_beyond_r_max() {
        let f = map("two_slits_lh");
        let probe = Probe { inner: &f, seen: Mutex::new(0.0) };
        let spec = RenderSpec { samples: 64, ..RenderSpec::with_counts(5, 7, 0.8) };
        sample_curves(&probe, &spec).unwrap();
        render_raster(&probe, &spec, 64, 64).unwrap();
        let seen = *probe.seen.lock().unwrap();
        assert!(seen <= 0.8 + 1e-15 && seen > 0.79);
    }
}
