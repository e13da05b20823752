//! File formats: CSV tables at full precision, JSON reports and a static
//! SVG rendering of a Penrose plot.

use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

use crate::dispersion::PenroseContour;
use crate::error::Result;

pub const SVG_WIDTH: f64 = 640.0;
pub const SVG_HEIGHT: f64 = 480.0;
const MARGIN: f64 = 40.0;

/// 17 significant digits, enough to round-trip every `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a header and numeric rows.
pub fn write_table<W: Write, R: IntoIterator<Item = Vec<f64>>>(out: W, header: &[&str], rows: R) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|x| fmt_f64(*x)))?;
    }
    w.flush()?;
    Ok(())
}

/// `u,eps_re,eps_im` in lab-frame velocities.
pub fn write_contour_csv<W: Write>(out: W, contour: &PenroseContour) -> Result<()> {
    let off = contour.frame_offset;
    write_table(
        out,
        &["u", "eps_re", "eps_im"],
        contour.samples.iter().map(|s| vec![s.u + off, s.eps_re, s.eps_im]),
    )
}

/// Pretty JSON with a trailing newline; key order follows the struct.
pub fn write_json<W: Write, T: Serialize + ?Sized>(mut out: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Affine map from the `ε`-plane to SVG pixels, fitted to the contour,
/// the origin and `ε = 1`.
#[derive(Debug, Clone, Copy)]
pub struct PlotFrame {
    scale: f64,
    cx: f64,
    cy: f64,
}

impl PlotFrame {
    pub fn fit(contour: &PenroseContour) -> Self {
        let (mut x0, mut x1, mut y0, mut y1) = (0.0f64, 1.0f64, 0.0f64, 0.0f64);
        for s in &contour.samples {
            x0 = x0.min(s.eps_re);
            x1 = x1.max(s.eps_re);
            y0 = y0.min(s.eps_im);
            y1 = y1.max(s.eps_im);
        }
        let sx = (SVG_WIDTH - 2.0 * MARGIN) / (x1 - x0).max(1e-300);
        let sy = (SVG_HEIGHT - 2.0 * MARGIN) / (y1 - y0).max(1e-300);
        Self { scale: sx.min(sy), cx: 0.5 * (x0 + x1), cy: 0.5 * (y0 + y1) }
    }

    pub fn map(&self, re: f64, im: f64) -> (f64, f64) {
        (
            0.5 * SVG_WIDTH + self.scale * (re - self.cx),
            0.5 * SVG_HEIGHT - self.scale * (im - self.cy),
        )
    }
}

/// Pixel coordinates of the closed contour, starting and ending at `ε = 1`.
pub fn svg_points(contour: &PenroseContour) -> Vec<(f64, f64)> {
    let frame = PlotFrame::fit(contour);
    std::iter::once((1.0, 0.0))
        .chain(contour.samples.iter().map(|s| (s.eps_re, s.eps_im)))
        .chain(std::iter::once((1.0, 0.0)))
        .map(|(x, y)| frame.map(x, y))
        .collect()
}

/// A 640×480 plot of the contour with a cross-hair at the origin.
pub fn contour_svg(contour: &PenroseContour) -> String {
    let pts = svg_points(contour);
    let origin = PlotFrame::fit(contour).map(0.0, 0.0);
    let mut d = String::new();
    for (i, (x, y)) in pts.iter().enumerate() {
        let _ = write!(d, "{}{x:.3},{y:.3}", if i == 0 { "M" } else { " L" });
    }
    d.push_str(" Z");
    let (ox, oy) = origin;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}" width="{SVG_WIDTH}" height="{SVG_HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="12" y="22" font-family="sans-serif" font-size="14">Penrose plot, k = {}</text>"#,
        contour.k
    );
    let _ = writeln!(svg, r#"<path d="{d}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#);
    let _ = writeln!(
        svg,
        r#"<g stroke="crimson" stroke-width="1"><line x1="{:.3}" y1="{oy:.3}" x2="{:.3}" y2="{oy:.3}"/><line x1="{ox:.3}" y1="{:.3}" x2="{ox:.3}" y2="{:.3}"/></g>"#,
        ox - 8.0,
        ox + 8.0,
        oy - 8.0,
        oy + 8.0
    );
    svg.push_str("</svg>\n");
    svg
}
