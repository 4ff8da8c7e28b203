//! Static SVG rendering for 2D (and 1D) objects. Coordinates are converted
//! to decimals only for drawing; all labels keep the exact "p/q" form.

use tropgeo::geometry::{PolytopalSet, Polytope};
use tropgeo::measure::PiecewiseHaarMeasure;
use tropgeo::num::{format_q, Q};
use tropgeo::Error;

const CANVAS: f64 = 480.0;
const MARGIN: f64 = 24.0;

fn to_f64(q: &Q) -> f64 {
    let n: f64 = q.numer().to_string().parse().unwrap_or(0.0);
    let d: f64 = q.denom().to_string().parse().unwrap_or(1.0);
    n / d
}

struct Frame {
    min: [f64; 2],
    scale: f64,
}

impl Frame {
    fn fit(points: &[[f64; 2]]) -> Frame {
        if points.is_empty() {
            return Frame {
                min: [0.0, 0.0],
                scale: 1.0,
            };
        }
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in points {
            for i in 0..2 {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9);
        Frame {
            min: lo,
            scale: (CANVAS - 2.0 * MARGIN) / span,
        }
    }

    fn map(&self, p: &[f64; 2]) -> (f64, f64) {
        (
            MARGIN + (p[0] - self.min[0]) * self.scale,
            CANVAS - MARGIN - (p[1] - self.min[1]) * self.scale,
        )
    }
}

fn poly_points_2d(p: &Polytope) -> Vec<[f64; 2]> {
    p.vertices()
        .iter()
        .map(|v| {
            let x = to_f64(&v[0]);
            let y = if v.len() > 1 { to_f64(&v[1]) } else { 0.0 };
            [x, y]
        })
        .collect()
}

/// Order the vertices of a 2D polygon counterclockwise around the centroid
/// for path rendering.
fn polygon_path(frame: &Frame, pts: &[[f64; 2]]) -> String {
    let cx = pts.iter().map(|p| p[0]).sum::<f64>() / pts.len() as f64;
    let cy = pts.iter().map(|p| p[1]).sum::<f64>() / pts.len() as f64;
    let mut ordered = pts.to_vec();
    ordered.sort_by(|a, b| {
        let aa = (a[1] - cy).atan2(a[0] - cx);
        let bb = (b[1] - cy).atan2(b[0] - cx);
        aa.partial_cmp(&bb).unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut path = String::new();
    for (i, p) in ordered.iter().enumerate() {
        let (x, y) = frame.map(p);
        path.push_str(if i == 0 { "M" } else { "L" });
        path.push_str(&format!("{x:.3},{y:.3} "));
    }
    path.push('Z');
    path
}

fn render_cells(cells: &[(Polytope, Option<(String, f64)>)]) -> Result<String, Error> {
    for (c, _) in cells {
        if c.ambient() > 2 {
            return Err(Error::BadInput(
                "plotting needs ambient dimension <= 2 (or a projection)".into(),
            ));
        }
    }
    let all: Vec<[f64; 2]> = cells.iter().flat_map(|(c, _)| poly_points_2d(c)).collect();
    let frame = Frame::fit(&all);
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{CANVAS}\" height=\"{CANVAS}\" viewBox=\"0 0 {CANVAS} {CANVAS}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    // draw area cells first, then edges, then points
    let mut by_dim: Vec<&(Polytope, Option<(String, f64)>)> = cells.iter().collect();
    by_dim.sort_by_key(|(c, _)| std::cmp::Reverse(c.dim()));
    for (cell, annotation) in by_dim {
        let pts = poly_points_2d(cell);
        match cell.dim() {
            2 => {
                let opacity = annotation.as_ref().map_or(0.25, |(_, o)| *o);
                svg.push_str(&format!(
                    "<path d=\"{}\" fill=\"#3465a4\" fill-opacity=\"{opacity:.4}\" stroke=\"#204a87\" stroke-width=\"1\"/>\n",
                    polygon_path(&frame, &pts)
                ));
            }
            1 => {
                let (x1, y1) = frame.map(&pts[0]);
                let (x2, y2) = frame.map(&pts[pts.len() - 1]);
                svg.push_str(&format!(
                    "<line x1=\"{x1:.3}\" y1=\"{y1:.3}\" x2=\"{x2:.3}\" y2=\"{y2:.3}\" stroke=\"#a40000\" stroke-width=\"2\"/>\n"
                ));
            }
            _ => {
                let (x, y) = frame.map(&pts[0]);
                svg.push_str(&format!(
                    "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"3\" fill=\"#2e3436\"/>\n"
                ));
            }
        }
        if let Some((label, _)) = annotation {
            let c = poly_points_2d(cell);
            let cx = c.iter().map(|p| p[0]).sum::<f64>() / c.len() as f64;
            let cy = c.iter().map(|p| p[1]).sum::<f64>() / c.len() as f64;
            let (x, y) = frame.map(&[cx, cy]);
            svg.push_str(&format!(
                "<text x=\"{x:.3}\" y=\"{y:.3}\" font-size=\"11\" fill=\"#2e3436\" text-anchor=\"middle\">{label}</text>\n"
            ));
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn plot_cells(cells: &[Polytope]) -> Result<String, Error> {
    let items: Vec<(Polytope, Option<(String, f64)>)> =
        cells.iter().map(|c| (c.clone(), None)).collect();
    render_cells(&items)
}

pub fn plot_set(s: &PolytopalSet) -> Result<String, Error> {
    plot_cells(s.members())
}

/// Densities rendered as fill opacity (normalized against the maximum) with
/// the exact rational density as the label.
pub fn plot_measure(mu: &PiecewiseHaarMeasure) -> Result<String, Error> {
    let max_density = mu
        .pieces
        .iter()
        .map(|p| to_f64(&p.density).abs())
        .fold(0.0f64, f64::max)
        .max(1e-9);
    let items: Vec<(Polytope, Option<(String, f64)>)> = mu
        .pieces
        .iter()
        .map(|p| {
            let opacity = 0.1 + 0.8 * to_f64(&p.density).abs() / max_density;
            (p.support.clone(), Some((format_q(&p.density), opacity)))
        })
        .collect();
    render_cells(&items)
}
