//! SVG rendering of tropical functions: graphs over edges, shaded cells over
//! triangles. Coordinates are rounded for display only; exact breakpoints are
//! kept in `<title>` elements.

use std::fmt::Write;

use num_traits::ToPrimitive;
use reesdiag_core::skeleton::SkeletonComplex;
use reesdiag_core::theta::{TropicalCell, TropicalFunction};
use reesdiag_core::Rational;

use crate::CliError;

const PANEL_W: f64 = 480.0;
const PANEL_H: f64 = 320.0;
const MARGIN: f64 = 40.0;
const COLORS: [&str; 6] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"];

type Labeled = (String, TropicalFunction<Rational>);

pub fn emit_svg(k: &SkeletonComplex, fns: &[Labeled]) -> Result<String, CliError> {
    let dim = k.dimension();
    if dim > 2 {
        return Err(CliError::UnsupportedDimension(dim));
    }
    if fns.is_empty() {
        return Err(CliError::Usage("this command produces no tropical functions to plot".into()));
    }
    let mut panels: Vec<String> = Vec::new();
    for s in k.maximal_simplices() {
        match s.len() {
            2 => panels.push(edge_panel(k, &s, fns)),
            3 => panels.extend(fns.iter().map(|f| triangle_panel(k, &s, f))),
            _ => {}
        }
    }
    let height = PANEL_H * panels.len().max(1) as f64;
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{PANEL_W}" height="{height}" viewBox="0 0 {PANEL_W} {height}" font-family="sans-serif" font-size="11">"#
    )
    .unwrap();
    for (i, p) in panels.iter().enumerate() {
        writeln!(out, r#"<g transform="translate(0,{})">"#, i as f64 * PANEL_H).unwrap();
        out.push_str(p);
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn f(q: &Rational) -> f64 {
    q.to_f64().expect("finite rational")
}

fn value(c: &TropicalCell, mu: &[Rational]) -> Rational {
    c.form.iter().zip(mu).map(|(a, b)| a * b).sum()
}

fn label_of(k: &SkeletonComplex, s: &[usize]) -> String {
    s.iter().map(|&j| k.vertices()[j].label.as_str()).collect::<Vec<_>>().join("-")
}

/// Graphs of every function over one edge, against the coordinate of its second vertex.
fn edge_panel(k: &SkeletonComplex, s: &[usize], fns: &[Labeled]) -> String {
    let graphs: Vec<Vec<(Rational, Rational)>> = fns
        .iter()
        .map(|(_, func)| {
            let mut pts: Vec<(Rational, Rational)> = func
                .cells()
                .iter()
                .filter(|c| c.simplex == s)
                .flat_map(|c| c.polytope.vertices().iter().map(|mu| (mu[1].clone(), value(c, mu))).collect::<Vec<_>>())
                .collect();
            pts.sort();
            pts.dedup();
            pts
        })
        .collect();
    let ys = graphs.iter().flatten().map(|(_, y)| f(y));
    let (lo, hi) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| (a.min(y), b.max(y)));
    let (lo, hi) = if hi - lo < 1e-9 { (lo - 1.0, hi + 1.0) } else { (lo, hi) };
    let px = |x: f64| MARGIN + x * (PANEL_W - 2.0 * MARGIN);
    let py = |y: f64| PANEL_H - MARGIN - (y - lo) / (hi - lo) * (PANEL_H - 2.0 * MARGIN);
    let mut out = String::new();
    let names: Vec<&str> = s.iter().map(|&j| k.vertices()[j].label.as_str()).collect();
    writeln!(out, r#"<text x="{MARGIN}" y="16">edge {}</text>"#, label_of(k, s)).unwrap();
    writeln!(
        out,
        r##"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#888"/>"##,
        px(0.0),
        PANEL_H - MARGIN,
        px(1.0),
        PANEL_H - MARGIN
    )
    .unwrap();
    writeln!(out, r#"<text x="{:.3}" y="{:.3}">{}</text>"#, px(0.0), PANEL_H - MARGIN + 14.0, names[0]).unwrap();
    writeln!(out, r#"<text x="{:.3}" y="{:.3}" text-anchor="end">{}</text>"#, px(1.0), PANEL_H - MARGIN + 14.0, names[1])
        .unwrap();
    for (i, ((label, _), pts)) in fns.iter().zip(&graphs).enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = pts.iter().map(|(x, y)| format!("{:.3},{:.3}", px(f(x)), py(f(y)))).collect();
        writeln!(out, r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"><title>{}</title></polyline>"#, path.join(" "), escape(label)).unwrap();
        for (x, y) in pts {
            writeln!(
                out,
                r#"<circle cx="{:.3}" cy="{:.3}" r="3" fill="{color}"><title>({x}, {y})</title></circle>"#,
                px(f(x)),
                py(f(y))
            )
            .unwrap();
        }
        writeln!(out, r#"<text x="{:.3}" y="{:.3}" fill="{color}">{}</text>"#, PANEL_W - MARGIN, 16.0 + 13.0 * i as f64, escape(label))
            .unwrap();
    }
    out
}

/// Cells of one function over a triangle, shaded by the value at each cell's centroid.
fn triangle_panel(k: &SkeletonComplex, s: &[usize], (label, func): &Labeled) -> String {
    let corners = [(MARGIN, PANEL_H - MARGIN), (PANEL_W - MARGIN, PANEL_H - MARGIN), (PANEL_W / 2.0, MARGIN)];
    let embed = |mu: &[Rational]| -> (f64, f64) {
        mu.iter().zip(&corners).fold((0.0, 0.0), |(x, y), (m, c)| (x + f(m) * c.0, y + f(m) * c.1))
    };
    let cells: Vec<&TropicalCell> = func.cells().iter().filter(|c| c.simplex == s).collect();
    let centre_values: Vec<f64> = cells.iter().map(|c| f(&value(c, &c.polytope.centroid()))).collect();
    let lo = centre_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = centre_values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut out = String::new();
    writeln!(out, r#"<text x="{MARGIN}" y="16">{} on {}</text>"#, escape(label), label_of(k, s)).unwrap();
    for (c, v) in cells.iter().zip(&centre_values) {
        let shade = if hi - lo < 1e-9 { 0.5 } else { (v - lo) / (hi - lo) };
        let grey = (230.0 - 160.0 * shade).round() as u8;
        let mut pts: Vec<(f64, f64)> = c.polytope.vertices().iter().map(|mu| embed(mu)).collect();
        let (cx, cy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
        let (cx, cy) = (cx / pts.len() as f64, cy / pts.len() as f64);
        pts.sort_by(|a, b| (a.1 - cy).atan2(a.0 - cx).total_cmp(&(b.1 - cy).atan2(b.0 - cx)));
        let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.3},{y:.3}")).collect();
        let (slope, offset) = c.slope_offset();
        let slope: Vec<String> = slope.iter().map(|q| q.to_string()).collect();
        writeln!(
            out,
            r##"<polygon points="{}" fill="rgb({grey},{grey},{grey})" stroke="#333"><title>slope ({}) offset {offset}</title></polygon>"##,
            path.join(" "),
            slope.join(", ")
        )
        .unwrap();
    }
    for (j, c) in s.iter().zip(&corners) {
        writeln!(out, r#"<text x="{:.3}" y="{:.3}">{}</text>"#, c.0, c.1 + 14.0, k.vertices()[*j].label).unwrap();
    }
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
