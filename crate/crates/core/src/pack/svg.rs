use std::fmt::Write;

use super::{Origin, PackError, PackingLabel, PackingProblem};

/// Which lines to draw under the circles.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EdgeStyle {
    None,
    /// Edges of the source tiling between original vertices.
    #[default]
    Tiling,
    /// Every edge of the packing triangulation.
    Triangulation,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SvgStyle {
    /// Width and height of the picture in pixels.
    pub size: f64,
    pub edges: EdgeStyle,
    /// Draw the circles of star centres too.
    pub centres: bool,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle { size: 800.0, edges: EdgeStyle::default(), centres: true }
    }
}

fn num(x: f64) -> String {
    let s = format!("{x:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

/// An SVG document with one `<circle>` per drawn vertex.
pub fn render_svg(label: &PackingLabel, problem: &PackingProblem, style: &SvgStyle) -> Result<String, PackError> {
    if label.radii.is_empty() {
        return Err(PackError::Empty);
    }
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (c, &r) in label.centers.iter().zip(&label.radii) {
        x0 = x0.min(c[0] - r);
        y0 = y0.min(c[1] - r);
        x1 = x1.max(c[0] + r);
        y1 = y1.max(c[1] + r);
    }
    let span = (x1 - x0).max(y1 - y0);
    let margin = 0.02 * style.size;
    let scale = (style.size - 2.0 * margin) / span;
    let px = |x: f64| margin + (x - x0) * scale;
    // SVG's y axis points down.
    let py = |y: f64| margin + (y1 - y) * scale;

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{s}" viewBox="0 0 {s} {s}">"#,
        s = num(style.size)
    )
    .unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    let mut lines: Vec<(usize, usize)> = match style.edges {
        EdgeStyle::None => Vec::new(),
        EdgeStyle::Tiling => problem.tiling_edges.clone(),
        EdgeStyle::Triangulation => problem
            .triangles
            .iter()
            .flat_map(|t| (0..3).map(move |k| (t[k].min(t[(k + 1) % 3]), t[k].max(t[(k + 1) % 3]))))
            .collect(),
    };
    lines.sort_unstable();
    lines.dedup();
    if !lines.is_empty() {
        writeln!(out, r##"<g stroke="#1f3a93" stroke-width="1" fill="none">"##).unwrap();
        for (u, v) in lines {
            let (a, b) = (label.centers[u], label.centers[v]);
            writeln!(
                out,
                r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
                num(px(a[0])),
                num(py(a[1])),
                num(px(b[0])),
                num(py(b[1]))
            )
            .unwrap();
        }
        writeln!(out, "</g>").unwrap();
    }
    writeln!(out, r##"<g stroke="#555555" stroke-width="0.5" fill="none">"##).unwrap();
    for (v, (c, &r)) in label.centers.iter().zip(&label.radii).enumerate() {
        if !style.centres && matches!(problem.origin.get(v), Some(Origin::Centre(_))) {
            continue;
        }
        writeln!(out, r#"<circle cx="{}" cy="{}" r="{}"/>"#, num(px(c[0])), num(py(c[1])), num(r * scale)).unwrap();
    }
    writeln!(out, "</g>").unwrap();
    out.push_str("</svg>\n");
    Ok(out)
}
