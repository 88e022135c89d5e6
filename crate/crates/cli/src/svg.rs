//! SVG rendering of a run report.

use std::fmt::Write as _;

use crate::report::RunReport;

const SCALE: f64 = 60.0;

/// Draws the workspace, regions, bodies (start poses dashed, final poses
/// solid) and the robot path. The y axis points up.
pub fn render(report: &RunReport) -> String {
    let g = &report.geometry;
    let [x0, y0, x1, y1] = g.bounds;
    let w = (x1 - x0) * SCALE;
    let h = (y1 - y0) * SCALE;
    let tx = |x: f64| (x - x0) * SCALE;
    let ty = |y: f64| (y1 - y) * SCALE;
    let rect = |s: &mut String, r: [f64; 4], style: &str| {
        let _ = writeln!(
            s,
            r#"  <rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" {style}/>"#,
            tx(r[0]),
            ty(r[3]),
            (r[2] - r[0]) * SCALE,
            (r[3] - r[1]) * SCALE
        );
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.2} {h:.2}">"#
    );
    rect(
        &mut s,
        g.bounds,
        r##"fill="#fafafa" stroke="#333" stroke-width="2""##,
    );
    for r in &g.regions {
        rect(&mut s, r.rect, r##"fill="#cfe8ff" stroke="#4a90d9""##);
        let _ = writeln!(
            s,
            r#"  <text x="{:.2}" y="{:.2}" font-size="14" font-family="sans-serif">{}</text>"#,
            tx(r.rect[0]) + 3.0,
            ty(r.rect[3]) + 15.0,
            r.name
        );
    }
    for b in &g.bodies {
        if b.fixed {
            rect(&mut s, b.end, r##"fill="#555""##);
        } else {
            if b.start != b.end {
                rect(
                    &mut s,
                    b.start,
                    r##"fill="none" stroke="#b5651d" stroke-dasharray="4 3""##,
                );
            }
            rect(&mut s, b.end, r##"fill="#d9a066" stroke="#b5651d""##);
        }
    }
    if g.path.len() > 1 {
        let pts: Vec<String> = g
            .path
            .iter()
            .map(|p| format!("{:.2},{:.2}", tx(p[0]), ty(p[1])))
            .collect();
        let _ = writeln!(
            s,
            r##"  <polyline points="{}" fill="none" stroke="#d62728" stroke-width="2"/>"##,
            pts.join(" ")
        );
    }
    if let (Some(a), Some(b)) = (g.path.first(), g.path.last()) {
        let r = g.robot_radius * SCALE;
        let _ = writeln!(
            s,
            r##"  <circle cx="{:.2}" cy="{:.2}" r="{r:.2}" fill="#2ca02c"/>"##,
            tx(a[0]),
            ty(a[1])
        );
        let _ = writeln!(
            s,
            r##"  <circle cx="{:.2}" cy="{:.2}" r="{r:.2}" fill="#d62728"/>"##,
            tx(b[0]),
            ty(b[1])
        );
    }
    s.push_str("</svg>\n");
    s
}
