use std::fmt::Write;

use crate::caustic::CausticSlice;

const SIZE: f64 = 600.0;
const MARGIN: f64 = 40.0;

/// Slice curve with cusps marked and crossings circled.
pub fn slice_svg(slice: &CausticSlice, title: &str) -> String {
    let pts = slice.points();
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in &pts {
        xmin = xmin.min(p[0]);
        xmax = xmax.max(p[0]);
        ymin = ymin.min(p[1]);
        ymax = ymax.max(p[1]);
    }
    let span = (xmax - xmin).max(ymax - ymin).max(f64::MIN_POSITIVE);
    let (cx, cy) = (0.5 * (xmin + xmax), 0.5 * (ymin + ymax));
    let k = (SIZE - 2.0 * MARGIN) / span;
    let map = |p: [f64; 2]| (SIZE / 2.0 + k * (p[0] - cx), SIZE / 2.0 - k * (p[1] - cy));

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" font-family="serif" font-size="16" text-anchor="middle">{}</text>"#,
        SIZE / 2.0,
        escape(title)
    );
    if !pts.is_empty() {
        let mut d = String::new();
        for (i, p) in pts.iter().enumerate() {
            let (x, y) = map(*p);
            let _ = write!(d, "{}{x:.3},{y:.3} ", if i == 0 { "M" } else { "L" });
        }
        d.push('Z');
        let _ = writeln!(s, r#"<path d="{d}" fill="none" stroke="black" stroke-width="1.2"/>"#);
    }
    // cusps: nearest sample to each cusp angle
    for &c in &slice.cusp_angles {
        if let Some(sample) = slice
            .samples
            .iter()
            .min_by(|a, b| crate::caustic::angle_distance(a.phi, c).total_cmp(&crate::caustic::angle_distance(b.phi, c)))
        {
            let (x, y) = map([sample.x, sample.y]);
            let _ = writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="3.5" fill="red"/>"#);
        }
    }
    for c in &slice.crossings {
        let (x, y) = map(c.point);
        let _ = writeln!(
            s,
            r#"<circle cx="{x:.3}" cy="{y:.3}" r="9" fill="none" stroke="blue" stroke-width="1.5"/>"#
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
