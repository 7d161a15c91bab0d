//! Minimal SVG charts: axes, polylines or a heatmap, and labels.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

fn range(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn frame(out: &mut String, title: &str, x_label: &str, y_label: &str, xr: (f64, f64), yr: (f64, f64)) {
    let (pw, ph) = (W - LEFT - RIGHT, H - TOP - BOTTOM);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + pw / 2.0,
        esc(title)
    );
    let _ = writeln!(
        out,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for (i, frac) in [0.0, 0.5, 1.0].iter().enumerate() {
        let x = LEFT + frac * pw;
        let y = TOP + ph - frac * ph;
        let xv = xr.0 + frac * (xr.1 - xr.0);
        let yv = yr.0 + frac * (yr.1 - yr.0);
        let anchor = ["start", "middle", "end"][i];
        let _ = writeln!(
            out,
            r#"<text x="{x}" y="{}" text-anchor="{anchor}">{}</text>"#,
            TOP + ph + 16.0,
            tick(xv)
        );
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, LEFT - 6.0, y + 4.0, tick(yv));
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        H - 12.0,
        esc(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        esc(y_label)
    );
}

fn tick(v: f64) -> String {
    format!("{v:.3}")
}

pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let xr = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let yr = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let (pw, ph) = (W - LEFT - RIGHT, H - TOP - BOTTOM);
    let sx = |x: f64| LEFT + (x - xr.0) / (xr.1 - xr.0) * pw;
    let sy = |y: f64| TOP + ph - (y - yr.0) / (yr.1 - yr.0) * ph;

    let mut out = String::new();
    frame(&mut out, title, x_label, y_label, xr, yr);
    if yr.0 < 0.0 && yr.1 > 0.0 {
        let y = sy(0.0);
        let _ = writeln!(
            out,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#999" stroke-dasharray="4 3"/>"##,
            LEFT + pw
        );
    }
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        // break the line at missing values
        let mut segments: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
        for &(x, y) in &s.points {
            if y.is_finite() {
                segments.last_mut().expect("non-empty").push((sx(x), sy(y)));
            } else if !segments.last().expect("non-empty").is_empty() {
                segments.push(Vec::new());
            }
        }
        for seg in segments.iter().filter(|s| !s.is_empty()) {
            let pts: Vec<String> = seg.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                pts.join(" ")
            );
        }
        let ly = TOP + 14.0 + 18.0 * k as f64;
        let lx = W - RIGHT + 10.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 18.0
        );
        let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, lx + 24.0, ly + 4.0, esc(&s.name));
    }
    out.push_str("</svg>\n");
    out
}

/// `z[i][j]` is the value at `(xs[i], ys[j])`; missing cells are grey.
pub fn heatmap(title: &str, x_label: &str, y_label: &str, xs: &[f64], ys: &[f64], z: &[Vec<Option<f64>>]) -> String {
    let xr = range(xs.iter().copied());
    let yr = range(ys.iter().copied());
    let zr = range(z.iter().flatten().flatten().copied());
    let (pw, ph) = (W - LEFT - RIGHT, H - TOP - BOTTOM);
    let cw = pw / xs.len() as f64;
    let chh = ph / ys.len() as f64;

    let mut out = String::new();
    frame(&mut out, title, x_label, y_label, xr, yr);
    for (i, row) in z.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let fill = v.map_or_else(|| "#cccccc".to_string(), |v| ramp((v - zr.0) / (zr.1 - zr.0)));
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#,
                LEFT + i as f64 * cw,
                TOP + ph - (j + 1) as f64 * chh,
                cw + 0.3,
                chh + 0.3
            );
        }
    }
    let lx = W - RIGHT + 20.0;
    for k in 0..=20 {
        let t = k as f64 / 20.0;
        let _ = writeln!(
            out,
            r#"<rect x="{lx}" y="{:.2}" width="16" height="{:.2}" fill="{}"/>"#,
            TOP + ph - (t * ph),
            ph / 20.0 + 0.5,
            ramp(t)
        );
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, lx + 22.0, TOP + 4.0, tick(zr.1));
    let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, lx + 22.0, TOP + ph + 4.0, tick(zr.0));
    out.push_str("</svg>\n");
    out
}

/// Dark blue through teal to yellow.
fn ramp(t: f64) -> String {
    const STOPS: [(f64, f64, f64); 4] = [(68.0, 1.0, 84.0), (49.0, 104.0, 142.0), (53.0, 183.0, 121.0), (253.0, 231.0, 37.0)];
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    let s = t * (STOPS.len() - 1) as f64;
    let i = (s.floor() as usize).min(STOPS.len() - 2);
    let f = s - i as f64;
    let mix = |a: f64, b: f64| (a + (b - a) * f).round() as u8;
    let (a, b) = (STOPS[i], STOPS[i + 1]);
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}
