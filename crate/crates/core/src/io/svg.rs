use std::fmt::Write;

use crate::error::{Error, Result};

const PALETTE: [(f64, f64, f64); 5] = [
    (0.267, 0.005, 0.329),
    (0.230, 0.322, 0.546),
    (0.128, 0.567, 0.551),
    (0.369, 0.789, 0.383),
    (0.993, 0.906, 0.144),
];

fn colour(u: f64) -> String {
    let u = if u.is_finite() {
        u.clamp(0.0, 1.0)
    } else {
        0.0
    } * (PALETTE.len() - 1) as f64;
    let k = (u.floor() as usize).min(PALETTE.len() - 2);
    let s = u - k as f64;
    let (a, b) = (PALETTE[k], PALETTE[k + 1]);
    let c = |x: f64, y: f64| ((x + s * (y - x)) * 255.0).round() as u8;
    format!("#{:02x}{:02x}{:02x}", c(a.0, b.0), c(a.1, b.1), c(a.2, b.2))
}

/// Heatmap of `values` on a `rows × cols` grid (row-major, first row at the
/// top), coloured on a linear scale from the minimum to the maximum.
pub fn heatmap_svg(title: &str, rows: usize, cols: usize, values: &[f64]) -> Result<String> {
    if rows * cols != values.len() || values.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: rows * cols,
            found: values.len(),
        });
    }
    let finite = values.iter().copied().filter(|v| v.is_finite());
    let lo = finite.clone().fold(f64::INFINITY, f64::min);
    let hi = finite.fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let cell = (400.0 / rows.max(cols) as f64).max(1.0);
    let (w, h) = (cols as f64 * cell, rows as f64 * cell);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" shape-rendering="crispEdges">"#,
        w + 20.0,
        h + 50.0
    );
    let _ = writeln!(
        s,
        r#"<text x="10" y="18" font-family="sans-serif" font-size="13">{}</text>"#,
        escape(title)
    );
    for i in 0..rows {
        for j in 0..cols {
            let v = values[i * cols + j];
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                10.0 + j as f64 * cell,
                28.0 + i as f64 * cell,
                cell,
                cell,
                colour((v - lo) / span)
            );
        }
    }
    let _ = writeln!(
        s,
        r#"<text x="10" y="{:.2}" font-family="sans-serif" font-size="11">min {lo:.3e}  max {hi:.3e}</text>"#,
        h + 44.0
    );
    s.push_str("</svg>\n");
    Ok(s)
}

/// A named sequence of `(x, y)` points; non-positive values are skipped on
/// the logarithmic axes.
pub struct Series<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
}

const COLOURS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

pub fn loglog_svg(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> Result<String> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().copied())
        .filter(|&(x, y)| x > 0.0 && y > 0.0)
        .map(|(x, y)| (x.log10(), y.log10()))
        .collect();
    if pts.is_empty() {
        return Err(Error::Incompatible(
            "nothing to plot on logarithmic axes".into(),
        ));
    }
    let bounds = |f: fn(&(f64, f64)) -> f64| {
        let lo = pts.iter().map(f).fold(f64::INFINITY, f64::min).floor();
        let hi = pts.iter().map(f).fold(f64::NEG_INFINITY, f64::max).ceil();
        (lo, if hi > lo { hi } else { lo + 1.0 })
    };
    let (x0, x1) = bounds(|p| p.0);
    let (y0, y1) = bounds(|p| p.1);
    let (left, top, w, h) = (60.0, 30.0, 400.0, 300.0);
    let px = |x: f64| left + (x - x0) / (x1 - x0) * w;
    let py = |y: f64| top + (y1 - y) / (y1 - y0) * h;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}">"#,
        left + w + 160.0,
        top + h + 50.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{left}" y="18" font-family="sans-serif" font-size="13">{}</text>"#,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{left}" y="{top}" width="{w}" height="{h}" fill="none" stroke="black"/>"#
    );
    for e in x0 as i32..=x1 as i32 {
        let x = px(e as f64);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{top}" x2="{x:.2}" y2="{}" stroke="gray" stroke-width="0.3"/>"#,
            top + h
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{}" font-family="sans-serif" font-size="10" text-anchor="middle">1e{e}</text>"#,
            top + h + 14.0
        );
    }
    for e in y0 as i32..=y1 as i32 {
        let y = py(e as f64);
        let _ = writeln!(
            s,
            r#"<line x1="{left}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="gray" stroke-width="0.3"/>"#,
            left + w
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="end">1e{e}</text>"#,
            left - 4.0,
            y + 3.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
        left + w / 2.0,
        top + h + 32.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" font-family="sans-serif" font-size="11" transform="rotate(-90 14 {})" text-anchor="middle">{}</text>"#,
        top + h / 2.0,
        top + h / 2.0,
        escape(y_label)
    );
    for (k, ser) in series.iter().enumerate() {
        let c = COLOURS[k % COLOURS.len()];
        let line: Vec<String> = ser
            .points
            .iter()
            .filter(|&&(x, y)| x > 0.0 && y > 0.0)
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x.log10()), py(y.log10())))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{c}"/>"#,
            line.join(" ")
        );
        for p in &line {
            let (x, y) = p.split_once(',').expect("formatted above");
            let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="2.5" fill="{c}"/>"#);
        }
        let ly = top + 14.0 + 16.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{ly}" font-family="sans-serif" font-size="11" fill="{c}">{}</text>"#,
            left + w + 10.0,
            escape(ser.label)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
