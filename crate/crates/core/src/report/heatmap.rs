//! Correlation heatmap as a standalone SVG document.

use std::fmt::Write;

use crate::error::{Error, Result};

const CELL: usize = 56;
const MARGIN: usize = 110;
const DARK_RED: (f64, f64, f64) = (139.0, 0.0, 0.0);
const DARK_BLUE: (f64, f64, f64) = (0.0, 0.0, 139.0);
const TOLERANCE: f64 = 1e-9;

/// Diverging scale: -1 dark red, 0 white, +1 dark blue.
pub fn heat_color(v: f64) -> String {
    let v = v.clamp(-1.0, 1.0);
    let end = if v < 0.0 { DARK_RED } else { DARK_BLUE };
    let t = v.abs();
    let mix = |c: f64| (255.0 + (c - 255.0) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(end.0), mix(end.1), mix(end.2))
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn check(matrix: &[Vec<f64>], labels: &[String]) -> Result<()> {
    let n = matrix.len();
    if n == 0 {
        return Err(Error::DimensionMismatch("empty matrix".into()));
    }
    if labels.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} labels for a {n}x{n} matrix",
            labels.len()
        )));
    }
    for (i, row) in matrix.iter().enumerate() {
        if row.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        for (j, &v) in row.iter().enumerate() {
            if !v.is_finite() || v.abs() > 1.0 + TOLERANCE {
                return Err(Error::DimensionMismatch(format!(
                    "entry ({i},{j}) = {v} is not a correlation"
                )));
            }
            if (v - matrix[j][i]).abs() > TOLERANCE {
                return Err(Error::DimensionMismatch(format!("matrix not symmetric at ({i},{j})")));
            }
        }
    }
    Ok(())
}

pub fn render_heatmap(matrix: &[Vec<f64>], labels: &[String]) -> Result<String> {
    check(matrix, labels)?;
    let n = matrix.len();
    let side = MARGIN + n * CELL + 10;
    let mut svg = String::new();
    // Writing into a String cannot fail.
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{side}" height="{side}" viewBox="0 0 {side} {side}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r##"<rect width="{side}" height="{side}" fill="#ffffff"/>"##);
    for (k, label) in labels.iter().enumerate() {
        let label = escape(label);
        let mid = MARGIN + k * CELL + CELL / 2;
        let _ = writeln!(
            svg,
            r#"<text class="row-label" x="{}" y="{mid}" text-anchor="end" dominant-baseline="middle">{label}</text>"#,
            MARGIN - 6
        );
        let _ = writeln!(
            svg,
            r#"<text class="col-label" x="{mid}" y="{}" text-anchor="start" transform="rotate(-45 {mid} {})">{label}</text>"#,
            MARGIN - 6,
            MARGIN - 6
        );
    }
    for (i, row) in matrix.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let (x, y) = (MARGIN + j * CELL, MARGIN + i * CELL);
            let text_fill = if v.abs() > 0.5 { "#ffffff" } else { "#000000" };
            let _ = writeln!(
                svg,
                r##"<rect class="cell" data-row="{i}" data-col="{j}" x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{}" stroke="#cccccc"/>"##,
                heat_color(v)
            );
            let _ = writeln!(
                svg,
                r##"<text class="value" x="{}" y="{}" text-anchor="middle" dominant-baseline="middle" fill="{text_fill}">{v:.2}</text>"##,
                x + CELL / 2,
                y + CELL / 2
            );
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
