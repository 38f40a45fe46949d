//! Static SVG 1.1 grouped bar chart of a comparison table.

use std::fmt::Write as _;
use std::path::Path;

use farey_subsets::ComparisonRow;
use num_traits::ToPrimitive;

use crate::{CliError, CliResult};

const GROUP_WIDTH: f64 = 48.0;
const BAR_WIDTH: f64 = 18.0;
const PLOT_HEIGHT: f64 = 240.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_TOP: f64 = 32.0;
const MARGIN_BOTTOM: f64 = 72.0;
const EMPIRICAL_FILL: &str = "#4c72b0";
const MAIN_FILL: &str = "#dd8452";

/// One group per row, bars for the empirical and the limiting density.
pub fn render(rows: &[ComparisonRow]) -> CliResult<String> {
    if rows.is_empty() {
        return Err(CliError::Invalid("nothing to plot: comparison table is empty".into()));
    }
    let values: Vec<(String, f64, f64)> = rows
        .iter()
        .map(|r| {
            (r.delta.to_string(), r.empirical.to_f64().unwrap_or(0.0), r.main.to_f64().unwrap_or(0.0))
        })
        .collect();
    let top = values.iter().map(|v| v.1.max(v.2)).fold(0.0, f64::max);
    let top = if top > 0.0 { top } else { 1.0 };
    let width = MARGIN_LEFT + GROUP_WIDTH * values.len() as f64 + 16.0;
    let height = MARGIN_TOP + PLOT_HEIGHT + MARGIN_BOTTOM;
    let base = MARGIN_TOP + PLOT_HEIGHT;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{width:.0}" height="{height:.0}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<line x1="{MARGIN_LEFT:.1}" y1="{base:.1}" x2="{:.1}" y2="{base:.1}" stroke="black"/>"#,
        width - 8.0
    );
    let _ = writeln!(
        s,
        r#"<line x1="{MARGIN_LEFT:.1}" y1="{MARGIN_TOP:.1}" x2="{MARGIN_LEFT:.1}" y2="{base:.1}" stroke="black"/>"#
    );
    for tick in 0..=4 {
        let v = top * tick as f64 / 4.0;
        let y = base - PLOT_HEIGHT * tick as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="10" text-anchor="end">{v:.4}</text>"#,
            MARGIN_LEFT - 4.0,
            y + 3.0
        );
    }
    for (i, (label, emp, main)) in values.iter().enumerate() {
        let x0 = MARGIN_LEFT + GROUP_WIDTH * i as f64 + 5.0;
        let _ = writeln!(s, r#"<g class="group" id="delta-{i}">"#);
        for (j, (v, fill, name)) in [(emp, EMPIRICAL_FILL, "empirical"), (main, MAIN_FILL, "main")].into_iter().enumerate() {
            let h = PLOT_HEIGHT * v / top;
            let _ = writeln!(
                s,
                r#"<rect class="{name}" x="{:.1}" y="{:.3}" width="{BAR_WIDTH:.1}" height="{h:.3}" fill="{fill}"><title>{label} {name} {v:.6e}</title></rect>"#,
                x0 + BAR_WIDTH * j as f64,
                base - h
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="10" text-anchor="end" transform="rotate(-45 {:.1} {:.1})">{label}</text>"#,
            x0 + BAR_WIDTH,
            base + 14.0,
            x0 + BAR_WIDTH,
            base + 14.0
        );
        let _ = writeln!(s, "</g>");
    }
    let _ = writeln!(
        s,
        r#"<rect x="{:.1}" y="8" width="10" height="10" fill="{EMPIRICAL_FILL}"/><text x="{:.1}" y="17" font-family="sans-serif" font-size="11">empirical</text>"#,
        MARGIN_LEFT,
        MARGIN_LEFT + 14.0
    );
    let _ = writeln!(
        s,
        r#"<rect x="{:.1}" y="8" width="10" height="10" fill="{MAIN_FILL}"/><text x="{:.1}" y="17" font-family="sans-serif" font-size="11">limit</text>"#,
        MARGIN_LEFT + 90.0,
        MARGIN_LEFT + 104.0
    );
    let _ = writeln!(s, "</svg>");
    Ok(s)
}

pub fn emit_svg(rows: &[ComparisonRow], path: &Path) -> CliResult<()> {
    let doc = render(rows)?;
    std::fs::write(path, doc).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
