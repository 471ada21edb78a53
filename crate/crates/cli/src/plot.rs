//! Minimal line-chart SVG writer. Output depends only on the input table, so
//! identical input yields byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::CliError;
use crate::table::Table;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const TARGET_TICKS: usize = 6;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// Tick positions covering `[lo, hi]` with steps of 1, 2 or 5 times a power of ten.
pub fn nice_ticks(lo: f64, hi: f64, target: usize) -> (f64, f64, Vec<f64>) {
    let (lo, hi) = if hi > lo {
        (lo, hi)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { 0.5 * lo.abs() };
        (lo - pad, lo + pad)
    };
    let raw = (hi - lo) / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let start = (lo / step).floor();
    let end = (hi / step).ceil();
    let ticks: Vec<f64> = (0..=(end - start) as i64)
        .map(|i| (start + i as f64) * step)
        .collect();
    (start * step, end * step, ticks)
}

fn tick_label(v: f64, step: f64) -> String {
    let v = if v.abs() < step * 1e-9 { 0.0 } else { v };
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    if v != 0.0 && (v.abs() >= 1e5 || v.abs() < 1e-4) {
        format!("{v:.2e}")
    } else {
        format!("{v:.decimals$}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Renders `columns` of `table` against `x_column` (defaults to the first column).
pub fn render_svg(
    table: &Table,
    columns: &[String],
    x_column: Option<&str>,
) -> Result<String, CliError> {
    if table.rows.is_empty() {
        return Err(CliError::Config("plot: CSV has no data rows".into()));
    }
    if columns.is_empty() {
        return Err(CliError::Config(
            "columns: at least one column is required".into(),
        ));
    }
    let x_name = x_column.unwrap_or(&table.columns[0]);
    let lookup = |name: &str| {
        table
            .column(name)
            .ok_or_else(|| CliError::Config(format!("columns: no column named '{name}'")))
    };
    let xs = lookup(x_name)?;
    let series = columns
        .iter()
        .map(|c| lookup(c).map(|ys| (c.as_str(), ys)))
        .collect::<Result<Vec<_>, _>>()?;

    let finite = |v: &&f64| v.is_finite();
    let bounds = |vals: &mut dyn Iterator<Item = &f64>| {
        vals.filter(finite)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    };
    let (x_lo, x_hi) = bounds(&mut xs.iter());
    let (y_lo, y_hi) = bounds(&mut series.iter().flat_map(|(_, ys)| ys.iter()));
    if !(x_lo.is_finite() && y_lo.is_finite()) {
        return Err(CliError::Config("plot: no finite values to draw".into()));
    }
    let (x_min, x_max, x_ticks) = nice_ticks(x_lo, x_hi, TARGET_TICKS);
    let (y_min, y_max, y_ticks) = nice_ticks(y_lo, y_hi, TARGET_TICKS);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x_min) / (x_max - x_min) * plot_w;
    let py = |y: f64| TOP + (y_max - y) / (y_max - y_min) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );

    let x_step = x_ticks.get(1).map_or(1.0, |t| t - x_ticks[0]);
    for &t in &x_ticks {
        let x = px(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
            TOP + plot_h,
            TOP + plot_h + 5.0,
            TOP + plot_h + 20.0,
            tick_label(t, x_step)
        );
    }
    let y_step = y_ticks.get(1).map_or(1.0, |t| t - y_ticks[0]);
    for &t in &y_ticks {
        let y = py(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0,
            tick_label(t, y_step)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0,
        escape(x_name)
    );

    for (i, (name, ys)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = xs
            .iter()
            .zip(ys)
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|(&x, &y)| format!("{:.3},{:.3}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline data-column="{}" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            escape(name),
            points.join(" ")
        );
        let ly = TOP + 15.0 + 20.0 * i as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            lx + 25.0,
            lx + 32.0,
            ly + 4.0,
            escape(name)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn cmd_plot(
    input: &Path,
    columns: &[String],
    output: &Path,
    x_column: Option<&str>,
) -> Result<(), CliError> {
    let table = Table::read_csv_file(input)?;
    let svg = render_svg(&table, columns, x_column)?;
    fs::write(output, svg).map_err(CliError::io(format!("writing {}", output.display())))
}
