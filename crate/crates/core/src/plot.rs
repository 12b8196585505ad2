//! Self-contained SVG figures: a correlation heat map and a model scatter
//! plot with size- and color-encoded markers.

use std::fmt::Write;

use crate::stats::{CorrelationMatrix, MetricTable, StatsError};

const FONT: &str = "font-family:Helvetica,Arial,sans-serif";

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Rgb(f64, f64, f64);

impl Rgb {
    fn lerp(self, other: Rgb, t: f64) -> Rgb {
        Rgb(
            self.0 + (other.0 - self.0) * t,
            self.1 + (other.1 - self.1) * t,
            self.2 + (other.2 - self.2) * t,
        )
    }

    fn hex(self) -> String {
        let c = |v: f64| v.round().clamp(0.0, 255.0) as u8;
        format!("#{:02x}{:02x}{:02x}", c(self.0), c(self.1), c(self.2))
    }

    fn luminance(self) -> f64 {
        (0.299 * self.0 + 0.587 * self.1 + 0.114 * self.2) / 255.0
    }
}

fn ramp(stops: &[Rgb], t: f64) -> Rgb {
    let t = t.clamp(0.0, 1.0) * (stops.len() - 1) as f64;
    let i = (t.floor() as usize).min(stops.len() - 2);
    stops[i].lerp(stops[i + 1], t - i as f64)
}

/// Blue at -1, white at 0, red at +1.
fn diverging(r: f64) -> Rgb {
    ramp(
        &[
            Rgb(33.0, 102.0, 172.0),
            Rgb(247.0, 247.0, 247.0),
            Rgb(178.0, 24.0, 43.0),
        ],
        (r + 1.0) / 2.0,
    )
}

fn sequential(t: f64) -> Rgb {
    ramp(
        &[
            Rgb(68.0, 1.0, 84.0),
            Rgb(59.0, 82.0, 139.0),
            Rgb(33.0, 145.0, 140.0),
            Rgb(94.0, 201.0, 98.0),
            Rgb(253.0, 231.0, 37.0),
        ],
        t,
    )
}

/// Annotated heat map; every cell's text is the coefficient to 2 decimals.
pub fn heatmap_svg(matrix: &CorrelationMatrix, title: &str) -> String {
    let n = matrix.labels.len();
    let cell = 84.0;
    let left = 150.0;
    let top = 60.0;
    let bottom = 130.0;
    let width = left + cell * n as f64 + 30.0;
    let height = top + cell * n as f64 + bottom;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" style="{FONT}">"#
    );
    let _ = writeln!(svg, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="30" text-anchor="middle" style="font-size:16px;font-weight:bold">{}</text>"#,
        width / 2.0,
        escape(title)
    );
    for (i, row_label) in matrix.labels.iter().enumerate() {
        let y = top + cell * i as f64;
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="end" dominant-baseline="middle" style="font-size:12px">{}</text>"#,
            left - 8.0,
            y + cell / 2.0,
            escape(row_label)
        );
        for (j, col_label) in matrix.labels.iter().enumerate() {
            let x = left + cell * j as f64;
            let r = matrix.r[i][j];
            let fill = diverging(r);
            let ink = if fill.luminance() < 0.5 { "#ffffff" } else { "#000000" };
            let _ = writeln!(
                svg,
                r##"<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="{}" stroke="#ffffff"/>"##,
                fill.hex()
            );
            let _ = writeln!(
                svg,
                r#"<text class="cell" data-row="{}" data-col="{}" x="{}" y="{}" text-anchor="middle" dominant-baseline="middle" style="font-size:14px;fill:{ink}">{:.2}</text>"#,
                escape(row_label),
                escape(col_label),
                x + cell / 2.0,
                y + cell / 2.0,
                r
            );
        }
    }
    let label_y = top + cell * n as f64 + 10.0;
    for (j, col_label) in matrix.labels.iter().enumerate() {
        let x = left + cell * j as f64 + cell / 2.0;
        let _ = writeln!(
            svg,
            r#"<text x="{x}" y="{label_y}" text-anchor="end" transform="rotate(-40 {x} {label_y})" style="font-size:12px">{}</text>"#,
            escape(col_label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Which columns drive each visual channel of the scatter plot.
#[derive(Debug, Clone, Copy)]
pub struct ScatterSpec<'a> {
    pub x: &'a str,
    pub y: &'a str,
    /// Marker area is proportional to this column.
    pub size: Option<&'a str>,
    /// Marker fill follows a linear ramp over this column.
    pub color: Option<&'a str>,
    pub title: &'a str,
}

#[derive(Debug, Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
}

impl Axis {
    fn fit(values: &[f64]) -> Axis {
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if lo == hi {
            // Single value: centered.
            let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
            return Axis {
                lo: lo - pad,
                hi: hi + pad,
            };
        }
        let pad = (hi - lo) * 0.12;
        Axis {
            lo: lo - pad,
            hi: hi + pad,
        }
    }

    fn frac(self, v: f64) -> f64 {
        (v - self.lo) / (self.hi - self.lo)
    }
}

pub const MAX_MARKER_RADIUS: f64 = 36.0;

fn column<'t>(table: &'t MetricTable, name: &str) -> Result<&'t [f64], StatsError> {
    table
        .column(name)
        .ok_or_else(|| StatsError::MissingColumn(name.to_string()))
}

pub fn scatter_svg(table: &MetricTable, spec: &ScatterSpec<'_>) -> Result<String, StatsError> {
    let xs = column(table, spec.x)?;
    let ys = column(table, spec.y)?;
    let sizes = spec.size.map(|c| column(table, c)).transpose()?;
    let colors = spec.color.map(|c| column(table, c)).transpose()?;
    let models = table.models();

    let (width, height) = (760.0, 520.0);
    let (left, right, top, bottom) = (80.0, 220.0, 50.0, 70.0);
    let plot_w = width - left - right;
    let plot_h = height - top - bottom;
    let ax = Axis::fit(xs);
    let ay = Axis::fit(ys);
    let px = |v: f64| left + ax.frac(v) * plot_w;
    let py = |v: f64| top + (1.0 - ay.frac(v)) * plot_h;

    let max_size = sizes
        .map(|s| s.iter().copied().fold(0.0, f64::max))
        .unwrap_or(0.0);
    let radius = |i: usize| match sizes {
        Some(s) if max_size > 0.0 => MAX_MARKER_RADIUS * (s[i].max(0.0) / max_size).sqrt(),
        _ => 10.0,
    };
    let (cmin, cmax) = colors.map_or((0.0, 0.0), |c| {
        (
            c.iter().copied().fold(f64::INFINITY, f64::min),
            c.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        )
    });
    let fill = |i: usize| match colors {
        Some(c) if cmax > cmin => sequential((c[i] - cmin) / (cmax - cmin)),
        Some(_) => sequential(0.5),
        None => Rgb(59.0, 82.0, 139.0),
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" style="{FONT}">"#
    );
    let _ = writeln!(svg, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="28" text-anchor="middle" style="font-size:16px;font-weight:bold">{}</text>"#,
        left + plot_w / 2.0,
        escape(spec.title)
    );
    let _ = writeln!(
        svg,
        r##"<rect x="{left}" y="{top}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#333333"/>"##
    );

    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let xv = ax.lo + t * (ax.hi - ax.lo);
        let yv = ay.lo + t * (ay.hi - ay.lo);
        let x = px(xv);
        let y = py(yv);
        let _ = writeln!(
            svg,
            r##"<line x1="{x}" y1="{top}" x2="{x}" y2="{}" stroke="#e0e0e0"/>"##,
            top + plot_h
        );
        let _ = writeln!(
            svg,
            r##"<line x1="{left}" y1="{y}" x2="{}" y2="{y}" stroke="#e0e0e0"/>"##,
            left + plot_w
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x}" y="{}" text-anchor="middle" style="font-size:11px">{xv:.2}</text>"#,
            top + plot_h + 18.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{y}" text-anchor="end" dominant-baseline="middle" style="font-size:11px">{yv:.2}</text>"#,
            left - 6.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text class="axis-label" x="{}" y="{}" text-anchor="middle" style="font-size:13px">{}</text>"#,
        left + plot_w / 2.0,
        height - 22.0,
        escape(spec.x)
    );
    let ylx = 22.0;
    let yly = top + plot_h / 2.0;
    let _ = writeln!(
        svg,
        r#"<text class="axis-label" x="{ylx}" y="{yly}" text-anchor="middle" transform="rotate(-90 {ylx} {yly})" style="font-size:13px">{}</text>"#,
        escape(spec.y)
    );

    // Largest markers first so small ones stay visible.
    let mut order: Vec<usize> = (0..models.len()).collect();
    order.sort_by(|&a, &b| radius(b).total_cmp(&radius(a)));
    for i in order {
        let _ = writeln!(
            svg,
            r##"<circle class="marker" data-model="{}" data-x="{}" data-y="{}" cx="{:.2}" cy="{:.2}" r="{:.3}" fill="{}" fill-opacity="0.85" stroke="#222222"/>"##,
            escape(&models[i]),
            xs[i],
            ys[i],
            px(xs[i]),
            py(ys[i]),
            radius(i),
            fill(i).hex()
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" style="font-size:11px">{}</text>"#,
            px(xs[i]),
            py(ys[i]) - radius(i) - 4.0,
            escape(&models[i])
        );
    }

    let lx = left + plot_w + 24.0;
    let _ = writeln!(
        svg,
        r#"<text x="{lx}" y="{top}" style="font-size:13px;font-weight:bold">Models</text>"#
    );
    for (i, model) in models.iter().enumerate() {
        let y = top + 22.0 + 20.0 * i as f64;
        let _ = writeln!(
            svg,
            r##"<circle cx="{}" cy="{}" r="6" fill="{}" stroke="#222222"/>"##,
            lx + 6.0,
            y - 4.0,
            fill(i).hex()
        );
        let _ = writeln!(
            svg,
            r#"<text class="legend" x="{}" y="{y}" style="font-size:12px">{}</text>"#,
            lx + 18.0,
            escape(model)
        );
    }
    let mut ly = top + 22.0 + 20.0 * models.len() as f64 + 16.0;
    if let Some(size_col) = spec.size {
        let _ = writeln!(
            svg,
            r#"<text x="{lx}" y="{ly}" style="font-size:12px">size: {}</text>"#,
            escape(size_col)
        );
        ly += 22.0;
    }
    if let Some(color_col) = spec.color {
        let _ = writeln!(
            svg,
            r#"<text x="{lx}" y="{ly}" style="font-size:12px">color: {}</text>"#,
            escape(color_col)
        );
        let _ = writeln!(
            svg,
            r#"<defs><linearGradient id="ramp" x1="0" x2="1" y1="0" y2="0">"#
        );
        for k in 0..=4 {
            let t = k as f64 / 4.0;
            let _ = writeln!(
                svg,
                r#"<stop offset="{t}" stop-color="{}"/>"#,
                sequential(t).hex()
            );
        }
        let _ = writeln!(svg, "</linearGradient></defs>");
        let _ = writeln!(
            svg,
            r#"<rect x="{lx}" y="{}" width="120" height="12" fill="url(#ramp)"/>"#,
            ly + 8.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{lx}" y="{}" style="font-size:10px">{cmin:.2}</text>"#,
            ly + 34.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="end" style="font-size:10px">{cmax:.2}</text>"#,
            lx + 120.0,
            ly + 34.0
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
