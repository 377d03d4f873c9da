//! Dual-axis SVG charts of a sweep: rates on the left axis in `[0,1]`,
//! CL on the right axis in multiples of 10⁻⁶.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::sim::{ResultRow, SweepParam};

/// A plottable CSV column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Series {
    Epsilon,
    EpsilonPrime,
    EpsPrimeW0,
    EpsPrimeW1,
    EpsPrimeW2,
    EpsPrimeVsA,
    Discard,
    Cl,
    ClW0,
    ClW1,
    ClW2,
}

impl Series {
    pub fn column(self) -> &'static str {
        match self {
            Series::Epsilon => "epsilon",
            Series::EpsilonPrime => "epsilon_prime",
            Series::EpsPrimeW0 => "eps_prime_w0",
            Series::EpsPrimeW1 => "eps_prime_w1",
            Series::EpsPrimeW2 => "eps_prime_w2",
            Series::EpsPrimeVsA => "eps_prime_vs_eA",
            Series::Discard => "D",
            Series::Cl => "CL",
            Series::ClW0 => "CL_w0",
            Series::ClW1 => "CL_w1",
            Series::ClW2 => "CL_w2",
        }
    }

    fn label(self) -> &'static str {
        match self {
            Series::Epsilon => "ε",
            Series::EpsilonPrime => "ε′",
            Series::EpsPrimeW0 => "ε′ (ω₀)",
            Series::EpsPrimeW1 => "ε′ (ω₁)",
            Series::EpsPrimeW2 => "ε′ (ω₂)",
            Series::EpsPrimeVsA => "ε′ vs e_A",
            Series::Discard => "D",
            Series::Cl => "CL",
            Series::ClW0 => "CL (ω₀)",
            Series::ClW1 => "CL (ω₁)",
            Series::ClW2 => "CL (ω₂)",
        }
    }

    pub fn value(self, row: &ResultRow) -> Option<f64> {
        let m = &row.metrics;
        match self {
            Series::Epsilon => m.epsilon,
            Series::EpsilonPrime => m.epsilon_prime,
            Series::EpsPrimeW0 => m.eps_prime_per_strategy[0],
            Series::EpsPrimeW1 => m.eps_prime_per_strategy[1],
            Series::EpsPrimeW2 => m.eps_prime_per_strategy[2],
            Series::EpsPrimeVsA => m.eps_prime_vs_a,
            Series::Discard => m.discard,
            Series::Cl => m.cl,
            Series::ClW0 => m.cl_per_strategy[0],
            Series::ClW1 => m.cl_per_strategy[1],
            Series::ClW2 => m.cl_per_strategy[2],
        }
    }

    /// Whether the series belongs on the right (CL) axis.
    pub fn is_cl(self) -> bool {
        matches!(self, Series::Cl | Series::ClW0 | Series::ClW1 | Series::ClW2)
    }
}

impl FromStr for Series {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        const ALL: [Series; 11] = [
            Series::Epsilon,
            Series::EpsilonPrime,
            Series::EpsPrimeW0,
            Series::EpsPrimeW1,
            Series::EpsPrimeW2,
            Series::EpsPrimeVsA,
            Series::Discard,
            Series::Cl,
            Series::ClW0,
            Series::ClW1,
            Series::ClW2,
        ];
        ALL.into_iter()
            .find(|c| c.column() == s)
            .ok_or_else(|| Error::invalid(format!("unknown series `{s}`")))
    }
}

const WIDTH: f64 = 820.0;
const HEIGHT: f64 = 520.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 90.0;
const TOP: f64 = 70.0;
const BOTTOM: f64 = 70.0;
const LEFT_COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#9467bd", "#8c564b"];
const RIGHT_COLORS: [&str; 4] = ["#2ca02c", "#ff7f0e", "#17becf", "#7f7f7f"];

/// Finds the single parameter that varies across `rows`.
///
/// Fails when more than one of `n, k, K, L, PA` varies, or when `R` or the
/// border-fix flag differ between rows. With no varying parameter (a
/// single-point sweep) the gauge multiplier `K` is used as abscissa.
pub fn sweep_param(rows: &[ResultRow]) -> Result<SweepParam> {
    let first = rows.first().ok_or_else(|| Error::invalid("no rows to plot"))?;
    if rows.iter().any(|r| r.params.rounds != first.params.rounds || r.params.border_fix != first.params.border_fix) {
        return Err(Error::invalid("rows mix different R or border-fix settings"));
    }
    let varying: Vec<SweepParam> = SweepParam::ALL
        .into_iter()
        .filter(|p| rows.iter().any(|r| p.get(&r.params) != p.get(&first.params)))
        .collect();
    match varying.as_slice() {
        [] => Ok(SweepParam::Gauge),
        [one] => Ok(*one),
        many => Err(Error::invalid(format!(
            "rows come from more than one sweep (varying: {})",
            many.iter().map(|p| p.name()).collect::<Vec<_>>().join(", ")
        ))),
    }
}

fn nice_step(span: f64, target: usize) -> f64 {
    let raw = span / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let step = nice_step(hi - lo, target);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    (first..=last).map(|t| t as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    let s = format!("{:.4}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".to_string() } else { s.to_string() }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn title(rows: &[ResultRow], param: SweepParam, xs: &[f64]) -> String {
    let p = &rows[0].params;
    let mut fixed = Vec::new();
    for q in SweepParam::ALL {
        if q == param || (q == SweepParam::Pa && p.pa == 1) {
            continue;
        }
        fixed.push(format!("{} = {}", q.name(), q.format_value(q.get(p))));
    }
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut t = format!("({}); {} from {} to {}", fixed.join(", "), param.name(), param.format_value(lo), param.format_value(hi));
    if !p.border_fix {
        t.push_str(", no border fix");
    }
    t
}

/// Renders the chart as an SVG document.
pub fn render_svg(rows: &[ResultRow], left: &[Series], right: &[Series]) -> Result<String> {
    let param = sweep_param(rows)?;
    if left.iter().any(|s| s.is_cl()) || right.iter().any(|s| !s.is_cl()) {
        return Err(Error::invalid("rate series go on the left axis, CL series on the right"));
    }
    if left.len() > LEFT_COLORS.len() || right.len() > RIGHT_COLORS.len() {
        return Err(Error::invalid("too many series for one chart"));
    }
    let mut order: Vec<&ResultRow> = rows.iter().collect();
    order.sort_by(|a, b| param.get(&a.params).total_cmp(&param.get(&b.params)));
    let xs: Vec<f64> = order.iter().map(|r| param.get(&r.params)).collect();

    let (mut x_lo, mut x_hi) = (xs[0], xs[xs.len() - 1]);
    if x_hi - x_lo <= 0.0 {
        let pad = if x_lo.abs() > 0.0 { x_lo.abs() * 0.1 } else { 1.0 };
        x_lo -= pad;
        x_hi += pad;
    }
    let cl_max = order
        .iter()
        .flat_map(|r| right.iter().filter_map(|s| s.value(r)))
        .fold(0.0f64, f64::max)
        * 1e6;
    let r_hi = if cl_max > 0.0 {
        let step = nice_step(cl_max, 5);
        (cl_max / step).ceil() * step
    } else {
        1.0
    };

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy_left = |v: f64| TOP + (1.0 - v) * plot_h;
    let sy_right = |v: f64| TOP + (1.0 - v / r_hi) * plot_h;

    let mut svg = String::new();
    let w = &mut svg;
    let _ = writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(w, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(&title(rows, param, &xs))
    );

    // Grid and axes.
    for t in ticks(0.0, 1.0, 5) {
        let y = sy_left(t);
        let _ = writeln!(w, r##"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#e0e0e0"/>"##, LEFT + plot_w);
        let _ = writeln!(w, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 6.0, y + 4.0, tick_label(t));
    }
    for t in ticks(0.0, r_hi, 5) {
        let y = sy_right(t);
        let _ = writeln!(w, r#"<text x="{:.2}" y="{:.2}" text-anchor="start">{}</text>"#, LEFT + plot_w + 6.0, y + 4.0, tick_label(t));
    }
    for t in ticks(x_lo, x_hi, 10) {
        let x = sx(t);
        let _ = writeln!(w, r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#000"/>"##, TOP + plot_h, TOP + plot_h + 5.0);
        let _ = writeln!(w, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, TOP + plot_h + 20.0, tick_label(t));
    }
    let _ = writeln!(
        w,
        r##"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="#000"/>"##
    );
    let _ = writeln!(w, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, LEFT + plot_w / 2.0, HEIGHT - 20.0, param.name());
    let _ = writeln!(
        w,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">ε, ε′</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );
    let rx = WIDTH - 20.0;
    let _ = writeln!(
        w,
        r#"<text x="{rx:.2}" y="{:.2}" text-anchor="middle" transform="rotate(90 {rx:.2} {:.2})">CL (×10⁻⁶)</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    // Series.
    let series = left
        .iter()
        .zip(LEFT_COLORS)
        .map(|(s, c)| (*s, c, false))
        .chain(right.iter().zip(RIGHT_COLORS).map(|(s, c)| (*s, c, true)));
    for (legend_idx, (s, color, on_right)) in series.enumerate() {
        let points: Vec<(f64, f64)> = order
            .iter()
            .zip(&xs)
            .filter_map(|(r, &x)| {
                let v = s.value(r)?;
                Some((sx(x), if on_right { sy_right(v * 1e6) } else { sy_left(v) }))
            })
            .collect();
        let dash = if on_right { r#" stroke-dasharray="6 3""# } else { "" };
        if points.len() > 1 {
            let path: Vec<String> = points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(
                w,
                r#"<polyline class="series" data-column="{}" fill="none" stroke="{color}" stroke-width="2"{dash} points="{}"/>"#,
                s.column(),
                path.join(" ")
            );
        }
        for (x, y) in &points {
            let _ = writeln!(
                w,
                r#"<circle class="marker" data-column="{}" cx="{x:.2}" cy="{y:.2}" r="3.5" fill="{color}"/>"#,
                s.column()
            );
        }
        let lx = LEFT + 10.0 + legend_idx as f64 * 110.0;
        let ly = TOP - 18.0;
        let _ = writeln!(w, r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"{dash}/>"#, lx + 22.0);
        let axis = if on_right { "right" } else { "left" };
        let _ = writeln!(w, r#"<text x="{:.2}" y="{:.2}">{} ({axis})</text>"#, lx + 26.0, ly + 4.0, escape(s.label()));
    }
    let _ = writeln!(w, "</svg>");
    Ok(svg)
}

/// Writes the chart for `rows` to `path`.
pub fn emit_plot(path: &Path, rows: &[ResultRow], left: &[Series], right: &[Series]) -> Result<()> {
    let svg = render_svg(rows, left, right)?;
    std::fs::write(path, svg).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

/// ε and ε′ on the left, CL on the right.
pub const DEFAULT_LEFT: [Series; 2] = [Series::Epsilon, Series::EpsilonPrime];
pub const DEFAULT_RIGHT: [Series; 1] = [Series::Cl];
