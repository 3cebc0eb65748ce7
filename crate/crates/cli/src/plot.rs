//! Minimal self-contained SVG line/point plots: axes, tick labels, a
//! legend, and the originating config hash embedded in the document
//! metadata. No external references, so the files render anywhere.

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesStyle {
    Line,
    Points,
}

#[derive(Clone, Debug)]
pub struct Series {
    pub label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub style: SeriesStyle,
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 55.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Padded data range; a degenerate (single-value) range is widened so the
/// point sits mid-axis.
fn padded_range(lo: f64, hi: f64) -> (f64, f64) {
    if lo == hi {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        (lo - pad, hi + pad)
    } else {
        let pad = (hi - lo) * 0.05;
        (lo - pad, hi + pad)
    }
}

fn ticks(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect()
}

/// Tick label rounded to four significant digits, in scientific notation
/// outside a comfortable magnitude range.
fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let magnitude = v.abs();
    if !(1e-3..1e5).contains(&magnitude) {
        return format!("{v:.2e}");
    }
    let scale = 10f64.powi(3 - magnitude.log10().floor() as i32);
    let rounded = (v * scale).round() / scale;
    format!("{rounded}")
}

/// Renders the series into a complete SVG document.
///
/// Fails on an empty series list, an empty series, or mismatched x/y
/// lengths. `config_hash` identifies the producing run and is stored in
/// the SVG metadata element.
pub fn emit_plot(
    series: &[Series],
    title: &str,
    x_label: &str,
    y_label: &str,
    config_hash: &str,
) -> Result<String, CliError> {
    if series.is_empty() {
        return Err(CliError::Plot("no series to draw".into()));
    }
    for s in series {
        if s.x.is_empty() {
            return Err(CliError::Plot(format!("series `{}` is empty", s.label)));
        }
        if s.x.len() != s.y.len() {
            return Err(CliError::Plot(format!(
                "series `{}` has {} x values but {} y values",
                s.label,
                s.x.len(),
                s.y.len()
            )));
        }
        if s.x.iter().chain(&s.y).any(|v| !v.is_finite()) {
            return Err(CliError::Plot(format!(
                "series `{}` contains non-finite values",
                s.label
            )));
        }
    }

    let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in series {
        for &v in &s.x {
            x_lo = x_lo.min(v);
            x_hi = x_hi.max(v);
        }
        for &v in &s.y {
            y_lo = y_lo.min(v);
            y_hi = y_hi.max(v);
        }
    }
    let (x_lo, x_hi) = padded_range(x_lo, x_hi);
    let (y_lo, y_hi) = padded_range(y_lo, y_hi);

    let px = |x: f64| MARGIN_L + (x - x_lo) / (x_hi - x_lo) * (WIDTH - MARGIN_L - MARGIN_R);
    let py = |y: f64| HEIGHT - MARGIN_B - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - MARGIN_T - MARGIN_B);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"sans-serif\" font-size=\"13\">\n"
    ));
    svg.push_str(&format!(
        "  <metadata>config-hash: {}</metadata>\n",
        esc(config_hash)
    ));
    svg.push_str("  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n",
        WIDTH / 2.0,
        esc(title)
    ));

    // Axes.
    let (ax0, ax1) = (px(x_lo), px(x_hi));
    let (ay0, ay1) = (py(y_lo), py(y_hi));
    svg.push_str(&format!(
        "  <line x1=\"{ax0}\" y1=\"{ay0}\" x2=\"{ax1}\" y2=\"{ay0}\" stroke=\"black\"/>\n"
    ));
    svg.push_str(&format!(
        "  <line x1=\"{ax0}\" y1=\"{ay0}\" x2=\"{ax0}\" y2=\"{ay1}\" stroke=\"black\"/>\n"
    ));
    for t in ticks(x_lo, x_hi, 6) {
        let x = px(t);
        svg.push_str(&format!(
            "  <line x1=\"{x}\" y1=\"{ay0}\" x2=\"{x}\" y2=\"{}\" stroke=\"black\"/>\n",
            ay0 + 5.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{x}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            ay0 + 20.0,
            tick_label(t)
        ));
    }
    for t in ticks(y_lo, y_hi, 6) {
        let y = py(t);
        svg.push_str(&format!(
            "  <line x1=\"{}\" y1=\"{y}\" x2=\"{ax0}\" y2=\"{y}\" stroke=\"black\"/>\n",
            ax0 - 5.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
            ax0 - 8.0,
            y + 4.0,
            tick_label(t)
        ));
    }
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
        (ax0 + ax1) / 2.0,
        HEIGHT - 12.0,
        esc(x_label)
    ));
    svg.push_str(&format!(
        "  <text x=\"18\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">{}</text>\n",
        (ay0 + ay1) / 2.0,
        (ay0 + ay1) / 2.0,
        esc(y_label)
    ));

    // Data.
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        match s.style {
            SeriesStyle::Line if s.x.len() > 1 => {
                let pts: Vec<String> = s
                    .x
                    .iter()
                    .zip(&s.y)
                    .map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y)))
                    .collect();
                svg.push_str(&format!(
                    "  <polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
                    pts.join(" ")
                ));
            }
            // Single-sample lines and point series render as markers.
            _ => {
                for (&x, &y) in s.x.iter().zip(&s.y) {
                    svg.push_str(&format!(
                        "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>\n",
                        px(x),
                        py(y)
                    ));
                }
            }
        }
    }

    // Legend.
    let lx = WIDTH - MARGIN_R - 180.0;
    let mut ly = MARGIN_T + 10.0;
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        svg.push_str(&format!(
            "  <line x1=\"{lx}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            lx + 24.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\">{}</text>\n",
            lx + 30.0,
            ly + 4.0,
            esc(&s.label)
        ));
        ly += 18.0;
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}
