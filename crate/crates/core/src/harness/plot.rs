//! Self-contained SVG learning curves.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

use super::read_episode_rewards;

pub const DEFAULT_SMOOTHING_WINDOW: usize = 20;

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 170.0;
const MARGIN_TOP: f64 = 24.0;
const MARGIN_BOTTOM: f64 = 52.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub name: String,
    /// Raw reward of episodes 1, 2, ...
    pub rewards: Vec<f64>,
}

/// Trailing mean over at most `window` values ending at each index.
///
/// Computed as offsets from the window's first value, so a constant stretch
/// averages to exactly that constant.
pub fn moving_average(values: &[f64], window: usize) -> Vec<f64> {
    let window = window.max(1);
    (0..values.len())
        .map(|i| {
            let slice = &values[(i + 1).saturating_sub(window)..=i];
            let base = slice[0];
            base + slice.iter().map(|v| v - base).sum::<f64>() / slice.len() as f64
        })
        .collect()
}

fn polyline(points: &[f64], x_of: impl Fn(usize) -> f64, y_of: impl Fn(f64) -> f64) -> String {
    let mut s = String::new();
    for (i, &v) in points.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{:.2},{:.2}", x_of(i), y_of(v));
    }
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn render_svg(series: &[Series], window: usize) -> String {
    let n_max = series
        .iter()
        .map(|s| s.rewards.len())
        .max()
        .unwrap_or(0)
        .max(2);
    let y_max = series
        .iter()
        .flat_map(|s| s.rewards.iter().copied())
        .fold(1.0f64, f64::max);
    let y_min = series
        .iter()
        .flat_map(|s| s.rewards.iter().copied())
        .fold(0.0f64, f64::min);
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let x_of = |i: usize| MARGIN_LEFT + plot_w * i as f64 / (n_max - 1) as f64;
    let y_of = |v: f64| MARGIN_TOP + plot_h * (1.0 - (v - y_min) / (y_max - y_min));

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let (x0, x1, y0, y1) = (
        MARGIN_LEFT,
        MARGIN_LEFT + plot_w,
        MARGIN_TOP,
        MARGIN_TOP + plot_h,
    );
    let _ = writeln!(
        svg,
        r#"<path d="M{x0},{y0} L{x0},{y1} L{x1},{y1}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    for k in 0..=4 {
        let v = y_min + (y_max - y_min) * k as f64 / 4.0;
        let y = y_of(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{x0}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{v:.2}</text>"##,
            x0 - 4.0,
            x0 - 6.0,
            y + 4.0
        );
    }
    for k in 0..=4 {
        let i = (n_max - 1) * k / 4;
        let x = x_of(i);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{y1}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            y1 + 4.0,
            y1 + 18.0,
            i + 1
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">Episode</text>"#,
        x0 + plot_w / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">Raw episode reward</text>"#,
        y0 + plot_h / 2.0,
        y0 + plot_h / 2.0
    );

    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let smooth = moving_average(&s.rewards, window);
        let _ = writeln!(
            svg,
            r#"<polyline class="raw" fill="none" stroke="{color}" stroke-opacity="0.35" stroke-width="1" points="{}"/>"#,
            polyline(&s.rewards, x_of, y_of)
        );
        let _ = writeln!(
            svg,
            r#"<polyline class="smoothed" fill="none" stroke="{color}" stroke-width="2.5" points="{}"/>"#,
            polyline(&smooth, x_of, y_of)
        );
        let ly = MARGIN_TOP + 10.0 + 20.0 * k as f64;
        let lx = x1 + 16.0;
        let _ = writeln!(
            svg,
            r#"<g class="legend"><line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2.5"/><text x="{:.2}" y="{:.2}">{}</text></g>"#,
            lx + 22.0,
            lx + 28.0,
            ly + 4.0,
            escape(&s.name)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-size="10">moving average, window {window}</text>"#,
        x1 + 16.0,
        MARGIN_TOP + 10.0 + 20.0 * series.len() as f64
    );
    svg.push_str("</svg>\n");
    svg
}

/// Reads each `episodes.csv` and writes one SVG with a raw and a smoothed
/// curve per file, labeled by file stem (or parent directory for files
/// literally named `episodes.csv`).
pub fn plot(csv_paths: &[&Path], out_svg: &Path, window: usize) -> Result<()> {
    if csv_paths.is_empty() {
        return Err(Error::Usage("plot needs at least one episodes.csv".into()));
    }
    let mut series = Vec::with_capacity(csv_paths.len());
    for path in csv_paths {
        let mut rows = read_episode_rewards(path)?;
        rows.sort_by_key(|(e, _)| *e);
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("series");
        let name = if stem == "episodes" {
            path.parent()
                .and_then(|p| p.file_name())
                .and_then(|s| s.to_str())
                .unwrap_or(stem)
        } else {
            stem
        };
        series.push(Series {
            name: name.to_string(),
            rewards: rows.into_iter().map(|(_, r)| r).collect(),
        });
    }
    let svg = render_svg(&series, window);
    if let Some(parent) = out_svg.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(out_svg, svg).map_err(|e| Error::io(out_svg, e))
}
