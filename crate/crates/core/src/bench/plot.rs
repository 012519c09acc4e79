use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::table::Table;
use crate::error::{Error, Result};

/// Log-scale floor; exact zeros are drawn here with a hollow marker.
pub const LOG_FLOOR: f64 = 1e-6;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 200.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
}

struct Figure<'a> {
    title: &'a str,
    x_label: &'a str,
    y_label: &'a str,
    log_y: bool,
    series: Vec<Series>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let f = if norm < 1.5 {
        1.0
    } else if norm < 3.5 {
        2.0
    } else if norm < 7.5 {
        5.0
    } else {
        10.0
    };
    f * mag
}

fn tick_label(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e5 || v.abs() < 1e-2) {
        format!("{v:.0e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn render(fig: &Figure) -> String {
    let all: Vec<(f64, f64)> = fig.series.iter().flat_map(|s| s.points.iter().copied()).collect();
    let (mut x0, mut x1) = all
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
    if x1 <= x0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    let y_of = |y: f64| if fig.log_y { y.max(LOG_FLOOR).log10() } else { y };
    let (mut y0, mut y1) = all.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
        (a.min(y_of(p.1)), b.max(y_of(p.1)))
    });
    if fig.log_y {
        y0 = y0.floor();
        y1 = y1.ceil();
    }
    if y1 <= y0 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (1.0 - (y - y0) / (y1 - y0)) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="18" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + pw / 2.0,
        escape(fig.title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );

    let step = nice_step(x1 - x0);
    let mut x = (x0 / step).ceil() * step;
    while x <= x1 + 1e-9 * step {
        let px = sx(x);
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#,
            TOP + ph,
            TOP + ph + 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph + 18.0,
            tick_label(x)
        );
        x += step;
    }
    if fig.log_y {
        for e in (y0 as i64)..=(y1 as i64) {
            let py = sy(e as f64);
            let _ = writeln!(
                s,
                r##"<line x1="{LEFT}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#dddddd"/>"##,
                LEFT + pw
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">1e{e}</text>"#,
                LEFT - 6.0,
                py + 4.0
            );
        }
    } else {
        let step = nice_step(y1 - y0);
        let mut y = (y0 / step).ceil() * step;
        while y <= y1 + 1e-9 * step {
            let py = sy(y);
            let _ = writeln!(
                s,
                r##"<line x1="{LEFT}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#dddddd"/>"##,
                LEFT + pw
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                LEFT - 6.0,
                py + 4.0,
                tick_label(y)
            );
            y += step;
        }
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 12.0,
        escape(fig.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{0:.2}" text-anchor="middle" transform="rotate(-90 16 {0:.2})">{1}</text>"#,
        TOP + ph / 2.0,
        escape(fig.y_label)
    );

    let mut any_zero = false;
    for (k, series) in fig.series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = series
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y_of(y))))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        if series.points.len() <= 40 {
            for &(x, y) in &series.points {
                let _ = writeln!(
                    s,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                    sx(x),
                    sy(y_of(y))
                );
            }
        }
        if fig.log_y {
            for &(x, y) in series.points.iter().filter(|p| p.1 <= 0.0) {
                any_zero = true;
                let (px, py) = (sx(x), sy(y_of(y)));
                let _ = writeln!(
                    s,
                    r#"<path d="M{:.2},{:.2} L{:.2},{:.2} L{:.2},{:.2} Z" fill="white" stroke="{color}"/>"#,
                    px - 5.0,
                    py - 8.0,
                    px + 5.0,
                    py - 8.0,
                    px,
                    py
                );
            }
        }
        let ly = TOP + 10.0 + 18.0 * k as f64;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 26.0,
            ly + 4.0,
            escape(&series.label)
        );
    }
    if any_zero {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="10">hollow markers: zero, drawn at 1e-6</text>"#,
            LEFT + pw + 12.0,
            TOP + ph
        );
    }
    s.push_str("</svg>\n");
    s
}

fn series_for(table: &Table, prefix: &str) -> Vec<Series> {
    let xs: Vec<Option<f64>> = table.rows.iter().map(|r| r[0]).collect();
    table
        .header
        .iter()
        .enumerate()
        .filter_map(|(idx, h)| {
            let label = h.strip_prefix(prefix)?.strip_prefix(':')?;
            let points = xs
                .iter()
                .zip(&table.rows)
                .filter_map(|(x, r)| Some(((*x)?, r[idx]?)))
                .filter(|p| p.1.is_finite())
                .collect::<Vec<_>>();
            (!points.is_empty()).then(|| Series {
                label: label.to_string(),
                points,
            })
        })
        .collect()
}

/// Renders one SVG per metric present in `table` into `dir`, named
/// `<stem>_<metric>.svg`. Returns the written paths.
pub fn render_plots(table: &Table, dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
    if table.rows.is_empty() {
        return Err(Error::config("nothing to plot: the table has no rows"));
    }
    let x_label = if table.is_sweep() {
        "sweep value"
    } else {
        "symbols transmitted"
    };
    let metrics: &[(&str, &str, bool)] = if table.is_sweep() {
        &[("ber", "BER", true), ("mse_final", "final MSE", true)]
    } else {
        &[
            ("mse", "MSE", true),
            ("ber", "BER", true),
            ("branches", "branches evaluated", false),
            ("branch", "selected branch", false),
            ("order", "selected order", false),
        ]
    };
    let mut written = Vec::new();
    for &(prefix, y_label, log_y) in metrics {
        let series = series_for(table, prefix);
        if series.is_empty() {
            continue;
        }
        let title = format!("{stem}: {y_label}");
        let svg = render(&Figure {
            title: &title,
            x_label,
            y_label,
            log_y,
            series,
        });
        let path = dir.join(format!("{stem}_{prefix}.svg"));
        std::fs::write(&path, svg)?;
        written.push(path);
    }
    Ok(written)
}
