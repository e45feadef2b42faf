use std::fmt::Write as _;
use std::path::Path;

use anyhow::{ensure, Context, Result};

use crate::experiment::{Row, Table};

pub const CSV_HEADER: &str = "scheme,condition,K,snr_db,op_analytic,op_asymptotic,op_mc,mc_ci_low,mc_ci_high,mc_trials,low_confidence";

fn sci(v: f64) -> String {
    format!("{v:e}")
}

fn opt<T>(v: Option<T>, f: impl FnOnce(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

pub fn render_csv(table: &Table) -> String {
    let mut out = String::with_capacity(128 * (table.rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &table.rows {
        let p = r.point;
        let fields = [
            p.scheme.name().to_owned(),
            p.condition.name().to_owned(),
            p.k.to_string(),
            sci(p.snr_db),
            sci(r.op_analytic),
            opt(r.op_asymptotic, sci),
            opt(r.mc, |m| sci(m.p_hat)),
            opt(r.mc, |m| sci(m.ci_low)),
            opt(r.mc, |m| sci(m.ci_high)),
            opt(r.mc, |m| m.trials.to_string()),
            opt(r.mc, |m| m.low_confidence().to_string()),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn emit_csv(table: &Table, path: &Path) -> Result<()> {
    std::fs::write(path, render_csv(table)).with_context(|| format!("writing {}", path.display()))
}

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 540.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 240.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
/// Decades shown below OP = 1 at most.
const MAX_DECADES: f64 = 12.0;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
    "#7f7f7f", "#bcbd22",
];

/// Pixel mapping of the plot area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub x_min: f64,
    pub x_max: f64,
    /// Lowest decade shown, `log10` of OP.
    pub y_min: f64,
    /// Highest decade shown, always `0`.
    pub y_max: f64,
}

impl Frame {
    pub fn plot_width() -> f64 {
        WIDTH - LEFT - RIGHT
    }

    pub fn plot_height() -> f64 {
        HEIGHT - TOP - BOTTOM
    }

    pub fn px(&self, x: f64) -> f64 {
        let span = (self.x_max - self.x_min).max(f64::MIN_POSITIVE);
        LEFT + (x - self.x_min) / span * Self::plot_width()
    }

    /// Pixel row of probability `p`, clipped to the frame.
    pub fn py(&self, p: f64) -> f64 {
        let l = p.log10().clamp(self.y_min, self.y_max);
        TOP + (self.y_max - l) / (self.y_max - self.y_min) * Self::plot_height()
    }

    fn fit(table: &Table) -> Self {
        let xs = table.rows.iter().map(|r| x_of(table, r));
        let (x_min, x_max) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
            (a.min(x), b.max(x))
        });
        let logs: Vec<f64> = table
            .rows
            .iter()
            .flat_map(|r| [Some(r.op_analytic), r.op_asymptotic, r.mc.map(|m| m.p_hat)])
            .flatten()
            .filter(|&p| p > 0.0 && p.is_finite())
            .map(f64::log10)
            .collect();
        let y_max = 0.0;
        let lo = logs.iter().copied().fold(f64::INFINITY, f64::min).floor();
        let y_min = if lo.is_finite() {
            lo.max(y_max - MAX_DECADES)
        } else {
            y_max - 1.0
        };
        Self {
            x_min,
            x_max,
            y_min: y_min.min(y_max - 1.0),
            y_max,
        }
    }
}

fn x_of(table: &Table, r: &Row) -> f64 {
    if table.k_on_x_axis {
        f64::from(r.point.k)
    } else {
        r.point.snr_db
    }
}

/// Curve identity: scheme, condition, and K when K is not on the x axis.
fn curve_key(table: &Table, r: &Row) -> (String, String, Option<u32>) {
    (
        r.point.scheme.name().to_owned(),
        r.point.condition.name().to_owned(),
        (!table.k_on_x_axis).then_some(r.point.k),
    )
}

struct Curve<'a> {
    label: String,
    rows: Vec<&'a Row>,
}

fn curves(table: &Table) -> Vec<Curve<'_>> {
    let mut out: Vec<(_, Curve)> = Vec::new();
    for r in &table.rows {
        let key = curve_key(table, r);
        match out.iter_mut().find(|(k, _)| *k == key) {
            Some((_, c)) => c.rows.push(r),
            None => {
                let label = match key.2 {
                    Some(k) => format!("{} {} K={}", key.0, key.1, k),
                    None => format!("{} {}", key.0, key.1),
                };
                out.push((
                    key,
                    Curve {
                        label,
                        rows: vec![r],
                    },
                ));
            }
        }
    }
    out.into_iter()
        .map(|(_, mut c)| {
            c.rows
                .sort_by(|a, b| x_of(table, a).total_cmp(&x_of(table, b)));
            c
        })
        .collect()
}

/// Number of polylines [`render_svg`] draws: one per analytic curve and
/// one per asymptotic curve.
pub fn line_series_count(table: &Table) -> usize {
    curves(table)
        .iter()
        .map(|c| 1 + usize::from(c.rows.iter().any(|r| r.op_asymptotic.is_some())))
        .sum()
}

fn polyline(out: &mut String, pts: &[(f64, f64)], color: &str, class: &str, dash: bool) {
    let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    let dash = if dash {
        r#" stroke-dasharray="6 4""#
    } else {
        ""
    };
    let _ = writeln!(
        out,
        r#"<polyline class="{class}" fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#,
        coords.join(" ")
    );
}

pub fn render_svg(table: &Table) -> Result<String> {
    ensure!(!table.rows.is_empty(), "nothing to plot");
    let frame = Frame::fit(table);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );

    // axes and decade grid
    let (x0, x1) = (LEFT, LEFT + Frame::plot_width());
    let (y0, y1) = (TOP, TOP + Frame::plot_height());
    let _ = writeln!(
        s,
        r#"<rect class="frame" x="{x0}" y="{y0}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        Frame::plot_width(),
        Frame::plot_height()
    );
    let mut d = frame.y_max as i32;
    while f64::from(d) >= frame.y_min {
        let y = frame.py(10f64.powi(d));
        let _ = writeln!(
            s,
            r##"<line x1="{x0}" y1="{y:.2}" x2="{x1}" y2="{y:.2}" stroke="#dddddd"/><text x="{}" y="{:.2}" text-anchor="end">1e{d}</text>"##,
            x0 - 6.0,
            y + 4.0
        );
        d -= 1;
    }
    let mut xs: Vec<f64> = table.rows.iter().map(|r| x_of(table, r)).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let stride = xs.len().div_ceil(12).max(1);
    for x in xs.iter().step_by(stride) {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{x}</text>"#,
            frame.px(*x),
            y1 + 18.0
        );
    }
    let x_label = if table.k_on_x_axis {
        "number of satellites K"
    } else {
        "SNR (dB)"
    };
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{}" text-anchor="middle">{x_label}</text>"#,
        LEFT + Frame::plot_width() / 2.0,
        HEIGHT - 18.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">outage probability</text>"#,
        TOP + Frame::plot_height() / 2.0,
        TOP + Frame::plot_height() / 2.0
    );

    // series
    let mut legend = Vec::new();
    for (i, c) in curves(table).iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pt = |r: &Row, p: f64| (frame.px(x_of(table, r)), frame.py(p));
        let analytic: Vec<_> = c
            .rows
            .iter()
            .filter(|r| r.op_analytic > 0.0)
            .map(|r| pt(r, r.op_analytic))
            .collect();
        polyline(&mut s, &analytic, color, "analytic", false);
        legend.push((format!("{} analytic", c.label), color, "line"));
        let asym: Vec<_> = c
            .rows
            .iter()
            .filter_map(|r| r.op_asymptotic.filter(|&p| p > 0.0).map(|p| pt(r, p)))
            .collect();
        if c.rows.iter().any(|r| r.op_asymptotic.is_some()) {
            polyline(&mut s, &asym, color, "asymptotic", true);
            legend.push((format!("{} asymptotic", c.label), color, "dash"));
        }
        let mut any_mc = false;
        for r in &c.rows {
            if let Some(m) = r.mc.filter(|m| m.p_hat > 0.0) {
                let (x, y) = pt(r, m.p_hat);
                let _ = writeln!(
                    s,
                    r#"<circle class="mc" cx="{x:.2}" cy="{y:.2}" r="3.5" fill="none" stroke="{color}"/>"#
                );
                any_mc = true;
            }
        }
        if any_mc {
            legend.push((format!("{} simulation", c.label), color, "marker"));
        }
    }

    let lx = x1 + 14.0;
    for (i, (label, color, glyph)) in legend.iter().enumerate() {
        let y = TOP + 10.0 + 16.0 * i as f64;
        match *glyph {
            "marker" => {
                let _ = write!(
                    s,
                    r#"<circle cx="{:.2}" cy="{y:.2}" r="3.5" fill="none" stroke="{color}"/>"#,
                    lx + 11.0
                );
            }
            g => {
                let dash = if g == "dash" {
                    r#" stroke-dasharray="6 4""#
                } else {
                    ""
                };
                let _ = write!(
                    s,
                    r#"<line x1="{lx:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{color}" stroke-width="1.5"{dash}/>"#,
                    lx + 22.0
                );
            }
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}">{label}</text>"#,
            lx + 28.0,
            y + 4.0
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_svg(table: &Table, path: &Path) -> Result<()> {
    let svg = render_svg(table)?;
    std::fs::write(path, svg).with_context(|| format!("writing {}", path.display()))
}
