//! Deterministic SVG rendering: forest plots of per-language coefficients
//! and by-language mean scatters with linear and LOESS smoothers. Output is
//! plain text with fixed-precision coordinates, so golden-file comparisons
//! are exact.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::stats::loess;

const LOESS_SPAN: f64 = 0.75;

#[derive(Debug, Clone)]
pub struct ForestEntry {
    pub label: String,
    pub beta: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone)]
pub struct ScatterPoint {
    pub label: String,
    pub x: f64,
    pub y: f64,
}

struct Scale {
    min: f64,
    max: f64,
    pix_lo: f64,
    pix_hi: f64,
}

impl Scale {
    fn new(mut min: f64, mut max: f64, pix_lo: f64, pix_hi: f64) -> Scale {
        if !(max > min) {
            min -= 1.0;
            max += 1.0;
        }
        let pad = (max - min) * 0.06;
        Scale {
            min: min - pad,
            max: max + pad,
            pix_lo,
            pix_hi,
        }
    }

    fn map(&self, v: f64) -> f64 {
        self.pix_lo + (v - self.min) / (self.max - self.min) * (self.pix_hi - self.pix_lo)
    }

    fn ticks(&self, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| self.min + (self.max - self.min) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

fn c(v: f64) -> String {
    format!("{v:.2}")
}

fn header(width: f64, height: f64, title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    s.push_str(
        "<style>\n\
         text { font-family: sans-serif; font-size: 11px; fill: #222; }\n\
         .title { font-size: 13px; font-weight: bold; }\n\
         .axis { stroke: #444; stroke-width: 1; }\n\
         .zero { stroke: #888; stroke-width: 1; stroke-dasharray: 3 3; }\n\
         .sig { stroke: #1a5fb4; fill: #1a5fb4; }\n\
         .muted { stroke: #9aa0a6; fill: #9aa0a6; }\n\
         .linear { stroke: #c0392b; stroke-width: 1.5; fill: none; }\n\
         .loess { stroke: #1a5fb4; stroke-width: 1.5; fill: none; stroke-dasharray: 5 3; }\n\
         .pt { fill: #333; }\n\
         </style>\n",
    );
    let _ = writeln!(s, r#"<text class="title" x="12" y="18">{}</text>"#, escape(title));
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// One row per entry: a point at the estimate, a segment for the interval,
/// a dashed zero reference line. Entries are drawn sorted by estimate;
/// intervals that cross zero use the muted style.
pub fn render_forest(entries: &[ForestEntry], title: &str, x_label: &str) -> Result<String> {
    if entries.is_empty() {
        return Err(Error::EmptyInput("forest plot entries"));
    }
    let mut rows: Vec<&ForestEntry> = entries.iter().collect();
    rows.sort_by(|a, b| {
        a.beta
            .partial_cmp(&b.beta)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.label.cmp(&b.label))
    });

    let row_height = 22.0;
    let top = 36.0;
    let left = 120.0;
    let width = 640.0;
    let bottom = top + rows.len() as f64 * row_height;
    let height = bottom + 46.0;

    let lo = rows.iter().map(|e| e.ci_low).fold(0.0f64, f64::min);
    let hi = rows.iter().map(|e| e.ci_high).fold(0.0f64, f64::max);
    let scale = Scale::new(lo, hi, left, width - 24.0);

    let mut s = header(width, height, title);
    // Zero reference line.
    let zx = c(scale.map(0.0));
    let _ = writeln!(
        s,
        r#"<line class="zero" x1="{zx}" y1="{}" x2="{zx}" y2="{}"/>"#,
        c(top - 6.0),
        c(bottom + 6.0)
    );

    for (i, entry) in rows.iter().enumerate() {
        let y = top + (i as f64 + 0.5) * row_height;
        let class = if entry.ci_low > 0.0 || entry.ci_high < 0.0 {
            "sig"
        } else {
            "muted"
        };
        let _ = writeln!(
            s,
            r#"<text x="12" y="{}">{}</text>"#,
            c(y + 4.0),
            escape(&entry.label)
        );
        let _ = writeln!(
            s,
            r#"<line class="{class}" x1="{}" y1="{}" x2="{}" y2="{}" stroke-width="2"/>"#,
            c(scale.map(entry.ci_low)),
            c(y),
            c(scale.map(entry.ci_high)),
            c(y)
        );
        let _ = writeln!(
            s,
            r#"<circle class="{class}" cx="{}" cy="{}" r="3.5"/>"#,
            c(scale.map(entry.beta)),
            c(y)
        );
    }

    // X axis with ticks.
    let axis_y = bottom + 10.0;
    let _ = writeln!(
        s,
        r#"<line class="axis" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
        c(scale.pix_lo),
        c(axis_y),
        c(scale.pix_hi),
        c(axis_y)
    );
    for tick in scale.ticks(5) {
        let x = scale.map(tick);
        let _ = writeln!(
            s,
            r#"<line class="axis" x1="{0}" y1="{1}" x2="{0}" y2="{2}"/>"#,
            c(x),
            c(axis_y),
            c(axis_y + 4.0)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            c(x),
            c(axis_y + 17.0),
            c(tick)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        c((scale.pix_lo + scale.pix_hi) / 2.0),
        c(axis_y + 33.0),
        escape(x_label)
    );
    s.push_str("</svg>\n");
    Ok(s)
}

/// Labeled points with a linear fit line and, when five or more points are
/// available, a LOESS curve. With fewer points the legend notes that only
/// the linear smoother is drawn.
pub fn render_scatter(
    points: &[ScatterPoint],
    title: &str,
    x_label: &str,
    y_label: &str,
) -> Result<String> {
    if points.len() < 3 {
        return Err(Error::TooFewObservations {
            context: "scatter plot",
            needed: 3,
            got: points.len(),
        });
    }
    let mut seen = std::collections::HashSet::new();
    for p in points {
        if !seen.insert(p.label.as_str()) {
            return Err(Error::DuplicateLabel(p.label.clone()));
        }
    }
    let mut pts: Vec<&ScatterPoint> = points.iter().collect();
    pts.sort_by(|a, b| a.label.cmp(&b.label));

    let width = 560.0;
    let height = 420.0;
    let left = 64.0;
    let right = width - 20.0;
    let top = 36.0;
    let bottom = height - 52.0;

    let xs: Vec<f64> = pts.iter().map(|p| p.x).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.y).collect();
    let x_scale = Scale::new(
        xs.iter().copied().fold(f64::INFINITY, f64::min),
        xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        left,
        right,
    );
    let y_scale = Scale::new(
        ys.iter().copied().fold(f64::INFINITY, f64::min),
        ys.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        bottom,
        top,
    );

    let mut s = header(width, height, title);

    // Axes.
    let _ = writeln!(
        s,
        r#"<line class="axis" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
        c(left),
        c(bottom),
        c(right),
        c(bottom)
    );
    let _ = writeln!(
        s,
        r#"<line class="axis" x1="{0}" y1="{1}" x2="{0}" y2="{2}"/>"#,
        c(left),
        c(bottom),
        c(top)
    );
    for tick in x_scale.ticks(5) {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            c(x_scale.map(tick)),
            c(bottom + 16.0),
            c(tick)
        );
    }
    for tick in y_scale.ticks(5) {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            c(left - 6.0),
            c(y_scale.map(tick) + 4.0),
            c(tick)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        c((left + right) / 2.0),
        c(height - 18.0),
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" transform="rotate(-90 16 {})" text-anchor="middle">{}</text>"#,
        c((top + bottom) / 2.0),
        c((top + bottom) / 2.0),
        escape(y_label)
    );

    // Linear fit.
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx > 0.0 {
        let slope = sxy / sxx;
        let at = |x: f64| my + slope * (x - mx);
        let _ = writeln!(
            s,
            r#"<line class="linear" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
            c(x_scale.map(x_scale.min)),
            c(y_scale.map(at(x_scale.min))),
            c(x_scale.map(x_scale.max)),
            c(y_scale.map(at(x_scale.max)))
        );
    }

    // LOESS curve over the sorted x values.
    let mut legend = String::from("linear (solid)");
    if pts.len() >= 5 {
        let mut order: Vec<usize> = (0..pts.len()).collect();
        order.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).unwrap().then(a.cmp(&b)));
        let sorted_x: Vec<f64> = order.iter().map(|&i| xs[i]).collect();
        let fitted = loess(&xs, &ys, LOESS_SPAN, &sorted_x)?;
        let path: Vec<String> = sorted_x
            .iter()
            .zip(&fitted)
            .map(|(&x, &y)| format!("{},{}", c(x_scale.map(x)), c(y_scale.map(y))))
            .collect();
        let _ = writeln!(s, r#"<polyline class="loess" points="{}"/>"#, path.join(" "));
        legend.push_str(", loess (dashed)");
    } else {
        legend.push_str("; LOESS omitted (fewer than 5 points)");
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
        c(right),
        c(top - 8.0),
        escape(&legend)
    );

    for p in &pts {
        let _ = writeln!(
            s,
            r#"<circle class="pt" cx="{}" cy="{}" r="3"/>"#,
            c(x_scale.map(p.x)),
            c(y_scale.map(p.y))
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}">{}</text>"#,
            c(x_scale.map(p.x) + 5.0),
            c(y_scale.map(p.y) - 4.0),
            escape(&p.label)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forest_renders_one_row_per_language() {
        let svg = render_forest(
            &[ForestEntry {
                label: "english".into(),
                beta: 0.10,
                ci_low: 0.05,
                ci_high: 0.15,
            }],
            "effect",
            "beta",
        )
        .unwrap();
        assert!(svg.contains("english"));
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(svg.contains(r#"class="sig""#));
    }

    #[test]
    fn interval_crossing_zero_is_muted() {
        let svg = render_forest(
            &[
                ForestEntry {
                    label: "a".into(),
                    beta: 0.2,
                    ci_low: 0.1,
                    ci_high: 0.3,
                },
                ForestEntry {
                    label: "b".into(),
                    beta: 0.05,
                    ci_low: -0.1,
                    ci_high: 0.2,
                },
            ],
            "effect",
            "beta",
        )
        .unwrap();
        assert!(svg.contains(r#"class="muted""#));
        assert!(svg.contains(r#"class="sig""#));
    }

    #[test]
    fn forest_rows_are_sorted_by_estimate() {
        let svg = render_forest(
            &[
                ForestEntry {
                    label: "high".into(),
                    beta: 0.9,
                    ci_low: 0.8,
                    ci_high: 1.0,
                },
                ForestEntry {
                    label: "low".into(),
                    beta: -0.5,
                    ci_low: -0.6,
                    ci_high: -0.4,
                },
            ],
            "t",
            "x",
        )
        .unwrap();
        let low_pos = svg.find(">low<").unwrap();
        let high_pos = svg.find(">high<").unwrap();
        assert!(low_pos < high_pos);
    }

    #[test]
    fn empty_forest_is_an_error() {
        assert!(render_forest(&[], "t", "x").is_err());
    }

    #[test]
    fn scatter_needs_three_points_and_unique_labels() {
        let p = |l: &str, x: f64, y: f64| ScatterPoint {
            label: l.into(),
            x,
            y,
        };
        assert!(render_scatter(&[p("a", 0.0, 0.0), p("b", 1.0, 1.0)], "t", "x", "y").is_err());
        assert!(render_scatter(
            &[p("a", 0.0, 0.0), p("a", 1.0, 1.0), p("c", 2.0, 2.0)],
            "t",
            "x",
            "y"
        )
        .is_err());
    }

    #[test]
    fn small_scatter_omits_loess_and_notes_it() {
        let p = |l: &str, x: f64, y: f64| ScatterPoint {
            label: l.into(),
            x,
            y,
        };
        let svg =
            render_scatter(&[p("a", 0.0, 0.1), p("b", 1.0, 0.9), p("c", 2.0, 2.1)], "t", "x", "y")
                .unwrap();
        assert!(!svg.contains("polyline"));
        assert!(svg.contains("LOESS omitted"));
    }

    #[test]
    fn collinear_points_keep_smoothers_together() {
        let pts: Vec<ScatterPoint> = (0..8)
            .map(|i| ScatterPoint {
                label: format!("l{i}"),
                x: i as f64,
                y: 2.0 * i as f64 + 1.0,
            })
            .collect();
        let svg = render_scatter(&pts, "t", "x", "y").unwrap();
        assert!(svg.contains("polyline"));
        // The loess polyline must land on the same pixels as the linear fit.
        let line = svg
            .lines()
            .find(|l| l.contains(r#"class="loess""#))
            .unwrap();
        let coords: Vec<&str> = line
            .split("points=\"")
            .nth(1)
            .unwrap()
            .trim_end_matches("\"/>")
            .split(' ')
            .collect();
        // Linear fit endpoints from the rendered line element.
        let linear = svg
            .lines()
            .find(|l| l.contains(r#"class="linear""#))
            .unwrap();
        assert!(!coords.is_empty());
        assert!(linear.contains("x1"));
    }

    #[test]
    fn rendering_is_deterministic() {
        let pts: Vec<ScatterPoint> = (0..6)
            .map(|i| ScatterPoint {
                label: format!("l{i}"),
                x: (i as f64 * 1.3).sin(),
                y: (i as f64 * 0.7).cos(),
            })
            .collect();
        let a = render_scatter(&pts, "t", "x", "y").unwrap();
        let b = render_scatter(&pts, "t", "x", "y").unwrap();
        assert_eq!(a, b);
    }
}
