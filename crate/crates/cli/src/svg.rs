//! Static SVG line plots with an optional log-scale y axis.

use std::fmt::Write;

/// Log-scale plots draw values below this at this level.
pub const LOG_FLOOR: f64 = 1e-12;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Series {
            label: label.into(),
            points,
            dashed: false,
        }
    }

    pub fn from_columns(label: impl Into<String>, xs: &[f64], ys: &[f64]) -> Self {
        Series::new(label, xs.iter().copied().zip(ys.iter().copied()).collect())
    }

    pub fn dashed(mut self) -> Self {
        self.dashed = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub y_scale: Scale,
    pub series: Vec<Series>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Tick spacing of 1, 2 or 5 times a power of ten giving about `target` ticks.
fn nice_step(span: f64, target: f64) -> f64 {
    let raw = span / target;
    let mag = 10f64.powf(raw.log10().floor());
    let frac = raw / mag;
    let nice = if frac <= 1.0 {
        1.0
    } else if frac <= 2.0 {
        2.0
    } else if frac <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-3 {
        format!("{v:.0e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

struct Axis {
    lo: f64,
    hi: f64,
    ticks: Vec<(f64, String)>,
}

fn linear_axis(lo: f64, hi: f64) -> Axis {
    let (lo, hi) = if hi - lo > 0.0 {
        (lo, hi)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
        (lo - pad, hi + pad)
    };
    let step = nice_step(hi - lo, 6.0);
    let (lo, hi) = ((lo / step).floor() * step, (hi / step).ceil() * step);
    let count = ((hi - lo) / step).round() as i64;
    let ticks = (0..=count)
        .map(|k| {
            let v = lo + k as f64 * step;
            // snap tiny round-off near zero
            let v = if v.abs() < 1e-9 * step { 0.0 } else { v };
            (v, fmt_tick(v))
        })
        .collect();
    Axis { lo, hi, ticks }
}

/// Axis over decades, in log10 units.
fn log_axis(lo: f64, hi: f64) -> Axis {
    let lo = lo.floor();
    let hi = hi.ceil().max(lo + 1.0);
    let stride = ((hi - lo) / 8.0).ceil().max(1.0) as i64;
    let ticks = (lo as i64..=hi as i64)
        .filter(|e| (e - lo as i64) % stride == 0)
        .map(|e| (e as f64, format!("1e{e}")))
        .collect();
    Axis { lo, hi, ticks }
}

impl Plot {
    pub fn new(
        title: impl Into<String>,
        x_label: impl Into<String>,
        y_label: impl Into<String>,
        y_scale: Scale,
    ) -> Self {
        Plot {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            y_scale,
            series: Vec::new(),
        }
    }

    pub fn with(mut self, s: Series) -> Self {
        self.series.push(s);
        self
    }

    fn transform_y(&self, y: f64) -> Option<f64> {
        if !y.is_finite() {
            return None;
        }
        Some(match self.y_scale {
            Scale::Linear => y,
            Scale::Log => y.max(LOG_FLOOR).log10(),
        })
    }

    pub fn render(&self) -> String {
        let mut xs = (f64::INFINITY, f64::NEG_INFINITY);
        let mut ys = (f64::INFINITY, f64::NEG_INFINITY);
        for s in &self.series {
            for &(x, y) in &s.points {
                if let (true, Some(y)) = (x.is_finite(), self.transform_y(y)) {
                    xs = (xs.0.min(x), xs.1.max(x));
                    ys = (ys.0.min(y), ys.1.max(y));
                }
            }
        }
        if xs.0 > xs.1 {
            xs = (0.0, 1.0);
            ys = (0.0, 1.0);
        }
        let x_axis = linear_axis(xs.0, xs.1);
        let y_axis = match self.y_scale {
            Scale::Linear => linear_axis(ys.0, ys.1),
            Scale::Log => log_axis(ys.0, ys.1),
        };
        let plot_w = WIDTH - LEFT - RIGHT;
        let plot_h = HEIGHT - TOP - BOTTOM;
        let px = |x: f64| LEFT + (x - x_axis.lo) / (x_axis.hi - x_axis.lo) * plot_w;
        let py = |y: f64| TOP + plot_h - (y - y_axis.lo) / (y_axis.hi - y_axis.lo) * plot_h;

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            LEFT + plot_w / 2.0,
            escape(&self.title)
        );
        for (v, label) in &x_axis.ticks {
            let x = px(*v);
            let _ = writeln!(
                out,
                r##"<line x1="{x:.2}" y1="{TOP:.2}" x2="{x:.2}" y2="{:.2}" stroke="#e0e0e0"/>"##,
                TOP + plot_h
            );
            let _ = writeln!(
                out,
                r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                TOP + plot_h + 18.0,
                escape(label)
            );
        }
        for (v, label) in &y_axis.ticks {
            let y = py(*v);
            let _ = writeln!(
                out,
                r##"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#e0e0e0"/>"##,
                LEFT + plot_w
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                LEFT - 6.0,
                y + 4.0,
                escape(label)
            );
        }
        let _ = writeln!(
            out,
            r#"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="black"/>"#
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            LEFT + plot_w / 2.0,
            HEIGHT - 18.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
            TOP + plot_h / 2.0,
            TOP + plot_h / 2.0,
            escape(&self.y_label)
        );

        for (k, s) in self.series.iter().enumerate() {
            let color = COLORS[k % COLORS.len()];
            let dash = if s.dashed { r#" stroke-dasharray="6 4""# } else { "" };
            // non-finite samples split the curve into separate polylines
            let mut segments: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
            for &(x, y) in &s.points {
                match (x.is_finite(), self.transform_y(y)) {
                    (true, Some(y)) => segments.last_mut().unwrap().push((px(x), py(y))),
                    _ => {
                        if !segments.last().unwrap().is_empty() {
                            segments.push(Vec::new());
                        }
                    }
                }
            }
            for seg in segments.iter().filter(|s| !s.is_empty()) {
                let pts: Vec<String> = seg.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                let _ = writeln!(
                    out,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#,
                    pts.join(" ")
                );
            }
            let ly = TOP + 10.0 + 20.0 * k as f64;
            let lx = LEFT + plot_w + 12.0;
            let _ = writeln!(
                out,
                r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"{dash}/>"#,
                lx + 24.0
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
                lx + 30.0,
                ly + 4.0,
                escape(&s.label)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nice_steps() {
        assert_eq!(nice_step(10.0, 5.0), 2.0);
        assert_eq!(nice_step(1.0, 6.0), 0.2);
        assert_eq!(nice_step(70.0, 6.0), 20.0);
    }

    #[test]
    fn log_plot_clamps_zero() {
        let svg = Plot::new("r", "t", "r", Scale::Log)
            .with(Series::new("a", vec![(0.0, 1.0), (1.0, 0.0)]))
            .render();
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("1e-12"));
        assert!(svg.contains("<polyline"));
    }

    #[test]
    fn nan_splits_curve() {
        let svg = Plot::new("r", "t", "r", Scale::Linear)
            .with(Series::new(
                "a",
                vec![(0.0, 1.0), (1.0, 2.0), (2.0, f64::NAN), (3.0, 1.0), (4.0, 0.5)],
            ))
            .render();
        assert_eq!(svg.matches("<polyline").count(), 2);
    }

    #[test]
    fn labels_escaped_and_self_contained() {
        let svg = Plot::new("a<b & c", "t", "y", Scale::Linear)
            .with(Series::new("x>y", vec![(0.0, 0.0), (1.0, 1.0)]))
            .render();
        assert!(svg.contains("a&lt;b &amp; c"));
        assert!(svg.contains("x&gt;y"));
        assert!(!svg.contains("href"));
    }

    #[test]
    fn empty_plot_renders() {
        let svg = Plot::new("e", "t", "y", Scale::Log).render();
        assert!(svg.contains("</svg>"));
        assert!(!svg.contains("NaN"));
    }
}
