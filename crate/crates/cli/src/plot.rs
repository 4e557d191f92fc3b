//! Minimal deterministic SVG line plots.
//!
//! Plot artifacts must be byte-stable across runs and machines, so this
//! renderer avoids anything environment-dependent: coordinates are formatted
//! with fixed precision, fonts are referenced generically rather than
//! embedded, and nothing is timestamped.  The output is static markup — no
//! scripts, no external references.

/// One data series; drawn as a polyline, markers, or both.
pub struct Series<'a> {
    pub label: &'a str,
    pub x: &'a [f64],
    pub y: &'a [f64],
    pub color: &'a str,
    pub line: bool,
    pub markers: bool,
}

/// A single-axes figure.
pub struct Figure<'a> {
    pub title: String,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub log_y: bool,
    pub series: Vec<Series<'a>>,
    /// Vertical guide lines at these x positions.
    pub guides_x: Vec<f64>,
}

pub const PALETTE: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

const W: f64 = 860.0;
const H: f64 = 520.0;
const ML: f64 = 76.0;
const MR: f64 = 24.0;
const MT: f64 = 46.0;
const MB: f64 = 58.0;

/// Smallest decade drawn on a log axis relative to the data maximum.
const LOG_FLOOR_DECADES: f64 = 6.0;

impl<'a> Figure<'a> {
    pub fn new(title: impl Into<String>, x_label: &'a str, y_label: &'a str) -> Figure<'a> {
        Figure {
            title: title.into(),
            x_label,
            y_label,
            log_y: false,
            series: Vec::new(),
            guides_x: Vec::new(),
        }
    }

    pub fn line(mut self, label: &'a str, x: &'a [f64], y: &'a [f64], color: &'a str) -> Self {
        self.series.push(Series { label, x, y, color, line: true, markers: false });
        self
    }

    pub fn scatter(mut self, label: &'a str, x: &'a [f64], y: &'a [f64], color: &'a str) -> Self {
        self.series.push(Series { label, x, y, color, line: false, markers: true });
        self
    }
}

fn fmt2(v: f64) -> String {
    format!("{v:.2}")
}

/// Tick positions and the uniform label precision for a linear axis.
fn nice_ticks(lo: f64, hi: f64) -> (Vec<f64>, usize) {
    let span = (hi - lo).abs().max(f64::MIN_POSITIVE);
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let step = mag
        * if norm < 1.5 {
            1.0
        } else if norm < 3.5 {
            2.0
        } else if norm < 7.5 {
            5.0
        } else {
            10.0
        };
    let decimals = (-(step.log10().floor() as i32)).clamp(0, 6) as usize;
    let first = (lo / step).ceil() * step;
    let mut ticks = Vec::new();
    let mut k = 0;
    loop {
        let t = first + step * k as f64;
        if t > hi + 1e-9 * span {
            break;
        }
        // Snap values that are zero up to rounding so "-0.0" never renders.
        ticks.push(if t.abs() < step * 1e-9 { 0.0 } else { t });
        k += 1;
    }
    (ticks, decimals)
}

struct Bounds {
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
}

fn data_bounds(fig: &Figure) -> Option<Bounds> {
    let mut b: Option<Bounds> = None;
    for s in &fig.series {
        for (&x, &y) in s.x.iter().zip(s.y) {
            let y = if fig.log_y {
                if y > 0.0 {
                    y.log10()
                } else {
                    continue;
                }
            } else {
                y
            };
            if !x.is_finite() || !y.is_finite() {
                continue;
            }
            b = Some(match b {
                None => Bounds { x_lo: x, x_hi: x, y_lo: y, y_hi: y },
                Some(p) => Bounds {
                    x_lo: p.x_lo.min(x),
                    x_hi: p.x_hi.max(x),
                    y_lo: p.y_lo.min(y),
                    y_hi: p.y_hi.max(y),
                },
            });
        }
    }
    let mut b = b?;
    if fig.log_y {
        // Clip empty decades far below the maximum (log plots of counts).
        b.y_lo = b.y_lo.max(b.y_hi - LOG_FLOOR_DECADES);
    }
    let pad = |lo: f64, hi: f64| {
        if hi - lo < 1e-300 {
            (lo - 0.5 - lo.abs() * 0.05, hi + 0.5 + hi.abs() * 0.05)
        } else {
            let p = (hi - lo) * 0.05;
            (lo - p, hi + p)
        }
    };
    (b.x_lo, b.x_hi) = pad(b.x_lo, b.x_hi);
    (b.y_lo, b.y_hi) = pad(b.y_lo, b.y_hi);
    Some(b)
}

/// Renders the figure to a standalone SVG document.
pub fn render(fig: &Figure) -> String {
    let mut out = String::with_capacity(16 * 1024);
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\" font-family=\"Helvetica, Arial, sans-serif\">\n"
    ));
    out.push_str(&format!("<rect width=\"{W}\" height=\"{H}\" fill=\"#ffffff\"/>\n"));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"26\" text-anchor=\"middle\" font-size=\"15\" fill=\"#111\">{}</text>\n",
        fmt2(W / 2.0),
        escape(&fig.title)
    ));

    let Some(b) = data_bounds(fig) else {
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\" \
             fill=\"#666\">no finite samples</text>\n</svg>\n",
            fmt2(W / 2.0),
            fmt2(H / 2.0)
        ));
        return out;
    };

    let sx = |x: f64| ML + (x - b.x_lo) / (b.x_hi - b.x_lo) * (W - ML - MR);
    let sy = |y: f64| H - MB - (y - b.y_lo) / (b.y_hi - b.y_lo) * (H - MT - MB);

    // Grid and ticks.
    let (xticks, xdec) = nice_ticks(b.x_lo, b.x_hi);
    for &t in &xticks {
        let x = fmt2(sx(t));
        out.push_str(&format!(
            "<line x1=\"{x}\" y1=\"{}\" x2=\"{x}\" y2=\"{}\" stroke=\"#e4e4e4\"/>\n",
            fmt2(MT),
            fmt2(H - MB)
        ));
        out.push_str(&format!(
            "<text x=\"{x}\" y=\"{}\" text-anchor=\"middle\" font-size=\"11\" \
             fill=\"#333\">{:.*}</text>\n",
            fmt2(H - MB + 16.0),
            xdec,
            t
        ));
    }
    if fig.log_y {
        let k_lo = b.y_lo.ceil() as i64;
        let k_hi = b.y_hi.floor() as i64;
        for k in k_lo..=k_hi {
            let y = fmt2(sy(k as f64));
            out.push_str(&format!(
                "<line x1=\"{}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"#e4e4e4\"/>\n",
                fmt2(ML),
                fmt2(W - MR)
            ));
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-size=\"11\" \
                 fill=\"#333\">1e{k}</text>\n",
                fmt2(ML - 6.0),
                fmt2(sy(k as f64) + 4.0)
            ));
        }
    } else {
        let (yticks, ydec) = nice_ticks(b.y_lo, b.y_hi);
        for &t in &yticks {
            let y = fmt2(sy(t));
            out.push_str(&format!(
                "<line x1=\"{}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"#e4e4e4\"/>\n",
                fmt2(ML),
                fmt2(W - MR)
            ));
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-size=\"11\" \
                 fill=\"#333\">{:.*}</text>\n",
                fmt2(ML - 6.0),
                fmt2(sy(t) + 4.0),
                ydec,
                t
            ));
        }
    }

    // Guides.
    for &g in &fig.guides_x {
        if g.is_finite() && g >= b.x_lo && g <= b.x_hi {
            let x = fmt2(sx(g));
            out.push_str(&format!(
                "<line x1=\"{x}\" y1=\"{}\" x2=\"{x}\" y2=\"{}\" stroke=\"#888\" \
                 stroke-dasharray=\"5,4\"/>\n",
                fmt2(MT),
                fmt2(H - MB)
            ));
        }
    }

    // Series.
    for s in &fig.series {
        let transform = |y: f64| if fig.log_y { y.log10() } else { y };
        if s.line {
            let mut d = String::new();
            let mut pen_down = false;
            for (&x, &y) in s.x.iter().zip(s.y) {
                let ty = transform(y);
                // Non-finite samples and points under the log floor lift the pen.
                if !x.is_finite() || !ty.is_finite() || ty < b.y_lo {
                    pen_down = false;
                    continue;
                }
                d.push_str(if pen_down { "L" } else { "M" });
                d.push_str(&format!("{},{} ", fmt2(sx(x)), fmt2(sy(ty))));
                pen_down = true;
            }
            if !d.is_empty() {
                out.push_str(&format!(
                    "<path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.6\"/>\n",
                    d.trim_end(),
                    s.color
                ));
            }
        }
        if s.markers {
            for (&x, &y) in s.x.iter().zip(s.y) {
                let ty = transform(y);
                if x.is_finite() && ty.is_finite() && ty >= b.y_lo {
                    out.push_str(&format!(
                        "<circle cx=\"{}\" cy=\"{}\" r=\"2.4\" fill=\"{}\"/>\n",
                        fmt2(sx(x)),
                        fmt2(sy(ty)),
                        s.color
                    ));
                }
            }
        }
    }

    // Frame over the grid.
    out.push_str(&format!(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>\n",
        fmt2(ML),
        fmt2(MT),
        fmt2(W - ML - MR),
        fmt2(H - MT - MB)
    ));

    // Axis labels.
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\" fill=\"#111\">{}</text>\n",
        fmt2((ML + W - MR) / 2.0),
        fmt2(H - 14.0),
        escape(fig.x_label)
    ));
    out.push_str(&format!(
        "<text x=\"20\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\" fill=\"#111\" \
         transform=\"rotate(-90 20 {})\">{}</text>\n",
        fmt2((MT + H - MB) / 2.0),
        fmt2((MT + H - MB) / 2.0),
        escape(fig.y_label)
    ));

    // Legend (only for labelled series).
    let labelled: Vec<&Series> = fig.series.iter().filter(|s| !s.label.is_empty()).collect();
    for (k, s) in labelled.iter().enumerate() {
        let y = MT + 16.0 + 17.0 * k as f64;
        let x0 = W - MR - 170.0;
        if s.line {
            out.push_str(&format!(
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" \
                 stroke-width=\"1.6\"/>\n",
                fmt2(x0),
                fmt2(y - 4.0),
                fmt2(x0 + 20.0),
                fmt2(y - 4.0),
                s.color
            ));
        } else {
            out.push_str(&format!(
                "<circle cx=\"{}\" cy=\"{}\" r=\"2.4\" fill=\"{}\"/>\n",
                fmt2(x0 + 10.0),
                fmt2(y - 4.0),
                s.color
            ));
        }
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"#111\">{}</text>\n",
            fmt2(x0 + 26.0),
            fmt2(y),
            escape(s.label)
        ));
    }

    out.push_str("</svg>\n");
    out
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// `n` evenly spaced samples across `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks_cover_the_range_with_sane_precision() {
        let (ticks, dec) = nice_ticks(0.0, 1.0);
        assert_eq!(dec, 1);
        assert_eq!(ticks.first().copied(), Some(0.0));
        assert!(ticks.len() >= 4 && ticks.len() <= 8);
        let (ticks, _) = nice_ticks(1.45, 1.70);
        assert!(ticks.iter().all(|&t| t > 1.45 - 1e-9 && t < 1.70 + 1e-9));
    }

    #[test]
    fn render_is_deterministic_and_well_formed() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 2.0, 4.0];
        let fig = Figure::new("demo", "x", "y").line("data", &x, &y, PALETTE[0]);
        let a = render(&fig);
        let b = render(&fig);
        assert_eq!(a, b);
        assert!(a.starts_with("<svg "));
        assert!(a.trim_end().ends_with("</svg>"));
        assert!(a.contains("<path "));
        assert!(a.contains(">demo<"));
    }

    #[test]
    fn log_axis_draws_decade_ticks_and_skips_nonpositives() {
        let x = [0.0, 1.0, 2.0];
        let y = [1000.0, 10.0, 0.0];
        let mut fig = Figure::new("d", "t", "counts").scatter("c", &x, &y, PALETTE[1]);
        fig.log_y = true;
        let svg = render(&fig);
        assert!(svg.contains(">1e3<"));
        // Two finite positive markers only.
        assert_eq!(svg.matches("<circle").count() - 1, 2); // minus the legend swatch
    }

    #[test]
    fn empty_series_still_renders_a_document() {
        let fig = Figure::new("none", "x", "y");
        let svg = render(&fig);
        assert!(svg.contains("no finite samples"));
    }
}
