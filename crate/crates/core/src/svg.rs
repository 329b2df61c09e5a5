//! Hand-emitted SVG figures: polylines, axes, and text, no plotting
//! dependencies, byte-deterministic output.

use std::fmt::Write;

const WIDTH: f64 = 460.0;
const HEIGHT: f64 = 360.0;
const MARGIN_LEFT: f64 = 62.0;
const MARGIN_RIGHT: f64 = 18.0;
const MARGIN_TOP: f64 = 34.0;
const MARGIN_BOTTOM: f64 = 52.0;

/// Fixed palette keyed by series order.
pub const PALETTE: [&str; 6] = [
    "#1b6ca8", "#c0392b", "#27845e", "#8e5aa8", "#b07d2b", "#4a4a4a",
];

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

/// Tick label: trims trailing zeros of a 4-decimal rendering.
fn tick_label(v: f64) -> String {
    let mut s = format!("{v:.4}");
    while s.contains('.') && (s.ends_with('0') || s.ends_with('.')) {
        s.pop();
    }
    if s.is_empty() || s == "-" {
        s = "0".into();
    }
    s
}

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

/// One x/y panel with polyline series, optional vertical marker lines,
/// optional identity diagonal, and optional point markers.
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Vertical dashed lines, colored by the matching series when the
    /// index is in range.
    pub vlines: Vec<(String, f64, Option<usize>)>,
    pub identity_diagonal: bool,
    /// Marked points rendered as filled circles.
    pub markers: Vec<(f64, f64, String)>,
}

impl Panel {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        Panel {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            series: Vec::new(),
            vlines: Vec::new(),
            identity_diagonal: false,
            markers: Vec::new(),
        }
    }

    pub fn series(mut self, name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        self.series.push(Series {
            name: name.into(),
            points,
        });
        self
    }

    pub fn vline(mut self, name: impl Into<String>, x: f64, series_color: Option<usize>) -> Self {
        self.vlines.push((name.into(), x, series_color));
        self
    }

    pub fn with_identity(mut self) -> Self {
        self.identity_diagonal = true;
        self
    }

    pub fn marker(mut self, x: f64, y: f64, label: impl Into<String>) -> Self {
        self.markers.push((x, y, label.into()));
        self
    }

    fn data_range(&self) -> ((f64, f64), (f64, f64)) {
        let mut xs: Vec<f64> = Vec::new();
        let mut ys: Vec<f64> = Vec::new();
        for s in &self.series {
            for (x, y) in &s.points {
                xs.push(*x);
                ys.push(*y);
            }
        }
        for (_, x, _) in &self.vlines {
            xs.push(*x);
        }
        for (x, y, _) in &self.markers {
            xs.push(*x);
            ys.push(*y);
        }
        let lo_hi = |vals: &[f64]| -> (f64, f64) {
            let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if !lo.is_finite() || !hi.is_finite() {
                return (0.0, 1.0);
            }
            let pad = ((hi - lo) * 0.05).max(1e-9);
            ((lo - pad).min(0.0_f64.min(lo)), hi + pad)
        };
        let (mut x0, mut x1) = lo_hi(&xs);
        let (mut y0, mut y1) = lo_hi(&ys);
        if self.identity_diagonal {
            let lo = x0.min(y0);
            let hi = x1.max(y1);
            (x0, x1, y0, y1) = (lo, hi, lo, hi);
        }
        ((x0, x1), (y0, y1))
    }

    /// Render the panel at the given origin into `out`.
    fn render(&self, out: &mut String, ox: f64, oy: f64) {
        let ((x0, x1), (y0, y1)) = self.data_range();
        let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        let px = |x: f64| ox + MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w;
        let py = |y: f64| oy + MARGIN_TOP + plot_h - (y - y0) / (y1 - y0) * plot_h;

        let _ = writeln!(
            out,
            r##"<text x="{}" y="{}" text-anchor="middle" font-size="13" font-weight="bold">{}</text>"##,
            fmt(ox + WIDTH / 2.0),
            fmt(oy + 18.0),
            xml_escape(&self.title)
        );

        // frame
        let _ = writeln!(
            out,
            r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#888" stroke-width="1"/>"##,
            fmt(ox + MARGIN_LEFT),
            fmt(oy + MARGIN_TOP),
            fmt(plot_w),
            fmt(plot_h)
        );

        // ticks: 5 per axis
        for i in 0..=4 {
            let xt = x0 + (x1 - x0) * i as f64 / 4.0;
            let yt = y0 + (y1 - y0) * i as f64 / 4.0;
            let _ = writeln!(
                out,
                r##"<line x1="{x}" y1="{b}" x2="{x}" y2="{b2}" stroke="#888"/><text x="{x}" y="{ty}" text-anchor="middle" font-size="10">{lbl}</text>"##,
                x = fmt(px(xt)),
                b = fmt(oy + MARGIN_TOP + plot_h),
                b2 = fmt(oy + MARGIN_TOP + plot_h + 4.0),
                ty = fmt(oy + MARGIN_TOP + plot_h + 16.0),
                lbl = tick_label(xt)
            );
            let _ = writeln!(
                out,
                r##"<line x1="{l2}" y1="{y}" x2="{l}" y2="{y}" stroke="#888"/><text x="{tx}" y="{ty}" text-anchor="end" font-size="10">{lbl}</text>"##,
                l = fmt(ox + MARGIN_LEFT),
                l2 = fmt(ox + MARGIN_LEFT - 4.0),
                y = fmt(py(yt)),
                tx = fmt(ox + MARGIN_LEFT - 7.0),
                ty = fmt(py(yt) + 3.5),
                lbl = tick_label(yt)
            );
        }

        // axis labels
        let _ = writeln!(
            out,
            r##"<text x="{}" y="{}" text-anchor="middle" font-size="11">{}</text>"##,
            fmt(ox + MARGIN_LEFT + plot_w / 2.0),
            fmt(oy + HEIGHT - 14.0),
            xml_escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r##"<text x="{}" y="{}" text-anchor="middle" font-size="11" transform="rotate(-90 {} {})">{}</text>"##,
            fmt(ox + 16.0),
            fmt(oy + MARGIN_TOP + plot_h / 2.0),
            fmt(ox + 16.0),
            fmt(oy + MARGIN_TOP + plot_h / 2.0),
            xml_escape(&self.y_label)
        );

        if self.identity_diagonal {
            let _ = writeln!(
                out,
                r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#999" stroke-dasharray="5,4"/>"##,
                fmt(px(x0.max(y0))),
                fmt(py(x0.max(y0))),
                fmt(px(x1.min(y1))),
                fmt(py(x1.min(y1)))
            );
        }

        for (i, s) in self.series.iter().enumerate() {
            if s.points.is_empty() {
                continue;
            }
            let color = PALETTE[i % PALETTE.len()];
            let path: Vec<String> = s
                .points
                .iter()
                .map(|(x, y)| format!("{},{}", fmt(px(*x)), fmt(py(*y))))
                .collect();
            let _ = writeln!(
                out,
                r##"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.6"/>"##,
                path.join(" ")
            );
            // legend swatch
            let ly = oy + MARGIN_TOP + 14.0 * i as f64 + 6.0;
            let _ = writeln!(
                out,
                r##"<line x1="{x1}" y1="{y}" x2="{x2}" y2="{y}" stroke="{color}" stroke-width="2"/><text x="{tx}" y="{ty}" font-size="10">{name}</text>"##,
                x1 = fmt(ox + MARGIN_LEFT + 8.0),
                x2 = fmt(ox + MARGIN_LEFT + 26.0),
                y = fmt(ly),
                tx = fmt(ox + MARGIN_LEFT + 30.0),
                ty = fmt(ly + 3.5),
                name = xml_escape(&s.name)
            );
        }

        for (name, x, color_idx) in &self.vlines {
            let color = color_idx.map_or("#333", |i| PALETTE[i % PALETTE.len()]);
            let _ = writeln!(
                out,
                r##"<line x1="{x}" y1="{t}" x2="{x}" y2="{b}" stroke="{color}" stroke-dasharray="3,3"/><text x="{tx}" y="{ty}" font-size="9" fill="{color}">{name}</text>"##,
                x = fmt(px(*x)),
                t = fmt(oy + MARGIN_TOP),
                b = fmt(oy + MARGIN_TOP + plot_h),
                tx = fmt(px(*x) + 2.0),
                ty = fmt(oy + MARGIN_TOP + 10.0),
                name = xml_escape(name)
            );
        }

        for (x, y, label) in &self.markers {
            let _ = writeln!(
                out,
                r##"<circle cx="{cx}" cy="{cy}" r="3.5" fill="#111"/><text x="{tx}" y="{ty}" font-size="10">{label}</text>"##,
                cx = fmt(px(*x)),
                cy = fmt(py(*y)),
                tx = fmt(px(*x) + 6.0),
                ty = fmt(py(*y) - 5.0),
                label = xml_escape(label)
            );
        }
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Render panels side by side into a standalone SVG document.
pub fn render_panels(panels: &[Panel]) -> String {
    let total_w = WIDTH * panels.len() as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif">"##,
        w = fmt(total_w),
        h = fmt(HEIGHT)
    );
    let _ = writeln!(out, r##"<rect width="{}" height="{}" fill="white"/>"##, fmt(total_w), fmt(HEIGHT));
    for (i, p) in panels.iter().enumerate() {
        p.render(&mut out, WIDTH * i as f64, 0.0);
    }
    out.push_str("</svg>\n");
    out
}

/// Binned density polyline of `values`, normalized to unit area.
pub fn density_polyline(values: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<(f64, f64)> {
    if values.is_empty() || hi <= lo || bins == 0 {
        return Vec::new();
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for v in values {
        let idx = (((v - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let norm = values.len() as f64 * width;
    counts
        .iter()
        .enumerate()
        .map(|(i, c)| (lo + (i as f64 + 0.5) * width, *c as f64 / norm))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_is_deterministic_and_well_formed() {
        let panel = Panel::new("t", "x", "y")
            .series("a", vec![(0.0, 0.0), (0.5, 0.2), (1.0, 0.9)])
            .vline("cut", 0.4, Some(0))
            .with_identity()
            .marker(0.5, 0.2, "m");
        let a = render_panels(&[panel]);
        let panel2 = Panel::new("t", "x", "y")
            .series("a", vec![(0.0, 0.0), (0.5, 0.2), (1.0, 0.9)])
            .vline("cut", 0.4, Some(0))
            .with_identity()
            .marker(0.5, 0.2, "m");
        let b = render_panels(&[panel2]);
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.ends_with("</svg>\n"));
        assert_eq!(a.matches("<polyline").count(), 1);
    }

    #[test]
    fn density_integrates_to_one() {
        let values: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0).collect();
        let poly = density_polyline(&values, 0.0, 1.0, 20);
        let width = 0.05;
        let mass: f64 = poly.iter().map(|(_, d)| d * width).sum();
        assert!((mass - 1.0).abs() < 1e-9);
    }

    #[test]
    fn escapes_markup_in_labels() {
        let panel = Panel::new("a<b>&c", "x", "y").series("s", vec![(0.0, 0.0), (1.0, 1.0)]);
        let svg = render_panels(&[panel]);
        assert!(svg.contains("a&lt;b&gt;&amp;c"));
    }
}
