//! Self-contained SVG 1.1 rendering of [`ChartData`].

use std::fmt::Write;

use super::chart::{Axis, ChartData, ChartKind, Scale};
use super::format::sig6;

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 10] =
    ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Maps data values to pixels along one axis.
struct Mapper {
    scale: Scale,
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Mapper {
    fn new(scale: Scale, values: impl IntoIterator<Item = f64>, px_lo: f64, px_hi: f64) -> Self {
        let vals: Vec<f64> = values
            .into_iter()
            .filter(|v| v.is_finite() && (scale == Scale::Linear || *v > 0.0))
            .map(|v| if scale == Scale::Log10 { v.log10() } else { v })
            .collect();
        let (mut lo, mut hi) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        match scale {
            Scale::Log10 => {
                lo = lo.floor();
                hi = hi.ceil();
                if hi <= lo {
                    hi = lo + 1.0;
                }
            }
            Scale::Linear => {
                if hi - lo < 1e-12 {
                    let pad = if lo.abs() > 0.0 { lo.abs() * 0.1 } else { 1.0 };
                    lo -= pad;
                    hi += pad;
                } else {
                    let pad = (hi - lo) * 0.05;
                    lo -= pad;
                    hi += pad;
                }
            }
        }
        Mapper { scale, lo, hi, px_lo, px_hi }
    }

    fn map(&self, v: f64) -> f64 {
        let t = match self.scale {
            Scale::Linear => v,
            Scale::Log10 => v.max(f64::MIN_POSITIVE).log10(),
        };
        self.px_lo + (t - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo)
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        match self.scale {
            Scale::Log10 => (self.lo as i32..=self.hi as i32).map(|e| (10f64.powi(e), format!("1e{e}"))).collect(),
            Scale::Linear => {
                let raw = (self.hi - self.lo) / 5.0;
                let mag = 10f64.powf(raw.log10().floor());
                let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
                let first = (self.lo / step).ceil() as i64;
                let last = (self.hi / step).floor() as i64;
                (first..=last)
                    .map(|i| {
                        let v = i as f64 * step;
                        let v = if v.abs() < step * 1e-9 { 0.0 } else { v };
                        (v, sig6(v))
                    })
                    .collect()
            }
        }
    }
}

struct Canvas {
    out: String,
}

impl Canvas {
    fn new(title: &str) -> Self {
        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
        );
        let _ = writeln!(out, "<title>{}</title>", esc(title));
        let _ = writeln!(out, "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>");
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"28\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>",
            (LEFT + WIDTH - RIGHT) / 2.0,
            esc(title)
        );
        Canvas { out }
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, extra: &str) {
        let _ = writeln!(
            self.out,
            "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"{stroke}\"{extra}/>"
        );
    }

    fn text(&mut self, x: f64, y: f64, size: u32, anchor: &str, s: &str) {
        let _ = writeln!(
            self.out,
            "<text x=\"{x:.2}\" y=\"{y:.2}\" font-family=\"sans-serif\" font-size=\"{size}\" text-anchor=\"{anchor}\">{}</text>",
            esc(s)
        );
    }

    fn legend(&mut self, labels: &[(String, &str)]) {
        let x = WIDTH - RIGHT + 20.0;
        for (i, (label, color)) in labels.iter().enumerate() {
            let y = TOP + 10.0 + i as f64 * 20.0;
            let _ = writeln!(
                self.out,
                "<rect x=\"{x:.2}\" y=\"{:.2}\" width=\"12\" height=\"12\" fill=\"{color}\"/>",
                y - 10.0
            );
            self.text(x + 18.0, y, 12, "start", label);
        }
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

fn frame(c: &mut Canvas, d: &ChartData, xm: Option<&Mapper>, ym: &Mapper) {
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    let _ = writeln!(
        c.out,
        "<rect x=\"{x0:.2}\" y=\"{y1:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"#333333\"/>",
        x1 - x0,
        y0 - y1
    );
    for (v, label) in ym.ticks() {
        let y = ym.map(v);
        c.line(x0 - 4.0, y, x0, y, "#333333", "");
        c.line(x0, y, x1, y, "#eeeeee", "");
        c.text(x0 - 6.0, y + 4.0, 11, "end", &label);
    }
    if let Some(xm) = xm {
        for (v, label) in xm.ticks() {
            let x = xm.map(v);
            c.line(x, y0, x, y0 + 4.0, "#333333", "");
            c.text(x, y0 + 18.0, 11, "middle", &label);
        }
    }
    c.text((x0 + x1) / 2.0, HEIGHT - 15.0, 13, "middle", &d.x_label);
    let _ = writeln!(
        c.out,
        "<text x=\"0\" y=\"0\" transform=\"translate(20 {:.2}) rotate(-90)\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{}</text>",
        (y0 + y1) / 2.0,
        esc(&d.y_label)
    );
}

fn scatter(d: &ChartData) -> String {
    let pts = d.series.iter().flat_map(|s| &s.points);
    let th = |axis| d.thresholds.iter().filter(move |t| t.axis == axis).map(|t| t.value);
    let xm = Mapper::new(d.x_scale, pts.clone().map(|p| p.x).chain(th(Axis::X)), LEFT, WIDTH - RIGHT);
    let ym = Mapper::new(d.y_scale, pts.map(|p| p.y).chain(th(Axis::Y)), HEIGHT - BOTTOM, TOP);
    let mut c = Canvas::new(&d.title);
    frame(&mut c, d, Some(&xm), &ym);
    for t in &d.thresholds {
        let dash = " stroke-dasharray=\"6 4\" stroke-width=\"1.5\"";
        match t.axis {
            Axis::X => {
                let x = xm.map(t.value);
                c.line(x, HEIGHT - BOTTOM, x, TOP, "#aa0000", dash);
                if x > (LEFT + WIDTH - RIGHT) / 2.0 {
                    c.text(x - 3.0, TOP + 12.0, 10, "end", &t.label);
                } else {
                    c.text(x + 3.0, TOP + 12.0, 10, "start", &t.label);
                }
            }
            Axis::Y => {
                let y = ym.map(t.value);
                c.line(LEFT, y, WIDTH - RIGHT, y, "#aa0000", dash);
                c.text(WIDTH - RIGHT - 3.0, y - 3.0, 10, "end", &t.label);
            }
        }
    }
    let mut legend = Vec::new();
    for (i, s) in d.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        legend.push((format!("{} ({})", s.label, s.points.len()), color));
        for p in &s.points {
            let _ = writeln!(
                c.out,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"{color}\" fill-opacity=\"0.8\"><title>{}</title></circle>",
                xm.map(p.x),
                ym.map(p.y),
                esc(&p.id)
            );
        }
    }
    c.legend(&legend);
    c.finish()
}

fn boxes(d: &ChartData) -> String {
    let values = d.boxes.iter().flat_map(|b| {
        let s = &b.stats;
        [s.whisker_low, s.whisker_high, s.notch_low, s.notch_high].into_iter().chain(s.outliers.iter().copied())
    });
    let ym = Mapper::new(d.y_scale, values, HEIGHT - BOTTOM, TOP);
    let mut c = Canvas::new(&d.title);
    frame(&mut c, d, None, &ym);
    let slot = (WIDTH - RIGHT - LEFT) / d.boxes.len().max(1) as f64;
    let mut legend = Vec::new();
    for (i, b) in d.boxes.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let s = &b.stats;
        let cx = LEFT + slot * (i as f64 + 0.5);
        let half = (slot * 0.3).min(40.0);
        let (l, r, inset) = (cx - half, cx + half, half * 0.5);
        let y = |v: f64| ym.map(v);
        let outline = [
            (l, y(s.q1)),
            (r, y(s.q1)),
            (r, y(s.notch_low)),
            (r - inset, y(s.median)),
            (r, y(s.notch_high)),
            (r, y(s.q3)),
            (l, y(s.q3)),
            (l, y(s.notch_high)),
            (l + inset, y(s.median)),
            (l, y(s.notch_low)),
        ];
        let points: Vec<String> = outline.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(
            c.out,
            "<polygon points=\"{}\" fill=\"{color}\" fill-opacity=\"0.35\" stroke=\"{color}\"/>",
            points.join(" ")
        );
        c.line(l + inset, y(s.median), r - inset, y(s.median), "#000000", " stroke-width=\"2\"");
        c.line(cx, y(s.q1), cx, y(s.whisker_low), color, "");
        c.line(cx, y(s.q3), cx, y(s.whisker_high), color, "");
        c.line(cx - half / 2.0, y(s.whisker_low), cx + half / 2.0, y(s.whisker_low), color, "");
        c.line(cx - half / 2.0, y(s.whisker_high), cx + half / 2.0, y(s.whisker_high), color, "");
        for o in &s.outliers {
            let _ = writeln!(
                c.out,
                "<circle cx=\"{cx:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"none\" stroke=\"{color}\"/>",
                y(*o)
            );
        }
        c.text(cx, HEIGHT - BOTTOM + 18.0, 11, "middle", &b.label);
        legend.push((format!("{} (n={})", b.label, s.n), color));
    }
    c.legend(&legend);
    c.finish()
}

fn radar(d: &ChartData) -> String {
    let mut c = Canvas::new(&d.title);
    let n = d.axes.len().max(3);
    let (cx, cy) = ((LEFT + WIDTH - RIGHT) / 2.0, (TOP + HEIGHT - BOTTOM) / 2.0 + 10.0);
    let radius = ((HEIGHT - TOP - BOTTOM) / 2.0).min((WIDTH - LEFT - RIGHT) / 2.0) - 10.0;
    let at = |i: f64, r: f64| {
        let a = -std::f64::consts::FRAC_PI_2 + i * std::f64::consts::TAU / n as f64;
        (cx + r * radius * a.cos(), cy + r * radius * a.sin())
    };
    for (k, ring) in [1.0 / 3.0, 2.0 / 3.0, 1.0].into_iter().enumerate() {
        let pts: Vec<String> = (0..n).map(|i| at(i as f64, ring)).map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(c.out, "<polygon points=\"{}\" fill=\"none\" stroke=\"#cccccc\"/>", pts.join(" "));
        let (_, ry) = at(0.0, ring);
        c.text(cx + 4.0, ry + 12.0, 10, "start", &(k + 1).to_string());
    }
    for (i, axis) in d.axes.iter().enumerate() {
        let (x, y) = at(i as f64, 1.0);
        c.line(cx, cy, x, y, "#999999", "");
        let (lx, ly) = at(i as f64, 1.06);
        let dx = lx - cx;
        let anchor = if dx > 1.0 {
            "start"
        } else if dx < -1.0 {
            "end"
        } else {
            "middle"
        };
        let dy = if ly < cy - 1.0 {
            -2.0
        } else if ly > cy + 1.0 {
            12.0
        } else {
            4.0
        };
        c.text(lx, ly + dy, 12, anchor, axis);
    }
    let mut legend = Vec::new();
    for (i, s) in d.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s.points.iter().map(|p| at(p.x, p.y)).map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(
            c.out,
            "<polygon points=\"{}\" fill=\"{color}\" fill-opacity=\"0.15\" stroke=\"{color}\" stroke-width=\"2\"/>",
            pts.join(" ")
        );
        legend.push((s.label.clone(), color));
    }
    c.legend(&legend);
    c.finish()
}

pub fn render_svg(d: &ChartData) -> String {
    match d.kind {
        ChartKind::ScatterThreshold => scatter(d),
        ChartKind::NotchedBox => boxes(d),
        ChartKind::Radar => radar(d),
    }
}
