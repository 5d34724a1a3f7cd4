//! Minimal self-contained SVG charts: lines, grouped bars and stems.
//! Coordinates are printed with two decimals so output is byte-stable.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

pub struct Series<'a> {
    pub name: &'a str,
    pub points: Vec<(f64, f64)>,
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        let widen = |a: f64, b: f64| if b > a { (a, b) } else { (a - 0.5, a + 0.5) };
        let (x0, x1) = widen(x0, x1);
        let (y0, y1) = widen(y0, y1);
        Self { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (W - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        H - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (H - TOP - BOTTOM)
    }
}

fn header(out: &mut String, title: &str, x_label: &str, y_label: &str) {
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{:.2}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n\
         <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>\n\
         <text x=\"16\" y=\"{:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2})\">{}</text>\n",
        W / 2.0,
        escape(title),
        (LEFT + W - RIGHT) / 2.0,
        H - 12.0,
        escape(x_label),
        H / 2.0,
        H / 2.0,
        escape(y_label),
    );
}

fn axes(out: &mut String, f: &Frame, x_ticks: bool) {
    let _ = writeln!(
        out,
        "<path d=\"M{:.2} {:.2} V{:.2} H{:.2}\" stroke=\"black\" fill=\"none\"/>",
        LEFT,
        TOP,
        H - BOTTOM,
        W - RIGHT
    );
    for k in 0..=4 {
        let y = f.y0 + (f.y1 - f.y0) * k as f64 / 4.0;
        let py = f.py(y);
        let _ = writeln!(
            out,
            "<line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{LEFT:.2}\" y2=\"{py:.2}\" stroke=\"black\"/><text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
            LEFT - 4.0,
            LEFT - 6.0,
            py + 4.0,
            tick(y)
        );
        if x_ticks {
            let x = f.x0 + (f.x1 - f.x0) * k as f64 / 4.0;
            let px = f.px(x);
            let _ = writeln!(
                out,
                "<line x1=\"{px:.2}\" y1=\"{:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"black\"/><text x=\"{px:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
                H - BOTTOM,
                H - BOTTOM + 4.0,
                H - BOTTOM + 18.0,
                tick(x)
            );
        }
    }
}

fn tick(v: f64) -> String {
    if v == 0.0 || (v.abs() >= 0.01 && v.abs() < 1e5) {
        let s = format!("{v:.2}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.1e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn legend(out: &mut String, names: &[&str]) {
    for (k, name) in names.iter().enumerate() {
        let y = TOP + 8.0 + 16.0 * k as f64;
        let x = W - RIGHT - 130.0;
        let _ = writeln!(
            out,
            "<rect x=\"{x:.2}\" y=\"{:.2}\" width=\"12\" height=\"10\" fill=\"{}\"/><text x=\"{:.2}\" y=\"{:.2}\">{}</text>",
            y - 9.0,
            PALETTE[k % PALETTE.len()],
            x + 18.0,
            y,
            escape(name)
        );
    }
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series<'_>]) -> String {
    let (x0, x1) = bounds(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (_, y1) = bounds(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let f = Frame::new(
        if x0.is_finite() { x0 } else { 0.0 },
        if x1.is_finite() { x1 } else { 1.0 },
        0.0,
        if y1.is_finite() { y1 * 1.05 } else { 1.0 },
    );
    let mut out = String::new();
    header(&mut out, title, x_label, y_label);
    axes(&mut out, &f, true);
    for (k, s) in series.iter().enumerate() {
        let mut d = String::new();
        for (i, &(x, y)) in s.points.iter().enumerate() {
            let _ = write!(d, "{}{:.2} {:.2}", if i == 0 { "M" } else { " L" }, f.px(x), f.py(y));
        }
        let _ = writeln!(
            out,
            "<path d=\"{d}\" stroke=\"{}\" stroke-width=\"2\" fill=\"none\"/>",
            PALETTE[k % PALETTE.len()]
        );
    }
    legend(&mut out, &series.iter().map(|s| s.name).collect::<Vec<_>>());
    out.push_str("</svg>\n");
    out
}

/// One group of bars per entry of `groups`, one bar per category, values in [0, 1].
pub fn bar_chart(title: &str, y_label: &str, categories: &[&str], groups: &[(String, Vec<f64>)]) -> String {
    let f = Frame::new(0.0, groups.len().max(1) as f64, 0.0, 1.0);
    let mut out = String::new();
    header(&mut out, title, "method", y_label);
    axes(&mut out, &f, false);
    let slot = f.px(1.0) - f.px(0.0);
    let bar = slot * 0.8 / categories.len().max(1) as f64;
    for (g, (name, values)) in groups.iter().enumerate() {
        let base = f.px(g as f64) + slot * 0.1;
        for (c, &v) in values.iter().enumerate() {
            let top = f.py(v.clamp(0.0, 1.0));
            let _ = writeln!(
                out,
                "<rect x=\"{:.2}\" y=\"{top:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\"/>",
                base + bar * c as f64,
                bar * 0.95,
                f.py(0.0) - top,
                PALETTE[c % PALETTE.len()]
            );
        }
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
            f.px(g as f64 + 0.5),
            H - BOTTOM + 18.0,
            escape(name)
        );
    }
    legend(&mut out, categories);
    out.push_str("</svg>\n");
    out
}

/// Stem plot of `(index, value, highlighted)`; highlighted stems use the second color.
pub fn stem_chart(title: &str, x_label: &str, y_label: &str, stems: &[(f64, f64, bool)], names: [&str; 2]) -> String {
    let (x0, x1) = bounds(stems.iter().map(|s| s.0));
    let (lo, hi) = bounds(stems.iter().map(|s| s.1));
    let f = Frame::new(
        if x0.is_finite() { x0 } else { 0.0 },
        if x1.is_finite() { x1 } else { 1.0 },
        lo.min(0.0) * 1.05,
        hi.max(0.0) * 1.05,
    );
    let mut out = String::new();
    header(&mut out, title, x_label, y_label);
    axes(&mut out, &f, true);
    let zero = f.py(0.0);
    for &(x, y, hl) in stems {
        let color = PALETTE[usize::from(hl)];
        let (px, py) = (f.px(x), f.py(y));
        let _ = writeln!(
            out,
            "<line x1=\"{px:.2}\" y1=\"{zero:.2}\" x2=\"{px:.2}\" y2=\"{py:.2}\" stroke=\"{color}\"/><circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"2\" fill=\"{color}\"/>"
        );
    }
    legend(&mut out, &names);
    out.push_str("</svg>\n");
    out
}
