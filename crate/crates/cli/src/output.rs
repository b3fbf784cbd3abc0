//! Trace CSV and SVG plot writers.

use std::fmt::Write as _;

use adam3_core::TraceRecord64;

pub const TRACE_HEADER: &str = "k,e_k,grad_norm_sq,R_k";

/// 17 significant digits, scientific notation; empty when absent.
pub fn fmt_value(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.16e}")).unwrap_or_default()
}

/// Renders the trace as CSV with LF line endings.
pub fn trace_csv(trace: &[TraceRecord64]) -> String {
    let mut out = String::with_capacity(64 * (trace.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in trace {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.k,
            fmt_value(r.e_k),
            fmt_value(r.grad_norm_sq),
            fmt_value(r.r_k)
        );
    }
    out
}

const W: f64 = 720.0;
const H: f64 = 420.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 80.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;

struct LogAxis {
    lo: f64,
    hi: f64,
}

impl LogAxis {
    fn fit(values: impl Iterator<Item = f64>) -> Option<Self> {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| *v > 0.0 && v.is_finite()) {
            lo = lo.min(v.log10());
            hi = hi.max(v.log10());
        }
        if !lo.is_finite() {
            return None;
        }
        let (lo, hi) = (lo.floor(), hi.ceil());
        Some(Self { lo, hi: if hi > lo { hi } else { lo + 1.0 } })
    }

    fn y(&self, v: f64) -> f64 {
        let t = (v.log10() - self.lo) / (self.hi - self.lo);
        TOP + (1.0 - t) * (H - TOP - BOTTOM)
    }
}

fn polyline(out: &mut String, pts: &[(f64, f64)], color: &str) {
    if pts.is_empty() {
        return;
    }
    let _ = write!(out, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points=""#);
    for (x, y) in pts {
        let _ = write!(out, "{x:.2},{y:.2} ");
    }
    out.push_str("\"/>\n");
}

type Column = fn(&TraceRecord64) -> Option<f64>;

/// Dual-axis plot: e_k on the left log axis, R_k on the right log axis,
/// both against iteration k. Raw recorded values, no smoothing.
pub fn trace_svg(trace: &[TraceRecord64], title: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    let _ = writeln!(out, r#"<text x="{}" y="18" text-anchor="middle">{}</text>"#, W / 2.0, escape(title));

    let k_max = trace.last().map_or(1.0, |r| r.k as f64).max(1.0);
    let x_of = |k: u64| LEFT + (k as f64 / k_max) * (W - LEFT - RIGHT);
    let _ = writeln!(
        out,
        r#"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - LEFT - RIGHT,
        H - TOP - BOTTOM
    );
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">iteration k</text>"#, W / 2.0, H - 10.0);
    let _ = writeln!(out, r#"<text x="{LEFT}" y="{}" text-anchor="start">0</text>"#, H - BOTTOM + 16.0);
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{k_max}</text>"#, W - RIGHT, H - BOTTOM + 16.0);

    let series: [(&str, &str, bool, Column); 2] = [
        ("e_k", "#1f77b4", true, |r| r.e_k),
        ("R_k", "#d62728", false, |r| r.r_k),
    ];
    for (label, color, left, get) in series {
        let Some(axis) = LogAxis::fit(trace.iter().filter_map(get)) else { continue };
        let pts: Vec<(f64, f64)> = trace
            .iter()
            .filter_map(|r| get(r).filter(|v| *v > 0.0 && v.is_finite()).map(|v| (x_of(r.k), axis.y(v))))
            .collect();
        polyline(&mut out, &pts, color);
        let (x, anchor) = if left { (LEFT - 6.0, "end") } else { (W - RIGHT + 6.0, "start") };
        let mut e = axis.lo;
        while e <= axis.hi {
            let _ = writeln!(
                out,
                r#"<text x="{x}" y="{:.2}" text-anchor="{anchor}" fill="{color}">1e{}</text>"#,
                axis.y(10f64.powf(e)) + 4.0,
                e as i64
            );
            e += 1.0;
        }
        let lx = if left { 16.0 } else { W - 16.0 };
        let _ = writeln!(
            out,
            r#"<text x="{lx}" y="{}" fill="{color}" text-anchor="middle" transform="rotate(-90 {lx} {})">{label}</text>"#,
            H / 2.0,
            H / 2.0
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
