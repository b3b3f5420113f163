//! Static log-log plot of a report: in-window relative errors against `k`,
//! with every fitted rate drawn as a line.

use std::fmt::Write;

use crate::report::ExperimentReport;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

pub fn render(report: &ExperimentReport) -> String {
    let points: Vec<(f64, f64)> = report
        .rows
        .iter()
        .filter(|r| r.in_window && r.rel_err > 0.0 && r.rel_err.is_finite())
        .map(|r| ((r.k as f64).log10(), r.rel_err.log10()))
        .collect();
    let ks: Vec<f64> = report.config.k_list.iter().map(|k| (*k as f64).log10()).collect();
    let lines: Vec<(&str, [(f64, f64); 2])> = report
        .fits
        .iter()
        .filter(|_| !ks.is_empty())
        .map(|(name, f)| {
            let at = |x: f64| (x, (f.intercept + f.slope * x * std::f64::consts::LN_10) / std::f64::consts::LN_10);
            (name.as_str(), [at(ks[0]), at(ks[ks.len() - 1])])
        })
        .collect();

    let ys = points.iter().map(|p| p.1).chain(lines.iter().flat_map(|l| l.1.map(|p| p.1)));
    let (mut y0, mut y1) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| (a.min(y), b.max(y)));
    if !y0.is_finite() {
        (y0, y1) = (-1.0, 0.0);
    }
    if y1 - y0 < 1e-9 {
        (y0, y1) = (y0 - 0.5, y1 + 0.5);
    }
    let (mut x0, mut x1) = (ks.first().copied().unwrap_or(0.0), ks.last().copied().unwrap_or(1.0));
    if x1 - x0 < 1e-9 {
        (x0, x1) = (x0 - 0.5, x1 + 0.5);
    }
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{m} {t} L{m} {b} L{r} {b}" stroke="black" fill="none"/>"#,
        m = MARGIN,
        t = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">log10 k</text>"#, WIDTH / 2.0, HEIGHT - 15.0);
    let _ = writeln!(s, r#"<text x="15" y="{}" transform="rotate(-90 15 {})" text-anchor="middle">log10 error</text>"#, HEIGHT / 2.0, HEIGHT / 2.0);
    let _ = writeln!(s, r#"<text x="{}" y="25" text-anchor="middle">{:?} ({})</text>"#, WIDTH / 2.0, report.kind, report.config.model);
    for (x, label) in [(x0, x0), (x1, x1)] {
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{label:.2}</text>"#, sx(x), HEIGHT - MARGIN + 16.0);
    }
    for y in [y0, y1] {
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{y:.2}</text>"#, MARGIN - 6.0, sy(y) + 4.0);
    }
    for (x, y) in &points {
        let _ = writeln!(s, r##"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="#555" fill-opacity="0.5"/>"##, sx(*x), sy(*y));
    }
    for (i, (name, [a, b])) in lines.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"/>"#, sx(a.0), sy(a.1), sx(b.0), sy(b.1));
        let slope = report.fits[*name].slope;
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" fill="{color}">{name}: slope {slope:.3}</text>"#, WIDTH - MARGIN - 200.0, MARGIN + 16.0 * (i as f64 + 1.0));
    }
    s.push_str("</svg>\n");
    s
}
