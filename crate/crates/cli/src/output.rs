//! CSV tables and SVG charts of experiment reports.

use nonlocal::experiments::ExperimentReport;
use std::fmt::Write as _;
use std::io;
use std::path::Path;

pub const CSV_HEADER: [&str; 8] = [
    "param",
    "value",
    "reference",
    "abs_err",
    "rel_err",
    "err_est",
    "n_evals",
    "seed",
];

fn empty(report: &ExperimentReport) -> io::Error {
    io::Error::new(
        io::ErrorKind::InvalidInput,
        format!("report `{}` has no rows", report.id),
    )
}

/// The CSV text of a report. Floats use the shortest representation that
/// round-trips, so equal reports give equal bytes.
pub fn csv_string(report: &ExperimentReport) -> io::Result<String> {
    if report.rows.is_empty() {
        return Err(empty(report));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in &report.rows {
        w.write_record([
            num(r.param),
            num(r.value),
            num(r.reference),
            num(r.abs_err()),
            num(r.rel_err()),
            num(r.err_est),
            r.n_evals.to_string(),
            r.seed.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Shortest round-trip text of `x`, in exponent form for very small or
/// large magnitudes.
fn num(x: f64) -> String {
    format!("{x:?}")
}

/// Writes the CSV; an empty report is an error and creates no file.
pub fn emit_csv(report: &ExperimentReport, path: &Path) -> io::Result<()> {
    let text = csv_string(report)?;
    std::fs::write(path, text)
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 64.0;

/// Log-log line chart of abs_err against the parameter. Rows with a
/// nonpositive parameter or error are left out of the line.
pub fn svg_string(report: &ExperimentReport) -> io::Result<String> {
    if report.rows.is_empty() {
        return Err(empty(report));
    }
    let mut pts: Vec<(f64, f64)> = report
        .rows
        .iter()
        .filter(|r| r.param > 0.0 && r.abs_err() > 0.0)
        .map(|r| (r.param.log10(), r.abs_err().log10()))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let span = |v: &mut dyn Iterator<Item = f64>| -> (f64, f64) {
        let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), x| {
            (l.min(x), h.max(x))
        });
        if !lo.is_finite() {
            (-1.0, 1.0)
        } else if hi - lo < 1e-9 {
            (lo.floor() - 0.5, hi.ceil() + 0.5)
        } else {
            (lo.floor(), hi.ceil())
        }
    };
    let (x0, x1) = span(&mut pts.iter().map(|p| p.0));
    let (y0, y1) = span(&mut pts.iter().map(|p| p.1));
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(&report.id)
    );
    let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        s,
        r#"<path d="M{l} {t} L{l} {b} L{r} {b}" fill="none" stroke="black"/>"#
    );
    for k in (x0 as i64)..=(x1 as i64) {
        let x = px(k as f64);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{b}" x2="{x:.2}" y2="{}" stroke="black"/>"#,
            b + 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">1e{k}</text>"#,
            b + 18.0
        );
    }
    for k in (y0 as i64)..=(y1 as i64) {
        let y = py(k as f64);
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{y:.2}" x2="{l}" y2="{y:.2}" stroke="black"/>"#,
            l - 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">1e{k}</text>"#,
            l - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 16.0,
        escape(&report.param_name)
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 18 {})">abs_err</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    if !pts.is_empty() {
        let path: Vec<String> = pts
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| {
                format!(
                    "{}{:.2} {:.2}",
                    if i == 0 { "M" } else { "L" },
                    px(x),
                    py(y)
                )
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<path d="{}" fill="none" stroke="steelblue" stroke-width="2"/>"#,
            path.join(" ")
        );
        for &(x, y) in &pts {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue"/>"#,
                px(x),
                py(y)
            );
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_svg(report: &ExperimentReport, path: &Path) -> io::Result<()> {
    let text = svg_string(report)?;
    std::fs::write(path, text)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// File stem for a report id such as `converge-dc/ball/localizing/identity`.
pub fn file_stem(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '.' {
                c
            } else {
                '_'
            }
        })
        .collect()
}
