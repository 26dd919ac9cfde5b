//! SVG line charts of sweep CSV files.

use std::fmt::Write as _;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum PlotError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

fn malformed(line: usize, message: impl Into<String>) -> PlotError {
    PlotError::Malformed { line, message: message.into() }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub variable: String,
    pub labels: Vec<String>,
    pub x: Vec<f64>,
    /// `series[c][i]`, `None` for empty cells.
    pub series: Vec<Vec<Option<f64>>>,
}

/// Parses a sweep CSV. Every row must have the header's width, the first
/// column must be numeric and the others numeric or empty.
pub fn parse_sweep_csv(text: &str) -> Result<Dataset, PlotError> {
    let mut rd = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(text.as_bytes());
    let mut records = rd.records();
    let header = match records.next() {
        None => return Err(malformed(1, "empty file, a header row is required")),
        Some(r) => r.map_err(|e| malformed(1, e.to_string()))?,
    };
    if header.len() < 2 {
        return Err(malformed(1, "header needs the sweep variable and at least one curve"));
    }
    if header.iter().any(|h| h.trim().is_empty()) {
        return Err(malformed(1, "empty column name in header"));
    }
    let width = header.len();
    let mut data = Dataset {
        variable: header[0].to_string(),
        labels: header.iter().skip(1).map(str::to_string).collect(),
        x: Vec::new(),
        series: vec![Vec::new(); width - 1],
    };
    for rec in records {
        let rec = rec.map_err(|e| malformed(e.position().map_or(0, |p| p.line() as usize), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != width {
            return Err(malformed(line, format!("expected {width} fields, found {}", rec.len())));
        }
        let x: f64 = rec[0].trim().parse().map_err(|_| malformed(line, format!("{:?} is not a number", &rec[0])))?;
        if !x.is_finite() {
            return Err(malformed(line, "sweep variable must be finite"));
        }
        data.x.push(x);
        for (c, cell) in rec.iter().skip(1).enumerate() {
            let cell = cell.trim();
            let v = if cell.is_empty() {
                None
            } else {
                Some(cell.parse::<f64>().map_err(|_| malformed(line, format!("{cell:?} is not a number")))?)
            };
            data.series[c].push(v.filter(|v| v.is_finite()));
        }
    }
    if data.x.is_empty() {
        return Err(malformed(2, "no data rows"));
    }
    Ok(data)
}

#[derive(Debug, Clone)]
pub struct PlotOptions {
    pub width: f64,
    pub height: f64,
    pub title: Option<String>,
    pub y_label: Option<String>,
}

impl Default for PlotOptions {
    fn default() -> Self {
        PlotOptions { width: 720.0, height: 480.0, title: None, y_label: None }
    }
}

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

// Round numbers for tick marks.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * span {
        out.push(if t.abs() < 1e-12 * span { 0.0 } else { t });
        t += step;
    }
    out
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        let pad = if lo.abs() > 0.0 { 0.05 * lo.abs() } else { 0.5 };
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}

/// Renders one polyline per curve column. Empty cells split the line.
pub fn render_svg(data: &Dataset, opts: &PlotOptions) -> String {
    let (w, h) = (opts.width, opts.height);
    let (left, right, top, bottom) = (70.0, 170.0, 40.0, 50.0);
    let (pw, ph) = (w - left - right, h - top - bottom);
    let (x0, x1) = range(data.x.iter().copied());
    let (mut y0, mut y1) = range(data.series.iter().flatten().flatten().copied());
    let pad = 0.04 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| top + (y1 - y) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    if let Some(t) = &opts.title {
        let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#, left + pw / 2.0, escape(t));
    }
    let _ = writeln!(s, r##"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##);
    for t in ticks(x0, x1) {
        let x = sx(t);
        let _ = writeln!(s, r##"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="#333"/>"##, top + ph, top + ph + 5.0);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#, top + ph + 18.0, fmt_tick(t));
    }
    for t in ticks(y0, y1) {
        let y = sy(t);
        let _ = writeln!(s, r##"<line x1="{}" y1="{y:.2}" x2="{left}" y2="{y:.2}" stroke="#333"/>"##, left - 5.0);
        let _ = writeln!(s, r##"<line x1="{left}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#ddd"/>"##, left + pw);
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, left - 8.0, y + 4.0, fmt_tick(t));
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        left + pw / 2.0,
        h - 12.0,
        escape(&data.variable)
    );
    if let Some(yl) = &opts.y_label {
        let (cx, cy) = (18.0, top + ph / 2.0);
        let _ = writeln!(
            s,
            r#"<text x="{cx}" y="{cy}" text-anchor="middle" transform="rotate(-90 {cx} {cy})">{}</text>"#,
            escape(yl)
        );
    }
    for (c, (label, ys)) in data.labels.iter().zip(&data.series).enumerate() {
        let colour = PALETTE[c % PALETTE.len()];
        let dash = if c >= PALETTE.len() { r#" stroke-dasharray="6 3""# } else { "" };
        let mut seg: Vec<String> = Vec::new();
        let flush = |seg: &mut Vec<String>, s: &mut String| {
            if seg.len() > 1 {
                let _ = writeln!(
                    s,
                    r#"<polyline fill="none" stroke="{colour}" stroke-width="1.6"{dash} points="{}"/>"#,
                    seg.join(" ")
                );
            } else if let Some(p) = seg.first() {
                let (x, y) = p.split_once(',').unwrap();
                let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="2" fill="{colour}"/>"#);
            }
            seg.clear();
        };
        for (x, y) in data.x.iter().zip(ys) {
            match y {
                Some(y) => seg.push(format!("{:.2},{:.2}", sx(*x), sy(*y))),
                None => flush(&mut seg, &mut s),
            }
        }
        flush(&mut seg, &mut s);
        let ly = top + 10.0 + 16.0 * c as f64;
        let lx = left + pw + 14.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{colour}" stroke-width="2"{dash}/>"#,
            lx + 22.0
        );
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 28.0, ly + 4.0, escape(label));
    }
    s.push_str("</svg>\n");
    s
}

fn fmt_tick(t: f64) -> String {
    let s = format!("{t:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.to_string() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_gaps_and_rejects_ragged_rows() {
        let d = parse_sweep_csv("alpha,a,b\n0,0.5,\n1,0.4,0.3\n").unwrap();
        assert_eq!(d.series[1], vec![None, Some(0.3)]);
        let e = parse_sweep_csv("alpha,a,b\n0,0.5,1\n1,0.4\n").unwrap_err();
        assert_eq!(e, PlotError::Malformed { line: 3, message: "expected 3 fields, found 2".into() });
        assert!(matches!(parse_sweep_csv("alpha,a\n0,abc\n"), Err(PlotError::Malformed { line: 2, .. })));
        assert!(matches!(parse_sweep_csv(""), Err(PlotError::Malformed { line: 1, .. })));
        assert!(matches!(parse_sweep_csv("alpha\n0\n"), Err(PlotError::Malformed { line: 1, .. })));
        assert!(matches!(parse_sweep_csv("alpha,a\n"), Err(PlotError::Malformed { line: 2, .. })));
    }

    #[test]
    fn svg_has_one_line_per_segment() {
        let d = parse_sweep_csv("alpha,a,b\n0,0.5,1\n1,0.4,\n2,0.3,0.7\n3,0.2,0.6\n").unwrap();
        let svg = render_svg(&d, &PlotOptions::default());
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        // curve a unbroken, curve b split into a dot and a two-point line
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches("<circle").count(), 1);
    }

    #[test]
    fn ticks_are_round() {
        assert_eq!(ticks(0.0, 3.0), vec![0.0, 1.0, 2.0, 3.0]);
        assert_eq!(ticks(0.0, 2.0), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    }
}
