//! Self-contained SVG plots from scan or spectrum CSV files.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, ValueEnum};

use crate::error::CliError;
use crate::output::emit;

/// Bases of the reference curves `log_b q` drawn on clique plots.
pub const REFERENCE_BASES: [(f64, &str); 4] = [(4.0, "4"), (3.8, "3.8"), (3.501, "3.501"), (2.936, "2.936")];

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 120.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 52.0;
const BINS: usize = 60;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    #[value(name = "spectrum_hist")]
    SpectrumHist,
    #[value(name = "chat_vs_q")]
    ChatVsQ,
    #[value(name = "omega_vs_logq")]
    OmegaVsLogq,
}

#[derive(Args, Clone, Debug)]
pub struct PlotArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub kind: PlotKind,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn parse(bytes: &[u8]) -> Result<Table, CliError> {
        if bytes.iter().all(u8::is_ascii_whitespace) {
            return Ok(Table {
                headers: Vec::new(),
                rows: Vec::new(),
            });
        }
        let mut r = csv::ReaderBuilder::new().from_reader(bytes);
        let headers = r
            .headers()
            .map_err(|e| CliError::BadCsv(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let rows = r
            .records()
            .map(|rec| {
                rec.map(|r| r.iter().map(str::to_string).collect())
                    .map_err(|e| CliError::BadCsv(e.to_string()))
            })
            .collect::<Result<_, _>>()?;
        Ok(Table { headers, rows })
    }

    fn is_empty(&self) -> bool {
        self.headers.is_empty()
    }

    fn column(&self, name: &str) -> Result<Vec<Option<f64>>, CliError> {
        let i = self
            .headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::BadCsv(format!("missing column '{name}'")))?;
        self.rows
            .iter()
            .map(|r| {
                let cell = r.get(i).map(|s| s.trim()).unwrap_or("");
                if cell.is_empty() {
                    Ok(None)
                } else {
                    cell.parse::<f64>()
                        .map(Some)
                        .map_err(|_| CliError::BadCsv(format!("column '{name}': '{cell}' is not a number")))
                }
            })
            .collect()
    }

    fn pairs(&self, x: &str, y: &str) -> Result<Vec<(f64, f64)>, CliError> {
        if self.is_empty() {
            return Ok(Vec::new());
        }
        let xs = self.column(x)?;
        let ys = self.column(y)?;
        Ok(xs
            .into_iter()
            .zip(ys)
            .filter_map(|(a, b)| Some((a?, b?)))
            .filter(|(a, b)| a.is_finite() && b.is_finite())
            .collect())
    }
}

fn num(x: f64) -> String {
    format!("{x:.2}")
}

fn label(x: f64) -> String {
    let s = format!("{:.4}", x);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone) -> Frame {
        let range = |it: &mut dyn Iterator<Item = f64>| {
            let (lo, hi) = it.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
            if !lo.is_finite() {
                (0.0, 1.0)
            } else if lo == hi {
                (lo - 1.0, hi + 1.0)
            } else {
                let pad = 0.05 * (hi - lo);
                (lo - pad, hi + pad)
            }
        };
        let (x0, x1) = range(&mut xs.clone());
        let (y0, y1) = range(&mut ys.clone());
        Frame { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)
    }
}

struct Svg {
    buf: String,
}

impl Svg {
    fn new(title: &str) -> Svg {
        let mut buf = String::new();
        let _ = writeln!(
            buf,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="11">"#,
            w = WIDTH,
            h = HEIGHT
        );
        let _ = writeln!(buf, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            buf,
            r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
            num(WIDTH / 2.0),
            escape(title)
        );
        Svg { buf }
    }

    fn axes(&mut self, f: &Frame, xlabel: &str, ylabel: &str) {
        let (l, r, t, b) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
        let _ = writeln!(
            self.buf,
            r#"<path d="M{} {} L{} {} L{} {}" fill="none" stroke="black"/>"#,
            num(l),
            num(t),
            num(l),
            num(b),
            num(r),
            num(b)
        );
        for i in 0..=4 {
            let x = f.x0 + (f.x1 - f.x0) * i as f64 / 4.0;
            let y = f.y0 + (f.y1 - f.y0) * i as f64 / 4.0;
            let _ = writeln!(
                self.buf,
                r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
                num(f.px(x)),
                num(b + 16.0),
                label(x)
            );
            let _ = writeln!(
                self.buf,
                r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
                num(l - 6.0),
                num(f.py(y) + 4.0),
                label(y)
            );
        }
        let _ = writeln!(
            self.buf,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            num((l + r) / 2.0),
            num(HEIGHT - 12.0),
            escape(xlabel)
        );
        let _ = writeln!(
            self.buf,
            r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            num((t + b) / 2.0),
            num((t + b) / 2.0),
            escape(ylabel)
        );
    }

    fn points(&mut self, f: &Frame, pts: &[(f64, f64)], color: &str) {
        for &(x, y) in pts {
            let _ = writeln!(
                self.buf,
                r#"<circle cx="{}" cy="{}" r="3" fill="{color}"/>"#,
                num(f.px(x)),
                num(f.py(y))
            );
        }
    }

    fn legend(&mut self, row: usize, text: &str, color: &str) {
        let y = TOP + 14.0 * row as f64 + 8.0;
        let x = WIDTH - RIGHT + 10.0;
        let _ = writeln!(
            self.buf,
            r#"<rect x="{}" y="{}" width="10" height="10" fill="{color}"/><text x="{}" y="{}">{}</text>"#,
            num(x),
            num(y - 9.0),
            num(x + 14.0),
            num(y),
            escape(text)
        );
    }

    fn finish(mut self) -> Vec<u8> {
        self.buf.push_str("</svg>\n");
        self.buf.into_bytes()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn spectrum_hist(t: &Table) -> Result<Vec<u8>, CliError> {
    let col = if t.is_empty() || t.headers.iter().any(|h| h == "lambda") {
        "lambda"
    } else {
        "lambda2"
    };
    let values: Vec<f64> = if t.is_empty() {
        Vec::new()
    } else {
        t.column(col)?.into_iter().flatten().filter(|v| v.is_finite()).collect()
    };
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let mut counts = vec![0usize; BINS];
    let (lo, hi) = if lo.is_finite() && hi > lo { (lo, hi) } else { (lo.min(0.0) - 1.0, hi.max(0.0) + 1.0) };
    if lo.is_finite() {
        for &v in &values {
            let i = (((v - lo) / (hi - lo)) * BINS as f64).floor() as usize;
            counts[i.min(BINS - 1)] += 1;
        }
    }
    let maxc = counts.iter().copied().max().unwrap_or(0).max(1) as f64;
    let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (0.0, 1.0) };
    let frame = Frame {
        x0: lo,
        x1: hi,
        y0: 0.0,
        y1: maxc * 1.05,
    };
    let mut svg = Svg::new("eigenvalue histogram");
    svg.axes(&frame, "eigenvalue", "count");
    let w = (hi - lo) / BINS as f64;
    for (i, &c) in counts.iter().enumerate().filter(|(_, &c)| c > 0) {
        let x = lo + i as f64 * w;
        let _ = writeln!(
            svg.buf,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{}"/>"#,
            num(frame.px(x)),
            num(frame.py(c as f64)),
            num(frame.px(x + w) - frame.px(x)),
            num(frame.py(0.0) - frame.py(c as f64)),
            COLORS[0]
        );
    }
    Ok(svg.finish())
}

fn chat_vs_q(t: &Table) -> Result<Vec<u8>, CliError> {
    let a = t.pairs("q", "c_hat_12")?;
    let b = t.pairs("q", "c_hat_34")?;
    let all = || a.iter().chain(&b);
    let frame = Frame::new(
        all().map(|p| p.0),
        all().map(|p| p.1).chain(std::iter::once(0.0)),
    );
    let mut svg = Svg::new("discrepancy constant against q");
    svg.axes(&frame, "q", "c_hat");
    svg.points(&frame, &a, COLORS[0]);
    svg.points(&frame, &b, COLORS[1]);
    svg.legend(0, "theta = 1/2", COLORS[0]);
    svg.legend(1, "theta = 3/4", COLORS[1]);
    Ok(svg.finish())
}

fn omega_vs_logq(t: &Table) -> Result<Vec<u8>, CliError> {
    let pts: Vec<(f64, f64)> = t
        .pairs("q", "omega")?
        .into_iter()
        .filter(|p| p.0 > 1.0)
        .map(|(q, w)| (q.ln(), w))
        .collect();
    let (xlo, xhi) = if pts.is_empty() {
        (1.0, 7.0)
    } else {
        pts.iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)))
    };
    let curve = |x: f64, base: f64| x / base.ln();
    let curve_ys = REFERENCE_BASES.iter().flat_map(|&(b, _)| [curve(xlo, b), curve(xhi, b)]);
    let frame = Frame::new(
        pts.iter().map(|p| p.0).chain([xlo, xhi]),
        pts.iter().map(|p| p.1).chain(curve_ys).chain(std::iter::once(0.0)),
    );
    let mut svg = Svg::new("clique number against ln q");
    svg.axes(&frame, "ln q", "omega");
    for (k, &(base, name)) in REFERENCE_BASES.iter().enumerate() {
        let mut d = String::new();
        for i in 0..=40 {
            let x = xlo + (xhi - xlo) * i as f64 / 40.0;
            let _ = write!(
                d,
                "{}{} {} ",
                if i == 0 { "M" } else { "L" },
                num(frame.px(x)),
                num(frame.py(curve(x, base)))
            );
        }
        let _ = writeln!(
            svg.buf,
            r#"<path d="{}" fill="none" stroke="{}" stroke-dasharray="4 3"/>"#,
            d.trim_end(),
            COLORS[k]
        );
        svg.legend(k, &format!("log_{name} q"), COLORS[k]);
    }
    svg.points(&frame, &pts, "black");
    svg.legend(REFERENCE_BASES.len(), "omega", "black");
    Ok(svg.finish())
}

pub fn render(bytes: &[u8], kind: PlotKind) -> Result<Vec<u8>, CliError> {
    let t = Table::parse(bytes)?;
    match kind {
        PlotKind::SpectrumHist => spectrum_hist(&t),
        PlotKind::ChatVsQ => chat_vs_q(&t),
        PlotKind::OmegaVsLogq => omega_vs_logq(&t),
    }
}

pub fn run(args: &PlotArgs) -> Result<(), CliError> {
    let bytes = std::fs::read(&args.input).map_err(|e| CliError::io(&args.input, e))?;
    let svg = render(&bytes, args.kind)?;
    emit(&svg, args.out.as_deref())
}
