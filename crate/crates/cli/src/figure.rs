//! Figure data and its JSON, CSV and SVG renderings.
//!
//! Three figures:
//! - `cn`: the quotient as a plane with vertical slits `x_k + yi`, `y <= 0`,
//!   the shaded band `[b_n, c_n]` below the real axis (`n > 2`) and the strip
//!   `0 < Im w < pi` shared by all charts;
//! - `psi`: images under `psi_k` of vertical lines of the strip in `H_0`;
//! - `chi`: images under `chi_n` of grid lines of each `H_k`, with the removed
//!   points of `CP^1` and the two punctures of every sheet.
//!
//! Curve samples keep their source point so the data can be re-substituted.

use std::f64::consts::PI;
use std::fmt::Write as _;

use clap::ValueEnum;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use kronecker_stab::atlas::psi_k;
use kronecker_stab::ksequence::{a_seq, ratio_limits, slit_params};
use kronecker_stab::projective::{chi, normalize_integer_point, ray_point_exact};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureKind {
    Cn,
    Psi,
    Chi,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderSpec {
    pub n: u32,
    pub figure: FigureKind,
    pub charts: i64,
    /// (vertical lines, samples per line)
    pub grid: (usize, usize),
    pub slit_kmax: i64,
}

impl RenderSpec {
    pub fn check(&self) -> Result<(), CliError> {
        if self.n == 0 {
            return Err(CliError::Usage("n must be at least 1".into()));
        }
        if self.grid.0 < 2 || self.grid.1 < 2 {
            return Err(CliError::Usage("grid counts must be at least 2".into()));
        }
        if self.charts < 1 || self.slit_kmax < 1 {
            return Err(CliError::Usage("chart and slit ranges must be at least 1".into()));
        }
        Ok(())
    }

    fn chart_list(&self, with_zero: bool) -> Vec<i64> {
        if self.n == 1 {
            (0..3).filter(|&k| with_zero || k != 0).collect()
        } else {
            (-self.charts..=self.charts).filter(|&k| with_zero || k != 0).collect()
        }
    }
}

/// Vertical half-line `x + yi`, `y <= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slit {
    /// `None` for the single slit of `n = 1`.
    pub k: Option<i64>,
    pub x: f64,
}

/// A removed point `[z0 : z1]` of `CP^1` with integer coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Puncture {
    pub label: String,
    pub z0: f64,
    pub z1: f64,
}

/// A sheet `H_k` of `chi_n` and the two points it wraps around.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sheet {
    pub chart: i64,
    pub punctures: [Puncture; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    /// `w` in the source chart.
    pub source: [f64; 2],
    /// `psi_k(w)` for the `psi` figure, `z1 / z0` for the `chi` figure (`None` at infinity).
    pub image: Option<[f64; 2]>,
    /// `chi_n(w)` as a unit vector `[[re0, im0], [re1, im1]]` (`chi` figure only).
    pub point: Option<[[f64; 2]; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    /// Chart holding the source points.
    pub source_chart: i64,
    /// Chart holding the images (`psi`) or the sheet (`chi`).
    pub chart: i64,
    /// `re` for a line `Re w = param`, `im` for a line `Im w = param`.
    pub direction: String,
    pub param: f64,
    pub samples: Vec<CurveSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figure {
    pub n: u32,
    pub figure: FigureKind,
    /// The strip shared by all charts, `[0, pi]`.
    pub strip: [f64; 2],
    pub slits: Vec<Slit>,
    /// `[b_n, c_n]`, present for `n > 2` in the `cn` figure.
    pub band: Option<[f64; 2]>,
    /// Removed points of `CP^1` (`chi` figure).
    pub punctures: Vec<Puncture>,
    /// `[1 : lambda]` with `lambda` in this interval is removed (`chi`, `n > 2`).
    pub removed_band: Option<[f64; 2]>,
    pub sheets: Vec<Sheet>,
    pub curves: Vec<Curve>,
}

fn puncture(x: (num_bigint::BigInt, num_bigint::BigInt)) -> Puncture {
    let (a, b) = normalize_integer_point(x);
    Puncture {
        label: format!("[{a}:{b}]"),
        z0: bigint_f64(&a),
        z1: bigint_f64(&b),
    }
}

fn bigint_f64(x: &num_bigint::BigInt) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

fn real_puncture(label: String, z0: f64, z1: f64) -> Puncture {
    Puncture { label, z0, z1 }
}

/// Evenly spaced values in `[lo, hi]`.
fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Interior midpoints of `count` equal cells of `(lo, hi)`.
fn midpoints(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| lo + (hi - lo) * (i as f64 + 0.5) / count as f64)
        .collect()
}

const RE_RANGE: (f64, f64) = (-3.0, 3.0);

pub fn build(spec: &RenderSpec) -> Result<Figure, CliError> {
    spec.check()?;
    let mut fig = Figure {
        n: spec.n,
        figure: spec.figure,
        strip: [0.0, PI],
        slits: Vec::new(),
        band: None,
        punctures: Vec::new(),
        removed_band: None,
        sheets: Vec::new(),
        curves: Vec::new(),
    };
    match spec.figure {
        FigureKind::Cn => cn_figure(spec, &mut fig)?,
        FigureKind::Psi => psi_figure(spec, &mut fig)?,
        FigureKind::Chi => chi_figure(spec, &mut fig)?,
    }
    Ok(fig)
}

fn cn_figure(spec: &RenderSpec, fig: &mut Figure) -> Result<(), CliError> {
    if spec.n == 1 {
        fig.slits.push(Slit { k: None, x: 0.0 });
        return Ok(());
    }
    let params = slit_params(spec.n, spec.slit_kmax)?;
    fig.slits = params.x.iter().map(|(&k, &x)| Slit { k: Some(k), x }).collect();
    if let (Some(b), Some(c)) = (params.b, params.c) {
        fig.band = Some([b, c]);
    }
    Ok(())
}

fn psi_figure(spec: &RenderSpec, fig: &mut Figure) -> Result<(), CliError> {
    let (lines, per_line) = spec.grid;
    for k in spec.chart_list(false) {
        for x in linspace(RE_RANGE.0, RE_RANGE.1, lines) {
            let mut samples = Vec::with_capacity(per_line);
            for y in midpoints(0.0, PI, per_line) {
                let w = Complex64::new(x, y);
                // near the seams the image can round onto the strip boundary
                let Ok(image) = psi_k(spec.n, k, w) else { continue };
                samples.push(CurveSample {
                    source: [w.re, w.im],
                    image: Some([image.re, image.im]),
                    point: None,
                });
            }
            fig.curves.push(Curve {
                source_chart: 0,
                chart: k,
                direction: "re".into(),
                param: x,
                samples,
            });
        }
    }
    Ok(())
}

fn chi_figure(spec: &RenderSpec, fig: &mut Figure) -> Result<(), CliError> {
    let n = spec.n;
    // removed points
    if n == 1 {
        for (a, b) in [(0, 1), (1, 0), (1, 1)] {
            fig.punctures.push(real_puncture(format!("[{a}:{b}]"), f64::from(a), f64::from(b)));
        }
    } else {
        let mut seen = std::collections::BTreeSet::new();
        for k in -spec.slit_kmax..=spec.slit_kmax {
            let p = puncture(ray_point_exact(n, k));
            if seen.insert(p.label.clone()) {
                fig.punctures.push(p);
            }
        }
        if n == 2 {
            fig.punctures.push(real_puncture("[1:1]".into(), 1.0, 1.0));
        } else {
            let (lo, hi) = ratio_limits(n)?;
            fig.removed_band = Some([lo, hi]);
        }
    }
    let (lines, per_line) = spec.grid;
    for k in spec.chart_list(true) {
        // G^{-k} [1:0] = [a_{k+1} : a_k] and G^{-k} [0:1] = [a_k : a_{k-1}]
        let first = puncture((a_seq(n, k + 1), a_seq(n, k)));
        let second = puncture((a_seq(n, k), a_seq(n, k - 1)));
        fig.sheets.push(Sheet {
            chart: k,
            punctures: [first, second],
        });
        let mut push_curve = |direction: &str, param: f64, ws: Vec<Complex64>| -> Result<(), CliError> {
            let mut samples = Vec::with_capacity(ws.len());
            for w in ws {
                let p = chi(n, k, w)?;
                let (z0, z1) = p.unit();
                let image = p.ratio().filter(|u| u.is_finite()).map(|u| [u.re, u.im]);
                samples.push(CurveSample {
                    source: [w.re, w.im],
                    image,
                    point: Some([[z0.re, z0.im], [z1.re, z1.im]]),
                });
            }
            fig.curves.push(Curve {
                source_chart: k,
                chart: k,
                direction: direction.into(),
                param,
                samples,
            });
            Ok(())
        };
        for x in linspace(RE_RANGE.0, RE_RANGE.1, lines) {
            let ws = midpoints(0.0, 2.0 * PI, per_line)
                .into_iter()
                .map(|y| Complex64::new(x, y))
                .collect();
            push_curve("re", x, ws)?;
        }
        for y in [PI / 2.0, PI, 1.5 * PI] {
            let ws = linspace(RE_RANGE.0, RE_RANGE.1, per_line)
                .into_iter()
                .map(|x| Complex64::new(x, y))
                .collect();
            push_curve("im", y, ws)?;
        }
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct CsvRow<'a> {
    record: &'a str,
    chart: Option<i64>,
    label: String,
    param: Option<f64>,
    x: Option<f64>,
    y: Option<f64>,
    source_re: Option<f64>,
    source_im: Option<f64>,
}

impl<'a> CsvRow<'a> {
    fn new(record: &'a str) -> Self {
        Self {
            record,
            chart: None,
            label: String::new(),
            param: None,
            x: None,
            y: None,
            source_re: None,
            source_im: None,
        }
    }
}

/// Long-format CSV: one row per slit, band end, puncture and curve sample.
pub fn to_csv(fig: &Figure) -> Result<String, CliError> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    let mut put = |row: CsvRow| wtr.serialize(row).map_err(|e| CliError::Domain(e.to_string()));
    for s in &fig.slits {
        put(CsvRow {
            chart: s.k,
            x: Some(s.x),
            ..CsvRow::new("slit")
        })?;
    }
    if let Some([b, c]) = fig.band {
        put(CsvRow {
            label: "b".into(),
            x: Some(b),
            ..CsvRow::new("band")
        })?;
        put(CsvRow {
            label: "c".into(),
            x: Some(c),
            ..CsvRow::new("band")
        })?;
    }
    if let Some([lo, hi]) = fig.removed_band {
        put(CsvRow {
            label: "lower".into(),
            x: Some(lo),
            ..CsvRow::new("removed_band")
        })?;
        put(CsvRow {
            label: "upper".into(),
            x: Some(hi),
            ..CsvRow::new("removed_band")
        })?;
    }
    for p in &fig.punctures {
        put(CsvRow {
            label: p.label.clone(),
            x: Some(p.z0),
            y: Some(p.z1),
            ..CsvRow::new("puncture")
        })?;
    }
    for s in &fig.sheets {
        for p in &s.punctures {
            put(CsvRow {
                chart: Some(s.chart),
                label: p.label.clone(),
                x: Some(p.z0),
                y: Some(p.z1),
                ..CsvRow::new("sheet")
            })?;
        }
    }
    for (i, c) in fig.curves.iter().enumerate() {
        for s in &c.samples {
            put(CsvRow {
                chart: Some(c.chart),
                label: format!("curve{i}:{}", c.direction),
                param: Some(c.param),
                x: s.image.map(|v| v[0]),
                y: s.image.map(|v| v[1]),
                source_re: Some(s.source[0]),
                source_im: Some(s.source[1]),
                ..CsvRow::new("sample")
            })?;
        }
    }
    let bytes = wtr.into_inner().map_err(|e| CliError::Domain(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Domain(e.to_string()))
}

/// Maps a world window onto the fixed 900 x 600 viewport. For the `cn` and
/// `psi` figures the strip `(0, pi)` fills a 900 x 300 band.
struct View {
    x0: f64,
    y1: f64,
    scale: f64,
}

impl View {
    const WIDTH: f64 = 900.0;
    const HEIGHT: f64 = 600.0;

    fn strip() -> Self {
        let scale = 300.0 / PI;
        Self {
            x0: -Self::WIDTH / 2.0 / scale,
            y1: 1.5 * PI,
            scale,
        }
    }

    fn plane() -> Self {
        let scale = 75.0;
        Self {
            x0: -Self::WIDTH / 2.0 / scale,
            y1: Self::HEIGHT / 2.0 / scale,
            scale,
        }
    }

    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        ((x - self.x0) * self.scale, (self.y1 - y) * self.scale)
    }

    fn visible(&self, x: f64, y: f64) -> bool {
        let (px, py) = self.px(x, y);
        (0.0..=Self::WIDTH).contains(&px) && (0.0..=Self::HEIGHT).contains(&py)
    }
}

const PALETTE: [&str; 7] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b"];

/// SVG picture with the CSV data embedded in `<metadata>`.
pub fn to_svg(fig: &Figure) -> Result<String, CliError> {
    let view = if fig.figure == FigureKind::Chi { View::plane() } else { View::strip() };
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = View::WIDTH,
        h = View::HEIGHT
    );
    let _ = writeln!(s, "<metadata><![CDATA[\n{}]]></metadata>", to_csv(fig)?);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if fig.figure == FigureKind::Chi {
        let (ax, ay) = view.px(0.0, 0.0);
        let _ = writeln!(
            s,
            r##"<line x1="0" y1="{ay:.2}" x2="{w}" y2="{ay:.2}" stroke="#888"/><line x1="{ax:.2}" y1="0" x2="{ax:.2}" y2="{h}" stroke="#888"/>"##,
            w = View::WIDTH,
            h = View::HEIGHT
        );
        if let Some([lo, hi]) = fig.removed_band {
            let (x1, y) = view.px(lo, 0.0);
            let (x2, _) = view.px(hi, 0.0);
            let _ = writeln!(
                s,
                r##"<line x1="{x1:.2}" y1="{y:.2}" x2="{x2:.2}" y2="{y:.2}" stroke="black" stroke-width="4"/>"##
            );
        }
        for p in &fig.punctures {
            if p.z0 != 0.0 && view.visible(p.z1 / p.z0, 0.0) {
                let (x, y) = view.px(p.z1 / p.z0, 0.0);
                let _ = writeln!(
                    s,
                    r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="white" stroke="black"><title>{}</title></circle>"#,
                    p.label
                );
            }
        }
    } else {
        let (_, y0) = view.px(0.0, 0.0);
        let (_, ypi) = view.px(0.0, PI);
        let _ = writeln!(
            s,
            r##"<rect x="0" y="{ypi:.2}" width="{w}" height="{h:.2}" fill="#eef"/>"##,
            w = View::WIDTH,
            h = y0 - ypi
        );
        if let Some([b, c]) = fig.band {
            let (x1, _) = view.px(b, 0.0);
            let (x2, _) = view.px(c, 0.0);
            let _ = writeln!(
                s,
                r##"<rect x="{x1:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="#bbb"/>"##,
                x2 - x1,
                View::HEIGHT - y0
            );
        }
        for sl in &fig.slits {
            if view.visible(sl.x, 0.0) {
                let (x, _) = view.px(sl.x, 0.0);
                let _ = writeln!(
                    s,
                    r#"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{}" stroke="black"/>"#,
                    View::HEIGHT
                );
            }
        }
    }
    for c in &fig.curves {
        let color = PALETTE[c.chart.rem_euclid(PALETTE.len() as i64) as usize];
        let mut d = String::new();
        let mut pen_down = false;
        for sample in &c.samples {
            match sample.image {
                Some([x, y]) if view.visible(x, y) => {
                    let (px, py) = view.px(x, y);
                    let _ = write!(d, "{}{px:.2},{py:.2} ", if pen_down { "L" } else { "M" });
                    pen_down = true;
                }
                _ => pen_down = false,
            }
        }
        if !d.is_empty() {
            let _ = writeln!(
                s,
                r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1"/>"#,
                d.trim_end()
            );
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}
