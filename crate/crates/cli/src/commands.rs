//! Command implementations. Each command produces an [`Output`] that is then
//! rendered in the requested format.

use std::f64::consts::PI;
use std::fs;
use std::io::Read;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use kronecker_stab::atlas::{phi_k, phi_k_inv, psi_k, psi_k_inv, ChartPoint, QuotientPoint};
use kronecker_stab::ksequence::{a_seq, coeffs, ratio_limits};
use kronecker_stab::lifting::{
    circle, lift_quotient, lift_total, loop_start, monodromy, projectivize, read_path_csv, start_in_chart,
    LiftOptions, Pair, PathSample,
};
use kronecker_stab::projective::{chi, classify, fiber, ProjPoint};
use kronecker_stab::stability::{construct, validate, StabilityRecord};

use crate::args::{Cli, Command, Format};
use crate::figure::{self, RenderSpec};
use crate::{parse_complex, parse_pair, CliError};

/// Result of a command before formatting.
pub struct Output {
    pub json: Value,
    /// CSV form, for tabular outputs.
    pub csv: Option<String>,
    /// SVG form, for figures.
    pub svg: Option<String>,
}

impl Output {
    fn json(value: Value) -> Self {
        Self {
            json: value,
            csv: None,
            svg: None,
        }
    }

    /// Text in the requested format.
    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => serde_json::to_string_pretty(&self.json)
                .map(|s| s + "\n")
                .map_err(|e| CliError::Domain(e.to_string())),
            Format::Csv => self
                .csv
                .clone()
                .ok_or_else(|| CliError::Usage("this command has no csv output".into())),
            Format::Svg => self
                .svg
                .clone()
                .ok_or_else(|| CliError::Usage("only render produces svg".into())),
        }
    }
}

fn to_value<T: Serialize>(x: &T) -> Result<Value, CliError> {
    serde_json::to_value(x).map_err(|e| CliError::Domain(e.to_string()))
}

fn pair_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn csv_table(header: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Domain(e.to_string());
    wtr.write_record(header).map_err(io)?;
    for r in rows {
        wtr.write_record(r).map_err(io)?;
    }
    let bytes = wtr.into_inner().map_err(|e| CliError::Domain(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Domain(e.to_string()))
}

/// Runs the parsed command line.
pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    if !(cli.tol > 0.0) {
        return Err(CliError::Usage(format!("--tol must be positive, got {}", cli.tol)));
    }
    let n = cli.n;
    match &cli.command {
        Command::Seq { kmax } => cmd_seq(n, *kmax),
        Command::Classify { z0, z1 } => cmd_classify(n, parse_complex(z0)?, parse_complex(z1)?, cli.tol),
        Command::ChartMap { from, to, z, w } => cmd_chart_map(n, *from, *to, parse_complex(z)?, parse_complex(w)?),
        Command::QuotientMap { from, to, w } => cmd_quotient_map(n, *from, *to, parse_complex(w)?),
        Command::Chi { k, w } => {
            let p = chi(n, *k, parse_complex(w)?)?;
            Ok(Output::json(json!({
                "n": n,
                "k": k,
                "point": [pair_json(p.z0()), pair_json(p.z1())],
            })))
        }
        Command::Fiber { z0, z1, im_max, k_max } => {
            let p = ProjPoint::new(parse_complex(z0)?, parse_complex(z1)?)?;
            let pts = fiber(n, &p, *im_max, *k_max)?;
            let rows: Vec<Vec<String>> = pts
                .iter()
                .map(|q| vec![q.k.to_string(), q.w.re.to_string(), q.w.im.to_string()])
                .collect();
            Ok(Output {
                json: json!({ "n": n, "point": [pair_json(p.z0()), pair_json(p.z1())], "preimages": to_value(&pts)? }),
                csv: Some(csv_table(&["k", "re_w", "im_w"], &rows)?),
                svg: None,
            })
        }
        Command::Construct { z0, z1, random } => cmd_construct(n, z0.as_deref(), z1.as_deref(), *random, cli.seed),
        Command::Validate { file } => cmd_validate(file.as_deref()),
        Command::Lift {
            path,
            loop_around,
            radius,
            samples,
            closed,
            total,
            start_chart,
            start_w,
            max_step,
            depth,
        } => {
            let opts = LiftOptions {
                max_step: *max_step,
                tol: cli.tol,
                max_depth: *depth,
            };
            let start = parse_start(*start_chart, start_w.as_deref())?;
            if *total {
                let Some(path) = path else {
                    return Err(CliError::Usage("--total needs --path".into()));
                };
                let pts = load_path(path)?;
                cmd_lift_total(n, PathSample::new(pts, *closed), start, &opts)
            } else {
                let (path, center) = match (path, loop_around) {
                    (Some(p), None) => (projectivize(&PathSample::new(load_path(p)?, *closed))?, None),
                    (None, Some(spec)) => {
                        let (z0, z1) = parse_pair(spec)?;
                        let center = ProjPoint::new(z0, z1)?;
                        (circle(&center, *radius, *samples)?, Some(center))
                    }
                    _ => return Err(CliError::Usage("give exactly one of --path and --loop-around".into())),
                };
                let first = path.points.first().ok_or(CliError::Usage("empty path".into()))?;
                let start = match (start, center) {
                    (Some(s), _) => resolve_start(n, s, first)?,
                    (None, Some(c)) => loop_start(n, &c, first)?,
                    (None, None) => loop_start(n, first, first)?,
                };
                let report = lift_quotient(n, &path, &start, &opts)?;
                let rows = report
                    .trace
                    .iter()
                    .enumerate()
                    .map(|(i, q)| vec![i.to_string(), q.k.to_string(), q.w.re.to_string(), q.w.im.to_string()])
                    .collect::<Vec<_>>();
                Ok(Output {
                    json: to_value(&report)?,
                    csv: Some(csv_table(&["step", "k", "re_w", "im_w"], &rows)?),
                    svg: None,
                })
            }
        }
        Command::Monodromy {
            z0,
            z1,
            radius,
            start_chart,
            start_w,
        } => {
            let center = ProjPoint::new(parse_complex(z0)?, parse_complex(z1)?)?;
            let opts = LiftOptions {
                tol: cli.tol,
                ..LiftOptions::default()
            };
            let start = match parse_start(*start_chart, start_w.as_deref())? {
                Some(s) => {
                    let first = circle(&center, *radius, kronecker_stab::lifting::MONODROMY_SAMPLES)?.points[0];
                    Some(resolve_start(n, s, &first)?)
                }
                None => None,
            };
            let report = monodromy(n, &center, *radius, start, &opts)?;
            Ok(Output::json(to_value(&report)?))
        }
        Command::Render {
            figure: kind,
            charts,
            grid_re,
            grid_im,
            slit_kmax,
        } => {
            let spec = RenderSpec {
                n,
                figure: *kind,
                charts: *charts,
                grid: (*grid_re, *grid_im),
                slit_kmax: *slit_kmax,
            };
            let fig = figure::build(&spec)?;
            Ok(Output {
                json: to_value(&fig)?,
                csv: Some(figure::to_csv(&fig)?),
                svg: Some(figure::to_svg(&fig)?),
            })
        }
    }
}

pub fn cmd_seq(n: u32, kmax: i64) -> Result<Output, CliError> {
    if kmax < 0 {
        return Err(CliError::Usage(format!("kmax must be non-negative, got {kmax}")));
    }
    let mut rows = Vec::new();
    let mut table = Vec::new();
    for k in 0..=kmax {
        let a = a_seq(n, k);
        let (_, cur, next) = coeffs(n, k);
        let ratio = if cur == 0.0 { None } else { Some(next / cur) };
        rows.push(json!({ "k": k, "a_k": a.to_string(), "ratio_next": ratio }));
        table.push(vec![
            k.to_string(),
            a.to_string(),
            ratio.map(|r| r.to_string()).unwrap_or_default(),
        ]);
    }
    let limits = ratio_limits(n).ok().map(|(lo, hi)| json!([lo, hi]));
    Ok(Output {
        json: json!({ "n": n, "rows": rows, "ratio_limits": limits }),
        csv: Some(csv_table(&["k", "a_k", "ratio_next"], &table)?),
        svg: None,
    })
}

pub fn cmd_classify(n: u32, z0: Complex64, z1: Complex64, tol: f64) -> Result<Output, CliError> {
    let p = ProjPoint::new(z0, z1)?;
    let verdict = classify(n, &p, tol)?;
    Ok(Output::json(json!({
        "n": n,
        "point": [pair_json(p.z0()), pair_json(p.z1())],
        "removed": !verdict.is_regular(),
        "verdict": to_value(&verdict)?,
    })))
}

fn cmd_chart_map(n: u32, from: i64, to: i64, z: Complex64, w: Complex64) -> Result<Output, CliError> {
    let (z0, w0) = if from == 0 { (z, w) } else { phi_k_inv(n, from, z, w)? };
    let (zt, wt) = if to == 0 { (z0, w0) } else { phi_k(n, to, z0, w0)? };
    let pt = ChartPoint::new(n, to, zt, wt)?;
    let (s0, s1) = pt.charges();
    Ok(Output::json(json!({
        "n": n,
        "from": from,
        "to": to,
        "z": pair_json(zt),
        "w": pair_json(wt),
        "charges": [pair_json(s0), pair_json(s1)],
    })))
}

fn cmd_quotient_map(n: u32, from: i64, to: i64, w: Complex64) -> Result<Output, CliError> {
    let w0 = if from == 0 { w } else { psi_k_inv(n, from, w)? };
    let wt = if to == 0 { w0 } else { psi_k(n, to, w0)? };
    Ok(Output::json(json!({ "n": n, "from": from, "to": to, "w": pair_json(wt) })))
}

fn record_json(rec: &StabilityRecord) -> Result<Value, CliError> {
    let report = validate(rec);
    let (z0, z1) = rec.central_charge();
    let chart = rec.chart_point().map(|p| {
        json!({ "k": p.k, "z": pair_json(p.z), "w": pair_json(p.w) })
    });
    Ok(json!({
        "record": to_value(rec)?,
        "central_charge": [pair_json(z0), pair_json(z1)],
        "chart": chart,
        "valid": report.is_valid(),
        "violations": to_value(&report.violations)?,
    }))
}

fn cmd_construct(
    n: u32,
    z0: Option<&str>,
    z1: Option<&str>,
    random: Option<usize>,
    seed: u64,
) -> Result<Output, CliError> {
    match (z0, z1, random) {
        (Some(a), Some(b), None) => {
            let rec = construct(n, parse_complex(a)?, parse_complex(b)?)?;
            Ok(Output::json(record_json(&rec)?))
        }
        (None, None, Some(count)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut failures = 0usize;
            let mut worst = 0.0_f64;
            for _ in 0..count {
                let z0 = random_charge(&mut rng);
                let z1 = random_charge(&mut rng);
                let rec = construct(n, z0, z1)?;
                if !validate(&rec).is_valid() {
                    failures += 1;
                }
                let (r0, r1) = rec.central_charge();
                worst = worst.max((r0 - z0).norm() / z0.norm()).max((r1 - z1).norm() / z1.norm());
            }
            Ok(Output::json(json!({
                "n": n,
                "seed": seed,
                "count": count,
                "failures": failures,
                "max_relative_reconstruction_error": worst,
            })))
        }
        _ => Err(CliError::Usage("give z0 and z1, or --random N".into())),
    }
}

/// `r e^{i theta}` with `log r` uniform in `[-5, 5]`.
pub fn random_charge(rng: &mut impl Rng) -> Complex64 {
    let r = rng.gen_range(-5.0..5.0_f64).exp();
    let theta = rng.gen_range(-PI..PI);
    Complex64::from_polar(r, theta)
}

fn cmd_validate(file: Option<&Path>) -> Result<Output, CliError> {
    let text = match file {
        Some(p) => fs::read_to_string(p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?,
        None => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            s
        }
    };
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("invalid json: {e}")))?;
    // accept both a bare record and the output of `construct`
    let record_value = value.get("record").cloned().unwrap_or(value);
    let rec: StabilityRecord =
        serde_json::from_value(record_value).map_err(|e| CliError::Usage(format!("not a stability record: {e}")))?;
    let report = validate(&rec);
    Ok(Output::json(json!({
        "valid": report.is_valid(),
        "violations": to_value(&report.violations)?,
        "messages": report.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
    })))
}

/// Reads a path from CSV (`re0,im0,re1,im1`) or from a JSON list of
/// `[[re0, im0], [re1, im1]]` pairs (or a serialized path object).
pub fn load_path(path: &Path) -> Result<Vec<Pair>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let pts: Vec<Pair> = if is_json {
        let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("invalid json: {e}")))?;
        let list = value.get("points").cloned().unwrap_or(value);
        serde_json::from_value(list).map_err(|e| CliError::Usage(format!("invalid path json: {e}")))?
    } else {
        read_path_csv(text.as_bytes()).map_err(|e| CliError::Usage(e.to_string()))?
    };
    if pts.is_empty() {
        return Err(CliError::Usage(format!("{}: empty path", path.display())));
    }
    Ok(pts)
}

/// A start given as `(chart, Some(w))` or only a chart.
type StartSpec = (i64, Option<Complex64>);

fn parse_start(chart: Option<i64>, w: Option<&str>) -> Result<Option<StartSpec>, CliError> {
    match (chart, w) {
        (None, None) => Ok(None),
        (Some(k), None) => Ok(Some((k, None))),
        (Some(k), Some(w)) => Ok(Some((k, Some(parse_complex(w)?)))),
        (None, Some(_)) => Err(CliError::Usage("--start-w needs --start-chart".into())),
    }
}

fn resolve_start(n: u32, spec: StartSpec, first: &ProjPoint) -> Result<QuotientPoint, CliError> {
    match spec {
        (k, Some(w)) => Ok(QuotientPoint::new(n, k, w)?),
        (k, None) => Ok(start_in_chart(n, k, first)?),
    }
}

fn cmd_lift_total(
    n: u32,
    path: PathSample<Pair>,
    start: Option<StartSpec>,
    opts: &LiftOptions,
) -> Result<Output, CliError> {
    let first = path.points[0];
    let p = ProjPoint::new(first[0], first[1])?;
    let q = match start {
        Some(s) => resolve_start(n, s, &p)?,
        None => loop_start(n, &p, &p)?,
    };
    let (prev, cur, _) = coeffs(n, q.k);
    let zk = first[1] * cur - first[0] * prev;
    let start = ChartPoint::new(n, q.k, zk.ln(), q.w)?;
    let report = lift_total(n, &path, &start, opts)?;
    let rows = report
        .trace
        .iter()
        .enumerate()
        .map(|(i, c)| {
            vec![
                i.to_string(),
                c.k.to_string(),
                c.z.re.to_string(),
                c.z.im.to_string(),
                c.w.re.to_string(),
                c.w.im.to_string(),
            ]
        })
        .collect::<Vec<_>>();
    Ok(Output {
        json: to_value(&report)?,
        csv: Some(csv_table(&["step", "k", "re_z", "im_z", "re_w", "im_w"], &rows)?),
        svg: None,
    })
}
