//! Path lifting through `chi_n` (quotient level) and through the central charge
//! map (total level).
//!
//! The lift is carried as a chart index and a point of that chart's upper half
//! plane. Each sample is solved in closed form in the current chart and the
//! logarithm branch nearest the previous value is kept. Steps longer than
//! `max_step` in the hyperbolic metric of `H` are bisected.
//!
//! Whenever the lift is in the overlap strip it moves to the chart in which
//! `Im w` is largest. `Im w_j / pi` is the harmonic measure, seen from
//! `e^{w_0}`, of the boundary arc that chart `j` glues on. So the chosen chart
//! keeps `Im w` well away from 0 unless the path comes close to a removed point.

use std::f64::consts::PI;
use std::io::{Read, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::atlas::{canonical_chart, in_strip, psi_k, psi_k_inv, ChartPoint, QuotientPoint};
use crate::error::Error;
use crate::ksequence::{coeffs, ratio_limits};
use crate::projective::{chart_ratio, chi, classify, ProjPoint};

/// Largest chart index considered when looking for the deepest chart.
pub const CHART_WINDOW: i64 = 200;

/// A polyline path. For a closed path the last sample is joined back to the first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSample<P> {
    pub points: Vec<P>,
    pub closed: bool,
}

impl<P> PathSample<P> {
    pub fn new(points: Vec<P>, closed: bool) -> Self {
        Self { points, closed }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// A point of `C^2 \ {0}`.
pub type Pair = [Complex64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiftOptions {
    /// Largest accepted step in the hyperbolic metric of `H`.
    pub max_step: f64,
    /// Re-substitution and closing tolerance.
    pub tol: f64,
    /// Maximal bisection depth per path segment.
    pub max_depth: u32,
}

impl Default for LiftOptions {
    fn default() -> Self {
        Self {
            max_step: 0.05,
            tol: 1e-9,
            max_depth: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartSwitch {
    /// Index of the path sample ending the segment where the switch happened.
    pub step: usize,
    pub from: i64,
    pub to: i64,
}

/// Result of a lift. `trace[i]` lies over `path.points[i]`; a closed path whose
/// last sample differs from the first gets one more trace point over the first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftReport<T> {
    pub trace: Vec<T>,
    pub chart_switches: Vec<ChartSwitch>,
    pub closed_up: bool,
    pub end_displacement: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LiftError {
    #[error("step {index}: refinement exhausted after {depth} bisections")]
    StepTooLarge { index: usize, depth: u32 },
    #[error("step {index}: path meets the removed point {point}")]
    RemovedPointOnPath { index: usize, point: String },
    #[error("start point lies over {found}, path starts at {expected} (chordal distance {distance})")]
    StartMismatch {
        expected: String,
        found: String,
        distance: f64,
    },
    #[error("step {index}: path comes within tolerance of a removed line")]
    LineProximity { index: usize },
    #[error("empty path")]
    EmptyPath,
    #[error(transparent)]
    Domain(#[from] Error),
}

pub type LiftResult<T> = std::result::Result<T, LiftError>;

/// `arcosh(1 + |a - b|^2 / (2 Im a Im b))`.
pub fn hyperbolic_distance(a: Complex64, b: Complex64) -> f64 {
    let arg = 1.0 + (a - b).norm_sqr() / (2.0 * a.im * b.im);
    arg.acosh()
}

/// Charts searched for the deepest one.
fn chart_window(n: u32) -> Vec<i64> {
    if n == 1 {
        return vec![0, 1, 2];
    }
    // keep a_{j+1} finite
    let j = if n <= 2 {
        CHART_WINDOW
    } else {
        let (_, hi) = ratio_limits(n).expect("n >= 2");
        CHART_WINDOW.min((700.0 / hi.ln()).floor() as i64 - 2)
    };
    (-j..=j).collect()
}

/// Working state on the quotient: chart and `w`.
#[derive(Debug, Clone, Copy)]
struct QState {
    k: i64,
    w: Complex64,
}

struct Lifter<'a> {
    n: u32,
    opts: &'a LiftOptions,
    window: Vec<i64>,
}

impl<'a> Lifter<'a> {
    fn new(n: u32, opts: &'a LiftOptions) -> Self {
        Self {
            n,
            opts,
            window: chart_window(n),
        }
    }

    /// Strip point of chart `k` moved to the chart with largest `Im w`.
    fn deepest(&self, s: QState) -> QState {
        let w0 = if s.k == 0 {
            s.w
        } else {
            match psi_k_inv(self.n, s.k, s.w) {
                Ok(w0) => w0,
                Err(_) => return s,
            }
        };
        let mut best = s;
        for &j in &self.window {
            if j == s.k {
                continue;
            }
            if let Ok(wj) = psi_k(self.n, j, w0) {
                if wj.im > best.w.im {
                    best = QState { k: j, w: wj };
                }
            }
        }
        best
    }

    /// Preimage of `q` in the current chart on the branch nearest `s.w`, if the
    /// step is acceptable.
    fn step(&self, s: QState, q: &ProjPoint) -> Option<QState> {
        let u = chart_ratio(self.n, s.k, q)?;
        let w = nearest_branch(u.ln(), s.w.im);
        if !(w.im > 0.0) || hyperbolic_distance(s.w, w) > self.opts.max_step {
            return None;
        }
        Some(QState { k: s.k, w })
    }

    fn settle(&self, s: QState) -> QState {
        if in_strip(s.w) {
            self.deepest(s)
        } else {
            s
        }
    }
}

/// `l + 2 pi i m` with `m` chosen so the imaginary part is nearest `target`.
fn nearest_branch(l: Complex64, target: f64) -> Complex64 {
    let m = ((target - l.im) / (2.0 * PI)).round();
    l + Complex64::new(0.0, 2.0 * PI * m)
}

/// Unit representatives of the endpoints of a chordal segment, phase-aligned
/// so that `(1 - t) a + t b` never vanishes.
fn segment_ends(p: &ProjPoint, q: &ProjPoint) -> (Pair, Pair) {
    let (a0, a1) = p.unit();
    let (b0, b1) = q.unit();
    let h = a0.conj() * b0 + a1.conj() * b1;
    let rot = if h.norm() > 0.0 { h.conj() / h.norm() } else { Complex64::new(1.0, 0.0) };
    ([a0, a1], [b0 * rot, b1 * rot])
}

fn lerp(a: &Pair, b: &Pair, t: f64) -> Pair {
    [a[0] * (1.0 - t) + b[0] * t, a[1] * (1.0 - t) + b[1] * t]
}

/// Real points `z1 / z0` where the segment `(1 - t) a + t b`, `t in [0, 1]`,
/// crosses the real projective line. Infinity is reported as `f64::INFINITY`.
fn real_crossings(a: &Pair, b: &Pair) -> Vec<f64> {
    let (alpha, beta) = (a[0], b[0] - a[0]);
    let (gamma, delta) = (a[1], b[1] - a[1]);
    // Im((gamma + t delta) conj(alpha + t beta)) = c0 + c1 t + c2 t^2
    let c0 = (gamma * alpha.conj()).im;
    let c1 = (gamma * beta.conj() + delta * alpha.conj()).im;
    let c2 = (delta * beta.conj()).im;
    let scale = c0.abs().max(c1.abs()).max(c2.abs());
    let ratio_at = |t: f64| {
        let p = lerp(a, b, t);
        if p[0].norm() <= 1e-300 {
            f64::INFINITY
        } else {
            (p[1] / p[0]).re
        }
    };
    if scale <= 1e-15 {
        // the whole segment is real
        return (0..=64).map(|i| ratio_at(i as f64 / 64.0)).collect();
    }
    let mut ts = Vec::new();
    if c2.abs() <= 1e-15 * scale {
        if c1.abs() > 1e-15 * scale {
            ts.push(-c0 / c1);
        }
    } else {
        let disc = c1 * c1 - 4.0 * c2 * c0;
        if disc >= 0.0 {
            let s = disc.sqrt();
            let qv = -0.5 * (c1 + c1.signum() * s);
            ts.push(qv / c2);
            if qv != 0.0 {
                ts.push(c0 / qv);
            }
        }
    }
    ts.into_iter()
        .filter(|t| (-1e-12..=1.0 + 1e-12).contains(t))
        .map(|t| ratio_at(t.clamp(0.0, 1.0)))
        .collect()
}

/// Rejects a path segment that crosses the real line at (or within `tol` of)
/// a removed point.
fn check_segment(n: u32, index: usize, a: &Pair, b: &Pair, tol: f64) -> LiftResult<()> {
    for x in real_crossings(a, b) {
        let p = if x.is_finite() {
            ProjPoint::real(1.0, x)?
        } else {
            ProjPoint::real(0.0, 1.0)?
        };
        if !classify(n, &p, tol)?.is_regular() {
            return Err(LiftError::RemovedPointOnPath {
                index,
                point: p.to_string(),
            });
        }
    }
    Ok(())
}

/// Bisects `[t0, t1]` until every sub-step is accepted.
fn refine<S: Copy>(
    state: S,
    t0: f64,
    t1: f64,
    depth: u32,
    max_depth: u32,
    step: &mut impl FnMut(S, f64) -> Option<S>,
) -> Option<S> {
    if let Some(s) = step(state, t1) {
        return Some(s);
    }
    if depth >= max_depth {
        return None;
    }
    let tm = 0.5 * (t0 + t1);
    let mid = refine(state, t0, tm, depth + 1, max_depth, step)?;
    refine(mid, tm, t1, depth + 1, max_depth, step)
}

/// Path samples with the closing sample appended when needed.
fn closed_points<P: Clone>(path: &PathSample<P>, same: impl Fn(&P, &P) -> bool) -> Vec<P> {
    let mut pts = path.points.clone();
    if path.closed {
        if let (Some(first), Some(last)) = (pts.first().cloned(), pts.last()) {
            if !same(&first, last) {
                pts.push(first);
            }
        }
    }
    pts
}

/// Lifts a path in `CP^1` through `chi_n`, starting at `start`.
pub fn lift_quotient(
    n: u32,
    path: &PathSample<ProjPoint>,
    start: &QuotientPoint,
    opts: &LiftOptions,
) -> LiftResult<LiftReport<QuotientPoint>> {
    check_options(opts)?;
    let pts = closed_points(path, |a, b| a.chordal(b) <= opts.tol);
    let Some(first) = pts.first() else {
        return Err(LiftError::EmptyPath);
    };
    for (index, p) in pts.iter().enumerate() {
        if !classify(n, p, opts.tol)?.is_regular() {
            return Err(LiftError::RemovedPointOnPath {
                index,
                point: p.to_string(),
            });
        }
    }
    let image = chi(n, start.k, start.w)?;
    let distance = image.chordal(first);
    if distance > opts.tol {
        return Err(LiftError::StartMismatch {
            expected: first.to_string(),
            found: image.to_string(),
            distance,
        });
    }
    let lifter = Lifter::new(n, opts);
    let mut state = lifter.settle(QState {
        k: start.k,
        w: start.w,
    });
    let mut trace = vec![QuotientPoint::new(n, state.k, state.w)?.canonical()];
    let mut switches = Vec::new();
    for i in 1..pts.len() {
        let (a, b) = segment_ends(&pts[i - 1], &pts[i]);
        check_segment(n, i, &a, &b, opts.tol)?;
        let mut step = |s: QState, t: f64| -> Option<QState> {
            let p = lerp(&a, &b, t);
            let q = ProjPoint::new(p[0], p[1]).ok()?;
            let next = lifter.settle(lifter.step(s, &q)?);
            if canonical_chart(n, next.k) != canonical_chart(n, s.k) {
                switches.push(ChartSwitch {
                    step: i,
                    from: canonical_chart(n, s.k),
                    to: canonical_chart(n, next.k),
                });
            }
            Some(next)
        };
        state = refine(state, 0.0, 1.0, 0, opts.max_depth, &mut step).ok_or(LiftError::StepTooLarge {
            index: i,
            depth: opts.max_depth,
        })?;
        trace.push(QuotientPoint::new(n, state.k, state.w)?.canonical());
    }
    let first_pt = trace[0];
    let last_pt = *trace.last().expect("nonempty");
    let end_displacement = quotient_displacement(&first_pt, &last_pt);
    let returns = pts.len() > 1 && pts[0].chordal(pts.last().expect("nonempty")) <= opts.tol;
    Ok(LiftReport {
        trace,
        chart_switches: switches,
        closed_up: (returns || pts.len() == 1) && end_displacement <= opts.tol,
        end_displacement,
    })
}

/// Distance between two lifts, measured in a common chart when one of them is
/// in the overlap; otherwise the length of a path through the overlap.
pub fn quotient_displacement(a: &QuotientPoint, b: &QuotientPoint) -> f64 {
    let (a, b) = (a.canonical(), b.canonical());
    if a.k == b.k {
        return (a.w - b.w).norm();
    }
    if a.in_overlap() {
        if let Ok(a2) = a.in_chart(b.k) {
            return (a2.w - b.w).norm();
        }
    }
    if b.in_overlap() {
        if let Ok(b2) = b.in_chart(a.k) {
            return (a.w - b2.w).norm();
        }
    }
    let half = Complex64::new(0.0, PI / 2.0);
    let a_mid = Complex64::new(a.w.re, 0.0) + half;
    let b_mid = Complex64::new(b.w.re, 0.0) + half;
    let across = psi_k_inv(a.n, b.k, b_mid)
        .and_then(|w0| psi_k(a.n, a.k, w0))
        .map(|w| (w - a_mid).norm())
        .unwrap_or(PI);
    (a.w.im - PI / 2.0) + (b.w.im - PI / 2.0) + across
}

fn check_options(opts: &LiftOptions) -> LiftResult<()> {
    if !(opts.tol > 0.0) {
        return Err(Error::Tolerance(opts.tol).into());
    }
    if !(opts.max_step > 0.0) {
        return Err(Error::Invalid(format!("max_step must be positive, got {}", opts.max_step)).into());
    }
    Ok(())
}

/// Lifts several starts over the same path in parallel.
pub fn lift_all(
    n: u32,
    path: &PathSample<ProjPoint>,
    starts: &[QuotientPoint],
    opts: &LiftOptions,
) -> Vec<LiftResult<LiftReport<QuotientPoint>>> {
    starts.par_iter().map(|s| lift_quotient(n, path, s, opts)).collect()
}

/// Working state on the total space.
#[derive(Debug, Clone, Copy)]
struct TState {
    k: i64,
    z: Complex64,
    w: Complex64,
}

/// Lifts a path in `C^2 \ {0}` through the central charge map, starting at
/// `start`. Samples are joined by straight segments in `C^2`.
pub fn lift_total(
    n: u32,
    path: &PathSample<Pair>,
    start: &ChartPoint,
    opts: &LiftOptions,
) -> LiftResult<LiftReport<ChartPoint>> {
    check_options(opts)?;
    let same = |a: &Pair, b: &Pair| (a[0] - b[0]).norm() + (a[1] - b[1]).norm() <= opts.tol;
    let pts = closed_points(path, same);
    let Some(first) = pts.first() else {
        return Err(LiftError::EmptyPath);
    };
    let mut proj = Vec::with_capacity(pts.len());
    for (index, p) in pts.iter().enumerate() {
        let q = ProjPoint::new(p[0], p[1])?;
        if !classify(n, &q, opts.tol)?.is_regular() {
            return Err(LiftError::LineProximity { index });
        }
        proj.push(q);
    }
    let (s0, s1) = start.charges();
    let gap = (s0 - first[0]).norm() + (s1 - first[1]).norm();
    let scale = first[0].norm() + first[1].norm();
    if gap > opts.tol * scale.max(1.0) {
        return Err(LiftError::StartMismatch {
            expected: format!("({}, {})", first[0], first[1]),
            found: format!("({s0}, {s1})"),
            distance: gap,
        });
    }
    let lifter = Lifter::new(n, opts);
    let settle = |s: TState| -> TState {
        let q = lifter.settle(QState { k: s.k, w: s.w });
        if q.k == s.k {
            return s;
        }
        match (ChartPoint { n, k: s.k, z: s.z, w: s.w }).to_chart(q.k) {
            Ok(p) => TState { k: p.k, z: p.z, w: p.w },
            Err(_) => s,
        }
    };
    let mut state = settle(TState {
        k: start.k,
        z: start.z,
        w: start.w,
    });
    let out = |s: &TState| canonical_total(ChartPoint { n, k: s.k, z: s.z, w: s.w });
    let mut trace = vec![out(&state)];
    let mut switches = Vec::new();
    for i in 1..pts.len() {
        let (a, b) = (pts[i - 1], pts[i]);
        let (ua, ub) = segment_ends(&proj[i - 1], &proj[i]);
        check_segment(n, i, &ua, &ub, opts.tol).map_err(|e| match e {
            LiftError::RemovedPointOnPath { index, .. } => LiftError::LineProximity { index },
            other => other,
        })?;
        let mut step = |s: TState, t: f64| -> Option<TState> {
            let p = lerp(&a, &b, t);
            let q = ProjPoint::new(p[0], p[1]).ok()?;
            let qs = lifter.step(QState { k: s.k, w: s.w }, &q)?;
            let (prev, cur, _) = coeffs(n, s.k);
            let zk = p[1] * cur - p[0] * prev;
            if zk.norm() == 0.0 {
                return None;
            }
            let z = nearest_branch(zk.ln(), s.z.im);
            if (z.im - s.z.im).abs() >= PI / 2.0 {
                return None;
            }
            let next = settle(TState { k: s.k, z, w: qs.w });
            if canonical_chart(n, next.k) != canonical_chart(n, s.k) {
                switches.push(ChartSwitch {
                    step: i,
                    from: canonical_chart(n, s.k),
                    to: canonical_chart(n, next.k),
                });
            }
            Some(next)
        };
        state = refine(state, 0.0, 1.0, 0, opts.max_depth, &mut step).ok_or(LiftError::StepTooLarge {
            index: i,
            depth: opts.max_depth,
        })?;
        trace.push(out(&state));
    }
    let end_displacement = total_displacement(&trace[0], trace.last().expect("nonempty"));
    let returns = pts.len() > 1 && same(&pts[0], pts.last().expect("nonempty"));
    Ok(LiftReport {
        trace,
        chart_switches: switches,
        closed_up: (returns || pts.len() == 1) && end_displacement <= opts.tol,
        end_displacement,
    })
}

/// Overlap points in chart 0, other points with the chart index reduced.
pub fn canonical_total(p: ChartPoint) -> ChartPoint {
    if p.in_overlap() && p.k != 0 {
        if let Ok(q) = p.to_chart(0) {
            return q;
        }
    }
    p.canonical()
}

/// `|dz| + |dw|` in a common chart when possible.
pub fn total_displacement(a: &ChartPoint, b: &ChartPoint) -> f64 {
    let (a, b) = (canonical_total(*a), canonical_total(*b));
    if a.k == b.k {
        return (a.z - b.z).norm() + (a.w - b.w).norm();
    }
    if a.in_overlap() {
        if let Ok(a2) = a.to_chart(b.k) {
            return (a2.z - b.z).norm() + (a2.w - b.w).norm();
        }
    }
    if b.in_overlap() {
        if let Ok(b2) = b.to_chart(a.k) {
            return (a.z - b2.z).norm() + (a.w - b2.w).norm();
        }
    }
    quotient_displacement(&a.quotient(), &b.quotient()) + (a.z - b.z).norm()
}

/// `samples + 1` points (the last equal to the first) on the circle of chordal
/// radius `radius` around `center`.
pub fn circle(center: &ProjPoint, radius: f64, samples: usize) -> Result<PathSample<ProjPoint>, Error> {
    if !(radius > 0.0 && radius < 1.0) {
        return Err(Error::Invalid(format!("radius must lie in (0, 1), got {radius}")));
    }
    if samples < 3 {
        return Err(Error::Invalid(format!("need at least 3 samples, got {samples}")));
    }
    let (c0, c1) = center.unit();
    let (d0, d1) = (-c1.conj(), c0.conj());
    let s = (1.0 - radius * radius).sqrt();
    let mut points = Vec::with_capacity(samples + 1);
    for i in 0..=samples {
        let theta = 2.0 * PI * (i % samples) as f64 / samples as f64;
        let e = Complex64::from_polar(radius, theta);
        points.push(ProjPoint::new(c0 * s + d0 * e, c1 * s + d1 * e)?);
    }
    Ok(PathSample::new(points, true))
}

/// `e^{i theta} (z0, z1)` for `theta` in `[0, 2 pi]`: one orbit of the rotation
/// part of the `C`-action.
pub fn orbit_loop(z0: Complex64, z1: Complex64, samples: usize) -> PathSample<Pair> {
    let samples = samples.max(3);
    let points = (0..=samples)
        .map(|i| {
            let e = Complex64::from_polar(1.0, 2.0 * PI * i as f64 / samples as f64);
            [z0 * e, z1 * e]
        })
        .collect();
    PathSample::new(points, true)
}

/// Preimage of `p` in chart `k` with the smallest positive `Im w`.
pub fn start_in_chart(n: u32, k: i64, p: &ProjPoint) -> Result<QuotientPoint, Error> {
    let u = chart_ratio(n, k, p).ok_or_else(|| Error::RemovedPoint(p.to_string()))?;
    let mut w = u.ln();
    if w.im <= 0.0 {
        w += Complex64::new(0.0, 2.0 * PI);
    }
    QuotientPoint::new(n, k, w)
}

/// Preimage of `p` with the smallest positive `Im w` over the charts
/// `|k| <= kmax` (all three charts for `n = 1`); ties go to the chart listed first.
pub fn lowest_preimage(n: u32, p: &ProjPoint, kmax: i64) -> Result<QuotientPoint, Error> {
    lowest_in(n, p, &chart_list(n, kmax))
}

fn chart_list(n: u32, kmax: i64) -> Vec<i64> {
    if n == 1 {
        vec![0, 1, 2]
    } else {
        let mut ks: Vec<i64> = (-kmax..=kmax).collect();
        ks.sort_by_key(|k| (k.abs(), *k));
        ks
    }
}

fn lowest_in(n: u32, p: &ProjPoint, charts: &[i64]) -> Result<QuotientPoint, Error> {
    let mut best: Option<QuotientPoint> = None;
    for &k in charts {
        if let Ok(q) = start_in_chart(n, k, p) {
            if best.is_none_or(|b| q.w.im < b.w.im) {
                best = Some(q);
            }
        }
    }
    best.ok_or_else(|| Error::RemovedPoint(p.to_string()))
}

/// Default start for a loop around `center`: the lowest preimage of `first` in
/// a chart having `center` as one of its two punctures, or in any nearby chart
/// when `center` is not a puncture.
pub fn loop_start(n: u32, center: &ProjPoint, first: &ProjPoint) -> Result<QuotientPoint, Error> {
    let window = chart_list(n, CHART_WINDOW.min(chart_window(n).last().copied().unwrap_or(0)));
    let punctured: Vec<i64> = window
        .iter()
        .copied()
        .filter(|&k| chart_ratio(n, k, center).is_none())
        .collect();
    if punctured.is_empty() {
        lowest_preimage(n, first, 2)
    } else {
        lowest_in(n, first, &punctured)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonodromyReport {
    pub displacement: f64,
    pub start_chart: i64,
    pub end_chart: i64,
    pub start: QuotientPoint,
    pub end: QuotientPoint,
    pub closed_up: bool,
}

/// Samples used for monodromy circles; refinement adds more where needed.
pub const MONODROMY_SAMPLES: usize = 256;

/// Lifts the circle of chordal radius `radius` around `center` once. Without a
/// start, [`loop_start`] picks one.
pub fn monodromy(
    n: u32,
    center: &ProjPoint,
    radius: f64,
    start: Option<QuotientPoint>,
    opts: &LiftOptions,
) -> LiftResult<MonodromyReport> {
    let path = circle(center, radius, MONODROMY_SAMPLES)?;
    let start = match start {
        Some(s) => s,
        None => loop_start(n, center, &path.points[0])?,
    };
    let report = lift_quotient(n, &path, &start, opts)?;
    let first = report.trace[0];
    let end = *report.trace.last().expect("nonempty");
    Ok(MonodromyReport {
        displacement: report.end_displacement,
        start_chart: first.k,
        end_chart: end.k,
        start: first,
        end,
        closed_up: report.closed_up,
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct PathRow {
    re0: f64,
    im0: f64,
    re1: f64,
    im1: f64,
}

/// Reads `re0, im0, re1, im1` rows (with header).
pub fn read_path_csv<R: Read>(reader: R) -> Result<Vec<Pair>, Error> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut out = Vec::new();
    for row in rdr.deserialize::<PathRow>() {
        let row = row.map_err(|e| Error::Invalid(format!("path csv: {e}")))?;
        out.push([Complex64::new(row.re0, row.im0), Complex64::new(row.re1, row.im1)]);
    }
    Ok(out)
}

/// Writes `re0, im0, re1, im1` rows with a header.
pub fn write_path_csv<W: Write>(writer: W, points: &[Pair]) -> Result<(), Error> {
    let mut wtr = csv::Writer::from_writer(writer);
    for p in points {
        wtr.serialize(PathRow {
            re0: p[0].re,
            im0: p[0].im,
            re1: p[1].re,
            im1: p[1].im,
        })
        .map_err(|e| Error::Invalid(format!("path csv: {e}")))?;
    }
    wtr.flush().map_err(|e| Error::Invalid(format!("path csv: {e}")))
}

/// Projective path from `C^2` samples.
pub fn projectivize(path: &PathSample<Pair>) -> Result<PathSample<ProjPoint>, Error> {
    let points = path
        .points
        .iter()
        .map(|p| ProjPoint::new(p[0], p[1]))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PathSample::new(points, path.closed))
}
