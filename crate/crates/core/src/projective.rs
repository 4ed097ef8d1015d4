//! `CP^1`, the Moebius element `G_n`, the map `chi_n` and the removed sets.
//!
//! On chart `k`, `chi_n(w) = [a_k e^w - a_{k+1} : a_{k-1} e^w - a_k]`, which is
//! `G_n^{-k} . [1 : e^w]` under the action `[z0 : z1] -> [a z0 + b z1 : c z0 + d z1]`.
//! That is the convention for which the identity holds.
//!
//! Points are compared with the chordal distance
//! `|p0 q1 - p1 q0| / (|p| |q|)`, which lies in `[0, 1]`.

use std::f64::consts::PI;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::atlas::{canonical_chart, QuotientPoint};
use crate::error::{Error, Result};
use crate::ksequence::{a_seq, coeffs, ratio_limits};

/// Default tolerance for comparisons on `CP^1`.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A point `[z0 : z1]`, stored with the larger-modulus coordinate set to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjPoint {
    z0: Complex64,
    z1: Complex64,
}

impl ProjPoint {
    pub fn new(z0: Complex64, z1: Complex64) -> Result<Self> {
        if !(z0.is_finite() && z1.is_finite()) {
            return Err(Error::NonFinite);
        }
        let scale = if z0.norm() >= z1.norm() { z0 } else { z1 };
        if scale.norm() == 0.0 {
            return Err(Error::ZeroPoint);
        }
        Ok(Self {
            z0: z0 / scale,
            z1: z1 / scale,
        })
    }

    pub fn real(x0: f64, x1: f64) -> Result<Self> {
        Self::new(Complex64::new(x0, 0.0), Complex64::new(x1, 0.0))
    }

    /// `[1 : u]`.
    pub fn from_ratio(u: Complex64) -> Result<Self> {
        Self::new(Complex64::one(), u)
    }

    pub fn z0(&self) -> Complex64 {
        self.z0
    }

    pub fn z1(&self) -> Complex64 {
        self.z1
    }

    /// `z1 / z0`, or `None` at `[0 : 1]`.
    pub fn ratio(&self) -> Option<Complex64> {
        if self.z0.norm() == 0.0 {
            None
        } else {
            Some(self.z1 / self.z0)
        }
    }

    pub fn chordal(&self, other: &ProjPoint) -> f64 {
        let cross = self.z0 * other.z1 - self.z1 * other.z0;
        let na = (self.z0.norm_sqr() + self.z1.norm_sqr()).sqrt();
        let nb = (other.z0.norm_sqr() + other.z1.norm_sqr()).sqrt();
        cross.norm() / (na * nb)
    }

    pub fn approx_eq(&self, other: &ProjPoint, tol: f64) -> bool {
        self.chordal(other) <= tol
    }

    /// Unit-norm representative.
    pub fn unit(&self) -> (Complex64, Complex64) {
        let norm = (self.z0.norm_sqr() + self.z1.norm_sqr()).sqrt();
        (self.z0 / norm, self.z1 / norm)
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} : {}]", self.z0, self.z1)
    }
}

/// Integer matrix of determinant 1 acting on `CP^1`, identified with its negative.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MobiusPSL2 {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl MobiusPSL2 {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>, d: impl Into<BigInt>) -> Result<Self> {
        let m = Self {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            d: d.into(),
        };
        let det = m.det();
        if det.is_one() {
            Ok(m)
        } else {
            Err(Error::Determinant(det.to_string()))
        }
    }

    pub fn identity() -> Self {
        Self {
            a: BigInt::one(),
            b: BigInt::zero(),
            c: BigInt::zero(),
            d: BigInt::one(),
        }
    }

    /// `G_n = (0, 1; -1, n)`.
    pub fn generator(n: u32) -> Self {
        Self {
            a: BigInt::zero(),
            b: BigInt::one(),
            c: -BigInt::one(),
            d: BigInt::from(n),
        }
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn compose(&self, rhs: &MobiusPSL2) -> MobiusPSL2 {
        MobiusPSL2 {
            a: &self.a * &rhs.a + &self.b * &rhs.c,
            b: &self.a * &rhs.b + &self.b * &rhs.d,
            c: &self.c * &rhs.a + &self.d * &rhs.c,
            d: &self.c * &rhs.b + &self.d * &rhs.d,
        }
    }

    pub fn inverse(&self) -> MobiusPSL2 {
        MobiusPSL2 {
            a: self.d.clone(),
            b: -&self.b,
            c: -&self.c,
            d: self.a.clone(),
        }
    }

    /// Equality in `PSL(2, Z)`: equal up to an overall sign.
    pub fn psl_eq(&self, other: &MobiusPSL2) -> bool {
        let neg = MobiusPSL2 {
            a: -&other.a,
            b: -&other.b,
            c: -&other.c,
            d: -&other.d,
        };
        self == other || *self == neg
    }

    pub fn is_identity(&self) -> bool {
        self.psl_eq(&Self::identity())
    }

    pub fn apply(&self, p: &ProjPoint) -> ProjPoint {
        let f = |x: &BigInt| x.to_f64().unwrap_or(f64::NAN);
        let (z0, z1) = (p.z0, p.z1);
        let w0 = z0 * f(&self.a) + z1 * f(&self.b);
        let w1 = z0 * f(&self.c) + z1 * f(&self.d);
        ProjPoint::new(w0, w1).expect("determinant-1 matrix maps nonzero vectors to nonzero vectors")
    }

    /// Exact action on an integer representative.
    pub fn apply_exact(&self, x: &(BigInt, BigInt)) -> (BigInt, BigInt) {
        (
            &self.a * &x.0 + &self.b * &x.1,
            &self.c * &x.0 + &self.d * &x.1,
        )
    }
}

impl fmt::Display for MobiusPSL2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// `G_n^k = (-a_{k-1}, a_k; -a_k, a_{k+1})`.
pub fn g_power(n: u32, k: i64) -> MobiusPSL2 {
    MobiusPSL2 {
        a: -a_seq(n, k - 1),
        b: a_seq(n, k),
        c: -a_seq(n, k),
        d: a_seq(n, k + 1),
    }
}

/// Integer projective points equal up to a nonzero scalar.
pub fn same_integer_point(x: &(BigInt, BigInt), y: &(BigInt, BigInt)) -> bool {
    let nonzero = !(x.0.is_zero() && x.1.is_zero()) && !(y.0.is_zero() && y.1.is_zero());
    nonzero && &x.0 * &y.1 == &x.1 * &y.0
}

/// `chi_n` on chart `k`.
pub fn chi(n: u32, k: i64, w: Complex64) -> Result<ProjPoint> {
    if !(w.im > 0.0 && w.is_finite()) {
        return Err(Error::NotUpperHalfPlane { w });
    }
    let (prev, cur, next) = coeffs(n, k);
    let u = w.exp();
    ProjPoint::new(u * cur - next, u * prev - cur)
}

/// `chi_n` of a quotient point.
pub fn chi_of(q: &QuotientPoint) -> Result<ProjPoint> {
    chi(q.n, q.k, q.w)
}

/// Fixed points `[1 : lambda]`, `lambda^2 - n lambda + 1 = 0`, of `G_n`.
///
/// Two real points for `n > 2`, the single point `[1 : 1]` for `n = 2`, and a
/// complex-conjugate pair for `n = 1`.
pub fn fixed_points(n: u32) -> Vec<ProjPoint> {
    let nf = f64::from(n);
    let disc = nf * nf - 4.0;
    let roots: Vec<Complex64> = if disc > 0.0 {
        let s = disc.sqrt();
        vec![Complex64::new((nf - s) / 2.0, 0.0), Complex64::new((nf + s) / 2.0, 0.0)]
    } else if disc == 0.0 {
        vec![Complex64::new(nf / 2.0, 0.0)]
    } else {
        let s = (-disc).sqrt();
        vec![Complex64::new(nf / 2.0, -s / 2.0), Complex64::new(nf / 2.0, s / 2.0)]
    };
    roots
        .into_iter()
        .map(|l| ProjPoint::from_ratio(l).expect("finite ratio"))
        .collect()
}

/// Where a point of `CP^1` sits relative to the removed set of `chi_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RemovedSetVerdict {
    Regular,
    /// Close to `[a_k : a_{k+1}]`; `k` reduced mod 3 for `n = 1`.
    ExceptionalRay { k: i64 },
    /// Close to `[1 : lambda]` with `lambda` in the closed band of limits (`n > 2`).
    LimitBand { lambda: f64 },
    /// Close to the fixed point `[1 : 1]` of `G_2`.
    FixedPoint,
}

impl RemovedSetVerdict {
    pub fn is_regular(&self) -> bool {
        matches!(self, RemovedSetVerdict::Regular)
    }
}

/// `[a_k : a_{k+1}]` exactly.
pub fn ray_point_exact(n: u32, k: i64) -> (BigInt, BigInt) {
    (a_seq(n, k), a_seq(n, k + 1))
}

/// `[a_k : a_{k+1}]` in floating point.
pub fn ray_point(n: u32, k: i64) -> ProjPoint {
    if n >= 3 && k.abs() > 30 {
        return if k > 0 {
            ProjPoint::real(1.0, upper_ratio(n, k))
        } else {
            ProjPoint::real(1.0, 1.0 / upper_ratio(n, -k - 1))
        }
        .expect("finite ratio");
    }
    let (_, cur, next) = coeffs(n, k);
    ProjPoint::real(cur, next).expect("consecutive a_k never both vanish")
}

/// Floating value of `a_{k+1} / a_k` for `k >= 1`, stable for large `k`.
fn upper_ratio(n: u32, k: i64) -> f64 {
    debug_assert!(k >= 1 && n >= 2);
    if k <= 30 {
        let (_, cur, next) = coeffs(n, k);
        return next / cur;
    }
    if n == 2 {
        return (k + 1) as f64 / k as f64;
    }
    let (lo, hi) = ratio_limits(n).expect("n >= 2");
    let q = lo / hi;
    // a_k is proportional to hi^k (1 - q^k)
    hi * (1.0 - q.powf((k + 1) as f64)) / (1.0 - q.powf(k as f64))
}

/// Index `k >= 1` whose ratio `a_{k+1}/a_k` is nearest to `x` (the ratios
/// decrease monotonically), searched in `[1, kmax]`.
fn nearest_upper_index(n: u32, x: f64, kmax: i64) -> i64 {
    let (mut lo, mut hi) = (1_i64, kmax);
    // first index with ratio <= x
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if upper_ratio(n, mid) <= x {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// Largest `k` worth scanning: past it the ray points are within `tol / 4` of
/// the limit point, so proximity is decided against the limit instead.
fn scan_bound(n: u32, tol: f64) -> i64 {
    let cap = 1_000_000_000_i64;
    if n == 2 {
        // chordal distance between [k : k+1] and [1 : 1] is about 1/(2k)
        return ((2.0 / tol).ceil() as i64).clamp(4, cap);
    }
    let (lo, hi) = ratio_limits(n).expect("n > 2");
    let rate = (hi / lo).ln();
    (((4.0 / tol).ln() / rate).ceil() as i64 + 4).clamp(4, cap)
}

/// Classifies `p` against the removed set of `chi_n`.
///
/// `n = 1`: the rays `[0:1], [1:1], [1:0]`. `n = 2`: the rays `[k : k+1]` and
/// the fixed point `[1 : 1]`. `n > 2`: the rays `[a_k : a_{k+1}]` and the band
/// `[1 : lambda]`, `lambda` between the limits, whose endpoints are the fixed
/// points of `G_n`.
pub fn classify(n: u32, p: &ProjPoint, tol: f64) -> Result<RemovedSetVerdict> {
    if !(tol > 0.0) {
        return Err(Error::Tolerance(tol));
    }
    if n == 0 {
        return Err(Error::Arrows { n, min: 1 });
    }
    if n == 1 {
        for k in 0..3 {
            if p.chordal(&ray_point(1, k)) < tol {
                return Ok(RemovedSetVerdict::ExceptionalRay { k });
            }
        }
        return Ok(RemovedSetVerdict::Regular);
    }
    // [0:1] (k = 0) and [1:0] (k = -1)
    for k in [0, -1] {
        if p.chordal(&ray_point(n, k)) < tol {
            return Ok(RemovedSetVerdict::ExceptionalRay { k });
        }
    }
    let Some(u) = p.ratio() else {
        return Ok(RemovedSetVerdict::Regular);
    };
    // every remaining removed point is [1 : x] with x > 0 real
    let x = u.re;
    if x <= 0.0 || !x.is_finite() {
        return Ok(RemovedSetVerdict::Regular);
    }
    let near = |q: &ProjPoint| p.chordal(q) < tol;
    let (lo, hi) = ratio_limits(n)?;
    // the rays accumulate at the fixed points, which take precedence
    for lambda in [lo, hi] {
        if near(&ProjPoint::real(1.0, lambda)?) {
            return Ok(if n == 2 {
                RemovedSetVerdict::FixedPoint
            } else {
                RemovedSetVerdict::LimitBand { lambda }
            });
        }
    }
    let kmax = scan_bound(n, tol);
    // k >= 1: [a_k : a_{k+1}] = [1 : a_{k+1}/a_k], ratios decreasing to the upper limit.
    let i = nearest_upper_index(n, x, kmax);
    for k in [i - 1, i, i + 1] {
        if (1..=kmax).contains(&k) && near(&ray_point(n, k)) {
            return Ok(RemovedSetVerdict::ExceptionalRay { k });
        }
    }
    // k = -m <= -2: [a_m : a_{m-1}] = [1 : a_{m-1}/a_m], ratios increasing to the lower limit.
    if x > 0.0 {
        let i = nearest_upper_index(n, 1.0 / x, kmax);
        for m in [i - 1, i, i + 1] {
            if (1..=kmax).contains(&m) && near(&ray_point(n, -(m + 1))) {
                return Ok(RemovedSetVerdict::ExceptionalRay { k: -(m + 1) });
            }
        }
    }
    if n == 2 {
        return Ok(RemovedSetVerdict::Regular);
    }
    let lambda = x.clamp(lo, hi);
    if near(&ProjPoint::real(1.0, lambda)?) {
        return Ok(RemovedSetVerdict::LimitBand { lambda });
    }
    Ok(RemovedSetVerdict::Regular)
}

/// Chordal distance from `p` to the nearest removed point, scanning the rays
/// with `|k| <= kmax` and the band / fixed point. Only an estimate far from
/// the accumulation points.
pub fn removed_distance(n: u32, p: &ProjPoint, kmax: i64) -> f64 {
    let mut best = f64::INFINITY;
    let ks: Vec<i64> = if n == 1 { (0..3).collect() } else { (-kmax..=kmax).collect() };
    for k in ks {
        best = best.min(p.chordal(&ray_point(n, k)));
    }
    if n >= 2 {
        let (lo, hi) = ratio_limits(n).expect("n >= 2");
        let x = p.ratio().map(|u| u.re).unwrap_or(hi);
        // sample the band: the clamp of Re(u) plus both endpoints
        for lambda in [x.clamp(lo, hi), lo, hi] {
            let q = ProjPoint::real(1.0, lambda).expect("finite");
            best = best.min(p.chordal(&q));
        }
    }
    best
}

/// All preimages of a regular point in the charts `|k| <= k_max` with
/// `0 < Im w <= im_max`, canonicalized and deduplicated, sorted by `(k, Im w)`.
///
/// On chart `k` the equation `chi_n(w) = [z0 : z1]` reads `e^w = u` with
/// `u = (a_{k+1} z1 - a_k z0) / (a_k z1 - a_{k-1} z0)`.
pub fn fiber(n: u32, p: &ProjPoint, im_max: f64, k_max: i64) -> Result<Vec<QuotientPoint>> {
    if !(im_max > 0.0) {
        return Err(Error::Invalid(format!("im_max must be positive, got {im_max}")));
    }
    if k_max < 0 {
        return Err(Error::Index { k: k_max, min: 0 });
    }
    let verdict = classify(n, p, DEFAULT_TOL)?;
    if !verdict.is_regular() {
        return Err(Error::RemovedPoint(p.to_string()));
    }
    let charts: Vec<i64> = if n == 1 {
        (0..3).collect()
    } else {
        (-k_max..=k_max).collect()
    };
    let mut out: Vec<QuotientPoint> = Vec::new();
    for k in charts {
        let Some(u) = chart_ratio(n, k, p) else { continue };
        let principal = u.ln();
        let mut m = 0_i64;
        if principal.im <= 0.0 {
            m = 1;
        }
        loop {
            let w = principal + Complex64::new(0.0, 2.0 * PI * m as f64);
            if w.im > im_max {
                break;
            }
            let q = QuotientPoint::new(n, k, w)?.canonical();
            if !out.iter().any(|o| o.approx_eq(&q, 1e-9)) {
                out.push(q);
            }
            m += 1;
        }
    }
    out.sort_by(|a, b| (a.k, a.w.im).partial_cmp(&(b.k, b.w.im)).expect("finite"));
    Ok(out)
}

/// `e^w` of the chart-`k` preimage of `p`, or `None` at the two punctures of
/// the chart.
pub fn chart_ratio(n: u32, k: i64, p: &ProjPoint) -> Option<Complex64> {
    let (prev, cur, next) = coeffs(n, k);
    let (z0, z1) = p.unit();
    let num = z1 * next - z0 * cur;
    let den = z1 * cur - z0 * prev;
    let scale = (prev.abs() + cur.abs() + next.abs()).max(1.0);
    if den.norm() <= 1e-14 * scale || num.norm() <= 1e-14 * scale {
        None
    } else {
        Some(num / den)
    }
}

/// Canonical chart list for iterating `n = 1` charts or a window `|k| <= kmax`.
pub fn chart_window(n: u32, kmax: i64) -> Vec<i64> {
    if n == 1 {
        (0..3).collect()
    } else {
        (-kmax..=kmax).map(|k| canonical_chart(n, k)).collect()
    }
}

/// `true` when the integer ray point is the image of `[1:0]` under `G_n^{-k}`,
/// i.e. `[a_{k+1} : a_k]`.
pub fn puncture_images(n: u32, k: i64) -> ((BigInt, BigInt), (BigInt, BigInt)) {
    let g = g_power(n, -k);
    let one = BigInt::one();
    let zero = BigInt::zero();
    (
        g.apply_exact(&(one.clone(), zero.clone())),
        g.apply_exact(&(zero, one)),
    )
}

/// Sign-normalized integer point (first nonzero coordinate positive).
pub fn normalize_integer_point(x: (BigInt, BigInt)) -> (BigInt, BigInt) {
    let flip = if x.0.is_zero() { x.1.is_negative() } else { x.0.is_negative() };
    if flip {
        (-x.0, -x.1)
    } else {
        x
    }
}
