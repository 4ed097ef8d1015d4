//! Stability conditions built from a heart generated by an Ext-exceptional
//! pair of shifted exceptional objects and a central charge on its simples.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::atlas::{ChartPoint, QuotientPoint};
use crate::error::{Error, Result};
use crate::ksequence::coeffs;
use crate::mutation::{check_ext_exceptional, ExcLabel, ExtViolation};

/// Tolerance used when grouping equal phases.
const PHASE_TOL: f64 = 1e-12;

/// `true` for `r e^{i pi phi}` with `r > 0` and `0 < phi <= 1`.
pub fn in_half_plane(c: Complex64) -> bool {
    c.is_finite() && (c.im > 0.0 || (c.im == 0.0 && c.re < 0.0))
}

/// Phase in `(-1, 1]`, i.e. `Arg(c) / pi`; lies in `(0, 1]` exactly on `H`.
pub fn phase_of(c: Complex64) -> f64 {
    // normalize -0.0 so the negative real axis gets phase 1
    Complex64::new(c.re, c.im + 0.0).arg() / PI
}

/// `eps = 0` iff `Arg(z)` lies in `(0, pi]`.
pub fn epsilon(z: Complex64) -> bool {
    !in_half_plane(z)
}

fn sign(eps: bool) -> f64 {
    if eps {
        -1.0
    } else {
        1.0
    }
}

/// A heart `<e1, e2>` together with the charges of its two simples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityRecord {
    pub n: u32,
    pub heart: (ExcLabel, ExcLabel),
    /// Serialized as `[re, im]` pairs.
    pub charges: [Complex64; 2],
    pub phases: [f64; 2],
}

impl StabilityRecord {
    /// Record with the phases derived from the charges. No validation; see [`validate`].
    pub fn new(n: u32, heart: (ExcLabel, ExcLabel), charges: [Complex64; 2]) -> Self {
        Self {
            n,
            heart,
            charges,
            phases: [phase_of(charges[0]), phase_of(charges[1])],
        }
    }

    /// `Z(S_k)` and `Z(S_{k+1})` for the unshifted objects behind the heart simples.
    pub fn unshifted_charges(&self) -> (Complex64, Complex64) {
        let (e1, e2) = self.heart;
        (self.charges[0] * shift_sign(e1.shift), self.charges[1] * shift_sign(e2.shift))
    }

    /// `(Z(S_0), Z(S_1))`.
    ///
    /// Inverts `Z(S_k) = -a_{k-1} Z(S_0) + a_k Z(S_1)`, a system of determinant 1.
    pub fn central_charge(&self) -> (Complex64, Complex64) {
        let k = self.heart.0.index;
        let (zk, zk1) = self.unshifted_charges();
        let (prev, cur, next) = coeffs(self.n, k);
        (zk * next - zk1 * cur, zk * cur - zk1 * prev)
    }

    /// `(phi(S_k), phi(S_{k+1}))`.
    pub fn object_phases(&self) -> (f64, f64) {
        let (e1, e2) = self.heart;
        (self.phases[0] - e1.shift as f64, self.phases[1] - e2.shift as f64)
    }

    /// Coordinates in chart `k`, where `k` is the index of the first simple.
    ///
    /// `None` when `phi(S_k) >= phi(S_{k+1})`: the chart needs a strict inequality.
    pub fn chart_point(&self) -> Option<ChartPoint> {
        let (pk, pk1) = self.object_phases();
        if pk1 <= pk {
            return None;
        }
        let (zk, zk1) = self.unshifted_charges();
        let z = Complex64::new(zk.norm().ln(), PI * pk);
        let w = Complex64::new((zk1.norm() / zk.norm()).ln(), PI * (pk1 - pk));
        ChartPoint::new(self.n, self.heart.0.index, z, w).ok()
    }

    /// Chart index, if the record lies in a chart.
    pub fn chart(&self) -> Option<i64> {
        self.chart_point().map(|p| p.k)
    }

    pub fn quotient(&self) -> Option<QuotientPoint> {
        self.chart_point().map(|p| p.quotient())
    }

    /// Phase of a shift of one of the heart simples, or `None` for other labels.
    pub fn label_phase(&self, label: ExcLabel) -> Option<f64> {
        let target = label.canonical(self.n);
        for (e, phi) in [(self.heart.0, self.phases[0]), (self.heart.1, self.phases[1])] {
            let base = e.canonical(self.n);
            if base.index == target.index {
                return Some(phi + (target.shift - base.shift) as f64);
            }
        }
        None
    }
}

fn shift_sign(shift: i64) -> f64 {
    if shift.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// A stability condition with prescribed `(Z(S_0), Z(S_1))`.
///
/// - both nonzero: heart `<S_0[2-e0], S_1[-e1]>`, charges `(-1)^{e_i} z_i`;
/// - `z0 = 0`: heart `<S_1[2-e], S_2[-e]>`, charges `(-1)^e z1`, `(-1)^e n z1`;
/// - `z1 = 0`: heart `<S_{-1}[2-e], S_0[-e]>`, charges `(-1)^e n z0`, `(-1)^e z0`.
///
/// In the first case `phi(S_0) <= 0 < phi(S_1)`, so the record always lies in
/// chart 0; the other two land in charts 1 and -1 with `w = +-ln n + 2 pi i`.
pub fn construct(n: u32, z0: Complex64, z1: Complex64) -> Result<StabilityRecord> {
    if n == 0 {
        return Err(Error::Arrows { n, min: 1 });
    }
    if !(z0.is_finite() && z1.is_finite()) {
        return Err(Error::NonFinite);
    }
    let nf = f64::from(n);
    let zero0 = z0.norm() == 0.0;
    let zero1 = z1.norm() == 0.0;
    let (k, eps, charges) = match (zero0, zero1) {
        (true, true) => return Err(Error::ZeroPoint),
        (false, false) => {
            let (e0, e1) = (epsilon(z0), epsilon(z1));
            let p = 2 - i64::from(e0);
            let q = -i64::from(e1);
            let heart = (ExcLabel::new(0, p), ExcLabel::new(1, q));
            return Ok(StabilityRecord::new(n, heart, [z0 * sign(e0), z1 * sign(e1)]));
        }
        (true, false) => {
            let e = epsilon(z1);
            (1, e, [z1 * sign(e), z1 * nf * sign(e)])
        }
        (false, true) => {
            let e = epsilon(z0);
            (-1, e, [z0 * nf * sign(e), z0 * sign(e)])
        }
    };
    let p = 2 - i64::from(eps);
    let q = -i64::from(eps);
    let heart = (ExcLabel::new(k, p), ExcLabel::new(k + 1, q));
    Ok(StabilityRecord::new(n, heart, charges))
}

/// The record with heart `<S_0[1], S_1>` and charges `(-1, 1 + i)`, which lies
/// in every chart.
pub fn sigma_minus1(n: u32) -> StabilityRecord {
    StabilityRecord::new(
        n,
        (ExcLabel::new(0, 1), ExcLabel::new(1, 0)),
        [Complex64::new(-1.0, 0.0), Complex64::new(1.0, 1.0)],
    )
}

/// A failed axiom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// A simple has charge outside `H` (needs `m > 0` and `0 < phi <= 1`).
    StabilityFunction { slot: usize, charge: Complex64 },
    /// The stored phase disagrees with the charge.
    PhaseMismatch { slot: usize, stored: f64, expected: f64 },
    /// The heart generators are not Ext-exceptional.
    ExtExceptional { reason: ExtViolation },
    /// A positive combination of the simple charges leaves `H`.
    ConeEscapes { a: f64, b: f64 },
    Arrows { n: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::StabilityFunction { slot, charge } => {
                write!(f, "charge {charge} of simple {slot} is not in the half plane")
            }
            Violation::PhaseMismatch { slot, stored, expected } => {
                write!(f, "phase of simple {slot} is {stored}, charge gives {expected}")
            }
            Violation::ExtExceptional { reason } => write!(f, "heart is not Ext-exceptional: {reason}"),
            Violation::ConeEscapes { a, b } => write!(f, "{a} e1 + {b} e2 has charge outside the half plane"),
            Violation::Arrows { n } => write!(f, "n = {n} arrows"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the stability-function condition, Ext-exceptionality of the heart and
/// that sampled points of the positive cone stay in `H`. A finite-length heart
/// with two simples has HN filtrations as soon as the charges lie in `H`.
pub fn validate(rec: &StabilityRecord) -> ValidationReport {
    let mut violations = Vec::new();
    if rec.n == 0 {
        violations.push(Violation::Arrows { n: rec.n });
    }
    for (slot, &c) in rec.charges.iter().enumerate() {
        if !in_half_plane(c) {
            violations.push(Violation::StabilityFunction { slot, charge: c });
        } else {
            let expected = phase_of(c);
            if (expected - rec.phases[slot]).abs() > PHASE_TOL {
                violations.push(Violation::PhaseMismatch {
                    slot,
                    stored: rec.phases[slot],
                    expected,
                });
            }
        }
    }
    if rec.n > 0 {
        if let Err(reason) = check_ext_exceptional(rec.n, rec.heart) {
            violations.push(Violation::ExtExceptional { reason });
        }
    }
    if rec.charges.iter().all(|&c| in_half_plane(c)) {
        const SAMPLES: usize = 16;
        for i in 0..=SAMPLES {
            let t = i as f64 / SAMPLES as f64;
            let (a, b) = (1.0 - t, t);
            let c = rec.charges[0] * a + rec.charges[1] * b;
            if !in_half_plane(c) {
                violations.push(Violation::ConeEscapes { a, b });
            }
        }
    }
    ValidationReport { violations }
}

/// One HN factor: all summands of a single phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HnFactor {
    pub phase: f64,
    pub summands: Vec<(ExcLabel, u64)>,
}

/// HN filtration of a direct sum of shifted heart simples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HNResult {
    pub factors: Vec<HnFactor>,
}

impl HNResult {
    /// Largest phase.
    pub fn phi_plus(&self) -> f64 {
        self.factors.first().map_or(f64::NAN, |f| f.phase)
    }

    /// Smallest phase.
    pub fn phi_minus(&self) -> f64 {
        self.factors.last().map_or(f64::NAN, |f| f.phase)
    }
}

/// Groups the summands by phase, strictly decreasing. Each summand must be a
/// shift of one of the two heart simples.
pub fn hn_direct_sum(rec: &StabilityRecord, parts: &[(ExcLabel, u64)]) -> Result<HNResult> {
    if parts.is_empty() {
        return Err(Error::Invalid("empty direct sum".into()));
    }
    let mut tagged: Vec<(f64, ExcLabel, u64)> = Vec::with_capacity(parts.len());
    for &(label, mult) in parts {
        if mult == 0 {
            return Err(Error::Invalid(format!("multiplicity 0 for {label}")));
        }
        let phase = rec.label_phase(label).ok_or(Error::ForeignLabel {
            index: label.index,
            shift: label.shift,
        })?;
        tagged.push((phase, label, mult));
    }
    tagged.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut factors: Vec<HnFactor> = Vec::new();
    for (phase, label, mult) in tagged {
        match factors.last_mut() {
            Some(last) if (last.phase - phase).abs() <= PHASE_TOL => last.summands.push((label, mult)),
            _ => factors.push(HnFactor {
                phase,
                summands: vec![(label, mult)],
            }),
        }
    }
    Ok(HNResult { factors })
}
