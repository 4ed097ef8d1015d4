//! Chart coordinates `Theta_k = C x H` and the maps gluing them.
//!
//! A point `(z, w)` of chart `k` is the stability condition with
//! `Z(S_k) = e^z`, `Z(S_{k+1}) = e^{z+w}`, `phi(S_k) = Im z / pi` and
//! `phi(S_{k+1}) = (Im z + Im w) / pi`. Two charts overlap exactly on the
//! strip `0 < Im w < pi`, where every `S_j` is stable.
//!
//! All logarithms are principal. On the strip `e^w` lies in the upper half
//! plane and the transition Moebius maps have determinant
//! `a_k^2 - a_{k+1} a_{k-1} = 1`, so their values stay there too.
//!
//! For `n = 1` the charts repeat with period 3 (`S_{k+3} = S_k[1]`), and chart
//! indices are reduced to `{0, 1, 2}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ksequence::coeffs;

/// `0 < Im w < pi`.
pub fn in_strip(w: Complex64) -> bool {
    w.im > 0.0 && w.im < PI
}

fn check_strip(w: Complex64) -> Result<()> {
    if in_strip(w) {
        Ok(())
    } else {
        Err(Error::OutsideStrip { w })
    }
}

fn check_upper(w: Complex64) -> Result<()> {
    if w.im > 0.0 && w.is_finite() {
        Ok(())
    } else {
        Err(Error::NotUpperHalfPlane { w })
    }
}

/// Chart index in canonical form: reduced mod 3 when `n = 1`.
pub fn canonical_chart(n: u32, k: i64) -> i64 {
    if n == 1 {
        k.rem_euclid(3)
    } else {
        k
    }
}

/// `u -> (a_{k+1} u - a_k) / (a_k u - a_{k-1})`.
pub(crate) fn transition_mobius(n: u32, k: i64, u: Complex64) -> Complex64 {
    let (prev, cur, next) = coeffs(n, k);
    (u * next - cur) / (u * cur - prev)
}

/// Inverse of [`transition_mobius`]: `v -> (a_k - a_{k-1} v) / (a_{k+1} - a_k v)`.
pub(crate) fn transition_mobius_inv(n: u32, k: i64, v: Complex64) -> Complex64 {
    let (prev, cur, next) = coeffs(n, k);
    (-v * prev + cur) / (-v * cur + next)
}

/// Quotient transition `psi_k(w) = log((a_{k+1} e^w - a_k) / (a_k e^w - a_{k-1}))`.
pub fn psi_k(n: u32, k: i64, w: Complex64) -> Result<Complex64> {
    check_strip(w)?;
    let out = transition_mobius(n, k, w.exp()).ln();
    check_strip(out)?;
    Ok(out)
}

/// Inverse of [`psi_k`] on the strip.
pub fn psi_k_inv(n: u32, k: i64, w: Complex64) -> Result<Complex64> {
    check_strip(w)?;
    let out = transition_mobius_inv(n, k, w.exp()).ln();
    check_strip(out)?;
    Ok(out)
}

/// Splits `k = 3q + r` for `n = 1`; other `n` return `(k, 0)`.
fn reduce(n: u32, k: i64) -> (i64, i64) {
    if n == 1 {
        (k.rem_euclid(3), k.div_euclid(3))
    } else {
        (k, 0)
    }
}

/// `log(a_k e^w - a_{k-1})`, i.e. `log Z(S_k) - log Z(S_0)` on the strip with
/// the branch fixed by the phase ordering of the `S_j`.
fn log_charge_ratio(n: u32, k: i64, w: Complex64) -> Complex64 {
    let (r, q) = reduce(n, k);
    let (prev, cur, _) = coeffs(n, r);
    (w.exp() * cur - prev).ln() + Complex64::new(0.0, PI * q as f64)
}

/// Full transition `phi_k(z, w) = (z + log(a_k e^w - a_{k-1}), psi_k(w))` from
/// chart 0 to chart `k` on the overlap.
pub fn phi_k(n: u32, k: i64, z: Complex64, w: Complex64) -> Result<(Complex64, Complex64)> {
    check_strip(w)?;
    Ok((z + log_charge_ratio(n, k, w), psi_k(n, k, w)?))
}

/// Inverse of [`phi_k`]: chart `k` back to chart 0.
pub fn phi_k_inv(n: u32, k: i64, z: Complex64, w: Complex64) -> Result<(Complex64, Complex64)> {
    let w0 = psi_k_inv(n, k, w)?;
    Ok((z - log_charge_ratio(n, k, w0), w0))
}

/// `g_k(z, w) = (Z(S_0), Z(S_1))` for the chart point `(z, w)` of chart `k`.
///
/// The general expression divides by `a_{k-1} a_{k+1} - a_k^2`, which is `-1`
/// for every `k`; the division is folded in.
pub fn g_k(n: u32, k: i64, z: Complex64, w: Complex64) -> Result<(Complex64, Complex64)> {
    check_upper(w)?;
    let (prev, cur, next) = coeffs(n, k);
    let ez = z.exp();
    let ezw = (z + w).exp();
    Ok((ez * next - ezw * cur, ez * cur - ezw * prev))
}

/// A stability condition in chart `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub n: u32,
    pub k: i64,
    pub z: Complex64,
    pub w: Complex64,
}

impl ChartPoint {
    pub fn new(n: u32, k: i64, z: Complex64, w: Complex64) -> Result<Self> {
        check_upper(w)?;
        if !z.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self { n, k, z, w })
    }

    pub fn in_overlap(&self) -> bool {
        in_strip(self.w)
    }

    /// `(Z(S_0), Z(S_1))`.
    pub fn charges(&self) -> (Complex64, Complex64) {
        let (prev, cur, next) = coeffs(self.n, self.k);
        let ez = self.z.exp();
        let ezw = (self.z + self.w).exp();
        (ez * next - ezw * cur, ez * cur - ezw * prev)
    }

    /// `(phi(S_k), phi(S_{k+1}))`.
    pub fn phases(&self) -> (f64, f64) {
        (self.z.im / PI, (self.z.im + self.w.im) / PI)
    }

    /// Same point with the chart index reduced (only changes anything for `n = 1`).
    pub fn canonical(&self) -> Self {
        let (r, q) = reduce(self.n, self.k);
        Self {
            k: r,
            z: self.z - Complex64::new(0.0, PI * q as f64),
            ..*self
        }
    }

    /// Re-expresses an overlap point in chart `j`.
    pub fn to_chart(&self, j: i64) -> Result<Self> {
        let (z0, w0) = phi_k_inv(self.n, self.k, self.z, self.w)?;
        let (z, w) = phi_k(self.n, j, z0, w0)?;
        Ok(Self { k: j, z, w, ..*self })
    }

    /// Image in the quotient by the C-action, canonicalized.
    pub fn quotient(&self) -> QuotientPoint {
        QuotientPoint {
            n: self.n,
            k: self.k,
            w: self.w,
        }
        .canonical()
    }
}

/// `z' . (z, w) = (z' + z, w)`; rotates and rescales every central charge by
/// `e^{z'}` and shifts every phase by `Im z' / pi`.
pub fn c_action(zp: Complex64, pt: &ChartPoint) -> ChartPoint {
    ChartPoint { z: pt.z + zp, ..*pt }
}

/// A point of `Stab(P_n) / C`: the upper half plane `H_k` of chart `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuotientPoint {
    pub n: u32,
    pub k: i64,
    pub w: Complex64,
}

impl QuotientPoint {
    pub fn new(n: u32, k: i64, w: Complex64) -> Result<Self> {
        check_upper(w)?;
        Ok(Self { n, k, w })
    }

    pub fn in_overlap(&self) -> bool {
        in_strip(self.w)
    }

    /// Overlap points move to chart 0; other points keep their chart (reduced
    /// mod 3 for `n = 1`).
    pub fn canonical(&self) -> Self {
        if self.in_overlap() && self.k != 0 {
            if let Ok(w) = psi_k_inv(self.n, self.k, self.w) {
                return Self { k: 0, w, ..*self };
            }
        }
        Self {
            k: canonical_chart(self.n, self.k),
            ..*self
        }
    }

    /// Representative of an overlap point in chart `j`.
    pub fn in_chart(&self, j: i64) -> Result<Self> {
        let w0 = psi_k_inv(self.n, self.k, self.w)?;
        Ok(Self {
            k: j,
            w: psi_k(self.n, j, w0)?,
            ..*self
        })
    }

    /// Canonical forms agree to `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let (a, b) = (self.canonical(), other.canonical());
        a.n == b.n && a.k == b.k && (a.w - b.w).norm() <= tol
    }
}

/// Phase of `S_j` at a point of the overlap.
///
/// With `(z, w)` in chart 0, `Z(S_j) = e^z (a_j e^w - a_{j-1})` and the phase is
/// `Im z / pi + Arg(a_j e^w - a_{j-1}) / pi`. For `n >= 2` the principal
/// argument is the right branch: the correction lies in `(0, 1)` for `j >= 1`
/// and in `(-1, 0]` for `j <= 0`. For `n = 1` only `j in {0, 1, 2}` is read off
/// this way and the rest follow from `S_{j+3} = S_j[1]`.
pub fn exceptional_phase(n: u32, j: i64, pt: &ChartPoint) -> Result<f64> {
    check_strip(pt.w)?;
    let base = if pt.k == 0 { *pt } else { pt.to_chart(0)? };
    Ok((base.z.im + log_charge_ratio(n, j, base.w).im) / PI)
}
