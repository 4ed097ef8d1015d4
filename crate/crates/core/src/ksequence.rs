//! The integer sequence `a_k` of the n-Kronecker quiver and the K-theory
//! formulas built on it.
//!
//! `a_0 = 0`, `a_1 = 1`, `a_k = n a_{k-1} - a_{k-2}`, extended to negative
//! indices by `a_{-k} = -a_k`. Running the recurrence backward gives the same
//! values, so the sequence is defined for every `n`, including `n = 1` where it
//! is periodic with period 6.
//!
//! Classes in `K(P_n) = Z^2` are written in the ordered basis `([S_0], [S_1])`,
//! in which `[S_k] = (-a_{k-1}, a_k)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `a_k` for the n-Kronecker quiver, exact.
pub fn a_seq(n: u32, k: i64) -> BigInt {
    let n = BigInt::from(n);
    let steps = k.unsigned_abs();
    let (mut prev, mut cur) = (BigInt::zero(), BigInt::one());
    if steps == 0 {
        return prev;
    }
    for _ in 1..steps {
        let next = &n * &cur - &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    if k < 0 {
        -cur
    } else {
        cur
    }
}

/// `a_k` as a float. Exact while `|a_k| < 2^53`.
pub fn a_f64(n: u32, k: i64) -> f64 {
    let nf = f64::from(n);
    let steps = k.unsigned_abs();
    if steps == 0 {
        return 0.0;
    }
    let sign = if k < 0 { -1.0 } else { 1.0 };
    match n {
        1 => return sign * [0.0, 1.0, 1.0, 0.0, -1.0, -1.0][(steps % 6) as usize],
        2 => return sign * steps as f64,
        // |a_k| >= 2^(k-1) for n >= 3
        _ if steps > 1100 => return sign * f64::INFINITY,
        _ => {}
    }
    let (mut prev, mut cur) = (0.0_f64, 1.0_f64);
    for _ in 1..steps {
        let next = nf * cur - prev;
        prev = cur;
        cur = next;
    }
    if k < 0 {
        -cur
    } else {
        cur
    }
}

/// `(a_{k-1}, a_k, a_{k+1})` as floats; the coefficient triple used by every
/// transition formula of the atlas.
pub fn coeffs(n: u32, k: i64) -> (f64, f64, f64) {
    (a_f64(n, k - 1), a_f64(n, k), a_f64(n, k + 1))
}

/// Binet-type closed form of `a_k`, valid for `n > 2`.
pub fn closed_form(n: u32, k: i64) -> Result<f64> {
    if n <= 2 {
        return Err(Error::Arrows { n, min: 3 });
    }
    if k < 0 {
        return Err(Error::Index { k, min: 0 });
    }
    let nf = f64::from(n);
    let disc = (nf * nf - 4.0).sqrt();
    let upper = (nf + disc) / 2.0;
    let lower = (nf - disc) / 2.0;
    let k = k as i32;
    Ok((upper.powi(k) - lower.powi(k)) / disc)
}

/// Limits of `a_k / a_{k+1}` (lower) and `a_{k+1} / a_k` (upper) as `k -> inf`.
pub fn ratio_limits(n: u32) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::Arrows { n, min: 2 });
    }
    let nf = f64::from(n);
    let disc = (nf * nf - 4.0).sqrt();
    Ok(((nf - disc) / 2.0, (nf + disc) / 2.0))
}

/// Element of `K(P_n)` in the basis `([S_0], [S_1])`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KClass {
    pub c0: BigInt,
    pub c1: BigInt,
}

impl KClass {
    pub fn new(c0: impl Into<BigInt>, c1: impl Into<BigInt>) -> Self {
        Self {
            c0: c0.into(),
            c1: c1.into(),
        }
    }

    pub fn zero() -> Self {
        Self::new(0, 0)
    }

    /// Class of `S_k[shift]`.
    pub fn of(n: u32, k: i64, shift: i64) -> Self {
        kclass_of(n, k, shift)
    }

    /// Evaluates a central charge given by its values on `S_0` and `S_1`.
    pub fn charge(&self, z0: Complex64, z1: Complex64) -> Complex64 {
        let c0 = self.c0.to_f64().unwrap_or(f64::NAN);
        let c1 = self.c1.to_f64().unwrap_or(f64::NAN);
        z0 * c0 + z1 * c1
    }

    pub fn scale(&self, m: &BigInt) -> Self {
        Self {
            c0: &self.c0 * m,
            c1: &self.c1 * m,
        }
    }

    /// `det(self, other)` in the basis coordinates.
    pub fn det(&self, other: &KClass) -> BigInt {
        &self.c0 * &other.c1 - &self.c1 * &other.c0
    }
}

impl fmt::Display for KClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.c0, self.c1)
    }
}

impl Neg for KClass {
    type Output = KClass;
    fn neg(self) -> KClass {
        KClass {
            c0: -self.c0,
            c1: -self.c1,
        }
    }
}

impl Add for &KClass {
    type Output = KClass;
    fn add(self, rhs: &KClass) -> KClass {
        KClass {
            c0: &self.c0 + &rhs.c0,
            c1: &self.c1 + &rhs.c1,
        }
    }
}

impl Sub for &KClass {
    type Output = KClass;
    fn sub(self, rhs: &KClass) -> KClass {
        KClass {
            c0: &self.c0 - &rhs.c0,
            c1: &self.c1 - &rhs.c1,
        }
    }
}

impl Mul<&KClass> for &BigInt {
    type Output = KClass;
    fn mul(self, rhs: &KClass) -> KClass {
        rhs.scale(self)
    }
}

/// `(-1)^shift [S_k] = (-1)^shift (-a_{k-1}, a_k)`.
pub fn kclass_of(n: u32, k: i64, shift: i64) -> KClass {
    let class = KClass {
        c0: -a_seq(n, k - 1),
        c1: a_seq(n, k),
    };
    if shift.rem_euclid(2) == 1 {
        -class
    } else {
        class
    }
}

/// `Z(S_k) = a_k Z(S_1) - a_{k-1} Z(S_0)`.
pub fn central_charge(n: u32, k: i64, z0: Complex64, z1: Complex64) -> Complex64 {
    let (prev, cur, _) = coeffs(n, k);
    z1 * cur - z0 * prev
}

/// Euler form with Gram matrix `(1, n; 0, 1)` in the basis `([S_0], [S_1])`.
pub fn euler_form(n: u32, x: &KClass, y: &KClass) -> BigInt {
    &x.c0 * &y.c0 + &x.c1 * &y.c1 + BigInt::from(n) * &x.c0 * &y.c1
}

/// Slit abscissae and band endpoints of the quotient `Stab(P_n)/C`, in
/// natural-log units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlitParams {
    pub n: u32,
    /// `x_k` for `1 <= |k| <= kmax`; `x_{-k} = -x_k`.
    pub x: BTreeMap<i64, f64>,
    /// Left band endpoint `b_n`, present only for `n > 2`.
    pub b: Option<f64>,
    /// Right band endpoint `c_n = -b_n`, present only for `n > 2`.
    pub c: Option<f64>,
}

pub fn slit_params(n: u32, kmax: i64) -> Result<SlitParams> {
    if n < 2 {
        return Err(Error::Arrows { n, min: 2 });
    }
    if kmax < 1 {
        return Err(Error::Index { k: kmax, min: 1 });
    }
    let mut x = BTreeMap::new();
    for k in 1..=kmax {
        let xk = log_ratio(&a_seq(n, k), &a_seq(n, k + 1));
        x.insert(k, xk);
        x.insert(-k, -xk);
    }
    let (b, c) = if n > 2 {
        let (lower, upper) = ratio_limits(n)?;
        (Some(lower.ln()), Some(upper.ln()))
    } else {
        (None, None)
    };
    Ok(SlitParams { n, x, b, c })
}

/// `log(p / q)` for positive big integers, without overflowing `f64`.
fn log_ratio(p: &BigInt, q: &BigInt) -> f64 {
    debug_assert!(p.is_positive() && q.is_positive());
    let shift = q.bits().saturating_sub(60);
    let p = (p >> shift).to_f64().unwrap_or(f64::NAN);
    let q = (q >> shift).to_f64().unwrap_or(f64::NAN);
    (p / q).ln()
}
