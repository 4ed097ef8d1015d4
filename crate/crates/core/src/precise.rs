//! The chart maps evaluated in multiprecision arithmetic.
//!
//! Far from chart 0 the transitions are badly conditioned in `f64`: `psi_k`
//! squeezes the strip towards the limit ratio, so a rounded `w_k` loses about
//! `log10(a_k a_{k+1})` digits when mapped back through `g_k` or `chi`. The
//! functions here run the same formulas with a configurable mantissa width
//! (192 bits by default) and no domain checks; inputs and outputs are exact
//! `f64` conversions at the boundary.

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ksequence::a_seq;
use crate::projective::ProjPoint;

const RM: RoundingMode = RoundingMode::ToEven;

pub const DEFAULT_BITS: usize = 192;

#[derive(Debug, Clone)]
pub struct HComplex {
    pub re: BigFloat,
    pub im: BigFloat,
}

/// Precision and constant cache shared by all operations.
#[derive(Debug)]
pub struct Ctx {
    bits: usize,
    cc: Consts,
}

impl Ctx {
    pub fn new(bits: usize) -> Result<Self> {
        let cc = Consts::new().map_err(|e| Error::Invalid(format!("multiprecision constants: {e:?}")))?;
        Ok(Self { bits, cc })
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn real(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, self.bits)
    }

    pub fn int(&mut self, x: &BigInt) -> BigFloat {
        BigFloat::parse(&x.to_string(), Radix::Dec, self.bits, RM, &mut self.cc)
    }

    pub fn c(&self, z: Complex64) -> HComplex {
        HComplex {
            re: self.real(z.re),
            im: self.real(z.im),
        }
    }

    pub fn to_f64(&self, x: &BigFloat) -> f64 {
        if x.is_zero() {
            return 0.0;
        }
        x.to_string().parse().unwrap_or(f64::NAN)
    }

    pub fn to_c64(&self, z: &HComplex) -> Complex64 {
        Complex64::new(self.to_f64(&z.re), self.to_f64(&z.im))
    }

    pub fn pi(&mut self) -> BigFloat {
        self.cc.pi(self.bits, RM)
    }

    pub fn add(&self, a: &HComplex, b: &HComplex) -> HComplex {
        HComplex {
            re: a.re.add(&b.re, self.bits, RM),
            im: a.im.add(&b.im, self.bits, RM),
        }
    }

    pub fn sub(&self, a: &HComplex, b: &HComplex) -> HComplex {
        HComplex {
            re: a.re.sub(&b.re, self.bits, RM),
            im: a.im.sub(&b.im, self.bits, RM),
        }
    }

    pub fn mul(&self, a: &HComplex, b: &HComplex) -> HComplex {
        let p = self.bits;
        HComplex {
            re: a.re.mul(&b.re, p, RM).sub(&a.im.mul(&b.im, p, RM), p, RM),
            im: a.re.mul(&b.im, p, RM).add(&a.im.mul(&b.re, p, RM), p, RM),
        }
    }

    pub fn scale(&self, a: &HComplex, s: &BigFloat) -> HComplex {
        HComplex {
            re: a.re.mul(s, self.bits, RM),
            im: a.im.mul(s, self.bits, RM),
        }
    }

    pub fn div(&self, a: &HComplex, b: &HComplex) -> HComplex {
        let p = self.bits;
        let d = self.norm_sqr(b);
        let num = self.mul(
            a,
            &HComplex {
                re: b.re.clone(),
                im: b.im.neg(),
            },
        );
        HComplex {
            re: num.re.div(&d, p, RM),
            im: num.im.div(&d, p, RM),
        }
    }

    pub fn norm_sqr(&self, a: &HComplex) -> BigFloat {
        let p = self.bits;
        a.re.mul(&a.re, p, RM).add(&a.im.mul(&a.im, p, RM), p, RM)
    }

    pub fn norm(&self, a: &HComplex) -> BigFloat {
        self.norm_sqr(a).sqrt(self.bits, RM)
    }

    pub fn exp(&mut self, a: &HComplex) -> HComplex {
        let p = self.bits;
        let r = a.re.exp(p, RM, &mut self.cc);
        HComplex {
            re: r.mul(&a.im.cos(p, RM, &mut self.cc), p, RM),
            im: r.mul(&a.im.sin(p, RM, &mut self.cc), p, RM),
        }
    }

    /// Principal branch, `Im` in `(-pi, pi]`.
    pub fn ln(&mut self, a: &HComplex) -> HComplex {
        let p = self.bits;
        let r = self.norm_sqr(a).ln(p, RM, &mut self.cc);
        HComplex {
            re: r.div(&self.real(2.0), p, RM),
            im: self.atan2(&a.im, &a.re),
        }
    }

    fn atan2(&mut self, y: &BigFloat, x: &BigFloat) -> BigFloat {
        let p = self.bits;
        if x.is_zero() {
            let half = self.pi().div(&self.real(2.0), p, RM);
            return if y.is_negative() {
                half.neg()
            } else if y.is_zero() {
                self.real(0.0)
            } else {
                half
            };
        }
        let t = y.div(x, p, RM).atan(p, RM, &mut self.cc);
        if x.is_positive() {
            t
        } else if y.is_negative() {
            t.sub(&self.pi(), p, RM)
        } else {
            t.add(&self.pi(), p, RM)
        }
    }

    fn coeffs(&mut self, n: u32, k: i64) -> [BigFloat; 3] {
        [self.int(&a_seq(n, k - 1)), self.int(&a_seq(n, k)), self.int(&a_seq(n, k + 1))]
    }

    /// `(a u - b) / (c u - d)`.
    fn mobius(&self, u: &HComplex, a: &BigFloat, b: &BigFloat, c: &BigFloat, d: &BigFloat) -> HComplex {
        let p = self.bits;
        let num = HComplex {
            re: u.re.mul(a, p, RM).sub(b, p, RM),
            im: u.im.mul(a, p, RM),
        };
        let den = HComplex {
            re: u.re.mul(c, p, RM).sub(d, p, RM),
            im: u.im.mul(c, p, RM),
        };
        self.div(&num, &den)
    }

    pub fn psi_k(&mut self, n: u32, k: i64, w: &HComplex) -> HComplex {
        let [prev, cur, next] = self.coeffs(n, k);
        let u = self.exp(w);
        let v = self.mobius(&u, &next, &cur, &cur, &prev);
        self.ln(&v)
    }

    pub fn psi_k_inv(&mut self, n: u32, k: i64, w: &HComplex) -> HComplex {
        let [prev, cur, next] = self.coeffs(n, k);
        let v = self.exp(w);
        // (a_k - a_{k-1} v) / (a_{k+1} - a_k v) = (a_{k-1} v - a_k) / (a_k v - a_{k+1})
        let u = self.mobius(&v, &prev, &cur, &cur, &next);
        self.ln(&u)
    }

    /// `log(a_k e^w - a_{k-1})`, with the `n = 1` branch shift of the `f64` path.
    fn log_charge_ratio(&mut self, n: u32, k: i64, w: &HComplex) -> HComplex {
        let (r, q) = if n == 1 { (k.rem_euclid(3), k.div_euclid(3)) } else { (k, 0) };
        let [prev, cur, _] = self.coeffs(n, r);
        let u = self.exp(w);
        let t = HComplex {
            re: u.re.mul(&cur, self.bits, RM).sub(&prev, self.bits, RM),
            im: u.im.mul(&cur, self.bits, RM),
        };
        let mut out = self.ln(&t);
        if q != 0 {
            let shift = self.pi().mul(&self.real(q as f64), self.bits, RM);
            out.im = out.im.add(&shift, self.bits, RM);
        }
        out
    }

    pub fn phi_k(&mut self, n: u32, k: i64, z: &HComplex, w: &HComplex) -> (HComplex, HComplex) {
        let l = self.log_charge_ratio(n, k, w);
        (self.add(z, &l), self.psi_k(n, k, w))
    }

    pub fn phi_k_inv(&mut self, n: u32, k: i64, z: &HComplex, w: &HComplex) -> (HComplex, HComplex) {
        let w0 = self.psi_k_inv(n, k, w);
        let l = self.log_charge_ratio(n, k, &w0);
        (self.sub(z, &l), w0)
    }

    pub fn g_k(&mut self, n: u32, k: i64, z: &HComplex, w: &HComplex) -> (HComplex, HComplex) {
        let [prev, cur, next] = self.coeffs(n, k);
        let ez = self.exp(z);
        let zw = self.add(z, w);
        let ezw = self.exp(&zw);
        (
            self.sub(&self.scale(&ez, &next), &self.scale(&ezw, &cur)),
            self.sub(&self.scale(&ez, &cur), &self.scale(&ezw, &prev)),
        )
    }

    /// `[a_k e^w - a_{k+1} : a_{k-1} e^w - a_k]`, rescaled before rounding.
    pub fn chi(&mut self, n: u32, k: i64, w: &HComplex) -> Result<ProjPoint> {
        let [prev, cur, next] = self.coeffs(n, k);
        let u = self.exp(w);
        let p = self.bits;
        let x0 = HComplex {
            re: u.re.mul(&cur, p, RM).sub(&next, p, RM),
            im: u.im.mul(&cur, p, RM),
        };
        let x1 = HComplex {
            re: u.re.mul(&prev, p, RM).sub(&cur, p, RM),
            im: u.im.mul(&prev, p, RM),
        };
        let big = if self.norm_sqr(&x0).cmp(&self.norm_sqr(&x1)).unwrap_or(0) >= 0 {
            x0.clone()
        } else {
            x1.clone()
        };
        let (y0, y1) = (self.div(&x0, &big), self.div(&x1, &big));
        ProjPoint::new(self.to_c64(&y0), self.to_c64(&y1))
    }

    /// Phase of `S_j` at the chart 0 point `(z, w)`.
    pub fn exceptional_phase(&mut self, n: u32, j: i64, z: &HComplex, w: &HComplex) -> BigFloat {
        let l = self.log_charge_ratio(n, j, w);
        let pi = self.pi();
        z.im.add(&l.im, self.bits, RM).div(&pi, self.bits, RM)
    }

    pub fn sub_real(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.bits, RM)
    }
}

impl Default for Ctx {
    fn default() -> Self {
        Self::new(DEFAULT_BITS).expect("constant cache")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas;

    #[test]
    fn elementary_functions() {
        let mut ctx = Ctx::default();
        let z = ctx.c(Complex64::new(0.3, -1.7));
        let e = ctx.exp(&z);
        let back = ctx.ln(&e);
        assert!((ctx.to_c64(&back) - Complex64::new(0.3, -1.7)).norm() < 1e-16);
        let minus_one = ctx.c(Complex64::new(-1.0, 0.0));
        let l = ctx.ln(&minus_one);
        assert!((ctx.to_c64(&l).im - std::f64::consts::PI).abs() < 1e-16);
    }

    #[test]
    fn agrees_with_f64_path_near_chart_zero() {
        let mut ctx = Ctx::default();
        let (z, w) = (Complex64::new(0.1, 0.2), Complex64::new(-0.4, 1.3));
        for n in 1..=3 {
            for k in -3..=3 {
                let (zf, wf) = atlas::phi_k(n, k, z, w).unwrap();
                let (zc, wc) = (ctx.c(z), ctx.c(w));
                let (zh, wh) = ctx.phi_k(n, k, &zc, &wc);
                assert!((ctx.to_c64(&zh) - zf).norm() < 1e-12 && (ctx.to_c64(&wh) - wf).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn far_charts_keep_precision() {
        let mut ctx = Ctx::default();
        let (z, w) = (ctx.c(Complex64::new(0.1, 0.2)), ctx.c(Complex64::new(-0.4, 1.3)));
        let (zk, wk) = ctx.phi_k(5, 8, &z, &w);
        let (g0, g1) = ctx.g_k(5, 8, &zk, &wk);
        let zw = ctx.add(&z, &w);
        let (e0, e1) = (ctx.exp(&z), ctx.exp(&zw));
        let err = ctx.to_f64(&ctx.norm(&ctx.sub(&g0, &e0))) + ctx.to_f64(&ctx.norm(&ctx.sub(&g1, &e1)));
        assert!(err < 1e-30);
    }
}
