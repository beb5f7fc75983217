//! Multiprecision complex arithmetic over `astro-float` reals, the principal
//! complex logarithm, and an Aberth-Ehrlich simultaneous root finder.

use std::cell::RefCell;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::exact::{BigRat, IntPoly};

pub const DEFAULT_BITS: usize = 192;
const RM: RoundingMode = RoundingMode::ToEven;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MpError {
    #[error("logarithm of zero")]
    DomainError,
    #[error("root finder did not converge in {iterations} iterations at {bits} bits")]
    NoConvergence { iterations: usize, bits: usize },
    #[error("cannot parse {0:?} as a number")]
    Parse(String),
}

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants cache"));
}

fn with_cc<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

// ---------------------------------------------------------------------------
// real helpers

pub fn real_from_bigint(n: &BigInt, bits: usize) -> BigFloat {
    if n.is_zero() {
        return BigFloat::from_word(0, bits);
    }
    let (sign, words) = n.to_u64_digits();
    let s = if sign == num_bigint::Sign::Minus {
        Sign::Neg
    } else {
        Sign::Pos
    };
    let e = 64 * words.len() as i32;
    let mut f = BigFloat::from_words(&words, s, e);
    let _ = f.set_precision(bits.max(64), RM);
    f
}

pub fn real_from_rat(r: &BigRat, bits: usize) -> BigFloat {
    let n = real_from_bigint(r.numer(), bits + 64);
    let d = real_from_bigint(r.denom(), bits + 64);
    n.div(&d, bits, RM)
}

/// Exact integer value of an integral float; `None` for NaN or infinity.
fn integral_to_bigint(f: &BigFloat) -> Option<BigInt> {
    if f.is_zero() {
        return Some(BigInt::zero());
    }
    let (m, _, s, e, _) = f.as_raw_parts()?;
    let mut n = BigInt::from_slice(
        num_bigint::Sign::Plus,
        &m.iter().flat_map(|w| [*w as u32, (*w >> 32) as u32]).collect::<Vec<_>>(),
    );
    let shift = e as i64 - 64 * m.len() as i64;
    if shift >= 0 {
        n <<= shift as usize;
    } else {
        n >>= (-shift) as usize;
    }
    Some(if s == Sign::Neg { -n } else { n })
}

/// Nearest integer and the absolute rounding error.
pub fn real_round(f: &BigFloat) -> Option<(BigInt, f64)> {
    let r = f.round(0, RoundingMode::ToEven);
    let n = integral_to_bigint(&r)?;
    let err = real_to_f64(&f.sub(&r, f.precision()?.max(64), RM)).abs();
    Some((n, err))
}

pub fn real_to_f64(f: &BigFloat) -> f64 {
    if f.is_zero() {
        return 0.0;
    }
    match f.as_raw_parts() {
        Some((m, _, s, e, _)) => {
            let top = *m.last().unwrap_or(&0) as f64;
            let v = top * 2f64.powi(e - 64);
            if s == Sign::Neg {
                -v
            } else {
                v
            }
        }
        None => f64::NAN,
    }
}

pub fn real_parse(s: &str, bits: usize) -> Result<BigFloat, MpError> {
    let f = with_cc(|cc| BigFloat::parse(s.trim(), astro_float::Radix::Dec, bits, RM, cc));
    if f.is_nan() {
        Err(MpError::Parse(s.into()))
    } else {
        Ok(f)
    }
}

/// Fixed-point decimal rendering with `digits` places after the point.
pub fn real_to_decimal(f: &BigFloat, digits: usize) -> String {
    let bits = f.precision().unwrap_or(DEFAULT_BITS) + 4 * digits + 64;
    let scale = real_from_bigint(&num_traits::pow(BigInt::from(10), digits), bits);
    let scaled = f.mul(&scale, bits, RM);
    let (n, _) = real_round(&scaled).unwrap_or((BigInt::zero(), 0.0));
    let neg = n.is_negative();
    let mut s = n.abs().to_string();
    if digits > 0 {
        if s.len() <= digits {
            s = format!("{}{}", "0".repeat(digits + 1 - s.len()), s);
        }
        s.insert(s.len() - digits, '.');
    }
    if neg {
        s.insert(0, '-');
    }
    s
}

pub fn real_sqrt(x: &BigFloat, bits: usize) -> BigFloat {
    x.sqrt(bits, RM)
}

fn real_pi(bits: usize) -> BigFloat {
    with_cc(|cc| cc.pi(bits, RM))
}

fn atan2(y: &BigFloat, x: &BigFloat, bits: usize) -> BigFloat {
    let pi = real_pi(bits + 64);
    if x.is_zero() {
        let half = pi.div(&BigFloat::from_word(2, 64), bits, RM);
        return if y.is_negative() { half.neg() } else { half };
    }
    let t = with_cc(|cc| y.div(x, bits + 32, RM).atan(bits + 32, RM, cc));
    let r = if x.is_positive() {
        t
    } else if y.is_negative() && !y.is_zero() {
        t.sub(&pi, bits + 32, RM)
    } else {
        t.add(&pi, bits + 32, RM)
    };
    let mut r = r;
    let _ = r.set_precision(bits, RM);
    r
}

// ---------------------------------------------------------------------------
// complex numbers

/// Complex number with binary precision `bits`; mixed-precision operations
/// take the larger precision.
#[derive(Clone)]
pub struct MpComplex {
    re: BigFloat,
    im: BigFloat,
    bits: usize,
}

impl MpComplex {
    pub fn new(re: BigFloat, im: BigFloat, bits: usize) -> Self {
        let (mut re, mut im) = (re, im);
        let _ = re.set_precision(bits, RM);
        let _ = im.set_precision(bits, RM);
        MpComplex { re, im, bits }
    }

    pub fn zero(bits: usize) -> Self {
        Self::from_i64(0, bits)
    }

    pub fn one(bits: usize) -> Self {
        Self::from_i64(1, bits)
    }

    pub fn i(bits: usize) -> Self {
        Self::new(BigFloat::from_word(0, bits), BigFloat::from_word(1, bits), bits)
    }

    pub fn from_i64(x: i64, bits: usize) -> Self {
        Self::new(BigFloat::from_i64(x, bits), BigFloat::from_word(0, bits), bits)
    }

    pub fn from_f64(re: f64, im: f64, bits: usize) -> Self {
        Self::new(BigFloat::from_f64(re, bits), BigFloat::from_f64(im, bits), bits)
    }

    pub fn from_bigint(n: &BigInt, bits: usize) -> Self {
        Self::new(real_from_bigint(n, bits), BigFloat::from_word(0, bits), bits)
    }

    pub fn from_rat(r: &BigRat, bits: usize) -> Self {
        Self::new(real_from_rat(r, bits), BigFloat::from_word(0, bits), bits)
    }

    pub fn from_real(re: BigFloat, bits: usize) -> Self {
        Self::new(re, BigFloat::from_word(0, bits), bits)
    }

    pub fn parse(re: &str, im: &str, bits: usize) -> Result<Self, MpError> {
        Ok(Self::new(real_parse(re, bits)?, real_parse(im, bits)?, bits))
    }

    pub fn pi(bits: usize) -> Self {
        Self::from_real(real_pi(bits), bits)
    }

    /// `exp(2 pi i k / n)`
    pub fn root_of_unity(n: u64, k: i64, bits: usize) -> Self {
        let k = k.rem_euclid(n as i64);
        let w = bits + 32;
        let theta = real_pi(w)
            .mul(&BigFloat::from_i64(2 * k, 64), w, RM)
            .div(&BigFloat::from_u64(n, 64), w, RM);
        Self::new(BigFloat::from_word(0, w), theta, w).exp().with_bits(bits)
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn with_bits(&self, bits: usize) -> Self {
        Self::new(self.re.clone(), self.im.clone(), bits)
    }

    pub fn re(&self) -> &BigFloat {
        &self.re
    }

    pub fn im(&self) -> &BigFloat {
        &self.im
    }

    pub fn re_f64(&self) -> f64 {
        real_to_f64(&self.re)
    }

    pub fn im_f64(&self) -> f64 {
        real_to_f64(&self.im)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), BigFloat::neg(&self.im), self.bits)
    }

    pub fn norm_sqr(&self) -> BigFloat {
        let p = self.bits;
        self.re.mul(&self.re, p, RM).add(&self.im.mul(&self.im, p, RM), p, RM)
    }

    pub fn abs(&self) -> BigFloat {
        self.norm_sqr().sqrt(self.bits, RM)
    }

    pub fn abs_f64(&self) -> f64 {
        let (a, b) = (self.re_f64(), self.im_f64());
        if a.is_finite() && b.is_finite() && (a != 0.0 || b != 0.0) && a.abs().max(b.abs()) > 1e-280 {
            a.hypot(b)
        } else {
            real_to_f64(&self.abs())
        }
    }

    /// `|self - o|` as a float.
    pub fn dist(&self, o: &MpComplex) -> f64 {
        (self - o).abs_f64()
    }

    pub fn scale(&self, r: &BigFloat) -> Self {
        let p = self.bits;
        Self::new(self.re.mul(r, p, RM), self.im.mul(r, p, RM), p)
    }

    pub fn scale_i64(&self, k: i64) -> Self {
        self.scale(&BigFloat::from_i64(k, 64))
    }

    pub fn exp(&self) -> Self {
        let p = self.bits + 16;
        let (m, c, s) = with_cc(|cc| {
            (
                self.re.exp(p, RM, cc),
                self.im.cos(p, RM, cc),
                self.im.sin(p, RM, cc),
            )
        });
        Self::new(m.mul(&c, p, RM), m.mul(&s, p, RM), self.bits)
    }

    /// Principal logarithm, imaginary part in `(-pi, pi]`.
    pub fn ln(&self) -> Result<Self, MpError> {
        if self.is_zero() {
            return Err(MpError::DomainError);
        }
        let p = self.bits + 32;
        let half = BigFloat::from_f64(0.5, 64);
        let n = self.re.mul(&self.re, p, RM).add(&self.im.mul(&self.im, p, RM), p, RM);
        let re = with_cc(|cc| n.ln(p, RM, cc)).mul(&half, p, RM);
        let im = atan2(&self.im, &self.re, p);
        Ok(Self::new(re, im, self.bits))
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut out = Self::one(self.bits);
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                out = &out * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        out
    }

    pub fn recip(&self) -> Self {
        &Self::one(self.bits) / self
    }

    /// Nearest Gaussian-free integer: the rounded real part, with the
    /// distance to it (including the imaginary part).
    pub fn round_real(&self) -> Option<(BigInt, f64)> {
        let (n, e) = real_round(&self.re)?;
        Some((n, e.hypot(self.im_f64().abs())))
    }

    pub fn to_decimal(&self, digits: usize) -> (String, String) {
        (real_to_decimal(&self.re, digits), real_to_decimal(&self.im, digits))
    }
}

impl fmt::Debug for MpComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.to_decimal(30);
        write!(f, "{a} + {b}i")
    }
}

impl fmt::Display for MpComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        let (a, b) = self.to_decimal(digits);
        if b.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
            write!(f, "{a}")
        } else if let Some(mag) = b.strip_prefix('-') {
            write!(f, "{a}-{mag}i")
        } else {
            write!(f, "{a}+{b}i")
        }
    }
}

impl<'a> Add<&'a MpComplex> for &'a MpComplex {
    type Output = MpComplex;
    fn add(self, o: &MpComplex) -> MpComplex {
        let p = self.bits.max(o.bits);
        MpComplex::new(self.re.add(&o.re, p, RM), self.im.add(&o.im, p, RM), p)
    }
}

impl<'a> Sub<&'a MpComplex> for &'a MpComplex {
    type Output = MpComplex;
    fn sub(self, o: &MpComplex) -> MpComplex {
        let p = self.bits.max(o.bits);
        MpComplex::new(self.re.sub(&o.re, p, RM), self.im.sub(&o.im, p, RM), p)
    }
}

impl<'a> Mul<&'a MpComplex> for &'a MpComplex {
    type Output = MpComplex;
    fn mul(self, o: &MpComplex) -> MpComplex {
        let p = self.bits.max(o.bits);
        let w = p + 8;
        let re = self.re.mul(&o.re, w, RM).sub(&self.im.mul(&o.im, w, RM), p, RM);
        let im = self.re.mul(&o.im, w, RM).add(&self.im.mul(&o.re, w, RM), p, RM);
        MpComplex::new(re, im, p)
    }
}

impl<'a> Div<&'a MpComplex> for &'a MpComplex {
    type Output = MpComplex;
    fn div(self, o: &MpComplex) -> MpComplex {
        let p = self.bits.max(o.bits);
        let w = p + 16;
        let d = o.re.mul(&o.re, w, RM).add(&o.im.mul(&o.im, w, RM), w, RM);
        let re = self.re.mul(&o.re, w, RM).add(&self.im.mul(&o.im, w, RM), w, RM);
        let im = self.im.mul(&o.re, w, RM).sub(&self.re.mul(&o.im, w, RM), w, RM);
        MpComplex::new(re.div(&d, p, RM), im.div(&d, p, RM), p)
    }
}

impl Neg for &MpComplex {
    type Output = MpComplex;
    fn neg(self) -> MpComplex {
        MpComplex::new(BigFloat::neg(&self.re), BigFloat::neg(&self.im), self.bits)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<MpComplex> for MpComplex {
            type Output = MpComplex;
            fn $m(self, o: MpComplex) -> MpComplex {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

// ---------------------------------------------------------------------------
// polynomial roots

/// Roots of an integer polynomial with per-root inclusion radii.
#[derive(Clone, Debug)]
pub struct RootSet {
    pub roots: Vec<MpComplex>,
    pub certified_radius: Vec<f64>,
    pub residuals: Vec<f64>,
    pub bits: usize,
}

/// Evaluates `p` and `p'` at `z` by Horner's rule.
pub fn eval_with_derivative(coeffs: &[MpComplex], z: &MpComplex) -> (MpComplex, MpComplex) {
    let bits = z.bits;
    let mut p = MpComplex::zero(bits);
    let mut dp = MpComplex::zero(bits);
    for c in coeffs.iter().rev() {
        dp = &(&dp * z) + &p;
        p = &(&p * z) + c;
    }
    (p, dp)
}

pub fn eval_intpoly(p: &IntPoly, z: &MpComplex) -> MpComplex {
    let mut acc = MpComplex::zero(z.bits);
    for c in p.coeffs().iter().rev() {
        acc = &(&acc * z) + &MpComplex::from_bigint(c, z.bits);
    }
    acc
}

/// All complex roots of `p` by Aberth-Ehrlich iteration from a deterministic
/// start on a circle sized by the coefficient bound.
pub fn roots_of_intpoly(p: &IntPoly, bits: usize) -> Result<RootSet, MpError> {
    let d = p.degree().unwrap_or(0);
    if d == 0 {
        return Ok(RootSet {
            roots: vec![],
            certified_radius: vec![],
            residuals: vec![],
            bits,
        });
    }
    let w = bits + 32;
    let coeffs: Vec<MpComplex> = p.coeffs().iter().map(|c| MpComplex::from_bigint(c, w)).collect();
    let lead_signed = p.coeff(d).to_f64().unwrap_or(1.0);
    let lead = lead_signed.abs();
    let bound = (0..d)
        .map(|i| {
            let a = p.coeff(i).to_f64().unwrap_or(f64::MAX).abs() / lead;
            a.powf(1.0 / (d - i) as f64)
        })
        .fold(0.0f64, f64::max)
        * 2.0;
    let radius = bound.max(1.0);
    let center = -p.coeff(d - 1).to_f64().unwrap_or(0.0) / (d as f64 * lead_signed);
    let mut z: Vec<MpComplex> = (0..d)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / d as f64 + 0.4;
            MpComplex::from_f64(center + radius * t.cos(), radius * t.sin(), w)
        })
        .collect();

    let tol = 2f64.powi(-(bits as i32) + 8);
    let max_iter = 400 + 20 * d;
    let mut converged = vec![false; d];
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let mut all = true;
        for k in 0..d {
            if converged[k] {
                continue;
            }
            let (pv, dpv) = eval_with_derivative(&coeffs, &z[k]);
            if pv.is_zero() {
                converged[k] = true;
                continue;
            }
            let ratio = &pv / &dpv;
            let mut s = MpComplex::zero(w);
            for j in 0..d {
                if j != k {
                    s = &s + &(&z[k] - &z[j]).recip();
                }
            }
            let denom = &MpComplex::one(w) - &(&ratio * &s);
            let step = &ratio / &denom;
            let scale = z[k].abs_f64().max(1.0);
            if step.abs_f64() <= tol * scale {
                converged[k] = true;
            } else {
                all = false;
            }
            z[k] = &z[k] - &step;
        }
        if all {
            break;
        }
    }

    let lead_c = &coeffs[d];
    let mut residuals = Vec::with_capacity(d);
    let mut radii = Vec::with_capacity(d);
    let limit = 2f64.powi(-(bits as i32) / 2);
    for k in 0..d {
        let (pv, _) = eval_with_derivative(&coeffs, &z[k]);
        let r = pv.abs_f64();
        let mut prod = lead_c.clone();
        for j in 0..d {
            if j != k {
                prod = &prod * &(&z[k] - &z[j]);
            }
        }
        let rad = d as f64 * r / prod.abs_f64();
        if !(r < limit) || !rad.is_finite() {
            return Err(MpError::NoConvergence { iterations, bits });
        }
        residuals.push(r);
        radii.push(rad);
    }
    Ok(RootSet {
        roots: z.into_iter().map(|r| r.with_bits(bits)).collect(),
        certified_radius: radii,
        residuals,
        bits,
    })
}

/// Runs [`roots_of_intpoly`] with precision doubling until it succeeds.
pub fn roots_with_escalation(p: &IntPoly, bits: usize, max_bits: usize) -> Result<RootSet, MpError> {
    let mut b = bits;
    loop {
        match roots_of_intpoly(p, b) {
            Ok(r) => return Ok(r),
            Err(e) if b * 2 > max_bits => return Err(e),
            Err(_) => b *= 2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bigint_round_trip() {
        for s in ["0", "1", "-7", "123456789012345678901234567890", "-18446744073709551616"] {
            let n: BigInt = s.parse().unwrap();
            let f = real_from_bigint(&n, 256);
            assert_eq!(real_round(&f).unwrap().0, n, "{s}");
        }
    }

    #[test]
    fn decimal_rendering() {
        let third = real_from_rat(&BigRat::new(1.into(), 3.into()), 128);
        assert_eq!(real_to_decimal(&third, 5), "0.33333");
        assert_eq!(real_to_decimal(&third.neg(), 3), "-0.333");
        let x = real_parse("-2.5", 128).unwrap();
        assert_eq!(real_to_decimal(&x, 2), "-2.50");
    }

    #[test]
    fn exp_zero_is_one() {
        let z = MpComplex::zero(DEFAULT_BITS).exp();
        assert!(z.dist(&MpComplex::one(DEFAULT_BITS)) < 1e-50);
    }

    #[test]
    fn log_of_minus_one() {
        let l = MpComplex::from_i64(-1, DEFAULT_BITS).ln().unwrap();
        let ipi = &MpComplex::i(DEFAULT_BITS) * &MpComplex::pi(DEFAULT_BITS);
        assert!(l.dist(&ipi) < 1e-55);
        assert_eq!(MpComplex::zero(64).ln().unwrap_err(), MpError::DomainError);
    }

    #[test]
    fn half_log_exp_is_sqrt() {
        let z = MpComplex::from_i64(29, DEFAULT_BITS);
        let half = MpComplex::from_rat(&BigRat::new(1.into(), 2.into()), DEFAULT_BITS);
        let r = (&half * &z.ln().unwrap()).exp();
        let direct = BigFloat::from_word(29, 64).sqrt(DEFAULT_BITS, RM);
        assert!(r.dist(&MpComplex::from_real(direct, DEFAULT_BITS)) < 1e-55);
        assert!(r.to_decimal(11).0.starts_with("5.38516480713"));
    }

    #[test]
    fn log_branches_in_each_quadrant() {
        for (re, im, arg) in [
            (1.0, 1.0, std::f64::consts::FRAC_PI_4),
            (-1.0, 1.0, 3.0 * std::f64::consts::FRAC_PI_4),
            (-1.0, -1.0, -3.0 * std::f64::consts::FRAC_PI_4),
            (1.0, -1.0, -std::f64::consts::FRAC_PI_4),
            (0.0, 2.0, std::f64::consts::FRAC_PI_2),
            (0.0, -2.0, -std::f64::consts::FRAC_PI_2),
        ] {
            let l = MpComplex::from_f64(re, im, 128).ln().unwrap();
            assert!((l.im_f64() - arg).abs() < 1e-15, "{re} {im}");
        }
    }

    #[test]
    fn simple_roots() {
        let r = roots_of_intpoly(&IntPoly::from_i64(&[2, 1]), 128).unwrap();
        assert!(r.roots[0].dist(&MpComplex::from_i64(-2, 128)) < 1e-30);
        let r = roots_of_intpoly(&IntPoly::from_i64(&[1, 0, 1]), 128).unwrap();
        let i = MpComplex::i(128);
        let mi = -&i;
        assert!(r.roots.iter().any(|z| z.dist(&i) < 1e-30));
        assert!(r.roots.iter().any(|z| z.dist(&mi) < 1e-30));
    }

    #[test]
    fn sextic_roots() {
        let p = IntPoly::from_i64(&[-4, -32, -83, -66, -17, 2, 1]);
        let r = roots_of_intpoly(&p, DEFAULT_BITS).unwrap();
        let a = MpComplex::parse("4.92450092087802125617", "0", DEFAULT_BITS).unwrap();
        let b = MpComplex::parse("-3.04937112671524243019", "0", DEFAULT_BITS).unwrap();
        assert!(r.roots.iter().any(|z| z.dist(&a) < 1e-20));
        assert!(r.roots.iter().any(|z| z.dist(&b) < 1e-20));
        assert!(r.certified_radius.iter().all(|&x| x < 1e-40));
    }
}
