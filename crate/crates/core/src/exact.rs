//! Exact arithmetic: rationals, dense polynomials, truncated Laurent series in `q`,
//! and fraction-free linear solving.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type BigRat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("singular system: rank {rank} < dimension {dim}")]
    SingularSystem { rank: usize, dim: usize },
    #[error("matrix is not square ({rows}x{cols}) or rhs has length {rhs}")]
    Shape { rows: usize, cols: usize, rhs: usize },
    #[error("not a perfect square: {0}")]
    NotAPerfectSquare(String),
    #[error("coefficient {0} is not an integer")]
    NonInteger(String),
}

pub fn rat(n: i64) -> BigRat {
    BigRat::from_integer(BigInt::from(n))
}

/// Parses `"p"` or `"p/q"` into a reduced rational.
pub fn parse_rat(s: &str) -> Option<BigRat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRat::new(n, d))
        }
        None => Some(BigRat::from_integer(s.parse().ok()?)),
    }
}

// ---------------------------------------------------------------------------
// polynomials

/// Dense integer polynomial in `y`, ascending coefficients, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

/// Dense rational polynomial in `y`, ascending coefficients, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct RatPoly {
    coeffs: Vec<BigRat>,
}

fn trim<T: Zero>(v: &mut Vec<T>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        trim(&mut coeffs);
        IntPoly { coeffs }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// Parses ascending decimal coefficient strings.
    pub fn parse<S: AsRef<str>>(c: &[S]) -> Option<Self> {
        let v: Option<Vec<BigInt>> = c.iter().map(|s| s.as_ref().trim().parse().ok()).collect();
        v.map(Self::new)
    }

    pub fn one() -> Self {
        Self::from_i64(&[1])
    }

    /// `y - r`
    pub fn linear(r: i64) -> Self {
        Self::from_i64(&[-r, 1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| c.is_one())
    }

    pub fn mul(&self, o: &IntPoly) -> IntPoly {
        if self.is_zero() || o.is_zero() {
            return IntPoly::default();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    pub fn add(&self, o: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn scale(&self, c: &BigInt) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn eval(&self, y: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * y + c;
        }
        acc
    }

    pub fn to_rat(&self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| BigRat::from_integer(c.clone())).collect())
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }

    /// Product of a list of polynomials.
    pub fn product<'a, I: IntoIterator<Item = &'a IntPoly>>(it: I) -> IntPoly {
        it.into_iter().fold(IntPoly::one(), |acc, p| acc.mul(p))
    }

    /// Renders as `y^{12} + 8y^{11} + ... + 7248y + 624`.
    pub fn to_tex(&self) -> String {
        render_poly(&self.coeffs, "y", true)
    }
}

fn render_poly(c: &[BigInt], var: &str, tex: bool) -> String {
    if c.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, a) in c.iter().enumerate().rev() {
        if a.is_zero() {
            continue;
        }
        let neg = a.is_negative();
        let mag = a.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if !mag.is_one() || i == 0 {
            out.push_str(&mag.to_string());
        }
        match i {
            0 => {}
            1 => out.push_str(var),
            _ if tex => out.push_str(&format!("{var}^{{{i}}}")),
            _ => out.push_str(&format!("{var}^{i}")),
        }
    }
    out
}

impl serde::Serialize for IntPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for IntPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        IntPoly::parse(&v).ok_or_else(|| serde::de::Error::custom("integer coefficients expected"))
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_poly(&self.coeffs, "y", false))
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPoly({self})")
    }
}

/// Orders by degree, then lexicographically on ascending coefficients.
pub fn poly_order(a: &IntPoly, b: &IntPoly) -> std::cmp::Ordering {
    a.coeffs
        .len()
        .cmp(&b.coeffs.len())
        .then_with(|| a.coeffs.cmp(&b.coeffs))
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRat>) -> Self {
        trim(&mut coeffs);
        RatPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[BigRat] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRat {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn mul(&self, o: &RatPoly) -> RatPoly {
        if self.is_zero() || o.is_zero() {
            return RatPoly::default();
        }
        let mut out = vec![BigRat::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn div_rem(&self, d: &RatPoly) -> (RatPoly, RatPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.coeffs[dd].clone();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (RatPoly::default(), self.clone());
        }
        let mut q = vec![BigRat::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &lead;
            if !c.is_zero() {
                for (i, di) in d.coeffs.iter().enumerate() {
                    r[k + i] -= &c * di;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (RatPoly::new(q), RatPoly::new(r))
    }

    pub fn monic(&self) -> RatPoly {
        match self.coeffs.last() {
            None => RatPoly::default(),
            Some(l) => RatPoly::new(self.coeffs.iter().map(|c| c / l).collect()),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &RatPoly) -> RatPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    pub fn to_int(&self) -> Result<IntPoly, ExactError> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            if !c.is_integer() {
                return Err(ExactError::NonInteger(c.to_string()));
            }
            out.push(c.to_integer());
        }
        Ok(IntPoly::new(out))
    }
}

impl fmt::Debug for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "RatPoly[{}]", s.join(", "))
    }
}

// ---------------------------------------------------------------------------
// truncated Laurent series

/// Laurent series `sum c_k q^k` for `min_exponent <= k < truncation`, known modulo
/// `q^truncation`.
#[derive(Clone, PartialEq, Eq)]
pub struct QSeries {
    min_exponent: i64,
    coeffs: Vec<BigRat>,
}

impl QSeries {
    pub fn new(min_exponent: i64, coeffs: Vec<BigRat>) -> Self {
        QSeries {
            min_exponent,
            coeffs,
        }
    }

    pub fn from_ints(min_exponent: i64, coeffs: &[BigInt]) -> Self {
        Self::new(
            min_exponent,
            coeffs.iter().map(|c| BigRat::from_integer(c.clone())).collect(),
        )
    }

    /// Constant `c` known modulo `q^truncation`.
    pub fn constant(c: BigRat, truncation: i64) -> Self {
        let mut coeffs = vec![BigRat::zero(); truncation.max(0) as usize];
        if let Some(x) = coeffs.first_mut() {
            *x = c;
        }
        Self::new(0, coeffs)
    }

    pub fn min_exponent(&self) -> i64 {
        self.min_exponent
    }

    /// The series is known modulo `q^truncation`.
    pub fn truncation(&self) -> i64 {
        self.min_exponent + self.coeffs.len() as i64
    }

    pub fn coeffs(&self) -> &[BigRat] {
        &self.coeffs
    }

    /// Coefficient of `q^k`; zero below the minimum exponent, `None` past truncation.
    pub fn coeff(&self, k: i64) -> Option<BigRat> {
        if k >= self.truncation() {
            None
        } else if k < self.min_exponent {
            Some(BigRat::zero())
        } else {
            Some(self.coeffs[(k - self.min_exponent) as usize].clone())
        }
    }

    pub fn truncate(&self, t: i64) -> QSeries {
        let t = t.min(self.truncation()).max(self.min_exponent);
        QSeries::new(
            self.min_exponent,
            self.coeffs[..(t - self.min_exponent) as usize].to_vec(),
        )
    }

    pub fn scale(&self, c: &BigRat) -> QSeries {
        QSeries::new(self.min_exponent, self.coeffs.iter().map(|x| x * c).collect())
    }

    fn combine(&self, o: &QSeries, sign: i32) -> QSeries {
        let lo = self.min_exponent.min(o.min_exponent);
        let hi = self.truncation().min(o.truncation());
        let coeffs = (lo..hi.max(lo))
            .map(|k| {
                let a = self.coeff(k).unwrap_or_else(BigRat::zero);
                let b = o.coeff(k).unwrap_or_else(BigRat::zero);
                if sign > 0 {
                    a + b
                } else {
                    a - b
                }
            })
            .collect();
        QSeries::new(lo, coeffs)
    }

    pub fn add(&self, o: &QSeries) -> QSeries {
        self.combine(o, 1)
    }

    pub fn sub(&self, o: &QSeries) -> QSeries {
        self.combine(o, -1)
    }

    /// Adds a constant (exactly known) to the series.
    pub fn add_constant(&self, c: &BigRat) -> QSeries {
        if c.is_zero() || self.truncation() <= 0 {
            return self.clone();
        }
        let mut out = if self.min_exponent > 0 {
            let pad = self.min_exponent as usize;
            let mut v = vec![BigRat::zero(); pad];
            v.extend(self.coeffs.iter().cloned());
            QSeries::new(0, v)
        } else {
            self.clone()
        };
        let i = (-out.min_exponent) as usize;
        out.coeffs[i] += c;
        out
    }

    pub fn mul(&self, o: &QSeries) -> QSeries {
        series_mul(self, o)
    }

    /// `q d/dq` applied `l` times.
    pub fn derivative(&self, l: u32) -> QSeries {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let k = BigInt::from(self.min_exponent + i as i64);
                c * BigRat::from_integer(num_traits::pow(k, l as usize))
            })
            .collect();
        QSeries::new(self.min_exponent, coeffs)
    }

    /// Returns `[1, s, s^2, ..., s^m]`.
    pub fn powers(&self, m: usize) -> Vec<QSeries> {
        let mut out = Vec::with_capacity(m + 1);
        out.push(QSeries::constant(
            BigRat::one(),
            2 * (self.truncation() - self.min_exponent) + 8,
        ));
        for i in 1..=m {
            let next = if i == 1 {
                self.clone()
            } else {
                out[i - 1].mul(self)
            };
            out.push(next);
        }
        out
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }
}

impl fmt::Debug for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                parts.push(format!("({c})q^{}", self.min_exponent + i as i64));
            }
        }
        parts.push(format!("O(q^{})", self.truncation()));
        f.write_str(&parts.join(" + "))
    }
}

/// Exact product; the result is known modulo the tightest sound power of `q`.
pub fn series_mul(a: &QSeries, b: &QSeries) -> QSeries {
    let min = a.min_exponent + b.min_exponent;
    let trunc = (a.truncation() + b.min_exponent).min(b.truncation() + a.min_exponent);
    let len = (trunc - min).max(0) as usize;
    let mut out = vec![BigRat::zero(); len];
    for (i, x) in a.coeffs.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.coeffs.iter().enumerate() {
            if i + j >= len {
                break;
            }
            out[i + j] += x * y;
        }
    }
    QSeries::new(min, out)
}

/// `p(j)` by Horner's rule; `p` must be nonzero.
pub fn poly_of_series(p: &RatPoly, j: &QSeries) -> QSeries {
    let d = p.degree().expect("poly_of_series on zero polynomial");
    if d == 0 {
        return QSeries::constant(p.coeff(0), j.truncation());
    }
    let mut acc = j.scale(&p.coeff(d)).add_constant(&p.coeff(d - 1));
    for i in (0..d - 1).rev() {
        acc = acc.mul(j).add_constant(&p.coeff(i));
    }
    acc
}

// ---------------------------------------------------------------------------
// linear algebra

/// Solves `M x = rhs` exactly with Bareiss elimination and full pivoting.
pub fn solve_rational_system(m: &[Vec<BigRat>], rhs: &[BigRat]) -> Result<Vec<BigRat>, ExactError> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) || rhs.len() != n {
        return Err(ExactError::Shape {
            rows: n,
            cols: m.first().map_or(0, |r| r.len()),
            rhs: rhs.len(),
        });
    }
    // clear denominators row by row; the last column holds the right-hand side
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let l = row
                .iter()
                .chain(std::iter::once(b))
                .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
            row.iter()
                .chain(std::iter::once(b))
                .map(|c| (c * BigRat::from_integer(l.clone())).to_integer())
                .collect()
        })
        .collect();
    let mut cols: Vec<usize> = (0..n).collect();
    let mut prev = BigInt::one();
    for k in 0..n {
        let mut best: Option<(usize, usize, u64)> = None;
        for (i, row) in a.iter().enumerate().skip(k) {
            for (j, c) in row.iter().enumerate().take(n).skip(k) {
                if !c.is_zero() && best.is_none_or(|(_, _, b)| c.bits() > b) {
                    best = Some((i, j, c.bits()));
                }
            }
        }
        let Some((pi, pj, _)) = best else {
            return Err(ExactError::SingularSystem { rank: k, dim: n });
        };
        a.swap(k, pi);
        if pj != k {
            for row in a.iter_mut() {
                row.swap(k, pj);
            }
            cols.swap(k, pj);
        }
        let (top, rest) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in rest.iter_mut() {
            let f = row[k].clone();
            for j in k + 1..=n {
                row[j] = (&pivot_row[k] * &row[j] - &f * &pivot_row[j]) / &prev;
            }
            row[k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let mut x = vec![BigRat::zero(); n];
    for k in (0..n).rev() {
        let mut s = BigRat::from_integer(a[k][n].clone());
        for j in k + 1..n {
            s -= BigRat::from_integer(a[k][j].clone()) * &x[j];
        }
        x[k] = s / BigRat::from_integer(a[k][k].clone());
    }
    let mut out = vec![BigRat::zero(); n];
    for (k, &c) in cols.iter().enumerate() {
        out[c] = x[k].clone();
    }
    Ok(out)
}

/// Monic `h` with `2 h^2 = q`, built from the top coefficient down.
pub fn poly_sqrt_half(q: &IntPoly) -> Result<IntPoly, ExactError> {
    let d = q
        .degree()
        .ok_or_else(|| ExactError::NotAPerfectSquare("zero polynomial".into()))?;
    if d % 2 != 0 {
        return Err(ExactError::NotAPerfectSquare(format!("odd degree {d}")));
    }
    if q.coeff(d) != BigInt::from(2) {
        return Err(ExactError::NotAPerfectSquare(format!(
            "leading coefficient {} is not 2",
            q.coeff(d)
        )));
    }
    let two = BigInt::from(2);
    let half: Vec<BigInt> = q
        .coeffs()
        .iter()
        .map(|c| {
            if c.is_even() {
                Ok(c / &two)
            } else {
                Err(ExactError::NotAPerfectSquare(format!("odd coefficient {c}")))
            }
        })
        .collect::<Result<_, _>>()?;
    let m = d / 2;
    let mut h = vec![BigInt::zero(); m + 1];
    h[m] = BigInt::one();
    for k in 1..=m {
        // coefficient of y^(2m-k): 2 h[m-k] + sum over pairs strictly inside
        let e = 2 * m - k;
        let mut s = BigInt::zero();
        for i in (m - k + 1)..=m {
            let j = e - i;
            if j > m - k && j <= m {
                s += &h[i] * &h[j];
            }
        }
        let r = &half[e] - s;
        if !r.is_even() {
            return Err(ExactError::NotAPerfectSquare(format!(
                "coefficient of y^{} of the root is not an integer",
                m - k
            )));
        }
        h[m - k] = r / &two;
    }
    let h = IntPoly::new(h);
    if h.mul(&h).scale(&two) != *q {
        return Err(ExactError::NotAPerfectSquare("re-expansion differs".into()));
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(min: i64, c: &[i64]) -> QSeries {
        QSeries::new(min, c.iter().map(|&x| rat(x)).collect())
    }

    #[test]
    fn monomial_product() {
        let a = s(-1, &[1, 0, 0]);
        let p = series_mul(&a, &a);
        assert_eq!(p.min_exponent(), -2);
        assert_eq!(p.coeff(-2), Some(rat(1)));
        assert_eq!(p.coeff(-1), Some(rat(0)));
    }

    #[test]
    fn low_terms_squared() {
        // (q^-1 + 3q + O(q^2))^2 = q^-2 + 6 + O(q)
        let a = s(-1, &[1, 0, 3]);
        let p = series_mul(&a, &a);
        assert_eq!(p.truncation(), 1);
        assert_eq!(p, s(-2, &[1, 0, 6]));
        let sq = poly_of_series(&IntPoly::from_i64(&[0, 0, 1]).to_rat(), &a);
        assert_eq!(sq, p);
    }

    #[test]
    fn identity_factor() {
        let a = s(-1, &[1, 0, 3, 4]);
        let one = s(0, &[1, 0, 0, 0, 0]);
        assert_eq!(series_mul(&a, &one), a);
        assert_eq!(poly_of_series(&IntPoly::from_i64(&[0, 1]).to_rat(), &a), a);
        let c = poly_of_series(&IntPoly::from_i64(&[7]).to_rat(), &a);
        assert_eq!(c.coeff(0), Some(rat(7)));
        assert_eq!(c.coeff(1), Some(rat(0)));
    }

    #[test]
    fn derivative_scales() {
        assert_eq!(s(-1, &[1]).derivative(1), s(-1, &[-1]));
        assert_eq!(s(0, &[5, 0]).derivative(1), s(0, &[0, 0]));
        assert_eq!(s(2, &[1]).derivative(3), s(2, &[8]));
    }

    #[test]
    fn solve_examples() {
        let id = vec![vec![rat(1), rat(0)], vec![rat(0), rat(1)]];
        assert_eq!(solve_rational_system(&id, &[rat(3), rat(-2)]).unwrap(), vec![rat(3), rat(-2)]);
        let m = vec![vec![rat(1), rat(-1)], vec![rat(0), rat(1)]];
        assert_eq!(solve_rational_system(&m, &[rat(0), rat(48)]).unwrap(), vec![rat(48), rat(48)]);
        let sing = vec![vec![rat(1), rat(2)], vec![rat(1), rat(2)]];
        assert_eq!(
            solve_rational_system(&sing, &[rat(1), rat(1)]),
            Err(ExactError::SingularSystem { rank: 1, dim: 2 })
        );
    }

    #[test]
    fn solve_with_fractions() {
        let m = vec![
            vec![BigRat::new(1.into(), 2.into()), rat(3), rat(0)],
            vec![rat(0), BigRat::new(2.into(), 3.into()), rat(1)],
            vec![rat(5), rat(0), BigRat::new((-1).into(), 7.into())],
        ];
        let x = vec![rat(2), BigRat::new(1.into(), 3.into()), rat(-4)];
        let b: Vec<BigRat> = m
            .iter()
            .map(|r| r.iter().zip(&x).map(|(a, b)| a * b).sum())
            .collect();
        assert_eq!(solve_rational_system(&m, &b).unwrap(), x);
    }

    #[test]
    fn sqrt_half_examples() {
        let q1 = IntPoly::from_i64(&[1071929106432, 702812160, -2813184, -960, 2]);
        assert_eq!(poly_sqrt_half(&q1).unwrap(), IntPoly::from_i64(&[-732096, -240, 1]));
        assert_eq!(poly_sqrt_half(&IntPoly::from_i64(&[0, 0, 2])).unwrap(), IntPoly::from_i64(&[0, 1]));
        assert!(matches!(
            poly_sqrt_half(&IntPoly::from_i64(&[2, 2, 2])),
            Err(ExactError::NotAPerfectSquare(_))
        ));
    }

    #[test]
    fn gcd_and_division() {
        let a = IntPoly::from_i64(&[-1, 0, 1]).to_rat();
        let b = IntPoly::from_i64(&[1, 1]).to_rat();
        assert_eq!(a.gcd(&b), b);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q, IntPoly::from_i64(&[-1, 1]).to_rat());
        assert!(r.is_zero());
    }

    #[test]
    fn tex_rendering() {
        let p = IntPoly::from_i64(&[-4, -32, -83, -66, -17, 2, 1]);
        assert_eq!(p.to_tex(), "y^{6} + 2y^{5} - 17y^{4} - 66y^{3} - 83y^{2} - 32y - 4");
        assert_eq!(p.to_string(), "y^6 + 2y^5 - 17y^4 - 66y^3 - 83y^2 - 32y - 4");
        let q = IntPoly::from_i64(&[1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, -3]);
        assert_eq!(q.to_tex(), "-3y^{11} + 1");
    }
}
