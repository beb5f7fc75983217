//! The differential equation `(1/2) Q(j) T + P(j) F = 0` satisfied by a
//! Hauptmodul, where `T = 2 S(j) j'^2` and `F = j'^4` after dividing out
//! `(2 pi)^4`. Builds and solves the linear system for `P`, `Q`, and runs
//! the recurrence that this identity imposes on the coefficients of `j`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exact::{
    poly_of_series, poly_sqrt_half, rat, solve_rational_system, BigRat, ExactError, IntPoly,
    QSeries, RatPoly,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("leading term mismatch: {0}")]
    LeadingTermMismatch(String),
    #[error("expansion known modulo q^{have}, need q^{need}")]
    InsufficientTruncation { have: i64, need: i64 },
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("solution has non-integer coefficient {0}")]
    NonIntegerCoefficients(String),
    #[error("coefficient of q^{exponent} in the residual is {value}")]
    ResidualNonzero { exponent: i64, value: String },
    #[error("coefficient a({k}) = {num}/{den} is not an integer")]
    NonIntegralCoefficient { k: i64, num: String, den: String },
    #[error("recurrence gives a({k}) = {computed}, expansion has {given}")]
    Inconsistent { k: i64, computed: String, given: String },
    #[error("need at least one elliptic point")]
    NoEllipticPoints,
}

/// `(q d/dq)^l j`.
pub fn normalized_derivative(j: &QSeries, l: u32) -> QSeries {
    j.derivative(l)
}

#[derive(Debug, Clone)]
pub struct OdeIngredients {
    pub t_series: QSeries,
    pub f_series: QSeries,
}

pub fn schwarzian_ingredients(j: &QSeries) -> Result<OdeIngredients, OdeError> {
    let d1 = normalized_derivative(j, 1);
    let d2 = normalized_derivative(j, 2);
    let d3 = normalized_derivative(j, 3);
    let t_series = d3.mul(&d1).scale(&rat(2)).sub(&d2.mul(&d2).scale(&rat(3)));
    let sq = d1.mul(&d1);
    let f_series = sq.mul(&sq);
    if t_series.min_exponent() != -2 || t_series.coeff(-2) != Some(rat(-1)) {
        return Err(OdeError::LeadingTermMismatch(format!(
            "T starts {:?}",
            t_series.coeffs().first()
        )));
    }
    if f_series.min_exponent() != -4 || f_series.coeff(-4) != Some(rat(1)) {
        return Err(OdeError::LeadingTermMismatch(format!(
            "F starts {:?}",
            f_series.coeffs().first()
        )));
    }
    Ok(OdeIngredients { t_series, f_series })
}

/// Closed form for the coefficient of `q^k` in `S(j) j'^2 / (2 pi)^4`.
pub fn b_coefficient(a: &QSeries, k: i64) -> Option<BigRat> {
    let at = |i: i64| a.coeff(i);
    let k1 = rat(k + 1);
    let mut b = -(&k1 * (&k1 * &k1 + rat(3) * &k1 + rat(1))) * at(k + 1)?;
    let mut s = BigRat::zero();
    for l in 1..k {
        let w = rat(l * l * (k - l) * (5 * l - 3 * k));
        s += w * at(l)? * at(k - l)?;
    }
    b += s / rat(2);
    Some(b)
}

// ---------------------------------------------------------------------------
// linear system

#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub n: usize,
    /// Exponent of `q` for each row.
    pub exponents: Vec<i64>,
    /// Columns `A_0..A_{n-1}` then `B_0..B_{n+1}`.
    pub matrix: Vec<Vec<BigRat>>,
    /// The constant term of each equation `sum M x + c = 0`.
    pub constants: Vec<BigRat>,
}

fn unknown_name(n: usize, col: usize) -> String {
    if col < n {
        format!("A_{{{col}}}")
    } else {
        format!("B_{{{}}}", col - n)
    }
}

fn push_term(out: &mut String, c: &BigRat, name: &str) {
    if c.is_zero() {
        return;
    }
    let neg = c.is_negative();
    if out.is_empty() {
        if neg {
            out.push('-');
        }
    } else {
        out.push_str(if neg { " - " } else { " + " });
    }
    let m = c.abs();
    if !m.is_one() || name.is_empty() {
        out.push_str(&m.to_string());
    }
    out.push_str(name);
}

impl LinearSystem {
    pub fn dim(&self) -> usize {
        2 * self.n + 2
    }

    pub fn rhs(&self) -> Vec<BigRat> {
        self.constants.iter().map(|c| -c).collect()
    }

    /// Row `r` as `sum M x + c`, omitting zero terms and unit coefficients.
    pub fn render(&self, r: usize) -> String {
        let mut s = String::new();
        for (col, c) in self.matrix[r].iter().enumerate() {
            push_term(&mut s, c, &unknown_name(self.n, col));
        }
        push_term(&mut s, &self.constants[r], "");
        if s.is_empty() {
            s.push('0');
        }
        s
    }
}

fn coeff_or_zero(s: &QSeries, e: i64) -> BigRat {
    s.coeff(e).unwrap_or_else(|| panic!("q^{e} beyond truncation of {s:?}"))
}

/// Equations from the coefficients of `q^{-n-3}, ..., q^{n-2}` in
/// `(y^{n+2} + sum B_i y^i)(j) T + (y^n + sum A_i y^i)(j) F`.
pub fn build_system(j: &QSeries, n: usize) -> Result<(LinearSystem, OdeIngredients), OdeError> {
    let need = 2 * n as i64 + 2;
    if j.truncation() < need {
        return Err(OdeError::InsufficientTruncation {
            have: j.truncation(),
            need,
        });
    }
    let ing = schwarzian_ingredients(j)?;
    let j = j.truncate(need);
    let pw = j.powers(n + 2);
    let jt: Vec<QSeries> = pw.iter().map(|p| p.mul(&ing.t_series)).collect();
    let jf: Vec<QSeries> = pw.iter().take(n + 1).map(|p| p.mul(&ing.f_series)).collect();
    let ni = n as i64;
    // the leading coefficient cancels identically
    let top = -ni - 4;
    let lead = coeff_or_zero(&jt[n + 2], top) + coeff_or_zero(&jf[n], top);
    let lower = (0..n).any(|i| !coeff_or_zero(&jf[i], top).is_zero())
        || (0..n + 2).any(|i| !coeff_or_zero(&jt[i], top).is_zero());
    if !lead.is_zero() || lower {
        return Err(OdeError::ResidualNonzero {
            exponent: top,
            value: lead.to_string(),
        });
    }
    let exponents: Vec<i64> = (-ni - 3..=ni - 2).collect();
    let mut matrix = Vec::with_capacity(exponents.len());
    let mut constants = Vec::with_capacity(exponents.len());
    for &e in &exponents {
        let mut row = Vec::with_capacity(2 * n + 2);
        row.extend((0..n).map(|i| coeff_or_zero(&jf[i], e)));
        row.extend((0..n + 2).map(|i| coeff_or_zero(&jt[i], e)));
        matrix.push(row);
        constants.push(coeff_or_zero(&jt[n + 2], e) + coeff_or_zero(&jf[n], e));
    }
    Ok((
        LinearSystem {
            n,
            exponents,
            matrix,
            constants,
        },
        ing,
    ))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OdeSolution {
    pub n: usize,
    pub p: IntPoly,
    pub q: IntPoly,
    pub h: IntPoly,
}

fn to_int(what: &str, c: &BigRat) -> Result<BigInt, OdeError> {
    if c.is_integer() {
        Ok(c.to_integer())
    } else {
        Err(OdeError::NonIntegerCoefficients(format!("{what} = {c}")))
    }
}

/// The residual `(1/2) Q(j) T + P(j) F`.
pub fn residual_series(j: &QSeries, ing: &OdeIngredients, p: &IntPoly, q: &IntPoly) -> QSeries {
    let half = q.to_rat();
    let half = RatPoly::new(half.coeffs().iter().map(|c| c / rat(2)).collect());
    let lhs = poly_of_series(&half, j).mul(&ing.t_series);
    let rhs = poly_of_series(&p.to_rat(), j).mul(&ing.f_series);
    lhs.add(&rhs)
}

pub fn assemble_and_solve(j: &QSeries, num_elliptic: usize) -> Result<OdeSolution, OdeError> {
    if num_elliptic == 0 {
        return Err(OdeError::NoEllipticPoints);
    }
    let n = 2 * (num_elliptic - 1);
    let (sys, ing) = build_system(j, n)?;
    let x = solve_rational_system(&sys.matrix, &sys.rhs())?;
    let mut pc = Vec::with_capacity(n + 1);
    for (i, c) in x[..n].iter().enumerate() {
        pc.push(to_int(&format!("A_{i}"), c)?);
    }
    pc.push(BigInt::one());
    let mut qc = Vec::with_capacity(n + 3);
    for (i, c) in x[n..].iter().enumerate() {
        qc.push(to_int(&format!("B_{i}"), c)? * 2);
    }
    qc.push(BigInt::from(2));
    let p = IntPoly::new(pc);
    let q = IntPoly::new(qc);
    let r = residual_series(j, &ing, &p, &q);
    for (i, c) in r.coeffs().iter().enumerate() {
        if !c.is_zero() {
            return Err(OdeError::ResidualNonzero {
                exponent: r.min_exponent() + i as i64,
                value: c.to_string(),
            });
        }
    }
    let h = poly_sqrt_half(&q)?;
    Ok(OdeSolution { n, p, q, h })
}

// ---------------------------------------------------------------------------
// recurrence

fn conv_at(a: &[BigInt], b: &[BigInt], t: usize) -> BigInt {
    let mut s = BigInt::zero();
    let lo = t.saturating_sub(b.len() - 1);
    for i in lo..=t.min(a.len() - 1) {
        if !a[i].is_zero() && !b[t - i].is_zero() {
            s += &a[i] * &b[t - i];
        }
    }
    s
}

/// Running state of the recurrence; index `t` of every array is offset so that
/// `t = 0` is the leading term.
struct Recurrence {
    n: usize,
    p: Vec<BigInt>,
    half_q: Vec<BigInt>,
    /// `a(t - 1)`
    jj: Vec<BigInt>,
    /// `(t - 1)^l a(t - 1)` for `l = 1, 2, 3`
    d: [Vec<BigInt>; 3],
    /// `[j^m]_{t - m}`
    pw: Vec<Vec<BigInt>>,
    /// `[(Dj)^2]_{t-2}`, `[T]_{t-2}`, `[F]_{t-4}`
    s2: Vec<BigInt>,
    t: Vec<BigInt>,
    f: Vec<BigInt>,
}

impl Recurrence {
    fn new(p: &IntPoly, q: &IntPoly) -> Self {
        let n = p.degree().unwrap_or(0);
        let half_q = q.coeffs().iter().map(|c| c / 2).collect();
        let mut pw = vec![vec![BigInt::one()]];
        for _ in 1..=n + 2 {
            pw.push(vec![BigInt::one()]);
        }
        let one = BigInt::one();
        Recurrence {
            n,
            p: p.coeffs().to_vec(),
            half_q,
            jj: vec![one.clone()],
            d: [vec![-&one], vec![one.clone()], vec![-&one]],
            pw,
            s2: vec![one.clone()],
            t: vec![-&one],
            f: vec![one],
        }
    }

    /// Next index to be filled, i.e. `K + 1` while solving for `a(K)`.
    fn len(&self) -> usize {
        self.jj.len()
    }

    /// Sets `a(K)` and fills every array at index `K + 1`.
    fn set_top(&mut self, a: BigInt, fresh: bool) {
        let t = self.len() - if fresh { 0 } else { 1 };
        let k = BigInt::from(t as i64 - 1);
        let vals = [&k * &a, &k * &k * &a, &k * &k * &k * &a];
        if fresh {
            self.jj.push(a);
            for (dl, v) in self.d.iter_mut().zip(vals) {
                dl.push(v);
            }
        } else {
            self.jj[t] = a;
            for (dl, v) in self.d.iter_mut().zip(vals) {
                dl[t] = v;
            }
        }
        let mut row = Vec::with_capacity(self.n + 3);
        row.push(BigInt::zero());
        for m in 1..=self.n + 2 {
            let v = if m == 1 {
                self.jj[t].clone()
            } else {
                let prev: &Vec<BigInt> = &self.pw[m - 1];
                let prev_top = if m - 1 == 1 { &self.jj[t] } else { &row[m - 1] };
                let mut s = conv_at(&prev[..t], &self.jj, t);
                s += prev_top * &self.jj[0];
                s
            };
            row.push(v);
        }
        for (m, v) in row.into_iter().enumerate().skip(1) {
            if fresh {
                self.pw[m].push(v);
            } else {
                self.pw[m][t] = v;
            }
        }
        if fresh {
            self.pw[0].push(BigInt::zero());
        }
        let s2 = conv_at(&self.d[0], &self.d[0], t);
        let tt = conv_at(&self.d[2], &self.d[0], t) * 2 - conv_at(&self.d[1], &self.d[1], t) * 3;
        if fresh {
            self.s2.push(s2);
            self.t.push(tt);
        } else {
            self.s2[t] = s2;
            self.t[t] = tt;
        }
        let ff = conv_at(&self.s2, &self.s2, t);
        if fresh {
            self.f.push(ff);
        } else {
            self.f[t] = ff;
        }
    }

    /// Coefficient of `q^{K - n - 3}` in the residual, `K + 1 = len - 1`.
    fn residual(&self) -> BigInt {
        let top = self.len() - 1;
        let n = self.n as i64;
        let k = top as i64 - 1;
        let mut r = BigInt::zero();
        for (m, c) in self.half_q.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let base = k - n - 1 + m as i64;
            if base < 0 {
                continue;
            }
            let s = conv_at(&self.pw[m], &self.t, base as usize);
            r += c * s;
        }
        for (m, c) in self.p.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let base = k - n + 1 + m as i64;
            if base < 0 {
                continue;
            }
            let s = conv_at(&self.pw[m], &self.f, base as usize);
            r += c * s;
        }
        r
    }
}

/// Extends a normalized integral expansion to `q^{k_max}` (exclusive) using
/// the recurrence forced by `P`, `Q`. Coefficients already present are
/// recomputed and checked.
pub fn extend_series(j: &QSeries, p: &IntPoly, q: &IntPoly, k_max: i64) -> Result<QSeries, OdeError> {
    if j.coeff(-1) != Some(rat(1)) {
        return Err(OdeError::LeadingTermMismatch("a(-1) must be 1".into()));
    }
    let mut rec = Recurrence::new(p, q);
    let mut out = vec![BigInt::one()];
    for k in 0..k_max {
        rec.set_top(BigInt::zero(), true);
        let r0 = rec.residual();
        let slope = BigInt::from(2) * BigInt::from(k + 1).pow(3);
        let (a, rem) = r0.div_rem(&slope);
        if !rem.is_zero() {
            return Err(OdeError::NonIntegralCoefficient {
                k,
                num: r0.to_string(),
                den: slope.to_string(),
            });
        }
        rec.set_top(a.clone(), false);
        let check = rec.residual();
        if !check.is_zero() {
            return Err(OdeError::ResidualNonzero {
                exponent: k - rec.n as i64 - 3,
                value: check.to_string(),
            });
        }
        if let Some(given) = j.coeff(k) {
            if given != BigRat::from_integer(a.clone()) {
                return Err(OdeError::Inconsistent {
                    k,
                    computed: a.to_string(),
                    given: given.to_string(),
                });
            }
        }
        out.push(a);
    }
    Ok(QSeries::from_ints(-1, &out))
}
