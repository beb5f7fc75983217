//! Elliptic points, their discriminants, values of `j_N` at them, and the
//! bookkeeping that groups singular moduli into class-field generators.

use std::collections::{BTreeMap, BTreeSet};

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{BigRat, IntPoly, QSeries};
use crate::mp::{real_from_rat, real_sqrt, MpComplex};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassError {
    #[error("a^2 v^2 + b c N = {got}, expected -{v}")]
    DeterminantMismatch { got: i64, v: i64 },
    #[error("invalid element: {0}")]
    InvalidGamma(String),
    #[error("discriminant {d} of {form:?} is not -4v or -v with v | {n}")]
    BadDiscriminant { d: i64, form: (i64, i64, i64), n: u32 },
    #[error("series does not converge at the point: tail bound {bound:e} > {tol:e}")]
    NonConvergent { bound: f64, tol: f64 },
    #[error("value {value} has nearest root {nearest} but second nearest only {second:e} away ({reason})")]
    AmbiguousMatch {
        value: usize,
        nearest: usize,
        second: f64,
        reason: &'static str,
    },
    #[error("value {value} is {dist:e} from the nearest root")]
    Unmatched { value: usize, dist: f64 },
    #[error("{values} values against {roots} roots")]
    CountMismatch { values: usize, roots: usize },
    #[error("factor {factor} has roots with discriminants {d1} and {d2}")]
    FactorSplitAcrossDiscriminants { factor: usize, d1: i64, d2: i64 },
    #[error("factor {factor} of degree {degree} for D = {d}, class number {class_number}")]
    DegreeMismatch {
        factor: usize,
        d: i64,
        degree: usize,
        class_number: u64,
    },
    #[error("discriminant must be negative and 0 or 1 mod 4, got {0}")]
    InvalidDiscriminant(i64),
}

/// Integer data `(a, b, c, v)` of the order-two element with fixed point
/// `(a v + i sqrt v) / (c N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gamma {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub v: i64,
}

/// `re + i * im_scale * sqrt(sqrt_arg)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EllipticPoint {
    pub re: BigRat,
    pub sqrt_arg: u64,
    pub im_scale: BigRat,
    pub order: u8,
    pub gamma: Option<Gamma>,
}

impl EllipticPoint {
    pub fn imag_f64(&self) -> f64 {
        self.im_scale.to_f64().unwrap_or(f64::NAN) * (self.sqrt_arg as f64).sqrt()
    }

    pub fn to_mp(&self, bits: usize) -> MpComplex {
        let w = bits + 16;
        let s = real_from_rat(&self.im_scale, w);
        let r = real_sqrt(&BigFloat::from_u64(self.sqrt_arg, 64), w);
        let im = s.mul(&r, w, astro_float::RoundingMode::ToEven);
        MpComplex::new(real_from_rat(&self.re, w), im, bits)
    }
}

impl std::fmt::Display for EllipticPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if !self.re.is_zero() {
            write!(f, "{} + ", self.re)?;
        }
        let (num, den) = (self.im_scale.numer(), self.im_scale.denom());
        f.write_str("i")?;
        if !num.is_one() {
            write!(f, "*{num}")?;
        }
        if self.sqrt_arg != 1 {
            write!(f, "*sqrt({})", self.sqrt_arg)?;
        }
        if !den.is_one() {
            write!(f, "/{den}")?;
        }
        Ok(())
    }
}

pub fn fixed_point(g: Gamma, n: u32) -> Result<EllipticPoint, ClassError> {
    let nn = n as i64;
    if g.v <= 0 || nn % g.v != 0 {
        return Err(ClassError::InvalidGamma(format!("v = {} does not divide {n}", g.v)));
    }
    if g.c <= 0 {
        return Err(ClassError::InvalidGamma(format!("c = {} is not positive", g.c)));
    }
    let det = g.a * g.a * g.v * g.v + g.b * g.c * nn;
    if det != -g.v {
        return Err(ClassError::DeterminantMismatch { got: det, v: g.v });
    }
    let den = BigInt::from(g.c * nn);
    Ok(EllipticPoint {
        re: BigRat::new(BigInt::from(g.a * g.v), den.clone()),
        sqrt_arg: g.v as u64,
        im_scale: BigRat::new(BigInt::from(1), den),
        order: 2,
        gamma: Some(g),
    })
}

// ---------------------------------------------------------------------------
// discriminants

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointClassification {
    pub quadratic: (i64, i64, i64),
    pub discriminant: i64,
    pub v: u64,
    pub order_descriptor: String,
}

pub fn order_descriptor(d: i64) -> (u64, String) {
    if d % 4 == 0 {
        let v = (-d / 4) as u64;
        (v, format!("Z[sqrt(-{v})]"))
    } else {
        let v = (-d) as u64;
        (v, format!("Z[({v}+sqrt(-{v}))/2]"))
    }
}

pub fn quadratic_from_point(e: &EllipticPoint, n: u32) -> Result<PointClassification, ClassError> {
    // (X - e)(X - conj e) = X^2 - 2 re X + (re^2 + s^2 v')
    let b = -(&e.re * BigInt::from(2));
    let c = &e.re * &e.re + &e.im_scale * &e.im_scale * BigInt::from(e.sqrt_arg);
    let den = b.denom().lcm(c.denom());
    let (mut qa, mut qb, mut qc) = (
        den.clone(),
        (&b * BigRat::from_integer(den.clone())).to_integer(),
        (&c * BigRat::from_integer(den)).to_integer(),
    );
    let g = qa.gcd(&qb).gcd(&qc);
    qa /= &g;
    qb /= &g;
    qc /= &g;
    let form = (
        qa.to_i64().expect("small form"),
        qb.to_i64().expect("small form"),
        qc.to_i64().expect("small form"),
    );
    let d = form.1 * form.1 - 4 * form.0 * form.2;
    let bad = ClassError::BadDiscriminant { d, form, n };
    if d >= 0 {
        return Err(bad);
    }
    let (v, desc) = order_descriptor(d);
    let divides = (n as u64).is_multiple_of(v);
    let squarefree = (2..).take_while(|p| p * p <= v).all(|p| v % (p * p) != 0);
    // -3 and -4 occur at points of order 3, 4, 6 regardless of the level
    let small = e.order > 2 && (d == -3 || d == -4);
    if !(squarefree && (divides || small)) {
        return Err(bad);
    }
    Ok(PointClassification {
        quadratic: form,
        discriminant: d,
        v,
        order_descriptor: desc,
    })
}

/// Discriminant of `c N X^2 - 2 a v X - b` made primitive.
pub fn discriminant_from_gamma(g: Gamma, n: u32) -> i64 {
    let (a2, b2, c2) = (g.c * n as i64, -2 * g.a * g.v, -g.b);
    let k = a2.gcd(&b2).gcd(&c2);
    let (a2, b2, c2) = (a2 / k, b2 / k, c2 / k);
    b2 * b2 - 4 * a2 * c2
}

// ---------------------------------------------------------------------------
// evaluation

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub value: MpComplex,
    pub error_bound: f64,
    pub abs_q: f64,
    pub terms: usize,
}

fn ln_abs_int(x: &BigInt) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let b = x.bits();
    if b < 900 {
        x.abs().to_f64().unwrap().ln()
    } else {
        let top: BigInt = x.abs() >> (b - 64);
        top.to_f64().unwrap().ln() + (b - 64) as f64 * std::f64::consts::LN_2
    }
}

fn ln_abs(x: &BigRat) -> f64 {
    ln_abs_int(x.numer()) - ln_abs_int(x.denom())
}

/// Tail estimate `|a(K) q^K| |q| / (1 - |q| g)` with `g` the largest
/// coefficient ratio over the last five terms.
pub fn tail_bound(j: &QSeries, abs_q: f64) -> f64 {
    let c = j.coeffs();
    let k_last = j.truncation() - 1;
    let lnq = abs_q.ln();
    let tail: Vec<f64> = c.iter().rev().take(6).map(ln_abs).collect();
    let mut g = f64::NEG_INFINITY;
    for w in tail.windows(2) {
        if w[0].is_finite() && w[1].is_finite() {
            g = g.max(w[0] - w[1]);
        }
    }
    let ln_last = tail.iter().copied().find(|x| x.is_finite()).unwrap_or(f64::NEG_INFINITY);
    if ln_last == f64::NEG_INFINITY {
        return 0.0;
    }
    let ratio = if g.is_finite() { (lnq + g).exp() } else { abs_q };
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    (ln_last + lnq * (k_last + 1) as f64).exp() / (1.0 - ratio)
}

/// `j(e) = sum a(k) q^k` with `q = exp(2 pi i e)`.
pub fn evaluate_j_at(
    j: &QSeries,
    e: &EllipticPoint,
    bits: usize,
    tol: f64,
) -> Result<Evaluation, ClassError> {
    let w = bits + 32;
    let z = e.to_mp(w);
    let two_pi = MpComplex::pi(w).scale_i64(2);
    let iz = MpComplex::new(BigFloat::neg(z.im()), z.re().clone(), w);
    let q = (&two_pi * &iz).exp();
    let abs_q = q.abs_f64();
    let bound = tail_bound(j, abs_q);
    if !(bound <= tol) {
        return Err(ClassError::NonConvergent { bound, tol });
    }
    let mut acc = MpComplex::zero(w);
    for c in j.coeffs().iter().rev() {
        acc = &(&acc * &q) + &MpComplex::from_rat(c, w);
    }
    let mut value = acc;
    let m = j.min_exponent();
    if m < 0 {
        value = &value / &q.powi((-m) as u32);
    } else if m > 0 {
        value = &value * &q.powi(m as u32);
    }
    Ok(Evaluation {
        value: value.with_bits(bits),
        error_bound: bound,
        abs_q,
        terms: j.coeffs().len(),
    })
}

// ---------------------------------------------------------------------------
// matching

pub const MATCH_TOLERANCE: f64 = 1e-6;
pub const SEPARATION_FACTOR: f64 = 100.0;

#[derive(Debug, Clone)]
pub struct MatchEntry {
    pub point: usize,
    pub value: MpComplex,
    pub root_index: usize,
    pub root: MpComplex,
    pub factor: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, Default)]
pub struct MatchTable {
    pub entries: Vec<MatchEntry>,
}

impl MatchTable {
    pub fn factor_of_point(&self, point: usize) -> Option<usize> {
        self.entries.iter().find(|e| e.point == point).map(|e| e.factor)
    }
}

/// Greedy nearest-root assignment in value order. `root_factor[i]` is the
/// factor owning root `i`.
pub fn match_values_to_roots(
    values: &[MpComplex],
    roots: &[MpComplex],
    root_factor: &[usize],
    tol: f64,
) -> Result<MatchTable, ClassError> {
    if values.len() != roots.len() || root_factor.len() != roots.len() {
        return Err(ClassError::CountMismatch {
            values: values.len(),
            roots: roots.len(),
        });
    }
    let mut claimed = vec![false; roots.len()];
    let mut entries = Vec::with_capacity(values.len());
    for (i, v) in values.iter().enumerate() {
        let mut d: Vec<(f64, usize)> = roots.iter().enumerate().map(|(k, r)| (v.dist(r), k)).collect();
        d.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (d1, k) = d[0];
        if d1 > tol {
            return Err(ClassError::Unmatched { value: i, dist: d1 });
        }
        if let Some(&(d2, _)) = d.get(1) {
            if d2 < SEPARATION_FACTOR * d1 {
                return Err(ClassError::AmbiguousMatch {
                    value: i,
                    nearest: k,
                    second: d2,
                    reason: "roots not separated",
                });
            }
        }
        if claimed[k] {
            return Err(ClassError::AmbiguousMatch {
                value: i,
                nearest: k,
                second: d.get(1).map_or(f64::INFINITY, |x| x.0),
                reason: "root already claimed",
            });
        }
        claimed[k] = true;
        entries.push(MatchEntry {
            point: i,
            value: v.clone(),
            root_index: k,
            root: roots[k].clone(),
            factor: root_factor[k],
            residual: d1,
        });
    }
    Ok(MatchTable { entries })
}

// ---------------------------------------------------------------------------
// binary quadratic forms

/// Primitive positive definite form `a x^2 + b xy + c y^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Form {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl Form {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        Form { a, b, c }
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_reduced(&self) -> bool {
        let Form { a, b, c } = *self;
        b.abs() <= a && a <= c && !((b.abs() == a || a == c) && b < 0)
    }

    pub fn reduce(self) -> Form {
        let Form { mut a, mut b, mut c } = self;
        loop {
            if b.abs() > a || b == -a {
                // translate b into (-a, a]
                let two_a = 2 * a;
                let mut r = b.rem_euclid(two_a);
                if r > a {
                    r -= two_a;
                }
                let k = (r - b) / two_a;
                c += k * b + k * k * a;
                b = r;
            }
            if a > c {
                std::mem::swap(&mut a, &mut c);
                b = -b;
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            return Form { a, b, c };
        }
    }

    pub fn identity(d: i64) -> Form {
        if d.rem_euclid(4) == 0 {
            Form::new(1, 0, -d / 4)
        } else {
            Form::new(1, 1, (1 - d) / 4)
        }
    }

    /// Gaussian composition, reduced.
    pub fn compose(self, o: Form) -> Form {
        let d = self.discriminant();
        let (f1, f2) = if self.a > o.a { (o, self) } else { (self, o) };
        let s = (f1.b + f2.b) / 2;
        let n = f2.b - s;
        let (y1, dd) = if f2.a % f1.a == 0 {
            (0, f1.a)
        } else {
            let e = f2.a.extended_gcd(&f1.a);
            (e.x, e.gcd)
        };
        let (x2, y2, d1) = if s % dd == 0 {
            (0, -1, dd)
        } else {
            let e = s.extended_gcd(&dd);
            (e.x, -e.y, e.gcd)
        };
        let v1 = f1.a / d1;
        let v2 = f2.a / d1;
        let r = (y1 * y2 * n - x2 * f2.c).rem_euclid(v1);
        let b3 = f2.b + 2 * v2 * r;
        let a3 = v1 * v2;
        let c3 = (b3 * b3 - d) / (4 * a3);
        Form::new(a3, b3, c3).reduce()
    }
}

/// The reduced primitive forms of discriminant `d`.
pub fn reduced_forms(d: i64) -> Result<Vec<Form>, ClassError> {
    if d >= 0 || !matches!(d.rem_euclid(4), 0 | 1) {
        return Err(ClassError::InvalidDiscriminant(d));
    }
    let mut out = Vec::new();
    let mut a = 1;
    while 3 * a * a <= -d {
        for b in -a + 1..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            let f = Form::new(a, b, c);
            if c >= a && f.is_reduced() && a.gcd(&b).gcd(&c) == 1 {
                out.push(f);
            }
        }
        a += 1;
    }
    Ok(out)
}

/// Number of reduced primitive forms of discriminant `d`.
pub fn class_number_oracle(d: i64) -> Result<u64, ClassError> {
    Ok(reduced_forms(d)?.len() as u64)
}

fn prime_factors(mut v: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= v {
        if v.is_multiple_of(p) {
            out.push(p);
            while v.is_multiple_of(p) {
                v /= p;
            }
        }
        p += 1;
    }
    if v > 1 {
        out.push(v);
    }
    out
}

/// The ambiguous forms attached to the primes dividing `v`, for `d = -4v` or `d = -v`.
pub fn ambiguous_generators(d: i64) -> Vec<Form> {
    let (v, _) = order_descriptor(d);
    let vi = v as i64;
    prime_factors(v)
        .into_iter()
        .map(|p| {
            let p = p as i64;
            if d % 4 == 0 {
                Form::new(p, 0, vi / p).reduce()
            } else {
                Form::new(p, p, (p * p + vi) / (4 * p)).reduce()
            }
        })
        .collect()
}

/// Size of the subgroup generated by `gens` in the form class group of `d`.
pub fn subgroup_order(d: i64, gens: &[Form]) -> usize {
    let mut seen = BTreeSet::from([Form::identity(d).reduce()]);
    let mut frontier: Vec<Form> = seen.iter().copied().collect();
    while let Some(f) = frontier.pop() {
        for g in gens {
            let h = f.compose(*g);
            if seen.insert(h) {
                frontier.push(h);
            }
        }
    }
    seen.len()
}

/// `h(d)` divided by the order of the subgroup of ambiguous classes attached
/// to the primes of `v`.
pub fn ambiguous_quotient_class_number(d: i64) -> Result<u64, ClassError> {
    let h = class_number_oracle(d)?;
    let k = subgroup_order(d, &ambiguous_generators(d)) as u64;
    Ok(h / k)
}

// ---------------------------------------------------------------------------
// class-field table

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassFieldRow {
    pub level: u32,
    pub discriminant: i64,
    pub order_descriptor: String,
    /// Degree of the generating polynomial.
    pub class_number: u64,
    pub generating_polynomial: IntPoly,
    pub factor_index: usize,
    /// Reduced-form count `h(D)`.
    pub form_class_number: u64,
    /// `h(D)` over the ambiguous classes of the primes dividing `v`.
    pub quotient_class_number: u64,
    pub points: Vec<usize>,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegerModulus {
    pub point: usize,
    pub order: u8,
    pub discriminant: Option<i64>,
    pub value: String,
    /// Distance from the matched root to `value`; absent when unmatched.
    pub distance: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassFieldTable {
    pub rows: Vec<ClassFieldRow>,
    /// Points of order above two and points fixed by an order-two element of `Gamma_0(N)`.
    pub integer_moduli: Vec<IntegerModulus>,
}

/// An order-two point is fixed by an element of `Gamma_0(N)` itself exactly
/// when its discriminant is `-4`.
pub fn is_gamma0_fixed(e: &EllipticPoint, c: &PointClassification) -> bool {
    e.order == 2 && c.discriminant == -4
}

pub fn build_class_field_table(
    level: u32,
    points: &[EllipticPoint],
    classes: &[PointClassification],
    matches: &MatchTable,
    factors: &[IntPoly],
) -> Result<ClassFieldTable, ClassError> {
    let mut table = ClassFieldTable::default();
    let mut label: BTreeMap<usize, i64> = BTreeMap::new();
    for (i, (e, c)) in points.iter().zip(classes).enumerate() {
        if e.order > 2 || is_gamma0_fixed(e, c) {
            let m = matches.entries.iter().find(|m| m.point == i);
            let (value, distance) = match m.and_then(|m| m.root.round_real()) {
                Some((k, dist)) => (k.to_string(), Some(dist)),
                None => (String::new(), None),
            };
            table.integer_moduli.push(IntegerModulus {
                point: i,
                order: e.order,
                discriminant: Some(c.discriminant),
                value,
                distance,
            });
        } else {
            label.insert(i, c.discriminant);
        }
    }
    let mut owner: BTreeMap<usize, i64> = BTreeMap::new();
    let mut mixed: Vec<usize> = Vec::new();
    for (&p, &d) in &label {
        let Some(f) = matches.factor_of_point(p) else { continue };
        match owner.get(&f).copied() {
            None => {
                owner.insert(f, d);
            }
            Some(d0) if d0 == d => {}
            // even levels: a factor over -4v and -v points is labelled -4v
            Some(d0) if level.is_multiple_of(2) && (d0 == 4 * d || d == 4 * d0) => {
                owner.insert(f, d0.min(d));
                if !mixed.contains(&f) {
                    mixed.push(f);
                }
            }
            Some(d0) => return Err(ClassError::FactorSplitAcrossDiscriminants { factor: f, d1: d0, d2: d }),
        }
    }
    let mut groups: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for &p in label.keys() {
        let d = matches.factor_of_point(p).and_then(|f| owner.get(&f).copied()).unwrap_or(label[&p]);
        groups.entry(d).or_default().push(p);
    }
    // a factor's remaining roots must not sit at integer-modulus points of another kind
    for m in &table.integer_moduli {
        if let (Some(f), Some(d)) = (matches.factor_of_point(m.point), m.discriminant) {
            if let Some(&d0) = owner.get(&f) {
                return Err(ClassError::FactorSplitAcrossDiscriminants { factor: f, d1: d0, d2: d });
            }
        }
    }
    for (&d, pts) in &groups {
        let form_h = class_number_oracle(d)?;
        let quot_h = ambiguous_quotient_class_number(d)?;
        let (_, desc) = order_descriptor(d);
        let mut fs: Vec<usize> = owner.iter().filter(|(_, &dd)| dd == d).map(|(&f, _)| f).collect();
        fs.sort();
        for &f in &fs {
            let poly = factors[f].clone();
            let deg = poly.degree().unwrap_or(0);
            let fpoints: Vec<usize> = pts
                .iter()
                .copied()
                .filter(|&p| matches.factor_of_point(p) == Some(f))
                .collect();
            let mut flags = Vec::new();
            if mixed.contains(&f) {
                flags.push(format!("roots at discriminants {d} and {}", d / 4));
            }
            if fs.len() > 1 {
                flags.push(format!("shares discriminant with {} factors", fs.len()));
            }
            if fpoints.len() != deg {
                flags.push(format!("{} points for degree {deg}", fpoints.len()));
            }
            if deg as u64 != quot_h {
                if level % 2 == 1 {
                    return Err(ClassError::DegreeMismatch {
                        factor: f,
                        d,
                        degree: deg,
                        class_number: quot_h,
                    });
                }
                flags.push(format!("degree {deg} differs from class number {quot_h}"));
            }
            table.rows.push(ClassFieldRow {
                level,
                discriminant: d,
                order_descriptor: desc.clone(),
                class_number: deg as u64,
                generating_polynomial: poly,
                factor_index: f,
                form_class_number: form_h,
                quotient_class_number: quot_h,
                points: fpoints,
                flags,
            });
        }
    }
    table.rows.sort_by(|a, b| {
        b.discriminant
            .cmp(&a.discriminant)
            .then_with(|| crate::exact::poly_order(&a.generating_polynomial, &b.generating_polynomial))
    });
    Ok(table)
}
