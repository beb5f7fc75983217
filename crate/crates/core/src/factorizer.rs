//! Factoring monic integer polynomials by rounding products of subsets of
//! approximate roots and confirming each candidate by exact division.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exact::{poly_order, IntPoly};
use crate::mp::{roots_of_intpoly, MpComplex, MpError, RootSet};

pub const MAX_DEGREE: usize = 20;
/// Rounding accepted below this distance.
pub const ACCEPT: f64 = 1.0 / 4294967296.0;
/// Distances between `ACCEPT` and this bound are undecided at the current precision.
pub const GREY: f64 = 1.0 / 65536.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FactorError {
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("polynomial is not squarefree")]
    NotSquarefree,
    #[error("degree {0} exceeds the subset search limit")]
    DegreeTooLarge(usize),
    #[error("not divisible")]
    NotDivisible,
    #[error("rounding still undecided at {bits} bits")]
    PrecisionExhausted { bits: usize },
    #[error(transparent)]
    Roots(#[from] MpError),
}

/// Quotient `h / d` over the integers for monic `d`.
pub fn exact_divide(h: &IntPoly, d: &IntPoly) -> Result<IntPoly, FactorError> {
    if !d.is_monic() {
        return Err(FactorError::NotMonic);
    }
    let dd = d.degree().unwrap();
    let Some(hd) = h.degree() else {
        return Ok(IntPoly::new(vec![]));
    };
    if hd < dd {
        return if h.is_zero() { Ok(h.clone()) } else { Err(FactorError::NotDivisible) };
    }
    let mut r: Vec<BigInt> = h.coeffs().to_vec();
    let mut q = vec![BigInt::zero(); hd - dd + 1];
    for i in (0..=hd - dd).rev() {
        let c = r[i + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (k, dk) in d.coeffs().iter().enumerate() {
            r[i + k] -= &c * dk;
        }
        q[i] = c;
    }
    if r.iter().any(|c| !c.is_zero()) {
        return Err(FactorError::NotDivisible);
    }
    Ok(IntPoly::new(q))
}

/// One rounded subset product. `rounded` is present when every coefficient
/// was within `GREY` of an integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundingDecision {
    pub subset: Vec<usize>,
    pub rounded: Option<IntPoly>,
    pub accepted: bool,
}

#[derive(Debug, Clone)]
pub struct Factorization {
    /// Sorted by degree, then coefficients.
    pub factors: Vec<IntPoly>,
    pub roots: RootSet,
    /// Factor index of each root.
    pub root_assignment: Vec<usize>,
    pub decisions: Vec<RoundingDecision>,
    pub bits: usize,
}

impl Factorization {
    pub fn product(&self) -> IntPoly {
        IntPoly::product(&self.factors)
    }
}

pub fn is_squarefree(h: &IntPoly) -> bool {
    let g = h.to_rat().gcd(&h.derivative().to_rat());
    g.degree().unwrap_or(0) == 0
}

fn subset_product(roots: &[MpComplex], idx: &[usize], bits: usize) -> Vec<MpComplex> {
    let mut c = vec![MpComplex::one(bits)];
    for &i in idx {
        let r = &roots[i];
        let mut next = vec![MpComplex::zero(bits); c.len() + 1];
        for (k, ck) in c.iter().enumerate() {
            next[k + 1] = &next[k + 1] + ck;
            next[k] = &next[k] - &(ck * r);
        }
        c = next;
    }
    c
}

/// `(rounded, worst distance)`; `None` when some coefficient is past `GREY`.
fn round_coeffs(c: &[MpComplex]) -> (Option<IntPoly>, f64) {
    let mut out = Vec::with_capacity(c.len());
    let mut worst = 0.0f64;
    for x in c {
        match x.round_real() {
            Some((k, e)) => {
                worst = worst.max(e);
                out.push(k);
            }
            None => return (None, f64::INFINITY),
        }
    }
    if worst < GREY {
        (Some(IntPoly::new(out)), worst)
    } else {
        (None, worst)
    }
}

/// Next mask with the same popcount (Gosper), or `None` past `n` bits.
fn next_mask(m: u32, n: usize) -> Option<u32> {
    let c = m & m.wrapping_neg();
    let r = m + c;
    let next = (((r ^ m) >> 2) / c) | r;
    (next < (1u32 << n)).then_some(next)
}

enum Attempt {
    Done(Vec<(IntPoly, Vec<usize>)>, Vec<RoundingDecision>),
    Undecided,
}

fn attempt(h: &IntPoly, roots: &[MpComplex], bits: usize) -> Attempt {
    let mut remaining: Vec<usize> = (0..roots.len()).collect();
    let mut current = h.clone();
    let mut found = Vec::new();
    let mut decisions = Vec::new();
    let mut grey = false;
    let mut card = 1;
    while !remaining.is_empty() {
        if card >= remaining.len() {
            found.push((current.clone(), remaining.clone()));
            decisions.push(RoundingDecision {
                subset: remaining.clone(),
                rounded: Some(current.clone()),
                accepted: true,
            });
            break;
        }
        // subsets of positions in `remaining`, increasing bitmask
        let mut mask: u32 = (1 << card) - 1;
        let mut accepted = None;
        loop {
            let subset: Vec<usize> = (0..remaining.len())
                .filter(|&p| mask >> p & 1 == 1)
                .map(|p| remaining[p])
                .collect();
            let c = subset_product(roots, &subset, bits);
            let (rounded, worst) = round_coeffs(&c);
            let mut ok = false;
            if let Some(d) = &rounded {
                if worst < ACCEPT {
                    ok = exact_divide(&current, d).is_ok();
                } else {
                    grey = true;
                }
            }
            decisions.push(RoundingDecision {
                subset: subset.clone(),
                rounded,
                accepted: ok,
            });
            if ok {
                accepted = Some(subset);
                break;
            }
            match next_mask(mask, remaining.len()) {
                Some(m) => mask = m,
                None => break,
            }
        }
        match accepted {
            Some(subset) => {
                let d = decisions.last().unwrap().rounded.clone().unwrap();
                current = exact_divide(&current, &d).expect("checked above");
                remaining.retain(|r| !subset.contains(r));
                found.push((d, subset));
            }
            None => card += 1,
        }
    }
    if grey {
        Attempt::Undecided
    } else {
        Attempt::Done(found, decisions)
    }
}

/// Irreducible factorization of a monic squarefree `h`.
pub fn factor_over_z(h: &IntPoly, bits: usize) -> Result<Factorization, FactorError> {
    factor_with_limit(h, bits, bits * 8)
}

pub fn factor_with_limit(h: &IntPoly, bits: usize, max_bits: usize) -> Result<Factorization, FactorError> {
    if !h.is_monic() {
        return Err(FactorError::NotMonic);
    }
    let deg = h.degree().unwrap();
    if deg > MAX_DEGREE {
        return Err(FactorError::DegreeTooLarge(deg));
    }
    if !is_squarefree(h) {
        return Err(FactorError::NotSquarefree);
    }
    let mut b = bits;
    loop {
        let roots = match roots_of_intpoly(h, b) {
            Ok(r) => Some(r),
            Err(e) if b * 2 > max_bits => return Err(e.into()),
            Err(_) => None,
        };
        if let Some(roots) = roots {
            if let Attempt::Done(found, decisions) = attempt(h, &roots.roots, b) {
                let mut order: Vec<usize> = (0..found.len()).collect();
                order.sort_by(|&x, &y| poly_order(&found[x].0, &found[y].0));
                let mut root_assignment = vec![0; roots.roots.len()];
                let mut factors = Vec::with_capacity(found.len());
                for (slot, &i) in order.iter().enumerate() {
                    for &r in &found[i].1 {
                        root_assignment[r] = slot;
                    }
                    factors.push(found[i].0.clone());
                }
                debug_assert_eq!(IntPoly::product(&factors), *h);
                return Ok(Factorization {
                    factors,
                    roots,
                    root_assignment,
                    decisions,
                    bits: b,
                });
            }
            if b * 2 > max_bits {
                return Err(FactorError::PrecisionExhausted { bits: b });
            }
        }
        b *= 2;
    }
}

/// Whether `f` has a rational integer root, by trial over divisors of the constant term.
pub fn has_integer_root(f: &IntPoly) -> bool {
    let c0 = f.coeff(0).abs();
    if c0.is_zero() {
        return true;
    }
    let mut d = BigInt::one();
    while &d * &d <= c0 {
        if (&c0 % &d).is_zero() {
            for r in [d.clone(), -d.clone(), &c0 / &d, -(&c0 / &d)] {
                if f.eval(&r).is_zero() {
                    return true;
                }
            }
        }
        d += 1;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    #[test]
    fn divide_examples() {
        let h1 = p(&[-732096, -240, 1]);
        assert_eq!(exact_divide(&h1, &p(&[744, 1])).unwrap(), p(&[-984, 1]));
        assert_eq!(exact_divide(&h1, &h1).unwrap(), p(&[1]));
        assert_eq!(exact_divide(&p(&[1, 0, 1]), &p(&[1, 1])), Err(FactorError::NotDivisible));
        assert_eq!(exact_divide(&h1, &p(&[1, 2])), Err(FactorError::NotMonic));
    }

    #[test]
    fn level1_and_29() {
        let f = factor_over_z(&p(&[-732096, -240, 1]), 128).unwrap();
        assert_eq!(f.factors, vec![p(&[-984, 1]), p(&[744, 1])]);
        let f6 = p(&[-4, -32, -83, -66, -17, 2, 1]);
        let h29 = p(&[2, 1]).mul(&f6);
        let f = factor_over_z(&h29, 192).unwrap();
        assert_eq!(f.factors, vec![p(&[2, 1]), f6.clone()]);
        assert_eq!(f.root_assignment.iter().filter(|&&i| i == 1).count(), 6);
        assert!(!has_integer_root(&f6));
    }

    #[test]
    fn irreducible_quadratic() {
        let f = factor_over_z(&p(&[-2, 0, 1]), 128).unwrap();
        assert_eq!(f.factors, vec![p(&[-2, 0, 1])]);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(factor_over_z(&p(&[1, 0, 2]), 128).unwrap_err(), FactorError::NotMonic);
        assert_eq!(
            factor_over_z(&p(&[1, 2, 1]), 128).unwrap_err(),
            FactorError::NotSquarefree
        );
    }

    #[test]
    fn masks_in_increasing_order() {
        let mut m = 0b11;
        let mut seen = vec![m];
        while let Some(x) = next_mask(m, 4) {
            seen.push(x);
            m = x;
        }
        assert_eq!(seen, vec![0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]);
    }
}
