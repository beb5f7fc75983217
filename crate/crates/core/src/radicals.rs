//! Radical towers over cyclotomic fields, evaluated numerically on every
//! branch and checked against the roots of their target polynomial.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{parse_rat, BigRat, IntPoly};
use crate::hauptmodul::ComplexFixture;
use crate::mp::{eval_intpoly, roots_of_intpoly, MpComplex, MpError};

pub const VERIFY_BITS: usize = 256;
pub const ROOT_RESIDUAL: f64 = 1e-20;
pub const CLUSTER: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RadicalError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("branch {branches:?} out of range")]
    BadBranch { branches: Vec<u32> },
    #[error("radicand of level {level} vanishes")]
    DomainError { level: usize },
    #[error("branch {branches:?} gives residual {residual:e}")]
    NotARoot { branches: Vec<u32>, residual: f64 },
    #[error("root {root} of the target is not produced by any branch")]
    CoverageGap { root: usize },
    #[error(transparent)]
    Mp(#[from] MpError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycloTerm {
    pub coeff: BigRat,
    pub zeta_power: u32,
    pub omega_exponents: Vec<u32>,
}

/// `sum coeff * zeta_n^p * prod omega_i^e_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CycloExpr {
    pub order: u32,
    pub terms: Vec<CycloTerm>,
}

impl CycloExpr {
    fn parse(order: u32, raw: &[(String, i64, Vec<u32>)], max_omega: usize) -> Result<Self, RadicalError> {
        let mut terms = Vec::with_capacity(raw.len());
        for (c, p, e) in raw {
            let coeff = parse_rat(c).ok_or_else(|| RadicalError::Schema(format!("coefficient {c:?}")))?;
            if e.iter().enumerate().any(|(i, &x)| x > 0 && i >= max_omega) {
                return Err(RadicalError::Schema(format!("term {e:?} uses an undefined omega")));
            }
            terms.push(CycloTerm {
                coeff,
                zeta_power: p.rem_euclid(order as i64) as u32,
                omega_exponents: e.clone(),
            });
        }
        Ok(CycloExpr { order, terms })
    }

    pub fn eval(&self, zeta: &[MpComplex], omega: &[MpComplex], bits: usize) -> MpComplex {
        let mut acc = MpComplex::zero(bits);
        for t in &self.terms {
            let mut x = &MpComplex::from_rat(&t.coeff, bits) * &zeta[t.zeta_power as usize];
            for (i, &e) in t.omega_exponents.iter().enumerate() {
                if e > 0 {
                    x = &x * &omega[i].powi(e);
                }
            }
            acc = &acc + &x;
        }
        acc
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TowerLevel {
    pub k: u32,
    pub radicand: CycloExpr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchValue {
    pub branches: Vec<u32>,
    pub re: String,
    pub im: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadicalTower {
    pub level: u32,
    pub order: u32,
    pub levels: Vec<TowerLevel>,
    pub value: CycloExpr,
    pub constant: BigRat,
    pub target: IntPoly,
    pub branch_values: Vec<BranchValue>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TowerLevelFixture {
    pub k: u32,
    pub radicand: Vec<(String, i64, Vec<u32>)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BranchValueFixture {
    pub branches: Vec<u32>,
    pub value: ComplexFixture,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TowerFixture {
    #[serde(rename = "N")]
    pub level: u32,
    pub n: u32,
    pub levels: Vec<TowerLevelFixture>,
    pub value: Vec<(String, i64, Vec<u32>)>,
    pub constant: String,
    pub target: Vec<String>,
    #[serde(default)]
    pub branch_values: Vec<BranchValueFixture>,
}

impl RadicalTower {
    pub fn from_fixture(f: &TowerFixture) -> Result<Self, RadicalError> {
        if f.n == 0 || f.levels.is_empty() {
            return Err(RadicalError::Schema("empty tower".into()));
        }
        let mut levels = Vec::with_capacity(f.levels.len());
        for (i, l) in f.levels.iter().enumerate() {
            if l.k == 0 {
                return Err(RadicalError::Schema(format!("level {i} has k = 0")));
            }
            levels.push(TowerLevel {
                k: l.k,
                radicand: CycloExpr::parse(f.n, &l.radicand, i)?,
            });
        }
        let target = IntPoly::parse(&f.target).ok_or_else(|| RadicalError::Schema("target".into()))?;
        let tower = RadicalTower {
            level: f.level,
            order: f.n,
            value: CycloExpr::parse(f.n, &f.value, levels.len())?,
            levels,
            constant: parse_rat(&f.constant).ok_or_else(|| RadicalError::Schema("constant".into()))?,
            target,
            branch_values: f
                .branch_values
                .iter()
                .map(|b| BranchValue {
                    branches: b.branches.clone(),
                    re: b.value.re.clone(),
                    im: b.value.im.clone(),
                })
                .collect(),
        };
        Ok(tower)
    }

    pub fn parse(json: &str) -> Result<Self, RadicalError> {
        let f: TowerFixture = serde_json::from_str(json).map_err(|e| RadicalError::Schema(e.to_string()))?;
        Self::from_fixture(&f)
    }

    pub fn branch_count(&self) -> usize {
        self.levels.iter().map(|l| l.k as usize).product()
    }

    /// All branch tuples, last level varying fastest.
    pub fn branch_tuples(&self) -> Vec<Vec<u32>> {
        let mut out = vec![vec![]];
        for l in &self.levels {
            out = out
                .into_iter()
                .flat_map(|p: Vec<u32>| {
                    (0..l.k).map(move |g| {
                        let mut q = p.clone();
                        q.push(g);
                        q
                    })
                })
                .collect();
        }
        out
    }
}

/// Tower fixtures for level `n` under `dir/towers/NNN_k.json`, in file order.
pub fn load_towers(dir: &Path, n: u32) -> Result<Vec<RadicalTower>, RadicalError> {
    let tdir = dir.join("towers");
    let Ok(rd) = std::fs::read_dir(&tdir) else {
        return Ok(vec![]);
    };
    let prefix = format!("{n:03}_");
    let mut paths: Vec<_> = rd
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|s| s.to_str())
                .is_some_and(|s| s.starts_with(&prefix) && s.ends_with(".json"))
        })
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let s = std::fs::read_to_string(p).map_err(|e| RadicalError::Schema(format!("{}: {e}", p.display())))?;
            RadicalTower::parse(&s)
        })
        .collect()
}

/// `omega_i = exp((log r_i + 2 pi i g_i) / k_i)` level by level, then the value.
pub fn evaluate_tower(t: &RadicalTower, branches: &[u32], bits: usize) -> Result<MpComplex, RadicalError> {
    if branches.len() != t.levels.len() || branches.iter().zip(&t.levels).any(|(&g, l)| g >= l.k) {
        return Err(RadicalError::BadBranch {
            branches: branches.to_vec(),
        });
    }
    let w = bits + 32;
    let zeta: Vec<MpComplex> = (0..t.order).map(|p| MpComplex::root_of_unity(t.order as u64, p as i64, w)).collect();
    let two_pi_i = &MpComplex::i(w) * &MpComplex::pi(w).scale_i64(2);
    let mut omega = Vec::with_capacity(t.levels.len());
    for (i, (l, &g)) in t.levels.iter().zip(branches).enumerate() {
        let r = l.radicand.eval(&zeta, &omega, w);
        let log = r.ln().map_err(|_| RadicalError::DomainError { level: i })?;
        let arg = &(&log + &two_pi_i.scale_i64(g as i64)) / &MpComplex::from_i64(l.k as i64, w);
        omega.push(arg.exp());
    }
    let v = &t.value.eval(&zeta, &omega, w) + &MpComplex::from_rat(&t.constant, w);
    Ok(v.with_bits(bits))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchCheck {
    pub branches: Vec<u32>,
    pub expected: (String, String),
    pub computed: (String, String),
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TowerReport {
    pub level: u32,
    pub target: IntPoly,
    pub branch_count: usize,
    pub distinct: usize,
    /// multiplicity -> number of distinct values with that multiplicity
    pub histogram: BTreeMap<usize, usize>,
    pub max_residual: f64,
    pub covers_roots: bool,
    pub branch_checks: Vec<BranchCheck>,
}

impl TowerReport {
    pub fn uniform_multiplicity(&self) -> Option<usize> {
        (self.histogram.len() == 1).then(|| *self.histogram.keys().next().unwrap())
    }
}

fn decimals(s: &str) -> usize {
    s.split_once('.').map_or(0, |(_, f)| f.len())
}

fn fixed(x: &MpComplex, re_digits: usize, im_digits: usize) -> (String, String) {
    let (re, _) = x.to_decimal(re_digits);
    let (_, im) = x.to_decimal(im_digits);
    (re, im)
}

fn same_decimal(expected: &str, computed: &str) -> bool {
    let strip = |s: &str| -> String {
        let s = s.trim_start_matches('-');
        if s.chars().all(|c| c == '0' || c == '.') {
            "0".into()
        } else {
            s.into()
        }
    };
    let neg = |s: &str| s.starts_with('-');
    strip(expected) == strip(computed) && (strip(expected) == "0" || neg(expected) == neg(computed))
}

pub fn verify_tower(t: &RadicalTower, bits: usize) -> Result<TowerReport, RadicalError> {
    let mut values: Vec<MpComplex> = Vec::with_capacity(t.branch_count());
    let mut max_residual = 0.0f64;
    for br in t.branch_tuples() {
        let v = evaluate_tower(t, &br, bits)?;
        let r = eval_intpoly(&t.target, &v).abs_f64();
        if !(r < ROOT_RESIDUAL) {
            return Err(RadicalError::NotARoot {
                branches: br,
                residual: r,
            });
        }
        max_residual = max_residual.max(r);
        values.push(v);
    }
    let mut clusters: Vec<(MpComplex, usize)> = Vec::new();
    for v in &values {
        match clusters.iter_mut().find(|(c, _)| c.dist(v) < CLUSTER) {
            Some((_, m)) => *m += 1,
            None => clusters.push((v.clone(), 1)),
        }
    }
    let mut histogram = BTreeMap::new();
    for (_, m) in &clusters {
        *histogram.entry(*m).or_insert(0) += 1;
    }
    let roots = roots_of_intpoly(&t.target, bits)?;
    for (i, r) in roots.roots.iter().enumerate() {
        if !clusters.iter().any(|(c, _)| c.dist(r) < CLUSTER) {
            return Err(RadicalError::CoverageGap { root: i });
        }
    }
    let mut branch_checks = Vec::new();
    for bv in &t.branch_values {
        let v = evaluate_tower(t, &bv.branches, bits)?;
        let computed = fixed(&v, decimals(&bv.re), decimals(&bv.im));
        let matches = same_decimal(&bv.re, &computed.0) && same_decimal(&bv.im, &computed.1);
        branch_checks.push(BranchCheck {
            branches: bv.branches.clone(),
            expected: (bv.re.clone(), bv.im.clone()),
            computed,
            matches,
        });
    }
    Ok(TowerReport {
        level: t.level,
        target: t.target.clone(),
        branch_count: values.len(),
        distinct: clusters.len(),
        histogram,
        max_residual,
        covers_roots: true,
        branch_checks,
    })
}
