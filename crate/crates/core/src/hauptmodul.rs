//! Normalized Hauptmodul q-expansions and level fixtures.
//!
//! Level 1 is generated from the Eisenstein series `E4`, `E6`; every other level
//! is read from a JSON fixture.

use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elliptic_class::{EllipticPoint, Gamma};
use crate::exact::{parse_rat, BigRat, IntPoly, QSeries};

/// The square-free levels `N` for which `Gamma_0(N)+` has genus zero.
pub const LEVELS: [u32; 44] = [
    1, 2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17, 19, 21, 22, 23, 26, 29, 30, 31, 33, 34, 35, 38, 39,
    41, 42, 46, 47, 51, 55, 59, 62, 66, 69, 70, 71, 78, 87, 94, 95, 105, 110, 119,
];

pub fn is_known_level(n: u32) -> bool {
    LEVELS.binary_search(&n).is_ok()
}

#[derive(Debug, Error)]
pub enum HauptError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("normalization error: {0}")]
    Normalization(String),
    #[error("level {0} is not a genus-zero square-free level")]
    LevelUnknown(u32),
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

// ---------------------------------------------------------------------------
// level 1

fn sigma(n: u64, k: u32) -> BigInt {
    let mut s = BigInt::zero();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            s += BigInt::from(d).pow(k);
            let e = n / d;
            if e != d {
                s += BigInt::from(e).pow(k);
            }
        }
        d += 1;
    }
    s
}

fn mul_trunc(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Reciprocal of a power series with constant term 1, by Newton iteration.
fn reciprocal(f: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut g = vec![BigInt::one()];
    let mut prec = 1;
    while prec < len {
        prec = (2 * prec).min(len);
        let fg = mul_trunc(f, &g, prec);
        let mut two_minus = fg.into_iter().map(|c| -c).collect::<Vec<_>>();
        two_minus[0] += 2;
        g = mul_trunc(&g, &two_minus, prec);
    }
    g.truncate(len);
    g
}

/// `j - 744` for `SL_2(Z)`, exponents `-1 .. T-1`, known modulo `q^T`.
pub fn eisenstein_j_level1(t: usize) -> QSeries {
    assert!(t >= 2, "truncation must be at least 2");
    // Δ = q·(1 - 24q + ...); we need that cofactor to t+1 terms
    let len = t + 2;
    let e4: Vec<BigInt> = (0..len)
        .map(|n| if n == 0 { BigInt::one() } else { 240 * sigma(n as u64, 3) })
        .collect();
    let e6: Vec<BigInt> = (0..len)
        .map(|n| if n == 0 { BigInt::one() } else { -504 * sigma(n as u64, 5) })
        .collect();
    let e4_3 = mul_trunc(&mul_trunc(&e4, &e4, len), &e4, len);
    let e6_2 = mul_trunc(&e6, &e6, len);
    let delta: Vec<BigInt> = e4_3
        .iter()
        .zip(&e6_2)
        .map(|(a, b)| (a - b) / 1728)
        .collect();
    debug_assert!(delta[0].is_zero() && delta[1].is_one());
    let cofactor = &delta[1..];
    let inv = reciprocal(cofactor, t + 1);
    let mut j = mul_trunc(&e4_3, &inv, t + 1);
    j[1] -= 744;
    QSeries::from_ints(-1, &j)
}

// ---------------------------------------------------------------------------
// fixtures

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QExpansionFixture {
    pub min_exponent: i64,
    pub coefficients: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexFixture {
    pub re: String,
    pub im: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointFixture {
    pub re: String,
    pub sqrt_arg: u64,
    pub im_scale: String,
    pub order: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<[i64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<ComplexFixture>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassFieldRowFixture {
    #[serde(rename = "D")]
    pub d: i64,
    pub order: String,
    pub class_number: u32,
    pub polynomial: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExactValueFixture {
    Branches(Vec<u32>),
    Integer(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentificationFixture {
    pub point: usize,
    pub approx: ComplexFixture,
    pub exact: ExactValueFixture,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ExpectedFixture {
    #[serde(rename = "P", default)]
    pub p: Option<Vec<String>>,
    #[serde(rename = "Q", default)]
    pub q: Option<Vec<String>>,
    #[serde(default)]
    pub factors: Vec<Vec<String>>,
    #[serde(default)]
    pub class_field: Vec<ClassFieldRowFixture>,
    #[serde(default)]
    pub identification: Vec<IdentificationFixture>,
    #[serde(default)]
    pub equations: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelFixture {
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(default)]
    pub q_expansion: Option<QExpansionFixture>,
    #[serde(default)]
    pub elliptic_points: Vec<PointFixture>,
    #[serde(default)]
    pub expected: Option<ExpectedFixture>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectedRow {
    pub d: i64,
    pub order: String,
    pub class_number: u32,
    pub polynomial: IntPoly,
}

#[derive(Debug, Clone, Default)]
pub struct ExpectedArtifacts {
    pub p: Option<IntPoly>,
    pub q: Option<IntPoly>,
    pub factors: Vec<IntPoly>,
    pub class_field: Vec<ExpectedRow>,
    pub identification: Vec<IdentificationFixture>,
    pub equations: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct LevelData {
    pub n: u32,
    pub q_expansion: Option<QSeries>,
    pub elliptic_points: Vec<EllipticPoint>,
    /// Tabulated `j_N(e)` per point, parallel to `elliptic_points`.
    pub values: Vec<Option<ComplexFixture>>,
    pub expected: ExpectedArtifacts,
}

impl LevelData {
    /// `n_N = 2(|E_N| - 1)`.
    pub fn n_exponent(&self) -> usize {
        2 * self.elliptic_points.len().saturating_sub(1)
    }

    /// Whether the expansion is long enough to set up the linear system.
    pub fn solve_ready(&self) -> bool {
        let n = self.n_exponent() as i64;
        self.q_expansion
            .as_ref()
            .is_some_and(|q| q.truncation() >= 2 * n + 2)
    }
}

fn schema<T>(what: &str, v: Option<T>) -> Result<T, HauptError> {
    v.ok_or_else(|| HauptError::Schema(what.to_string()))
}

fn parse_poly(what: &str, c: &[String]) -> Result<IntPoly, HauptError> {
    schema(what, IntPoly::parse(c))
}

fn parse_point(i: usize, p: &PointFixture) -> Result<EllipticPoint, HauptError> {
    let re = schema(&format!("point {i}: re"), parse_rat(&p.re))?;
    let im_scale = schema(&format!("point {i}: im_scale"), parse_rat(&p.im_scale))?;
    if im_scale <= BigRat::zero() || p.sqrt_arg == 0 {
        return Err(HauptError::Schema(format!("point {i}: not in the upper half plane")));
    }
    if ![2, 3, 4, 6].contains(&p.order) {
        return Err(HauptError::Schema(format!("point {i}: order {}", p.order)));
    }
    let gamma = p.gamma.map(|[a, b, c, v]| Gamma { a, b, c, v });
    Ok(EllipticPoint {
        re,
        sqrt_arg: p.sqrt_arg,
        im_scale,
        order: p.order,
        gamma,
    })
}

/// Validates a parsed fixture.
pub fn ingest_fixture(f: LevelFixture) -> Result<LevelData, HauptError> {
    if !is_known_level(f.n) {
        return Err(HauptError::LevelUnknown(f.n));
    }
    let q_expansion = match &f.q_expansion {
        None => None,
        Some(q) => {
            let coeffs = q
                .coefficients
                .iter()
                .map(|s| s.trim().parse::<BigInt>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| HauptError::Schema(format!("q_expansion: {e}")))?;
            if q.min_exponent != -1 {
                return Err(HauptError::Normalization(format!(
                    "expansion starts at q^{}",
                    q.min_exponent
                )));
            }
            match coeffs.first() {
                Some(c) if c.is_one() => {}
                Some(c) => return Err(HauptError::Normalization(format!("a(-1) = {c}"))),
                None => return Err(HauptError::Normalization("empty expansion".into())),
            }
            if let Some(c) = coeffs.get(1).filter(|c| !c.is_zero()) {
                return Err(HauptError::Normalization(format!("a(0) = {c}")));
            }
            Some(QSeries::from_ints(-1, &coeffs))
        }
    };
    let elliptic_points = f
        .elliptic_points
        .iter()
        .enumerate()
        .map(|(i, p)| parse_point(i, p))
        .collect::<Result<Vec<_>, _>>()?;
    let values = f.elliptic_points.iter().map(|p| p.value.clone()).collect();
    let e = f.expected.unwrap_or_default();
    let expected = ExpectedArtifacts {
        p: e.p.as_deref().map(|c| parse_poly("P", c)).transpose()?,
        q: e.q.as_deref().map(|c| parse_poly("Q", c)).transpose()?,
        factors: e
            .factors
            .iter()
            .map(|c| parse_poly("factor", c))
            .collect::<Result<_, _>>()?,
        class_field: e
            .class_field
            .iter()
            .map(|r| {
                Ok(ExpectedRow {
                    d: r.d,
                    order: r.order.clone(),
                    class_number: r.class_number,
                    polynomial: parse_poly("class_field polynomial", &r.polynomial)?,
                })
            })
            .collect::<Result<_, HauptError>>()?,
        identification: e.identification,
        equations: e.equations,
    };
    for id in &expected.identification {
        if id.point >= elliptic_points.len() {
            return Err(HauptError::Schema(format!("identification point {}", id.point)));
        }
    }
    Ok(LevelData {
        n: f.n,
        q_expansion,
        elliptic_points,
        values,
        expected,
    })
}

pub fn ingest_level_str(json: &str) -> Result<LevelData, HauptError> {
    let f: LevelFixture =
        serde_json::from_str(json).map_err(|e| HauptError::Schema(e.to_string()))?;
    ingest_fixture(f)
}

pub fn ingest_level(path: &Path) -> Result<LevelData, HauptError> {
    let s = std::fs::read_to_string(path).map_err(|source| HauptError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    ingest_level_str(&s)
}

pub fn level_fixture_path(dir: &Path, n: u32) -> PathBuf {
    dir.join("levels").join(format!("{n:03}.json"))
}

/// Loads level `n` from `dir/levels/NNN.json`; `Ok(None)` when the file is absent.
pub fn load_level(dir: &Path, n: u32) -> Result<Option<LevelData>, HauptError> {
    if !is_known_level(n) {
        return Err(HauptError::LevelUnknown(n));
    }
    let path = level_fixture_path(dir, n);
    if !path.exists() {
        return Ok(None);
    }
    ingest_level(&path).map(Some)
}
