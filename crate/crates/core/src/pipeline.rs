//! Per-level pipeline: expansion, solve, square root, factoring, evaluation,
//! matching, classification and radical towers, collected in a report.

use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elliptic_class::{
    ambiguous_quotient_class_number, build_class_field_table, class_number_oracle, evaluate_j_at,
    is_gamma0_fixed, match_values_to_roots, quadratic_from_point, tail_bound, ClassFieldTable,
    EllipticPoint, MatchTable, PointClassification,
};
use crate::exact::{poly_order, poly_sqrt_half, rat, BigRat, IntPoly, QSeries};
use crate::factorizer::{exact_divide, factor_over_z, Factorization};
use crate::hauptmodul::{eisenstein_j_level1, load_level, HauptError, LevelData, LEVELS};
use crate::mp::{MpComplex, DEFAULT_BITS};
use crate::radicals::{load_towers, verify_tower, TowerReport, VERIFY_BITS};
use crate::schwarzian_ode::{assemble_and_solve, build_system, extend_series, OdeSolution};

/// Tolerance for tabulated values against roots.
pub const FIXTURE_TOLERANCE: f64 = 1e-8;
/// Target tail bound when summing a q-expansion at an elliptic point.
pub const SERIES_TOLERANCE: f64 = 1e-20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub fixtures: PathBuf,
    pub bits: usize,
    /// Matching tolerance for series values.
    pub tolerance: f64,
    /// Largest expansion length the recurrence may produce.
    pub max_terms: usize,
    pub radicals: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            fixtures: PathBuf::from("fixtures"),
            bits: DEFAULT_BITS,
            tolerance: crate::elliptic_class::MATCH_TOLERANCE,
            max_terms: 2048,
            radicals: true,
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("[load] {0}")]
    Load(#[from] HauptError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Skipped,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRow {
    pub index: usize,
    pub point: String,
    pub order: u8,
    /// `series` or `fixture`
    pub source: String,
    pub value: (String, String),
    pub error_bound: Option<f64>,
    pub root: Option<(String, String)>,
    pub factor: Option<usize>,
    pub residual: Option<f64>,
    pub fixture_residual: Option<f64>,
    pub discriminant: Option<i64>,
    pub order_descriptor: Option<String>,
    pub gamma0_fixed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedRowCheck {
    pub discriminant: i64,
    pub order: String,
    pub polynomial: IntPoly,
    pub printed_class_number: u32,
    pub form_class_number: u64,
    pub quotient_class_number: u64,
    pub found: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub level: u32,
    pub n_exponent: usize,
    pub precision_bits: usize,
    pub expansion_terms: Option<usize>,
    pub p: Option<IntPoly>,
    pub q: Option<IntPoly>,
    pub h: Option<IntPoly>,
    pub factors: Vec<IntPoly>,
    pub equations: Vec<String>,
    pub points: Vec<PointRow>,
    pub class_field: ClassFieldTable,
    pub expected_rows: Vec<ExpectedRowCheck>,
    pub radicals: Vec<TowerReport>,
    pub stages: Vec<Stage>,
    pub failures: Vec<String>,
    /// Tabulated data inconsistent with other tabulated data for the level.
    pub conflicts: Vec<String>,
}

impl LevelReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    fn stage(&mut self, name: &str, status: Status, detail: impl Into<String>) {
        let detail = detail.into();
        if status == Status::Failed {
            self.failures.push(format!("[{name}] {detail}"));
        }
        self.stages.push(Stage {
            name: name.into(),
            status,
            detail,
        });
    }

    fn fail(&mut self, name: &str, detail: impl Into<String>) {
        self.stage(name, Status::Failed, detail);
    }
}

fn level1_points() -> Vec<EllipticPoint> {
    vec![
        EllipticPoint {
            re: rat(0),
            sqrt_arg: 1,
            im_scale: rat(1),
            order: 2,
            gamma: None,
        },
        EllipticPoint {
            re: BigRat::new(1.into(), 2.into()),
            sqrt_arg: 3,
            im_scale: BigRat::new(1.into(), 2.into()),
            order: 3,
            gamma: None,
        },
    ]
}

fn check_structure(p: &IntPoly, q: &IntPoly) -> Result<IntPoly, String> {
    let (Some(dp), Some(dq)) = (p.degree(), q.degree()) else {
        return Err("empty P or Q".into());
    };
    if dp + 2 != dq {
        return Err(format!("deg P = {dp}, deg Q = {dq}"));
    }
    if !p.is_monic() {
        return Err("P is not monic".into());
    }
    if q.leading() != Some(&BigInt::from(2)) {
        return Err("leading coefficient of Q is not 2".into());
    }
    let h = poly_sqrt_half(q).map_err(|e| e.to_string())?;
    if h.mul(&h).scale(&BigInt::from(2)) != *q {
        return Err("2 h^2 != Q".into());
    }
    Ok(h)
}

fn sorted(mut v: Vec<IntPoly>) -> Vec<IntPoly> {
    v.sort_by(poly_order);
    v
}

fn decimal(x: &MpComplex) -> (String, String) {
    x.to_decimal(20)
}

/// Extends `j` until the tail bound at every point is below `SERIES_TOLERANCE`.
fn long_expansion(
    j: &QSeries,
    sol: &OdeSolution,
    points: &[EllipticPoint],
    max_terms: usize,
) -> Result<QSeries, String> {
    let worst_q = points
        .iter()
        .map(|e| (-2.0 * std::f64::consts::PI * e.imag_f64()).exp())
        .fold(0.0f64, f64::max);
    let mut series = j.clone();
    let mut k = (j.truncation() as usize).max(32);
    loop {
        if tail_bound(&series, worst_q) < SERIES_TOLERANCE {
            return Ok(series);
        }
        if k >= max_terms {
            return Err(format!("tail bound still above {SERIES_TOLERANCE:e} at {k} terms"));
        }
        k = (2 * k).min(max_terms);
        series = extend_series(j, &sol.p, &sol.q, k as i64).map_err(|e| e.to_string())?;
    }
}

/// Runs every stage that has inputs; `Ok(None)` if the level has no fixture.
pub fn run_pipeline(level: u32, config: &Config) -> Result<Option<LevelReport>, PipelineError> {
    let data = match load_level(&config.fixtures, level)? {
        Some(d) => d,
        None if level == 1 => LevelData {
            n: 1,
            q_expansion: None,
            elliptic_points: level1_points(),
            values: vec![None, None],
            expected: Default::default(),
        },
        None => return Ok(None),
    };
    let bits = config.bits;
    let mut rep = LevelReport {
        level,
        n_exponent: data.n_exponent(),
        precision_bits: bits,
        expansion_terms: None,
        p: None,
        q: None,
        h: None,
        factors: vec![],
        equations: vec![],
        points: vec![],
        class_field: ClassFieldTable::default(),
        expected_rows: vec![],
        radicals: vec![],
        stages: vec![],
        failures: vec![],
        conflicts: vec![],
    };
    let n = data.n_exponent();
    let points = &data.elliptic_points;

    // expansion
    let j = if level == 1 {
        rep.stage("expand", Status::Ok, "Eisenstein series");
        Some(eisenstein_j_level1(2 * n + 8))
    } else if let Some(q) = &data.q_expansion {
        rep.stage("expand", Status::Ok, format!("{} fixture coefficients", q.coeffs().len()));
        Some(q.clone())
    } else {
        rep.stage("expand", Status::Skipped, "no q-expansion fixture");
        None
    };

    // solve
    let mut solution = None;
    if let Some(j) = &j {
        match build_system(j, n) {
            Ok((sys, _)) => {
                rep.equations = (0..sys.dim()).map(|r| sys.render(r)).collect();
                let exp = &data.expected.equations;
                if !exp.is_empty() && *exp != rep.equations {
                    let bad = exp.iter().zip(&rep.equations).position(|(a, b)| a != b);
                    rep.fail("equations", format!("first differing equation: {bad:?}"));
                }
            }
            Err(e) => rep.fail("equations", e.to_string()),
        }
        match assemble_and_solve(j, points.len()) {
            Ok(s) => {
                rep.stage("solve", Status::Ok, format!("{0}x{0} exact solve", 2 * n + 2));
                solution = Some(s);
            }
            Err(e) => rep.fail("solve", e.to_string()),
        }
    } else {
        rep.stage("solve", Status::Skipped, "no expansion; using tabulated P, Q");
    }
    if let (Some(s), Some(p)) = (&solution, &data.expected.p) {
        if s.p != *p {
            rep.fail("solve", "P differs from the tabulated polynomial");
        }
    }
    if let (Some(s), Some(q)) = (&solution, &data.expected.q) {
        if s.q != *q {
            rep.fail("solve", "Q differs from the tabulated polynomial");
        }
    }
    let (p, q) = match &solution {
        Some(s) => (Some(s.p.clone()), Some(s.q.clone())),
        None => (data.expected.p.clone(), data.expected.q.clone()),
    };
    rep.p = p.clone();
    rep.q = q.clone();

    // structure and square root
    let h = match (&p, &q) {
        (Some(p), Some(q)) => match check_structure(p, q) {
            Ok(h) => {
                rep.stage("sqrt", Status::Ok, format!("deg h = {}", h.degree().unwrap_or(0)));
                Some(h)
            }
            Err(e) => {
                rep.fail("sqrt", e);
                None
            }
        },
        _ => {
            rep.stage("sqrt", Status::Skipped, "no P, Q");
            None
        }
    };
    rep.h = h.clone();
    if solution.is_some() {
        if let (Some(p), Some(q)) = (&data.expected.p, &data.expected.q) {
            if let Err(e) = check_structure(p, q) {
                rep.fail("sqrt", format!("tabulated P, Q: {e}"));
            }
        }
    }
    if let Some(h) = &h {
        if h.degree() != Some(points.len()) {
            rep.fail("sqrt", format!("deg h = {:?} but {} elliptic points", h.degree(), points.len()));
        }
    }

    // factor
    let mut fact: Option<Factorization> = None;
    if let Some(h) = &h {
        match factor_over_z(h, bits) {
            Ok(f) => {
                rep.factors = f.factors.clone();
                rep.stage("factor", Status::Ok, format!("{} factors at {} bits", f.factors.len(), f.bits));
                if !data.expected.factors.is_empty() && sorted(data.expected.factors.clone()) != f.factors {
                    rep.fail("factor", "factors differ from the tabulated factorization");
                }
                fact = Some(f);
            }
            Err(e) => rep.fail("factor", e.to_string()),
        }
    } else {
        rep.stage("factor", Status::Skipped, "no h");
    }

    // classify
    let mut classes: Vec<Option<PointClassification>> = Vec::with_capacity(points.len());
    for (i, e) in points.iter().enumerate() {
        match quadratic_from_point(e, level) {
            Ok(c) => classes.push(Some(c)),
            Err(err) => {
                rep.fail("classify", format!("point {i}: {err}"));
                classes.push(None);
            }
        }
    }

    // evaluate and match
    let mut computed: Option<Vec<(MpComplex, f64)>> = None;
    if let (Some(j), Some(s)) = (&j, &solution) {
        match long_expansion(j, s, points, config.max_terms) {
            Ok(series) => {
                rep.expansion_terms = Some(series.coeffs().len());
                let vals: Result<Vec<_>, _> = points
                    .iter()
                    .map(|e| evaluate_j_at(&series, e, bits, SERIES_TOLERANCE).map(|v| (v.value, v.error_bound)))
                    .collect();
                match vals {
                    Ok(v) => {
                        rep.stage("evaluate", Status::Ok, format!("{} terms", series.coeffs().len()));
                        computed = Some(v);
                    }
                    Err(e) => rep.fail("evaluate", e.to_string()),
                }
            }
            Err(e) => rep.fail("evaluate", e),
        }
    } else {
        rep.stage("evaluate", Status::Skipped, "no expansion; using tabulated values");
    }
    let tabulated: Option<Vec<MpComplex>> = data
        .values
        .iter()
        .map(|v| v.as_ref().and_then(|v| MpComplex::parse(&v.re, &v.im, bits).ok()))
        .collect();
    let mut table: Option<MatchTable> = None;
    let mut fixture_table: Option<MatchTable> = None;
    if let Some(f) = &fact {
        if let Some(t) = &tabulated {
            match match_values_to_roots(t, &f.roots.roots, &f.root_assignment, FIXTURE_TOLERANCE) {
                Ok(m) => {
                    rep.stage("match-tabulated", Status::Ok, "bijection with the roots of h");
                    fixture_table = Some(m);
                }
                Err(e) => rep.fail("match-tabulated", e.to_string()),
            }
        }
        if let Some(c) = &computed {
            let vals: Vec<MpComplex> = c.iter().map(|x| x.0.clone()).collect();
            match match_values_to_roots(&vals, &f.roots.roots, &f.root_assignment, config.tolerance) {
                Ok(m) => {
                    rep.stage("match", Status::Ok, "series values matched");
                    table = Some(m);
                }
                Err(e) => rep.fail("match", e.to_string()),
            }
        }
    }
    let table = table.or(fixture_table.clone());

    for (i, e) in points.iter().enumerate() {
        let (source, value, bound) = match (&computed, &tabulated) {
            (Some(c), _) => ("series", decimal(&c[i].0), Some(c[i].1)),
            (None, Some(t)) => ("fixture", decimal(&t[i]), None),
            _ => ("none", (String::new(), String::new()), None),
        };
        let m = table.as_ref().and_then(|t| t.entries.iter().find(|x| x.point == i));
        let fm = fixture_table.as_ref().and_then(|t| t.entries.iter().find(|x| x.point == i));
        let c = classes[i].as_ref();
        rep.points.push(PointRow {
            index: i,
            point: e.to_string(),
            order: e.order,
            source: source.into(),
            value,
            error_bound: bound,
            root: m.map(|m| decimal(&m.root)),
            factor: m.map(|m| m.factor),
            residual: m.map(|m| m.residual),
            fixture_residual: fm.map(|m| m.residual),
            discriminant: c.map(|c| c.discriminant),
            order_descriptor: c.map(|c| c.order_descriptor.clone()),
            gamma0_fixed: c.is_some_and(|c| is_gamma0_fixed(e, c)),
        });
    }
    for id in &data.expected.identification {
        let row = &rep.points[id.point];
        let Some(root) = &row.root else { continue };
        let approx = MpComplex::parse(&id.approx.re, &id.approx.im, 64).ok();
        let got = MpComplex::parse(&root.0, &root.1, 64).ok();
        if let (Some(a), Some(g)) = (approx, got) {
            if a.dist(&g) > 1e-10 {
                rep.fail("identify", format!("point {} is {} not {:?}", id.point, root.0, id.approx));
            }
        }
    }

    // class field
    if let (Some(f), Some(t)) = (&fact, &table) {
        if classes.iter().all(|c| c.is_some()) {
            let cls: Vec<PointClassification> = classes.iter().map(|c| c.clone().unwrap()).collect();
            match build_class_field_table(level, points, &cls, t, &f.factors) {
                Ok(cf) => {
                    for m in &cf.integer_moduli {
                        if !m.distance.is_some_and(|d| d < FIXTURE_TOLERANCE) {
                            rep.fail(
                                "classfield",
                                format!("point {} of order {} has non-integral value", m.point, m.order),
                            );
                        }
                    }
                    rep.class_field = cf;
                    rep.stage("classfield", Status::Ok, format!("{} rows", rep.class_field.rows.len()));
                }
                Err(e) => rep.fail("classfield", e.to_string()),
            }
        }
    } else {
        rep.stage("classfield", Status::Skipped, "no matched roots");
    }
    for r in &data.expected.class_field {
        let form_h = class_number_oracle(r.d).unwrap_or(0);
        let quot_h = ambiguous_quotient_class_number(r.d).unwrap_or(0);
        let found = rep.class_field.rows.iter().any(|x| {
            x.discriminant == r.d && x.order_descriptor == r.order && x.generating_polynomial == r.polynomial
        });
        let h_without_row = rep.h.clone().filter(|h| exact_divide(h, &r.polynomial).is_err());
        if let (false, Some(h)) = (found, h_without_row) {
            rep.conflicts.push(format!(
                "tabulated row D = {}: {} does not divide h = {h}",
                r.d, r.polynomial
            ));
        } else if !found {
            rep.fail("classfield", format!("tabulated row D = {} {} not produced", r.d, r.polynomial));
        }
        if quot_h != r.class_number as u64 {
            rep.fail(
                "classfield",
                format!("D = {}: tabulated class number {} but quotient oracle {quot_h}", r.d, r.class_number),
            );
        }
        if r.polynomial.degree() != Some(r.class_number as usize) {
            rep.fail("classfield", format!("D = {}: degree differs from class number", r.d));
        }
        rep.expected_rows.push(ExpectedRowCheck {
            discriminant: r.d,
            order: r.order.clone(),
            polynomial: r.polynomial.clone(),
            printed_class_number: r.class_number,
            form_class_number: form_h,
            quotient_class_number: quot_h,
            found,
        });
    }

    // radicals
    if config.radicals {
        match load_towers(&config.fixtures, level) {
            Ok(towers) if towers.is_empty() => rep.stage("radicals", Status::Skipped, "no towers"),
            Ok(towers) => {
                for t in towers {
                    if !rep.factors.is_empty() && !rep.factors.contains(&t.target) {
                        rep.fail("radicals", format!("tower target {} is not a factor of h", t.target));
                    }
                    match verify_tower(&t, VERIFY_BITS) {
                        Ok(r) => {
                            for c in r.branch_checks.iter().filter(|c| !c.matches) {
                                rep.fail(
                                    "radicals",
                                    format!("branch {:?}: {:?} vs {:?}", c.branches, c.computed, c.expected),
                                );
                            }
                            rep.radicals.push(r);
                        }
                        Err(e) => rep.fail("radicals", format!("{}: {e}", t.target)),
                    }
                }
                if !rep.radicals.is_empty() {
                    rep.stage("radicals", Status::Ok, format!("{} towers", rep.radicals.len()));
                }
            }
            Err(e) => rep.fail("radicals", e.to_string()),
        }
    }
    Ok(Some(rep))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub level: u32,
    pub status: Status,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub levels: Vec<LevelSummary>,
    pub failures: usize,
    pub skipped: usize,
}

pub fn summarize(level: u32, r: Result<Option<LevelReport>, PipelineError>) -> LevelSummary {
    match r {
        Ok(Some(rep)) => LevelSummary {
            level,
            status: if rep.ok() { Status::Ok } else { Status::Failed },
            failures: rep.failures,
        },
        Ok(None) => LevelSummary {
            level,
            status: Status::Skipped,
            failures: vec![],
        },
        Err(e) => LevelSummary {
            level,
            status: Status::Failed,
            failures: vec![e.to_string()],
        },
    }
}

pub fn collect_summary(mut levels: Vec<LevelSummary>) -> VerifySummary {
    levels.sort_by_key(|l| l.level);
    VerifySummary {
        failures: levels.iter().filter(|l| l.status == Status::Failed).count(),
        skipped: levels.iter().filter(|l| l.status == Status::Skipped).count(),
        levels,
    }
}

/// Runs `f` on all 44 levels with at most `workers` threads.
pub fn verify_levels<F>(workers: usize, f: F) -> VerifySummary
where
    F: Fn(u32) -> LevelSummary + Sync,
{
    let next = AtomicUsize::new(0);
    let out = Mutex::new(Vec::with_capacity(LEVELS.len()));
    std::thread::scope(|s| {
        for _ in 0..workers.clamp(1, LEVELS.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&n) = LEVELS.get(i) else { break };
                let r = f(n);
                out.lock().unwrap().push(r);
            });
        }
    });
    collect_summary(out.into_inner().unwrap())
}

pub fn verify_all(config: &Config, workers: usize) -> VerifySummary {
    verify_levels(workers, |n| summarize(n, run_pipeline(n, config)))
}

// ---------------------------------------------------------------------------
// text rendering

fn poly_text(p: &Option<IntPoly>) -> String {
    p.as_ref().map_or("-".into(), |p| p.to_string())
}

impl LevelReport {
    pub fn to_text(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        let _ = writeln!(s, "N = {}   n_N = {}   precision = {} bits", self.level, self.n_exponent, self.precision_bits);
        let _ = writeln!(s, "P(y) = {}", poly_text(&self.p));
        let _ = writeln!(s, "Q(y) = {}", poly_text(&self.q));
        let _ = writeln!(s, "h(y) = {}", poly_text(&self.h));
        let f: Vec<String> = self.factors.iter().map(|f| format!("({f})")).collect();
        let _ = writeln!(s, "h(y) = {}", f.join(""));
        let _ = writeln!(s, "\n{:<28} {:>3} {:>28} {:>28} {:>6} {:>6}", "e", "ord", "Re j(e)", "Im j(e)", "factor", "D");
        for p in &self.points {
            let _ = writeln!(
                s,
                "{:<28} {:>3} {:>28} {:>28} {:>6} {:>6}",
                p.point,
                p.order,
                p.value.0,
                p.value.1,
                p.factor.map_or("-".into(), |x| x.to_string()),
                p.discriminant.map_or("-".into(), |x| x.to_string()),
            );
        }
        if !self.class_field.rows.is_empty() {
            let _ = writeln!(s, "\n{:>6} {:<24} {:>3}  polynomial", "D", "order", "h");
            for r in &self.class_field.rows {
                let _ = writeln!(
                    s,
                    "{:>6} {:<24} {:>3}  {}{}",
                    r.discriminant,
                    r.order_descriptor,
                    r.class_number,
                    r.generating_polynomial,
                    if r.flags.is_empty() { String::new() } else { format!("   [{}]", r.flags.join("; ")) }
                );
            }
        }
        for t in &self.radicals {
            let _ = writeln!(
                s,
                "\ntower for {}: {} branches, {} distinct values, multiplicities {:?}",
                t.target, t.branch_count, t.distinct, t.histogram
            );
        }
        let _ = writeln!(s);
        for st in &self.stages {
            let _ = writeln!(s, "{:<16} {:<8} {}", st.name, format!("{:?}", st.status).to_lowercase(), st.detail);
        }
        for c in &self.conflicts {
            let _ = writeln!(s, "CONFLICT {c}");
        }
        if self.failures.is_empty() {
            let _ = writeln!(s, "\nno failures");
        } else {
            for f in &self.failures {
                let _ = writeln!(s, "FAILED {f}");
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level1_without_fixture_dir() {
        let cfg = Config {
            fixtures: PathBuf::from("/nonexistent"),
            ..Config::default()
        };
        let rep = run_pipeline(1, &cfg).unwrap().unwrap();
        assert!(rep.ok(), "{:?}", rep.failures);
        assert_eq!(rep.factors, vec![IntPoly::from_i64(&[-984, 1]), IntPoly::from_i64(&[744, 1])]);
        assert_eq!(rep.class_field.integer_moduli.len(), 2);
        assert!(run_pipeline(29, &cfg).unwrap().is_none());
    }

    #[test]
    fn structure_check() {
        let p = IntPoly::from_i64(&[1743552, -480, 1]);
        let q = IntPoly::parse(&["1071929106432", "702812160", "-2813184", "-960", "2"]).unwrap();
        assert!(check_structure(&p, &q).is_ok());
        let bad = IntPoly::parse(&["1071929106433", "702812160", "-2813184", "-960", "2"]).unwrap();
        assert!(check_structure(&p, &bad).is_err());
    }
}
