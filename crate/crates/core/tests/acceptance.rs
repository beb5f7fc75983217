//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! Criteria that conflict with the tabulated data print `FAIL (known conflict)`
//! and do not fail the test; everything else is asserted at the end.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use hauptmodul_core::elliptic_class::{
    ambiguous_quotient_class_number, class_number_oracle, evaluate_j_at, match_values_to_roots,
    EllipticPoint,
};
use hauptmodul_core::exact::{poly_order, poly_sqrt_half, rat, BigRat, IntPoly, QSeries};
use hauptmodul_core::factorizer::{factor_over_z, factor_with_limit};
use hauptmodul_core::hauptmodul::{eisenstein_j_level1, load_level, LEVELS};
use hauptmodul_core::mp::{eval_intpoly, MpComplex};
use hauptmodul_core::pipeline::{run_pipeline, Config};
use hauptmodul_core::radicals::{evaluate_tower, load_towers, verify_tower, VERIFY_BITS};
use hauptmodul_core::schwarzian_ode::{
    assemble_and_solve, b_coefficient, build_system, residual_series, schwarzian_ingredients,
};
use num_bigint::BigInt;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn config() -> Config {
    Config {
        fixtures: fixtures(),
        ..Config::default()
    }
}

fn poly(c: &[i64]) -> IntPoly {
    IntPoly::from_i64(c)
}

fn sorted(mut v: Vec<IntPoly>) -> Vec<IntPoly> {
    v.sort_by(poly_order);
    v
}

#[derive(Default)]
struct Gate {
    hard_failures: Vec<String>,
}

impl Gate {
    fn record(&mut self, name: &str, elapsed: Duration, problems: Vec<String>) {
        let status = if problems.is_empty() { "PASS" } else { "FAIL" };
        let line = format!("{status} {name} ({:.2?})", elapsed);
        println!("{line}");
        for p in &problems {
            println!("       {p}");
        }
        self.hard_failures.extend(problems.into_iter().map(|p| format!("{name}: {p}")));
    }

    fn known_conflict(&mut self, name: &str, problems: Vec<String>) {
        if problems.is_empty() {
            println!("PASS {name}");
            return;
        }
        println!("FAIL (known conflict) {name}");
        for p in &problems {
            println!("       {p}");
        }
    }
}

fn check(problems: &mut Vec<String>, ok: bool, msg: impl Into<String>) {
    if !ok {
        problems.push(msg.into());
    }
}

fn criterion_1(g: &mut Gate) {
    let t = Instant::now();
    let mut p = vec![];
    let j = eisenstein_j_level1(16);
    match assemble_and_solve(&j, 2) {
        Ok(s) => {
            check(&mut p, s.p.to_tex() == "y^{2} - 480y + 1743552", format!("P1 = {}", s.p));
            check(
                &mut p,
                s.q.to_tex() == "2y^{4} - 960y^{3} - 2813184y^{2} + 702812160y + 1071929106432",
                format!("Q1 = {}", s.q),
            );
            match factor_over_z(&s.h, 192) {
                Ok(f) => check(
                    &mut p,
                    f.factors == sorted(vec![poly(&[744, 1]), poly(&[-984, 1])]),
                    "h1 factors",
                ),
                Err(e) => p.push(format!("factor: {e}")),
            }
        }
        Err(e) => p.push(format!("solve: {e}")),
    }
    let i = EllipticPoint {
        re: rat(0),
        sqrt_arg: 1,
        im_scale: rat(1),
        order: 2,
        gamma: None,
    };
    match evaluate_j_at(&eisenstein_j_level1(60), &i, 192, 1e-20) {
        Ok(v) => {
            let d = v.value.dist(&MpComplex::from_i64(984, 192));
            check(&mut p, d < 1e-20, format!("|j1(i) - 984| = {d:e}"));
        }
        Err(e) => p.push(format!("evaluate: {e}")),
    }
    let el = t.elapsed();
    check(&mut p, el < Duration::from_secs(5), format!("runtime {el:.2?}"));
    g.record("1 level-1 end-to-end", el, p);
}

const POINT_VALUES_29: [(&str, &str); 7] = [
    ("4.92450092088", "0"),
    ("-0.26966805687", "-0.07411556648"),
    ("-1.66789684021", "-0.78980656326"),
    ("-2.00000000000", "0"),
    ("-3.04937112672", "0"),
    ("-1.66789684021", "0.78980656326"),
    ("-0.26966805687", "0.07411556648"),
];

fn criterion_2(g: &mut Gate) {
    let t = Instant::now();
    let mut p = vec![];
    let data = load_level(&fixtures(), 29).unwrap().expect("level 29 fixture");
    let j = data.q_expansion.clone().expect("q-expansion");
    let (sys, _) = build_system(&j, 12).unwrap();
    check(&mut p, sys.dim() == 26, format!("system dimension {}", sys.dim()));
    let row = |e: i64| sys.exponents.iter().position(|&x| x == e).map(|r| sys.render(r));
    check(&mut p, row(-15).as_deref() == Some("A_{11} - B_{13}"), format!("q^-15 row {:?}", row(-15)));
    check(&mut p, row(-14).as_deref() == Some("A_{10} - B_{12} - 48"), format!("q^-14 row {:?}", row(-14)));
    let s = assemble_and_solve(&j, 7).unwrap();
    check(
        &mut p,
        s.p.to_tex()
            == "y^{12} + 8y^{11} + 38y^{10} + 296y^{9} + 2091y^{8} + 9000y^{7} + 24526y^{6} + 45520y^{5} + 59625y^{4} + 53152y^{3} + 28472y^{2} + 7248y + 624",
        "P29 text",
    );
    check(
        &mut p,
        s.q.to_tex()
            == "2y^{14} + 16y^{13} - 20y^{12} - 608y^{11} - 2122y^{10} + 968y^{9} + 27740y^{8} + 95176y^{7} + 175058y^{6} + 197896y^{5} + 140088y^{4} + 60736y^{3} + 15584y^{2} + 2176y + 128",
        "Q29 text",
    );
    let f = factor_over_z(&s.h, 192).unwrap();
    check(
        &mut p,
        f.factors == vec![poly(&[2, 1]), poly(&[-4, -32, -83, -66, -17, 2, 1])],
        "h29 factors",
    );
    let rep = run_pipeline(29, &config()).unwrap().unwrap();
    check(&mut p, rep.ok(), format!("pipeline failures {:?}", rep.failures));
    check(&mut p, rep.points.len() == 7, "seven points");
    for (row, (re, im)) in rep.points.iter().zip(POINT_VALUES_29) {
        check(&mut p, row.source == "series", format!("point {} not from the series", row.index));
        check(
            &mut p,
            row.residual.is_some_and(|r| r < 1e-8),
            format!("point {} residual {:?}", row.index, row.residual),
        );
        let printed = MpComplex::parse(re, im, 64).unwrap();
        let root = row.root.as_ref().map(|(a, b)| MpComplex::parse(a, b, 64).unwrap());
        check(
            &mut p,
            root.is_some_and(|r| r.dist(&printed) < 1e-11),
            format!("point {} root {:?} vs {re} {im}", row.index, row.root),
        );
    }
    let el = t.elapsed();
    check(&mut p, el < Duration::from_secs(10), format!("runtime {el:.2?}"));
    g.record("2 level-29 end-to-end", el, p);
}

fn criterion_3(g: &mut Gate) {
    let t = Instant::now();
    let mut p = vec![];
    for &n in LEVELS.iter() {
        let Some(d) = load_level(&fixtures(), n).unwrap() else {
            p.push(format!("N={n}: fixture missing"));
            continue;
        };
        let (Some(pp), Some(q)) = (&d.expected.p, &d.expected.q) else {
            p.push(format!("N={n}: no P, Q"));
            continue;
        };
        check(&mut p, pp.degree().map(|x| x + 2) == q.degree(), format!("N={n}: degrees"));
        check(&mut p, pp.is_monic(), format!("N={n}: P not monic"));
        check(&mut p, q.leading() == Some(&BigInt::from(2)), format!("N={n}: Q/2 not monic"));
        check(
            &mut p,
            q.coeffs().iter().all(|c| c % 2 == BigInt::from(0)),
            format!("N={n}: Q/2 not integral"),
        );
        let h = match poly_sqrt_half(q) {
            Ok(h) => h,
            Err(e) => {
                p.push(format!("N={n}: sqrt {e}"));
                continue;
            }
        };
        check(&mut p, h.mul(&h).scale(&BigInt::from(2)) == *q, format!("N={n}: 2h^2 != Q"));
        match factor_over_z(&h, 192) {
            Ok(f) => check(
                &mut p,
                f.factors == sorted(d.expected.factors.clone()),
                format!("N={n}: factors differ"),
            ),
            Err(e) => p.push(format!("N={n}: factor {e}")),
        }
    }
    g.record("3 fixture-wide structure (44 levels)", t.elapsed(), p);
}

fn criterion_4(g: &mut Gate) {
    let t = Instant::now();
    let mut p = vec![];
    for &n in LEVELS.iter() {
        let d = load_level(&fixtures(), n).unwrap().unwrap();
        let h = poly_sqrt_half(d.expected.q.as_ref().unwrap()).unwrap();
        check(
            &mut p,
            h.degree() == Some(d.values.len()),
            format!("N={n}: deg h {:?} vs {} points", h.degree(), d.values.len()),
        );
        let vals: Vec<MpComplex> = d
            .values
            .iter()
            .map(|v| {
                let v = v.as_ref().expect("tabulated value");
                MpComplex::parse(&v.re, &v.im, 192).unwrap()
            })
            .collect();
        let f = factor_over_z(&h, 192).unwrap();
        match match_values_to_roots(&vals, &f.roots.roots, &f.root_assignment, 1e-8) {
            Ok(m) => {
                let mut roots: Vec<usize> = m.entries.iter().map(|e| e.root_index).collect();
                roots.sort();
                roots.dedup();
                check(&mut p, roots.len() == vals.len(), format!("N={n}: not a bijection"));
            }
            Err(e) => p.push(format!("N={n}: {e}")),
        }
        // the tabulated value is a zero of h, independent of root finding
        for (i, v) in vals.iter().enumerate() {
            let r = eval_intpoly(&h, v).abs_f64();
            let scale: f64 = h.derivative().coeffs().iter().enumerate().map(|(k, c)| {
                c.to_string().parse::<f64>().unwrap().abs() * v.abs_f64().powi(k as i32)
            }).sum();
            check(&mut p, r <= 1e-8 * scale.max(1.0), format!("N={n} point {i}: |h(value)| = {r:e}"));
        }
    }
    g.record("4 tabulated values vs roots of h", t.elapsed(), p);
}

fn criterion_5(g: &mut Gate) {
    let t = Instant::now();
    let mut p = vec![];
    let mut literal_class_numbers = vec![];
    let mut table_conflicts = vec![];
    for (d, h) in [(-116, 6), (-164, 8), (-23, 3)] {
        check(
            &mut p,
            class_number_oracle(d).ok() == Some(h),
            format!("h({d}) = {:?}", class_number_oracle(d)),
        );
    }
    let mut rows = 0;
    for &n in LEVELS.iter() {
        let rep = run_pipeline(n, &config()).unwrap().unwrap();
        check(&mut p, rep.ok(), format!("N={n}: {:?}", rep.failures));
        for r in &rep.expected_rows {
            rows += 1;
            let computed = rep.class_field.rows.iter().find(|x| {
                x.discriminant == r.discriminant
                    && x.order_descriptor == r.order
                    && x.generating_polynomial == r.polynomial
            });
            if computed.is_none() {
                let divides = rep
                    .h
                    .as_ref()
                    .is_some_and(|h| hauptmodul_core::factorizer::exact_divide(h, &r.polynomial).is_ok());
                let msg = format!("N={n} D={}: {} is not produced", r.discriminant, r.polynomial);
                if divides {
                    p.push(msg);
                } else {
                    table_conflicts.push(format!("{msg}; it does not divide the tabulated h_{n}"));
                }
            }
            let oracle = class_number_oracle(r.discriminant).unwrap();
            if oracle != r.printed_class_number as u64 {
                literal_class_numbers.push(format!(
                    "N={n} D={}: reduced forms {oracle}, printed {}",
                    r.discriminant, r.printed_class_number
                ));
            }
            let quotient = ambiguous_quotient_class_number(r.discriminant).unwrap();
            check(
                &mut p,
                quotient == r.printed_class_number as u64,
                format!("N={n} D={}: quotient {quotient} vs printed {}", r.discriminant, r.printed_class_number),
            );
        }
        for m in &rep.class_field.integer_moduli {
            check(
                &mut p,
                m.distance.is_some_and(|d| d < 1e-8),
                format!("N={n} point {}: distance to integer {:?}", m.point, m.distance),
            );
        }
    }
    check(&mut p, rows > 0, "no tabulated rows");
    g.record(
        "5 class-field rows (discriminant, order, polynomial, classes modulo ambiguous forms)",
        t.elapsed(),
        p,
    );
    g.known_conflict("5 tabulated generating polynomials divide h_N", table_conflicts);
    g.known_conflict("5 class_number_oracle(D) equals the printed class number", literal_class_numbers);
}

const TOWER_VALUES_29: [([u32; 3], &str, &str); 12] = [
    ([0, 0, 0], "-0.26966805687175861246116334", "0.074115566475455788497966058"),
    ([0, 0, 1], "4.92450092087802125617303717", "0"),
    ([0, 0, 2], "-0.26966805687175861246116334", "-0.074115566475455788497966058"),
    ([0, 1, 0], "-0.26966805687175861246116334", "-0.074115566475455788497966058"),
    ([0, 1, 1], "4.92450092087802125617303717", "0"),
    ([0, 1, 2], "-0.26966805687175861246116334", "0.074115566475455788497966058"),
    ([1, 0, 0], "-1.66789684020963080052582196", "0.789806563261420529068981098"),
    ([1, 0, 1], "-1.66789684020963080052582196", "-0.789806563261420529068981098"),
    ([1, 0, 2], "-3.04937112671524243019906657", "0"),
    ([1, 1, 0], "-1.66789684020963080052582196", "-0.789806563261420529068981098"),
    ([1, 1, 1], "-1.66789684020963080052582196", "0.789806563261420529068981098"),
    ([1, 1, 2], "-3.04937112671524243019906657", "0"),
];

fn criterion_6(g: &mut Gate) {
    let t = Instant::now();
    let mut p = vec![];
    let mut seen = vec![];
    let mut towers = 0;
    for &n in LEVELS.iter() {
        for tower in load_towers(&fixtures(), n).unwrap() {
            towers += 1;
            seen.push(n);
            match verify_tower(&tower, VERIFY_BITS) {
                Ok(r) => {
                    check(
                        &mut p,
                        r.max_residual < 1e-20,
                        format!("N={n} {}: residual {:e}", tower.target, r.max_residual),
                    );
                    check(&mut p, r.covers_roots, format!("N={n} {}: roots not covered", tower.target));
                    check(
                        &mut p,
                        r.branch_checks.iter().all(|c| c.matches),
                        format!("N={n}: tabulated branch values"),
                    );
                    if n == 29 {
                        check(&mut p, r.branch_count == 12, "N=29: 12 combinations");
                        check(&mut p, r.distinct == 6, format!("N=29: {} distinct", r.distinct));
                        check(
                            &mut p,
                            r.histogram == BTreeMap::from([(2, 6)]),
                            format!("N=29 multiplicities {:?}", r.histogram),
                        );
                        for (b, re, im) in TOWER_VALUES_29 {
                            let v = evaluate_tower(&tower, &b, VERIFY_BITS).unwrap();
                            let printed = MpComplex::parse(re, im, VERIFY_BITS).unwrap();
                            let d = v.dist(&printed);
                            check(&mut p, d < 1e-26, format!("N=29 {b:?}: off by {d:e}"));
                        }
                    }
                }
                Err(e) => p.push(format!("N={n}: {e}")),
            }
        }
    }
    for n in [11, 17, 19, 29, 31, 47] {
        check(&mut p, seen.contains(&n), format!("no tower for N={n}"));
    }
    g.record(&format!("6 radical towers ({towers} towers)"), t.elapsed(), p);
}

/// Independent evaluation of `T = 2 D^3 j D j - 3 (D^2 j)^2` at `q^k`
/// straight from the coefficient list of `j` (exponents from -1).
fn direct_t(a: &[BigRat], k: i64) -> BigRat {
    let d = |l: u32, e: i64| -> BigRat {
        let i = e + 1;
        if i < 0 || i as usize >= a.len() {
            return rat(0);
        }
        let mut w = rat(1);
        for _ in 0..l {
            w *= rat(e);
        }
        w * &a[i as usize]
    };
    let mut s = rat(0);
    // exponents e1 + e2 = k with both at least -1
    for e1 in -1..=k + 1 {
        let e2 = k - e1;
        s += rat(2) * d(3, e1) * d(1, e2) - rat(3) * d(2, e1) * d(2, e2);
    }
    s
}

fn criterion_7(g: &mut Gate) {
    let t = Instant::now();
    let mut p = vec![];
    let j29 = load_level(&fixtures(), 29).unwrap().unwrap().q_expansion.unwrap();
    for (label, j, n, pts) in [("N=1", eisenstein_j_level1(16), 2i64, 2usize), ("N=29", j29, 12, 7)] {
        let a: Vec<BigRat> = j.coeffs().to_vec();
        for k in 0..=2 * n - 2 {
            let b = b_coefficient(&j, k);
            check(
                &mut p,
                b.map(|b| rat(2) * b) == Some(direct_t(&a, k)),
                format!("{label}: b({k}) differs from the direct series"),
            );
        }
        let s = assemble_and_solve(&j, pts).unwrap();
        let ing = schwarzian_ingredients(&j).unwrap();
        let r: QSeries = residual_series(&j, &ing, &s.p, &s.q);
        let nonzero: Vec<i64> = (r.min_exponent()..r.truncation())
            .filter(|&e| r.coeff(e).is_some_and(|c| c != rat(0)))
            .collect();
        check(&mut p, nonzero.is_empty(), format!("{label}: residual nonzero at {nonzero:?}"));
    }
    for &n in LEVELS.iter() {
        let d = load_level(&fixtures(), n).unwrap().unwrap();
        let h = poly_sqrt_half(d.expected.q.as_ref().unwrap()).unwrap();
        let f = factor_over_z(&h, 192).unwrap();
        let deg = h.degree().unwrap();
        // sum of roots and product of roots against the coefficients
        let mut sum = MpComplex::zero(f.bits);
        let mut prod = MpComplex::one(f.bits);
        for r in &f.roots.roots {
            sum = &sum + r;
            prod = &prod * r;
        }
        let radius: f64 = f.roots.certified_radius.iter().sum();
        let e1 = MpComplex::from_bigint(&-h.coeff(deg - 1), f.bits);
        let sign = if deg.is_multiple_of(2) { 1 } else { -1 };
        let en = MpComplex::from_bigint(&(h.coeff(0) * sign), f.bits);
        let maxabs = f.roots.roots.iter().map(|r| r.abs_f64()).fold(1.0f64, f64::max);
        check(&mut p, sum.dist(&e1) <= radius.max(1e-40), format!("N={n}: Vieta sum"));
        let prod_bound = radius * maxabs.powi(deg as i32 - 1) * deg as f64;
        check(&mut p, prod.dist(&en) <= prod_bound.max(1e-40), format!("N={n}: Vieta product"));
        let doubled = factor_with_limit(&h, 2 * f.bits, 2 * f.bits).unwrap();
        let accepted = |x: &[hauptmodul_core::factorizer::RoundingDecision]| -> Vec<(Option<IntPoly>, bool)> {
            x.iter().map(|d| (d.rounded.clone(), d.accepted)).collect()
        };
        check(
            &mut p,
            accepted(&f.decisions) == accepted(&doubled.decisions) && f.factors == doubled.factors,
            format!("N={n}: rounding decisions change at {} bits", 2 * f.bits),
        );
    }
    g.record("7 property suites (b formula, residual, Vieta, precision doubling)", t.elapsed(), p);
}

#[test]
fn acceptance() {
    let start = Instant::now();
    let mut g = Gate::default();
    criterion_1(&mut g);
    criterion_2(&mut g);
    criterion_3(&mut g);
    criterion_4(&mut g);
    criterion_5(&mut g);
    criterion_6(&mut g);
    criterion_7(&mut g);
    println!("total {:.2?}", start.elapsed());
    assert!(g.hard_failures.is_empty(), "{:#?}", g.hard_failures);
}
