use std::path::PathBuf;

use hauptmodul_core::exact::{
    poly_of_series, poly_sqrt_half, rat, solve_rational_system, BigRat, IntPoly, QSeries, RatPoly,
};
use hauptmodul_core::factorizer::{factor_over_z, factor_with_limit};
use hauptmodul_core::hauptmodul::{eisenstein_j_level1, load_level};
use hauptmodul_core::mp::{roots_of_intpoly, MpComplex};
use hauptmodul_core::pipeline::{run_pipeline, Config, LevelReport};
use hauptmodul_core::schwarzian_ode::{
    assemble_and_solve, b_coefficient, residual_series, schwarzian_ingredients,
};
use num_bigint::BigInt;
use proptest::prelude::*;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn series(min: i64, c: &[i64]) -> QSeries {
    QSeries::new(min, c.iter().map(|&x| rat(x)).collect())
}

fn key(s: &QSeries) -> (i64, Vec<BigRat>) {
    (s.min_exponent(), s.coeffs().to_vec())
}

fn arb_series() -> impl Strategy<Value = QSeries> {
    (-2i64..2, prop::collection::vec(-50i64..50, 1..8)).prop_map(|(m, c)| series(m, &c))
}

fn j29() -> QSeries {
    load_level(&fixtures(), 29).unwrap().unwrap().q_expansion.unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn series_product_commutes(a in arb_series(), b in arb_series()) {
        prop_assert_eq!(key(&a.mul(&b)), key(&b.mul(&a)));
    }

    #[test]
    fn series_product_associates(a in arb_series(), b in arb_series(), c in arb_series()) {
        prop_assert_eq!(key(&a.mul(&b).mul(&c)), key(&a.mul(&b.mul(&c))));
    }

    #[test]
    fn polynomial_substitution_is_multiplicative(
        f in prop::collection::vec(-5i64..5, 1..4),
        g in prop::collection::vec(-5i64..5, 1..4),
    ) {
        let j = eisenstein_j_level1(8);
        let f = RatPoly::new(f.into_iter().map(rat).collect());
        let g = RatPoly::new(g.into_iter().map(rat).collect());
        prop_assume!(!f.is_zero() && !g.is_zero());
        let lhs = poly_of_series(&f.mul(&g), &j);
        let rhs = poly_of_series(&f, &j).mul(&poly_of_series(&g, &j));
        let t = lhs.truncation().min(rhs.truncation());
        let m = lhs.min_exponent().min(rhs.min_exponent());
        for e in m..t {
            prop_assert_eq!(lhs.coeff(e), rhs.coeff(e), "exponent {}", e);
        }
    }

    #[test]
    fn exact_solve_recovers_solution(
        x in prop::collection::vec(-20i64..20, 4),
        perturb in prop::collection::vec(-3i64..3, 16),
    ) {
        // diagonally dominant, hence invertible
        let n = 4;
        let m: Vec<Vec<BigRat>> = (0..n)
            .map(|i| (0..n).map(|k| rat(perturb[i * n + k] + if i == k { 20 } else { 0 })).collect())
            .collect();
        let x: Vec<BigRat> = x.into_iter().map(rat).collect();
        let rhs: Vec<BigRat> = m
            .iter()
            .map(|row| row.iter().zip(&x).map(|(a, b)| a * b).fold(rat(0), |s, v| s + v))
            .collect();
        prop_assert_eq!(solve_rational_system(&m, &rhs).unwrap(), x);
    }

    #[test]
    fn exp_inverts_ln(re in -50.0f64..50.0, im in -50.0f64..50.0) {
        prop_assume!(re.abs() + im.abs() > 1e-3);
        let z = MpComplex::from_f64(re, im, 192);
        let w = z.ln().unwrap().exp();
        prop_assert!(w.dist(&z) < 1e-45 * z.abs_f64().max(1.0));
    }

    #[test]
    fn vieta_sums_hold(roots in prop::collection::btree_set(-30i64..30, 1..7)) {
        let h = IntPoly::product(&roots.iter().map(|&r| IntPoly::linear(r)).collect::<Vec<_>>());
        let set = roots_of_intpoly(&h, 128).unwrap();
        let d = h.degree().unwrap();
        let mut sum = MpComplex::zero(128);
        for r in &set.roots {
            sum = &sum + r;
        }
        let e1 = MpComplex::from_bigint(&-h.coeff(d - 1), 128);
        let radius: f64 = set.certified_radius.iter().sum();
        prop_assert!(sum.dist(&e1) <= radius.max(1e-30));
    }

    #[test]
    fn factoring_recovers_products(
        lin in prop::collection::btree_set(-40i64..40, 0..3),
        quad in prop::collection::vec((1i64..30, -10i64..10), 0..2),
    ) {
        // y^2 + b y + c with negative discriminant is irreducible
        let mut parts: Vec<IntPoly> = lin.iter().map(|&r| IntPoly::linear(r)).collect();
        for (c, b) in quad {
            prop_assume!(b * b < 4 * c);
            parts.push(IntPoly::from_i64(&[c, b, 1]));
        }
        prop_assume!(!parts.is_empty());
        let h = IntPoly::product(&parts);
        prop_assume!(hauptmodul_core::factorizer::is_squarefree(&h));
        let f = factor_over_z(&h, 128).unwrap();
        prop_assert_eq!(f.product(), h.clone());
        prop_assert_eq!(f.factors.len(), parts.len());
        let g = factor_with_limit(&h, 2 * f.bits, 2 * f.bits).unwrap();
        let decisions = |d: &[hauptmodul_core::factorizer::RoundingDecision]| -> Vec<(Option<IntPoly>, bool)> {
            d.iter().map(|x| (x.rounded.clone(), x.accepted)).collect()
        };
        prop_assert_eq!(decisions(&f.decisions), decisions(&g.decisions));
    }

    #[test]
    fn sqrt_half_inverts_squaring(c in prop::collection::vec(-100i64..100, 1..6)) {
        let mut c = c;
        c.push(1);
        let h = IntPoly::from_i64(&c);
        let q = h.mul(&h).scale(&BigInt::from(2));
        prop_assert_eq!(poly_sqrt_half(&q).unwrap(), h);
    }

    #[test]
    fn eisenstein_prefix_is_stable(t1 in 2usize..20, extra in 1usize..20) {
        let a = eisenstein_j_level1(t1);
        let b = eisenstein_j_level1(t1 + extra);
        prop_assert_eq!(key(&b.truncate(a.truncation())), key(&a));
    }

    #[test]
    fn b_formula_matches_series_level29(k in 0i64..=22) {
        let j = j29();
        let ing = schwarzian_ingredients(&j).unwrap();
        prop_assert_eq!(ing.t_series.coeff(k), b_coefficient(&j, k).map(|b| rat(2) * b));
    }
}

#[test]
fn residual_vanishes_after_solving() {
    for (j, pts) in [(eisenstein_j_level1(16), 2), (j29(), 7)] {
        let s = assemble_and_solve(&j, pts).unwrap();
        let ing = schwarzian_ingredients(&j).unwrap();
        let r = residual_series(&j, &ing, &s.p, &s.q);
        assert!(r.coeffs().iter().all(|c| *c == rat(0)));
    }
}

#[test]
fn level_report_round_trips() {
    let cfg = Config {
        fixtures: fixtures(),
        ..Config::default()
    };
    for n in [1, 29, 46, 105] {
        let rep = run_pipeline(n, &cfg).unwrap().unwrap();
        let text = serde_json::to_string(&rep).unwrap();
        let back: LevelReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, rep);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}

#[test]
fn reports_are_deterministic() {
    let cfg = Config {
        fixtures: fixtures(),
        ..Config::default()
    };
    let a = serde_json::to_string(&run_pipeline(29, &cfg).unwrap()).unwrap();
    let b = serde_json::to_string(&run_pipeline(29, &cfg).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn verify_all_is_clean_and_ordered() {
    let cfg = Config {
        fixtures: fixtures(),
        ..Config::default()
    };
    let s = hauptmodul_core::pipeline::verify_all(&cfg, 4);
    assert_eq!((s.failures, s.skipped), (0, 0));
    let levels: Vec<u32> = s.levels.iter().map(|l| l.level).collect();
    assert_eq!(levels, hauptmodul_core::hauptmodul::LEVELS.to_vec());
}
