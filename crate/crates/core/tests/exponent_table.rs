use rand::Rng;

use tpvr::exponent::{rat, ExtExponent, Rational};
use tpvr::rates::{
    idnorm_cases_3fold, idnorm_exponent_3fold, vol_exponent_3fold, vr_cases_3fold, vr_exponent_3fold, CaseHit, CaseKind,
};
use tpvr::sampling::rng;

const TABLE: &str = include_str!("fixtures/exponent_table.csv");

fn parse_rational(s: &str) -> Rational {
    tpvr::exponent::parse_rational(s).unwrap()
}

#[test]
fn grid_matches_reference_table() {
    let mut rows = 0;
    for line in TABLE.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        let p: ExtExponent = cells[0].parse().unwrap();
        let q: ExtExponent = cells[1].parse().unwrap();
        let r: ExtExponent = cells[2].parse().unwrap();
        let vr = vr_exponent_3fold(p, q, r);
        assert_eq!(vr.lower_exp, parse_rational(cells[3]), "vr lower {line}");
        assert_eq!(vr.upper_exp, parse_rational(cells[4]), "vr upper {line}");
        assert_eq!(vr.exact, cells[3] == cells[4], "{line}");
        assert_eq!(vol_exponent_3fold(p, q, r), parse_rational(cells[5]), "vol {line}");
        let id = idnorm_exponent_3fold(p, q, r);
        assert_eq!(id.lower_exp, parse_rational(cells[6]), "id lower {line}");
        assert_eq!(id.upper_exp, parse_rational(cells[7]), "id upper {line}");
        rows += 1;
    }
    assert_eq!(rows, 56);
}

fn random_unit_rational(g: &mut impl Rng, lo: Rational, hi: Rational) -> Rational {
    let den = g.random_range(1..=12i64);
    let t = rat(g.random_range(0..=den), den);
    lo + (hi - lo) * t
}

/// All exactly-determined cases agree, and any open interval contains them.
fn assert_consistent(hits: &[CaseHit], what: &str) {
    let exact: Vec<&CaseHit> = hits.iter().filter(|h| h.kind != CaseKind::Open).collect();
    for h in &exact {
        assert!(h.rate.exact, "{what}: {}", h.rate.case_label);
        assert_eq!(
            h.rate.lower_exp, exact[0].rate.lower_exp,
            "{what}: {} vs {}",
            h.rate.case_label, exact[0].rate.case_label
        );
    }
    for open in hits.iter().filter(|h| h.kind == CaseKind::Open) {
        for h in &exact {
            assert!(
                open.rate.lower_exp <= h.rate.lower_exp && h.rate.lower_exp <= open.rate.upper_exp,
                "{what}: {}",
                h.rate.case_label
            );
        }
    }
}

fn check_point(a: Rational, b: Rational, c: Rational) {
    let e = |x: Rational| ExtExponent::from_reciprocal(x).unwrap();
    let (p, q, r) = (e(a), e(b), e(c));
    let label = format!("({p}, {q}, {r})");
    assert_consistent(&vr_cases_3fold(p, q, r), &format!("vr {label}"));
    assert_consistent(&idnorm_cases_3fold(p, q, r), &format!("id {label}"));
}

#[test]
fn case_boundaries_are_consistent() {
    let (zero, half, one) = (rat(0, 1), rat(1, 2), rat(1, 1));
    let mut g = rng(7);
    for _ in 0..25 {
        // r = 2
        let a = random_unit_rational(&mut g, half, one);
        let b = random_unit_rational(&mut g, half, a);
        check_point(a, b, half);
        // p = 2
        let b = random_unit_rational(&mut g, zero, half);
        let c = random_unit_rational(&mut g, zero, b);
        check_point(half, b, c);
        // q = 2
        let a = random_unit_rational(&mut g, half, one);
        let c = random_unit_rational(&mut g, zero, half);
        check_point(a, half, c);
        // 1/p + 1/q + 1/r = 1 inside p <= 2 <= q
        let a = random_unit_rational(&mut g, half, one);
        let lo = (one - a) / rat(2, 1);
        let hi = if one - a < half { one - a } else { half };
        let b = random_unit_rational(&mut g, lo, hi);
        check_point(a, b, one - a - b);
    }
}
