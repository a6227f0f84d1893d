mod common;

use common::oracle::{brute_binop, exhaustive};
use minisol_iv::domain::{interval_binop, ArithOp, Domain, Interval};

fn assert_clean(lo: i64, hi: i64, domain: Domain) {
    let report = exhaustive(lo, hi, domain);
    assert!(report.cases > 0);
    assert!(report.mismatches.is_empty(), "{} mismatches, first: {:?}", report.mismatches.len(), &report.mismatches[..report.mismatches.len().min(5)]);
}

#[test]
fn exhaustive_small_unsigned_domain() {
    assert_clean(0, 20, Domain::Range(0, 31));
}

#[test]
fn exhaustive_uint8() {
    assert_clean(0, 20, Domain::Uint(8));
}

#[test]
fn exhaustive_signed_domain() {
    assert_clean(-12, 12, Domain::Range(-16, 15));
}

#[test]
fn reference_agrees_with_hand_results() {
    // quotients of 7..9 over divisors 1..3 with zero skipped
    assert_eq!(brute_binop(ArithOp::Div, (7, 9), (0, 3), (0, 255)), (Some((2, 9)), false, true));
    assert_eq!(brute_binop(ArithOp::Mod, (5, 5), (3, 3), (0, 255)), (Some((2, 2)), false, false));
    assert_eq!(brute_binop(ArithOp::Div, (1, 1), (0, 0), (0, 255)), (None, false, true));
}

#[test]
fn large_operands_stay_sound_on_samples() {
    let d = Domain::Uint(256);
    let max = d.max();
    let a = Interval::new(max.clone() - 1000, max.clone());
    let b = Interval::new(1, 3);
    let sum = interval_binop(ArithOp::Add, &a, &b, d);
    assert!(sum.overflow);
    assert_eq!(sum.result, Interval::new(max.clone() - 999, max.clone()));
    let q = interval_binop(ArithOp::Div, &a, &b, d);
    assert_eq!(q.result, Interval::new((max.clone() - 1000) / 3, max));
}
