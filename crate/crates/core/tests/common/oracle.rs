//! Brute-force reference for interval arithmetic and comparisons.

use minisol_iv::domain::{interval_binop, interval_compare, ArithOp, CmpOp, Domain, Interval};
use num_bigint::BigInt;

fn concrete_arith(op: ArithOp, x: i64, y: i64) -> Option<i64> {
    match op {
        ArithOp::Add => Some(x + y),
        ArithOp::Sub => Some(x - y),
        ArithOp::Mul => Some(x * y),
        ArithOp::Div | ArithOp::Mod if y == 0 => None,
        // Rust `/` and `%` on i64 truncate toward zero
        ArithOp::Div => Some(x / y),
        ArithOp::Mod => Some(x % y),
    }
}

fn concrete_cmp(op: CmpOp, x: i64, y: i64) -> bool {
    match op {
        CmpOp::Lt => x < y,
        CmpOp::Le => x <= y,
        CmpOp::Gt => x > y,
        CmpOp::Ge => x >= y,
        CmpOp::Eq => x == y,
        CmpOp::Ne => x != y,
    }
}

/// Hull of the non-reverting results, whether some result overflows, and
/// whether a zero divisor is possible.
pub fn brute_binop(op: ArithOp, a: (i64, i64), b: (i64, i64), dom: (i64, i64)) -> (Option<(i64, i64)>, bool, bool) {
    let mut hull: Option<(i64, i64)> = None;
    let mut overflow = false;
    let mut zero = false;
    for x in a.0..=a.1 {
        for y in b.0..=b.1 {
            match concrete_arith(op, x, y) {
                None => zero = true,
                Some(r) if r < dom.0 || r > dom.1 => overflow = true,
                Some(r) => hull = Some(hull.map_or((r, r), |(lo, hi)| (lo.min(r), hi.max(r)))),
            }
        }
    }
    (hull, overflow, zero)
}

pub fn brute_compare(op: CmpOp, a: (i64, i64), b: (i64, i64)) -> (i64, i64) {
    let mut seen = [false, false];
    for x in a.0..=a.1 {
        for y in b.0..=b.1 {
            seen[concrete_cmp(op, x, y) as usize] = true;
        }
    }
    match seen {
        [true, true] => (0, 1),
        [false, true] => (1, 1),
        _ => (0, 0),
    }
}

fn itv(p: (i64, i64)) -> Interval {
    Interval::new(p.0, p.1)
}

fn as_pair(i: &Interval) -> Option<(i64, i64)> {
    i.bounds().map(|(lo, hi)| (i64::try_from(lo).unwrap(), i64::try_from(hi).unwrap()))
}

#[derive(Debug, Default)]
pub struct OracleReport {
    pub cases: usize,
    pub mismatches: Vec<String>,
}

/// Every pair of intervals with bounds in `lo..=hi`, every operator.
pub fn exhaustive(lo: i64, hi: i64, domain: Domain) -> OracleReport {
    let dom = (i64::try_from(domain.min()).unwrap(), i64::try_from(domain.max()).unwrap());
    let mut intervals = Vec::new();
    for a in lo..=hi {
        for b in a..=hi {
            intervals.push((a, b));
        }
    }
    let mut report = OracleReport::default();
    for &a in &intervals {
        for &b in &intervals {
            for op in ArithOp::ALL {
                let got = interval_binop(op, &itv(a), &itv(b), domain);
                let (hull, overflow, zero) = brute_binop(op, a, b, dom);
                report.cases += 1;
                if as_pair(&got.result) != hull || got.overflow != overflow || got.div_by_zero != zero {
                    report.mismatches.push(format!(
                        "{op:?} {a:?} {b:?}: got ({}, {}, {}), expected ({hull:?}, {overflow}, {zero})",
                        got.result, got.overflow, got.div_by_zero
                    ));
                }
            }
            for op in CmpOp::ALL {
                let got = interval_compare(op, &itv(a), &itv(b));
                let want = brute_compare(op, a, b);
                report.cases += 1;
                if as_pair(&got) != Some(want) {
                    report.mismatches.push(format!("{op:?} {a:?} {b:?}: got {got}, expected {want:?}"));
                }
            }
        }
    }
    report
}

pub fn big(v: i64) -> BigInt {
    BigInt::from(v)
}
