//! Lattice laws as property checks, runnable from any harness.

use minisol_iv::domain::{AbstractValue, Domain, Elements, Interval, Thresholds};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

pub const DOMAIN: Domain = Domain::Range(-50, 50);

pub fn interval() -> impl Strategy<Value = Interval> {
    prop_oneof![
        1 => Just(Interval::Bottom),
        8 => (-50i64..=50, -50i64..=50).prop_map(|(a, b)| Interval::new(a.min(b), a.max(b))),
    ]
}

pub fn thresholds() -> impl Strategy<Value = Thresholds> {
    proptest::collection::btree_set(-50i64..=50, 0..6).prop_map(|s| Thresholds::with_literals(s.into_iter().map(Into::into)))
}

fn scalar() -> impl Strategy<Value = AbstractValue> {
    (interval(), any::<bool>()).prop_map(|(itv, assigned)| AbstractValue::Scalar { itv, domain: DOMAIN, assigned })
}

/// Values of one fixed composite shape: a struct holding a scalar, a
/// dynamic array and a two-element exact array.
pub fn value() -> impl Strategy<Value = AbstractValue> {
    (scalar(), interval(), scalar(), scalar(), scalar(), any::<bool>()).prop_map(|(s, len, summary, e0, e1, assigned)| {
        let len = len.meet(&Interval::new(0, 50));
        AbstractValue::Struct {
            fields: vec![
                ("s".into(), s),
                ("dyn".into(), AbstractValue::Array { length: len, elems: Elements::Summary(Box::new(summary)), fixed: false, assigned }),
                (
                    "fixed".into(),
                    AbstractValue::Array { length: Interval::singleton(2), elems: Elements::Exact(vec![e0, e1]), fixed: true, assigned },
                ),
            ],
            assigned,
        }
    })
}

pub type Law = (&'static str, fn(&mut TestRunner) -> Result<(), String>);

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(Config { cases, failure_persistence: None, ..Config::default() }, proptest::test_runner::TestRng::deterministic_rng(proptest::test_runner::RngAlgorithm::ChaCha))
}

fn check<S: Strategy>(r: &mut TestRunner, s: S, f: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String> {
    r.run(&s, f).map_err(|e| e.to_string())
}

fn join_commutative(r: &mut TestRunner) -> Result<(), String> {
    check(r, (interval(), interval(), value(), value()), |(a, b, x, y)| {
        prop_assert_eq!(a.join(&b), b.join(&a));
        prop_assert_eq!(x.join(&y), y.join(&x));
        Ok(())
    })
}

fn join_associative(r: &mut TestRunner) -> Result<(), String> {
    check(r, (interval(), interval(), interval(), value(), value(), value()), |(a, b, c, x, y, z)| {
        prop_assert_eq!(a.join(&b).join(&c), a.join(&b.join(&c)));
        prop_assert_eq!(x.join(&y).join(&z), x.join(&y.join(&z)));
        Ok(())
    })
}

fn join_idempotent(r: &mut TestRunner) -> Result<(), String> {
    check(r, (interval(), value()), |(a, x)| {
        prop_assert_eq!(a.join(&a), a.clone());
        prop_assert_eq!(x.join(&x), x.clone());
        Ok(())
    })
}

fn leq_reflexive(r: &mut TestRunner) -> Result<(), String> {
    check(r, (interval(), value()), |(a, x)| {
        prop_assert!(a.leq(&a));
        prop_assert!(x.leq(&x));
        Ok(())
    })
}

fn leq_antisymmetric(r: &mut TestRunner) -> Result<(), String> {
    check(r, (interval(), interval()), |(a, b)| {
        if a.leq(&b) && b.leq(&a) {
            prop_assert_eq!(a, b);
        }
        Ok(())
    })
}

fn leq_transitive(r: &mut TestRunner) -> Result<(), String> {
    // chains built by joining make the premise hold on every case
    check(r, (interval(), interval(), interval(), value(), value(), value()), |(a, b, c, x, y, z)| {
        let (b, c) = (a.join(&b), a.join(&b).join(&c));
        prop_assert!(a.leq(&b) && b.leq(&c) && a.leq(&c));
        let (y, z) = (x.join(&y), x.join(&y).join(&z));
        prop_assert!(x.leq(&y) && y.leq(&z) && x.leq(&z));
        Ok(())
    })
}

fn join_is_upper_bound(r: &mut TestRunner) -> Result<(), String> {
    check(r, (interval(), interval(), value(), value()), |(a, b, x, y)| {
        let j = a.join(&b);
        prop_assert!(a.leq(&j) && b.leq(&j));
        let j = x.join(&y);
        prop_assert!(x.leq(&j) && y.leq(&j));
        Ok(())
    })
}

fn meet_is_lower_bound(r: &mut TestRunner) -> Result<(), String> {
    check(r, (interval(), interval(), value(), value()), |(a, b, x, y)| {
        let m = a.meet(&b);
        prop_assert!(m.leq(&a) && m.leq(&b));
        let m = x.meet(&y);
        prop_assert!(m.leq(&x) && m.leq(&y));
        Ok(())
    })
}

fn leq_agrees_with_join(r: &mut TestRunner) -> Result<(), String> {
    check(r, (interval(), interval()), |(a, b)| {
        prop_assert_eq!(a.leq(&b), a.join(&b) == b);
        Ok(())
    })
}

fn widen_over_approximates(r: &mut TestRunner) -> Result<(), String> {
    check(r, (interval(), interval(), thresholds(), value(), value()), |(a, b, t, x, y)| {
        let w = a.widen(&b, &t, DOMAIN);
        prop_assert!(a.leq(&w) && b.leq(&w));
        let w = x.widen(&y, &t);
        prop_assert!(x.leq(&w) && y.leq(&w));
        Ok(())
    })
}

fn widen_terminates(r: &mut TestRunner) -> Result<(), String> {
    check(r, (proptest::collection::vec(interval(), 1..40), thresholds()), |(chain, t)| {
        let limit = 2 * (t.len() + 2);
        let mut acc = Interval::Bottom;
        let mut w = Interval::Bottom;
        let mut changes = 0;
        for v in chain {
            acc = acc.join(&v);
            let next = w.widen(&w.join(&acc), &t, DOMAIN);
            if next != w {
                changes += 1;
            }
            w = next;
            prop_assert!(acc.leq(&w));
        }
        prop_assert!(changes <= limit, "{} changes, limit {}", changes, limit);
        Ok(())
    })
}

pub const LAWS: [Law; 11] = [
    ("join commutative", join_commutative),
    ("join associative", join_associative),
    ("join idempotent", join_idempotent),
    ("leq reflexive", leq_reflexive),
    ("leq antisymmetric", leq_antisymmetric),
    ("leq transitive", leq_transitive),
    ("join is an upper bound", join_is_upper_bound),
    ("meet is a lower bound", meet_is_lower_bound),
    ("leq agrees with join", leq_agrees_with_join),
    ("widen over-approximates", widen_over_approximates),
    ("widening chains stabilize", widen_terminates),
];

/// Runs one law on `cases` random inputs.
pub fn run_law(law: &Law, cases: u32) -> Result<(), String> {
    (law.1)(&mut runner(cases))
}
