use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::frontend::Ty;

/// The representable range of a scalar type.
///
/// `Range` is a synthetic domain used for small-domain testing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    Uint(u16),
    Int(u16),
    Bool,
    Address,
    Enum(u16),
    Range(i64, i64),
}

impl Domain {
    pub fn of(ty: &Ty) -> Option<Domain> {
        Some(match ty {
            Ty::Uint(n) => Domain::Uint(*n),
            Ty::Int(n) => Domain::Int(*n),
            Ty::Bool => Domain::Bool,
            Ty::Address => Domain::Address,
            Ty::Enum(e) => Domain::Enum(e.variants.len() as u16),
            _ => return None,
        })
    }

    pub fn min(&self) -> BigInt {
        match self {
            Domain::Int(n) => -(BigInt::one() << (*n as usize - 1)),
            Domain::Range(lo, _) => BigInt::from(*lo),
            _ => BigInt::zero(),
        }
    }

    pub fn max(&self) -> BigInt {
        match self {
            Domain::Uint(n) => (BigInt::one() << *n as usize) - 1,
            Domain::Int(n) => (BigInt::one() << (*n as usize - 1)) - 1,
            Domain::Bool => BigInt::one(),
            Domain::Address => (BigInt::one() << 160usize) - 1,
            Domain::Enum(k) => BigInt::from(*k) - 1,
            Domain::Range(_, hi) => BigInt::from(*hi),
        }
    }

    /// Every value of the type.
    pub fn top(&self) -> Interval {
        Interval::new(self.min(), self.max())
    }

    pub fn contains(&self, v: &BigInt) -> bool {
        &self.min() <= v && v <= &self.max()
    }
}

/// A closed integer interval, or the empty interval `Bottom`.
///
/// Intervals do not carry their type; operations that depend on the type's
/// range take a [`Domain`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Interval {
    Bottom,
    Range { lo: BigInt, hi: BigInt },
}

impl Interval {
    /// `[lo, hi]`, or `Bottom` when `lo > hi`.
    pub fn new(lo: impl Into<BigInt>, hi: impl Into<BigInt>) -> Interval {
        let (lo, hi) = (lo.into(), hi.into());
        if lo > hi {
            Interval::Bottom
        } else {
            Interval::Range { lo, hi }
        }
    }

    pub fn singleton(v: impl Into<BigInt>) -> Interval {
        let v = v.into();
        Interval::Range { lo: v.clone(), hi: v }
    }

    pub fn bool_value(b: bool) -> Interval {
        Interval::singleton(b as u8)
    }

    /// `[0, 1]`: a boolean whose value is unknown.
    pub fn unknown_bool() -> Interval {
        Interval::new(0, 1)
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, Interval::Bottom)
    }

    pub fn bounds(&self) -> Option<(&BigInt, &BigInt)> {
        match self {
            Interval::Bottom => None,
            Interval::Range { lo, hi } => Some((lo, hi)),
        }
    }

    pub fn lo(&self) -> Option<&BigInt> {
        self.bounds().map(|b| b.0)
    }

    pub fn hi(&self) -> Option<&BigInt> {
        self.bounds().map(|b| b.1)
    }

    pub fn as_singleton(&self) -> Option<&BigInt> {
        match self.bounds() {
            Some((lo, hi)) if lo == hi => Some(lo),
            _ => None,
        }
    }

    pub fn contains(&self, v: &BigInt) -> bool {
        matches!(self.bounds(), Some((lo, hi)) if lo <= v && v <= hi)
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&BigInt::zero())
    }

    /// Number of integers in the interval.
    pub fn width(&self) -> BigInt {
        match self.bounds() {
            None => BigInt::zero(),
            Some((lo, hi)) => hi - lo + 1,
        }
    }

    /// Subset test, the order of the interval lattice.
    pub fn leq(&self, other: &Interval) -> bool {
        match (self.bounds(), other.bounds()) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some((a, b)), Some((c, d))) => c <= a && b <= d,
        }
    }

    /// Interval hull.
    pub fn join(&self, other: &Interval) -> Interval {
        match (self.bounds(), other.bounds()) {
            (None, _) => other.clone(),
            (_, None) => self.clone(),
            (Some((a, b)), Some((c, d))) => Interval::new(a.min(c).clone(), b.max(d).clone()),
        }
    }

    /// Intersection.
    pub fn meet(&self, other: &Interval) -> Interval {
        match (self.bounds(), other.bounds()) {
            (Some((a, b)), Some((c, d))) => Interval::new(a.max(c).clone(), b.min(d).clone()),
            _ => Interval::Bottom,
        }
    }

    pub fn clamp(&self, domain: Domain) -> Interval {
        self.meet(&domain.top())
    }

    /// Threshold widening: a bound that moved outward jumps to the nearest
    /// threshold at or beyond its new value, or to the domain limit.
    pub fn widen(&self, newer: &Interval, thresholds: &Thresholds, domain: Domain) -> Interval {
        let (Some((old_lo, old_hi)), Some((new_lo, new_hi))) = (self.bounds(), newer.bounds()) else {
            return self.join(newer);
        };
        let lo = if new_lo < old_lo {
            thresholds.below(new_lo, domain)
        } else {
            old_lo.clone()
        };
        let hi = if new_hi > old_hi {
            thresholds.above(new_hi, domain)
        } else {
            old_hi.clone()
        };
        Interval::new(lo, hi)
    }

    /// Renders with `max` for the uint256 maximum, like `[0, max]`.
    pub fn render(&self) -> String {
        self.to_string()
    }

    /// Same as [`Interval::render`] but spells Bottom as `bottom`.
    pub fn render_ascii(&self) -> String {
        match self {
            Interval::Bottom => "bottom".into(),
            _ => self.to_string(),
        }
    }
}

fn uint256_max() -> BigInt {
    (BigInt::one() << 256usize) - 1
}

fn render_bound(v: &BigInt) -> String {
    if *v == uint256_max() {
        "max".into()
    } else {
        v.to_string()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Interval::Bottom => write!(f, "⊥"),
            Interval::Range { lo, hi } => write!(f, "[{}, {}]", render_bound(lo), render_bound(hi)),
        }
    }
}

/// Widening thresholds. The domain limits are always implied, and `0` and `1`
/// are always present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Thresholds(BTreeSet<BigInt>);

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds(BTreeSet::from([BigInt::zero(), BigInt::one()]))
    }
}

impl Thresholds {
    pub fn with_literals<I: IntoIterator<Item = BigInt>>(literals: I) -> Self {
        let mut t = Thresholds::default();
        t.0.extend(literals);
        t
    }

    pub fn insert(&mut self, v: BigInt) {
        self.0.insert(v);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest threshold `<= v` inside the domain, else the domain minimum.
    pub fn below(&self, v: &BigInt, domain: Domain) -> BigInt {
        let min = domain.min();
        self.0.range(..=v.clone()).next_back().filter(|t| **t >= min).cloned().unwrap_or(min)
    }

    /// Smallest threshold `>= v` inside the domain, else the domain maximum.
    pub fn above(&self, v: &BigInt, domain: Domain) -> BigInt {
        let max = domain.max();
        self.0.range(v.clone()..).next().filter(|t| **t <= max).cloned().unwrap_or(max)
    }
}
