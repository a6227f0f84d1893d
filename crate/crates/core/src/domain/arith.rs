//! Interval arithmetic with checked (reverting) overflow semantics.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::interval::{Domain, Interval};
use crate::frontend::ast::BinaryOp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl ArithOp {
    pub const ALL: [ArithOp; 5] = [ArithOp::Add, ArithOp::Sub, ArithOp::Mul, ArithOp::Div, ArithOp::Mod];

    pub fn from_binary(op: BinaryOp) -> Option<ArithOp> {
        Some(match op {
            BinaryOp::Add => ArithOp::Add,
            BinaryOp::Sub => ArithOp::Sub,
            BinaryOp::Mul => ArithOp::Mul,
            BinaryOp::Div => ArithOp::Div,
            BinaryOp::Mod => ArithOp::Mod,
            _ => return None,
        })
    }

    /// Concrete semantics without the domain check; `None` on a zero divisor.
    pub fn apply(self, x: &BigInt, y: &BigInt) -> Option<BigInt> {
        Some(match self {
            ArithOp::Add => x + y,
            ArithOp::Sub => x - y,
            ArithOp::Mul => x * y,
            ArithOp::Div if y.is_zero() => return None,
            ArithOp::Mod if y.is_zero() => return None,
            // BigInt division and remainder truncate toward zero
            ArithOp::Div => x / y,
            ArithOp::Mod => x % y,
        })
    }
}

impl CmpOp {
    pub const ALL: [CmpOp; 6] = [CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge, CmpOp::Eq, CmpOp::Ne];

    pub fn from_binary(op: BinaryOp) -> Option<CmpOp> {
        Some(match op {
            BinaryOp::Lt => CmpOp::Lt,
            BinaryOp::Le => CmpOp::Le,
            BinaryOp::Gt => CmpOp::Gt,
            BinaryOp::Ge => CmpOp::Ge,
            BinaryOp::Eq => CmpOp::Eq,
            BinaryOp::Ne => CmpOp::Ne,
            _ => return None,
        })
    }

    pub fn apply(self, x: &BigInt, y: &BigInt) -> bool {
        match self {
            CmpOp::Lt => x < y,
            CmpOp::Le => x <= y,
            CmpOp::Gt => x > y,
            CmpOp::Ge => x >= y,
            CmpOp::Eq => x == y,
            CmpOp::Ne => x != y,
        }
    }

    pub fn negate(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Le => CmpOp::Gt,
            CmpOp::Gt => CmpOp::Le,
            CmpOp::Ge => CmpOp::Lt,
            CmpOp::Eq => CmpOp::Ne,
            CmpOp::Ne => CmpOp::Eq,
        }
    }

    /// The same relation with operands swapped: `a < b` iff `b > a`.
    pub fn flip(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Gt,
            CmpOp::Le => CmpOp::Ge,
            CmpOp::Gt => CmpOp::Lt,
            CmpOp::Ge => CmpOp::Le,
            other => other,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinOpOutcome {
    pub result: Interval,
    pub overflow: bool,
    pub div_by_zero: bool,
}

impl BinOpOutcome {
    fn bottom() -> Self {
        BinOpOutcome { result: Interval::Bottom, overflow: false, div_by_zero: false }
    }
}

/// Operands narrower than this are enumerated for an exact result.
const ENUMERATION_LIMIT: u32 = 256;

fn small(i: &Interval) -> bool {
    i.width() <= BigInt::from(ENUMERATION_LIMIT)
}

fn values(i: &Interval) -> impl Iterator<Item = BigInt> + '_ {
    let (lo, hi) = i.bounds().expect("non-bottom");
    num_iter(lo.clone(), hi.clone())
}

fn num_iter(lo: BigInt, hi: BigInt) -> impl Iterator<Item = BigInt> {
    let mut next = lo;
    std::iter::from_fn(move || {
        if next > hi {
            None
        } else {
            let v = next.clone();
            next += 1;
            Some(v)
        }
    })
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

/// Hull accumulator.
#[derive(Default)]
struct Hull(Option<(BigInt, BigInt)>);

impl Hull {
    fn add(&mut self, lo: BigInt, hi: BigInt) {
        if lo > hi {
            return;
        }
        self.0 = Some(match self.0.take() {
            None => (lo, hi),
            Some((a, b)) => (a.min(lo), b.max(hi)),
        });
    }

    fn add_interval(&mut self, i: &Interval) {
        if let Some((lo, hi)) = i.bounds() {
            self.add(lo.clone(), hi.clone());
        }
    }

    fn finish(self) -> Interval {
        match self.0 {
            None => Interval::Bottom,
            Some((lo, hi)) => Interval::new(lo, hi),
        }
    }
}

/// Smallest interval containing `{x op y}` over the operands, restricted to
/// results inside `domain`, plus overflow and zero-divisor flags.
pub fn interval_binop(op: ArithOp, a: &Interval, b: &Interval, domain: Domain) -> BinOpOutcome {
    let (Some((a_lo, a_hi)), Some((b_lo, b_hi))) = (a.bounds(), b.bounds()) else {
        return BinOpOutcome::bottom();
    };
    let (min, max) = (domain.min(), domain.max());
    match op {
        ArithOp::Add | ArithOp::Sub => {
            let (lo, hi) = if op == ArithOp::Add { (a_lo + b_lo, a_hi + b_hi) } else { (a_lo - b_hi, a_hi - b_lo) };
            let overflow = lo < min || hi > max;
            BinOpOutcome { result: Interval::new(lo.max(min), hi.min(max)), overflow, div_by_zero: false }
        }
        ArithOp::Mul => mul(a, b, &min, &max),
        ArithOp::Div | ArithOp::Mod => {
            let div_by_zero = b.contains_zero();
            let mut parts = Vec::new();
            if b_lo.is_negative() {
                parts.push(Interval::new(b_lo.clone(), b_hi.clone().min(-BigInt::one())));
            }
            if b_hi.is_positive() {
                parts.push(Interval::new(b_lo.clone().max(BigInt::one()), b_hi.clone()));
            }
            let mut out = if op == ArithOp::Div { div(a, &parts, &min, &max) } else { modulo(a, &parts) };
            out.div_by_zero = div_by_zero;
            out
        }
    }
}

fn mul(a: &Interval, b: &Interval, min: &BigInt, max: &BigInt) -> BinOpOutcome {
    let (a_lo, a_hi) = a.bounds().unwrap();
    let (b_lo, b_hi) = b.bounds().unwrap();
    let corners = [a_lo * b_lo, a_lo * b_hi, a_hi * b_lo, a_hi * b_hi];
    let lo = corners.iter().min().unwrap().clone();
    let hi = corners.iter().max().unwrap().clone();
    let overflow = &lo < min || &hi > max;
    if !overflow {
        return BinOpOutcome { result: Interval::new(lo, hi), overflow, div_by_zero: false };
    }
    // Products of a fixed x form an arithmetic progression in y, so the
    // feasible ones are a contiguous y-range; enumerating the narrow operand
    // gives the exact hull of in-domain results.
    let (fixed, ranged) = if small(a) {
        (a, b)
    } else if small(b) {
        (b, a)
    } else {
        return BinOpOutcome { result: Interval::new(lo.max(min.clone()), hi.min(max.clone())), overflow, div_by_zero: false };
    };
    let (c, d) = ranged.bounds().unwrap();
    let mut hull = Hull::default();
    for x in values(fixed) {
        if x.is_zero() {
            if min <= &x && &x <= max {
                hull.add(x.clone(), x);
            }
        } else if x.is_positive() {
            let ylo = ceil_div(min, &x).max(c.clone());
            let yhi = max.div_floor(&x).min(d.clone());
            if ylo <= yhi {
                hull.add(&x * &ylo, &x * &yhi);
            }
        } else {
            let ylo = ceil_div(max, &x).max(c.clone());
            let yhi = min.div_floor(&x).min(d.clone());
            if ylo <= yhi {
                hull.add(&x * &yhi, &x * &ylo);
            }
        }
    }
    BinOpOutcome { result: hull.finish(), overflow, div_by_zero: false }
}

/// Division over each sign-homogeneous divisor part. Truncating division is
/// monotone in each argument there, so corners give the exact hull. The only
/// overflow is `min / -1`, handled by splitting `-1` off.
fn div(a: &Interval, parts: &[Interval], min: &BigInt, max: &BigInt) -> BinOpOutcome {
    let (a_lo, a_hi) = a.bounds().unwrap();
    let minus_one = -BigInt::one();
    let mut hull = Hull::default();
    let mut overflow = false;
    let corner_hull = |d_lo: &BigInt, d_hi: &BigInt, hull: &mut Hull| {
        let qs = [a_lo / d_lo, a_lo / d_hi, a_hi / d_lo, a_hi / d_hi];
        hull.add(qs.iter().min().unwrap().clone(), qs.iter().max().unwrap().clone());
    };
    for part in parts {
        let (p_lo, p_hi) = part.bounds().unwrap();
        if part.contains(&minus_one) {
            // y = -1 gives -x exactly
            let lo = -a_hi;
            let hi = -a_lo;
            overflow |= &lo < min || &hi > max;
            hull.add_interval(&Interval::new(lo, hi).meet(&Interval::new(min.clone(), max.clone())));
            if p_lo < &minus_one {
                corner_hull(p_lo, &BigInt::from(-2), &mut hull);
            }
        } else {
            corner_hull(p_lo, p_hi, &mut hull);
        }
    }
    BinOpOutcome { result: hull.finish(), overflow, div_by_zero: false }
}

/// Remainders of a non-negative range `[p, q]` by a fixed modulus `m > 0`.
fn mod_nonneg(p: &BigInt, q: &BigInt, m: &BigInt) -> (BigInt, BigInt) {
    if p / m == q / m {
        (p % m, q % m)
    } else {
        (BigInt::zero(), m - 1)
    }
}

/// Remainder takes the dividend's sign and ignores the divisor's.
fn modulo(a: &Interval, parts: &[Interval]) -> BinOpOutcome {
    let (a_lo, a_hi) = a.bounds().unwrap();
    // Split the dividend into its non-negative and negative parts, the latter
    // as magnitudes.
    let pos = (a_hi >= &BigInt::zero()).then(|| (a_lo.clone().max(BigInt::zero()), a_hi.clone()));
    let neg = a_lo.is_negative().then(|| ((-a_hi.clone()).max(BigInt::one()), -a_lo.clone()));

    let mut hull = Hull::default();
    let total: BigInt = parts.iter().map(|p| p.width()).sum();
    if total <= BigInt::from(ENUMERATION_LIMIT) {
        for part in parts {
            for y in values(part) {
                let m = y.abs();
                if let Some((p, q)) = &pos {
                    let (lo, hi) = mod_nonneg(p, q, &m);
                    hull.add(lo, hi);
                }
                if let Some((p, q)) = &neg {
                    let (lo, hi) = mod_nonneg(p, q, &m);
                    hull.add(-hi, -lo);
                }
            }
        }
    } else {
        let m_min = parts.iter().map(|p| {
            let (lo, hi) = p.bounds().unwrap();
            if lo.is_positive() { lo.clone() } else { hi.abs() }
        });
        let m_min = m_min.min().unwrap();
        let m_max = parts.iter().map(|p| {
            let (lo, hi) = p.bounds().unwrap();
            lo.abs().max(hi.abs())
        });
        let m_max = m_max.max().unwrap();
        if let Some((p, q)) = &pos {
            if q < &m_min {
                hull.add(p.clone(), q.clone());
            } else {
                hull.add(BigInt::zero(), q.clone().min(&m_max - 1));
            }
        }
        if let Some((p, q)) = &neg {
            if q < &m_min {
                hull.add(-q.clone(), -p.clone());
            } else {
                hull.add(-(q.clone().min(&m_max - 1)), BigInt::zero());
            }
        }
    }
    BinOpOutcome { result: hull.finish(), overflow: false, div_by_zero: false }
}

/// `[1,1]` if the relation holds for every pair, `[0,0]` if for none,
/// `[0,1]` otherwise.
pub fn interval_compare(op: CmpOp, a: &Interval, b: &Interval) -> Interval {
    let (Some((a_lo, a_hi)), Some((b_lo, b_hi))) = (a.bounds(), b.bounds()) else {
        return Interval::Bottom;
    };
    let (always, never) = match op {
        CmpOp::Lt => (a_hi < b_lo, a_lo >= b_hi),
        CmpOp::Le => (a_hi <= b_lo, a_lo > b_hi),
        CmpOp::Gt => (a_lo > b_hi, a_hi <= b_lo),
        CmpOp::Ge => (a_lo >= b_hi, a_hi < b_lo),
        CmpOp::Eq => (a_lo == a_hi && b_lo == b_hi && a_lo == b_lo, a.meet(b).is_bottom()),
        CmpOp::Ne => (a.meet(b).is_bottom(), a_lo == a_hi && b_lo == b_hi && a_lo == b_lo),
    };
    if always {
        Interval::bool_value(true)
    } else if never {
        Interval::bool_value(false)
    } else {
        Interval::unknown_bool()
    }
}

pub fn logical_and(a: &Interval, b: &Interval) -> Interval {
    bool_op(a, b, |x, y| x && y)
}

pub fn logical_or(a: &Interval, b: &Interval) -> Interval {
    bool_op(a, b, |x, y| x || y)
}

fn bool_op(a: &Interval, b: &Interval, f: impl Fn(bool, bool) -> bool) -> Interval {
    if a.is_bottom() || b.is_bottom() {
        return Interval::Bottom;
    }
    let t = BigInt::one();
    let z = BigInt::zero();
    let mut hull = Hull::default();
    for x in [false, true] {
        if !a.contains(if x { &t } else { &z }) {
            continue;
        }
        for y in [false, true] {
            if b.contains(if y { &t } else { &z }) {
                let r = BigInt::from(f(x, y) as u8);
                hull.add(r.clone(), r);
            }
        }
    }
    hull.finish()
}

pub fn logical_not(a: &Interval) -> Interval {
    match a.bounds() {
        None => Interval::Bottom,
        Some((lo, hi)) => Interval::new(1 - hi, 1 - lo),
    }
}

/// Arithmetic negation, with overflow at the domain minimum.
pub fn negate(a: &Interval, domain: Domain) -> BinOpOutcome {
    match a.bounds() {
        None => BinOpOutcome::bottom(),
        Some((lo, hi)) => {
            let r = Interval::new(-hi, -lo);
            let clamped = r.clamp(domain);
            BinOpOutcome { overflow: clamped != r, result: clamped, div_by_zero: false }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: i64, hi: i64) -> Interval {
        Interval::new(lo, hi)
    }

    const U256: Domain = Domain::Uint(256);

    #[test]
    fn binop_examples() {
        let r = interval_binop(ArithOp::Add, &iv(1, 3), &iv(2, 5), U256);
        assert_eq!((r.result, r.overflow, r.div_by_zero), (iv(3, 8), false, false));
        let r = interval_binop(ArithOp::Div, &iv(10, 10), &iv(2, 5), U256);
        assert_eq!((r.result, r.overflow, r.div_by_zero), (iv(2, 5), false, false));
        let r = interval_binop(ArithOp::Div, &iv(7, 9), &iv(0, 3), U256);
        assert_eq!((r.result, r.overflow, r.div_by_zero), (iv(2, 9), false, true));
        let big = Interval::singleton(BigInt::one() << 255usize);
        let r = interval_binop(ArithOp::Mul, &big, &iv(2, 2), U256);
        assert_eq!((r.result, r.overflow, r.div_by_zero), (Interval::Bottom, true, false));
        let r = interval_binop(ArithOp::Mod, &iv(5, 5), &iv(3, 3), U256);
        assert_eq!((r.result, r.overflow, r.div_by_zero), (iv(2, 2), false, false));
        let r = interval_binop(ArithOp::Div, &iv(5, 5), &iv(0, 0), U256);
        assert_eq!((r.result, r.div_by_zero), (Interval::Bottom, true));
    }

    #[test]
    fn signed_edge_cases() {
        let d = Domain::Int(8);
        let r = interval_binop(ArithOp::Div, &iv(-128, -128), &iv(-1, -1), d);
        assert_eq!((r.result, r.overflow), (Interval::Bottom, true));
        let r = interval_binop(ArithOp::Div, &iv(-128, -128), &iv(-2, -1), d);
        assert_eq!((r.result, r.overflow), (iv(64, 64), true));
        let r = interval_binop(ArithOp::Mod, &iv(-7, -7), &iv(3, 3), d);
        assert_eq!(r.result, iv(-1, -1));
        assert!(negate(&iv(-128, 0), d).overflow);
    }

    #[test]
    fn compare_examples() {
        let top = U256.top();
        assert_eq!(interval_compare(CmpOp::Lt, &top, &iv(0, 0)), iv(0, 0));
        assert_eq!(interval_compare(CmpOp::Ge, &top, &iv(0, 0)), iv(1, 1));
        assert_eq!(interval_compare(CmpOp::Eq, &iv(3, 5), &iv(4, 6)), iv(0, 1));
    }

    #[test]
    fn logic() {
        assert_eq!(logical_and(&iv(0, 1), &iv(0, 0)), iv(0, 0));
        assert_eq!(logical_or(&iv(0, 1), &iv(1, 1)), iv(1, 1));
        assert_eq!(logical_not(&iv(0, 1)), iv(0, 1));
        assert_eq!(logical_not(&iv(1, 1)), iv(0, 0));
    }
}
