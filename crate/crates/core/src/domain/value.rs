use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::interval::{Domain, Interval, Thresholds};
use crate::frontend::Ty;

/// Fixed-size arrays up to this length track each element separately.
pub const MAX_EXACT_ELEMENTS: u64 = 32;

/// Abstract value of a variable, mirroring the shape of its declared type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AbstractValue {
    Scalar { itv: Interval, domain: Domain, assigned: bool },
    Array { length: Interval, elems: Elements, fixed: bool, assigned: bool },
    Mapping { value: Box<AbstractValue>, assigned: bool },
    Struct { fields: Vec<(String, AbstractValue)>, assigned: bool },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Elements {
    /// One value over-approximating every element.
    Summary(Box<AbstractValue>),
    /// One value per element of a small fixed-size array.
    Exact(Vec<AbstractValue>),
}

/// One step of an access path with its index already evaluated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Access {
    Field(String),
    Index(Interval),
    Length,
}

fn length_domain() -> Domain {
    Domain::Uint(256)
}

impl AbstractValue {
    pub fn scalar(itv: Interval, domain: Domain) -> AbstractValue {
        AbstractValue::Scalar { itv, domain, assigned: true }
    }

    /// Solidity zero-initialization, not yet assigned.
    pub fn default_value(ty: &Ty) -> AbstractValue {
        Self::build(ty, false)
    }

    /// Every value of the type, marked assigned.
    pub fn top_value(ty: &Ty) -> AbstractValue {
        Self::build(ty, true)
    }

    fn build(ty: &Ty, top: bool) -> AbstractValue {
        if let Some(domain) = Domain::of(ty) {
            let itv = if top { domain.top() } else { Interval::singleton(0) };
            return AbstractValue::Scalar { itv, domain, assigned: top };
        }
        match ty {
            Ty::Array { elem, len: Some(n) } => {
                let elem = Self::build(elem, top);
                let elems = if *n <= MAX_EXACT_ELEMENTS {
                    Elements::Exact(vec![elem; *n as usize])
                } else {
                    Elements::Summary(Box::new(elem))
                };
                AbstractValue::Array { length: Interval::singleton(*n), elems, fixed: true, assigned: top }
            }
            Ty::Array { elem, len: None } => {
                let length = if top { length_domain().top() } else { Interval::singleton(0) };
                AbstractValue::Array { length, elems: Elements::Summary(Box::new(Self::build(elem, top))), fixed: false, assigned: top }
            }
            Ty::Mapping { value, .. } => AbstractValue::Mapping { value: Box::new(Self::build(value, top)), assigned: top },
            Ty::Struct(s) => AbstractValue::Struct {
                fields: s.fields.iter().map(|(n, t)| (n.clone(), Self::build(t, top))).collect(),
                assigned: top,
            },
            other => panic!("no abstract value for type {other}"),
        }
    }

    /// Same shape with every scalar zeroed and dynamic arrays empty; the value
    /// an unwritten mapping entry reads as.
    pub fn zeroed(&self) -> AbstractValue {
        match self {
            AbstractValue::Scalar { domain, .. } => AbstractValue::Scalar { itv: Interval::singleton(0), domain: *domain, assigned: false },
            AbstractValue::Array { length, elems, fixed, .. } => {
                let elems = match elems {
                    Elements::Exact(v) => Elements::Exact(v.iter().map(|e| e.zeroed()).collect()),
                    Elements::Summary(s) => Elements::Summary(Box::new(s.zeroed())),
                };
                let length = if *fixed { length.clone() } else { Interval::singleton(0) };
                AbstractValue::Array { length, elems, fixed: *fixed, assigned: false }
            }
            AbstractValue::Mapping { value, .. } => AbstractValue::Mapping { value: Box::new(value.zeroed()), assigned: false },
            AbstractValue::Struct { fields, .. } => AbstractValue::Struct {
                fields: fields.iter().map(|(n, v)| (n.clone(), v.zeroed())).collect(),
                assigned: false,
            },
        }
    }

    pub fn is_assigned(&self) -> bool {
        match self {
            AbstractValue::Scalar { assigned, .. }
            | AbstractValue::Array { assigned, .. }
            | AbstractValue::Mapping { assigned, .. }
            | AbstractValue::Struct { assigned, .. } => *assigned,
        }
    }

    fn set_assigned(&mut self, v: bool) {
        match self {
            AbstractValue::Scalar { assigned, .. }
            | AbstractValue::Array { assigned, .. }
            | AbstractValue::Mapping { assigned, .. }
            | AbstractValue::Struct { assigned, .. } => *assigned = v,
        }
    }

    /// The interval of a scalar.
    pub fn interval(&self) -> Option<&Interval> {
        match self {
            AbstractValue::Scalar { itv, .. } => Some(itv),
            _ => None,
        }
    }

    pub fn domain(&self) -> Option<Domain> {
        match self {
            AbstractValue::Scalar { domain, .. } => Some(*domain),
            _ => None,
        }
    }

    /// A scalar whose interval is Bottom: no execution reaches here.
    pub fn is_bottom(&self) -> bool {
        matches!(self, AbstractValue::Scalar { itv: Interval::Bottom, .. })
    }

    fn shape_mismatch(a: &AbstractValue, b: &AbstractValue) -> ! {
        panic!("abstract value shape mismatch: {a:?} vs {b:?}")
    }

    pub fn join(&self, other: &AbstractValue) -> AbstractValue {
        self.combine(other, &|a, b, _| a.join(b), &|a, b| a.join(b), &|x, y| x || y)
    }

    pub fn meet(&self, other: &AbstractValue) -> AbstractValue {
        self.combine(other, &|a, b, _| a.meet(b), &|a, b| a.meet(b), &|x, y| x && y)
    }

    pub fn widen(&self, newer: &AbstractValue, thresholds: &Thresholds) -> AbstractValue {
        self.combine(newer, &|a, b, d| a.widen(b, thresholds, d), &|a, b| a.widen(b, thresholds, length_domain()), &|x, y| x || y)
    }

    /// Pointwise combination; `scalar` also receives the value's domain.
    fn combine(
        &self,
        other: &AbstractValue,
        scalar: &dyn Fn(&Interval, &Interval, Domain) -> Interval,
        length: &dyn Fn(&Interval, &Interval) -> Interval,
        flag: &dyn Fn(bool, bool) -> bool,
    ) -> AbstractValue {
        use AbstractValue::*;
        let assigned = flag(self.is_assigned(), other.is_assigned());
        match (self, other) {
            (Scalar { itv: a, domain, .. }, Scalar { itv: b, .. }) => Scalar { itv: scalar(a, b, *domain), domain: *domain, assigned },
            (Array { length: la, elems: ea, fixed, .. }, Array { length: lb, elems: eb, .. }) => {
                let elems = match (ea, eb) {
                    (Elements::Summary(a), Elements::Summary(b)) => Elements::Summary(Box::new(a.combine(b, scalar, length, flag))),
                    (Elements::Exact(a), Elements::Exact(b)) if a.len() == b.len() => {
                        Elements::Exact(a.iter().zip(b).map(|(x, y)| x.combine(y, scalar, length, flag)).collect())
                    }
                    _ => Self::shape_mismatch(self, other),
                };
                Array { length: length(la, lb), elems, fixed: *fixed, assigned }
            }
            (Mapping { value: a, .. }, Mapping { value: b, .. }) => Mapping { value: Box::new(a.combine(b, scalar, length, flag)), assigned },
            (Struct { fields: a, .. }, Struct { fields: b, .. }) if a.len() == b.len() => Struct {
                fields: a
                    .iter()
                    .zip(b)
                    .map(|((n, x), (m, y))| {
                        debug_assert_eq!(n, m);
                        (n.clone(), x.combine(y, scalar, length, flag))
                    })
                    .collect(),
                assigned,
            },
            _ => Self::shape_mismatch(self, other),
        }
    }

    /// Partial order: every interval is contained and assignment only grows.
    pub fn leq(&self, other: &AbstractValue) -> bool {
        use AbstractValue::*;
        if self.is_assigned() && !other.is_assigned() {
            return false;
        }
        match (self, other) {
            (Scalar { itv: a, .. }, Scalar { itv: b, .. }) => a.leq(b),
            (Array { length: la, elems: ea, .. }, Array { length: lb, elems: eb, .. }) => {
                la.leq(lb)
                    && match (ea, eb) {
                        (Elements::Summary(a), Elements::Summary(b)) => a.leq(b),
                        (Elements::Exact(a), Elements::Exact(b)) if a.len() == b.len() => a.iter().zip(b).all(|(x, y)| x.leq(y)),
                        _ => Self::shape_mismatch(self, other),
                    }
            }
            (Mapping { value: a, .. }, Mapping { value: b, .. }) => a.leq(b),
            (Struct { fields: a, .. }, Struct { fields: b, .. }) if a.len() == b.len() => {
                a.iter().zip(b).all(|((_, x), (_, y))| x.leq(y))
            }
            _ => Self::shape_mismatch(self, other),
        }
    }

    /// Join of every element of an array.
    pub fn element_summary(&self) -> Option<AbstractValue> {
        match self {
            AbstractValue::Array { elems: Elements::Summary(s), .. } => Some((**s).clone()),
            AbstractValue::Array { elems: Elements::Exact(v), .. } => v.iter().cloned().reduce(|a, b| a.join(&b)),
            _ => None,
        }
    }

    /// Indices of exact elements an index interval may hit.
    fn exact_range(index: &Interval, n: usize) -> Option<(usize, usize)> {
        let (lo, hi) = index.bounds()?;
        let lo = lo.max(&BigInt::zero()).to_usize()?;
        let hi = hi.min(&BigInt::from(n as u64 - 1)).to_usize().filter(|_| n > 0)?;
        (lo <= hi).then_some((lo, hi))
    }

    /// Reads through an access path. Out-of-range array reads revert, so the
    /// result only covers in-range elements; an always-out-of-range read
    /// yields a Bottom value.
    pub fn read(&self, path: &[Access]) -> AbstractValue {
        let Some((first, rest)) = path.split_first() else {
            return self.clone();
        };
        match (self, first) {
            (AbstractValue::Struct { fields, .. }, Access::Field(name)) => {
                let (_, v) = fields.iter().find(|(n, _)| n == name).unwrap_or_else(|| panic!("no field {name}"));
                v.read(rest)
            }
            (AbstractValue::Array { length, .. }, Access::Length) => AbstractValue::Scalar {
                itv: length.clone(),
                domain: length_domain(),
                assigned: self.is_assigned(),
            },
            (AbstractValue::Array { elems: Elements::Exact(v), .. }, Access::Index(i)) => match Self::exact_range(i, v.len()) {
                Some((lo, hi)) => v[lo..=hi].iter().map(|e| e.read(rest)).reduce(|a, b| a.join(&b)).unwrap(),
                None => v.first().map(|e| e.read(rest).to_bottom()).unwrap_or_else(Self::bottom_scalar),
            },
            (AbstractValue::Array { elems: Elements::Summary(s), .. }, Access::Index(_)) => s.read(rest),
            (AbstractValue::Mapping { value, .. }, Access::Index(_)) => value.zeroed().join(value).read(rest),
            _ => panic!("access {first:?} does not apply to {self:?}"),
        }
    }

    fn bottom_scalar() -> AbstractValue {
        AbstractValue::Scalar { itv: Interval::Bottom, domain: Domain::Uint(256), assigned: false }
    }

    /// Same shape with every interval Bottom.
    pub fn to_bottom(&self) -> AbstractValue {
        self.combine(self, &|_, _, _| Interval::Bottom, &|_, _| Interval::Bottom, &|x, _| x)
    }

    /// Writes through an access path. A write is strong only when it must
    /// hit exactly one location; otherwise it is joined in.
    pub fn write(&mut self, path: &[Access], value: AbstractValue, strong: bool) {
        let Some((first, rest)) = path.split_first() else {
            let mut value = value;
            value.set_assigned(true);
            *self = if strong { value } else { self.join(&value) };
            return;
        };
        self.set_assigned(true);
        match (self, first) {
            (AbstractValue::Struct { fields, .. }, Access::Field(name)) => {
                let (_, v) = fields.iter_mut().find(|(n, _)| n == name).unwrap_or_else(|| panic!("no field {name}"));
                v.write(rest, value, strong);
            }
            (AbstractValue::Array { elems: Elements::Exact(v), .. }, Access::Index(i)) => {
                if let Some((lo, hi)) = Self::exact_range(i, v.len()) {
                    let single = lo == hi;
                    for e in &mut v[lo..=hi] {
                        e.write(rest, value.clone(), strong && single);
                    }
                }
            }
            (AbstractValue::Array { elems: Elements::Summary(s), .. }, Access::Index(_)) => s.write(rest, value, false),
            (AbstractValue::Mapping { value: m, .. }, Access::Index(_)) => m.write(rest, value, false),
            (this, first) => panic!("write {first:?} does not apply to {this:?}"),
        }
    }

    /// Meets the scalar at `path` with `itv`. Only exact locations are
    /// refined; summaries are left alone.
    pub fn refine(&mut self, path: &[Access], itv: &Interval) -> bool {
        let Some((first, rest)) = path.split_first() else {
            return match self {
                AbstractValue::Scalar { itv: cur, .. } => {
                    *cur = cur.meet(itv);
                    true
                }
                _ => false,
            };
        };
        match (self, first) {
            (AbstractValue::Struct { fields, .. }, Access::Field(name)) => {
                fields.iter_mut().find(|(n, _)| n == name).map(|(_, v)| v.refine(rest, itv)).unwrap_or(false)
            }
            (AbstractValue::Array { length, .. }, Access::Length) if rest.is_empty() => {
                *length = length.meet(itv);
                true
            }
            (AbstractValue::Array { elems: Elements::Exact(v), .. }, Access::Index(i)) => match i.as_singleton().and_then(|k| k.to_usize()) {
                Some(k) if k < v.len() => v[k].refine(rest, itv),
                _ => false,
            },
            _ => false,
        }
    }

    /// Flattens into `(suffix, interval)` pairs for display: `""` for a
    /// scalar, `.length`, `[*]`, `[2]`, `.field` and combinations.
    pub fn flatten(&self) -> Vec<(String, Interval)> {
        let mut out = Vec::new();
        self.flatten_into(String::new(), &mut out);
        out
    }

    fn flatten_into(&self, prefix: String, out: &mut Vec<(String, Interval)>) {
        match self {
            AbstractValue::Scalar { itv, .. } => out.push((prefix, itv.clone())),
            AbstractValue::Array { length, elems, .. } => {
                out.push((format!("{prefix}.length"), length.clone()));
                match elems {
                    Elements::Summary(s) => s.flatten_into(format!("{prefix}[*]"), out),
                    Elements::Exact(v) => {
                        for (i, e) in v.iter().enumerate() {
                            e.flatten_into(format!("{prefix}[{i}]"), out);
                        }
                    }
                }
            }
            AbstractValue::Mapping { value, .. } => value.flatten_into(format!("{prefix}[*]"), out),
            AbstractValue::Struct { fields, .. } => {
                for (n, v) in fields {
                    v.flatten_into(format!("{prefix}.{n}"), out);
                }
            }
        }
    }

    /// Whether any interval inside is Bottom.
    pub fn contains_bottom(&self) -> bool {
        self.flatten().iter().any(|(_, i)| i.is_bottom())
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::frontend::{EnumType, StructType};

    fn options() -> Ty {
        Ty::Enum(Arc::new(EnumType { name: "Options".into(), variants: vec!["A".into(), "B".into(), "C".into()] }))
    }

    #[test]
    fn defaults_and_tops() {
        let d = AbstractValue::default_value(&Ty::Address);
        assert_eq!(d.interval(), Some(&Interval::singleton(0)));
        assert!(!d.is_assigned());
        assert_eq!(AbstractValue::top_value(&options()).interval(), Some(&Interval::new(0, 2)));
        assert_eq!(AbstractValue::default_value(&Ty::UINT256).interval(), Some(&Interval::singleton(0)));
    }

    #[test]
    fn mapping_read_joins_default() {
        let ty = Ty::Mapping { key: Box::new(Ty::Address), value: Box::new(options()) };
        let mut m = AbstractValue::default_value(&ty);
        let key = Access::Index(Domain::Address.top());
        m.write(std::slice::from_ref(&key), AbstractValue::scalar(Interval::new(1, 2), Domain::Enum(3)), true);
        assert_eq!(m.read(&[key]).interval(), Some(&Interval::new(0, 2)));
        assert!(m.is_assigned());
    }

    #[test]
    fn fixed_array_strong_and_weak_writes() {
        let ty = Ty::Array { elem: Box::new(Ty::Uint(8)), len: Some(3) };
        let mut a = AbstractValue::default_value(&ty);
        a.write(&[Access::Index(Interval::singleton(1))], AbstractValue::scalar(Interval::singleton(7), Domain::Uint(8)), true);
        assert_eq!(a.read(&[Access::Index(Interval::singleton(1))]).interval(), Some(&Interval::singleton(7)));
        assert_eq!(a.read(&[Access::Index(Interval::singleton(0))]).interval(), Some(&Interval::singleton(0)));
        a.write(&[Access::Index(Interval::new(0, 1))], AbstractValue::scalar(Interval::singleton(9), Domain::Uint(8)), true);
        assert_eq!(a.read(&[Access::Index(Interval::singleton(1))]).interval(), Some(&Interval::new(7, 9)));
        assert_eq!(a.read(&[Access::Length]).interval(), Some(&Interval::singleton(3)));
    }

    #[test]
    fn struct_fields() {
        let ty = Ty::Struct(Arc::new(StructType { name: "S".into(), fields: vec![("a".into(), Ty::Bool), ("b".into(), Ty::Uint(8))] }));
        let mut s = AbstractValue::default_value(&ty);
        s.write(&[Access::Field("b".into())], AbstractValue::scalar(Interval::singleton(4), Domain::Uint(8)), true);
        let flat = s.flatten();
        assert_eq!(flat, vec![(".a".into(), Interval::singleton(0)), (".b".into(), Interval::singleton(4))]);
        let top = AbstractValue::top_value(&ty);
        assert!(s.leq(&top));
        assert!(!top.leq(&s));
        assert_eq!(s.join(&top), top);
    }
}
