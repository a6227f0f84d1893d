use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EnumType {
    pub name: String,
    pub variants: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StructType {
    pub name: String,
    pub fields: Vec<(String, Ty)>,
}

impl StructType {
    pub fn field(&self, name: &str) -> Option<&Ty> {
        self.fields.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }
}

/// Resolved MiniSol type. Enum and struct types carry their definitions so a
/// `Ty` is self-describing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ty {
    Uint(u16),
    Int(u16),
    Bool,
    Address,
    Enum(Arc<EnumType>),
    Array { elem: Box<Ty>, len: Option<u64> },
    Mapping { key: Box<Ty>, value: Box<Ty> },
    Struct(Arc<StructType>),
    /// String literals (require/revert messages, call payloads).
    Str,
    /// The unmodeled return data of `.call`.
    Bytes,
    Tuple(Vec<Ty>),
    /// Statements-only calls such as `.transfer(..)`.
    Unit,
}

impl Ty {
    pub const UINT256: Ty = Ty::Uint(256);

    /// Integer-like values that the interval domain tracks directly.
    pub fn is_scalar(&self) -> bool {
        matches!(self, Ty::Uint(_) | Ty::Int(_) | Ty::Bool | Ty::Address | Ty::Enum(_))
    }

    pub fn is_integer(&self) -> bool {
        matches!(self, Ty::Uint(_) | Ty::Int(_))
    }

    /// Whether a value of type `from` may be stored into `self` without an explicit conversion.
    pub fn accepts(&self, from: &Ty) -> bool {
        match (self, from) {
            (Ty::Uint(a), Ty::Uint(b)) | (Ty::Int(a), Ty::Int(b)) => a >= b,
            (Ty::Array { elem: a, len: la }, Ty::Array { elem: b, len: lb }) => la == lb && a == b,
            (a, b) => a == b,
        }
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Uint(n) => write!(f, "uint{n}"),
            Ty::Int(n) => write!(f, "int{n}"),
            Ty::Bool => write!(f, "bool"),
            Ty::Address => write!(f, "address"),
            Ty::Enum(e) => write!(f, "{}", e.name),
            Ty::Array { elem, len: Some(n) } => write!(f, "{elem}[{n}]"),
            Ty::Array { elem, len: None } => write!(f, "{elem}[]"),
            Ty::Mapping { key, value } => write!(f, "mapping({key} => {value})"),
            Ty::Struct(s) => write!(f, "{}", s.name),
            Ty::Str => write!(f, "string"),
            Ty::Bytes => write!(f, "bytes"),
            Ty::Tuple(items) => {
                write!(f, "(")?;
                for (i, t) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, ")")
            }
            Ty::Unit => write!(f, "()"),
        }
    }
}
