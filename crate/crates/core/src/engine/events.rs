use crate::cfg::{BlockId, Operand};
use crate::domain::{ArithOp, Interval};
use crate::frontend::Span;

/// An interval together with the source text it describes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Named {
    pub name: String,
    pub itv: Interval,
}

impl Named {
    pub fn new(name: impl Into<String>, itv: Interval) -> Named {
        Named { name: name.into(), itv }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConditionSite {
    Require,
    Assert,
    Branch,
}

/// A fact observed at a reachable program point, taken from the state
/// before the instruction's own refinement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventKind {
    DivisorInterval { op: ArithOp, dividend: Named, divisor: Named },
    ConditionVerdict {
        site: ConditionSite,
        condition: String,
        verdict: Interval,
        /// The condition is a literal (`if (true)`).
        constant: bool,
    },
    EnumCastSource {
        source: Named,
        enum_name: String,
        variants: u16,
        /// The cast result is stored into a variable rather than used in place.
        stored: bool,
    },
    IndexAccess {
        index: Named,
        length: Named,
        /// A dominating condition established `index < length`.
        guarded: bool,
    },
    ValueTransferOfQuotient {
        dividend: Named,
        divisor: Named,
        /// Operands of the division, for matching a `%` over the same pair.
        lhs: Operand,
        rhs: Operand,
        /// Location of the division.
        division: (BlockId, usize),
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisEvent {
    pub kind: EventKind,
    pub span: Span,
    /// Block and instruction index; the terminator has index `instrs.len()`.
    pub at: (BlockId, usize),
}
