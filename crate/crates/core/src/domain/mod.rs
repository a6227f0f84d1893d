//! The interval abstract domain.

mod arith;
mod interval;
mod state;
mod value;

pub use arith::{interval_binop, interval_compare, logical_and, logical_not, logical_or, negate, ArithOp, BinOpOutcome, CmpOp};
pub use interval::{Domain, Interval, Thresholds};
pub use state::{AbstractState, BoundsFact};
pub use value::{AbstractValue, Access, Elements, MAX_EXACT_ELEMENTS};
