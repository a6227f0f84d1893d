use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;

use crate::frontend::ast::{BinaryOp, UnaryOp};
use crate::frontend::{Span, Ty};

pub type BlockId = usize;

/// Identity of a variable in the abstract state.
///
/// The derived order (locals, state, builtins, temps) is the display order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarId {
    Local(u32),
    State(u32),
    MsgSender,
    MsgValue,
    Temp(u32),
}

impl VarId {
    pub fn is_temp(self) -> bool {
        matches!(self, VarId::Temp(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PathElem {
    Field(String),
    /// Always a constant or an unpathed variable.
    Index(Operand),
    Length,
}

/// A variable plus an access path into it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Place {
    pub base: VarId,
    pub path: Vec<PathElem>,
}

impl Place {
    pub fn var(base: VarId) -> Place {
        Place { base, path: Vec::new() }
    }

    pub fn with(&self, elem: PathElem) -> Place {
        let mut p = self.clone();
        p.path.push(elem);
        p
    }

    /// Variables read while evaluating the path, including the base.
    pub fn vars(&self) -> Vec<VarId> {
        let mut out = vec![self.base];
        for e in &self.path {
            if let PathElem::Index(Operand::Place(p)) = e {
                out.extend(p.vars());
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Operand {
    Place(Place),
    Const(BigInt),
}

impl Operand {
    pub fn place(&self) -> Option<&Place> {
        match self {
            Operand::Place(p) => Some(p),
            Operand::Const(_) => None,
        }
    }

    pub fn var(id: VarId) -> Operand {
        Operand::Place(Place::var(id))
    }

    pub fn constant(v: impl Into<BigInt>) -> Operand {
        Operand::Const(v.into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstrKind {
    Assign { dest: Place, src: Operand },
    BinOp { dest: Place, op: BinaryOp, lhs: Operand, rhs: Operand },
    UnOp { dest: Place, op: UnaryOp, src: Operand },
    EnumCast { dest: Place, enum_name: String, variants: u16, src: Operand },
    Require { cond: Operand },
    Assert { cond: Operand },
    Revert,
    /// `.transfer` when `success` is `None`, `.call{value: ..}` otherwise.
    ExternalTransfer { recipient: Operand, amount: Operand, success: Option<Place> },
    Return { values: Vec<Operand> },
    /// Zero-initialization of a declared local.
    InitDefault { dest: Place },
    ArrayLit { dest: Place, elems: Vec<Operand> },
}

impl InstrKind {
    pub fn dest(&self) -> Option<&Place> {
        match self {
            InstrKind::Assign { dest, .. }
            | InstrKind::BinOp { dest, .. }
            | InstrKind::UnOp { dest, .. }
            | InstrKind::EnumCast { dest, .. }
            | InstrKind::InitDefault { dest }
            | InstrKind::ArrayLit { dest, .. } => Some(dest),
            InstrKind::ExternalTransfer { success, .. } => success.as_ref(),
            _ => None,
        }
    }

    pub fn operands(&self) -> Vec<&Operand> {
        match self {
            InstrKind::Assign { src, .. } | InstrKind::UnOp { src, .. } | InstrKind::EnumCast { src, .. } => vec![src],
            InstrKind::BinOp { lhs, rhs, .. } => vec![lhs, rhs],
            InstrKind::Require { cond } | InstrKind::Assert { cond } => vec![cond],
            InstrKind::ExternalTransfer { recipient, amount, .. } => vec![recipient, amount],
            InstrKind::Return { values } => values.iter().collect(),
            InstrKind::ArrayLit { elems, .. } => elems.iter().collect(),
            InstrKind::Revert | InstrKind::InitDefault { .. } => vec![],
        }
    }

    /// Every place read, including index operands inside the destination path.
    pub fn reads(&self) -> Vec<&Place> {
        let mut out: Vec<&Place> = Vec::new();
        fn push<'a>(out: &mut Vec<&'a Place>, p: &'a Place) {
            out.push(p);
            for e in &p.path {
                if let PathElem::Index(Operand::Place(q)) = e {
                    push(out, q);
                }
            }
        }
        for op in self.operands() {
            if let Operand::Place(p) = op {
                push(&mut out, p);
            }
        }
        if let Some(d) = self.dest() {
            for e in &d.path {
                if let PathElem::Index(Operand::Place(q)) = e {
                    push(&mut out, q);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instr {
    pub kind: InstrKind,
    /// Span of the statement this instruction was lowered from.
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Terminator {
    Jump(BlockId),
    Branch { cond: Operand, then_block: BlockId, else_block: BlockId, span: Span },
    Exit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKind {
    Unconditional,
    True,
    False,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub instrs: Vec<Instr>,
    pub term: Terminator,
}

impl Block {
    pub fn successors(&self) -> Vec<(BlockId, EdgeKind)> {
        match &self.term {
            Terminator::Jump(b) => vec![(*b, EdgeKind::Unconditional)],
            Terminator::Branch { then_block, else_block, .. } => {
                vec![(*then_block, EdgeKind::True), (*else_block, EdgeKind::False)]
            }
            Terminator::Exit => vec![],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalInfo {
    pub name: String,
    pub ty: Ty,
    pub span: Span,
    pub is_param: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TempInfo {
    pub ty: Ty,
    /// Source text of the expression the temp holds.
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateVarInfo {
    pub name: String,
    pub ty: Ty,
    pub span: Span,
    pub has_initializer: bool,
}

/// Control-flow graph of one function, with modifiers inlined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cfg {
    pub function: String,
    pub span: Span,
    pub blocks: Vec<Block>,
    pub locals: Vec<LocalInfo>,
    pub temps: Vec<TempInfo>,
    pub state_vars: Vec<StateVarInfo>,
    pub params: Vec<VarId>,
    pub payable: bool,
    /// Targets of back edges.
    pub loop_headers: BTreeSet<BlockId>,
    /// Integer literals appearing in the function, for widening thresholds.
    pub literals: BTreeSet<BigInt>,
    /// Defining instruction of each temp, as (block, index).
    pub temp_defs: BTreeMap<u32, (BlockId, usize)>,
}

impl Cfg {
    pub const ENTRY: BlockId = 0;

    pub fn edges(&self) -> Vec<(BlockId, BlockId, EdgeKind)> {
        self.blocks
            .iter()
            .enumerate()
            .flat_map(|(i, b)| b.successors().into_iter().map(move |(t, k)| (i, t, k)))
            .collect()
    }

    pub fn predecessors(&self) -> Vec<Vec<(BlockId, EdgeKind)>> {
        let mut preds = vec![Vec::new(); self.blocks.len()];
        for (from, to, kind) in self.edges() {
            preds[to].push((from, kind));
        }
        preds
    }

    pub fn var_type(&self, v: VarId) -> &Ty {
        match v {
            VarId::Local(i) => &self.locals[i as usize].ty,
            VarId::State(i) => &self.state_vars[i as usize].ty,
            VarId::MsgSender => &Ty::Address,
            VarId::MsgValue => &Ty::UINT256,
            VarId::Temp(i) => &self.temps[i as usize].ty,
        }
    }

    pub fn var_name(&self, v: VarId) -> String {
        match v {
            VarId::Local(i) => self.locals[i as usize].name.clone(),
            VarId::State(i) => self.state_vars[i as usize].name.clone(),
            VarId::MsgSender => "msg.sender".into(),
            VarId::MsgValue => "msg.value".into(),
            VarId::Temp(i) => format!("t{i}"),
        }
    }

    /// Declared type of the location a place denotes.
    pub fn place_type(&self, p: &Place) -> Ty {
        let mut ty = self.var_type(p.base).clone();
        for e in &p.path {
            ty = match (ty, e) {
                (Ty::Array { elem, .. }, PathElem::Index(_)) => *elem,
                (Ty::Mapping { value, .. }, PathElem::Index(_)) => *value,
                (Ty::Array { .. }, PathElem::Length) => Ty::UINT256,
                (Ty::Struct(s), PathElem::Field(f)) => s.field(f).expect("field was resolved").clone(),
                (t, e) => panic!("path element {e:?} does not apply to {t}"),
            };
        }
        ty
    }

    /// Instructions whose destination is exactly `var`.
    pub fn definitions(&self, var: VarId) -> Vec<(BlockId, usize)> {
        let mut out = Vec::new();
        for (bi, b) in self.blocks.iter().enumerate() {
            for (ii, instr) in b.instrs.iter().enumerate() {
                if instr.kind.dest().is_some_and(|d| d.base == var) {
                    out.push((bi, ii));
                }
            }
        }
        out
    }

    /// The instruction defining a temp.
    pub fn temp_def(&self, temp: u32) -> Option<&Instr> {
        self.temp_defs.get(&temp).map(|&(b, i)| &self.blocks[b].instrs[i])
    }

    pub fn instr_count(&self) -> usize {
        self.blocks.iter().map(|b| b.instrs.len()).sum()
    }

    pub fn place_name(&self, p: &Place) -> String {
        let mut s = self.var_name(p.base);
        for e in &p.path {
            match e {
                PathElem::Field(f) => {
                    s.push('.');
                    s.push_str(f);
                }
                PathElem::Length => s.push_str(".length"),
                PathElem::Index(op) => {
                    s.push('[');
                    s.push_str(&self.operand_name(op));
                    s.push(']');
                }
            }
        }
        s
    }

    pub fn operand_name(&self, op: &Operand) -> String {
        match op {
            Operand::Const(c) => c.to_string(),
            Operand::Place(p) => self.place_name(p),
        }
    }

    /// Like [`Cfg::place_name`] but temps are shown as the expression they
    /// hold, so `_votes[msg.sender]` rather than `_votes[t0]`.
    pub fn source_name(&self, p: &Place) -> String {
        let mut s = match p.base {
            VarId::Temp(i) => self.temps[i as usize].label.clone(),
            v => self.var_name(v),
        };
        for e in &p.path {
            match e {
                PathElem::Field(f) => {
                    s.push('.');
                    s.push_str(f);
                }
                PathElem::Length => s.push_str(".length"),
                PathElem::Index(Operand::Const(c)) => s.push_str(&format!("[{c}]")),
                PathElem::Index(Operand::Place(q)) => s.push_str(&format!("[{}]", self.source_name(q))),
            }
        }
        s
    }
}

pub struct InstrDisplay<'a> {
    pub cfg: &'a Cfg,
    pub instr: &'a InstrKind,
}

impl fmt::Display for InstrDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.cfg;
        let p = |p: &Place| c.place_name(p);
        let o = |o: &Operand| c.operand_name(o);
        match self.instr {
            InstrKind::Assign { dest, src } => write!(f, "{} = {}", p(dest), o(src)),
            InstrKind::BinOp { dest, op, lhs, rhs } => write!(f, "{} = {} {} {}", p(dest), o(lhs), op.as_str(), o(rhs)),
            InstrKind::UnOp { dest, op, src } => {
                let sym = match op {
                    UnaryOp::Not => "!",
                    UnaryOp::Neg => "-",
                };
                write!(f, "{} = {sym}{}", p(dest), o(src))
            }
            InstrKind::EnumCast { dest, enum_name, src, .. } => write!(f, "{} = {enum_name}({})", p(dest), o(src)),
            InstrKind::Require { cond } => write!(f, "require({})", o(cond)),
            InstrKind::Assert { cond } => write!(f, "assert({})", o(cond)),
            InstrKind::Revert => write!(f, "revert()"),
            InstrKind::ExternalTransfer { recipient, amount, success: None } => {
                write!(f, "transfer({}, {})", o(recipient), o(amount))
            }
            InstrKind::ExternalTransfer { recipient, amount, success: Some(s) } => {
                write!(f, "{} = call({}, {})", p(s), o(recipient), o(amount))
            }
            InstrKind::Return { values } => {
                let vs: Vec<_> = values.iter().map(o).collect();
                if vs.is_empty() {
                    write!(f, "return")
                } else {
                    write!(f, "return {}", vs.join(", "))
                }
            }
            InstrKind::InitDefault { dest } => write!(f, "{} = default", p(dest)),
            InstrKind::ArrayLit { dest, elems } => {
                let vs: Vec<_> = elems.iter().map(o).collect();
                write!(f, "{} = [{}]", p(dest), vs.join(", "))
            }
        }
    }
}
