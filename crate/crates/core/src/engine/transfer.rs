use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::events::{AnalysisEvent, ConditionSite, EventKind, Named};
use super::worklist::{Flow, Lattice};
use crate::cfg::{BlockId, Cfg, EdgeKind, Instr, InstrKind, Operand, PathElem, Place, Terminator, VarId};
use crate::domain::{
    interval_binop, interval_compare, logical_and, logical_not, logical_or, negate, AbstractState, AbstractValue, Access, ArithOp,
    BoundsFact, CmpOp, Domain, Elements, Interval, Thresholds, MAX_EXACT_ELEMENTS,
};
use crate::frontend::ast::{BinaryOp, UnaryOp};
use crate::frontend::Ty;

impl Lattice for AbstractState {
    fn bottom() -> Self {
        AbstractState::bottom()
    }

    fn join(&self, other: &Self) -> Self {
        AbstractState::join(self, other)
    }

    fn leq(&self, other: &Self) -> bool {
        AbstractState::leq(self, other)
    }
}

/// What the final pass over a fixpoint collects.
#[derive(Default)]
pub(crate) struct Trace {
    pub events: Vec<AnalysisEvent>,
    pub instr_in: Vec<AbstractState>,
    /// Operand intervals at each reachable division.
    pub divisions: BTreeMap<(BlockId, usize), (Named, Named, Operand, Operand)>,
}

/// Interval transfer functions over one CFG.
pub struct IntervalFlow<'a> {
    pub cfg: &'a Cfg,
    pub thresholds: Thresholds,
}

type At = (BlockId, usize);

impl Flow for IntervalFlow<'_> {
    type State = AbstractState;

    fn block(&self, block: BlockId, input: &AbstractState) -> AbstractState {
        self.run_block(block, input, None)
    }

    fn edge(&self, from: BlockId, kind: EdgeKind, out: &AbstractState) -> AbstractState {
        let mut state = out.clone();
        if let Terminator::Branch { cond, .. } = &self.cfg.blocks[from].term {
            let at = (from, self.cfg.blocks[from].instrs.len());
            match kind {
                EdgeKind::True => self.assume(&mut state, cond, true, at),
                EdgeKind::False => self.assume(&mut state, cond, false, at),
                EdgeKind::Unconditional => {}
            }
        }
        state
    }

    fn widen(&self, old: &AbstractState, new: &AbstractState) -> AbstractState {
        old.widen(new, &self.thresholds)
    }
}

fn domain_of(ty: &Ty) -> Domain {
    Domain::of(ty).unwrap_or(Domain::Uint(256))
}

impl<'a> IntervalFlow<'a> {
    pub fn new(cfg: &'a Cfg) -> Self {
        IntervalFlow { cfg, thresholds: Thresholds::with_literals(cfg.literals.iter().cloned()) }
    }

    pub(crate) fn run_block(&self, b: BlockId, input: &AbstractState, mut trace: Option<&mut Trace>) -> AbstractState {
        let mut state = input.clone();
        for (i, instr) in self.cfg.blocks[b].instrs.iter().enumerate() {
            if let Some(t) = trace.as_deref_mut() {
                t.instr_in.push(state.clone());
            }
            if !state.is_bottom() {
                self.transfer(&mut state, instr, (b, i), trace.as_deref_mut());
            }
        }
        if let (Some(t), Terminator::Branch { cond, span, .. }) = (trace, &self.cfg.blocks[b].term) {
            if !state.is_bottom() {
                let verdict = self.interval_of(&state, cond);
                t.events.push(AnalysisEvent {
                    kind: EventKind::ConditionVerdict {
                        site: ConditionSite::Branch,
                        condition: self.operand_text(cond),
                        verdict,
                        constant: matches!(cond, Operand::Const(_)),
                    },
                    span: *span,
                    at: (b, self.cfg.blocks[b].instrs.len()),
                });
            }
        }
        state
    }

    fn operand_text(&self, op: &Operand) -> String {
        match op {
            Operand::Const(c) => c.to_string(),
            Operand::Place(p) => self.cfg.source_name(p),
        }
    }

    fn named(&self, state: &AbstractState, op: &Operand) -> Named {
        Named::new(self.operand_text(op), self.interval_of(state, op))
    }

    /// The value bound to a variable, or Top for one not yet in the state.
    fn base_value(&self, state: &AbstractState, v: VarId) -> AbstractValue {
        state.get(v).cloned().unwrap_or_else(|| AbstractValue::top_value(self.cfg.var_type(v)))
    }

    fn accesses(&self, state: &AbstractState, path: &[PathElem]) -> Vec<Access> {
        path.iter()
            .map(|e| match e {
                PathElem::Field(f) => Access::Field(f.clone()),
                PathElem::Length => Access::Length,
                PathElem::Index(op) => Access::Index(self.interval_of(state, op)),
            })
            .collect()
    }

    pub(crate) fn read_place(&self, state: &AbstractState, p: &Place) -> AbstractValue {
        let base = self.base_value(state, p.base);
        base.read(&self.accesses(state, &p.path))
    }

    pub(crate) fn interval_of(&self, state: &AbstractState, op: &Operand) -> Interval {
        match op {
            Operand::Const(c) => Interval::singleton(c.clone()),
            Operand::Place(p) => self.read_place(state, p).interval().cloned().unwrap_or(Interval::Bottom),
        }
    }

    fn write(&self, state: &mut AbstractState, dest: &Place, value: AbstractValue) {
        if value.contains_bottom() {
            state.set_bottom();
            return;
        }
        let value = match value {
            AbstractValue::Scalar { itv, assigned, .. } => {
                let domain = domain_of(&self.cfg.place_type(dest));
                let itv = itv.clamp(domain);
                if itv.is_bottom() {
                    state.set_bottom();
                    return;
                }
                AbstractValue::Scalar { itv, domain, assigned }
            }
            other => other,
        };
        let access = self.accesses(state, &dest.path);
        let mut base = state.get(dest.base).cloned().unwrap_or_else(|| AbstractValue::default_value(self.cfg.var_type(dest.base)));
        base.write(&access, value, true);
        state.set(dest.base, base);
    }

    fn write_interval(&self, state: &mut AbstractState, dest: &Place, itv: Interval) {
        if itv.is_bottom() {
            state.set_bottom();
            return;
        }
        let domain = domain_of(&self.cfg.place_type(dest));
        self.write(state, dest, AbstractValue::scalar(itv, domain));
    }

    fn emit(&self, trace: &mut Option<&mut Trace>, kind: EventKind, instr: &Instr, at: At) {
        if let Some(t) = trace.as_deref_mut() {
            t.events.push(AnalysisEvent { kind, span: instr.span, at });
        }
    }

    fn transfer(&self, state: &mut AbstractState, instr: &Instr, at: At, mut trace: Option<&mut Trace>) {
        self.check_indexes(state, instr, at, &mut trace);
        if state.is_bottom() {
            return;
        }
        match &instr.kind {
            InstrKind::Assign { dest, src } => {
                let value = match src {
                    Operand::Const(c) => AbstractValue::scalar(Interval::singleton(c.clone()), Domain::Uint(256)),
                    Operand::Place(p) => self.read_place(state, p),
                };
                self.write(state, dest, value);
            }
            InstrKind::BinOp { dest, op, lhs, rhs } => {
                let a = self.interval_of(state, lhs);
                let b = self.interval_of(state, rhs);
                if let Some(arith) = ArithOp::from_binary(*op) {
                    let domain = domain_of(&self.cfg.place_type(dest));
                    let outcome = interval_binop(arith, &a, &b, domain);
                    if matches!(arith, ArithOp::Div | ArithOp::Mod) {
                        let dividend = self.named(state, lhs);
                        let divisor = self.named(state, rhs);
                        if let Some(t) = trace.as_deref_mut() {
                            if arith == ArithOp::Div {
                                t.divisions.insert(at, (dividend.clone(), divisor.clone(), lhs.clone(), rhs.clone()));
                            }
                        }
                        self.emit(&mut trace, EventKind::DivisorInterval { op: arith, dividend, divisor }, instr, at);
                    }
                    self.write_interval(state, dest, outcome.result);
                    if matches!(arith, ArithOp::Div | ArithOp::Mod) && !state.is_bottom() {
                        if let Operand::Place(p) = rhs {
                            if !p.vars().contains(&dest.base) {
                                // execution only continues with a nonzero divisor
                                self.exclude_zero(state, p, &b, at);
                            }
                        }
                    }
                } else if let Some(cmp) = CmpOp::from_binary(*op) {
                    self.write_interval(state, dest, interval_compare(cmp, &a, &b));
                } else {
                    let r = match op {
                        BinaryOp::And => logical_and(&a, &b),
                        BinaryOp::Or => logical_or(&a, &b),
                        _ => unreachable!("all binary operators are covered"),
                    };
                    self.write_interval(state, dest, r);
                }
            }
            InstrKind::UnOp { dest, op, src } => {
                let a = self.interval_of(state, src);
                let r = match op {
                    UnaryOp::Not => logical_not(&a),
                    UnaryOp::Neg => negate(&a, domain_of(&self.cfg.place_type(dest))).result,
                };
                self.write_interval(state, dest, r);
            }
            InstrKind::EnumCast { dest, enum_name, variants, src } => {
                let source = self.named(state, src);
                let stored = !dest.base.is_temp();
                let range = Interval::new(0, i64::from(*variants) - 1);
                let result = source.itv.meet(&range);
                self.emit(
                    &mut trace,
                    EventKind::EnumCastSource { source, enum_name: enum_name.clone(), variants: *variants, stored },
                    instr,
                    at,
                );
                self.write_interval(state, dest, result);
            }
            InstrKind::Require { cond } | InstrKind::Assert { cond } => {
                let site = if matches!(instr.kind, InstrKind::Require { .. }) { ConditionSite::Require } else { ConditionSite::Assert };
                let verdict = self.interval_of(state, cond);
                self.emit(
                    &mut trace,
                    EventKind::ConditionVerdict { site, condition: self.operand_text(cond), verdict, constant: matches!(cond, Operand::Const(_)) },
                    instr,
                    at,
                );
                self.assume(state, cond, true, at);
            }
            InstrKind::Revert => state.set_bottom(),
            InstrKind::ExternalTransfer { amount, success, .. } => {
                if let Some(t) = trace {
                    if let Some(div) = self.quotient_source(amount, 0).and_then(|d| t.divisions.get(&d).cloned().map(|v| (d, v))) {
                        let (division, (dividend, divisor, lhs, rhs)) = div;
                        t.events.push(AnalysisEvent {
                            kind: EventKind::ValueTransferOfQuotient { dividend, divisor, lhs, rhs, division },
                            span: instr.span,
                            at,
                        });
                    }
                }
                if let Some(s) = success {
                    self.write_interval(state, s, Interval::unknown_bool());
                }
            }
            InstrKind::Return { .. } => {}
            InstrKind::InitDefault { dest } => {
                let ty = self.cfg.place_type(dest);
                if dest.path.is_empty() {
                    state.set(dest.base, AbstractValue::default_value(&ty));
                } else {
                    self.write(state, dest, AbstractValue::default_value(&ty));
                }
            }
            InstrKind::ArrayLit { dest, elems } => {
                let Ty::Array { elem, len } = self.cfg.place_type(dest) else {
                    panic!("array literal assigned to a non-array");
                };
                let domain = domain_of(&elem);
                let values: Vec<AbstractValue> =
                    elems.iter().map(|e| AbstractValue::scalar(self.interval_of(state, e).clamp(domain), domain)).collect();
                if values.iter().any(|v| v.is_bottom()) {
                    state.set_bottom();
                    return;
                }
                let n = elems.len() as u64;
                let fixed = len.is_some();
                let elems = if fixed && n <= MAX_EXACT_ELEMENTS {
                    Elements::Exact(values)
                } else {
                    let summary = values.into_iter().reduce(|a, b| a.join(&b)).unwrap_or_else(|| AbstractValue::default_value(&elem));
                    Elements::Summary(Box::new(summary))
                };
                let value = AbstractValue::Array { length: Interval::singleton(n), elems, fixed, assigned: true };
                self.write(state, dest, value);
            }
        }
    }

    /// Emits an access event for every array index in the instruction, then
    /// keeps only executions where the index is in bounds.
    fn check_indexes(&self, state: &mut AbstractState, instr: &Instr, at: At, trace: &mut Option<&mut Trace>) {
        let mut places: Vec<&Place> = instr.kind.reads();
        if let Some(d) = instr.kind.dest() {
            places.push(d);
        }
        for place in places {
            for (k, elem) in place.path.iter().enumerate() {
                let PathElem::Index(index) = elem else { continue };
                let prefix = Place { base: place.base, path: place.path[..k].to_vec() };
                if !matches!(self.cfg.place_type(&prefix), Ty::Array { .. }) {
                    continue;
                }
                if state.is_bottom() {
                    return;
                }
                let length_place = prefix.with(PathElem::Length);
                let length = self.read_place(state, &length_place).interval().cloned().unwrap_or(Interval::Bottom);
                let idx = self.interval_of(state, index);
                let guarded = match index {
                    Operand::Place(Place { base, path }) if path.is_empty() => {
                        state.facts().contains(&BoundsFact { index: *base, array: prefix.clone() })
                    }
                    _ => false,
                };
                self.emit(
                    trace,
                    EventKind::IndexAccess {
                        index: Named::new(self.operand_text(index), idx.clone()),
                        length: Named::new(self.cfg.source_name(&length_place), length.clone()),
                        guarded,
                    },
                    instr,
                    at,
                );
                let in_bounds = match length.hi() {
                    Some(hi) if hi > &BigInt::zero() => Interval::new(BigInt::zero(), hi - 1),
                    _ => Interval::Bottom,
                };
                match index {
                    Operand::Const(c) => {
                        if !in_bounds.contains(c) {
                            state.set_bottom();
                        }
                    }
                    Operand::Place(p) => self.refine_place(state, p, &in_bounds, at),
                }
            }
        }
    }

    /// Narrows a divisor known to be nonzero when zero sits at one end.
    fn exclude_zero(&self, state: &mut AbstractState, p: &Place, divisor: &Interval, at: At) {
        let Some((lo, hi)) = divisor.bounds() else { return };
        let narrowed = if lo.is_zero() {
            Interval::new(BigInt::one(), hi.clone())
        } else if hi.is_zero() {
            Interval::new(lo.clone(), -BigInt::one())
        } else {
            return;
        };
        self.refine_place(state, p, &narrowed, at);
    }

    /// The division whose quotient an amount carries, through copies and
    /// single-definition locals.
    fn quotient_source(&self, op: &Operand, depth: usize) -> Option<At> {
        let Operand::Place(p) = op else { return None };
        if !p.path.is_empty() || depth > 8 {
            return None;
        }
        let def = match p.base {
            VarId::Temp(t) => *self.cfg.temp_defs.get(&t)?,
            VarId::Local(_) => match self.cfg.definitions(p.base).as_slice() {
                [only] => *only,
                _ => return None,
            },
            _ => return None,
        };
        match &self.cfg.blocks[def.0].instrs[def.1].kind {
            InstrKind::BinOp { op: BinaryOp::Div, .. } => Some(def),
            InstrKind::Assign { src, .. } => self.quotient_source(src, depth + 1),
            _ => None,
        }
    }

    /// The defining instruction of a temp, if it is in the same block before
    /// `at` and nothing it reads was overwritten in between.
    fn live_def(&self, p: &Place, at: At) -> Option<&InstrKind> {
        let VarId::Temp(t) = p.base else { return None };
        if !p.path.is_empty() {
            return None;
        }
        let &(db, di) = self.cfg.temp_defs.get(&t)?;
        if db != at.0 || di >= at.1 {
            return None;
        }
        let instrs = &self.cfg.blocks[db].instrs;
        let def = &instrs[di].kind;
        let read: Vec<VarId> = def.reads().iter().flat_map(|r| r.vars()).collect();
        let clobbered = instrs[di + 1..at.1].iter().any(|i| i.kind.dest().is_some_and(|d| read.contains(&d.base)));
        (!clobbered).then_some(def)
    }

    /// Meets the location a place denotes with `itv`, then any place it was
    /// copied from. An empty result makes the state Bottom.
    fn refine_place(&self, state: &mut AbstractState, p: &Place, itv: &Interval, at: At) {
        if state.is_bottom() {
            return;
        }
        let access = self.accesses(state, &p.path);
        let Some(base) = state.get_mut(p.base) else { return };
        if base.refine(&access, itv) {
            let now = base.read(&access);
            if now.interval().is_some_and(|i| i.is_bottom()) {
                state.set_bottom();
                return;
            }
        }
        if let Some(InstrKind::Assign { src: Operand::Place(src), .. }) = self.live_def(p, at) {
            self.refine_place(state, src, itv, at);
        }
    }

    fn refine_operand(&self, state: &mut AbstractState, op: &Operand, itv: &Interval, at: At) {
        match op {
            Operand::Const(c) => {
                if !itv.contains(c) {
                    state.set_bottom();
                }
            }
            Operand::Place(p) => self.refine_place(state, p, itv, at),
        }
    }

    /// Restricts the state to executions where `cond` evaluates to `truth`.
    pub(crate) fn assume(&self, state: &mut AbstractState, cond: &Operand, truth: bool, at: At) {
        if state.is_bottom() {
            return;
        }
        let p = match cond {
            Operand::Const(c) => {
                if c.is_zero() == truth {
                    state.set_bottom();
                }
                return;
            }
            Operand::Place(p) => p,
        };
        self.refine_place(state, p, &Interval::bool_value(truth), at);
        let Some(def) = self.live_def(p, at) else { return };
        match def {
            InstrKind::BinOp { op, lhs, rhs, .. } => {
                if let Some(cmp) = CmpOp::from_binary(*op) {
                    let cmp = if truth { cmp } else { cmp.negate() };
                    self.assume_compare(state, cmp, lhs, rhs, at);
                } else if (*op == BinaryOp::And && truth) || (*op == BinaryOp::Or && !truth) {
                    self.assume(state, lhs, truth, at);
                    self.assume(state, rhs, truth, at);
                }
            }
            InstrKind::UnOp { op: UnaryOp::Not, src, .. } => self.assume(state, src, !truth, at),
            InstrKind::Assign { src, .. } => self.assume(state, src, truth, at),
            _ => {}
        }
    }

    fn assume_compare(&self, state: &mut AbstractState, cmp: CmpOp, lhs: &Operand, rhs: &Operand, at: At) {
        let (cmp, lhs, rhs) = match cmp {
            CmpOp::Gt | CmpOp::Ge => (cmp.flip(), rhs, lhs),
            _ => (cmp, lhs, rhs),
        };
        let a = self.interval_of(state, lhs);
        let b = self.interval_of(state, rhs);
        let (Some(a_lo), Some(b_hi)) = (a.lo(), b.hi()) else {
            state.set_bottom();
            return;
        };
        let (a2, b2) = match cmp {
            CmpOp::Lt => (a.meet(&Interval::new(a_lo.clone(), b_hi - 1)), b.meet(&Interval::new(a_lo + 1, b_hi.clone()))),
            CmpOp::Le => (a.meet(&Interval::new(a_lo.clone(), b_hi.clone())), b.meet(&Interval::new(a_lo.clone(), b_hi.clone()))),
            CmpOp::Eq => (a.meet(&b), a.meet(&b)),
            CmpOp::Ne => (trim(&a, b.as_singleton()), trim(&b, a.as_singleton())),
            CmpOp::Gt | CmpOp::Ge => unreachable!("flipped above"),
        };
        if a2.is_bottom() || b2.is_bottom() {
            state.set_bottom();
            return;
        }
        self.refine_operand(state, lhs, &a2, at);
        self.refine_operand(state, rhs, &b2, at);
        if cmp == CmpOp::Lt && !state.is_bottom() {
            if let (Operand::Place(x), Operand::Place(len)) = (lhs, rhs) {
                if x.path.is_empty() && !x.base.is_temp() && len.path.last() == Some(&PathElem::Length) {
                    let array = Place { base: len.base, path: len.path[..len.path.len() - 1].to_vec() };
                    state.add_fact(BoundsFact { index: x.base, array });
                }
            }
        }
    }
}

/// Removes `v` from `itv` when it is an endpoint.
fn trim(itv: &Interval, v: Option<&BigInt>) -> Interval {
    let (Some((lo, hi)), Some(v)) = (itv.bounds(), v) else {
        return itv.clone();
    };
    if v == lo {
        Interval::new(lo + 1, hi.clone())
    } else if v == hi {
        Interval::new(lo.clone(), hi - 1)
    } else {
        itv.clone()
    }
}
