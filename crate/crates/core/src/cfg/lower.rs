//! Lowering of function bodies to three-address code.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;

use super::ir::*;
use crate::error::{Error, Result};
use crate::frontend::ast::*;
use crate::frontend::pretty::print_expr;
use crate::frontend::{literal_value, Binding, Span, SymbolTable, Ty};

/// Lowers every function of a contract. The constructor CFG (state variable
/// initializers followed by the constructor body) always comes first and is
/// named `constructor`.
pub fn lower_contract(contract: &ContractDef, symbols: &SymbolTable) -> Result<Vec<Cfg>> {
    let mut out = vec![lower_constructor(contract, symbols)?];
    for f in contract.functions.iter().filter(|f| f.kind == FunctionKind::Function) {
        out.push(lower_function(contract, f, symbols)?);
    }
    Ok(out)
}

pub fn lower_function(contract: &ContractDef, func: &FunctionDef, symbols: &SymbolTable) -> Result<Cfg> {
    let mut l = Lowerer::new(contract, symbols, &func.name.name, func.span, func.is_payable());
    l.function(func)?;
    Ok(l.finish())
}

/// State variable initializers, then the constructor body if there is one.
pub fn lower_constructor(contract: &ContractDef, symbols: &SymbolTable) -> Result<Cfg> {
    let ctor = contract.constructor();
    let span = ctor.map(|c| c.span).unwrap_or(contract.span);
    let payable = ctor.is_some_and(|c| c.is_payable());
    let mut l = Lowerer::new(contract, symbols, "constructor", span, payable);
    for (i, v) in contract.state_vars.iter().enumerate() {
        if let Some(init) = &v.init {
            l.span = v.span;
            l.lower_into(Place::var(VarId::State(i as u32)), init)?;
        }
    }
    if let Some(c) = ctor {
        l.function(c)?;
    }
    Ok(l.finish())
}

fn lower_error(span: Span, message: impl Into<String>) -> Error {
    Error::Lower { span, message: message.into() }
}

/// Where a `return` goes: out of the function, or to the code following the
/// `_;` that inlined the current body.
enum ReturnTarget {
    Exit,
    Continue(Option<BlockId>),
}

struct Lowerer<'a> {
    contract: &'a ContractDef,
    symbols: &'a SymbolTable,
    cfg: Cfg,
    /// Blocks still under construction have no terminator yet.
    terms: Vec<Option<Terminator>>,
    current: Option<BlockId>,
    decls: HashMap<DeclId, Option<VarId>>,
    returns: Vec<ReturnTarget>,
    return_vars: Vec<VarId>,
    span: Span,
}

impl<'a> Lowerer<'a> {
    fn new(contract: &'a ContractDef, symbols: &'a SymbolTable, name: &str, span: Span, payable: bool) -> Self {
        let ci = symbols.contracts.iter().position(|c| c.name == contract.name.name).expect("contract was resolved");
        let state_vars = symbols.contracts[ci]
            .state_vars
            .iter()
            .zip(&contract.state_vars)
            .map(|(d, v)| {
                let info = symbols.decl(*d).expect("state variable was resolved");
                StateVarInfo { name: info.name.clone(), ty: info.ty.clone(), span: v.name.span, has_initializer: v.init.is_some() }
            })
            .collect();
        let cfg = Cfg {
            function: name.to_string(),
            span,
            blocks: Vec::new(),
            locals: Vec::new(),
            temps: Vec::new(),
            state_vars,
            params: Vec::new(),
            payable,
            loop_headers: BTreeSet::new(),
            literals: BTreeSet::new(),
            temp_defs: BTreeMap::new(),
        };
        let mut l = Lowerer {
            contract,
            symbols,
            cfg,
            terms: Vec::new(),
            current: None,
            decls: HashMap::new(),
            returns: vec![ReturnTarget::Exit],
            return_vars: Vec::new(),
            span,
        };
        let entry = l.new_block();
        l.current = Some(entry);
        l
    }

    fn finish(mut self) -> Cfg {
        if let Some(b) = self.current.take() {
            self.terminate(b, Terminator::Exit);
        }
        for (block, term) in self.cfg.blocks.iter_mut().zip(self.terms) {
            block.term = term.expect("every block is terminated");
        }
        self.cfg
    }

    fn new_block(&mut self) -> BlockId {
        self.cfg.blocks.push(Block { instrs: Vec::new(), term: Terminator::Exit });
        self.terms.push(None);
        self.cfg.blocks.len() - 1
    }

    fn terminate(&mut self, b: BlockId, term: Terminator) {
        debug_assert!(self.terms[b].is_none());
        self.terms[b] = Some(term);
    }

    /// Ends the current block with a jump to `target`, if control reaches here.
    fn jump_to(&mut self, target: BlockId) {
        if let Some(b) = self.current.take() {
            self.terminate(b, Terminator::Jump(target));
        }
    }

    fn emit(&mut self, kind: InstrKind) {
        let Some(b) = self.current else { return };
        if let Some(Place { base: VarId::Temp(t), path }) = kind.dest() {
            if path.is_empty() {
                self.cfg.temp_defs.insert(*t, (b, self.cfg.blocks[b].instrs.len()));
            }
        }
        self.cfg.blocks[b].instrs.push(Instr { kind, span: self.span });
    }

    fn new_local(&mut self, decl: DeclId, name: &str, is_param: bool, span: Span) -> Option<VarId> {
        let info = self.symbols.decl(decl).expect("declaration was resolved");
        let var = match info.ty {
            Ty::Str | Ty::Bytes | Ty::Tuple(_) | Ty::Unit => None,
            _ => {
                self.cfg.locals.push(LocalInfo { name: name.to_string(), ty: info.ty.clone(), span, is_param });
                Some(VarId::Local(self.cfg.locals.len() as u32 - 1))
            }
        };
        self.decls.insert(decl, var);
        var
    }

    fn new_temp(&mut self, ty: Ty, label: String) -> Place {
        self.cfg.temps.push(TempInfo { ty, label });
        Place::var(VarId::Temp(self.cfg.temps.len() as u32 - 1))
    }

    fn function(&mut self, f: &FunctionDef) -> Result<()> {
        for p in &f.params {
            let name = p.name.as_ref().map(|n| n.name.as_str()).unwrap_or("_");
            if let Some(v) = self.new_local(p.decl, name, true, p.span) {
                self.cfg.params.push(v);
            }
        }
        for r in &f.returns {
            if let Some(name) = &r.name {
                if let Some(v) = self.new_local(r.decl, &name.name, false, r.span) {
                    self.span = r.span;
                    self.emit(InstrKind::InitDefault { dest: Place::var(v) });
                    self.return_vars.push(v);
                }
            }
        }
        self.layer(f, 0)
    }

    /// Lowers modifier `k` of `f` around the remaining layers; `k` past the
    /// last modifier is the function body itself.
    fn layer(&mut self, f: &FunctionDef, k: usize) -> Result<()> {
        let Some(inv) = f.modifiers.get(k) else {
            return self.stmts(&f.body);
        };
        let m = self.contract.modifier(&inv.name.name).expect("modifier was resolved");
        self.span = inv.span;
        let mut args = Vec::new();
        for a in &inv.args {
            args.push(self.operand(a)?);
        }
        for (p, a) in m.params.iter().zip(args) {
            let name = p.name.as_ref().map(|n| n.name.as_str()).unwrap_or("_");
            if let Some(v) = self.new_local(p.decl, name, false, p.span) {
                self.emit(InstrKind::Assign { dest: Place::var(v), src: a });
            }
        }
        self.modifier_body(&m.body, f, k)
    }

    fn modifier_body(&mut self, body: &[Stmt], f: &FunctionDef, k: usize) -> Result<()> {
        for s in body {
            self.stmt_in(s, Some((f, k)))?;
        }
        Ok(())
    }

    fn stmts(&mut self, stmts: &[Stmt]) -> Result<()> {
        for s in stmts {
            self.stmt_in(s, None)?;
        }
        Ok(())
    }

    fn stmt(&mut self, s: &Stmt) -> Result<()> {
        self.stmt_in(s, None)
    }

    /// `inline` is the function and modifier index whose inner layers a `_;`
    /// expands to.
    fn stmt_in(&mut self, s: &Stmt, inline: Option<(&FunctionDef, usize)>) -> Result<()> {
        if self.current.is_none() {
            // unreachable code after return or revert
            return Ok(());
        }
        self.span = s.span;
        match &s.kind {
            StmtKind::VarDecl { decl, init } => {
                let var = self.new_local(decl.decl, &decl.name.name, false, decl.name.span);
                let Some(var) = var else {
                    return Err(lower_error(s.span, "variables of this type are not modeled"));
                };
                match init {
                    Some(e) => self.lower_into(Place::var(var), e)?,
                    None => self.emit(InstrKind::InitDefault { dest: Place::var(var) }),
                }
            }
            StmtKind::TupleDecl { decls, init } => {
                let success = match decls.first() {
                    Some(Some(d)) => self.new_local(d.decl, &d.name.name, false, d.name.span).map(Place::var),
                    _ => None,
                };
                for d in decls.iter().skip(1).flatten() {
                    self.new_local(d.decl, &d.name.name, false, d.name.span);
                }
                self.span = s.span;
                self.external_call(init, success)?;
            }
            StmtKind::Assign { target, op, value } => {
                let dest = self.place(target)?;
                match op.binary() {
                    None => self.lower_into(dest, value)?,
                    Some(bin) => {
                        let rhs = self.operand(value)?;
                        self.read_modify_write(dest, target, bin, rhs);
                    }
                }
            }
            StmtKind::IncDec { target, increment } => {
                let dest = self.place(target)?;
                let op = if *increment { BinaryOp::Add } else { BinaryOp::Sub };
                self.cfg.literals.insert(BigInt::from(1));
                self.read_modify_write(dest, target, op, Operand::constant(1));
            }
            StmtKind::Expr(e) => match &e.kind {
                ExprKind::Call { callee, .. } if self.is_external(callee) => self.external_call(e, None)?,
                _ => {
                    let t = self.new_temp(self.symbols.ty(e).clone(), print_expr(e));
                    self.lower_into(t, e)?;
                }
            },
            StmtKind::Require { cond, .. } => {
                let c = self.operand(cond)?;
                self.emit(InstrKind::Require { cond: c });
            }
            StmtKind::Assert { cond } => {
                let c = self.operand(cond)?;
                self.emit(InstrKind::Assert { cond: c });
            }
            StmtKind::Revert { .. } => {
                self.emit(InstrKind::Revert);
                let b = self.current.take().unwrap();
                self.terminate(b, Terminator::Exit);
            }
            StmtKind::If { cond, then_branch, else_branch } => {
                let c = self.operand(cond)?;
                let b = self.current.take().unwrap();
                let then_block = self.new_block();
                let else_block = self.new_block();
                self.terminate(b, Terminator::Branch { cond: c, then_block, else_block, span: s.span });
                self.current = Some(then_block);
                self.stmt_in(then_branch, inline)?;
                let then_end = self.current.take();
                self.current = Some(else_block);
                if let Some(e) = else_branch {
                    self.stmt_in(e, inline)?;
                }
                let else_end = self.current.take();
                if then_end.is_some() || else_end.is_some() {
                    let join = self.new_block();
                    for end in [then_end, else_end].into_iter().flatten() {
                        self.terminate(end, Terminator::Jump(join));
                    }
                    self.current = Some(join);
                }
            }
            StmtKind::For { init, cond, step, body } => {
                if let Some(i) = init {
                    self.stmt(i)?;
                }
                self.span = s.span;
                self.lower_loop(cond.as_ref(), body, step.as_deref(), s.span, inline)?;
            }
            StmtKind::While { cond, body } => self.lower_loop(Some(cond), body, None, s.span, inline)?,
            StmtKind::Return(value) => {
                let values = match value {
                    Some(e) => vec![self.operand(e)?],
                    None => self.return_vars.iter().map(|v| Operand::var(*v)).collect(),
                };
                self.emit(InstrKind::Return { values });
                let b = self.current.take().unwrap();
                let term = match self.returns.last_mut().unwrap() {
                    ReturnTarget::Exit => Terminator::Exit,
                    ReturnTarget::Continue(Some(t)) => Terminator::Jump(*t),
                    ReturnTarget::Continue(slot @ None) => {
                        self.cfg.blocks.push(Block { instrs: Vec::new(), term: Terminator::Exit });
                        self.terms.push(None);
                        let t = self.cfg.blocks.len() - 1;
                        *slot = Some(t);
                        Terminator::Jump(t)
                    }
                };
                self.terminate(b, term);
            }
            StmtKind::Block(stmts) => {
                for st in stmts {
                    self.stmt_in(st, inline)?;
                }
            }
            StmtKind::Placeholder => {
                let Some((f, k)) = inline else {
                    return Err(lower_error(s.span, "`_;` outside of a modifier"));
                };
                self.returns.push(ReturnTarget::Continue(None));
                self.layer(f, k + 1)?;
                let ReturnTarget::Continue(cont) = self.returns.pop().unwrap() else { unreachable!() };
                if let Some(c) = cont {
                    self.jump_to(c);
                    self.current = Some(c);
                }
            }
        }
        Ok(())
    }

    /// `header: cond ? body : exit`, `body; step; goto header`.
    fn lower_loop(
        &mut self,
        cond: Option<&Expr>,
        body: &Stmt,
        step: Option<&Stmt>,
        span: Span,
        inline: Option<(&FunctionDef, usize)>,
    ) -> Result<()> {
        let header = self.new_block();
        self.jump_to(header);
        self.cfg.loop_headers.insert(header);
        self.current = Some(header);
        self.span = span;
        let body_block = self.new_block();
        let exit = match cond {
            Some(c) => {
                let c = self.operand(c)?;
                let exit = self.new_block();
                self.terminate(header, Terminator::Branch { cond: c, then_block: body_block, else_block: exit, span });
                Some(exit)
            }
            None => {
                self.terminate(header, Terminator::Jump(body_block));
                None
            }
        };
        self.current = Some(body_block);
        self.stmt_in(body, inline)?;
        if let Some(st) = step {
            if self.current.is_some() {
                let step_block = self.new_block();
                self.jump_to(step_block);
                self.current = Some(step_block);
                self.stmt(st)?;
            }
        }
        self.jump_to(header);
        self.current = exit;
        Ok(())
    }

    /// `place op= rhs` as read, compute, write.
    fn read_modify_write(&mut self, dest: Place, target: &Expr, op: BinaryOp, rhs: Operand) {
        let ty = self.symbols.ty(target).clone();
        let label = print_expr(target);
        let old = self.new_temp(ty.clone(), label.clone());
        self.emit(InstrKind::Assign { dest: old.clone(), src: Operand::Place(dest.clone()) });
        let new = self.new_temp(ty, format!("{label} {} {}", op.as_str(), self.operand_label(&rhs)));
        self.emit(InstrKind::BinOp { dest: new.clone(), op, lhs: Operand::Place(old), rhs });
        self.emit(InstrKind::Assign { dest, src: Operand::Place(new) });
    }

    fn operand_label(&self, op: &Operand) -> String {
        match op {
            Operand::Const(c) => c.to_string(),
            Operand::Place(p) => self.cfg.source_name(p),
        }
    }

    fn is_external(&self, callee: &Expr) -> bool {
        matches!(self.symbols.binding(callee.id), Some(Binding::Transfer | Binding::Call))
    }

    /// `.transfer(amount)` or `.call{value: amount}(..)`.
    fn external_call(&mut self, e: &Expr, success: Option<Place>) -> Result<()> {
        let ExprKind::Call { callee, options, args } = &e.kind else {
            return Err(lower_error(e.span, "expected an external call"));
        };
        let ExprKind::Member(recipient, _) = &callee.kind else {
            return Err(lower_error(e.span, "expected an external call"));
        };
        let recipient = self.operand(recipient)?;
        let amount = match self.symbols.binding(callee.id) {
            Some(Binding::Transfer) => self.operand(&args[0])?,
            Some(Binding::Call) => match options.iter().find(|(n, _)| n.name == "value") {
                Some((_, v)) => self.operand(v)?,
                None => Operand::constant(0),
            },
            _ => return Err(lower_error(e.span, "expected an external call")),
        };
        self.emit(InstrKind::ExternalTransfer { recipient, amount, success });
        Ok(())
    }

    /// Computes `e` directly into `dest`.
    fn lower_into(&mut self, dest: Place, e: &Expr) -> Result<()> {
        match &e.kind {
            _ if literal_value(e).is_some() => {
                let src = self.operand(e)?;
                self.emit(InstrKind::Assign { dest, src });
            }
            ExprKind::Binary(op, l, r) => {
                let lhs = self.operand(l)?;
                let rhs = self.operand(r)?;
                self.emit(InstrKind::BinOp { dest, op: *op, lhs, rhs });
            }
            ExprKind::Unary(op, inner) => {
                let src = self.operand(inner)?;
                self.emit(InstrKind::UnOp { dest, op: *op, src });
            }
            ExprKind::Call { callee, args, .. } => match self.symbols.binding(callee.id) {
                Some(Binding::EnumType(en)) => {
                    let en = en.clone();
                    let src = self.operand(&args[0])?;
                    self.emit(InstrKind::EnumCast { dest, enum_name: en.name.clone(), variants: en.variants.len() as u16, src });
                }
                Some(Binding::Payable) => self.lower_into(dest, &args[0])?,
                _ => return Err(lower_error(e.span, "call used as a value")),
            },
            ExprKind::ArrayLit(items) => {
                let mut elems = Vec::new();
                for i in items {
                    elems.push(self.operand(i)?);
                }
                self.emit(InstrKind::ArrayLit { dest, elems });
            }
            _ => {
                let src = self.operand(e)?;
                self.emit(InstrKind::Assign { dest, src });
            }
        }
        Ok(())
    }

    fn operand(&mut self, e: &Expr) -> Result<Operand> {
        if let Some(v) = literal_value(e) {
            self.cfg.literals.insert(v.clone());
            return Ok(Operand::Const(v));
        }
        match &e.kind {
            ExprKind::Bool(b) => Ok(Operand::constant(*b as u8)),
            ExprKind::Str(_) => Err(lower_error(e.span, "string values are not modeled")),
            ExprKind::Ident(_) | ExprKind::Index(..) => Ok(Operand::Place(self.place(e)?)),
            ExprKind::Member(..) => match self.symbols.binding(e.id) {
                Some(Binding::EnumVariant { ordinal, .. }) => Ok(Operand::constant(*ordinal as u64)),
                _ => Ok(Operand::Place(self.place(e)?)),
            },
            ExprKind::Call { callee, args, .. } if matches!(self.symbols.binding(callee.id), Some(Binding::Payable)) => {
                self.operand(&args[0])
            }
            _ => {
                let t = self.new_temp(self.symbols.ty(e).clone(), print_expr(e));
                self.lower_into(t.clone(), e)?;
                Ok(Operand::Place(t))
            }
        }
    }

    fn place(&mut self, e: &Expr) -> Result<Place> {
        match (&e.kind, self.symbols.binding(e.id)) {
            (ExprKind::Ident(_), Some(Binding::State(i))) => Ok(Place::var(VarId::State(*i as u32))),
            (ExprKind::Ident(name), Some(Binding::Local(d))) => match self.decls.get(d) {
                Some(Some(v)) => Ok(Place::var(*v)),
                _ => Err(lower_error(e.span, format!("`{name}` is not a modeled variable"))),
            },
            (ExprKind::Member(..), Some(Binding::MsgSender)) => Ok(Place::var(VarId::MsgSender)),
            (ExprKind::Member(..), Some(Binding::MsgValue)) => Ok(Place::var(VarId::MsgValue)),
            (ExprKind::Member(base, _), Some(Binding::ArrayLength)) => Ok(self.place(base)?.with(PathElem::Length)),
            (ExprKind::Member(base, _), Some(Binding::StructField(f))) => {
                let f = f.clone();
                Ok(self.place(base)?.with(PathElem::Field(f)))
            }
            (ExprKind::Index(base, index), _) => {
                let b = self.place(base)?;
                let i = match self.operand(index)? {
                    Operand::Place(p) if !p.path.is_empty() => {
                        let t = self.new_temp(self.symbols.ty(index).clone(), print_expr(index));
                        self.emit(InstrKind::Assign { dest: t.clone(), src: Operand::Place(p) });
                        Operand::Place(t)
                    }
                    other => other,
                };
                Ok(b.with(PathElem::Index(i)))
            }
            _ => {
                let t = self.new_temp(self.symbols.ty(e).clone(), print_expr(e));
                self.lower_into(t.clone(), e)?;
                Ok(t)
            }
        }
    }
}
