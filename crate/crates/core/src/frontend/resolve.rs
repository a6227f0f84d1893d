//! Name resolution and type checking.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::ToPrimitive;

use super::ast::*;
use super::types::{EnumType, StructType, Ty};
use super::Span;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeclKind {
    State,
    Param,
    Return,
    Local,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeclInfo {
    pub name: String,
    pub ty: Ty,
    pub kind: DeclKind,
    pub span: Span,
}

/// What an identifier or member expression refers to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Binding {
    /// Index into the contract's state variables.
    State(usize),
    Local(DeclId),
    MsgSender,
    MsgValue,
    EnumVariant { ty: Arc<EnumType>, ordinal: usize },
    EnumType(Arc<EnumType>),
    ArrayLength,
    StructField(String),
    Payable,
    Transfer,
    Call,
    /// The bare `msg` object, only valid as the base of a member access.
    Msg,
}

#[derive(Debug, Clone, Default)]
pub struct ContractSymbols {
    pub name: String,
    pub enums: Vec<Arc<EnumType>>,
    pub structs: Vec<Arc<StructType>>,
    /// Declaration ids of the state variables, in declaration order.
    pub state_vars: Vec<DeclId>,
}

#[derive(Debug, Clone, Default)]
pub struct SymbolTable {
    expr_types: Vec<Option<Ty>>,
    bindings: HashMap<ExprId, Binding>,
    decls: Vec<Option<DeclInfo>>,
    pub contracts: Vec<ContractSymbols>,
}

impl SymbolTable {
    pub fn type_of(&self, id: ExprId) -> Option<&Ty> {
        self.expr_types.get(id.0 as usize).and_then(|t| t.as_ref())
    }

    /// Type of an expression that the resolver has checked.
    pub fn ty(&self, e: &Expr) -> &Ty {
        self.type_of(e.id).expect("expression was not resolved")
    }

    pub fn binding(&self, id: ExprId) -> Option<&Binding> {
        self.bindings.get(&id)
    }

    pub fn decl(&self, id: DeclId) -> Option<&DeclInfo> {
        self.decls.get(id.0 as usize).and_then(|d| d.as_ref())
    }

    pub fn typed_expr_count(&self) -> usize {
        self.expr_types.iter().filter(|t| t.is_some()).count()
    }
}

fn resolve_error(span: Span, message: impl Into<String>) -> Error {
    Error::Resolve { span, message: message.into() }
}

fn type_error(span: Span, message: impl Into<String>) -> Error {
    Error::Type { span, message: message.into() }
}

/// Binds every name and assigns a type to every expression.
pub fn resolve(unit: &SourceUnit) -> Result<SymbolTable> {
    let mut table = SymbolTable {
        expr_types: vec![None; unit.expr_count as usize],
        bindings: HashMap::new(),
        decls: vec![None; unit.decl_count as usize],
        contracts: Vec::new(),
    };
    for contract in &unit.contracts {
        let symbols = Resolver::new(&mut table, contract)?.run()?;
        table.contracts.push(symbols);
    }
    Ok(table)
}

struct Resolver<'a> {
    table: &'a mut SymbolTable,
    contract: &'a ContractDef,
    enums: HashMap<String, Arc<EnumType>>,
    structs: HashMap<String, Arc<StructType>>,
    state_index: HashMap<String, usize>,
    scopes: Vec<HashMap<String, DeclId>>,
    return_types: Vec<Ty>,
    in_modifier: bool,
}

impl<'a> Resolver<'a> {
    fn new(table: &'a mut SymbolTable, contract: &'a ContractDef) -> Result<Self> {
        let mut enums = HashMap::new();
        for e in &contract.enums {
            if e.variants.len() > 256 {
                return Err(type_error(e.span, "enums are limited to 256 variants"));
            }
            let ty = EnumType { name: e.name.name.clone(), variants: e.variants.iter().map(|v| v.name.clone()).collect() };
            if enums.insert(e.name.name.clone(), Arc::new(ty)).is_some() {
                return Err(resolve_error(e.name.span, format!("duplicate type `{}`", e.name.name)));
            }
        }
        let mut r = Resolver {
            table,
            contract,
            enums,
            structs: HashMap::new(),
            state_index: HashMap::new(),
            scopes: Vec::new(),
            return_types: Vec::new(),
            in_modifier: false,
        };
        for s in &contract.structs {
            if !r.structs.contains_key(&s.name.name) {
                r.resolve_struct(&s.name.name, &mut Vec::new())?;
            }
        }
        Ok(r)
    }

    fn resolve_struct(&mut self, name: &str, visiting: &mut Vec<String>) -> Result<Arc<StructType>> {
        if let Some(s) = self.structs.get(name) {
            return Ok(s.clone());
        }
        let def = self.contract.structs.iter().find(|s| s.name.name == name).expect("struct exists");
        if visiting.iter().any(|v| v == name) {
            return Err(type_error(def.span, format!("recursive struct `{name}`")));
        }
        visiting.push(name.to_string());
        let mut fields = Vec::new();
        for (ty, field) in &def.fields {
            fields.push((field.name.clone(), self.resolve_type_in(ty, visiting)?));
        }
        visiting.pop();
        let ty = Arc::new(StructType { name: name.to_string(), fields });
        self.structs.insert(name.to_string(), ty.clone());
        Ok(ty)
    }

    fn resolve_type(&mut self, ty: &TypeName) -> Result<Ty> {
        self.resolve_type_in(ty, &mut Vec::new())
    }

    fn resolve_type_in(&mut self, ty: &TypeName, visiting: &mut Vec<String>) -> Result<Ty> {
        Ok(match ty {
            TypeName::Elementary(e, span) => match e {
                ElementaryType::Uint(n) => Ty::Uint(*n),
                ElementaryType::Int(n) => Ty::Int(*n),
                ElementaryType::Bool => Ty::Bool,
                ElementaryType::Address { .. } => Ty::Address,
                ElementaryType::String => {
                    return Err(Error::Unsupported { span: *span, construct: "string variables".into() })
                }
            },
            TypeName::Named(id) => {
                if let Some(e) = self.enums.get(&id.name) {
                    Ty::Enum(e.clone())
                } else if self.contract.structs.iter().any(|s| s.name.name == id.name) {
                    Ty::Struct(self.resolve_struct(&id.name, visiting)?)
                } else {
                    return Err(resolve_error(id.span, format!("unknown type `{}`", id.name)));
                }
            }
            TypeName::Array(elem, len, span) => {
                let elem = self.resolve_type_in(elem, visiting)?;
                if matches!(elem, Ty::Mapping { .. }) {
                    return Err(type_error(*span, "arrays of mappings are not supported"));
                }
                let len = match len {
                    Some(n) => Some(n.to_u64().filter(|n| *n > 0).ok_or_else(|| type_error(*span, "invalid array length"))?),
                    None => None,
                };
                Ty::Array { elem: Box::new(elem), len }
            }
            TypeName::Mapping(key, value, span) => {
                let key = self.resolve_type_in(key, visiting)?;
                if !key.is_scalar() {
                    return Err(type_error(*span, "mapping keys must be elementary or enum types"));
                }
                let value = self.resolve_type_in(value, visiting)?;
                Ty::Mapping { key: Box::new(key), value: Box::new(value) }
            }
        })
    }

    fn declare(&mut self, decl: DeclId, name: &Ident, ty: Ty, kind: DeclKind) {
        self.table.decls[decl.0 as usize] = Some(DeclInfo { name: name.name.clone(), ty, kind, span: name.span });
        if let Some(scope) = self.scopes.last_mut() {
            scope.insert(name.name.clone(), decl);
        }
    }

    fn run(mut self) -> Result<ContractSymbols> {
        let c = self.contract;
        let mut state_vars = Vec::new();
        for (i, v) in c.state_vars.iter().enumerate() {
            let ty = self.resolve_type(&v.ty)?;
            if let Some(init) = &v.init {
                self.check_assignable(init, &ty)?;
            }
            if self.state_index.insert(v.name.name.clone(), i).is_some() {
                return Err(resolve_error(v.name.span, format!("duplicate state variable `{}`", v.name.name)));
            }
            self.table.decls[v.decl.0 as usize] =
                Some(DeclInfo { name: v.name.name.clone(), ty, kind: DeclKind::State, span: v.name.span });
            state_vars.push(v.decl);
        }

        for m in &c.modifiers {
            self.in_modifier = true;
            self.return_types.clear();
            self.scopes.push(HashMap::new());
            self.declare_params(&m.params, DeclKind::Param)?;
            self.block(&m.body)?;
            self.scopes.pop();
            if !m.body.iter().any(contains_placeholder) {
                return Err(type_error(m.span, format!("modifier `{}` has no `_;` placeholder", m.name.name)));
            }
        }
        self.in_modifier = false;

        let mut constructors = 0;
        for f in &c.functions {
            if f.kind == FunctionKind::Constructor {
                constructors += 1;
                if constructors > 1 {
                    return Err(resolve_error(f.name.span, "more than one constructor"));
                }
            }
            self.scopes.push(HashMap::new());
            self.declare_params(&f.params, DeclKind::Param)?;
            self.return_types = Vec::new();
            for r in &f.returns {
                let ty = self.resolve_type(&r.ty)?;
                self.return_types.push(ty.clone());
                match &r.name {
                    Some(name) => self.declare(r.decl, name, ty, DeclKind::Return),
                    None => {
                        let anon = Ident { name: String::new(), span: r.span };
                        self.table.decls[r.decl.0 as usize] =
                            Some(DeclInfo { name: anon.name, ty, kind: DeclKind::Return, span: r.span });
                    }
                }
            }
            for inv in &f.modifiers {
                let Some(m) = c.modifier(&inv.name.name) else {
                    return Err(resolve_error(inv.name.span, format!("unknown modifier `{}`", inv.name.name)));
                };
                if m.params.len() != inv.args.len() {
                    return Err(type_error(inv.span, format!("modifier `{}` expects {} arguments", m.name.name, m.params.len())));
                }
                for (p, a) in m.params.iter().zip(&inv.args) {
                    let ty = self.table.decl(p.decl).expect("modifier params resolved").ty.clone();
                    self.check_assignable(a, &ty)?;
                }
            }
            self.block(&f.body)?;
            self.scopes.pop();
        }

        let mut names = std::collections::HashSet::new();
        for f in c.functions.iter().filter(|f| f.kind == FunctionKind::Function) {
            if !names.insert(f.name.name.as_str()) {
                return Err(Error::Unsupported { span: f.name.span, construct: "function overloading".into() });
            }
        }

        let mut enums: Vec<_> = c.enums.iter().map(|e| self.enums[&e.name.name].clone()).collect();
        enums.dedup();
        let structs = c.structs.iter().map(|s| self.structs[&s.name.name].clone()).collect();
        Ok(ContractSymbols { name: c.name.name.clone(), enums, structs, state_vars })
    }

    fn declare_params(&mut self, params: &[Param], kind: DeclKind) -> Result<()> {
        for p in params {
            let ty = self.resolve_type(&p.ty)?;
            self.check_local_type(&ty, p.location, p.span)?;
            match &p.name {
                Some(name) => self.declare(p.decl, name, ty, kind),
                None => {
                    self.table.decls[p.decl.0 as usize] = Some(DeclInfo { name: String::new(), ty, kind, span: p.span })
                }
            }
        }
        Ok(())
    }

    fn check_local_type(&self, ty: &Ty, location: Option<DataLocation>, span: Span) -> Result<()> {
        if matches!(ty, Ty::Mapping { .. }) {
            return Err(Error::Unsupported { span, construct: "mapping-typed local variables".into() });
        }
        if location == Some(DataLocation::Storage) {
            return Err(Error::Unsupported { span, construct: "storage reference variables".into() });
        }
        Ok(())
    }

    fn lookup(&self, name: &str) -> Option<Binding> {
        for scope in self.scopes.iter().rev() {
            if let Some(d) = scope.get(name) {
                return Some(Binding::Local(*d));
            }
        }
        if let Some(i) = self.state_index.get(name) {
            return Some(Binding::State(*i));
        }
        if let Some(e) = self.enums.get(name) {
            return Some(Binding::EnumType(e.clone()));
        }
        match name {
            "msg" => Some(Binding::Msg),
            "payable" => Some(Binding::Payable),
            _ => None,
        }
    }

    // ---- statements ----

    fn block(&mut self, stmts: &[Stmt]) -> Result<()> {
        self.scopes.push(HashMap::new());
        for s in stmts {
            self.stmt(s)?;
        }
        self.scopes.pop();
        Ok(())
    }

    fn stmt(&mut self, s: &Stmt) -> Result<()> {
        match &s.kind {
            StmtKind::VarDecl { decl, init } => {
                let ty = self.resolve_type(&decl.ty)?;
                self.check_local_type(&ty, decl.location, s.span)?;
                if let Some(init) = init {
                    self.check_assignable(init, &ty)?;
                }
                self.declare(decl.decl, &decl.name, ty, DeclKind::Local);
            }
            StmtKind::TupleDecl { decls, init } => {
                let init_ty = self.expr(init, None)?;
                let Ty::Tuple(items) = &init_ty else {
                    return Err(type_error(init.span, "tuple declaration needs a tuple-valued initializer"));
                };
                if items.len() != decls.len() {
                    return Err(type_error(s.span, format!("expected {} tuple components, found {}", items.len(), decls.len())));
                }
                for (d, item) in decls.iter().zip(items) {
                    if let Some(d) = d {
                        let ty = self.resolve_type(&d.ty)?;
                        if !ty.accepts(item) {
                            return Err(type_error(d.name.span, format!("cannot bind {item} to `{}` of type {ty}", d.name.name)));
                        }
                        self.declare(d.decl, &d.name, ty, DeclKind::Local);
                    }
                }
            }
            StmtKind::Assign { target, op, value } => {
                let ty = self.lvalue(target)?;
                if *op != AssignOp::Assign && !ty.is_integer() {
                    return Err(type_error(s.span, format!("`{}` needs an integer target, found {ty}", op.as_str())));
                }
                self.check_assignable(value, &ty)?;
            }
            StmtKind::IncDec { target, .. } => {
                let ty = self.lvalue(target)?;
                if !ty.is_integer() {
                    return Err(type_error(target.span, format!("cannot increment a value of type {ty}")));
                }
            }
            StmtKind::Expr(e) => {
                self.expr(e, None)?;
            }
            StmtKind::Require { cond, message } => {
                self.expect_type(cond, &Ty::Bool)?;
                if let Some(m) = message {
                    self.expect_type(m, &Ty::Str)?;
                }
            }
            StmtKind::Assert { cond } => self.expect_type(cond, &Ty::Bool)?,
            StmtKind::Revert { message } => {
                if let Some(m) = message {
                    self.expect_type(m, &Ty::Str)?;
                }
            }
            StmtKind::If { cond, then_branch, else_branch } => {
                self.expect_type(cond, &Ty::Bool)?;
                self.scoped(then_branch)?;
                if let Some(e) = else_branch {
                    self.scoped(e)?;
                }
            }
            StmtKind::For { init, cond, step, body } => {
                self.scopes.push(HashMap::new());
                if let Some(i) = init {
                    self.stmt(i)?;
                }
                if let Some(c) = cond {
                    self.expect_type(c, &Ty::Bool)?;
                }
                if let Some(st) = step {
                    self.stmt(st)?;
                }
                self.scoped(body)?;
                self.scopes.pop();
            }
            StmtKind::While { cond, body } => {
                self.expect_type(cond, &Ty::Bool)?;
                self.scoped(body)?;
            }
            StmtKind::Return(value) => match (value, self.return_types.as_slice()) {
                (None, _) => {}
                (Some(e), [ty]) => {
                    let ty = ty.clone();
                    self.check_assignable(e, &ty)?;
                }
                (Some(e), []) => return Err(type_error(e.span, "function does not return a value")),
                (Some(e), _) => return Err(Error::Unsupported { span: e.span, construct: "multiple return values".into() }),
            },
            StmtKind::Block(stmts) => self.block(stmts)?,
            StmtKind::Placeholder => {
                if !self.in_modifier {
                    return Err(type_error(s.span, "`_;` outside of a modifier"));
                }
            }
        }
        Ok(())
    }

    fn scoped(&mut self, s: &Stmt) -> Result<()> {
        self.scopes.push(HashMap::new());
        let r = self.stmt(s);
        self.scopes.pop();
        r
    }

    fn lvalue(&mut self, e: &Expr) -> Result<Ty> {
        let ty = self.expr(e, None)?;
        let ok = match &e.kind {
            ExprKind::Ident(_) => matches!(self.table.binding(e.id), Some(Binding::State(_) | Binding::Local(_))),
            ExprKind::Index(..) => true,
            ExprKind::Member(..) => matches!(self.table.binding(e.id), Some(Binding::StructField(_))),
            _ => false,
        };
        if !ok {
            return Err(type_error(e.span, "expression is not assignable"));
        }
        Ok(ty)
    }

    // ---- expressions ----

    fn set(&mut self, e: &Expr, ty: Ty) -> Ty {
        self.table.expr_types[e.id.0 as usize] = Some(ty.clone());
        ty
    }

    fn bind(&mut self, e: &Expr, b: Binding) {
        self.table.bindings.insert(e.id, b);
    }

    fn expect_type(&mut self, e: &Expr, want: &Ty) -> Result<()> {
        let got = self.expr(e, Some(want))?;
        if &got != want {
            return Err(type_error(e.span, format!("expected {want}, found {got}")));
        }
        Ok(())
    }

    fn check_assignable(&mut self, e: &Expr, target: &Ty) -> Result<()> {
        let got = self.expr(e, Some(target))?;
        let array_literal_ok = matches!((&e.kind, target, &got),
            (ExprKind::ArrayLit(_), Ty::Array { elem: te, .. }, Ty::Array { elem: ge, .. }) if te == ge);
        if !target.accepts(&got) && !array_literal_ok {
            return Err(type_error(e.span, format!("cannot assign {got} to {target}")));
        }
        Ok(())
    }

    fn expr(&mut self, e: &Expr, hint: Option<&Ty>) -> Result<Ty> {
        let ty = match &e.kind {
            ExprKind::Number(n) => literal_type(&BigInt::from(n.clone()), hint).ok_or_else(|| type_error(e.span, "integer literal out of range"))?,
            ExprKind::Bool(_) => Ty::Bool,
            ExprKind::Str(_) => Ty::Str,
            ExprKind::Ident(name) => {
                let binding = self.lookup(name).ok_or_else(|| resolve_error(e.span, format!("undeclared identifier `{name}`")))?;
                let ty = match &binding {
                    Binding::State(i) => {
                        let decl = self.contract.state_vars[*i].decl;
                        self.table.decl(decl).expect("state var resolved").ty.clone()
                    }
                    Binding::Local(d) => self.table.decl(*d).expect("local resolved").ty.clone(),
                    Binding::EnumType(_) | Binding::Msg | Binding::Payable => {
                        return Err(type_error(e.span, format!("`{name}` is not a value")))
                    }
                    _ => unreachable!("lookup only yields variables, enums and builtins"),
                };
                self.bind(e, binding);
                ty
            }
            ExprKind::Member(base, member) => self.member(e, base, member)?,
            ExprKind::Index(base, index) => {
                let base_ty = self.expr(base, None)?;
                match base_ty {
                    Ty::Array { elem, .. } => {
                        let it = self.expr(index, Some(&Ty::UINT256))?;
                        if !matches!(it, Ty::Uint(_)) {
                            return Err(type_error(index.span, format!("array index must be unsigned, found {it}")));
                        }
                        *elem
                    }
                    Ty::Mapping { key, value } => {
                        let it = self.expr(index, Some(&key))?;
                        if !key.accepts(&it) {
                            return Err(type_error(index.span, format!("expected key of type {key}, found {it}")));
                        }
                        *value
                    }
                    other => return Err(type_error(base.span, format!("cannot index a value of type {other}"))),
                }
            }
            ExprKind::Call { callee, options, args } => self.call(e, callee, options, args)?,
            ExprKind::Binary(op, l, r) => self.binary(e, *op, l, r, hint)?,
            ExprKind::Unary(UnaryOp::Not, inner) => {
                self.expect_type(inner, &Ty::Bool)?;
                Ty::Bool
            }
            ExprKind::Unary(UnaryOp::Neg, inner) => {
                if let Some(v) = literal_value(e) {
                    let hint = hint.filter(|h| matches!(h, Ty::Int(_)));
                    let ty = literal_type(&v, hint).ok_or_else(|| type_error(e.span, "integer literal out of range"))?;
                    self.set(inner, ty.clone());
                    ty
                } else {
                    let t = self.expr(inner, hint)?;
                    if !matches!(t, Ty::Int(_)) {
                        return Err(type_error(e.span, format!("unary `-` needs a signed integer, found {t}")));
                    }
                    t
                }
            }
            ExprKind::ArrayLit(items) => {
                if items.is_empty() {
                    return Err(type_error(e.span, "empty array literal"));
                }
                let elem_hint = match hint {
                    Some(Ty::Array { elem, .. }) => Some((**elem).clone()),
                    _ => None,
                };
                let elem = match elem_hint {
                    Some(t) => t,
                    None => self.expr(&items[0], None)?,
                };
                for item in items {
                    self.check_assignable(item, &elem)?;
                }
                match hint {
                    Some(Ty::Array { len: Some(n), .. }) if *n != items.len() as u64 => {
                        return Err(type_error(e.span, format!("array literal has {} elements, expected {n}", items.len())))
                    }
                    Some(h @ Ty::Array { .. }) => h.clone(),
                    _ => Ty::Array { elem: Box::new(elem), len: Some(items.len() as u64) },
                }
            }
        };
        Ok(self.set(e, ty))
    }

    fn member(&mut self, e: &Expr, base: &Expr, member: &Ident) -> Result<Ty> {
        if let ExprKind::Ident(name) = &base.kind {
            match self.lookup(name) {
                Some(Binding::Msg) => {
                    self.set(base, Ty::Unit);
                    self.bind(base, Binding::Msg);
                    let (binding, ty) = match member.name.as_str() {
                        "sender" => (Binding::MsgSender, Ty::Address),
                        "value" => (Binding::MsgValue, Ty::UINT256),
                        other => {
                            return Err(Error::Unsupported { span: member.span, construct: format!("`msg.{other}`") })
                        }
                    };
                    self.bind(e, binding);
                    return Ok(ty);
                }
                Some(Binding::EnumType(en)) => {
                    let Some(ordinal) = en.variants.iter().position(|v| v == &member.name) else {
                        return Err(resolve_error(member.span, format!("enum `{}` has no member `{}`", en.name, member.name)));
                    };
                    self.set(base, Ty::Enum(en.clone()));
                    self.bind(base, Binding::EnumType(en.clone()));
                    self.bind(e, Binding::EnumVariant { ty: en.clone(), ordinal });
                    return Ok(Ty::Enum(en));
                }
                _ => {}
            }
        }
        let base_ty = self.expr(base, None)?;
        match (&base_ty, member.name.as_str()) {
            (Ty::Array { .. }, "length") => {
                self.bind(e, Binding::ArrayLength);
                Ok(Ty::UINT256)
            }
            (Ty::Struct(s), field) => match s.field(field) {
                Some(t) => {
                    self.bind(e, Binding::StructField(field.to_string()));
                    Ok(t.clone())
                }
                None => Err(resolve_error(member.span, format!("struct `{}` has no field `{field}`", s.name))),
            },
            (Ty::Address, "transfer") => {
                self.bind(e, Binding::Transfer);
                Ok(Ty::Unit)
            }
            (Ty::Address, "call") => {
                self.bind(e, Binding::Call);
                Ok(Ty::Unit)
            }
            (Ty::Address, "balance") => Err(Error::Unsupported { span: member.span, construct: "`balance`".into() }),
            (t, m) => Err(resolve_error(member.span, format!("type {t} has no member `{m}`"))),
        }
    }

    fn call(&mut self, e: &Expr, callee: &Expr, options: &[(Ident, Expr)], args: &[Expr]) -> Result<Ty> {
        let arity = |n: usize| -> Result<()> {
            if args.len() != n {
                return Err(type_error(e.span, format!("expected {n} argument(s), found {}", args.len())));
            }
            Ok(())
        };
        if let ExprKind::Ident(name) = &callee.kind {
            match self.lookup(name) {
                Some(Binding::Payable) => {
                    arity(1)?;
                    self.set(callee, Ty::Unit);
                    self.bind(callee, Binding::Payable);
                    self.expect_type(&args[0], &Ty::Address)?;
                    return Ok(Ty::Address);
                }
                Some(Binding::EnumType(en)) => {
                    arity(1)?;
                    self.set(callee, Ty::Enum(en.clone()));
                    self.bind(callee, Binding::EnumType(en.clone()));
                    let t = self.expr(&args[0], Some(&Ty::UINT256))?;
                    let ok = matches!(t, Ty::Uint(_)) || t == Ty::Enum(en.clone());
                    if !ok {
                        return Err(type_error(args[0].span, format!("cannot convert {t} to enum {}", en.name)));
                    }
                    return Ok(Ty::Enum(en));
                }
                _ => return Err(Error::Unsupported { span: e.span, construct: format!("call to `{name}`") }),
            }
        }
        let callee_ty = self.expr(callee, None)?;
        debug_assert_eq!(callee_ty, Ty::Unit);
        match self.table.binding(callee.id) {
            Some(Binding::Transfer) => {
                if !options.is_empty() {
                    return Err(type_error(e.span, "`.transfer` takes no call options"));
                }
                arity(1)?;
                let t = self.expr(&args[0], Some(&Ty::UINT256))?;
                if !matches!(t, Ty::Uint(_)) {
                    return Err(type_error(args[0].span, format!("transfer amount must be unsigned, found {t}")));
                }
                Ok(Ty::Unit)
            }
            Some(Binding::Call) => {
                for (_, value) in options {
                    let t = self.expr(value, Some(&Ty::UINT256))?;
                    if !matches!(t, Ty::Uint(_)) {
                        return Err(type_error(value.span, format!("call value must be unsigned, found {t}")));
                    }
                }
                arity(1)?;
                self.expect_type(&args[0], &Ty::Str)?;
                Ok(Ty::Tuple(vec![Ty::Bool, Ty::Bytes]))
            }
            _ => Err(Error::Unsupported { span: e.span, construct: "this call".into() }),
        }
    }

    fn binary(&mut self, e: &Expr, op: BinaryOp, l: &Expr, r: &Expr, hint: Option<&Ty>) -> Result<Ty> {
        if op.is_logical() {
            self.expect_type(l, &Ty::Bool)?;
            self.expect_type(r, &Ty::Bool)?;
            return Ok(Ty::Bool);
        }
        // Literals take the type of the other operand.
        let numeric_hint = if op.is_arithmetic() { hint.filter(|h| h.is_integer()) } else { None };
        let (lt, rt) = match (literal_value(l).is_some(), literal_value(r).is_some()) {
            (true, false) => {
                let rt = self.expr(r, numeric_hint)?;
                let lt = self.expr(l, Some(&rt))?;
                (lt, rt)
            }
            (false, true) => {
                let lt = self.expr(l, numeric_hint)?;
                let rt = self.expr(r, Some(&lt))?;
                (lt, rt)
            }
            (true, true) => {
                let lt = self.expr(l, numeric_hint)?;
                let rt = self.expr(r, Some(&lt))?;
                (lt, rt)
            }
            (false, false) => {
                let lt = self.expr(l, numeric_hint)?;
                let rt = self.expr(r, numeric_hint)?;
                (lt, rt)
            }
        };
        let common = match (&lt, &rt) {
            (Ty::Uint(a), Ty::Uint(b)) => Some(Ty::Uint(*a.max(b))),
            (Ty::Int(a), Ty::Int(b)) => Some(Ty::Int(*a.max(b))),
            (a, b) if a == b && !op.is_arithmetic() && a.is_scalar() => Some(a.clone()),
            _ => None,
        };
        let Some(common) = common else {
            return Err(type_error(e.span, format!("operator `{}` cannot combine {lt} and {rt}", op.as_str())));
        };
        if op.is_arithmetic() {
            Ok(common)
        } else {
            if matches!(op, BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge) && common == Ty::Bool {
                return Err(type_error(e.span, "bool values are not ordered"));
            }
            Ok(Ty::Bool)
        }
    }
}

fn contains_placeholder(s: &Stmt) -> bool {
    let mut found = false;
    s.walk(&mut |s| found |= matches!(s.kind, StmtKind::Placeholder));
    found
}

/// Value of an integer literal or a negated integer literal.
pub(crate) fn literal_value(e: &Expr) -> Option<BigInt> {
    match &e.kind {
        ExprKind::Number(n) => Some(BigInt::from(n.clone())),
        ExprKind::Unary(UnaryOp::Neg, inner) => match &inner.kind {
            ExprKind::Number(n) => Some(-BigInt::from(n.clone())),
            _ => None,
        },
        _ => None,
    }
}

/// Type of literal `v` in context `hint`: the hinted integer type when the value
/// fits, otherwise uint256 (int256 for negatives).
fn literal_type(v: &BigInt, hint: Option<&Ty>) -> Option<Ty> {
    let fits = |ty: &Ty| -> bool {
        match ty {
            Ty::Uint(n) => v.sign() != Sign::Minus && v.bits() <= *n as u64,
            Ty::Int(n) => {
                let half = BigInt::from(BigUint::from(1u8) << (*n as usize - 1));
                v >= &-half.clone() && v < &half
            }
            _ => false,
        }
    };
    if let Some(h) = hint.filter(|h| h.is_integer()) {
        if fits(h) {
            return Some(h.clone());
        }
    }
    let default = if v.sign() == Sign::Minus { Ty::Int(256) } else { Ty::UINT256 };
    fits(&default).then_some(default)
}
