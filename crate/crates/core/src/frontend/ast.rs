//! Syntax tree for MiniSol.
//!
//! Every expression carries an [`ExprId`] and every variable declaration a
//! [`DeclId`]; both are dense indexes assigned by the parser so that later
//! passes can attach facts in side tables.

use num_bigint::BigUint;

use super::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExprId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DeclId(pub u32);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceUnit {
    pub contracts: Vec<ContractDef>,
    /// Number of expression ids handed out; ids are `0..expr_count`.
    pub expr_count: u32,
    pub decl_count: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractDef {
    pub name: Ident,
    pub enums: Vec<EnumDef>,
    pub structs: Vec<StructDef>,
    pub state_vars: Vec<StateVarDecl>,
    pub functions: Vec<FunctionDef>,
    pub modifiers: Vec<ModifierDef>,
    pub span: Span,
}

impl ContractDef {
    pub fn constructor(&self) -> Option<&FunctionDef> {
        self.functions.iter().find(|f| f.kind == FunctionKind::Constructor)
    }

    pub fn modifier(&self, name: &str) -> Option<&ModifierDef> {
        self.modifiers.iter().find(|m| m.name.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumDef {
    pub name: Ident,
    pub variants: Vec<Ident>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructDef {
    pub name: Ident,
    pub fields: Vec<(TypeName, Ident)>,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Visibility {
    Public,
    Private,
    Internal,
    External,
}

impl Visibility {
    pub fn as_str(self) -> &'static str {
        match self {
            Visibility::Public => "public",
            Visibility::Private => "private",
            Visibility::Internal => "internal",
            Visibility::External => "external",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mutability {
    None,
    View,
    Pure,
    Payable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DataLocation {
    Memory,
    Storage,
    Calldata,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateVarDecl {
    pub decl: DeclId,
    pub ty: TypeName,
    pub visibility: Option<Visibility>,
    pub name: Ident,
    pub init: Option<Expr>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub decl: DeclId,
    pub ty: TypeName,
    pub location: Option<DataLocation>,
    pub name: Option<Ident>,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FunctionKind {
    Function,
    Constructor,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModifierInvocation {
    pub name: Ident,
    pub args: Vec<Expr>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionDef {
    pub kind: FunctionKind,
    /// `constructor` for constructors.
    pub name: Ident,
    pub params: Vec<Param>,
    pub returns: Vec<Param>,
    pub visibility: Option<Visibility>,
    pub mutability: Mutability,
    pub modifiers: Vec<ModifierInvocation>,
    pub body: Vec<Stmt>,
    pub span: Span,
}

impl FunctionDef {
    pub fn is_payable(&self) -> bool {
        self.mutability == Mutability::Payable
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModifierDef {
    pub name: Ident,
    pub params: Vec<Param>,
    pub body: Vec<Stmt>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ElementaryType {
    Uint(u16),
    Int(u16),
    Bool,
    Address { payable: bool },
    String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeName {
    Elementary(ElementaryType, Span),
    /// Enum or struct name.
    Named(Ident),
    Array(Box<TypeName>, Option<BigUint>, Span),
    Mapping(Box<TypeName>, Box<TypeName>, Span),
}

impl TypeName {
    pub fn span(&self) -> Span {
        match self {
            TypeName::Elementary(_, s) | TypeName::Array(_, _, s) | TypeName::Mapping(_, _, s) => *s,
            TypeName::Named(id) => id.span,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalDecl {
    pub decl: DeclId,
    pub ty: TypeName,
    pub location: Option<DataLocation>,
    pub name: Ident,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AssignOp {
    Assign,
    Add,
    Sub,
    Mul,
    Div,
    Mod,
}

impl AssignOp {
    pub fn as_str(self) -> &'static str {
        match self {
            AssignOp::Assign => "=",
            AssignOp::Add => "+=",
            AssignOp::Sub => "-=",
            AssignOp::Mul => "*=",
            AssignOp::Div => "/=",
            AssignOp::Mod => "%=",
        }
    }

    pub fn binary(self) -> Option<BinaryOp> {
        match self {
            AssignOp::Assign => None,
            AssignOp::Add => Some(BinaryOp::Add),
            AssignOp::Sub => Some(BinaryOp::Sub),
            AssignOp::Mul => Some(BinaryOp::Mul),
            AssignOp::Div => Some(BinaryOp::Div),
            AssignOp::Mod => Some(BinaryOp::Mod),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StmtKind {
    VarDecl { decl: LocalDecl, init: Option<Expr> },
    /// `(bool ok, ) = expr;` with holes as `None`.
    TupleDecl { decls: Vec<Option<LocalDecl>>, init: Expr },
    Assign { target: Expr, op: AssignOp, value: Expr },
    IncDec { target: Expr, increment: bool },
    Expr(Expr),
    Require { cond: Expr, message: Option<Expr> },
    Assert { cond: Expr },
    Revert { message: Option<Expr> },
    If { cond: Expr, then_branch: Box<Stmt>, else_branch: Option<Box<Stmt>> },
    For { init: Option<Box<Stmt>>, cond: Option<Expr>, step: Option<Box<Stmt>>, body: Box<Stmt> },
    While { cond: Expr, body: Box<Stmt> },
    Return(Option<Expr>),
    Block(Vec<Stmt>),
    /// The `_;` marker inside a modifier body.
    Placeholder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinaryOp {
    pub fn as_str(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Mod => "%",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::And => "&&",
            BinaryOp::Or => "||",
        }
    }

    /// Binding power; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Or => 1,
            BinaryOp::And => 2,
            BinaryOp::Eq | BinaryOp::Ne => 3,
            BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => 4,
            BinaryOp::Add | BinaryOp::Sub => 5,
            BinaryOp::Mul | BinaryOp::Div | BinaryOp::Mod => 6,
        }
    }

    pub fn is_arithmetic(self) -> bool {
        matches!(self, BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div | BinaryOp::Mod)
    }

    pub fn is_comparison(self) -> bool {
        matches!(self, BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge | BinaryOp::Eq | BinaryOp::Ne)
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinaryOp::And | BinaryOp::Or)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Not,
    Neg,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub id: ExprId,
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Number(BigUint),
    Bool(bool),
    Str(String),
    Ident(String),
    Member(Box<Expr>, Ident),
    Index(Box<Expr>, Box<Expr>),
    /// Calls: builtins, enum casts, `payable(..)`, `.transfer(..)` and
    /// `.call{value: ..}(..)`. Anything else is rejected by the parser.
    Call { callee: Box<Expr>, options: Vec<(Ident, Expr)>, args: Vec<Expr> },
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Unary(UnaryOp, Box<Expr>),
    ArrayLit(Vec<Expr>),
}

impl Expr {
    /// Visits `self` and every nested expression, parents first.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        f(self);
        match &self.kind {
            ExprKind::Number(_) | ExprKind::Bool(_) | ExprKind::Str(_) | ExprKind::Ident(_) => {}
            ExprKind::Member(base, _) => base.walk(f),
            ExprKind::Index(base, index) => {
                base.walk(f);
                index.walk(f);
            }
            ExprKind::Call { callee, options, args } => {
                callee.walk(f);
                for (_, e) in options {
                    e.walk(f);
                }
                for a in args {
                    a.walk(f);
                }
            }
            ExprKind::Binary(_, l, r) => {
                l.walk(f);
                r.walk(f);
            }
            ExprKind::Unary(_, e) => e.walk(f),
            ExprKind::ArrayLit(items) => {
                for e in items {
                    e.walk(f);
                }
            }
        }
    }
}

impl Stmt {
    /// Visits `self` and every nested statement, parents first.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Stmt)) {
        f(self);
        match &self.kind {
            StmtKind::If { then_branch, else_branch, .. } => {
                then_branch.walk(f);
                if let Some(e) = else_branch {
                    e.walk(f);
                }
            }
            StmtKind::For { init, step, body, .. } => {
                if let Some(i) = init {
                    i.walk(f);
                }
                if let Some(s) = step {
                    s.walk(f);
                }
                body.walk(f);
            }
            StmtKind::While { body, .. } => body.walk(f),
            StmtKind::Block(stmts) => {
                for s in stmts {
                    s.walk(f);
                }
            }
            _ => {}
        }
    }

    /// Expressions that appear directly in this statement (not in nested statements).
    pub fn direct_exprs(&self) -> Vec<&Expr> {
        match &self.kind {
            StmtKind::VarDecl { init, .. } => init.iter().collect(),
            StmtKind::TupleDecl { init, .. } => vec![init],
            StmtKind::Assign { target, value, .. } => vec![target, value],
            StmtKind::IncDec { target, .. } => vec![target],
            StmtKind::Expr(e) => vec![e],
            StmtKind::Require { cond, message } => std::iter::once(cond).chain(message.iter()).collect(),
            StmtKind::Assert { cond } => vec![cond],
            StmtKind::Revert { message } => message.iter().collect(),
            StmtKind::If { cond, .. } => vec![cond],
            StmtKind::For { cond, .. } => cond.iter().collect(),
            StmtKind::While { cond, .. } => vec![cond],
            StmtKind::Return(e) => e.iter().collect(),
            StmtKind::Block(_) | StmtKind::Placeholder => vec![],
        }
    }
}
