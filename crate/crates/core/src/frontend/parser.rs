//! Recursive-descent parser producing a [`SourceUnit`].
//!
//! The parser fails fast on the first error. Constructs outside MiniSol
//! (inheritance, libraries, events, constants, calls to user functions, ...)
//! are reported as [`Error::Unsupported`] rather than as syntax errors.

use std::collections::HashSet;

use num_bigint::BigUint;

use super::ast::*;
use super::token::{Token, TokenKind};
use super::Span;
use crate::error::{Error, Result};

pub fn parse(tokens: &[Token]) -> Result<SourceUnit> {
    let mut p = Parser { tokens, pos: 0, next_expr: 0, next_decl: 0 };
    let mut contracts = Vec::new();
    while let Some(tok) = p.peek() {
        if tok.is_keyword("contract") {
            contracts.push(p.contract()?);
        } else if ["import", "library", "interface"].iter().any(|k| tok.is_keyword(k))
            || (tok.kind == TokenKind::Identifier && tok.lexeme == "abstract")
        {
            return Err(unsupported(tok.span, format!("`{}` declarations", tok.lexeme)));
        } else {
            return Err(p.expected("`contract` or `pragma`"));
        }
    }
    Ok(SourceUnit { contracts, expr_count: p.next_expr, decl_count: p.next_decl })
}

fn unsupported(span: Span, construct: impl Into<String>) -> Error {
    Error::Unsupported { span, construct: construct.into() }
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    next_expr: u32,
    next_decl: u32,
}

impl<'t> Parser<'t> {
    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.pos)
    }

    fn peek_nth(&self, n: usize) -> Option<&'t Token> {
        self.tokens.get(self.pos + n)
    }

    fn bump(&mut self) -> Option<&'t Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn prev_span(&self) -> Span {
        self.pos.checked_sub(1).and_then(|i| self.tokens.get(i)).map(|t| t.span).unwrap_or_default()
    }

    fn eof_span(&self) -> Span {
        self.tokens.last().map(|t| Span::new(t.span.end, t.span.end, t.span.line, t.span.column)).unwrap_or_default()
    }

    fn expected(&self, what: &str) -> Error {
        match self.peek() {
            Some(t) => Error::Parse { span: t.span, expected: what.to_string(), found: format!("`{}`", t.lexeme) },
            None => Error::Parse { span: self.eof_span(), expected: what.to_string(), found: "end of input".into() },
        }
    }

    fn at_punct(&self, p: &str) -> bool {
        self.peek().is_some_and(|t| t.is_punct(p))
    }

    fn at_keyword(&self, k: &str) -> bool {
        self.peek().is_some_and(|t| t.is_keyword(k))
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.at_punct(p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_keyword(&mut self, k: &str) -> bool {
        if self.at_keyword(k) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> Result<Span> {
        if self.at_punct(p) {
            Ok(self.bump().unwrap().span)
        } else {
            Err(self.expected(&format!("`{p}`")))
        }
    }

    fn expect_keyword(&mut self, k: &str) -> Result<Span> {
        if self.at_keyword(k) {
            Ok(self.bump().unwrap().span)
        } else {
            Err(self.expected(&format!("`{k}`")))
        }
    }

    fn ident(&mut self) -> Result<Ident> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier => {
                self.pos += 1;
                Ok(Ident { name: t.lexeme.clone(), span: t.span })
            }
            _ => Err(self.expected("identifier")),
        }
    }

    fn expr_id(&mut self) -> ExprId {
        let id = ExprId(self.next_expr);
        self.next_expr += 1;
        id
    }

    fn decl_id(&mut self) -> DeclId {
        let id = DeclId(self.next_decl);
        self.next_decl += 1;
        id
    }

    fn mk(&mut self, kind: ExprKind, span: Span) -> Expr {
        Expr { id: self.expr_id(), kind, span }
    }

    // ---- declarations ----

    fn contract(&mut self) -> Result<ContractDef> {
        let start = self.expect_keyword("contract")?;
        let name = self.ident()?;
        if self.at_keyword("is") {
            return Err(unsupported(self.peek().unwrap().span, "contract inheritance"));
        }
        self.expect_punct("{")?;
        let mut c = ContractDef {
            name,
            enums: vec![],
            structs: vec![],
            state_vars: vec![],
            functions: vec![],
            modifiers: vec![],
            span: start,
        };
        while !self.at_punct("}") {
            let Some(tok) = self.peek() else {
                return Err(self.expected("`}`"));
            };
            if tok.is_keyword("enum") {
                c.enums.push(self.enum_def()?);
            } else if tok.is_keyword("struct") {
                c.structs.push(self.struct_def()?);
            } else if tok.is_keyword("function") || tok.is_keyword("constructor") {
                c.functions.push(self.function()?);
            } else if tok.is_keyword("modifier") {
                c.modifiers.push(self.modifier()?);
            } else if tok.is_keyword("event")
                || tok.is_keyword("using")
                || (tok.kind == TokenKind::Identifier && matches!(tok.lexeme.as_str(), "receive" | "fallback" | "error"))
            {
                return Err(unsupported(tok.span, format!("`{}` declarations", tok.lexeme)));
            } else {
                c.state_vars.push(self.state_var()?);
            }
        }
        let end = self.expect_punct("}")?;
        c.span = start.to(end);
        check_calls(&c)?;
        Ok(c)
    }

    fn enum_def(&mut self) -> Result<EnumDef> {
        let start = self.expect_keyword("enum")?;
        let name = self.ident()?;
        self.expect_punct("{")?;
        let mut variants = vec![self.ident()?];
        while self.eat_punct(",") {
            if self.at_punct("}") {
                break;
            }
            variants.push(self.ident()?);
        }
        let end = self.expect_punct("}")?;
        Ok(EnumDef { name, variants, span: start.to(end) })
    }

    fn struct_def(&mut self) -> Result<StructDef> {
        let start = self.expect_keyword("struct")?;
        let name = self.ident()?;
        self.expect_punct("{")?;
        let mut fields = Vec::new();
        while !self.at_punct("}") {
            let ty = self.type_name()?;
            let field = self.ident()?;
            self.expect_punct(";")?;
            fields.push((ty, field));
        }
        let end = self.expect_punct("}")?;
        Ok(StructDef { name, fields, span: start.to(end) })
    }

    fn state_var(&mut self) -> Result<StateVarDecl> {
        let ty = self.type_name()?;
        let start = ty.span();
        let mut visibility = None;
        while let Some(tok) = self.peek() {
            if let Some(v) = visibility_of(tok) {
                visibility = Some(v);
                self.pos += 1;
            } else if tok.is_keyword("constant") || tok.is_keyword("immutable") {
                return Err(unsupported(tok.span, format!("`{}` state variables", tok.lexeme)));
            } else {
                break;
            }
        }
        let name = self.ident()?;
        let init = if self.eat_punct("=") { Some(self.expr()?) } else { None };
        let end = self.expect_punct(";")?;
        Ok(StateVarDecl { decl: self.decl_id(), ty, visibility, name, init, span: start.to(end) })
    }

    fn params(&mut self) -> Result<Vec<Param>> {
        self.expect_punct("(")?;
        let mut params = Vec::new();
        if !self.at_punct(")") {
            loop {
                let ty = self.type_name()?;
                let location = self.data_location();
                let name = if self.peek().is_some_and(|t| t.kind == TokenKind::Identifier) {
                    Some(self.ident()?)
                } else {
                    None
                };
                let span = ty.span().to(self.prev_span());
                params.push(Param { decl: self.decl_id(), ty, location, name, span });
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        self.expect_punct(")")?;
        Ok(params)
    }

    fn data_location(&mut self) -> Option<DataLocation> {
        if self.eat_keyword("memory") {
            Some(DataLocation::Memory)
        } else if self.eat_keyword("storage") {
            Some(DataLocation::Storage)
        } else if self.eat_keyword("calldata") {
            Some(DataLocation::Calldata)
        } else {
            None
        }
    }

    fn function(&mut self) -> Result<FunctionDef> {
        let (kind, name) = if self.at_keyword("constructor") {
            let span = self.bump().unwrap().span;
            (FunctionKind::Constructor, Ident { name: "constructor".into(), span })
        } else {
            self.expect_keyword("function")?;
            (FunctionKind::Function, self.ident()?)
        };
        let start = name.span;
        let params = self.params()?;
        let mut visibility = None;
        let mut mutability = Mutability::None;
        let mut modifiers = Vec::new();
        let mut returns = Vec::new();
        loop {
            let Some(tok) = self.peek() else {
                return Err(self.expected("function body"));
            };
            if let Some(v) = visibility_of(tok) {
                visibility = Some(v);
                self.pos += 1;
            } else if tok.is_keyword("pure") {
                mutability = Mutability::Pure;
                self.pos += 1;
            } else if tok.is_keyword("view") {
                mutability = Mutability::View;
                self.pos += 1;
            } else if tok.is_keyword("payable") {
                mutability = Mutability::Payable;
                self.pos += 1;
            } else if tok.is_keyword("returns") {
                self.pos += 1;
                returns = self.params()?;
            } else if tok.kind == TokenKind::Identifier {
                if matches!(tok.lexeme.as_str(), "virtual" | "override") {
                    return Err(unsupported(tok.span, format!("`{}` (inheritance)", tok.lexeme)));
                }
                let name = self.ident()?;
                let mut args = Vec::new();
                if self.eat_punct("(") {
                    if !self.at_punct(")") {
                        args.push(self.expr()?);
                        while self.eat_punct(",") {
                            args.push(self.expr()?);
                        }
                    }
                    self.expect_punct(")")?;
                }
                let span = name.span.to(self.prev_span());
                modifiers.push(ModifierInvocation { name, args, span });
            } else {
                break;
            }
        }
        if self.at_punct(";") {
            return Err(unsupported(self.peek().unwrap().span, "functions without a body"));
        }
        let (body, end) = self.block()?;
        Ok(FunctionDef { kind, name, params, returns, visibility, mutability, modifiers, body, span: start.to(end) })
    }

    fn modifier(&mut self) -> Result<ModifierDef> {
        let start = self.expect_keyword("modifier")?;
        let name = self.ident()?;
        let params = if self.at_punct("(") { self.params()? } else { Vec::new() };
        let (body, end) = self.block()?;
        Ok(ModifierDef { name, params, body, span: start.to(end) })
    }

    // ---- types ----

    fn type_name(&mut self) -> Result<TypeName> {
        let Some(tok) = self.peek() else {
            return Err(self.expected("type name"));
        };
        let mut ty = if tok.is_keyword("mapping") {
            let start = self.bump().unwrap().span;
            self.expect_punct("(")?;
            let key = self.type_name()?;
            self.expect_punct("=>")?;
            let value = self.type_name()?;
            let end = self.expect_punct(")")?;
            TypeName::Mapping(Box::new(key), Box::new(value), start.to(end))
        } else if tok.kind == TokenKind::Keyword {
            let elem = match tok.lexeme.as_str() {
                "bool" => ElementaryType::Bool,
                "string" => ElementaryType::String,
                "address" => ElementaryType::Address { payable: false },
                "uint" => ElementaryType::Uint(256),
                "int" => ElementaryType::Int(256),
                lex => {
                    let (signed, digits) = match (lex.strip_prefix("uint"), lex.strip_prefix("int")) {
                        (Some(d), _) => (false, d),
                        (None, Some(d)) => (true, d),
                        _ => return Err(self.expected("type name")),
                    };
                    let bits: u16 = digits.parse().map_err(|_| self.expected("type name"))?;
                    if ![8, 16, 32, 64, 128, 256].contains(&bits) {
                        return Err(unsupported(tok.span, format!("integer width {bits}")));
                    }
                    if signed {
                        ElementaryType::Int(bits)
                    } else {
                        ElementaryType::Uint(bits)
                    }
                }
            };
            self.pos += 1;
            let mut span = tok.span;
            let elem = if let ElementaryType::Address { .. } = elem {
                if self.eat_keyword("payable") {
                    span = span.to(self.prev_span());
                    ElementaryType::Address { payable: true }
                } else {
                    elem
                }
            } else {
                elem
            };
            TypeName::Elementary(elem, span)
        } else if tok.kind == TokenKind::Identifier {
            TypeName::Named(self.ident()?)
        } else {
            return Err(self.expected("type name"));
        };
        while self.at_punct("[") {
            // `T[` followed by something other than `]` or a number is an index expression,
            // which callers never ask us to parse as a type.
            self.pos += 1;
            let len = match self.peek() {
                Some(t) if t.kind == TokenKind::IntegerLiteral => {
                    self.pos += 1;
                    Some(t.integer_value().ok_or_else(|| self.expected("array length"))?)
                }
                _ => None,
            };
            let end = self.expect_punct("]")?;
            let start = ty.span();
            ty = TypeName::Array(Box::new(ty), len, start.to(end));
        }
        Ok(ty)
    }

    /// Speculatively parses `Type [location] name` at the cursor.
    fn try_local_decl(&mut self) -> Option<LocalDecl> {
        let save = self.pos;
        let saved_decl = self.next_decl;
        let result = (|| {
            let ty = self.type_name().ok()?;
            let location = self.data_location();
            if !self.peek().is_some_and(|t| t.kind == TokenKind::Identifier) {
                return None;
            }
            let name = self.ident().ok()?;
            Some(LocalDecl { decl: self.decl_id(), ty, location, name })
        })();
        if result.is_none() {
            self.pos = save;
            self.next_decl = saved_decl;
        }
        result
    }

    // ---- statements ----

    fn block(&mut self) -> Result<(Vec<Stmt>, Span)> {
        let start = self.expect_punct("{")?;
        let mut stmts = Vec::new();
        while !self.at_punct("}") {
            if self.peek().is_none() {
                return Err(self.expected("`}`"));
            }
            stmts.push(self.stmt()?);
        }
        let end = self.expect_punct("}")?;
        Ok((stmts, start.to(end)))
    }

    fn stmt(&mut self) -> Result<Stmt> {
        let Some(tok) = self.peek() else {
            return Err(self.expected("statement"));
        };
        let start = tok.span;
        if tok.is_punct("{") {
            let (stmts, span) = self.block()?;
            return Ok(Stmt { kind: StmtKind::Block(stmts), span });
        }
        if tok.kind == TokenKind::Keyword {
            match tok.lexeme.as_str() {
                "if" => {
                    self.pos += 1;
                    self.expect_punct("(")?;
                    let cond = self.expr()?;
                    self.expect_punct(")")?;
                    let then_branch = Box::new(self.stmt()?);
                    let else_branch = if self.eat_keyword("else") { Some(Box::new(self.stmt()?)) } else { None };
                    let span = start.to(self.prev_span());
                    return Ok(Stmt { kind: StmtKind::If { cond, then_branch, else_branch }, span });
                }
                "for" => {
                    self.pos += 1;
                    self.expect_punct("(")?;
                    let init = if self.eat_punct(";") { None } else { Some(Box::new(self.simple_stmt(true)?)) };
                    let cond = if self.at_punct(";") { None } else { Some(self.expr()?) };
                    self.expect_punct(";")?;
                    let step = if self.at_punct(")") { None } else { Some(Box::new(self.simple_stmt(false)?)) };
                    self.expect_punct(")")?;
                    let body = Box::new(self.stmt()?);
                    let span = start.to(self.prev_span());
                    return Ok(Stmt { kind: StmtKind::For { init, cond, step, body }, span });
                }
                "while" => {
                    self.pos += 1;
                    self.expect_punct("(")?;
                    let cond = self.expr()?;
                    self.expect_punct(")")?;
                    let body = Box::new(self.stmt()?);
                    let span = start.to(self.prev_span());
                    return Ok(Stmt { kind: StmtKind::While { cond, body }, span });
                }
                "return" => {
                    self.pos += 1;
                    let value = if self.at_punct(";") { None } else { Some(self.expr()?) };
                    let end = self.expect_punct(";")?;
                    return Ok(Stmt { kind: StmtKind::Return(value), span: start.to(end) });
                }
                "require" => {
                    self.pos += 1;
                    self.expect_punct("(")?;
                    let cond = self.expr()?;
                    let message = if self.eat_punct(",") { Some(self.expr()?) } else { None };
                    self.expect_punct(")")?;
                    let end = self.expect_punct(";")?;
                    return Ok(Stmt { kind: StmtKind::Require { cond, message }, span: start.to(end) });
                }
                "assert" => {
                    self.pos += 1;
                    self.expect_punct("(")?;
                    let cond = self.expr()?;
                    self.expect_punct(")")?;
                    let end = self.expect_punct(";")?;
                    return Ok(Stmt { kind: StmtKind::Assert { cond }, span: start.to(end) });
                }
                "revert" => {
                    self.pos += 1;
                    let mut message = None;
                    if self.eat_punct("(") {
                        if !self.at_punct(")") {
                            message = Some(self.expr()?);
                        }
                        self.expect_punct(")")?;
                    }
                    let end = self.expect_punct(";")?;
                    return Ok(Stmt { kind: StmtKind::Revert { message }, span: start.to(end) });
                }
                "emit" => return Err(unsupported(tok.span, "events (`emit`)")),
                _ => {}
            }
        }
        if tok.kind == TokenKind::Identifier && matches!(tok.lexeme.as_str(), "break" | "continue" | "do") {
            return Err(unsupported(tok.span, format!("`{}`", tok.lexeme)));
        }
        if tok.kind == TokenKind::Identifier && tok.lexeme == "_" && self.peek_nth(1).is_some_and(|t| t.is_punct(";")) {
            self.pos += 2;
            return Ok(Stmt { kind: StmtKind::Placeholder, span: start.to(self.prev_span()) });
        }
        self.simple_stmt(true)
    }

    /// Declarations, assignments, increments and expression statements.
    /// `terminated` controls whether a trailing `;` is consumed (false for `for` steps).
    fn simple_stmt(&mut self, terminated: bool) -> Result<Stmt> {
        let start = self.peek().map(|t| t.span).unwrap_or_else(|| self.eof_span());
        let finish = |p: &mut Self, kind: StmtKind| -> Result<Stmt> {
            let end = if terminated { p.expect_punct(";")? } else { p.prev_span() };
            Ok(Stmt { kind, span: start.to(end) })
        };

        // tuple declaration: `(bool ok, ) = ...`
        if self.at_punct("(") {
            let save = self.pos;
            let saved_decl = self.next_decl;
            self.pos += 1;
            let mut decls = Vec::new();
            let mut is_tuple = true;
            loop {
                if self.at_punct(",") || self.at_punct(")") {
                    decls.push(None);
                } else if let Some(d) = self.try_local_decl() {
                    decls.push(Some(d));
                } else {
                    is_tuple = false;
                    break;
                }
                if self.eat_punct(",") {
                    continue;
                }
                if !self.eat_punct(")") {
                    is_tuple = false;
                }
                break;
            }
            if is_tuple && decls.len() > 1 && self.at_punct("=") {
                self.pos += 1;
                let init = self.expr()?;
                return finish(self, StmtKind::TupleDecl { decls, init });
            }
            self.pos = save;
            self.next_decl = saved_decl;
        }

        if let Some(decl) = self.try_local_decl() {
            let init = if self.eat_punct("=") { Some(self.expr()?) } else { None };
            return finish(self, StmtKind::VarDecl { decl, init });
        }

        if self.at_punct("++") || self.at_punct("--") {
            let increment = self.bump().unwrap().lexeme == "++";
            let target = self.unary()?;
            return finish(self, StmtKind::IncDec { target, increment });
        }

        let target = self.expr()?;
        if self.at_punct("++") || self.at_punct("--") {
            let increment = self.bump().unwrap().lexeme == "++";
            return finish(self, StmtKind::IncDec { target, increment });
        }
        let op = match self.peek().map(|t| t.lexeme.as_str()) {
            Some("=") => Some(AssignOp::Assign),
            Some("+=") => Some(AssignOp::Add),
            Some("-=") => Some(AssignOp::Sub),
            Some("*=") => Some(AssignOp::Mul),
            Some("/=") => Some(AssignOp::Div),
            Some("%=") => Some(AssignOp::Mod),
            _ => None,
        };
        if let Some(op) = op {
            self.pos += 1;
            let value = self.expr()?;
            return finish(self, StmtKind::Assign { target, op, value });
        }
        finish(self, StmtKind::Expr(target))
    }

    // ---- expressions ----

    fn expr(&mut self) -> Result<Expr> {
        self.binary(1)
    }

    fn binary_op(&self) -> Option<BinaryOp> {
        let t = self.peek()?;
        if t.kind != TokenKind::Punctuation {
            return None;
        }
        Some(match t.lexeme.as_str() {
            "||" => BinaryOp::Or,
            "&&" => BinaryOp::And,
            "==" => BinaryOp::Eq,
            "!=" => BinaryOp::Ne,
            "<" => BinaryOp::Lt,
            "<=" => BinaryOp::Le,
            ">" => BinaryOp::Gt,
            ">=" => BinaryOp::Ge,
            "+" => BinaryOp::Add,
            "-" => BinaryOp::Sub,
            "*" => BinaryOp::Mul,
            "/" => BinaryOp::Div,
            "%" => BinaryOp::Mod,
            _ => return None,
        })
    }

    fn binary(&mut self, min_prec: u8) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binary_op() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.pos += 1;
            let rhs = self.binary(prec + 1)?;
            let span = lhs.span.to(rhs.span);
            lhs = self.mk(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        let op = if self.at_punct("!") {
            Some(UnaryOp::Not)
        } else if self.at_punct("-") {
            Some(UnaryOp::Neg)
        } else {
            None
        };
        if let Some(op) = op {
            let start = self.bump().unwrap().span;
            let operand = self.unary()?;
            let span = start.to(operand.span);
            return Ok(self.mk(ExprKind::Unary(op, Box::new(operand)), span));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Expr> {
        let mut e = self.primary()?;
        loop {
            if self.eat_punct(".") {
                let member = self.ident()?;
                let span = e.span.to(member.span);
                e = self.mk(ExprKind::Member(Box::new(e), member), span);
            } else if self.eat_punct("[") {
                let index = self.expr()?;
                let end = self.expect_punct("]")?;
                let span = e.span.to(end);
                e = self.mk(ExprKind::Index(Box::new(e), Box::new(index)), span);
            } else if self.at_punct("{") && is_call_member(&e) {
                self.pos += 1;
                let mut options = Vec::new();
                loop {
                    let name = self.ident()?;
                    if name.name != "value" {
                        return Err(unsupported(name.span, format!("call option `{}`", name.name)));
                    }
                    self.expect_punct(":")?;
                    options.push((name, self.expr()?));
                    if !self.eat_punct(",") {
                        break;
                    }
                }
                self.expect_punct("}")?;
                if !self.at_punct("(") {
                    return Err(self.expected("`(`"));
                }
                e = self.call(e, options)?;
            } else if self.at_punct("(") {
                e = self.call(e, Vec::new())?;
            } else {
                return Ok(e);
            }
        }
    }

    fn call(&mut self, callee: Expr, options: Vec<(Ident, Expr)>) -> Result<Expr> {
        match &callee.kind {
            ExprKind::Ident(_) => {}
            ExprKind::Member(_, m) if m.name == "transfer" || m.name == "call" => {}
            _ => return Err(unsupported(callee.span, "calls other than casts, `payable`, `.transfer` and `.call`")),
        }
        self.expect_punct("(")?;
        let mut args = Vec::new();
        if !self.at_punct(")") {
            args.push(self.expr()?);
            while self.eat_punct(",") {
                args.push(self.expr()?);
            }
        }
        let end = self.expect_punct(")")?;
        let span = callee.span.to(end);
        Ok(self.mk(ExprKind::Call { callee: Box::new(callee), options, args }, span))
    }

    fn primary(&mut self) -> Result<Expr> {
        let Some(tok) = self.peek() else {
            return Err(self.expected("expression"));
        };
        match tok.kind {
            TokenKind::IntegerLiteral => {
                self.pos += 1;
                let value = tok.integer_value().unwrap_or_else(|| BigUint::from(0u8));
                Ok(self.mk(ExprKind::Number(value), tok.span))
            }
            TokenKind::StringLiteral => {
                self.pos += 1;
                Ok(self.mk(ExprKind::Str(tok.string_value().unwrap_or_default().to_string()), tok.span))
            }
            TokenKind::Identifier => {
                self.pos += 1;
                Ok(self.mk(ExprKind::Ident(tok.lexeme.clone()), tok.span))
            }
            TokenKind::Keyword => match tok.lexeme.as_str() {
                "true" | "false" => {
                    self.pos += 1;
                    Ok(self.mk(ExprKind::Bool(tok.lexeme == "true"), tok.span))
                }
                "payable" if self.peek_nth(1).is_some_and(|t| t.is_punct("(")) => {
                    self.pos += 1;
                    Ok(self.mk(ExprKind::Ident("payable".into()), tok.span))
                }
                _ if self.peek_nth(1).is_some_and(|t| t.is_punct("(")) => {
                    Err(unsupported(tok.span, format!("`{}(...)` conversions", tok.lexeme)))
                }
                _ => Err(self.expected("expression")),
            },
            TokenKind::Punctuation => {
                if tok.is_punct("(") {
                    self.pos += 1;
                    let e = self.expr()?;
                    if self.at_punct(",") {
                        return Err(unsupported(self.peek().unwrap().span, "tuple expressions"));
                    }
                    self.expect_punct(")")?;
                    Ok(e)
                } else if tok.is_punct("[") {
                    self.pos += 1;
                    let mut items = Vec::new();
                    if !self.at_punct("]") {
                        items.push(self.expr()?);
                        while self.eat_punct(",") {
                            items.push(self.expr()?);
                        }
                    }
                    let end = self.expect_punct("]")?;
                    Ok(self.mk(ExprKind::ArrayLit(items), tok.span.to(end)))
                } else {
                    Err(self.expected("expression"))
                }
            }
        }
    }
}

fn visibility_of(tok: &Token) -> Option<Visibility> {
    if tok.kind != TokenKind::Keyword {
        return None;
    }
    Some(match tok.lexeme.as_str() {
        "public" => Visibility::Public,
        "private" => Visibility::Private,
        "internal" => Visibility::Internal,
        "external" => Visibility::External,
        _ => return None,
    })
}

fn is_call_member(e: &Expr) -> bool {
    matches!(&e.kind, ExprKind::Member(_, m) if m.name == "call")
}

/// Rejects calls to anything other than builtins and enum conversions.
fn check_calls(c: &ContractDef) -> Result<()> {
    let enums: HashSet<&str> = c.enums.iter().map(|e| e.name.name.as_str()).collect();
    let mut bad = None;
    let mut check = |e: &Expr| {
        if bad.is_some() {
            return;
        }
        if let ExprKind::Call { callee, .. } = &e.kind {
            if let ExprKind::Ident(name) = &callee.kind {
                if name != "payable" && !enums.contains(name.as_str()) {
                    bad = Some(unsupported(e.span, format!("call to user-defined function `{name}`")));
                }
            }
        }
    };
    let visit_body = |stmts: &[Stmt], check: &mut dyn FnMut(&Expr)| {
        for s in stmts {
            s.walk(&mut |s| {
                for e in s.direct_exprs() {
                    e.walk(&mut |e| check(e));
                }
            });
        }
    };
    for f in &c.functions {
        for m in &f.modifiers {
            for a in &m.args {
                a.walk(&mut check);
            }
        }
        visit_body(&f.body, &mut check);
    }
    for m in &c.modifiers {
        visit_body(&m.body, &mut check);
    }
    for v in &c.state_vars {
        if let Some(init) = &v.init {
            init.walk(&mut check);
        }
    }
    match bad {
        Some(err) => Err(err),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::tokenize;

    fn parse_src(src: &str) -> Result<SourceUnit> {
        parse(&tokenize(src)?)
    }

    #[test]
    fn empty_contract() {
        let unit = parse_src("contract C { }").unwrap();
        assert_eq!(unit.contracts.len(), 1);
        let c = &unit.contracts[0];
        assert_eq!(c.name.name, "C");
        assert!(c.functions.is_empty() && c.state_vars.is_empty());
    }

    #[test]
    fn getter_with_index_expression() {
        let src = "contract A {
            uint256[] private _array= [10, 20, 30, 40, 50];
            function getElement(uint256 index) external view returns (uint256)
            {
                return _array[index];
            }
        }";
        let unit = parse_src(src).unwrap();
        let c = &unit.contracts[0];
        assert_eq!(c.functions.len(), 1);
        let f = &c.functions[0];
        assert_eq!(f.mutability, Mutability::View);
        assert_eq!(f.visibility, Some(Visibility::External));
        let StmtKind::Return(Some(e)) = &f.body[0].kind else { panic!("expected return") };
        assert!(matches!(&e.kind, ExprKind::Index(b, i)
            if matches!(&b.kind, ExprKind::Ident(n) if n == "_array")
            && matches!(&i.kind, ExprKind::Ident(n) if n == "index")));
    }

    #[test]
    fn enum_contract() {
        let src = "contract UnmatchedType {
            enum Options { Candidate1, Candidate2, Candidate3 }
            mapping(address => Options) private _votes;
            mapping(Options => uint) private _votesCount;
            function vote(uint option) external {
                _votes[msg.sender] = Options(option);
                _votesCount[Options(option)]++;
            }
            function getStatisticsForOption(uint option) external view returns(uint) {
                return _votesCount[Options(option)];
            }
        }";
        let unit = parse_src(src).unwrap();
        let c = &unit.contracts[0];
        assert_eq!(c.enums[0].variants.len(), 3);
        assert_eq!(c.state_vars.len(), 2);
        assert!(c.state_vars.iter().all(|v| matches!(v.ty, TypeName::Mapping(..))));
        assert_eq!(c.functions.len(), 2);
        assert!(matches!(c.functions[0].body[1].kind, StmtKind::IncDec { increment: true, .. }));
    }

    #[test]
    fn call_with_value_and_tuple_decl() {
        let src = "contract S { function split(address[] calldata recipients) external payable {
            uint amount = msg.value / recipients.length;
            for(uint index = 0; index < recipients.length; index++) {
                (bool success,) = payable(recipients[index]).call{value:amount}(\"\");
                require(success, \"Could not send ether to recipient\");
            }
        } }";
        let unit = parse_src(src).unwrap();
        let f = &unit.contracts[0].functions[0];
        assert!(f.is_payable());
        let StmtKind::For { body, .. } = &f.body[1].kind else { panic!() };
        let StmtKind::Block(inner) = &body.kind else { panic!() };
        let StmtKind::TupleDecl { decls, init } = &inner[0].kind else { panic!("{:?}", inner[0].kind) };
        assert_eq!(decls.len(), 2);
        assert!(decls[0].is_some() && decls[1].is_none());
        assert!(matches!(&init.kind, ExprKind::Call { options, .. } if options.len() == 1));
    }

    #[test]
    fn modifier_with_placeholder() {
        let src = "contract O { address private owner;
            modifier onlyOwner() { require(msg.sender == owner, \"no\"); _; } }";
        let unit = parse_src(src).unwrap();
        let m = &unit.contracts[0].modifiers[0];
        assert!(matches!(m.body[1].kind, StmtKind::Placeholder));
    }

    #[test]
    fn precedence() {
        let unit = parse_src("contract C { function f(uint a, uint b) public { uint c = a + b * 2 < 3 && true; } }").unwrap();
        let StmtKind::VarDecl { init: Some(e), .. } = &unit.contracts[0].functions[0].body[0].kind else { panic!() };
        let ExprKind::Binary(BinaryOp::And, lhs, _) = &e.kind else { panic!() };
        let ExprKind::Binary(BinaryOp::Lt, sum, _) = &lhs.kind else { panic!() };
        assert!(matches!(&sum.kind, ExprKind::Binary(BinaryOp::Add, _, r) if matches!(r.kind, ExprKind::Binary(BinaryOp::Mul, ..))));
    }

    #[test]
    fn pragma_is_skipped() {
        let unit = parse_src("pragma solidity ^0.8.20; contract C {}").unwrap();
        assert_eq!(unit.contracts.len(), 1);
    }

    #[test]
    fn unsupported_constructs() {
        for src in [
            "contract C is B {}",
            "library L {}",
            "contract C { event E(); }",
            "contract C { uint constant X = 1; }",
            "contract C { uint immutable X; }",
            "contract C { function g() internal {} function f() public { g(); } }",
            "contract C { function f() public { uint x = uint(3); } }",
        ] {
            assert!(matches!(parse_src(src), Err(Error::Unsupported { .. })), "{src}");
        }
    }

    #[test]
    fn parse_errors_fail_fast() {
        let err = parse_src("contract C { function f() public { x = ; } }").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
        let err = parse_src("contract C { function f() public {").unwrap_err();
        assert!(matches!(err, Error::Parse { found, .. } if found == "end of input"));
    }
}
