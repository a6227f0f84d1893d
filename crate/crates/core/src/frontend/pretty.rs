//! Renders the syntax tree back to MiniSol source.

use std::fmt::Write;

use super::ast::*;

pub fn print_unit(unit: &SourceUnit) -> String {
    let mut p = Printer::default();
    for c in &unit.contracts {
        p.contract(c);
    }
    p.out
}

pub fn print_expr(e: &Expr) -> String {
    let mut s = String::new();
    expr(&mut s, e, 0);
    s
}

pub fn print_type(t: &TypeName) -> String {
    match t {
        TypeName::Elementary(e, _) => match e {
            ElementaryType::Uint(n) => format!("uint{n}"),
            ElementaryType::Int(n) => format!("int{n}"),
            ElementaryType::Bool => "bool".into(),
            ElementaryType::Address { payable: false } => "address".into(),
            ElementaryType::Address { payable: true } => "address payable".into(),
            ElementaryType::String => "string".into(),
        },
        TypeName::Named(id) => id.name.clone(),
        TypeName::Array(elem, Some(n), _) => format!("{}[{n}]", print_type(elem)),
        TypeName::Array(elem, None, _) => format!("{}[]", print_type(elem)),
        TypeName::Mapping(k, v, _) => format!("mapping({} => {})", print_type(k), print_type(v)),
    }
}

fn location(l: Option<DataLocation>) -> &'static str {
    match l {
        None => "",
        Some(DataLocation::Memory) => " memory",
        Some(DataLocation::Storage) => " storage",
        Some(DataLocation::Calldata) => " calldata",
    }
}

fn expr(out: &mut String, e: &Expr, min_prec: u8) {
    match &e.kind {
        ExprKind::Number(n) => write!(out, "{n}").unwrap(),
        ExprKind::Bool(b) => write!(out, "{b}").unwrap(),
        ExprKind::Str(s) => write!(out, "\"{s}\"").unwrap(),
        ExprKind::Ident(n) => out.push_str(n),
        ExprKind::Member(base, m) => {
            expr(out, base, u8::MAX);
            write!(out, ".{}", m.name).unwrap();
        }
        ExprKind::Index(base, index) => {
            expr(out, base, u8::MAX);
            out.push('[');
            expr(out, index, 0);
            out.push(']');
        }
        ExprKind::Call { callee, options, args } => {
            expr(out, callee, u8::MAX);
            if !options.is_empty() {
                out.push('{');
                for (i, (name, value)) in options.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write!(out, "{}: ", name.name).unwrap();
                    expr(out, value, 0);
                }
                out.push('}');
            }
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                expr(out, a, 0);
            }
            out.push(')');
        }
        ExprKind::Binary(op, l, r) => {
            let prec = op.precedence();
            let paren = prec < min_prec;
            if paren {
                out.push('(');
            }
            expr(out, l, prec);
            write!(out, " {} ", op.as_str()).unwrap();
            // left-associative: the right operand needs strictly higher precedence
            expr(out, r, prec + 1);
            if paren {
                out.push(')');
            }
        }
        ExprKind::Unary(op, inner) => {
            out.push(match op {
                UnaryOp::Not => '!',
                UnaryOp::Neg => '-',
            });
            expr(out, inner, u8::MAX);
        }
        ExprKind::ArrayLit(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                expr(out, item, 0);
            }
            out.push(']');
        }
    }
}

#[derive(Default)]
struct Printer {
    out: String,
    indent: usize,
}

impl Printer {
    fn line(&mut self, text: &str) {
        for _ in 0..self.indent {
            self.out.push_str("    ");
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn contract(&mut self, c: &ContractDef) {
        self.line(&format!("contract {} {{", c.name.name));
        self.indent += 1;
        for e in &c.enums {
            let variants: Vec<_> = e.variants.iter().map(|v| v.name.as_str()).collect();
            self.line(&format!("enum {} {{ {} }}", e.name.name, variants.join(", ")));
        }
        for s in &c.structs {
            self.line(&format!("struct {} {{", s.name.name));
            self.indent += 1;
            for (ty, name) in &s.fields {
                self.line(&format!("{} {};", print_type(ty), name.name));
            }
            self.indent -= 1;
            self.line("}");
        }
        for v in &c.state_vars {
            let mut text = print_type(&v.ty);
            if let Some(vis) = v.visibility {
                write!(text, " {}", vis.as_str()).unwrap();
            }
            write!(text, " {}", v.name.name).unwrap();
            if let Some(init) = &v.init {
                write!(text, " = {}", print_expr(init)).unwrap();
            }
            text.push(';');
            self.line(&text);
        }
        for m in &c.modifiers {
            self.line(&format!("modifier {}({}) {{", m.name.name, params(&m.params)));
            self.body(&m.body);
            self.line("}");
        }
        for f in &c.functions {
            let mut head = match f.kind {
                FunctionKind::Constructor => format!("constructor({})", params(&f.params)),
                FunctionKind::Function => format!("function {}({})", f.name.name, params(&f.params)),
            };
            if let Some(v) = f.visibility {
                write!(head, " {}", v.as_str()).unwrap();
            }
            match f.mutability {
                Mutability::None => {}
                Mutability::View => head.push_str(" view"),
                Mutability::Pure => head.push_str(" pure"),
                Mutability::Payable => head.push_str(" payable"),
            }
            for m in &f.modifiers {
                write!(head, " {}", m.name.name).unwrap();
                if !m.args.is_empty() {
                    let args: Vec<_> = m.args.iter().map(print_expr).collect();
                    write!(head, "({})", args.join(", ")).unwrap();
                }
            }
            if !f.returns.is_empty() {
                write!(head, " returns ({})", params(&f.returns)).unwrap();
            }
            head.push_str(" {");
            self.line(&head);
            self.body(&f.body);
            self.line("}");
        }
        self.indent -= 1;
        self.line("}");
    }

    fn body(&mut self, stmts: &[Stmt]) {
        self.indent += 1;
        for s in stmts {
            self.stmt(s);
        }
        self.indent -= 1;
    }

    fn stmt(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::Block(stmts) => {
                self.line("{");
                self.body(stmts);
                self.line("}");
            }
            StmtKind::If { cond, then_branch, else_branch } => {
                self.line(&format!("if ({})", print_expr(cond)));
                self.nested(then_branch);
                if let Some(e) = else_branch {
                    self.line("else");
                    self.nested(e);
                }
            }
            StmtKind::For { init, cond, step, body } => {
                let init = init.as_ref().map(|s| simple(s)).unwrap_or_default();
                let cond = cond.as_ref().map(print_expr).unwrap_or_default();
                let step = step.as_ref().map(|s| simple(s)).unwrap_or_default();
                self.line(&format!("for ({init}; {cond}; {step})"));
                self.nested(body);
            }
            StmtKind::While { cond, body } => {
                self.line(&format!("while ({})", print_expr(cond)));
                self.nested(body);
            }
            _ => {
                let text = format!("{};", simple(s));
                self.line(&text);
            }
        }
    }

    fn nested(&mut self, s: &Stmt) {
        if matches!(s.kind, StmtKind::Block(_)) {
            self.stmt(s);
        } else {
            self.indent += 1;
            self.stmt(s);
            self.indent -= 1;
        }
    }
}

fn params(ps: &[Param]) -> String {
    ps.iter()
        .map(|p| {
            let mut s = print_type(&p.ty);
            s.push_str(location(p.location));
            if let Some(n) = &p.name {
                write!(s, " {}", n.name).unwrap();
            }
            s
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn local(d: &LocalDecl) -> String {
    format!("{}{} {}", print_type(&d.ty), location(d.location), d.name.name)
}

/// A statement without its terminating `;` (also used for `for` headers).
fn simple(s: &Stmt) -> String {
    match &s.kind {
        StmtKind::VarDecl { decl, init: None } => local(decl),
        StmtKind::VarDecl { decl, init: Some(e) } => format!("{} = {}", local(decl), print_expr(e)),
        StmtKind::TupleDecl { decls, init } => {
            let parts: Vec<_> = decls.iter().map(|d| d.as_ref().map(local).unwrap_or_default()).collect();
            format!("({}) = {}", parts.join(", "), print_expr(init))
        }
        StmtKind::Assign { target, op, value } => format!("{} {} {}", print_expr(target), op.as_str(), print_expr(value)),
        StmtKind::IncDec { target, increment } => {
            format!("{}{}", print_expr(target), if *increment { "++" } else { "--" })
        }
        StmtKind::Expr(e) => print_expr(e),
        StmtKind::Require { cond, message: None } => format!("require({})", print_expr(cond)),
        StmtKind::Require { cond, message: Some(m) } => format!("require({}, {})", print_expr(cond), print_expr(m)),
        StmtKind::Assert { cond } => format!("assert({})", print_expr(cond)),
        StmtKind::Revert { message: None } => "revert()".into(),
        StmtKind::Revert { message: Some(m) } => format!("revert({})", print_expr(m)),
        StmtKind::Return(None) => "return".into(),
        StmtKind::Return(Some(e)) => format!("return {}", print_expr(e)),
        StmtKind::Placeholder => "_".into(),
        StmtKind::Block(_) | StmtKind::If { .. } | StmtKind::For { .. } | StmtKind::While { .. } => {
            unreachable!("compound statements are printed by Printer::stmt")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{parse, tokenize};

    #[test]
    fn parenthesizes_by_precedence() {
        let unit = parse(&tokenize("contract C { function f(uint a, uint b) public { uint c = (a + b) * (a - (b - 1)); } }").unwrap()).unwrap();
        let StmtKind::VarDecl { init: Some(e), .. } = &unit.contracts[0].functions[0].body[0].kind else { panic!() };
        assert_eq!(print_expr(e), "(a + b) * (a - (b - 1))");
    }
}
