//! Lexing, parsing and name resolution for MiniSol, the Solidity subset the
//! analyzer understands.

pub mod ast;
mod parser;
pub mod pretty;
mod resolve;
mod token;
mod types;

pub use parser::parse;
pub use resolve::{resolve, Binding, ContractSymbols, DeclInfo, DeclKind, SymbolTable};
pub use token::{tokenize, Span, Token, TokenKind};
pub use types::{EnumType, StructType, Ty};

pub(crate) use resolve::literal_value;

use crate::error::Result;

/// Tokenizes, parses and resolves `source` in one go.
pub fn load(source: &str) -> Result<(ast::SourceUnit, SymbolTable)> {
    let tokens = tokenize(source)?;
    let unit = parse(&tokens)?;
    let symbols = resolve(&unit)?;
    Ok((unit, symbols))
}
