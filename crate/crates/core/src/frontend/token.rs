//! Hand-written lexer for MiniSol.

use std::fmt;

use num_bigint::BigUint;
use num_traits::Num;

use crate::error::{Error, Result};

/// Byte range in the source plus the 1-based line/column of its start.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub column: u32,
}

impl Span {
    pub fn new(start: usize, end: usize, line: u32, column: u32) -> Self {
        Span { start, end, line, column }
    }

    /// Smallest span covering both `self` and `other`.
    pub fn to(self, other: Span) -> Span {
        let (first, last) = if self.start <= other.start { (self, other) } else { (other, self) };
        Span { start: first.start, end: first.end.max(last.end), line: first.line, column: first.column }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Keyword,
    Identifier,
    IntegerLiteral,
    StringLiteral,
    Punctuation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// Source text. String literals keep their quotes.
    pub lexeme: String,
    pub span: Span,
}

impl Token {
    pub fn is_punct(&self, p: &str) -> bool {
        self.kind == TokenKind::Punctuation && self.lexeme == p
    }

    pub fn is_keyword(&self, k: &str) -> bool {
        self.kind == TokenKind::Keyword && self.lexeme == k
    }

    /// Value of an integer literal token.
    pub fn integer_value(&self) -> Option<BigUint> {
        if self.kind != TokenKind::IntegerLiteral {
            return None;
        }
        parse_integer(&self.lexeme)
    }

    /// Contents of a string literal token, without quotes.
    pub fn string_value(&self) -> Option<&str> {
        if self.kind != TokenKind::StringLiteral {
            return None;
        }
        Some(&self.lexeme[1..self.lexeme.len() - 1])
    }
}

pub(crate) fn parse_integer(lexeme: &str) -> Option<BigUint> {
    let cleaned: String = lexeme.chars().filter(|c| *c != '_').collect();
    if let Some(hex) = cleaned.strip_prefix("0x").or_else(|| cleaned.strip_prefix("0X")) {
        BigUint::from_str_radix(hex, 16).ok()
    } else {
        BigUint::from_str_radix(&cleaned, 10).ok()
    }
}

pub const KEYWORDS: &[&str] = &[
    "contract", "enum", "struct", "mapping", "function", "modifier", "constructor", "returns",
    "return", "if", "else", "for", "while", "require", "assert", "revert", "true", "false",
    "public", "private", "internal", "external", "pure", "view", "payable", "memory", "storage",
    "calldata", "bool", "address", "uint", "int", "pragma", "import", "library", "interface",
    "is", "event", "emit", "using", "constant", "immutable", "string",
];

fn is_keyword(word: &str) -> bool {
    if KEYWORDS.contains(&word) {
        return true;
    }
    // sized integer types: uint8 .. uint256, int8 .. int256
    let digits = word.strip_prefix("uint").or_else(|| word.strip_prefix("int"));
    matches!(digits, Some(d) if !d.is_empty() && d.chars().all(|c| c.is_ascii_digit()))
}

// Longest first so that maximal munch works with a linear scan.
const PUNCTUATION: &[&str] = &[
    "=>", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=", "*=", "/=", "%=", "(", ")",
    "{", "}", "[", "]", ";", ",", ".", "=", "<", ">", "+", "-", "*", "/", "%", "!", ":",
];

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    column: u32,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(offset)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn here(&self) -> Span {
        Span::new(self.pos, self.pos, self.line, self.column)
    }

    fn error(&self, start: Span, message: impl Into<String>) -> Error {
        let mut span = start;
        span.end = self.pos.max(start.start + 1).min(self.src.len().max(start.start));
        Error::Lex { span, message: message.into() }
    }

    fn skip_trivia(&mut self) -> Result<()> {
        loop {
            match (self.peek(), self.peek_at(1)) {
                (Some(c), _) if c.is_whitespace() => {
                    self.bump();
                }
                (Some('/'), Some('/')) => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                (Some('/'), Some('*')) => {
                    let start = self.here();
                    self.bump();
                    self.bump();
                    loop {
                        match (self.peek(), self.peek_at(1)) {
                            (Some('*'), Some('/')) => {
                                self.bump();
                                self.bump();
                                break;
                            }
                            (Some(_), _) => {
                                self.bump();
                            }
                            (None, _) => return Err(self.error(start, "unterminated block comment")),
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn skip_pragma(&mut self) -> Result<()> {
        let start = self.here();
        loop {
            match self.bump() {
                Some(';') => return Ok(()),
                Some(_) => {}
                None => return Err(self.error(start, "unterminated pragma")),
            }
        }
    }

    fn token(&mut self) -> Result<Option<Token>> {
        self.skip_trivia()?;
        while self.src[self.pos..].starts_with("pragma")
            && !matches!(self.src[self.pos + 6..].chars().next(), Some(c) if c.is_ascii_alphanumeric() || c == '_' || c == '$')
        {
            // pragmas are trivia
            self.skip_pragma()?;
            self.skip_trivia()?;
        }
        let start = self.here();
        let Some(c) = self.peek() else {
            return Ok(None);
        };
        let kind = if c.is_ascii_alphabetic() || c == '_' || c == '$' {
            while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_' || c == '$') {
                self.bump();
            }
            if is_keyword(&self.src[start.start..self.pos]) {
                TokenKind::Keyword
            } else {
                TokenKind::Identifier
            }
        } else if c.is_ascii_digit() {
            if c == '0' && matches!(self.peek_at(1), Some('x' | 'X')) {
                self.bump();
                self.bump();
                while matches!(self.peek(), Some(c) if c.is_ascii_hexdigit() || c == '_') {
                    self.bump();
                }
            } else {
                while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '_') {
                    self.bump();
                }
            }
            if matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '.') {
                return Err(self.error(start, "malformed number literal"));
            }
            if parse_integer(&self.src[start.start..self.pos]).is_none() {
                return Err(self.error(start, "malformed number literal"));
            }
            TokenKind::IntegerLiteral
        } else if c == '"' || c == '\'' {
            self.bump();
            loop {
                match self.bump() {
                    Some('\\') => {
                        if self.bump().is_none() {
                            return Err(self.error(start, "unterminated string literal"));
                        }
                    }
                    Some(q) if q == c => break,
                    Some('\n') | None => return Err(self.error(start, "unterminated string literal")),
                    Some(_) => {}
                }
            }
            TokenKind::StringLiteral
        } else {
            let rest = &self.src[self.pos..];
            let Some(p) = PUNCTUATION.iter().find(|p| rest.starts_with(**p)) else {
                self.bump();
                return Err(self.error(start, format!("unexpected character `{c}`")));
            };
            for _ in 0..p.len() {
                self.bump();
            }
            TokenKind::Punctuation
        };
        let mut span = start;
        span.end = self.pos;
        Ok(Some(Token { kind, lexeme: self.src[start.start..self.pos].to_string(), span }))
    }
}

/// Splits `source` into tokens, dropping whitespace and comments.
pub fn tokenize(source: &str) -> Result<Vec<Token>> {
    let mut lexer = Lexer { src: source, pos: 0, line: 1, column: 1 };
    let mut tokens = Vec::new();
    while let Some(tok) = lexer.token()? {
        tokens.push(tok);
    }
    Ok(tokens)
}
