//! Hand-rolled lexer for `.sx` source text.

use std::fmt;
use thiserror::Error;

/// A source position (1-based line and column).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Int(i64),
    Str(String),
    KwSym,
    KwInt,
    KwIf,
    KwElse,
    KwWhile,
    KwAssert,
    KwError,
    KwPrint,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Semi,
    Assign,
    Plus,
    Minus,
    Star,
    Slash,
    Bang,
    Lt,
    Le,
    Gt,
    Ge,
    EqEq,
    Ne,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Int(n) => format!("integer `{n}`"),
            TokenKind::Str(_) => "string literal".to_string(),
            TokenKind::KwSym => "`sym`".to_string(),
            TokenKind::KwInt => "`int`".to_string(),
            TokenKind::KwIf => "`if`".to_string(),
            TokenKind::KwElse => "`else`".to_string(),
            TokenKind::KwWhile => "`while`".to_string(),
            TokenKind::KwAssert => "`assert`".to_string(),
            TokenKind::KwError => "`error`".to_string(),
            TokenKind::KwPrint => "`print`".to_string(),
            TokenKind::LParen => "`(`".to_string(),
            TokenKind::RParen => "`)`".to_string(),
            TokenKind::LBrace => "`{`".to_string(),
            TokenKind::RBrace => "`}`".to_string(),
            TokenKind::Semi => "`;`".to_string(),
            TokenKind::Assign => "`=`".to_string(),
            TokenKind::Plus => "`+`".to_string(),
            TokenKind::Minus => "`-`".to_string(),
            TokenKind::Star => "`*`".to_string(),
            TokenKind::Slash => "`/`".to_string(),
            TokenKind::Bang => "`!`".to_string(),
            TokenKind::Lt => "`<`".to_string(),
            TokenKind::Le => "`<=`".to_string(),
            TokenKind::Gt => "`>`".to_string(),
            TokenKind::Ge => "`>=`".to_string(),
            TokenKind::EqEq => "`==`".to_string(),
            TokenKind::Ne => "`!=`".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LexError {
    #[error("unexpected character `{ch}` at {span}")]
    UnexpectedChar { ch: char, span: Span },
    #[error("integer literal out of range at {span}")]
    IntOutOfRange { span: Span },
    #[error("unterminated string literal starting at {span}")]
    UnterminatedString { span: Span },
}

pub fn lex(source: &str) -> Result<Vec<Token>, LexError> {
    let mut tokens = Vec::new();
    let mut chars = source.chars().peekable();
    let mut line = 1u32;
    let mut col = 1u32;

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if let Some(c) = c {
                if c == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
            }
            c
        }};
    }

    loop {
        let span = Span { line, col };
        let Some(&c) = chars.peek() else { break };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump!();
            }
            '/' => {
                bump!();
                if chars.peek() == Some(&'/') {
                    while let Some(&c) = chars.peek() {
                        if c == '\n' {
                            break;
                        }
                        bump!();
                    }
                } else {
                    tokens.push(Token { kind: TokenKind::Slash, span });
                }
            }
            '0'..='9' => {
                let mut text = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() {
                        text.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                let value: i64 =
                    text.parse().map_err(|_| LexError::IntOutOfRange { span })?;
                tokens.push(Token { kind: TokenKind::Int(value), span });
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let mut text = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        text.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                let kind = match text.as_str() {
                    "sym" => TokenKind::KwSym,
                    "int" => TokenKind::KwInt,
                    "if" => TokenKind::KwIf,
                    "else" => TokenKind::KwElse,
                    "while" => TokenKind::KwWhile,
                    "assert" => TokenKind::KwAssert,
                    "error" => TokenKind::KwError,
                    "print" => TokenKind::KwPrint,
                    _ => TokenKind::Ident(text),
                };
                tokens.push(Token { kind, span });
            }
            '"' => {
                bump!();
                let mut text = String::new();
                loop {
                    match bump!() {
                        Some('"') => break,
                        Some('\n') | None => {
                            return Err(LexError::UnterminatedString { span })
                        }
                        Some(c) => text.push(c),
                    }
                }
                tokens.push(Token { kind: TokenKind::Str(text), span });
            }
            _ => {
                bump!();
                let eq_next = chars.peek() == Some(&'=');
                let kind = match c {
                    '(' => TokenKind::LParen,
                    ')' => TokenKind::RParen,
                    '{' => TokenKind::LBrace,
                    '}' => TokenKind::RBrace,
                    ';' => TokenKind::Semi,
                    '+' => TokenKind::Plus,
                    '-' => TokenKind::Minus,
                    '*' => TokenKind::Star,
                    '=' if eq_next => {
                        bump!();
                        TokenKind::EqEq
                    }
                    '=' => TokenKind::Assign,
                    '!' if eq_next => {
                        bump!();
                        TokenKind::Ne
                    }
                    '!' => TokenKind::Bang,
                    '<' if eq_next => {
                        bump!();
                        TokenKind::Le
                    }
                    '<' => TokenKind::Lt,
                    '>' if eq_next => {
                        bump!();
                        TokenKind::Ge
                    }
                    '>' => TokenKind::Gt,
                    other => return Err(LexError::UnexpectedChar { ch: other, span }),
                };
                tokens.push(Token { kind, span });
            }
        }
    }
    Ok(tokens)
}
