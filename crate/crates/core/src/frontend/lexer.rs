use std::fmt;

use crate::diag::Span;
use crate::frontend::ast::BinOp;
use crate::frontend::SyntaxError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Keyword {
    Struct,
    Var,
    Let,
    In,
    If,
    Then,
    Else,
    Inout,
}

impl Keyword {
    fn from_ident(s: &str) -> Option<Keyword> {
        Some(match s {
            "struct" => Keyword::Struct,
            "var" => Keyword::Var,
            "let" => Keyword::Let,
            "in" => Keyword::In,
            "if" => Keyword::If,
            "then" => Keyword::Then,
            "else" => Keyword::Else,
            "inout" => Keyword::Inout,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Struct => "struct",
            Keyword::Var => "var",
            Keyword::Let => "let",
            Keyword::In => "in",
            Keyword::If => "if",
            Keyword::Then => "then",
            Keyword::Else => "else",
            Keyword::Inout => "inout",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Punct {
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Colon,
    Semi,
    Comma,
    Dot,
    Eq,
}

impl Punct {
    pub fn as_str(self) -> &'static str {
        match self {
            Punct::LParen => "(",
            Punct::RParen => ")",
            Punct::LBrace => "{",
            Punct::RBrace => "}",
            Punct::LBracket => "[",
            Punct::RBracket => "]",
            Punct::Colon => ":",
            Punct::Semi => ";",
            Punct::Comma => ",",
            Punct::Dot => ".",
            Punct::Eq => "=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Keyword(Keyword),
    Ident,
    IntLit,
    FloatLit,
    Punct(Punct),
    Operator(BinOp),
    Arrow,
    Amp,
    Underscore,
    Eof,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Keyword(k) => write!(f, "`{}`", k.as_str()),
            TokenKind::Ident => f.write_str("identifier"),
            TokenKind::IntLit => f.write_str("integer literal"),
            TokenKind::FloatLit => f.write_str("float literal"),
            TokenKind::Punct(p) => write!(f, "`{}`", p.as_str()),
            TokenKind::Operator(op) => write!(f, "`{}`", op.symbol()),
            TokenKind::Arrow => f.write_str("`->`"),
            TokenKind::Amp => f.write_str("`&`"),
            TokenKind::Underscore => f.write_str("`_`"),
            TokenKind::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub span: Span,
}

/// Splits `source` into tokens. The returned stream always ends with an
/// `Eof` token whose span is empty and sits at the end of the input.
pub fn tokenize(source: &str) -> Result<Vec<Token>, SyntaxError> {
    let bytes = source.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;

    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'/' && bytes.get(i + 1) == Some(&b'/') {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }

        let start = i;
        let kind = if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &source[start..i];
            if word == "_" {
                TokenKind::Underscore
            } else if let Some(kw) = Keyword::from_ident(word) {
                TokenKind::Keyword(kw)
            } else {
                TokenKind::Ident
            }
        } else if c.is_ascii_digit() {
            lex_number(bytes, &mut i)
        } else {
            i += 1;
            let next = bytes.get(i).copied();
            match c {
                b'(' => TokenKind::Punct(Punct::LParen),
                b')' => TokenKind::Punct(Punct::RParen),
                b'{' => TokenKind::Punct(Punct::LBrace),
                b'}' => TokenKind::Punct(Punct::RBrace),
                b'[' => TokenKind::Punct(Punct::LBracket),
                b']' => TokenKind::Punct(Punct::RBracket),
                b':' => TokenKind::Punct(Punct::Colon),
                b';' => TokenKind::Punct(Punct::Semi),
                b',' => TokenKind::Punct(Punct::Comma),
                b'.' => TokenKind::Punct(Punct::Dot),
                b'&' => TokenKind::Amp,
                b'+' => TokenKind::Operator(BinOp::Add),
                b'*' => TokenKind::Operator(BinOp::Mul),
                b'/' => TokenKind::Operator(BinOp::Div),
                b'%' => TokenKind::Operator(BinOp::Rem),
                b'-' if next == Some(b'>') => {
                    i += 1;
                    TokenKind::Arrow
                }
                b'-' => TokenKind::Operator(BinOp::Sub),
                b'=' if next == Some(b'=') => {
                    i += 1;
                    TokenKind::Operator(BinOp::Eq)
                }
                b'=' => TokenKind::Punct(Punct::Eq),
                b'!' if next == Some(b'=') => {
                    i += 1;
                    TokenKind::Operator(BinOp::Ne)
                }
                b'<' if next == Some(b'=') => {
                    i += 1;
                    TokenKind::Operator(BinOp::Le)
                }
                b'<' => TokenKind::Operator(BinOp::Lt),
                b'>' if next == Some(b'=') => {
                    i += 1;
                    TokenKind::Operator(BinOp::Ge)
                }
                b'>' => TokenKind::Operator(BinOp::Gt),
                _ => {
                    let ch = source[start..].chars().next().unwrap_or('?');
                    return Err(SyntaxError::new(
                        Span::new(start, start + ch.len_utf8()),
                        format!("unexpected character `{ch}`"),
                    ));
                }
            }
        };
        tokens.push(Token {
            kind,
            lexeme: source[start..i].to_string(),
            span: Span::new(start, i),
        });
    }

    // Anchor end-of-input errors to the last token rather than trailing
    // whitespace or comments.
    let end_of_content = tokens.last().map_or(0, |t| t.span.end);
    tokens.push(Token {
        kind: TokenKind::Eof,
        lexeme: String::new(),
        span: Span::new(end_of_content, end_of_content),
    });
    Ok(tokens)
}

fn lex_number(bytes: &[u8], i: &mut usize) -> TokenKind {
    let digits = |i: &mut usize| {
        while *i < bytes.len() && bytes[*i].is_ascii_digit() {
            *i += 1;
        }
    };
    digits(i);
    let mut kind = TokenKind::IntLit;
    if bytes.get(*i) == Some(&b'.') && bytes.get(*i + 1).is_some_and(u8::is_ascii_digit) {
        *i += 1;
        digits(i);
        kind = TokenKind::FloatLit;
    }
    if matches!(bytes.get(*i), Some(b'e' | b'E')) {
        let mut j = *i + 1;
        if matches!(bytes.get(j), Some(b'+' | b'-')) {
            j += 1;
        }
        if bytes.get(j).is_some_and(u8::is_ascii_digit) {
            *i = j;
            digits(i);
            kind = TokenKind::FloatLit;
        }
    }
    kind
}
