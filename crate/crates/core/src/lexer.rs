//! Tokenizer for `.spec` files (program section).

use crate::error::FrontendError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Int(i64),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Semi,
    Assign,
    Plus,
    Minus,
    Star,
    Lt,
    Le,
    Gt,
    Ge,
    EqEq,
    Ne,
    AndAnd,
    OrOr,
    Bang,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: u32,
    pub col: u32,
}

pub struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    pub fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    /// Byte offset of the next unconsumed character (used to hand the rest
    /// of the file to the property-block reader).
    pub fn offset(&self) -> usize {
        self.pos
    }

    pub fn position(&self) -> (u32, u32) {
        (self.line, self.col)
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    /// Skip whitespace and `//` line comments.
    pub fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_whitespace() => {
                    self.bump();
                }
                Some(b'/') if self.src.get(self.pos + 1) == Some(&b'/') => {
                    while let Some(c) = self.peek() {
                        if c == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    pub fn next_token(&mut self) -> Result<Option<Token>, FrontendError> {
        self.skip_trivia();
        let (line, col) = (self.line, self.col);
        let c = match self.peek() {
            Some(c) => c,
            None => return Ok(None),
        };
        let tok = |kind| {
            Ok(Some(Token { kind, line, col }))
        };
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = self.pos;
            while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
                self.bump();
            }
            let text = std::str::from_utf8(&self.src[start..self.pos])
                .expect("identifier bytes are ASCII")
                .to_string();
            return tok(TokenKind::Ident(text));
        }
        if c.is_ascii_digit() {
            let start = self.pos;
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.bump();
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            let value = text.parse::<i64>().map_err(|_| FrontendError::Lexical {
                line,
                col,
                message: format!("integer literal `{text}` out of range"),
            })?;
            return tok(TokenKind::Int(value));
        }
        self.bump();
        let two = |l: &mut Self, second: u8| -> bool {
            if l.peek() == Some(second) {
                l.bump();
                true
            } else {
                false
            }
        };
        match c {
            b'(' => tok(TokenKind::LParen),
            b')' => tok(TokenKind::RParen),
            b'{' => tok(TokenKind::LBrace),
            b'}' => tok(TokenKind::RBrace),
            b'[' => tok(TokenKind::LBracket),
            b']' => tok(TokenKind::RBracket),
            b';' => tok(TokenKind::Semi),
            b'+' => tok(TokenKind::Plus),
            b'-' => tok(TokenKind::Minus),
            b'*' => tok(TokenKind::Star),
            b'=' => {
                if two(self, b'=') {
                    tok(TokenKind::EqEq)
                } else {
                    tok(TokenKind::Assign)
                }
            }
            b'<' => {
                if two(self, b'=') {
                    tok(TokenKind::Le)
                } else {
                    tok(TokenKind::Lt)
                }
            }
            b'>' => {
                if two(self, b'=') {
                    tok(TokenKind::Ge)
                } else {
                    tok(TokenKind::Gt)
                }
            }
            b'!' => {
                if two(self, b'=') {
                    tok(TokenKind::Ne)
                } else {
                    tok(TokenKind::Bang)
                }
            }
            b'&' => {
                if two(self, b'&') {
                    tok(TokenKind::AndAnd)
                } else {
                    Err(FrontendError::Lexical {
                        line,
                        col,
                        message: "expected `&&`".into(),
                    })
                }
            }
            b'|' => {
                if two(self, b'|') {
                    tok(TokenKind::OrOr)
                } else {
                    Err(FrontendError::Lexical {
                        line,
                        col,
                        message: "expected `||`".into(),
                    })
                }
            }
            other => Err(FrontendError::Lexical {
                line,
                col,
                message: format!("unexpected character `{}`", other as char),
            }),
        }
    }
}
