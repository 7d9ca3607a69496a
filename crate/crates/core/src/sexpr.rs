//! Minimal S-expression reader, shared by the property-block parser and the
//! strict SMT-LIB reader. Atoms are plain symbols or integer numerals;
//! `;` and `//` start line comments.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExpr {
    Atom(String, Pos),
    List(Vec<SExpr>, Pos),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

impl SExpr {
    pub fn pos(&self) -> Pos {
        match self {
            SExpr::Atom(_, p) | SExpr::List(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom(s, _) => Some(s),
            SExpr::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items, _) => Some(items),
            SExpr::Atom(..) => None,
        }
    }
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExpr::Atom(s, _) => write!(f, "{s}"),
            SExpr::List(items, _) => {
                write!(f, "(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{item}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SExprError {
    pub pos: Pos,
    pub message: String,
}

impl fmt::Display for SExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}", self.message, self.pos)
    }
}

impl std::error::Error for SExprError {}

pub struct Reader<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Reader<'a> {
    pub fn new(src: &'a str) -> Self {
        Reader {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    /// Reader whose positions start at the given line (for text embedded in
    /// a larger file).
    pub fn new_at(src: &'a str, line: u32) -> Self {
        Reader {
            src: src.as_bytes(),
            pos: 0,
            line,
            col: 1,
        }
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

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_whitespace() => {
                    self.bump();
                }
                Some(b';') => {
                    while let Some(c) = self.peek() {
                        if c == b'\n' {
                            break;
                        }
                        self.bump();
                    }
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

    fn here(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }

    /// Read the next S-expression, or `None` at end of input.
    pub fn read(&mut self) -> Result<Option<SExpr>, SExprError> {
        self.skip_trivia();
        let pos = self.here();
        match self.peek() {
            None => Ok(None),
            Some(b'(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.peek() {
                        Some(b')') => {
                            self.bump();
                            return Ok(Some(SExpr::List(items, pos)));
                        }
                        None => {
                            return Err(SExprError {
                                pos,
                                message: "unclosed `(`".into(),
                            })
                        }
                        _ => match self.read()? {
                            Some(e) => items.push(e),
                            None => {
                                return Err(SExprError {
                                    pos,
                                    message: "unclosed `(`".into(),
                                })
                            }
                        },
                    }
                }
            }
            Some(b')') => Err(SExprError {
                pos,
                message: "unexpected `)`".into(),
            }),
            Some(_) => {
                let start = self.pos;
                while let Some(c) = self.peek() {
                    if c.is_ascii_whitespace() || c == b'(' || c == b')' || c == b';' {
                        break;
                    }
                    self.bump();
                }
                let text = std::str::from_utf8(&self.src[start..self.pos])
                    .map_err(|_| SExprError {
                        pos,
                        message: "atom is not valid UTF-8".into(),
                    })?
                    .to_string();
                Ok(Some(SExpr::Atom(text, pos)))
            }
        }
    }

    /// Read all remaining S-expressions.
    pub fn read_all(&mut self) -> Result<Vec<SExpr>, SExprError> {
        let mut out = Vec::new();
        while let Some(e) = self.read()? {
            out.push(e);
        }
        Ok(out)
    }
}
