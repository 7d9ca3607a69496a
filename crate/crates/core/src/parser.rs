//! Recursive-descent parser for `.spec` files: a while-language program
//! followed by optional property directives (S-expressions).
//!
//! A declaration with an initializer, `Int i = 0;`, desugars to the bare
//! declaration plus an integer assignment on the same line. Statements must
//! start on distinct source lines so that line-based symbol names are
//! injective.

use crate::ast::{ArithOp, CmpOp, Expr, Line, Program, Statement, VarDecl};
use crate::error::FrontendError;
use crate::lexer::{Lexer, Token, TokenKind};
use crate::sexpr::{Reader, SExpr};

/// Confidentiality level of a variable (non-interference).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Low,
    High,
}

/// Built-in property templates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropertyKind {
    NonInterference,
    Sensitivity,
}

/// One property directive from the tail of a `.spec` file.
#[derive(Debug, Clone, PartialEq)]
pub enum Directive {
    SetTraces(u8),
    Levels(Vec<(String, Level)>),
    Out(Vec<String>),
    Dev(Vec<String>),
    Property { kind: PropertyKind, at: Option<Line> },
    Conjecture(SExpr),
}

/// A parsed `.spec` file: the program plus its property directives.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecFile {
    pub program: Program,
    pub directives: Vec<Directive>,
}

/// Names that would collide with symbols of the generated signature.
const RESERVED: &[&str] = &[
    "func", "main", "const", "Int", "skip", "if", "else", "while", "zero", "s", "p", "t1", "t2",
    "tr", "main_end", "Nat_less", "true", "false",
];

fn reserved(name: &str) -> bool {
    if RESERVED.contains(&name) {
        return true;
    }
    // l<digits>, n<digits>, It<digits> are location/iteration symbols.
    for prefix in ["l", "n", "It"] {
        if let Some(rest) = name.strip_prefix(prefix) {
            if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                return true;
            }
        }
    }
    false
}

pub fn parse_spec(source: &str) -> Result<SpecFile, FrontendError> {
    let mut parser = Parser::new(source);
    let program = parser.program()?;
    let directives = parser.directives(source)?;
    Ok(SpecFile {
        program,
        directives,
    })
}

/// Parse just the program part, rejecting trailing property directives.
pub fn parse_program(source: &str) -> Result<Program, FrontendError> {
    Ok(parse_spec(source)?.program)
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    lookahead: Option<Token>,
    decls: Vec<VarDecl>,
}

impl<'a> Parser<'a> {
    fn new(source: &'a str) -> Self {
        Parser {
            lexer: Lexer::new(source),
            lookahead: None,
            decls: Vec::new(),
        }
    }

    fn peek(&mut self) -> Result<Option<&Token>, FrontendError> {
        if self.lookahead.is_none() {
            self.lookahead = self.lexer.next_token()?;
        }
        Ok(self.lookahead.as_ref())
    }

    fn next(&mut self) -> Result<Token, FrontendError> {
        if let Some(tok) = self.lookahead.take() {
            return Ok(tok);
        }
        match self.lexer.next_token()? {
            Some(tok) => Ok(tok),
            None => {
                let (line, col) = self.lexer.position();
                Err(FrontendError::Syntax {
                    line,
                    col,
                    message: "unexpected end of input".into(),
                })
            }
        }
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> Result<Token, FrontendError> {
        let tok = self.next()?;
        if tok.kind == kind {
            Ok(tok)
        } else {
            Err(FrontendError::Syntax {
                line: tok.line,
                col: tok.col,
                message: format!("expected {what}"),
            })
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<Token, FrontendError> {
        let tok = self.next()?;
        match &tok.kind {
            TokenKind::Ident(name) if name == kw => Ok(tok),
            _ => Err(FrontendError::Syntax {
                line: tok.line,
                col: tok.col,
                message: format!("expected `{kw}`"),
            }),
        }
    }

    fn peek_is_ident(&mut self, kw: &str) -> Result<bool, FrontendError> {
        Ok(matches!(self.peek()?, Some(Token { kind: TokenKind::Ident(name), .. }) if name == kw))
    }

    fn program(&mut self) -> Result<Program, FrontendError> {
        self.expect_kw("func")?;
        self.expect_kw("main")?;
        self.expect(TokenKind::LParen, "`(`")?;
        self.expect(TokenKind::RParen, "`)`")?;
        self.expect(TokenKind::LBrace, "`{`")?;

        let mut body = Vec::new();
        loop {
            match self.peek()? {
                Some(Token {
                    kind: TokenKind::RBrace,
                    ..
                }) => {
                    self.next()?;
                    break;
                }
                Some(_) => {
                    if self.peek_is_ident("const")? || self.peek_is_ident("Int")? {
                        if let Some(init) = self.declaration()? {
                            body.push(init);
                        }
                    } else {
                        let stmt = self.statement(true)?;
                        body.push(stmt);
                    }
                }
                None => {
                    let (line, col) = self.lexer.position();
                    return Err(FrontendError::Syntax {
                        line,
                        col,
                        message: "expected `}` closing `func main`".into(),
                    });
                }
            }
        }

        if body.is_empty() {
            return Err(FrontendError::Syntax {
                line: 1,
                col: 1,
                message: "program has no statements".into(),
            });
        }

        let program = Program {
            decls: std::mem::take(&mut self.decls),
            body,
        };
        check_statement_lines(&program)?;
        Ok(program)
    }

    /// Parse one declaration; returns the desugared initializer assignment
    /// if present.
    fn declaration(&mut self) -> Result<Option<Statement>, FrontendError> {
        let is_const = if self.peek_is_ident("const")? {
            self.next()?;
            true
        } else {
            false
        };
        let ty_tok = self.expect_kw("Int")?;
        let line = ty_tok.line;
        let is_array = if matches!(
            self.peek()?,
            Some(Token {
                kind: TokenKind::LBracket,
                ..
            })
        ) {
            self.next()?;
            self.expect(TokenKind::RBracket, "`]`")?;
            true
        } else {
            false
        };
        let name_tok = self.next()?;
        let name = match name_tok.kind {
            TokenKind::Ident(name) => name,
            _ => {
                return Err(FrontendError::Syntax {
                    line: name_tok.line,
                    col: name_tok.col,
                    message: "expected variable name".into(),
                })
            }
        };
        if reserved(&name) {
            return Err(FrontendError::Syntax {
                line: name_tok.line,
                col: name_tok.col,
                message: format!("`{name}` is a reserved name"),
            });
        }
        if self.decls.iter().any(|d| d.name == name) {
            return Err(FrontendError::DuplicateDeclaration {
                name,
                line: name_tok.line,
                col: name_tok.col,
            });
        }
        self.decls.push(VarDecl {
            name: name.clone(),
            is_const,
            is_array,
            line,
        });

        let mut init = None;
        if matches!(
            self.peek()?,
            Some(Token {
                kind: TokenKind::Assign,
                ..
            })
        ) {
            let eq_tok = self.next()?;
            if is_const {
                return Err(FrontendError::AssignToConst {
                    name,
                    line: eq_tok.line,
                    col: eq_tok.col,
                });
            }
            if is_array {
                return Err(FrontendError::Syntax {
                    line: eq_tok.line,
                    col: eq_tok.col,
                    message: "array declarations cannot have initializers".into(),
                });
            }
            let value = self.int_expr("initializer")?;
            init = Some(Statement::IntAssign {
                line,
                target: name,
                value,
            });
        }
        self.expect(TokenKind::Semi, "`;`")?;
        Ok(init)
    }

    fn statement(&mut self, top_level: bool) -> Result<Statement, FrontendError> {
        let tok = self.next()?;
        let line = tok.line;
        match tok.kind {
            TokenKind::Ident(name) if name == "skip" => {
                self.expect(TokenKind::Semi, "`;`")?;
                Ok(Statement::Skip { line })
            }
            TokenKind::Ident(name) if name == "if" => {
                self.expect(TokenKind::LParen, "`(`")?;
                let cond = self.bool_expr("if condition")?;
                self.expect(TokenKind::RParen, "`)`")?;
                let then_branch = self.block()?;
                self.expect_kw("else")?;
                let else_branch = self.block()?;
                Ok(Statement::IfElse {
                    line,
                    cond,
                    then_branch,
                    else_branch,
                })
            }
            TokenKind::Ident(name) if name == "while" => {
                self.expect(TokenKind::LParen, "`(`")?;
                let cond = self.bool_expr("while condition")?;
                self.expect(TokenKind::RParen, "`)`")?;
                let body = self.block()?;
                Ok(Statement::While { line, cond, body })
            }
            TokenKind::Ident(name) if name == "const" || name == "Int" => {
                Err(FrontendError::Syntax {
                    line,
                    col: tok.col,
                    message: if top_level {
                        "internal: declaration handled elsewhere".into()
                    } else {
                        "declarations are only allowed in the top-level block".into()
                    },
                })
            }
            TokenKind::Ident(name) => {
                let decl = self.lookup(&name, line, tok.col)?;
                if matches!(
                    self.peek()?,
                    Some(Token {
                        kind: TokenKind::LBracket,
                        ..
                    })
                ) {
                    if !decl.1 {
                        return Err(FrontendError::TypeMismatch {
                            line,
                            col: tok.col,
                            message: format!("`{name}` is not an array"),
                        });
                    }
                    self.next()?;
                    let index = self.int_expr("array index")?;
                    self.expect(TokenKind::RBracket, "`]`")?;
                    self.expect(TokenKind::Assign, "`=`")?;
                    if decl.0 {
                        return Err(FrontendError::AssignToConst { name, line, col: tok.col });
                    }
                    let value = self.int_expr("assignment")?;
                    self.expect(TokenKind::Semi, "`;`")?;
                    Ok(Statement::ArrayAssign {
                        line,
                        array: name,
                        index,
                        value,
                    })
                } else {
                    if decl.1 {
                        return Err(FrontendError::TypeMismatch {
                            line,
                            col: tok.col,
                            message: format!("array `{name}` needs an index to be assigned"),
                        });
                    }
                    self.expect(TokenKind::Assign, "`=`")?;
                    if decl.0 {
                        return Err(FrontendError::AssignToConst { name, line, col: tok.col });
                    }
                    let value = self.int_expr("assignment")?;
                    self.expect(TokenKind::Semi, "`;`")?;
                    Ok(Statement::IntAssign {
                        line,
                        target: name,
                        value,
                    })
                }
            }
            _ => Err(FrontendError::Syntax {
                line,
                col: tok.col,
                message: "expected a statement".into(),
            }),
        }
    }

    fn block(&mut self) -> Result<Vec<Statement>, FrontendError> {
        let open = self.expect(TokenKind::LBrace, "`{`")?;
        let mut stmts = Vec::new();
        loop {
            match self.peek()? {
                Some(Token {
                    kind: TokenKind::RBrace,
                    ..
                }) => {
                    self.next()?;
                    break;
                }
                Some(_) => stmts.push(self.statement(false)?),
                None => {
                    return Err(FrontendError::Syntax {
                        line: open.line,
                        col: open.col,
                        message: "unclosed `{`".into(),
                    })
                }
            }
        }
        if stmts.is_empty() {
            return Err(FrontendError::Syntax {
                line: open.line,
                col: open.col,
                message: "blocks must contain at least one statement".into(),
            });
        }
        Ok(stmts)
    }

    /// (is_const, is_array) of a declared variable.
    fn lookup(&self, name: &str, line: u32, col: u32) -> Result<(bool, bool), FrontendError> {
        self.decls
            .iter()
            .find(|d| d.name == name)
            .map(|d| (d.is_const, d.is_array))
            .ok_or_else(|| FrontendError::UnknownVariable {
                name: name.to_string(),
                line,
                col,
            })
    }

    fn int_expr(&mut self, what: &str) -> Result<Expr, FrontendError> {
        let (line, col) = self.peek_pos()?;
        let e = self.expr()?;
        if e.is_bool() {
            return Err(FrontendError::TypeMismatch {
                line,
                col,
                message: format!("{what} must be an integer expression"),
            });
        }
        Ok(e)
    }

    fn bool_expr(&mut self, what: &str) -> Result<Expr, FrontendError> {
        let (line, col) = self.peek_pos()?;
        let e = self.expr()?;
        if !e.is_bool() {
            return Err(FrontendError::TypeMismatch {
                line,
                col,
                message: format!("{what} must be a boolean expression"),
            });
        }
        Ok(e)
    }

    fn peek_pos(&mut self) -> Result<(u32, u32), FrontendError> {
        Ok(match self.peek()? {
            Some(tok) => (tok.line, tok.col),
            None => self.lexer.position(),
        })
    }

    fn expr(&mut self) -> Result<Expr, FrontendError> {
        self.or_expr()
    }

    fn or_expr(&mut self) -> Result<Expr, FrontendError> {
        let mut lhs = self.and_expr()?;
        while matches!(
            self.peek()?,
            Some(Token {
                kind: TokenKind::OrOr,
                ..
            })
        ) {
            let op = self.next()?;
            let rhs = self.and_expr()?;
            require_bool(&lhs, &op)?;
            require_bool(&rhs, &op)?;
            lhs = Expr::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<Expr, FrontendError> {
        let mut lhs = self.not_expr()?;
        while matches!(
            self.peek()?,
            Some(Token {
                kind: TokenKind::AndAnd,
                ..
            })
        ) {
            let op = self.next()?;
            let rhs = self.not_expr()?;
            require_bool(&lhs, &op)?;
            require_bool(&rhs, &op)?;
            lhs = Expr::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn not_expr(&mut self) -> Result<Expr, FrontendError> {
        if matches!(
            self.peek()?,
            Some(Token {
                kind: TokenKind::Bang,
                ..
            })
        ) {
            let op = self.next()?;
            let inner = self.not_expr()?;
            require_bool(&inner, &op)?;
            return Ok(Expr::Not(Box::new(inner)));
        }
        self.cmp_expr()
    }

    fn cmp_expr(&mut self) -> Result<Expr, FrontendError> {
        let lhs = self.add_expr()?;
        let op_kind = match self.peek()? {
            Some(tok) => match tok.kind {
                TokenKind::Lt => Some(CmpOp::Lt),
                TokenKind::Le => Some(CmpOp::Le),
                TokenKind::Gt => Some(CmpOp::Gt),
                TokenKind::Ge => Some(CmpOp::Ge),
                TokenKind::EqEq => Some(CmpOp::Eq),
                TokenKind::Ne => Some(CmpOp::Ne),
                _ => None,
            },
            None => None,
        };
        if let Some(op) = op_kind {
            let tok = self.next()?;
            let rhs = self.add_expr()?;
            require_int(&lhs, &tok)?;
            require_int(&rhs, &tok)?;
            return Ok(Expr::Cmp(op, Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn add_expr(&mut self) -> Result<Expr, FrontendError> {
        let mut lhs = self.mul_expr()?;
        loop {
            let op = match self.peek()? {
                Some(Token {
                    kind: TokenKind::Plus,
                    ..
                }) => ArithOp::Add,
                Some(Token {
                    kind: TokenKind::Minus,
                    ..
                }) => ArithOp::Sub,
                _ => break,
            };
            let tok = self.next()?;
            let rhs = self.mul_expr()?;
            require_int(&lhs, &tok)?;
            require_int(&rhs, &tok)?;
            lhs = Expr::Arith(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn mul_expr(&mut self) -> Result<Expr, FrontendError> {
        let mut lhs = self.atom()?;
        while matches!(
            self.peek()?,
            Some(Token {
                kind: TokenKind::Star,
                ..
            })
        ) {
            let tok = self.next()?;
            let rhs = self.atom()?;
            require_int(&lhs, &tok)?;
            require_int(&rhs, &tok)?;
            lhs = Expr::Arith(ArithOp::Mul, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn atom(&mut self) -> Result<Expr, FrontendError> {
        let tok = self.next()?;
        match tok.kind {
            TokenKind::Int(value) => Ok(Expr::Int(value)),
            TokenKind::LParen => {
                let inner = self.expr()?;
                self.expect(TokenKind::RParen, "`)`")?;
                Ok(inner)
            }
            TokenKind::Ident(name) => {
                let (_, is_array) = self.lookup(&name, tok.line, tok.col)?;
                if matches!(
                    self.peek()?,
                    Some(Token {
                        kind: TokenKind::LBracket,
                        ..
                    })
                ) {
                    if !is_array {
                        return Err(FrontendError::TypeMismatch {
                            line: tok.line,
                            col: tok.col,
                            message: format!("`{name}` is not an array"),
                        });
                    }
                    self.next()?;
                    let index = self.int_expr("array index")?;
                    self.expect(TokenKind::RBracket, "`]`")?;
                    Ok(Expr::ArrayRead(name, Box::new(index)))
                } else if is_array {
                    Err(FrontendError::TypeMismatch {
                        line: tok.line,
                        col: tok.col,
                        message: format!("array `{name}` cannot be read without an index"),
                    })
                } else {
                    Ok(Expr::Var(name))
                }
            }
            _ => Err(FrontendError::Syntax {
                line: tok.line,
                col: tok.col,
                message: "expected an expression".into(),
            }),
        }
    }

    /// Parse the property directives following the program.
    fn directives(&mut self, source: &str) -> Result<Vec<Directive>, FrontendError> {
        if let Some(tok) = self.lookahead.take() {
            return Err(FrontendError::Syntax {
                line: tok.line,
                col: tok.col,
                message: "unexpected tokens after `func main` body".into(),
            });
        }
        self.lexer.skip_trivia();
        let rest = &source[self.lexer.offset()..];
        let (line, _) = self.lexer.position();
        let mut reader = Reader::new_at(rest, line);
        let exprs = reader.read_all().map_err(|e| FrontendError::Syntax {
            line: e.pos.line,
            col: e.pos.col,
            message: e.message,
        })?;
        exprs.iter().map(parse_directive).collect()
    }
}

fn require_int(e: &Expr, at: &Token) -> Result<(), FrontendError> {
    if e.is_bool() {
        Err(FrontendError::TypeMismatch {
            line: at.line,
            col: at.col,
            message: "operand must be an integer expression".into(),
        })
    } else {
        Ok(())
    }
}

fn require_bool(e: &Expr, at: &Token) -> Result<(), FrontendError> {
    if !e.is_bool() {
        Err(FrontendError::TypeMismatch {
            line: at.line,
            col: at.col,
            message: "operand must be a boolean expression".into(),
        })
    } else {
        Ok(())
    }
}

fn check_statement_lines(program: &Program) -> Result<(), FrontendError> {
    let mut seen = std::collections::BTreeSet::new();
    for s in program.statements() {
        if !seen.insert(s.line()) {
            return Err(FrontendError::DuplicateStatementLine { line: s.line() });
        }
    }
    Ok(())
}

fn parse_directive(e: &SExpr) -> Result<Directive, FrontendError> {
    let err = |pos: crate::sexpr::Pos, message: String| FrontendError::Syntax {
        line: pos.line,
        col: pos.col,
        message,
    };
    let items = e
        .as_list()
        .ok_or_else(|| err(e.pos(), "expected a directive list".into()))?;
    let head = items
        .first()
        .and_then(|h| h.as_atom())
        .ok_or_else(|| err(e.pos(), "expected a directive keyword".into()))?;
    match head {
        "set-traces" => {
            let n = items
                .get(1)
                .and_then(|a| a.as_atom())
                .and_then(|a| a.parse::<u8>().ok())
                .filter(|n| *n == 1 || *n == 2)
                .ok_or_else(|| err(e.pos(), "usage: (set-traces 1|2)".into()))?;
            Ok(Directive::SetTraces(n))
        }
        "levels" => {
            let mut levels = Vec::new();
            for item in &items[1..] {
                let pair = item
                    .as_list()
                    .filter(|p| p.len() == 2)
                    .ok_or_else(|| err(item.pos(), "usage: (levels (x L) (y H) ...)".into()))?;
                let name = pair[0]
                    .as_atom()
                    .ok_or_else(|| err(pair[0].pos(), "expected variable name".into()))?;
                let level = match pair[1].as_atom() {
                    Some("L") => Level::Low,
                    Some("H") => Level::High,
                    _ => return Err(err(pair[1].pos(), "level must be L or H".into())),
                };
                levels.push((name.to_string(), level));
            }
            Ok(Directive::Levels(levels))
        }
        "out" | "dev" => {
            let mut names = Vec::new();
            for item in &items[1..] {
                let name = item
                    .as_atom()
                    .ok_or_else(|| err(item.pos(), "expected variable name".into()))?;
                names.push(name.to_string());
            }
            if head == "out" {
                Ok(Directive::Out(names))
            } else {
                Ok(Directive::Dev(names))
            }
        }
        "property" => {
            let kind = match items.get(1).and_then(|a| a.as_atom()) {
                Some("noninterference") => PropertyKind::NonInterference,
                Some("sensitivity") => PropertyKind::Sensitivity,
                _ => {
                    return Err(err(
                        e.pos(),
                        "usage: (property noninterference|sensitivity [(at l<line>)])".into(),
                    ))
                }
            };
            let mut at = None;
            if let Some(modifier) = items.get(2) {
                let parts = modifier
                    .as_list()
                    .filter(|p| p.len() == 2 && p[0].as_atom() == Some("at"))
                    .ok_or_else(|| err(modifier.pos(), "expected (at l<line>)".into()))?;
                let loc = parts[1]
                    .as_atom()
                    .and_then(|a| a.strip_prefix('l'))
                    .and_then(|d| d.parse::<Line>().ok())
                    .ok_or_else(|| err(parts[1].pos(), "expected a location like l6".into()))?;
                at = Some(loc);
            }
            Ok(Directive::Property { kind, at })
        }
        "conjecture" => {
            if items.len() != 2 {
                return Err(err(e.pos(), "usage: (conjecture <formula>)".into()));
            }
            Ok(Directive::Conjecture(items[1].clone()))
        }
        other => Err(err(e.pos(), format!("unknown directive `{other}`"))),
    }
}
