//! Abstract syntax tree for the while-language.
//!
//! Programs consist of a single `func main` with integer and integer-array
//! variables (mutable or `const`) and arbitrary nestings of `if`/`else` and
//! `while`. Every statement carries the 1-based source line of its first
//! token; the parser guarantees these lines are pairwise distinct, which
//! makes line-based symbol names (`l6`, `l9`, ...) injective.

use std::fmt;

/// 1-based source line number.
pub type Line = u32;

/// A variable declaration. The base sort is always mathematical integer;
/// arrays are total maps from integer positions to integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarDecl {
    pub name: String,
    pub is_const: bool,
    pub is_array: bool,
    /// Source line of the declaration (used by the pretty-printer and
    /// diagnostics; not part of the logical signature).
    pub line: Line,
}

/// Arithmetic operators of the language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
        }
    }
}

/// Comparison operators. All compare integers and yield booleans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
        }
    }
}

/// Side-effect free expressions over integers and booleans.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Int(i64),
    Var(String),
    ArrayRead(String, Box<Expr>),
    Arith(ArithOp, Box<Expr>, Box<Expr>),
    Cmp(CmpOp, Box<Expr>, Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
}

impl Expr {
    /// True iff the expression is boolean-valued (comparisons and
    /// connectives); everything else is integer-valued.
    pub fn is_bool(&self) -> bool {
        matches!(
            self,
            Expr::Cmp(..) | Expr::And(..) | Expr::Or(..) | Expr::Not(..)
        )
    }
}

/// Statements of the language.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Statement {
    Skip {
        line: Line,
    },
    IntAssign {
        line: Line,
        target: String,
        value: Expr,
    },
    ArrayAssign {
        line: Line,
        array: String,
        index: Expr,
        value: Expr,
    },
    IfElse {
        line: Line,
        cond: Expr,
        then_branch: Vec<Statement>,
        else_branch: Vec<Statement>,
    },
    While {
        line: Line,
        cond: Expr,
        body: Vec<Statement>,
    },
}

impl Statement {
    pub fn line(&self) -> Line {
        match self {
            Statement::Skip { line }
            | Statement::IntAssign { line, .. }
            | Statement::ArrayAssign { line, .. }
            | Statement::IfElse { line, .. }
            | Statement::While { line, .. } => *line,
        }
    }

    pub fn is_while(&self) -> bool {
        matches!(self, Statement::While { .. })
    }
}

/// A parsed program: the declarations and the body of `func main`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Program {
    pub decls: Vec<VarDecl>,
    pub body: Vec<Statement>,
}

impl Program {
    pub fn decl(&self, name: &str) -> Option<&VarDecl> {
        self.decls.iter().find(|d| d.name == name)
    }

    /// Mutable variables in declaration order (the set the frame and
    /// equality conjunctions range over; const variables are timepoint-free).
    pub fn mutable_vars(&self) -> Vec<&VarDecl> {
        self.decls.iter().filter(|d| !d.is_const).collect()
    }

    /// Depth-first list of all statements, in source order.
    pub fn statements(&self) -> Vec<&Statement> {
        fn walk<'a>(stmts: &'a [Statement], out: &mut Vec<&'a Statement>) {
            for s in stmts {
                out.push(s);
                match s {
                    Statement::IfElse {
                        then_branch,
                        else_branch,
                        ..
                    } => {
                        walk(then_branch, out);
                        walk(else_branch, out);
                    }
                    Statement::While { body, .. } => walk(body, out),
                    _ => {}
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.body, &mut out);
        out
    }

    pub fn statement_at(&self, line: Line) -> Option<&Statement> {
        self.statements().into_iter().find(|s| s.line() == line)
    }

    /// All `while` statements, in source order.
    pub fn loops(&self) -> Vec<&Statement> {
        self.statements()
            .into_iter()
            .filter(|s| s.is_while())
            .collect()
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Fully parenthesized below the leaves so re-parsing is unambiguous
        // regardless of operator precedence.
        match self {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::ArrayRead(a, idx) => write!(f, "{a}[{idx}]"),
            Expr::Arith(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            Expr::Cmp(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            Expr::And(l, r) => write!(f, "({l} && {r})"),
            Expr::Or(l, r) => write!(f, "({l} || {r})"),
            Expr::Not(e) => write!(f, "(!{e})"),
        }
    }
}

/// Line-faithful pretty-printer: every statement (and declaration) is laid
/// out on its recorded source line, so parsing the output reproduces the
/// input AST including line labels.
pub fn pretty(program: &Program) -> String {
    let mut p = Printer {
        out: String::new(),
        line: 1,
        at_line_start: true,
    };
    p.emit(1, "func main()");
    let first_item = program
        .decls
        .iter()
        .map(|d| d.line)
        .chain(program.body.iter().map(|s| s.line()))
        .min()
        .unwrap_or(3);
    p.emit(first_item.saturating_sub(1).max(1), "{");

    // Declarations and top-level statements interleaved by line. A mutable
    // scalar declaration re-assigned on its own line prints back in
    // initializer form, since `Int x = e;` desugars to exactly that pair.
    let mut items: Vec<(Line, u8, usize)> = Vec::new();
    for (i, d) in program.decls.iter().enumerate() {
        items.push((d.line, 0, i));
    }
    for (i, s) in program.body.iter().enumerate() {
        items.push((s.line(), 1, i));
    }
    items.sort();

    let mut merged: Vec<usize> = Vec::new();
    for &(line, kind, idx) in &items {
        if kind == 0 {
            let d = &program.decls[idx];
            let ty = if d.is_array { "Int[]" } else { "Int" };
            let prefix = if d.is_const { "const " } else { "" };
            let init = program.body.iter().enumerate().find(|(_, s)| {
                matches!(s, Statement::IntAssign { line: l, target, .. }
                         if *l == d.line && target == &d.name)
            });
            match init {
                Some((si, Statement::IntAssign { value, .. })) if !d.is_const && !d.is_array => {
                    merged.push(si);
                    p.emit(line, &format!("    {prefix}{ty} {} = {value};", d.name));
                }
                _ => p.emit(line, &format!("    {prefix}{ty} {};", d.name)),
            }
        } else if !merged.contains(&idx) {
            print_statement(&mut p, &program.body[idx], 1);
        }
    }
    p.newline();
    p.emit_flow("}");
    p.newline();
    p.out
}

struct Printer {
    out: String,
    line: Line,
    at_line_start: bool,
}

impl Printer {
    fn newline(&mut self) {
        self.out.push('\n');
        self.line += 1;
        self.at_line_start = true;
    }

    /// Place `text` on `line`, inserting blank lines as needed. If the
    /// cursor has already reached `line`, the text flows on the current line.
    fn emit(&mut self, line: Line, text: &str) {
        while self.line < line {
            self.newline();
        }
        self.emit_flow(text);
    }

    fn emit_flow(&mut self, text: &str) {
        if !self.at_line_start {
            self.out.push(' ');
        }
        self.out.push_str(text);
        self.at_line_start = false;
    }
}

fn print_statement(p: &mut Printer, s: &Statement, indent: usize) {
    let pad = "    ".repeat(indent);
    let place = |p: &mut Printer, line: Line, text: &str| {
        if p.line < line {
            p.emit(line, &format!("{pad}{text}"));
        } else {
            p.emit(line, text);
        }
    };
    match s {
        Statement::Skip { line } => place(p, *line, "skip;"),
        Statement::IntAssign {
            line,
            target,
            value,
        } => place(p, *line, &format!("{target} = {value};")),
        Statement::ArrayAssign {
            line,
            array,
            index,
            value,
        } => place(p, *line, &format!("{array}[{index}] = {value};")),
        Statement::IfElse {
            line,
            cond,
            then_branch,
            else_branch,
        } => {
            place(p, *line, &format!("if ({cond})"));
            p.emit_flow("{");
            for st in then_branch {
                print_statement(p, st, indent + 1);
            }
            p.emit_flow("}");
            p.emit_flow("else");
            p.emit_flow("{");
            for st in else_branch {
                print_statement(p, st, indent + 1);
            }
            p.emit_flow("}");
        }
        Statement::While { line, cond, body } => {
            place(p, *line, &format!("while ({cond})"));
            p.emit_flow("{");
            for st in body {
                print_statement(p, st, indent + 1);
            }
            p.emit_flow("}");
        }
    }
}
