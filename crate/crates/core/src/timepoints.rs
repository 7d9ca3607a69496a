//! The timepoint calculus: location symbols `l<line>`, last-iteration
//! symbols `n<line>`, canonical iteration variables `It<line>` and the
//! derived terms `tp`, `start`, `end` and `lastIt`.
//!
//! A location symbol takes one `Nat` argument per enclosing loop (outermost
//! first), plus one extra `Nat` argument when the statement itself is a
//! loop. `end` is resolved statically to one of three cases: the start of
//! the successor statement, the loop head at the next iteration, or the
//! distinguished end-of-program constant `main_end`.

use std::collections::BTreeMap;

use crate::ast::{Line, Program, Statement};
use crate::fol::{app, cst, succ, var, zero, FuncDecl, Signature, Sort, Term};

/// Name of the end-of-program timepoint constant.
pub const MAIN_END: &str = "main_end";

/// Where execution continues after a statement completes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndKind {
    /// Start of the next statement in the same (or an enclosing) block.
    NextStatement(Line),
    /// Back to the loop head of the enclosing while, at the next iteration.
    LoopBack(Line),
    /// The last top-level statement: `main_end`.
    ProgramEnd,
}

#[derive(Debug, Clone)]
struct StmtMeta {
    is_while: bool,
    /// Lines of enclosing while statements, outermost first.
    enclosing: Vec<Line>,
    end: EndKind,
}

/// Per-statement timepoint information for one program.
#[derive(Debug, Clone)]
pub struct ProgramContext {
    metas: BTreeMap<Line, StmtMeta>,
}

impl ProgramContext {
    pub fn analyze(program: &Program) -> ProgramContext {
        let mut metas = BTreeMap::new();
        analyze_block(&program.body, &[], EndKind::ProgramEnd, &mut metas);
        ProgramContext { metas }
    }

    fn meta(&self, line: Line) -> &StmtMeta {
        self.metas
            .get(&line)
            .unwrap_or_else(|| panic!("no statement at line {line}"))
    }

    /// Lines of enclosing loops, outermost first.
    pub fn enclosing_loops(&self, line: Line) -> &[Line] {
        &self.meta(line).enclosing
    }

    pub fn loop_depth(&self, line: Line) -> usize {
        self.meta(line).enclosing.len()
    }

    pub fn is_while(&self, line: Line) -> bool {
        self.meta(line).is_while
    }

    pub fn end_kind(&self, line: Line) -> EndKind {
        self.meta(line).end
    }

    /// The canonical iteration variable `It<line>` of a while statement.
    pub fn iteration_var(&self, while_line: Line) -> Term {
        var(&format!("It{while_line}"), Sort::Nat)
    }

    /// Declaration of the location symbol `l<line>`.
    pub fn location_symbol(&self, line: Line) -> FuncDecl {
        let meta = self.meta(line);
        let arity = meta.enclosing.len() + usize::from(meta.is_while);
        FuncDecl {
            name: format!("l{line}"),
            args: vec![Sort::Nat; arity],
            result: Sort::Time,
            theory: false,
        }
    }

    /// Declaration of the last-iteration symbol `n<line>` of a while
    /// statement; carries a trace argument in two-trace mode.
    pub fn last_iteration_symbol(&self, while_line: Line, with_trace: bool) -> FuncDecl {
        let meta = self.meta(while_line);
        assert!(meta.is_while, "n{while_line} requires a while statement");
        let mut args = vec![Sort::Nat; meta.enclosing.len()];
        if with_trace {
            args.push(Sort::Trace);
        }
        FuncDecl {
            name: format!("n{while_line}"),
            args,
            result: Sort::Nat,
            theory: false,
        }
    }

    fn enclosing_iteration_terms(&self, line: Line) -> Vec<Term> {
        self.meta(line)
            .enclosing
            .iter()
            .map(|w| self.iteration_var(*w))
            .collect()
    }

    /// `tp_s` for a non-while statement: `l<line>` applied to the canonical
    /// iteration variables of the enclosing loops.
    pub fn tp(&self, line: Line) -> Term {
        assert!(
            !self.meta(line).is_while,
            "tp of a while statement needs an explicit iteration term"
        );
        app(&format!("l{line}"), self.enclosing_iteration_terms(line))
    }

    /// `tp_s(it)` for a while statement.
    pub fn tp_loop(&self, while_line: Line, iteration: Term) -> Term {
        assert!(self.meta(while_line).is_while);
        let mut args = self.enclosing_iteration_terms(while_line);
        args.push(iteration);
        app(&format!("l{while_line}"), args)
    }

    /// The timepoint where execution of the statement starts.
    pub fn start(&self, line: Line) -> Term {
        if self.meta(line).is_while {
            self.tp_loop(line, zero())
        } else {
            self.tp(line)
        }
    }

    /// The timepoint immediately after the statement has been evaluated
    /// completely (including substatements).
    pub fn end(&self, line: Line) -> Term {
        match self.meta(line).end {
            EndKind::NextStatement(next) => self.start(next),
            EndKind::LoopBack(w) => self.tp_loop(w, succ(self.iteration_var(w))),
            EndKind::ProgramEnd => cst(MAIN_END),
        }
    }

    /// `lastIt_s`: the symbol `n<line>` applied to the enclosing iteration
    /// variables, plus the trace term in two-trace mode.
    pub fn last_iteration(&self, while_line: Line, trace: Option<Term>) -> Term {
        assert!(self.meta(while_line).is_while);
        let mut args = self.enclosing_iteration_terms(while_line);
        if let Some(tr) = trace {
            args.push(tr);
        }
        app(&format!("n{while_line}"), args)
    }

    /// Declare `main_end`, all location symbols and all last-iteration
    /// symbols (in line order) into the signature.
    pub fn declare_symbols(
        &self,
        sig: &mut Signature,
        with_trace: bool,
    ) -> Result<(), crate::error::SortError> {
        let end = FuncDecl {
            name: MAIN_END.to_string(),
            args: Vec::new(),
            result: Sort::Time,
            theory: false,
        };
        sig.declare(&end.name, end.args, end.result)?;
        for line in self.metas.keys() {
            let decl = self.location_symbol(*line);
            sig.declare(&decl.name, decl.args, decl.result)?;
        }
        for (line, meta) in self.metas.iter() {
            if meta.is_while {
                let decl = self.last_iteration_symbol(*line, with_trace);
                sig.declare(&decl.name, decl.args, decl.result)?;
            }
        }
        Ok(())
    }
}

fn analyze_block(
    stmts: &[Statement],
    enclosing: &[Line],
    block_end: EndKind,
    metas: &mut BTreeMap<Line, StmtMeta>,
) {
    for (i, s) in stmts.iter().enumerate() {
        let end = match stmts.get(i + 1) {
            Some(next) => EndKind::NextStatement(next.line()),
            None => block_end,
        };
        metas.insert(
            s.line(),
            StmtMeta {
                is_while: s.is_while(),
                enclosing: enclosing.to_vec(),
                end,
            },
        );
        match s {
            Statement::IfElse {
                then_branch,
                else_branch,
                ..
            } => {
                // A branch's last statement ends where the if-else ends.
                analyze_block(then_branch, enclosing, end, metas);
                analyze_block(else_branch, enclosing, end, metas);
            }
            Statement::While { line, body, .. } => {
                let mut inner = enclosing.to_vec();
                inner.push(*line);
                analyze_block(body, &inner, EndKind::LoopBack(*line), metas);
            }
            _ => {}
        }
    }
}
