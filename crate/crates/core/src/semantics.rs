//! Structural semantics of while-programs as trace-logic axioms: one
//! labeled axiom per top-level statement, built by recursion over the
//! statement structure.
//!
//! Per statement kind the encoding asserts: skip preserves all variables;
//! an integer assignment updates its target and frames everything else; an
//! array assignment updates one position and frames the rest pointwise;
//! if-then-else propagates values unchanged into the taken branch and
//! guards the branch encodings by the condition; a while-loop defines its
//! last iteration as the first one falsifying the condition, propagates
//! values into the body each earlier iteration, and equates the loop's end
//! with the condition timepoint at the last iteration.
//!
//! Generated formulas are not simplified: tautological frame instances are
//! emitted verbatim so output stays in 1:1 correspondence with the rules.

use crate::ast::{CmpOp, Expr, Line, Program, Statement, VarDecl};
use crate::error::SortError;
use crate::fol::{app, int, var, Formula, LabeledFormula, Signature, Sort, Term};
use crate::timepoints::{EndKind, ProgramContext};

/// Whether tasks reason about one execution or a pair of executions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceMode {
    One,
    Two,
}

impl TraceMode {
    pub fn trace_count(self) -> usize {
        match self {
            TraceMode::One => 1,
            TraceMode::Two => 2,
        }
    }
}

/// Name of the free trace variable of the semantics.
pub const TRACE_VAR: &str = "tr";

pub fn trace_var() -> Term {
    var(TRACE_VAR, Sort::Trace)
}

/// How a program variable appears in the signature. Mutable variables take
/// a timepoint argument; arrays take a position argument; in two-trace mode
/// every variable takes a trailing trace argument.
#[derive(Debug, Clone)]
pub struct VariableSymbolization {
    decls: Vec<VarDecl>,
    mode: TraceMode,
}

impl VariableSymbolization {
    pub fn new(program: &Program, mode: TraceMode) -> Self {
        VariableSymbolization {
            decls: program.decls.clone(),
            mode,
        }
    }

    pub fn mode(&self) -> TraceMode {
        self.mode
    }

    fn kind(&self, name: &str) -> &VarDecl {
        self.decls
            .iter()
            .find(|d| d.name == name)
            .unwrap_or_else(|| panic!("undeclared variable `{name}`"))
    }

    /// Declare all program variables into the signature, in declaration
    /// order.
    pub fn declare_symbols(&self, sig: &mut Signature) -> Result<(), SortError> {
        for d in &self.decls {
            let mut args = Vec::new();
            if !d.is_const {
                args.push(Sort::Time);
            }
            if d.is_array {
                args.push(Sort::Int);
            }
            if self.mode == TraceMode::Two {
                args.push(Sort::Trace);
            }
            sig.declare(&d.name, args, Sort::Int)?;
        }
        Ok(())
    }

    /// The value of a scalar variable at a timepoint in a trace.
    pub fn scalar(&self, name: &str, tp: &Term, tr: &Term) -> Term {
        let d = self.kind(name);
        assert!(!d.is_array, "`{name}` is an array");
        let mut args = Vec::new();
        if !d.is_const {
            args.push(tp.clone());
        }
        if self.mode == TraceMode::Two {
            args.push(tr.clone());
        }
        Term::App(name.to_string(), args)
    }

    /// The value of an array variable at a position (and timepoint, when
    /// mutable) in a trace.
    pub fn array(&self, name: &str, tp: &Term, pos: Term, tr: &Term) -> Term {
        let d = self.kind(name);
        assert!(d.is_array, "`{name}` is not an array");
        let mut args = Vec::new();
        if !d.is_const {
            args.push(tp.clone());
        }
        args.push(pos);
        if self.mode == TraceMode::Two {
            args.push(tr.clone());
        }
        Term::App(name.to_string(), args)
    }
}

/// Deliberate encoder defects for mutation testing of the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EncoderMutation {
    /// The integer-assignment frame no longer excludes the assigned
    /// variable, so the axiom freezes a variable that actually changes.
    DropAssignFrameExclusion,
    /// The array-assignment frame guard has its polarity swapped: the
    /// updated position is claimed to keep its old value.
    SwapArrayFrameGuard,
    /// End-of-body timepoints use the current iteration instead of its
    /// successor in the loop-back case.
    SuccToIdentityInLoopBody,
}

pub struct Encoder<'a> {
    ctx: &'a ProgramContext,
    symb: &'a VariableSymbolization,
    mutables: Vec<VarDecl>,
    mutation: Option<EncoderMutation>,
}

impl<'a> Encoder<'a> {
    pub fn new(
        program: &Program,
        ctx: &'a ProgramContext,
        symb: &'a VariableSymbolization,
    ) -> Self {
        Encoder {
            ctx,
            symb,
            mutables: program.mutable_vars().into_iter().cloned().collect(),
            mutation: None,
        }
    }

    pub fn with_mutation(
        program: &Program,
        ctx: &'a ProgramContext,
        symb: &'a VariableSymbolization,
        mutation: EncoderMutation,
    ) -> Self {
        let mut encoder = Encoder::new(program, ctx, symb);
        encoder.mutation = Some(mutation);
        encoder
    }

    fn last_iteration(&self, while_line: Line, tr: &Term) -> Term {
        match self.symb.mode() {
            TraceMode::One => self.ctx.last_iteration(while_line, None),
            TraceMode::Two => self.ctx.last_iteration(while_line, Some(tr.clone())),
        }
    }

    /// End timepoint of a statement, honoring the loop-back mutation.
    fn end_tp(&self, line: Line) -> Term {
        if self.mutation == Some(EncoderMutation::SuccToIdentityInLoopBody) {
            if let EndKind::LoopBack(w) = self.ctx.end_kind(line) {
                return self.ctx.tp_loop(w, self.ctx.iteration_var(w));
            }
        }
        self.ctx.end(line)
    }

    /// Value of an integer expression at a timepoint in a trace.
    pub fn eval_int_expr(&self, e: &Expr, tp: &Term, tr: &Term) -> Term {
        match e {
            Expr::Int(v) => int(*v),
            Expr::Var(name) => self.symb.scalar(name, tp, tr),
            Expr::ArrayRead(name, idx) => {
                let pos = self.eval_int_expr(idx, tp, tr);
                self.symb.array(name, tp, pos, tr)
            }
            Expr::Arith(op, l, r) => app(
                op.symbol(),
                vec![self.eval_int_expr(l, tp, tr), self.eval_int_expr(r, tp, tr)],
            ),
            _ => panic!("boolean expression in integer position"),
        }
    }

    /// Truth of a boolean expression at a timepoint in a trace. `<=`, `>`
    /// and `>=` are rewritten over `<` and equality.
    pub fn eval_bool_expr(&self, e: &Expr, tp: &Term, tr: &Term) -> Formula {
        match e {
            Expr::Cmp(op, l, r) => {
                let lv = self.eval_int_expr(l, tp, tr);
                let rv = self.eval_int_expr(r, tp, tr);
                match op {
                    CmpOp::Lt => Formula::less(lv, rv),
                    CmpOp::Le => Formula::leq(lv, rv),
                    CmpOp::Gt => Formula::less(rv, lv),
                    CmpOp::Ge => Formula::leq(rv, lv),
                    CmpOp::Eq => Formula::eq(lv, rv),
                    CmpOp::Ne => Formula::neq(lv, rv),
                }
            }
            Expr::And(l, r) => Formula::and(vec![
                self.eval_bool_expr(l, tp, tr),
                self.eval_bool_expr(r, tp, tr),
            ]),
            Expr::Or(l, r) => Formula::or(vec![
                self.eval_bool_expr(l, tp, tr),
                self.eval_bool_expr(r, tp, tr),
            ]),
            Expr::Not(inner) => Formula::not(self.eval_bool_expr(inner, tp, tr)),
            _ => panic!("integer expression in boolean position"),
        }
    }

    /// `Eq(v, tp1, tp2)`: the (mutable) variable has the same values at the
    /// two timepoints. Arrays are compared pointwise.
    pub fn eq_var(&self, v: &VarDecl, tp1: &Term, tp2: &Term, tr: &Term) -> Formula {
        assert!(!v.is_const, "Eq is vacuous for const variables");
        if v.is_array {
            let pos = var("pos", Sort::Int);
            Formula::forall(
                vec![("pos", Sort::Int)],
                Formula::eq(
                    self.symb.array(&v.name, tp1, pos.clone(), tr),
                    self.symb.array(&v.name, tp2, pos, tr),
                ),
            )
        } else {
            Formula::eq(
                self.symb.scalar(&v.name, tp1, tr),
                self.symb.scalar(&v.name, tp2, tr),
            )
        }
    }

    /// `EqAll(tp1, tp2)`: conjunction of `Eq` over all mutable variables
    /// (const variables are trivially preserved and omitted).
    pub fn eq_all(&self, tp1: &Term, tp2: &Term, tr: &Term) -> Formula {
        Formula::and(
            self.mutables
                .iter()
                .map(|v| self.eq_var(v, tp1, tp2, tr))
                .collect(),
        )
    }

    fn frame(&self, except: Option<&str>, end: &Term, tp: &Term, tr: &Term) -> Vec<Formula> {
        let drop_exclusion = self.mutation == Some(EncoderMutation::DropAssignFrameExclusion);
        self.mutables
            .iter()
            .filter(|v| drop_exclusion || Some(v.name.as_str()) != except)
            .map(|v| self.eq_var(v, end, tp, tr))
            .collect()
    }

    /// The trace axiom of a single statement (substatements folded in).
    pub fn encode_statement(&self, s: &Statement, tr: &Term) -> Formula {
        match s {
            Statement::Skip { line } => {
                let end = self.end_tp(*line);
                let tp = self.ctx.tp(*line);
                self.eq_all(&end, &tp, tr)
            }
            Statement::IntAssign {
                line,
                target,
                value,
            } => {
                let end = self.end_tp(*line);
                let tp = self.ctx.tp(*line);
                let update = Formula::eq(
                    self.symb.scalar(target, &end, tr),
                    self.eval_int_expr(value, &tp, tr),
                );
                let mut clauses = vec![update];
                clauses.extend(self.frame(Some(target), &end, &tp, tr));
                Formula::and(clauses)
            }
            Statement::ArrayAssign {
                line,
                array,
                index,
                value,
            } => {
                let end = self.end_tp(*line);
                let tp = self.ctx.tp(*line);
                let idx = self.eval_int_expr(index, &tp, tr);
                let pos = var("pos", Sort::Int);
                let guard = if self.mutation == Some(EncoderMutation::SwapArrayFrameGuard) {
                    Formula::eq(pos.clone(), idx.clone())
                } else {
                    Formula::neq(pos.clone(), idx.clone())
                };
                let pointwise_frame = Formula::forall(
                    vec![("pos", Sort::Int)],
                    Formula::implies(
                        guard,
                        Formula::eq(
                            self.symb.array(array, &end, pos.clone(), tr),
                            self.symb.array(array, &tp, pos, tr),
                        ),
                    ),
                );
                let update = Formula::eq(
                    self.symb.array(array, &end, idx, tr),
                    self.eval_int_expr(value, &tp, tr),
                );
                let mut clauses = vec![pointwise_frame, update];
                clauses.extend(self.frame(Some(array), &end, &tp, tr));
                Formula::and(clauses)
            }
            Statement::IfElse {
                line,
                cond,
                then_branch,
                else_branch,
            } => {
                let tp = self.ctx.tp(*line);
                let cond_holds = self.eval_bool_expr(cond, &tp, tr);
                let enter_then = Formula::implies(
                    cond_holds.clone(),
                    self.eq_all(&self.ctx.start(then_branch[0].line()), &tp, tr),
                );
                let enter_else = Formula::implies(
                    Formula::not(cond_holds.clone()),
                    self.eq_all(&self.ctx.start(else_branch[0].line()), &tp, tr),
                );
                let run_then = Formula::implies(
                    cond_holds.clone(),
                    Formula::and(
                        then_branch
                            .iter()
                            .map(|st| self.encode_statement(st, tr))
                            .collect(),
                    ),
                );
                let run_else = Formula::implies(
                    Formula::not(cond_holds),
                    Formula::and(
                        else_branch
                            .iter()
                            .map(|st| self.encode_statement(st, tr))
                            .collect(),
                    ),
                );
                Formula::and(vec![enter_then, enter_else, run_then, run_else])
            }
            Statement::While { line, cond, body } => {
                let it = self.ctx.iteration_var(*line);
                let it_name = match &it {
                    Term::Var(name, _) => name.clone(),
                    _ => unreachable!(),
                };
                let last = self.last_iteration(*line, tr);
                let quantify = |body: Formula| {
                    Formula::Forall(vec![(it_name.clone(), Sort::Nat)], Box::new(body))
                };

                let cond_below_last = quantify(Formula::implies(
                    Formula::less(it.clone(), last.clone()),
                    self.eval_bool_expr(cond, &self.ctx.tp_loop(*line, it.clone()), tr),
                ));
                let cond_fails_at_last = Formula::not(self.eval_bool_expr(
                    cond,
                    &self.ctx.tp_loop(*line, last.clone()),
                    tr,
                ));
                let enter_body = quantify(Formula::implies(
                    Formula::less(it.clone(), last.clone()),
                    self.eq_all(
                        &self.ctx.start(body[0].line()),
                        &self.ctx.tp_loop(*line, it.clone()),
                        tr,
                    ),
                ));
                let run_body = quantify(Formula::implies(
                    Formula::less(it.clone(), last.clone()),
                    Formula::and(
                        body.iter()
                            .map(|st| self.encode_statement(st, tr))
                            .collect(),
                    ),
                ));
                let exit = self.eq_all(
                    &self.end_tp(*line),
                    &self.ctx.tp_loop(*line, last),
                    tr,
                );
                Formula::and(vec![
                    cond_below_last,
                    cond_fails_at_last,
                    enter_body,
                    run_body,
                    exit,
                ])
            }
        }
    }

    /// One labeled axiom per top-level statement. In two-trace mode each
    /// axiom is universally closed over the free trace variable.
    pub fn encode_program(&self, program: &Program) -> Vec<LabeledFormula> {
        let tr = trace_var();
        program
            .body
            .iter()
            .map(|s| {
                let formula = self.encode_statement(s, &tr);
                let formula = match self.symb.mode() {
                    TraceMode::One => formula,
                    TraceMode::Two => {
                        Formula::Forall(vec![(TRACE_VAR.to_string(), Sort::Trace)], Box::new(formula))
                    }
                };
                LabeledFormula::new(format!("semantics-l{}", s.line()), formula)
            })
            .collect()
    }
}
