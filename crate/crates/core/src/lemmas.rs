//! Generated trace lemmas: inductive consequences of the semantics added as
//! axioms to guide provers, instantiated per loop and per variable.
//!
//! Counter-specific lemmas (monotonicity, injectivity, intermediate value)
//! are guarded by an explicit denseness premise — the variable increases by
//! exactly one per iteration — instead of a syntactic counter analysis, so
//! every emitted instance holds in all execution-interpretations and the
//! prover discharges the premise from the semantics when applicable.

use std::collections::BTreeSet;

use crate::ast::{Line, Program, Statement, VarDecl};
use crate::fol::{succ, var, zero, Formula, LabeledFormula, Sort, Term};
use crate::semantics::{trace_var, Encoder, TraceMode, VariableSymbolization, TRACE_VAR};
use crate::timepoints::ProgramContext;

/// The lemma catalogue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SchemaId {
    EqPres,
    EqPresSuffix,
    EqPresArray,
    SameTermination,
    Monotonicity,
    Injectivity,
    IntermediateValue,
    UnchangedInduction,
    SameValues,
    AtLeastOneIteration,
}

/// What a schema is instantiated with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemaTarget {
    Loop,
    MutableScalar,
    MutableArray,
}

impl SchemaId {
    pub const ALL: [SchemaId; 10] = [
        SchemaId::EqPres,
        SchemaId::EqPresSuffix,
        SchemaId::EqPresArray,
        SchemaId::SameTermination,
        SchemaId::Monotonicity,
        SchemaId::Injectivity,
        SchemaId::IntermediateValue,
        SchemaId::UnchangedInduction,
        SchemaId::SameValues,
        SchemaId::AtLeastOneIteration,
    ];

    pub fn id(self) -> &'static str {
        match self {
            SchemaId::EqPres => "eqpres",
            SchemaId::EqPresSuffix => "eqpres-suffix",
            SchemaId::EqPresArray => "eqpres-array",
            SchemaId::SameTermination => "same-termination",
            SchemaId::Monotonicity => "monotonicity",
            SchemaId::Injectivity => "injectivity",
            SchemaId::IntermediateValue => "intermediate-value",
            SchemaId::UnchangedInduction => "unchanged-induction",
            SchemaId::SameValues => "same-values",
            SchemaId::AtLeastOneIteration => "at-least-one-iteration",
        }
    }

    pub fn parse(text: &str) -> Option<SchemaId> {
        SchemaId::ALL.iter().copied().find(|s| s.id() == text)
    }

    pub fn target(self) -> SchemaTarget {
        match self {
            SchemaId::SameTermination | SchemaId::AtLeastOneIteration => SchemaTarget::Loop,
            SchemaId::EqPresArray => SchemaTarget::MutableArray,
            _ => SchemaTarget::MutableScalar,
        }
    }

    /// Schemas relating the two trace constants; dropped in one-trace mode.
    pub fn two_trace_only(self) -> bool {
        matches!(
            self,
            SchemaId::EqPres
                | SchemaId::EqPresSuffix
                | SchemaId::EqPresArray
                | SchemaId::SameTermination
                | SchemaId::SameValues
        )
    }
}

/// One generated lemma.
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaInstance {
    pub schema: SchemaId,
    pub loop_line: Line,
    pub var: Option<String>,
    pub label: String,
    pub formula: Formula,
}

impl LemmaInstance {
    pub fn to_labeled(&self) -> LabeledFormula {
        LabeledFormula::new(self.label.clone(), self.formula.clone())
    }
}

/// Which schemas to instantiate.
#[derive(Debug, Clone, Default)]
pub struct LemmaConfig {
    /// `None` enables the full catalogue.
    pub whitelist: Option<BTreeSet<SchemaId>>,
}

impl LemmaConfig {
    pub fn all() -> LemmaConfig {
        LemmaConfig::default()
    }

    pub fn only(ids: impl IntoIterator<Item = SchemaId>) -> LemmaConfig {
        LemmaConfig {
            whitelist: Some(ids.into_iter().collect()),
        }
    }

    fn enabled(&self, id: SchemaId) -> bool {
        self.whitelist.as_ref().is_none_or(|w| w.contains(&id))
    }
}

pub struct LemmaBuilder<'a> {
    program: &'a Program,
    ctx: &'a ProgramContext,
    symb: &'a VariableSymbolization,
    encoder: Encoder<'a>,
}

impl<'a> LemmaBuilder<'a> {
    pub fn new(
        program: &'a Program,
        ctx: &'a ProgramContext,
        symb: &'a VariableSymbolization,
    ) -> Self {
        LemmaBuilder {
            program,
            ctx,
            symb,
            encoder: Encoder::new(program, ctx, symb),
        }
    }

    fn mode(&self) -> TraceMode {
        self.symb.mode()
    }

    fn t1(&self) -> Term {
        crate::fol::cst("t1")
    }

    fn t2(&self) -> Term {
        crate::fol::cst("t2")
    }

    /// Quantifier variable name that cannot collide with a program symbol.
    fn fresh(&self, base: &str) -> String {
        if self.program.decl(base).is_none() {
            return base.to_string();
        }
        for i in 1.. {
            let candidate = format!("{base}_{i}");
            if self.program.decl(&candidate).is_none() {
                return candidate;
            }
        }
        unreachable!()
    }

    /// `lastIt` of a loop in a given trace (trace argument dropped in
    /// one-trace mode).
    fn last_it(&self, line: Line, tr: &Term) -> Term {
        match self.mode() {
            TraceMode::One => self.ctx.last_iteration(line, None),
            TraceMode::Two => self.ctx.last_iteration(line, Some(tr.clone())),
        }
    }

    /// Value of a scalar at the loop-head timepoint of iteration `it`.
    fn at(&self, v: &str, line: Line, it: Term, tr: &Term) -> Term {
        self.symb.scalar(v, &self.ctx.tp_loop(line, it), tr)
    }

    /// `Eq_v(it)`: equal values across the two traces at iteration `it`.
    fn eq_across(&self, v: &str, line: Line, it: Term) -> Formula {
        Formula::eq(
            self.at(v, line, it.clone(), &self.t1()),
            self.at(v, line, it, &self.t2()),
        )
    }

    fn eq_across_array(&self, a: &str, line: Line, it: Term, pos: &Term) -> Formula {
        Formula::eq(
            self.symb
                .array(a, &self.ctx.tp_loop(line, it.clone()), pos.clone(), &self.t1()),
            self.symb
                .array(a, &self.ctx.tp_loop(line, it), pos.clone(), &self.t2()),
        )
    }

    /// The denseness premise: the variable increases by exactly one per
    /// iteration below `lastIt`.
    fn denseness(&self, v: &str, line: Line, it_name: &str, tr: &Term) -> Formula {
        let it = var(it_name, Sort::Nat);
        Formula::forall(
            vec![(it_name, Sort::Nat)],
            Formula::implies(
                Formula::less(it.clone(), self.last_it(line, tr)),
                Formula::eq(
                    self.at(v, line, succ(it.clone()), tr),
                    crate::fol::add(self.at(v, line, it, tr), crate::fol::int(1)),
                ),
            ),
        )
    }

    /// Close over the iteration variables of the loops enclosing `line`.
    fn close_enclosing(&self, line: Line, body: Formula) -> Formula {
        let enclosing = self.ctx.enclosing_loops(line);
        if enclosing.is_empty() {
            return body;
        }
        let vars: Vec<(String, Sort)> = enclosing
            .iter()
            .map(|w| (format!("It{w}"), Sort::Nat))
            .collect();
        Formula::Forall(vars, Box::new(body))
    }

    /// Quantify over the trace variable (two-trace mode) or leave the
    /// formula trace-free (one-trace mode).
    fn close_trace(&self, body: impl FnOnce(&Term) -> Formula) -> Formula {
        let tr = trace_var();
        let inner = body(&tr);
        match self.mode() {
            TraceMode::One => inner,
            TraceMode::Two => {
                Formula::Forall(vec![(TRACE_VAR.to_string(), Sort::Trace)], Box::new(inner))
            }
        }
    }

    fn label(&self, schema: SchemaId, line: Line, v: Option<&str>) -> String {
        match v {
            Some(v) => format!("lemma-{}-l{line}-{v}", schema.id()),
            None => format!("lemma-{}-l{line}", schema.id()),
        }
    }

    fn instance(
        &self,
        schema: SchemaId,
        line: Line,
        v: Option<&str>,
        formula: Formula,
    ) -> LemmaInstance {
        LemmaInstance {
            schema,
            loop_line: line,
            var: v.map(str::to_string),
            label: self.label(schema, line, v),
            formula: self.close_enclosing(line, formula),
        }
    }

    /// Equality preservation from iteration 0 to an arbitrary bound.
    pub fn gen_eq_preservation(&self, w: &Statement, v: &VarDecl) -> LemmaInstance {
        let line = w.line();
        let it_b = self.fresh("itB");
        let it = self.fresh("it");
        let base = self.eq_across(&v.name, line, zero());
        let step = Formula::forall(
            vec![(it.as_str(), Sort::Nat)],
            Formula::implies(
                Formula::and(vec![
                    Formula::less(var(&it, Sort::Nat), var(&it_b, Sort::Nat)),
                    self.eq_across(&v.name, line, var(&it, Sort::Nat)),
                ]),
                self.eq_across(&v.name, line, succ(var(&it, Sort::Nat))),
            ),
        );
        let body = Formula::forall(
            vec![(it_b.as_str(), Sort::Nat)],
            Formula::implies(
                Formula::and(vec![base, step]),
                self.eq_across(&v.name, line, var(&it_b, Sort::Nat)),
            ),
        );
        self.instance(SchemaId::EqPres, line, Some(&v.name), body)
    }

    /// Pointwise equality preservation for mutable arrays.
    pub fn gen_eq_preservation_array(&self, w: &Statement, v: &VarDecl) -> LemmaInstance {
        let line = w.line();
        let pos_name = self.fresh("pos");
        let pos = var(&pos_name, Sort::Int);
        let it_p = self.fresh("itP");
        let it = self.fresh("it");
        let base = self.eq_across_array(&v.name, line, zero(), &pos);
        let step = Formula::forall(
            vec![(it.as_str(), Sort::Nat)],
            Formula::implies(
                Formula::and(vec![
                    Formula::less(var(&it, Sort::Nat), var(&it_p, Sort::Nat)),
                    self.eq_across_array(&v.name, line, var(&it, Sort::Nat), &pos),
                ]),
                self.eq_across_array(&v.name, line, succ(var(&it, Sort::Nat)), &pos),
            ),
        );
        let body = Formula::Forall(
            vec![(pos_name.clone(), Sort::Int), (it_p.clone(), Sort::Nat)],
            Box::new(Formula::implies(
                Formula::and(vec![base, step]),
                self.eq_across_array(&v.name, line, var(&it_p, Sort::Nat), &pos),
            )),
        );
        self.instance(SchemaId::EqPresArray, line, Some(&v.name), body)
    }

    /// Equality preservation from an arbitrary iteration to the last one.
    /// The step is unbounded above, so the conclusion additionally requires
    /// both traces to agree on the last iteration.
    pub fn gen_eq_preservation_suffix(&self, w: &Statement, v: &VarDecl) -> LemmaInstance {
        let line = w.line();
        let it_l = self.fresh("itL");
        let it = self.fresh("it");
        let at_start = self.eq_across(&v.name, line, var(&it_l, Sort::Nat));
        let step = Formula::forall(
            vec![(it.as_str(), Sort::Nat)],
            Formula::implies(
                Formula::and(vec![
                    Formula::leq(var(&it_l, Sort::Nat), var(&it, Sort::Nat)),
                    self.eq_across(&v.name, line, var(&it, Sort::Nat)),
                ]),
                self.eq_across(&v.name, line, succ(var(&it, Sort::Nat))),
            ),
        );
        let same_last = Formula::eq(
            self.last_it(line, &self.t1()),
            self.last_it(line, &self.t2()),
        );
        let conclusion = Formula::eq(
            self.at(&v.name, line, self.last_it(line, &self.t1()), &self.t1()),
            self.at(&v.name, line, self.last_it(line, &self.t2()), &self.t2()),
        );
        let body = Formula::forall(
            vec![(it_l.as_str(), Sort::Nat)],
            Formula::implies(Formula::and(vec![at_start, step, same_last]), conclusion),
        );
        self.instance(SchemaId::EqPresSuffix, line, Some(&v.name), body)
    }

    /// If the condition evaluated in the second trace holds strictly below
    /// the first trace's last iteration and fails at it, both traces
    /// terminate after the same number of iterations.
    pub fn gen_same_termination(&self, w: &Statement) -> LemmaInstance {
        let (line, cond) = match w {
            Statement::While { line, cond, .. } => (*line, cond),
            _ => panic!("same-termination needs a while statement"),
        };
        let it = self.fresh("it");
        let n1 = self.last_it(line, &self.t1());
        let n2 = self.last_it(line, &self.t2());
        let below = Formula::forall(
            vec![(it.as_str(), Sort::Nat)],
            Formula::implies(
                Formula::less(var(&it, Sort::Nat), n1.clone()),
                self.encoder.eval_bool_expr(
                    cond,
                    &self.ctx.tp_loop(line, var(&it, Sort::Nat)),
                    &self.t2(),
                ),
            ),
        );
        let fails_at_last = Formula::not(self.encoder.eval_bool_expr(
            cond,
            &self.ctx.tp_loop(line, n1.clone()),
            &self.t2(),
        ));
        let body = Formula::implies(
            Formula::and(vec![below, fails_at_last]),
            Formula::eq(n2, n1),
        );
        self.instance(SchemaId::SameTermination, line, None, body)
    }

    /// Dense counters are strictly increasing across iterations.
    pub fn gen_value_monotonicity(&self, w: &Statement, v: &VarDecl) -> LemmaInstance {
        let line = w.line();
        let it = self.fresh("it");
        let it1 = self.fresh("it1");
        let it2 = self.fresh("it2");
        let body = self.close_trace(|tr| {
            Formula::implies(
                self.denseness(&v.name, line, &it, tr),
                Formula::Forall(
                    vec![(it1.clone(), Sort::Nat), (it2.clone(), Sort::Nat)],
                    Box::new(Formula::implies(
                        Formula::and(vec![
                            Formula::less(var(&it1, Sort::Nat), var(&it2, Sort::Nat)),
                            Formula::leq(var(&it2, Sort::Nat), self.last_it(line, tr)),
                        ]),
                        Formula::less(
                            self.at(&v.name, line, var(&it1, Sort::Nat), tr),
                            self.at(&v.name, line, var(&it2, Sort::Nat), tr),
                        ),
                    )),
                ),
            )
        });
        self.instance(SchemaId::Monotonicity, line, Some(&v.name), body)
    }

    /// Dense counters take each value at most once.
    pub fn gen_injectivity(&self, w: &Statement, v: &VarDecl) -> LemmaInstance {
        let line = w.line();
        let it = self.fresh("it");
        let it1 = self.fresh("it1");
        let it2 = self.fresh("it2");
        let body = self.close_trace(|tr| {
            Formula::implies(
                self.denseness(&v.name, line, &it, tr),
                Formula::Forall(
                    vec![(it1.clone(), Sort::Nat), (it2.clone(), Sort::Nat)],
                    Box::new(Formula::implies(
                        Formula::and(vec![
                            Formula::leq(var(&it1, Sort::Nat), self.last_it(line, tr)),
                            Formula::leq(var(&it2, Sort::Nat), self.last_it(line, tr)),
                        ]),
                        Formula::implies(
                            Formula::eq(
                                self.at(&v.name, line, var(&it1, Sort::Nat), tr),
                                self.at(&v.name, line, var(&it2, Sort::Nat), tr),
                            ),
                            Formula::eq(var(&it1, Sort::Nat), var(&it2, Sort::Nat)),
                        ),
                    )),
                ),
            )
        });
        self.instance(SchemaId::Injectivity, line, Some(&v.name), body)
    }

    /// A dense counter passes through every value between its first and
    /// last loop-head values.
    pub fn gen_intermediate_value(&self, w: &Statement, v: &VarDecl) -> LemmaInstance {
        let line = w.line();
        let it = self.fresh("it");
        let it_w = self.fresh("itW");
        let val = self.fresh("val");
        let body = self.close_trace(|tr| {
            Formula::implies(
                self.denseness(&v.name, line, &it, tr),
                Formula::forall(
                    vec![(val.as_str(), Sort::Int)],
                    Formula::implies(
                        Formula::and(vec![
                            Formula::leq(
                                self.at(&v.name, line, zero(), tr),
                                var(&val, Sort::Int),
                            ),
                            Formula::less(
                                var(&val, Sort::Int),
                                self.at(&v.name, line, self.last_it(line, tr), tr),
                            ),
                        ]),
                        Formula::exists(
                            vec![(it_w.as_str(), Sort::Nat)],
                            Formula::and(vec![
                                Formula::eq(
                                    var(&val, Sort::Int),
                                    self.at(&v.name, line, var(&it_w, Sort::Nat), tr),
                                ),
                                Formula::less(var(&it_w, Sort::Nat), self.last_it(line, tr)),
                            ]),
                        ),
                    ),
                ),
            )
        });
        self.instance(SchemaId::IntermediateValue, line, Some(&v.name), body)
    }

    /// A variable unchanged across each iteration has the same value at the
    /// first and last iteration.
    pub fn gen_unchanged_induction(&self, w: &Statement, v: &VarDecl) -> LemmaInstance {
        let line = w.line();
        let it = self.fresh("it");
        let body = self.close_trace(|tr| {
            let premise = Formula::forall(
                vec![(it.as_str(), Sort::Nat)],
                Formula::implies(
                    Formula::less(var(&it, Sort::Nat), self.last_it(line, tr)),
                    Formula::eq(
                        self.at(&v.name, line, var(&it, Sort::Nat), tr),
                        self.at(&v.name, line, succ(var(&it, Sort::Nat)), tr),
                    ),
                ),
            );
            Formula::implies(
                premise,
                Formula::eq(
                    self.at(&v.name, line, zero(), tr),
                    self.at(&v.name, line, self.last_it(line, tr), tr),
                ),
            )
        });
        self.instance(SchemaId::UnchangedInduction, line, Some(&v.name), body)
    }

    /// Plain induction: base equality plus an unconditional step give
    /// equality at every iteration.
    pub fn gen_same_values(&self, w: &Statement, v: &VarDecl) -> LemmaInstance {
        let line = w.line();
        let it = self.fresh("it");
        let base = self.eq_across(&v.name, line, zero());
        let step = Formula::forall(
            vec![(it.as_str(), Sort::Nat)],
            Formula::implies(
                self.eq_across(&v.name, line, var(&it, Sort::Nat)),
                self.eq_across(&v.name, line, succ(var(&it, Sort::Nat))),
            ),
        );
        let conclusion = Formula::forall(
            vec![(it.as_str(), Sort::Nat)],
            self.eq_across(&v.name, line, var(&it, Sort::Nat)),
        );
        let body = Formula::implies(Formula::and(vec![base, step]), conclusion);
        self.instance(SchemaId::SameValues, line, Some(&v.name), body)
    }

    /// If the loop condition holds initially, the last iteration has a
    /// predecessor.
    pub fn gen_at_least_one_iteration(&self, w: &Statement) -> LemmaInstance {
        let (line, cond) = match w {
            Statement::While { line, cond, .. } => (*line, cond),
            _ => panic!("at-least-one-iteration needs a while statement"),
        };
        let it = self.fresh("it");
        let body = self.close_trace(|tr| {
            Formula::implies(
                self.encoder
                    .eval_bool_expr(cond, &self.ctx.tp_loop(line, zero()), tr),
                Formula::exists(
                    vec![(it.as_str(), Sort::Nat)],
                    Formula::eq(succ(var(&it, Sort::Nat)), self.last_it(line, tr)),
                ),
            )
        });
        self.instance(SchemaId::AtLeastOneIteration, line, None, body)
    }

    fn gen(&self, schema: SchemaId, w: &Statement, v: Option<&VarDecl>) -> LemmaInstance {
        match schema {
            SchemaId::EqPres => self.gen_eq_preservation(w, v.unwrap()),
            SchemaId::EqPresSuffix => self.gen_eq_preservation_suffix(w, v.unwrap()),
            SchemaId::EqPresArray => self.gen_eq_preservation_array(w, v.unwrap()),
            SchemaId::SameTermination => self.gen_same_termination(w),
            SchemaId::Monotonicity => self.gen_value_monotonicity(w, v.unwrap()),
            SchemaId::Injectivity => self.gen_injectivity(w, v.unwrap()),
            SchemaId::IntermediateValue => self.gen_intermediate_value(w, v.unwrap()),
            SchemaId::UnchangedInduction => self.gen_unchanged_induction(w, v.unwrap()),
            SchemaId::SameValues => self.gen_same_values(w, v.unwrap()),
            SchemaId::AtLeastOneIteration => self.gen_at_least_one_iteration(w),
        }
    }
}

/// All enabled lemma instances: ordered by loop line, then per-loop schemas,
/// then per mutable variable (declaration order) its schemas, each group in
/// catalogue order.
pub fn generate_all(
    program: &Program,
    ctx: &ProgramContext,
    symb: &VariableSymbolization,
    config: &LemmaConfig,
) -> Vec<LemmaInstance> {
    let builder = LemmaBuilder::new(program, ctx, symb);
    let two_trace = symb.mode() == TraceMode::Two;
    let mut out = Vec::new();
    for w in program.loops() {
        for schema in SchemaId::ALL {
            if schema.target() == SchemaTarget::Loop
                && config.enabled(schema)
                && (two_trace || !schema.two_trace_only())
            {
                out.push(builder.gen(schema, w, None));
            }
        }
        for v in program.mutable_vars() {
            let target = if v.is_array {
                SchemaTarget::MutableArray
            } else {
                SchemaTarget::MutableScalar
            };
            for schema in SchemaId::ALL {
                if schema.target() == target
                    && config.enabled(schema)
                    && (two_trace || !schema.two_trace_only())
                {
                    out.push(builder.gen(schema, w, Some(v)));
                }
            }
        }
    }
    out
}
