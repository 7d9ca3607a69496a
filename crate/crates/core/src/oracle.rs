//! Bounded three-valued evaluation of closed trace-logic formulas against
//! one or two recorded executions.
//!
//! Quantifiers range over finite domains derived from the records and the
//! formula: `Nat` up to the largest recorded last iteration plus two, `Int`
//! over every integer occurring in states, inputs and formula literals
//! (plus one below the minimum and one above the maximum), `Time` over the
//! recorded ground timepoints and `Trace` over the supplied records.
//!
//! A term mentioning an unrecorded timepoint has no defined value; the atom
//! containing it evaluates to `Undetermined`, which poisons only the
//! quantifier instance that produced it. A `false` verdict is therefore
//! always a genuine counterexample, while `true` is bounded evidence.

use std::collections::BTreeSet;

use crate::ast::{Line, Program};
use crate::error::OracleError;
use crate::fol::{Formula, LabeledFormula, Term};
use crate::interp::{GroundTp, TraceRecord};
use crate::semantics::TraceMode;
use crate::timepoints::MAIN_END;

/// Three-valued verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tri {
    True,
    False,
    Undetermined,
}

impl std::fmt::Display for Tri {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Tri::True => "true",
            Tri::False => "false",
            Tri::Undetermined => "undetermined",
        })
    }
}

impl Tri {
    fn not(self) -> Tri {
        match self {
            Tri::True => Tri::False,
            Tri::False => Tri::True,
            Tri::Undetermined => Tri::Undetermined,
        }
    }

    fn and(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::False, _) | (_, Tri::False) => Tri::False,
            (Tri::True, Tri::True) => Tri::True,
            _ => Tri::Undetermined,
        }
    }

    fn or(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::True, _) | (_, Tri::True) => Tri::True,
            (Tri::False, Tri::False) => Tri::False,
            _ => Tri::Undetermined,
        }
    }

    fn implies(self, other: Tri) -> Tri {
        self.not().or(other)
    }

    fn iff(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::Undetermined, _) | (_, Tri::Undetermined) => Tri::Undetermined,
            (a, b) if a == b => Tri::True,
            _ => Tri::False,
        }
    }
}

/// Finite quantifier domains derived from records and formulas.
#[derive(Debug, Clone)]
pub struct BoundedDomain {
    pub nat_max: u64,
    pub ints: Vec<i64>,
    pub times: Vec<GroundTp>,
    pub traces: usize,
}

impl BoundedDomain {
    pub fn new(records: &[&TraceRecord], formulas: &[&Formula]) -> BoundedDomain {
        let nat_max = records
            .iter()
            .map(|r| r.max_last_iteration())
            .max()
            .unwrap_or(0)
            + 2;
        let mut ints = BTreeSet::new();
        for r in records {
            r.collect_ints(&mut ints);
        }
        for f in formulas {
            collect_literals(f, &mut ints);
        }
        if ints.is_empty() {
            ints.insert(0);
        }
        let lo = *ints.iter().next().unwrap();
        let hi = *ints.iter().next_back().unwrap();
        ints.insert(lo - 1);
        ints.insert(hi + 1);

        let mut times: BTreeSet<GroundTp> = BTreeSet::new();
        for r in records {
            times.extend(r.points().iter().map(|(tp, _)| tp.clone()));
        }
        times.insert(GroundTp::End);

        BoundedDomain {
            nat_max,
            ints: ints.into_iter().collect(),
            times: times.into_iter().collect(),
            traces: records.len(),
        }
    }

    /// A copy with extra integers in the domain (used to test that verdicts
    /// are stable under enlargement).
    pub fn with_extra_ints(&self, extra: &[i64]) -> BoundedDomain {
        let mut ints: BTreeSet<i64> = self.ints.iter().copied().collect();
        ints.extend(extra.iter().copied());
        BoundedDomain {
            ints: ints.into_iter().collect(),
            ..self.clone()
        }
    }
}

fn collect_literals(f: &Formula, out: &mut BTreeSet<i64>) {
    fn term(t: &Term, out: &mut BTreeSet<i64>) {
        match t {
            Term::Int(v) => {
                out.insert(*v);
            }
            Term::App(_, args) => args.iter().for_each(|a| term(a, out)),
            Term::Var(..) => {}
        }
    }
    match f {
        Formula::True | Formula::False => {}
        Formula::Eq(l, r) | Formula::Less(l, r) => {
            term(l, out);
            term(r, out);
        }
        Formula::Not(g) => collect_literals(g, out),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| collect_literals(g, out)),
        Formula::Implies(l, r) | Formula::Iff(l, r) => {
            collect_literals(l, out);
            collect_literals(r, out);
        }
        Formula::Forall(_, body) | Formula::Exists(_, body) => collect_literals(body, out),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Value {
    Nat(u64),
    Int(i64),
    Time(GroundTp),
    Trace(usize),
}

/// Evaluator for formulas over a fixed program, mode and record set.
pub struct Evaluator<'a> {
    program: &'a Program,
    mode: TraceMode,
    records: Vec<&'a TraceRecord>,
    domain: BoundedDomain,
}

impl<'a> Evaluator<'a> {
    pub fn new(
        program: &'a Program,
        mode: TraceMode,
        records: &[&'a TraceRecord],
        domain: BoundedDomain,
    ) -> Result<Self, OracleError> {
        if records.len() != mode.trace_count() {
            return Err(OracleError::TraceCount {
                expected: mode.trace_count(),
                actual: records.len(),
            });
        }
        Ok(Evaluator {
            program,
            mode,
            records: records.to_vec(),
            domain,
        })
    }

    pub fn domain(&self) -> &BoundedDomain {
        &self.domain
    }

    pub fn eval(&self, f: &Formula) -> Result<Tri, OracleError> {
        let mut env = Vec::new();
        self.eval_formula(f, &mut env)
    }

    fn eval_formula(
        &self,
        f: &Formula,
        env: &mut Vec<(String, Value)>,
    ) -> Result<Tri, OracleError> {
        match f {
            Formula::True => Ok(Tri::True),
            Formula::False => Ok(Tri::False),
            Formula::Eq(l, r) => {
                let lv = self.eval_term(l, env)?;
                let rv = self.eval_term(r, env)?;
                Ok(match (lv, rv) {
                    (Some(a), Some(b)) => {
                        if a == b {
                            Tri::True
                        } else {
                            Tri::False
                        }
                    }
                    _ => Tri::Undetermined,
                })
            }
            Formula::Less(l, r) => {
                let lv = self.eval_term(l, env)?;
                let rv = self.eval_term(r, env)?;
                Ok(match (lv, rv) {
                    (Some(Value::Nat(a)), Some(Value::Nat(b))) => {
                        if a < b {
                            Tri::True
                        } else {
                            Tri::False
                        }
                    }
                    (Some(Value::Int(a)), Some(Value::Int(b))) => {
                        if a < b {
                            Tri::True
                        } else {
                            Tri::False
                        }
                    }
                    (Some(_), Some(_)) => {
                        return Err(OracleError::UnboundSymbol(
                            "`<` applied to non-numeric values".into(),
                        ))
                    }
                    _ => Tri::Undetermined,
                })
            }
            Formula::Not(g) => Ok(self.eval_formula(g, env)?.not()),
            Formula::And(gs) => {
                let mut acc = Tri::True;
                for g in gs {
                    acc = acc.and(self.eval_formula(g, env)?);
                    if acc == Tri::False {
                        break;
                    }
                }
                Ok(acc)
            }
            Formula::Or(gs) => {
                let mut acc = Tri::False;
                for g in gs {
                    acc = acc.or(self.eval_formula(g, env)?);
                    if acc == Tri::True {
                        break;
                    }
                }
                Ok(acc)
            }
            Formula::Implies(l, r) => {
                let lv = self.eval_formula(l, env)?;
                if lv == Tri::False {
                    return Ok(Tri::True);
                }
                let rv = self.eval_formula(r, env)?;
                Ok(lv.implies(rv))
            }
            Formula::Iff(l, r) => {
                let lv = self.eval_formula(l, env)?;
                let rv = self.eval_formula(r, env)?;
                Ok(lv.iff(rv))
            }
            Formula::Forall(vars, body) => self.eval_quant(vars, body, env, true),
            Formula::Exists(vars, body) => self.eval_quant(vars, body, env, false),
        }
    }

    fn eval_quant(
        &self,
        vars: &[(String, crate::fol::Sort)],
        body: &Formula,
        env: &mut Vec<(String, Value)>,
        universal: bool,
    ) -> Result<Tri, OracleError> {
        if vars.is_empty() {
            return self.eval_formula(body, env);
        }
        let (name, sort) = &vars[0];
        let rest = &vars[1..];
        let values: Vec<Value> = match sort {
            crate::fol::Sort::Nat => (0..=self.domain.nat_max).map(Value::Nat).collect(),
            crate::fol::Sort::Int => self.domain.ints.iter().copied().map(Value::Int).collect(),
            crate::fol::Sort::Time => self
                .domain
                .times
                .iter()
                .cloned()
                .map(Value::Time)
                .collect(),
            crate::fol::Sort::Trace => (0..self.domain.traces).map(Value::Trace).collect(),
        };
        let mut acc = if universal { Tri::True } else { Tri::False };
        for v in values {
            env.push((name.clone(), v));
            let inst = self.eval_quant(rest, body, env, universal)?;
            env.pop();
            acc = if universal {
                acc.and(inst)
            } else {
                acc.or(inst)
            };
            if (universal && acc == Tri::False) || (!universal && acc == Tri::True) {
                break;
            }
        }
        Ok(acc)
    }

    /// Evaluate a term; `None` means the value is not determined by the
    /// records (an unrecorded timepoint was mentioned).
    fn eval_term(
        &self,
        t: &Term,
        env: &[(String, Value)],
    ) -> Result<Option<Value>, OracleError> {
        match t {
            Term::Int(v) => Ok(Some(Value::Int(*v))),
            Term::Var(name, _) => env
                .iter()
                .rev()
                .find(|(n, _)| n == name)
                .map(|(_, v)| Some(v.clone()))
                .ok_or_else(|| OracleError::UnboundVariable(name.clone())),
            Term::App(name, args) => {
                let mut values = Vec::with_capacity(args.len());
                for a in args {
                    match self.eval_term(a, env)? {
                        Some(v) => values.push(v),
                        None => return Ok(None),
                    }
                }
                self.apply(name, values)
            }
        }
    }

    fn apply(&self, name: &str, args: Vec<Value>) -> Result<Option<Value>, OracleError> {
        match name {
            "zero" => return Ok(Some(Value::Nat(0))),
            "s" => {
                if let [Value::Nat(n)] = args[..] {
                    return Ok(Some(Value::Nat(n + 1)));
                }
            }
            "p" => {
                // Selector applied to `zero` is underspecified; 0 is as good
                // a choice as any for bounded evidence.
                if let [Value::Nat(n)] = args[..] {
                    return Ok(Some(Value::Nat(n.saturating_sub(1))));
                }
            }
            "+" | "-" | "*" => {
                if let [Value::Int(a), Value::Int(b)] = args[..] {
                    let r = match name {
                        "+" => a.checked_add(b),
                        "-" => a.checked_sub(b),
                        _ => a.checked_mul(b),
                    };
                    return r.map(|v| Some(Value::Int(v))).ok_or(OracleError::Overflow);
                }
            }
            "t1" => return Ok(Some(Value::Trace(0))),
            "t2" => {
                if self.records.len() < 2 {
                    return Err(OracleError::TraceCount {
                        expected: 2,
                        actual: self.records.len(),
                    });
                }
                return Ok(Some(Value::Trace(1)));
            }
            _ if name == MAIN_END => return Ok(Some(Value::Time(GroundTp::End))),
            _ => {}
        }

        if let Some(line) = symbol_line(name, 'l') {
            let mut nat_args = Vec::with_capacity(args.len());
            for a in &args {
                match a {
                    Value::Nat(n) => nat_args.push(*n),
                    _ => {
                        return Err(OracleError::UnboundSymbol(format!(
                            "location `{name}` applied to a non-Nat argument"
                        )))
                    }
                }
            }
            return Ok(Some(Value::Time(GroundTp::Loc(line, nat_args))));
        }

        if let Some(line) = symbol_line(name, 'n') {
            let (trace, iters) = self.split_trace_arg(&args)?;
            return Ok(self.records[trace]
                .last_iteration(line, &iters)
                .map(Value::Nat));
        }

        if let Some(decl) = self.program.decl(name) {
            return self.read_variable(decl, args);
        }

        Err(OracleError::UnboundSymbol(name.to_string()))
    }

    /// Split off the trailing trace argument (two-trace mode only) and
    /// coerce the rest to Nat iteration values.
    fn split_trace_arg(&self, args: &[Value]) -> Result<(usize, Vec<u64>), OracleError> {
        let (trace, rest) = match self.mode {
            TraceMode::Two => match args.split_last() {
                Some((Value::Trace(t), rest)) => (*t, rest),
                _ => {
                    return Err(OracleError::UnboundSymbol(
                        "last-iteration symbol expects a trace argument".into(),
                    ))
                }
            },
            TraceMode::One => (0, args),
        };
        let mut iters = Vec::with_capacity(rest.len());
        for a in rest {
            match a {
                Value::Nat(n) => iters.push(*n),
                _ => {
                    return Err(OracleError::UnboundSymbol(
                        "last-iteration symbol expects Nat arguments".into(),
                    ))
                }
            }
        }
        Ok((trace, iters))
    }

    fn read_variable(
        &self,
        decl: &crate::ast::VarDecl,
        args: Vec<Value>,
    ) -> Result<Option<Value>, OracleError> {
        let bad = || {
            OracleError::UnboundSymbol(format!(
                "variable `{}` applied to ill-sorted arguments",
                decl.name
            ))
        };
        let mut args = args;
        let trace = match self.mode {
            TraceMode::Two => match args.pop() {
                Some(Value::Trace(t)) => t,
                _ => return Err(bad()),
            },
            TraceMode::One => 0,
        };
        let record = self.records[trace];
        match (decl.is_const, decl.is_array) {
            (true, false) => {
                if !args.is_empty() {
                    return Err(bad());
                }
                Ok(Some(Value::Int(
                    record.input.scalars.get(&decl.name).copied().unwrap_or(0),
                )))
            }
            (true, true) => match args[..] {
                [Value::Int(pos)] => Ok(Some(Value::Int(
                    record
                        .input
                        .arrays
                        .get(&decl.name)
                        .and_then(|m| m.get(&pos))
                        .copied()
                        .unwrap_or(0),
                ))),
                _ => Err(bad()),
            },
            (false, false) => match &args[..] {
                [Value::Time(tp)] => Ok(record
                    .state_at(tp)
                    .map(|st| Value::Int(st.scalar(&decl.name).unwrap_or(0)))),
                _ => Err(bad()),
            },
            (false, true) => match &args[..] {
                [Value::Time(tp), Value::Int(pos)] => Ok(record
                    .state_at(tp)
                    .map(|st| Value::Int(st.array_at(&decl.name, *pos).unwrap_or(0)))),
                _ => Err(bad()),
            },
        }
    }
}

/// Evaluate one closed formula against the records, deriving the bounded
/// domain from the records and the formula itself.
pub fn evaluate(
    f: &Formula,
    program: &Program,
    mode: TraceMode,
    records: &[&TraceRecord],
) -> Result<Tri, OracleError> {
    let domain = BoundedDomain::new(records, &[f]);
    Evaluator::new(program, mode, records, domain)?.eval(f)
}

/// Per-formula verdicts for a list of labeled axioms, sharing one domain
/// built from all of them.
pub fn check_formulas(
    axioms: &[LabeledFormula],
    program: &Program,
    mode: TraceMode,
    records: &[&TraceRecord],
) -> Result<Vec<(String, Tri)>, OracleError> {
    let formulas: Vec<&Formula> = axioms.iter().map(|a| &a.formula).collect();
    let domain = BoundedDomain::new(records, &formulas);
    let evaluator = Evaluator::new(program, mode, records, domain)?;
    axioms
        .iter()
        .map(|a| Ok((a.label.clone(), evaluator.eval(&a.formula)?)))
        .collect()
}

/// Verdict table for one task against one record set.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskReport {
    pub axioms: Vec<(String, Tri)>,
    pub conjecture: Option<(String, Tri)>,
}

impl TaskReport {
    /// The task passes iff no axiom evaluates to false. A false conjecture
    /// is a counterexample report, not an encoding failure.
    pub fn pass(&self) -> bool {
        self.axioms.iter().all(|(_, v)| *v != Tri::False)
    }

    pub fn counterexample(&self) -> bool {
        matches!(self.conjecture, Some((_, Tri::False)))
    }

    /// One line per axiom, `<label> <true|false|undetermined>`, plus a
    /// summary line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (label, verdict) in &self.axioms {
            out.push_str(&format!("{label} {verdict}\n"));
        }
        if let Some((name, verdict)) = &self.conjecture {
            out.push_str(&format!("conjecture {name} {verdict}\n"));
        }
        let (mut t, mut f, mut u) = (0, 0, 0);
        for (_, v) in &self.axioms {
            match v {
                Tri::True => t += 1,
                Tri::False => f += 1,
                Tri::Undetermined => u += 1,
            }
        }
        out.push_str(&format!(
            "summary: {} axioms, {t} true, {f} false, {u} undetermined -> {}\n",
            self.axioms.len(),
            if self.pass() { "PASS" } else { "FAIL" }
        ));
        out
    }
}

/// Evaluate every axiom of a task (and its conjecture, separately) against
/// the records, sharing one bounded domain derived from the whole task.
pub fn check_task(
    task: &crate::smtlib::ReasoningTask,
    program: &Program,
    records: &[&TraceRecord],
) -> Result<TaskReport, OracleError> {
    let mut formulas: Vec<&Formula> = task.axioms.iter().map(|a| &a.formula).collect();
    if let Some(c) = &task.conjecture {
        formulas.push(&c.formula);
    }
    let domain = BoundedDomain::new(records, &formulas);
    let evaluator = Evaluator::new(program, task.mode, records, domain)?;
    let axioms = task
        .axioms
        .iter()
        .map(|a| Ok((a.label.clone(), evaluator.eval(&a.formula)?)))
        .collect::<Result<Vec<_>, OracleError>>()?;
    let conjecture = match &task.conjecture {
        Some(c) => Some((c.name.clone(), evaluator.eval(&c.formula)?)),
        None => None,
    };
    Ok(TaskReport { axioms, conjecture })
}

fn symbol_line(name: &str, prefix: char) -> Option<Line> {
    let rest = name.strip_prefix(prefix)?;
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}
