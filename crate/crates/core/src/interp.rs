//! Reference interpreter: small-step execution of while-programs, recording
//! the full state at every visited timepoint (the execution-interpretation).
//!
//! Continuations are statement sequences in which while-statements carry an
//! iteration counter; the counter annotation makes every continuation — and
//! hence every visited ground timepoint — unique within one execution.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::ast::{ArithOp, CmpOp, Expr, Line, Program, Statement};
use crate::error::InterpError;
use crate::timepoints::ProgramContext;

/// Concrete input: values for const variables and initial values for
/// mutable ones. Anything unspecified defaults to 0; arrays default to 0
/// outside their given entries.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConcreteInput {
    pub scalars: BTreeMap<String, i64>,
    pub arrays: BTreeMap<String, BTreeMap<i64, i64>>,
}

impl ConcreteInput {
    pub fn set_scalar(&mut self, name: &str, value: i64) {
        self.scalars.insert(name.to_string(), value);
    }

    pub fn set_array(&mut self, name: &str, values: &[i64]) {
        let map = values
            .iter()
            .enumerate()
            .map(|(i, v)| (i as i64, *v))
            .collect();
        self.arrays.insert(name.to_string(), map);
    }

    pub fn validate(&self, program: &Program) -> Result<(), InterpError> {
        for name in self.scalars.keys() {
            match program.decl(name) {
                Some(d) if !d.is_array => {}
                Some(_) => {
                    return Err(InterpError::BadInput(format!(
                        "`{name}` is an array, got a scalar value"
                    )))
                }
                None => {
                    return Err(InterpError::BadInput(format!("unknown variable `{name}`")))
                }
            }
        }
        for name in self.arrays.keys() {
            match program.decl(name) {
                Some(d) if d.is_array => {}
                Some(_) => {
                    return Err(InterpError::BadInput(format!(
                        "`{name}` is a scalar, got an array value"
                    )))
                }
                None => {
                    return Err(InterpError::BadInput(format!("unknown variable `{name}`")))
                }
            }
        }
        Ok(())
    }
}

/// A full variable state: every declared scalar and the finite support of
/// every declared array.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct State {
    pub scalars: BTreeMap<String, i64>,
    pub arrays: BTreeMap<String, BTreeMap<i64, i64>>,
}

impl State {
    pub fn scalar(&self, name: &str) -> Option<i64> {
        self.scalars.get(name).copied()
    }

    pub fn array_at(&self, name: &str, pos: i64) -> Option<i64> {
        self.arrays
            .get(name)
            .map(|m| m.get(&pos).copied().unwrap_or(0))
    }
}

/// A ground timepoint: a location with concrete iteration arguments, or the
/// end of the program.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroundTp {
    Loc(Line, Vec<u64>),
    End,
}

impl fmt::Display for GroundTp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroundTp::Loc(line, args) => {
                write!(f, "l{line}")?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
            GroundTp::End => write!(f, "main_end"),
        }
    }
}

/// One execution's states at every visited ground timepoint, plus the
/// recorded last iteration of every executed loop instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRecord {
    points: Vec<(GroundTp, State)>,
    index: HashMap<GroundTp, usize>,
    /// (loop line, enclosing iterations) -> iteration where the condition
    /// first failed.
    last_it: BTreeMap<(Line, Vec<u64>), u64>,
    pub input: ConcreteInput,
}

impl TraceRecord {
    pub fn state_at(&self, tp: &GroundTp) -> Option<&State> {
        self.index.get(tp).map(|i| &self.points[*i].1)
    }

    pub fn final_state(&self) -> &State {
        self.state_at(&GroundTp::End)
            .expect("every complete run records main_end")
    }

    pub fn points(&self) -> &[(GroundTp, State)] {
        &self.points
    }

    pub fn last_iteration(&self, line: Line, enclosing: &[u64]) -> Option<u64> {
        self.last_it.get(&(line, enclosing.to_vec())).copied()
    }

    /// Largest recorded last-iteration value (0 when the program is
    /// loop-free); the oracle derives its `Nat` bound from this.
    pub fn max_last_iteration(&self) -> u64 {
        self.last_it.values().copied().max().unwrap_or(0)
    }

    /// Every integer occurring in states and inputs: scalar values, array
    /// positions and array values.
    pub fn collect_ints(&self, out: &mut BTreeSet<i64>) {
        let mut from_state = |state: &State| {
            out.extend(state.scalars.values().copied());
            for entries in state.arrays.values() {
                out.extend(entries.keys().copied());
                out.extend(entries.values().copied());
            }
        };
        for (_, state) in &self.points {
            from_state(state);
        }
        out.extend(self.input.scalars.values().copied());
        for entries in self.input.arrays.values() {
            out.extend(entries.keys().copied());
            out.extend(entries.values().copied());
        }
    }
}

/// Default step budget.
pub const DEFAULT_FUEL: u64 = 1_000_000;

enum Cont<'p> {
    Stmt(&'p Statement),
    /// A while statement annotated with its iteration counter.
    Loop(&'p Statement, u64),
}

impl<'p> Cont<'p> {
    fn statement(&self) -> &'p Statement {
        match self {
            Cont::Stmt(s) | Cont::Loop(s, _) => s,
        }
    }
}

/// Run the program on the given input, applying the small-step rules until
/// the continuation is empty and recording the state at every visited
/// timepoint.
pub fn run(
    program: &Program,
    input: &ConcreteInput,
    fuel: u64,
) -> Result<TraceRecord, InterpError> {
    input.validate(program)?;
    let ctx = ProgramContext::analyze(program);

    let mut state = State::default();
    for d in &program.decls {
        if d.is_array {
            state
                .arrays
                .insert(d.name.clone(), input.arrays.get(&d.name).cloned().unwrap_or_default());
        } else {
            state
                .scalars
                .insert(d.name.clone(), input.scalars.get(&d.name).copied().unwrap_or(0));
        }
    }

    let mut record = TraceRecord {
        points: Vec::new(),
        index: HashMap::new(),
        last_it: BTreeMap::new(),
        input: input.clone(),
    };

    let mut cont: Vec<Cont> = Vec::new();
    push_block(&mut cont, &program.body);

    let mut remaining = fuel;
    while let Some(head) = cont.last() {
        if remaining == 0 {
            return Err(InterpError::FuelExhausted { fuel });
        }
        remaining -= 1;

        let stmt = head.statement();
        let line = stmt.line();
        let tp = ground_tp(&ctx, &cont, line);
        record_point(&mut record, tp, state.clone())?;

        match cont.pop().expect("nonempty") {
            Cont::Stmt(s) => match s {
                Statement::Skip { .. } => {}
                Statement::IntAssign { target, value, .. } => {
                    let v = eval_int(&state, value, line)?;
                    state.scalars.insert(target.clone(), v);
                }
                Statement::ArrayAssign {
                    array,
                    index,
                    value,
                    ..
                } => {
                    let pos = eval_int(&state, index, line)?;
                    let v = eval_int(&state, value, line)?;
                    state
                        .arrays
                        .get_mut(array)
                        .expect("declared array")
                        .insert(pos, v);
                }
                Statement::IfElse {
                    cond,
                    then_branch,
                    else_branch,
                    ..
                } => {
                    if eval_bool(&state, cond, line)? {
                        push_block(&mut cont, then_branch);
                    } else {
                        push_block(&mut cont, else_branch);
                    }
                }
                Statement::While { .. } => unreachable!("whiles enter as Cont::Loop"),
            },
            Cont::Loop(s, counter) => {
                let (cond, body) = match s {
                    Statement::While { cond, body, .. } => (cond, body),
                    _ => unreachable!(),
                };
                if eval_bool(&state, cond, line)? {
                    cont.push(Cont::Loop(s, counter + 1));
                    push_block(&mut cont, body);
                } else {
                    let outer = match ground_tp(&ctx, &cont_with(&cont, s), line) {
                        GroundTp::Loc(_, mut args) => {
                            args.pop();
                            args
                        }
                        GroundTp::End => unreachable!(),
                    };
                    record.last_it.insert((line, outer), counter);
                }
            }
        }
    }

    record_point(&mut record, GroundTp::End, state)?;
    Ok(record)
}

/// Temporary continuation view used to recover a loop's enclosing
/// iterations at the moment its condition fails.
fn cont_with<'a, 'p>(cont: &'a [Cont<'p>], s: &'p Statement) -> Vec<Cont<'p>> {
    let mut v: Vec<Cont<'p>> = cont.iter().map(|c| match c {
        Cont::Stmt(s) => Cont::Stmt(s),
        Cont::Loop(s, i) => Cont::Loop(s, *i),
    }).collect();
    v.push(Cont::Loop(s, 0));
    v
}

fn push_block<'p>(cont: &mut Vec<Cont<'p>>, stmts: &'p [Statement]) {
    for s in stmts.iter().rev() {
        match s {
            Statement::While { .. } => cont.push(Cont::Loop(s, 0)),
            _ => cont.push(Cont::Stmt(s)),
        }
    }
}

/// Ground timepoint of the current head statement: its line applied to the
/// current iterations of its enclosing loops (and its own counter if the
/// head is a loop). The current iteration of an enclosing loop is one less
/// than the counter on its residual entry further down the continuation.
fn ground_tp(ctx: &ProgramContext, cont: &[Cont], line: Line) -> GroundTp {
    let head_idx = cont.len() - 1;
    let mut args = Vec::new();
    for w in ctx.enclosing_loops(line) {
        let counter = cont[..head_idx]
            .iter()
            .rev()
            .find_map(|c| match c {
                Cont::Loop(s, i) if s.line() == *w => Some(*i),
                _ => None,
            })
            .expect("residual entry of an enclosing loop is on the continuation");
        args.push(counter - 1);
    }
    if let Cont::Loop(_, counter) = cont[head_idx] {
        args.push(counter);
    }
    GroundTp::Loc(line, args)
}

fn record_point(record: &mut TraceRecord, tp: GroundTp, state: State) -> Result<(), InterpError> {
    if record.index.contains_key(&tp) {
        return Err(InterpError::DuplicateTimepoint(tp.to_string()));
    }
    record.index.insert(tp.clone(), record.points.len());
    record.points.push((tp, state));
    Ok(())
}

fn eval_int(state: &State, e: &Expr, line: Line) -> Result<i64, InterpError> {
    match e {
        Expr::Int(v) => Ok(*v),
        Expr::Var(name) => Ok(state.scalar(name).expect("declared scalar")),
        Expr::ArrayRead(name, idx) => {
            let pos = eval_int(state, idx, line)?;
            Ok(state.array_at(name, pos).expect("declared array"))
        }
        Expr::Arith(op, l, r) => {
            let lv = eval_int(state, l, line)?;
            let rv = eval_int(state, r, line)?;
            let result = match op {
                ArithOp::Add => lv.checked_add(rv),
                ArithOp::Sub => lv.checked_sub(rv),
                ArithOp::Mul => lv.checked_mul(rv),
            };
            result.ok_or(InterpError::Overflow { line })
        }
        _ => unreachable!("type checker rejects booleans in integer position"),
    }
}

fn eval_bool(state: &State, e: &Expr, line: Line) -> Result<bool, InterpError> {
    match e {
        Expr::Cmp(op, l, r) => {
            let lv = eval_int(state, l, line)?;
            let rv = eval_int(state, r, line)?;
            Ok(match op {
                CmpOp::Lt => lv < rv,
                CmpOp::Le => lv <= rv,
                CmpOp::Gt => lv > rv,
                CmpOp::Ge => lv >= rv,
                CmpOp::Eq => lv == rv,
                CmpOp::Ne => lv != rv,
            })
        }
        Expr::And(l, r) => Ok(eval_bool(state, l, line)? && eval_bool(state, r, line)?),
        Expr::Or(l, r) => Ok(eval_bool(state, l, line)? || eval_bool(state, r, line)?),
        Expr::Not(inner) => Ok(!eval_bool(state, inner, line)?),
        _ => unreachable!("type checker rejects integers in boolean position"),
    }
}

/// Deterministic xorshift-style generator for randomized test inputs.
#[derive(Debug, Clone)]
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Rng {
        Rng(seed.wrapping_add(0x9E3779B97F4A7C15))
    }

    pub fn next_u64(&mut self) -> u64 {
        // splitmix64
        self.0 = self.0.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform value in `lo..=hi`.
    pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        let span = (hi - lo + 1) as u64;
        lo + (self.next_u64() % span) as i64
    }
}

/// Randomized input for a program: array lengths 0..=6, values -10..=10.
/// A const scalar named `<arr>length` is pinned to the length of `<arr>`.
pub fn random_input(program: &Program, rng: &mut Rng) -> ConcreteInput {
    let mut input = ConcreteInput::default();
    for d in &program.decls {
        if d.is_array {
            let len = rng.int_in(0, 6);
            let values: Vec<i64> = (0..len).map(|_| rng.int_in(-10, 10)).collect();
            input.set_array(&d.name, &values);
        }
    }
    for d in &program.decls {
        if !d.is_array {
            let paired_array = d
                .name
                .strip_suffix("length")
                .filter(|stem| input.arrays.contains_key(*stem))
                .map(str::to_string);
            let value = match paired_array {
                Some(stem) => input.arrays[&stem].len() as i64,
                None => rng.int_in(-10, 10),
            };
            input.set_scalar(&d.name, value);
        }
    }
    input
}

/// Parse a key/value input fixture. Unsuffixed keys apply to both traces;
/// `name.t1 = ...` / `name.t2 = ...` pin one trace. Returns the two inputs
/// plus whether any trace-suffixed key was present.
pub fn parse_fixture(text: &str) -> Result<(ConcreteInput, ConcreteInput, bool), InterpError> {
    let mut first = ConcreteInput::default();
    let mut second = ConcreteInput::default();
    let mut paired = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("//") {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            InterpError::BadInput(format!("line {}: expected `name = value`", lineno + 1))
        })?;
        let key = key.trim();
        let value = value.trim();
        let (name, targets): (&str, Vec<&mut ConcreteInput>) =
            if let Some(base) = key.strip_suffix(".t1") {
                paired = true;
                (base, vec![&mut first])
            } else if let Some(base) = key.strip_suffix(".t2") {
                paired = true;
                (base, vec![&mut second])
            } else {
                (key, vec![&mut first, &mut second])
            };
        if value.starts_with('[') {
            let inner = value
                .strip_prefix('[')
                .and_then(|v| v.strip_suffix(']'))
                .ok_or_else(|| {
                    InterpError::BadInput(format!("line {}: unclosed array literal", lineno + 1))
                })?;
            let mut values = Vec::new();
            for part in inner.split(',') {
                let part = part.trim();
                if part.is_empty() {
                    continue;
                }
                values.push(part.parse::<i64>().map_err(|_| {
                    InterpError::BadInput(format!("line {}: bad integer `{part}`", lineno + 1))
                })?);
            }
            for t in targets {
                t.set_array(name, &values);
            }
        } else {
            let v = value.parse::<i64>().map_err(|_| {
                InterpError::BadInput(format!("line {}: bad integer `{value}`", lineno + 1))
            })?;
            for t in targets {
                t.set_scalar(name, v);
            }
        }
    }
    Ok((first, second, paired))
}
