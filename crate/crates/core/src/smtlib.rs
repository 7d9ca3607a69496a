//! SMT-LIB 2 backend: the reasoning task (signature, ordered labeled
//! axioms, negated conjecture) and its byte-deterministic serialization,
//! plus a strict reader used to round-trip emitted files in tests.
//!
//! Naturals are emitted as the datatype `(zero, s)` with selector `p`;
//! `p zero` is thereby underspecified, matching the loose treatment of the
//! predecessor. The order over `Nat` is the uninterpreted `Nat_less` with
//! its incomplete axiom set asserted up front; integer reasoning uses the
//! solver's built-in theory, so no `Int` axioms are emitted.

use crate::error::{PropertyError, SortError};
use crate::fol::{check_sorts, LabeledFormula, Formula, Signature, Sort, Term};
use crate::properties::Conjecture;
use crate::semantics::TraceMode;
use crate::sexpr::{Reader, SExpr};

/// A named proving task: axioms (theory, semantics, lemmas — in that
/// order), the conjecture, and the signature every symbol is declared in.
#[derive(Debug, Clone)]
pub struct ReasoningTask {
    pub signature: Signature,
    pub axioms: Vec<LabeledFormula>,
    pub conjecture: Option<Conjecture>,
    pub mode: TraceMode,
    /// Origin of the task (source file stem), for reports.
    pub source: Option<String>,
}

impl ReasoningTask {
    /// Check the task invariants: every axiom and the conjecture are closed
    /// and well-sorted against the signature.
    pub fn validate(&self) -> Result<(), SortError> {
        for axiom in &self.axioms {
            check_sorts(&axiom.formula, &self.signature)?;
            if !axiom.formula.is_closed() {
                return Err(SortError::Mismatch(format!(
                    "axiom `{}` is not closed",
                    axiom.label
                )));
            }
        }
        if let Some(c) = &self.conjecture {
            check_sorts(&c.formula, &self.signature)?;
            if !c.formula.is_closed() {
                return Err(SortError::Mismatch("conjecture is not closed".into()));
            }
        }
        Ok(())
    }
}

/// One SMT-LIB command of an emitted script.
#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    SetLogic(String),
    DeclareNatDatatype,
    DeclareSort(String),
    DeclareConst(String, Sort),
    DeclareNatLess,
    DeclareFun(String, Vec<Sort>, Sort),
    Assert {
        label: Option<String>,
        formula: Formula,
    },
    CheckSat,
}

pub type Script = Vec<Command>;

/// Build the command list of a task: fixed preamble, trace constants with a
/// distinctness assertion (two-trace mode), `Nat_less` and its axioms
/// interleaved with the task's own axiom order, then the negated
/// conjecture.
pub fn script_of(task: &ReasoningTask) -> Script {
    let mut script = vec![
        Command::SetLogic("ALL".into()),
        Command::DeclareNatDatatype,
        Command::DeclareSort("Time".into()),
        Command::DeclareSort("Trace".into()),
    ];
    if task.mode == TraceMode::Two {
        script.push(Command::DeclareConst("t1".into(), Sort::Trace));
        script.push(Command::DeclareConst("t2".into(), Sort::Trace));
        script.push(Command::Assert {
            label: None,
            formula: Formula::neq(crate::fol::cst("t1"), crate::fol::cst("t2")),
        });
    }
    script.push(Command::DeclareNatLess);
    for decl in task.signature.user_decls() {
        if decl.name == "t1" || decl.name == "t2" {
            continue;
        }
        script.push(Command::DeclareFun(
            decl.name.clone(),
            decl.args.clone(),
            decl.result,
        ));
    }
    for axiom in &task.axioms {
        script.push(Command::Assert {
            label: Some(axiom.label.clone()),
            formula: axiom.formula.clone(),
        });
    }
    if let Some(c) = &task.conjecture {
        let formula = if c.negate {
            Formula::not(c.formula.clone())
        } else {
            c.formula.clone()
        };
        script.push(Command::Assert {
            label: None,
            formula,
        });
    }
    script.push(Command::CheckSat);
    script
}

/// Serialize a task; byte-deterministic for a given task.
pub fn emit(task: &ReasoningTask) -> String {
    print_script(&script_of(task))
}

/// Print a script, one command per line.
pub fn print_script(script: &Script) -> String {
    // Rebuild the signature from the declarations so `<` can be resolved
    // per operand sort; this keeps printing a pure function of the script.
    let mut sig = Signature::with_theory();
    for cmd in script {
        match cmd {
            Command::DeclareConst(name, sort) => {
                let _ = sig.declare(name, vec![], *sort);
            }
            Command::DeclareFun(name, args, result) => {
                let _ = sig.declare(name, args.clone(), *result);
            }
            _ => {}
        }
    }
    let mut out = String::new();
    for cmd in script {
        match cmd {
            Command::SetLogic(logic) => out.push_str(&format!("(set-logic {logic})\n")),
            Command::DeclareNatDatatype => {
                out.push_str("(declare-datatypes ((Nat 0)) (((zero) (s (p Nat)))))\n")
            }
            Command::DeclareSort(name) => out.push_str(&format!("(declare-sort {name} 0)\n")),
            Command::DeclareConst(name, sort) => {
                out.push_str(&format!("(declare-const {name} {})\n", sort.name()))
            }
            Command::DeclareNatLess => out.push_str("(declare-fun Nat_less (Nat Nat) Bool)\n"),
            Command::DeclareFun(name, args, result) => {
                let args: Vec<&str> = args.iter().map(|s| s.name()).collect();
                out.push_str(&format!(
                    "(declare-fun {name} ({}) {})\n",
                    args.join(" "),
                    result.name()
                ));
            }
            Command::Assert { label, formula } => {
                let body = print_formula(formula, &sig);
                match label {
                    Some(label) => {
                        out.push_str(&format!("(assert (! {body} :named {label}))\n"))
                    }
                    None => out.push_str(&format!("(assert {body})\n")),
                }
            }
            Command::CheckSat => out.push_str("(check-sat)\n"),
        }
    }
    out
}

fn print_term(t: &Term) -> String {
    match t {
        Term::Var(name, _) => name.clone(),
        Term::Int(v) => {
            if *v < 0 {
                format!("(- {})", v.unsigned_abs())
            } else {
                v.to_string()
            }
        }
        Term::App(name, args) => {
            if args.is_empty() {
                name.clone()
            } else {
                let args: Vec<String> = args.iter().map(print_term).collect();
                format!("({name} {})", args.join(" "))
            }
        }
    }
}

fn print_formula(f: &Formula, sig: &Signature) -> String {
    match f {
        Formula::True => "true".into(),
        Formula::False => "false".into(),
        Formula::Eq(l, r) => format!("(= {} {})", print_term(l), print_term(r)),
        Formula::Less(l, r) => {
            let op = match sig.term_sort(l) {
                Ok(Sort::Nat) => "Nat_less",
                _ => "<",
            };
            format!("({op} {} {})", print_term(l), print_term(r))
        }
        Formula::Not(g) => format!("(not {})", print_formula(g, sig)),
        Formula::And(gs) => print_connective("and", "true", gs, sig),
        Formula::Or(gs) => print_connective("or", "false", gs, sig),
        Formula::Implies(l, r) => {
            format!("(=> {} {})", print_formula(l, sig), print_formula(r, sig))
        }
        Formula::Iff(l, r) => {
            format!("(= {} {})", print_formula(l, sig), print_formula(r, sig))
        }
        Formula::Forall(vars, body) => print_quant("forall", vars, body, sig),
        Formula::Exists(vars, body) => print_quant("exists", vars, body, sig),
    }
}

fn print_connective(op: &str, empty: &str, gs: &[Formula], sig: &Signature) -> String {
    match gs.len() {
        0 => empty.into(),
        1 => print_formula(&gs[0], sig),
        _ => {
            let parts: Vec<String> = gs.iter().map(|g| print_formula(g, sig)).collect();
            format!("({op} {})", parts.join(" "))
        }
    }
}

fn print_quant(q: &str, vars: &[(String, Sort)], body: &Formula, sig: &Signature) -> String {
    let binders: Vec<String> = vars
        .iter()
        .map(|(name, sort)| format!("({name} {})", sort.name()))
        .collect();
    format!(
        "({q} ({}) {})",
        binders.join(" "),
        print_formula(body, sig)
    )
}

/// Errors from the strict SMT-LIB reader.
#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum ReadError {
    #[error("S-expression error: {0}")]
    Lex(String),
    #[error("unsupported or malformed command at {pos}: {message}")]
    Command { pos: String, message: String },
    #[error("formula error: {0}")]
    Formula(#[from] PropertyError),
    #[error("declaration error: {0}")]
    Declaration(#[from] SortError),
}

/// Strict reader for the emitted dialect: parses a script back into
/// commands with structured formulas. Rejects anything it does not emit.
pub fn parse_script(text: &str) -> Result<Script, ReadError> {
    let exprs = Reader::new(text)
        .read_all()
        .map_err(|e| ReadError::Lex(e.to_string()))?;
    let mut sig = Signature::with_theory();
    let mut script = Vec::new();
    for expr in &exprs {
        script.push(parse_command(expr, &mut sig)?);
    }
    Ok(script)
}

fn parse_command(expr: &SExpr, sig: &mut Signature) -> Result<Command, ReadError> {
    let err = |message: &str| ReadError::Command {
        pos: expr.pos().to_string(),
        message: message.into(),
    };
    let items = expr.as_list().ok_or_else(|| err("expected a command"))?;
    let head = items
        .first()
        .and_then(|h| h.as_atom())
        .ok_or_else(|| err("expected a command name"))?;
    match head {
        "set-logic" => {
            let logic = items
                .get(1)
                .and_then(|a| a.as_atom())
                .ok_or_else(|| err("set-logic needs a logic name"))?;
            Ok(Command::SetLogic(logic.to_string()))
        }
        "declare-datatypes" => {
            let expected = "(declare-datatypes ((Nat 0)) (((zero) (s (p Nat)))))";
            if expr.to_string() == expected {
                Ok(Command::DeclareNatDatatype)
            } else {
                Err(err("only the Nat datatype declaration is supported"))
            }
        }
        "declare-sort" => {
            let name = items
                .get(1)
                .and_then(|a| a.as_atom())
                .ok_or_else(|| err("declare-sort needs a name"))?;
            if items.get(2).and_then(|a| a.as_atom()) != Some("0") {
                return Err(err("declare-sort arity must be 0"));
            }
            Ok(Command::DeclareSort(name.to_string()))
        }
        "declare-const" => {
            let name = items
                .get(1)
                .and_then(|a| a.as_atom())
                .ok_or_else(|| err("declare-const needs a name"))?;
            let sort = items
                .get(2)
                .and_then(|a| a.as_atom())
                .and_then(Sort::parse)
                .ok_or_else(|| err("declare-const needs a sort"))?;
            sig.declare(name, vec![], sort)?;
            Ok(Command::DeclareConst(name.to_string(), sort))
        }
        "declare-fun" => {
            let name = items
                .get(1)
                .and_then(|a| a.as_atom())
                .ok_or_else(|| err("declare-fun needs a name"))?;
            let arg_list = items
                .get(2)
                .and_then(|a| a.as_list())
                .ok_or_else(|| err("declare-fun needs an argument list"))?;
            let result = items
                .get(3)
                .and_then(|a| a.as_atom())
                .ok_or_else(|| err("declare-fun needs a result sort"))?;
            if name == "Nat_less" {
                return Ok(Command::DeclareNatLess);
            }
            let args = arg_list
                .iter()
                .map(|a| a.as_atom().and_then(Sort::parse))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| err("unknown argument sort"))?;
            let result = Sort::parse(result).ok_or_else(|| err("unknown result sort"))?;
            sig.declare(name, args.clone(), result)?;
            Ok(Command::DeclareFun(name.to_string(), args, result))
        }
        "assert" => {
            if items.len() != 2 {
                return Err(err("assert takes one formula"));
            }
            let (label, body) = match &items[1] {
                SExpr::List(inner, _)
                    if inner.first().and_then(|a| a.as_atom()) == Some("!") =>
                {
                    if inner.len() != 4
                        || inner.get(2).and_then(|a| a.as_atom()) != Some(":named")
                    {
                        return Err(err("expected (! <formula> :named <label>)"));
                    }
                    let label = inner[3]
                        .as_atom()
                        .ok_or_else(|| err("label must be a symbol"))?;
                    (Some(label.to_string()), &inner[1])
                }
                other => (None, other),
            };
            let formula = crate::properties::parse_formula_sexpr(body, sig)?;
            Ok(Command::Assert { label, formula })
        }
        "check-sat" => Ok(Command::CheckSat),
        other => Err(err(&format!("unsupported command `{other}`"))),
    }
}
