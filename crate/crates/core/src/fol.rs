//! Many-sorted first-order logic IR: sorts, signatures, terms, formulas,
//! substitution and sort checking.
//!
//! Four sorts are used throughout: `Nat` for loop iterations (a term algebra
//! with `zero`/`s`/`p`), `Int` for program values (the solver's built-in
//! integers), `Time` for program timepoints and `Trace` for executions.
//! `<` over `Nat` is an uninterpreted predicate with an explicitly emitted,
//! incomplete axiom set; `<` over `Int` is the built-in integer order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::SortError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    Nat,
    Int,
    Time,
    Trace,
}

impl Sort {
    pub fn name(self) -> &'static str {
        match self {
            Sort::Nat => "Nat",
            Sort::Int => "Int",
            Sort::Time => "Time",
            Sort::Trace => "Trace",
        }
    }

    pub fn parse(name: &str) -> Option<Sort> {
        match name {
            "Nat" => Some(Sort::Nat),
            "Int" => Some(Sort::Int),
            "Time" => Some(Sort::Time),
            "Trace" => Some(Sort::Trace),
            _ => None,
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// First-order terms. Integer literals are kept as a dedicated variant so
/// they can be emitted as SMT-LIB numerals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String, Sort),
    Int(i64),
    App(String, Vec<Term>),
}

pub fn var(name: &str, sort: Sort) -> Term {
    Term::Var(name.to_string(), sort)
}

pub fn app(name: &str, args: Vec<Term>) -> Term {
    Term::App(name.to_string(), args)
}

pub fn cst(name: &str) -> Term {
    Term::App(name.to_string(), Vec::new())
}

pub fn int(value: i64) -> Term {
    Term::Int(value)
}

pub fn zero() -> Term {
    cst("zero")
}

pub fn succ(t: Term) -> Term {
    app("s", vec![t])
}

pub fn add(l: Term, r: Term) -> Term {
    app("+", vec![l, r])
}

pub fn sub(l: Term, r: Term) -> Term {
    app("-", vec![l, r])
}

pub fn mul(l: Term, r: Term) -> Term {
    app("*", vec![l, r])
}

impl Term {
    /// Free variables, with their sorts.
    pub fn free_vars(&self) -> BTreeMap<String, Sort> {
        let mut out = BTreeMap::new();
        self.collect_free_vars(&mut out);
        out
    }

    fn collect_free_vars(&self, out: &mut BTreeMap<String, Sort>) {
        match self {
            Term::Var(name, sort) => {
                out.insert(name.clone(), *sort);
            }
            Term::Int(_) => {}
            Term::App(_, args) => {
                for a in args {
                    a.collect_free_vars(out);
                }
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(name, _) => f.write_str(name),
            Term::Int(value) => write!(f, "{value}"),
            Term::App(name, args) if args.len() == 2 && matches!(name.as_str(), "+" | "-" | "*") =>
            {
                write!(f, "{} {} {}", args[0], name, args[1])
            }
            Term::App(name, args) => {
                f.write_str(name)?;
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
        }
    }
}

/// First-order formulas over the four sorts, with equality and a single
/// order predicate that is resolved per operand sort at emission time.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Eq(Term, Term),
    Less(Term, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(Vec<(String, Sort)>, Box<Formula>),
    Exists(Vec<(String, Sort)>, Box<Formula>),
}

impl Formula {
    pub fn eq(l: Term, r: Term) -> Formula {
        Formula::Eq(l, r)
    }

    pub fn neq(l: Term, r: Term) -> Formula {
        Formula::Not(Box::new(Formula::Eq(l, r)))
    }

    pub fn less(l: Term, r: Term) -> Formula {
        Formula::Less(l, r)
    }

    /// `l <= r`, desugared to `l < r \/ l = r` (the signature has no `<=`).
    pub fn leq(l: Term, r: Term) -> Formula {
        Formula::Or(vec![
            Formula::Less(l.clone(), r.clone()),
            Formula::Eq(l, r),
        ])
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(fs: Vec<Formula>) -> Formula {
        Formula::And(fs)
    }

    pub fn or(fs: Vec<Formula>) -> Formula {
        Formula::Or(fs)
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Implies(Box::new(lhs), Box::new(rhs))
    }

    pub fn iff(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Iff(Box::new(lhs), Box::new(rhs))
    }

    pub fn forall(vars: Vec<(&str, Sort)>, body: Formula) -> Formula {
        Formula::Forall(
            vars.into_iter().map(|(n, s)| (n.to_string(), s)).collect(),
            Box::new(body),
        )
    }

    pub fn exists(vars: Vec<(&str, Sort)>, body: Formula) -> Formula {
        Formula::Exists(
            vars.into_iter().map(|(n, s)| (n.to_string(), s)).collect(),
            Box::new(body),
        )
    }

    /// Free variables, with their sorts.
    pub fn free_vars(&self) -> BTreeMap<String, Sort> {
        let mut out = BTreeMap::new();
        self.collect_free_vars(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free_vars(&self, bound: &mut Vec<String>, out: &mut BTreeMap<String, Sort>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Eq(l, r) | Formula::Less(l, r) => {
                for (name, sort) in l.free_vars().into_iter().chain(r.free_vars()) {
                    if !bound.contains(&name) {
                        out.insert(name, sort);
                    }
                }
            }
            Formula::Not(f) => f.collect_free_vars(bound, out),
            Formula::And(fs) | Formula::Or(fs) => {
                for f in fs {
                    f.collect_free_vars(bound, out);
                }
            }
            Formula::Implies(l, r) | Formula::Iff(l, r) => {
                l.collect_free_vars(bound, out);
                r.collect_free_vars(bound, out);
            }
            Formula::Forall(vars, body) | Formula::Exists(vars, body) => {
                let n = bound.len();
                bound.extend(vars.iter().map(|(name, _)| name.clone()));
                body.collect_free_vars(bound, out);
                bound.truncate(n);
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Universally close over the free variables (sorted by name).
    pub fn close_universally(self) -> Formula {
        let free = self.free_vars();
        if free.is_empty() {
            self
        } else {
            Formula::Forall(free.into_iter().collect(), Box::new(self))
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Eq(l, r) => write!(f, "{l} = {r}"),
            Formula::Less(l, r) => write!(f, "{l} < {r}"),
            Formula::Not(inner) => write!(f, "~({inner})"),
            Formula::And(fs) => {
                if fs.is_empty() {
                    return write!(f, "true");
                }
                for (i, g) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " & ")?;
                    }
                    write!(f, "({g})")?;
                }
                Ok(())
            }
            Formula::Or(fs) => {
                if fs.is_empty() {
                    return write!(f, "false");
                }
                for (i, g) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " | ")?;
                    }
                    write!(f, "({g})")?;
                }
                Ok(())
            }
            Formula::Implies(l, r) => write!(f, "({l}) -> ({r})"),
            Formula::Iff(l, r) => write!(f, "({l}) <-> ({r})"),
            Formula::Forall(vars, body) | Formula::Exists(vars, body) => {
                let q = if matches!(self, Formula::Forall(..)) {
                    "forall"
                } else {
                    "exists"
                };
                write!(f, "{q}")?;
                for (i, (name, sort)) in vars.iter().enumerate() {
                    write!(f, "{}{name}:{sort}", if i > 0 { ", " } else { " " })?;
                }
                write!(f, ". ({body})")
            }
        }
    }
}

/// A formula with a human-readable label (axiom name).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledFormula {
    pub label: String,
    pub formula: Formula,
}

impl LabeledFormula {
    pub fn new(label: impl Into<String>, formula: Formula) -> Self {
        LabeledFormula {
            label: label.into(),
            formula,
        }
    }
}

/// Declared function symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuncDecl {
    pub name: String,
    pub args: Vec<Sort>,
    pub result: Sort,
    /// Theory-interpreted symbols are not re-declared in SMT-LIB output.
    pub theory: bool,
}

/// Symbol table with deterministic (insertion) order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Signature {
    order: Vec<String>,
    map: BTreeMap<String, FuncDecl>,
}

impl Signature {
    /// Signature preloaded with the theory symbols: the `Nat` term algebra
    /// constructors/selector and integer arithmetic.
    pub fn with_theory() -> Signature {
        let mut sig = Signature::default();
        for (name, args, result) in [
            ("zero", vec![], Sort::Nat),
            ("s", vec![Sort::Nat], Sort::Nat),
            ("p", vec![Sort::Nat], Sort::Nat),
            ("+", vec![Sort::Int, Sort::Int], Sort::Int),
            ("-", vec![Sort::Int, Sort::Int], Sort::Int),
            ("*", vec![Sort::Int, Sort::Int], Sort::Int),
        ] {
            sig.insert(FuncDecl {
                name: name.to_string(),
                args,
                result,
                theory: true,
            })
            .expect("theory symbols are distinct");
        }
        sig
    }

    fn insert(&mut self, decl: FuncDecl) -> Result<(), SortError> {
        if self.map.contains_key(&decl.name) {
            return Err(SortError::Mismatch(format!(
                "symbol `{}` declared twice",
                decl.name
            )));
        }
        self.order.push(decl.name.clone());
        self.map.insert(decl.name.clone(), decl);
        Ok(())
    }

    pub fn declare(&mut self, name: &str, args: Vec<Sort>, result: Sort) -> Result<(), SortError> {
        self.insert(FuncDecl {
            name: name.to_string(),
            args,
            result,
            theory: false,
        })
    }

    pub fn get(&self, name: &str) -> Option<&FuncDecl> {
        self.map.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.map.contains_key(name)
    }

    /// Declared symbols in insertion order.
    pub fn decls(&self) -> impl Iterator<Item = &FuncDecl> {
        self.order.iter().map(|n| &self.map[n])
    }

    /// Non-theory symbols, in insertion order (what SMT-LIB must declare).
    pub fn user_decls(&self) -> impl Iterator<Item = &FuncDecl> {
        self.decls().filter(|d| !d.theory)
    }

    /// Sort of a term, checking arities and argument sorts along the way.
    pub fn term_sort(&self, term: &Term) -> Result<Sort, SortError> {
        match term {
            Term::Var(_, sort) => Ok(*sort),
            Term::Int(_) => Ok(Sort::Int),
            Term::App(name, args) => {
                let decl = self
                    .get(name)
                    .ok_or_else(|| SortError::UnknownSymbol(name.clone()))?;
                if decl.args.len() != args.len() {
                    return Err(SortError::Arity {
                        symbol: name.clone(),
                        expected: decl.args.len(),
                        actual: args.len(),
                    });
                }
                for (expected, arg) in decl.args.iter().zip(args) {
                    let actual = self.term_sort(arg)?;
                    if actual != *expected {
                        return Err(SortError::Mismatch(format!(
                            "argument of `{name}` has sort {actual}, expected {expected}"
                        )));
                    }
                }
                Ok(decl.result)
            }
        }
    }
}

/// Detailed sort check; see [`well_sorted`] for the boolean view.
pub fn check_sorts(formula: &Formula, sig: &Signature) -> Result<(), SortError> {
    let mut scopes: Vec<(String, Sort)> = Vec::new();
    let mut free: BTreeMap<String, Sort> = BTreeMap::new();
    check_rec(formula, sig, &mut scopes, &mut free)
}

fn check_var_uses(
    term: &Term,
    scopes: &[(String, Sort)],
    free: &mut BTreeMap<String, Sort>,
) -> Result<(), SortError> {
    match term {
        Term::Var(name, sort) => {
            if let Some((_, bound_sort)) = scopes.iter().rev().find(|(n, _)| n == name) {
                if bound_sort != sort {
                    return Err(SortError::Mismatch(format!(
                        "variable `{name}` used with sort {sort}, bound with sort {bound_sort}"
                    )));
                }
            } else if let Some(prev) = free.insert(name.clone(), *sort) {
                if prev != *sort {
                    return Err(SortError::Mismatch(format!(
                        "free variable `{name}` used with sorts {prev} and {sort}"
                    )));
                }
            }
            Ok(())
        }
        Term::Int(_) => Ok(()),
        Term::App(_, args) => {
            for a in args {
                check_var_uses(a, scopes, free)?;
            }
            Ok(())
        }
    }
}

fn check_rec(
    formula: &Formula,
    sig: &Signature,
    scopes: &mut Vec<(String, Sort)>,
    free: &mut BTreeMap<String, Sort>,
) -> Result<(), SortError> {
    match formula {
        Formula::True | Formula::False => Ok(()),
        Formula::Eq(l, r) => {
            check_var_uses(l, scopes, free)?;
            check_var_uses(r, scopes, free)?;
            let ls = sig.term_sort(l)?;
            let rs = sig.term_sort(r)?;
            if ls != rs {
                return Err(SortError::Mismatch(format!(
                    "equality relates sorts {ls} and {rs}"
                )));
            }
            Ok(())
        }
        Formula::Less(l, r) => {
            check_var_uses(l, scopes, free)?;
            check_var_uses(r, scopes, free)?;
            let ls = sig.term_sort(l)?;
            let rs = sig.term_sort(r)?;
            if ls != rs {
                return Err(SortError::Mismatch(format!(
                    "`<` relates sorts {ls} and {rs}"
                )));
            }
            if !matches!(ls, Sort::Nat | Sort::Int) {
                return Err(SortError::Mismatch(format!("`<` is undefined on {ls}")));
            }
            Ok(())
        }
        Formula::Not(f) => check_rec(f, sig, scopes, free),
        Formula::And(fs) | Formula::Or(fs) => {
            for f in fs {
                check_rec(f, sig, scopes, free)?;
            }
            Ok(())
        }
        Formula::Implies(l, r) | Formula::Iff(l, r) => {
            check_rec(l, sig, scopes, free)?;
            check_rec(r, sig, scopes, free)
        }
        Formula::Forall(vars, body) | Formula::Exists(vars, body) => {
            let n = scopes.len();
            scopes.extend(vars.iter().cloned());
            let result = check_rec(body, sig, scopes, free);
            scopes.truncate(n);
            result
        }
    }
}

/// True iff every application matches the declared arities and sorts,
/// equalities relate same-sorted terms and `<` is applied to `Nat` or `Int`.
pub fn well_sorted(formula: &Formula, sig: &Signature) -> bool {
    check_sorts(formula, sig).is_ok()
}

/// Capture-avoiding simultaneous substitution of terms for free variables.
pub fn substitute(
    formula: &Formula,
    bindings: &BTreeMap<String, Term>,
    sig: &Signature,
) -> Result<Formula, SortError> {
    subst_formula(formula, bindings, sig)
}

/// Substitution inside a term.
pub fn substitute_term(
    term: &Term,
    bindings: &BTreeMap<String, Term>,
    sig: &Signature,
) -> Result<Term, SortError> {
    match term {
        Term::Var(name, sort) => match bindings.get(name) {
            Some(replacement) => {
                let actual = sig.term_sort(replacement)?;
                if actual != *sort {
                    return Err(SortError::Mismatch(format!(
                        "cannot substitute {actual}-sorted term for {sort}-sorted `{name}`"
                    )));
                }
                Ok(replacement.clone())
            }
            None => Ok(term.clone()),
        },
        Term::Int(_) => Ok(term.clone()),
        Term::App(name, args) => {
            let args = args
                .iter()
                .map(|a| substitute_term(a, bindings, sig))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Term::App(name.clone(), args))
        }
    }
}

fn subst_formula(
    formula: &Formula,
    bindings: &BTreeMap<String, Term>,
    sig: &Signature,
) -> Result<Formula, SortError> {
    match formula {
        Formula::True | Formula::False => Ok(formula.clone()),
        Formula::Eq(l, r) => Ok(Formula::Eq(
            substitute_term(l, bindings, sig)?,
            substitute_term(r, bindings, sig)?,
        )),
        Formula::Less(l, r) => Ok(Formula::Less(
            substitute_term(l, bindings, sig)?,
            substitute_term(r, bindings, sig)?,
        )),
        Formula::Not(f) => Ok(Formula::Not(Box::new(subst_formula(f, bindings, sig)?))),
        Formula::And(fs) => Ok(Formula::And(
            fs.iter()
                .map(|f| subst_formula(f, bindings, sig))
                .collect::<Result<_, _>>()?,
        )),
        Formula::Or(fs) => Ok(Formula::Or(
            fs.iter()
                .map(|f| subst_formula(f, bindings, sig))
                .collect::<Result<_, _>>()?,
        )),
        Formula::Implies(l, r) => Ok(Formula::Implies(
            Box::new(subst_formula(l, bindings, sig)?),
            Box::new(subst_formula(r, bindings, sig)?),
        )),
        Formula::Iff(l, r) => Ok(Formula::Iff(
            Box::new(subst_formula(l, bindings, sig)?),
            Box::new(subst_formula(r, bindings, sig)?),
        )),
        Formula::Forall(vars, body) => {
            let (vars, body) = subst_under_binder(vars, body, bindings, sig)?;
            Ok(Formula::Forall(vars, Box::new(body)))
        }
        Formula::Exists(vars, body) => {
            let (vars, body) = subst_under_binder(vars, body, bindings, sig)?;
            Ok(Formula::Exists(vars, Box::new(body)))
        }
    }
}

fn subst_under_binder(
    vars: &[(String, Sort)],
    body: &Formula,
    bindings: &BTreeMap<String, Term>,
    sig: &Signature,
) -> Result<(Vec<(String, Sort)>, Formula), SortError> {
    // Bound names shadow the substitution.
    let mut inner: BTreeMap<String, Term> = bindings
        .iter()
        .filter(|(name, _)| !vars.iter().any(|(v, _)| v == *name))
        .map(|(n, t)| (n.clone(), t.clone()))
        .collect();

    // Rename binders that would capture free variables of replacement terms.
    let mut capture_risk: BTreeSet<String> = BTreeSet::new();
    for term in inner.values() {
        capture_risk.extend(term.free_vars().into_keys());
    }
    let mut new_vars = Vec::with_capacity(vars.len());
    let mut body = body.clone();
    let mut taken: BTreeSet<String> = body.free_vars().into_keys().collect();
    taken.extend(capture_risk.iter().cloned());
    for (name, sort) in vars {
        if capture_risk.contains(name) {
            let fresh = fresh_name(name, &taken);
            taken.insert(fresh.clone());
            let mut rename = BTreeMap::new();
            rename.insert(name.clone(), Term::Var(fresh.clone(), *sort));
            // The renamed binder is free inside `body` at this point, so a
            // plain substitution performs the alpha-renaming.
            let shadowed = inner.remove(name);
            body = subst_formula(&body, &rename, sig)?;
            if let Some(t) = shadowed {
                inner.insert(name.clone(), t);
            }
            new_vars.push((fresh, *sort));
        } else {
            new_vars.push((name.clone(), *sort));
        }
    }
    let body = subst_formula(&body, &inner, sig)?;
    Ok((new_vars, body))
}

fn fresh_name(base: &str, taken: &BTreeSet<String>) -> String {
    for i in 1.. {
        let candidate = format!("{base}_{i}");
        if !taken.contains(&candidate) {
            return candidate;
        }
    }
    unreachable!()
}

/// The emitted (incomplete) axiomatization of `<` over the `Nat` term
/// algebra: irreflexivity, transitivity, totality, minimality of zero,
/// `x < s(y) <-> (x < y \/ x = y)` and monotonicity of `s`.
pub fn nat_theory_axioms() -> Vec<LabeledFormula> {
    let x = || var("x", Sort::Nat);
    let y = || var("y", Sort::Nat);
    let z = || var("z", Sort::Nat);
    let nat2 = vec![("x", Sort::Nat), ("y", Sort::Nat)];
    vec![
        LabeledFormula::new(
            "theory-nat-less-irreflexive",
            Formula::forall(
                vec![("x", Sort::Nat)],
                Formula::not(Formula::less(x(), x())),
            ),
        ),
        LabeledFormula::new(
            "theory-nat-less-transitive",
            Formula::forall(
                vec![("x", Sort::Nat), ("y", Sort::Nat), ("z", Sort::Nat)],
                Formula::implies(
                    Formula::and(vec![Formula::less(x(), y()), Formula::less(y(), z())]),
                    Formula::less(x(), z()),
                ),
            ),
        ),
        LabeledFormula::new(
            "theory-nat-less-total",
            Formula::forall(
                nat2.clone(),
                Formula::or(vec![
                    Formula::less(x(), y()),
                    Formula::eq(x(), y()),
                    Formula::less(y(), x()),
                ]),
            ),
        ),
        LabeledFormula::new(
            "theory-nat-zero-minimal",
            Formula::forall(
                vec![("x", Sort::Nat)],
                Formula::not(Formula::less(x(), zero())),
            ),
        ),
        LabeledFormula::new(
            "theory-nat-less-succ",
            Formula::forall(
                nat2.clone(),
                Formula::iff(
                    Formula::less(x(), succ(y())),
                    Formula::or(vec![Formula::less(x(), y()), Formula::eq(x(), y())]),
                ),
            ),
        ),
        LabeledFormula::new(
            "theory-nat-succ-monotone",
            Formula::forall(
                nat2,
                Formula::iff(
                    Formula::less(x(), y()),
                    Formula::less(succ(x()), succ(y())),
                ),
            ),
        ),
    ]
}
