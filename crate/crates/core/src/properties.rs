//! Conjecture construction: non-interference and sensitivity templates from
//! variable annotations, plus hand-written trace-logic conjectures parsed
//! from S-expressions over the generated signature.

use std::collections::BTreeMap;

use crate::ast::{Line, Program, VarDecl};
use crate::error::PropertyError;
use crate::fol::{
    app, check_sorts, cst, int, sub, var, Formula, Signature, Sort, Term,
};
use crate::parser::{Directive, Level, PropertyKind, SpecFile};
use crate::semantics::{TraceMode, VariableSymbolization};
use crate::sexpr::SExpr;
use crate::timepoints::{ProgramContext, MAIN_END};

/// A property to prove: asserted negated in the emitted task (refutation
/// style) unless `negate` is cleared.
#[derive(Debug, Clone, PartialEq)]
pub struct Conjecture {
    pub name: String,
    pub formula: Formula,
    pub negate: bool,
}

/// Per-variable security annotations gathered from the property block.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SecurityAnnotation {
    pub levels: BTreeMap<String, Level>,
    pub out: Vec<String>,
    pub dev: Vec<String>,
}

impl SecurityAnnotation {
    pub fn low_vars<'p>(&self, program: &'p Program) -> Vec<&'p VarDecl> {
        program
            .decls
            .iter()
            .filter(|d| self.levels.get(&d.name) == Some(&Level::Low))
            .collect()
    }

    fn validate(&self, program: &Program) -> Result<(), PropertyError> {
        for name in self
            .levels
            .keys()
            .chain(self.out.iter())
            .chain(self.dev.iter())
        {
            if program.decl(name).is_none() {
                return Err(PropertyError::Invalid(format!(
                    "annotation refers to undeclared variable `{name}`"
                )));
            }
        }
        Ok(())
    }
}

/// `EqTr(v, tp)`: the variable has the same value(s) in both traces at the
/// timepoint (which is ignored for const variables).
pub fn eq_tr(v: &VarDecl, tp: &Term, symb: &VariableSymbolization, program: &Program) -> Formula {
    let t1 = cst("t1");
    let t2 = cst("t2");
    if v.is_array {
        let pos_name = fresh_name("pos", program);
        let pos = var(&pos_name, Sort::Int);
        Formula::Forall(
            vec![(pos_name, Sort::Int)],
            Box::new(Formula::eq(
                symb.array(&v.name, tp, pos.clone(), &t1),
                symb.array(&v.name, tp, pos, &t2),
            )),
        )
    } else {
        Formula::eq(symb.scalar(&v.name, tp, &t1), symb.scalar(&v.name, tp, &t2))
    }
}

fn fresh_name(base: &str, program: &Program) -> String {
    if program.decl(base).is_none() {
        return base.to_string();
    }
    for i in 1.. {
        let candidate = format!("{base}_{i}");
        if program.decl(&candidate).is_none() {
            return candidate;
        }
    }
    unreachable!()
}

/// Anchor timepoint for input-side hypotheses: the start of the first
/// top-level statement, or an explicitly requested top-level location.
fn anchor(
    program: &Program,
    ctx: &ProgramContext,
    at: Option<Line>,
) -> Result<Term, PropertyError> {
    match at {
        None => Ok(ctx.start(program.body[0].line())),
        Some(line) => {
            if program.statement_at(line).is_none() {
                return Err(PropertyError::Invalid(format!(
                    "no statement at line {line} for (at l{line})"
                )));
            }
            if ctx.loop_depth(line) != 0 {
                return Err(PropertyError::Invalid(format!(
                    "(at l{line}) must name a statement outside all loops"
                )));
            }
            Ok(ctx.start(line))
        }
    }
}

/// Non-interference: equal low inputs imply equal low outputs.
pub fn build_noninterference(
    program: &Program,
    ctx: &ProgramContext,
    symb: &VariableSymbolization,
    ann: &SecurityAnnotation,
    at: Option<Line>,
) -> Result<Conjecture, PropertyError> {
    ann.validate(program)?;
    let low = ann.low_vars(program);
    if low.is_empty() {
        return Err(PropertyError::Invalid(
            "non-interference needs at least one L variable".into(),
        ));
    }
    let l0 = anchor(program, ctx, at)?;
    let end = cst(MAIN_END);
    let hypothesis = Formula::and(
        low.iter()
            .map(|v| eq_tr(v, &l0, symb, program))
            .collect(),
    );
    let conclusion = Formula::and(
        low.iter()
            .map(|v| eq_tr(v, &end, symb, program))
            .collect(),
    );
    Ok(Conjecture {
        name: "noninterference".into(),
        formula: Formula::implies(hypothesis, conclusion),
        negate: true,
    })
}

/// `|d| < bound`, expanded to a case split over the sign of `d` (the
/// signature has no absolute-value symbol).
pub fn abs_less(d: Term, bound: Term) -> Formula {
    Formula::or(vec![
        Formula::and(vec![
            Formula::not(Formula::less(d.clone(), int(0))),
            Formula::less(d.clone(), bound.clone()),
        ]),
        Formula::and(vec![
            Formula::less(d.clone(), int(0)),
            Formula::less(sub(int(0), d), bound),
        ]),
    ])
}

/// Sensitivity: for every bound k, each output variable whose initial
/// deviation is below k stays below k at the end, under the annotated
/// input hypotheses (equality for L variables, deviation bounds for `dev`
/// variables).
pub fn build_sensitivity(
    program: &Program,
    ctx: &ProgramContext,
    symb: &VariableSymbolization,
    ann: &SecurityAnnotation,
    at: Option<Line>,
) -> Result<Conjecture, PropertyError> {
    ann.validate(program)?;
    if ann.out.is_empty() {
        return Err(PropertyError::Invalid(
            "sensitivity needs at least one output variable".into(),
        ));
    }
    for name in ann.out.iter().chain(ann.dev.iter()) {
        if program.decl(name).map(|d| d.is_array) == Some(true) {
            return Err(PropertyError::Invalid(format!(
                "deviation bounds are only defined for scalars, `{name}` is an array"
            )));
        }
    }
    let l0 = anchor(program, ctx, at)?;
    let end = cst(MAIN_END);
    let k_name = fresh_name("k", program);
    let k = var(&k_name, Sort::Int);

    let delta = |name: &str, tp: &Term| {
        sub(
            symb.scalar(name, tp, &cst("t1")),
            symb.scalar(name, tp, &cst("t2")),
        )
    };

    let mut shared = Vec::new();
    for v in ann.low_vars(program) {
        shared.push(eq_tr(v, &l0, symb, program));
    }
    for name in &ann.dev {
        shared.push(abs_less(delta(name, &l0), k.clone()));
    }

    let conjuncts: Vec<Formula> = ann
        .out
        .iter()
        .map(|name| {
            let mut hyp = shared.clone();
            hyp.push(abs_less(delta(name, &l0), k.clone()));
            Formula::implies(Formula::and(hyp), abs_less(delta(name, &end), k.clone()))
        })
        .collect();

    Ok(Conjecture {
        name: "sensitivity".into(),
        formula: Formula::Forall(
            vec![(k_name, Sort::Int)],
            Box::new(Formula::and(conjuncts)),
        ),
        negate: true,
    })
}

/// Parse an S-expression conjecture over the generated signature.
pub fn parse_conjecture(expr: &SExpr, sig: &Signature) -> Result<Conjecture, PropertyError> {
    let mut bound = Vec::new();
    let formula = parse_formula(expr, sig, &mut bound)?;
    if let Some((name, _)) = formula.free_vars().into_iter().next() {
        return Err(PropertyError::UnboundVariable {
            name,
            pos: expr.pos().to_string(),
        });
    }
    check_sorts(&formula, sig).map_err(|e| PropertyError::Sort {
        pos: expr.pos().to_string(),
        message: e.to_string(),
    })?;
    Ok(Conjecture {
        name: "conjecture".into(),
        formula,
        negate: true,
    })
}

/// Parse a bare formula S-expression against a signature (shared with the
/// SMT-LIB reader).
pub fn parse_formula_sexpr(expr: &SExpr, sig: &Signature) -> Result<Formula, PropertyError> {
    let mut bound = Vec::new();
    parse_formula(expr, sig, &mut bound)
}

fn parse_formula(
    expr: &SExpr,
    sig: &Signature,
    bound: &mut Vec<(String, Sort)>,
) -> Result<Formula, PropertyError> {
    let pos = || expr.pos().to_string();
    match expr {
        SExpr::Atom(a, _) if a == "true" => Ok(Formula::True),
        SExpr::Atom(a, _) if a == "false" => Ok(Formula::False),
        SExpr::Atom(a, _) => Err(PropertyError::Parse {
            pos: pos(),
            message: format!("expected a formula, found atom `{a}`"),
        }),
        SExpr::List(items, _) => {
            let head = items.first().and_then(|h| h.as_atom()).ok_or_else(|| {
                PropertyError::Parse {
                    pos: pos(),
                    message: "expected an operator".into(),
                }
            })?;
            let args = &items[1..];
            match head {
                "and" | "or" => {
                    let fs = args
                        .iter()
                        .map(|a| parse_formula(a, sig, bound))
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok(if head == "and" {
                        Formula::And(fs)
                    } else {
                        Formula::Or(fs)
                    })
                }
                "not" => {
                    if args.len() != 1 {
                        return Err(PropertyError::Parse {
                            pos: pos(),
                            message: "`not` takes one argument".into(),
                        });
                    }
                    Ok(Formula::not(parse_formula(&args[0], sig, bound)?))
                }
                "=>" => {
                    if args.len() < 2 {
                        return Err(PropertyError::Parse {
                            pos: pos(),
                            message: "`=>` takes at least two arguments".into(),
                        });
                    }
                    let mut fs = args
                        .iter()
                        .map(|a| parse_formula(a, sig, bound))
                        .collect::<Result<Vec<_>, _>>()?;
                    let mut acc = fs.pop().expect("nonempty");
                    while let Some(lhs) = fs.pop() {
                        acc = Formula::implies(lhs, acc);
                    }
                    Ok(acc)
                }
                "forall" | "exists" => {
                    if args.len() != 2 {
                        return Err(PropertyError::Parse {
                            pos: pos(),
                            message: format!("`{head}` takes a binder list and a body"),
                        });
                    }
                    let binders = parse_binders(&args[0])?;
                    let n = bound.len();
                    bound.extend(binders.iter().cloned());
                    let body = parse_formula(&args[1], sig, bound);
                    bound.truncate(n);
                    let body = body?;
                    Ok(if head == "forall" {
                        Formula::Forall(binders, Box::new(body))
                    } else {
                        Formula::Exists(binders, Box::new(body))
                    })
                }
                "=" => {
                    if args.len() != 2 {
                        return Err(PropertyError::Parse {
                            pos: pos(),
                            message: "`=` takes two arguments".into(),
                        });
                    }
                    // Equality of terms, or iff when the arguments are
                    // formulas.
                    match (
                        parse_term(&args[0], sig, bound),
                        parse_term(&args[1], sig, bound),
                    ) {
                        (Ok(l), Ok(r)) => Ok(Formula::Eq(l, r)),
                        _ => Ok(Formula::iff(
                            parse_formula(&args[0], sig, bound)?,
                            parse_formula(&args[1], sig, bound)?,
                        )),
                    }
                }
                "<" | "<=" | ">" | ">=" | "Nat_less" => {
                    if args.len() != 2 {
                        return Err(PropertyError::Parse {
                            pos: pos(),
                            message: format!("`{head}` takes two arguments"),
                        });
                    }
                    let l = parse_term(&args[0], sig, bound)?;
                    let r = parse_term(&args[1], sig, bound)?;
                    Ok(match head {
                        "<" | "Nat_less" => Formula::less(l, r),
                        "<=" => Formula::leq(l, r),
                        ">" => Formula::less(r, l),
                        ">=" => Formula::leq(r, l),
                        _ => unreachable!(),
                    })
                }
                other => Err(PropertyError::UnknownSymbol {
                    name: other.to_string(),
                    pos: pos(),
                }),
            }
        }
    }
}

fn parse_binders(expr: &SExpr) -> Result<Vec<(String, Sort)>, PropertyError> {
    let items = expr.as_list().ok_or_else(|| PropertyError::Parse {
        pos: expr.pos().to_string(),
        message: "expected a binder list like ((k Int))".into(),
    })?;
    let mut out = Vec::new();
    for item in items {
        let pair = item.as_list().filter(|p| p.len() == 2).ok_or_else(|| {
            PropertyError::Parse {
                pos: item.pos().to_string(),
                message: "expected (name Sort)".into(),
            }
        })?;
        let name = pair[0].as_atom().ok_or_else(|| PropertyError::Parse {
            pos: pair[0].pos().to_string(),
            message: "expected a variable name".into(),
        })?;
        let sort_name = pair[1].as_atom().ok_or_else(|| PropertyError::Parse {
            pos: pair[1].pos().to_string(),
            message: "expected a sort".into(),
        })?;
        let sort = Sort::parse(sort_name).ok_or_else(|| PropertyError::Parse {
            pos: pair[1].pos().to_string(),
            message: format!("unknown sort `{sort_name}`"),
        })?;
        out.push((name.to_string(), sort));
    }
    Ok(out)
}

fn parse_term(
    expr: &SExpr,
    sig: &Signature,
    bound: &[(String, Sort)],
) -> Result<Term, PropertyError> {
    let pos = || expr.pos().to_string();
    match expr {
        SExpr::Atom(a, _) => {
            if let Ok(v) = a.parse::<i64>() {
                return Ok(int(v));
            }
            if let Some((_, sort)) = bound.iter().rev().find(|(n, _)| n == a) {
                return Ok(var(a, *sort));
            }
            match sig.get(a) {
                Some(decl) if decl.args.is_empty() => Ok(cst(a)),
                Some(_) => Err(PropertyError::Parse {
                    pos: pos(),
                    message: format!("`{a}` expects arguments"),
                }),
                None => Err(PropertyError::UnknownSymbol {
                    name: a.clone(),
                    pos: pos(),
                }),
            }
        }
        SExpr::List(items, _) => {
            let head = items.first().and_then(|h| h.as_atom()).ok_or_else(|| {
                PropertyError::Parse {
                    pos: pos(),
                    message: "expected a function symbol".into(),
                }
            })?;
            let args = &items[1..];
            if head == "-" && args.len() == 1 {
                // Unary minus: a literal becomes a negative numeral.
                let inner = parse_term(&args[0], sig, bound)?;
                return Ok(match inner {
                    Term::Int(v) => int(-v),
                    other => sub(int(0), other),
                });
            }
            if matches!(head, "+" | "-" | "*") && args.len() == 2 {
                let l = parse_term(&args[0], sig, bound)?;
                let r = parse_term(&args[1], sig, bound)?;
                return Ok(app(head, vec![l, r]));
            }
            match sig.get(head) {
                Some(_) => {
                    let terms = args
                        .iter()
                        .map(|a| parse_term(a, sig, bound))
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok(app(head, terms))
                }
                None => Err(PropertyError::UnknownSymbol {
                    name: head.to_string(),
                    pos: pos(),
                }),
            }
        }
    }
}

/// How many traces the directives request, if stated.
pub fn requested_traces(directives: &[Directive]) -> Option<u8> {
    directives.iter().find_map(|d| match d {
        Directive::SetTraces(n) => Some(*n),
        _ => None,
    })
}

/// Resolve the property directives of a spec file into a conjecture.
/// Returns `None` when the file has no property.
pub fn resolve_property(
    spec: &SpecFile,
    ctx: &ProgramContext,
    symb: &VariableSymbolization,
    sig: &Signature,
) -> Result<Option<Conjecture>, PropertyError> {
    let mut annotation = SecurityAnnotation::default();
    let mut property: Option<(PropertyKind, Option<Line>)> = None;
    let mut conjecture_expr: Option<&SExpr> = None;

    for directive in &spec.directives {
        match directive {
            Directive::SetTraces(_) => {}
            Directive::Levels(levels) => {
                for (name, level) in levels {
                    annotation.levels.insert(name.clone(), *level);
                }
            }
            Directive::Out(names) => annotation.out.extend(names.iter().cloned()),
            Directive::Dev(names) => annotation.dev.extend(names.iter().cloned()),
            Directive::Property { kind, at } => {
                if property.is_some() || conjecture_expr.is_some() {
                    return Err(PropertyError::Invalid(
                        "at most one property or conjecture per file".into(),
                    ));
                }
                property = Some((*kind, *at));
            }
            Directive::Conjecture(expr) => {
                if property.is_some() || conjecture_expr.is_some() {
                    return Err(PropertyError::Invalid(
                        "at most one property or conjecture per file".into(),
                    ));
                }
                conjecture_expr = Some(expr);
            }
        }
    }

    if property.is_some() && symb.mode() != TraceMode::Two {
        return Err(PropertyError::Invalid(
            "property requires 2 traces".into(),
        ));
    }

    match (property, conjecture_expr) {
        (Some((PropertyKind::NonInterference, at)), _) => Ok(Some(build_noninterference(
            &spec.program,
            ctx,
            symb,
            &annotation,
            at,
        )?)),
        (Some((PropertyKind::Sensitivity, at)), _) => Ok(Some(build_sensitivity(
            &spec.program,
            ctx,
            symb,
            &annotation,
            at,
        )?)),
        (None, Some(expr)) => Ok(Some(parse_conjecture(expr, sig)?)),
        (None, None) => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_program, parse_spec};
    use crate::sexpr::Reader;

    const HIGH_GUARD: &str = "\
func main()
{
    const Int hi;
    Int lo;

    if (hi > 0)
    {
        lo = lo + 1;
    }
    else
    {
        lo = lo + 1;
    }
}
";

    struct Setup {
        program: Program,
        ctx: ProgramContext,
        symb: VariableSymbolization,
        sig: Signature,
    }

    fn setup(src: &str) -> Setup {
        let program = parse_program(src).unwrap();
        let ctx = ProgramContext::analyze(&program);
        let symb = VariableSymbolization::new(&program, TraceMode::Two);
        let mut sig = Signature::with_theory();
        sig.declare("t1", vec![], Sort::Trace).unwrap();
        sig.declare("t2", vec![], Sort::Trace).unwrap();
        ctx.declare_symbols(&mut sig, true).unwrap();
        symb.declare_symbols(&mut sig).unwrap();
        Setup {
            program,
            ctx,
            symb,
            sig,
        }
    }

    #[test]
    fn eq_tr_covers_all_four_variable_kinds() {
        let src = "\
func main()
{
    const Int[] ca;
    const Int cs;
    Int[] ma;
    Int ms;
    ms = 1;
}
";
        let s = setup(src);
        let tp = s.ctx.start(7);
        let cases = [
            ("ma", "forall pos:Int. (ma(l7,pos,t1) = ma(l7,pos,t2))"),
            ("ca", "forall pos:Int. (ca(pos,t1) = ca(pos,t2))"),
            ("ms", "ms(l7,t1) = ms(l7,t2)"),
            ("cs", "cs(t1) = cs(t2)"),
        ];
        for (name, expected) in cases {
            let d = s.program.decl(name).unwrap();
            assert_eq!(
                eq_tr(d, &tp, &s.symb, &s.program).to_string(),
                expected,
                "{name}"
            );
        }
    }

    #[test]
    fn noninterference_for_high_guard_is_a_single_implication() {
        let s = setup(HIGH_GUARD);
        let mut ann = SecurityAnnotation::default();
        ann.levels.insert("lo".into(), Level::Low);
        ann.levels.insert("hi".into(), Level::High);
        let c = build_noninterference(&s.program, &s.ctx, &s.symb, &ann, None).unwrap();
        assert_eq!(
            c.formula.to_string(),
            "((lo(l6,t1) = lo(l6,t2))) -> ((lo(main_end,t1) = lo(main_end,t2)))"
        );
        assert!(crate::fol::well_sorted(&c.formula, &s.sig));
    }

    #[test]
    fn noninterference_counts_atoms_per_side() {
        let src = "\
func main()
{
    const Int k;
    const Int lo;
    Int hi = lo;
    Int i = 0;
    Int[] output;

    while (hi < k)
    {
        output[i] = hi;
        hi = hi + 1;
        i = i + 1;
    }
}
";
        let s = setup(src);
        let mut ann = SecurityAnnotation::default();
        for v in ["k", "lo", "output"] {
            ann.levels.insert(v.into(), Level::Low);
        }
        ann.levels.insert("hi".into(), Level::High);
        let c = build_noninterference(&s.program, &s.ctx, &s.symb, &ann, None).unwrap();
        match &c.formula {
            Formula::Implies(h, g) => {
                let count = |f: &Formula| match f {
                    Formula::And(fs) => fs.len(),
                    _ => panic!("expected conjunction"),
                };
                assert_eq!(count(h), 3);
                assert_eq!(count(g), 3);
            }
            other => panic!("expected implication, got {other}"),
        }
    }

    #[test]
    fn at_modifier_moves_the_hypothesis_anchor() {
        let s = setup(HIGH_GUARD);
        let mut ann = SecurityAnnotation::default();
        ann.levels.insert("lo".into(), Level::Low);
        let c = build_noninterference(&s.program, &s.ctx, &s.symb, &ann, Some(6)).unwrap();
        assert!(c.formula.to_string().starts_with("((lo(l6,t1) = lo(l6,t2)))"));
        // A line inside a loop is rejected: its timepoint is not ground.
        let src = "\
func main()
{
    const Int n;
    Int x = 0;
    Int i = 0;
    while (i < n)
    {
        x = x + 1;
        i = i + 1;
    }
}
";
        let s = setup(src);
        let mut ann = SecurityAnnotation::default();
        ann.levels.insert("x".into(), Level::Low);
        let err = build_noninterference(&s.program, &s.ctx, &s.symb, &ann, Some(8)).unwrap_err();
        assert!(err.to_string().contains("outside all loops"), "{err}");
        let err = build_noninterference(&s.program, &s.ctx, &s.symb, &ann, Some(99)).unwrap_err();
        assert!(err.to_string().contains("no statement at line"), "{err}");
    }

    #[test]
    fn noninterference_requires_low_variables() {
        let s = setup(HIGH_GUARD);
        let ann = SecurityAnnotation::default();
        assert!(build_noninterference(&s.program, &s.ctx, &s.symb, &ann, None).is_err());
    }

    #[test]
    fn annotations_must_name_declared_variables() {
        let s = setup(HIGH_GUARD);
        let mut ann = SecurityAnnotation::default();
        ann.levels.insert("ghost".into(), Level::Low);
        let err = build_noninterference(&s.program, &s.ctx, &s.symb, &ann, None).unwrap_err();
        assert!(err.to_string().contains("undeclared variable `ghost`"), "{err}");
    }

    #[test]
    fn sensitivity_includes_annotation_hypotheses() {
        let src = "\
func main()
{
    const Int[] a;
    const Int alength;
    const Int z;
    Int x = 0;
    Int i = 0;

    while (i < alength)
    {
        x = x + a[i];
        i = i + 1;
    }
    x = x + z;
}
";
        let s = setup(src);
        let mut ann = SecurityAnnotation::default();
        ann.levels.insert("a".into(), Level::Low);
        ann.levels.insert("alength".into(), Level::Low);
        ann.dev.push("z".into());
        ann.out.push("x".into());
        let c = build_sensitivity(&s.program, &s.ctx, &s.symb, &ann, None).unwrap();
        assert!(crate::fol::well_sorted(&c.formula, &s.sig));
        let text = c.formula.to_string();
        assert!(text.starts_with("forall k:Int."));
        assert!(text.contains("a(pos,t1) = a(pos,t2)"));
        assert!(text.contains("z(t1) - z(t2)"));
        assert!(text.contains("x(main_end,t1) - x(main_end,t2)"));
    }

    #[test]
    fn abs_less_case_split_agrees_with_absolute_value() {
        for d in -4..=4i64 {
            for k in -1..=5i64 {
                let f = abs_less(int(d), int(k));
                // Ground formula: evaluate by hand over the two branches.
                let expect = d.abs() < k;
                let program = parse_program("func main(){ skip; }").unwrap();
                let record = crate::interp::run(
                    &program,
                    &crate::interp::ConcreteInput::default(),
                    1000,
                )
                .unwrap();
                let got = crate::oracle::evaluate(
                    &f,
                    &program,
                    TraceMode::One,
                    &[&record],
                )
                .unwrap();
                assert_eq!(
                    got == crate::oracle::Tri::True,
                    expect,
                    "|{d}| < {k}"
                );
            }
        }
    }

    #[test]
    fn parses_trivial_conjecture() {
        let s = setup(HIGH_GUARD);
        let expr = Reader::new("(= zero zero)").read().unwrap().unwrap();
        let c = parse_conjecture(&expr, &s.sig).unwrap();
        assert_eq!(c.formula, Formula::eq(crate::fol::zero(), crate::fol::zero()));
    }

    #[test]
    fn parses_hamming_weight_consequent() {
        const HW_SUM: &str = "\
func main()
{
    const Int[] a;
    const Int alength;

    Int i = 0;
    Int hw = 0;

    while (i < alength)
    {
        hw = hw + a[i];
        i = i + 1;
    }
}
";
        let s = setup(HW_SUM);
        let text = "(forall ((k Int)) (=> (and (forall ((pos Int)) (=> (and (not (= pos k)) (not (= pos (+ k 1)))) (= (a pos t1) (a pos t2)))) (= (a k t1) (a (+ k 1) t2)) (= (a k t2) (a (+ k 1) t1)) (<= 0 (+ k 1)) (< (+ k 1) (alength t1))) (= (hw main_end t1) (hw main_end t2))))";
        let expr = Reader::new(text).read().unwrap().unwrap();
        let c = parse_conjecture(&expr, &s.sig).unwrap();
        assert!(c.formula.is_closed());
        assert!(crate::fol::well_sorted(&c.formula, &s.sig));
        assert!(c.formula.to_string().contains("hw(main_end,t1) = hw(main_end,t2)"));
    }

    #[test]
    fn rejects_unknown_location_symbol() {
        let s = setup(HIGH_GUARD);
        let expr = Reader::new("(= (lo (l99) t1) 0)").read().unwrap().unwrap();
        let err = parse_conjecture(&expr, &s.sig).unwrap_err();
        assert!(matches!(err, PropertyError::UnknownSymbol { .. }), "{err}");
    }

    #[test]
    fn rejects_unbound_variable() {
        let s = setup(HIGH_GUARD);
        let expr = Reader::new("(= (lo l6 t1) k)").read().unwrap().unwrap();
        let err = parse_conjecture(&expr, &s.sig).unwrap_err();
        assert!(matches!(err, PropertyError::UnknownSymbol { .. } | PropertyError::UnboundVariable { .. }), "{err}");
    }

    #[test]
    fn rejects_sort_error() {
        let s = setup(HIGH_GUARD);
        let expr = Reader::new("(= (lo l6 t1) t2)").read().unwrap().unwrap();
        assert!(parse_conjecture(&expr, &s.sig).is_err());
    }

    #[test]
    fn resolve_property_end_to_end() {
        let src = format!(
            "{HIGH_GUARD}\n(set-traces 2)\n(levels (lo L) (hi H))\n(property noninterference)\n"
        );
        let spec = parse_spec(&src).unwrap();
        let s = setup(HIGH_GUARD);
        let c = resolve_property(&spec, &s.ctx, &s.symb, &s.sig)
            .unwrap()
            .unwrap();
        assert_eq!(c.name, "noninterference");
    }

    #[test]
    fn property_requires_two_traces() {
        let src = format!("{HIGH_GUARD}\n(levels (lo L))\n(property noninterference)\n");
        let spec = parse_spec(&src).unwrap();
        let program = parse_program(HIGH_GUARD).unwrap();
        let ctx = ProgramContext::analyze(&program);
        let symb = VariableSymbolization::new(&program, TraceMode::One);
        let mut sig = Signature::with_theory();
        ctx.declare_symbols(&mut sig, false).unwrap();
        symb.declare_symbols(&mut sig).unwrap();
        let err = resolve_property(&spec, &ctx, &symb, &sig).unwrap_err();
        assert!(err.to_string().contains("requires 2 traces"));
    }
}
