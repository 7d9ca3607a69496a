//! Property tests: the pretty-printer/parser round-trip over generated
//! programs, and substitution acting as the identity away from free
//! variables.

use proptest::prelude::*;
use std::collections::BTreeMap;

use tracelogic_core::ast::{pretty, ArithOp, CmpOp, Expr, Program, Statement, VarDecl};
use tracelogic_core::fol::{
    self, substitute, Formula, Signature, Sort, Term,
};
use tracelogic_core::parser::parse_program;

fn int_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0i64..50).prop_map(Expr::Int),
        Just(Expr::Var("x".into())),
        Just(Expr::Var("y".into())),
        Just(Expr::Var("n".into())),
        (0i64..5).prop_map(|i| Expr::ArrayRead("a".into(), Box::new(Expr::Int(i)))),
    ];
    leaf.prop_recursive(3, 16, 2, |inner| {
        (
            prop_oneof![Just(ArithOp::Add), Just(ArithOp::Sub), Just(ArithOp::Mul)],
            inner.clone(),
            inner,
        )
            .prop_map(|(op, l, r)| Expr::Arith(op, Box::new(l), Box::new(r)))
    })
}

fn bool_expr() -> impl Strategy<Value = Expr> {
    let cmp = (
        prop_oneof![
            Just(CmpOp::Lt),
            Just(CmpOp::Le),
            Just(CmpOp::Gt),
            Just(CmpOp::Ge),
            Just(CmpOp::Eq),
            Just(CmpOp::Ne)
        ],
        int_expr(),
        int_expr(),
    )
        .prop_map(|(op, l, r)| Expr::Cmp(op, Box::new(l), Box::new(r)));
    cmp.prop_recursive(2, 8, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone())
                .prop_map(|(l, r)| Expr::And(Box::new(l), Box::new(r))),
            (inner.clone(), inner.clone())
                .prop_map(|(l, r)| Expr::Or(Box::new(l), Box::new(r))),
            inner.prop_map(|e| Expr::Not(Box::new(e))),
        ]
    })
}

#[derive(Debug, Clone)]
enum StmtShape {
    Skip,
    AssignX(Expr),
    AssignY(Expr),
    StoreB(Expr, Expr),
    If(Expr, Vec<StmtShape>, Vec<StmtShape>),
    While(Expr, Vec<StmtShape>),
}

fn stmt_shape() -> impl Strategy<Value = StmtShape> {
    let leaf = prop_oneof![
        Just(StmtShape::Skip),
        int_expr().prop_map(StmtShape::AssignX),
        int_expr().prop_map(StmtShape::AssignY),
        (int_expr(), int_expr()).prop_map(|(i, v)| StmtShape::StoreB(i, v)),
    ];
    leaf.prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            (
                bool_expr(),
                prop::collection::vec(inner.clone(), 1..3),
                prop::collection::vec(inner.clone(), 1..3)
            )
                .prop_map(|(c, t, e)| StmtShape::If(c, t, e)),
            (bool_expr(), prop::collection::vec(inner, 1..3))
                .prop_map(|(c, b)| StmtShape::While(c, b)),
        ]
    })
}

/// Assign strictly increasing source lines in depth-first order, the way
/// the parser would see them.
fn realize(shapes: &[StmtShape], next_line: &mut u32) -> Vec<Statement> {
    shapes
        .iter()
        .map(|shape| {
            let line = *next_line;
            *next_line += 1;
            match shape {
                StmtShape::Skip => Statement::Skip { line },
                StmtShape::AssignX(e) => Statement::IntAssign {
                    line,
                    target: "x".into(),
                    value: e.clone(),
                },
                StmtShape::AssignY(e) => Statement::IntAssign {
                    line,
                    target: "y".into(),
                    value: e.clone(),
                },
                StmtShape::StoreB(i, v) => Statement::ArrayAssign {
                    line,
                    array: "b".into(),
                    index: i.clone(),
                    value: v.clone(),
                },
                StmtShape::If(c, t, e) => {
                    let then_branch = realize(t, next_line);
                    let else_branch = realize(e, next_line);
                    Statement::IfElse {
                        line,
                        cond: c.clone(),
                        then_branch,
                        else_branch,
                    }
                }
                StmtShape::While(c, b) => {
                    let body = realize(b, next_line);
                    Statement::While {
                        line,
                        cond: c.clone(),
                        body,
                    }
                }
            }
        })
        .collect()
}

fn program() -> impl Strategy<Value = Program> {
    prop::collection::vec(stmt_shape(), 1..5).prop_map(|shapes| {
        let decls = vec![
            VarDecl {
                name: "a".into(),
                is_const: true,
                is_array: true,
                line: 3,
            },
            VarDecl {
                name: "n".into(),
                is_const: true,
                is_array: false,
                line: 4,
            },
            VarDecl {
                name: "x".into(),
                is_const: false,
                is_array: false,
                line: 5,
            },
            VarDecl {
                name: "y".into(),
                is_const: false,
                is_array: false,
                line: 6,
            },
            VarDecl {
                name: "b".into(),
                is_const: false,
                is_array: true,
                line: 7,
            },
        ];
        let mut next_line = 8;
        let body = realize(&shapes, &mut next_line);
        Program { decls, body }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pretty_print_round_trips(p in program()) {
        let printed = pretty(&p);
        let reparsed = parse_program(&printed)
            .unwrap_or_else(|e| panic!("{e}\n{printed}"));
        prop_assert_eq!(reparsed, p);
    }
}

fn nat_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        Just(fol::zero()),
        Just(fol::var("u", Sort::Nat)),
        Just(fol::var("v", Sort::Nat)),
        Just(fol::var("w", Sort::Nat)),
    ];
    leaf.prop_recursive(3, 12, 1, |inner| {
        prop_oneof![
            inner.clone().prop_map(fol::succ),
            inner.prop_map(|t| fol::app("f", vec![t])),
        ]
    })
}

fn formula() -> impl Strategy<Value = Formula> {
    let atom = prop_oneof![
        (nat_term(), nat_term()).prop_map(|(l, r)| Formula::eq(l, r)),
        (nat_term(), nat_term()).prop_map(|(l, r)| Formula::less(l, r)),
    ];
    atom.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            prop::collection::vec(inner.clone(), 0..3).prop_map(Formula::and),
            (inner.clone(), inner.clone())
                .prop_map(|(l, r)| Formula::implies(l, r)),
            (prop_oneof![Just("u"), Just("v"), Just("w")], inner.clone()).prop_map(
                |(name, body)| Formula::Forall(
                    vec![(name.to_string(), Sort::Nat)],
                    Box::new(body)
                )
            ),
            (prop_oneof![Just("u"), Just("v")], inner).prop_map(|(name, body)| {
                Formula::Exists(vec![(name.to_string(), Sort::Nat)], Box::new(body))
            }),
        ]
    })
}

fn prop_sig() -> Signature {
    let mut sig = Signature::with_theory();
    sig.declare("f", vec![Sort::Nat], Sort::Nat).unwrap();
    sig
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn substitution_is_identity_off_the_free_variables(f in formula()) {
        let sig = prop_sig();
        let free = f.free_vars();
        let mut bindings = BTreeMap::new();
        for name in ["u", "v", "w"] {
            if !free.contains_key(name) {
                bindings.insert(name.to_string(), fol::succ(fol::zero()));
            }
        }
        let g = substitute(&f, &bindings, &sig).unwrap();
        prop_assert_eq!(g, f);
    }

    #[test]
    fn substitution_eliminates_the_substituted_variable(f in formula()) {
        let sig = prop_sig();
        let mut bindings = BTreeMap::new();
        bindings.insert("u".to_string(), fol::zero());
        let g = substitute(&f, &bindings, &sig).unwrap();
        prop_assert!(!g.free_vars().contains_key("u"));
    }
}
