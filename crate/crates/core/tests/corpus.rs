//! Pipeline checks over the shipped benchmark corpus: every file parses,
//! pretty-print round-trips, builds a valid task, and its axioms are never
//! falsified by recorded executions.

use std::fs;
use std::path::PathBuf;

use tracelogic_core::ast::pretty;
use tracelogic_core::interp::{random_input, run, Rng, TraceRecord, DEFAULT_FUEL};
use tracelogic_core::oracle::{check_task, evaluate, BoundedDomain, Evaluator, Tri};
use tracelogic_core::parser::parse_program;
use tracelogic_core::pipeline::{build_from_source, BuildOptions, Built};
use tracelogic_core::semantics::TraceMode;

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn corpus_files() -> Vec<(String, String)> {
    let mut files: Vec<(String, String)> = fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .filter_map(|e| {
            let path = e.ok()?.path();
            if path.extension()? == "spec" {
                let name = path.file_stem()?.to_string_lossy().into_owned();
                Some((name, fs::read_to_string(&path).ok()?))
            } else {
                None
            }
        })
        .collect();
    files.sort();
    files
}

fn build(name: &str, source: &str) -> Built {
    build_from_source(
        source,
        Some(name),
        &BuildOptions {
            require_conjecture: true,
            ..Default::default()
        },
    )
    .unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn corpus_has_27_benchmarks() {
    assert_eq!(corpus_files().len(), 27);
}

#[test]
fn every_benchmark_builds_a_valid_task() {
    for (name, source) in corpus_files() {
        let built = build(&name, &source);
        assert!(built.task.conjecture.is_some(), "{name}");
        built.task.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn every_benchmark_program_round_trips_through_the_pretty_printer() {
    for (name, source) in corpus_files() {
        let built = build(&name, &source);
        let printed = pretty(&built.spec.program);
        let reparsed =
            parse_program(&printed).unwrap_or_else(|e| panic!("{name}: reparse: {e}\n{printed}"));
        assert_eq!(reparsed, built.spec.program, "{name}");
    }
}

fn paired_records(built: &Built, seed: u64, equal: bool) -> (TraceRecord, TraceRecord) {
    let program = &built.spec.program;
    let mut rng = Rng::new(seed);
    let input1 = random_input(program, &mut rng);
    let input2 = if equal {
        input1.clone()
    } else {
        random_input(program, &mut rng)
    };
    let r1 = run(program, &input1, DEFAULT_FUEL).unwrap();
    let r2 = run(program, &input2, DEFAULT_FUEL).unwrap();
    (r1, r2)
}

#[test]
fn axioms_and_lemmas_are_never_falsified_on_sample_runs() {
    for (name, source) in corpus_files() {
        let built = build(&name, &source);
        assert_eq!(built.mode(), TraceMode::Two, "{name}");
        for seed in 0..3u64 {
            for equal in [false, true] {
                let (r1, r2) = paired_records(&built, 1000 + seed, equal);
                let report = check_task(&built.task, &built.spec.program, &[&r1, &r2])
                    .unwrap_or_else(|e| panic!("{name}: {e}"));
                assert!(
                    report.pass(),
                    "{name} seed {seed} equal {equal}:\n{}",
                    report.render()
                );
                // Semantics axioms are fully determined by the records.
                for (label, verdict) in &report.axioms {
                    if label.starts_with("semantics-") || label.starts_with("theory-") {
                        assert_eq!(*verdict, Tri::True, "{name}: {label}");
                    }
                }
            }
        }
    }
}

#[test]
fn valid_conjectures_are_never_falsified() {
    // Every shipped benchmark property is valid, so its conjecture can
    // never evaluate to false in any execution-interpretation pair.
    for (name, source) in corpus_files() {
        let built = build(&name, &source);
        for seed in 0..4u64 {
            for equal in [false, true] {
                let (r1, r2) = paired_records(&built, 2000 + seed, equal);
                let report =
                    check_task(&built.task, &built.spec.program, &[&r1, &r2]).unwrap();
                let (_, verdict) = report.conjecture.expect("corpus tasks have conjectures");
                assert_ne!(verdict, Tri::False, "{name} seed {seed} equal {equal}");
            }
        }
    }
}

#[test]
fn insecure_variant_is_falsified_by_a_counterexample_pair() {
    let path = corpus_dir().join("extra/insecure-3-ni-high-guard.spec");
    let source = fs::read_to_string(path).unwrap();
    let built = build("insecure-3-ni-high-guard", &source);
    let program = &built.spec.program;

    // Equal low input, high inputs driving different branches.
    let mut input1 = tracelogic_core::interp::ConcreteInput::default();
    input1.set_scalar("lo", 3);
    input1.set_scalar("hi", 5);
    let mut input2 = input1.clone();
    input2.set_scalar("hi", -1);
    let r1 = run(program, &input1, DEFAULT_FUEL).unwrap();
    let r2 = run(program, &input2, DEFAULT_FUEL).unwrap();
    let report = check_task(&built.task, program, &[&r1, &r2]).unwrap();
    assert!(report.pass(), "axioms must still hold on the insecure program");
    assert!(report.counterexample(), "{}", report.render());
}

#[test]
fn int_domain_enlargement_keeps_semantics_axioms_true() {
    let (name, source) = corpus_files()
        .into_iter()
        .find(|(n, _)| n == "4-hw-swap-in-array-full")
        .unwrap();
    let built = build(&name, &source);
    let (r1, r2) = paired_records(&built, 77, false);
    let records = [&r1, &r2];
    let semantics: Vec<_> = built
        .task
        .axioms
        .iter()
        .filter(|a| a.label.starts_with("semantics-"))
        .collect();
    let formulas: Vec<_> = semantics.iter().map(|a| &a.formula).collect();
    let base = BoundedDomain::new(&records, &formulas);
    let enlarged = base.with_extra_ints(&[-100, 41, 99]);
    let eval_base =
        Evaluator::new(&built.spec.program, TraceMode::Two, &records, base).unwrap();
    let eval_big =
        Evaluator::new(&built.spec.program, TraceMode::Two, &records, enlarged).unwrap();
    for axiom in &semantics {
        assert_eq!(eval_base.eval(&axiom.formula).unwrap(), Tri::True, "{}", axiom.label);
        assert_eq!(eval_big.eval(&axiom.formula).unwrap(), Tri::True, "{}", axiom.label);
    }
}

#[test]
fn shipped_fixture_pairs_run_and_pass() {
    let dir = corpus_dir().join("inputs");
    for bench in [
        "4-hw-swap-in-array-full",
        "3-ni-high-guard-equal-branches",
        "9-ni-equal-output",
        "3-sens-abs-diff-up-to-k",
    ] {
        let source = fs::read_to_string(corpus_dir().join(format!("{bench}.spec"))).unwrap();
        let built = build(bench, &source);
        let mut fixtures: Vec<_> = fs::read_dir(dir.join(bench))
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        fixtures.sort();
        assert!(!fixtures.is_empty());
        for fixture in fixtures {
            let text = fs::read_to_string(&fixture).unwrap();
            let (i1, i2, _) = tracelogic_core::interp::parse_fixture(&text).unwrap();
            let r1 = run(&built.spec.program, &i1, DEFAULT_FUEL).unwrap();
            let r2 = run(&built.spec.program, &i2, DEFAULT_FUEL).unwrap();
            let report = check_task(&built.task, &built.spec.program, &[&r1, &r2]).unwrap();
            assert!(report.pass(), "{bench} {fixture:?}:\n{}", report.render());
            let (_, verdict) = report.conjecture.unwrap();
            assert_ne!(verdict, Tri::False, "{bench} {fixture:?}");
        }
    }
}

#[test]
fn running_example_golden_timepoints() {
    let source =
        fs::read_to_string(corpus_dir().join("4-hw-swap-in-array-full.spec")).unwrap();
    let built = build("4-hw-swap-in-array-full", &source);
    let ctx = &built.ctx;
    let tr = tracelogic_core::semantics::trace_var();
    let lines = [
        format!("l6 = {}", ctx.tp(6)),
        format!("start(9) = {}", ctx.start(9)),
        format!("lastIt(9) = {}", ctx.last_iteration(9, Some(tr))),
        format!("tp(11) = {}", ctx.tp(11)),
        format!("tp(12) = {}", ctx.tp(12)),
        format!("end(12) = {}", ctx.end(12)),
        format!("end(9) = {}", ctx.end(9)),
    ]
    .join("\n");
    let expected = "\
l6 = l6
start(9) = l9(zero)
lastIt(9) = n9(tr)
tp(11) = l11(It9)
tp(12) = l12(It9)
end(12) = l9(s(It9))
end(9) = main_end";
    assert_eq!(lines, expected);
}

#[test]
fn running_example_smtlib_matches_frozen_golden_file() {
    let source =
        fs::read_to_string(corpus_dir().join("4-hw-swap-in-array-full.spec")).unwrap();
    let built = build("4-hw-swap-in-array-full", &source);
    let emitted = tracelogic_core::smtlib::emit(&built.task);
    let golden = fs::read_to_string(
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/running-example.smt2"),
    )
    .unwrap();
    assert_eq!(emitted, golden);
}

#[test]
fn every_emitted_task_round_trips_through_the_strict_reader() {
    for (name, source) in corpus_files() {
        let built = build(&name, &source);
        let emitted = tracelogic_core::smtlib::emit(&built.task);
        let script = tracelogic_core::smtlib::parse_script(&emitted)
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(
            tracelogic_core::smtlib::print_script(&script),
            emitted,
            "{name}"
        );
    }
}

/// Heavier randomized sweep; run with `cargo test -- --ignored`.
#[test]
#[ignore]
fn stress_oracle_never_falsifies_axioms() {
    for (name, source) in corpus_files() {
        let built = build(&name, &source);
        for seed in 0..50u64 {
            for equal in [false, true] {
                let (r1, r2) = paired_records(&built, 31_000 + seed, equal);
                let report =
                    check_task(&built.task, &built.spec.program, &[&r1, &r2]).unwrap();
                assert!(report.pass(), "{name} seed {seed}:\n{}", report.render());
                let (_, verdict) = report.conjecture.unwrap();
                assert_ne!(verdict, Tri::False, "{name} seed {seed} equal {equal}");
            }
        }
    }
}

#[test]
fn unused_evaluate_entry_point_smoke() {
    // `evaluate` builds its own domain; spot-check it against `check_task`.
    let (name, source) = corpus_files()
        .into_iter()
        .find(|(n, _)| n == "1-hw-equal-arrays")
        .unwrap();
    let built = build(&name, &source);
    let (r1, r2) = paired_records(&built, 5, true);
    for axiom in &built.task.axioms {
        let v = evaluate(
            &axiom.formula,
            &built.spec.program,
            TraceMode::Two,
            &[&r1, &r2],
        )
        .unwrap();
        assert_ne!(v, Tri::False, "{}", axiom.label);
    }
}
