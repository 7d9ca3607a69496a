//! Command-line driver.
//!
//! ```text
//! tracelogic encode <file.spec> [--traces N] [--lemmas ids] [--out DIR]
//! tracelogic check  <file.spec> <inputs-dir> [--traces N] [--lemmas ids]
//!                   [--fuel N] [--json]
//! tracelogic prove  <file.spec> [--solver NAME|cfg.json]... [--timeout S]
//!                   [--traces N] [--lemmas ids] [--out DIR]
//! tracelogic bench  <corpus-dir> [--solver NAME|cfg.json]... [--timeout S]
//!                   [--jobs N] [--out DIR]
//! ```
//!
//! Exit codes: 0 success/PASS, 1 verification or oracle failure, 2 usage or
//! configuration error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use tracelogic_core::interp::{parse_fixture, run, DEFAULT_FUEL};
use tracelogic_core::lemmas::{LemmaConfig, SchemaId};
use tracelogic_core::oracle::check_task;
use tracelogic_core::pipeline::{build_from_source, BuildOptions, Built};
use tracelogic_core::semantics::TraceMode;
use tracelogic_core::smtlib;

mod bench;
mod solver;

use solver::{builtin, load_config_file, resolve_executable, SolverConfig};

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match dispatch(&args) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(args: &[String]) -> Result<ExitCode, String> {
    let (command, rest) = match args.split_first() {
        Some((c, rest)) => (c.as_str(), rest),
        None => return Err(usage()),
    };
    match command {
        "encode" => cmd_encode(rest),
        "check" => cmd_check(rest),
        "prove" => cmd_prove(rest),
        "bench" => cmd_bench(rest),
        "--help" | "-h" | "help" => {
            println!("{}", usage());
            Ok(ExitCode::SUCCESS)
        }
        other => Err(format!("unknown command `{other}`\n{}", usage())),
    }
}

fn usage() -> String {
    "usage: tracelogic <encode|check|prove|bench> <paths> \
     [--traces N] [--lemmas <ids>] [--solver <name>] [--timeout S] [--out DIR] \
     [--fuel N] [--jobs N] [--json]"
        .to_string()
}

#[derive(Default)]
struct CommonFlags {
    paths: Vec<PathBuf>,
    traces: Option<u8>,
    lemmas: Option<Vec<String>>,
    solvers: Vec<String>,
    timeout: Option<u64>,
    out: Option<PathBuf>,
    fuel: Option<u64>,
    jobs: Option<usize>,
    json: bool,
}

fn parse_flags(args: &[String]) -> Result<CommonFlags, String> {
    let mut flags = CommonFlags::default();
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        let mut value = |flag: &str| {
            it.next()
                .cloned()
                .ok_or_else(|| format!("{flag} needs a value"))
        };
        match arg.as_str() {
            "--traces" => {
                let v = value("--traces")?;
                flags.traces = Some(v.parse().map_err(|_| "--traces expects 1 or 2")?);
            }
            "--lemmas" => {
                let v = value("--lemmas")?;
                flags.lemmas = Some(v.split(',').map(str::to_string).collect());
            }
            "--solver" => {
                let v = value("--solver")?;
                flags.solvers.push(v);
            }
            "--timeout" => {
                let v = value("--timeout")?;
                flags.timeout = Some(v.parse().map_err(|_| "--timeout expects seconds")?);
            }
            "--out" => {
                let v = value("--out")?;
                flags.out = Some(PathBuf::from(v));
            }
            "--fuel" => {
                let v = value("--fuel")?;
                flags.fuel = Some(v.parse().map_err(|_| "--fuel expects a step count")?);
            }
            "--jobs" => {
                let v = value("--jobs")?;
                flags.jobs = Some(v.parse().map_err(|_| "--jobs expects a count")?);
            }
            "--json" => flags.json = true,
            other if other.starts_with("--") => return Err(format!("unknown flag `{other}`")),
            path => flags.paths.push(PathBuf::from(path)),
        }
    }
    Ok(flags)
}

fn lemma_config(flags: &CommonFlags) -> Result<LemmaConfig, String> {
    match &flags.lemmas {
        None => Ok(LemmaConfig::all()),
        Some(ids) => {
            let mut schemas = Vec::new();
            for id in ids {
                match SchemaId::parse(id) {
                    Some(s) => schemas.push(s),
                    None => return Err(format!("unknown lemma schema `{id}`")),
                }
            }
            Ok(LemmaConfig::only(schemas))
        }
    }
}

fn build_spec(path: &Path, flags: &CommonFlags, require_conjecture: bool) -> Result<Built, String> {
    let source = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "task".into());
    let options = BuildOptions {
        traces: flags.traces,
        lemmas: lemma_config(flags)?,
        require_conjecture,
    };
    build_from_source(&source, Some(&name), &options)
        .map_err(|e| format!("{}: {e}", path.display()))
}

fn write_task(built: &Built, out_dir: &Path) -> Result<PathBuf, String> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| format!("cannot create {}: {e}", out_dir.display()))?;
    let stem = built.task.source.as_deref().unwrap_or("task");
    let path = out_dir.join(format!("{stem}.smt2"));
    std::fs::write(&path, smtlib::emit(&built.task))
        .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    Ok(path)
}

fn cmd_encode(args: &[String]) -> Result<ExitCode, String> {
    let flags = parse_flags(args)?;
    let [path] = flags.paths.as_slice() else {
        return Err("encode expects exactly one .spec file".into());
    };
    let built = build_spec(path, &flags, true)?;
    let out_dir = flags.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let smt_path = write_task(&built, &out_dir)?;
    println!(
        "{}: {} theory axioms, {} semantics axioms, {} lemmas -> {}",
        path.display(),
        built.task.axioms.len() - built.semantics_count - built.lemmas.len(),
        built.semantics_count,
        built.lemmas.len(),
        smt_path.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_check(args: &[String]) -> Result<ExitCode, String> {
    let flags = parse_flags(args)?;
    let [spec_path, inputs_dir] = flags.paths.as_slice() else {
        return Err("check expects a .spec file and an inputs directory".into());
    };
    let built = build_spec(spec_path, &flags, false)?;
    let fuel = flags.fuel.unwrap_or(DEFAULT_FUEL);

    let mut fixtures: Vec<PathBuf> = std::fs::read_dir(inputs_dir)
        .map_err(|e| format!("cannot read {}: {e}", inputs_dir.display()))?
        .filter_map(|e| {
            let p = e.ok()?.path();
            (p.extension()? == "in").then_some(p)
        })
        .collect();
    fixtures.sort();
    if fixtures.is_empty() {
        return Err(format!("no .in fixtures in {}", inputs_dir.display()));
    }

    let program = &built.spec.program;
    let mut failures = 0usize;
    let mut counterexamples = 0usize;
    for fixture in &fixtures {
        let text = std::fs::read_to_string(fixture)
            .map_err(|e| format!("cannot read {}: {e}", fixture.display()))?;
        let (input1, input2, _) = match parse_fixture(&text) {
            Ok(v) => v,
            Err(e) => {
                eprintln!("{}: {e}", fixture.display());
                failures += 1;
                continue;
            }
        };
        let runs = match built.mode() {
            TraceMode::One => vec![run(program, &input1, fuel)],
            TraceMode::Two => vec![run(program, &input1, fuel), run(program, &input2, fuel)],
        };
        let records: Result<Vec<_>, _> = runs.into_iter().collect();
        let records = match records {
            Ok(r) => r,
            Err(e) => {
                eprintln!("{}: {e}", fixture.display());
                failures += 1;
                continue;
            }
        };
        let record_refs: Vec<&_> = records.iter().collect();
        let report = check_task(&built.task, program, &record_refs)
            .map_err(|e| format!("{}: {e}", fixture.display()))?;

        if flags.json {
            for (label, verdict) in &report.axioms {
                println!(
                    "{}",
                    serde_json::json!({
                        "input": fixture.display().to_string(),
                        "axiom": label,
                        "verdict": verdict.to_string(),
                    })
                );
            }
            if let Some((name, verdict)) = &report.conjecture {
                println!(
                    "{}",
                    serde_json::json!({
                        "input": fixture.display().to_string(),
                        "conjecture": name,
                        "verdict": verdict.to_string(),
                    })
                );
            }
        } else {
            println!("== {}", fixture.display());
            print!("{}", report.render());
        }
        if !report.pass() {
            failures += 1;
        }
        if report.counterexample() {
            counterexamples += 1;
            println!("counterexample: conjecture false on {}", fixture.display());
        }
    }

    println!(
        "checked {} inputs: {} failing, {} conjecture counterexamples",
        fixtures.len(),
        failures,
        counterexamples
    );
    if failures > 0 {
        Ok(ExitCode::from(1))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn solver_configs(flags: &CommonFlags) -> Result<Vec<SolverConfig>, String> {
    if flags.solvers.is_empty() {
        return Err("no solver configured (use --solver <name> or --solver <config.json>)".into());
    }
    let timeout = flags.timeout.unwrap_or(60);
    let mut configs = Vec::new();
    for entry in &flags.solvers {
        if entry.ends_with(".json") {
            configs.extend(load_config_file(Path::new(entry))?);
        } else {
            // `name:extra args` passes options through to the template.
            let (name, extra) = match entry.split_once(':') {
                Some((name, extra)) => (
                    name,
                    extra.split_whitespace().map(str::to_string).collect(),
                ),
                None => (entry.as_str(), Vec::new()),
            };
            let config = builtin(name, timeout, &extra).ok_or_else(|| {
                format!("unknown solver `{name}` (built-ins: vampire, z3, cvc4, cvc5)")
            })?;
            configs.push(config);
        }
    }
    for c in &mut configs {
        if let Some(timeout) = flags.timeout {
            c.timeout_secs = timeout;
        }
        resolve_executable(&c.cmd).map_err(|e| format!("configuration error: {e}"))?;
    }
    Ok(configs)
}

fn cmd_prove(args: &[String]) -> Result<ExitCode, String> {
    let flags = parse_flags(args)?;
    let [path] = flags.paths.as_slice() else {
        return Err("prove expects exactly one .spec file".into());
    };
    let configs = solver_configs(&flags)?;
    let built = build_spec(path, &flags, true)?;
    let out_dir = flags
        .out
        .clone()
        .unwrap_or_else(|| std::env::temp_dir().join("tracelogic-prove"));
    let smt_path = write_task(&built, &out_dir)?;

    let mut any_proved = false;
    for config in &configs {
        let outcome = solver::run_solver(&smt_path, config)?;
        println!(
            "{}: {} ({} ms) {}",
            config.name,
            outcome.verdict,
            outcome.wall.as_millis(),
            outcome.excerpt
        );
        any_proved |= outcome.verdict == solver::Verdict::Proved;
    }
    Ok(if any_proved {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_bench(args: &[String]) -> Result<ExitCode, String> {
    let flags = parse_flags(args)?;
    let [corpus_dir] = flags.paths.as_slice() else {
        return Err("bench expects exactly one corpus directory".into());
    };
    let configs = solver_configs(&flags)?;
    let files = bench::discover_corpus(corpus_dir)
        .map_err(|e| format!("cannot read {}: {e}", corpus_dir.display()))?;
    if files.is_empty() {
        return Err(format!("no .spec files in {}", corpus_dir.display()));
    }

    let out_dir = flags
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("bench-out"));
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| format!("cannot create {}: {e}", out_dir.display()))?;

    let mut tasks = Vec::new();
    for file in &files {
        let built = build_spec(file, &flags, true)?;
        let smt_path = write_task(&built, &out_dir)?;
        let name = built.task.source.clone().unwrap_or_default();
        tasks.push((name, smt_path));
    }

    let workers = flags.jobs.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    });
    let result = bench::run_grid(&tasks, &configs, workers);

    let table = result.render();
    print!("{table}");
    std::fs::write(out_dir.join("bench.txt"), &table)
        .map_err(|e| format!("cannot write results: {e}"))?;
    std::fs::write(out_dir.join("bench.jsonl"), result.to_jsonl())
        .map_err(|e| format!("cannot write results: {e}"))?;
    println!(
        "wrote {} and {}",
        out_dir.join("bench.txt").display(),
        out_dir.join("bench.jsonl").display()
    );
    Ok(ExitCode::SUCCESS)
}
