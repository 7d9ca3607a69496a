//! External prover invocation: spawn a solver on an `.smt2` file, enforce a
//! wall-clock timeout, and classify the outcome from its output.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

/// Classification of one solver run. `Proved` means the solver reported the
/// negated-conjecture task unsatisfiable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Proved,
    NotProved,
    Unknown,
    Timeout,
    SolverError,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Proved => "proved",
            Verdict::NotProved => "not-proved",
            Verdict::Unknown => "unknown",
            Verdict::Timeout => "timeout",
            Verdict::SolverError => "solver-error",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SolverOutcome {
    pub verdict: Verdict,
    pub wall: Duration,
    /// First lines of the solver output, for reports.
    pub excerpt: String,
}

/// Ordered substring rule mapping solver output to a verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TokenRule {
    pub pattern: String,
    pub verdict: Verdict,
}

/// One solver setting (a column of the benchmark table).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Column label.
    pub name: String,
    /// Executable name or path.
    pub cmd: String,
    /// Argument template; `{file}`, `{timeout}` (seconds) and
    /// `{timeout_ms}` are substituted per run.
    pub args: Vec<String>,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
    /// Checked in order against the full output; first match wins.
    #[serde(default = "default_tokens")]
    pub tokens: Vec<TokenRule>,
}

fn default_timeout() -> u64 {
    60
}

fn default_tokens() -> Vec<TokenRule> {
    vec![
        TokenRule {
            pattern: "unsat".into(),
            verdict: Verdict::Proved,
        },
        TokenRule {
            pattern: "sat".into(),
            verdict: Verdict::NotProved,
        },
        TokenRule {
            pattern: "unknown".into(),
            verdict: Verdict::Unknown,
        },
    ]
}

fn vampire_tokens() -> Vec<TokenRule> {
    let mut tokens = vec![
        TokenRule {
            pattern: "% SZS status Unsatisfiable".into(),
            verdict: Verdict::Proved,
        },
        TokenRule {
            pattern: "Refutation found".into(),
            verdict: Verdict::Proved,
        },
        TokenRule {
            pattern: "% SZS status Satisfiable".into(),
            verdict: Verdict::NotProved,
        },
        TokenRule {
            pattern: "Time limit reached".into(),
            verdict: Verdict::Timeout,
        },
    ];
    tokens.extend(default_tokens());
    tokens
}

/// Built-in argument templates. `extra` is passed through after the
/// template (e.g. `-tha some -av on` for the superposition prover).
pub fn builtin(name: &str, timeout_secs: u64, extra: &[String]) -> Option<SolverConfig> {
    let mut config = match name {
        "z3" => SolverConfig {
            name: "z3".into(),
            cmd: "z3".into(),
            args: vec!["-smt2".into(), "-T:{timeout}".into(), "{file}".into()],
            timeout_secs,
            tokens: default_tokens(),
        },
        "cvc5" => SolverConfig {
            name: "cvc5".into(),
            cmd: "cvc5".into(),
            args: vec!["--tlimit={timeout_ms}".into(), "{file}".into()],
            timeout_secs,
            tokens: default_tokens(),
        },
        "cvc4" => SolverConfig {
            name: "cvc4".into(),
            cmd: "cvc4".into(),
            args: vec![
                "--tlimit={timeout_ms}".into(),
                "--lang".into(),
                "smt2".into(),
                "{file}".into(),
            ],
            timeout_secs,
            tokens: default_tokens(),
        },
        "vampire" => SolverConfig {
            name: "vampire".into(),
            cmd: "vampire".into(),
            args: vec![
                "--input_syntax".into(),
                "smtlib2".into(),
                "-t".into(),
                "{timeout}s".into(),
                "{file}".into(),
            ],
            timeout_secs,
            tokens: vampire_tokens(),
        },
        _ => return None,
    };
    if !extra.is_empty() {
        let file_arg = config.args.pop();
        config.args.extend(extra.iter().cloned());
        config.args.extend(file_arg);
        if name == "vampire" {
            config.name = format!("vampire {}", extra.join(" "));
        }
    }
    Some(config)
}

/// Load one or more solver configs from a JSON file (a single object or an
/// array of objects).
pub fn load_config_file(path: &Path) -> Result<Vec<SolverConfig>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read solver config {}: {e}", path.display()))?;
    if let Ok(one) = serde_json::from_str::<SolverConfig>(&text) {
        return Ok(vec![one]);
    }
    serde_json::from_str::<Vec<SolverConfig>>(&text)
        .map_err(|e| format!("bad solver config {}: {e}", path.display()))
}

/// Resolve the executable: verbatim if it contains a path separator,
/// otherwise searched on PATH. A missing executable is a configuration
/// error, distinct from a failing solver run.
pub fn resolve_executable(cmd: &str) -> Result<PathBuf, String> {
    let candidate = Path::new(cmd);
    if cmd.contains('/') {
        if candidate.is_file() {
            return Ok(candidate.to_path_buf());
        }
        return Err(format!("solver executable `{cmd}` not found"));
    }
    let path = std::env::var_os("PATH").unwrap_or_default();
    for dir in std::env::split_paths(&path) {
        let full = dir.join(cmd);
        if full.is_file() {
            return Ok(full);
        }
    }
    Err(format!("solver executable `{cmd}` not found on PATH"))
}

fn substitute_args(cfg: &SolverConfig, file: &Path) -> Vec<String> {
    cfg.args
        .iter()
        .map(|a| {
            a.replace("{file}", &file.to_string_lossy())
                .replace("{timeout_ms}", &(cfg.timeout_secs * 1000).to_string())
                .replace("{timeout}", &cfg.timeout_secs.to_string())
        })
        .collect()
}

/// Run a solver on a task file. Every process outcome maps to exactly one
/// verdict; only configuration problems (missing executable, unspawnable
/// process) are reported as errors.
pub fn run_solver(file: &Path, cfg: &SolverConfig) -> Result<SolverOutcome, String> {
    if cfg.timeout_secs == 0 {
        return Err(format!("solver `{}` has a zero timeout", cfg.name));
    }
    let exe = resolve_executable(&cfg.cmd)?;
    let args = substitute_args(cfg, file);
    let start = Instant::now();
    let mut child = Command::new(&exe)
        .args(&args)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| format!("cannot spawn `{}`: {e}", exe.display()))?;

    // Drain pipes on the side so a chatty solver can never block on a full
    // pipe buffer.
    let mut stdout_pipe = child.stdout.take().expect("piped stdout");
    let mut stderr_pipe = child.stderr.take().expect("piped stderr");
    let out_reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = stdout_pipe.read_to_string(&mut s);
        s
    });
    let err_reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = stderr_pipe.read_to_string(&mut s);
        s
    });

    let deadline = start + Duration::from_secs(cfg.timeout_secs);
    let status = loop {
        match child.try_wait() {
            Ok(Some(status)) => break status,
            Ok(None) => {
                if Instant::now() >= deadline {
                    let _ = child.kill();
                    let _ = child.wait();
                    // Orphaned grandchildren may still hold the pipes open,
                    // so the reader threads are left to finish on their own.
                    return Ok(SolverOutcome {
                        verdict: Verdict::Timeout,
                        wall: start.elapsed(),
                        excerpt: String::new(),
                    });
                }
                std::thread::sleep(Duration::from_millis(10));
            }
            Err(e) => return Err(format!("waiting for solver: {e}")),
        }
    };
    let wall = start.elapsed();
    let stdout = out_reader.join().unwrap_or_default();
    let stderr = err_reader.join().unwrap_or_default();
    let output = format!("{stdout}{stderr}");
    let excerpt: String = output.lines().take(4).collect::<Vec<_>>().join(" | ");

    let verdict = match classify(&output, &cfg.tokens) {
        Some(v) => v,
        None if status.success() => Verdict::Unknown,
        None => Verdict::SolverError,
    };
    Ok(SolverOutcome {
        verdict,
        wall,
        excerpt,
    })
}

fn classify(output: &str, tokens: &[TokenRule]) -> Option<Verdict> {
    tokens
        .iter()
        .find(|rule| output.contains(&rule.pattern))
        .map(|rule| rule.verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn fake_solver(dir: &Path, name: &str, body: &str) -> PathBuf {
        let path = dir.join(name);
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "#!/bin/sh\n{body}").unwrap();
        let mut perms = f.metadata().unwrap().permissions();
        use std::os::unix::fs::PermissionsExt;
        perms.set_mode(0o755);
        std::fs::set_permissions(&path, perms).unwrap();
        path
    }

    fn temp_dir(tag: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!(
            "tracelogic-solver-{tag}-{}",
            std::process::id()
        ));
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    fn config_for(path: &Path) -> SolverConfig {
        SolverConfig {
            name: "fake".into(),
            cmd: path.to_string_lossy().into_owned(),
            args: vec!["{file}".into()],
            timeout_secs: 1,
            tokens: default_tokens(),
        }
    }

    #[test]
    fn classifies_unsat_as_proved() {
        let dir = temp_dir("unsat");
        let exe = fake_solver(&dir, "fake-unsat.sh", "echo unsat");
        let task = dir.join("task.smt2");
        std::fs::write(&task, "(check-sat)\n").unwrap();
        let outcome = run_solver(&task, &config_for(&exe)).unwrap();
        assert_eq!(outcome.verdict, Verdict::Proved);
    }

    #[test]
    fn classifies_sat_as_not_proved_and_unknown_as_unknown() {
        let dir = temp_dir("sat");
        let task = dir.join("task.smt2");
        std::fs::write(&task, "(check-sat)\n").unwrap();
        for (body, expected) in [
            ("echo sat", Verdict::NotProved),
            ("echo unknown", Verdict::Unknown),
        ] {
            let exe = fake_solver(&dir, "fake.sh", body);
            let outcome = run_solver(&task, &config_for(&exe)).unwrap();
            assert_eq!(outcome.verdict, expected, "{body}");
        }
    }

    #[test]
    fn garbled_output_with_nonzero_exit_is_solver_error() {
        let dir = temp_dir("err");
        let exe = fake_solver(&dir, "fake-err.sh", "echo parse error >&2; exit 3");
        let task = dir.join("task.smt2");
        std::fs::write(&task, "junk").unwrap();
        let outcome = run_solver(&task, &config_for(&exe)).unwrap();
        assert_eq!(outcome.verdict, Verdict::SolverError);
    }

    #[test]
    fn sleeping_solver_times_out_within_budget() {
        let dir = temp_dir("sleep");
        let exe = fake_solver(&dir, "fake-sleep.sh", "sleep 100");
        let task = dir.join("task.smt2");
        std::fs::write(&task, "(check-sat)\n").unwrap();
        let start = Instant::now();
        let outcome = run_solver(&task, &config_for(&exe)).unwrap();
        assert_eq!(outcome.verdict, Verdict::Timeout);
        assert!(start.elapsed() < Duration::from_secs(3), "{:?}", start.elapsed());
    }

    #[test]
    fn zero_timeout_is_a_configuration_error() {
        let mut cfg = builtin("z3", 60, &[]).unwrap();
        cfg.timeout_secs = 0;
        let err = run_solver(Path::new("/dev/null"), &cfg).unwrap_err();
        assert!(err.contains("zero timeout"), "{err}");
    }

    #[test]
    fn missing_executable_is_a_configuration_error() {
        let cfg = SolverConfig {
            name: "ghost".into(),
            cmd: "definitely-not-a-solver-9000".into(),
            args: vec!["{file}".into()],
            timeout_secs: 1,
            tokens: default_tokens(),
        };
        assert!(run_solver(Path::new("/dev/null"), &cfg).is_err());
    }

    #[test]
    fn unsat_token_wins_over_sat_substring() {
        assert_eq!(
            classify("unsat\n", &default_tokens()),
            Some(Verdict::Proved)
        );
        assert_eq!(
            classify("sat\n", &default_tokens()),
            Some(Verdict::NotProved)
        );
    }

    #[test]
    fn builtin_templates_exist_for_three_solver_families() {
        for name in ["vampire", "z3", "cvc4", "cvc5"] {
            assert!(builtin(name, 60, &[]).is_some(), "{name}");
        }
        assert!(builtin("made-up", 60, &[]).is_none());
        let v = builtin("vampire", 60, &["-tha".into(), "some".into()]).unwrap();
        assert!(v.args.contains(&"-tha".to_string()));
        assert_eq!(v.args.last().unwrap(), "{file}");
    }
}
