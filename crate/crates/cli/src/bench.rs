//! Benchmark harness: run every corpus task against every solver setting
//! with a bounded worker pool and render the results as a grid with
//! per-column totals and unique counts.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::Serialize;

use crate::solver::{run_solver, SolverConfig, SolverOutcome, Verdict};

/// One cell of the result grid.
#[derive(Debug, Clone, Serialize)]
pub struct BenchCell {
    pub benchmark: String,
    pub column: String,
    pub verdict: Verdict,
    pub wall_ms: u64,
}

#[derive(Debug)]
pub struct BenchmarkResult {
    pub benchmarks: Vec<String>,
    pub columns: Vec<String>,
    /// Row-major: `cells[row][col]`.
    pub cells: Vec<Vec<BenchCell>>,
}

impl BenchmarkResult {
    /// Proved count per column.
    pub fn totals(&self) -> Vec<usize> {
        (0..self.columns.len())
            .map(|c| {
                self.cells
                    .iter()
                    .filter(|row| row[c].verdict == Verdict::Proved)
                    .count()
            })
            .collect()
    }

    /// Benchmarks proved in this column and in no other.
    pub fn uniques(&self) -> Vec<usize> {
        (0..self.columns.len())
            .map(|c| {
                self.cells
                    .iter()
                    .filter(|row| {
                        row[c].verdict == Verdict::Proved
                            && row
                                .iter()
                                .enumerate()
                                .all(|(i, cell)| i == c || cell.verdict != Verdict::Proved)
                    })
                    .count()
            })
            .collect()
    }

    /// Table-shaped text: one row per benchmark, `✓` for proved, `-` for
    /// not proved or unknown, `t` for timeout, `e` for solver error.
    pub fn render(&self) -> String {
        let name_width = self
            .benchmarks
            .iter()
            .map(|b| b.len())
            .max()
            .unwrap_or(9)
            .max("Benchmark".len());
        let col_width = self.columns.iter().map(|c| c.len()).max().unwrap_or(1).max(3);
        let mut out = String::new();
        out.push_str(&format!("{:name_width$}", "Benchmark"));
        for c in &self.columns {
            out.push_str(&format!(" | {c:>col_width$}"));
        }
        out.push('\n');
        out.push_str(&"-".repeat(name_width + self.columns.len() * (col_width + 3)));
        out.push('\n');
        for (row, bench) in self.cells.iter().zip(&self.benchmarks) {
            out.push_str(&format!("{bench:name_width$}"));
            for cell in row {
                let mark = match cell.verdict {
                    Verdict::Proved => "✓",
                    Verdict::NotProved | Verdict::Unknown => "-",
                    Verdict::Timeout => "t",
                    Verdict::SolverError => "e",
                };
                out.push_str(&format!(" | {mark:>col_width$}"));
            }
            out.push('\n');
        }
        out.push_str(&format!("{:name_width$}", "Total"));
        for t in self.totals() {
            out.push_str(&format!(" | {t:>col_width$}"));
        }
        out.push('\n');
        out.push_str(&format!("{:name_width$}", "Unique"));
        for u in self.uniques() {
            out.push_str(&format!(" | {u:>col_width$}"));
        }
        out.push('\n');
        out
    }

    /// Line-delimited JSON, one record per cell in deterministic order.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for row in &self.cells {
            for cell in row {
                out.push_str(&serde_json::to_string(cell).expect("serializable cell"));
                out.push('\n');
            }
        }
        out
    }
}

/// Discover `.spec` files in a corpus directory, ordered by benchmark
/// family, then leading number, then name (the table's row order).
pub fn discover_corpus(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| {
            let path = e.ok()?.path();
            (path.extension()? == "spec").then_some(path)
        })
        .collect();
    files.sort_by_key(|p| sort_key(p));
    Ok(files)
}

fn sort_key(path: &Path) -> (String, u32, String) {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut parts = stem.splitn(2, '-');
    let number = parts.next().and_then(|n| n.parse().ok()).unwrap_or(0);
    let family = parts
        .next()
        .unwrap_or("")
        .split('-')
        .next()
        .unwrap_or("")
        .to_string();
    (family, number, stem)
}

/// Run every (task file, solver setting) pair with at most `workers`
/// concurrent solver processes; results are reported in deterministic
/// order. A per-cell failure is recorded and the run continues.
pub fn run_grid(
    tasks: &[(String, PathBuf)],
    solvers: &[SolverConfig],
    workers: usize,
) -> BenchmarkResult {
    let jobs: Vec<(usize, usize)> = (0..tasks.len())
        .flat_map(|b| (0..solvers.len()).map(move |s| (b, s)))
        .collect();
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<SolverOutcome>>> = Mutex::new(vec![None; jobs.len()]);

    let workers = workers.max(1).min(jobs.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let j = next.fetch_add(1, Ordering::Relaxed);
                if j >= jobs.len() {
                    break;
                }
                let (b, s) = jobs[j];
                let outcome = run_solver(&tasks[b].1, &solvers[s]).unwrap_or_else(|e| {
                    SolverOutcome {
                        verdict: Verdict::SolverError,
                        wall: Duration::ZERO,
                        excerpt: e,
                    }
                });
                results.lock().expect("pool lock")[j] = Some(outcome);
            });
        }
    });

    let results = results.into_inner().expect("pool lock");
    let cells = (0..tasks.len())
        .map(|b| {
            (0..solvers.len())
                .map(|s| {
                    let outcome = results[b * solvers.len() + s]
                        .as_ref()
                        .expect("every job ran");
                    BenchCell {
                        benchmark: tasks[b].0.clone(),
                        column: solvers[s].name.clone(),
                        verdict: outcome.verdict,
                        wall_ms: outcome.wall.as_millis() as u64,
                    }
                })
                .collect()
        })
        .collect();
    BenchmarkResult {
        benchmarks: tasks.iter().map(|(n, _)| n.clone()).collect(),
        columns: solvers.iter().map(|s| s.name.clone()).collect(),
        cells,
    }
}
