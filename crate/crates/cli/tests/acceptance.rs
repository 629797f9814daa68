//! Acceptance suite: criteria 1-10 on the canonical scenario, then the
//! determinism and regression criterion against the built binary.
//!
//! Prints one `[PASS]`/`[FAIL]` line per criterion and exits non-zero if any
//! fails. `MINDET_BLESS=1` rewrites the golden files instead of comparing.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use mindet_core::verify::{run_criterion, title, CriterionOutcome, CRITERIA};
use mindet_core::Scenario;

const GOLDEN: &[(&str, &str)] = &[
    ("position-density", "position_density.csv"),
    ("momentum-density", "momentum_density.csv"),
    ("momentum-density", "momentum_moments.csv"),
];

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

fn mindet(args: &[&str], out: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_mindet"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("MINDET_OUT")
        .output()
        .expect("mindet runs")
}

/// `Err` carries the first reason the criterion fails.
fn determinism_and_regression() -> Result<(), String> {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let verify = mindet(&["verify"], &tmp.path().join("v"));
    if verify.status.code() != Some(0) {
        return Err(format!(
            "verify exited with {:?}: {}",
            verify.status.code(),
            String::from_utf8_lossy(&verify.stdout)
        ));
    }

    let runs = [tmp.path().join("a"), tmp.path().join("b")];
    for dir in &runs {
        for experiment in ["position-density", "momentum-density"] {
            let o = mindet(&[experiment], dir);
            if !o.status.success() {
                return Err(format!("{experiment} exited with {:?}", o.status.code()));
            }
        }
    }
    let bless = std::env::var_os("MINDET_BLESS").is_some();
    for (experiment, file) in GOLDEN {
        let first = std::fs::read(runs[0].join(experiment).join(file)).map_err(|e| format!("{file}: {e}"))?;
        let second = std::fs::read(runs[1].join(experiment).join(file)).map_err(|e| format!("{file}: {e}"))?;
        if first != second {
            return Err(format!("{file} differs between two identical runs"));
        }
        let golden = golden_dir().join(file);
        if bless {
            std::fs::create_dir_all(golden_dir()).map_err(|e| e.to_string())?;
            std::fs::write(&golden, &first).map_err(|e| e.to_string())?;
            continue;
        }
        let expected = std::fs::read(&golden).map_err(|e| format!("{}: {e}", golden.display()))?;
        if expected != first {
            return Err(format!("{file} differs from {}", golden.display()));
        }
    }
    for experiment in ["position-density", "momentum-density"] {
        let a = std::fs::read(runs[0].join(experiment).join("summary.json")).map_err(|e| e.to_string())?;
        let b = std::fs::read(runs[1].join(experiment).join("summary.json")).map_err(|e| e.to_string())?;
        if a != b {
            return Err(format!("{experiment} summary.json differs between runs"));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let scenario = Scenario::canonical();
    let start = Instant::now();
    let outcomes: Vec<Result<CriterionOutcome, String>> = std::thread::scope(|s| {
        let handles: Vec<_> = CRITERIA
            .iter()
            .map(|&id| {
                let scenario = &scenario;
                s.spawn(move || run_criterion(id, scenario).map_err(|e| e.to_string()))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("criterion thread")).collect()
    });
    let mut failed = 0;
    for (&id, outcome) in CRITERIA.iter().zip(&outcomes) {
        match outcome {
            Ok(o) => {
                if !o.pass() {
                    failed += 1;
                    for c in o.checks.iter().filter(|c| !c.pass) {
                        eprintln!("    {c}");
                    }
                }
                println!("{}", o.summary_line());
            }
            Err(e) => {
                failed += 1;
                println!("[FAIL] criterion {id:>2}: {} (error: {e})", title(id));
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();

    let det = determinism_and_regression();
    match &det {
        Ok(()) => println!("[PASS] criterion 11: determinism and regression"),
        Err(e) => {
            failed += 1;
            println!("[FAIL] criterion 11: determinism and regression ({e})");
        }
    }
    println!("criteria 1-10 in {elapsed:.1} s; {failed} failed");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
