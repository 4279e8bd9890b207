#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub struct GoldenCase {
    pub name: &'static str,
    pub args: &'static [&'static str],
    pub exit: i32,
}

/// One invocation per subcommand. Paths are relative to the cli crate root.
pub const GOLDEN: &[GoldenCase] = &[
    GoldenCase { name: "exact_n3.csv", args: &["exact", "--n", "3", "--q", "0.5", "--eps", "0.1"], exit: 0 },
    GoldenCase { name: "exact_n1.csv", args: &["exact", "--n", "1", "--q", "0.5", "--eps", "0"], exit: 0 },
    GoldenCase {
        name: "exact_table.json",
        args: &["exact", "--n", "6", "--q", "0.5", "--eps", "0.02", "--dist", "tests/data/skewed.cdf", "--format", "json"],
        exit: 0,
    },
    GoldenCase { name: "oracle.csv", args: &["oracle", "--n", "4", "--q", "0.3", "--eps", "0.05"], exit: 0 },
    GoldenCase {
        name: "marginals.csv",
        args: &["marginals", "--n", "5", "--q", "0.3", "--eps", "0.05", "--method", "mixture"],
        exit: 0,
    },
    GoldenCase { name: "approx.json", args: &["approx", "--n", "6", "--q", "0.4", "--eps", "0.02", "--format", "json"], exit: 0 },
    GoldenCase {
        name: "converge.csv",
        args: &["converge", "--q", "0.2,0.5,0.8", "--n", "10,30,60,100", "--c", "1", "--eta", "0"],
        exit: 0,
    },
    GoldenCase {
        name: "simulate.json",
        args: &["simulate", "--n", "10", "--q", "0.3", "--eps", "0.01", "--samples", "20000", "--seed", "42", "--format", "json"],
        exit: 0,
    },
    GoldenCase {
        name: "validate.csv",
        args: &["validate", "--n", "10", "--q", "0.3", "--eps", "0.04", "--mode", "strict"],
        exit: 1,
    },
];

pub fn crate_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn golden_path(name: &str) -> PathBuf {
    crate_root().join("tests").join("golden").join(name)
}

pub fn run_bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_comprehend"))
        .args(args)
        .current_dir(crate_root())
        .output()
        .expect("spawn comprehend")
}

/// Runs a golden case and compares stdout byte for byte. With
/// `COMPREHEND_UPDATE_GOLDEN=1` the file is rewritten instead.
pub fn check_golden(case: &GoldenCase) -> Result<(), String> {
    let out = run_bin(case.args);
    let code = out.status.code().unwrap_or(-1);
    if code != case.exit {
        return Err(format!(
            "{}: exit {code}, expected {}; stderr: {}",
            case.name,
            case.exit,
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    let path = golden_path(case.name);
    if std::env::var_os("COMPREHEND_UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &out.stdout).map_err(|e| format!("{}: {e}", path.display()))?;
        return Ok(());
    }
    let expected = read(&path)?;
    if expected != out.stdout {
        return Err(format!("{}: output differs from golden file", case.name));
    }
    Ok(())
}

fn read(path: &Path) -> Result<Vec<u8>, String> {
    std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))
}
