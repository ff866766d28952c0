#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn logcone<S: AsRef<std::ffi::OsStr>>(args: &[S]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_logcone"))
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exited normally"),
        stdout: String::from_utf8(out.stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(out.stderr).expect("utf-8 stderr"),
    }
}

pub fn json(run: &Run) -> serde_json::Value {
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);
    serde_json::from_str(&run.stdout).expect("stdout is JSON")
}

pub fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

/// Three assets over eight periods with distinct mean log-returns.
pub const PANEL3: &str = "a,b,c
1.10,1.00,1.02
0.95,1.08,1.01
1.03,0.99,1.05
1.07,1.02,0.97
0.98,1.06,1.04
1.05,0.97,1.00
1.01,1.04,1.03
1.04,1.01,0.99
";

/// Two assets whose feasible set is a single point.
pub const PANEL2: &str = "lo,hi
1.00,1.20
1.10,1.10
1.05,1.30
";

pub const WALK_SPEC: &str = r#"{
  "probs": [0.25, 0.25, 0.25, 0.25],
  "filtration": [[[0, 1, 2, 3]], [[0, 1], [2, 3]], [[0], [1], [2], [3]]],
  "process": [
    [[1.0], [1.0], [1.0], [1.0]],
    [[2.718281828459045], [2.718281828459045], [0.36787944117144233], [0.36787944117144233]],
    [[7.38905609893065], [1.0], [1.0], [0.1353352832366127]]
  ]
}"#;

pub const CONSTANT_SPEC: &str = r#"{
  "probs": [0.5, 0.5],
  "filtration": [[[0, 1]], [[0], [1]]],
  "process": [[[2.0, 3.0], [2.0, 3.0]], [[2.0, 3.0], [2.0, 3.0]]]
}"#;

pub const NOT_ADAPTED_SPEC: &str = r#"{
  "probs": [0.5, 0.5],
  "filtration": [[[0, 1]], [[0], [1]]],
  "process": [[[1.0], [2.0]], [[1.0], [2.0]]]
}"#;

pub const DECREASING_SPEC: &str = r#"{
  "probs": [0.5, 0.5],
  "filtration": [[[0, 1]], [[0], [1]]],
  "process": [[[1.0], [1.0]], [[0.5], [0.25]]]
}"#;

pub const LLN_POINT_MASS: &str = r#"{"distribution": {"family": "point_mass", "c": 3.0}, "sample_size": 10, "num_trials": 5}"#;

pub const CLT_LOGNORMAL: &str = r#"{"distribution": {"family": "lognormal", "mu": 0.3, "sigma": 0.8}, "sample_size": 5, "num_trials": 2000}"#;
