//! Golden invocations shared by the golden and acceptance tests.

use std::path::PathBuf;
use std::process::Command;

pub const CASES: &[(&str, &[&str])] = &[
    ("check_cartan", &["check", "models/cartan_k2.model", "--require-involutive"]),
    ("check_fgordon", &["check", "models/fgordon_kg.model"]),
    ("check_fgordon_required", &["check", "models/fgordon_kg.model", "--require-involutive"]),
    ("check_generic", &["check", "models/fgordon_generic.model"]),
    ("check_malformed", &["check", "tests/data/malformed.model"]),
    ("check_missing", &["check", "tests/data/absent.model"]),
    ("usage_error", &["frobnicate"]),
    ("symmetry_kg", &["symmetry", "models/fgordon_kg.model"]),
    ("symmetry_cartan", &["symmetry", "models/cartan_k2.model"]),
    ("symmetry_generic", &["symmetry", "models/fgordon_generic.model", "Dx", "Dr", "X1"]),
    ("determining_kg", &["determining", "models/fgordon_kg.model"]),
    ("determining_verify_printed", &["determining", "models/fgordon_kg.model", "--verify", "S3"]),
    ("determining_verify_s1f", &["determining", "models/fgordon_kg.model", "--verify", "S1F"]),
    ("determining_verify_s2f", &["determining", "models/fgordon_kg.model", "--verify", "S2F"]),
    ("determining_verify_s3f", &["determining", "models/fgordon_kg.model", "--verify", "S3F"]),
    ("determining_verify_scaling", &["determining", "models/fgordon_kg.model", "--verify", "scaling"]),
    ("determining_point", &["determining", "models/fgordon_generic.model", "--ansatz", "point"]),
    ("determining_cartan", &["determining", "models/cartan_k2.model"]),
    ("determining_empty", &["determining", "models/cartan_k2.model", "--ansatz", "translation"]),
    ("flow_v3", &["flow", "models/fgordon_kg.model", "V3"]),
    ("flow_dx", &["flow", "models/fgordon_kg.model", "Dx", "--at", "2"]),
    ("flow_truncated", &["flow", "models/cartan_k2.model", "X1", "--order", "4"]),
    ("transport_tanh", &["transport", "models/fgordon_kg_numeric.model", "tanh", "V3", "--tolerance", "1e-5"]),
    ("transport_exp", &["transport", "models/fgordon_linear.model", "exp", "V3"]),
    ("transport_zero", &["transport", "models/fgordon_kg_numeric.model", "tanh", "V3", "--s", "0"]),
    ("json_check_fgordon", &["--json", "check", "models/fgordon_kg.model"]),
    ("json_verify_printed", &["--json", "determining", "models/fgordon_kg.model", "--verify", "S3"]),
    ("json_symmetry_kg", &["--json", "symmetry", "models/fgordon_kg.model"]),
    ("json_flow_v3", &["--json", "flow", "models/fgordon_kg.model", "V3", "--at", "1/2"]),
    ("json_transport_tanh", &["--json", "transport", "models/fgordon_kg_numeric.model", "tanh", "V3"]),
];

pub fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

/// Stdout, then stderr if any, then the exit status.
pub fn invoke(args: &[&str]) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_involute")).args(args).current_dir(root()).output().expect("binary runs");
    let stdout = String::from_utf8(out.stdout).expect("utf-8");
    let stderr = String::from_utf8(out.stderr).expect("utf-8");
    (stdout, stderr, out.status.code().unwrap_or(-1))
}

pub fn transcript(args: &[&str]) -> String {
    let (stdout, stderr, code) = invoke(args);
    let mut s = stdout;
    if !stderr.is_empty() {
        s.push_str("--- stderr\n");
        s.push_str(&stderr);
    }
    s.push_str(&format!("--- exit {code}\n"));
    s
}

pub fn golden_path(name: &str) -> PathBuf {
    root().join("tests/golden").join(format!("{name}.txt"))
}
