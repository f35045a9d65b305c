//! Every invocation in `common::CASES` has its expected output in `tests/golden/NAME.txt`.
//! Run with `UPDATE_GOLDEN=1` to rewrite them.

mod common;

use common::{golden_path, invoke, transcript, CASES};
use involute_cli::report::Report;
use std::path::Path;

#[test]
fn golden_files() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut mismatches = Vec::new();
    for (name, args) in CASES {
        let got = transcript(args);
        let path = golden_path(name);
        if update {
            std::fs::write(&path, &got).unwrap();
            continue;
        }
        let want = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {}", path.display()));
        if got != want {
            mismatches.push(format!("{name}:\n--- want\n{want}--- got\n{got}"));
        }
    }
    assert!(mismatches.is_empty(), "{}", mismatches.join("\n"));
}

#[test]
fn json_reports_round_trip() {
    for (name, args) in CASES.iter().filter(|(n, _)| n.starts_with("json_")) {
        let (stdout, _, _) = invoke(args);
        let report: Report = serde_json::from_str(&stdout).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(report.to_json(), stdout, "{name}");
        assert_eq!(report.model, Path::new(args.iter().find(|a| a.ends_with(".model")).unwrap()).file_stem().unwrap().to_str().unwrap());
    }
}

#[test]
fn text_and_json_agree() {
    let text = invoke(&["determining", "models/fgordon_kg.model", "--verify", "S3"]);
    let json = invoke(&["--json", "determining", "models/fgordon_kg.model", "--verify", "S3"]);
    let report: Report = serde_json::from_str(&json.0).unwrap();
    assert_eq!(report.to_text(), text.0);
    assert_eq!((text.2, json.2), (2, 2));
}

#[test]
fn help_exits_cleanly() {
    let (stdout, _, code) = invoke(&["--help"]);
    assert_eq!(code, 0);
    for cmd in ["check", "symmetry", "determining", "flow", "transport"] {
        assert!(stdout.contains(cmd), "{cmd}");
    }
}
