//! End-to-end tests for the `dp5` binary: golden bytes for the small
//! query commands, JSON shape checks for the compound reports, exit
//! codes, and determinism of repeated invocations.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::{Command, Output};

fn dp5(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dp5"))
        .args(args)
        .output()
        .expect("the dp5 binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = dp5(args);
    assert!(
        out.status.success(),
        "dp5 {args:?} must succeed, stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("dp5 output is utf-8")
}

fn json_of(args: &[&str]) -> serde_json::Value {
    serde_json::from_str(&stdout_of(args)).expect("dp5 output parses as JSON")
}

#[test]
fn small_queries_print_exact_bytes() {
    assert_eq!(stdout_of(&["hj", "expand", "20/9"]), "{\"chain\":[3,2,2,2,3]}\n");
    assert_eq!(stdout_of(&["hj", "contract", "3,2,2,2,3"]), "{\"r\":20,\"a\":9}\n");
    assert_eq!(stdout_of(&["lct", "5", "5"]), "{\"lct\":\"2/5\"}\n");
    assert_eq!(stdout_of(&["lct", "3", "7"]), "{\"lct\":\"10/21\"}\n");
    assert_eq!(
        stdout_of(&["classt", "20", "9"]),
        "{\"result\":\"t\",\"p\":2,\"q\":5,\"d\":1}\n"
    );
    assert_eq!(stdout_of(&["classt", "5", "2"]), "{\"result\":\"not-t\"}\n");
    assert_eq!(stdout_of(&["classt", "3", "2"]), "{\"result\":\"du-val\",\"n\":2}\n");
}

#[test]
fn human_mode_renders_plain_text() {
    assert_eq!(
        stdout_of(&["--human", "lct", "5", "5"]),
        "the log canonical threshold of y^5 = x^5 is 2/5\n"
    );
    assert_eq!(
        stdout_of(&["--human", "hj", "expand", "20/9"]),
        "20/9 expands to the chain [3, 2, 2, 2, 3]\n"
    );
}

#[test]
fn envelopes_carry_command_version_and_result() {
    let doc = json_of(&["build-pair", "--stratum", "quintic:1,1,1,1,1"]);
    assert_eq!(doc["command"], "build-pair quintic:1,1,1,1,1");
    assert_eq!(doc["version"], env!("CARGO_PKG_VERSION"));
    let report = &doc["result"]["report"];
    assert_eq!(report["k_squared"], "5", "the quintic pair has canonical degree five");
    assert_eq!(report["curve_genus"], "6");
    assert_eq!(report["anticanonical_identity"], true);
    assert_eq!(report["boundary"]["label"], "Z1");
    assert_eq!(report["ampleness"]["verdict"], "ample");
    assert_eq!(doc["result"]["model"]["model"], "lattice");
}

#[test]
fn atlas_lists_every_stratum_in_sorted_order() {
    let doc = json_of(&["atlas"]);
    let entries = doc["result"].as_array().expect("the atlas result is an array");
    assert_eq!(entries.len(), 21, "one entry per stratum");
    let keys: Vec<String> = entries
        .iter()
        .map(|e| e["stratum"].as_str().expect("each entry names its stratum").to_string())
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted, "entries are sorted by stratum key");
    let distinct: BTreeSet<&String> = keys.iter().collect();
    assert_eq!(distinct.len(), 21, "no stratum repeats");
    for entry in entries {
        assert_eq!(entry["k_squared"], "5", "{} has degree five", entry["stratum"]);
        assert_eq!(entry["curve_genus"], "6", "{} has a genus-six curve", entry["stratum"]);
    }
}

#[test]
fn contract_reads_a_surface_script() {
    let path = script_path();
    std::fs::write(
        &path,
        r#"{
            "base": { "kind": "projective-plane" },
            "track": { "l": [1], "D": [5] },
            "blow_ups": [
                { "label": "E1", "centers": { "l": 1, "D": 1 } },
                { "label": "E2", "centers": { "l": 1, "D": 1 } },
                { "label": "E3", "centers": { "l": 1, "D": 1 } },
                { "label": "E4", "centers": { "l": 1, "D": 1 } },
                { "label": "E5", "centers": { "l": 1, "D": 1 } }
            ]
        }"#,
    )
    .expect("the temporary surface script is writable");
    let path_str = path.to_str().expect("the temporary path is utf-8");
    let doc = json_of(&["contract", "--surface", path_str, "--plan", "l", "--ample=-K"]);
    std::fs::remove_file(&path).expect("the temporary surface script is removable");
    let result = &doc["result"];
    assert_eq!(result["k_squared_down"], "5");
    assert_eq!(result["rank_down"], 5);
    assert_eq!(result["singularities"][0]["kind"], "quotient");
    assert_eq!(result["singularities"][0]["r"], 4);
    assert_eq!(result["singularities"][0]["a"], 1);
    assert_eq!(result["ampleness"]["verdict"], "ample");
    assert_eq!(result["ampleness"]["square"], "5");
}

fn script_path() -> PathBuf {
    std::env::temp_dir().join(format!("dp5-cli-test-{}.json", std::process::id()))
}

#[test]
fn reduce_lists_and_runs_scenarios() {
    let listing = json_of(&["reduce", "--list"]);
    let names: Vec<&str> = listing["scenarios"]
        .as_array()
        .expect("the listing is an array")
        .iter()
        .map(|v| v.as_str().expect("each scenario is a string"))
        .collect();
    assert_eq!(names, ["bielliptic", "quintic-11111", "trigonal-0-1111", "trigonal-2-4"]);

    let doc = json_of(&["reduce", "--scenario", "trigonal-2-4"]);
    assert_eq!(doc["result"]["scenario"], "trigonal-2-4");
    assert_eq!(doc["result"]["steps"], 5);
    assert_eq!(doc["result"]["final_report"]["stratum"], "trigonal2:4");

    let traced = json_of(&["reduce", "--scenario", "trigonal-2-4", "--trace"]);
    let steps = traced["result"]["steps"].as_array().expect("the trace lists step records");
    assert_eq!(steps.len(), 5);
    for step in steps {
        for check in step["checks"].as_array().expect("each step records its checks") {
            assert_eq!(check["pass"], true, "step check {} passes", check["name"]);
        }
    }
}

#[test]
fn verification_passes_and_names_every_check() {
    let out = dp5(&["verify-paper"]);
    assert!(out.status.success(), "the verification suite exits 0");
    let doc: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("the verification report parses");
    assert_eq!(doc["result"]["failed"], 0);
    let checks = doc["result"]["checks"].as_array().expect("the report lists its checks");
    assert_eq!(checks.len(), 25);
    for check in checks {
        assert_eq!(check["pass"], true, "check {} passes", check["name"]);
    }
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &[] as &[&str],
        &["frobnicate"],
        &["hj", "expand", "banana"],
        &["hj", "contract", "3,x"],
        &["classt", "20"],
        &["build-pair", "--stratum", "nonsense"],
        &["reduce", "--scenario", "missing"],
        &["reduce"],
        &["contract", "--surface", "/nonexistent.json", "--plan", "l"],
    ] {
        let out = dp5(args);
        assert_eq!(out.status.code(), Some(2), "dp5 {args:?} is a usage error");
        assert!(!out.stderr.is_empty(), "dp5 {args:?} explains itself on stderr");
    }
}

#[test]
fn repeated_invocations_are_byte_identical() {
    for args in [&["atlas"] as &[&str], &["verify-paper"], &["reduce", "--scenario", "bielliptic"]]
    {
        let first = dp5(args);
        let second = dp5(args);
        assert_eq!(first.stdout, second.stdout, "dp5 {args:?} is deterministic");
    }
}

#[test]
fn schema_listing_is_valid_json() {
    let doc = json_of(&["--json-schema"]);
    for key in ["hj expand", "classt", "lct", "contract", "build-pair", "atlas", "reduce"] {
        assert!(doc.get(key).is_some(), "the schema listing covers {key}");
    }
}
