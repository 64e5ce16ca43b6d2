use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pentagram_core::bks::FIG2_LABEL_GRID;
use serde_json::Value;
use tempfile::TempDir;

fn pentagram(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pentagram"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(dir: &Path, args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = pentagram(dir, &full);
    let doc = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout));
    });
    (out.status.code().unwrap(), doc)
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn bundled_rows(n: usize) -> String {
    let text = include_str!("../../core/data/fig2.scheme");
    text.lines()
        .filter(|l| !l.trim_start().starts_with('#') && !l.trim().is_empty())
        .take(n)
        .map(|l| format!("{l}\n"))
        .collect()
}

#[test]
fn verify_pentagram_passes_and_reports_e5_sign() {
    let dir = TempDir::new().unwrap();
    let (code, doc) = json(dir.path(), &["verify-pentagram"]);
    assert_eq!(code, 0);
    assert_eq!(doc["status"], "pass");
    let products = doc["payload"]["edge_products"].as_array().unwrap();
    assert_eq!(products[4]["edge"], "E5");
    assert_eq!(products[4]["computed"], -1);
    assert!(products[..4].iter().all(|p| p["computed"] == 1));
}

#[test]
fn flipped_e5_fails_with_exit_one() {
    let dir = TempDir::new().unwrap();
    let out = pentagram(dir.path(), &["verify-pentagram", "--flip-e5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn atlas_writes_forty_rays() {
    let dir = TempDir::new().unwrap();
    let out = pentagram(dir.path(), &["atlas", "--out", "artifacts"]);
    assert_eq!(out.status.code(), Some(0));
    let rays: Vec<Value> =
        serde_json::from_str(&fs::read_to_string(dir.path().join("artifacts/rays.json")).unwrap())
            .unwrap();
    assert_eq!(rays.len(), 40);
    for (i, r) in rays.iter().enumerate() {
        assert_eq!(r["id"], i);
        let amps = r["amplitudes"].as_array().unwrap();
        assert_eq!(amps.len(), 8);
        let norm: i64 = amps.iter().map(|a| a.as_i64().unwrap().pow(2)).sum();
        assert_eq!(r["norm_sq"], norm);
        assert_eq!(r["signs"].as_str().unwrap().len(), 4);
    }
}

#[test]
fn bases_counts() {
    let dir = TempDir::new().unwrap();
    let (code, doc) = json(dir.path(), &["bases"]);
    assert_eq!(code, 0);
    assert_eq!(doc["payload"]["total"], 25);
    assert!(doc["payload"]["incidence"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c == 5));
    let (_, hybrid) = json(dir.path(), &["bases", "--kind", "hybrid"]);
    assert_eq!(hybrid["payload"]["listed"], 20);
    let (_, pure) = json(dir.path(), &["bases", "--kind", "pure"]);
    assert_eq!(pure["payload"]["listed"], 5);
}

#[test]
fn verify_fig2_matches_all_cells() {
    let dir = TempDir::new().unwrap();
    let out = pentagram(dir.path(), &["verify-fig2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("88/88 cells match"));
}

#[test]
fn verify_fig2_reports_first_differing_cell() {
    let dir = TempDir::new().unwrap();
    // swap the first two rows
    let rows = bundled_rows(11);
    let mut lines: Vec<&str> = rows.lines().collect();
    lines.swap(0, 1);
    fs::write(dir.path().join("swapped.scheme"), lines.join("\n")).unwrap();
    let (code, doc) = json(dir.path(), &["verify-fig2", "--scheme", "swapped.scheme"]);
    assert_eq!(code, 1);
    assert_eq!(doc["status"], "fail");
    let m = &doc["payload"]["first_mismatch"];

    // locate the first difference independently from table.json
    assert_eq!(
        pentagram(dir.path(), &["table", "swapped.scheme"])
            .status
            .code(),
        Some(0)
    );
    let table: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("table.json")).unwrap()).unwrap();
    let expected = table["rows"]
        .as_array()
        .unwrap()
        .iter()
        .zip(FIG2_LABEL_GRID)
        .enumerate()
        .find_map(|(r, (row, want))| {
            let got: Vec<u64> = row["labels"]
                .as_array()
                .unwrap()
                .iter()
                .map(|v| v.as_u64().unwrap())
                .collect();
            (0..8)
                .find(|&c| got[c] != want[c] as u64)
                .map(|c| (r + 1, c + 1, got[c]))
        })
        .unwrap();
    assert_eq!(
        (m["row"].as_u64(), m["column"].as_u64(), m["got"].as_u64()),
        (
            Some(expected.0 as u64),
            Some(expected.1 as u64),
            Some(expected.2)
        )
    );
    assert_eq!(
        m["expected"].as_u64(),
        Some(FIG2_LABEL_GRID[expected.0 - 1][expected.1 - 1] as u64)
    );
}

#[test]
fn table_of_first_two_rows() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("two.scheme"), bundled_rows(2)).unwrap();
    let out = pentagram(dir.path(), &["table", "two.scheme"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let table: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("table.json")).unwrap()).unwrap();
    let labels: Vec<Vec<u64>> = table["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            r["labels"]
                .as_array()
                .unwrap()
                .iter()
                .map(|v| v.as_u64().unwrap())
                .collect()
        })
        .collect();
    assert_eq!(
        labels,
        vec![
            vec![1, 2, 3, 4, 5, 6, 7, 8],
            vec![9, 10, 11, 12, 5, 13, 14, 8]
        ]
    );
}

#[test]
fn malformed_scheme_line_is_a_usage_error_with_line_number() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("bad.scheme"),
        "# header\nA | E5 {B,C} ; E1 {z1,z2}\nA | E9 ; E1\n",
    )
    .unwrap();
    let out = pentagram(dir.path(), &["table", "bad.scheme"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));
    assert_eq!(
        pentagram(dir.path(), &["prove-bks", "missing.scheme"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn prove_bks_on_bundled_scheme() {
    let dir = TempDir::new().unwrap();
    let (code, doc) = json(dir.path(), &["prove-bks", "fig2.scheme"]);
    assert_eq!(code, 0);
    let verdict = &doc["payload"]["verdict"];
    assert_eq!(verdict["is_contradiction"], true);
    assert_eq!(verdict["row_count"], 11);
    assert_eq!(
        verdict["multiplicity_histogram"],
        serde_json::json!({"2": 28, "4": 8})
    );
    assert_eq!(doc["payload"]["search"]["exhausted"], true);
}

#[test]
fn prove_bks_fails_for_an_even_scheme() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("ten.scheme"), bundled_rows(10)).unwrap();
    let (code, doc) = json(dir.path(), &["prove-bks", "ten.scheme"]);
    assert_eq!(code, 1);
    assert_eq!(doc["payload"]["verdict"]["is_contradiction"], false);
}

#[test]
fn mermin_is_exhausted() {
    let dir = TempDir::new().unwrap();
    let (code, doc) = json(dir.path(), &["mermin"]);
    assert_eq!(code, 0);
    assert_eq!(doc["payload"]["satisfying"], 0);
    assert_eq!(doc["payload"]["assignments_checked"], 1024);
}

#[test]
fn enumerate_eleven_with_dump() {
    let dir = TempDir::new().unwrap();
    let (code, doc) = json(dir.path(), &["enumerate", "--size", "11", "--dump"]);
    assert_eq!(code, 0);
    assert_eq!(doc["status"], "report");
    assert_eq!(doc["payload"]["count"], 320);
    assert_eq!(doc["payload"]["matches_target"], true);
    let dump: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("schemes.json")).unwrap())
            .unwrap();
    assert_eq!(dump["bases"].as_array().unwrap().len(), 320);
    assert_eq!(dump["measurements"][0].as_array().unwrap().len(), 11);
}

#[test]
fn short_form_rows_give_equal_labels() {
    let dir = TempDir::new().unwrap();
    let out = pentagram(
        dir.path(),
        &[
            "simulate", "--alice", "E2-E5+", "--bob", "E2-E5+", "--trials", "1", "--seed", "5",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let runs = fs::read_to_string(dir.path().join("runs.jsonl")).unwrap();
    let lines: Vec<&str> = runs.lines().collect();
    assert_eq!(lines.len(), 1);
    let run: Value = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(run["alice_label"], run["bob_label"]);
    assert_eq!(run["alice_choice"], 4);
}

#[test]
fn uniform_simulation_has_no_same_choice_mismatches() {
    let dir = TempDir::new().unwrap();
    let (code, doc) = json(
        dir.path(),
        &[
            "simulate", "--trials", "10000", "--seed", "42", "--policy", "uniform",
        ],
    );
    assert_eq!(code, 0);
    let p = &doc["payload"];
    assert_eq!(p["runs"], 10000);
    assert!(p["same_choice_runs"].as_u64().unwrap() > 0);
    assert_eq!(p["same_choice_mismatches"], 0);
    assert_eq!(p["twin_collapse_failures"], 0);
    assert_eq!(p["common_outcome_violations"], 0);
}

#[test]
fn simulation_is_reproducible() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let args = [
        "simulate",
        "--trials",
        "200",
        "--seed",
        "9",
        "--policy",
        "round-robin",
    ];
    assert_eq!(pentagram(a.path(), &args).status.code(), Some(0));
    assert_eq!(pentagram(b.path(), &args).status.code(), Some(0));
    let ra = fs::read(a.path().join("runs.jsonl")).unwrap();
    let rb = fs::read(b.path().join("runs.jsonl")).unwrap();
    assert_eq!(ra, rb);
    let (_, ja) = json(a.path(), &["enumerate", "--size", "6"]);
    let (_, jb) = json(b.path(), &["enumerate", "--size", "6"]);
    assert_eq!(ja, jb);
}

#[test]
fn simulate_usage_errors() {
    let dir = TempDir::new().unwrap();
    let cases: &[&[&str]] = &[
        &["simulate", "--trials", "5"],
        &["simulate", "--trials", "0", "--seed", "1"],
        &[
            "simulate", "--trials", "1", "--seed", "1", "--alice", "E2-E5", "--bob", "1",
        ],
        &[
            "simulate", "--trials", "1", "--seed", "1", "--alice", "12", "--bob", "1",
        ],
        &["simulate", "--trials", "1", "--seed", "1", "--alice", "1"],
        &[
            "simulate", "--trials", "1", "--seed", "1", "--policy", "fixed",
        ],
        &["genkey", "--trials", "10", "--seed", "1", "--reveal", "1.5"],
        &["no-such-command"],
    ];
    for args in cases {
        let out = pentagram(dir.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn genkey_produces_matching_octal_key() {
    let dir = TempDir::new().unwrap();
    let out = pentagram(
        dir.path(),
        &[
            "genkey", "--trials", "11000", "--seed", "7", "--reveal", "0.1",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let meta: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("key_meta.json")).unwrap())
            .unwrap();
    let sifted = meta["sifted"].as_f64().unwrap();
    assert!((sifted - 1000.0).abs() <= 3.0 * (11_000.0_f64 / 11.0 * 10.0 / 11.0).sqrt());
    assert_eq!(meta["mismatches"], 0);
    let key = fs::read_to_string(dir.path().join("key.txt")).unwrap();
    let key = key.trim_end();
    assert_eq!(key.len() as u64, meta["key_length"].as_u64().unwrap());
    assert!(key.chars().all(|c| ('0'..='7').contains(&c)));
}
