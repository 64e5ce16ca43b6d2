use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use pentagram_core::atlas::{enumerate_bases, ray_incidence, BasisKind};
use pentagram_core::bell::protocol::{ChoicePolicy, MeasurementOrder};
use pentagram_core::bell::{sift_key, verify_key, verify_twin_collapse, Protocol, RandomSource};
use pentagram_core::bks::enumerate::scheme_count_report;
use pentagram_core::bks::table::first_grid_mismatch;
use pentagram_core::bks::{
    enumerate_parity_schemes, fig2_scheme, generate_table, measurement_for_basis,
    mermin_coloring_search, parity_check, parse_measurement, parse_scheme, search_assignment,
    HybridMeasurement, MeasurementTable, SearchOutcome, FIG2_LABEL_GRID, FIG2_SCHEME,
};
use pentagram_core::pauli::sign_string;
use pentagram_core::{build_pentagram, validate, Atlas, EdgeId, Pentagram};

use crate::report::{display, CmdResult, Failure, OutDir, Outcome, Status};
use crate::{BasisFilter, OrderArg, PolicyArg};

fn grid_line(labels: &[usize]) -> String {
    labels
        .iter()
        .map(|l| format!("{l:>3}"))
        .collect::<Vec<_>>()
        .join("")
}

/// Reads a scheme file. A missing `fig2.scheme` falls back to the bundled copy.
fn load_scheme(p: &Pentagram, path: &Path) -> Result<Vec<HybridMeasurement>, Failure> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(_) if !path.exists() && path.file_name().is_some_and(|n| n == "fig2.scheme") => {
            FIG2_SCHEME.to_string()
        }
        Err(e) => {
            return Err(Failure::usage(format!(
                "cannot read {}: {e}",
                path.display()
            )))
        }
    };
    parse_scheme(p, &text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

pub fn verify_pentagram(flip_e5: bool) -> CmdResult {
    let mut p = build_pentagram();
    if flip_e5 {
        let e5 = p.edge_mut(EdgeId::E5);
        e5.expected_product = e5.expected_product.flip();
    }
    let report = validate(&p);
    let mut out = Outcome::new(
        "verify-pentagram",
        Status::from_check(report.passed()),
        serde_json::to_value(&report).map_err(|e| Failure::defect(e.to_string()))?,
    );
    for c in &report.checks {
        let mark = if c.passed { "ok  " } else { "FAIL" };
        if c.detail.is_empty() {
            out.line(format!("{mark} {}", c.name));
        } else {
            out.line(format!("{mark} {} ({})", c.name, c.detail));
        }
    }
    for e in &report.edge_products {
        let got = e
            .computed
            .map_or("not ±I".to_string(), |s| format!("{}I", s.symbol()));
        out.line(format!(
            "{} product: {got} (expected {}I)",
            e.edge,
            e.expected.symbol()
        ));
    }
    Ok(out)
}

pub fn atlas(dir: &OutDir) -> CmdResult {
    let atlas = Atlas::standard();
    let rays: Vec<Value> = atlas
        .rays()
        .iter()
        .map(|r| {
            json!({
                "id": r.id,
                "edge": r.edge.to_string(),
                "signs": sign_string(&r.signs),
                "amplitudes": r.vector.amplitudes(),
                "norm_sq": r.vector.norm_sq(),
            })
        })
        .collect();
    let path = dir.write_json("rays.json", &rays)?;
    let histogram = pentagram_core::atlas::norm_histogram(&atlas);
    let mut out = Outcome::new(
        "atlas",
        Status::Report,
        json!({ "ray_count": atlas.len(), "norm_histogram": histogram, "file": display(&path) }),
    );
    for r in atlas.rays() {
        out.line(format!(
            "{:>2}  {} {}  {}",
            r.id,
            r.edge,
            sign_string(&r.signs),
            r.vector
        ));
    }
    out.line(format!(
        "{} rays written to {}",
        atlas.len(),
        path.display()
    ));
    Ok(out)
}

pub fn bases(kind: BasisFilter) -> CmdResult {
    let atlas = Atlas::standard();
    let all = enumerate_bases(&atlas)?;
    let incidence = ray_incidence(&atlas, &all);
    let uniform = incidence.iter().all(|&c| c == 5);
    let p = atlas.pentagram();
    let mut entries = Vec::new();
    let mut out = Outcome::new("bases", Status::Report, Value::Null);
    for (index, b) in all.iter().enumerate() {
        let keep = match (kind, b.kind) {
            (BasisFilter::All, _) => true,
            (BasisFilter::Pure, k) => matches!(k, BasisKind::PureEdge { .. }),
            (BasisFilter::Hybrid, k) => matches!(k, BasisKind::Hybrid { .. }),
        };
        if !keep {
            continue;
        }
        let m = measurement_for_basis(p, b)?;
        out.line(format!(
            "{index:>2}  {:<18} {:?}",
            m.edge_symbol() + " " + &b.kind.to_string(),
            b.ray_ids
        ));
        entries.push(json!({
            "index": index,
            "kind": b.kind.to_string(),
            "measurement": m.scheme_line(),
            "ray_ids": b.ray_ids,
        }));
    }
    out.line(format!(
        "{} of {} bases listed; each ray lies in {} bases",
        entries.len(),
        all.len(),
        if uniform {
            "5".to_string()
        } else {
            format!("{incidence:?}")
        }
    ));
    out.payload = json!({
        "total": all.len(),
        "listed": entries.len(),
        "incidence": incidence,
        "bases": entries,
    });
    if !uniform || all.len() != 25 {
        out.status = Status::Fail;
    }
    Ok(out)
}

fn table_json(table: &MeasurementTable) -> Value {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|r| {
            json!({
                "measurement": r.measurement.scheme_line(),
                "edges": r.measurement.edge_symbol(),
                "labels": r.labels(),
                "ray_ids": r.cells.iter().map(|c| c.ray_id).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({ "label_count": table.label_count(), "rows": rows })
}

pub fn table(scheme: &Path, dir: &OutDir) -> CmdResult {
    let atlas = Atlas::standard();
    let measurements = load_scheme(atlas.pentagram(), scheme)?;
    let table = generate_table(&atlas, &measurements)?;
    let payload = table_json(&table);
    let path = dir.write_json("table.json", &payload)?;
    let mut out = Outcome::new("table", Status::Report, payload);
    for (i, row) in table.rows.iter().enumerate() {
        out.line(format!(
            "{:>2} {:<6} {}",
            i + 1,
            row.measurement.edge_symbol(),
            grid_line(&row.labels())
        ));
    }
    out.line(format!(
        "{} distinct outcomes; table written to {}",
        table.label_count(),
        path.display()
    ));
    Ok(out)
}

pub fn verify_fig2(scheme: Option<&Path>) -> CmdResult {
    let atlas = Atlas::standard();
    let p = atlas.pentagram();
    let measurements = match scheme {
        Some(path) => load_scheme(p, path)?,
        None => fig2_scheme(p),
    };
    let table = generate_table(&atlas, &measurements)?;
    let grid = table.label_grid();
    let total = FIG2_LABEL_GRID.len() * 8;
    let matching = (0..FIG2_LABEL_GRID.len())
        .flat_map(|r| (0..8).map(move |c| (r, c)))
        .filter(|&(r, c)| {
            grid.get(r)
                .is_some_and(|row| row[c] == FIG2_LABEL_GRID[r][c])
        })
        .count();
    let mismatch = first_grid_mismatch(&grid, &FIG2_LABEL_GRID);
    let passed = mismatch.is_none() && grid.len() == FIG2_LABEL_GRID.len();
    let mut out = Outcome::new(
        "verify-fig2",
        Status::from_check(passed),
        json!({
            "matching_cells": matching,
            "total_cells": total,
            "rows": grid.len(),
            "first_mismatch": mismatch.map(|(row, col, got, want)| json!({
                "row": row + 1, "column": col + 1, "got": got, "expected": want,
            })),
        }),
    );
    for (i, row) in grid.iter().enumerate() {
        out.line(format!("{:>2} {}", i + 1, grid_line(row)));
    }
    out.line(format!("{matching}/{total} cells match"));
    if let Some((row, col, got, want)) = mismatch {
        out.line(format!(
            "first difference at row {}, column {}: got {got}, expected {want}",
            row + 1,
            col + 1
        ));
    } else if grid.len() != FIG2_LABEL_GRID.len() {
        out.line(format!(
            "row count {} differs from {}",
            grid.len(),
            FIG2_LABEL_GRID.len()
        ));
    }
    Ok(out)
}

pub fn prove_bks(scheme: &Path) -> CmdResult {
    let atlas = Atlas::standard();
    let measurements = load_scheme(atlas.pentagram(), scheme)?;
    let table = generate_table(&atlas, &measurements)?;
    let verdict = parity_check(&table);
    let search = search_assignment(&table);
    if verdict.is_contradiction && !search.is_exhausted() {
        return Err(Failure::defect(
            "parity reports a contradiction but the search found an assignment",
        ));
    }
    let search_json = match &search {
        SearchOutcome::Witness(w) => json!({ "exhausted": false, "witness": w }),
        SearchOutcome::Exhausted { nodes } => json!({ "exhausted": true, "nodes": nodes }),
    };
    let mut out = Outcome::new(
        "prove-bks",
        Status::from_check(verdict.is_contradiction),
        json!({ "verdict": verdict, "search": search_json }),
    );
    out.line(format!(
        "rows: {} ({})",
        verdict.row_count,
        if verdict.row_count % 2 == 1 {
            "odd"
        } else {
            "even"
        }
    ));
    let hist: Vec<String> = verdict
        .multiplicity_histogram
        .iter()
        .map(|(m, n)| format!("{m}: {n}"))
        .collect();
    out.line(format!("outcome multiplicities: {{{}}}", hist.join(", ")));
    if verdict.is_contradiction {
        out.line("contradiction: odd row count, every outcome occurs an even number of times");
    } else {
        out.line("no parity contradiction");
    }
    match &search {
        SearchOutcome::Exhausted { nodes } => out.line(format!(
            "search exhausted after {nodes} nodes, no assignment exists"
        )),
        SearchOutcome::Witness(w) => {
            out.line(format!("search found an assignment with value 1 on {w:?}"))
        }
    };
    Ok(out)
}

pub fn mermin() -> CmdResult {
    let report = mermin_coloring_search(&build_pentagram());
    let mut out = Outcome::new(
        "mermin",
        Status::from_check(report.is_exhausted()),
        serde_json::to_value(&report).map_err(|e| Failure::defect(e.to_string()))?,
    );
    out.line(format!(
        "{}/{} assignments satisfy all edge constraints",
        report.satisfying, report.assignments_checked
    ));
    if report.algebraically_impossible() {
        out.line("each observable lies on two edges, so the edge products multiply to +1, but the required product is -1");
    }
    Ok(out)
}

pub fn enumerate(size: usize, dump: bool, dir: &OutDir) -> CmdResult {
    let atlas = Atlas::standard();
    let bases = enumerate_bases(&atlas)?;
    let schemes = enumerate_parity_schemes(&bases, size);
    let report = scheme_count_report(&bases, &schemes);
    let mut payload = serde_json::to_value(&report).map_err(|e| Failure::defect(e.to_string()))?;
    let mut out = Outcome::new("enumerate", Status::Report, Value::Null);
    out.line(format!(
        "{} even-coverage sets of {size} bases",
        report.count
    ));
    if let Some(target) = report.target {
        if report.matches_target == Some(true) {
            out.line(format!("matches the expected {target}"));
        } else {
            out.line(format!(
                "differs from the expected {target}; alternate readings:"
            ));
            for a in &report.alternates {
                out.line(format!("  {}: {}", a.interpretation, a.count));
            }
        }
    }
    if dump {
        let p = atlas.pentagram();
        let rows: Vec<Vec<String>> = schemes
            .schemes
            .iter()
            .map(|s| {
                s.iter()
                    .map(|&b| measurement_for_basis(p, &bases[b]).map(|m| m.scheme_line()))
                    .collect::<Result<_, _>>()
            })
            .collect::<Result<_, _>>()?;
        let path = dir.write_json(
            "schemes.json",
            &json!({ "bases": schemes.schemes, "measurements": rows }),
        )?;
        payload["file"] = json!(display(&path));
        out.line(format!("schemes written to {}", path.display()));
    }
    out.payload = payload;
    Ok(out)
}

pub struct SimulateArgs<'a> {
    pub trials: u64,
    pub seed: u64,
    pub policy: Option<PolicyArg>,
    pub alice: Option<&'a str>,
    pub bob: Option<&'a str>,
    pub order: OrderArg,
}

/// Resolves a row reference to a menu index, adding the row if needed.
fn resolve_row(protocol: &mut Protocol, text: &str) -> Result<usize, Failure> {
    let n = protocol.menu().len();
    if let Ok(k) = text.trim().parse::<usize>() {
        return if (1..=n).contains(&k) {
            Ok(k - 1)
        } else {
            Err(Failure::usage(format!("row index {k} out of range 1..{n}")))
        };
    }
    let p = protocol.atlas().pentagram().clone();
    let m =
        parse_measurement(&p, text).map_err(|e| Failure::usage(format!("row {text:?}: {e}")))?;
    // The short form leaves pairs open, so any menu row on the same basis will do.
    if !text.contains('|') {
        if let Some(i) = protocol.menu().iter().position(|x| x.kind() == m.kind()) {
            return Ok(i);
        }
    }
    Ok(protocol.ensure_row(m)?)
}

pub fn simulate(args: &SimulateArgs, dir: &OutDir) -> CmdResult {
    let mut protocol = Protocol::fig2();
    let policy = match (args.policy, args.alice, args.bob) {
        (None | Some(PolicyArg::Fixed), Some(a), Some(b)) => {
            let alice = resolve_row(&mut protocol, a)?;
            let bob = resolve_row(&mut protocol, b)?;
            ChoicePolicy::Fixed { alice, bob }
        }
        (Some(PolicyArg::Fixed), _, _) => {
            return Err(Failure::usage(
                "--policy fixed needs both --alice and --bob",
            ))
        }
        (_, Some(_), _) | (_, _, Some(_)) if args.policy.is_some() => {
            return Err(Failure::usage(
                "--alice/--bob only apply to the fixed policy",
            ))
        }
        (None, Some(_), None) | (None, None, Some(_)) => {
            return Err(Failure::usage("give both --alice and --bob"))
        }
        (Some(PolicyArg::RoundRobin), None, None) => ChoicePolicy::RoundRobin,
        _ => ChoicePolicy::Uniform,
    };
    let order = match args.order {
        OrderArg::AliceFirst => MeasurementOrder::AliceFirst,
        OrderArg::BobFirst => MeasurementOrder::BobFirst,
    };
    let records = protocol.run_experiment(args.trials, policy, args.seed, order)?;
    let mut lines = String::new();
    for r in &records {
        lines.push_str(&serde_json::to_string(r).map_err(|e| Failure::defect(e.to_string()))?);
        lines.push('\n');
    }
    let path = dir.write("runs.jsonl", &lines)?;
    let report = verify_twin_collapse(&protocol, &records);
    let mut payload = serde_json::to_value(&report).map_err(|e| Failure::defect(e.to_string()))?;
    payload["seed"] = json!(args.seed);
    payload["file"] = json!(display(&path));
    let mut out = Outcome::new(
        "simulate",
        if report.correlations_hold() {
            Status::Report
        } else {
            Status::Fail
        },
        payload,
    );
    out.line(format!("runs: {}  seed: {}", report.runs, args.seed));
    out.line(format!(
        "same-choice runs: {}  outcome mismatches: {}  collapse failures: {}",
        report.same_choice_runs, report.same_choice_mismatches, report.twin_collapse_failures
    ));
    out.line(format!(
        "shared-edge runs: {}  common-outcome violations: {}",
        report.shared_edge_runs, report.common_outcome_violations
    ));
    out.line(format!(
        "max |f - 1/8| per outcome column: {:.4}",
        report.max_frequency_deviation
    ));
    if records.len() == 1 {
        let r = &records[0];
        out.line(format!(
            "alice: {}  outcome {}  label {}",
            r.alice_row,
            sign_string(&r.alice_signs),
            r.alice_label
        ));
        out.line(format!(
            "bob:   {}  outcome {}  label {}",
            r.bob_row,
            sign_string(&r.bob_signs),
            r.bob_label
        ));
    }
    out.line(format!("runs written to {}", path.display()));
    Ok(out)
}

pub fn genkey(trials: u64, seed: u64, reveal: f64, dir: &OutDir) -> CmdResult {
    let protocol = Protocol::fig2();
    let records = protocol.run_experiment(
        trials,
        ChoicePolicy::Uniform,
        seed,
        MeasurementOrder::AliceFirst,
    )?;
    let mut key = sift_key(&records);
    let mismatches = verify_key(&mut key, reveal, &RandomSource::new(seed))?;
    let key_text = key.key_string();
    let key_path = dir.write("key.txt", &format!("{key_text}\n"))?;
    let meta = json!({
        "trials": trials,
        "seed": seed,
        "reveal_fraction": reveal,
        "sifted": key.sifted_runs.len(),
        "revealed": key.revealed_sample.len(),
        "mismatches": mismatches,
        "key_length": key.alice_key.len(),
        "keys_agree": key.keys_agree(),
        "alphabet": "octal",
    });
    let meta_path = dir.write_json("key_meta.json", &meta)?;
    let passed = mismatches == 0 && key.keys_agree();
    let mut out = Outcome::new("genkey", Status::from_check(passed), meta);
    out.line(format!(
        "trials: {trials}  sifted: {}",
        key.sifted_runs.len()
    ));
    out.line(format!(
        "revealed: {}  mismatches: {mismatches}",
        key.revealed_sample.len()
    ));
    out.line(format!(
        "key: {} octal letters, written to {}",
        key.alice_key.len(),
        key_path.display()
    ));
    out.line(format!("metadata written to {}", meta_path.display()));
    Ok(out)
}
