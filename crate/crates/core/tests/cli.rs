use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use relanalogy::files::read_results;
use relanalogy::relnet::{relational_score, Assignment, Weights};
use relanalogy::synth::synthetic_corpus;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_relanalogy"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin()
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn body(path: &Path) -> String {
    let text = fs::read_to_string(path).unwrap();
    let (first, rest) = text.split_once('\n').unwrap();
    assert!(
        first.starts_with("# "),
        "header line missing in {}",
        path.display()
    );
    rest.to_owned()
}

fn rec(id: &str, tactic: &str, path: &str) -> String {
    serde_json::json!({"id": id, "tactic": tactic, "source_file": path}).to_string()
}

fn toy_corpus(dir: &Path) {
    let lines = [
        rec("1", "simp", "Mathlib/Algebra/A.lean"),
        rec("2", "simp", "Mathlib/Order/B.lean"),
        rec("3", "rw [h] at hx", "Mathlib/Order/B.lean"),
        rec("4", "hx", "Mathlib/Order/B.lean"),
        serde_json::json!({"id": "5", "tactic": "ring"}).to_string(),
    ];
    fs::write(dir.join("corpus.jsonl"), lines.join("\n")).unwrap();
}

#[test]
fn schemas_census_matches_hand_count() {
    let d = tempfile::tempdir().unwrap();
    toy_corpus(d.path());
    let o = run(
        d.path(),
        &["--corpus", "corpus.jsonl", "--out-dir", "out", "schemas"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let b = body(&d.path().join("out/schemas.tsv"));
    assert!(b.contains("# included\t3\n"));
    assert!(b.contains("# excluded_no_source_file\t1\n"));
    assert!(b.contains("# excluded_shortcut\t1\n"));
    assert!(b.contains("simp|0|0|0\t2\t2\n"));
    assert!(b.contains("rw|3|0|1\t1\t1\n"));
}

#[test]
fn shortcut_only_corpus_gives_empty_census() {
    let d = tempfile::tempdir().unwrap();
    let lines = [
        rec("1", "hx", "Mathlib/A/B.lean"),
        rec("2", "h₂", "Mathlib/A/B.lean"),
    ];
    fs::write(d.path().join("c.jsonl"), lines.join("\n")).unwrap();
    let o = run(
        d.path(),
        &["--corpus", "c.jsonl", "--out-dir", ".", "schemas"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let b = body(&d.path().join("schemas.tsv"));
    assert!(b.contains("# excluded_shortcut\t2\n"));
    assert!(b.ends_with("schema\tcount\tareas_present\n"));
}

#[test]
fn empty_corpus_is_a_data_error() {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("c.jsonl"), "").unwrap();
    let o = run(d.path(), &["--corpus", "c.jsonl", "schemas"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("no valid entries"));
}

#[test]
fn malformed_lines_warn_with_line_numbers() {
    let d = tempfile::tempdir().unwrap();
    fs::write(
        d.path().join("c.jsonl"),
        format!("{}\n{{broken\n", rec("1", "simp", "Mathlib/A/B.lean")),
    )
    .unwrap();
    let o = run(d.path(), &["--corpus", "c.jsonl", "schemas"]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn missing_corpus_is_an_io_error() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["--corpus", "nope.jsonl", "zscores"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn candidate_area_errors() {
    let d = tempfile::tempdir().unwrap();
    toy_corpus(d.path());
    let same = run(
        d.path(),
        &[
            "--corpus",
            "corpus.jsonl",
            "candidates",
            "--source",
            "Mathlib.Order",
            "--target",
            "Mathlib.Order",
        ],
    );
    assert_eq!(same.status.code(), Some(2));
    let excluded = run(
        d.path(),
        &[
            "--corpus",
            "corpus.jsonl",
            "candidates",
            "--source",
            "Mathlib.Order",
            "--target",
            "Mathlib.Tactic",
        ],
    );
    assert_eq!(excluded.status.code(), Some(2));
    assert!(stderr(&excluded).contains("excluded target"));
}

#[test]
fn engineered_corpus_yields_one_candidate() {
    let d = tempfile::tempdir().unwrap();
    // `ring` is concentrated in Algebra, thin in Order and present in three
    // areas; `simp` fills every area.
    let mut lines = Vec::new();
    let areas = ["Algebra", "Order", "Analysis", "Topology", "Logic", "Data"];
    let ring = [9, 1, 1, 0, 0, 0];
    for (a, r) in areas.iter().zip(ring) {
        for i in 0..10 {
            let t = if i < r { "ring" } else { "simp" };
            lines.push(rec(&format!("{a}{i}"), t, &format!("Mathlib/{a}/X.lean")));
        }
    }
    fs::write(d.path().join("c.jsonl"), lines.join("\n")).unwrap();
    let o = run(
        d.path(),
        &[
            "--corpus",
            "c.jsonl",
            "candidates",
            "--source",
            "Mathlib.Algebra",
            "--target",
            "Mathlib.Topology",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let b = body(
        &d.path()
            .join("candidates-Mathlib.Algebra-Mathlib.Topology.tsv"),
    );
    let rows: Vec<&str> = b.lines().skip(1).collect();
    assert_eq!(rows.len(), 1, "{b}");
    assert!(rows[0].starts_with("ring|0|0|0\tMathlib.Algebra\tMathlib.Topology\t"));
    assert!(rows[0].contains("\tABSENT\t"));
}

#[test]
fn config_file_is_validated_and_overridden() {
    let d = tempfile::tempdir().unwrap();
    toy_corpus(d.path());
    fs::write(d.path().join("bad.cfg"), "colour = blue\n").unwrap();
    let o = run(d.path(), &["--config", "bad.cfg", "schemas"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("colour"));

    fs::write(
        d.path().join("good.cfg"),
        "corpus = corpus.jsonl\nout_dir = cfg-out\nformat = jsonl\n",
    )
    .unwrap();
    let o = run(d.path(), &["--config", "good.cfg", "schemas"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(d.path().join("cfg-out/schemas.jsonl").exists());
    let o = run(
        d.path(),
        &["--config", "good.cfg", "--out-dir", "flag-out", "schemas"],
    );
    assert!(o.status.success());
    assert!(d.path().join("flag-out/schemas.jsonl").exists());
}

fn write_networks(path: &Path, nets: &[relanalogy::relnet::RelationalNetwork]) {
    let lines: Vec<String> = nets
        .iter()
        .map(|n| serde_json::to_string(&n.to_record()).unwrap())
        .collect();
    fs::write(path, lines.join("\n")).unwrap();
}

#[test]
fn match_one_against_one_and_revalidate() {
    let d = tempfile::tempdir().unwrap();
    let (q, c) = synthetic_corpus(5, 1, 1, 8, 20, 3);
    write_networks(&d.path().join("q.jsonl"), &q);
    write_networks(&d.path().join("t.jsonl"), &c);
    let o = run(
        d.path(),
        &["match", "--queries", "q.jsonl", "--targets", "t.jsonl"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("matched 1 queries against 1 targets"));
    let results = read_results(&d.path().join("matches.jsonl")).unwrap();
    assert_eq!(results.len(), 1);
    assert_eq!(results[0].ranking.len(), 1);
    let e = &results[0].ranking[0];
    let asg = Assignment::new(e.assignment.clone()).unwrap();
    assert_eq!(
        relational_score(&q[0], &c[0], &asg, &Weights::unit()).unwrap(),
        e.raw
    );
}

#[test]
fn match_rejects_zero_top_k_and_bad_records() {
    let d = tempfile::tempdir().unwrap();
    let (q, _) = synthetic_corpus(5, 1, 0, 4, 4, 2);
    write_networks(&d.path().join("q.jsonl"), &q);
    let o = run(
        d.path(),
        &[
            "match",
            "--queries",
            "q.jsonl",
            "--targets",
            "q.jsonl",
            "--top-k",
            "0",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
    fs::write(
        d.path().join("bad.jsonl"),
        format!(
            "{}\n{{\"id\":1}}\n",
            serde_json::to_string(&q[0].to_record()).unwrap()
        ),
    )
    .unwrap();
    let o = run(
        d.path(),
        &["match", "--queries", "q.jsonl", "--targets", "bad.jsonl"],
    );
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn match_accepts_corpus_records() {
    let d = tempfile::tempdir().unwrap();
    let state = |goal: &str| serde_json::json!({"hyps": [["h", "a = b"]], "goals": [goal]});
    let lines = [
        serde_json::json!({"id": "s1", "tactic": "exact h", "state": state("a = b")}).to_string(),
        serde_json::json!({"id": "s2", "tactic": "rw [h]", "state": state("f a = c")}).to_string(),
    ];
    fs::write(d.path().join("c.jsonl"), lines.join("\n")).unwrap();
    let o = run(
        d.path(),
        &[
            "match",
            "--queries",
            "c.jsonl",
            "--targets",
            "c.jsonl",
            "--top-k",
            "2",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let results = read_results(&d.path().join("matches.jsonl")).unwrap();
    assert_eq!(results.len(), 2);
    assert_eq!(results[0].ranking[0].candidate, "s1");
}

#[test]
fn battery_exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["battery", "--file", "missing.jsonl"]);
    assert_eq!(o.status.code(), Some(1));
    fs::write(d.path().join("empty.jsonl"), "").unwrap();
    let o = run(d.path(), &["battery", "--file", "empty.jsonl"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("total: 0/0"));
    let case = serde_json::json!({
        "name": "mate", "fen_a": "rnb1kbnr/pppp1ppp/8/4p3/6Pq/5P2/PPPPP2P/RNBQKBNR",
        "fen_b": "rnb1kbnr/pppp1ppp/8/4p3/6Pq/5P2/PPPPP2P/RNBQKBNR", "key": [["Ke1", ["Ke1"]]]
    });
    fs::write(d.path().join("one.jsonl"), case.to_string()).unwrap();
    let o = run(d.path(), &["battery", "--file", "one.jsonl"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let wrong = serde_json::json!({
        "name": "wrong", "fen_a": "4k3/8/8/8/8/8/8/4K3", "fen_b": "4k3/8/8/8/8/8/8/4K3",
        "key": [["Ke1", ["ke8"]]]
    });
    fs::write(d.path().join("wrong.jsonl"), wrong.to_string()).unwrap();
    let o = run(d.path(), &["battery", "--file", "wrong.jsonl"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn whyreport_round_trips_and_refuses_overwrite() {
    let d = tempfile::tempdir().unwrap();
    let args = [
        "whyreport",
        "--schema",
        "simp₁!|2|1|0",
        "--source-id",
        "Nat.foo",
        "--target-id",
        "Real.bar",
    ];
    let o = run(d.path(), &args);
    assert!(o.status.success(), "{}", stderr(&o));
    let path = d.path().join("whyreport-Nat.foo-Real.bar.md");
    let b = body(&path);
    assert!(b.contains("simp₁!|2|1|0"));
    for h in relanalogy::cli::WHY_SECTIONS {
        assert!(b.contains(h));
    }
    let o = run(d.path(), &args);
    assert_eq!(o.status.code(), Some(2));
    let mut forced = args.to_vec();
    forced.extend(["--force", "--verify-cmd", "exit 3"]);
    let o = run(d.path(), &forced);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(body(&path).contains("- exit status: 3"));
}

#[test]
fn unknown_subcommand_is_usage() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run(d.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(d.path(), &["--help"]).status.code(), Some(0));
}
