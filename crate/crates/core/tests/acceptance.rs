//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Run with `cargo test -p relanalogy-core --test acceptance`.

use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use relanalogy::chess::{
    default_battery, network_from_fen, parse_fen, run_battery, Square, BLOCKING, CONFINEMENT,
};
use relanalogy::files::read_results;
use relanalogy::lean::{parse_schema, AreaId, Classified, CorpusEntry, KnownHeads, TacticSchema};
use relanalogy::matcher::{brute_force_match, match_networks, MatchConfig};
use relanalogy::relnet::{relational_score, Assignment, Weights};
use relanalogy::stats::{aggregate, transfer_candidates, zscore_table, AreaStats, TransferFilters};
use relanalogy::synth::{random_network, synthetic_corpus, synthetic_registry};

const FOOLS_MATE: &str = "rnb1kbnr/pppp1ppp/8/4p3/6Pq/5P2/PPPPP2P/RNBQKBNR";
const ENDGAME: &str = "8/8/8/8/8/6b1/2k1P3/4KB2";

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn oracle_equivalence() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let config = MatchConfig::default();
    let mut equal = 0;
    let total = 200;
    for k in 0..total {
        let reg = synthetic_registry(rng.gen_range(1..=4));
        let a = random_network(&format!("a{k}"), rng.gen_range(1..=6), &reg, 0.3, &mut rng);
        let b = random_network(&format!("b{k}"), rng.gen_range(1..=6), &reg, 0.3, &mut rng);
        let heur = match_networks(&a, &b, &config).unwrap().score.raw;
        let exact = brute_force_match(&a, &b, &config.weights, 8)
            .unwrap()
            .score
            .raw;
        if (heur - exact).abs() < 1e-9 {
            equal += 1;
        }
    }
    let secs = started.elapsed().as_secs_f64();
    outcome(
        equal * 100 >= total * 99 && secs < 60.0,
        format!(
            "{equal}/{total} equal to the exhaustive optimum (need >= 99%), {secs:.2}s (limit 60s)"
        ),
    )
}

fn battery_fixtures() -> Outcome {
    let started = Instant::now();
    let cases = default_battery();
    let config = MatchConfig::default();
    let first = run_battery(&cases, &config);
    let second = run_battery(&cases, &config);
    let secs = started.elapsed().as_secs_f64();
    let mut misses = Vec::new();
    for case in first.ran() {
        for c in case.checks.iter().filter(|c| !c.satisfied) {
            misses.push(format!(
                "{}: {} -> {} (want {})",
                case.name,
                c.source,
                c.mapped_to.as_deref().unwrap_or("unassigned"),
                c.acceptable.join("|")
            ));
        }
    }
    let total = first.total();
    let detail = format!(
        "{}/{} key mappings, deterministic={}, {secs:.2}s (limit 30s){}",
        first.satisfied(),
        total,
        first == second,
        if misses.is_empty() {
            String::new()
        } else {
            format!("; missed {}", misses.join(", "))
        }
    );
    outcome(
        first.all_passed() && total == 8 && first == second && secs < 30.0,
        detail,
    )
}

fn extraction_literalness() -> Outcome {
    let fm = network_from_fen(FOOLS_MATE, "fm").unwrap();
    let ke1 = fm.entity_index("Ke1").unwrap();
    let confiners = fm
        .relations_of(CONFINEMENT)
        .filter(|r| r.dst == ke1)
        .count();
    let moves = parse_fen(FOOLS_MATE)
        .unwrap()
        .legal_move_count(Square::parse("e1").unwrap());
    let eg = network_from_fen(ENDGAME, "eg").unwrap();
    let blocking = eg.has_relation(
        eg.entity_index("Pe2").unwrap(),
        eg.entity_index("Bf1").unwrap(),
        BLOCKING,
    );
    outcome(
        confiners >= 1 && moves == 0 && blocking,
        format!("confinement edges into Ke1: {confiners}, Ke1 legal moves: {moves}, blocking Pe2->Bf1: {blocking}"),
    )
}

fn schema(head: &str) -> TacticSchema {
    TacticSchema {
        head: head.into(),
        arity: 0,
        has_with: false,
        uses_lemma: false,
    }
}

fn statistics_algebra() -> Outcome {
    let mut failures = Vec::new();

    // Four areas, four tactics each.
    let layout: [(&str, [&str; 4]); 4] = [
        ("Algebra", ["simp", "simp", "ring", "ring"]),
        ("Analysis", ["simp", "linarith", "linarith", "linarith"]),
        ("Order", ["simp", "simp", "simp", "simp"]),
        ("Topology", ["simp", "ring", "linarith", "linarith"]),
    ];
    let corpus: Vec<CorpusEntry> = layout
        .iter()
        .flat_map(|(area, tactics)| {
            tactics.iter().enumerate().map(move |(i, t)| CorpusEntry {
                id: format!("{area}{i}"),
                tactic: (*t).into(),
                source_file: Some(format!("Mathlib/{area}/File.lean")),
                state: None,
            })
        })
        .collect();
    let stats = aggregate(&corpus, &KnownHeads::default());
    let universe: Vec<AreaId> = layout
        .iter()
        .map(|(a, _)| AreaId::new(&format!("Mathlib.{a}")).unwrap())
        .collect();
    let table = zscore_table(&stats, &universe).unwrap();
    let (r23, r11, r27) = (2f64 / 3.0, 11f64.sqrt(), 27f64.sqrt());
    let expected = [
        ("simp", [0.0, -r23.sqrt(), 2.0 * r23.sqrt(), -r23.sqrt()]),
        ("ring", [5.0 / r11, -3.0 / r11, -3.0 / r11, 1.0 / r11]),
        ("linarith", [-5.0 / r27, 7.0 / r27, -5.0 / r27, 3.0 / r27]),
    ];
    let mut worst: f64 = 0.0;
    for (head, want) in expected {
        let col = table.column(&schema(head)).unwrap();
        for (got, w) in col.z.iter().zip(want) {
            worst = worst.max((got - w).abs());
        }
        let mean = col.z.iter().sum::<f64>() / col.z.len() as f64;
        if mean.abs() > 1e-9 {
            failures.push(format!("{head} mean z {mean:e}"));
        }
    }
    if worst > 1e-9 {
        failures.push(format!("max z deviation {worst:e}"));
    }

    // Six areas of 100 tactics; `x` has z = (2, -1, -1, 0, 0, 0) and `y`
    // sits in two areas only.
    let areas: Vec<AreaId> = (0..6)
        .map(|i| AreaId::new(&format!("Mathlib.A{i}")).unwrap())
        .collect();
    let x = [40u64, 10, 10, 20, 20, 20];
    let y = [50u64, 1, 0, 0, 0, 0];
    let stats = AreaStats::from_counts(areas.iter().enumerate().flat_map(|(i, a)| {
        [
            (a.clone(), schema("x"), x[i]),
            (a.clone(), schema("y"), y[i]),
            (a.clone(), schema("w"), 100 - x[i] - y[i]),
        ]
    }));
    let table = zscore_table(&stats, &areas).unwrap();
    let filters = TransferFilters::default();
    let boundary = transfer_candidates(&table, &areas[0], &areas[1], &filters).unwrap();
    let zx = table.column(&schema("x")).unwrap();
    let accepted = boundary.iter().any(|c| c.schema == schema("x"));
    if !accepted {
        failures.push(format!(
            "boundary candidate rejected (z_S={}, z_T={})",
            zx.z[0], zx.z[1]
        ));
    }
    let zy = table.column(&schema("y")).unwrap();
    let to_absent = transfer_candidates(&table, &areas[0], &areas[2], &filters).unwrap();
    if to_absent.iter().any(|c| c.schema == schema("y")) {
        failures.push("areas_present=2 schema accepted".into());
    }
    for c in boundary.iter().chain(&to_absent) {
        let col = table.column(&c.schema).unwrap();
        if !filters.admits(c.z_source, c.z_target, c.target_absent, col.areas_present) {
            failures.push(format!("{} violates the candidate predicate", c.schema));
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "4-area z max deviation {worst:.1e} (tol 1e-9); boundary z_S={:.12} z_T={:.12} accepted={accepted}; areas_present={} schema with z_S={:.3} rejected={}{}",
            zx.z[0],
            zx.z[1],
            zy.areas_present,
            zy.z[0],
            !to_absent.iter().any(|c| c.schema == schema("y")),
            if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) }
        ),
    )
}

fn parser_golden() -> Outcome {
    #[derive(serde::Deserialize)]
    struct Golden {
        tactic: String,
        class: String,
        head: Option<String>,
        arity: Option<usize>,
        with: Option<bool>,
        lemma: Option<bool>,
    }
    let known = KnownHeads::default();
    let golden: Vec<Golden> = include_str!("data/tactic_golden.jsonl")
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let mut wrong = Vec::new();
    for g in &golden {
        let ok = match (g.class.as_str(), parse_schema(&g.tactic, &known)) {
            ("schema", Classified::Schema(s)) => {
                Some(&s.head) == g.head.as_ref()
                    && Some(s.arity) == g.arity
                    && Some(s.has_with) == g.with
                    && Some(s.uses_lemma) == g.lemma
            }
            ("shortcut", Classified::Shortcut(h)) => Some(&h) == g.head.as_ref(),
            ("unparseable", Classified::Unparseable) => true,
            _ => false,
        };
        if !ok {
            wrong.push(g.tactic.clone());
        }
    }
    let rows = [
        (
            "filter_upwards [h_eq s f hf, h_inter_eq s f hf, h'] with omega h_eq h_inter_eq h'",
            "filter_upwards",
            true,
            1,
        ),
        ("any_goals rfl", "any_goals", false, 1),
        ("by_cases hι : Nonempty ι", "by_cases", false, 4),
    ];
    for (t, head, with, arity) in rows {
        match parse_schema(t, &known) {
            Classified::Schema(s) if s.head == head && s.has_with == with && s.arity == arity => {}
            other => wrong.push(format!("table row {t:?} gave {other:?}")),
        }
    }
    outcome(
        wrong.is_empty() && golden.len() == 20,
        format!(
            "{}/{} golden entries exact, table rows filter_upwards/with/1, any_goals/-/1, by_cases/-/4{}",
            golden.len() - wrong.iter().filter(|w| !w.starts_with("table row")).count(),
            golden.len(),
            if wrong.is_empty() { String::new() } else { format!("; wrong: {wrong:?}") }
        ),
    )
}

fn write_networks(path: &Path, nets: &[relanalogy::relnet::RelationalNetwork]) {
    let lines: Vec<String> = nets
        .iter()
        .map(|n| serde_json::to_string(&n.to_record()).unwrap())
        .collect();
    fs::write(path, lines.join("\n")).unwrap();
}

fn relanalogy(dir: &Path, args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_relanalogy"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn scale_check() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let (queries, targets) = synthetic_corpus(672, 8, 672, 30, 90, 11);
    write_networks(&dir.path().join("queries.jsonl"), &queries);
    write_networks(&dir.path().join("targets.jsonl"), &targets);
    let started = Instant::now();
    let out = relanalogy(
        dir.path(),
        &[
            "match",
            "--queries",
            "queries.jsonl",
            "--targets",
            "targets.jsonl",
            "--out-dir",
            "out",
        ],
    );
    let elapsed = started.elapsed();
    if !out.status.success() {
        return outcome(
            false,
            format!("match failed: {}", String::from_utf8_lossy(&out.stderr)),
        );
    }
    let results = read_results(&dir.path().join("out/matches.jsonl")).unwrap();
    let mut problems = Vec::new();
    if results.len() != 8 {
        problems.push(format!("{} rankings", results.len()));
    }
    for r in &results {
        if r.ranking.len() != 5 {
            problems.push(format!("{}: ranking length {}", r.query, r.ranking.len()));
        }
        if r.ranking
            .windows(2)
            .any(|w| w[0].normalized < w[1].normalized)
        {
            problems.push(format!("{}: scores increase", r.query));
        }
        let q = queries.iter().find(|n| n.id() == r.query).unwrap();
        for e in &r.ranking {
            let t = targets.iter().find(|n| n.id() == e.candidate).unwrap();
            let asg = Assignment::new(e.assignment.clone()).unwrap();
            if relational_score(q, t, &asg, &Weights::unit()).unwrap() != e.raw {
                problems.push(format!(
                    "{} vs {}: raw score does not re-validate",
                    r.query, e.candidate
                ));
            }
        }
    }
    let top: Vec<String> = results
        .iter()
        .filter_map(|r| r.ranking.first().map(|e| format!("{:.3}", e.normalized)))
        .collect();
    outcome(
        problems.is_empty() && elapsed < Duration::from_secs(600),
        format!(
            "8 x 672 networks (30 entities, 90 relations) in {:.1}s (limit 600s); {} rankings of length 5, top normalized scores [{}]{}",
            elapsed.as_secs_f64(),
            results.len(),
            top.join(", "),
            if problems.is_empty() { String::new() } else { format!("; {}", problems.join("; ")) }
        ),
    )
}

fn without_header(path: &Path) -> Option<String> {
    let text = fs::read_to_string(path).ok()?;
    let (first, rest) = text.split_once('\n')?;
    first.starts_with('#').then(|| rest.to_owned())
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut lines = Vec::new();
    let areas = [
        "Algebra",
        "Order",
        "Analysis",
        "Topology",
        "Data",
        "Combinatorics",
    ];
    let tactics = [
        "simp",
        "ring",
        "rw [h]",
        "linarith",
        "exact h.1",
        "hx",
        "· simp",
        "omega",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..400 {
        let area = areas[rng.gen_range(0..areas.len())];
        let tactic = tactics[rng.gen_range(0..tactics.len())];
        lines.push(
            serde_json::json!({
                "id": format!("e{i}"),
                "tactic": tactic,
                "source_file": format!("Mathlib/{area}/F{}.lean", i % 7),
                "state": {"hyps": [["h", format!("f x{} = g x", i % 3)]], "goals": [format!("f x{} + {} = g x", i % 3, i % 4)]}
            })
            .to_string(),
        );
    }
    fs::write(d.join("corpus.jsonl"), lines.join("\n")).unwrap();
    let (q, t) = synthetic_corpus(3, 2, 20, 10, 25, 4);
    write_networks(&d.join("q.jsonl"), &q);
    write_networks(&d.join("t.jsonl"), &t);

    let commands: Vec<(Vec<&str>, Vec<&str>)> = vec![
        (vec!["schemas"], vec!["schemas.tsv"]),
        (vec!["zscores"], vec!["zscores.tsv"]),
        (
            vec![
                "candidates",
                "--source",
                "Mathlib.Algebra",
                "--target",
                "Mathlib.Order",
            ],
            vec!["candidates-Mathlib.Algebra-Mathlib.Order.tsv"],
        ),
        (vec!["pairs"], vec!["pairs.tsv"]),
        (
            vec!["match", "--queries", "q.jsonl", "--targets", "t.jsonl"],
            vec!["matches.jsonl"],
        ),
        (
            vec![
                "match",
                "--queries",
                "corpus.jsonl",
                "--targets",
                "corpus.jsonl",
                "--top-k",
                "3",
                "--restarts",
                "4",
            ],
            vec!["matches.jsonl"],
        ),
        (vec!["battery"], vec!["battery.txt"]),
        (
            vec![
                "whyreport",
                "--schema",
                "rw|1|0|1",
                "--source-id",
                "s",
                "--target-id",
                "t",
                "--force",
            ],
            vec!["whyreport-s-t.md"],
        ),
    ];
    let mut differing = Vec::new();
    for (args, files) in &commands {
        let mut outputs = Vec::new();
        for run in ["run1", "run2"] {
            let mut full = vec!["--corpus", "corpus.jsonl", "--seed", "11", "--out-dir", run];
            full.extend(args.iter().copied());
            relanalogy(d, &full);
            outputs.push(
                files
                    .iter()
                    .map(|f| without_header(&d.join(run).join(f)))
                    .collect::<Vec<_>>(),
            );
        }
        if outputs[0] != outputs[1] || outputs[0].iter().any(Option::is_none) {
            differing.push(args[0].to_owned());
        }
    }
    outcome(
        differing.is_empty(),
        format!(
            "{} command runs compared byte-for-byte below the header line{}",
            commands.len(),
            if differing.is_empty() {
                String::new()
            } else {
                format!("; differing or missing: {differing:?}")
            }
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("oracle equivalence", oracle_equivalence),
        ("battery fixtures", battery_fixtures),
        ("extraction literalness", extraction_literalness),
        ("statistics algebra", statistics_algebra),
        ("parser golden set", parser_golden),
        ("scale check", scale_check),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} criterion {}: {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    println!(
        "acceptance: {}/{} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
