use relanalogy::lean::{parse_schema, Classified, KnownHeads};
use serde::Deserialize;

#[derive(Deserialize)]
struct Golden {
    tactic: String,
    class: String,
    head: Option<String>,
    arity: Option<usize>,
    with: Option<bool>,
    lemma: Option<bool>,
}

fn golden() -> Vec<Golden> {
    include_str!("data/tactic_golden.jsonl")
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn golden_set_has_twenty_entries() {
    assert_eq!(golden().len(), 20);
}

#[test]
fn every_golden_entry_classifies_exactly() {
    let known = KnownHeads::default();
    for g in golden() {
        let got = parse_schema(&g.tactic, &known);
        match (g.class.as_str(), &got) {
            ("schema", Classified::Schema(s)) => {
                assert_eq!(Some(&s.head), g.head.as_ref(), "{}", g.tactic);
                assert_eq!(Some(s.arity), g.arity, "{}", g.tactic);
                assert_eq!(Some(s.has_with), g.with, "{}", g.tactic);
                assert_eq!(Some(s.uses_lemma), g.lemma, "{}", g.tactic);
            }
            ("shortcut", Classified::Shortcut(h)) => assert_eq!(Some(h), g.head.as_ref()),
            ("unparseable", Classified::Unparseable) => {}
            _ => panic!("{:?}: expected {}, got {got:?}", g.tactic, g.class),
        }
    }
}
