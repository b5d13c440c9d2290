//! Tactic schemas, source-path areas, serialized proof states and the
//! proof-state relation extractor.

use std::collections::HashSet;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::ParseError;
use crate::relnet::{Entity, Relation, RelationTypeId, RelationalNetwork, TypeRegistry};

/// `(head, arity, has_with, uses_lemma)` abstraction of one tactic call.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TacticSchema {
    pub head: String,
    pub arity: usize,
    pub has_with: bool,
    pub uses_lemma: bool,
}

impl TacticSchema {
    /// `head|arity|with|lemma` with flags rendered as 0/1.
    pub fn key(&self) -> String {
        format!(
            "{}|{}|{}|{}",
            self.head, self.arity, self.has_with as u8, self.uses_lemma as u8
        )
    }

    pub fn parse_key(key: &str) -> Option<TacticSchema> {
        let mut parts = key.rsplitn(4, '|');
        let lemma = parts.next()?;
        let with = parts.next()?;
        let arity = parts.next()?.parse().ok()?;
        let head = parts.next()?;
        let flag = |s: &str| match s {
            "0" => Some(false),
            "1" => Some(true),
            _ => None,
        };
        if head.is_empty() {
            return None;
        }
        Some(TacticSchema {
            head: head.to_owned(),
            arity,
            has_with: flag(with)?,
            uses_lemma: flag(lemma)?,
        })
    }
}

impl fmt::Display for TacticSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// Three-way classification of a tactic string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classified {
    Schema(TacticSchema),
    /// A bare hypothesis name such as `hx`, shorthand for `exact hx`.
    Shortcut(String),
    Unparseable,
}

pub const KNOWN_HEADS_DATA: &str = include_str!("../data/tactic_heads.txt");

fn data_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

/// Set of tactic heads that are not shortcuts when they appear alone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnownHeads(HashSet<String>);

impl KnownHeads {
    pub fn from_data(text: &str) -> Self {
        KnownHeads(data_lines(text).map(str::to_owned).collect())
    }

    pub fn contains(&self, head: &str) -> bool {
        self.0.contains(head)
    }
}

impl Default for KnownHeads {
    fn default() -> Self {
        Self::from_data(KNOWN_HEADS_DATA)
    }
}

/// Identifier characters: Unicode letters and digits (Greek letters and
/// subscript digits included), `_`, `'` and `.`.
fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\'' || c == '.'
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_open(c: char) -> bool {
    matches!(c, '(' | '[' | '{' | '⟨')
}

fn is_close(c: char) -> bool {
    matches!(c, ')' | ']' | '}' | '⟩')
}

/// Splits into whitespace-separated words at bracket depth 0. Bracketed and
/// quoted spans stay inside the word that contains them.
fn top_level_words(text: &str) -> Vec<String> {
    let mut words = Vec::new();
    let mut cur = String::new();
    let mut depth = 0usize;
    let mut in_quote = false;
    for c in text.chars() {
        if in_quote {
            cur.push(c);
            if c == '"' {
                in_quote = false;
            }
            continue;
        }
        if c == '"' {
            in_quote = true;
            cur.push(c);
        } else if is_open(c) {
            depth += 1;
            cur.push(c);
        } else if is_close(c) {
            depth = depth.saturating_sub(1);
            cur.push(c);
        } else if c.is_whitespace() && depth == 0 {
            if !cur.is_empty() {
                words.push(std::mem::take(&mut cur));
            }
        } else {
            cur.push(c);
        }
    }
    if !cur.is_empty() {
        words.push(cur);
    }
    words
}

/// Classifies a tactic string.
///
/// The head is the leading identifier (with optional `!`/`?` suffixes). The
/// remaining text is split into top-level argument groups; a bracketed or
/// parenthesized group counts once, and the `with` keyword ends the count
/// (the with-clause and its binders add nothing to the arity).
pub fn parse_schema(tactic: &str, known: &KnownHeads) -> Classified {
    let text = tactic.trim();
    let mut chars = text.char_indices().peekable();
    match chars.peek() {
        Some(&(_, c)) if is_ident_start(c) => {}
        _ => return Classified::Unparseable,
    }
    let mut end = text.len();
    for (i, c) in chars.by_ref() {
        if !is_ident_char(c) {
            end = i;
            break;
        }
    }
    let mut head_end = end;
    for c in text[end..].chars() {
        if c == '!' || c == '?' {
            head_end += c.len_utf8();
        } else {
            break;
        }
    }
    let head = text[..head_end].trim_end_matches('.');
    if head.is_empty() {
        return Classified::Unparseable;
    }
    let rest = &text[head_end..];
    let bare = head_end == end;
    if rest.trim().is_empty() && bare && !known.contains(head) {
        return Classified::Shortcut(head.to_owned());
    }
    let words = top_level_words(rest);
    let with_at = words.iter().position(|w| w == "with");
    let arity = with_at.unwrap_or(words.len());
    let uses_lemma = words.iter().any(|w| w.starts_with('['));
    Classified::Schema(TacticSchema {
        head: head.to_owned(),
        arity,
        has_with: with_at.is_some(),
        uses_lemma,
    })
}

/// Two-component dotted namespace, e.g. `Mathlib.Probability`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AreaId(String);

impl AreaId {
    /// Accepts `A.B` with exactly two non-empty components.
    pub fn new(text: &str) -> Option<AreaId> {
        let mut parts = text.split('.');
        let (a, b) = (parts.next()?, parts.next()?);
        (parts.next().is_none() && !a.is_empty() && !b.is_empty()).then(|| AreaId(text.to_owned()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AreaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// First two components of a `/`-separated source path. A trailing `.lean`
/// on the second component is dropped.
pub fn derive_area(source_file: &str) -> Result<AreaId, ParseError> {
    let comps: Vec<&str> = source_file.split('/').filter(|c| !c.is_empty()).collect();
    if comps.len() < 2 {
        return Err(ParseError::NonAreaPath(source_file.to_owned()));
    }
    let second = comps[1].strip_suffix(".lean").unwrap_or(comps[1]);
    if second.is_empty() || comps[0].contains('.') || second.contains('.') {
        return Err(ParseError::NonAreaPath(source_file.to_owned()));
    }
    Ok(AreaId(format!("{}.{}", comps[0], second)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofState {
    pub hypotheses: Vec<(String, String)>,
    pub goals: Vec<String>,
}

impl ProofState {
    /// Checks the invariants: at least one goal, unique hypothesis names.
    pub fn new(hypotheses: Vec<(String, String)>, goals: Vec<String>) -> Result<Self, ParseError> {
        if goals.is_empty() {
            return Err(ParseError::NoGoal);
        }
        let mut seen = HashSet::new();
        for (name, _) in &hypotheses {
            if !seen.insert(name.as_str()) {
                return Err(ParseError::DuplicateHypothesis(name.clone()));
            }
        }
        Ok(Self { hypotheses, goals })
    }
}

impl fmt::Display for ProofState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (name, ty) in &self.hypotheses {
            if !first {
                writeln!(f)?;
            }
            first = false;
            write!(f, "{name} : {ty}")?;
        }
        for g in &self.goals {
            if !first {
                writeln!(f)?;
            }
            first = false;
            write!(f, "⊢ {g}")?;
        }
        Ok(())
    }
}

/// Parses `name : type` lines followed by one or more `⊢ goal` lines.
/// Blank lines are skipped.
pub fn parse_proof_state(text: &str) -> Result<ProofState, ParseError> {
    let mut hyps = Vec::new();
    let mut goals = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(goal) = line.strip_prefix('⊢') {
            goals.push(goal.trim().to_owned());
            continue;
        }
        if !goals.is_empty() {
            return Err(ParseError::StateLine {
                line: idx + 1,
                reason: "hypothesis after a goal line".into(),
            });
        }
        let (name, ty) = line
            .split_once(" : ")
            .ok_or_else(|| ParseError::StateLine {
                line: idx + 1,
                reason: "expected `name : type` or `⊢ goal`".into(),
            })?;
        let name = name.trim();
        if name.is_empty() {
            return Err(ParseError::StateLine {
                line: idx + 1,
                reason: "empty hypothesis name".into(),
            });
        }
        hyps.push((name.to_owned(), ty.trim().to_owned()));
    }
    ProofState::new(hyps, goals)
}

pub const REWRITE: RelationTypeId = RelationTypeId(0);
pub const FIT_APPLY: RelationTypeId = RelationTypeId(1);
pub const HEAD_MATCH: RelationTypeId = RelationTypeId(2);
pub const STRUCTURE: RelationTypeId = RelationTypeId(3);
pub const EQUALITY: RelationTypeId = RelationTypeId(4);
pub const REFLEXIVE: RelationTypeId = RelationTypeId(5);
pub const WITNESS: RelationTypeId = RelationTypeId(6);
pub const BIDIRECTIONAL: RelationTypeId = RelationTypeId(7);
pub const KERNEL_SIMP: RelationTypeId = RelationTypeId(8);
pub const DECIDABLE: RelationTypeId = RelationTypeId(9);
pub const LEMMA_NEEDED: RelationTypeId = RelationTypeId(10);

/// Eleven named proof-state relation types plus three reserved slots.
pub const PROOF_RELATIONS: [&str; 14] = [
    "rewrite",
    "fit_apply",
    "head_match",
    "structure",
    "equality",
    "reflexive",
    "witness",
    "bidirectional",
    "kernel_simp",
    "decidable",
    "lemma_needed",
    "reserved_11",
    "reserved_12",
    "reserved_13",
];

pub fn proof_registry() -> Arc<TypeRegistry> {
    static REG: OnceLock<Arc<TypeRegistry>> = OnceLock::new();
    REG.get_or_init(|| Arc::new(TypeRegistry::new(PROOF_RELATIONS).expect("static registry")))
        .clone()
}

pub const SIMP_HEADS_DATA: &str = include_str!("../data/simp_heads.txt");
pub const DECIDABLE_HEADS_DATA: &str = include_str!("../data/decidable_heads.txt");

fn head_set(cell: &'static OnceLock<HashSet<String>>, data: &str) -> &'static HashSet<String> {
    cell.get_or_init(|| data_lines(data).map(str::to_owned).collect())
}

fn simp_heads() -> &'static HashSet<String> {
    static S: OnceLock<HashSet<String>> = OnceLock::new();
    head_set(&S, SIMP_HEADS_DATA)
}

fn decidable_heads() -> &'static HashSet<String> {
    static S: OnceLock<HashSet<String>> = OnceLock::new();
    head_set(&S, DECIDABLE_HEADS_DATA)
}

const MULTI_OPS: [&str; 8] = ["<->", "->", "<=", ">=", ":=", "!=", "==", "=>"];

/// Identifier runs, multi-character ASCII operators, and single symbols.
fn type_tokens(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if is_ident_char(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            out.push(chars[start..i].iter().collect());
        } else {
            let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
            match MULTI_OPS.iter().find(|op| rest.starts_with(**op)) {
                Some(op) => {
                    out.push((*op).to_owned());
                    i += op.chars().count();
                }
                None => {
                    out.push(c.to_string());
                    i += 1;
                }
            }
        }
    }
    out
}

fn depths(tokens: &[String]) -> Vec<usize> {
    let mut d = 0usize;
    tokens
        .iter()
        .map(|t| {
            let c = t.chars().next().unwrap_or(' ');
            if t.chars().count() == 1 && is_close(c) {
                d = d.saturating_sub(1);
                d
            } else {
                let here = d;
                if t.chars().count() == 1 && is_open(c) {
                    d += 1;
                }
                here
            }
        })
        .collect()
}

/// Top-level shape of a type text.
#[derive(Debug, Clone, PartialEq)]
struct TypeShape {
    tokens: Vec<String>,
    head: String,
    /// `(lhs, rhs)` token ranges when the type is a top-level equation.
    equation: Option<(Vec<String>, Vec<String>)>,
    is_iff: bool,
    /// Depth-0 `∀`, `∃`, `→` tokens in order.
    skeleton: Vec<String>,
}

const BINDERS: [&str; 4] = ["∀", "∃", "fun", "λ"];

fn find_top(tokens: &[String], depth: &[usize], ops: &[&str]) -> Option<usize> {
    tokens
        .iter()
        .zip(depth)
        .position(|(t, d)| *d == 0 && ops.contains(&t.as_str()))
}

fn shape(text: &str) -> TypeShape {
    let tokens = type_tokens(text);
    let depth = depths(&tokens);
    let skeleton = tokens
        .iter()
        .zip(&depth)
        .filter(|(t, d)| **d == 0 && matches!(t.as_str(), "∀" | "∃" | "→" | "->"))
        .map(|(t, _)| {
            if t == "->" {
                "→".to_owned()
            } else {
                t.clone()
            }
        })
        .collect();
    let mut equation = None;
    let mut is_iff = false;
    let first = tokens.first().map(String::as_str).unwrap_or("");
    let head = if BINDERS.contains(&first) {
        first.to_owned()
    } else if find_top(&tokens, &depth, &["↔", "<->"]).is_some() {
        is_iff = true;
        "Iff".to_owned()
    } else if find_top(&tokens, &depth, &["→", "->"]).is_some() {
        "→".to_owned()
    } else if find_top(&tokens, &depth, &["∧"]).is_some() {
        "And".to_owned()
    } else if find_top(&tokens, &depth, &["∨"]).is_some() {
        "Or".to_owned()
    } else if let Some(at) = find_top(&tokens, &depth, &["="]) {
        equation = Some((tokens[..at].to_vec(), tokens[at + 1..].to_vec()));
        "Eq".to_owned()
    } else if find_top(&tokens, &depth, &["≠", "!="]).is_some() {
        "Ne".to_owned()
    } else if find_top(&tokens, &depth, &["≤", "<="]).is_some() {
        "LE".to_owned()
    } else if find_top(&tokens, &depth, &["≥", ">="]).is_some() {
        "GE".to_owned()
    } else if find_top(&tokens, &depth, &["<"]).is_some() {
        "LT".to_owned()
    } else if find_top(&tokens, &depth, &[">"]).is_some() {
        "GT".to_owned()
    } else if find_top(&tokens, &depth, &["∈"]).is_some() {
        "Membership".to_owned()
    } else if find_top(&tokens, &depth, &["∣"]).is_some() {
        "Dvd".to_owned()
    } else if first == "¬" {
        "Not".to_owned()
    } else {
        tokens
            .iter()
            .find(|t| t.chars().next().is_some_and(is_ident_start))
            .cloned()
            .unwrap_or_else(|| first.to_owned())
    };
    TypeShape {
        tokens,
        head,
        equation,
        is_iff,
        skeleton,
    }
}

fn contains_seq(hay: &[String], needle: &[String]) -> bool {
    !needle.is_empty()
        && needle.len() <= hay.len()
        && hay.windows(needle.len()).any(|w| w == needle)
}

/// Builds the proof-state network. Entities are the hypotheses followed by
/// the goals (labelled `⊢0`, `⊢1`, ...).
///
/// Rules, all syntactic over the type texts:
/// equality / reflexive / bidirectional are self relations on equation,
/// token-identical equation, and `↔` types; fit_apply links a hypothesis
/// to a goal with identical text and then suppresses head_match and
/// rewrite for that pair; head_match compares head symbols; rewrite fires
/// when a side of an equation hypothesis occurs in the goal; structure
/// links entities with the same non-empty binder/arrow skeleton; witness
/// links a hypothesis whose type occurs inside an `∃` goal; kernel_simp
/// and decidable tag goals by head; lemma_needed tags goals with no
/// incoming fit_apply, rewrite or head_match.
pub fn extract_proof_relations(state: &ProofState) -> RelationalNetwork {
    proof_network(state, "")
}

/// [`extract_proof_relations`] with a network id.
pub fn proof_network(state: &ProofState, id: &str) -> RelationalNetwork {
    let nh = state.hypotheses.len();
    let texts: Vec<&str> = state
        .hypotheses
        .iter()
        .map(|(_, t)| t.as_str())
        .chain(state.goals.iter().map(String::as_str))
        .collect();
    let shapes: Vec<TypeShape> = texts.iter().map(|t| shape(t)).collect();
    let norm = |t: &str| t.split_whitespace().collect::<Vec<_>>().join(" ");
    let mut rels = Vec::new();

    for (e, s) in shapes.iter().enumerate() {
        if let Some((l, r)) = &s.equation {
            rels.push(Relation::new(e, e, EQUALITY));
            if l == r {
                rels.push(Relation::new(e, e, REFLEXIVE));
            }
        }
        if s.is_iff {
            rels.push(Relation::new(e, e, BIDIRECTIONAL));
        }
    }

    let mut supported = vec![false; state.goals.len()];
    for h in 0..nh {
        let hs = &shapes[h];
        for (gi, g) in (nh..texts.len()).enumerate() {
            let gs = &shapes[g];
            if norm(texts[h]) == norm(texts[g]) {
                rels.push(Relation::new(h, g, FIT_APPLY));
                supported[gi] = true;
                continue;
            }
            if hs.head == gs.head {
                rels.push(Relation::new(h, g, HEAD_MATCH));
                supported[gi] = true;
            }
            if let Some((l, r)) = &hs.equation {
                if contains_seq(&gs.tokens, l) || contains_seq(&gs.tokens, r) {
                    rels.push(Relation::new(h, g, REWRITE));
                    supported[gi] = true;
                }
            }
            if gs.tokens.first().is_some_and(|t| t == "∃")
                && contains_seq(&gs.tokens[1..], &hs.tokens)
            {
                rels.push(Relation::new(h, g, WITNESS));
            }
        }
    }

    for i in 0..texts.len() {
        for j in (i + 1)..texts.len() {
            if !shapes[i].skeleton.is_empty() && shapes[i].skeleton == shapes[j].skeleton {
                rels.push(Relation::new(i, j, STRUCTURE));
            }
        }
    }

    for (gi, g) in (nh..texts.len()).enumerate() {
        if simp_heads().contains(&shapes[g].head) {
            rels.push(Relation::new(g, g, KERNEL_SIMP));
        }
        if decidable_heads().contains(&shapes[g].head) {
            rels.push(Relation::new(g, g, DECIDABLE));
        }
        if !supported[gi] {
            rels.push(Relation::new(g, g, LEMMA_NEEDED));
        }
    }

    let entities = state
        .hypotheses
        .iter()
        .map(|(n, _)| Entity::new(n.clone(), Some("hypothesis".into())))
        .chain((0..state.goals.len()).map(|k| Entity::new(format!("⊢{k}"), Some("goal".into()))))
        .collect();
    RelationalNetwork::build(id, entities, rels, proof_registry())
        .expect("extracted relations are in range")
}

/// One line of the corpus file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusRecord {
    pub id: String,
    pub tactic: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateRecord {
    #[serde(default)]
    pub hyps: Vec<(String, String)>,
    pub goals: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub id: String,
    pub tactic: String,
    pub source_file: Option<String>,
    pub state: Option<ProofState>,
}

impl TryFrom<CorpusRecord> for CorpusEntry {
    type Error = ParseError;

    fn try_from(r: CorpusRecord) -> Result<Self, ParseError> {
        let state = r
            .state
            .map(|s| ProofState::new(s.hyps, s.goals))
            .transpose()?;
        Ok(CorpusEntry {
            id: r.id,
            tactic: r.tactic,
            source_file: r.source_file,
            state,
        })
    }
}

impl CorpusEntry {
    /// Relational network of the entry's proof state, if it has one.
    pub fn network(&self) -> Option<RelationalNetwork> {
        self.state.as_ref().map(|s| proof_network(s, &self.id))
    }
}
