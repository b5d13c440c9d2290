//! Multi-restart augment/swap local search for the relational assignment
//! problem, a capped exhaustive oracle, and batch ranking.
//!
//! The search keeps a gain table `G[i][x]`: the score that source `i` would
//! contribute if placed on target `x`, given every *other* current pair.
//! Every move's gain is then an O(1) lookup, and applying a move updates the
//! table in O(nS * nT) (skipping sources with no relation to the moved one).

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::NetworkError;
use crate::relnet::{
    all_profiles, relational_score, signature_hash, Assignment, MatchScore, RelationalNetwork,
    Weights,
};

/// Largest `min(n_source, n_target)` the exhaustive oracle accepts by default.
pub const DEFAULT_ORACLE_CAP: usize = 8;

const GAIN_EPS: f64 = 1e-9;
const TIE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct MatchConfig {
    pub restarts: usize,
    pub max_iters_per_restart: usize,
    pub seed: u64,
    pub weights: Weights,
    pub top_k: usize,
}

impl Default for MatchConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_iters_per_restart: 1000,
            seed: 0,
            weights: Weights::unit(),
            top_k: 5,
        }
    }
}

impl MatchConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.restarts == 0 {
            return Err("restarts must be at least 1".into());
        }
        if self.max_iters_per_restart == 0 {
            return Err("max_iters_per_restart must be at least 1".into());
        }
        if self.top_k == 0 {
            return Err("top_k must be at least 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    pub assignment: Assignment,
    pub score: MatchScore,
    pub restarts_used: usize,
    pub best_restart_index: usize,
    /// True if any restart stopped at the iteration cap rather than at a
    /// local optimum.
    pub hit_iteration_cap: bool,
}

/// Relation masks of one network, row-major `n x n`; bit `r` of `adj[i*n+j]`
/// is set iff `(i, j, r)` is a relation.
struct Dense {
    n: usize,
    adj: Vec<u64>,
}

impl Dense {
    fn new(net: &RelationalNetwork) -> Self {
        let n = net.entity_count();
        let mut adj = vec![0u64; n * n];
        for r in net.relations() {
            adj[r.src * n + r.dst] |= 1u64 << r.rel.0;
        }
        Self { n, adj }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> u64 {
        self.adj[i * self.n + j]
    }
}

enum MaskWeight {
    Unit,
    Weighted(Vec<f64>),
}

impl MaskWeight {
    fn new(weights: &Weights) -> Self {
        if weights.is_unit() {
            MaskWeight::Unit
        } else {
            MaskWeight::Weighted(
                (0..64)
                    .map(|r| weights.weight(crate::relnet::RelationTypeId(r)))
                    .collect(),
            )
        }
    }

    #[inline]
    fn of(&self, mask: u64) -> f64 {
        match self {
            MaskWeight::Unit => mask.count_ones() as f64,
            MaskWeight::Weighted(w) => {
                let mut m = mask;
                let mut s = 0.0;
                while m != 0 {
                    let b = m.trailing_zeros() as usize;
                    s += w[b];
                    m &= m - 1;
                }
                s
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Move {
    Augment { src: usize, tgt: usize },
    Reassign { src: usize, tgt: usize },
    Swap { first: usize, second: usize },
}

struct Search<'a> {
    a: &'a Dense,
    b: &'a Dense,
    w: &'a MaskWeight,
    image: Vec<Option<usize>>,
    preimage: Vec<Option<usize>>,
    gain: Vec<f64>,
    score: f64,
}

impl<'a> Search<'a> {
    fn new(a: &'a Dense, b: &'a Dense, w: &'a MaskWeight) -> Self {
        let (ns, nt) = (a.n, b.n);
        let mut gain = vec![0.0; ns * nt];
        for i in 0..ns {
            let aii = a.at(i, i);
            if aii != 0 {
                for x in 0..nt {
                    gain[i * nt + x] = w.of(aii & b.at(x, x));
                }
            }
        }
        Self {
            a,
            b,
            w,
            image: vec![None; ns],
            preimage: vec![None; nt],
            gain,
            score: 0.0,
        }
    }

    #[inline]
    fn g(&self, i: usize, x: usize) -> f64 {
        self.gain[i * self.b.n + x]
    }

    /// Contribution of the two cross relations between source pair (i, k)
    /// when placed on targets (x, y).
    #[inline]
    fn pair(&self, i: usize, x: usize, k: usize, y: usize) -> f64 {
        self.w.of(self.a.at(i, k) & self.b.at(x, y)) + self.w.of(self.a.at(k, i) & self.b.at(y, x))
    }

    fn spread(&mut self, k: usize, y: usize, sign: f64) {
        let nt = self.b.n;
        for i in 0..self.a.n {
            if i == k {
                continue;
            }
            let aik = self.a.at(i, k);
            let aki = self.a.at(k, i);
            if aik == 0 && aki == 0 {
                continue;
            }
            let row = &mut self.gain[i * nt..(i + 1) * nt];
            for (x, g) in row.iter_mut().enumerate() {
                let d = self.w.of(aik & self.b.at(x, y)) + self.w.of(aki & self.b.at(y, x));
                *g += sign * d;
            }
        }
    }

    fn assign(&mut self, i: usize, x: usize) {
        self.score += self.g(i, x);
        self.image[i] = Some(x);
        self.preimage[x] = Some(i);
        self.spread(i, x, 1.0);
    }

    fn unassign(&mut self, i: usize) {
        if let Some(x) = self.image[i].take() {
            self.preimage[x] = None;
            self.spread(i, x, -1.0);
            self.score -= self.g(i, x);
        }
    }

    fn gain_of(&self, mv: Move) -> f64 {
        match mv {
            Move::Augment { src, tgt } => self.g(src, tgt),
            Move::Reassign { src, tgt } => {
                let cur = self.image[src].expect("reassign of unassigned source");
                self.g(src, tgt) - self.g(src, cur)
            }
            Move::Swap {
                first: i,
                second: j,
            } => {
                let a = self.image[i].expect("swap of unassigned source");
                let b = self.image[j].expect("swap of unassigned source");
                (self.g(i, b) - self.g(i, a)) + (self.g(j, a) - self.g(j, b))
                    - self.pair(i, b, j, b)
                    - self.pair(i, a, j, a)
                    + self.pair(i, a, j, b)
                    + self.pair(i, b, j, a)
            }
        }
    }

    fn apply(&mut self, mv: Move) {
        match mv {
            Move::Augment { src, tgt } => self.assign(src, tgt),
            Move::Reassign { src, tgt } => {
                self.unassign(src);
                self.assign(src, tgt);
            }
            Move::Swap { first, second } => {
                let a = self.image[first].unwrap();
                let b = self.image[second].unwrap();
                self.unassign(first);
                self.unassign(second);
                self.assign(first, b);
                self.assign(second, a);
            }
        }
    }

    /// Steepest-ascent move, ties broken by (source, target) of the first
    /// changed pair, then by move kind.
    fn best_move(&self) -> Option<(Move, f64)> {
        let (ns, nt) = (self.a.n, self.b.n);
        let mut best: Option<((usize, usize, u8), Move, f64)> = None;
        let mut offer = |key: (usize, usize, u8), mv: Move, gain: f64| {
            if gain <= GAIN_EPS {
                return;
            }
            let better = match &best {
                None => true,
                Some((bk, _, bg)) => {
                    gain > bg + TIE_EPS || ((gain - bg).abs() <= TIE_EPS && key < *bk)
                }
            };
            if better {
                best = Some((key, mv, gain));
            }
        };
        for i in 0..ns {
            match self.image[i] {
                None => {
                    for x in 0..nt {
                        if self.preimage[x].is_none() {
                            let mv = Move::Augment { src: i, tgt: x };
                            offer((i, x, 0), mv, self.gain_of(mv));
                        }
                    }
                }
                Some(cur) => {
                    let base = self.g(i, cur);
                    for x in 0..nt {
                        if self.preimage[x].is_none() {
                            offer(
                                (i, x, 1),
                                Move::Reassign { src: i, tgt: x },
                                self.g(i, x) - base,
                            );
                        }
                    }
                    for j in (i + 1)..ns {
                        if let Some(tj) = self.image[j] {
                            let mv = Move::Swap {
                                first: i,
                                second: j,
                            };
                            offer((i, tj, 2), mv, self.gain_of(mv));
                        }
                    }
                }
            }
        }
        best.map(|(_, mv, g)| (mv, g))
    }

    /// Climbs until no improving move remains or the cap is reached.
    /// Returns true if the cap stopped it.
    fn climb(&mut self, max_iters: usize) -> bool {
        for _ in 0..max_iters {
            match self.best_move() {
                Some((mv, g)) => {
                    let before = self.score;
                    self.apply(mv);
                    debug_assert!(
                        (self.score - (before + g)).abs() < 1e-6,
                        "incremental gain mismatch"
                    );
                }
                None => return false,
            }
        }
        self.best_move().is_some()
    }
}

fn mix_seed(seed: u64, restart: u64) -> u64 {
    let mut x = seed ^ restart.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Greedy start: pairs in descending profile overlap, skipping pairs with no
/// overlap at all.
fn greedy_start(a: &RelationalNetwork, b: &RelationalNetwork) -> Vec<(usize, usize)> {
    let pa = all_profiles(a);
    let pb = all_profiles(b);
    let mut scored = Vec::new();
    for (i, p) in pa.iter().enumerate() {
        for (x, q) in pb.iter().enumerate() {
            let o = p.overlap(q);
            if o > 0 {
                scored.push((o, i, x));
            }
        }
    }
    scored.sort_by(|l, r| r.0.cmp(&l.0).then((l.1, l.2).cmp(&(r.1, r.2))));
    let mut used_s = vec![false; a.entity_count()];
    let mut used_t = vec![false; b.entity_count()];
    let mut out = Vec::new();
    for (_, i, x) in scored {
        if !used_s[i] && !used_t[x] {
            used_s[i] = true;
            used_t[x] = true;
            out.push((i, x));
        }
    }
    out
}

fn random_start(ns: usize, nt: usize, seed: u64, restart: usize) -> Vec<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, restart as u64));
    let mut src: Vec<usize> = (0..ns).collect();
    let mut tgt: Vec<usize> = (0..nt).collect();
    src.shuffle(&mut rng);
    tgt.shuffle(&mut rng);
    src.into_iter().zip(tgt).collect()
}

fn check_pair(a: &RelationalNetwork, b: &RelationalNetwork) -> Result<(), NetworkError> {
    if a.entity_count() == 0 || b.entity_count() == 0 {
        return Err(NetworkError::EmptyNetwork);
    }
    if !a.shares_registry(b) {
        return Err(NetworkError::RegistryMismatch);
    }
    Ok(())
}

/// Best assignment found by `config.restarts` steepest-ascent climbs.
/// Deterministic in `(a, b, config)`.
pub fn match_networks(
    a: &RelationalNetwork,
    b: &RelationalNetwork,
    config: &MatchConfig,
) -> Result<MatchResult, NetworkError> {
    check_pair(a, b)?;
    config.validate().map_err(NetworkError::InvalidConfig)?;
    let da = Dense::new(a);
    let db = Dense::new(b);
    let w = MaskWeight::new(&config.weights);

    let mut best: Option<(f64, Vec<Option<usize>>, usize)> = None;
    let mut hit_cap = false;
    for restart in 0..config.restarts {
        let start = if restart == 0 {
            greedy_start(a, b)
        } else {
            random_start(a.entity_count(), b.entity_count(), config.seed, restart)
        };
        let mut s = Search::new(&da, &db, &w);
        for (i, x) in start {
            s.assign(i, x);
        }
        hit_cap |= s.climb(config.max_iters_per_restart);
        let improved = match &best {
            None => true,
            Some((score, _, _)) => s.score > score + GAIN_EPS,
        };
        if improved {
            best = Some((s.score, s.image.clone(), restart));
        }
    }
    let (_, image, best_restart_index) = best.expect("at least one restart");
    let assignment = Assignment::from_image(&image);
    let raw = relational_score(a, b, &assignment, &config.weights)?;
    Ok(MatchResult {
        assignment,
        score: MatchScore::new(raw, a.entity_count(), b.entity_count())?,
        restarts_used: config.restarts,
        best_restart_index,
        hit_iteration_cap: hit_cap,
    })
}

/// Exact optimum by enumerating every maximal injective assignment, scoring
/// each with [`relational_score`]. The first optimum in lexicographic
/// enumeration order is returned.
pub fn brute_force_match(
    a: &RelationalNetwork,
    b: &RelationalNetwork,
    weights: &Weights,
    cap: usize,
) -> Result<MatchResult, NetworkError> {
    check_pair(a, b)?;
    let (ns, nt) = (a.entity_count(), b.entity_count());
    let size = ns.min(nt);
    if size > cap {
        return Err(NetworkError::OracleCapExceeded { size, cap });
    }
    let transpose = ns > nt;
    let (rows, cols) = if transpose { (nt, ns) } else { (ns, nt) };

    let mut best: Option<(f64, Assignment)> = None;
    let mut perm = Vec::with_capacity(rows);
    let mut used = vec![false; cols];

    fn rec(
        depth: usize,
        rows: usize,
        cols: usize,
        perm: &mut Vec<usize>,
        used: &mut [bool],
        visit: &mut dyn FnMut(&[usize]) -> Result<(), NetworkError>,
    ) -> Result<(), NetworkError> {
        if depth == rows {
            return visit(perm);
        }
        for c in 0..cols {
            if !used[c] {
                used[c] = true;
                perm.push(c);
                rec(depth + 1, rows, cols, perm, used, visit)?;
                perm.pop();
                used[c] = false;
            }
        }
        Ok(())
    }

    let mut visit = |perm: &[usize]| -> Result<(), NetworkError> {
        let pairs = perm
            .iter()
            .enumerate()
            .map(|(r, &c)| if transpose { (c, r) } else { (r, c) })
            .collect();
        let asg = Assignment::new(pairs)?;
        let s = relational_score(a, b, &asg, weights)?;
        if best.as_ref().is_none_or(|(bs, _)| s > *bs) {
            best = Some((s, asg));
        }
        Ok(())
    };
    rec(0, rows, cols, &mut perm, &mut used, &mut visit)?;

    let (raw, assignment) = best.expect("non-empty enumeration");
    Ok(MatchResult {
        assignment,
        score: MatchScore::new(raw, ns, nt)?,
        restarts_used: 0,
        best_restart_index: 0,
        hit_iteration_cap: false,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedEntry {
    pub candidate: String,
    pub result: MatchResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairFailure {
    pub query: String,
    pub candidate: String,
    pub error: NetworkError,
}

/// Top-k candidates for one query, non-increasing by normalized score.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedAnalogues {
    pub query: String,
    pub ranking: Vec<RankedEntry>,
    pub failures: Vec<PairFailure>,
}

fn rank_order(l: &RankedEntry, r: &RankedEntry) -> Ordering {
    r.result
        .score
        .normalized
        .partial_cmp(&l.result.score.normalized)
        .unwrap_or(Ordering::Equal)
        .then_with(|| l.candidate.cmp(&r.candidate))
}

/// Matches every query against every candidate and keeps the `top_k` best
/// per query. Pairs run in parallel; each pair's result equals
/// [`match_networks`] on that pair, so scheduling is unobservable. A failing
/// pair is recorded and does not abort the batch.
pub fn batch_match(
    queries: &[RelationalNetwork],
    candidates: &[RelationalNetwork],
    config: &MatchConfig,
) -> Vec<RankedAnalogues> {
    let nc = candidates.len();
    let results: Vec<Result<MatchResult, NetworkError>> = (0..queries.len() * nc)
        .into_par_iter()
        .map(|k| match_networks(&queries[k / nc], &candidates[k % nc], config))
        .collect();

    queries
        .iter()
        .enumerate()
        .map(|(qi, q)| {
            let mut ranking = Vec::new();
            let mut failures = Vec::new();
            for (ci, c) in candidates.iter().enumerate() {
                match &results[qi * nc + ci] {
                    Ok(r) => ranking.push(RankedEntry {
                        candidate: c.id().to_owned(),
                        result: r.clone(),
                    }),
                    Err(e) => failures.push(PairFailure {
                        query: q.id().to_owned(),
                        candidate: c.id().to_owned(),
                        error: e.clone(),
                    }),
                }
            }
            ranking.sort_by(rank_order);
            ranking.truncate(config.top_k);
            RankedAnalogues {
                query: q.id().to_owned(),
                ranking,
                failures,
            }
        })
        .collect()
}

fn signature_multiset(net: &RelationalNetwork) -> Vec<u64> {
    let mut v: Vec<u64> = all_profiles(net).iter().map(signature_hash).collect();
    v.sort_unstable();
    v
}

fn multiset_intersection(a: &[u64], b: &[u64]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Indices of the `budget` candidates whose entity signature multisets
/// overlap the query's most. Ties go to the candidate with fewer unmatched
/// signatures, then to the lower index. The result is in rank order.
pub fn prefilter_candidates(
    query: &RelationalNetwork,
    candidates: &[RelationalNetwork],
    budget: usize,
) -> Vec<usize> {
    let qs = signature_multiset(query);
    let mut ranked: Vec<(usize, usize, usize)> = candidates
        .iter()
        .enumerate()
        .map(|(idx, c)| {
            let cs = signature_multiset(c);
            let common = multiset_intersection(&qs, &cs);
            (common, cs.len() - common, idx)
        })
        .collect();
    ranked.sort_by(|l, r| r.0.cmp(&l.0).then(l.1.cmp(&r.1)).then(l.2.cmp(&r.2)));
    ranked
        .into_iter()
        .take(budget.max(1))
        .map(|t| t.2)
        .collect()
}

/// One line of the results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultRecord {
    pub query: String,
    pub ranking: Vec<ResultEntryRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultEntryRecord {
    pub candidate: String,
    pub raw: f64,
    pub normalized: f64,
    pub assignment: Vec<(usize, usize)>,
}

impl From<&RankedAnalogues> for ResultRecord {
    fn from(r: &RankedAnalogues) -> Self {
        Self {
            query: r.query.clone(),
            ranking: r
                .ranking
                .iter()
                .map(|e| ResultEntryRecord {
                    candidate: e.candidate.clone(),
                    raw: e.result.score.raw,
                    normalized: e.result.score.normalized,
                    assignment: e.result.assignment.pairs().to_vec(),
                })
                .collect(),
        }
    }
}
