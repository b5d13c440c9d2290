//! Seeded random networks for tests, benchmarks and the scale check.

use std::sync::Arc;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::relnet::{Entity, Relation, RelationTypeId, RelationalNetwork, TypeRegistry};

/// Registry with labels `t0 .. t{n-1}`.
pub fn synthetic_registry(types: usize) -> Arc<TypeRegistry> {
    Arc::new(TypeRegistry::new((0..types).map(|i| format!("t{i}"))).expect("at most 64 types"))
}

fn entities(id: &str, n: usize) -> Vec<Entity> {
    (0..n)
        .map(|i| Entity::new(format!("{id}.e{i}"), None))
        .collect()
}

/// Each ordered pair of distinct entities carries a relation with
/// probability `density`; its type is drawn uniformly.
pub fn random_network<R: Rng>(
    id: &str,
    n: usize,
    registry: &Arc<TypeRegistry>,
    density: f64,
    rng: &mut R,
) -> RelationalNetwork {
    let k = registry.len();
    let mut rels = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.gen_bool(density) {
                rels.push(Relation::new(i, j, RelationTypeId(rng.gen_range(0..k))));
            }
        }
    }
    RelationalNetwork::build(id, entities(id, n), rels, Arc::clone(registry))
        .expect("indices in range")
}

/// Exactly `edges` distinct relations (capped at `n*(n-1)*types`), sampled
/// without replacement from the off-diagonal triples.
pub fn random_network_with_edges<R: Rng>(
    id: &str,
    n: usize,
    edges: usize,
    registry: &Arc<TypeRegistry>,
    rng: &mut R,
) -> RelationalNetwork {
    let k = registry.len();
    let slots = n * n.saturating_sub(1) * k;
    let rels: Vec<Relation> = sample(rng, slots, edges.min(slots))
        .into_iter()
        .map(|s| {
            let (pair, rel) = (s / k, s % k);
            let (i, off) = (pair / (n - 1), pair % (n - 1));
            let j = if off >= i { off + 1 } else { off };
            Relation::new(i, j, RelationTypeId(rel))
        })
        .collect();
    RelationalNetwork::build(id, entities(id, n), rels, Arc::clone(registry))
        .expect("indices in range")
}

/// `queries` and `candidates` networks of `n` entities and `edges`
/// relations each over a shared `types`-slot registry.
pub fn synthetic_corpus(
    seed: u64,
    queries: usize,
    candidates: usize,
    n: usize,
    edges: usize,
    types: usize,
) -> (Vec<RelationalNetwork>, Vec<RelationalNetwork>) {
    let reg = synthetic_registry(types);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = (0..queries)
        .map(|i| random_network_with_edges(&format!("q{i}"), n, edges, &reg, &mut rng))
        .collect();
    let c = (0..candidates)
        .map(|i| random_network_with_edges(&format!("c{i}"), n, edges, &reg, &mut rng))
        .collect();
    (q, c)
}
