//! Domain-independent relational networks.
//!
//! A network is a list of entities plus a set of typed, directed relations
//! between them. The matcher only ever sees this shape; chess positions and
//! proof states reach it through their extractors.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::NetworkError;

/// Maximum number of relation types a registry may hold (relation sets are
/// packed into 64-bit masks by the matcher).
pub const MAX_RELATION_TYPES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RelationTypeId(pub usize);

impl fmt::Display for RelationTypeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Ordered set of relation type labels. Ids are positions, so they are dense
/// in `0..len()`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypeRegistry {
    labels: Vec<String>,
}

impl TypeRegistry {
    pub fn new<I, S>(labels: I) -> Result<Self, NetworkError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() > MAX_RELATION_TYPES {
            return Err(NetworkError::RegistryTooLarge(labels.len()));
        }
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(NetworkError::DuplicateLabel(label.clone()));
            }
        }
        Ok(Self { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn id(&self, label: &str) -> Option<RelationTypeId> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(RelationTypeId)
    }

    pub fn label(&self, id: RelationTypeId) -> Option<&str> {
        self.labels.get(id.0).map(String::as_str)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn contains(&self, id: RelationTypeId) -> bool {
        id.0 < self.labels.len()
    }
}

/// Opaque entity descriptor. The kind tag is informational; scoring ignores it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entity {
    pub label: String,
    #[serde(default)]
    pub kind: Option<String>,
}

impl Entity {
    pub fn new(label: impl Into<String>, kind: Option<String>) -> Self {
        Self {
            label: label.into(),
            kind,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Relation {
    pub src: usize,
    pub dst: usize,
    pub rel: RelationTypeId,
}

impl Relation {
    pub fn new(src: usize, dst: usize, rel: RelationTypeId) -> Self {
        Self { src, dst, rel }
    }
}

/// Entities plus a deduplicated, sorted set of typed directed relations.
/// Immutable once built.
#[derive(Debug, Clone)]
pub struct RelationalNetwork {
    id: String,
    entities: Vec<Entity>,
    relations: Vec<Relation>,
    registry: Arc<TypeRegistry>,
}

impl RelationalNetwork {
    /// Builds a network, checking every index and type id and collapsing
    /// duplicate triples. Entity order is preserved.
    pub fn build<I>(
        id: impl Into<String>,
        entities: Vec<Entity>,
        relations: I,
        registry: Arc<TypeRegistry>,
    ) -> Result<Self, NetworkError>
    where
        I: IntoIterator<Item = Relation>,
    {
        let n = entities.len();
        let mut rels = Vec::new();
        for r in relations {
            if r.src >= n || r.dst >= n {
                return Err(NetworkError::IndexOutOfRange {
                    src: r.src,
                    dst: r.dst,
                    rel: r.rel.0,
                    entities: n,
                });
            }
            if !registry.contains(r.rel) {
                return Err(NetworkError::UnknownRelationType(r.rel.0));
            }
            rels.push(r);
        }
        rels.sort_unstable();
        rels.dedup();
        Ok(Self {
            id: id.into(),
            entities,
            relations: rels,
            registry,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn entities(&self) -> &[Entity] {
        &self.entities
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn registry(&self) -> &Arc<TypeRegistry> {
        &self.registry
    }

    pub fn has_relation(&self, src: usize, dst: usize, rel: RelationTypeId) -> bool {
        self.relations
            .binary_search(&Relation::new(src, dst, rel))
            .is_ok()
    }

    pub fn entity_index(&self, label: &str) -> Option<usize> {
        self.entities.iter().position(|e| e.label == label)
    }

    /// Relations of one type, in sorted order.
    pub fn relations_of(&self, rel: RelationTypeId) -> impl Iterator<Item = &Relation> {
        self.relations.iter().filter(move |r| r.rel == rel)
    }

    pub fn shares_registry(&self, other: &RelationalNetwork) -> bool {
        Arc::ptr_eq(&self.registry, &other.registry) || *self.registry == *other.registry
    }

    /// Serializable form for the line-delimited interchange file.
    pub fn to_record(&self) -> NetworkRecord {
        NetworkRecord {
            id: self.id.clone(),
            entities: self
                .entities
                .iter()
                .map(|e| EntityRecord {
                    label: e.label.clone(),
                    kind: e.kind.clone().unwrap_or_default(),
                })
                .collect(),
            relations: self
                .relations
                .iter()
                .map(|r| {
                    (
                        r.src,
                        r.dst,
                        self.registry.label(r.rel).unwrap_or_default().to_owned(),
                    )
                })
                .collect(),
            types: self.registry.labels().to_vec(),
        }
    }
}

/// One network per line:
/// `{"id", "entities": [{"label", "kind"}], "relations": [[src, dst, "type"]], "types": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkRecord {
    pub id: String,
    pub entities: Vec<EntityRecord>,
    pub relations: Vec<(usize, usize, String)>,
    pub types: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityRecord {
    pub label: String,
    #[serde(default)]
    pub kind: String,
}

impl NetworkRecord {
    /// Converts to a network. `intern` lets a reader share one registry
    /// across records whose type lists agree.
    pub fn into_network(
        self,
        intern: &mut Vec<Arc<TypeRegistry>>,
    ) -> Result<RelationalNetwork, NetworkError> {
        let candidate = TypeRegistry::new(self.types)?;
        let registry = match intern.iter().find(|r| ***r == candidate) {
            Some(r) => Arc::clone(r),
            None => {
                let r = Arc::new(candidate);
                intern.push(Arc::clone(&r));
                r
            }
        };
        let mut relations = Vec::with_capacity(self.relations.len());
        for (src, dst, label) in &self.relations {
            let rel = registry
                .id(label)
                .ok_or_else(|| NetworkError::UnknownRelationLabel(label.clone()))?;
            relations.push(Relation::new(*src, *dst, rel));
        }
        let entities = self
            .entities
            .into_iter()
            .map(|e| Entity::new(e.label, (!e.kind.is_empty()).then_some(e.kind)))
            .collect();
        RelationalNetwork::build(self.id, entities, relations, registry)
    }
}

/// Partial injective correspondence between source and target entities.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Assignment {
    pairs: Vec<(usize, usize)>,
}

impl Assignment {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Fails if a source or a target index appears twice.
    pub fn new(mut pairs: Vec<(usize, usize)>) -> Result<Self, NetworkError> {
        pairs.sort_unstable();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(NetworkError::InvalidAssignment(format!(
                    "source {} assigned twice",
                    w[0].0
                )));
            }
        }
        let mut targets: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        targets.sort_unstable();
        for w in targets.windows(2) {
            if w[0] == w[1] {
                return Err(NetworkError::InvalidAssignment(format!(
                    "target {} assigned twice",
                    w[0]
                )));
            }
        }
        Ok(Self { pairs })
    }

    /// Builds from a source-indexed image vector (`None` = unassigned).
    /// Injectivity of the image is the caller's responsibility.
    pub(crate) fn from_image(image: &[Option<usize>]) -> Self {
        Self {
            pairs: image
                .iter()
                .enumerate()
                .filter_map(|(i, t)| t.map(|t| (i, t)))
                .collect(),
        }
    }

    /// Pairs sorted by source index.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn target_of(&self, source: usize) -> Option<usize> {
        self.pairs
            .binary_search_by_key(&source, |p| p.0)
            .ok()
            .map(|i| self.pairs[i].1)
    }

    pub fn inverse(&self) -> Assignment {
        let mut pairs: Vec<_> = self.pairs.iter().map(|&(s, t)| (t, s)).collect();
        pairs.sort_unstable();
        Assignment { pairs }
    }

    pub fn validate(&self, n_source: usize, n_target: usize) -> Result<(), NetworkError> {
        for &(s, t) in &self.pairs {
            if s >= n_source || t >= n_target {
                return Err(NetworkError::InvalidAssignment(format!(
                    "pair ({s}, {t}) out of range for {n_source}x{n_target} networks"
                )));
            }
        }
        Ok(())
    }

    /// Source-indexed image vector.
    pub fn image(&self, n_source: usize) -> Vec<Option<usize>> {
        let mut image = vec![None; n_source];
        for &(s, t) in &self.pairs {
            image[s] = Some(t);
        }
        image
    }
}

/// Per-relation-type weights. Types without an explicit entry weigh 1.0.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Weights {
    per_type: Vec<f64>,
}

impl Weights {
    pub fn unit() -> Self {
        Self::default()
    }

    pub fn new(per_type: Vec<f64>) -> Result<Self, NetworkError> {
        if let Some(w) = per_type.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(NetworkError::InvalidWeights(format!(
                "weight {w} is not a positive finite real"
            )));
        }
        Ok(Self { per_type })
    }

    /// Weights keyed by relation type label; unnamed types stay at 1.0.
    pub fn from_labels(
        registry: &TypeRegistry,
        by_label: &[(String, f64)],
    ) -> Result<Self, NetworkError> {
        let mut per_type = vec![1.0; registry.len()];
        for (label, w) in by_label {
            let id = registry
                .id(label)
                .ok_or_else(|| NetworkError::UnknownRelationLabel(label.clone()))?;
            per_type[id.0] = *w;
        }
        Self::new(per_type)
    }

    pub fn weight(&self, rel: RelationTypeId) -> f64 {
        self.per_type.get(rel.0).copied().unwrap_or(1.0)
    }

    pub fn is_unit(&self) -> bool {
        self.per_type.iter().all(|w| *w == 1.0)
    }
}

/// Weighted count of source relations preserved under `asg`: a triple
/// `(i, j, r)` of `a` contributes `weights[r]` when both ends are assigned and
/// `(asg(i), asg(j), r)` is a relation of `b`.
pub fn relational_score(
    a: &RelationalNetwork,
    b: &RelationalNetwork,
    asg: &Assignment,
    weights: &Weights,
) -> Result<f64, NetworkError> {
    if !a.shares_registry(b) {
        return Err(NetworkError::RegistryMismatch);
    }
    asg.validate(a.entity_count(), b.entity_count())?;
    let image = asg.image(a.entity_count());
    let mut score = 0.0;
    for r in a.relations() {
        if let (Some(x), Some(y)) = (image[r.src], image[r.dst]) {
            if b.has_relation(x, y, r.rel) {
                score += weights.weight(r.rel);
            }
        }
    }
    Ok(score)
}

/// `raw / sqrt(n_source * n_target)`.
pub fn normalize_score(raw: f64, n_source: usize, n_target: usize) -> Result<f64, NetworkError> {
    if n_source == 0 || n_target == 0 {
        return Err(NetworkError::EmptyNetwork);
    }
    Ok(raw / ((n_source as f64) * (n_target as f64)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchScore {
    pub raw: f64,
    pub normalized: f64,
    pub n_source: usize,
    pub n_target: usize,
}

impl MatchScore {
    pub fn new(raw: f64, n_source: usize, n_target: usize) -> Result<Self, NetworkError> {
        Ok(Self {
            raw,
            normalized: normalize_score(raw, n_source, n_target)?,
            n_source,
            n_target,
        })
    }
}

/// Per-type (out-degree, in-degree) of one entity. Only non-zero entries are
/// stored, so equal profiles compare equal regardless of registry size.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct RelationProfile {
    counts: BTreeMap<RelationTypeId, (u32, u32)>,
}

impl RelationProfile {
    pub fn from_counts<I>(counts: I) -> Self
    where
        I: IntoIterator<Item = (RelationTypeId, (u32, u32))>,
    {
        Self {
            counts: counts
                .into_iter()
                .filter(|(_, (o, i))| *o > 0 || *i > 0)
                .collect(),
        }
    }

    /// `(out, in)` for one type; zero when absent.
    pub fn degrees(&self, rel: RelationTypeId) -> (u32, u32) {
        self.counts.get(&rel).copied().unwrap_or((0, 0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (RelationTypeId, (u32, u32))> + '_ {
        self.counts.iter().map(|(k, v)| (*k, *v))
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Σ over types of min(out) + min(in) against another profile.
    pub fn overlap(&self, other: &RelationProfile) -> u32 {
        self.counts
            .iter()
            .map(|(k, (o, i))| {
                let (o2, i2) = other.degrees(*k);
                (*o).min(o2) + (*i).min(i2)
            })
            .sum()
    }

    fn bump(&mut self, rel: RelationTypeId, out: bool) {
        let e = self.counts.entry(rel).or_insert((0, 0));
        if out {
            e.0 += 1;
        } else {
            e.1 += 1;
        }
    }
}

pub fn relation_profile(
    network: &RelationalNetwork,
    entity: usize,
) -> Result<RelationProfile, NetworkError> {
    if entity >= network.entity_count() {
        return Err(NetworkError::EntityOutOfRange {
            index: entity,
            entities: network.entity_count(),
        });
    }
    let mut p = RelationProfile::default();
    for r in network.relations() {
        if r.src == entity {
            p.bump(r.rel, true);
        }
        if r.dst == entity {
            p.bump(r.rel, false);
        }
    }
    Ok(p)
}

/// Profiles of every entity, in entity order.
pub fn all_profiles(network: &RelationalNetwork) -> Vec<RelationProfile> {
    let mut out = vec![RelationProfile::default(); network.entity_count()];
    for r in network.relations() {
        out[r.src].bump(r.rel, true);
        out[r.dst].bump(r.rel, false);
    }
    out
}

/// Signature of the all-zero profile.
pub const EMPTY_PROFILE_SIGNATURE: u64 = 0xcbf2_9ce4_8422_2325;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// 64-bit fingerprint of a profile. Each non-zero `(type, out, in)` entry is
/// mixed independently and the results are summed, so the value does not
/// depend on iteration order.
pub fn signature_hash(profile: &RelationProfile) -> u64 {
    profile
        .iter()
        .fold(EMPTY_PROFILE_SIGNATURE, |acc, (rel, (o, i))| {
            let key = ((rel.0 as u64) << 48) ^ ((o as u64) << 24) ^ (i as u64);
            acc.wrapping_add(splitmix64(splitmix64(key) ^ rel.0 as u64))
        })
}
