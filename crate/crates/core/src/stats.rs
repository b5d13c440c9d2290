//! Area/schema frequency tables, z-scores, transfer candidates and pair
//! potential.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::StatsError;
use crate::lean::{
    derive_area, parse_schema, AreaId, Classified, CorpusEntry, KnownHeads, TacticSchema,
};

/// Tolerance applied to the inclusive z-score boundaries.
pub const BOUNDARY_TOLERANCE: f64 = 1e-9;

/// Why corpus entries were left out of the counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExclusionTallies {
    pub no_source_file: usize,
    pub non_area_path: usize,
    pub unparseable: usize,
    pub shortcut: usize,
}

impl ExclusionTallies {
    pub fn total(&self) -> usize {
        self.no_source_file + self.non_area_path + self.unparseable + self.shortcut
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AreaStats {
    counts: BTreeMap<AreaId, BTreeMap<TacticSchema, u64>>,
    totals: BTreeMap<AreaId, u64>,
    pub included: usize,
    pub exclusions: ExclusionTallies,
}

impl AreaStats {
    /// Builds a table directly from `(area, schema, count)` triples.
    pub fn from_counts<I>(triples: I) -> Self
    where
        I: IntoIterator<Item = (AreaId, TacticSchema, u64)>,
    {
        let mut stats = AreaStats::default();
        for (area, schema, n) in triples {
            stats.add(area, schema, n);
        }
        stats
    }

    fn add(&mut self, area: AreaId, schema: TacticSchema, n: u64) {
        if n == 0 {
            return;
        }
        *self.totals.entry(area.clone()).or_default() += n;
        *self
            .counts
            .entry(area)
            .or_default()
            .entry(schema)
            .or_default() += n;
        self.included += n as usize;
    }

    pub fn areas(&self) -> impl Iterator<Item = &AreaId> {
        self.totals.keys()
    }

    pub fn area_count(&self) -> usize {
        self.totals.len()
    }

    pub fn schemas(&self) -> BTreeSet<&TacticSchema> {
        self.counts.values().flat_map(|m| m.keys()).collect()
    }

    pub fn distinct_schema_count(&self) -> usize {
        self.schemas().len()
    }

    pub fn total(&self, area: &AreaId) -> u64 {
        self.totals.get(area).copied().unwrap_or(0)
    }

    pub fn count(&self, area: &AreaId, schema: &TacticSchema) -> u64 {
        self.counts
            .get(area)
            .and_then(|m| m.get(schema))
            .copied()
            .unwrap_or(0)
    }

    /// `count / total` for the area, 0 for an area with no tactics.
    pub fn freq(&self, area: &AreaId, schema: &TacticSchema) -> f64 {
        match self.total(area) {
            0 => 0.0,
            t => self.count(area, schema) as f64 / t as f64,
        }
    }

    pub fn schemas_in(&self, area: &AreaId) -> impl Iterator<Item = (&TacticSchema, u64)> {
        self.counts
            .get(area)
            .into_iter()
            .flat_map(|m| m.iter().map(|(s, n)| (s, *n)))
    }
}

/// Counts `(area, schema)` increments. Every entry lands either in the
/// counts or in exactly one exclusion tally.
pub fn aggregate<'a, I>(entries: I, known: &KnownHeads) -> AreaStats
where
    I: IntoIterator<Item = &'a CorpusEntry>,
{
    let mut stats = AreaStats::default();
    for e in entries {
        let Some(path) = &e.source_file else {
            stats.exclusions.no_source_file += 1;
            continue;
        };
        let Ok(area) = derive_area(path) else {
            stats.exclusions.non_area_path += 1;
            continue;
        };
        match parse_schema(&e.tactic, known) {
            Classified::Schema(s) => stats.add(area, s, 1),
            Classified::Shortcut(_) => stats.exclusions.shortcut += 1,
            Classified::Unparseable => stats.exclusions.unparseable += 1,
        }
    }
    stats
}

/// Per-schema statistics over the area universe. Vectors are indexed in
/// universe order.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemaColumn {
    pub counts: Vec<u64>,
    pub freqs: Vec<f64>,
    pub z: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    pub areas_present: usize,
    /// All frequencies equal; every z is 0.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZTable {
    universe: Vec<AreaId>,
    columns: BTreeMap<TacticSchema, SchemaColumn>,
}

impl ZTable {
    pub fn universe(&self) -> &[AreaId] {
        &self.universe
    }

    pub fn area_index(&self, area: &AreaId) -> Option<usize> {
        self.universe.iter().position(|a| a == area)
    }

    pub fn columns(&self) -> impl Iterator<Item = (&TacticSchema, &SchemaColumn)> {
        self.columns.iter()
    }

    pub fn column(&self, schema: &TacticSchema) -> Option<&SchemaColumn> {
        self.columns.get(schema)
    }

    pub fn z(&self, area: &AreaId, schema: &TacticSchema) -> Option<f64> {
        Some(self.column(schema)?.z[self.area_index(area)?])
    }
}

/// Z-scores with population standard deviation over the full universe;
/// areas where a schema never occurs contribute frequency 0.
pub fn zscore_table(stats: &AreaStats, universe: &[AreaId]) -> Result<ZTable, StatsError> {
    let mut uni: Vec<AreaId> = Vec::with_capacity(universe.len());
    for a in universe {
        if !uni.contains(a) {
            uni.push(a.clone());
        }
    }
    if uni.is_empty() {
        return Err(StatsError::EmptyUniverse);
    }
    if let Some(missing) = stats.areas().find(|a| !uni.contains(a)) {
        return Err(StatsError::AreaNotInUniverse(missing.to_string()));
    }
    let n = uni.len() as f64;
    let columns = stats
        .schemas()
        .into_par_iter()
        .map(|schema| {
            let counts: Vec<u64> = uni.iter().map(|a| stats.count(a, schema)).collect();
            let freqs: Vec<f64> = uni.iter().map(|a| stats.freq(a, schema)).collect();
            let mean = freqs.iter().sum::<f64>() / n;
            let var = freqs.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / n;
            let std = var.sqrt();
            let degenerate = freqs.iter().all(|f| *f == freqs[0]) || std == 0.0;
            let z = if degenerate {
                vec![0.0; freqs.len()]
            } else {
                freqs.iter().map(|f| (f - mean) / std).collect()
            };
            let areas_present = counts.iter().filter(|c| **c > 0).count();
            let col = SchemaColumn {
                counts,
                freqs,
                z,
                mean,
                std: if degenerate { 0.0 } else { std },
                areas_present,
                degenerate,
            };
            (schema.clone(), col)
        })
        .collect();
    Ok(ZTable {
        universe: uni,
        columns,
    })
}

/// Thresholds and exclusion lists for candidate selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferFilters {
    pub source_z: f64,
    pub target_z: f64,
    pub min_areas_present: usize,
    pub excluded_sources: Vec<String>,
    pub excluded_targets: Vec<String>,
    /// Heads never reported, on top of shortcut classification.
    pub excluded_heads: Vec<String>,
    pub top_gaps: usize,
}

impl Default for TransferFilters {
    fn default() -> Self {
        TransferFilters {
            source_z: 2.0,
            target_z: -1.0,
            min_areas_present: 3,
            excluded_sources: vec!["Mathlib.CategoryTheory".into()],
            excluded_targets: vec![
                "Mathlib.Tactic".into(),
                "Mathlib.Control".into(),
                "Mathlib.Logic".into(),
            ],
            excluded_heads: Vec::new(),
            top_gaps: 10,
        }
    }
}

impl TransferFilters {
    /// The z-score and presence rule with inclusive boundaries.
    pub fn admits(
        &self,
        z_source: f64,
        z_target: f64,
        target_absent: bool,
        areas_present: usize,
    ) -> bool {
        areas_present >= self.min_areas_present
            && z_source >= self.source_z - BOUNDARY_TOLERANCE
            && (target_absent || z_target <= self.target_z + BOUNDARY_TOLERANCE)
    }

    fn check_pair(
        &self,
        table: &ZTable,
        source: &AreaId,
        target: &AreaId,
    ) -> Result<(usize, usize), StatsError> {
        if source == target {
            return Err(StatsError::SameArea(source.to_string()));
        }
        if self.excluded_sources.iter().any(|a| a == source.as_str()) {
            return Err(StatsError::ExcludedSource(source.to_string()));
        }
        if self.excluded_targets.iter().any(|a| a == target.as_str()) {
            return Err(StatsError::ExcludedTarget(target.to_string()));
        }
        let s = table
            .area_index(source)
            .ok_or_else(|| StatsError::UnknownArea(source.to_string()))?;
        let t = table
            .area_index(target)
            .ok_or_else(|| StatsError::UnknownArea(target.to_string()))?;
        Ok((s, t))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferCandidate {
    pub schema: TacticSchema,
    pub source: AreaId,
    pub target: AreaId,
    pub z_source: f64,
    /// z of the target computed with its frequency, 0 when absent.
    pub z_target: f64,
    pub target_absent: bool,
    pub gap: f64,
    pub source_count: u64,
}

fn by_gap(a: &TransferCandidate, b: &TransferCandidate) -> std::cmp::Ordering {
    b.gap
        .total_cmp(&a.gap)
        .then_with(|| a.schema.cmp(&b.schema))
}

fn candidates_at(
    table: &ZTable,
    filters: &TransferFilters,
    s: usize,
    t: usize,
) -> Vec<TransferCandidate> {
    let mut out: Vec<TransferCandidate> = table
        .columns
        .iter()
        .filter(|(schema, col)| !col.degenerate && !filters.excluded_heads.contains(&schema.head))
        .filter_map(|(schema, col)| {
            let absent = col.counts[t] == 0;
            filters
                .admits(col.z[s], col.z[t], absent, col.areas_present)
                .then(|| TransferCandidate {
                    schema: schema.clone(),
                    source: table.universe[s].clone(),
                    target: table.universe[t].clone(),
                    z_source: col.z[s],
                    z_target: col.z[t],
                    target_absent: absent,
                    gap: col.z[s] - col.z[t],
                    source_count: col.counts[s],
                })
        })
        .collect();
    out.sort_by(by_gap);
    out
}

/// Candidates for one ordered area pair, sorted by gap descending.
pub fn transfer_candidates(
    table: &ZTable,
    source: &AreaId,
    target: &AreaId,
    filters: &TransferFilters,
) -> Result<Vec<TransferCandidate>, StatsError> {
    let (s, t) = filters.check_pair(table, source, target)?;
    Ok(candidates_at(table, filters, s, t))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairScore {
    pub source: AreaId,
    pub target: AreaId,
    pub potential: f64,
    pub contributors: Vec<TransferCandidate>,
}

/// `Σ gap · ln(1 + source_count)` over the largest `top_gaps` gaps.
pub fn potential_of(candidates: &[TransferCandidate], top_gaps: usize) -> f64 {
    candidates
        .iter()
        .take(top_gaps)
        .map(|c| c.gap * (c.source_count as f64).ln_1p())
        .sum()
}

/// Scores every admissible ordered pair and ranks them by potential.
pub fn pair_potential(table: &ZTable, filters: &TransferFilters) -> Vec<PairScore> {
    let n = table.universe.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|s| (0..n).map(move |t| (s, t)))
        .filter(|&(s, t)| {
            filters
                .check_pair(table, &table.universe[s], &table.universe[t])
                .is_ok()
        })
        .collect();
    let mut scores: Vec<PairScore> = pairs
        .into_par_iter()
        .map(|(s, t)| {
            let mut cands = candidates_at(table, filters, s, t);
            cands.truncate(filters.top_gaps);
            PairScore {
                source: table.universe[s].clone(),
                target: table.universe[t].clone(),
                potential: potential_of(&cands, filters.top_gaps),
                contributors: cands,
            }
        })
        .collect();
    scores.sort_by(|a, b| {
        b.potential
            .total_cmp(&a.potential)
            .then_with(|| a.source.cmp(&b.source))
            .then_with(|| a.target.cmp(&b.target))
    });
    scores
}

fn fmt_f(x: f64) -> String {
    let s = format!("{x:.9}");
    if s == "-0.000000000" {
        "0.000000000".to_owned()
    } else {
        s
    }
}

/// Census rows: schema key, total count, areas present.
pub fn write_census<W: Write>(out: &mut W, stats: &AreaStats) -> io::Result<()> {
    let ex = &stats.exclusions;
    writeln!(out, "# included\t{}", stats.included)?;
    writeln!(out, "# excluded_no_source_file\t{}", ex.no_source_file)?;
    writeln!(out, "# excluded_non_area_path\t{}", ex.non_area_path)?;
    writeln!(out, "# excluded_unparseable\t{}", ex.unparseable)?;
    writeln!(out, "# excluded_shortcut\t{}", ex.shortcut)?;
    writeln!(out, "# distinct_schemas\t{}", stats.distinct_schema_count())?;
    writeln!(out, "# areas\t{}", stats.area_count())?;
    writeln!(out, "schema\tcount\tareas_present")?;
    let mut rows: BTreeMap<&TacticSchema, (u64, usize)> = BTreeMap::new();
    for area in stats.areas() {
        for (schema, n) in stats.schemas_in(area) {
            let r = rows.entry(schema).or_default();
            r.0 += n;
            r.1 += 1;
        }
    }
    let mut rows: Vec<_> = rows.into_iter().collect();
    rows.sort_by(|a, b| b.1 .0.cmp(&a.1 .0).then_with(|| a.0.cmp(b.0)));
    for (schema, (n, present)) in rows {
        writeln!(out, "{}\t{n}\t{present}", schema.key())?;
    }
    Ok(())
}

pub fn write_ztable<W: Write>(out: &mut W, table: &ZTable) -> io::Result<()> {
    writeln!(out, "area\tschema\tcount\tfreq\tz")?;
    for (schema, col) in table.columns() {
        let key = schema.key();
        for (i, area) in table.universe().iter().enumerate() {
            writeln!(
                out,
                "{area}\t{key}\t{}\t{}\t{}",
                col.counts[i],
                fmt_f(col.freqs[i]),
                fmt_f(col.z[i])
            )?;
        }
    }
    Ok(())
}

pub fn write_candidates<W: Write>(out: &mut W, cands: &[TransferCandidate]) -> io::Result<()> {
    writeln!(
        out,
        "schema\tsource\ttarget\tz_source\tz_target\tgap\tsource_count"
    )?;
    for c in cands {
        let zt = if c.target_absent {
            "ABSENT".to_owned()
        } else {
            fmt_f(c.z_target)
        };
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{zt}\t{}\t{}",
            c.schema.key(),
            c.source,
            c.target,
            fmt_f(c.z_source),
            fmt_f(c.gap),
            c.source_count
        )?;
    }
    Ok(())
}

pub fn write_pairs<W: Write>(out: &mut W, pairs: &[PairScore]) -> io::Result<()> {
    writeln!(out, "source\ttarget\tpotential\tcandidates\ttop_schemas")?;
    for p in pairs {
        let keys: Vec<String> = p.contributors.iter().map(|c| c.schema.key()).collect();
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            p.source,
            p.target,
            fmt_f(p.potential),
            p.contributors.len(),
            keys.join(",")
        )?;
    }
    Ok(())
}
