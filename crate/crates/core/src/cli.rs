//! Command-line driver. [`run`] returns the process exit status:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | I/O failure (unreadable input, unwritable output) |
//! | 2 | usage error (bad flags, bad config, inadmissible areas) |
//! | 3 | data error (malformed records, no valid entries) |
//! | 4 | a battery case missed a key mapping |
//!
//! Every report file starts with one `#` line carrying a timestamp; the rest
//! of the file depends only on the inputs and the seed.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::Command as Process;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use crate::chess::{default_battery, run_battery, BatteryReport, CaseOutcome};
use crate::error::{FormatError, StatsError};
use crate::files::{read_battery, read_corpus, read_networks};
use crate::lean::{AreaId, KnownHeads, TacticSchema};
use crate::matcher::{batch_match, prefilter_candidates, MatchConfig, ResultRecord};
use crate::relnet::{RelationalNetwork, Weights};
use crate::stats::{
    aggregate, pair_potential, transfer_candidates, write_candidates, write_census, write_pairs,
    write_ztable, zscore_table, AreaStats, TransferFilters,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_BATTERY_MISS: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Data(String),
    BatteryMiss { satisfied: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
            CliError::Data(_) => EXIT_DATA,
            CliError::BatteryMiss { .. } => EXIT_BATTERY_MISS,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::BatteryMiss { satisfied, total } => {
                write!(
                    f,
                    "battery missed key mappings: {satisfied}/{total} satisfied"
                )
            }
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Io { .. } => CliError::Io(e.to_string()),
            FormatError::Record { .. } => CliError::Data(e.to_string()),
        }
    }
}

impl From<StatsError> for CliError {
    fn from(e: StatsError) -> Self {
        match e {
            StatsError::AreaNotInUniverse(_) | StatsError::EmptyUniverse => {
                CliError::Data(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

#[derive(Debug, Parser)]
#[command(
    name = "relanalogy",
    version,
    about = "Relational analogy matching and tactic schema statistics"
)]
pub struct Cli {
    /// Corpus file (line-delimited JSON records with id, tactic, source_file, state).
    #[arg(long, global = true)]
    pub corpus: Option<PathBuf>,
    /// Directory for report files.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Flat `key = value` configuration file; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Schema census with exclusion tallies.
    Schemas,
    /// Per-(area, schema) counts, frequencies and z-scores.
    Zscores,
    /// Transfer candidates from one area to another.
    Candidates {
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
    },
    /// Area pairs ranked by pair potential.
    Pairs,
    /// Rank target networks for each query network.
    Match(MatchArgs),
    /// Run a chess battery file (the shipped battery by default).
    Battery {
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Write a why-report skeleton for one transfer attempt.
    Whyreport(WhyArgs),
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    #[arg(long)]
    pub queries: PathBuf,
    #[arg(long)]
    pub targets: PathBuf,
    #[arg(long)]
    pub top_k: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Match each query only against this many prefiltered targets.
    #[arg(long)]
    pub prefilter: Option<usize>,
}

#[derive(Debug, Args)]
pub struct WhyArgs {
    /// Schema key `head|arity|with|lemma`.
    #[arg(long)]
    pub schema: String,
    #[arg(long)]
    pub source_id: String,
    #[arg(long)]
    pub target_id: String,
    /// Overwrite an existing report.
    #[arg(long)]
    pub force: bool,
    /// Shell command run after writing; its exit status is recorded.
    #[arg(long)]
    pub verify_cmd: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Tsv,
    Jsonl,
}

/// Settings after merging the config file and flags. Paths are absolute.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub corpus: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub universe: Option<Vec<AreaId>>,
    pub filters: TransferFilters,
    pub restarts: usize,
    pub max_iters_per_restart: usize,
    pub seed: u64,
    pub top_k: usize,
    pub weights: Vec<(String, f64)>,
    pub format: ReportFormat,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let m = MatchConfig::default();
        PipelineConfig {
            corpus: None,
            out_dir: PathBuf::from("."),
            universe: None,
            filters: TransferFilters::default(),
            restarts: m.restarts,
            max_iters_per_restart: m.max_iters_per_restart,
            seed: m.seed,
            top_k: m.top_k,
            weights: Vec::new(),
            format: ReportFormat::Tsv,
        }
    }
}

fn list(v: &str) -> Vec<String> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_owned)
        .collect()
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("{key}: cannot parse {v:?}"))
}

impl PipelineConfig {
    /// Applies a flat `key = value` text. `#` starts a comment line; relative
    /// paths resolve against `base`.
    pub fn apply_text(&mut self, text: &str, base: &Path) -> Result<(), String> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected key = value", idx + 1))?;
            let (k, v) = (k.trim(), v.trim());
            self.set(k, v, base)
                .map_err(|e| format!("config line {}: {e}", idx + 1))?;
        }
        Ok(())
    }

    fn set(&mut self, key: &str, v: &str, base: &Path) -> Result<(), String> {
        match key {
            "corpus" => self.corpus = Some(base.join(v)),
            "out_dir" => self.out_dir = base.join(v),
            "universe" => {
                let areas = list(v)
                    .iter()
                    .map(|a| {
                        AreaId::new(a).ok_or_else(|| format!("universe: {a:?} is not an A.B area"))
                    })
                    .collect::<Result<_, _>>()?;
                self.universe = Some(areas);
            }
            "excluded_sources" => self.filters.excluded_sources = list(v),
            "excluded_targets" => self.filters.excluded_targets = list(v),
            "excluded_heads" => self.filters.excluded_heads = list(v),
            "source_z" => self.filters.source_z = num(key, v)?,
            "target_z" => self.filters.target_z = num(key, v)?,
            "min_areas_present" => self.filters.min_areas_present = num(key, v)?,
            "top_gaps" => self.filters.top_gaps = num(key, v)?,
            "restarts" => self.restarts = num(key, v)?,
            "max_iters_per_restart" => self.max_iters_per_restart = num(key, v)?,
            "seed" => self.seed = num(key, v)?,
            "top_k" => self.top_k = num(key, v)?,
            "weights" => {
                self.weights = list(v)
                    .iter()
                    .map(|pair| {
                        let (l, w) = pair.split_once(':').ok_or_else(|| {
                            format!("weights: expected label:weight, got {pair:?}")
                        })?;
                        Ok((l.trim().to_owned(), num::<f64>(key, w.trim())?))
                    })
                    .collect::<Result<_, String>>()?;
            }
            "format" => {
                self.format = match v {
                    "tsv" => ReportFormat::Tsv,
                    "jsonl" => ReportFormat::Jsonl,
                    _ => return Err(format!("format: expected tsv or jsonl, got {v:?}")),
                }
            }
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    pub fn match_config(&self, weights: Weights) -> MatchConfig {
        MatchConfig {
            restarts: self.restarts,
            max_iters_per_restart: self.max_iters_per_restart,
            seed: self.seed,
            weights,
            top_k: self.top_k,
        }
    }
}

fn absolute(p: &Path) -> PathBuf {
    std::path::absolute(p).unwrap_or_else(|_| p.to_path_buf())
}

fn resolve(cli: &Cli) -> Result<PipelineConfig, CliError> {
    let mut cfg = PipelineConfig::default();
    if let Some(path) = &cli.config {
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        let base = absolute(path)
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_default();
        cfg.apply_text(&text, &base).map_err(CliError::Usage)?;
    }
    if let Some(c) = &cli.corpus {
        cfg.corpus = Some(c.clone());
    }
    if let Some(o) = &cli.out_dir {
        cfg.out_dir = o.clone();
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    cfg.corpus = cfg.corpus.as_deref().map(absolute);
    cfg.out_dir = absolute(&cfg.out_dir);
    Ok(cfg)
}

fn header(command: &str) -> String {
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("# relanalogy {command} generated at unix time {secs}\n")
}

fn write_report(
    cfg: &PipelineConfig,
    name: &str,
    command: &str,
    body: &[u8],
) -> Result<PathBuf, CliError> {
    fs::create_dir_all(&cfg.out_dir).map_err(|e| io_err(&cfg.out_dir, e))?;
    let path = cfg.out_dir.join(name);
    let mut content = header(command).into_bytes();
    content.extend_from_slice(body);
    fs::write(&path, content).map_err(|e| io_err(&path, e))?;
    Ok(path)
}

fn load_stats(cfg: &PipelineConfig, err: &mut dyn Write) -> Result<AreaStats, CliError> {
    let path = cfg.corpus.as_ref().ok_or_else(|| {
        CliError::Usage("--corpus (or corpus in the config file) is required".into())
    })?;
    let read = read_corpus(path)?;
    for w in &read.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    if read.entries.is_empty() {
        return Err(CliError::Data(format!(
            "{}: no valid entries",
            path.display()
        )));
    }
    Ok(aggregate(&read.entries, &KnownHeads::default()))
}

fn universe(cfg: &PipelineConfig, stats: &AreaStats) -> Vec<AreaId> {
    cfg.universe
        .clone()
        .unwrap_or_else(|| stats.areas().cloned().collect())
}

fn jsonl<T: serde::Serialize>(rows: impl IntoIterator<Item = T>) -> Vec<u8> {
    let mut out = Vec::new();
    for r in rows {
        serde_json::to_writer(&mut out, &r).expect("serializable row");
        out.push(b'\n');
    }
    out
}

fn area_arg(name: &str, text: &str) -> Result<AreaId, CliError> {
    AreaId::new(text)
        .ok_or_else(|| CliError::Usage(format!("--{name} {text:?} is not an A.B area")))
}

fn ext(cfg: &PipelineConfig) -> &'static str {
    match cfg.format {
        ReportFormat::Tsv => "tsv",
        ReportFormat::Jsonl => "jsonl",
    }
}

fn cmd_schemas(
    cfg: &PipelineConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let stats = load_stats(cfg, err)?;
    let body = match cfg.format {
        ReportFormat::Tsv => {
            let mut b = Vec::new();
            write_census(&mut b, &stats).expect("in-memory write");
            b
        }
        ReportFormat::Jsonl => {
            let mut rows: BTreeMap<&TacticSchema, (u64, usize)> = BTreeMap::new();
            for a in stats.areas() {
                for (s, n) in stats.schemas_in(a) {
                    let r = rows.entry(s).or_default();
                    r.0 += n;
                    r.1 += 1;
                }
            }
            let mut b = jsonl([
                serde_json::json!({"exclusions": stats.exclusions, "included": stats.included}),
            ]);
            b.extend(jsonl(rows.into_iter().map(|(s, (n, p))| {
                serde_json::json!({"schema": s.key(), "count": n, "areas_present": p})
            })));
            b
        }
    };
    let path = write_report(cfg, &format!("schemas.{}", ext(cfg)), "schemas", &body)?;
    let ex = stats.exclusions;
    let _ = writeln!(
        out,
        "{} distinct schemas across {} areas from {} entries; excluded {} (no source file {}, non-area path {}, unparseable {}, shortcut {}); wrote {}",
        stats.distinct_schema_count(),
        stats.area_count(),
        stats.included,
        ex.total(),
        ex.no_source_file,
        ex.non_area_path,
        ex.unparseable,
        ex.shortcut,
        path.display()
    );
    Ok(())
}

fn cmd_zscores(
    cfg: &PipelineConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let stats = load_stats(cfg, err)?;
    let table = zscore_table(&stats, &universe(cfg, &stats))?;
    let body = match cfg.format {
        ReportFormat::Tsv => {
            let mut b = Vec::new();
            write_ztable(&mut b, &table).expect("in-memory write");
            b
        }
        ReportFormat::Jsonl => jsonl(table.columns().flat_map(|(s, col)| {
            table.universe().iter().enumerate().map(move |(i, a)| {
                serde_json::json!({"area": a, "schema": s.key(), "count": col.counts[i], "freq": col.freqs[i], "z": col.z[i]})
            })
        })),
    };
    let path = write_report(cfg, &format!("zscores.{}", ext(cfg)), "zscores", &body)?;
    let degenerate = table.columns().filter(|(_, c)| c.degenerate).count();
    let _ = writeln!(
        out,
        "z-scores for {} schemas over {} areas ({degenerate} degenerate); wrote {}",
        table.columns().count(),
        table.universe().len(),
        path.display()
    );
    Ok(())
}

fn cmd_candidates(
    cfg: &PipelineConfig,
    source: &str,
    target: &str,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let (s, t) = (area_arg("source", source)?, area_arg("target", target)?);
    if s == t {
        return Err(StatsError::SameArea(source.to_owned()).into());
    }
    let stats = load_stats(cfg, err)?;
    let table = zscore_table(&stats, &universe(cfg, &stats))?;
    let cands = transfer_candidates(&table, &s, &t, &cfg.filters)?;
    let body = match cfg.format {
        ReportFormat::Tsv => {
            let mut b = Vec::new();
            write_candidates(&mut b, &cands).expect("in-memory write");
            b
        }
        ReportFormat::Jsonl => jsonl(&cands),
    };
    let name = format!("candidates-{}-{}.{}", s, t, ext(cfg));
    let path = write_report(cfg, &name, "candidates", &body)?;
    let _ = writeln!(
        out,
        "{} candidates from {s} to {t}; wrote {}",
        cands.len(),
        path.display()
    );
    Ok(())
}

fn cmd_pairs(
    cfg: &PipelineConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let stats = load_stats(cfg, err)?;
    let table = zscore_table(&stats, &universe(cfg, &stats))?;
    let pairs = pair_potential(&table, &cfg.filters);
    let body = match cfg.format {
        ReportFormat::Tsv => {
            let mut b = Vec::new();
            write_pairs(&mut b, &pairs).expect("in-memory write");
            b
        }
        ReportFormat::Jsonl => jsonl(&pairs),
    };
    let path = write_report(cfg, &format!("pairs.{}", ext(cfg)), "pairs", &body)?;
    let _ = writeln!(
        out,
        "{} admissible area pairs ranked; wrote {}",
        pairs.len(),
        path.display()
    );
    Ok(())
}

fn cmd_match(
    cfg: &PipelineConfig,
    args: &MatchArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let mut cfg = cfg.clone();
    if let Some(k) = args.top_k {
        cfg.top_k = k;
    }
    if let Some(r) = args.restarts {
        cfg.restarts = r;
    }
    if let Some(m) = args.max_iters {
        cfg.max_iters_per_restart = m;
    }
    if args.prefilter == Some(0) {
        return Err(CliError::Usage("--prefilter must be at least 1".into()));
    }
    cfg.match_config(Weights::unit())
        .validate()
        .map_err(CliError::Usage)?;

    let started = Instant::now();
    let queries = read_networks(&args.queries)?;
    let targets = read_networks(&args.targets)?;
    if queries.is_empty() || targets.is_empty() {
        return Err(CliError::Data(
            "need at least one query and one target network".into(),
        ));
    }
    let weights = if cfg.weights.is_empty() {
        Weights::unit()
    } else {
        Weights::from_labels(queries[0].registry(), &cfg.weights)
            .map_err(|e| CliError::Usage(e.to_string()))?
    };
    let config = cfg.match_config(weights);

    let rankings = match args.prefilter {
        None => batch_match(&queries, &targets, &config),
        Some(budget) => queries
            .iter()
            .flat_map(|q| {
                let keep: Vec<RelationalNetwork> = prefilter_candidates(q, &targets, budget)
                    .into_iter()
                    .map(|i| targets[i].clone())
                    .collect();
                batch_match(std::slice::from_ref(q), &keep, &config)
            })
            .collect(),
    };
    for r in &rankings {
        for f in &r.failures {
            let _ = writeln!(err, "warning: {} vs {}: {}", f.query, f.candidate, f.error);
        }
    }
    let body = jsonl(rankings.iter().map(ResultRecord::from));
    let path = write_report(&cfg, "matches.jsonl", "match", &body)?;
    let _ = writeln!(
        out,
        "matched {} queries against {} targets ({} restarts, top {}) in {:.2}s; wrote {}",
        queries.len(),
        targets.len(),
        config.restarts,
        config.top_k,
        started.elapsed().as_secs_f64(),
        path.display()
    );
    Ok(())
}

/// Plain-text battery report, one line per key mapping.
pub fn render_battery(report: &BatteryReport) -> String {
    let mut s = String::new();
    for case in &report.cases {
        match case {
            CaseOutcome::Ran(r) => {
                let _ = writeln!(
                    s,
                    "case {}: {}/{} key mappings (raw {}, normalized {:.6})",
                    r.name,
                    r.satisfied(),
                    r.total(),
                    r.raw,
                    r.normalized
                );
                for c in &r.checks {
                    let _ = writeln!(
                        s,
                        "  {} {} -> {} (want {})",
                        if c.satisfied { "ok  " } else { "MISS" },
                        c.source,
                        c.mapped_to.as_deref().unwrap_or("-"),
                        c.acceptable.join(" | ")
                    );
                }
            }
            CaseOutcome::Failed { name, error } => {
                let _ = writeln!(s, "case {name}: FAILED: {error}");
            }
        }
    }
    let _ = writeln!(
        s,
        "total: {}/{} key mappings",
        report.satisfied(),
        report.total()
    );
    s
}

fn cmd_battery(
    cfg: &PipelineConfig,
    file: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let cases = match file {
        Some(p) => read_battery(p)?,
        None => default_battery(),
    };
    let report = run_battery(&cases, &cfg.match_config(Weights::unit()));
    let text = render_battery(&report);
    let path = write_report(cfg, "battery.txt", "battery", text.as_bytes())?;
    let _ = write!(out, "{text}");
    let _ = writeln!(out, "wrote {}", path.display());
    if report.all_passed() {
        Ok(())
    } else {
        Err(CliError::BatteryMiss {
            satisfied: report.satisfied(),
            total: report.total(),
        })
    }
}

/// Section headers every why-report carries.
pub const WHY_SECTIONS: [&str; 4] = [
    "## What the source tactic does",
    "## Does an analog exist in the target",
    "## Attempts",
    "## Failure diagnosis",
];

pub fn render_whyreport(schema: &str, source_id: &str, target_id: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "## Transfer attempt\n");
    let _ = writeln!(s, "- schema: {schema}");
    let _ = writeln!(s, "- source theorem: {source_id}");
    let _ = writeln!(s, "- target theorem: {target_id}\n");
    let prompts = [
        "Describe the mathematical effect of the tactic in the source proof.",
        "Name the target-side concept or lemma that plays the same role, or state that none exists.",
        "List each adaptation tried, with the resulting goal or error.",
        "Explain why the transfer failed or what closed it.",
    ];
    for (h, p) in WHY_SECTIONS.iter().zip(prompts) {
        let _ = writeln!(s, "{h}\n\n_{p}_\n");
    }
    s
}

fn file_slug(text: &str) -> String {
    text.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn cmd_whyreport(
    cfg: &PipelineConfig,
    args: &WhyArgs,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    if TacticSchema::parse_key(&args.schema).is_none() {
        return Err(CliError::Usage(format!(
            "--schema {:?} is not a head|arity|with|lemma key",
            args.schema
        )));
    }
    let name = format!(
        "whyreport-{}-{}.md",
        file_slug(&args.source_id),
        file_slug(&args.target_id)
    );
    let path = cfg.out_dir.join(&name);
    if path.exists() && !args.force {
        return Err(CliError::Usage(format!(
            "{} exists; pass --force to overwrite",
            path.display()
        )));
    }
    let mut body = render_whyreport(&args.schema, &args.source_id, &args.target_id);
    let path = write_report(cfg, &name, "whyreport", body.as_bytes())?;
    if let Some(cmd) = &args.verify_cmd {
        let status = Process::new("sh")
            .arg("-c")
            .arg(cmd)
            .status()
            .map_err(|e| CliError::Io(format!("verify command: {e}")))?;
        let code = status
            .code()
            .map_or_else(|| "terminated by signal".to_owned(), |c| c.to_string());
        let _ = writeln!(
            body,
            "## Verification\n\n- command: `{cmd}`\n- exit status: {code}"
        );
        write_report(cfg, &name, "whyreport", body.as_bytes())?;
        let _ = writeln!(out, "verify command exited with {code}");
    }
    let _ = writeln!(out, "wrote {}", path.display());
    Ok(())
}

pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let cfg = resolve(cli)?;
    match &cli.command {
        Command::Schemas => cmd_schemas(&cfg, out, err),
        Command::Zscores => cmd_zscores(&cfg, out, err),
        Command::Candidates { source, target } => cmd_candidates(&cfg, source, target, out, err),
        Command::Pairs => cmd_pairs(&cfg, out, err),
        Command::Match(args) => cmd_match(&cfg, args, out, err),
        Command::Battery { file } => cmd_battery(&cfg, file.as_deref(), out),
        Command::Whyreport(args) => cmd_whyreport(&cfg, args, out),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "relanalogy: {e}");
            e.exit_code()
        }
    }
}
