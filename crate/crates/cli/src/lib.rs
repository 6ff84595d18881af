//! Batch driver: search a catalog, re-verify and annotate result files, and
//! summarize them.

use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use pds_core::analysis::{breakdown_records, classify_records, disjoint_records, graph_records};
use pds_core::graph6::parse_graph6_lines;
use pds_core::group::{elementary_abelian_rank, GroupTable};
use pds_core::io::{
    by_group, emit_group_table, load_catalog, load_results, load_results_verified, save_results, GroupCatalog,
    GroupSource, Sample,
};
use pds_core::ring::PdsParams;
use pds_core::search::{search_group_with_progress, SearchConfig};
use pds_core::srg::canonical_hash;
use pds_core::{Error, PdsRecord};

#[derive(Debug, Parser)]
#[command(name = "pds", version, about = "Search groups for negative Latin square type partial difference sets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// Catalog directory holding gtab files and manifest.txt.
    #[arg(long, default_value = "data/catalog", global = true)]
    pub catalog: PathBuf,
    /// Parameters v,k,lambda,mu.
    #[arg(long, default_value = "64,18,2,6", value_parser = parse_params, global = true)]
    pub params: PdsParams,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate every group table in the catalog.
    Ingest {
        #[command(flatten)]
        common: Common,
        /// Check associativity even for large tables.
        #[arg(long)]
        paranoid: bool,
        /// Also validate a graph6 file (every line must round-trip).
        #[arg(long)]
        graph6: Option<PathBuf>,
    },
    /// Search groups and write a JSON-lines result file.
    Search {
        #[command(flatten)]
        common: Common,
        /// Group id (catalog label or builtin spec); repeatable. Defaults to
        /// every catalog group of order v.
        #[arg(long)]
        group: Vec<String>,
        /// Checkpoints after cosets 5, 6, 7 only and the parity-only
        /// distribution filter.
        #[arg(long)]
        paper_faithful: bool,
        /// Stop each group at its first PDS.
        #[arg(long)]
        first_only: bool,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Emit one JSON progress event per shard on stderr.
        #[arg(long)]
        progress: bool,
        /// Rank m of the C2^m image used for the coset split.
        #[arg(long, default_value_t = 3)]
        rank: u32,
        #[arg(long, default_value = "results.jsonl")]
        out: PathBuf,
    },
    /// Re-verify a result file against the group-ring identity.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long = "in", default_value = "results.jsonl")]
        input: PathBuf,
        /// Check only every n-th record.
        #[arg(long, default_value_t = 1)]
        sample: usize,
    },
    /// Assign equivalence-class ids under automorphisms.
    Classify(Annotate),
    /// Record disjoint partners and check their complements.
    Disjoint {
        #[command(flatten)]
        annotate: Annotate,
        /// Keep only the first disjoint pair per group.
        #[arg(long)]
        first_only: bool,
    },
    /// Look for splittings into three Hadamard difference sets.
    Breakdown(Annotate),
    /// Hash the canonical form of each Cayley graph.
    Graphs {
        #[command(flatten)]
        annotate: Annotate,
        /// graph6 file of known graphs to match against.
        #[arg(long)]
        srg_catalog: Option<PathBuf>,
    },
    /// Summarize an annotated result file as text, and as CSV with --out.
    Report {
        #[command(flatten)]
        common: Common,
        #[arg(long = "in", default_value = "results.jsonl")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct Annotate {
    #[command(flatten)]
    pub common: Common,
    #[arg(long = "in", default_value = "results.jsonl")]
    pub input: PathBuf,
    /// Output file; defaults to rewriting the input.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_params(s: &str) -> Result<PdsParams, String> {
    let parts: Vec<i64> = s
        .split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        &[v, k, l, m] => PdsParams::new(v, k, l, m).map_err(|e| e.to_string()),
        _ => Err("expected v,k,lambda,mu".into()),
    }
}

/// Per-group search statistics, written next to the result file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GroupRun {
    pub group_id: String,
    pub pds: usize,
    pub distributions: usize,
    pub candidates: u64,
    pub prunes: u64,
    pub wall_secs: f64,
    #[serde(default)]
    pub skipped: Option<String>,
}

pub fn stats_path(results: &Path) -> PathBuf {
    let mut s = results.as_os_str().to_owned();
    s.push(".stats.json");
    PathBuf::from(s)
}

/// Parses `argv` (program name first) and runs the command. Returns the
/// process exit code: 0 on success, 1 on failure, 2 on bad usage.
pub fn cli_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Ingest { common, paranoid, graph6 } => ingest(&common, paranoid, graph6.as_deref()),
        Command::Search { common, group, paper_faithful, first_only, jobs, progress, rank, out } => {
            let mut cfg = if paper_faithful { SearchConfig::paper_faithful() } else { SearchConfig::for_rank(rank) };
            if paper_faithful && rank != 3 {
                bail!("--paper-faithful is defined for rank 3 only");
            }
            cfg.quotient_rank = rank;
            cfg.parallelism = jobs;
            cfg.emit_all = !first_only;
            search(&common, &group, &cfg, progress, &out)
        }
        Command::Verify { common, input, sample } => {
            let catalog = open_catalog(&common.catalog)?;
            let records = load_results_verified(&input, &catalog, &common.params, Sample::Every(sample))?;
            println!("verified {} records in {}", records.len(), input.display());
            Ok(())
        }
        Command::Classify(a) => annotate(&a, |g, recs, _| {
            let n = classify_records(g, recs)?;
            println!("{}: {} PDSs, {} classes", g.id_label(), recs.len(), n);
            Ok(())
        }),
        Command::Disjoint { annotate: a, first_only } => {
            let mut failures = 0;
            annotate(&a, |g, recs, _| {
                let pairs = disjoint_records(g, recs, first_only)?;
                let bad = pairs.iter().filter(|p| !p.complement_ok).count();
                failures += bad;
                if !pairs.is_empty() {
                    println!("{}: {} disjoint pairs, {} failing the complement check", g.id_label(), pairs.len(), bad);
                }
                Ok(())
            })?;
            if failures > 0 {
                bail!("{failures} disjoint pairs whose complement is not a reversible difference set");
            }
            Ok(())
        }
        Command::Breakdown(a) => annotate(&a, |g, recs, _| {
            let n = breakdown_records(g, recs);
            println!("{}: {} decomposable", g.id_label(), n);
            Ok(())
        }),
        Command::Graphs { annotate: a, srg_catalog } => {
            let mut hashes = BTreeSet::new();
            annotate(&a, |g, recs, p| {
                graph_records(g, recs, p)?;
                let local: BTreeSet<&String> = recs.iter().filter_map(|r| r.srg_hash.as_ref()).collect();
                println!("{}: {} graph classes", g.id_label(), local.len());
                hashes.extend(local.into_iter().cloned());
                Ok(())
            })?;
            println!("{} distinct graphs overall", hashes.len());
            if let Some(path) = srg_catalog {
                let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                let known: BTreeSet<String> = parse_graph6_lines(&text)?.iter().map(canonical_hash).collect();
                let missing = hashes.iter().filter(|h| !known.contains(*h)).count();
                println!("{} of {} graphs found in {}", hashes.len() - missing, hashes.len(), path.display());
                if missing > 0 {
                    bail!("{missing} graphs are absent from {}", path.display());
                }
            }
            Ok(())
        }
        Command::Report { common: _, input, out } => {
            let records = load_results(&input)?;
            let runs = read_runs(&stats_path(&input))?;
            let report = RunReport::build(&records, &runs);
            print!("{}", report.to_text());
            if let Some(out) = out {
                fs::write(&out, report.to_csv())?;
            }
            Ok(())
        }
    }
}

fn open_catalog(dir: &Path) -> anyhow::Result<GroupCatalog> {
    if !dir.exists() {
        return Ok(GroupCatalog::default());
    }
    Ok(load_catalog(dir)?)
}

fn ingest(common: &Common, paranoid: bool, graph6: Option<&Path>) -> anyhow::Result<()> {
    let catalog = load_catalog(&common.catalog)?;
    let mut with_image = 0;
    for entry in &catalog.entries {
        let g = match &entry.source {
            GroupSource::File(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                let g = pds_core::io::parse_group_table_with(&text, paranoid)
                    .with_context(|| format!("group {}", entry.id_label))?;
                if emit_group_table(&g) != text {
                    bail!("{} does not round-trip", path.display());
                }
                g
            }
            GroupSource::Builtin(_) => catalog.load(entry)?,
        };
        if elementary_abelian_rank(&g) >= 3 {
            with_image += 1;
        }
    }
    println!("{} groups, {} with a C2^3 image", catalog.len(), with_image);
    if let Some(path) = graph6 {
        let text = fs::read_to_string(path)?;
        let mut n = 0;
        for line in text.lines().filter(|l| !l.is_empty()) {
            let g = pds_core::graph6::parse_graph6(line)?;
            if pds_core::graph6::emit_graph6(&g) != line {
                bail!("graph6 line {} does not round-trip", n + 1);
            }
            n += 1;
        }
        println!("{n} graphs in {}", path.display());
    }
    Ok(())
}

fn search(
    common: &Common,
    ids: &[String],
    cfg: &SearchConfig,
    progress: bool,
    out: &Path,
) -> anyhow::Result<()> {
    let p = &common.params;
    if p.as_tuple() != (64, 18, 2, 6) {
        log::warn!("parameters {:?} are experimental", p.as_tuple());
    }
    let catalog = open_catalog(&common.catalog)?;
    let explicit = !ids.is_empty();
    let groups: Vec<String> = if explicit {
        ids.to_vec()
    } else {
        catalog.entries.iter().map(|e| e.id_label.clone()).collect()
    };
    let report_progress = |e: &pds_core::search::ProgressEvent| {
        if progress {
            eprintln!("{}", serde_json::to_string(e).unwrap_or_default());
        }
    };
    let mut records = Vec::new();
    let mut runs = Vec::new();
    for id in &groups {
        let g = catalog.resolve(id)?;
        if !explicit {
            if let Some(reason) = skip_reason(&g, p, cfg.quotient_rank) {
                log::info!("{id}: skipped ({reason})");
                runs.push(GroupRun { group_id: id.clone(), skipped: Some(reason), ..GroupRun::default() });
                continue;
            }
        }
        let start = Instant::now();
        let result = search_group_with_progress(&g, p, cfg, &report_progress).map_err(|e| anyhow!("{id}: {e}"))?;
        let run = GroupRun {
            group_id: id.clone(),
            pds: result.pds_list.len(),
            distributions: result.distribution_count,
            candidates: result.stats.candidates_enumerated,
            prunes: result.stats.total_prunes(),
            wall_secs: start.elapsed().as_secs_f64(),
            skipped: None,
        };
        eprintln!("{id}: {} PDSs in {:.2}s", run.pds, run.wall_secs);
        runs.push(run);
        records.extend(result.pds_list);
    }
    save_results(&records, out)?;
    fs::write(stats_path(out), serde_json::to_string_pretty(&runs)?)?;
    println!("{} PDSs written to {}", records.len(), out.display());
    Ok(())
}

fn skip_reason(g: &GroupTable, p: &PdsParams, rank: u32) -> Option<String> {
    if g.order() as i64 != p.v {
        return Some(format!("order {}", g.order()));
    }
    let full = elementary_abelian_rank(g);
    if 1usize << full == g.order() {
        return Some("elementary abelian".into());
    }
    if full < rank {
        return Some(Error::NoElementaryAbelianImage { rank }.to_string());
    }
    None
}

/// Loads `a.input`, applies `f` to each group's records and writes the
/// annotated records back.
fn annotate(
    a: &Annotate,
    mut f: impl FnMut(&GroupTable, &mut [PdsRecord], &PdsParams) -> pds_core::Result<()>,
) -> anyhow::Result<()> {
    let catalog = open_catalog(&a.common.catalog)?;
    let records = load_results(&a.input)?;
    let ids: Vec<String> = by_group(&records).keys().map(|s| s.to_string()).collect();
    let mut out_records = Vec::with_capacity(records.len());
    for id in ids {
        let g = catalog.resolve(&id)?;
        let mut recs: Vec<PdsRecord> = records.iter().filter(|r| r.group_id == id).cloned().collect();
        f(&g, &mut recs, &a.common.params).map_err(|e| anyhow!("{id}: {e}"))?;
        out_records.extend(recs);
    }
    save_results(&out_records, a.out.as_ref().unwrap_or(&a.input))?;
    Ok(())
}

fn read_runs(path: &Path) -> anyhow::Result<Vec<GroupRun>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub group_id: String,
    pub pds: usize,
    pub classes: usize,
    pub disjoint: bool,
    pub breakdowns: usize,
    pub srg_classes: usize,
    pub wall_secs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub rows: Vec<ReportRow>,
    pub totals: ReportRow,
    /// Distinct graph hashes across all groups.
    pub distinct_srgs: usize,
}

impl RunReport {
    /// One row per group with at least one PDS. Class and breakdown counts
    /// are zero when the corresponding annotation is missing.
    pub fn build(records: &[PdsRecord], runs: &[GroupRun]) -> Self {
        let wall: BTreeMap<&str, f64> = runs.iter().map(|r| (r.group_id.as_str(), r.wall_secs)).collect();
        let mut rows = Vec::new();
        let mut all_hashes = BTreeSet::new();
        for (id, recs) in by_group(records) {
            let classes: BTreeSet<usize> = recs.iter().filter_map(|r| r.class_id).collect();
            let decomposable: BTreeSet<Option<usize>> =
                recs.iter().filter(|r| r.breakdown == Some(true)).map(|r| r.class_id).collect();
            let breakdowns = if classes.is_empty() {
                recs.iter().filter(|r| r.breakdown == Some(true)).count()
            } else {
                decomposable.len()
            };
            let hashes: BTreeSet<&String> = recs.iter().filter_map(|r| r.srg_hash.as_ref()).collect();
            all_hashes.extend(hashes.iter().cloned());
            rows.push(ReportRow {
                group_id: id.to_string(),
                pds: recs.len(),
                classes: classes.len(),
                disjoint: recs.iter().any(|r| !r.disjoint_with.is_empty()),
                breakdowns,
                srg_classes: hashes.len(),
                wall_secs: wall.get(id).copied().unwrap_or(0.0),
            });
        }
        let totals = ReportRow {
            group_id: "total".into(),
            pds: rows.iter().map(|r| r.pds).sum(),
            classes: rows.iter().map(|r| r.classes).sum(),
            disjoint: rows.iter().any(|r| r.disjoint),
            breakdowns: rows.iter().map(|r| r.breakdowns).sum(),
            srg_classes: rows.iter().map(|r| r.srg_classes).sum(),
            wall_secs: runs.iter().map(|r| r.wall_secs).sum(),
        };
        Self { rows, totals, distinct_srgs: all_hashes.len() }
    }

    pub fn groups_with_disjoint_pair(&self) -> usize {
        self.rows.iter().filter(|r| r.disjoint).count()
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{:<10} {:>8} {:>8} {:>9} {:>11} {:>12} {:>10}\n",
            "group", "pds", "classes", "disjoint", "breakdowns", "srg_classes", "seconds"
        );
        for r in self.rows.iter().chain(std::iter::once(&self.totals)) {
            s.push_str(&format!(
                "{:<10} {:>8} {:>8} {:>9} {:>11} {:>12} {:>10.2}\n",
                r.group_id, r.pds, r.classes, r.disjoint, r.breakdowns, r.srg_classes, r.wall_secs
            ));
        }
        s.push_str(&format!(
            "{} groups with PDSs, {} with a disjoint pair, {} distinct graphs\n",
            self.rows.len(),
            self.groups_with_disjoint_pair(),
            self.distinct_srgs
        ));
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("group_id,pds,classes,disjoint,breakdowns,srg_classes,wall_secs\n");
        for r in self.rows.iter().chain(std::iter::once(&self.totals)) {
            s.push_str(&format!(
                "{},{},{},{},{},{},{:.3}\n",
                r.group_id, r.pds, r.classes, r.disjoint, r.breakdowns, r.srg_classes, r.wall_secs
            ));
        }
        s
    }
}
