//! Group-table files, the group catalog, and JSON-lines result files.
//!
//! A gtab file holds a header line `gtab <order> <id_label>` followed by one
//! row per element: row `g` lists the indices of `g·h` for `h = 0, 1, …`.
//! A catalog directory holds gtab files and a `manifest.txt` whose lines read
//! `<id_label> <filename> [external id] [notes…]`; a filename of the form
//! `builtin:<spec>` names a constructed group instead.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::construct::builtin;
use crate::error::{Error, Result};
use crate::group::GroupTable;
use crate::record::PdsRecord;
use crate::ring::{is_pds, PdsParams};

pub const MANIFEST: &str = "manifest.txt";

pub fn parse_group_table(text: &str) -> Result<GroupTable> {
    parse_group_table_with(text, false)
}

/// As [`parse_group_table`]; `paranoid` forces the associativity check on
/// large tables.
pub fn parse_group_table_with(text: &str, paranoid: bool) -> Result<GroupTable> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::MalformedHeader("empty file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (order, label) = match fields.as_slice() {
        ["gtab", order, label] => {
            let order: usize =
                order.parse().map_err(|_| Error::MalformedHeader(format!("bad order in {header:?}")))?;
            (order, *label)
        }
        _ => return Err(Error::MalformedHeader(format!("expected \"gtab <order> <label>\", got {header:?}"))),
    };
    if order == 0 {
        return Err(Error::MalformedHeader("order must be positive".into()));
    }
    let mut table = Vec::with_capacity(order);
    for row in 0..order {
        let line = lines.next().unwrap_or("");
        let entries: Vec<usize> = line
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::NotAGroup(format!("row {row} has a non-numeric entry")))?;
        if entries.len() != order {
            return Err(Error::RowLengthMismatch { row, expected: order, found: entries.len() });
        }
        table.push(entries);
    }
    if lines.any(|l| !l.trim().is_empty()) {
        return Err(Error::RowLengthMismatch { row: order, expected: 0, found: 1 });
    }
    if paranoid {
        GroupTable::from_table_paranoid(&table, label)
    } else {
        GroupTable::from_table(&table, label)
    }
}

pub fn emit_group_table(group: &GroupTable) -> String {
    let n = group.order();
    let mut out = format!("gtab {n} {}\n", group.id_label());
    for g in 0..n {
        let row: Vec<String> = group.row(g).iter().map(|x| x.to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn read_group_table(path: &Path) -> Result<GroupTable> {
    parse_group_table(&fs::read_to_string(path)?)
}

pub fn write_group_table(group: &GroupTable, path: &Path) -> Result<()> {
    fs::write(path, emit_group_table(group))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSource {
    File(PathBuf),
    Builtin(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub id_label: String,
    pub source: GroupSource,
    /// Everything after the filename on the manifest line.
    pub metadata: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroupCatalog {
    pub entries: Vec<CatalogEntry>,
}

impl GroupCatalog {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, id_label: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.id_label == id_label)
    }

    pub fn load(&self, entry: &CatalogEntry) -> Result<GroupTable> {
        let mut g = match &entry.source {
            GroupSource::File(path) => read_group_table(path)?,
            GroupSource::Builtin(spec) => builtin(spec)?,
        };
        g.set_id_label(entry.id_label.clone());
        Ok(g)
    }

    /// Looks `id` up in the catalog, falling back to a builtin spec such as
    /// `c4xc4xc2^2`.
    pub fn resolve(&self, id: &str) -> Result<GroupTable> {
        match self.entry(id) {
            Some(e) => self.load(e),
            None => builtin(id),
        }
    }
}

/// Reads `dir/manifest.txt`. A directory with neither a manifest nor gtab
/// files is an empty catalog.
pub fn load_catalog(dir: &Path) -> Result<GroupCatalog> {
    let manifest = dir.join(MANIFEST);
    if !manifest.exists() {
        let has_tables = fs::read_dir(dir)?
            .filter_map(|e| e.ok())
            .any(|e| e.path().extension().is_some_and(|x| x == "gtab"));
        return if has_tables { Err(Error::MissingManifest(dir.to_path_buf())) } else { Ok(GroupCatalog::default()) };
    }
    let text = fs::read_to_string(&manifest)?;
    let mut entries = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.splitn(3, char::is_whitespace);
        let id = parts.next().unwrap_or_default().to_string();
        let file = parts
            .next()
            .ok_or_else(|| Error::MalformedHeader(format!("manifest line {} has no filename", i + 1)))?;
        let metadata = parts.next().unwrap_or("").trim().to_string();
        if !seen.insert(id.clone()) {
            return Err(Error::MalformedHeader(format!("duplicate id {id} in manifest")));
        }
        let source = match file.strip_prefix("builtin:") {
            Some(spec) => GroupSource::Builtin(spec.to_string()),
            None => GroupSource::File(dir.join(file)),
        };
        entries.push(CatalogEntry { id_label: id, source, metadata });
    }
    Ok(GroupCatalog { entries })
}

/// Copies `groups` into `dir` as gtab files and writes a manifest.
pub fn write_catalog(dir: &Path, groups: &[(GroupTable, String)]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut manifest = String::from("# id_label filename metadata\n");
    for (g, meta) in groups {
        let file = format!("{}.gtab", g.id_label());
        write_group_table(g, &dir.join(&file))?;
        manifest.push_str(&format!("{} {} {}\n", g.id_label(), file, meta).trim_end().to_string());
        manifest.push('\n');
    }
    fs::write(dir.join(MANIFEST), manifest)?;
    Ok(())
}

/// Sorts by `(group_id, elements)` and writes one JSON object per line.
pub fn save_results(records: &[PdsRecord], path: &Path) -> Result<()> {
    let mut sorted: Vec<&PdsRecord> = records.iter().collect();
    sorted.sort_by(|a, b| (&a.group_id, &a.elements).cmp(&(&b.group_id, &b.elements)));
    let mut out = BufWriter::new(fs::File::create(path)?);
    for r in sorted {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn load_results(path: &Path) -> Result<Vec<PdsRecord>> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let r: PdsRecord = serde_json::from_str(&line)
            .map_err(|e| Error::CorruptRecord { line: i + 1, reason: e.to_string() })?;
        out.push(r);
    }
    Ok(out)
}

/// Which records a verified load re-checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sample {
    All,
    /// Records `0, n, 2n, …` of the file.
    Every(usize),
}

/// Loads and re-verifies the sampled records against the group-ring
/// identity; groups are resolved through `catalog`.
pub fn load_results_verified(
    path: &Path,
    catalog: &GroupCatalog,
    p: &PdsParams,
    sample: Sample,
) -> Result<Vec<PdsRecord>> {
    let records = load_results(path)?;
    let step = match sample {
        Sample::All => 1,
        Sample::Every(n) => n.max(1),
    };
    let mut groups: HashMap<String, GroupTable> = HashMap::new();
    for (i, r) in records.iter().enumerate().step_by(step) {
        let corrupt = |reason: String| Error::CorruptRecord { line: i + 1, reason };
        if !groups.contains_key(&r.group_id) {
            let g = catalog.resolve(&r.group_id).map_err(|e| corrupt(e.to_string()))?;
            groups.insert(r.group_id.clone(), g);
        }
        let g = &groups[&r.group_id];
        if r.elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(corrupt("elements not sorted and distinct".into()));
        }
        if r.elements.iter().any(|&x| x >= g.order()) {
            return Err(corrupt("element index out of range".into()));
        }
        if !is_pds(g, &r.elements, p) {
            return Err(corrupt("fails the group-ring identity".into()));
        }
        if r.distribution.iter().sum::<usize>() != r.elements.len() {
            return Err(corrupt("distribution does not sum to |D|".into()));
        }
    }
    Ok(records)
}

/// Records grouped by `group_id`, in id order.
pub fn by_group(records: &[PdsRecord]) -> BTreeMap<&str, Vec<&PdsRecord>> {
    let mut map: BTreeMap<&str, Vec<&PdsRecord>> = BTreeMap::new();
    for r in records {
        map.entry(r.group_id.as_str()).or_default().push(r);
    }
    map
}
