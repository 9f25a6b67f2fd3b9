//! Edge-list ingestion and canonical serialization, plus CSV writers for
//! reports, trajectories and verdicts.
//!
//! Input rows are `SOURCE,TARGET,RATING[,TIME]`. The sign of the rating gives
//! the edge sign and its magnitude the weight; zero ratings are rejected.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use crate::dynamics::TrajectoryStats;
use crate::error::{Error, Result};
use crate::graph::{NodeId, Sign, SignedDigraph};
use crate::motif::{CensusReport, ReportRow};
use crate::observer::VerdictLabels;

/// How repeated `(source, target)` rows are handled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Dedup {
    /// Largest timestamp wins, then the later row.
    #[default]
    KeepLatest,
    KeepFirst,
    Error,
}

impl FromStr for Dedup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "keep-latest" | "latest" => Ok(Dedup::KeepLatest),
            "keep-first" | "first" => Ok(Dedup::KeepFirst),
            "error" => Ok(Dedup::Error),
            other => Err(Error::InvalidConfig(format!(
                "unknown dedup policy {other:?} (keep-latest, keep-first, error)"
            ))),
        }
    }
}

/// Node labels in numeric-aware sorted order; the id of a label is its rank.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolTable {
    labels: Vec<String>,
    ids: HashMap<String, NodeId>,
}

/// Integers compare numerically and sort before other labels, which compare
/// as strings.
pub fn label_order(a: &str, b: &str) -> Ordering {
    match (a.parse::<i64>(), b.parse::<i64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

impl SymbolTable {
    pub fn from_labels<I: IntoIterator<Item = String>>(labels: I) -> Self {
        let mut labels: Vec<String> = labels.into_iter().collect();
        labels.sort_by(|a, b| label_order(a, b));
        labels.dedup();
        let ids = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        SymbolTable { labels, ids }
    }

    /// Labels `0..n`.
    pub fn numeric(n: usize) -> Self {
        SymbolTable::from_labels((0..n).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn id(&self, label: &str) -> Option<NodeId> {
        self.ids.get(label).copied()
    }

    pub fn label(&self, id: NodeId) -> &str {
        &self.labels[id]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoadedGraph {
    pub graph: SignedDigraph,
    pub labels: SymbolTable,
    pub rows: usize,
    pub self_loops_dropped: usize,
    pub duplicates_dropped: usize,
    pub warnings: Vec<String>,
}

struct Row {
    line: usize,
    source: String,
    target: String,
    rating: f64,
    time: Option<f64>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn load_edge_list(path: impl AsRef<Path>, dedup: Dedup) -> Result<LoadedGraph> {
    read_edge_list(File::open(path)?, dedup)
}

pub fn read_edge_list<R: Read>(input: R, dedup: Dedup) -> Result<LoadedGraph> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input);
    let mut rows = Vec::new();
    let mut first = true;
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() < 3 {
            return Err(parse_err(
                line,
                format!(
                    "expected SOURCE,TARGET,RATING[,TIME], got {} fields",
                    record.len()
                ),
            ));
        }
        let is_first = std::mem::replace(&mut first, false);
        let rating = match record[2].parse::<f64>() {
            Ok(r) if r.is_finite() => r,
            _ if is_first => continue, // header row
            _ => {
                return Err(parse_err(
                    line,
                    format!("unparsable rating {:?}", &record[2]),
                ))
            }
        };
        if rating == 0.0 {
            return Err(parse_err(line, "rating must be nonzero"));
        }
        let time = match record.get(3).filter(|t| !t.is_empty()) {
            None => None,
            Some(t) => Some(
                t.parse::<f64>()
                    .map_err(|_| parse_err(line, format!("unparsable timestamp {t:?}")))?,
            ),
        };
        rows.push(Row {
            line,
            source: record[0].to_string(),
            target: record[1].to_string(),
            rating,
            time,
        });
    }
    build(rows, dedup)
}

fn build(rows: Vec<Row>, dedup: Dedup) -> Result<LoadedGraph> {
    let mut warnings = Vec::new();
    let total = rows.len();
    let loops = rows.iter().filter(|r| r.source == r.target).count();
    if loops > 0 {
        warnings.push(format!("dropped {loops} self-loop rows"));
    }
    let rows: Vec<Row> = rows.into_iter().filter(|r| r.source != r.target).collect();
    let use_time = dedup == Dedup::KeepLatest && rows.iter().all(|r| r.time.is_some());

    let mut kept: HashMap<(&str, &str), usize> = HashMap::new();
    let mut duplicates = 0;
    for (i, r) in rows.iter().enumerate() {
        let key = (r.source.as_str(), r.target.as_str());
        match kept.get(&key).copied() {
            None => {
                kept.insert(key, i);
            }
            Some(j) => {
                duplicates += 1;
                match dedup {
                    Dedup::Error => {
                        return Err(parse_err(
                            r.line,
                            format!(
                                "duplicate edge {} -> {} (first on line {})",
                                r.source, r.target, rows[j].line
                            ),
                        ))
                    }
                    Dedup::KeepFirst => {}
                    Dedup::KeepLatest => {
                        let newer = !use_time || r.time >= rows[j].time;
                        if newer {
                            kept.insert(key, i);
                        }
                    }
                }
            }
        }
    }

    let labels = SymbolTable::from_labels(
        rows.iter()
            .flat_map(|r| [r.source.clone(), r.target.clone()]),
    );
    let mut graph = SignedDigraph::new(labels.len());
    let mut chosen: Vec<usize> = kept.into_values().collect();
    chosen.sort_unstable();
    for i in chosen {
        let r = &rows[i];
        let sign = if r.rating > 0.0 {
            Sign::Endorse
        } else {
            Sign::Accuse
        };
        let (u, v) = (
            labels.id(&r.source).expect("interned"),
            labels.id(&r.target).expect("interned"),
        );
        graph
            .add_edge(u, v, sign, r.rating.abs())
            .map_err(|e| parse_err(r.line, e.to_string()))?;
    }
    if duplicates > 0 {
        warnings.push(format!("dropped {duplicates} duplicate rows"));
        if dedup == Dedup::KeepLatest && !use_time {
            warnings.push("some rows lack timestamps; duplicates resolved by file order".into());
        }
    }
    Ok(LoadedGraph {
        graph,
        labels,
        rows: total,
        self_loops_dropped: loops,
        duplicates_dropped: duplicates,
        warnings,
    })
}

/// Rating written for an edge: the sign times the rounded weight, at least 1
/// in magnitude.
pub fn rating_of(sign: Sign, weight: f64) -> i64 {
    let magnitude = (weight.round() as i64).max(1);
    match sign {
        Sign::Endorse => magnitude,
        Sign::Accuse => -magnitude,
    }
}

/// Canonical edge list: a `source,target,rating` header, then rows sorted by
/// label. Isolated nodes have no row and are not preserved.
pub fn write_edge_list<W: Write>(
    g: &SignedDigraph,
    labels: Option<&SymbolTable>,
    out: W,
) -> Result<()> {
    let numeric;
    let labels = match labels {
        Some(l) if l.len() == g.node_count() => l,
        Some(l) => {
            return Err(Error::Precondition(format!(
                "{} labels for {} nodes",
                l.len(),
                g.node_count()
            )))
        }
        None => {
            numeric = SymbolTable::numeric(g.node_count());
            &numeric
        }
    };
    let mut rows: Vec<(NodeId, NodeId, i64)> = g
        .edges()
        .map(|(u, v, e)| (u, v, rating_of(e.sign, e.weight)))
        .collect();
    rows.sort_by(|a, b| {
        label_order(labels.label(a.0), labels.label(b.0))
            .then_with(|| label_order(labels.label(a.1), labels.label(b.1)))
    });
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["source", "target", "rating"])?;
    for (u, v, r) in rows {
        w.write_record([labels.label(u), labels.label(v), &r.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_edge_list(
    g: &SignedDigraph,
    labels: Option<&SymbolTable>,
    path: impl AsRef<Path>,
) -> Result<()> {
    let file = BufWriter::new(File::create(path)?);
    write_edge_list(g, labels, file)
}

/// `# key=value` provenance lines placed before a CSV header.
pub type Metadata = Vec<(String, String)>;

pub fn write_metadata<W: Write>(out: &mut W, meta: &Metadata) -> Result<()> {
    for (k, v) in meta {
        writeln!(out, "# {k}={v}")?;
    }
    Ok(())
}

fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.6}")
    }
}

const REPORT_HEADER: [&str; 12] = [
    "table",
    "label",
    "class",
    "observed",
    "expected",
    "ratio",
    "normalized_ratio",
    "observed_weight",
    "expected_weight",
    "weight_ratio",
    "normalized_weight_ratio",
    "p_plus_p_minus",
];

fn report_record(table: &str, r: &ReportRow, rep: &CensusReport) -> Vec<String> {
    vec![
        table.into(),
        r.label.clone(),
        r.class.clone(),
        r.observed.to_string(),
        fmt_f64(r.expected),
        fmt_f64(r.ratio),
        fmt_f64(r.normalized_ratio),
        fmt_f64(r.observed_weight),
        fmt_f64(r.expected_weight),
        fmt_f64(r.weight_ratio),
        fmt_f64(r.normalized_weight_ratio),
        format!("{}/{}", fmt_f64(rep.p_plus), fmt_f64(rep.p_minus)),
    ]
}

pub fn write_census_report<W: Write>(
    rep: &CensusReport,
    meta: &Metadata,
    mut out: W,
) -> Result<()> {
    write_metadata(&mut out, meta)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REPORT_HEADER)?;
    for r in &rep.dyads {
        w.write_record(report_record("dyad", r, rep))?;
    }
    for r in &rep.triads {
        w.write_record(report_record("triad", r, rep))?;
    }
    w.flush()?;
    Ok(())
}

/// Fixed-width text rendering of a census report.
pub fn render_census_text(rep: &CensusReport) -> String {
    let mut s = format!(
        "nodes={} edges={} p+={:.6} p-={:.6}\n{:<6} {:<22} {:>9} {:>11} {:>8} {:>8} {:>11} {:>12} {:>8} {:>8}\n",
        rep.nodes,
        rep.edges,
        rep.p_plus,
        rep.p_minus,
        "label",
        "class",
        "observed",
        "expected",
        "ratio",
        "norm",
        "w_observed",
        "w_expected",
        "w_ratio",
        "w_norm"
    );
    for r in rep.dyads.iter().chain(&rep.triads) {
        s.push_str(&format!(
            "{:<6} {:<22} {:>9} {:>11.3} {:>8.2} {:>8.2} {:>11.0} {:>12.3} {:>8.2} {:>8.2}\n",
            r.label,
            r.class,
            r.observed,
            r.expected,
            r.ratio,
            r.normalized_ratio,
            r.observed_weight,
            r.expected_weight,
            r.weight_ratio,
            r.normalized_weight_ratio
        ));
    }
    s
}

pub fn write_trajectory<W: Write>(
    stats: &TrajectoryStats,
    meta: &Metadata,
    mut out: W,
) -> Result<()> {
    let mut meta = meta.clone();
    meta.push(("converged".into(), stats.converged.to_string()));
    meta.push(("steps_used".into(), stats.steps_used.to_string()));
    meta.push(("resolutions".into(), stats.resolutions.to_string()));
    write_metadata(&mut out, &meta)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["step", "endorsements", "accusations", "implicated_nodes"])?;
    for r in &stats.records {
        w.write_record([
            r.step.to_string(),
            r.endorsements.to_string(),
            r.accusations.to_string(),
            r.implicated_nodes.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_verdicts<W: Write>(
    v: &VerdictLabels,
    labels: Option<&SymbolTable>,
    meta: &Metadata,
    mut out: W,
) -> Result<()> {
    write_metadata(&mut out, meta)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node", "label"])?;
    for (u, verdict) in v.as_slice().iter().enumerate() {
        let name = labels.map_or_else(|| u.to_string(), |l| l.label(u).to_string());
        w.write_record([name, verdict.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
