//! Edge-list and label CSV files, and the on-disk pair directory.
//!
//! A pair directory holds `a1.csv` and `a2.csv` (undirected edges, one row
//! per edge, unit weights), `labels.csv` (optional) and `meta.txt`, the
//! vertex manifest with one name per line in canonical order.

use std::fmt::Write as _;
use std::fs;
use std::io::Read;
use std::path::Path;

use jointgraph_core::graph::{drop_isolated, preprocess, sparsity};
use jointgraph_core::{GraphPair, SimpleGraph, VertexTable, WeightedDigraph};

use crate::error::{Error, Result};

pub const EDGE_HEADER: [&str; 3] = ["source", "target", "weight"];
pub const LABEL_HEADER: [&str; 2] = ["vertex", "label"];

pub const A1_FILE: &str = "a1.csv";
pub const A2_FILE: &str = "a2.csv";
pub const LABELS_FILE: &str = "labels.csv";
pub const MANIFEST_FILE: &str = "meta.txt";
pub const STATS_FILE: &str = "stats.txt";

/// One `source,target,weight` row.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRow {
    pub source: String,
    pub target: String,
    pub weight: f64,
}

fn open(path: &Path) -> Result<fs::File> {
    fs::File::open(path).map_err(|e| Error::io(path, e))
}

fn csv_reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(r)
}

fn map_csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        csv::ErrorKind::UnequalLengths {
            expected_len, len, ..
        } => Error::parse(
            path,
            line,
            format!("expected {expected_len} fields, found {len}"),
        ),
        csv::ErrorKind::Utf8 { err, .. } => {
            Error::parse(path, line, format!("invalid UTF-8: {err}"))
        }
        other => Error::parse(path, line, format!("{other:?}")),
    }
}

fn check_header<R: Read>(rdr: &mut csv::Reader<R>, path: &Path, expected: &[&str]) -> Result<()> {
    let header = rdr.headers().map_err(|e| map_csv_error(path, e))?;
    let got: Vec<&str> = header.iter().collect();
    if got != expected {
        return Err(Error::parse(
            path,
            1,
            format!(
                "expected header `{}`, found `{}`",
                expected.join(","),
                got.join(",")
            ),
        ));
    }
    Ok(())
}

/// Parses edge-list CSV text. `path` only labels error messages.
pub fn parse_edge_list<R: Read>(reader: R, path: &Path) -> Result<Vec<EdgeRow>> {
    let mut rdr = csv_reader(reader);
    check_header(&mut rdr, path, &EDGE_HEADER)?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| map_csv_error(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        let (source, target, weight) = (&rec[0], &rec[1], &rec[2]);
        if source.is_empty() || target.is_empty() {
            return Err(Error::parse(path, line, "empty vertex name"));
        }
        let weight: f64 = weight
            .parse()
            .map_err(|_| Error::parse(path, line, format!("weight {weight:?} is not a number")))?;
        if !weight.is_finite() {
            return Err(Error::parse(
                path,
                line,
                format!("weight {weight} is not finite"),
            ));
        }
        if weight < 0.0 {
            return Err(Error::Validation(format!(
                "{}:{line}: negative weight {weight}",
                path.display()
            )));
        }
        rows.push(EdgeRow {
            source: source.to_string(),
            target: target.to_string(),
            weight,
        });
    }
    Ok(rows)
}

pub fn read_edge_rows(path: &Path) -> Result<Vec<EdgeRow>> {
    parse_edge_list(open(path)?, path)
}

fn named(rows: &[EdgeRow]) -> impl Iterator<Item = (&str, &str, f64)> + Clone {
    rows.iter()
        .map(|r| (r.source.as_str(), r.target.as_str(), r.weight))
}

/// Loads an edge list; vertices are the sorted union of names that appear.
pub fn load_edge_list(path: &Path) -> Result<WeightedDigraph> {
    let rows = read_edge_rows(path)?;
    Ok(WeightedDigraph::from_named_arcs(named(&rows))?)
}

/// Parses `vertex,label` rows.
pub fn parse_labels<R: Read>(reader: R, path: &Path) -> Result<Vec<(String, String)>> {
    let mut rdr = csv_reader(reader);
    check_header(&mut rdr, path, &LABEL_HEADER)?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| map_csv_error(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec[0].is_empty() {
            return Err(Error::parse(path, line, "empty vertex name"));
        }
        if rec[1].is_empty() {
            return Err(Error::Validation(format!(
                "{}:{line}: empty label for vertex {:?}",
                path.display(),
                &rec[0]
            )));
        }
        rows.push((rec[0].to_string(), rec[1].to_string()));
    }
    Ok(rows)
}

pub fn read_label_rows(path: &Path) -> Result<Vec<(String, String)>> {
    parse_labels(open(path)?, path)
}

/// Attaches the labels in `path` to `table`.
pub fn load_labels(path: &Path, table: VertexTable) -> Result<VertexTable> {
    let rows = read_label_rows(path)?;
    Ok(table.with_labels(rows.iter().map(|(v, l)| (v.as_str(), l.as_str())))?)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn edge_list_csv(g: &SimpleGraph) -> String {
    let names = g.vertices().names();
    let mut out = String::from("source,target,weight\n");
    for (i, j) in g.edges() {
        let _ = writeln!(out, "{},{},1", names[i], names[j]);
    }
    out
}

pub fn labels_csv(t: &VertexTable) -> Option<String> {
    let labels = t.labels()?;
    let mut out = String::from("vertex,label\n");
    for (name, label) in t.names().iter().zip(labels) {
        let _ = writeln!(out, "{name},{label}");
    }
    Some(out)
}

/// Writes the pair directory layout; creates `dir` if needed.
pub fn write_pair_dir(dir: &Path, pair: &GraphPair) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_file(&dir.join(A1_FILE), &edge_list_csv(pair.g1()))?;
    write_file(&dir.join(A2_FILE), &edge_list_csv(pair.g2()))?;
    let mut manifest = String::new();
    for name in pair.vertices().names() {
        manifest.push_str(name);
        manifest.push('\n');
    }
    write_file(&dir.join(MANIFEST_FILE), &manifest)?;
    match labels_csv(pair.vertices()) {
        Some(csv) => write_file(&dir.join(LABELS_FILE), &csv)?,
        None => {
            let p = dir.join(LABELS_FILE);
            if p.exists() {
                fs::remove_file(&p).map_err(|e| Error::io(&p, e))?;
            }
        }
    }
    Ok(())
}

fn read_manifest(path: &Path) -> Result<VertexTable> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let names: Vec<&str> = text
        .lines()
        .map(str::trim_end)
        .filter(|l| !l.is_empty())
        .collect();
    let table = VertexTable::from_names(names.iter().copied());
    if table
        .names()
        .iter()
        .map(String::as_str)
        .ne(names.iter().copied())
    {
        return Err(Error::Validation(format!(
            "{}: manifest names must be unique and in sorted order",
            path.display()
        )));
    }
    if table.is_empty() {
        return Err(Error::Validation(format!(
            "{}: empty manifest",
            path.display()
        )));
    }
    Ok(table)
}

/// Reads a pair directory, refusing files that disagree with the manifest.
/// Labels are attached when `labels.csv` exists.
pub fn read_pair_dir(dir: &Path) -> Result<GraphPair> {
    let mut table = read_manifest(&dir.join(MANIFEST_FILE))?;
    let labels_path = dir.join(LABELS_FILE);
    if labels_path.exists() {
        table = load_labels(&labels_path, table)?;
    }
    let load = |file: &str| -> Result<SimpleGraph> {
        let path = dir.join(file);
        let rows = read_edge_rows(&path)?;
        let g = WeightedDigraph::on_table(table.clone(), named(&rows)).map_err(|e| {
            Error::Validation(format!("{}: disagrees with manifest: {e}", path.display()))
        })?;
        Ok(preprocess(&g))
    };
    Ok(GraphPair::new(load(A1_FILE)?, load(A2_FILE)?)?)
}

/// Counts for one input graph before and after preprocessing.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphStats {
    pub vertices_in_file: usize,
    pub arcs: usize,
    pub loops: usize,
    /// Non-loop arcs over `n (n - 1)` on the file's own vertices.
    pub directed_density: f64,
    /// Undirected edges after preprocessing on the union vertex set.
    pub edges: usize,
    pub isolated: usize,
    pub sparsity: f64,
    /// Edges and sparsity after isolated vertices were dropped.
    pub kept_edges: usize,
    pub kept_sparsity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreprocessReport {
    pub union_vertices: usize,
    pub kept_vertices: usize,
    pub g1: GraphStats,
    pub g2: GraphStats,
    /// `(label, count, percent)` over every labeled vertex.
    pub label_proportions: Vec<(String, usize, f64)>,
    /// The same over the vertices kept after dropping isolated ones.
    pub kept_label_proportions: Vec<(String, usize, f64)>,
}

impl PreprocessReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "union_vertices: {}", self.union_vertices);
        let _ = writeln!(out, "kept_vertices: {}", self.kept_vertices);
        for (name, s) in [("g1", &self.g1), ("g2", &self.g2)] {
            let _ = writeln!(out, "{name}.vertices_in_file: {}", s.vertices_in_file);
            let _ = writeln!(out, "{name}.arcs: {}", s.arcs);
            let _ = writeln!(out, "{name}.loops: {}", s.loops);
            let _ = writeln!(out, "{name}.directed_density: {:.6}", s.directed_density);
            let _ = writeln!(out, "{name}.edges: {}", s.edges);
            let _ = writeln!(out, "{name}.isolated: {}", s.isolated);
            let _ = writeln!(out, "{name}.sparsity: {:.6}", s.sparsity);
            let _ = writeln!(out, "{name}.kept_edges: {}", s.kept_edges);
            let _ = writeln!(out, "{name}.kept_sparsity: {:.6}", s.kept_sparsity);
        }
        for (label, count, pct) in &self.label_proportions {
            let _ = writeln!(out, "label.{label}: {count} ({pct:.2}%)");
        }
        for (label, count, pct) in &self.kept_label_proportions {
            let _ = writeln!(out, "kept_label.{label}: {count} ({pct:.2}%)");
        }
        out
    }
}

/// Output of the full ingestion pipeline.
#[derive(Debug, Clone)]
pub struct Preprocessed {
    pub pair: GraphPair,
    pub report: PreprocessReport,
}

/// Loads both edge lists and the labels onto their union vertex set,
/// binarizes, and drops vertices isolated in either graph.
pub fn preprocess_files(edges_a: &Path, edges_b: &Path, labels: &Path) -> Result<Preprocessed> {
    let rows_a = read_edge_rows(edges_a)?;
    let rows_b = read_edge_rows(edges_b)?;
    let label_rows = read_label_rows(labels)?;

    let own_a = WeightedDigraph::from_named_arcs(named(&rows_a))?;
    let own_b = WeightedDigraph::from_named_arcs(named(&rows_b))?;

    let all_names = rows_a
        .iter()
        .chain(&rows_b)
        .flat_map(|r| [r.source.as_str(), r.target.as_str()])
        .chain(label_rows.iter().map(|(v, _)| v.as_str()));
    let table = VertexTable::from_names(all_names)
        .with_labels(label_rows.iter().map(|(v, l)| (v.as_str(), l.as_str())))
        .map_err(|e| Error::Validation(format!("{}: {e}", labels.display())))?;

    let g1 = preprocess(&own_a.reindexed(&table)?);
    let g2 = preprocess(&own_b.reindexed(&table)?);
    let full = GraphPair::new(g1, g2)?;
    let (pair, _) = drop_isolated(&full)?;

    let stats =
        |own: &WeightedDigraph, g: &SimpleGraph, kept: &SimpleGraph| -> Result<GraphStats> {
            let n = own.vertex_count();
            let non_loops = own.arc_count() - own.loop_count();
            Ok(GraphStats {
                vertices_in_file: n,
                arcs: own.arc_count(),
                loops: own.loop_count(),
                directed_density: if n > 1 {
                    non_loops as f64 / (n * (n - 1)) as f64
                } else {
                    0.0
                },
                edges: g.edge_count(),
                isolated: (0..g.n()).filter(|&i| g.degree(i) == 0).count(),
                sparsity: sparsity(g)?,
                kept_edges: kept.edge_count(),
                kept_sparsity: if kept.n() > 1 { sparsity(kept)? } else { 0.0 },
            })
        };
    let report = PreprocessReport {
        union_vertices: full.n(),
        kept_vertices: pair.n(),
        g1: stats(&own_a, full.g1(), pair.g1())?,
        g2: stats(&own_b, full.g2(), pair.g2())?,
        label_proportions: label_proportions(full.vertices()),
        kept_label_proportions: label_proportions(pair.vertices()),
    };
    Ok(Preprocessed { pair, report })
}

fn label_proportions(t: &VertexTable) -> Vec<(String, usize, f64)> {
    let Some((classes, idx)) = t.label_classes() else {
        return Vec::new();
    };
    let mut counts = vec![0usize; classes.len()];
    for i in idx {
        counts[i] += 1;
    }
    let n = t.len() as f64;
    classes
        .into_iter()
        .zip(counts)
        .map(|(c, k)| (c, k, 100.0 * k as f64 / n))
        .collect()
}

/// Writes the preprocessed pair plus `stats.txt` into `dir`.
pub fn write_preprocessed(dir: &Path, p: &Preprocessed) -> Result<()> {
    write_pair_dir(dir, &p.pair)?;
    write_file(&dir.join(STATS_FILE), &p.report.render())
}

/// Reads a probability matrix: one row per line, entries separated by
/// commas and/or whitespace; blank lines and `#` comments are skipped.
pub fn read_matrix(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_matrix(&text, path)
}

pub fn parse_matrix(text: &str, path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let row = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| Error::parse(path, i as u64 + 1, format!("{t:?} is not a number")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(rows)
}
