//! CSV dataset format.
//!
//! `graphs.csv` holds one row per undirected edge (`graph_id,u,v,weight`,
//! 0-based vertices, each edge listed once, absent pairs are 0).
//! `labels.csv` lists every graph once (`graph_id,label[,subject_id]`) and
//! fixes the dataset order.

use std::collections::HashMap;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use super::{AdjacencyMatrix, LabeledGraphDataset};
use crate::error::{Error, Result};

pub const GRAPHS_FILE: &str = "graphs.csv";
pub const LABELS_FILE: &str = "labels.csv";

struct LabelRow {
    id: String,
    label: f64,
    subject: Option<String>,
}

struct EdgeRow {
    line: u64,
    graph: usize,
    u: usize,
    v: usize,
    weight: f64,
}

/// Reads a dataset. The vertex count is `n` when given, otherwise one more
/// than the largest vertex index seen.
pub fn read_dataset(graphs: &Path, labels: &Path, n: Option<usize>) -> Result<LabeledGraphDataset> {
    let label_rows = read_labels(labels)?;
    let mut index = HashMap::with_capacity(label_rows.len());
    for (i, row) in label_rows.iter().enumerate() {
        if index.insert(row.id.clone(), i).is_some() {
            return Err(Error::invalid(format!(
                "{}: graph id {:?} listed twice",
                labels.display(),
                row.id
            )));
        }
    }
    let edges = read_edges(graphs, &index)?;
    let inferred = edges.iter().map(|e| e.u.max(e.v) + 1).max().unwrap_or(0);
    let n = match n {
        Some(n) if n < inferred => {
            return Err(Error::invalid(format!(
                "vertex index {} exceeds the configured vertex count {n}",
                inferred - 1
            )))
        }
        Some(n) => n,
        None => inferred,
    };

    let mut graphs_out: Vec<AdjacencyMatrix> = (0..label_rows.len())
        .map(|_| AdjacencyMatrix::zeros(n, false))
        .collect();
    for e in &edges {
        let g = &mut graphs_out[e.graph];
        if g.get(e.u, e.v) != 0.0 {
            return Err(parse_error(
                graphs,
                e.line,
                format!("duplicate edge ({}, {})", e.u, e.v),
            ));
        }
        g.set_edge(e.u, e.v, e.weight)
            .map_err(|err| parse_error(graphs, e.line, err.to_string()))?;
    }

    let has_subjects = label_rows.iter().any(|r| r.subject.is_some());
    if has_subjects && label_rows.iter().any(|r| r.subject.is_none()) {
        return Err(Error::invalid(format!(
            "{}: subject_id missing on some rows",
            labels.display()
        )));
    }
    let subjects = has_subjects.then(|| {
        label_rows
            .iter()
            .map(|r| r.subject.clone().unwrap_or_default())
            .collect()
    });
    let ids = label_rows.iter().map(|r| r.id.clone()).collect();
    let ys = label_rows.iter().map(|r| r.label).collect();
    LabeledGraphDataset::with_ids(graphs_out, ys, ids, subjects)
}

/// Writes `graphs.csv` and `labels.csv` into `dir`, creating it if needed.
pub fn write_dataset(ds: &LabeledGraphDataset, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    if ds.is_directed() {
        return Err(Error::invalid(
            "the CSV format stores undirected graphs only",
        ));
    }

    let mut graphs = String::from("graph_id,u,v,weight\n");
    for (id, g) in ds.graph_ids().iter().zip(ds.graphs()) {
        for u in 0..g.n() {
            for v in (u + 1)..g.n() {
                let w = g.get(u, v);
                if w != 0.0 {
                    graphs.push_str(&format!("{id},{u},{v},{w}\n"));
                }
            }
        }
    }
    let mut labels = String::from(if ds.subject_ids().is_some() {
        "graph_id,label,subject_id\n"
    } else {
        "graph_id,label\n"
    });
    for (i, (id, y)) in ds.graph_ids().iter().zip(ds.labels()).enumerate() {
        match ds.subject_ids() {
            Some(s) => labels.push_str(&format!("{id},{y},{}\n", s[i])),
            None => labels.push_str(&format!("{id},{y}\n")),
        }
    }
    write_file(&dir.join(GRAPHS_FILE), &graphs)?;
    write_file(&dir.join(LABELS_FILE), &labels)
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(contents.as_bytes())
        .map_err(|e| Error::io(path, e))
}

fn reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(file))
}

fn parse_error(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn check_header(
    path: &Path,
    rdr: &mut csv::Reader<File>,
    expected: &[&str],
    optional: usize,
) -> Result<usize> {
    let header = rdr
        .headers()
        .map_err(|e| parse_error(path, 1, e.to_string()))?
        .clone();
    let names: Vec<&str> = header.iter().collect();
    let required = expected.len() - optional;
    let ok = names.len() >= required
        && names.len() <= expected.len()
        && names.iter().zip(expected).all(|(a, b)| a == b);
    if !ok {
        return Err(parse_error(
            path,
            1,
            format!(
                "expected header {:?}, found {:?}",
                expected.join(","),
                names.join(",")
            ),
        ));
    }
    Ok(names.len())
}

fn read_labels(path: &Path) -> Result<Vec<LabelRow>> {
    let mut rdr = reader(path)?;
    let width = check_header(path, &mut rdr, &["graph_id", "label", "subject_id"], 1)?;
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != width {
            return Err(parse_error(
                path,
                line,
                format!("expected {width} fields, found {}", record.len()),
            ));
        }
        let label: f64 = record[1].parse().map_err(|_| {
            parse_error(
                path,
                line,
                format!("label {:?} is not a number", &record[1]),
            )
        })?;
        if !label.is_finite() {
            return Err(parse_error(path, line, "label must be finite"));
        }
        rows.push(LabelRow {
            id: record[0].to_string(),
            label,
            subject: (width == 3).then(|| record[2].to_string()),
        });
    }
    Ok(rows)
}

fn read_edges(path: &Path, index: &HashMap<String, usize>) -> Result<Vec<EdgeRow>> {
    let mut rdr = reader(path)?;
    check_header(path, &mut rdr, &["graph_id", "u", "v", "weight"], 0)?;
    let mut edges = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 4 {
            return Err(parse_error(
                path,
                line,
                format!("expected 4 fields, found {}", record.len()),
            ));
        }
        let graph = *index.get(&record[0]).ok_or_else(|| {
            parse_error(
                path,
                line,
                format!("graph id {:?} has no label", &record[0]),
            )
        })?;
        let vertex = |s: &str| {
            s.parse::<usize>().map_err(|_| {
                parse_error(
                    path,
                    line,
                    format!("vertex {s:?} is not a nonnegative integer"),
                )
            })
        };
        let u = vertex(&record[1])?;
        let v = vertex(&record[2])?;
        let weight: f64 = record[3].parse().map_err(|_| {
            parse_error(
                path,
                line,
                format!("weight {:?} is not a number", &record[3]),
            )
        })?;
        if u == v {
            return Err(parse_error(path, line, format!("self-loop at vertex {u}")));
        }
        if !weight.is_finite() {
            return Err(parse_error(path, line, "weight must be finite"));
        }
        edges.push(EdgeRow {
            line,
            graph,
            u,
            v,
            weight,
        });
    }
    Ok(edges)
}
