//! Delimited-text loading. Node file header: `id,label,<features...>`;
//! edge file header: `src,dst`. Comma or tab, detected from the header line.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use super::{AttributedGraph, FeatureKind, GraphBuilder, GraphSchema, LoadReport, RawValue};
use crate::error::{Error, Result};

pub fn read_schema(path: impl AsRef<Path>) -> Result<GraphSchema> {
    let file = File::open(path)?;
    Ok(serde_json::from_reader(std::io::BufReader::new(file))?)
}

pub fn load_graph_files(
    nodes: impl AsRef<Path>,
    edges: impl AsRef<Path>,
    schema: GraphSchema,
) -> Result<(AttributedGraph, LoadReport)> {
    load_graph(File::open(nodes)?, File::open(edges)?, schema)
}

pub fn load_graph<N: Read, E: Read>(
    mut nodes: N,
    mut edges: E,
    schema: GraphSchema,
) -> Result<(AttributedGraph, LoadReport)> {
    let mut text = String::new();
    nodes.read_to_string(&mut text)?;
    let mut builder = GraphBuilder::new(schema.clone());
    read_nodes(&text, &schema, &mut builder)?;

    text.clear();
    edges.read_to_string(&mut text)?;
    read_edges(&text, &mut builder)?;

    let (graph, report) = builder.build();
    if report.self_loops > 0 {
        tracing::warn!(count = report.self_loops, "dropped self-loops");
    }
    if report.duplicate_edges > 0 {
        tracing::warn!(
            count = report.duplicate_edges,
            "collapsed duplicate edges (directed input is symmetrized)"
        );
    }
    if !report.isolated.is_empty() {
        tracing::warn!(count = report.isolated.len(), "dropped zero-degree nodes");
    }
    Ok((graph, report))
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    let header = text.lines().next().unwrap_or("");
    let delimiter = if header.contains('\t') { b'\t' } else { b',' };
    csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn csv_error(source: &str, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::load(source, line, e.to_string())
}

fn read_nodes(text: &str, schema: &GraphSchema, builder: &mut GraphBuilder) -> Result<()> {
    const SRC: &str = "node file";
    let mut rdr = reader(text);
    let header = rdr.headers().map_err(|e| csv_error(SRC, e))?.clone();
    if header.get(0) != Some("id") || header.get(1) != Some("label") {
        return Err(Error::load(SRC, 1, "header must start with `id,label`"));
    }
    let mut columns = Vec::with_capacity(schema.len());
    for spec in schema.features() {
        let col = header
            .iter()
            .skip(2)
            .position(|h| h == spec.name)
            .ok_or_else(|| Error::load(SRC, 1, format!("missing column for feature {:?}", spec.name)))?;
        columns.push(col + 2);
    }

    let mut values = Vec::with_capacity(schema.len());
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(SRC, e))?;
        let line = line_of(&record);
        if record.len() != header.len() {
            return Err(Error::load(
                SRC,
                line,
                format!("expected {} fields, found {}", header.len(), record.len()),
            ));
        }
        values.clear();
        for (spec, &col) in schema.features().iter().zip(&columns) {
            let cell = &record[col];
            if cell.is_empty() {
                return Err(Error::load(SRC, line, format!("missing value for feature {:?}", spec.name)));
            }
            values.push(match spec.kind {
                FeatureKind::Numerical => {
                    let x: f64 = cell.parse().map_err(|_| {
                        Error::load(SRC, line, format!("feature {:?}: {cell:?} is not a number", spec.name))
                    })?;
                    if !x.is_finite() {
                        return Err(Error::load(
                            SRC,
                            line,
                            format!("feature {:?}: non-finite value {cell:?}", spec.name),
                        ));
                    }
                    RawValue::Num(x)
                }
                FeatureKind::Categorical => RawValue::Cat(cell.to_string()),
            });
        }
        builder
            .add_node(&record[0], &record[1], values.drain(..))
            .map_err(|e| Error::load(SRC, line, e.to_string()))?;
    }
    Ok(())
}

fn read_edges(text: &str, builder: &mut GraphBuilder) -> Result<()> {
    const SRC: &str = "edge file";
    let mut rdr = reader(text);
    let header = rdr.headers().map_err(|e| csv_error(SRC, e))?.clone();
    if header.get(0) != Some("src") || header.get(1) != Some("dst") {
        return Err(Error::load(SRC, 1, "header must be `src,dst`"));
    }
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(SRC, e))?;
        let line = line_of(&record);
        if record.len() != 2 {
            return Err(Error::load(SRC, line, format!("expected 2 fields, found {}", record.len())));
        }
        builder
            .add_edge(&record[0], &record[1])
            .map_err(|e| Error::load(SRC, line, e.to_string()))?;
    }
    Ok(())
}
