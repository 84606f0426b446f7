use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use kql_core::engine::{parse_cell, schema_of, Schema};
use kql_core::{Registry, Table};

use crate::{table_path, CmdResult, Config, Io, WithStatus, EXIT_INGEST, EXIT_USAGE};

/// Reads a CSV file whose header names exactly the schema's fields, in any
/// order. Line numbers in errors are 1-based file lines.
pub fn read_csv(name: &str, schema: Schema, path: &Path) -> Result<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .with_context(|| format!("E_IO: {}", path.display()))?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let wanted: BTreeSet<&str> = schema.iter().map(|(n, _)| n.as_str()).collect();
    let got: BTreeSet<&str> = header.iter().map(String::as_str).collect();
    if got.len() != header.len() || got != wanted {
        let missing: Vec<_> = wanted.difference(&got).collect();
        let extra: Vec<_> = got.difference(&wanted).collect();
        bail!("E_ROW: line 1: header does not match {name}: missing {missing:?}, unexpected {extra:?}");
    }
    let order: Vec<usize> = schema
        .iter()
        .map(|(n, _)| header.iter().position(|h| h == n).expect("header checked"))
        .collect();

    let mut table = Table::new(name, schema);
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            anyhow!("E_ROW: line {line}: {e}")
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let mut row = Vec::with_capacity(order.len());
        for (&col, (field, ty)) in order.iter().zip(&table.schema) {
            let cell = record.get(col).unwrap_or_default();
            row.push(parse_cell(cell, *ty).map_err(|m| anyhow!("E_TYPE: line {line}: {field}: {m}"))?);
        }
        table.rows.push(row);
    }
    Ok(table)
}

fn read_jsonl(name: &str, schema: Schema, path: &Path) -> Result<Table> {
    let file = File::open(path).with_context(|| format!("E_IO: {}", path.display()))?;
    Ok(Table::from_jsonl(name, schema, BufReader::new(file))?.table)
}

/// Converts `input` into `<dir>/<table>.jsonl` and returns the row count.
pub fn ingest(input: &Path, table: &str, registry: &Registry, dir: &Path) -> Result<usize> {
    let def = registry
        .table(table)
        .ok_or_else(|| anyhow!("E_UNKNOWN_TABLE: the registry declares no table {table:?}"))?;
    let schema = schema_of(def);
    let ext = input.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
    let loaded = match ext.as_str() {
        "csv" => read_csv(table, schema, input)?,
        "jsonl" | "json" | "ndjson" => read_jsonl(table, schema, input)?,
        _ => bail!("cannot tell the format of {}: use a .csv or .jsonl extension", input.display()),
    };
    fs::create_dir_all(dir).with_context(|| format!("E_IO: {}", dir.display()))?;
    let target = table_path(dir, table);
    let mut out = BufWriter::new(File::create(&target).with_context(|| format!("E_IO: {}", target.display()))?);
    loaded.write_jsonl(&mut out)?;
    out.flush()?;
    Ok(loaded.rows.len())
}

pub fn run(input: &Path, table: &str, config: &Config, io: &mut Io<'_>) -> CmdResult {
    let registry = config.load_registry()?;
    let dir = config
        .data
        .as_ref()
        .ok_or_else(|| crate::usage("ingest needs --data DIR to write into"))?;
    let n = ingest(input, table, &registry, dir).status(EXIT_INGEST)?;
    writeln!(io.stdout, "ingested {n} rows into {}", table_path(dir, table).display()).status(EXIT_USAGE)
}
