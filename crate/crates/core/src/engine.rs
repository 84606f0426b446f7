//! In-memory executor for plain SQL and MongoDB query documents over
//! JSONL-backed tables.
//!
//! Rows are complete at load time, so there are no NULLs. Comparisons are
//! typed by the column: strings by code point, integers numerically,
//! timestamps by UTC instant. Row order is input order; DISTINCT keeps the
//! first occurrence.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use thiserror::Error;

use crate::ast::{CmpOp, Condition, FromItem, Literal, PlainQuery, Projection, Select};
use crate::mongo::{Filter, MongoQueryDoc, Verb};
use crate::registry::{Registry, TableDef};
use crate::rewriter::SqlQuery;
use crate::value::{Timestamp, Value, ValueType};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("E_IO: {path}: {message}")]
    Io { path: String, message: String },
    #[error("E_ROW: line {line}: {field}: {message}")]
    Row { line: usize, field: String, message: String },
    #[error("E_TYPE: line {line}: {field}: {message}")]
    Type { line: usize, field: String, message: String },
    #[error("E_UNKNOWN_TABLE: no table named {0:?}")]
    UnknownTable(String),
    #[error("E_UNKNOWN_FIELD: no field {field:?} in {relation}")]
    UnknownField { relation: String, field: String },
    #[error("E_TYPE_MISMATCH: {field} is {expected} but is compared with {literal}")]
    TypeMismatch { field: String, expected: ValueType, literal: String },
    #[error("E_TYPE_MISMATCH: UNION ALL branches project {left} and {right} columns")]
    UnionArity { left: usize, right: usize },
}

impl EngineError {
    pub fn code(&self) -> &'static str {
        match self {
            EngineError::Io { .. } => "E_IO",
            EngineError::Row { .. } => "E_ROW",
            EngineError::Type { .. } => "E_TYPE",
            EngineError::UnknownTable(_) => "E_UNKNOWN_TABLE",
            EngineError::UnknownField { .. } => "E_UNKNOWN_FIELD",
            EngineError::TypeMismatch { .. } | EngineError::UnionArity { .. } => "E_TYPE_MISMATCH",
        }
    }
}

pub type Schema = Vec<(String, ValueType)>;

/// Column names and types of a registry table.
pub fn schema_of(table: &TableDef) -> Schema {
    table.fields.iter().map(|f| (f.field.clone(), f.value_type)).collect()
}

/// Parses one textual cell (CSV, or a JSON string) as `ty`.
pub fn parse_cell(text: &str, ty: ValueType) -> Result<Value, String> {
    match ty {
        ValueType::String => Ok(Value::Str(text.to_string())),
        ValueType::Integer => text
            .trim()
            .parse::<i64>()
            .map(Value::Int)
            .map_err(|_| format!("{text:?} is not an integer")),
        ValueType::Timestamp => Timestamp::parse(text)
            .map(Value::Ts)
            .ok_or_else(|| format!("{text:?} is not a YYYY-MM-DD HH:MM:SS±HH:MM timestamp")),
    }
}

fn json_cell(v: &serde_json::Value, ty: ValueType) -> Result<Value, String> {
    match (v, ty) {
        (serde_json::Value::String(s), ValueType::String | ValueType::Timestamp) => parse_cell(s, ty),
        (serde_json::Value::Number(n), ValueType::Integer) => {
            n.as_i64().map(Value::Int).ok_or_else(|| format!("{n} is not a 64-bit integer"))
        }
        (other, _) => Err(format!("{other} is not a {ty}")),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub name: String,
    pub schema: Schema,
    pub rows: Vec<Vec<Value>>,
}

/// A loaded table plus the number of rows that carried keys outside the
/// schema.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub table: Table,
    pub extra_key_rows: usize,
}

impl Table {
    pub fn new(name: impl Into<String>, schema: Schema) -> Table {
        Table {
            name: name.into(),
            schema,
            rows: Vec::new(),
        }
    }

    /// Reads JSONL, one object per line; blank lines are skipped.
    pub fn from_jsonl(name: &str, schema: Schema, reader: impl BufRead) -> Result<Loaded, EngineError> {
        let mut table = Table::new(name, schema);
        let mut extra_key_rows = 0;
        for (i, line) in reader.lines().enumerate() {
            let line_no = i + 1;
            let line = line.map_err(|e| EngineError::Io {
                path: name.to_string(),
                message: e.to_string(),
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let row_err = |field: &str, message: String| EngineError::Row {
                line: line_no,
                field: field.to_string(),
                message,
            };
            let obj: serde_json::Map<String, serde_json::Value> =
                serde_json::from_str(&line).map_err(|e| row_err("<row>", format!("not a JSON object: {e}")))?;
            let mut row = Vec::with_capacity(table.schema.len());
            for (field, ty) in &table.schema {
                let v = match obj.get(field) {
                    None | Some(serde_json::Value::Null) => return Err(row_err(field, "missing".into())),
                    Some(v) => v,
                };
                row.push(json_cell(v, *ty).map_err(|message| EngineError::Type {
                    line: line_no,
                    field: field.clone(),
                    message,
                })?);
            }
            if obj.len() > table.schema.len() {
                extra_key_rows += 1;
            }
            table.rows.push(row);
        }
        Ok(Loaded { table, extra_key_rows })
    }

    pub fn column_index(&self, field: &str) -> Option<usize> {
        self.schema.iter().position(|(n, _)| n == field)
    }

    /// Writes the table as JSONL with keys in schema order.
    pub fn write_jsonl(&self, mut out: impl Write) -> std::io::Result<()> {
        let names: Vec<&str> = self.schema.iter().map(|(n, _)| n.as_str()).collect();
        for row in &self.rows {
            writeln!(out, "{}", jsonl_line(&names, row))?;
        }
        Ok(())
    }
}

/// Loads `path` as table `name` with `schema`.
pub fn load_table(path: impl AsRef<Path>, name: &str, schema: Schema) -> Result<Loaded, EngineError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| EngineError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    Table::from_jsonl(name, schema, BufReader::new(file))
}

/// A set of loaded tables addressed by name.
#[derive(Debug, Clone, Default)]
pub struct Database {
    tables: HashMap<String, Table>,
}

impl Database {
    pub fn new() -> Database {
        Database::default()
    }

    pub fn insert(&mut self, table: Table) {
        self.tables.insert(table.name.clone(), table);
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.get(name)
    }

    /// Loads `<dir>/<table>.jsonl` for every registry table that has a file.
    pub fn load_dir(dir: impl AsRef<Path>, registry: &Registry) -> Result<Database, EngineError> {
        let dir = dir.as_ref();
        if !dir.is_dir() {
            return Err(EngineError::Io {
                path: dir.display().to_string(),
                message: "not a directory".into(),
            });
        }
        let mut db = Database::new();
        for def in registry.tables() {
            let path = dir.join(format!("{}.jsonl", def.name));
            if path.is_file() {
                db.insert(load_table(&path, &def.name, schema_of(def))?.table);
            }
        }
        Ok(db)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ResultSet {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

fn jsonl_line(names: &[&str], row: &[Value]) -> String {
    let mut line = String::from("{");
    for (i, (name, v)) in names.iter().zip(row).enumerate() {
        if i > 0 {
            line.push(',');
        }
        line.push_str(&serde_json::to_string(name).expect("serializes"));
        line.push(':');
        line.push_str(&v.to_json().to_string());
    }
    line.push('}');
    line
}

impl ResultSet {
    pub fn write_jsonl(&self, mut out: impl Write) -> std::io::Result<()> {
        let names: Vec<&str> = self.columns.iter().map(String::as_str).collect();
        for row in &self.rows {
            writeln!(out, "{}", jsonl_line(&names, row))?;
        }
        Ok(())
    }

    /// RFC 4180 CSV with a header row.
    pub fn write_csv(&self, out: impl Write) -> std::io::Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.flush()
    }

    /// Header line then one tab-separated line per row.
    pub fn write_table(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "{}", self.columns.join("\t"))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", cells.join("\t"))?;
        }
        Ok(())
    }

    /// Parses output of [`ResultSet::write_jsonl`]. Cells come back as
    /// strings or integers.
    pub fn read_jsonl(columns: Vec<String>, reader: impl BufRead) -> Result<ResultSet, EngineError> {
        let mut rows = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| EngineError::Io {
                path: "<results>".into(),
                message: e.to_string(),
            })?;
            let obj: serde_json::Map<String, serde_json::Value> = serde_json::from_str(&line).map_err(|e| EngineError::Row {
                line: i + 1,
                field: "<row>".into(),
                message: e.to_string(),
            })?;
            let mut row = Vec::with_capacity(columns.len());
            for c in &columns {
                row.push(match obj.get(c) {
                    Some(serde_json::Value::String(s)) => Value::Str(s.clone()),
                    Some(serde_json::Value::Number(n)) if n.is_i64() => Value::Int(n.as_i64().expect("i64")),
                    _ => {
                        return Err(EngineError::Row {
                            line: i + 1,
                            field: c.clone(),
                            message: "missing or not a string/integer".into(),
                        })
                    }
                });
            }
            rows.push(row);
        }
        Ok(ResultSet { columns, rows })
    }
}

/// Compiled predicate over a row.
enum Pred {
    Const(bool),
    Cmp { idx: usize, op: CmpOp, value: Value },
    Not(Box<Pred>),
    And(Vec<Pred>),
    Or(Vec<Pred>),
}

impl Pred {
    fn eval(&self, row: &[Value]) -> bool {
        match self {
            Pred::Const(b) => *b,
            Pred::Cmp { idx, op, value } => row[*idx].compare(value).is_some_and(|ord| op.holds(ord)),
            Pred::Not(p) => !p.eval(row),
            Pred::And(ps) => ps.iter().all(|p| p.eval(row)),
            Pred::Or(ps) => ps.iter().any(|p| p.eval(row)),
        }
    }
}

struct Columns<'a> {
    relation: &'a str,
    schema: &'a [(String, ValueType)],
}

impl Columns<'_> {
    fn index(&self, field: &str) -> Result<(usize, ValueType), EngineError> {
        self.schema
            .iter()
            .position(|(n, _)| n == field)
            .map(|i| (i, self.schema[i].1))
            .ok_or_else(|| EngineError::UnknownField {
                relation: self.relation.to_string(),
                field: field.to_string(),
            })
    }

    fn comparison(&self, field: &str, op: CmpOp, literal: &Literal) -> Result<Pred, EngineError> {
        let (idx, ty) = self.index(field)?;
        let value = match (ty, literal) {
            (ValueType::String, Literal::Str(s)) => Some(Value::Str(s.clone())),
            (ValueType::Integer, Literal::Int(i)) => Some(Value::Int(*i)),
            (ValueType::Timestamp, Literal::Str(s)) => Timestamp::parse(s).map(Value::Ts),
            _ => None,
        };
        let value = value.ok_or_else(|| EngineError::TypeMismatch {
            field: field.to_string(),
            expected: ty,
            literal: literal.to_string(),
        })?;
        Ok(Pred::Cmp { idx, op, value })
    }

    fn condition(&self, c: &Condition<String>) -> Result<Pred, EngineError> {
        Ok(match c {
            Condition::Compare(cmp) => self.comparison(&cmp.operand, cmp.op, &cmp.literal)?,
            Condition::Paren(inner) => self.condition(inner)?,
            Condition::Not(inner) => Pred::Not(Box::new(self.condition(inner)?)),
            Condition::And(l, r) => Pred::And(vec![self.condition(l)?, self.condition(r)?]),
            Condition::Or(l, r) => Pred::Or(vec![self.condition(l)?, self.condition(r)?]),
        })
    }

    fn filter(&self, f: &Filter) -> Result<Pred, EngineError> {
        Ok(match f {
            Filter::Eq { field, value } => self.comparison(field, CmpOp::Eq, value)?,
            Filter::Op { field, op, value } => self.comparison(field, op.cmp_op(), value)?,
            Filter::And(parts) if parts.is_empty() => Pred::Const(true),
            Filter::Or(parts) if parts.is_empty() => Pred::Const(false),
            Filter::And(parts) => Pred::And(parts.iter().map(|p| self.filter(p)).collect::<Result<_, _>>()?),
            Filter::Or(parts) => Pred::Or(parts.iter().map(|p| self.filter(p)).collect::<Result<_, _>>()?),
        })
    }

    fn projection(&self, fields: &[String]) -> Result<Vec<usize>, EngineError> {
        fields.iter().map(|f| self.index(f).map(|(i, _)| i)).collect()
    }
}

/// An intermediate relation.
struct Rel {
    schema: Schema,
    rows: Vec<Vec<Value>>,
}

fn scan(rows: &[Vec<Value>], preds: &[Pred], indices: &[usize], distinct: bool) -> Vec<Vec<Value>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for row in rows {
        if !preds.iter().all(|p| p.eval(row)) {
            continue;
        }
        let projected: Vec<Value> = indices.iter().map(|&i| row[i].clone()).collect();
        if distinct && !seen.insert(projected.clone()) {
            continue;
        }
        out.push(projected);
    }
    out
}

fn is_flattenable(q: &PlainQuery) -> Option<(&str, Option<&Condition<String>>)> {
    match q.branches.as_slice() {
        [Select {
            distinct: false,
            projection: Projection::Star,
            from: FromItem::Table(t),
            selection,
        }] => Some((t.as_str(), selection.as_ref())),
        _ => None,
    }
}

type Conditions<'a> = Vec<&'a Condition<String>>;

fn eval_select(s: &Select<String, String>, db: &Database) -> Result<Rel, EngineError> {
    let materialized;
    let (relation, schema, rows, mut conditions): (&str, &Schema, &[Vec<Value>], Conditions<'_>) =
        match &s.from {
            FromItem::Table(t) => {
                let table = db.table(t).ok_or_else(|| EngineError::UnknownTable(t.clone()))?;
                (t.as_str(), &table.schema, &table.rows, Vec::new())
            }
            FromItem::Subquery { query, alias } => match is_flattenable(query) {
                Some((t, inner)) => {
                    let table = db.table(t).ok_or_else(|| EngineError::UnknownTable(t.to_string()))?;
                    (alias.as_str(), &table.schema, &table.rows, inner.into_iter().collect())
                }
                None => {
                    materialized = eval_query(query, db)?;
                    (alias.as_str(), &materialized.schema, &materialized.rows, Vec::new())
                }
            },
        };
    conditions.extend(s.selection.as_ref());
    let cols = Columns { relation, schema };
    let preds = conditions.iter().map(|c| cols.condition(c)).collect::<Result<Vec<_>, _>>()?;
    let indices = match &s.projection {
        Projection::Star => (0..schema.len()).collect(),
        Projection::Columns(fields) => cols.projection(fields)?,
    };
    Ok(Rel {
        schema: indices.iter().map(|&i| schema[i].clone()).collect(),
        rows: scan(rows, &preds, &indices, s.distinct),
    })
}

fn eval_query(q: &PlainQuery, db: &Database) -> Result<Rel, EngineError> {
    let mut out: Option<Rel> = None;
    for branch in &q.branches {
        let rel = eval_select(branch, db)?;
        match &mut out {
            None => out = Some(rel),
            Some(acc) => {
                if acc.schema.len() != rel.schema.len() {
                    return Err(EngineError::UnionArity {
                        left: acc.schema.len(),
                        right: rel.schema.len(),
                    });
                }
                acc.rows.extend(rel.rows);
            }
        }
    }
    Ok(out.unwrap_or(Rel {
        schema: Vec::new(),
        rows: Vec::new(),
    }))
}

pub fn execute_plain(q: &PlainQuery, db: &Database) -> Result<ResultSet, EngineError> {
    let rel = eval_query(q, db)?;
    Ok(ResultSet {
        columns: rel.schema.into_iter().map(|(n, _)| n).collect(),
        rows: rel.rows,
    })
}

/// Executes a rewritten query.
pub fn execute(s: &SqlQuery, db: &Database) -> Result<ResultSet, EngineError> {
    execute_plain(s.query(), db)
}

/// Interprets a MongoDB query document with the same comparison semantics
/// as [`execute`].
pub fn execute_mongo(d: &MongoQueryDoc, db: &Database) -> Result<ResultSet, EngineError> {
    let table = db
        .table(&d.collection)
        .ok_or_else(|| EngineError::UnknownTable(d.collection.clone()))?;
    let cols = Columns {
        relation: &table.name,
        schema: &table.schema,
    };
    let preds: Vec<Pred> = d.filter.iter().map(|f| cols.filter(f)).collect::<Result<_, _>>()?;
    let (fields, distinct): (Vec<String>, bool) = match &d.verb {
        Verb::Distinct(f) => (vec![f.clone()], true),
        Verb::Find(Some(fs)) => (fs.clone(), false),
        Verb::Find(None) => (table.schema.iter().map(|(n, _)| n.clone()).collect(), false),
    };
    let indices = cols.projection(&fields)?;
    Ok(ResultSet {
        columns: fields,
        rows: scan(&table.rows, &preds, &indices, distinct),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, EMAIL_MESSAGES_JSONL, EMAIL_TABLE, NESTED_KQL, SENDERS_KQL};
    use crate::mongo::emit;
    use crate::parser::parse_kql;
    use crate::rewriter::rewrite;

    fn fixture_db() -> Database {
        let reg = fixtures::email_registry();
        let schema = schema_of(reg.table(EMAIL_TABLE).unwrap());
        let loaded = Table::from_jsonl(EMAIL_TABLE, schema, EMAIL_MESSAGES_JSONL.as_bytes()).unwrap();
        let mut db = Database::new();
        db.insert(loaded.table);
        db
    }

    fn run(text: &str, db: &Database) -> Result<ResultSet, EngineError> {
        let q = rewrite(&parse_kql(text).unwrap(), &fixtures::email_registry()).unwrap();
        execute(&q, db)
    }

    fn strs(rs: &ResultSet) -> Vec<String> {
        rs.rows.iter().map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("|")).collect()
    }

    #[test]
    fn distinct_senders_in_first_occurrence_order() {
        // Rows 1 and 5 are mark (sent_items, sent), row 3 is vince (sent).
        let rs = run(SENDERS_KQL, &fixture_db()).unwrap();
        assert_eq!(rs.columns, ["sender_address"]);
        assert_eq!(strs(&rs), ["mark.haedicke@enron.com", "vince.kaminski@enron.com"]);
    }

    #[test]
    fn nested_window_query() {
        // susan sent row 2 (2001, inside) and row 4 (2003-06, outside).
        let rs = run(NESTED_KQL, &fixture_db()).unwrap();
        assert_eq!(rs.columns.len(), 11);
        assert_eq!(rs.rows.len(), 1);
        assert_eq!(rs.rows[0][0].to_string(), "<1002.fixture@enron>");
    }

    #[test]
    fn mongo_documents_match_sql() {
        let db = fixture_db();
        for text in [SENDERS_KQL, NESTED_KQL] {
            let q = rewrite(&parse_kql(text).unwrap(), &fixtures::email_registry()).unwrap();
            let doc = emit(&q).unwrap();
            assert_eq!(execute_mongo(&doc, &db).unwrap(), execute(&q, &db).unwrap(), "{text}");
        }
    }

    #[test]
    fn empty_table_keeps_header() {
        let mut db = Database::new();
        db.insert(Table::new("t", vec![("a".into(), ValueType::String)]));
        let q = SqlQuery::from_plain(plain("SELECT a FROM t"));
        let rs = execute(&q, &db).unwrap();
        assert_eq!(rs.columns, ["a"]);
        assert!(rs.rows.is_empty());
        let doc = emit(&q).unwrap();
        assert_eq!(execute_mongo(&doc, &db).unwrap(), rs);
    }

    fn plain(text: &str) -> PlainQuery {
        parse_kql(text).unwrap().into_plain().expect("plain SQL")
    }

    #[test]
    fn find_without_filter_projects_whole_table() {
        let db = fixture_db();
        let q = SqlQuery::from_plain(plain("SELECT * FROM email_message_table"));
        let doc = emit(&q).unwrap();
        let rs = execute_mongo(&doc, &db).unwrap();
        assert_eq!(rs.rows.len(), 6);
        assert_eq!(rs.columns.len(), 11);
    }

    #[test]
    fn execution_errors() {
        let db = fixture_db();
        let exec = |text: &str| execute_plain(&plain(text), &db).unwrap_err().code();
        assert_eq!(exec("SELECT a FROM nowhere"), "E_UNKNOWN_TABLE");
        assert_eq!(exec("SELECT nope FROM email_message_table"), "E_UNKNOWN_FIELD");
        assert_eq!(exec("SELECT message_id FROM email_message_table WHERE nope = 'x'"), "E_UNKNOWN_FIELD");
        assert_eq!(exec("SELECT message_id FROM email_message_table WHERE recipient_count = 'x'"), "E_TYPE_MISMATCH");
        assert_eq!(exec("SELECT message_id FROM email_message_table WHERE message_id = 3"), "E_TYPE_MISMATCH");
        assert_eq!(exec("SELECT message_id FROM email_message_table WHERE sent_time > '2001'"), "E_TYPE_MISMATCH");
        assert_eq!(
            exec("SELECT message_id FROM email_message_table UNION ALL SELECT * FROM email_message_table"),
            "E_TYPE_MISMATCH"
        );
    }

    #[test]
    fn timestamps_compare_by_instant() {
        let db = fixture_db();
        // 2000-03-01 09:15:00-08:00 is 17:15 UTC
        let rs = execute_plain(
            &plain("SELECT message_id FROM email_message_table WHERE sent_time = '2000-03-01 17:15:00+00:00'"),
            &db,
        )
        .unwrap();
        assert_eq!(strs(&rs), ["<1001.fixture@enron>"]);
        // projection keeps the original text
        let rs = execute_plain(
            &plain("SELECT sent_time FROM email_message_table WHERE sent_time < '2000-03-01 17:15:01+00:00'"),
            &db,
        )
        .unwrap();
        assert_eq!(strs(&rs), ["2000-03-01 09:15:00-08:00"]);
    }

    #[test]
    fn materialized_subquery_and_union() {
        let db = fixture_db();
        let rs = execute_plain(
            &plain(
                "SELECT s FROM (SELECT DISTINCT sender_address FROM email_message_table) AS x WHERE s = 'a'",
            ),
            &db,
        );
        assert_eq!(rs.unwrap_err().code(), "E_UNKNOWN_FIELD");
        let rs = execute_plain(
            &plain(
                "SELECT sender_address FROM (SELECT DISTINCT sender_address FROM email_message_table \
                 UNION ALL SELECT recipient_address FROM email_message_table WHERE recipient_count = 1) AS x \
                 WHERE sender_address >= 'susan'",
            ),
            &db,
        )
        .unwrap();
        assert_eq!(
            strs(&rs),
            ["susan.scott@enron.com", "vince.kaminski@enron.com", "vince.kaminski@enron.com", "tori.kuykendall@enron.com", "susan.scott@enron.com"]
        );
    }

    #[test]
    fn load_errors() {
        let schema = vec![("a".to_string(), ValueType::String), ("sent_time".to_string(), ValueType::Timestamp)];
        let ok = "{\"a\":\"x\",\"sent_time\":\"2000-01-01 00:00:00+00:00\",\"extra\":1}\n\n{\"a\":\"y\",\"sent_time\":\"2000-01-01 00:00:00+00:00\"}\n";
        let loaded = Table::from_jsonl("t", schema.clone(), ok.as_bytes()).unwrap();
        assert_eq!(loaded.table.rows.len(), 2);
        assert_eq!(loaded.extra_key_rows, 1);

        let missing = "{\"a\":\"x\",\"sent_time\":\"2000-01-01 00:00:00+00:00\"}\n{\"a\":\"y\"}\n";
        match Table::from_jsonl("t", schema.clone(), missing.as_bytes()).unwrap_err() {
            EngineError::Row { line, field, .. } => {
                assert_eq!(line, 2);
                assert_eq!(field, "sent_time");
            }
            other => panic!("{other}"),
        }
        let bad = "{\"a\":1,\"sent_time\":\"2000-01-01 00:00:00+00:00\"}\n";
        assert_eq!(Table::from_jsonl("t", schema.clone(), bad.as_bytes()).unwrap_err().code(), "E_TYPE");
        let bad_ts = "{\"a\":\"x\",\"sent_time\":\"yesterday\"}\n";
        assert_eq!(Table::from_jsonl("t", schema.clone(), bad_ts.as_bytes()).unwrap_err().code(), "E_TYPE");
        assert_eq!(Table::from_jsonl("t", schema, "[1]\n".as_bytes()).unwrap_err().code(), "E_ROW");
        assert_eq!(
            load_table("/nonexistent/x.jsonl", "t", vec![]).unwrap_err().code(),
            "E_IO"
        );
    }

    #[test]
    fn output_formats() {
        let rs = ResultSet {
            columns: vec!["a".into(), "n".into()],
            rows: vec![
                vec![Value::Str("x, \"y\"".into()), Value::Int(3)],
                vec![Value::Str("z".into()), Value::Int(-1)],
            ],
        };
        let mut jsonl = Vec::new();
        rs.write_jsonl(&mut jsonl).unwrap();
        assert_eq!(String::from_utf8(jsonl.clone()).unwrap(), "{\"a\":\"x, \\\"y\\\"\",\"n\":3}\n{\"a\":\"z\",\"n\":-1}\n");
        assert_eq!(ResultSet::read_jsonl(rs.columns.clone(), jsonl.as_slice()).unwrap(), rs);
        let mut csv = Vec::new();
        rs.write_csv(&mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap(), "a,n\r\n\"x, \"\"y\"\"\",3\r\nz,-1\r\n");
        let mut table = Vec::new();
        rs.write_table(&mut table).unwrap();
        assert_eq!(String::from_utf8(table).unwrap(), "a\tn\nx, \"y\"\t3\nz\t-1\n");
    }
}
