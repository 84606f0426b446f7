//! Random KQL over the fixture registry, evaluated three ways: rewrite then
//! execute, rewrite then emit then interpret the Mongo document, and a naive
//! row-scan evaluator that resolves A-Expressions by brute force over the
//! registry JSON and never touches the rewriter or the engine.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use kql_core::engine::{execute_mongo, schema_of};
use kql_core::{emit, execute, fixtures, parse_kql, rewrite, Database, Registry, ResultSet, Table};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{Map, Value as Json};

use crate::timestamps::naive_epoch;
use crate::Report;

type Row = Map<String, Json>;

const ADDRESSES: [&str; 7] = [
    "susan.scott@enron.com",
    "mark.haedicke@enron.com",
    "vince.kaminski@enron.com",
    "steven.kean@enron.com",
    "tori.kuykendall@enron.com",
    "o'neil@enron.com",
    "sally.beck@enron.com",
];
const FOLDERS: [&str; 6] = ["sent", "sent_items", "inbox", "all_documents", "discussion_threads", "deleted_items"];
const OFFSETS: [&str; 5] = ["-08:00", "-07:00", "+00:00", "+05:30", "-03:00"];
const WORDS: [&str; 6] = ["Q1", "Draft", "Review", "Agenda", "Call me", "\"quoted\""];

fn random_timestamp(rng: &mut impl Rng) -> String {
    let y = rng.gen_range(1999..=2003);
    let mo = rng.gen_range(1..=12);
    let d = rng.gen_range(1..=28);
    format!(
        "{y:04}-{mo:02}-{d:02} {:02}:{:02}:{:02}{}",
        rng.gen_range(0..24),
        rng.gen_range(0..60),
        rng.gen_range(0..60),
        OFFSETS[rng.gen_range(0..OFFSETS.len())]
    )
}

/// Rows for `email_message_table`, as JSONL text.
pub fn synthetic_corpus(n: usize, rng: &mut impl Rng) -> String {
    let mut out = String::new();
    for i in 0..n {
        let mut row = Map::new();
        let pick = |rng: &mut _, xs: &[&str]| Json::from(*xs.choose(rng).expect("nonempty"));
        row.insert("message_id".into(), Json::from(format!("<{i}.synthetic@enron>")));
        row.insert("sent_time".into(), Json::from(random_timestamp(rng)));
        row.insert("recipient_address".into(), pick(rng, &ADDRESSES));
        row.insert("message_folder".into(), pick(rng, &FOLDERS));
        row.insert("received_time".into(), Json::from(random_timestamp(rng)));
        row.insert("message_body".into(), pick(rng, &WORDS));
        row.insert("email_attachment".into(), pick(rng, &["", "q1.xls", "agenda.doc"]));
        row.insert("sender_address".into(), pick(rng, &ADDRESSES));
        row.insert("recipient_count".into(), Json::from(rng.gen_range(0..5)));
        row.insert("message_mailbox".into(), pick(rng, &["scott-s", "kean-s", "haedicke-m"]));
        row.insert("message_subject".into(), pick(rng, &WORDS));
        out.push_str(&Json::Object(row).to_string());
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// Generated query shapes

#[derive(Debug, Clone)]
pub enum Item {
    Physical(String),
    /// `scope*dim*tags`; `None` scope is `ALL`.
    Field { scope: Option<String>, dim: String, tags: Vec<String> },
    DimSet { scope: Option<String>, ds: String },
}

#[derive(Debug, Clone)]
pub enum Lit {
    Str(String),
    Int(i64),
}

#[derive(Debug, Clone)]
pub enum Cond {
    Cmp(Item, &'static str, Lit),
    Not(Box<Cond>),
    And(Box<Cond>, Box<Cond>),
    Or(Box<Cond>, Box<Cond>),
}

#[derive(Debug, Clone)]
pub enum Source {
    Physical(String),
    Selector { scope: Option<String>, ds: String },
    Nested { inner: Box<Source>, cond: Option<Cond>, alias: String },
}

#[derive(Debug, Clone)]
pub struct GenQuery {
    pub distinct: bool,
    pub projection: Option<Vec<Item>>,
    pub from: Source,
    pub cond: Option<Cond>,
}

fn scope_text(s: &Option<String>) -> &str {
    s.as_deref().unwrap_or("ALL")
}

fn kw(rng: &mut impl Rng, word: &str) -> String {
    match rng.gen_range(0..3) {
        0 => word.to_ascii_lowercase(),
        _ => word.to_string(),
    }
}

fn render_item(i: &Item) -> String {
    match i {
        Item::Physical(n) => n.clone(),
        Item::Field { scope, dim, tags } => {
            let mut s = format!("{}*{dim}", scope_text(scope));
            for t in tags {
                s.push('*');
                s.push_str(t);
            }
            s
        }
        Item::DimSet { scope, ds } => format!("{}*[{ds}]", scope_text(scope)),
    }
}

fn render_lit(l: &Lit) -> String {
    match l {
        Lit::Str(s) => format!("'{}'", s.replace('\'', "''")),
        Lit::Int(i) => i.to_string(),
    }
}

fn render_cond(c: &Cond, rng: &mut impl Rng) -> String {
    match c {
        Cond::Cmp(i, op, l) => format!("{} {op} {}", render_item(i), render_lit(l)),
        Cond::Not(inner) => format!("{} ({})", kw(rng, "NOT"), render_cond(inner, rng)),
        Cond::And(a, b) => format!("({}) {} ({})", render_cond(a, rng), kw(rng, "AND"), render_cond(b, rng)),
        Cond::Or(a, b) => format!("({}) {} ({})", render_cond(a, rng), kw(rng, "OR"), render_cond(b, rng)),
    }
}

fn render_source(s: &Source, rng: &mut impl Rng) -> String {
    match s {
        Source::Physical(n) => n.clone(),
        Source::Selector { scope, ds } => format!("{}/{ds}", scope_text(scope)),
        Source::Nested { inner, cond, alias } => {
            let mut q = format!("({} * {} {}", kw(rng, "SELECT"), kw(rng, "FROM"), render_source(inner, rng));
            if let Some(c) = cond {
                q.push_str(&format!(" {} {}", kw(rng, "WHERE"), render_cond(c, rng)));
            }
            let as_kw = if rng.gen_bool(0.8) { format!("{} ", kw(rng, "AS")) } else { String::new() };
            format!("{q}) {as_kw}{alias}")
        }
    }
}

impl GenQuery {
    /// KQL text, with randomly cased keywords.
    pub fn render(&self, rng: &mut impl Rng) -> String {
        let mut q = kw(rng, "SELECT");
        if self.distinct {
            q.push(' ');
            q.push_str(&kw(rng, "DISTINCT"));
        }
        match &self.projection {
            None => q.push_str(" *"),
            Some(items) => {
                let items: Vec<String> = items.iter().map(render_item).collect();
                q.push(' ');
                q.push_str(&items.join(", "));
            }
        }
        q.push_str(&format!(" {} {}", kw(rng, "FROM"), render_source(&self.from, rng)));
        if let Some(c) = &self.cond {
            q.push_str(&format!(" {} {}", kw(rng, "WHERE"), render_cond(c, rng)));
        }
        q
    }
}

// ---------------------------------------------------------------------------
// Brute-force view of the registry JSON

#[derive(Debug, Clone)]
struct RawField {
    name: String,
    ty: String,
    dimension: Option<String>,
    tags: BTreeSet<String>,
}

struct RawRegistry {
    doc: Json,
}

impl RawRegistry {
    fn table(&self, name: &str) -> Option<Vec<RawField>> {
        let t = self.doc["tables"].as_array()?.iter().find(|t| t["name"] == name)?;
        Some(
            t["fields"]
                .as_array()?
                .iter()
                .map(|f| RawField {
                    name: f["name"].as_str().expect("name").into(),
                    ty: f["type"].as_str().expect("type").into(),
                    dimension: f.get("dimension").and_then(Json::as_str).map(Into::into),
                    tags: f
                        .get("tags")
                        .and_then(Json::as_array)
                        .map(|ts| ts.iter().filter_map(Json::as_str).map(Into::into).collect())
                        .unwrap_or_default(),
                })
                .collect(),
        )
    }

    fn set(&self, ds: &str) -> BTreeSet<String> {
        self.doc["dimension_sets"]
            .as_array()
            .and_then(|ss| ss.iter().find(|s| s["name"] == ds))
            .and_then(|s| s["dimensions"].as_array())
            .map(|ds| ds.iter().filter_map(Json::as_str).map(Into::into).collect())
            .unwrap_or_default()
    }

    fn table_names(&self) -> Vec<String> {
        self.doc["tables"]
            .as_array()
            .expect("tables")
            .iter()
            .map(|t| t["name"].as_str().expect("name").to_string())
            .collect()
    }
}

/// Relation visible to a SELECT: names a scope may use, and its columns.
struct Rel {
    names: Vec<String>,
    fields: Vec<RawField>,
    rows: Vec<Row>,
}

type NaiveResult = Result<(Vec<String>, Vec<Vec<Json>>), &'static str>;

struct Naive<'a> {
    reg: &'a RawRegistry,
    table_rows: &'a [Row],
}

impl Naive<'_> {
    fn resolve(&self, item: &Item, rel: &Rel) -> Vec<RawField> {
        let visible = |scope: &Option<String>| scope.as_ref().is_none_or(|s| rel.names.contains(s));
        match item {
            Item::Physical(n) => rel.fields.iter().filter(|f| &f.name == n).cloned().collect(),
            Item::Field { scope, dim, tags } => rel
                .fields
                .iter()
                .filter(|f| visible(scope) && f.dimension.as_ref() == Some(dim) && tags.iter().all(|t| f.tags.contains(t)))
                .cloned()
                .collect(),
            Item::DimSet { scope, ds } => {
                let dims = self.reg.set(ds);
                rel.fields
                    .iter()
                    .filter(|f| visible(scope) && f.dimension.as_ref().is_some_and(|d| dims.contains(d)))
                    .cloned()
                    .collect()
            }
        }
    }

    fn source(&self, s: &Source) -> Result<Rel, &'static str> {
        match s {
            Source::Physical(n) => Ok(Rel {
                names: vec![n.clone()],
                fields: self.reg.table(n).ok_or("E_UNKNOWN_TABLE")?,
                rows: self.table_rows.to_vec(),
            }),
            Source::Selector { scope, ds } => {
                let want = self.reg.set(ds);
                let matches: Vec<String> = self
                    .reg
                    .table_names()
                    .into_iter()
                    .filter(|t| scope.as_ref().is_none_or(|s| s == t))
                    .filter(|t| {
                        let fields = self.reg.table(t).expect("declared");
                        want.iter().all(|d| fields.iter().any(|f| f.dimension.as_ref() == Some(d)))
                    })
                    .collect();
                match matches.as_slice() {
                    [] => Err("E_NO_TABLE"),
                    [t] => self.source(&Source::Physical(t.clone())),
                    _ => panic!("fixture has one table per DimensionSet"),
                }
            }
            Source::Nested { inner, cond, alias } => {
                let rel = self.source(inner)?;
                let rows = match cond {
                    Some(c) => self.filter(c, &rel)?,
                    None => rel.rows.clone(),
                };
                let mut names = vec![alias.clone()];
                names.extend(rel.names);
                Ok(Rel {
                    names,
                    fields: rel.fields,
                    rows,
                })
            }
        }
    }

    /// Rejects unresolvable or mixed-type operands whether or not any row
    /// reaches them.
    fn validate(&self, c: &Cond, rel: &Rel) -> Result<(), &'static str> {
        match c {
            Cond::Cmp(item, _, _) => {
                let fields = self.resolve(item, rel);
                if fields.is_empty() {
                    return Err(if matches!(item, Item::Physical(_)) { "E_UNKNOWN_FIELD" } else { "E_NO_FIELD" });
                }
                let types: BTreeSet<&str> = fields.iter().map(|f| f.ty.as_str()).collect();
                if types.len() > 1 {
                    return Err("E_HETEROGENEOUS_TYPES");
                }
                Ok(())
            }
            Cond::Not(inner) => self.validate(inner, rel),
            Cond::And(a, b) | Cond::Or(a, b) => {
                self.validate(a, rel)?;
                self.validate(b, rel)
            }
        }
    }

    fn filter(&self, c: &Cond, rel: &Rel) -> Result<Vec<Row>, &'static str> {
        self.validate(c, rel)?;
        let mut out = Vec::new();
        for row in &rel.rows {
            if self.holds(c, rel, row)? {
                out.push(row.clone());
            }
        }
        Ok(out)
    }

    fn holds(&self, c: &Cond, rel: &Rel, row: &Row) -> Result<bool, &'static str> {
        Ok(match c {
            Cond::Cmp(item, op, lit) => {
                let fields = self.resolve(item, rel);
                if fields.is_empty() {
                    return Err(if matches!(item, Item::Physical(_)) { "E_UNKNOWN_FIELD" } else { "E_NO_FIELD" });
                }
                let types: BTreeSet<&str> = fields.iter().map(|f| f.ty.as_str()).collect();
                if types.len() > 1 {
                    return Err("E_HETEROGENEOUS_TYPES");
                }
                let mut any = false;
                for f in &fields {
                    let ord = compare(&row[&f.name], &f.ty, lit).ok_or("E_TYPE_MISMATCH")?;
                    any |= op_holds(op, ord);
                }
                any
            }
            Cond::Not(inner) => !self.holds(inner, rel, row)?,
            Cond::And(a, b) => self.holds(a, rel, row)? & self.holds(b, rel, row)?,
            Cond::Or(a, b) => self.holds(a, rel, row)? | self.holds(b, rel, row)?,
        })
    }

    fn query(&self, q: &GenQuery) -> NaiveResult {
        let rel = self.source(&q.from)?;
        let columns: Vec<RawField> = match &q.projection {
            None => rel.fields.clone(),
            Some(items) => {
                let mut cols = Vec::new();
                for i in items {
                    let r = self.resolve(i, &rel);
                    if r.is_empty() {
                        return Err(if matches!(i, Item::Physical(_)) { "E_UNKNOWN_FIELD" } else { "E_NO_FIELD" });
                    }
                    cols.extend(r);
                }
                cols
            }
        };
        let rows = match &q.cond {
            Some(c) => self.filter(c, &rel)?,
            None => rel.rows.clone(),
        };
        let mut out: Vec<Vec<Json>> = Vec::new();
        for row in rows {
            let tuple: Vec<Json> = columns.iter().map(|f| row[&f.name].clone()).collect();
            if q.distinct && out.contains(&tuple) {
                continue;
            }
            out.push(tuple);
        }
        Ok((columns.into_iter().map(|f| f.name).collect(), out))
    }
}

fn op_holds(op: &str, ord: Ordering) -> bool {
    match op {
        "=" => ord == Ordering::Equal,
        "!=" | "<>" => ord != Ordering::Equal,
        "<" => ord == Ordering::Less,
        "<=" => ord != Ordering::Greater,
        ">" => ord == Ordering::Greater,
        ">=" => ord != Ordering::Less,
        other => panic!("unknown operator {other}"),
    }
}

fn compare(cell: &Json, ty: &str, lit: &Lit) -> Option<Ordering> {
    match (ty, cell, lit) {
        ("integer", Json::Number(n), Lit::Int(i)) => Some(n.as_i64()?.cmp(i)),
        ("string", Json::String(s), Lit::Str(l)) => Some(s.as_str().cmp(l.as_str())),
        ("timestamp", Json::String(s), Lit::Str(l)) => Some(naive_epoch(s)?.cmp(&naive_epoch(l)?)),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Generation

struct Gen {
    rng: ChaCha8Rng,
    dims: Vec<String>,
    tags: Vec<String>,
    sets: Vec<String>,
    fields: Vec<RawField>,
}

impl Gen {
    fn scope(&mut self, alias: Option<&str>) -> Option<String> {
        match self.rng.gen_range(0..10) {
            0..=5 => None,
            6..=7 => Some(fixtures::EMAIL_TABLE.to_string()),
            8 => alias.map(str::to_string),
            _ => Some("raw_message_table".to_string()),
        }
    }

    fn field_item(&mut self, alias: Option<&str>) -> Item {
        if self.rng.gen_bool(0.15) {
            let f = self.fields.choose(&mut self.rng).expect("fields").name.clone();
            return Item::Physical(f);
        }
        let bound: Vec<&RawField> = self.fields.iter().filter(|f| f.dimension.is_some()).collect();
        let (dim, tags) = if self.rng.gen_bool(0.8) {
            // address taken from a real binding, so it usually resolves
            let f = bound.choose(&mut self.rng).expect("bound");
            let tags: Vec<String> = f.tags.iter().cloned().collect();
            let k = self.rng.gen_range(0..=tags.len());
            let chosen = tags.choose_multiple(&mut self.rng, k).cloned().collect();
            (f.dimension.clone().expect("bound"), chosen)
        } else {
            let d = self.dims.choose(&mut self.rng).expect("dims").clone();
            let k = self.rng.gen_range(0..=2);
            (d, self.tags.choose_multiple(&mut self.rng, k).cloned().collect())
        };
        let scope = self.scope(alias);
        Item::Field { scope, dim, tags }
    }

    fn projection(&mut self, alias: Option<&str>) -> Option<Vec<Item>> {
        if self.rng.gen_bool(0.15) {
            return None;
        }
        let n = self.rng.gen_range(1..=3);
        Some(
            (0..n)
                .map(|_| {
                    if self.rng.gen_bool(0.15) {
                        let ds = self.sets.choose(&mut self.rng).expect("sets").clone();
                        Item::DimSet { scope: self.scope(alias), ds }
                    } else {
                        self.field_item(alias)
                    }
                })
                .collect(),
        )
    }

    fn literal_for(&mut self, item: &Item, sample: &[Row]) -> Lit {
        let ty_of = |name: &str| self.fields.iter().find(|f| f.name == name).map(|f| f.ty.clone());
        // type of the first field the item could name; mixed-type items are
        // rejected before evaluation, so any of them will do
        let field = match item {
            Item::Physical(n) => Some(n.clone()),
            Item::Field { dim, tags, .. } => self
                .fields
                .iter()
                .find(|f| f.dimension.as_ref() == Some(dim) && tags.iter().all(|t| f.tags.contains(t)))
                .map(|f| f.name.clone()),
            Item::DimSet { .. } => None,
        };
        let ty = field.as_deref().and_then(ty_of).unwrap_or_else(|| "string".into());
        let from_data = self.rng.gen_bool(0.6);
        let row = sample.choose(&mut self.rng).expect("rows");
        match ty.as_str() {
            "integer" => Lit::Int(self.rng.gen_range(-1..6)),
            "timestamp" => {
                if from_data {
                    let f = field.expect("typed");
                    Lit::Str(row[&f].as_str().expect("timestamp text").to_string())
                } else {
                    Lit::Str(random_timestamp(&mut self.rng))
                }
            }
            _ => match field {
                Some(f) if from_data => Lit::Str(row[&f].as_str().unwrap_or_default().to_string()),
                _ => Lit::Str((*ADDRESSES.choose(&mut self.rng).expect("nonempty")).to_string()),
            },
        }
    }

    fn cond(&mut self, depth: usize, alias: Option<&str>, sample: &[Row]) -> Cond {
        let roll = if depth == 0 { 0 } else { self.rng.gen_range(0..6) };
        match roll {
            0..=2 => {
                let item = self.field_item(alias);
                let op = *["=", "!=", "<", "<=", ">", ">=", "<>"].choose(&mut self.rng).expect("ops");
                let lit = self.literal_for(&item, sample);
                Cond::Cmp(item, op, lit)
            }
            3 => Cond::Not(Box::new(self.cond(depth - 1, alias, sample))),
            4 => Cond::And(Box::new(self.cond(depth - 1, alias, sample)), Box::new(self.cond(depth - 1, alias, sample))),
            _ => Cond::Or(Box::new(self.cond(depth - 1, alias, sample)), Box::new(self.cond(depth - 1, alias, sample))),
        }
    }

    fn base_source(&mut self) -> Source {
        match self.rng.gen_range(0..6) {
            0 => Source::Physical(fixtures::EMAIL_TABLE.into()),
            1 => Source::Selector {
                scope: Some(fixtures::EMAIL_TABLE.into()),
                ds: "email_event".into(),
            },
            2 => Source::Selector {
                scope: None,
                ds: "email_event".into(),
            },
            _ => Source::Selector {
                scope: None,
                ds: "emailmessage".into(),
            },
        }
    }

    fn query(&mut self, sample: &[Row]) -> GenQuery {
        let nested = self.rng.gen_bool(0.4);
        let alias = if nested { Some("example") } else { None };
        let from = if nested {
            let inner = Box::new(self.base_source());
            let cond = self.rng.gen_bool(0.8).then(|| self.cond(2, None, sample));
            Source::Nested {
                inner,
                cond,
                alias: "example".into(),
            }
        } else {
            self.base_source()
        };
        GenQuery {
            distinct: self.rng.gen_bool(0.3),
            projection: self.projection(alias),
            cond: self.rng.gen_bool(0.85).then(|| self.cond(3, alias, sample)),
            from,
        }
    }
}

fn cells(rs: &ResultSet) -> Vec<Vec<Json>> {
    rs.rows.iter().map(|r| r.iter().map(|v| v.to_json()).collect()).collect()
}

fn is_subsequence(sub: &[Vec<Json>], of: &[Vec<Json>]) -> bool {
    let mut it = of.iter();
    sub.iter().all(|x| it.any(|y| y == x))
}

/// Runs `n_queries` generated queries against a `n_rows`-row corpus.
pub fn suite(n_queries: usize, n_rows: usize, seed: u64) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let corpus = synthetic_corpus(n_rows, &mut rng);
    let rows: Vec<Row> = corpus
        .lines()
        .map(|l| serde_json::from_str(l).expect("generated row"))
        .collect();

    let registry = fixtures::email_registry();
    let raw = RawRegistry {
        doc: serde_json::from_str(fixtures::EMAIL_REGISTRY_JSON).expect("fixture JSON"),
    };
    let schema = schema_of(registry.table(fixtures::EMAIL_TABLE).expect("fixture table"));
    let table = Table::from_jsonl(fixtures::EMAIL_TABLE, schema, corpus.as_bytes()).expect("corpus loads").table;
    let mut db = Database::new();
    db.insert(table);
    let raw_schema = schema_of(registry.table("raw_message_table").expect("fixture table"));
    db.insert(Table::new("raw_message_table", raw_schema));

    let mut gen = Gen {
        dims: raw.doc["dimensions"].as_array().expect("dims").iter().map(|d| d["name"].as_str().expect("n").into()).collect(),
        tags: raw.doc["tags"]
            .as_array()
            .expect("tags")
            .iter()
            .map(|t| format!("{}:{}", t["scheme"].as_str().expect("s"), t["name"].as_str().expect("n")))
            .collect(),
        sets: vec!["emailmessage".into(), "email_event".into()],
        fields: raw.table(fixtures::EMAIL_TABLE).expect("fixture table"),
        rng: ChaCha8Rng::seed_from_u64(seed ^ 0x5eed),
    };
    let naive = Naive {
        reg: &raw,
        table_rows: &rows,
    };

    let mut report = Report::default();
    let mut case = 0;
    while report.count("rewritten") < n_queries && case < n_queries * 20 {
        case += 1;
        let q = gen.query(&rows);
        let text = q.render(&mut gen.rng);
        report.cases += 1;
        check(&q, &text, &registry, &db, &naive, &mut report);
    }
    if report.count("rewritten") < n_queries {
        report.fail(format!("only {} of {n_queries} generated queries were valid", report.count("rewritten")));
    }
    report
}

fn check(q: &GenQuery, text: &str, registry: &Registry, db: &Database, naive: &Naive<'_>, report: &mut Report) {
    let expected = naive.query(q);
    let kql = match parse_kql(text) {
        Ok(k) => k,
        Err(e) => return report.fail(format!("{text}\n    does not parse: {e}")),
    };
    let sql = match (rewrite(&kql, registry), &expected) {
        (Ok(sql), _) => sql,
        (Err(e), Err(code)) if e.code() == *code => return report.note("expected_errors", 1),
        (Err(e), Err(code)) => {
            // execution-time errors surface later; rewrite errors must agree
            return report.fail(format!("{text}\n    rewrite error {} but oracle expected {code}", e.code()));
        }
        (Err(e), Ok(_)) => return report.fail(format!("{text}\n    rewrite failed: {e}")),
    };
    if !kql_core::extract_aexprs(&parse_kql(&sql.render()).expect("rendered SQL parses")).is_empty() {
        report.fail(format!("{text}\n    A-Expression survived rewriting: {sql}"));
    }
    let got = execute(&sql, db);
    let (columns, rows) = match (&got, expected) {
        (Ok(rs), Ok((columns, rows))) => {
            if rs.columns != columns || cells(rs) != rows {
                return report.fail(format!(
                    "{text}\n    engine {} rows {:?}, oracle {} rows {columns:?}",
                    rs.rows.len(),
                    rs.columns,
                    rows.len()
                ));
            }
            (columns, rows)
        }
        (Err(e), Err(code)) if e.code() == code => return report.note("expected_errors", 1),
        (got, expected) => {
            return report.fail(format!(
                "{text}\n    engine {:?} vs oracle {:?}",
                got.as_ref().map(|r| r.rows.len()).map_err(|e| e.to_string()),
                expected.map(|(_, r)| r.len())
            ))
        }
    };
    report.note("rewritten", 1);
    if !rows.is_empty() {
        report.note("nonempty_results", 1);
    }

    if q.distinct {
        let all = naive.query(&GenQuery { distinct: false, ..q.clone() }).map(|(_, r)| r).unwrap_or_default();
        let unique: BTreeSet<String> = rows.iter().map(|r| Json::from(r.clone()).to_string()).collect();
        if unique.len() != rows.len() || !is_subsequence(&rows, &all) {
            report.fail(format!("{text}\n    DISTINCT output is not a duplicate-free subsequence ({columns:?})"));
        }
    }

    match emit(&sql) {
        Ok(doc) => match execute_mongo(&doc, db) {
            Ok(m) if got.as_ref().ok() == Some(&m) => report.note("mongo_equal", 1),
            Ok(m) => report.fail(format!("{text}\n    mongo {doc} returned {} rows, SQL {}", m.rows.len(), rows.len())),
            Err(e) => report.fail(format!("{text}\n    mongo {doc} failed: {e}")),
        },
        Err(_) => report.note("not_emittable", 1),
    }
}
