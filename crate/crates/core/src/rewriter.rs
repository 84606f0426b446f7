//! KQL → SQL rewriting.
//!
//! Every A-Expression is resolved against the [`Registry`]:
//!
//! * `Scope/ds` in FROM becomes the matching table, or a `UNION ALL` of one
//!   branch per matching table.
//! * `Scope*dim*tags` in the SELECT list expands to every matching column of
//!   the FROM relation; `Scope*[ds]` to every column whose dimension is in
//!   the DimensionSet. Order is field declaration order.
//! * `Scope*dim*tags` in a comparison becomes that comparison on the single
//!   matching column, or a parenthesized OR over all matching columns.
//!
//! Subqueries are rewritten first; an outer `ALL` then denotes the
//! subquery's output columns, which keep their address tuples.

use std::fmt;

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

use crate::aexpr::{AExpr, Scope, Selector};
use crate::ast::{CmpOp, ColumnRef, Condition, FromItem, KqlQuery, Literal, PlainQuery, Projection, Query, Select, TableRef};
use crate::registry::{AddressTuple, Registry, RegistryError};
use crate::value::{Timestamp, ValueType};

#[derive(Debug, Error)]
pub enum RewriteError {
    #[error("E_NO_TABLE: `{aexpr}` matches no table")]
    NoTable { aexpr: String },
    #[error("E_NO_FIELD: `{aexpr}` matches no field of {relation}")]
    NoField { aexpr: String, relation: String },
    #[error("E_HETEROGENEOUS: `{aexpr}` expands to tables with misaligned projections: {detail}")]
    Heterogeneous { aexpr: String, detail: String },
    #[error("E_HETEROGENEOUS_TYPES: `{aexpr}` matches fields of different types ({types})")]
    HeterogeneousTypes { aexpr: String, types: String },
    #[error(transparent)]
    Registry(#[from] RegistryError),
}

impl RewriteError {
    pub fn code(&self) -> &'static str {
        match self {
            RewriteError::NoTable { .. } => "E_NO_TABLE",
            RewriteError::NoField { .. } => "E_NO_FIELD",
            RewriteError::Heterogeneous { .. } => "E_HETEROGENEOUS",
            RewriteError::HeterogeneousTypes { .. } => "E_HETEROGENEOUS_TYPES",
            RewriteError::Registry(e) => e.code(),
        }
    }
}

/// One end of a time range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Bound {
    pub value: String,
    pub inclusive: bool,
}

/// The widest time window a query's predicates place on one timestamp field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TimeBound {
    pub field: String,
    pub lower: Option<Bound>,
    pub upper: Option<Bound>,
}

impl fmt::Display for TimeBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ", self.field)?;
        match &self.lower {
            Some(b) => write!(f, "{}{}", if b.inclusive { '[' } else { '(' }, b.value)?,
            None => f.write_str("(-inf")?,
        }
        f.write_str(", ")?;
        match &self.upper {
            Some(b) => write!(f, "{}{}", b.value, if b.inclusive { ']' } else { ')' }),
            None => f.write_str("+inf)"),
        }
    }
}

/// Tables, fields and time bounds a rewritten query draws on.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub tables: Vec<String>,
    pub fields: Vec<String>,
    pub time_bounds: Vec<TimeBound>,
}

impl Provenance {
    /// Renders the provenance as `-- ` prefixed lines.
    pub fn footer(&self) -> String {
        let mut out = String::from("-- provenance\n");
        out.push_str(&format!("-- tables: {}\n", self.tables.join(", ")));
        out.push_str(&format!("-- fields: {}\n", self.fields.join(", ")));
        for tb in &self.time_bounds {
            out.push_str(&format!("-- time: {tb}\n"));
        }
        out
    }
}

/// A plain SQL query produced by [`rewrite`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SqlQuery {
    query: PlainQuery,
    provenance: Provenance,
}

impl SqlQuery {
    pub fn query(&self) -> &PlainQuery {
        &self.query
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Canonical SQL text.
    pub fn render(&self) -> String {
        self.query.to_string()
    }

    /// Wraps SQL that names only physical tables and fields. Provenance
    /// carries tables and fields but no time bounds, since column types are
    /// unknown without a registry.
    pub fn from_plain(query: PlainQuery) -> SqlQuery {
        rewrite(&query.into_kql(), &Registry::default()).expect("plain SQL rewrites against any registry")
    }
}

impl fmt::Display for SqlQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.query)
    }
}

/// Resolves every A-Expression in `q` against `registry`.
pub fn rewrite(q: &KqlQuery, registry: &Registry) -> Result<SqlQuery, RewriteError> {
    let out = Rewriter { registry }.query(q)?;
    Ok(SqlQuery {
        query: out.query,
        provenance: out.provenance.finish(),
    })
}

#[derive(Debug, Clone)]
struct Column {
    name: String,
    address: Option<AddressTuple>,
    value_type: Option<ValueType>,
}

/// What a FROM item exposes to the enclosing SELECT.
#[derive(Debug, Clone)]
struct Relation {
    /// Names a table-scoped A-Expression may use for this relation.
    names: Vec<String>,
    columns: Vec<Column>,
}

impl Relation {
    fn describe(&self) -> String {
        format!("`{}`", self.names.first().map(String::as_str).unwrap_or("?"))
    }

    fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    fn in_scope(&self, scope: &Scope) -> bool {
        match scope {
            Scope::All => true,
            Scope::Table(t) => self.names.iter().any(|n| n == t),
        }
    }
}

/// A timestamp bound and whether it is inclusive.
type OpenBound = Option<(Timestamp, bool)>;

#[derive(Debug, Default)]
struct ProvAcc {
    tables: Vec<String>,
    fields: Vec<String>,
    bounds: IndexMap<String, (OpenBound, OpenBound)>,
}

impl ProvAcc {
    fn append(&mut self, other: ProvAcc) {
        self.tables.extend(other.tables);
        self.fields.extend(other.fields);
        for (field, (lo, hi)) in other.bounds {
            if let Some(lo) = lo {
                self.lower(&field, lo);
            }
            if let Some(hi) = hi {
                self.upper(&field, hi);
            }
        }
    }

    fn lower(&mut self, field: &str, b: (Timestamp, bool)) {
        let slot = &mut self.bounds.entry(field.to_string()).or_default().0;
        let replace = match slot {
            None => true,
            Some((cur, inc)) => match b.0.instant_cmp(cur) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Equal => b.1 && !*inc,
                std::cmp::Ordering::Greater => false,
            },
        };
        if replace {
            *slot = Some(b);
        }
    }

    fn upper(&mut self, field: &str, b: (Timestamp, bool)) {
        let slot = &mut self.bounds.entry(field.to_string()).or_default().1;
        let replace = match slot {
            None => true,
            Some((cur, inc)) => match b.0.instant_cmp(cur) {
                std::cmp::Ordering::Greater => true,
                std::cmp::Ordering::Equal => b.1 && !*inc,
                std::cmp::Ordering::Less => false,
            },
        };
        if replace {
            *slot = Some(b);
        }
    }

    fn finish(self) -> Provenance {
        fn dedup(v: Vec<String>) -> Vec<String> {
            let mut seen = std::collections::HashSet::new();
            v.into_iter().filter(|s| seen.insert(s.clone())).collect()
        }
        let bound = |b: Option<(Timestamp, bool)>| {
            b.map(|(t, inclusive)| Bound {
                value: t.as_str().to_string(),
                inclusive,
            })
        };
        Provenance {
            tables: dedup(self.tables),
            fields: dedup(self.fields),
            time_bounds: self
                .bounds
                .into_iter()
                .map(|(field, (lo, hi))| TimeBound {
                    field,
                    lower: bound(lo),
                    upper: bound(hi),
                })
                .collect(),
        }
    }
}

struct Rewritten {
    query: PlainQuery,
    schema: Vec<Column>,
    provenance: ProvAcc,
}

struct Rewriter<'r> {
    registry: &'r Registry,
}

impl<'r> Rewriter<'r> {
    fn query(&self, q: &KqlQuery) -> Result<Rewritten, RewriteError> {
        let mut branches = Vec::new();
        let mut schema = None;
        let mut provenance = ProvAcc::default();
        for select in &q.branches {
            for (s, cols, acc) in self.select(select)? {
                schema.get_or_insert(cols);
                provenance.append(acc);
                branches.push(s);
            }
        }
        Ok(Rewritten {
            query: Query { branches },
            schema: schema.unwrap_or_default(),
            provenance,
        })
    }

    /// One KQL SELECT becomes one SQL SELECT per FROM alternative.
    #[allow(clippy::type_complexity)]
    fn select(&self, s: &Select<ColumnRef, TableRef>) -> Result<Vec<(Select<String, String>, Vec<Column>, ProvAcc)>, RewriteError> {
        let alternatives = self.source(&s.from)?;
        let expanded = alternatives.len() > 1;
        let mut out = Vec::with_capacity(alternatives.len());
        for (from, relation, from_acc) in alternatives {
            let mut acc = ProvAcc::default();
            let (projection, schema) = match &s.projection {
                Projection::Star => {
                    acc.fields.extend(relation.columns.iter().map(|c| c.name.clone()));
                    (Projection::Star, relation.columns.clone())
                }
                Projection::Columns(items) => {
                    let mut names = Vec::new();
                    let mut schema = Vec::new();
                    for item in items {
                        for col in self.select_item(item, &relation)? {
                            names.push(col.name.clone());
                            schema.push(col);
                        }
                    }
                    acc.fields.extend(names.iter().cloned());
                    (Projection::Columns(names), schema)
                }
            };
            acc.append(from_acc);
            let selection = match &s.selection {
                Some(c) => Some(self.condition(c, &relation, false, &mut acc)?),
                None => None,
            };
            out.push((
                Select {
                    distinct: s.distinct,
                    projection,
                    from,
                    selection,
                },
                schema,
                acc,
            ));
        }
        if expanded {
            check_aligned(&s.from, &out)?;
        }
        Ok(out)
    }

    fn select_item(&self, item: &ColumnRef, relation: &Relation) -> Result<Vec<Column>, RewriteError> {
        match item {
            ColumnRef::Field(name) => Ok(vec![relation.column(name).cloned().unwrap_or(Column {
                name: name.clone(),
                address: None,
                value_type: None,
            })]),
            ColumnRef::Address(a) => {
                let cols: Vec<Column> = self.resolve(a, relation)?.into_iter().cloned().collect();
                if cols.is_empty() {
                    return Err(RewriteError::NoField {
                        aexpr: a.to_string(),
                        relation: relation.describe(),
                    });
                }
                Ok(cols)
            }
        }
    }

    /// Columns of `relation` matched by a field or dimension-set selector.
    fn resolve<'a>(&self, a: &AExpr, relation: &'a Relation) -> Result<Vec<&'a Column>, RewriteError> {
        let in_scope = relation.in_scope(&a.scope);
        match &a.selector {
            Selector::Field { .. } => {
                let query = a.address().expect("field selector");
                if self.registry.dimension(&query.dimension).is_none() {
                    return Err(RegistryError::Ref(format!("undeclared dimension {:?}", query.dimension)).into());
                }
                if let Some(t) = query.tags.iter().find(|t| !self.registry.has_tag(t)) {
                    return Err(RegistryError::Ref(format!("undeclared tag {t}")).into());
                }
                Ok(relation
                    .columns
                    .iter()
                    .filter(|c| in_scope && c.address.as_ref().is_some_and(|addr| addr.satisfies(&query)))
                    .collect())
            }
            Selector::DimSet(ds) => {
                let set = self
                    .registry
                    .dimension_set(ds)
                    .ok_or_else(|| RegistryError::Ref(format!("undeclared dimension set {ds:?}")))?;
                Ok(relation
                    .columns
                    .iter()
                    .filter(|c| in_scope && c.address.as_ref().is_some_and(|addr| set.dimensions.contains(&addr.dimension)))
                    .collect())
            }
            Selector::Table(_) => Err(RewriteError::NoField {
                aexpr: a.to_string(),
                relation: relation.describe(),
            }),
        }
    }

    fn table_relation(&self, name: &str) -> Relation {
        let columns = self
            .registry
            .table(name)
            .map(|t| {
                t.fields
                    .iter()
                    .map(|f| Column {
                        name: f.field.clone(),
                        address: f.address.clone(),
                        value_type: Some(f.value_type),
                    })
                    .collect()
            })
            .unwrap_or_default();
        Relation {
            names: vec![name.to_string()],
            columns,
        }
    }

    #[allow(clippy::type_complexity)]
    fn source(&self, from: &FromItem<ColumnRef, TableRef>) -> Result<Vec<(FromItem<String, String>, Relation, ProvAcc)>, RewriteError> {
        match from {
            FromItem::Table(TableRef::Named(name)) => {
                let acc = ProvAcc {
                    tables: vec![name.clone()],
                    ..ProvAcc::default()
                };
                Ok(vec![(FromItem::Table(name.clone()), self.table_relation(name), acc)])
            }
            FromItem::Table(TableRef::Address(a)) => {
                let Selector::Table(ds) = &a.selector else {
                    return Err(RewriteError::NoTable { aexpr: a.to_string() });
                };
                let tables: Vec<String> = self
                    .registry
                    .resolve_tables(ds)?
                    .into_iter()
                    .filter(|t| a.scope.includes(t))
                    .collect();
                if tables.is_empty() {
                    return Err(RewriteError::NoTable { aexpr: a.to_string() });
                }
                Ok(tables
                    .into_iter()
                    .map(|t| {
                        let acc = ProvAcc {
                            tables: vec![t.clone()],
                            ..ProvAcc::default()
                        };
                        let rel = self.table_relation(&t);
                        (FromItem::Table(t), rel, acc)
                    })
                    .collect())
            }
            FromItem::Subquery { query, alias } => {
                let inner = self.query(query)?;
                let mut names = vec![alias.clone()];
                names.extend(inner.provenance.tables.iter().cloned());
                let relation = Relation {
                    names,
                    columns: inner.schema,
                };
                let from = FromItem::Subquery {
                    query: Box::new(inner.query),
                    alias: alias.clone(),
                };
                // fields read inside the subquery are recorded by its own SELECT
                Ok(vec![(from, relation, inner.provenance)])
            }
        }
    }

    fn condition(&self, c: &Condition<ColumnRef>, relation: &Relation, negated: bool, acc: &mut ProvAcc) -> Result<Condition<String>, RewriteError> {
        Ok(match c {
            Condition::Compare(cmp) => {
                let columns: Vec<&Column> = match &cmp.operand {
                    ColumnRef::Field(name) => match relation.column(name) {
                        Some(col) => vec![col],
                        None => {
                            acc.fields.push(name.clone());
                            return Ok(Condition::compare(name.clone(), cmp.op, cmp.literal.clone()));
                        }
                    },
                    ColumnRef::Address(a) => {
                        let cols = self.resolve(a, relation)?;
                        if cols.is_empty() {
                            return Err(RewriteError::NoField {
                                aexpr: a.to_string(),
                                relation: relation.describe(),
                            });
                        }
                        let mut types: Vec<ValueType> = cols.iter().filter_map(|c| c.value_type).collect();
                        types.dedup();
                        if types.len() > 1 {
                            return Err(RewriteError::HeterogeneousTypes {
                                aexpr: a.to_string(),
                                types: types.iter().map(|t| t.as_str()).collect::<Vec<_>>().join(", "),
                            });
                        }
                        cols
                    }
                };
                let op = if negated { cmp.op.negate() } else { cmp.op };
                for col in &columns {
                    acc.fields.push(col.name.clone());
                    record_bound(acc, col, op, &cmp.literal);
                }
                let mut parts = columns
                    .iter()
                    .map(|col| Condition::compare(col.name.clone(), cmp.op, cmp.literal.clone()));
                let first = parts.next().expect("nonempty");
                if columns.len() == 1 {
                    first
                } else {
                    Condition::paren(parts.fold(first, Condition::or))
                }
            }
            Condition::Not(inner) => Condition::negate(self.condition(inner, relation, !negated, acc)?),
            Condition::Paren(inner) => Condition::paren(self.condition(inner, relation, negated, acc)?),
            Condition::And(l, r) => Condition::and(
                self.condition(l, relation, negated, acc)?,
                self.condition(r, relation, negated, acc)?,
            ),
            Condition::Or(l, r) => Condition::or(
                self.condition(l, relation, negated, acc)?,
                self.condition(r, relation, negated, acc)?,
            ),
        })
    }
}

fn record_bound(acc: &mut ProvAcc, col: &Column, op: CmpOp, literal: &Literal) {
    if col.value_type != Some(ValueType::Timestamp) {
        return;
    }
    let Literal::Str(text) = literal else {
        return;
    };
    let Some(ts) = Timestamp::parse(text) else {
        return;
    };
    match op {
        CmpOp::Ge => acc.lower(&col.name, (ts, true)),
        CmpOp::Gt => acc.lower(&col.name, (ts, false)),
        CmpOp::Le => acc.upper(&col.name, (ts, true)),
        CmpOp::Lt => acc.upper(&col.name, (ts, false)),
        CmpOp::Eq => {
            acc.lower(&col.name, (ts.clone(), true));
            acc.upper(&col.name, (ts, true));
        }
        CmpOp::Ne => {}
    }
}

fn check_aligned(from: &FromItem<ColumnRef, TableRef>, branches: &[(Select<String, String>, Vec<Column>, ProvAcc)]) -> Result<(), RewriteError> {
    let aexpr = match from {
        FromItem::Table(t) => t.to_string(),
        FromItem::Subquery { alias, .. } => alias.clone(),
    };
    let table_of = |s: &Select<String, String>| match &s.from {
        FromItem::Table(t) => t.clone(),
        FromItem::Subquery { alias, .. } => alias.clone(),
    };
    let (first, first_schema, _) = &branches[0];
    for (s, schema, _) in &branches[1..] {
        if schema.len() != first_schema.len() {
            return Err(RewriteError::Heterogeneous {
                aexpr,
                detail: format!(
                    "{} projects {} columns but {} projects {}",
                    table_of(first),
                    first_schema.len(),
                    table_of(s),
                    schema.len()
                ),
            });
        }
        for (a, b) in first_schema.iter().zip(schema) {
            if a.address != b.address || a.value_type != b.value_type {
                return Err(RewriteError::Heterogeneous {
                    aexpr,
                    detail: format!(
                        "{}.{} and {}.{} have different addresses or types",
                        table_of(first),
                        a.name,
                        table_of(s),
                        b.name
                    ),
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, NESTED_KQL, NESTED_SQL, SENDERS_KQL, SENDERS_SQL};
    use crate::parser::{extract_aexprs, parse_kql};
    use crate::registry::TagRef;

    fn rw(text: &str) -> Result<SqlQuery, RewriteError> {
        rewrite(&parse_kql(text).unwrap(), &fixtures::email_registry())
    }

    #[test]
    fn rewrites_distinct_senders() {
        assert_eq!(rw(SENDERS_KQL).unwrap().render(), SENDERS_SQL);
    }

    #[test]
    fn rewrites_nested_query() {
        assert_eq!(rw(NESTED_KQL).unwrap().render(), NESTED_SQL);
    }

    #[test]
    fn plain_sql_passes_through() {
        let s = rw("select a from t where a = 'x'").unwrap();
        assert_eq!(s.render(), "SELECT a FROM t WHERE a = 'x'");
        assert_eq!(s.provenance().tables, ["t"]);
        assert_eq!(s.provenance().fields, ["a"]);
        assert!(s.provenance().time_bounds.is_empty());
    }

    #[test]
    fn multi_field_predicate_becomes_disjunction() {
        let s = rw("SELECT message_id FROM email_message_table WHERE ALL*email_address = 'x'").unwrap();
        assert_eq!(
            s.render(),
            "SELECT message_id FROM email_message_table WHERE (recipient_address = 'x' OR sender_address = 'x')"
        );
        let s = rw("SELECT message_id FROM email_message_table WHERE NOT ALL*email_address = 'x'").unwrap();
        assert_eq!(
            s.render(),
            "SELECT message_id FROM email_message_table WHERE NOT (recipient_address = 'x' OR sender_address = 'x')"
        );
    }

    #[test]
    fn field_selector_in_select_expands() {
        let s = rw("SELECT ALL*datetime FROM ALL/email_event").unwrap();
        assert_eq!(s.render(), "SELECT sent_time, received_time FROM email_message_table");
    }

    #[test]
    fn table_scoped_selectors() {
        let s = rw("SELECT email_message_table*folder FROM email_message_table").unwrap();
        assert_eq!(s.render(), "SELECT message_folder FROM email_message_table");
        let err = rw("SELECT other*folder FROM email_message_table").unwrap_err();
        assert_eq!(err.code(), "E_NO_FIELD");
        let err = rw("SELECT a FROM raw_message_table/emailmessage").unwrap_err();
        assert_eq!(err.code(), "E_NO_TABLE");
        // a subquery alias scopes the outer selectors
        let s = rw("SELECT ex*folder FROM (SELECT * FROM ALL/emailmessage) AS ex").unwrap();
        assert_eq!(
            s.render(),
            "SELECT message_folder FROM (SELECT * FROM email_message_table) AS ex"
        );
    }

    #[test]
    fn errors_name_the_offending_aexpr() {
        let err = rw("SELECT ALL*subject*_:sender FROM email_message_table").unwrap_err();
        assert_eq!(err.code(), "E_NO_FIELD");
        assert!(err.to_string().contains("ALL*subject*_:sender"));
        let err = rw("SELECT ALL*folder FROM raw_message_table").unwrap_err();
        assert_eq!(err.code(), "E_NO_FIELD");
        let err = rw("SELECT ALL*nope FROM email_message_table").unwrap_err();
        assert_eq!(err.code(), "E_REF");
        let err = rw("SELECT ALL*folder*_:nope FROM email_message_table").unwrap_err();
        assert_eq!(err.code(), "E_REF");
        let err = rw("SELECT ALL*[nope] FROM email_message_table").unwrap_err();
        assert_eq!(err.code(), "E_REF");
        let err = rw("SELECT a FROM ALL/nope").unwrap_err();
        assert_eq!(err.code(), "E_REF");
        let err = rw("SELECT a FROM email_message_table WHERE ALL*folder*_:sender = 'x'").unwrap_err();
        assert_eq!(err.code(), "E_NO_FIELD");
    }

    #[test]
    fn unaddressed_fields_never_match() {
        // SELECT * still reaches them
        let s = rw("SELECT * FROM raw_message_table").unwrap();
        assert_eq!(s.provenance().fields, ["message_key", "message_raw"]);
    }

    #[test]
    fn mixed_type_predicate_is_rejected() {
        let text = r#"{
            "dimensions": [{"name": "d"}],
            "tags": [],
            "dimension_sets": [],
            "tables": [{"name": "t", "fields": [
                {"name": "a", "type": "string", "dimension": "d"},
                {"name": "b", "type": "integer", "dimension": "d"}]}]
        }"#;
        let mixed = Registry::from_json(text).unwrap();
        let err = rewrite(&parse_kql("SELECT a FROM t WHERE ALL*d = 'x'").unwrap(), &mixed).unwrap_err();
        assert_eq!(err.code(), "E_HETEROGENEOUS_TYPES");
        // projections may mix types freely
        assert_eq!(
            rewrite(&parse_kql("SELECT ALL*d FROM t").unwrap(), &mixed).unwrap().render(),
            "SELECT a, b FROM t"
        );
    }

    #[test]
    fn tag_mutation_widens_predicates() {
        let reg = fixtures::email_registry();
        let q = parse_kql("SELECT message_id FROM ALL/emailmessage WHERE ALL*email_address*_:source = 'x'").unwrap();
        assert_eq!(
            rewrite(&q, &reg).unwrap().render(),
            "SELECT message_id FROM email_message_table WHERE sender_address = 'x'"
        );
        let reg = reg
            .mutate_tags("email_message_table", "recipient_address", &[TagRef::default_scheme("source")], &[])
            .unwrap();
        assert_eq!(
            rewrite(&q, &reg).unwrap().render(),
            "SELECT message_id FROM email_message_table WHERE (recipient_address = 'x' OR sender_address = 'x')"
        );

        // Removing the only tag that sets the two datetime fields apart.
        let q = parse_kql("SELECT message_id FROM email_message_table WHERE ALL*datetime*_:recipient = 'x'").unwrap();
        let reg = fixtures::email_registry()
            .mutate_tags("email_message_table", "sent_time", &[TagRef::default_scheme("recipient")], &[])
            .unwrap();
        assert_eq!(
            rewrite(&q, &reg).unwrap().render(),
            "SELECT message_id FROM email_message_table WHERE (sent_time = 'x' OR received_time = 'x')"
        );
    }

    #[test]
    fn provenance_of_fixture_queries() {
        let p = rw(SENDERS_KQL).unwrap().provenance().clone();
        assert_eq!(p.tables, ["email_message_table"]);
        assert_eq!(p.fields, ["sender_address", "message_folder"]);
        assert!(p.time_bounds.is_empty());

        let p = rw(NESTED_KQL).unwrap().provenance().clone();
        assert_eq!(p.tables, ["email_message_table"]);
        assert_eq!(p.time_bounds.len(), 1);
        assert_eq!(
            p.time_bounds[0].to_string(),
            "sent_time [2000-01-01 00:00:00-07:00, 2003-01-01 00:00:00-07:00)"
        );
    }

    #[test]
    fn provenance_bounds_widen_and_respect_negation() {
        let p = rw("SELECT message_id FROM email_message_table WHERE \
                    (sent_time > '2001-01-01 00:00:00+00:00' OR sent_time >= '2000-06-01 00:00:00-07:00') \
                    AND NOT sent_time >= '2002-01-01 00:00:00-08:00'")
        .unwrap()
        .provenance()
        .clone();
        assert_eq!(
            p.time_bounds,
            vec![TimeBound {
                field: "sent_time".into(),
                lower: Some(Bound {
                    value: "2000-06-01 00:00:00-07:00".into(),
                    inclusive: true
                }),
                upper: Some(Bound {
                    value: "2002-01-01 00:00:00-08:00".into(),
                    inclusive: false
                }),
            }]
        );
    }

    const TWO_TABLES: &str = r#"{
        "dimensions": [{"name": "email_address"}, {"name": "folder"}, {"name": "subject"}],
        "tags": [{"scheme": "_", "name": "source"}],
        "dimension_sets": [{"name": "mail", "dimensions": ["email_address", "folder"]}],
        "tables": [
            {"name": "mail_2001", "fields": [
                {"name": "from_addr", "type": "string", "dimension": "email_address", "tags": ["_:source"]},
                {"name": "folder", "type": "string", "dimension": "folder"}]},
            {"name": "mail_2002", "fields": [
                {"name": "box", "type": "string", "dimension": "folder"},
                {"name": "sender", "type": "string", "dimension": "email_address", "tags": ["_:source"]},
                {"name": "subj", "type": "string", "dimension": "subject"}]}
        ]
    }"#;

    #[test]
    fn table_selector_over_two_tables_unions() {
        let reg = Registry::from_json(TWO_TABLES).unwrap();
        let q = parse_kql("SELECT ALL*email_address*_:source FROM ALL/mail WHERE ALL*folder = 'sent'").unwrap();
        let s = rewrite(&q, &reg).unwrap();
        assert_eq!(
            s.render(),
            "SELECT from_addr FROM mail_2001 WHERE folder = 'sent' \
             UNION ALL SELECT sender FROM mail_2002 WHERE box = 'sent'"
        );
        assert_eq!(s.provenance().tables, ["mail_2001", "mail_2002"]);

        // scoped table selector picks one table
        let q = parse_kql("SELECT ALL*folder FROM mail_2002/mail").unwrap();
        assert_eq!(rewrite(&q, &reg).unwrap().render(), "SELECT box FROM mail_2002");

        let star = parse_kql("SELECT * FROM ALL/mail").unwrap();
        assert_eq!(rewrite(&star, &reg).unwrap_err().code(), "E_HETEROGENEOUS");
        let misaligned = parse_kql("SELECT ALL*[mail] FROM ALL/mail").unwrap();
        assert_eq!(rewrite(&misaligned, &reg).unwrap_err().code(), "E_HETEROGENEOUS");
    }

    #[test]
    fn output_is_free_of_aexprs_and_idempotent() {
        for text in [SENDERS_KQL, NESTED_KQL, "SELECT ALL*datetime FROM ALL/email_event WHERE ALL*email_address != 'x'"] {
            let s = rw(text).unwrap();
            let reparsed = parse_kql(&s.render()).unwrap();
            assert!(extract_aexprs(&reparsed).is_empty());
            let again = rewrite(&reparsed, &fixtures::email_registry()).unwrap();
            assert_eq!(again, s);
        }
    }
}
