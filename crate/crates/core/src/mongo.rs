//! SQL → MongoDB shell query emission.
//!
//! Handles a single physical table, optionally through one level of
//! `FROM (SELECT * FROM t WHERE c1) AS a`, which is flattened to a filter on
//! `t` conjoining `c1` with the outer condition. Text output follows the
//! shell syntax `db.<collection>.distinct(...)` / `db.<collection>.find(...)`.

use std::fmt;

use thiserror::Error;

use crate::ast::{CmpOp, Condition, FromItem, Literal, PlainQuery, Projection};
use crate::rewriter::SqlQuery;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("E_UNSUPPORTED: {0}")]
pub struct EmitError(pub String);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verb {
    Distinct(String),
    /// `None` projects every field.
    Find(Option<Vec<String>>),
}

/// Comparison operators other than equality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MongoOp {
    Ne,
    Lt,
    Lte,
    Gt,
    Gte,
}

impl MongoOp {
    pub fn as_str(self) -> &'static str {
        match self {
            MongoOp::Ne => "$ne",
            MongoOp::Lt => "$lt",
            MongoOp::Lte => "$lte",
            MongoOp::Gt => "$gt",
            MongoOp::Gte => "$gte",
        }
    }

    pub fn cmp_op(self) -> CmpOp {
        match self {
            MongoOp::Ne => CmpOp::Ne,
            MongoOp::Lt => CmpOp::Lt,
            MongoOp::Lte => CmpOp::Le,
            MongoOp::Gt => CmpOp::Gt,
            MongoOp::Gte => CmpOp::Ge,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Filter {
    /// `{ "field" : value }`
    Eq { field: String, value: Literal },
    /// `{ "field" : { "$op" : value } }`
    Op { field: String, op: MongoOp, value: Literal },
    And(Vec<Filter>),
    Or(Vec<Filter>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MongoQueryDoc {
    pub collection: String,
    pub verb: Verb,
    /// `None` is the empty filter `{}`.
    pub filter: Option<Filter>,
}

fn unsupported(what: impl Into<String>) -> EmitError {
    EmitError(what.into())
}

fn comparison(field: &str, op: CmpOp, value: &Literal) -> Filter {
    let field = field.to_string();
    let value = value.clone();
    let op = match op {
        CmpOp::Eq => return Filter::Eq { field, value },
        CmpOp::Ne => MongoOp::Ne,
        CmpOp::Lt => MongoOp::Lt,
        CmpOp::Le => MongoOp::Lte,
        CmpOp::Gt => MongoOp::Gt,
        CmpOp::Ge => MongoOp::Gte,
    };
    Filter::Op { field, op, value }
}

fn conjoin(parts: Vec<Filter>, and: bool) -> Filter {
    let mut flat = Vec::new();
    for p in parts {
        match (p, and) {
            (Filter::And(inner), true) | (Filter::Or(inner), false) => flat.extend(inner),
            (other, _) => flat.push(other),
        }
    }
    if and {
        Filter::And(flat)
    } else {
        Filter::Or(flat)
    }
}

/// Translates a WHERE condition into a filter document. Negation is pushed
/// down to the comparisons (rows carry no NULLs, so this is exact).
pub fn filter_of(c: &Condition<String>) -> Result<Filter, EmitError> {
    Ok(filter_with(c, false))
}

fn filter_with(c: &Condition<String>, negated: bool) -> Filter {
    match c {
        Condition::Compare(cmp) => {
            let op = if negated { cmp.op.negate() } else { cmp.op };
            comparison(&cmp.operand, op, &cmp.literal)
        }
        Condition::Paren(inner) => filter_with(inner, negated),
        Condition::Not(inner) => filter_with(inner, !negated),
        Condition::And(l, r) => conjoin(vec![filter_with(l, negated), filter_with(r, negated)], !negated),
        Condition::Or(l, r) => conjoin(vec![filter_with(l, negated), filter_with(r, negated)], negated),
    }
}

/// Translates a rewritten query into a MongoDB query document.
pub fn emit(s: &SqlQuery) -> Result<MongoQueryDoc, EmitError> {
    emit_plain(s.query())
}

pub fn emit_plain(q: &PlainQuery) -> Result<MongoQueryDoc, EmitError> {
    let [select] = q.branches.as_slice() else {
        return Err(unsupported("UNION ALL"));
    };
    let (collection, inner_filter) = match &select.from {
        FromItem::Table(t) => (t.clone(), None),
        FromItem::Subquery { query, .. } => {
            let [inner] = query.branches.as_slice() else {
                return Err(unsupported("UNION ALL inside a subquery"));
            };
            if inner.projection != Projection::Star {
                return Err(unsupported("projection subquery (only SELECT * subqueries flatten)"));
            }
            if inner.distinct {
                return Err(unsupported("DISTINCT subquery"));
            }
            let FromItem::Table(t) = &inner.from else {
                return Err(unsupported("nested subquery"));
            };
            (t.clone(), inner.selection.as_ref().map(filter_of).transpose()?)
        }
    };
    let outer_filter = select.selection.as_ref().map(filter_of).transpose()?;
    let filter = match (inner_filter, outer_filter) {
        (Some(a), Some(b)) => Some(conjoin(vec![a, b], true)),
        (a, b) => a.or(b),
    };
    let verb = match (&select.projection, select.distinct) {
        (Projection::Columns(cols), true) if cols.len() == 1 => Verb::Distinct(cols[0].clone()),
        (_, true) => return Err(unsupported("DISTINCT over more than one field")),
        (Projection::Columns(cols), false) => Verb::Find(Some(cols.clone())),
        (Projection::Star, false) => Verb::Find(None),
    };
    Ok(MongoQueryDoc {
        collection,
        verb,
        filter,
    })
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

impl fmt::Display for MongoOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn write_value(f: &mut fmt::Formatter<'_>, v: &Literal) -> fmt::Result {
    match v {
        Literal::Str(s) => f.write_str(&json_str(s)),
        Literal::Int(i) => write!(f, "{i}"),
    }
}

impl fmt::Display for Filter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Filter::Eq { field, value } => {
                write!(f, "{{ {} : ", json_str(field))?;
                write_value(f, value)?;
                f.write_str("}")
            }
            Filter::Op { field, op, value } => {
                write!(f, "{{ {} : {{ {} : ", json_str(field), json_str(op.as_str()))?;
                write_value(f, value)?;
                f.write_str("}}")
            }
            Filter::And(parts) | Filter::Or(parts) => {
                let key = if matches!(self, Filter::And(_)) { "$and" } else { "$or" };
                write!(f, "{{ {} : [", json_str(key))?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str("]}")
            }
        }
    }
}

impl fmt::Display for MongoQueryDoc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let filter = match &self.filter {
            Some(filter) => filter.to_string(),
            None => "{}".to_string(),
        };
        write!(f, "db.{}.", self.collection)?;
        match &self.verb {
            Verb::Distinct(field) => write!(f, "distinct({}, {filter})", json_str(field)),
            Verb::Find(None) => write!(f, "find({filter})"),
            Verb::Find(Some(cols)) => {
                write!(f, "find({filter}, {{ ")?;
                for c in cols {
                    write!(f, "{} : 1, ", json_str(c))?;
                }
                f.write_str("\"_id\" : 0})")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, NESTED_KQL, SENDERS_KQL, SENDERS_MONGO};
    use crate::parser::parse_kql;
    use crate::registry::Registry;
    use crate::rewriter::rewrite;

    fn emit_kql(text: &str) -> Result<MongoQueryDoc, EmitError> {
        emit(&rewrite(&parse_kql(text).unwrap(), &fixtures::email_registry()).unwrap())
    }

    fn emit_sql(text: &str) -> Result<MongoQueryDoc, EmitError> {
        emit(&rewrite(&parse_kql(text).unwrap(), &Registry::default()).unwrap())
    }

    #[test]
    fn emits_distinct_senders() {
        let doc = emit_kql(SENDERS_KQL).unwrap();
        assert_eq!(doc.verb, Verb::Distinct("sender_address".into()));
        assert_eq!(doc.to_string(), SENDERS_MONGO);
    }

    #[test]
    fn flattens_nested_query() {
        let doc = emit_kql(NESTED_KQL).unwrap();
        assert_eq!(doc.collection, "email_message_table");
        let Some(Filter::And(parts)) = &doc.filter else {
            panic!("expected $and");
        };
        assert_eq!(
            parts,
            &vec![
                Filter::Eq {
                    field: "sender_address".into(),
                    value: Literal::Str("susan.scott@enron.com".into())
                },
                Filter::Op {
                    field: "sent_time".into(),
                    op: MongoOp::Gte,
                    value: Literal::Str("2000-01-01 00:00:00-07:00".into())
                },
                Filter::Op {
                    field: "sent_time".into(),
                    op: MongoOp::Lt,
                    value: Literal::Str("2003-01-01 00:00:00-07:00".into())
                },
            ]
        );
        let Verb::Find(Some(cols)) = &doc.verb else {
            panic!("expected find with projection");
        };
        assert_eq!(cols.len(), 11);
        let text = doc.to_string();
        assert!(text.contains(r#"{ "sent_time" : { "$gte" : "2000-01-01 00:00:00-07:00"}}"#), "{text}");
        assert!(text.ends_with(r#""message_subject" : 1, "_id" : 0})"#), "{text}");
    }

    #[test]
    fn empty_filter_find() {
        assert_eq!(emit_sql("SELECT a FROM t").unwrap().to_string(), r#"db.t.find({}, { "a" : 1, "_id" : 0})"#);
        assert_eq!(emit_sql("SELECT * FROM t").unwrap().to_string(), "db.t.find({})");
        assert_eq!(
            emit_sql("SELECT DISTINCT a FROM t").unwrap().to_string(),
            r#"db.t.distinct("a", {})"#
        );
    }

    #[test]
    fn negations_and_operators() {
        let doc = emit_sql("SELECT a FROM t WHERE NOT a = 'x' AND NOT (b < 3) AND NOT c >= 'q' AND d != 4 AND NOT e != 'y'").unwrap();
        assert_eq!(
            doc.filter.unwrap().to_string(),
            r#"{ "$and" : [{ "a" : { "$ne" : "x"}}, { "b" : { "$gte" : 3}}, { "c" : { "$lt" : "q"}}, { "d" : { "$ne" : 4}}, { "e" : "y"}]}"#
        );
        let doc = emit_sql("SELECT a FROM t WHERE NOT a <= 1 OR NOT a > 2").unwrap();
        assert_eq!(
            doc.filter.unwrap().to_string(),
            r#"{ "$or" : [{ "a" : { "$gt" : 1}}, { "a" : { "$lte" : 2}}]}"#
        );
    }

    #[test]
    fn preserves_predicate_order_across_nesting() {
        let doc = emit_sql("SELECT a FROM t WHERE a = 1 OR (b = 2 AND (c = 3 OR d = 4))").unwrap();
        assert_eq!(
            doc.filter.unwrap().to_string(),
            r#"{ "$or" : [{ "a" : 1}, { "$and" : [{ "b" : 2}, { "$or" : [{ "c" : 3}, { "d" : 4}]}]}]}"#
        );
    }

    #[test]
    fn escapes_strings() {
        let doc = emit_sql(r#"SELECT a FROM t WHERE a = 'say "hi"'"#).unwrap();
        assert_eq!(doc.filter.unwrap().to_string(), r#"{ "a" : "say \"hi\""}"#);
    }

    #[test]
    fn negation_distributes() {
        let doc = emit_sql("SELECT a FROM t WHERE NOT (a = 1 AND (b = 2 OR NOT c < 3))").unwrap();
        assert_eq!(
            doc.filter.unwrap().to_string(),
            r#"{ "$or" : [{ "a" : { "$ne" : 1}}, { "$and" : [{ "b" : { "$ne" : 2}}, { "c" : { "$lt" : 3}}]}]}"#
        );
    }

    #[test]
    fn unsupported_shapes() {
        for text in [
            "SELECT a FROM t UNION ALL SELECT a FROM u",
            "SELECT a FROM (SELECT a FROM t) AS x",
            "SELECT a FROM (SELECT DISTINCT * FROM t) AS x",
            "SELECT a FROM (SELECT * FROM (SELECT * FROM t) AS y) AS x",
            "SELECT DISTINCT a, b FROM t",
            "SELECT DISTINCT * FROM t",
        ] {
            let err = emit_sql(text).unwrap_err();
            assert!(err.to_string().starts_with("E_UNSUPPORTED"), "{text}");
        }
    }
}
