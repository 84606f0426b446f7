//! Plain SQL (no A-Expressions) must rewrite to its own canonical form.

use kql_core::ast::{CmpOp, Comparison, Condition, FromItem, Literal, PlainQuery, Projection, Query, Select};
use kql_core::{extract_aexprs, fixtures, parse_kql, rewrite};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{canon, Report};

const TABLES: [&str; 4] = ["orders", "t", "email_message_table", "raw_message_table"];
const COLUMNS: [&str; 6] = ["a", "b", "price", "customer_name", "sender_address", "message_key"];

fn literal(rng: &mut impl Rng) -> Literal {
    match rng.gen_range(0..4) {
        0 => Literal::Int(rng.gen_range(-50..50)),
        1 => Literal::Str("it's".into()),
        2 => Literal::Str(String::new()),
        _ => Literal::Str(format!("v{}", rng.gen_range(0..9))),
    }
}

fn condition(rng: &mut impl Rng, depth: usize) -> Condition<String> {
    let roll = if depth == 0 { 0 } else { rng.gen_range(0..6) };
    match roll {
        0..=1 => Condition::Compare(Comparison {
            operand: COLUMNS.choose(rng).expect("cols").to_string(),
            op: *CmpOp::ALL.choose(rng).expect("ops"),
            literal: literal(rng),
        }),
        2 => Condition::negate(condition(rng, depth - 1)),
        3 => Condition::paren(condition(rng, depth - 1)),
        4 => Condition::and(condition(rng, depth - 1), condition(rng, depth - 1)),
        _ => Condition::or(condition(rng, depth - 1), condition(rng, depth - 1)),
    }
}

fn select(rng: &mut impl Rng, depth: usize) -> Select<String, String> {
    let projection = if rng.gen_bool(0.2) {
        Projection::Star
    } else {
        let n = rng.gen_range(1..=3);
        Projection::Columns(COLUMNS.choose_multiple(rng, n).map(|c| c.to_string()).collect())
    };
    let from = if depth > 0 && rng.gen_bool(0.3) {
        FromItem::Subquery {
            query: Box::new(query(rng, depth - 1)),
            alias: format!("sub{depth}"),
        }
    } else {
        FromItem::Table(TABLES.choose(rng).expect("tables").to_string())
    };
    Select {
        distinct: rng.gen_bool(0.3),
        projection,
        from,
        selection: rng.gen_bool(0.8).then(|| condition(rng, 3)),
    }
}

fn query(rng: &mut impl Rng, depth: usize) -> PlainQuery {
    let n = if rng.gen_bool(0.15) { 2 } else { 1 };
    Query {
        branches: (0..n).map(|_| select(rng, depth)).collect(),
    }
}

/// Re-spaces and re-cases canonical SQL without changing its meaning.
fn noisy(text: &str, rng: &mut impl Rng) -> String {
    let mut out = String::new();
    let mut in_str = false;
    for c in text.chars() {
        if c == '\'' {
            in_str = !in_str;
        }
        if !in_str && c == ' ' && rng.gen_bool(0.3) {
            out.push_str("  \n\t");
        } else if !in_str && c.is_ascii_uppercase() && rng.gen_bool(0.3) {
            out.push(c.to_ascii_lowercase());
        } else {
            out.push(c);
        }
    }
    out
}

pub fn suite(n: usize, seed: u64) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let registry = fixtures::email_registry();
    let mut report = Report::default();
    for _ in 0..n {
        report.cases += 1;
        let canonical = query(&mut rng, 2).to_string();
        let text = noisy(&canonical, &mut rng);
        let rendered = match parse_kql(&text).map_err(|e| e.to_string()).and_then(|q| rewrite(&q, &registry).map_err(|e| e.to_string())) {
            Ok(sql) => sql.render(),
            Err(e) => {
                report.fail(format!("{text}\n    failed: {e}"));
                continue;
            }
        };
        if rendered != canonical {
            report.fail(format!("{canonical}\n    rewrote to {rendered}"));
        }
        if canon::sql(&rendered) != canon::sql(&text) {
            report.fail(format!("{text}\n    differs from {rendered} after canonicalization"));
        }
        match parse_kql(&rendered) {
            Ok(q) if extract_aexprs(&q).is_empty() => {}
            _ => report.fail(format!("{rendered}\n    still contains A-Expressions")),
        }
    }
    report
}
