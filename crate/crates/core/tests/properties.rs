use kql_core::ast::{Literal, PlainQuery};
use kql_core::engine::{execute_plain, Table};
use kql_core::{fixtures, parse_kql, rewrite, Database, Timestamp, Value, ValueType};
use proptest::prelude::*;

fn db_with(rows: Vec<(String, i64, String)>) -> Database {
    let mut t = Table::new(
        "t",
        vec![("a".into(), ValueType::String), ("n".into(), ValueType::Integer), ("ts".into(), ValueType::Timestamp)],
    );
    for (a, n, ts) in rows {
        t.rows.push(vec![Value::Str(a), Value::Int(n), Value::Ts(Timestamp::parse(&ts).unwrap())]);
    }
    let mut db = Database::new();
    db.insert(t);
    db
}

fn row() -> impl Strategy<Value = (String, i64, String)> {
    (
        prop::sample::select(vec!["x", "y", "z"]).prop_map(String::from),
        0i64..4,
        (0u32..3, prop::sample::select(vec!["-08:00", "-07:00", "+00:00"]))
            .prop_map(|(h, off)| format!("2001-01-01 0{h}:00:00{off}")),
    )
}

fn plain(text: &str) -> PlainQuery {
    parse_kql(text).unwrap().into_plain().unwrap()
}

proptest! {
    #[test]
    fn distinct_is_a_duplicate_free_subsequence(rows in prop::collection::vec(row(), 0..40), cols in prop::sample::select(vec!["a", "n", "ts", "a, n", "n, ts", "a, n, ts"])) {
        let db = db_with(rows);
        let all = execute_plain(&plain(&format!("SELECT {cols} FROM t")), &db).unwrap();
        let distinct = execute_plain(&plain(&format!("SELECT DISTINCT {cols} FROM t")), &db).unwrap();
        let mut seen = std::collections::HashSet::new();
        prop_assert!(distinct.rows.iter().all(|r| seen.insert(r.clone())));
        let mut it = all.rows.iter();
        prop_assert!(distinct.rows.iter().all(|r| it.any(|x| x == r)));
        // and nothing is lost
        prop_assert!(all.rows.iter().all(|r| seen.contains(r)));
    }

    #[test]
    fn and_of_timestamp_ranges_matches_filtering_twice(rows in prop::collection::vec(row(), 0..40), lo in 0u32..3, hi in 0u32..4) {
        let db = db_with(rows);
        let lo = format!("2001-01-01 0{lo}:00:00-08:00");
        let hi = format!("2001-01-01 0{hi}:00:00+00:00");
        let both = execute_plain(&plain(&format!("SELECT a, ts FROM t WHERE ts >= '{lo}' AND ts < '{hi}'")), &db).unwrap();
        let nested = execute_plain(
            &plain(&format!("SELECT a, ts FROM (SELECT * FROM t WHERE ts >= '{lo}') AS x WHERE ts < '{hi}'")),
            &db,
        )
        .unwrap();
        prop_assert_eq!(&both, &nested);
        let doc = kql_core::mongo::emit_plain(&plain(&format!("SELECT a, ts FROM t WHERE ts >= '{lo}' AND ts < '{hi}'"))).unwrap();
        prop_assert_eq!(kql_core::execute_mongo(&doc, &db).unwrap(), both);
    }

    #[test]
    fn parse_errors_point_inside_the_input(text in "[ -~]{0,60}") {
        if let Err(e) = parse_kql(&text) {
            prop_assert!(e.offset() <= text.chars().count());
        }
    }

    #[test]
    fn rewriting_is_deterministic(lit in "[a-z' ]{0,8}", n in -5i64..5) {
        let registry = fixtures::email_registry();
        let text = format!(
            "SELECT ALL*[email_event] FROM ALL/emailmessage WHERE ALL*email_address = '{}' OR ALL*count < {n}",
            lit.replace('\'', "''")
        );
        let q = parse_kql(&text).unwrap();
        let a = rewrite(&q, &registry).unwrap();
        let b = rewrite(&parse_kql(&a.render()).unwrap(), &registry).unwrap();
        prop_assert_eq!(a.render(), b.render());
        prop_assert_eq!(a.render(), rewrite(&q, &registry).unwrap().render());
        let lits: Vec<Literal> = a.query().branches[0].selection.as_ref().unwrap().comparisons().into_iter().map(|c| c.literal.clone()).collect();
        prop_assert_eq!(lits.len(), 3);
    }
}
