use std::collections::BTreeMap;

use kql_bench::run::{corpus_database, run_on_corpus, BenchParams};
use kql_bench::{build_email_graph, generate_corpus, CorpusSpec, GraphParams, InitialSenders, Mode, Session};
use kql_core::engine::{load_table, schema_of, Table};
use kql_core::{fixtures, Database, Value};

fn jsonl(t: &Table) -> Vec<u8> {
    let mut out = Vec::new();
    t.write_jsonl(&mut out).unwrap();
    out
}

fn params(spec: &CorpusSpec, min_messages: u64, initial: InitialSenders) -> GraphParams {
    GraphParams {
        min_messages,
        initial_senders: initial,
        window: (spec.start.clone(), spec.end.clone()),
    }
}

#[test]
fn generation_is_deterministic() {
    let spec = CorpusSpec::new(10, 500, 12, 1).unwrap();
    assert_eq!(jsonl(&generate_corpus(&spec).unwrap()), jsonl(&generate_corpus(&spec).unwrap()));
    let other = CorpusSpec { seed: 2, ..spec };
    assert_ne!(jsonl(&generate_corpus(&other).unwrap()), jsonl(&generate_corpus(&CorpusSpec::new(10, 500, 12, 1).unwrap()).unwrap()));
}

#[test]
fn generated_rows_pass_load_validation() {
    let spec = CorpusSpec::new(50, 10_000, 12, 7).unwrap();
    let table = generate_corpus(&spec).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("email_message_table.jsonl");
    std::fs::write(&path, jsonl(&table)).unwrap();
    let registry = fixtures::email_registry();
    let schema = schema_of(registry.table(fixtures::EMAIL_TABLE).unwrap());
    let loaded = load_table(&path, fixtures::EMAIL_TABLE, schema).unwrap();
    assert_eq!(loaded.extra_key_rows, 0);
    assert_eq!(loaded.table, table);
}

fn message(sender: &str, recipient: &str, i: usize) -> Vec<Value> {
    let ts = kql_core::Timestamp::parse("2001-01-01 00:00:00-08:00").unwrap();
    vec![
        Value::Str(format!("<{i}@t>")),
        Value::Ts(ts.clone()),
        Value::Str(recipient.into()),
        Value::Str("sent".into()),
        Value::Ts(ts),
        Value::Str(String::new()),
        Value::Str(String::new()),
        Value::Str(sender.into()),
        Value::Int(1),
        Value::Str(String::new()),
        Value::Str(String::new()),
    ]
}

#[test]
fn threshold_keeps_only_strong_edges() {
    let registry = fixtures::email_registry();
    let mut table = Table::new(fixtures::EMAIL_TABLE, schema_of(registry.table(fixtures::EMAIL_TABLE).unwrap()));
    for i in 0..12 {
        table.rows.push(message("alice", "bob", i));
    }
    for i in 12..15 {
        table.rows.push(message("bob", "carol", i));
    }
    let mut db = Database::new();
    db.insert(table);
    let spec = CorpusSpec::new(3, 15, 60, 0).unwrap();
    let dir = tempfile::tempdir().unwrap();
    for mode in [Mode::Kql, Mode::Direct] {
        let mut session = Session::new(&db, &registry, mode, dir.path().join("r.jsonl"));
        let g = build_email_graph(&mut session, &params(&spec, 10, InitialSenders::All)).unwrap();
        assert_eq!(g.edges.into_iter().collect::<Vec<_>>(), [(("alice".to_string(), "bob".to_string()), 12)]);
        assert_eq!(session.call_times.len(), 3);
    }
}

#[test]
fn threshold_one_matches_brute_force_counts() {
    let spec = CorpusSpec::new(12, 1_000, 12, 1).unwrap();
    let table = generate_corpus(&spec).unwrap();
    let mut expected: BTreeMap<(String, String), u64> = BTreeMap::new();
    for row in &table.rows {
        let (Value::Str(r), Value::Str(s)) = (&row[2], &row[7]) else { panic!() };
        *expected.entry((s.clone(), r.clone())).or_default() += 1;
    }
    let db = corpus_database(&spec).unwrap();
    let registry = fixtures::email_registry();
    let dir = tempfile::tempdir().unwrap();
    let mut session = Session::new(&db, &registry, Mode::Kql, dir.path().join("r.jsonl"));
    let g = build_email_graph(&mut session, &params(&spec, 1, InitialSenders::All)).unwrap();
    assert_eq!(g.edges, expected);
}

#[test]
fn one_initial_sender_limits_the_graph() {
    let spec = CorpusSpec::new(12, 1_000, 12, 1).unwrap();
    let table = generate_corpus(&spec).unwrap();
    let Value::Str(first) = &table.rows[0][7] else { panic!() };
    let db = corpus_database(&spec).unwrap();
    let registry = fixtures::email_registry();
    let dir = tempfile::tempdir().unwrap();
    let mut session = Session::new(&db, &registry, Mode::Direct, dir.path().join("r.jsonl"));
    let g = build_email_graph(&mut session, &params(&spec, 1, InitialSenders::First(1))).unwrap();
    assert!(!g.edges.is_empty());
    assert!(g.edges.keys().all(|(s, _)| s == first));
    assert_eq!(session.call_times.len(), 2);
}

#[test]
fn empty_sender_set_is_an_error() {
    let registry = fixtures::email_registry();
    let mut db = Database::new();
    db.insert(Table::new(fixtures::EMAIL_TABLE, schema_of(registry.table(fixtures::EMAIL_TABLE).unwrap())));
    let spec = CorpusSpec::new(2, 1, 12, 0).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let mut session = Session::new(&db, &registry, Mode::Kql, dir.path().join("r.jsonl"));
    let err = build_email_graph(&mut session, &params(&spec, 10, InitialSenders::All)).unwrap_err();
    assert_eq!(err.code(), "E_EMPTY");
}

#[test]
fn modes_agree_on_seed_one() {
    let spec = CorpusSpec::new(20, 1_000, 12, 1).unwrap();
    let db = corpus_database(&spec).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let p = BenchParams::default();
    let kql = run_on_corpus(&db, &spec, &p, Mode::Kql, dir.path()).unwrap();
    let direct = run_on_corpus(&db, &spec, &p, Mode::Direct, dir.path()).unwrap();
    assert_eq!(kql.result_digest, direct.result_digest);
    assert_eq!(kql.communities, direct.communities);
    assert_eq!(kql.n_calls, direct.n_calls);
    assert!(kql.n_calls > 0 && kql.n_edges > 0);
    assert!(kql.rewrite_mean_us.unwrap() > 0.0);
    assert!(direct.rewrite_mean_us.is_none());
    assert!(dir.path().join("results-kql.jsonl").exists());
    assert!(dir.path().join("results-direct.jsonl").exists());
}

#[test]
fn pinned_call_count_seed_seven() {
    let spec = CorpusSpec::new(50, 10_000, 12, 7).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let report = kql_bench::run_benchmark(&spec, &BenchParams::default(), Mode::Direct, dir.path()).unwrap();
    // one senders query plus one per distinct sender
    assert_eq!(report.n_calls, 51);
}
