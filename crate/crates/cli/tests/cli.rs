use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use kql_core::fixtures;

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

fn registry() -> PathBuf {
    fixture_dir().join("email_registry.json")
}

fn kql(args: &[&str], stdin: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_kql"));
    cmd.args(args)
        .env_remove("KQL_REGISTRY")
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    cmd.stdin(if stdin.is_some() { Stdio::piped() } else { Stdio::null() });
    let mut child = cmd.spawn().expect("spawn kql");
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    }
    child.wait_with_output().unwrap()
}

fn with_registry<'a>(reg: &'a str, rest: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec!["--registry", reg];
    v.extend_from_slice(rest);
    v
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn validate_reports_bound_fields() {
    let reg = registry();
    let out = kql(&["validate", reg.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("11 fields bound"));
}

#[test]
fn validate_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    let text = fixtures::EMAIL_REGISTRY_JSON.replacen("\"_:source\"", "\"_:nosuch\"", 1);
    assert_ne!(text, fixtures::EMAIL_REGISTRY_JSON);
    std::fs::write(&bad, text).unwrap();
    let out = kql(&["validate", bad.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("E_REF"), "{}", stderr(&out));

    let missing = dir.path().join("missing.json");
    let out = kql(&["validate", missing.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("E_IO"));
}

#[test]
fn missing_registry_is_a_usage_error() {
    let out = kql(&["rewrite", "SELECT a FROM t"], None);
    assert_eq!(out.status.code(), Some(64));
    let out = kql(&["frobnicate"], None);
    assert_eq!(out.status.code(), Some(64));
    let out = kql(&["--help"], None);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn rewrite_golden_and_stdin() {
    let reg = registry();
    let reg = reg.to_str().unwrap();
    let out = kql(&with_registry(reg, &["rewrite", fixtures::SENDERS_KQL]), None);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out).trim_end(), fixtures::SENDERS_SQL);

    // piped input wins over the argument
    let out = kql(&with_registry(reg, &["rewrite", "SELECT ignored FROM x"]), Some(fixtures::NESTED_KQL));
    assert_eq!(stdout(&out).trim_end(), fixtures::NESTED_SQL);

    // empty piped input falls back to the argument
    let out = kql(&with_registry(reg, &["rewrite", fixtures::SENDERS_KQL]), Some("  \n"));
    assert_eq!(stdout(&out).trim_end(), fixtures::SENDERS_SQL);
}

#[test]
fn rewrite_output_is_a_fixpoint() {
    let reg = registry();
    let reg = reg.to_str().unwrap();
    for q in [fixtures::SENDERS_KQL, fixtures::NESTED_KQL] {
        let once = stdout(&kql(&with_registry(reg, &["rewrite", q]), None));
        let twice = stdout(&kql(&with_registry(reg, &["rewrite"]), Some(&once)));
        assert_eq!(once, twice);
    }
}

#[test]
fn unresolvable_aexpr_exits_three() {
    let reg = registry();
    let out = kql(
        &with_registry(reg.to_str().unwrap(), &["rewrite", "SELECT ALL*subject*_:sender FROM email_message_table"]),
        None,
    );
    assert_eq!(out.status.code(), Some(3));
    let err = stderr(&out);
    assert!(err.contains("E_NO_FIELD") && err.contains("ALL*subject*_:sender"), "{err}");

    let out = kql(&with_registry(reg.to_str().unwrap(), &["rewrite", "SELECT FROM"]), None);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("E_SYNTAX"));
}

#[test]
fn emit_mongo_golden() {
    let reg = registry();
    let out = kql(&with_registry(reg.to_str().unwrap(), &["emit-mongo", fixtures::SENDERS_KQL]), None);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out).trim_end(), fixtures::SENDERS_MONGO);
}

#[test]
fn run_with_provenance_and_formats() {
    let reg = registry();
    let data = fixture_dir().join("data");
    let base = ["--registry", reg.to_str().unwrap(), "--data", data.to_str().unwrap()];
    let mut args = base.to_vec();
    args.extend(["--provenance", "run", fixtures::SENDERS_KQL]);
    let out = kql(&args, None);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with(
        "{\"sender_address\":\"mark.haedicke@enron.com\"}\n{\"sender_address\":\"vince.kaminski@enron.com\"}\n-- provenance\n"
    ));
    assert!(text.contains("-- tables: email_message_table"));

    let mut args = base.to_vec();
    args.extend(["--format", "csv", "run", fixtures::NESTED_KQL]);
    let text = stdout(&kql(&args, None));
    assert_eq!(text.lines().count(), 2);
    assert!(text.starts_with("message_id,sent_time,"));

    let mut args = base.to_vec();
    args.extend(["run", "SELECT a FROM no_such_table"]);
    let out = kql(&args, None);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("E_UNKNOWN_TABLE"));
}

#[test]
fn out_flag_writes_a_file() {
    let reg = registry();
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("q.sql");
    let out = kql(
        &["--registry", reg.to_str().unwrap(), "--out", target.to_str().unwrap(), "rewrite", fixtures::SENDERS_KQL],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).is_empty());
    assert_eq!(std::fs::read_to_string(target).unwrap().trim_end(), fixtures::SENDERS_SQL);
}

#[test]
fn repl_tag_mutation_changes_resolution() {
    let dir = tempfile::tempdir().unwrap();
    let reg = dir.path().join("reg.json");
    std::fs::write(&reg, fixtures::EMAIL_REGISTRY_JSON).unwrap();
    let saved = dir.path().join("saved.json");
    let script = format!(
        "{q}\n\\tags add email_message_table.recipient_address _:source\n{q}\n\\mongo\n{q}\n\\bogus\n\\save {}\n\\q\n{q}\n",
        saved.display(),
        q = fixtures::SENDERS_KQL
    );
    let out = kql(&["--registry", reg.to_str().unwrap(), "repl"], Some(&script));
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let lines: Vec<String> = stdout(&out).lines().map(str::to_string).collect();
    assert_eq!(lines[0], fixtures::SENDERS_SQL);
    assert!(lines[1].contains("_:recipient, _:source"), "{lines:?}");
    assert!(lines[2].starts_with("SELECT DISTINCT recipient_address, sender_address FROM"));
    assert_eq!(lines[3], "mode: mongo");
    // the widened projection is a multi-column DISTINCT, which has no shell form
    assert!(lines[4].starts_with("error: E_UNSUPPORTED"), "{}", lines[4]);
    assert!(lines[5].starts_with("error: unknown command"));
    assert!(lines[6].starts_with("saved "));
    // nothing after \q runs
    assert_eq!(lines.len(), 7);

    let out = kql(&["validate", saved.to_str().unwrap()], None);
    assert!(stdout(&out).contains("11 fields bound"));
    let out = kql(&["--registry", saved.to_str().unwrap(), "rewrite", fixtures::SENDERS_KQL], None);
    assert!(stdout(&out).contains("recipient_address, sender_address"));
    // the original file is untouched
    assert_eq!(std::fs::read_to_string(&reg).unwrap(), fixtures::EMAIL_REGISTRY_JSON);
}

#[test]
fn ingest_csv_and_jsonl() {
    let reg = registry();
    let reg = reg.to_str().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    let data = data.to_str().unwrap();
    let ingest = |path: &Path, table: &str| {
        kql(&["--registry", reg, "--data", data, "ingest", path.to_str().unwrap(), "--table", table], None)
    };

    // header order is free; quoted cells keep their commas
    let csv = dir.path().join("raw.csv");
    std::fs::write(&csv, "message_raw,message_key\n\"From: a, b\",<1>\nFrom: c,<2>\n").unwrap();
    let out = ingest(&csv, "raw_message_table");
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = std::fs::read_to_string(Path::new(data).join("raw_message_table.jsonl")).unwrap();
    assert_eq!(
        text,
        "{\"message_key\":\"<1>\",\"message_raw\":\"From: a, b\"}\n{\"message_key\":\"<2>\",\"message_raw\":\"From: c\"}\n"
    );

    let header = "message_id,sent_time,recipient_address,message_folder,received_time,message_body,\
email_attachment,sender_address,recipient_count,message_mailbox,message_subject";
    let good = "<1>,2001-01-01 10:00:00-08:00,b@x,sent,2001-01-01 10:00:01-08:00,hi,,a@x,1,a,s";
    let bad_count = "<2>,2001-01-01 10:00:00-08:00,b@x,sent,2001-01-01 10:00:01-08:00,hi,,a@x,one,a,s";
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, format!("{header}\n{good}\n{bad_count}\n")).unwrap();
    let out = ingest(&bad, "email_message_table");
    assert_eq!(out.status.code(), Some(5));
    let err = stderr(&out);
    assert!(err.contains("line 3") && err.contains("recipient_count"), "{err}");

    let short = dir.path().join("short.csv");
    std::fs::write(&short, "message_key\n<1>\n").unwrap();
    let out = ingest(&short, "raw_message_table");
    assert_eq!(out.status.code(), Some(5));
    assert!(stderr(&out).contains("message_raw"));

    let out = ingest(&csv, "no_such_table");
    assert_eq!(out.status.code(), Some(5));

    let jsonl = fixture_dir().join("data/email_message_table.jsonl");
    let out = ingest(&jsonl, "email_message_table");
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let out = kql(&["--registry", reg, "--data", data, "run", fixtures::SENDERS_KQL], None);
    assert_eq!(stdout(&out).lines().count(), 2);
}

#[test]
fn bench_rejects_bad_specs_and_reports_json() {
    let out = kql(&["bench", "--users", "1"], None);
    assert_eq!(out.status.code(), Some(64));
    assert!(stderr(&out).contains("E_SPEC"));
    let out = kql(&["bench", "--initial-senders", "0"], None);
    assert_eq!(out.status.code(), Some(64));

    let out = kql(&["bench", "--users", "8", "--messages", "400", "--threshold", "3", "--mode", "both"], None);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["digests_equal"], true);
    assert!(v["kql"]["n_calls"].as_u64().unwrap() > 0);
    assert_eq!(v["direct"]["mode"], "direct");
}
