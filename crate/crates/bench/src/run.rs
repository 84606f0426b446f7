use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use kql_core::engine::execute_plain;
use kql_core::{fixtures, parse_kql, rewrite, Database, Registry, ResultSet};
use serde::Serialize;

use crate::community::{communities_digest, girvan_newman, Communities};
use crate::corpus::{generate_corpus, CorpusSpec};
use crate::graph::{build_email_graph, GraphParams, InitialSenders};
use crate::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Kql,
    Direct,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Kql => "kql",
            Mode::Direct => "direct",
        }
    }
}

/// The workload's two query shapes, as KQL and as hand-resolved SQL.
pub mod queries {
    use kql_core::Timestamp;

    #[derive(Debug, Clone, PartialEq, Eq)]
    pub struct QueryPair {
        pub kql: String,
        pub sql: String,
    }

    fn quote(s: &str) -> String {
        format!("'{}'", s.replace('\'', "''"))
    }

    pub fn senders() -> QueryPair {
        QueryPair {
            kql: kql_core::fixtures::SENDERS_KQL.to_string(),
            sql: kql_core::fixtures::SENDERS_SQL.to_string(),
        }
    }

    /// Recipient of every message `sender` sent in `[start, end)`.
    pub fn recipients(sender: &str, start: &Timestamp, end: &Timestamp) -> QueryPair {
        let (sender, start, end) = (quote(sender), quote(start.as_str()), quote(end.as_str()));
        QueryPair {
            kql: format!(
                "SELECT ALL*email_address*_:recipient FROM (SELECT * FROM ALL/emailmessage \
                 WHERE ALL*email_address*_:sender = {sender}) AS example \
                 WHERE (ALL*datetime*_:sender >= {start} AND ALL*datetime*_:sender < {end})"
            ),
            sql: format!(
                "SELECT recipient_address FROM (SELECT * FROM email_message_table \
                 WHERE sender_address = {sender}) AS example \
                 WHERE (sent_time >= {start} AND sent_time < {end})"
            ),
        }
    }
}

use queries::QueryPair;

/// Issues queries in one mode against one engine instance, writing every
/// result to a file and reading it back.
pub struct Session<'a> {
    db: &'a Database,
    registry: &'a Registry,
    mode: Mode,
    results: PathBuf,
    /// Wall time of each call: query plus result file write.
    pub call_times: Vec<Duration>,
    /// KQL texts issued, in order.
    pub issued: Vec<String>,
}

impl<'a> Session<'a> {
    pub fn new(db: &'a Database, registry: &'a Registry, mode: Mode, results: impl Into<PathBuf>) -> Session<'a> {
        Session {
            db,
            registry,
            mode,
            results: results.into(),
            call_times: Vec::new(),
            issued: Vec::new(),
        }
    }

    pub fn call(&mut self, q: &QueryPair) -> Result<ResultSet, BenchError> {
        let started = Instant::now();
        let rs = match self.mode {
            Mode::Kql => execute_kql(&q.kql, self.registry, self.db)?,
            Mode::Direct => {
                let plain = parse_kql(&q.sql)?
                    .into_plain()
                    .expect("direct queries name physical tables and fields");
                execute_plain(&plain, self.db)?
            }
        };
        let mut out = BufWriter::new(File::create(&self.results)?);
        rs.write_jsonl(&mut out)?;
        out.flush()?;
        drop(out);
        self.call_times.push(started.elapsed());
        self.issued.push(q.kql.clone());

        let back = ResultSet::read_jsonl(rs.columns.clone(), BufReader::new(File::open(&self.results)?))?;
        Ok(back)
    }
}

fn execute_kql(text: &str, registry: &Registry, db: &Database) -> Result<ResultSet, BenchError> {
    let sql = rewrite(&parse_kql(text)?, registry)?;
    Ok(kql_core::execute(&sql, db)?)
}

#[derive(Debug, Clone)]
pub struct BenchParams {
    pub threshold: u64,
    pub initial_senders: InitialSenders,
    pub communities: usize,
}

impl Default for BenchParams {
    fn default() -> Self {
        BenchParams {
            threshold: 10,
            initial_senders: InitialSenders::All,
            communities: 2,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub mode: Mode,
    pub n_messages: usize,
    pub n_calls: usize,
    pub total_ms: f64,
    pub mean_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
    /// Mean parse+rewrite time per call (kql mode only).
    pub rewrite_mean_us: Option<f64>,
    pub n_nodes: usize,
    pub n_edges: usize,
    pub communities: Communities,
    pub result_digest: String,
}

// Enough repetitions that the per-text minimum is a stable floor.
const REWRITE_PASSES: usize = 25;

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Mean over the issued texts of the fastest of `passes` parse+rewrite runs.
pub fn rewrite_cost_us(texts: &[String], registry: &Registry, passes: usize) -> Result<f64, BenchError> {
    if texts.is_empty() {
        return Ok(0.0);
    }
    let mut best = vec![Duration::MAX; texts.len()];
    for _ in 0..passes.max(1) {
        for (text, best) in texts.iter().zip(best.iter_mut()) {
            let started = Instant::now();
            let sql = rewrite(&parse_kql(text)?, registry)?;
            let took = started.elapsed();
            std::hint::black_box(sql);
            *best = (*best).min(took);
        }
    }
    Ok(best.iter().map(|d| d.as_secs_f64() * 1e6).sum::<f64>() / texts.len() as f64)
}

/// Runs the workload over an already loaded corpus.
pub fn run_on_corpus(
    db: &Database,
    spec: &CorpusSpec,
    params: &BenchParams,
    mode: Mode,
    results_dir: &Path,
) -> Result<BenchReport, BenchError> {
    let registry = fixtures::email_registry();
    let results = results_dir.join(format!("results-{}.jsonl", mode.as_str()));
    let mut session = Session::new(db, &registry, mode, results);
    let graph = build_email_graph(
        &mut session,
        &GraphParams {
            min_messages: params.threshold,
            initial_senders: params.initial_senders,
            window: (spec.start.clone(), spec.end.clone()),
        },
    )?;
    let communities = girvan_newman(&graph, params.communities)?;

    let times = &session.call_times;
    let total: Duration = times.iter().sum();
    let rewrite_mean_us = match mode {
        Mode::Kql => Some(rewrite_cost_us(&session.issued, &registry, REWRITE_PASSES)?),
        Mode::Direct => None,
    };
    Ok(BenchReport {
        mode,
        n_messages: spec.n_messages,
        n_calls: times.len(),
        total_ms: ms(total),
        mean_ms: ms(total) / times.len() as f64,
        min_ms: times.iter().min().copied().map(ms).unwrap_or(0.0),
        max_ms: times.iter().max().copied().map(ms).unwrap_or(0.0),
        rewrite_mean_us,
        n_nodes: graph.nodes.len(),
        n_edges: graph.edges.len(),
        result_digest: communities_digest(&communities),
        communities,
    })
}

/// Loads a generated corpus into a fresh engine instance.
pub fn corpus_database(spec: &CorpusSpec) -> Result<Database, BenchError> {
    let mut db = Database::new();
    db.insert(generate_corpus(spec)?);
    Ok(db)
}

/// Generates the corpus and runs the workload in `mode`.
pub fn run_benchmark(spec: &CorpusSpec, params: &BenchParams, mode: Mode, results_dir: &Path) -> Result<BenchReport, BenchError> {
    run_on_corpus(&corpus_database(spec)?, spec, params, mode, results_dir)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kql_texts_rewrite_to_the_direct_texts() {
        let registry = fixtures::email_registry();
        let spec = CorpusSpec::new(4, 1, 6, 0).unwrap();
        for pair in [queries::senders(), queries::recipients("o'neil@example.com", &spec.start, &spec.end)] {
            let sql = rewrite(&parse_kql(&pair.kql).unwrap(), &registry).unwrap();
            assert_eq!(sql.render(), pair.sql);
        }
    }
}
