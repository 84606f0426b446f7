use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use kql_bench::run::{corpus_database, run_on_corpus, BenchParams};
use kql_bench::{BenchError, BenchReport, CorpusSpec, InitialSenders, Mode};
use serde_json::json;

use crate::{CmdResult, Config, Io, WithStatus, EXIT_EXEC, EXIT_USAGE};

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 20)]
    pub users: usize,
    #[arg(long, default_value_t = 10_000)]
    pub messages: usize,
    /// Length of the corpus window.
    #[arg(long, default_value_t = 12)]
    pub months: u32,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Minimum messages from sender to recipient for an edge.
    #[arg(long, default_value_t = 10)]
    pub threshold: u64,
    /// How many senders start the graph: a count or `all`.
    #[arg(long, default_value = "all", value_parser = parse_initial)]
    pub initial_senders: InitialSenders,
    #[arg(long, value_enum, default_value_t = ModeArg::Both)]
    pub mode: ModeArg,
    /// Stop splitting once the graph has this many components.
    #[arg(long, default_value_t = 2)]
    pub communities: usize,
    /// Write the JSON report here as well as to standard output.
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Kql,
    Direct,
    Both,
}

fn parse_initial(s: &str) -> Result<InitialSenders, String> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(InitialSenders::All);
    }
    match usize::from_str(s) {
        Ok(0) | Err(_) => Err(format!("expected a positive count or `all`, got `{s}`")),
        Ok(n) => Ok(InitialSenders::First(n)),
    }
}

fn bench_status(e: &BenchError) -> u8 {
    match e {
        BenchError::Spec(_) => EXIT_USAGE,
        _ => EXIT_EXEC,
    }
}

fn fail(e: BenchError) -> crate::Failure {
    crate::Failure {
        status: bench_status(&e),
        error: e.into(),
    }
}

/// Runs the workload and returns the JSON report.
pub fn report(args: &BenchArgs) -> CmdResult<serde_json::Value> {
    let spec = CorpusSpec::new(args.users, args.messages, args.months, args.seed).map_err(fail)?;
    spec.validate().map_err(fail)?;
    if args.communities == 0 {
        return Err(crate::usage("--communities must be at least 1"));
    }
    let params = BenchParams {
        threshold: args.threshold,
        initial_senders: args.initial_senders,
        communities: args.communities,
    };
    let dir = std::env::temp_dir().join(format!("kql-bench-{}", std::process::id()));
    fs::create_dir_all(&dir).status(EXIT_EXEC)?;
    let db = corpus_database(&spec).map_err(fail)?;
    let run = |mode| run_on_corpus(&db, &spec, &params, mode, &dir).map_err(fail);
    let result = match args.mode {
        ModeArg::Kql => run(Mode::Kql).map(|r| json!(r)),
        ModeArg::Direct => run(Mode::Direct).map(|r| json!(r)),
        ModeArg::Both => run(Mode::Kql).and_then(|kql| Ok(both(kql, run(Mode::Direct)?))),
    };
    let _ = fs::remove_dir_all(&dir);
    result
}

fn both(kql: BenchReport, direct: BenchReport) -> serde_json::Value {
    let overhead = if direct.mean_ms > 0.0 {
        Some(kql.mean_ms / direct.mean_ms)
    } else {
        None
    };
    json!({
        "digests_equal": kql.result_digest == direct.result_digest,
        "overhead_ratio": overhead,
        "kql": kql,
        "direct": direct,
    })
}

pub fn run(args: &BenchArgs, config: &Config, io: &mut Io<'_>) -> CmdResult {
    let value = report(args)?;
    let text = serde_json::to_string_pretty(&value).status(EXIT_EXEC)?;
    if let Some(path) = args.report.as_ref().or(config.out.as_ref()) {
        fs::write(path, format!("{text}\n")).status(EXIT_EXEC)?;
    }
    writeln!(io.stdout, "{text}").status(EXIT_EXEC)
}
