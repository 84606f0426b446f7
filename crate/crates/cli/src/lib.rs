//! The `kql` command line: validate registries, rewrite KQL to SQL, emit
//! MongoDB shell queries, run queries against JSONL tables, ingest data,
//! an interactive shell and the community-detection benchmark.

pub mod bench;
pub mod ingest;
pub mod repl;

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use kql_core::{emit, execute, parse_kql, rewrite, Database, Registry, ResultSet, SqlQuery};

pub const EXIT_OK: u8 = 0;
pub const EXIT_REGISTRY: u8 = 2;
pub const EXIT_REWRITE: u8 = 3;
pub const EXIT_EXEC: u8 = 4;
pub const EXIT_INGEST: u8 = 5;
pub const EXIT_USAGE: u8 = 64;

#[derive(Debug, Parser)]
#[command(name = "kql", version, about = "Knowledge Query Language: ontology-addressed SQL")]
pub struct Cli {
    #[command(flatten)]
    pub config: Config,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Config {
    /// Knowledge registry JSON file.
    #[arg(long, global = true, env = "KQL_REGISTRY", value_name = "PATH")]
    pub registry: Option<PathBuf>,
    /// Directory holding one `<table>.jsonl` file per table.
    #[arg(long, global = true, value_name = "DIR")]
    pub data: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Jsonl)]
    pub format: Format,
    /// Append the tables, fields and time bounds a query drew on.
    #[arg(long, global = true)]
    pub provenance: bool,
    /// Write output here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Jsonl,
    Csv,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a registry file and print a summary.
    Validate {
        /// Registry file; defaults to --registry.
        path: Option<PathBuf>,
    },
    /// Print the SQL a KQL query rewrites to.
    Rewrite {
        /// Query text. Standard input, when piped and non-empty, wins.
        query: Option<String>,
    },
    /// Print the MongoDB shell query for a KQL query.
    EmitMongo { query: Option<String> },
    /// Rewrite and execute a query against --data.
    Run { query: Option<String> },
    /// Interactive shell.
    Repl,
    /// Convert a CSV or JSONL file into `<data>/<table>.jsonl`.
    Ingest {
        path: PathBuf,
        #[arg(long)]
        table: String,
    },
    /// Community-detection workload through KQL versus direct SQL.
    Bench(bench::BenchArgs),
}

/// An error with the exit status it maps to.
#[derive(Debug)]
pub struct Failure {
    pub status: u8,
    pub error: anyhow::Error,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

pub type CmdResult<T = ()> = Result<T, Failure>;

pub trait WithStatus<T> {
    fn status(self, status: u8) -> CmdResult<T>;
}

impl<T, E: Into<anyhow::Error>> WithStatus<T> for Result<T, E> {
    fn status(self, status: u8) -> CmdResult<T> {
        self.map_err(|e| Failure {
            status,
            error: e.into(),
        })
    }
}

pub fn usage(msg: impl fmt::Display) -> Failure {
    Failure {
        status: EXIT_USAGE,
        error: anyhow::anyhow!("{msg}"),
    }
}

/// Process streams, injectable for tests.
pub struct Io<'a> {
    pub stdin: &'a mut dyn BufRead,
    pub stdin_is_terminal: bool,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
}

impl Config {
    pub fn load_registry(&self) -> CmdResult<Registry> {
        let path = self
            .registry
            .as_ref()
            .ok_or_else(|| usage("no registry given: pass --registry PATH or set KQL_REGISTRY"))?;
        Registry::load(path).status(EXIT_REGISTRY)
    }

    pub fn load_data(&self, registry: &Registry) -> CmdResult<Database> {
        let dir = self.data.as_ref().ok_or_else(|| usage("no data directory given: pass --data DIR"))?;
        Database::load_dir(dir, registry).status(EXIT_EXEC)
    }
}

fn query_text(arg: Option<String>, io: &mut Io<'_>) -> CmdResult<String> {
    if !io.stdin_is_terminal {
        let mut piped = String::new();
        io.stdin.read_to_string(&mut piped).status(EXIT_USAGE)?;
        if !piped.trim().is_empty() {
            return Ok(piped.trim().to_string());
        }
    }
    arg.filter(|q| !q.trim().is_empty())
        .ok_or_else(|| usage("no query given: pass it as an argument or on standard input"))
}

pub fn rewrite_text(text: &str, registry: &Registry) -> CmdResult<SqlQuery> {
    let kql = parse_kql(text).status(EXIT_REWRITE)?;
    rewrite(&kql, registry).status(EXIT_REWRITE)
}

pub fn write_results(rs: &ResultSet, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
    match format {
        Format::Jsonl => rs.write_jsonl(out),
        Format::Csv => rs.write_csv(out),
        Format::Table => rs.write_table(out),
    }
}

fn with_output(config: &Config, io: &mut Io<'_>, body: impl FnOnce(&mut dyn Write) -> CmdResult) -> CmdResult {
    match &config.out {
        Some(path) => {
            let file = File::create(path)
                .with_context(|| format!("cannot create {}", path.display()))
                .status(EXIT_USAGE)?;
            let mut w = BufWriter::new(file);
            body(&mut w)?;
            w.flush().status(EXIT_EXEC)
        }
        None => body(io.stdout),
    }
}

fn validate(path: Option<PathBuf>, config: &Config, io: &mut Io<'_>) -> CmdResult {
    let path = path
        .or_else(|| config.registry.clone())
        .ok_or_else(|| usage("no registry given: pass a path, --registry PATH or set KQL_REGISTRY"))?;
    let registry = Registry::load(&path).status(EXIT_REGISTRY)?;
    writeln!(io.stdout, "{}: ok: {}", path.display(), registry.summary()).status(EXIT_USAGE)
}

fn cmd_rewrite(arg: Option<String>, config: &Config, io: &mut Io<'_>) -> CmdResult {
    let text = query_text(arg, io)?;
    let registry = config.load_registry()?;
    let sql = rewrite_text(&text, &registry)?;
    with_output(config, io, |out| {
        writeln!(out, "{}", sql.render()).status(EXIT_USAGE)?;
        if config.provenance {
            write!(out, "{}", sql.provenance().footer()).status(EXIT_USAGE)?;
        }
        Ok(())
    })
}

fn cmd_emit(arg: Option<String>, config: &Config, io: &mut Io<'_>) -> CmdResult {
    let text = query_text(arg, io)?;
    let registry = config.load_registry()?;
    let sql = rewrite_text(&text, &registry)?;
    let doc = emit(&sql).status(EXIT_REWRITE)?;
    with_output(config, io, |out| writeln!(out, "{doc}").status(EXIT_USAGE))
}

fn cmd_run(arg: Option<String>, config: &Config, io: &mut Io<'_>) -> CmdResult {
    let text = query_text(arg, io)?;
    let registry = config.load_registry()?;
    let db = config.load_data(&registry)?;
    let sql = rewrite_text(&text, &registry)?;
    let rs = execute(&sql, &db).status(EXIT_EXEC)?;
    with_output(config, io, |out| {
        write_results(&rs, config.format, out).status(EXIT_EXEC)?;
        if config.provenance {
            write!(out, "{}", sql.provenance().footer()).status(EXIT_EXEC)?;
        }
        Ok(())
    })
}

/// Runs one parsed command line and returns the process exit status.
pub fn run(cli: Cli, io: &mut Io<'_>) -> u8 {
    let config = cli.config;
    let result = match cli.command {
        Command::Validate { path } => validate(path, &config, io),
        Command::Rewrite { query } => cmd_rewrite(query, &config, io),
        Command::EmitMongo { query } => cmd_emit(query, &config, io),
        Command::Run { query } => cmd_run(query, &config, io),
        Command::Repl => repl::run(&config, io),
        Command::Ingest { path, table } => ingest::run(&path, &table, &config, io),
        Command::Bench(args) => bench::run(&args, &config, io),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(io.stderr, "kql: {f}");
            f.status
        }
    }
}

/// Parses `args` (program name first) and runs them. Usage errors exit 64;
/// `--help` and `--version` exit 0.
pub fn main_with<I, T>(args: I, io: &mut Io<'_>) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli, io),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(io.stderr, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(io.stdout, "{text}");
                EXIT_OK
            }
        }
    }
}

/// `<dir>/<table>.jsonl`.
pub fn table_path(dir: &Path, table: &str) -> PathBuf {
    dir.join(format!("{table}.jsonl"))
}
