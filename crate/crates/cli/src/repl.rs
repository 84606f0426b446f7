//! Line-oriented interactive shell. Each input line is either a query,
//! handled according to the current mode, or a backslash command.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Result};
use kql_core::{emit, execute, Database, Registry, TagRef};

use crate::{rewrite_text, write_results, CmdResult, Config, Io, WithStatus, EXIT_EXEC};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Sql,
    Mongo,
    Run,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Sql => "sql",
            Mode::Mongo => "mongo",
            Mode::Run => "run",
        }
    }
}

const HELP: &str = "\
queries are handled by the current mode (default \\sql)
  \\sql [QUERY]      print the rewritten SQL, or switch to that mode
  \\mongo [QUERY]    print the MongoDB shell query, or switch to that mode
  \\run [QUERY]      execute against --data, or switch to that mode
  \\tags add|rm TABLE.FIELD SCHEME:TAG...   change a field's tags
  \\save [PATH]      write the registry (default: the --registry file)
  \\help             this text
  \\q                quit";

pub struct Session {
    pub registry: Registry,
    pub mode: Mode,
    config: Config,
    db: Option<Database>,
}

/// What the caller should do after a line.
#[derive(Debug, PartialEq, Eq)]
pub enum Step {
    Continue,
    Quit,
}

impl Session {
    pub fn new(registry: Registry, config: Config) -> Session {
        Session {
            registry,
            mode: Mode::Sql,
            config,
            db: None,
        }
    }

    /// Handles one input line, writing its output to `out`.
    pub fn line(&mut self, line: &str, out: &mut dyn Write) -> Result<Step> {
        let line = line.trim();
        if line.is_empty() {
            return Ok(Step::Continue);
        }
        let Some(cmd) = line.strip_prefix('\\') else {
            self.query(self.mode, line, out)?;
            return Ok(Step::Continue);
        };
        let (word, rest) = cmd.split_once(char::is_whitespace).unwrap_or((cmd, ""));
        let rest = rest.trim();
        let mode = match word {
            "sql" => Mode::Sql,
            "mongo" => Mode::Mongo,
            "run" => Mode::Run,
            "q" | "quit" => return Ok(Step::Quit),
            "help" | "?" => {
                writeln!(out, "{HELP}")?;
                return Ok(Step::Continue);
            }
            "tags" => {
                self.tags(rest, out)?;
                return Ok(Step::Continue);
            }
            "save" => {
                self.save(rest, out)?;
                return Ok(Step::Continue);
            }
            other => bail!("unknown command \\{other}; try \\help"),
        };
        if rest.is_empty() {
            self.mode = mode;
            writeln!(out, "mode: {}", mode.name())?;
        } else {
            self.query(mode, rest, out)?;
        }
        Ok(Step::Continue)
    }

    fn query(&mut self, mode: Mode, text: &str, out: &mut dyn Write) -> Result<()> {
        let sql = rewrite_text(text, &self.registry).map_err(|f| f.error)?;
        match mode {
            Mode::Sql => writeln!(out, "{}", sql.render())?,
            Mode::Mongo => writeln!(out, "{}", emit(&sql)?)?,
            Mode::Run => {
                if self.db.is_none() {
                    self.db = Some(self.config.load_data(&self.registry).map_err(|f| f.error)?);
                }
                let rs = execute(&sql, self.db.as_ref().expect("loaded above"))?;
                write_results(&rs, self.config.format, out)?;
            }
        }
        if self.config.provenance {
            write!(out, "{}", sql.provenance().footer())?;
        }
        Ok(())
    }

    fn tags(&mut self, args: &str, out: &mut dyn Write) -> Result<()> {
        let usage = || anyhow!("usage: \\tags add|rm TABLE.FIELD SCHEME:TAG...");
        let mut words = args.split_whitespace();
        let verb = words.next().ok_or_else(usage)?;
        let (table, field) = words.next().and_then(|t| t.split_once('.')).ok_or_else(usage)?;
        let tags = words
            .map(|w| w.parse::<TagRef>().map_err(|e| anyhow!(e)))
            .collect::<Result<Vec<_>>>()?;
        if tags.is_empty() {
            return Err(usage());
        }
        let updated = match verb {
            "add" => self.registry.mutate_tags(table, field, &tags, &[])?,
            "rm" | "remove" => self.registry.mutate_tags(table, field, &[], &tags)?,
            _ => return Err(usage()),
        };
        self.registry = updated;
        let binding = self.registry.binding(table, field).expect("mutate_tags checked the field");
        match &binding.address {
            Some(addr) => writeln!(out, "{table}.{field}: {addr}")?,
            None => writeln!(out, "{table}.{field}: unbound")?,
        }
        Ok(())
    }

    fn save(&self, arg: &str, out: &mut dyn Write) -> Result<()> {
        let path = if arg.is_empty() {
            self.config
                .registry
                .clone()
                .ok_or_else(|| anyhow!("no path given and no --registry file to overwrite"))?
        } else {
            PathBuf::from(arg)
        };
        self.registry.save(&path)?;
        writeln!(out, "saved {}", path.display())?;
        Ok(())
    }
}

pub fn run(config: &Config, io: &mut Io<'_>) -> CmdResult {
    let registry = config.load_registry()?;
    let mut session = Session::new(registry, config.clone());
    let interactive = io.stdin_is_terminal;
    let mut line = String::new();
    loop {
        if interactive {
            write!(io.stdout, "kql> ").status(EXIT_EXEC)?;
            io.stdout.flush().status(EXIT_EXEC)?;
        }
        line.clear();
        if io.stdin.read_line(&mut line).status(EXIT_EXEC)? == 0 {
            break;
        }
        match session.line(&line, io.stdout) {
            Ok(Step::Continue) => {}
            Ok(Step::Quit) => break,
            Err(e) => writeln!(io.stdout, "error: {e:#}").status(EXIT_EXEC)?,
        }
    }
    Ok(())
}
