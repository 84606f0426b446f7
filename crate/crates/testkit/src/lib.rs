//! Randomized suites checking the KQL crates against independently written
//! brute-force oracles. Each suite returns a [`Report`] rather than
//! panicking, so the same code backs both `cargo test` and the acceptance
//! summary.

pub mod canon;
pub mod fixpoint;
pub mod graphs;
pub mod oracle;
pub mod registries;
pub mod timestamps;

use std::fmt;

/// Outcome of one suite.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub cases: usize,
    pub failures: Vec<String>,
    /// Free-form counters worth printing (e.g. how many cases were emittable).
    pub notes: Vec<(String, usize)>,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn fail(&mut self, msg: impl Into<String>) {
        // keep reports readable when something is badly broken
        if self.failures.len() < 20 {
            self.failures.push(msg.into());
        } else if self.failures.len() == 20 {
            self.failures.push("...".into());
        }
    }

    pub fn note(&mut self, key: &str, n: usize) {
        match self.notes.iter_mut().find(|(k, _)| k == key) {
            Some((_, v)) => *v += n,
            None => self.notes.push((key.to_string(), n)),
        }
    }

    pub fn count(&self, key: &str) -> usize {
        self.notes.iter().find(|(k, _)| k == key).map_or(0, |(_, v)| *v)
    }

    /// Panics with the failures, for use inside `#[test]`.
    pub fn assert_ok(&self) {
        assert!(self.ok(), "{self}");
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} cases, {} failures", self.cases, self.failures.len())?;
        for (k, v) in &self.notes {
            write!(f, ", {k}={v}")?;
        }
        for msg in &self.failures {
            write!(f, "\n  {msg}")?;
        }
        Ok(())
    }
}
