//! Community-detection workload over a synthetic email corpus, issued
//! either through the KQL layer or as hand-written physical SQL.

pub mod community;
pub mod corpus;
pub mod graph;
pub mod run;

use thiserror::Error;

pub use community::{communities_digest, edge_betweenness, girvan_newman, Communities};
pub use corpus::{generate_corpus, CorpusSpec};
pub use graph::{build_email_graph, EmailGraph, GraphParams, InitialSenders};
pub use run::{run_benchmark, BenchReport, Mode, Session};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("E_SPEC: {0}")]
    Spec(String),
    #[error("E_EMPTY: {0}")]
    Empty(String),
    #[error("{0}")]
    Parse(#[from] kql_core::ParseError),
    #[error("{0}")]
    Rewrite(#[from] kql_core::RewriteError),
    #[error("{0}")]
    Engine(#[from] kql_core::EngineError),
    #[error("E_IO: {0}")]
    Io(#[from] std::io::Error),
}

impl BenchError {
    pub fn code(&self) -> &'static str {
        match self {
            BenchError::Spec(_) => "E_SPEC",
            BenchError::Empty(_) => "E_EMPTY",
            BenchError::Parse(e) => e.code(),
            BenchError::Rewrite(e) => e.code(),
            BenchError::Engine(e) => e.code(),
            BenchError::Io(_) => "E_IO",
        }
    }
}
