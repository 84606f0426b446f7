use std::collections::{BTreeMap, BTreeSet};

use indexmap::IndexSet;
use kql_core::{Timestamp, Value};

use crate::run::{queries, Session};
use crate::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialSenders {
    All,
    First(usize),
}

#[derive(Debug, Clone)]
pub struct GraphParams {
    /// Minimum number of messages for an edge.
    pub min_messages: u64,
    pub initial_senders: InitialSenders,
    /// `[start, end)` window of the per-sender queries.
    pub window: (Timestamp, Timestamp),
}

/// Directed graph weighted by message counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EmailGraph {
    /// The initial senders plus every edge endpoint.
    pub nodes: BTreeSet<String>,
    pub edges: BTreeMap<(String, String), u64>,
}

impl EmailGraph {
    /// Index of every node (sorted by name) and the undirected adjacency
    /// lists of the projection.
    pub fn undirected(&self) -> (Vec<String>, Vec<BTreeSet<usize>>) {
        let names: Vec<String> = self.nodes.iter().cloned().collect();
        let index = |n: &str| names.binary_search_by(|x| x.as_str().cmp(n)).expect("edge endpoint is a node");
        let mut adj = vec![BTreeSet::new(); names.len()];
        for (s, r) in self.edges.keys() {
            let (a, b) = (index(s), index(r));
            if a != b {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        (names, adj)
    }
}

fn address(v: &Value) -> String {
    match v {
        Value::Str(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Builds the graph from counts obtained only through `session` queries:
/// one distinct-senders query, then one recipients query per sender.
pub fn build_email_graph(session: &mut Session<'_>, params: &GraphParams) -> Result<EmailGraph, BenchError> {
    let senders = session.call(&queries::senders())?;
    let mut order: IndexSet<String> = senders.rows.iter().filter_map(|r| r.first()).map(address).collect();
    if let InitialSenders::First(n) = params.initial_senders {
        order.truncate(n);
    }
    if order.is_empty() {
        return Err(BenchError::Empty("no senders in the corpus".into()));
    }

    let mut graph = EmailGraph::default();
    for sender in &order {
        let rs = session.call(&queries::recipients(sender, &params.window.0, &params.window.1))?;
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        for row in &rs.rows {
            *counts.entry(address(&row[0])).or_default() += 1;
        }
        graph.nodes.insert(sender.clone());
        for (recipient, n) in counts {
            if n >= params.min_messages {
                graph.nodes.insert(recipient.clone());
                graph.edges.insert((sender.clone(), recipient), n);
            }
        }
    }
    Ok(graph)
}
