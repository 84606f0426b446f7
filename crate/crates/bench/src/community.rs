//! Girvan–Newman community detection on the undirected, unweighted
//! projection of an [`EmailGraph`].

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use sha2::{Digest, Sha256};

use crate::graph::EmailGraph;
use crate::BenchError;

/// Sorted communities, each a sorted list of addresses.
pub type Communities = Vec<Vec<String>>;

/// Scores within this distance of the maximum count as tied.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Brandes edge betweenness. Keys are `(u, v)` with `u < v`; each unordered
/// pair of endpoints contributes once.
pub fn edge_betweenness(adj: &[BTreeSet<usize>]) -> BTreeMap<(usize, usize), f64> {
    let n = adj.len();
    let mut scores: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (u, ns) in adj.iter().enumerate() {
        for &v in ns {
            if u < v {
                scores.insert((u, v), 0.0);
            }
        }
    }
    let mut sigma = vec![0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![0f64; n];
    let mut order = Vec::with_capacity(n);
    for s in 0..n {
        sigma.fill(0.0);
        dist.fill(usize::MAX);
        delta.fill(0.0);
        order.clear();
        sigma[s] = 1.0;
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                }
            }
        }
        for &w in order.iter().rev() {
            for &v in &adj[w] {
                if dist[v] != usize::MAX && dist[v] + 1 == dist[w] {
                    let c = sigma[v] / sigma[w] * (1.0 + delta[w]);
                    *scores.get_mut(&(v.min(w), v.max(w))).expect("edge") += c;
                    delta[v] += c;
                }
            }
        }
    }
    for score in scores.values_mut() {
        *score /= 2.0;
    }
    scores
}

/// Connected components as sorted index lists, ordered by smallest member.
pub fn components(adj: &[BTreeSet<usize>]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; adj.len()];
    let mut out = Vec::new();
    for start in 0..adj.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                    stack.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Picks the edge to cut: maximal score, ties to the smallest pair.
pub fn select_edge(scores: &BTreeMap<(usize, usize), f64>) -> Option<(usize, usize)> {
    let best = scores.values().copied().fold(f64::NEG_INFINITY, f64::max);
    scores
        .iter()
        .find(|(_, &s)| s >= best - TIE_TOLERANCE)
        .map(|(&e, _)| e)
}

/// Removes maximal-betweenness edges until there are at least `target`
/// components (or no edges are left).
pub fn girvan_newman(graph: &EmailGraph, target: usize) -> Result<Communities, BenchError> {
    if graph.nodes.is_empty() {
        return Err(BenchError::Empty("graph has no nodes".into()));
    }
    let (names, mut adj) = graph.undirected();
    loop {
        let comps = components(&adj);
        let scores = edge_betweenness(&adj);
        let edge = select_edge(&scores);
        if comps.len() >= target || edge.is_none() {
            let mut out: Communities = comps
                .into_iter()
                .map(|c| c.into_iter().map(|i| names[i].clone()).collect())
                .collect();
            out.sort();
            return Ok(out);
        }
        let (u, v) = edge.expect("checked");
        adj[u].remove(&v);
        adj[v].remove(&u);
    }
}

/// SHA-256 (hex) over the communities, one line per community. Insensitive
/// to the order communities and members were produced in.
pub fn communities_digest(communities: &Communities) -> String {
    let mut lines: Vec<String> = communities
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.sort();
            c.join(",")
        })
        .collect();
    lines.sort();
    let mut hasher = Sha256::new();
    for line in lines {
        hasher.update(line.as_bytes());
        hasher.update(b"\n");
    }
    hex::encode(hasher.finalize())
}
