//! Girvan–Newman against naive all-pairs shortest-path counting.

use std::collections::{BTreeSet, VecDeque};

use kql_bench::community::{edge_betweenness, TIE_TOLERANCE};
use kql_bench::{girvan_newman, EmailGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::Report;

fn bfs(adj: &[BTreeSet<usize>], s: usize) -> (Vec<Option<usize>>, Vec<f64>) {
    let mut dist = vec![None; adj.len()];
    let mut count = vec![0.0; adj.len()];
    dist[s] = Some(0);
    count[s] = 1.0;
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        let dv = dist[v].expect("visited");
        for &w in &adj[v] {
            if dist[w].is_none() {
                dist[w] = Some(dv + 1);
                queue.push_back(w);
            }
            if dist[w] == Some(dv + 1) {
                count[w] += count[v];
            }
        }
    }
    (dist, count)
}

/// For every pair `s < t` and every edge, the fraction of shortest `s`-`t`
/// paths through the edge, from all-pairs distances and path counts.
pub fn naive_betweenness(adj: &[BTreeSet<usize>]) -> Vec<((usize, usize), f64)> {
    let n = adj.len();
    let all: Vec<_> = (0..n).map(|s| bfs(adj, s)).collect();
    let edges: Vec<(usize, usize)> = (0..n).flat_map(|u| adj[u].iter().filter(move |&&v| u < v).map(move |&v| (u, v))).collect();
    edges
        .into_iter()
        .map(|(u, v)| {
            let mut score = 0.0;
            for s in 0..n {
                for t in s + 1..n {
                    let (ds, cs) = &all[s];
                    let Some(dst) = ds[t] else { continue };
                    for (a, b) in [(u, v), (v, u)] {
                        let (dt, ct) = &all[t];
                        if let (Some(da), Some(db)) = (ds[a], dt[b]) {
                            if da + 1 + db == dst {
                                score += cs[a] * ct[b] / cs[t];
                            }
                        }
                    }
                }
            }
            ((u, v), score)
        })
        .collect()
}

fn component_count(adj: &[BTreeSet<usize>]) -> usize {
    let mut seen = vec![false; adj.len()];
    let mut count = 0;
    for s in 0..adj.len() {
        if !seen[s] {
            count += 1;
            for (v, d) in bfs(adj, s).0.iter().enumerate() {
                if d.is_some() {
                    seen[v] = true;
                }
            }
        }
    }
    count
}

/// Girvan–Newman driven by [`naive_betweenness`].
pub fn naive_girvan_newman(graph: &EmailGraph, target: usize) -> Vec<Vec<String>> {
    let (names, mut adj) = graph.undirected();
    while component_count(&adj) < target {
        let scores = naive_betweenness(&adj);
        let Some(best) = scores.iter().map(|(_, s)| *s).reduce(f64::max) else { break };
        let (u, v) = scores
            .iter()
            .filter(|(_, s)| *s >= best - TIE_TOLERANCE)
            .map(|(e, _)| *e)
            .min()
            .expect("nonempty");
        adj[u].remove(&v);
        adj[v].remove(&u);
    }
    let mut seen = vec![false; adj.len()];
    let mut out = Vec::new();
    for s in 0..adj.len() {
        if seen[s] {
            continue;
        }
        let mut comp: Vec<String> = Vec::new();
        for (v, d) in bfs(&adj, s).0.iter().enumerate() {
            if d.is_some() {
                seen[v] = true;
                comp.push(names[v].clone());
            }
        }
        comp.sort();
        out.push(comp);
    }
    out.sort();
    out
}

fn random_graph(rng: &mut impl Rng) -> EmailGraph {
    let n = rng.gen_range(2..=50);
    let p = rng.gen_range(0.02..0.3);
    let mut g = EmailGraph::default();
    for i in 0..n {
        g.nodes.insert(format!("n{i:02}"));
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.gen_bool(p / 2.0) {
                g.edges.insert((format!("n{i:02}"), format!("n{j:02}")), 10);
            }
        }
    }
    g
}

/// The two-clique bridge fixture: `a-b-c` and `d-e-f` joined by `c-d`.
pub fn bridge_fixture() -> EmailGraph {
    let mut g = EmailGraph::default();
    for (a, b) in [("a", "b"), ("b", "c"), ("c", "a"), ("c", "d"), ("d", "e"), ("e", "f"), ("f", "d")] {
        g.nodes.insert(a.into());
        g.nodes.insert(b.into());
        g.edges.insert((a.into(), b.into()), 10);
    }
    g
}

pub fn suite(n_graphs: usize, seed: u64) -> Report {
    let mut report = Report::default();
    let bridge = girvan_newman(&bridge_fixture(), 2);
    report.cases += 1;
    let want = vec![vec!["a", "b", "c"], vec!["d", "e", "f"]];
    if bridge.as_ref().ok().map(|c| c == &want) != Some(true) {
        report.fail(format!("bridge fixture split into {bridge:?}"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..n_graphs {
        report.cases += 1;
        let g = random_graph(&mut rng);
        let (_, adj) = g.undirected();
        let fast = edge_betweenness(&adj);
        for (e, slow) in naive_betweenness(&adj) {
            let got = fast.get(&e).copied().unwrap_or(f64::NAN);
            if (got - slow).abs() > 1e-6 * slow.max(1.0) {
                report.fail(format!("graph {case}: edge {e:?} Brandes {got}, naive {slow}"));
            }
        }
        let target = rng.gen_range(2..=5);
        let got = girvan_newman(&g, target).map_err(|e| e.to_string());
        let want = naive_girvan_newman(&g, target);
        if got.as_ref() != Ok(&want) {
            report.fail(format!("graph {case} (target {target}): {got:?} vs naive {want:?}"));
        }
    }
    report
}
