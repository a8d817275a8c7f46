//! Successive shortest augmenting paths with node potentials.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::network::FlowNetwork;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FlowResult {
    /// Units on each edge of the network, in edge order.
    pub flow: Vec<i64>,
    pub cost: f64,
}

struct Residual {
    head: Vec<usize>,
    cap: Vec<i64>,
    cost: Vec<f64>,
    out: Vec<Vec<usize>>,
}

impl Residual {
    /// Arc `2e` is edge `e` forward, `2e + 1` its reverse.
    fn new(g: &FlowNetwork) -> Self {
        let mut r = Residual {
            head: Vec::with_capacity(2 * g.edges.len()),
            cap: Vec::with_capacity(2 * g.edges.len()),
            cost: Vec::with_capacity(2 * g.edges.len()),
            out: vec![Vec::new(); g.n_nodes()],
        };
        for e in &g.edges {
            r.out[e.tail].push(r.head.len());
            r.head.push(e.head);
            r.cap.push(e.capacity);
            r.cost.push(e.cost);
            r.out[e.head].push(r.head.len());
            r.head.push(e.tail);
            r.cap.push(0);
            r.cost.push(-e.cost);
        }
        r
    }
}

#[derive(PartialEq)]
struct Entry {
    dist: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    // Min-heap on distance, then on vertex index.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Minimum-cost flow of `g.supply` units from source to sink.
///
/// Initial potentials come from one Bellman-Ford pass, which absorbs the
/// negative arc costs; every later shortest path runs Dijkstra on reduced
/// costs. Augmentations move whole units, so the flow is integral.
pub fn solve_min_cost_flow(g: &FlowNetwork) -> Result<FlowResult> {
    let n = g.n_nodes();
    if n < 2 {
        return invalid("flow network needs a source and a sink");
    }
    if let Some(e) = g
        .edges
        .iter()
        .find(|e| e.tail >= n || e.head >= n || e.capacity < 0 || !e.cost.is_finite())
    {
        return invalid(format!("malformed edge {e:?}"));
    }
    if g.supply < 0 {
        return invalid("negative supply");
    }
    let (s, t) = (FlowNetwork::SOURCE, g.sink());
    let mut res = Residual::new(g);
    let mut potential = bellman_ford(&res, s)?;

    let mut remaining = g.supply;
    let mut dist = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut done = vec![false; n];
    while remaining > 0 {
        dist.fill(f64::INFINITY);
        parent.fill(usize::MAX);
        done.fill(false);
        dist[s] = 0.0;
        let mut heap = BinaryHeap::from([Entry { dist: 0.0, node: s }]);
        while let Some(Entry { dist: d, node: v }) = heap.pop() {
            if done[v] {
                continue;
            }
            done[v] = true;
            for &a in &res.out[v] {
                let w = res.head[a];
                if res.cap[a] == 0 || done[w] {
                    continue;
                }
                let reduced = (res.cost[a] + potential[v] - potential[w]).max(0.0);
                let nd = d + reduced;
                if nd < dist[w] {
                    dist[w] = nd;
                    parent[w] = a;
                    heap.push(Entry { dist: nd, node: w });
                }
            }
        }
        if !done[t] {
            return invalid(format!("{remaining} units of supply cannot reach the sink"));
        }
        for v in 0..n {
            if done[v] {
                potential[v] += dist[v];
            }
        }
        let mut push = remaining;
        let mut v = t;
        while v != s {
            let a = parent[v];
            push = push.min(res.cap[a]);
            v = res.head[a ^ 1];
        }
        let mut v = t;
        while v != s {
            let a = parent[v];
            res.cap[a] -= push;
            res.cap[a ^ 1] += push;
            v = res.head[a ^ 1];
        }
        remaining -= push;
    }

    let flow: Vec<i64> = (0..g.edges.len()).map(|e| res.cap[2 * e + 1]).collect();
    let cost = flow
        .iter()
        .zip(&g.edges)
        .map(|(&f, e)| f as f64 * e.cost)
        .sum();
    Ok(FlowResult { flow, cost })
}

/// Shortest distances from `s` over arcs with residual capacity. Vertices
/// that cannot be reached get potential 0; they stay unreachable because
/// augmentation only adds reverse arcs between reachable vertices.
fn bellman_ford(res: &Residual, s: usize) -> Result<Vec<f64>> {
    let n = res.out.len();
    let mut dist = vec![f64::INFINITY; n];
    dist[s] = 0.0;
    for round in 0..n {
        let mut changed = false;
        for v in 0..n {
            if dist[v].is_infinite() {
                continue;
            }
            for &a in &res.out[v] {
                if res.cap[a] > 0 && dist[v] + res.cost[a] < dist[res.head[a]] {
                    dist[res.head[a]] = dist[v] + res.cost[a];
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
        if round == n - 1 {
            return invalid("negative-cost cycle in flow network");
        }
    }
    Ok(dist
        .into_iter()
        .map(|d| if d.is_finite() { d } else { 0.0 })
        .collect())
}
