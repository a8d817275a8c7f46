use std::io::Write;

use super::ResidualInstance;
use crate::error::Result;

/// Cost put on the middle-layer edge `(BS chain j, UE chain i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CostModel {
    /// `-c_ij`: the min-cost flow is exactly the max-sum-rate assignment.
    #[default]
    NegatedCapacity,
    /// `1 / (1 + c_ij)`. The overflow edge then costs more than any real
    /// path, so flow through the network is maximized first and the
    /// reciprocal cost only picks among maximum-cardinality assignments.
    Reciprocal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Node {
    Source,
    Bs(usize),
    /// Index into the residual's free BS chains.
    BsChain(usize),
    /// Index into the residual's UE chains.
    UeChain(usize),
    /// Index into the residual's unassociated UEs.
    Ue(usize),
    Sink,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub capacity: i64,
    pub cost: f64,
}

/// Layered network `s -> b -> j -> i -> u -> t` plus a zero-cost overflow
/// edge `s -> t` that absorbs supply no real path can use.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowNetwork {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    /// Units leaving the source (and entering the sink).
    pub supply: i64,
    /// `(edge, UE chain, BS chain)` for every middle-layer edge.
    pub(super) links: Vec<(usize, usize, usize)>,
}

impl FlowNetwork {
    pub const SOURCE: usize = 0;

    pub fn sink(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn link_edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.links.iter().copied()
    }

    pub fn overflow_edge(&self) -> usize {
        self.edges.len() - 1
    }

    /// Plain-text edge list, one `tail head capacity cost` line per edge,
    /// preceded by a `# nodes supply` header.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# {} {}", self.nodes.len(), self.supply)?;
        for e in &self.edges {
            writeln!(out, "{} {} {} {}", e.tail, e.head, e.capacity, e.cost)?;
        }
        Ok(())
    }
}

pub fn build_flow_network(res: &ResidualInstance) -> FlowNetwork {
    build_flow_network_with(res, CostModel::NegatedCapacity)
}

pub fn build_flow_network_with(res: &ResidualInstance, model: CostModel) -> FlowNetwork {
    let n_j = res.free_bs_chains.len();
    let n_i = res.na_ue_chains.len();
    let n_u = res.na_ues.len();

    let bs_node = |b: usize| 1 + b;
    let j_node = |j: usize| 1 + res.n_bs + j;
    let i_node = |i: usize| 1 + res.n_bs + n_j + i;
    let u_node = |u: usize| 1 + res.n_bs + n_j + n_i + u;
    let sink = 1 + res.n_bs + n_j + n_i + n_u;

    let mut nodes = vec![Node::Source];
    nodes.extend((0..res.n_bs).map(Node::Bs));
    nodes.extend((0..n_j).map(Node::BsChain));
    nodes.extend((0..n_i).map(Node::UeChain));
    nodes.extend((0..n_u).map(Node::Ue));
    nodes.push(Node::Sink);

    let mut edges = Vec::new();
    let mut push = |tail, head, capacity, cost| {
        edges.push(Edge {
            tail,
            head,
            capacity,
            cost,
        });
        edges.len() - 1
    };
    for b in 0..res.n_bs {
        push(FlowNetwork::SOURCE, bs_node(b), res.budget[b] as i64, 0.0);
    }
    for j in 0..n_j {
        push(bs_node(res.bs_of_free[j]), j_node(j), 1, 0.0);
    }
    let mut links = Vec::new();
    let mut max_path_cost: f64 = 0.0;
    for j in 0..n_j {
        for i in 0..n_i {
            let c = res.capacity.get(i, j);
            // A zero-capacity link adds nothing to the sum rate.
            if c <= 0.0 {
                continue;
            }
            let cost = match model {
                CostModel::NegatedCapacity => -c,
                CostModel::Reciprocal => 1.0 / (1.0 + c),
            };
            max_path_cost = max_path_cost.max(cost);
            links.push((push(j_node(j), i_node(i), 1, cost), i, j));
        }
    }
    for i in 0..n_i {
        push(i_node(i), u_node(res.ue_of_na_chain[i]), 1, 0.0);
    }
    for u in 0..n_u {
        push(u_node(u), sink, res.n_ue_rf as i64, 0.0);
    }
    let supply = res.total_budget() as i64;
    let overflow_cost = match model {
        CostModel::NegatedCapacity => 0.0,
        CostModel::Reciprocal => 1.0 + max_path_cost,
    };
    push(FlowNetwork::SOURCE, sink, supply, overflow_cost);

    FlowNetwork {
        nodes,
        edges,
        supply,
        links,
    }
}
