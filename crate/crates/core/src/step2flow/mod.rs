//! Step 2: hand the BS RF chains left over by step 1 to the UEs it did not
//! associate, maximizing the sum rate.
//!
//! The assignment problem is rewritten as a min-cost flow
//! `s -> BS -> BS chain -> UE chain -> UE -> t`. Capacities and supplies are
//! integers, so successive shortest paths only ever push whole units and the
//! optimum is a 0/1 assignment.

mod mcf;
mod network;

pub use mcf::{solve_min_cost_flow, FlowResult};
pub use network::{
    build_flow_network, build_flow_network_with, CostModel, Edge, FlowNetwork, Node,
};

use crate::error::{invalid, Result};
use crate::instance::{Assignment, AssociationInstance, AssociationSolution};
use crate::lp::LinearProgram;
use crate::matrix::Matrix;

/// Entries within this distance of 0 or 1 count as integral.
pub const INTEGRALITY_TOL: f64 = 1e-6;

/// What is left after step 1, in its own compact index space.
///
/// Row `a` of `capacity` is UE chain `na_ue_chains[a]` of the original
/// instance, column `b` is BS chain `free_bs_chains[b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualInstance {
    pub n_bs: usize,
    pub n_ue_rf: usize,
    pub free_bs_chains: Vec<usize>,
    /// Owning BS of each free chain.
    pub bs_of_free: Vec<usize>,
    /// Remaining chains per BS, indexed by original BS.
    pub budget: Vec<usize>,
    pub na_ues: Vec<usize>,
    pub na_ue_chains: Vec<usize>,
    /// Position in `na_ues` of each entry of `na_ue_chains`.
    pub ue_of_na_chain: Vec<usize>,
    pub capacity: Matrix<f64>,
}

impl ResidualInstance {
    /// Everything free: every UE unassociated, every chain available.
    pub fn full(inst: &AssociationInstance) -> Self {
        Self::after_step1(inst, &AssociationSolution::empty(inst))
            .expect("empty solution matches its instance")
    }

    /// Removes UEs associated in `step1` and the BS chains they occupy.
    pub fn after_step1(inst: &AssociationInstance, step1: &AssociationSolution) -> Result<Self> {
        if step1.x.shape() != (inst.n_ue_chains(), inst.n_bs_chains())
            || step1.z.len() != inst.n_ue()
        {
            return invalid("step-1 solution does not match instance");
        }
        let mut associated = step1.z.clone();
        let mut bs_used = vec![false; inst.n_bs_chains()];
        for (i, j) in step1.x.ones() {
            associated[inst.ue_of_chain()[i]] = true;
            bs_used[j] = true;
        }
        let free_bs_chains: Vec<usize> = (0..inst.n_bs_chains()).filter(|&j| !bs_used[j]).collect();
        let bs_of_free: Vec<usize> = free_bs_chains
            .iter()
            .map(|&j| inst.bs_of_chain()[j])
            .collect();
        let mut budget = vec![0; inst.n_bs()];
        for &b in &bs_of_free {
            budget[b] += 1;
        }
        let na_ues: Vec<usize> = (0..inst.n_ue()).filter(|&u| !associated[u]).collect();
        let mut na_ue_chains = Vec::new();
        let mut ue_of_na_chain = Vec::new();
        for (pos, &u) in na_ues.iter().enumerate() {
            for &i in inst.chains_of_ue(u) {
                na_ue_chains.push(i);
                ue_of_na_chain.push(pos);
            }
        }
        let mut capacity = Matrix::filled(na_ue_chains.len(), free_bs_chains.len(), 0.0);
        for (a, &i) in na_ue_chains.iter().enumerate() {
            for (b, &j) in free_bs_chains.iter().enumerate() {
                capacity.set(a, b, inst.c(i, j));
            }
        }
        Ok(Self {
            n_bs: inst.n_bs(),
            n_ue_rf: inst.n_ue_rf(),
            free_bs_chains,
            bs_of_free,
            budget,
            na_ues,
            na_ue_chains,
            ue_of_na_chain,
            capacity,
        })
    }

    /// A free-standing residual problem: `capacity` rows are UE chains
    /// grouped by `ue_of_chain`, columns are BS chains owned per `bs_of_chain`.
    pub fn from_parts(
        capacity: Matrix<f64>,
        ue_of_chain: Vec<usize>,
        bs_of_chain: Vec<usize>,
        n_bs: usize,
        n_ue_rf: usize,
    ) -> Result<Self> {
        if ue_of_chain.len() != capacity.rows() || bs_of_chain.len() != capacity.cols() {
            return invalid("ownership maps do not match the capacity matrix");
        }
        if bs_of_chain.iter().any(|&b| b >= n_bs) {
            return invalid("BS chain owned by an unknown BS");
        }
        if capacity
            .as_slice()
            .iter()
            .any(|c| !(c.is_finite() && *c >= 0.0))
        {
            return invalid("capacities must be finite and non-negative");
        }
        let n_na = ue_of_chain.iter().max().map_or(0, |m| m + 1);
        let mut per_ue = vec![0; n_na];
        for &u in &ue_of_chain {
            per_ue[u] += 1;
        }
        if per_ue.iter().any(|&k| k == 0 || k > n_ue_rf) {
            return invalid("every UE needs between 1 and n_ue_rf chains");
        }
        let mut budget = vec![0; n_bs];
        for &b in &bs_of_chain {
            budget[b] += 1;
        }
        Ok(Self {
            n_bs,
            n_ue_rf,
            free_bs_chains: (0..capacity.cols()).collect(),
            bs_of_free: bs_of_chain,
            budget,
            na_ues: (0..n_na).collect(),
            na_ue_chains: (0..capacity.rows()).collect(),
            ue_of_na_chain: ue_of_chain,
            capacity,
        })
    }

    pub fn total_budget(&self) -> usize {
        self.budget.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.free_bs_chains.is_empty() || self.na_ue_chains.is_empty()
    }
}

/// Step-2 assignment in the residual index space.
#[derive(Debug, Clone, PartialEq)]
pub struct Step2Solution {
    pub x: Assignment,
    /// Per entry of `na_ues`: holds at least one link.
    pub z: Vec<bool>,
    pub sum_rate_bps: f64,
}

impl Step2Solution {
    /// The same links in the original instance's index space.
    pub fn lift(&self, res: &ResidualInstance, inst: &AssociationInstance) -> Assignment {
        let mut x = Matrix::filled(inst.n_ue_chains(), inst.n_bs_chains(), false);
        for (a, b) in self.x.ones() {
            x.set(res.na_ue_chains[a], res.free_bs_chains[b], true);
        }
        x
    }
}

pub fn solve_step2(res: &ResidualInstance) -> Result<Step2Solution> {
    let net = build_flow_network(res);
    let flow = solve_min_cost_flow(&net)?;
    let mut x = Matrix::filled(res.na_ue_chains.len(), res.free_bs_chains.len(), false);
    for (e, a, b) in net.link_edges() {
        if flow.flow[e] > 0 {
            x.set(a, b, true);
        }
    }
    let mut z = vec![false; res.na_ues.len()];
    for (a, _) in x.ones() {
        z[res.ue_of_na_chain[a]] = true;
    }
    let sum_rate_bps = x.ones().map(|(a, b)| res.capacity.get(a, b)).sum();
    Ok(Step2Solution { x, z, sum_rate_bps })
}

/// The step-2 problem with `x` relaxed to `[0, 1]`. Objective coefficients
/// are capacities scaled by the largest one.
pub fn build_step2_relaxation(res: &ResidualInstance) -> LinearProgram {
    let (n_a, n_b) = (res.na_ue_chains.len(), res.free_bs_chains.len());
    let var = |a: usize, b: usize| a * n_b + b;
    let mut lp = LinearProgram::new(n_a * n_b);
    let scale = res.capacity.as_slice().iter().copied().fold(0.0, f64::max);
    if scale > 0.0 {
        for a in 0..n_a {
            for b in 0..n_b {
                lp.set_objective(var(a, b), res.capacity.get(a, b) / scale);
            }
        }
    }
    let ok = "relaxation rows are well formed";
    for b in 0..n_b {
        lp.add_le((0..n_a).map(|a| (var(a, b), 1.0)).collect(), 1.0)
            .expect(ok);
    }
    for a in 0..n_a {
        lp.add_le((0..n_b).map(|b| (var(a, b), 1.0)).collect(), 1.0)
            .expect(ok);
    }
    for bs in 0..res.n_bs {
        let row = (0..n_b)
            .filter(|&b| res.bs_of_free[b] == bs)
            .flat_map(|b| (0..n_a).map(move |a| (var(a, b), 1.0)))
            .collect();
        lp.add_le(row, res.budget[bs] as f64).expect(ok);
    }
    for ue in 0..res.na_ues.len() {
        let row = (0..n_a)
            .filter(|&a| res.ue_of_na_chain[a] == ue)
            .flat_map(|a| (0..n_b).map(move |b| (var(a, b), 1.0)))
            .collect();
        lp.add_le(row, res.n_ue_rf as f64).expect(ok);
    }
    lp
}

/// Simplex optimum of the relaxed step-2 problem.
pub fn solve_step2_lp(res: &ResidualInstance) -> Result<Matrix<f64>> {
    let sol = build_step2_relaxation(res).solve()?;
    Ok(Matrix::from_vec(res.na_ue_chains.len(), res.free_bs_chains.len(), sol.x).expect("sized"))
}

/// True when every entry is within [`INTEGRALITY_TOL`] of 0 or 1.
pub fn verify_integrality(x: &Matrix<f64>) -> bool {
    x.as_slice()
        .iter()
        .all(|&v| v.abs() <= INTEGRALITY_TOL || (v - 1.0).abs() <= INTEGRALITY_TOL)
}
