//! Solver-ready association instances, candidate solutions, and the
//! constraint audit shared by every solver.

mod file;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::matrix::Matrix;
use crate::model::{CapacityMatrix, ScenarioConfig, ScenarioRealization};

pub use file::{InstanceFile, SolutionFile};

/// Absolute slack, in bps, when comparing an aggregate rate to a requirement.
pub const RATE_TOL_BPS: f64 = 1e-6;

/// Binary link matrix, `[UE RF chain, BS RF chain]`.
pub type Assignment = Matrix<bool>;

#[inline]
pub fn meets_requirement(rate_bps: f64, req_bps: f64) -> bool {
    rate_bps + RATE_TOL_BPS >= req_bps
}

/// Capacities, requirements and the RF-chain ownership maps.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociationInstance {
    capacity: CapacityMatrix,
    rate_req: Vec<f64>,
    n_ue_rf: usize,
    n_bs_rf: usize,
    ue_of_chain: Vec<usize>,
    bs_of_chain: Vec<usize>,
    chains_of_ue: Vec<Vec<usize>>,
    chains_of_bs: Vec<Vec<usize>>,
}

impl AssociationInstance {
    /// Chains are owned in blocks: UE chain `i` belongs to UE
    /// `i / n_ue_rf` and BS chain `j` to BS `j / n_bs_rf`.
    pub fn new(
        capacity: CapacityMatrix,
        rate_req: Vec<f64>,
        n_ue_rf: usize,
        n_bs_rf: usize,
    ) -> Result<Self> {
        if n_ue_rf == 0 || n_bs_rf == 0 {
            return invalid("RF chain counts must be at least 1");
        }
        let ue_of_chain = (0..capacity.rows()).map(|i| i / n_ue_rf).collect();
        let bs_of_chain = (0..capacity.cols()).map(|j| j / n_bs_rf).collect();
        Self::with_ownership(
            capacity,
            rate_req,
            n_ue_rf,
            n_bs_rf,
            ue_of_chain,
            bs_of_chain,
        )
    }

    pub fn with_ownership(
        capacity: CapacityMatrix,
        rate_req: Vec<f64>,
        n_ue_rf: usize,
        n_bs_rf: usize,
        ue_of_chain: Vec<usize>,
        bs_of_chain: Vec<usize>,
    ) -> Result<Self> {
        if n_ue_rf == 0 || n_bs_rf == 0 {
            return invalid("RF chain counts must be at least 1");
        }
        let n_ue = rate_req.len();
        if n_ue == 0 {
            return invalid("instance needs at least one UE");
        }
        if let Some(r) = rate_req.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
            return invalid(format!("rate requirements must be positive, got {r}"));
        }
        if capacity.rows() != n_ue * n_ue_rf {
            return invalid(format!(
                "{} UE RF chains expected for {n_ue} UEs x {n_ue_rf}, capacity has {} rows",
                n_ue * n_ue_rf,
                capacity.rows()
            ));
        }
        if capacity.cols() == 0 || !capacity.cols().is_multiple_of(n_bs_rf) {
            return invalid(format!(
                "{} BS RF chains is not a positive multiple of {n_bs_rf}",
                capacity.cols()
            ));
        }
        let n_bs = capacity.cols() / n_bs_rf;
        let chains_of_ue = partition(&ue_of_chain, capacity.rows(), n_ue, n_ue_rf, "UE")?;
        let chains_of_bs = partition(&bs_of_chain, capacity.cols(), n_bs, n_bs_rf, "BS")?;
        Ok(Self {
            capacity,
            rate_req,
            n_ue_rf,
            n_bs_rf,
            ue_of_chain,
            bs_of_chain,
            chains_of_ue,
            chains_of_bs,
        })
    }

    pub fn from_scenario(real: &ScenarioRealization, cfg: &ScenarioConfig) -> Result<Self> {
        let c = crate::model::build_capacity_matrix(real, cfg)?;
        Self::new(c, real.rate_req.clone(), cfg.n_ue_rf, cfg.n_bs_rf)
    }

    pub fn capacity(&self) -> &CapacityMatrix {
        &self.capacity
    }

    #[inline]
    pub fn c(&self, i: usize, j: usize) -> f64 {
        self.capacity.get(i, j)
    }

    pub fn rate_req(&self) -> &[f64] {
        &self.rate_req
    }

    pub fn n_ue_rf(&self) -> usize {
        self.n_ue_rf
    }

    pub fn n_bs_rf(&self) -> usize {
        self.n_bs_rf
    }

    pub fn n_ue(&self) -> usize {
        self.rate_req.len()
    }

    pub fn n_bs(&self) -> usize {
        self.chains_of_bs.len()
    }

    pub fn n_ue_chains(&self) -> usize {
        self.capacity.rows()
    }

    pub fn n_bs_chains(&self) -> usize {
        self.capacity.cols()
    }

    pub fn ue_of_chain(&self) -> &[usize] {
        &self.ue_of_chain
    }

    pub fn bs_of_chain(&self) -> &[usize] {
        &self.bs_of_chain
    }

    /// UE RF chains owned by `u`, ascending.
    pub fn chains_of_ue(&self, u: usize) -> &[usize] {
        &self.chains_of_ue[u]
    }

    pub fn chains_of_bs(&self, b: usize) -> &[usize] {
        &self.chains_of_bs[b]
    }

    /// Same capacities and ownership with new requirements.
    pub fn with_rate_req(&self, rate_req: Vec<f64>) -> Result<Self> {
        Self::with_ownership(
            self.capacity.clone(),
            rate_req,
            self.n_ue_rf,
            self.n_bs_rf,
            self.ue_of_chain.clone(),
            self.bs_of_chain.clone(),
        )
    }
}

fn partition(
    owner: &[usize],
    n_chains: usize,
    n_devices: usize,
    per_device: usize,
    what: &str,
) -> Result<Vec<Vec<usize>>> {
    if owner.len() != n_chains {
        return invalid(format!(
            "{what} ownership map has {} entries for {n_chains} chains",
            owner.len()
        ));
    }
    let mut groups = vec![Vec::with_capacity(per_device); n_devices];
    for (chain, &dev) in owner.iter().enumerate() {
        match groups.get_mut(dev) {
            Some(g) => g.push(chain),
            None => {
                return invalid(format!(
                    "{what} chain {chain} owned by unknown {what} {dev}"
                ))
            }
        }
    }
    if let Some(d) = groups.iter().position(|g| g.len() != per_device) {
        return invalid(format!(
            "{what} {d} owns {} chains, expected {per_device}",
            groups[d].len()
        ));
    }
    Ok(groups)
}

/// A binary association: links `x`, association flags `z` and the
/// aggregate rate each UE receives.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociationSolution {
    pub x: Assignment,
    pub z: Vec<bool>,
    pub per_ue_rate: Vec<f64>,
}

impl AssociationSolution {
    pub fn new(inst: &AssociationInstance, x: Assignment, z: Vec<bool>) -> Result<Self> {
        if x.shape() != (inst.n_ue_chains(), inst.n_bs_chains()) {
            return invalid(format!(
                "assignment is {:?}, instance is {:?}",
                x.shape(),
                (inst.n_ue_chains(), inst.n_bs_chains())
            ));
        }
        if z.len() != inst.n_ue() {
            return invalid(format!("z has {} entries for {} UEs", z.len(), inst.n_ue()));
        }
        let per_ue_rate = aggregate_rates(inst, &x);
        Ok(Self { x, z, per_ue_rate })
    }

    /// `z_u` set for every UE that holds at least one link.
    pub fn from_links(inst: &AssociationInstance, x: Assignment) -> Result<Self> {
        let mut z = vec![false; inst.n_ue()];
        for (i, _) in x.ones() {
            if let Some(&u) = inst.ue_of_chain().get(i) {
                z[u] = true;
            }
        }
        Self::new(inst, x, z)
    }

    pub fn empty(inst: &AssociationInstance) -> Self {
        Self {
            x: Matrix::filled(inst.n_ue_chains(), inst.n_bs_chains(), false),
            z: vec![false; inst.n_ue()],
            per_ue_rate: vec![0.0; inst.n_ue()],
        }
    }

    pub fn n_links(&self) -> usize {
        self.x.count_ones()
    }
}

fn aggregate_rates(inst: &AssociationInstance, x: &Assignment) -> Vec<f64> {
    let mut rate = vec![0.0; inst.n_ue()];
    for (i, j) in x.ones() {
        rate[inst.ue_of_chain()[i]] += inst.c(i, j);
    }
    rate
}

/// Constraint labels of the step-1 problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintId {
    /// A BS RF chain serves at most one UE RF chain.
    BsChainExclusive,
    /// A UE RF chain uses at most one BS RF chain.
    UeChainExclusive,
    /// At most `N_BS^RF` links per BS.
    BsBudget,
    /// At most `z_u N_UE^RF` links per UE.
    UeBudget,
    /// Associated UEs receive at least their requirement.
    RateRequirement,
}

impl fmt::Display for ConstraintId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::BsChainExclusive => "bs-chain-exclusive",
            Self::UeChainExclusive => "ue-chain-exclusive",
            Self::BsBudget => "bs-budget",
            Self::UeBudget => "ue-budget",
            Self::RateRequirement => "rate-requirement",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: ConstraintId,
    /// The BS chain, UE chain, BS or UE the violated constraint is about.
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub violations: Vec<Violation>,
}

pub fn check_feasibility(
    inst: &AssociationInstance,
    sol: &AssociationSolution,
) -> Result<FeasibilityReport> {
    if sol.x.shape() != (inst.n_ue_chains(), inst.n_bs_chains()) || sol.z.len() != inst.n_ue() {
        return invalid("solution shape does not match instance");
    }
    let x = &sol.x;
    let mut col_sum = vec![0usize; inst.n_bs_chains()];
    let mut row_sum = vec![0usize; inst.n_ue_chains()];
    let mut bs_links = vec![0usize; inst.n_bs()];
    let mut ue_links = vec![0usize; inst.n_ue()];
    let mut ue_rate = vec![0.0; inst.n_ue()];
    for (i, j) in x.ones() {
        col_sum[j] += 1;
        row_sum[i] += 1;
        bs_links[inst.bs_of_chain()[j]] += 1;
        let u = inst.ue_of_chain()[i];
        ue_links[u] += 1;
        ue_rate[u] += inst.c(i, j);
    }

    let mut violations = Vec::new();
    let mut flag = |constraint, bad: &mut dyn Iterator<Item = usize>| {
        violations.extend(bad.map(|index| Violation { constraint, index }));
    };
    flag(
        ConstraintId::BsChainExclusive,
        &mut (0..col_sum.len()).filter(|&j| col_sum[j] > 1),
    );
    flag(
        ConstraintId::UeChainExclusive,
        &mut (0..row_sum.len()).filter(|&i| row_sum[i] > 1),
    );
    flag(
        ConstraintId::BsBudget,
        &mut (0..bs_links.len()).filter(|&b| bs_links[b] > inst.n_bs_rf()),
    );
    flag(
        ConstraintId::UeBudget,
        &mut (0..ue_links.len())
            .filter(|&u| ue_links[u] > if sol.z[u] { inst.n_ue_rf() } else { 0 }),
    );
    flag(
        ConstraintId::RateRequirement,
        &mut (0..ue_rate.len())
            .filter(|&u| sol.z[u] && !meets_requirement(ue_rate[u], inst.rate_req()[u])),
    );
    Ok(FeasibilityReport {
        feasible: violations.is_empty(),
        violations,
    })
}

/// `sum_u z_u - sum_{links} 1 / (N_UE^RF + 1 + c_ij / r_u)`.
pub fn objective_step1(inst: &AssociationInstance, sol: &AssociationSolution) -> f64 {
    let associated = sol.z.iter().filter(|&&z| z).count() as f64;
    let cost: f64 = sol
        .x
        .ones()
        .map(|(i, j)| {
            let u = inst.ue_of_chain()[i];
            crate::step1::link_weight(inst.c(i, j), inst.rate_req()[u], inst.n_ue_rf())
        })
        .sum();
    associated - cost
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// UEs holding at least one link.
    pub n_associated: usize,
    /// Associated UEs whose aggregate rate meets their requirement.
    pub n_satisfied: usize,
    pub sum_rate_bps: f64,
}

pub fn metrics(inst: &AssociationInstance, sol: &AssociationSolution) -> Metrics {
    let rates = aggregate_rates(inst, &sol.x);
    let mut linked = vec![false; inst.n_ue()];
    for (i, _) in sol.x.ones() {
        linked[inst.ue_of_chain()[i]] = true;
    }
    let n_associated = linked.iter().filter(|&&l| l).count();
    let n_satisfied = (0..inst.n_ue())
        .filter(|&u| linked[u] && meets_requirement(rates[u], inst.rate_req()[u]))
        .count();
    let sum_rate_bps = sol.x.ones().map(|(i, j)| inst.c(i, j)).sum();
    Metrics {
        n_associated,
        n_satisfied,
        sum_rate_bps,
    }
}
