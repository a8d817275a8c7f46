//! Exact step 1 as weighted set packing over per-UE link patterns.
//!
//! A pattern maps some of a UE's RF chains to distinct BS RF chains so the
//! aggregate capacity meets the UE's requirement, and is inclusion-minimal:
//! dropping any link breaks the requirement. Non-minimal patterns are never
//! optimal because every link has positive cost. Each UE either takes one
//! pattern whose BS chains are still free or stays unassociated.
//!
//! The optimum is found by memoized recursion over `(UE position, occupied
//! BS chains)`, where the occupied set is restricted to chains that later
//! UEs could still use. A second depth-first pass walks only the branches
//! that reach the optimum and keeps the lexicographically smallest `x`.

use std::cmp::Ordering;
use std::collections::HashMap;

use super::link_weight;
use crate::error::{invalid, Error, Result};
use crate::instance::{meets_requirement, Assignment, AssociationInstance, AssociationSolution};
use crate::matrix::Matrix;

/// Limit on memo entries plus search nodes.
pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

/// Scores closer than this are treated as equal and resolved by the
/// lexicographically smallest `x`.
const TIE_EPS: f64 = 1e-9;

/// The memo stops growing past this many entries; lookups that miss are
/// then recomputed.
const MEMO_CAP: usize = 1 << 23;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExactStats {
    pub nodes: u64,
    pub patterns: usize,
}

#[derive(Debug, Clone)]
struct Pattern {
    links: Vec<(usize, usize)>,
    mask: u128,
    value: f64,
}

/// Globally optimal step-1 association.
///
/// Fails with [`Error::BudgetExhausted`] once more than `node_budget` memo
/// states and search nodes have been expanded. The error then carries a
/// greedy feasible solution.
pub fn solve_step1_exact(
    inst: &AssociationInstance,
    node_budget: u64,
) -> Result<AssociationSolution> {
    solve_step1_exact_stats(inst, node_budget).map(|(s, _)| s)
}

pub fn solve_step1_exact_stats(
    inst: &AssociationInstance,
    node_budget: u64,
) -> Result<(AssociationSolution, ExactStats)> {
    if inst.n_bs_chains() > 128 {
        return invalid(format!(
            "exact search supports at most 128 BS RF chains, instance has {}",
            inst.n_bs_chains()
        ));
    }
    let mut per_ue: Vec<(usize, Vec<Pattern>)> = (0..inst.n_ue())
        .map(|u| (u, enumerate_patterns(inst, u)))
        .filter(|(_, p)| !p.is_empty())
        .collect();
    per_ue.sort_by_key(|(u, p)| (p.len(), *u));
    let n_patterns = per_ue.iter().map(|(_, p)| p.len()).sum();

    let mut relevant = vec![0u128; per_ue.len() + 1];
    for k in (0..per_ue.len()).rev() {
        relevant[k] = per_ue[k].1.iter().fold(relevant[k + 1], |m, p| m | p.mask);
    }

    let mut search = Search {
        inst,
        order: per_ue.iter().map(|(u, _)| *u).collect(),
        patterns: per_ue.into_iter().map(|(_, p)| p).collect(),
        relevant,
        memo: HashMap::new(),
        chosen: Vec::new(),
        target: 0.0,
        best_score: f64::NEG_INFINITY,
        best: AssociationSolution::empty(inst),
        nodes: 0,
        budget: node_budget,
    };
    let outcome = search.optimum(0, 0).and_then(|target| {
        search.target = target;
        search.walk(0, 0, 0.0)
    });

    let stats = ExactStats {
        nodes: search.nodes,
        patterns: n_patterns,
    };
    if outcome.is_none() {
        return Err(Error::BudgetExhausted {
            budget: node_budget,
            incumbent: Box::new(search.greedy()),
        });
    }
    Ok((search.best, stats))
}

fn enumerate_patterns(inst: &AssociationInstance, u: usize) -> Vec<Pattern> {
    let chains = inst.chains_of_ue(u);
    let r = inst.rate_req()[u];
    let mut out = Vec::new();
    let mut links = Vec::with_capacity(chains.len());
    extend(
        inst,
        chains,
        0,
        0,
        &mut links,
        &mut |links: &[(usize, usize)], mask| {
            let caps: Vec<f64> = links.iter().map(|&(i, j)| inst.c(i, j)).collect();
            let total: f64 = caps.iter().sum();
            if !meets_requirement(total, r) {
                return;
            }
            let minimal = (0..caps.len()).all(|skip| {
                let rest: f64 = caps
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != skip)
                    .map(|(_, c)| c)
                    .sum();
                !meets_requirement(rest, r)
            });
            if minimal {
                let cost: f64 = caps
                    .iter()
                    .map(|&c| link_weight(c, r, inst.n_ue_rf()))
                    .sum();
                out.push(Pattern {
                    links: links.to_vec(),
                    mask,
                    value: 1.0 - cost,
                });
            }
        },
    );
    out.sort_by(|a, b| {
        b.value
            .total_cmp(&a.value)
            .then_with(|| a.links.cmp(&b.links))
    });
    out
}

type LinkVisitor<'a> = dyn FnMut(&[(usize, usize)], u128) + 'a;

/// Visits every non-empty partial injection of `chains[k..]` into unused BS
/// chains.
fn extend(
    inst: &AssociationInstance,
    chains: &[usize],
    k: usize,
    mask: u128,
    links: &mut Vec<(usize, usize)>,
    visit: &mut LinkVisitor,
) {
    if k == chains.len() {
        if !links.is_empty() {
            visit(links, mask);
        }
        return;
    }
    extend(inst, chains, k + 1, mask, links, visit);
    for j in 0..inst.n_bs_chains() {
        let bit = 1u128 << j;
        if mask & bit == 0 {
            links.push((chains[k], j));
            extend(inst, chains, k + 1, mask | bit, links, visit);
            links.pop();
        }
    }
}

struct Search<'a> {
    inst: &'a AssociationInstance,
    order: Vec<usize>,
    patterns: Vec<Vec<Pattern>>,
    /// Chains used by any pattern of the UEs at positions `k..`.
    relevant: Vec<u128>,
    memo: HashMap<(usize, u128), f64>,
    chosen: Vec<Option<usize>>,
    target: f64,
    best_score: f64,
    best: AssociationSolution,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    /// Counts one node; `None` once the budget is spent.
    fn tick(&mut self) -> Option<()> {
        self.nodes += 1;
        (self.nodes <= self.budget).then_some(())
    }

    /// Best total value of the UEs at positions `k..` given occupied chains.
    fn optimum(&mut self, k: usize, used: u128) -> Option<f64> {
        if k == self.order.len() {
            return Some(0.0);
        }
        let key = (k, used & self.relevant[k]);
        if let Some(&v) = self.memo.get(&key) {
            return Some(v);
        }
        self.tick()?;
        let mut best = self.optimum(k + 1, used)?;
        for p in 0..self.patterns[k].len() {
            let (mask, value) = (self.patterns[k][p].mask, self.patterns[k][p].value);
            if mask & used == 0 {
                best = best.max(value + self.optimum(k + 1, used | mask)?);
            }
        }
        if self.memo.len() < MEMO_CAP {
            self.memo.insert(key, best);
        }
        Some(best)
    }

    /// Visits every completion whose score reaches the optimum.
    fn walk(&mut self, k: usize, used: u128, score: f64) -> Option<()> {
        self.tick()?;
        if k == self.order.len() {
            self.offer(score);
            return Some(());
        }
        for p in 0..self.patterns[k].len() {
            let (mask, value) = (self.patterns[k][p].mask, self.patterns[k][p].value);
            if mask & used == 0
                && score + value + self.optimum(k + 1, used | mask)? >= self.target - TIE_EPS
            {
                self.chosen.push(Some(p));
                self.walk(k + 1, used | mask, score + value)?;
                self.chosen.pop();
            }
        }
        if score + self.optimum(k + 1, used)? >= self.target - TIE_EPS {
            self.chosen.push(None);
            self.walk(k + 1, used, score)?;
            self.chosen.pop();
        }
        Some(())
    }

    fn offer(&mut self, score: f64) {
        let improves = score > self.best_score + TIE_EPS;
        let ties = (score - self.best_score).abs() <= TIE_EPS;
        if !improves && !ties {
            return;
        }
        let candidate = self.materialize();
        if improves || lex_less(&candidate.x, &self.best.x) {
            self.best_score = score;
            self.best = candidate;
        }
    }

    fn materialize(&self) -> AssociationSolution {
        let inst = self.inst;
        let mut x = Matrix::filled(inst.n_ue_chains(), inst.n_bs_chains(), false);
        let mut z = vec![false; inst.n_ue()];
        for (k, choice) in self.chosen.iter().enumerate() {
            if let Some(p) = choice {
                z[self.order[k]] = true;
                for &(i, j) in &self.patterns[k][*p].links {
                    x.set(i, j, true);
                }
            }
        }
        AssociationSolution::new(inst, x, z).expect("shapes come from the instance")
    }

    /// Each UE in search order takes its best pattern that still fits.
    fn greedy(&mut self) -> AssociationSolution {
        let mut used = 0u128;
        self.chosen = self
            .patterns
            .iter()
            .map(|ps| {
                let p = ps.iter().position(|p| p.mask & used == 0)?;
                used |= ps[p].mask;
                Some(p)
            })
            .collect();
        self.materialize()
    }
}

pub(crate) fn lex_less(a: &Assignment, b: &Assignment) -> bool {
    a.as_slice().cmp(b.as_slice()) == Ordering::Less
}
