//! Random instance generators and brute-force oracles shared by the
//! integration tests. The oracles re-derive every constraint directly and
//! never call into the solvers they check.

#![allow(dead_code)]

use mmassoc::matrix::Matrix;
use mmassoc::step2flow::ResidualInstance;
use mmassoc::{AssociationInstance, AssociationSolution, CapacityMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Capacity with a 20% chance of an unusable (zero) link.
fn capacity(rng: &mut ChaCha8Rng) -> f64 {
    if rng.random_bool(0.2) {
        0.0
    } else {
        rng.random_range(0.05..1.0)
    }
}

/// Block-owned instance with the given dimensions. Requirements are drawn
/// so that some UEs need one link, some need two and some are hopeless.
pub fn instance_with(
    rng: &mut ChaCha8Rng,
    n_ue: usize,
    n_bs: usize,
    n_ue_rf: usize,
    n_bs_rf: usize,
) -> AssociationInstance {
    let rows: Vec<Vec<f64>> = (0..n_ue * n_ue_rf)
        .map(|_| (0..n_bs * n_bs_rf).map(|_| capacity(rng)).collect())
        .collect();
    let req = (0..n_ue).map(|_| rng.random_range(0.2..1.6)).collect();
    AssociationInstance::new(
        CapacityMatrix::from_rows(&rows).unwrap(),
        req,
        n_ue_rf,
        n_bs_rf,
    )
    .unwrap()
}

/// Up to 4 UEs, 3 BSs and 2 chains per device.
pub fn small_instance(rng: &mut ChaCha8Rng) -> AssociationInstance {
    let n_ue = rng.random_range(1..=4);
    let n_bs = rng.random_range(1..=3);
    let n_ue_rf = rng.random_range(1..=2);
    let n_bs_rf = rng.random_range(1..=2);
    instance_with(rng, n_ue, n_bs, n_ue_rf, n_bs_rf)
}

/// Up to 6 UE chains by 6 BS chains, chains grouped into devices at
/// random, with all chains free.
pub fn small_residual(rng: &mut ChaCha8Rng) -> ResidualInstance {
    let n_rows = rng.random_range(1..=6);
    let n_cols = rng.random_range(1..=6);
    let n_ue_rf = rng.random_range(1..=3);
    let mut ue_of_chain = Vec::with_capacity(n_rows);
    let (mut ue, mut in_ue) = (0, 0);
    for _ in 0..n_rows {
        if in_ue == n_ue_rf || (in_ue > 0 && rng.random_bool(0.4)) {
            ue += 1;
            in_ue = 0;
        }
        ue_of_chain.push(ue);
        in_ue += 1;
    }
    let n_bs = rng.random_range(1..=n_cols);
    let bs_of_chain: Vec<usize> = (0..n_cols)
        .map(|j| {
            if j < n_bs {
                j
            } else {
                rng.random_range(0..n_bs)
            }
        })
        .collect();
    let data = (0..n_rows * n_cols).map(|_| capacity(rng)).collect();
    ResidualInstance::from_parts(
        Matrix::from_vec(n_rows, n_cols, data).unwrap(),
        ue_of_chain,
        bs_of_chain,
        n_bs,
        n_ue_rf,
    )
    .unwrap()
}

/// Calls `visit` with every assignment in which each UE chain holds at
/// most one link and each BS chain serves at most one UE chain.
pub fn for_each_matching(n_rows: usize, n_cols: usize, visit: &mut dyn FnMut(&[Option<usize>])) {
    fn rec(
        k: usize,
        n_cols: usize,
        used: &mut Vec<bool>,
        pick: &mut Vec<Option<usize>>,
        visit: &mut dyn FnMut(&[Option<usize>]),
    ) {
        if k == pick.len() {
            visit(pick);
            return;
        }
        pick[k] = None;
        rec(k + 1, n_cols, used, pick, visit);
        for j in 0..n_cols {
            if !used[j] {
                used[j] = true;
                pick[k] = Some(j);
                rec(k + 1, n_cols, used, pick, visit);
                used[j] = false;
            }
        }
        pick[k] = None;
    }
    let mut used = vec![false; n_cols];
    let mut pick = vec![None; n_rows];
    rec(0, n_cols, &mut used, &mut pick, visit);
}

/// One feasible step-1 solution found by enumeration.
#[derive(Debug, Clone)]
pub struct Enumerated {
    pub x: Vec<bool>,
    pub n_satisfied: usize,
    pub n_links: usize,
    pub objective: f64,
}

/// Every solution satisfying all step-1 constraints, computed from first
/// principles: per-device chain budgets, and every UE holding a link must
/// meet its requirement within 1e-6.
pub fn enumerate_step1(inst: &AssociationInstance) -> Vec<Enumerated> {
    let (n_i, n_j) = (inst.n_ue_chains(), inst.n_bs_chains());
    let n = inst.n_ue_rf() as f64;
    let mut out = Vec::new();
    for_each_matching(n_i, n_j, &mut |pick| {
        let mut bs_load = vec![0; inst.n_bs()];
        let mut ue_load = vec![0; inst.n_ue()];
        let mut rate = vec![0.0; inst.n_ue()];
        let mut cost = 0.0;
        for (i, p) in pick.iter().enumerate() {
            if let Some(j) = *p {
                let u = inst.ue_of_chain()[i];
                bs_load[inst.bs_of_chain()[j]] += 1;
                ue_load[u] += 1;
                rate[u] += inst.c(i, j);
                cost += 1.0 / (n + 1.0 + inst.c(i, j) / inst.rate_req()[u]);
            }
        }
        if bs_load.iter().any(|&l| l > inst.n_bs_rf())
            || ue_load.iter().any(|&l| l > inst.n_ue_rf())
        {
            return;
        }
        let mut n_satisfied = 0;
        for u in 0..inst.n_ue() {
            if ue_load[u] > 0 {
                if rate[u] + 1e-6 < inst.rate_req()[u] {
                    return;
                }
                n_satisfied += 1;
            }
        }
        let mut x = vec![false; n_i * n_j];
        for (i, p) in pick.iter().enumerate() {
            if let Some(j) = *p {
                x[i * n_j + j] = true;
            }
        }
        out.push(Enumerated {
            x,
            n_satisfied,
            n_links: ue_load.iter().sum(),
            objective: n_satisfied as f64 - cost,
        });
    });
    out
}

/// Best objective, ties within 1e-9 broken towards the lexicographically
/// smallest `x`.
pub fn step1_optimum(all: &[Enumerated]) -> &Enumerated {
    let top = all
        .iter()
        .map(|e| e.objective)
        .fold(f64::NEG_INFINITY, f64::max);
    all.iter()
        .filter(|e| e.objective >= top - 1e-9)
        .min_by(|a, b| a.x.cmp(&b.x))
        .expect("the empty solution is always feasible")
}

/// Largest sum rate over every feasible residual assignment.
pub fn step2_brute_force(res: &ResidualInstance) -> f64 {
    let (n_a, n_b) = (res.na_ue_chains.len(), res.free_bs_chains.len());
    let mut best = 0.0f64;
    for_each_matching(n_a, n_b, &mut |pick| {
        let mut bs_load = vec![0; res.n_bs];
        let mut ue_load = vec![0; res.na_ues.len()];
        let mut sum = 0.0;
        for (a, p) in pick.iter().enumerate() {
            if let Some(b) = *p {
                bs_load[res.bs_of_free[b]] += 1;
                ue_load[res.ue_of_na_chain[a]] += 1;
                sum += res.capacity.get(a, b);
            }
        }
        if (0..res.n_bs).all(|k| bs_load[k] <= res.budget[k])
            && ue_load.iter().all(|&l| l <= res.n_ue_rf)
        {
            best = best.max(sum);
        }
    });
    best
}

pub fn flat_x(sol: &AssociationSolution) -> Vec<bool> {
    sol.x.as_slice().to_vec()
}
