mod common;

use common::{
    enumerate_step1, flat_x, instance_with, rng, small_instance, small_residual, step1_optimum,
    step2_brute_force,
};
use mmassoc::baselines::{max_snr, max_snr_default, max_sum_rate};
use mmassoc::harness::run_two_step_detailed;
use mmassoc::instance::ConstraintId;
use mmassoc::matrix::Matrix;
use mmassoc::step1::{solve_step1_exact, solve_step1_lp_round, DEFAULT_NODE_BUDGET};
use mmassoc::step2flow::{build_flow_network, solve_min_cost_flow, solve_step2, ResidualInstance};
use mmassoc::{
    check_feasibility, metrics, AssociationInstance, AssociationSolution, CapacityMatrix,
    Step1Solver,
};
use rand::seq::SliceRandom;
use rand::Rng;

/// Direct re-evaluation of every constraint, returning the violated ones.
fn violated(inst: &AssociationInstance, sol: &AssociationSolution) -> Vec<(ConstraintId, usize)> {
    let (n_i, n_j) = (inst.n_ue_chains(), inst.n_bs_chains());
    let mut out = Vec::new();
    for j in 0..n_j {
        if (0..n_i).filter(|&i| sol.x.get(i, j)).count() > 1 {
            out.push((ConstraintId::BsChainExclusive, j));
        }
    }
    for i in 0..n_i {
        if (0..n_j).filter(|&j| sol.x.get(i, j)).count() > 1 {
            out.push((ConstraintId::UeChainExclusive, i));
        }
    }
    for b in 0..inst.n_bs() {
        let load = (0..n_i)
            .flat_map(|i| (0..n_j).map(move |j| (i, j)))
            .filter(|&(i, j)| inst.bs_of_chain()[j] == b && sol.x.get(i, j))
            .count();
        if load > inst.n_bs_rf() {
            out.push((ConstraintId::BsBudget, b));
        }
    }
    for u in 0..inst.n_ue() {
        let mut load = 0;
        let mut rate = 0.0;
        for i in (0..n_i).filter(|&i| inst.ue_of_chain()[i] == u) {
            for j in (0..n_j).filter(|&j| sol.x.get(i, j)) {
                load += 1;
                rate += inst.c(i, j);
            }
        }
        let z = if sol.z[u] { 1 } else { 0 };
        if load > inst.n_ue_rf() * z {
            out.push((ConstraintId::UeBudget, u));
        }
        if sol.z[u] && rate + 1e-6 < inst.rate_req()[u] {
            out.push((ConstraintId::RateRequirement, u));
        }
    }
    out.sort_by_key(|&(c, k)| (c as u8, k));
    out
}

#[test]
fn feasibility_check_agrees_with_direct_oracle() {
    let mut rng = rng(11);
    for _ in 0..1000 {
        let n_ue = rng.random_range(1..=4);
        let n_bs = rng.random_range(1..=4);
        let n_ue_rf = rng.random_range(1..=2);
        let n_bs_rf = rng.random_range(1..=2);
        let base = instance_with(&mut rng, n_ue, n_bs, n_ue_rf, n_bs_rf);
        // Scramble chain ownership to exercise non-block layouts.
        let mut ue_of_chain = base.ue_of_chain().to_vec();
        let mut bs_of_chain = base.bs_of_chain().to_vec();
        ue_of_chain.shuffle(&mut rng);
        bs_of_chain.shuffle(&mut rng);
        let inst = AssociationInstance::with_ownership(
            base.capacity().clone(),
            base.rate_req().to_vec(),
            n_ue_rf,
            n_bs_rf,
            ue_of_chain,
            bs_of_chain,
        )
        .unwrap();
        let density = rng.random_range(0.05..0.5);
        let data = (0..inst.n_ue_chains() * inst.n_bs_chains())
            .map(|_| rng.random_bool(density))
            .collect();
        let x = Matrix::from_vec(inst.n_ue_chains(), inst.n_bs_chains(), data).unwrap();
        let z = (0..inst.n_ue()).map(|_| rng.random_bool(0.5)).collect();
        let sol = AssociationSolution::new(&inst, x, z).unwrap();
        let report = check_feasibility(&inst, &sol).unwrap();
        let mut got: Vec<_> = report
            .violations
            .iter()
            .map(|v| (v.constraint, v.index))
            .collect();
        got.sort_by_key(|&(c, k)| (c as u8, k));
        let want = violated(&inst, &sol);
        assert_eq!(report.feasible, want.is_empty());
        assert_eq!(got, want);
    }
}

#[test]
fn exact_matches_enumeration_with_scrambled_ownership() {
    let mut rng = rng(12);
    for _ in 0..100 {
        let base = small_instance(&mut rng);
        let mut ue_of_chain = base.ue_of_chain().to_vec();
        let mut bs_of_chain = base.bs_of_chain().to_vec();
        ue_of_chain.shuffle(&mut rng);
        bs_of_chain.shuffle(&mut rng);
        let inst = AssociationInstance::with_ownership(
            base.capacity().clone(),
            base.rate_req().to_vec(),
            base.n_ue_rf(),
            base.n_bs_rf(),
            ue_of_chain,
            bs_of_chain,
        )
        .unwrap();
        let sol = solve_step1_exact(&inst, DEFAULT_NODE_BUDGET).unwrap();
        let all = enumerate_step1(&inst);
        assert_eq!(flat_x(&sol), step1_optimum(&all).x);
        assert!(check_feasibility(&inst, &sol).unwrap().feasible);
    }
}

#[test]
fn step2_after_step1_matches_brute_force() {
    let mut rng = rng(13);
    for _ in 0..150 {
        let inst = small_instance(&mut rng);
        for step1 in [
            solve_step1_lp_round(&inst).unwrap(),
            solve_step1_exact(&inst, DEFAULT_NODE_BUDGET).unwrap(),
        ] {
            let res = ResidualInstance::after_step1(&inst, &step1).unwrap();
            let s2 = solve_step2(&res).unwrap();
            assert_eq!(s2.sum_rate_bps, step2_brute_force(&res));
        }
    }
}

#[test]
fn flow_conserves_and_respects_capacities() {
    let mut rng = rng(14);
    for _ in 0..200 {
        let res = small_residual(&mut rng);
        let g = build_flow_network(&res);
        let f = solve_min_cost_flow(&g).unwrap();
        let mut balance = vec![0i64; g.n_nodes()];
        for (e, edge) in g.edges.iter().enumerate() {
            assert!((0..=edge.capacity).contains(&f.flow[e]));
            balance[edge.tail] -= f.flow[e];
            balance[edge.head] += f.flow[e];
        }
        assert_eq!(balance[0], -g.supply);
        assert_eq!(balance[g.sink()], g.supply);
        assert!(balance[1..g.sink()].iter().all(|&b| b == 0));
        let s2 = solve_step2(&res).unwrap();
        assert!((f.cost + s2.sum_rate_bps).abs() <= 1e-9 * (1.0 + s2.sum_rate_bps));
    }
}

#[test]
fn baseline_dominance() {
    let mut rng = rng(15);
    for _ in 0..200 {
        let n_ue = rng.random_range(1..=6);
        let n_bs = rng.random_range(1..=3);
        let n_ue_rf = rng.random_range(1..=2);
        let inst = instance_with(&mut rng, n_ue, n_bs, n_ue_rf, 2);
        let msr = metrics(&inst, &max_sum_rate(&inst).unwrap()).sum_rate_bps;
        let mut order: Vec<usize> = (0..inst.n_bs()).collect();
        order.shuffle(&mut rng);
        for greedy in [
            max_snr_default(&inst).unwrap(),
            max_snr(&inst, &order).unwrap(),
        ] {
            assert!(msr + 1e-9 >= metrics(&inst, &greedy).sum_rate_bps);
            let structural = check_feasibility(&inst, &greedy)
                .unwrap()
                .violations
                .iter()
                .all(|v| v.constraint == ConstraintId::RateRequirement);
            assert!(structural);
        }
        for solver in [Step1Solver::default(), Step1Solver::LpRound] {
            let o = run_two_step_detailed(&inst, solver).unwrap();
            assert!(msr + 1e-9 >= metrics(&inst, &o.combined).sum_rate_bps);
            assert!(check_feasibility(&inst, &o.step1).unwrap().feasible);
        }
    }
}

#[test]
fn exact_step1_never_satisfies_fewer_than_rounding() {
    let mut rng = rng(16);
    for _ in 0..200 {
        let n_ue = rng.random_range(2..=7);
        let (n_bs, n_bs_rf) = (rng.random_range(1..=3), rng.random_range(1..=3));
        let inst = instance_with(&mut rng, n_ue, n_bs, 2, n_bs_rf);
        let ex = solve_step1_exact(&inst, DEFAULT_NODE_BUDGET).unwrap();
        let lr = solve_step1_lp_round(&inst).unwrap();
        assert!(metrics(&inst, &ex).n_satisfied >= metrics(&inst, &lr).n_satisfied);
    }
}

#[test]
fn greedy_pinned_example() {
    // BS0 takes UE0 (10 > 9) and leaves BS1 with UE1 at 1.
    let cap = CapacityMatrix::from_rows(&[vec![10.0, 8.0], vec![9.0, 1.0]]).unwrap();
    let inst = AssociationInstance::new(cap, vec![1.0, 1.0], 1, 1).unwrap();
    let greedy = metrics(&inst, &max_snr_default(&inst).unwrap()).sum_rate_bps;
    let joint = metrics(&inst, &max_sum_rate(&inst).unwrap()).sum_rate_bps;
    // Enumerate the two perfect matchings by hand: 10 + 1 and 8 + 9.
    assert_eq!((greedy, joint), (11.0, 17.0));
}
