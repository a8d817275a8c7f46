//! Greedy rounding of the relaxed step-1 optimum.
//!
//! Capacities outside the support of `x*` are masked out. Demand levels
//! `n = 1..=N_UE^RF` are processed in order; at each level the UE that can be
//! satisfied with exactly `n` links and has the largest aggregate capacity
//! over those links is committed, its BS chains are withdrawn from every
//! other UE, and demands are recomputed until no UE is left at that level.

use super::relax::FractionalSolution;
use crate::error::{invalid, Result};
use crate::instance::{meets_requirement, AssociationInstance, AssociationSolution};
use crate::matrix::Matrix;

/// One commitment made by the rounding loop.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundingStep {
    pub demand: usize,
    pub ue: usize,
    pub links: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy)]
struct Link {
    i: usize,
    j: usize,
    c: f64,
}

struct Demand {
    links: Vec<(usize, usize)>,
    aggregate: f64,
}

pub fn round_solution(
    frac: &FractionalSolution,
    inst: &AssociationInstance,
) -> Result<AssociationSolution> {
    round_solution_traced(frac, inst).map(|(s, _)| s)
}

pub fn round_solution_traced(
    frac: &FractionalSolution,
    inst: &AssociationInstance,
) -> Result<(AssociationSolution, Vec<RoundingStep>)> {
    if frac.x_frac.shape() != (inst.n_ue_chains(), inst.n_bs_chains())
        || frac.z_frac.len() != inst.n_ue()
    {
        return invalid("fractional solution does not match instance");
    }

    // Column u of the masked capacity matrix, best link first. Equal
    // capacities keep (UE chain, BS chain) order.
    let columns: Vec<Vec<Link>> = (0..inst.n_ue())
        .map(|u| {
            let mut col: Vec<Link> = inst
                .chains_of_ue(u)
                .iter()
                .flat_map(|&i| (0..inst.n_bs_chains()).map(move |j| (i, j)))
                .filter(|&(i, j)| frac.in_support(i, j) && inst.c(i, j) > 0.0)
                .map(|(i, j)| Link {
                    i,
                    j,
                    c: inst.c(i, j),
                })
                .collect();
            col.sort_by(|a, b| b.c.total_cmp(&a.c));
            col
        })
        .collect();

    let mut bs_free = vec![true; inst.n_bs_chains()];
    let mut associated = vec![false; inst.n_ue()];
    let mut x = Matrix::filled(inst.n_ue_chains(), inst.n_bs_chains(), false);
    let mut trace = Vec::new();

    for n in 1..=inst.n_ue_rf() {
        loop {
            let mut pick: Option<(usize, Demand)> = None;
            for u in (0..inst.n_ue()).filter(|&u| !associated[u]) {
                let Some(d) = demand(&columns[u], &bs_free, inst.rate_req()[u], inst.n_ue_rf())
                else {
                    continue;
                };
                if d.links.len() != n {
                    continue;
                }
                if pick
                    .as_ref()
                    .is_none_or(|(_, best)| d.aggregate > best.aggregate)
                {
                    pick = Some((u, d));
                }
            }
            let Some((u, d)) = pick else { break };
            associated[u] = true;
            for &(i, j) in &d.links {
                x.set(i, j, true);
                bs_free[j] = false;
            }
            trace.push(RoundingStep {
                demand: n,
                ue: u,
                links: d.links,
            });
        }
    }

    let sol = AssociationSolution::new(inst, x, associated)?;
    Ok((sol, trace))
}

/// Fewest best-first links meeting `req`, or `None` when even
/// `max_links` of them fall short. A link is skipped when its UE chain or BS
/// chain is already among the picked ones.
fn demand(col: &[Link], bs_free: &[bool], req: f64, max_links: usize) -> Option<Demand> {
    let mut links: Vec<(usize, usize)> = Vec::with_capacity(max_links);
    let mut aggregate = 0.0;
    for l in col.iter().filter(|l| bs_free[l.j]) {
        if links.len() == max_links {
            break;
        }
        if links.iter().any(|&(i, j)| i == l.i || j == l.j) {
            continue;
        }
        links.push((l.i, l.j));
        aggregate += l.c;
        if meets_requirement(aggregate, req) {
            return Some(Demand { links, aggregate });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::check_feasibility;
    use crate::model::CapacityMatrix;

    fn inst(
        rows: &[Vec<f64>],
        req: Vec<f64>,
        n_ue_rf: usize,
        n_bs_rf: usize,
    ) -> AssociationInstance {
        AssociationInstance::new(
            CapacityMatrix::from_rows(rows).unwrap(),
            req,
            n_ue_rf,
            n_bs_rf,
        )
        .unwrap()
    }

    fn full_support(inst: &AssociationInstance) -> FractionalSolution {
        FractionalSolution {
            x_frac: Matrix::filled(inst.n_ue_chains(), inst.n_bs_chains(), 0.5),
            z_frac: vec![0.5; inst.n_ue()],
            lp_objective: 0.0,
        }
    }

    #[test]
    fn single_link_support() {
        let p = inst(&[vec![3.0, 9.0]], vec![2.0], 1, 2);
        let mut f = full_support(&p);
        f.x_frac.set(0, 1, 0.0);
        let s = round_solution(&f, &p).unwrap();
        assert_eq!(s.z, vec![true]);
        assert!(s.x.get(0, 0) && !s.x.get(0, 1));
    }

    #[test]
    fn empty_support_gives_empty_solution() {
        let p = inst(&[vec![3.0, 9.0]], vec![2.0], 1, 2);
        let f = FractionalSolution {
            x_frac: Matrix::filled(1, 2, 0.0),
            z_frac: vec![0.0],
            lp_objective: 0.0,
        };
        let (s, trace) = round_solution_traced(&f, &p).unwrap();
        assert_eq!(s, AssociationSolution::empty(&p));
        assert!(trace.is_empty());
    }

    #[test]
    fn support_threshold() {
        let p = inst(&[vec![3.0]], vec![2.0], 1, 1);
        let mut f = full_support(&p);
        f.x_frac.set(0, 0, 1e-10);
        assert!(round_solution(&f, &p).unwrap().z == vec![false]);
        f.x_frac.set(0, 0, 1e-8);
        assert!(round_solution(&f, &p).unwrap().z == vec![true]);
    }

    /// UEs A (chains 0,1), B (2,3), C (4,5); one BS with four chains; every
    /// requirement is 10. A and B both rank BS chain 0 first.
    ///
    /// Hand trace with the whole matrix in the support:
    /// level 1: A needs 1 link (12), C needs 1 (11), B needs 2 (9+6).
    ///          A wins on 12, BS chain 0 is withdrawn.
    ///          B now needs 6+5 over chains 1 and 3; C still needs 1 -> C.
    /// level 1 again: nobody at demand 1.
    /// level 2: B commits links (3,1) and (2,3).
    #[test]
    fn golden_schedule() {
        let mut rows = vec![vec![0.0; 4]; 6];
        rows[0][0] = 12.0;
        rows[0][1] = 4.0;
        rows[2][0] = 9.0;
        rows[3][1] = 6.0;
        rows[2][3] = 5.0;
        rows[4][2] = 11.0;
        let p = inst(&rows, vec![10.0; 3], 2, 4);
        let (s, trace) = round_solution_traced(&full_support(&p), &p).unwrap();
        assert_eq!(
            trace,
            vec![
                RoundingStep {
                    demand: 1,
                    ue: 0,
                    links: vec![(0, 0)]
                },
                RoundingStep {
                    demand: 1,
                    ue: 2,
                    links: vec![(4, 2)]
                },
                RoundingStep {
                    demand: 2,
                    ue: 1,
                    links: vec![(3, 1), (2, 3)]
                },
            ]
        );
        assert_eq!(s.z, vec![true, true, true]);
        let ones: Vec<_> = s.x.ones().collect();
        assert_eq!(ones, vec![(0, 0), (2, 3), (3, 1), (4, 2)]);
        assert!(check_feasibility(&p, &s).unwrap().feasible);
    }

    #[test]
    fn never_reuses_a_ue_chain() {
        // Both of the UE's best links sit on UE chain 0.
        let p = inst(&[vec![6.0, 5.0], vec![0.0, 4.0]], vec![10.0], 2, 2);
        let s = round_solution(&full_support(&p), &p).unwrap();
        // 6 on (0,0) plus 4 on (1,1) reaches 10.
        assert!(s.x.get(0, 0) && s.x.get(1, 1));
        assert!(check_feasibility(&p, &s).unwrap().feasible);
    }

    #[test]
    fn ties_go_to_lowest_ue() {
        let p = inst(&[vec![5.0], vec![5.0]], vec![3.0, 3.0], 1, 1);
        let s = round_solution(&full_support(&p), &p).unwrap();
        assert_eq!(s.z, vec![true, false]);
    }
}
