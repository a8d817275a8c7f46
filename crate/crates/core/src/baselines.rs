//! Single-step comparison schemes. Neither looks at rate requirements.

use crate::error::{invalid, Result};
use crate::instance::{AssociationInstance, AssociationSolution};
use crate::matrix::Matrix;
use crate::step2flow::{solve_step2, ResidualInstance};

/// Sum-rate-optimal assignment of every BS chain over every UE.
pub fn max_sum_rate(inst: &AssociationInstance) -> Result<AssociationSolution> {
    let res = ResidualInstance::full(inst);
    let step2 = solve_step2(&res)?;
    AssociationSolution::from_links(inst, step2.lift(&res, inst))
}

/// Greedy per-BS allocation: BSs are visited in `bs_order`, and each of a
/// BS's chains in turn takes the free UE chain with the highest capacity
/// to it. Capacity stands in for SNR since bandwidth is shared. Ties go to
/// the lower UE chain index; zero-capacity pairs are never formed.
pub fn max_snr(inst: &AssociationInstance, bs_order: &[usize]) -> Result<AssociationSolution> {
    let mut seen = vec![false; inst.n_bs()];
    if bs_order.len() != inst.n_bs()
        || bs_order
            .iter()
            .any(|&b| b >= inst.n_bs() || std::mem::replace(&mut seen[b], true))
    {
        return invalid(format!(
            "{bs_order:?} is not a permutation of 0..{}",
            inst.n_bs()
        ));
    }
    let mut x = Matrix::filled(inst.n_ue_chains(), inst.n_bs_chains(), false);
    let mut taken = vec![false; inst.n_ue_chains()];
    for &b in bs_order {
        for &j in inst.chains_of_bs(b) {
            let best = (0..inst.n_ue_chains())
                .filter(|&i| !taken[i] && inst.c(i, j) > 0.0)
                .fold(None, |best: Option<usize>, i| match best {
                    Some(k) if inst.c(k, j) >= inst.c(i, j) => Some(k),
                    _ => Some(i),
                });
            if let Some(i) = best {
                taken[i] = true;
                x.set(i, j, true);
            }
        }
    }
    AssociationSolution::from_links(inst, x)
}

/// [`max_snr`] visiting BSs in ascending index order.
pub fn max_snr_default(inst: &AssociationInstance) -> Result<AssociationSolution> {
    let order: Vec<usize> = (0..inst.n_bs()).collect();
    max_snr(inst, &order)
}
