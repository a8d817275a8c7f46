//! Step 1: associate as many UEs as possible with their rate requirement met,
//! using the fewest BS RF chains.
//!
//! The scalarized objective rewards each associated UE with 1 and charges
//! every link `1 / (N_UE^RF + 1 + c_ij / r_u)`, so stronger links relative to
//! the UE's own requirement cost less.

mod exact;
mod relax;
mod rounding;

pub use exact::{solve_step1_exact, solve_step1_exact_stats, ExactStats, DEFAULT_NODE_BUDGET};
pub use relax::{build_relaxation, solve_step1_lp, FractionalSolution, SUPPORT_EPS};
pub use rounding::{round_solution, round_solution_traced, RoundingStep};

use crate::error::{invalid, Result};
use crate::instance::{AssociationInstance, AssociationSolution};

/// Per-link cost in the step-1 objective.
pub fn weight_term(c_ij: f64, r_u: f64, n_ue_rf: usize) -> Result<f64> {
    if r_u.is_nan() || r_u <= 0.0 {
        return invalid(format!("rate requirement must be positive, got {r_u}"));
    }
    if c_ij.is_nan() || c_ij < 0.0 {
        return invalid(format!("capacity must be non-negative, got {c_ij}"));
    }
    Ok(link_weight(c_ij, r_u, n_ue_rf))
}

#[inline]
pub(crate) fn link_weight(c_ij: f64, r_u: f64, n_ue_rf: usize) -> f64 {
    1.0 / (n_ue_rf as f64 + 1.0 + c_ij / r_u)
}

/// Weights of the two-criterion scalarization `lambda1 F1 + lambda2 F2`,
/// where `F1` counts associated UEs and `F2` is minus the number of links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarWeights {
    pub lambda1: f64,
    pub lambda2: f64,
}

impl ScalarWeights {
    /// `lambda1 = 1`, `lambda2 = 1 / (N_UE^RF + 1)`.
    pub fn standard(n_ue_rf: usize) -> Self {
        Self {
            lambda1: 1.0,
            lambda2: 1.0 / (n_ue_rf as f64 + 1.0),
        }
    }

    pub fn evaluate(&self, sol: &AssociationSolution) -> f64 {
        let f1 = sol.z.iter().filter(|&&z| z).count() as f64;
        let f2 = -(sol.n_links() as f64);
        self.lambda1 * f1 + self.lambda2 * f2
    }
}

/// Open interval of `lambda2` (with `lambda1 = 1`) for which the
/// scalarization maximizes the associated count with the fewest links.
pub fn optimal_weight_range(n_ue_rf: usize) -> Result<(f64, f64)> {
    if n_ue_rf == 0 {
        return invalid("n_ue_rf must be at least 1");
    }
    Ok((0.0, 1.0 / n_ue_rf as f64))
}

/// LP relaxation followed by greedy rounding.
pub fn solve_step1_lp_round(inst: &AssociationInstance) -> Result<AssociationSolution> {
    let frac = solve_step1_lp(inst)?;
    round_solution(&frac, inst)
}
