use super::link_weight;
use crate::error::Result;
use crate::instance::AssociationInstance;
use crate::lp::LinearProgram;
use crate::matrix::Matrix;

/// Entries of `x*` above this count as part of the support.
pub const SUPPORT_EPS: f64 = 1e-9;

/// Optimum of the step-1 problem with `x` and `z` relaxed to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalSolution {
    pub x_frac: Matrix<f64>,
    pub z_frac: Vec<f64>,
    pub lp_objective: f64,
}

impl FractionalSolution {
    pub fn in_support(&self, i: usize, j: usize) -> bool {
        self.x_frac.get(i, j) > SUPPORT_EPS
    }
}

/// Variables are `x` in row-major order followed by `z`. The requirement
/// rows are divided by `r_u` to keep coefficients near unity.
pub fn build_relaxation(inst: &AssociationInstance) -> LinearProgram {
    let (n_i, n_j) = (inst.n_ue_chains(), inst.n_bs_chains());
    let x_var = |i: usize, j: usize| i * n_j + j;
    let z_var = |u: usize| n_i * n_j + u;
    let mut lp = LinearProgram::new(n_i * n_j + inst.n_ue());

    for i in 0..n_i {
        let u = inst.ue_of_chain()[i];
        for j in 0..n_j {
            lp.set_objective(
                x_var(i, j),
                -link_weight(inst.c(i, j), inst.rate_req()[u], inst.n_ue_rf()),
            );
        }
    }
    for u in 0..inst.n_ue() {
        lp.set_objective(z_var(u), 1.0);
    }

    let ok = "relaxation rows are well formed";
    for j in 0..n_j {
        lp.add_le((0..n_i).map(|i| (x_var(i, j), 1.0)).collect(), 1.0)
            .expect(ok);
    }
    for i in 0..n_i {
        lp.add_le((0..n_j).map(|j| (x_var(i, j), 1.0)).collect(), 1.0)
            .expect(ok);
    }
    for b in 0..inst.n_bs() {
        let row = inst
            .chains_of_bs(b)
            .iter()
            .flat_map(|&j| (0..n_i).map(move |i| (x_var(i, j), 1.0)))
            .collect();
        lp.add_le(row, inst.n_bs_rf() as f64).expect(ok);
    }
    for u in 0..inst.n_ue() {
        let chains = inst.chains_of_ue(u);
        let mut budget: Vec<_> = chains
            .iter()
            .flat_map(|&i| (0..n_j).map(move |j| (x_var(i, j), 1.0)))
            .collect();
        budget.push((z_var(u), -(inst.n_ue_rf() as f64)));
        lp.add_le(budget, 0.0).expect(ok);

        let r = inst.rate_req()[u];
        let mut rate: Vec<_> = chains
            .iter()
            .flat_map(|&i| (0..n_j).map(move |j| (x_var(i, j), -inst.c(i, j) / r)))
            .collect();
        rate.push((z_var(u), 1.0));
        lp.add_le(rate, 0.0).expect(ok);
    }
    lp
}

pub fn solve_step1_lp(inst: &AssociationInstance) -> Result<FractionalSolution> {
    let lp = build_relaxation(inst);
    let sol = lp.solve()?;
    let (n_i, n_j) = (inst.n_ue_chains(), inst.n_bs_chains());
    let x_frac = Matrix::from_vec(n_i, n_j, sol.x[..n_i * n_j].to_vec()).expect("sized");
    Ok(FractionalSolution {
        x_frac,
        z_frac: sol.x[n_i * n_j..].to_vec(),
        lp_objective: sol.objective,
    })
}
