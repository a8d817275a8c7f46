//! Scheme dispatch, the combined two-step solver and Monte Carlo sweeps.

mod experiment;
mod output;

pub use experiment::{run_experiment, ExperimentSpec, RunRecord, RunStatus};
pub use output::{
    aggregate, emit_results, read_records_csv, read_records_json, Aggregate, EmittedFiles,
    OutputFormat,
};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::{max_snr_default, max_sum_rate};
use crate::error::{Error, Result};
use crate::instance::{AssociationInstance, AssociationSolution};
use crate::step1::{solve_step1_exact, solve_step1_lp_round, DEFAULT_NODE_BUDGET};
use crate::step2flow::{solve_step2, ResidualInstance, Step2Solution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    TwoStepExact,
    TwoStepProposed,
    MaxSumRate,
    MaxSnr,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::TwoStepExact,
        Scheme::TwoStepProposed,
        Scheme::MaxSumRate,
        Scheme::MaxSnr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::TwoStepExact => "two-step-exact",
            Scheme::TwoStepProposed => "two-step-proposed",
            Scheme::MaxSumRate => "max-sum-rate",
            Scheme::MaxSnr => "max-snr",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Scheme::ALL.iter().map(|k| k.name()).collect();
                Error::InvalidArgument(format!(
                    "unknown scheme `{s}`, expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step1Solver {
    Exact { node_budget: u64 },
    LpRound,
}

impl Default for Step1Solver {
    fn default() -> Self {
        Step1Solver::Exact {
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

/// Both stages of a two-step solve and their union.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoStepOutcome {
    pub step1: AssociationSolution,
    pub residual: ResidualInstance,
    pub step2: Step2Solution,
    pub combined: AssociationSolution,
}

/// Step 1, then step 2 on what is left, merged into one solution.
pub fn run_two_step(
    inst: &AssociationInstance,
    solver: Step1Solver,
) -> Result<AssociationSolution> {
    run_two_step_detailed(inst, solver).map(|o| o.combined)
}

pub fn run_two_step_detailed(
    inst: &AssociationInstance,
    solver: Step1Solver,
) -> Result<TwoStepOutcome> {
    let step1 = match solver {
        Step1Solver::Exact { node_budget } => solve_step1_exact(inst, node_budget)?,
        Step1Solver::LpRound => solve_step1_lp_round(inst)?,
    };
    complete_two_step(inst, step1)
}

/// Runs step 2 after a given step-1 solution and merges the two.
pub fn complete_two_step(
    inst: &AssociationInstance,
    step1: AssociationSolution,
) -> Result<TwoStepOutcome> {
    let residual = ResidualInstance::after_step1(inst, &step1)?;
    let step2 = solve_step2(&residual)?;
    let mut x = step2.lift(&residual, inst);
    for (i, j) in step1.x.ones() {
        x.set(i, j, true);
    }
    let combined = AssociationSolution::from_links(inst, x)?;
    Ok(TwoStepOutcome {
        step1,
        residual,
        step2,
        combined,
    })
}

/// Result of running one scheme on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeOutcome {
    pub solution: AssociationSolution,
    /// Links placed by step 1. For single-step schemes, every link.
    pub rf_chains_used_step1: usize,
    pub status: RunStatus,
    /// The problem handed to the flow solver, for schemes that use one.
    pub residual: Option<ResidualInstance>,
}

/// Runs `scheme`. An exhausted exact search is not an error here: its
/// incumbent goes through step 2 and the outcome is flagged.
pub fn solve_scheme(
    inst: &AssociationInstance,
    scheme: Scheme,
    node_budget: u64,
) -> Result<SchemeOutcome> {
    let single = |solution: AssociationSolution, residual| SchemeOutcome {
        rf_chains_used_step1: solution.n_links(),
        solution,
        status: RunStatus::Ok,
        residual,
    };
    match scheme {
        Scheme::MaxSumRate => Ok(single(
            max_sum_rate(inst)?,
            Some(ResidualInstance::full(inst)),
        )),
        Scheme::MaxSnr => Ok(single(max_snr_default(inst)?, None)),
        Scheme::TwoStepProposed => {
            let o = run_two_step_detailed(inst, Step1Solver::LpRound)?;
            Ok(SchemeOutcome {
                rf_chains_used_step1: o.step1.n_links(),
                solution: o.combined,
                status: RunStatus::Ok,
                residual: Some(o.residual),
            })
        }
        Scheme::TwoStepExact => {
            let (step1, status) = match solve_step1_exact(inst, node_budget) {
                Ok(s) => (s, RunStatus::Ok),
                Err(Error::BudgetExhausted { incumbent, .. }) => {
                    (*incumbent, RunStatus::BudgetExhausted)
                }
                Err(e) => return Err(e),
            };
            let o = complete_two_step(inst, step1)?;
            Ok(SchemeOutcome {
                rf_chains_used_step1: o.step1.n_links(),
                solution: o.combined,
                status,
                residual: Some(o.residual),
            })
        }
    }
}
