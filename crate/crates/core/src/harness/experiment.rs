use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{solve_scheme, Scheme};
use crate::error::{invalid, Error, Result};
use crate::instance::{metrics, AssociationInstance};
use crate::model::{sample_scenario, ScenarioConfig};
use crate::rng::derive_seed;
use crate::step1::DEFAULT_NODE_BUDGET;

/// A Monte Carlo sweep over the maximum rate requirement.
///
/// Loaded from TOML with the scenario under a `[base]` table; every other
/// key has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub base: ScenarioConfig,
    #[serde(default = "default_schemes")]
    pub schemes: Vec<Scheme>,
    #[serde(default = "default_runs")]
    pub n_runs: usize,
    #[serde(default = "default_sweep")]
    pub r_max_sweep: Vec<f64>,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default = "default_budget")]
    pub exact_node_budget: u64,
    /// Fill `wall_time_ms`. Off by default so that output depends on the
    /// experiment definition alone.
    #[serde(default)]
    pub record_timing: bool,
}

fn default_schemes() -> Vec<Scheme> {
    Scheme::ALL.to_vec()
}

fn default_runs() -> usize {
    30
}

fn default_sweep() -> Vec<f64> {
    vec![0.5e9, 1e9, 2e9, 4e9, 8e9]
}

fn default_budget() -> u64 {
    DEFAULT_NODE_BUDGET
}

impl ExperimentSpec {
    pub fn new(base: ScenarioConfig) -> Self {
        Self {
            base,
            schemes: default_schemes(),
            n_runs: default_runs(),
            r_max_sweep: default_sweep(),
            output_path: None,
            exact_node_budget: default_budget(),
            record_timing: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_runs == 0 {
            return invalid("n_runs must be at least 1");
        }
        if self.schemes.is_empty() {
            return invalid("no schemes selected");
        }
        for (k, s) in self.schemes.iter().enumerate() {
            if self.schemes[..k].contains(s) {
                return invalid(format!("scheme {s} listed twice"));
            }
        }
        if self.r_max_sweep.is_empty() {
            return invalid("r_max_sweep is empty");
        }
        for &r in &self.r_max_sweep {
            self.cell_config(0, r).validate()?;
        }
        Ok(())
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let spec: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// Scenario for one `(run, r_max)` cell. Its seed depends only on the
    /// base seed, the run index and the bits of `r_max`.
    pub fn cell_config(&self, run_id: usize, r_max: f64) -> ScenarioConfig {
        let mut cfg = self.base.clone();
        cfg.r_max_bps = r_max;
        cfg.seed = derive_seed(self.base.seed, &[run_id as u64, r_max.to_bits()]);
        cfg
    }

    pub fn cell_instance(&self, run_id: usize, r_max: f64) -> Result<AssociationInstance> {
        let cfg = self.cell_config(run_id, r_max);
        AssociationInstance::from_scenario(&sample_scenario(&cfg)?, &cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Ok,
    /// The exact step-1 search hit its node budget; the record reflects
    /// the best solution found before that.
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: usize,
    pub r_max: f64,
    pub scheme: Scheme,
    pub n_associated: usize,
    pub n_satisfied: usize,
    pub sum_rate_bps: f64,
    pub rf_chains_used_step1: usize,
    pub wall_time_ms: Option<f64>,
    pub status: RunStatus,
}

/// Every scheme on every `(run, r_max)` cell, all schemes of a cell sharing
/// one realization. Cells run in parallel; records come back ordered by
/// run, then sweep position, then scheme position in the spec.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<RunRecord>> {
    spec.validate()?;
    let cells: Vec<(usize, f64)> = (0..spec.n_runs)
        .flat_map(|run| spec.r_max_sweep.iter().map(move |&r| (run, r)))
        .collect();
    let per_cell = cells
        .par_iter()
        .map(|&(run_id, r_max)| run_cell(spec, run_id, r_max))
        .collect::<Result<Vec<_>>>()?;
    Ok(per_cell.into_iter().flatten().collect())
}

fn run_cell(spec: &ExperimentSpec, run_id: usize, r_max: f64) -> Result<Vec<RunRecord>> {
    let inst = spec.cell_instance(run_id, r_max)?;
    spec.schemes
        .iter()
        .map(|&scheme| {
            let start = Instant::now();
            let out = solve_scheme(&inst, scheme, spec.exact_node_budget)?;
            let elapsed = start.elapsed().as_secs_f64() * 1e3;
            let m = metrics(&inst, &out.solution);
            Ok(RunRecord {
                run_id,
                r_max,
                scheme,
                n_associated: m.n_associated,
                n_satisfied: m.n_satisfied,
                sum_rate_bps: m.sum_rate_bps,
                rf_chains_used_step1: out.rf_chains_used_step1,
                wall_time_ms: spec.record_timing.then_some(elapsed),
                status: out.status,
            })
        })
        .collect()
}
