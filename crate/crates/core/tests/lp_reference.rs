//! LP optima on generated scenarios, checked against values that HiGHS
//! produced for the same instances.

use mmassoc::step1::solve_step1_lp;
use mmassoc::step2flow::{build_step2_relaxation, ResidualInstance};
use mmassoc::{sample_scenario, AssociationInstance, ScenarioConfig};

fn instance(mut cfg: ScenarioConfig, seed: u64) -> AssociationInstance {
    cfg.seed = seed;
    AssociationInstance::from_scenario(&sample_scenario(&cfg).unwrap(), &cfg).unwrap()
}

/// (full-size?, seed, step-1 relaxation optimum, step-2 relaxation optimum
/// with capacities scaled by their maximum)
const REFERENCE: [(bool, u64, f64, f64); 4] = [
    (true, 0, 26.89492530507522, 21.181821358176375),
    (false, 1, 8.712770581594654, 12.53182301262803),
    (true, 2, 25.583660639428025, 19.387443952400137),
    (false, 3, 8.631708517674895, 9.29326823503379),
];

#[test]
fn relaxation_optima_match_reference_solver() {
    for (full, seed, step1, step2) in REFERENCE {
        let cfg = if full {
            ScenarioConfig::full()
        } else {
            ScenarioConfig::desk()
        };
        let inst = instance(cfg, seed);
        let got1 = solve_step1_lp(&inst).unwrap().lp_objective;
        let got2 = build_step2_relaxation(&ResidualInstance::full(&inst))
            .solve()
            .unwrap()
            .objective;
        assert!(
            (got1 - step1).abs() < 1e-9,
            "seed {seed}: step 1 {got1} vs {step1}"
        );
        assert!(
            (got2 - step2).abs() < 1e-9,
            "seed {seed}: step 2 {got2} vs {step2}"
        );
    }
}
