//! Instance fixtures shared by the criterion benchmarks.

use mmassoc::{sample_scenario, AssociationInstance, ScenarioConfig};

/// Desk-scale instance (3 BSs, 10 UEs) drawn with the given seed.
pub fn desk_instance(seed: u64) -> AssociationInstance {
    let mut cfg = ScenarioConfig::desk();
    cfg.seed = seed;
    scenario_instance(&cfg)
}

/// Full-size instance (5 BSs, 30 UEs) drawn with the given seed.
pub fn full_scale_instance(seed: u64) -> AssociationInstance {
    let mut cfg = ScenarioConfig::full();
    cfg.seed = seed;
    scenario_instance(&cfg)
}

fn scenario_instance(cfg: &ScenarioConfig) -> AssociationInstance {
    let real = sample_scenario(cfg).expect("valid preset");
    AssociationInstance::from_scenario(&real, cfg).expect("valid preset")
}
