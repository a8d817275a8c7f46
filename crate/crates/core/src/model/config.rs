use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the BS transmit power enters the per-link SNR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PowerSplitMode {
    /// `sqrt(P_t) / N_BS^RF` inside the squared magnitude, i.e. an effective
    /// per-link power of `P_t / (N_BS^RF)^2`.
    #[default]
    AmplitudeSplit,
    /// Even split across BS RF chains: `P_t / N_BS^RF`.
    EvenSplit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathLossModel {
    /// `32.4 + 21 log10(d) + 20 log10(f_GHz)`, LOS only, no shadowing.
    #[default]
    UmiLos,
    /// Friis free-space loss, `32.45 + 20 log10(d) + 20 log10(f_GHz)`.
    FreeSpace,
}

/// Every generative parameter of a scenario.
///
/// Serialized as a flat `key = value` file whose keys are exactly the field
/// names below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n_bs: usize,
    pub n_ue: usize,
    /// Distance between neighbouring BSs on the layout grid.
    pub bs_spacing: f64,
    pub n_bs_rf: usize,
    pub n_ue_rf: usize,
    /// Antenna elements per BS RF chain.
    pub n_bs_ant: usize,
    /// Antenna elements per UE RF chain.
    pub n_ue_ant: usize,
    pub tx_power_dbm: f64,
    pub noise_psd_dbm_hz: f64,
    pub bandwidth_hz: f64,
    #[serde(default = "default_carrier")]
    pub carrier_ghz: f64,
    pub r_min_bps: f64,
    pub r_max_bps: f64,
    pub sigma_aod_deg: f64,
    pub sigma_aoa_deg: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub power_split_mode: PowerSplitMode,
    #[serde(default)]
    pub path_loss_model: PathLossModel,
}

fn default_carrier() -> f64 {
    28.0
}

impl ScenarioConfig {
    /// Full-size evaluation scenario: 5 BSs, 30 UEs, 200 m spacing.
    pub fn full() -> Self {
        Self {
            n_bs: 5,
            n_ue: 30,
            bs_spacing: 200.0,
            n_bs_rf: 5,
            n_ue_rf: 2,
            n_bs_ant: 32,
            n_ue_ant: 8,
            tx_power_dbm: 30.0,
            noise_psd_dbm_hz: -174.0,
            bandwidth_hz: 200e6,
            carrier_ghz: 28.0,
            r_min_bps: 0.3e9,
            r_max_bps: 2e9,
            sigma_aod_deg: 1.0,
            sigma_aoa_deg: 3.0,
            seed: 0,
            power_split_mode: PowerSplitMode::AmplitudeSplit,
            path_loss_model: PathLossModel::UmiLos,
        }
    }

    /// Reduced scenario (3 BSs, 10 UEs) where the exact step-1 solver is
    /// still fast.
    pub fn desk() -> Self {
        Self {
            n_bs: 3,
            n_ue: 10,
            ..Self::full()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("n_bs", self.n_bs),
            ("n_ue", self.n_ue),
            ("n_bs_rf", self.n_bs_rf),
            ("n_ue_rf", self.n_ue_rf),
            ("n_bs_ant", self.n_bs_ant),
            ("n_ue_ant", self.n_ue_ant),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be at least 1")));
            }
        }
        let positive = [
            ("bandwidth_hz", self.bandwidth_hz),
            ("bs_spacing", self.bs_spacing),
            ("carrier_ghz", self.carrier_ghz),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [
            ("tx_power_dbm", self.tx_power_dbm),
            ("noise_psd_dbm_hz", self.noise_psd_dbm_hz),
        ] {
            if !v.is_finite() {
                return Err(Error::Config(format!("{name} must be finite")));
            }
        }
        if !(self.r_min_bps.is_finite() && self.r_min_bps > 0.0) {
            return Err(Error::Config("r_min_bps must be positive".into()));
        }
        if !(self.r_max_bps.is_finite() && self.r_min_bps <= self.r_max_bps) {
            return Err(Error::Config(format!(
                "r_min_bps ({}) must not exceed r_max_bps ({})",
                self.r_min_bps, self.r_max_bps
            )));
        }
        for (name, v) in [
            ("sigma_aod_deg", self.sigma_aod_deg),
            ("sigma_aoa_deg", self.sigma_aoa_deg),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!("{name} must be non-negative")));
            }
        }
        Ok(())
    }

    pub fn n_ue_chains(&self) -> usize {
        self.n_ue * self.n_ue_rf
    }

    pub fn n_bs_chains(&self) -> usize {
        self.n_bs * self.n_bs_rf
    }

    pub fn tx_power_w(&self) -> f64 {
        dbm_to_w(self.tx_power_dbm)
    }

    pub fn noise_psd_w_hz(&self) -> f64 {
        dbm_to_w(self.noise_psd_dbm_hz)
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("flat config always serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }
}

fn dbm_to_w(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}
