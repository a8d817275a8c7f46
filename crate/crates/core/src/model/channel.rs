use std::f64::consts::PI;

use num_complex::Complex64;

use super::config::{PathLossModel, PowerSplitMode, ScenarioConfig};
use crate::error::{invalid, Result};

/// Distances below this are clamped before evaluating path loss.
pub const MIN_DISTANCE_M: f64 = 1.0;

/// Unit-norm ULA response with half-wavelength spacing: element `k` is
/// `exp(-j*pi*k*sin(angle)) / sqrt(n)`.
pub fn steering_vector(angle: f64, n: usize) -> Result<Vec<Complex64>> {
    if n == 0 {
        return invalid("steering vector needs at least one element");
    }
    if !angle.is_finite() {
        return invalid(format!("steering angle must be finite, got {angle}"));
    }
    let norm = (n as f64).sqrt().recip();
    let phase = -PI * angle.sin();
    Ok((0..n)
        .map(|k| Complex64::from_polar(norm, phase * k as f64))
        .collect())
}

/// `|a(est)^H a(true)|^2`, the fraction of the full array gain kept when
/// steering toward `est_angle` while the path arrives from `true_angle`.
pub fn beamforming_gain(est_angle: f64, true_angle: f64, n: usize) -> Result<f64> {
    let a_est = steering_vector(est_angle, n)?;
    let a_true = steering_vector(true_angle, n)?;
    let inner: Complex64 = a_est.iter().zip(&a_true).map(|(e, t)| e.conj() * t).sum();
    Ok(inner.norm_sqr())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLoss {
    pub db: f64,
    /// The distance was below [`MIN_DISTANCE_M`] and got clamped.
    pub clamped: bool,
}

impl PathLoss {
    pub fn linear_gain(&self) -> f64 {
        10f64.powf(-self.db / 10.0)
    }
}

pub fn path_loss_db(distance_m: f64, carrier_ghz: f64) -> Result<PathLoss> {
    path_loss_with(PathLossModel::UmiLos, distance_m, carrier_ghz)
}

pub(crate) fn path_loss_with(
    model: PathLossModel,
    distance_m: f64,
    carrier_ghz: f64,
) -> Result<PathLoss> {
    if !(carrier_ghz.is_finite() && carrier_ghz > 0.0) {
        return invalid(format!("carrier must be positive, got {carrier_ghz} GHz"));
    }
    if distance_m.is_nan() {
        return invalid("distance is NaN");
    }
    let clamped = distance_m < MIN_DISTANCE_M;
    let d = distance_m.max(MIN_DISTANCE_M);
    let db = match model {
        PathLossModel::UmiLos => 32.4 + 21.0 * d.log10() + 20.0 * carrier_ghz.log10(),
        PathLossModel::FreeSpace => 32.45 + 20.0 * d.log10() + 20.0 * carrier_ghz.log10(),
    };
    Ok(PathLoss { db, clamped })
}

/// Shannon capacity in bps of one RF-chain link.
///
/// `path_gain` is the linear large-scale gain of the BS-UE pair; `gain_ue`
/// and `gain_bs` are the normalized beamforming gains at either end.
pub fn link_capacity(path_gain: f64, gain_ue: f64, gain_bs: f64, cfg: &ScenarioConfig) -> f64 {
    let n_rf = cfg.n_bs_rf as f64;
    let tx = match cfg.power_split_mode {
        PowerSplitMode::AmplitudeSplit => cfg.tx_power_w() / (n_rf * n_rf),
        PowerSplitMode::EvenSplit => cfg.tx_power_w() / n_rf,
    };
    let array_gain = (cfg.n_ue_ant * cfg.n_bs_ant) as f64;
    let snr =
        tx * path_gain * array_gain * gain_ue * gain_bs / (cfg.bandwidth_hz * cfg.noise_psd_w_hz());
    cfg.bandwidth_hz * snr.ln_1p() / std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn steering_broadside_is_flat() {
        let a = steering_vector(0.0, 4).unwrap();
        for e in a {
            assert_relative_eq!(e.re, 0.5, epsilon = 1e-15);
            assert_relative_eq!(e.im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn steering_endfire_alternates() {
        let a = steering_vector(PI / 2.0, 2).unwrap();
        let s = 0.5f64.sqrt();
        assert_relative_eq!(a[0].re, s, epsilon = 1e-15);
        assert_relative_eq!(a[1].re, -s, epsilon = 1e-15);
        assert!(a[1].im.abs() < 1e-15);
    }

    #[test]
    fn steering_thirty_degrees_quarter_turns() {
        let a = steering_vector(PI / 6.0, 8).unwrap();
        let s = 8f64.sqrt().recip();
        for (k, e) in a.iter().enumerate() {
            let expected = Complex64::from_polar(s, -PI * k as f64 / 2.0);
            assert!((e - expected).norm() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn zero_elements_rejected() {
        assert!(steering_vector(0.1, 0).is_err());
        assert!(beamforming_gain(0.1, 0.1, 0).is_err());
        assert!(steering_vector(f64::NAN, 3).is_err());
    }

    #[test]
    fn orthogonal_two_element_beams() {
        let g = beamforming_gain(PI / 2.0, 0.0, 2).unwrap();
        assert!(g.abs() < 1e-15);
    }

    #[test]
    fn two_degree_mispointing_on_eight_elements() {
        // 8-term geometric phase series, summed in Python.
        let g = beamforming_gain(2f64.to_radians(), 0.0, 8).unwrap();
        assert_relative_eq!(g, 0.9384498076220289, max_relative = 1e-12);
    }

    #[test]
    fn path_loss_values() {
        assert_relative_eq!(path_loss_db(1.0, 1.0).unwrap().db, 32.4, epsilon = 1e-12);
        assert_relative_eq!(
            path_loss_db(100.0, 28.0).unwrap().db,
            103.3431606268444,
            epsilon = 1e-9
        );
        assert_relative_eq!(
            path_loss_db(200.0, 28.0).unwrap().db,
            109.664790535788,
            epsilon = 1e-9
        );
    }

    #[test]
    fn path_loss_clamps_short_distances() {
        let pl = path_loss_db(0.0, 28.0).unwrap();
        assert!(pl.clamped);
        assert_eq!(pl.db, path_loss_db(1.0, 28.0).unwrap().db);
        assert!(path_loss_db(-5.0, 28.0).unwrap().clamped);
        assert!(!path_loss_db(1.0, 28.0).unwrap().clamped);
        assert!(path_loss_db(10.0, 0.0).is_err());
    }

    #[test]
    fn capacity_trivial_points() {
        let cfg = ScenarioConfig::full();
        assert_eq!(link_capacity(0.0, 1.0, 1.0, &cfg), 0.0);
        assert_eq!(link_capacity(1.0, 0.0, 1.0, &cfg), 0.0);
        // Pick a path gain that makes the SNR exactly one.
        let unit = cfg.bandwidth_hz * cfg.noise_psd_w_hz() * 25.0 / (cfg.tx_power_w() * 256.0);
        assert_relative_eq!(
            link_capacity(unit, 1.0, 1.0, &cfg),
            2e8,
            max_relative = 1e-12
        );
    }

    #[test]
    fn capacity_at_hundred_meters() {
        // Hand calculation: PL 103.343 dB, SNR 595.60, 200 MHz.
        let cfg = ScenarioConfig::full();
        let g = path_loss_db(100.0, 28.0).unwrap().linear_gain();
        assert_relative_eq!(
            link_capacity(g, 1.0, 1.0, &cfg),
            1844123508.9815361,
            max_relative = 1e-10
        );
        let even = ScenarioConfig {
            power_split_mode: PowerSplitMode::EvenSplit,
            ..cfg
        };
        assert_relative_eq!(
            link_capacity(g, 1.0, 1.0, &even),
            2308121956.4375973,
            max_relative = 1e-10
        );
    }

    proptest! {
        #[test]
        fn steering_is_unit_norm(angle in -10.0f64..10.0, n in 1usize..=256) {
            let a = steering_vector(angle, n).unwrap();
            let norm: f64 = a.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
            prop_assert!((norm - 1.0).abs() < 1e-12);
        }

        #[test]
        fn self_gain_is_one(angle in -10.0f64..10.0, n in 1usize..=256) {
            let g = beamforming_gain(angle, angle, n).unwrap();
            prop_assert!((g - 1.0).abs() < 1e-12);
        }

        #[test]
        fn gain_is_bounded(a in -4.0f64..4.0, b in -4.0f64..4.0, n in 1usize..=128) {
            let g = beamforming_gain(a, b, n).unwrap();
            prop_assert!((0.0..=1.0 + 1e-12).contains(&g));
        }

        #[test]
        fn path_loss_monotone(d in 1.0f64..5000.0, step in 0.001f64..100.0) {
            let near = path_loss_db(d, 28.0).unwrap().db;
            let far = path_loss_db(d + step, 28.0).unwrap().db;
            prop_assert!(far > near);
        }

        #[test]
        fn capacity_monotone(
            pg in 1e-14f64..1e-8, gu in 0.0f64..1.0, gb in 0.0f64..1.0, bump in 0.0f64..0.5
        ) {
            let cfg = ScenarioConfig::full();
            let base = link_capacity(pg, gu, gb, &cfg);
            prop_assert!(link_capacity(pg * (1.0 + bump), gu, gb, &cfg) >= base);
            prop_assert!(link_capacity(pg, (gu + bump).min(1.0), gb, &cfg) >= base);
            prop_assert!(link_capacity(pg, gu, (gb + bump).min(1.0), &cfg) >= base);
        }
    }
}
