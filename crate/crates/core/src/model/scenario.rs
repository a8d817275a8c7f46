use std::f64::consts::FRAC_PI_2;
use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use super::channel::{beamforming_gain, link_capacity, path_loss_with};
use super::config::ScenarioConfig;
use crate::error::{invalid, Error, Result};
use crate::matrix::Matrix;
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// One draw of every random quantity in a scenario.
///
/// Angle matrices are indexed `[UE RF chain, BS RF chain]`. `path_gain` is
/// indexed `[UE, BS]` and shared by every RF-chain pair of that device pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRealization {
    pub bs_positions: Vec<Point>,
    pub ue_positions: Vec<Point>,
    pub rate_req: Vec<f64>,
    pub true_aoa: Matrix<f64>,
    pub true_aod: Matrix<f64>,
    pub est_aoa: Matrix<f64>,
    pub est_aod: Matrix<f64>,
    pub path_gain: Matrix<f64>,
    /// `(ue, bs)` pairs whose distance fell below the clamp floor.
    pub clamped_pairs: Vec<(usize, usize)>,
}

/// Link capacities in bps, rows = UE RF chains, columns = BS RF chains.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityMatrix(Matrix<f64>);

impl CapacityMatrix {
    pub fn new(inner: Matrix<f64>) -> Result<Self> {
        if let Some(bad) = inner
            .as_slice()
            .iter()
            .find(|c| !(c.is_finite() && **c >= 0.0))
        {
            return invalid(format!(
                "capacities must be finite and non-negative, got {bad}"
            ));
        }
        Ok(Self(inner))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = Matrix::from_rows(rows)
            .ok_or_else(|| Error::InvalidArgument("ragged capacity rows".into()))?;
        Self::new(m)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }

    pub fn rows(&self) -> usize {
        self.0.rows()
    }

    pub fn cols(&self) -> usize {
        self.0.cols()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.0.row(i)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.0.to_rows()
    }

    pub fn max(&self) -> f64 {
        self.0.as_slice().iter().copied().fold(0.0, f64::max)
    }

    /// CSV with a `ue_chain` column followed by one column per BS RF chain.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["ue_chain".to_string()];
        header.extend((0..self.cols()).map(|j| j.to_string()));
        w.write_record(&header)?;
        for i in 0..self.rows() {
            let mut rec = vec![i.to_string()];
            rec.extend(self.row(i).iter().map(|c| c.to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Rows and columns of the BS grid: the most square factorization of `n_bs`.
pub fn bs_grid_shape(n_bs: usize) -> (usize, usize) {
    let rows = (1..=n_bs)
        .take_while(|r| r * r <= n_bs)
        .filter(|&r| n_bs.is_multiple_of(r))
        .last()
        .unwrap_or(1);
    (rows, n_bs / rows)
}

fn bs_layout(cfg: &ScenarioConfig) -> Vec<Point> {
    let (_, cols) = bs_grid_shape(cfg.n_bs);
    (0..cfg.n_bs)
        .map(|b| Point {
            x: (b % cols) as f64 * cfg.bs_spacing,
            y: (b / cols) as f64 * cfg.bs_spacing,
        })
        .collect()
}

/// Interval spanned by `n` grid lines; a single line is widened to one
/// spacing centred on it so UEs are not forced onto the BS axis.
fn span(n: usize, spacing: f64) -> (f64, f64) {
    if n <= 1 {
        (-spacing / 2.0, spacing / 2.0)
    } else {
        (0.0, (n - 1) as f64 * spacing)
    }
}

fn uniform_in<R: Rng>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..hi)
    }
}

pub fn sample_scenario(cfg: &ScenarioConfig) -> Result<ScenarioRealization> {
    cfg.validate()?;
    let bs_positions = bs_layout(cfg);
    let (rows, cols) = bs_grid_shape(cfg.n_bs);
    let (x_span, y_span) = (span(cols, cfg.bs_spacing), span(rows, cfg.bs_spacing));

    let mut pos_rng = stream_rng(cfg.seed, Stream::UePositions);
    let ue_positions: Vec<Point> = (0..cfg.n_ue)
        .map(|_| {
            let x = uniform_in(&mut pos_rng, x_span);
            let y = uniform_in(&mut pos_rng, y_span);
            Point { x, y }
        })
        .collect();

    let (n_i, n_j) = (cfg.n_ue_chains(), cfg.n_bs_chains());
    let mut angle_rng = stream_rng(cfg.seed, Stream::TrueAngles);
    let angle = Uniform::new(-FRAC_PI_2, FRAC_PI_2).expect("non-empty range");
    let true_aoa: Vec<f64> = (0..n_i * n_j)
        .map(|_| angle.sample(&mut angle_rng))
        .collect();
    let true_aod: Vec<f64> = (0..n_i * n_j)
        .map(|_| angle.sample(&mut angle_rng))
        .collect();

    let mut err_rng = stream_rng(cfg.seed, Stream::AngleErrors);
    let aoa_err = Normal::new(0.0, cfg.sigma_aoa_deg.to_radians())
        .map_err(|e| Error::Config(e.to_string()))?;
    let aod_err = Normal::new(0.0, cfg.sigma_aod_deg.to_radians())
        .map_err(|e| Error::Config(e.to_string()))?;
    let est_aoa: Vec<f64> = true_aoa
        .iter()
        .map(|t| t + aoa_err.sample(&mut err_rng))
        .collect();
    let est_aod: Vec<f64> = true_aod
        .iter()
        .map(|t| t + aod_err.sample(&mut err_rng))
        .collect();

    let mut req_rng = stream_rng(cfg.seed, Stream::Requirements);
    let rate_req: Vec<f64> = (0..cfg.n_ue)
        .map(|_| {
            if cfg.r_min_bps == cfg.r_max_bps {
                cfg.r_min_bps
            } else {
                req_rng.random_range(cfg.r_min_bps..=cfg.r_max_bps)
            }
        })
        .collect();

    let mut path_gain = Matrix::filled(cfg.n_ue, cfg.n_bs, 0.0);
    let mut clamped_pairs = Vec::new();
    for (u, ue) in ue_positions.iter().enumerate() {
        for (b, bs) in bs_positions.iter().enumerate() {
            let pl = path_loss_with(cfg.path_loss_model, ue.distance(bs), cfg.carrier_ghz)?;
            if pl.clamped {
                clamped_pairs.push((u, b));
            }
            path_gain.set(u, b, pl.linear_gain());
        }
    }

    let mat = |v| Matrix::from_vec(n_i, n_j, v).expect("sized above");
    Ok(ScenarioRealization {
        bs_positions,
        ue_positions,
        rate_req,
        true_aoa: mat(true_aoa),
        true_aod: mat(true_aod),
        est_aoa: mat(est_aoa),
        est_aod: mat(est_aod),
        path_gain,
        clamped_pairs,
    })
}

pub fn build_capacity_matrix(
    real: &ScenarioRealization,
    cfg: &ScenarioConfig,
) -> Result<CapacityMatrix> {
    let (n_i, n_j) = (cfg.n_ue_chains(), cfg.n_bs_chains());
    let angle_shapes = [
        real.true_aoa.shape(),
        real.true_aod.shape(),
        real.est_aoa.shape(),
        real.est_aod.shape(),
    ];
    if angle_shapes.iter().any(|&s| s != (n_i, n_j))
        || real.path_gain.shape() != (cfg.n_ue, cfg.n_bs)
        || real.rate_req.len() != cfg.n_ue
    {
        return invalid(format!(
            "realization does not match a {} x {} chain layout",
            n_i, n_j
        ));
    }
    let mut c = Matrix::filled(n_i, n_j, 0.0);
    for i in 0..n_i {
        let u = i / cfg.n_ue_rf;
        for j in 0..n_j {
            let b = j / cfg.n_bs_rf;
            let g_ue = beamforming_gain(
                real.est_aoa.get(i, j),
                real.true_aoa.get(i, j),
                cfg.n_ue_ant,
            )?;
            let g_bs = beamforming_gain(
                real.est_aod.get(i, j),
                real.true_aod.get(i, j),
                cfg.n_bs_ant,
            )?;
            c.set(
                i,
                j,
                link_capacity(real.path_gain.get(u, b), g_ue, g_bs, cfg),
            );
        }
    }
    CapacityMatrix::new(c)
}
