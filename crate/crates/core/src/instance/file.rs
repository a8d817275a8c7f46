use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AssociationInstance, AssociationSolution, Metrics};
use crate::error::{invalid, Result};
use crate::matrix::Matrix;
use crate::model::CapacityMatrix;

/// On-disk form of an [`AssociationInstance`].
///
/// `capacity` holds one row per UE RF chain in bps; the ownership maps give
/// the owning UE of every UE RF chain and the owning BS of every BS RF chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n_ue: usize,
    pub n_bs: usize,
    pub n_ue_rf: usize,
    pub n_bs_rf: usize,
    pub capacity: Vec<Vec<f64>>,
    pub rate_req: Vec<f64>,
    pub ue_of_chain: Vec<usize>,
    pub bs_of_chain: Vec<usize>,
}

impl From<&AssociationInstance> for InstanceFile {
    fn from(inst: &AssociationInstance) -> Self {
        Self {
            n_ue: inst.n_ue(),
            n_bs: inst.n_bs(),
            n_ue_rf: inst.n_ue_rf(),
            n_bs_rf: inst.n_bs_rf(),
            capacity: inst.capacity().to_rows(),
            rate_req: inst.rate_req().to_vec(),
            ue_of_chain: inst.ue_of_chain().to_vec(),
            bs_of_chain: inst.bs_of_chain().to_vec(),
        }
    }
}

impl TryFrom<InstanceFile> for AssociationInstance {
    type Error = crate::Error;

    fn try_from(f: InstanceFile) -> Result<Self> {
        let inst = AssociationInstance::with_ownership(
            CapacityMatrix::from_rows(&f.capacity)?,
            f.rate_req,
            f.n_ue_rf,
            f.n_bs_rf,
            f.ue_of_chain,
            f.bs_of_chain,
        )?;
        if inst.n_ue() != f.n_ue || inst.n_bs() != f.n_bs {
            return invalid(format!(
                "declared {} UEs / {} BSs but data implies {} / {}",
                f.n_ue,
                f.n_bs,
                inst.n_ue(),
                inst.n_bs()
            ));
        }
        Ok(inst)
    }
}

impl AssociationInstance {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&InstanceFile::from(self)).expect("plain data")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str::<InstanceFile>(s)?.try_into()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

/// The instance schema extended with a solution and its metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    #[serde(flatten)]
    pub instance: InstanceFile,
    pub scheme: String,
    pub x: Vec<Vec<u8>>,
    pub z: Vec<u8>,
    pub per_ue_rate: Vec<f64>,
    pub metrics: Metrics,
    pub objective_step1: Option<f64>,
}

impl SolutionFile {
    pub fn new(inst: &AssociationInstance, scheme: &str, sol: &AssociationSolution) -> Self {
        Self {
            instance: inst.into(),
            scheme: scheme.to_string(),
            x: sol
                .x
                .to_rows()
                .into_iter()
                .map(|r| r.into_iter().map(u8::from).collect())
                .collect(),
            z: sol.z.iter().map(|&b| u8::from(b)).collect(),
            per_ue_rate: sol.per_ue_rate.clone(),
            metrics: super::metrics(inst, sol),
            objective_step1: None,
        }
    }

    /// Rebuilds the instance and solution; rates are recomputed.
    pub fn into_parts(self) -> Result<(AssociationInstance, AssociationSolution)> {
        let inst = AssociationInstance::try_from(self.instance)?;
        let rows: Vec<Vec<bool>> = self
            .x
            .iter()
            .map(|r| r.iter().map(|&v| v != 0).collect())
            .collect();
        let x = Matrix::from_rows(&rows)
            .ok_or_else(|| crate::Error::InvalidArgument("ragged x".into()))?;
        let z = self.z.iter().map(|&v| v != 0).collect();
        let sol = AssociationSolution::new(&inst, x, z)?;
        Ok((inst, sol))
    }
}
