//! JSON output schemas of the `uhermite` commands.

use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct RootsOut {
    pub n: usize,
    pub sigma2: f64,
    pub angles: Vec<f64>,
    pub enclosure_width: f64,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct DensityOut {
    pub sigma2: f64,
    pub theta: Vec<f64>,
    pub density: Vec<f64>,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct MomentRow {
    pub k: usize,
    pub empirical: f64,
    pub newton_girard: f64,
    pub limit: f64,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct MomentsOut {
    pub n: usize,
    pub sigma2: f64,
    pub rows: Vec<MomentRow>,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct CwZerosOut {
    pub n: usize,
    pub beta: f64,
    pub y: Vec<f64>,
    pub density: Vec<f64>,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct EnergyRow {
    pub n: usize,
    pub re: f64,
    pub im: f64,
    pub error: f64,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct CwEnergyOut {
    pub beta: f64,
    pub h: [f64; 2],
    pub free_energy: [f64; 2],
    pub finite_n: Vec<EnergyRow>,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct HeatflowIn {
    pub coeffs: Vec<f64>,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct HeatflowOut {
    pub times: Vec<f64>,
    pub roots: Vec<Vec<f64>>,
}
