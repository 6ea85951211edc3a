use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::expectation::{random_expectation, ExpectationPair};
use super::extrema::{find_extrema, ExtremumReport, Refiner};
use super::surface::surface_scan;
use super::{Method, Quantity, DEFAULT_NODES};
use crate::error::{Error, Result};
use crate::model::GameModel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SweepQuantity {
    /// Random-game `<P_ns>` / `<P_s>`.
    RandomExpectation { method: Method },
    /// Max and min of a strategy-surface quantity.
    StrategyExtrema {
        quantity: Quantity,
        grid_step: f64,
        nodes: usize,
        refine: bool,
    },
}

impl SweepQuantity {
    /// Extrema of `<P_s>` on a `pi/20` grid with refinement.
    pub fn switch_extrema() -> Self {
        SweepQuantity::StrategyExtrema {
            quantity: Quantity::Switch,
            grid_step: PI / 20.0,
            nodes: DEFAULT_NODES,
            refine: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SweepValues {
    Random(ExpectationPair),
    Extrema {
        max: ExtremumReport,
        min: ExtremumReport,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub p: f64,
    pub values: SweepValues,
}

/// Recomputes `quantity` under the equal-weight channel for every `p`.
pub fn noise_sweep(
    quantity: &SweepQuantity,
    p_grid: &[f64],
    entangled: bool,
) -> Result<Vec<SweepPoint>> {
    p_grid
        .iter()
        .map(|&p| {
            let model = GameModel::with_noise(entangled, p)?;
            let values = match *quantity {
                SweepQuantity::RandomExpectation { method } => {
                    SweepValues::Random(random_expectation(&model, &method)?)
                }
                SweepQuantity::StrategyExtrema {
                    quantity,
                    grid_step,
                    nodes,
                    refine,
                } => {
                    let grid = surface_scan(grid_step, &model, nodes)?;
                    let refiner = refine.then(|| Refiner::new(model, nodes));
                    let (max, min) = find_extrema(&grid, quantity, refiner.as_ref())
                        .ok_or_else(|| Error::InvalidParameter("empty strategy surface".into()))?;
                    SweepValues::Extrema { max, min }
                }
            };
            Ok(SweepPoint { p, values })
        })
        .collect()
}
