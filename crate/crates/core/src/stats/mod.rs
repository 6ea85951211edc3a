//! Expectation values over random optical settings, strategy surfaces over
//! the door angles, extrema search and noise sweeps.

mod expectation;
mod extrema;
mod sampling;
mod surface;
mod sweep;

pub use expectation::{
    random_expectation, strategy_expectation, ExpectationPair, StrategyExpectation, ThetaRule,
};
pub use extrema::{find_extrema, golden_section, ExtremumKind, ExtremumReport, Refiner};
pub use sampling::{sample_phi_region, sample_rotators};
pub use surface::{surface_scan, SurfaceCell, SurfaceGrid};
pub use sweep::{noise_sweep, SweepPoint, SweepQuantity, SweepValues};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default Monte Carlo budget.
pub const DEFAULT_SAMPLES: usize = 1_000_000;
/// Default Gauss-Legendre nodes per dimension.
pub const DEFAULT_NODES: usize = 16;
/// Smallest accepted node count per dimension.
pub const MIN_NODES: usize = 8;

/// How an expectation value is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Method {
    MonteCarlo { samples: usize, seed: u64 },
    Quadrature { nodes: usize },
}

impl Method {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Method::MonteCarlo { samples, .. } if samples < 2 => Err(Error::InvalidParameter(
                format!("Monte Carlo needs at least 2 samples, got {samples}"),
            )),
            Method::Quadrature { nodes } if nodes < MIN_NODES => Err(Error::InvalidParameter(
                format!("quadrature needs at least {MIN_NODES} nodes per dimension, got {nodes}"),
            )),
            _ => Ok(()),
        }
    }
}

impl Default for Method {
    fn default() -> Self {
        Method::Quadrature {
            nodes: DEFAULT_NODES,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMethod {
    MonteCarlo,
    Quadrature,
}

/// An expectation value with its uncertainty: the standard error for Monte
/// Carlo, or the difference to a half-resolution rule for quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectationEstimate {
    pub value: f64,
    pub uncertainty: f64,
    pub method: EstimateMethod,
    /// Samples drawn or quadrature nodes used.
    pub count: usize,
}

impl ExpectationEstimate {
    /// `sqrt(u1^2 + u2^2)`.
    pub fn combined_uncertainty(&self, other: &ExpectationEstimate) -> f64 {
        self.uncertainty.hypot(other.uncertainty)
    }
}

/// Which surface value a scan, extremum or sweep refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    /// `<P_ns>`
    Stay,
    /// `<P_s>`
    Switch,
    /// `|<P_ns> - <P_s>|`
    Imbalance,
}

impl Quantity {
    pub const ALL: [Quantity; 3] = [Quantity::Stay, Quantity::Switch, Quantity::Imbalance];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::Stay => "stay",
            Quantity::Switch => "switch",
            Quantity::Imbalance => "imbalance",
        }
    }

    /// Value of this quantity given `<P_ns>`.
    pub fn from_stay(self, stay: f64) -> f64 {
        match self {
            Quantity::Stay => stay,
            Quantity::Switch => 1.0 - stay,
            Quantity::Imbalance => (2.0 * stay - 1.0).abs(),
        }
    }
}

impl std::str::FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stay" | "ns" | "p_ns" => Ok(Quantity::Stay),
            "switch" | "s" | "p_s" => Ok(Quantity::Switch),
            "imbalance" | "abs" | "p_abs" => Ok(Quantity::Imbalance),
            other => Err(Error::InvalidParameter(format!(
                "unknown quantity {other:?} (expected stay, switch or imbalance)"
            ))),
        }
    }
}

impl std::fmt::Display for Quantity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}
