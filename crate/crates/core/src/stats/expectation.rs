use std::f64::consts::FRAC_PI_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::{sample_phi_region, sample_rotators};
use super::{EstimateMethod, ExpectationEstimate, Method};
use crate::angle::DoorAngles;
use crate::error::{Error, Result};
use crate::model::GameModel;
use crate::quadrature::GaussLegendre;
use crate::quantum::{transfer_map, Subsystem, TransferMap};

/// Samples per independently seeded Monte Carlo stream. Fixed so that the
/// result does not depend on how many workers run the chunks.
const MC_CHUNK: usize = 1 << 14;

/// `<P_ns>` and `<P_s>` of the random game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectationPair {
    pub stay: ExpectationEstimate,
    pub switch: ExpectationEstimate,
}

/// `<P_ns>`, `<P_s>` and `|<P_ns> - <P_s>|` at fixed door angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyExpectation {
    pub stay: ExpectationEstimate,
    pub switch: ExpectationEstimate,
    pub imbalance: ExpectationEstimate,
}

/// Tensor-product Gauss-Legendre rule over the four rotator angles, with the
/// player and host transfer maps precomputed per node pair.
#[derive(Debug, Clone)]
pub struct ThetaRule {
    nodes: usize,
    /// `(weight, map)` for each `(theta_a1, theta_a2)` node pair.
    player: Vec<(f64, TransferMap)>,
    /// `(weight, map)` for each `(theta_b1, theta_b2)` node pair.
    host: Vec<(f64, TransferMap)>,
}

impl ThetaRule {
    pub fn new(nodes: usize) -> Self {
        let rule = GaussLegendre::new(nodes).on_interval(0.0, FRAC_PI_2);
        let mut player = Vec::with_capacity(nodes * nodes);
        let mut host = Vec::with_capacity(nodes * nodes);
        for &(t1, w1) in &rule {
            for &(t2, w2) in &rule {
                let angles = crate::angle::RotatorAngles::new(t1, t2, t1, t2)
                    .expect("Gauss-Legendre nodes lie inside [0, pi/2]");
                player.push((w1 * w2, transfer_map(&angles, Subsystem::Player)));
                host.push((w1 * w2, transfer_map(&angles, Subsystem::Host)));
            }
        }
        Self {
            nodes,
            player,
            host,
        }
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// Weighted sums `(sum w P_ns, sum w)` over non-degenerate nodes.
    pub fn stay_sums(&self, model: &GameModel, door: &DoorAngles) -> (f64, f64) {
        let d = door.coefficients();
        let mut value = 0.0;
        let mut weight = 0.0;
        for (wp, player) in &self.player {
            let mut inner_value = 0.0;
            let mut inner_weight = 0.0;
            for (wh, host) in &self.host {
                if let Some(stay) = model.stay_probability(player, host, &d) {
                    inner_value += wh * stay;
                    inner_weight += wh;
                }
            }
            value += wp * inner_value;
            weight += wp * inner_weight;
        }
        (value, weight)
    }

    /// `<P_ns>` over the rotator angles at fixed door angles.
    pub fn mean_stay(&self, model: &GameModel, door: &DoorAngles) -> Option<f64> {
        let (value, weight) = self.stay_sums(model, door);
        (weight > 0.0).then(|| value / weight)
    }
}

fn coarse_nodes(nodes: usize) -> usize {
    (nodes / 2).max(2)
}

fn quadrature_estimate(value: f64, coarse: f64, count: usize) -> ExpectationEstimate {
    ExpectationEstimate {
        value,
        uncertainty: (value - coarse).abs(),
        method: EstimateMethod::Quadrature,
        count,
    }
}

struct MonteCarloSums {
    sum: f64,
    sum_sq: f64,
    count: usize,
}

/// Runs `draw` on `samples` seeded draws split into fixed chunks; draws that
/// return `None` (degenerate configurations) are dropped.
fn monte_carlo<F>(samples: usize, seed: u64, draw: F) -> Result<MonteCarloSums>
where
    F: Fn(&mut ChaCha8Rng) -> Option<f64> + Sync,
{
    let chunks = samples.div_ceil(MC_CHUNK);
    let partial: Vec<MonteCarloSums> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64);
            let len = MC_CHUNK.min(samples - chunk * MC_CHUNK);
            let mut acc = MonteCarloSums {
                sum: 0.0,
                sum_sq: 0.0,
                count: 0,
            };
            for _ in 0..len {
                if let Some(v) = draw(&mut rng) {
                    acc.sum += v;
                    acc.sum_sq += v * v;
                    acc.count += 1;
                }
            }
            acc
        })
        .collect();
    let total = partial.iter().fold(
        MonteCarloSums {
            sum: 0.0,
            sum_sq: 0.0,
            count: 0,
        },
        |a, b| MonteCarloSums {
            sum: a.sum + b.sum,
            sum_sq: a.sum_sq + b.sum_sq,
            count: a.count + b.count,
        },
    );
    if total.count < 2 {
        return Err(Error::DegenerateDoorOpening { norm: 0.0 });
    }
    Ok(total)
}

fn mc_estimates(
    sums: &MonteCarloSums,
) -> (
    ExpectationEstimate,
    ExpectationEstimate,
    ExpectationEstimate,
) {
    let n = sums.count as f64;
    let mean = sums.sum / n;
    let variance = ((sums.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    let se = (variance / n).sqrt();
    let est = |value, uncertainty| ExpectationEstimate {
        value,
        uncertainty,
        method: EstimateMethod::MonteCarlo,
        count: sums.count,
    };
    (
        est(mean, se),
        est(1.0 - mean, se),
        est((2.0 * mean - 1.0).abs(), 2.0 * se),
    )
}

/// Expectation of the stay/switch probabilities when all four rotator angles
/// are uniform on `[0, pi/2]` and `(phi1, phi2)` is uniform on the triangle
/// `phi1 <= phi2` (joint density `128/pi^6`).
pub fn random_expectation(model: &GameModel, method: &Method) -> Result<ExpectationPair> {
    method.validate()?;
    match *method {
        Method::MonteCarlo { samples, seed } => {
            let sums = monte_carlo(samples, seed, |rng| {
                let angles = sample_rotators(rng);
                let door = sample_phi_region(rng);
                model.probabilities(&angles, &door).ok().map(|w| w.stay)
            })?;
            let (stay, switch, _) = mc_estimates(&sums);
            Ok(ExpectationPair { stay, switch })
        }
        Method::Quadrature { nodes } => {
            let fine = random_quadrature(model, nodes)?;
            let coarse = random_quadrature(model, coarse_nodes(nodes))?;
            let count = nodes.pow(6);
            Ok(ExpectationPair {
                stay: quadrature_estimate(fine, coarse, count),
                switch: quadrature_estimate(1.0 - fine, 1.0 - coarse, count),
            })
        }
    }
}

fn random_quadrature(model: &GameModel, nodes: usize) -> Result<f64> {
    let theta = ThetaRule::new(nodes);
    let base = GaussLegendre::new(nodes);
    // phi2 on [phi1, pi/2]: the mapped weights carry the (pi/2 - phi1) Jacobian
    let pairs: Vec<(f64, f64, f64)> = base
        .on_interval(0.0, FRAC_PI_2)
        .into_iter()
        .flat_map(|(phi1, w1)| {
            base.on_interval(phi1, FRAC_PI_2)
                .into_iter()
                .map(move |(phi2, w2)| (phi1, phi2, w1 * w2))
        })
        .collect();
    let partial: Vec<(f64, f64)> = pairs
        .par_iter()
        .map(|&(phi1, phi2, w)| match DoorAngles::new(phi1, phi2) {
            Ok(door) => {
                let (v, wt) = theta.stay_sums(model, &door);
                (w * v, w * wt)
            }
            Err(_) => (0.0, 0.0),
        })
        .collect();
    let (value, weight) = partial
        .iter()
        .fold((0.0, 0.0), |(a, b), (v, w)| (a + v, b + w));
    if weight <= 0.0 {
        return Err(Error::DegenerateDoorOpening { norm: 0.0 });
    }
    Ok(value / weight)
}

/// Expectation over the four rotator angles (density `16/pi^4`) at fixed door
/// angles.
pub fn strategy_expectation(
    phi1: f64,
    phi2: f64,
    model: &GameModel,
    method: &Method,
) -> Result<StrategyExpectation> {
    method.validate()?;
    let door = DoorAngles::new(phi1, phi2)?;
    match *method {
        Method::MonteCarlo { samples, seed } => {
            let sums = monte_carlo(samples, seed, |rng| {
                let angles = sample_rotators(rng);
                model.probabilities(&angles, &door).ok().map(|w| w.stay)
            })?;
            let (stay, switch, imbalance) = mc_estimates(&sums);
            Ok(StrategyExpectation {
                stay,
                switch,
                imbalance,
            })
        }
        Method::Quadrature { nodes } => {
            let degenerate = || Error::DegenerateDoorOpening { norm: 0.0 };
            let fine = ThetaRule::new(nodes)
                .mean_stay(model, &door)
                .ok_or_else(degenerate)?;
            let coarse = ThetaRule::new(coarse_nodes(nodes))
                .mean_stay(model, &door)
                .ok_or_else(degenerate)?;
            let count = nodes.pow(4);
            Ok(StrategyExpectation {
                stay: quadrature_estimate(fine, coarse, count),
                switch: quadrature_estimate(1.0 - fine, 1.0 - coarse, count),
                imbalance: quadrature_estimate(
                    (2.0 * fine - 1.0).abs(),
                    (2.0 * coarse - 1.0).abs(),
                    count,
                ),
            })
        }
    }
}
