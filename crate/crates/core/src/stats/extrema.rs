use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::expectation::ThetaRule;
use super::surface::SurfaceGrid;
use super::Quantity;
use crate::angle::DoorAngles;
use crate::model::GameModel;

/// Angular tolerance of the golden-section refinement.
pub const REFINE_TOLERANCE: f64 = 1e-6;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremumKind {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremumReport {
    pub kind: ExtremumKind,
    pub quantity: Quantity,
    pub value: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub grid_step: f64,
}

/// Golden-section search for the minimum (or maximum) of `f` on `[a, b]`.
/// The endpoints are compared against the interior optimum, so monotone
/// functions resolve to the right boundary exactly.
pub fn golden_section<F>(f: F, a: f64, b: f64, tol: f64, maximize: bool) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let sign = if maximize { -1.0 } else { 1.0 };
    let g = |x: f64| sign * f(x);
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut g1 = g(x1);
    let mut g2 = g(x2);
    while hi - lo > tol {
        if g1 <= g2 {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - INV_PHI * (hi - lo);
            g1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + INV_PHI * (hi - lo);
            g2 = g(x2);
        }
    }
    let mid = 0.5 * (lo + hi);
    [(a, g(a)), (b, g(b)), (mid, g(mid))]
        .into_iter()
        .min_by(|p, q| p.1.total_cmp(&q.1))
        .map(|(x, gx)| (x, sign * gx))
        .expect("three candidates")
}

/// Re-evaluates the strategy surface off-grid for local refinement.
#[derive(Debug, Clone)]
pub struct Refiner {
    model: GameModel,
    rule: ThetaRule,
}

impl Refiner {
    pub fn new(model: GameModel, nodes: usize) -> Self {
        Self {
            model,
            rule: ThetaRule::new(nodes),
        }
    }

    pub fn evaluate(&self, quantity: Quantity, phi1: f64, phi2: f64) -> Option<f64> {
        let door = DoorAngles::new(phi1, phi2).ok()?;
        self.rule
            .mean_stay(&self.model, &door)
            .map(|stay| quantity.from_stay(stay))
    }

    /// Coordinate-wise golden-section passes inside the cells neighboring
    /// `(phi1, phi2)`, staying in the region `phi1 <= phi2`.
    fn refine(
        &self,
        quantity: Quantity,
        kind: ExtremumKind,
        start: (f64, f64, f64),
        step: f64,
    ) -> (f64, f64, f64) {
        let maximize = kind == ExtremumKind::Max;
        let better = |a: f64, b: f64| if maximize { a > b } else { a < b };
        let worst = if maximize {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        };
        let (mut phi1, mut phi2, mut best) = start;
        let (lo1, hi1) = ((start.0 - step).max(0.0), (start.0 + step).min(FRAC_PI_2));
        let (lo2, hi2) = ((start.1 - step).max(0.0), (start.1 + step).min(FRAC_PI_2));
        for _ in 0..2 {
            let (a, b) = (lo1, hi1.min(phi2));
            if b > a {
                let (x, v) = golden_section(
                    |x| self.evaluate(quantity, x, phi2).unwrap_or(worst),
                    a,
                    b,
                    REFINE_TOLERANCE,
                    maximize,
                );
                if better(v, best) {
                    phi1 = x;
                    best = v;
                }
            }
            let (a, b) = (lo2.max(phi1), hi2);
            if b > a {
                let (y, v) = golden_section(
                    |y| self.evaluate(quantity, phi1, y).unwrap_or(worst),
                    a,
                    b,
                    REFINE_TOLERANCE,
                    maximize,
                );
                if better(v, best) {
                    phi2 = y;
                    best = v;
                }
            }
        }
        (phi1, phi2, best)
    }
}

/// Grid argmax/argmin of `quantity`, optionally refined off-grid. Ties keep
/// the first node in phi1-major order. Returns `None` for an empty surface.
pub fn find_extrema(
    surface: &SurfaceGrid,
    quantity: Quantity,
    refiner: Option<&Refiner>,
) -> Option<(ExtremumReport, ExtremumReport)> {
    let mut max: Option<(f64, f64, f64)> = None;
    let mut min: Option<(f64, f64, f64)> = None;
    for (phi1, phi2, cell) in surface.valid_cells() {
        let v = cell.get(quantity);
        if max.is_none_or(|m| v > m.2) {
            max = Some((phi1, phi2, v));
        }
        if min.is_none_or(|m| v < m.2) {
            min = Some((phi1, phi2, v));
        }
    }
    let (mut max, mut min) = (max?, min?);
    if let Some(r) = refiner {
        max = r.refine(quantity, ExtremumKind::Max, max, surface.grid_step);
        min = r.refine(quantity, ExtremumKind::Min, min, surface.grid_step);
    }
    let report = |kind, (phi1, phi2, value): (f64, f64, f64)| ExtremumReport {
        kind,
        quantity,
        value,
        phi1,
        phi2,
        grid_step: surface.grid_step,
    };
    Some((
        report(ExtremumKind::Max, max),
        report(ExtremumKind::Min, min),
    ))
}
