use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::expectation::ThetaRule;
use super::Quantity;
use crate::angle::DoorAngles;
use crate::error::{Error, Result};
use crate::model::GameModel;

/// Strategy expectations at one `(phi1, phi2)` node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceCell {
    pub stay: f64,
    pub switch: f64,
    pub imbalance: f64,
}

impl SurfaceCell {
    pub fn from_stay(stay: f64) -> Self {
        Self {
            stay,
            switch: 1.0 - stay,
            imbalance: (2.0 * stay - 1.0).abs(),
        }
    }

    pub fn get(&self, quantity: Quantity) -> f64 {
        match quantity {
            Quantity::Stay => self.stay,
            Quantity::Switch => self.switch,
            Quantity::Imbalance => self.imbalance,
        }
    }
}

/// Strategy expectations on a regular `(phi1, phi2)` grid. Cells outside the
/// door region `phi1 <= phi2` (or degenerate ones) are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceGrid {
    pub phi1_axis: Vec<f64>,
    pub phi2_axis: Vec<f64>,
    /// `cells[a][b]` sits at `(phi1_axis[a], phi2_axis[b])`.
    pub cells: Vec<Vec<Option<SurfaceCell>>>,
    pub grid_step: f64,
}

impl SurfaceGrid {
    /// Iterates over `(phi1, phi2, cell)` for every valid node, phi1-major.
    pub fn valid_cells(&self) -> impl Iterator<Item = (f64, f64, SurfaceCell)> + '_ {
        self.cells.iter().enumerate().flat_map(move |(a, row)| {
            row.iter().enumerate().filter_map(move |(b, cell)| {
                cell.map(|c| (self.phi1_axis[a], self.phi2_axis[b], c))
            })
        })
    }

    pub fn valid_count(&self) -> usize {
        self.valid_cells().count()
    }

    pub fn is_empty(&self) -> bool {
        self.valid_count() == 0
    }
}

/// `0, step, 2 step, ...` below `pi/2`, closed with `pi/2` itself.
pub(crate) fn angle_axis(step: f64) -> Vec<f64> {
    let mut axis = Vec::new();
    let mut k = 0usize;
    loop {
        let v = k as f64 * step;
        if v >= FRAC_PI_2 - 1e-9 {
            break;
        }
        axis.push(v);
        k += 1;
    }
    axis.push(FRAC_PI_2);
    axis
}

/// Evaluates the strategy expectation on every valid node of a square grid
/// with spacing `grid_step`, using `nodes` Gauss-Legendre nodes per rotator
/// angle.
pub fn surface_scan(grid_step: f64, model: &GameModel, nodes: usize) -> Result<SurfaceGrid> {
    if !(grid_step > 0.0 && grid_step <= FRAC_PI_4 + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "grid step {grid_step} is outside (0, pi/4]"
        )));
    }
    super::Method::Quadrature { nodes }.validate()?;
    let axis = angle_axis(grid_step);
    let rule = ThetaRule::new(nodes);
    let jobs: Vec<(usize, usize)> = (0..axis.len())
        .flat_map(|a| (0..axis.len()).map(move |b| (a, b)))
        .collect();
    let values: Vec<Option<SurfaceCell>> = jobs
        .par_iter()
        .map(|&(a, b)| {
            let door = DoorAngles::new(axis[a], axis[b]).ok()?;
            rule.mean_stay(model, &door).map(SurfaceCell::from_stay)
        })
        .collect();
    let cells = values.chunks(axis.len()).map(|row| row.to_vec()).collect();
    Ok(SurfaceGrid {
        phi1_axis: axis.clone(),
        phi2_axis: axis,
        cells,
        grid_step,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::PauliWeights;
    use std::f64::consts::PI;

    #[test]
    fn axis_ends_at_right_angle() {
        let axis = angle_axis(PI / 20.0);
        assert_eq!(axis.len(), 11);
        assert_eq!(*axis.last().unwrap(), FRAC_PI_2);
        let axis = angle_axis(0.0157);
        assert_eq!(axis[1], 0.0157);
        assert_eq!(*axis.last().unwrap(), FRAC_PI_2);
        assert!(axis.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn coarse_surface_masks_and_complements() {
        let model = GameModel::new(false, PauliWeights::none());
        let grid = surface_scan(PI / 8.0, &model, 8).unwrap();
        assert_eq!(grid.phi1_axis.len(), 5);
        // triangle including the diagonal: 5 + 4 + 3 + 2 + 1
        assert_eq!(grid.valid_count(), 15);
        for (p1, p2, cell) in grid.valid_cells() {
            assert!(p1 <= p2);
            assert!((cell.stay + cell.switch - 1.0).abs() < 1e-12);
        }
        assert!(grid.cells[4][0].is_none());
        let corner = grid.cells[0][4].unwrap();
        assert!((corner.switch - 0.75).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_steps() {
        let model = GameModel::new(false, PauliWeights::none());
        assert!(surface_scan(0.0, &model, 8).is_err());
        assert!(surface_scan(1.0, &model, 8).is_err());
    }
}
