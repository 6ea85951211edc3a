//! Fast per-configuration evaluation for integration loops.
//!
//! The channel output does not depend on the optical angles, so it is formed
//! once. The optics operator is real, which makes the detector diagonal
//! `sum_mn E_km E_kn Re(rho_mn)`.

use crate::angle::{DoorAngles, RotatorAngles};
use crate::error::Result;
use crate::noise::{channel_input, pauli_channel, PauliWeights};
use crate::quantum::{
    transfer_map, Subsystem, TransferMap, WinProbabilities, DEGENERACY_THRESHOLD,
};

/// Source and channel settings shared by every configuration of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameModel {
    pub entangled: bool,
    pub weights: PauliWeights,
    /// Nonzero entries `(m, n, Re rho_mn)` of the channel output.
    terms: [(usize, usize, f64); 16],
    term_count: usize,
}

impl GameModel {
    pub fn new(entangled: bool, weights: PauliWeights) -> Self {
        let rho = pauli_channel(&channel_input(entangled), &weights);
        let mut terms = [(0, 0, 0.0); 16];
        let mut term_count = 0;
        for m in 0..4 {
            for n in 0..4 {
                let value = rho.matrix()[(m, n)].re;
                if value != 0.0 {
                    terms[term_count] = (m, n, value);
                    term_count += 1;
                }
            }
        }
        Self {
            entangled,
            weights,
            terms,
            term_count,
        }
    }

    /// Equal-weight channel with total flip probability `p`.
    pub fn with_noise(entangled: bool, p: f64) -> Result<Self> {
        Ok(Self::new(entangled, PauliWeights::equal(p)?))
    }

    /// Unnormalized coincidence weights for one configuration.
    pub fn coincidences(&self, angles: &RotatorAngles, door: &DoorAngles) -> [[f64; 3]; 3] {
        let player = transfer_map(angles, Subsystem::Player);
        let host = transfer_map(angles, Subsystem::Host);
        self.coincidences_with_maps(&player, &host, &door.coefficients())
    }

    /// Same as [`GameModel::coincidences`] with the transfer maps and door
    /// coefficients already computed.
    pub fn coincidences_with_maps(
        &self,
        player: &TransferMap,
        host: &TransferMap,
        door: &[f64; 3],
    ) -> [[f64; 3]; 3] {
        let terms = &self.terms[..self.term_count];
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            let pa = player.matrix[i];
            for (j, cell) in row.iter_mut().enumerate() {
                let pb = host.matrix[j];
                // row (i, j) of E, indexed by 2 pa + pb
                let e = [pa[0] * pb[0], pa[0] * pb[1], pa[1] * pb[0], pa[1] * pb[1]];
                let acc: f64 = terms.iter().map(|&(m, n, r)| r * e[m] * e[n]).sum();
                *cell = acc * door[j] * door[j];
            }
        }
        out
    }

    /// Probability of winning by staying; `None` when the configuration is
    /// annihilated by the door.
    pub fn stay_probability(
        &self,
        player: &TransferMap,
        host: &TransferMap,
        door: &[f64; 3],
    ) -> Option<f64> {
        let w = self.coincidences_with_maps(player, host, door);
        let total: f64 = w.iter().flatten().sum();
        if total < DEGENERACY_THRESHOLD {
            return None;
        }
        Some((w[0][0] + w[1][1] + w[2][2]) / total)
    }

    pub fn probabilities(
        &self,
        angles: &RotatorAngles,
        door: &DoorAngles,
    ) -> Result<WinProbabilities> {
        WinProbabilities::from_coincidences(&self.coincidences(angles, door))
    }
}
