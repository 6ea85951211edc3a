//! Pure-state game: amplitude preparation from rotator angles, the door-opening
//! operator, joint player/prize states and the stay/switch winning
//! probabilities.
//!
//! Detector indices are 0-based internally (`0..3` for boxes 1..3). Amplitudes
//! carry the signs produced by the rotator chain, e.g. the player's first
//! amplitude is `-sin(theta_a1) cos(theta_a2)`. Only `|.|^2` ever reaches a
//! probability, so the signs matter for reproducibility, not for results.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angle::{DoorAngles, RotatorAngles};
use crate::error::{Error, Result};

/// Norms below this are treated as an annihilated state.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

/// Tolerance used when checking that a vector or grid is normalized.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Polarization index of `|V>` in transfer-map columns and two-photon bases.
pub const V: usize = 0;
/// Polarization index of `|H>`.
pub const H: usize = 1;

/// Three complex amplitudes over boxes 1..3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeVector3(pub [Complex64; 3]);

impl AmplitudeVector3 {
    pub fn from_real(values: [f64; 3]) -> Self {
        Self(values.map(|v| Complex64::new(v, 0.0)))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOLERANCE
    }

    /// Box probabilities `|x_i|^2`.
    pub fn weights(&self) -> [f64; 3] {
        self.0.map(|c| c.norm_sqr())
    }
}

/// Amplitude grid `gamma[i][j]` of `|i_a, j_b>`: row = player's detector,
/// column = host's detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointState {
    gamma: [[Complex64; 3]; 3],
}

impl JointState {
    /// Wraps an already-normalized grid.
    pub fn new(gamma: [[Complex64; 3]; 3]) -> Result<Self> {
        let n = grid_norm_sqr(&gamma);
        if (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "joint state has squared norm {n}, expected 1"
            )));
        }
        Ok(Self { gamma })
    }

    /// Divides an unnormalized grid by its norm.
    pub fn normalize(mut gamma: [[Complex64; 3]; 3]) -> Result<Self> {
        let norm = grid_norm_sqr(&gamma).sqrt();
        if norm < DEGENERACY_THRESHOLD {
            return Err(Error::DegenerateDoorOpening { norm });
        }
        gamma.iter_mut().flatten().for_each(|c| *c /= norm);
        Ok(Self { gamma })
    }

    pub fn amplitudes(&self) -> &[[Complex64; 3]; 3] {
        &self.gamma
    }

    pub fn amplitude(&self, i: usize, j: usize) -> Complex64 {
        self.gamma[i][j]
    }

    /// Coincidence probabilities `|gamma_ij|^2`.
    pub fn probabilities(&self) -> [[f64; 3]; 3] {
        self.gamma.map(|row| row.map(|c| c.norm_sqr()))
    }

    pub fn norm_sqr(&self) -> f64 {
        grid_norm_sqr(&self.gamma)
    }
}

fn grid_norm_sqr(gamma: &[[Complex64; 3]; 3]) -> f64 {
    gamma.iter().flatten().map(|c| c.norm_sqr()).sum()
}

/// Probability of winning by keeping the first choice (`stay`) or by
/// switching (`switch`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WinProbabilities {
    pub stay: f64,
    pub switch: f64,
}

impl WinProbabilities {
    /// Splits a 3x3 table of coincidence weights into diagonal/off-diagonal
    /// mass, normalized by the table total.
    pub fn from_coincidences(weights: &[[f64; 3]; 3]) -> Result<Self> {
        let total: f64 = weights.iter().flatten().sum();
        if total < DEGENERACY_THRESHOLD {
            return Err(Error::DegenerateDoorOpening { norm: total });
        }
        let diagonal: f64 = (0..3).map(|i| weights[i][i]).sum();
        let off_diagonal: f64 = (0..3)
            .flat_map(|i| (0..3).filter(move |&j| j != i).map(move |j| weights[i][j]))
            .sum();
        Ok(Self {
            stay: diagonal / total,
            switch: off_diagonal / total,
        })
    }

    /// `|stay - switch|`.
    pub fn imbalance(&self) -> f64 {
        (self.stay - self.switch).abs()
    }
}

/// Which photon a transfer map belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subsystem {
    /// The player's photon (rotators `theta_a1`, `theta_a2`).
    Player,
    /// The host's photon (rotators `theta_b1`, `theta_b2`).
    Host,
}

/// Linear map from one photon's polarization `{|V>, |H>}` to the amplitudes
/// reaching detectors 1..3, for the rotator/PBS chain before any polarizer.
/// Every entry of the chain is real.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferMap {
    /// `matrix[detector][polarization]`, polarization indexed by [`V`] / [`H`].
    pub matrix: [[f64; 2]; 3],
}

impl TransferMap {
    pub fn column(&self, polarization: usize) -> [f64; 3] {
        [
            self.matrix[0][polarization],
            self.matrix[1][polarization],
            self.matrix[2][polarization],
        ]
    }
}

/// Traces a polarization through `Rot(t1)`, the first PBS (V to detector 3),
/// `Rot(t2)` on the transmitted H arm and the second PBS (V to detector 2,
/// H to detector 1).
fn rotator_chain(t1: f64, t2: f64, polarization: usize) -> [f64; 3] {
    let (s1, c1) = t1.sin_cos();
    let (s2, c2) = t2.sin_cos();
    // Rot(t)|V> = cos t |V> - sin t |H>,  Rot(t)|H> = cos t |H> + sin t |V>
    let (v_after_first, h_after_first) = if polarization == V {
        (c1, -s1)
    } else {
        (s1, c1)
    };
    [h_after_first * c2, h_after_first * s2, v_after_first]
}

/// Transfer map of one photon's rotator/PBS chain.
pub fn transfer_map(angles: &RotatorAngles, subsystem: Subsystem) -> TransferMap {
    let (t1, t2) = match subsystem {
        Subsystem::Player => (angles.theta_a1.radians(), angles.theta_a2.radians()),
        Subsystem::Host => (angles.theta_b1.radians(), angles.theta_b2.radians()),
    };
    let v = rotator_chain(t1, t2, V);
    let h = rotator_chain(t1, t2, H);
    TransferMap {
        matrix: [[v[0], h[0]], [v[1], h[1]], [v[2], h[2]]],
    }
}

/// Player amplitudes `a` and prize amplitudes `b` for the separable source
/// `|V, H>`.
pub fn separable_amplitudes(angles: &RotatorAngles) -> (AmplitudeVector3, AmplitudeVector3) {
    let (sa1, ca1) = angles.theta_a1.radians().sin_cos();
    let (sa2, ca2) = angles.theta_a2.radians().sin_cos();
    let (sb1, cb1) = angles.theta_b1.radians().sin_cos();
    let (sb2, cb2) = angles.theta_b2.radians().sin_cos();
    let a = AmplitudeVector3::from_real([-sa1 * ca2, -sa1 * sa2, ca1]);
    let b = AmplitudeVector3::from_real([cb1 * cb2, cb1 * sb2, sb1]);
    (a, b)
}

/// Applies the door-opening operator to the prize state and renormalizes.
pub fn apply_door_opening(b: &AmplitudeVector3, door: &DoorAngles) -> Result<AmplitudeVector3> {
    let d = door.coefficients();
    let mut opened = [b.0[0] * d[0], b.0[1] * d[1], b.0[2] * d[2]];
    let norm = opened.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm < DEGENERACY_THRESHOLD {
        return Err(Error::DegenerateDoorOpening { norm });
    }
    opened.iter_mut().for_each(|c| *c /= norm);
    Ok(AmplitudeVector3(opened))
}

/// Product state `gamma_ij = a_i beta_j`.
pub fn joint_separable(a: &AmplitudeVector3, beta: &AmplitudeVector3) -> JointState {
    let mut gamma = [[Complex64::new(0.0, 0.0); 3]; 3];
    for (i, row) in gamma.iter_mut().enumerate() {
        for (j, g) in row.iter_mut().enumerate() {
            *g = a.0[i] * beta.0[j];
        }
    }
    JointState { gamma }
}

/// Unnormalized amplitudes `c_ij` for the polarization-entangled source
/// `(|V,H> + |H,V>)/sqrt 2` after both optical chains and the door polarizers.
pub fn entangled_amplitudes(angles: &RotatorAngles, door: &DoorAngles) -> [[f64; 3]; 3] {
    let (sa2, ca2) = angles.theta_a2.radians().sin_cos();
    let (sb2, cb2) = angles.theta_b2.radians().sin_cos();
    let (s, c) = (angles.theta_a1.radians() + angles.theta_b1.radians()).sin_cos();
    let [d1, d2, d3] = door.coefficients();
    let r = FRAC_1_SQRT_2;
    [
        [
            -r * ca2 * cb2 * s * d1,
            -r * ca2 * sb2 * s * d2,
            r * ca2 * c * d3,
        ],
        [
            -r * sa2 * cb2 * s * d1,
            -r * sa2 * sb2 * s * d2,
            r * sa2 * c * d3,
        ],
        [r * cb2 * c * d1, r * sb2 * c * d2, r * s * d3],
    ]
}

/// Normalized entangled joint state from the closed-form `c_ij`.
pub fn joint_entangled(angles: &RotatorAngles, door: &DoorAngles) -> Result<JointState> {
    let c = entangled_amplitudes(angles, door);
    JointState::normalize(c.map(|row| row.map(|v| Complex64::new(v, 0.0))))
}

/// Propagates a two-photon polarization state (basis `|V,V>, |V,H>, |H,V>,
/// |H,H>`, player first) through both transfer maps and the door polarizers.
/// The result is unnormalized.
pub fn propagate_pure(
    angles: &RotatorAngles,
    door: &DoorAngles,
    polarization_state: &[Complex64; 4],
) -> [[Complex64; 3]; 3] {
    let player = transfer_map(angles, Subsystem::Player);
    let host = transfer_map(angles, Subsystem::Host);
    let d = door.coefficients();
    let mut out = [[Complex64::new(0.0, 0.0); 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            for pa in [V, H] {
                for pb in [V, H] {
                    let e = player.matrix[i][pa] * d[j] * host.matrix[j][pb];
                    *cell += polarization_state[2 * pa + pb] * e;
                }
            }
        }
    }
    out
}

/// Winning probabilities of a normalized joint state.
pub fn win_probabilities(state: &JointState) -> WinProbabilities {
    let p = state.probabilities();
    let stay: f64 = (0..3).map(|i| p[i][i]).sum();
    let switch: f64 = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .map(|(i, j)| p[i][j])
        .sum();
    WinProbabilities { stay, switch }
}

/// Pure-state probabilities for an optical configuration, separable or
/// entangled source.
pub fn configuration_probabilities(
    angles: &RotatorAngles,
    door: &DoorAngles,
    entangled: bool,
) -> Result<WinProbabilities> {
    let state = if entangled {
        joint_entangled(angles, door)?
    } else {
        let (a, b) = separable_amplitudes(angles);
        joint_separable(&a, &apply_door_opening(&b, door)?)
    };
    Ok(win_probabilities(&state))
}
