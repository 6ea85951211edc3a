//! Two-photon polarization density matrices, the Pauli channel acting on the
//! player's photon, and the detection-space density `E rho E^dagger`.
//!
//! Polarization basis order is `|V,V>, |V,H>, |H,V>, |H,H>` with the player's
//! photon first; detection basis order is `|i_a, j_b>` at index `3 i + j`.

use nalgebra::{DMatrix, Matrix2, Matrix4, SMatrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angle::{DoorAngles, RotatorAngles};
use crate::error::{Error, Result};
use crate::quantum::{transfer_map, Subsystem, WinProbabilities, DEGENERACY_THRESHOLD, H, V};

pub type Matrix9 = SMatrix<Complex64, 9, 9>;
pub type Matrix9x4 = SMatrix<Complex64, 9, 4>;

const HERMITIAN_TOLERANCE: f64 = 1e-12;
const TRACE_TOLERANCE: f64 = 1e-12;
const PSD_TOLERANCE: f64 = -1e-10;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn hermiticity_defect<const N: usize>(m: &SMatrix<Complex64, N, N>) -> f64 {
    (m - m.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

fn min_eigenvalue<const N: usize>(m: &SMatrix<Complex64, N, N>) -> f64 {
    // symmetric_eigenvalues reads only the lower triangle; symmetrize first.
    let h = DMatrix::from_iterator(N, N, ((m + m.adjoint()) * c(0.5)).iter().copied());
    h.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Density operator on the two-photon polarization space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationDensity(Matrix4<Complex64>);

impl PolarizationDensity {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(matrix: Matrix4<Complex64>) -> Result<Self> {
        let defect = hermiticity_defect(&matrix);
        if defect > HERMITIAN_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "density is not Hermitian (defect {defect:e})"
            )));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > TRACE_TOLERANCE || trace.im.abs() > TRACE_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "density trace is {trace}, expected 1"
            )));
        }
        let lowest = min_eigenvalue(&matrix);
        if lowest < PSD_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "density has negative eigenvalue {lowest:e}"
            )));
        }
        Ok(Self(matrix))
    }

    /// `|psi><psi|` for a normalized two-photon polarization vector.
    pub fn pure(psi: &[Complex64; 4]) -> Result<Self> {
        let v = nalgebra::Vector4::from_column_slice(psi);
        Self::new(v * v.adjoint())
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.0)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.0)
    }
}

/// Weights of the `sigma_x`, `sigma_y`, `sigma_z` branches of the channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliWeights {
    pub p_x: f64,
    pub p_y: f64,
    pub p_z: f64,
}

impl PauliWeights {
    pub fn new(p_x: f64, p_y: f64, p_z: f64) -> Result<Self> {
        let in_unit = |p: f64| (0.0..=1.0).contains(&p);
        if !(in_unit(p_x) && in_unit(p_y) && in_unit(p_z)) || p_x + p_y + p_z > 1.0 + 1e-12 {
            return Err(Error::InvalidWeights { p_x, p_y, p_z });
        }
        Ok(Self { p_x, p_y, p_z })
    }

    /// Noiseless channel.
    pub fn none() -> Self {
        Self {
            p_x: 0.0,
            p_y: 0.0,
            p_z: 0.0,
        }
    }

    /// The depolarizing split `p/3` on each axis.
    pub fn equal(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidWeights {
                p_x: p / 3.0,
                p_y: p / 3.0,
                p_z: p / 3.0,
            });
        }
        Self::new(p / 3.0, p / 3.0, p / 3.0)
    }

    pub fn total(&self) -> f64 {
        self.p_x + self.p_y + self.p_z
    }

    pub fn is_noiseless(&self) -> bool {
        self.total() == 0.0
    }
}

impl Default for PauliWeights {
    fn default() -> Self {
        Self::none()
    }
}

/// Density over detector pairs after both optical chains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionDensity(Matrix9);

impl DetectionDensity {
    pub fn matrix(&self) -> &Matrix9 {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// Unnormalized coincidence weights `<i_a j_b| rho_f |i_a j_b>`.
    pub fn coincidences(&self) -> [[f64; 3]; 3] {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.0[(3 * i + j, 3 * i + j)].re;
            }
        }
        out
    }

    /// Coincidence probabilities normalized by the trace.
    pub fn probabilities(&self) -> Result<[[f64; 3]; 3]> {
        let trace = self.trace();
        if trace < DEGENERACY_THRESHOLD {
            return Err(Error::DegenerateDoorOpening { norm: trace });
        }
        Ok(self.coincidences().map(|row| row.map(|w| w / trace)))
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.0)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.0)
    }
}

/// Polarization state entering the channel: `|V,H><V,H|` for the separable
/// source, the projector on `(|V,H> + |H,V>)/sqrt 2` for the entangled one.
pub fn channel_input(entangled: bool) -> PolarizationDensity {
    let mut m = Matrix4::zeros();
    let vh = 2 * V + H;
    let hv = 2 * H + V;
    if entangled {
        for a in [vh, hv] {
            for b in [vh, hv] {
                m[(a, b)] = c(0.5);
            }
        }
    } else {
        m[(vh, vh)] = c(1.0);
    }
    PolarizationDensity(m)
}

fn pauli_on_player() -> [Matrix4<Complex64>; 3] {
    let i = Complex64::i();
    let sx = Matrix2::new(c(0.0), c(1.0), c(1.0), c(0.0));
    let sy = Matrix2::new(c(0.0), -i, i, c(0.0));
    let sz = Matrix2::new(c(1.0), c(0.0), c(0.0), c(-1.0));
    let id = Matrix2::<Complex64>::identity();
    [sx.kronecker(&id), sy.kronecker(&id), sz.kronecker(&id)]
}

/// `(1 - sum p) rho + sum_k p_k (sigma_k x I) rho (sigma_k x I)`.
pub fn pauli_channel(rho: &PolarizationDensity, weights: &PauliWeights) -> PolarizationDensity {
    let [sx, sy, sz] = pauli_on_player();
    let r = &rho.0;
    let out = r * c(1.0 - weights.total())
        + (sx * r * sx) * c(weights.p_x)
        + (sy * r * sy) * c(weights.p_y)
        + (sz * r * sz) * c(weights.p_z);
    PolarizationDensity(out)
}

/// The 9x4 map `E = E_player (x) D E_host` from polarization pairs to
/// detector pairs, door polarizers included.
pub fn optics_operator(angles: &RotatorAngles, door: &DoorAngles) -> Matrix9x4 {
    let player = transfer_map(angles, Subsystem::Player);
    let host = transfer_map(angles, Subsystem::Host);
    let d = door.coefficients();
    Matrix9x4::from_fn(|row, col| {
        let (i, j) = (row / 3, row % 3);
        let (pa, pb) = (col / 2, col % 2);
        c(player.matrix[i][pa] * d[j] * host.matrix[j][pb])
    })
}

/// `rho_f = E rho E^dagger`.
pub fn detection_density(
    angles: &RotatorAngles,
    door: &DoorAngles,
    rho: &PolarizationDensity,
) -> DetectionDensity {
    let e = optics_operator(angles, door);
    DetectionDensity(e * rho.0 * e.adjoint())
}

/// Stay/switch probabilities after the channel and the optical chain,
/// normalized by `trace(rho_f)`.
pub fn noisy_win_probabilities(
    angles: &RotatorAngles,
    door: &DoorAngles,
    entangled: bool,
    weights: &PauliWeights,
) -> Result<WinProbabilities> {
    let rho_o = pauli_channel(&channel_input(entangled), weights);
    let rho_f = detection_density(angles, door, &rho_o);
    WinProbabilities::from_coincidences(&rho_f.coincidences())
}

/// One point of the semiclassical noise curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseCurvePoint {
    pub p: f64,
    pub stay: f64,
    pub switch: f64,
}

/// Semiclassical game (equal amplitudes, projector door that blocks box
/// `door`) under the equal-weight channel, for every `p` in `p_grid`.
///
/// The three projector doors are not equivalent under noise: the flipped
/// player photon leaves with weights `(1/6, 1/6, 2/3)`, so blocking box 3
/// favors switching far more than blocking box 1 or 2.
pub fn semiclassical_noise_curve(p_grid: &[f64], door: usize) -> Result<Vec<NoiseCurvePoint>> {
    let door = DoorAngles::projector(door)?;
    let angles = RotatorAngles::semiclassical();
    p_grid
        .iter()
        .map(|&p| {
            let w = noisy_win_probabilities(&angles, &door, false, &PauliWeights::equal(p)?)?;
            Ok(NoiseCurvePoint {
                p,
                stay: w.stay,
                switch: w.switch,
            })
        })
        .collect()
}

/// Evenly spaced grid of `points` values on `[0, 1]`.
pub fn unit_grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        n => (0..n).map(|k| k as f64 / (n - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{
        apply_door_opening, configuration_probabilities, joint_separable, separable_amplitudes,
    };
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    const VH: usize = 2 * V + H;
    const HV: usize = 2 * H + V;
    const VV: usize = 2 * V + V;
    const HH: usize = 2 * H + H;

    #[test]
    fn channel_inputs() {
        let rho = channel_input(false);
        for a in 0..4 {
            for b in 0..4 {
                let expected = if (a, b) == (VH, VH) { 1.0 } else { 0.0 };
                assert_eq!(rho.matrix()[(a, b)], c(expected));
            }
        }
        let rho_e = channel_input(true);
        for a in 0..4 {
            for b in 0..4 {
                let inside = [VH, HV].contains(&a) && [VH, HV].contains(&b);
                assert_eq!(rho_e.matrix()[(a, b)], c(if inside { 0.5 } else { 0.0 }));
            }
        }
        for r in [rho, rho_e] {
            assert_abs_diff_eq!(r.trace(), 1.0, epsilon = 1e-15);
            let rank = r
                .matrix()
                .map(|z| z)
                .symmetric_eigenvalues()
                .iter()
                .filter(|e| e.abs() > 1e-12)
                .count();
            assert_eq!(rank, 1);
        }
    }

    #[test]
    fn identity_channel() {
        let rho = channel_input(true);
        assert_eq!(pauli_channel(&rho, &PauliWeights::none()), rho);
    }

    #[test]
    fn separable_input_at_three_quarters() {
        let out = pauli_channel(&channel_input(false), &PauliWeights::equal(0.75).unwrap());
        let m = out.matrix();
        for a in 0..4 {
            for b in 0..4 {
                let expected = if (a, b) == (VH, VH) || (a, b) == (HH, HH) {
                    0.5
                } else {
                    0.0
                };
                assert_abs_diff_eq!(m[(a, b)].re, expected, epsilon = 1e-15);
                assert_abs_diff_eq!(m[(a, b)].im, 0.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn entangled_input_at_three_quarters_is_maximally_mixed_on_diagonal() {
        let out = pauli_channel(&channel_input(true), &PauliWeights::equal(0.75).unwrap());
        let m = out.matrix();
        for a in 0..4 {
            for b in 0..4 {
                let expected = if a == b { 0.25 } else { 0.0 };
                assert_abs_diff_eq!(m[(a, b)].norm(), expected, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn entangled_output_matches_closed_form() {
        // 1/2 [(1 - 2p/3)(VH + HV diag) + (1 - 4p/3)(cross) + 2p/3 (HH + VV diag)]
        let p = 0.37;
        let m = *pauli_channel(&channel_input(true), &PauliWeights::equal(p).unwrap()).matrix();
        assert_abs_diff_eq!(m[(VH, VH)].re, 0.5 * (1.0 - 2.0 * p / 3.0), epsilon = 1e-15);
        assert_abs_diff_eq!(m[(HV, HV)].re, 0.5 * (1.0 - 2.0 * p / 3.0), epsilon = 1e-15);
        assert_abs_diff_eq!(m[(VH, HV)].re, 0.5 * (1.0 - 4.0 * p / 3.0), epsilon = 1e-15);
        assert_abs_diff_eq!(m[(HH, HH)].re, p / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(VV, VV)].re, p / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(HH, VV)].norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn weight_validation() {
        assert!(PauliWeights::new(0.5, 0.4, 0.2).is_err());
        assert!(PauliWeights::new(-0.1, 0.0, 0.0).is_err());
        assert!(PauliWeights::equal(1.2).is_err());
        assert!(PauliWeights::equal(1.0).is_ok());
    }

    #[test]
    fn density_validation() {
        let mut m = *channel_input(false).matrix();
        assert!(PolarizationDensity::new(m).is_ok());
        m[(0, 1)] = c(0.3);
        assert!(PolarizationDensity::new(m).is_err());
        let mut m = Matrix4::zeros();
        m[(0, 0)] = c(1.5);
        m[(1, 1)] = c(-0.5);
        assert!(PolarizationDensity::new(m).is_err());
    }

    #[test]
    fn semiclassical_without_noise() {
        let w = noisy_win_probabilities(
            &RotatorAngles::semiclassical(),
            &DoorAngles::projector(1).unwrap(),
            false,
            &PauliWeights::none(),
        )
        .unwrap();
        assert_abs_diff_eq!(w.stay, 1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(w.switch, 2.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn semiclassical_full_noise_ratio() {
        // Oracle: with probability 2/3 the player's photon is flipped to |H>,
        // whose detector weights are (1/6, 1/6, 2/3). Blocking box k leaves
        // beta = 1/2 on the other two, so the flipped branch stays with
        // probability (1 - q_k)/2. Box 1: stay = 1/3 * 1/3 + 2/3 * 5/12 = 7/18.
        let curve = semiclassical_noise_curve(&[1.0], 1).unwrap();
        assert_abs_diff_eq!(curve[0].stay, 7.0 / 18.0, epsilon = 1e-12);
        assert_abs_diff_eq!(curve[0].switch / curve[0].stay, 11.0 / 7.0, epsilon = 1e-12);
        let box2 = semiclassical_noise_curve(&[1.0], 2).unwrap();
        assert_abs_diff_eq!(box2[0].stay, 7.0 / 18.0, epsilon = 1e-12);
        // Box 3: 1/9 + 2/3 * 1/6 = 2/9.
        let box3 = semiclassical_noise_curve(&[1.0], 3).unwrap();
        assert_abs_diff_eq!(box3[0].stay, 2.0 / 9.0, epsilon = 1e-12);
    }

    #[test]
    fn semiclassical_curve_is_monotone() {
        let curve = semiclassical_noise_curve(&unit_grid(101), 1).unwrap();
        assert_abs_diff_eq!(curve[0].stay, 1.0 / 3.0, epsilon = 1e-12);
        for pair in curve.windows(2) {
            assert!(pair[1].switch <= pair[0].switch + 1e-15);
            assert!(pair[1].stay >= pair[0].stay - 1e-15);
        }
    }

    #[test]
    fn separable_noiseless_density_is_the_pure_state() {
        let angles = RotatorAngles::new(0.3, 1.1, 0.7, 0.2).unwrap();
        let door = DoorAngles::new(0.4, 1.0).unwrap();
        let rho_f = detection_density(&angles, &door, &channel_input(false));
        let normalized = rho_f.matrix() / c(rho_f.trace());
        let eig = normalized.symmetric_eigen();
        let (top, &top_val) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        assert_abs_diff_eq!(top_val, 1.0, epsilon = 1e-12);
        let rest: f64 = eig.eigenvalues.iter().map(|e| e.abs()).sum::<f64>() - top_val;
        assert!(rest < 1e-12);
        let (a, b) = separable_amplitudes(&angles);
        let gamma = joint_separable(&a, &apply_door_opening(&b, &door).unwrap());
        let v = eig.eigenvectors.column(top);
        let overlap: Complex64 = (0..9)
            .map(|k| gamma.amplitude(k / 3, k % 3).conj() * v[k])
            .sum();
        assert_abs_diff_eq!(overlap.norm(), 1.0, epsilon = 1e-12);
    }

    fn arb_density() -> impl Strategy<Value = PolarizationDensity> {
        proptest::collection::vec(-1.0..1.0f64, 32).prop_map(|v| {
            let g = Matrix4::from_fn(|r, col| Complex64::new(v[4 * r + col], v[16 + 4 * r + col]));
            let m = g * g.adjoint();
            let t = m.trace();
            PolarizationDensity::new(m / t).unwrap()
        })
    }

    fn arb_weights() -> impl Strategy<Value = PauliWeights> {
        (0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64).prop_map(|(a, b, c)| {
            let s = (a + b + c).max(1.0);
            PauliWeights::new(a / s, b / s, c / s).unwrap()
        })
    }

    proptest! {
        #[test]
        fn channel_preserves_density_properties(rho in arb_density(), w in arb_weights()) {
            let out = pauli_channel(&rho, &w);
            prop_assert!((out.trace() - 1.0).abs() < 1e-12);
            prop_assert!(out.hermiticity_defect() < 1e-12);
            prop_assert!(out.min_eigenvalue() > -1e-10);
            prop_assert!(PolarizationDensity::new(*out.matrix()).is_ok());
        }

        #[test]
        fn channel_is_affine(r1 in arb_density(), r2 in arb_density(), w in arb_weights(), alpha in 0.0..1.0f64) {
            let mix = PolarizationDensity::new(r1.matrix() * c(alpha) + r2.matrix() * c(1.0 - alpha)).unwrap();
            let lhs = pauli_channel(&mix, &w);
            let rhs = pauli_channel(&r1, &w).matrix() * c(alpha) + pauli_channel(&r2, &w).matrix() * c(1.0 - alpha);
            let diff = (lhs.matrix() - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max);
            prop_assert!(diff < 1e-12);
        }

        #[test]
        fn detection_density_is_hermitian_psd(
            a in (0.0..FRAC_PI_2, 0.0..FRAC_PI_2, 0.0..FRAC_PI_2, 0.0..FRAC_PI_2),
            x in 0.0..FRAC_PI_2, y in 0.0..FRAC_PI_2,
            rho in arb_density(),
        ) {
            let angles = RotatorAngles::new(a.0, a.1, a.2, a.3).unwrap();
            let door = DoorAngles::new(x.min(y), x.max(y)).unwrap();
            let f = detection_density(&angles, &door, &rho);
            prop_assert!(f.hermiticity_defect() < 1e-12);
            prop_assert!(f.min_eigenvalue() > -1e-10);
            prop_assert!(f.trace() > 0.0);
        }

        #[test]
        fn noiseless_channel_reduces_to_pure_state(
            a in (0.0..FRAC_PI_2, 0.0..FRAC_PI_2, 0.0..FRAC_PI_2, 0.0..FRAC_PI_2),
            x in 0.0..FRAC_PI_2, y in 0.0..FRAC_PI_2,
            entangled in any::<bool>(),
        ) {
            let angles = RotatorAngles::new(a.0, a.1, a.2, a.3).unwrap();
            let door = DoorAngles::new(x.min(y), x.max(y)).unwrap();
            if let Ok(pure) = configuration_probabilities(&angles, &door, entangled) {
                let noisy = noisy_win_probabilities(&angles, &door, entangled, &PauliWeights::none()).unwrap();
                prop_assert!((pure.stay - noisy.stay).abs() < 1e-12);
                prop_assert!((pure.switch - noisy.switch).abs() < 1e-12);
            }
        }
    }
}
