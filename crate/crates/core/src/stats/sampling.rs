use std::f64::consts::FRAC_PI_2;

use rand::Rng;

use crate::angle::{DoorAngles, RotatorAngles};

/// Door angles uniform on the triangle `0 <= phi1 <= phi2 <= pi/2`.
///
/// Points are drawn on the square and rejected when `phi2 < phi1`; drawing
/// `phi2` uniformly on `[phi1, pi/2]` instead would overweight large `phi1`.
pub fn sample_phi_region<R: Rng + ?Sized>(rng: &mut R) -> DoorAngles {
    loop {
        let phi1 = rng.random_range(0.0..=FRAC_PI_2);
        let phi2 = rng.random_range(0.0..=FRAC_PI_2);
        if phi2 >= phi1 {
            // sin is increasing on [0, pi/2], so the pair is always valid
            return DoorAngles::new(phi1, phi2).expect("phi1 <= phi2 lies in the door region");
        }
    }
}

/// Four independent rotator angles uniform on `[0, pi/2]`.
pub fn sample_rotators<R: Rng + ?Sized>(rng: &mut R) -> RotatorAngles {
    let mut draw = || rng.random_range(0.0..=FRAC_PI_2);
    RotatorAngles::new(draw(), draw(), draw(), draw()).expect("draws lie in [0, pi/2]")
}
