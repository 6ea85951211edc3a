//! Optical angles: rotator settings and the constrained door-opening triple.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inputs this far outside `[0, pi/2]` are snapped to the nearest endpoint
/// instead of rejected, so values printed with limited precision round-trip.
const ENDPOINT_SLACK: f64 = 1e-9;

/// An angle in radians restricted to `[0, pi/2]` (endpoints included).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);
    pub const RIGHT: Angle = Angle(FRAC_PI_2);

    pub fn new(value: f64) -> Result<Self> {
        Self::named("angle", value)
    }

    pub(crate) fn named(name: &'static str, value: f64) -> Result<Self> {
        if !value.is_finite() || !(-ENDPOINT_SLACK..=FRAC_PI_2 + ENDPOINT_SLACK).contains(&value) {
            return Err(Error::InvalidAngle { name, value });
        }
        Ok(Angle(value.clamp(0.0, FRAC_PI_2)))
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn sin(self) -> f64 {
        self.0.sin()
    }

    pub fn cos(self) -> f64 {
        self.0.cos()
    }
}

impl TryFrom<f64> for Angle {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Angle::new(value)
    }
}

impl From<Angle> for f64 {
    fn from(a: Angle) -> f64 {
        a.0
    }
}

/// The four polarization-rotator settings. `theta_a*` belong to the player's
/// photon, `theta_b*` to the host's.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotatorAngles {
    pub theta_a1: Angle,
    pub theta_a2: Angle,
    pub theta_b1: Angle,
    pub theta_b2: Angle,
}

impl RotatorAngles {
    pub fn new(theta_a1: f64, theta_a2: f64, theta_b1: f64, theta_b2: f64) -> Result<Self> {
        Ok(Self {
            theta_a1: Angle::named("theta_a1", theta_a1)?,
            theta_a2: Angle::named("theta_a2", theta_a2)?,
            theta_b1: Angle::named("theta_b1", theta_b1)?,
            theta_b2: Angle::named("theta_b2", theta_b2)?,
        })
    }

    /// Settings that put an equal `1/3` weight on every box for both photons.
    pub fn semiclassical() -> Self {
        let third = (1.0f64 / 3.0).sqrt();
        Self {
            theta_a1: Angle(third.acos()),
            theta_a2: Angle(FRAC_PI_2 / 2.0),
            theta_b1: Angle(third.asin()),
            theta_b2: Angle(FRAC_PI_2 / 2.0),
        }
    }
}

/// Door-opening angles. Only `phi1` and `phi2` are free; `phi3` always comes
/// from the two-doors-remained-closed condition
/// `cos^2 phi1 + sin^2 phi2 + sin^2 phi3 = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DoorAngles {
    phi1: Angle,
    phi2: Angle,
    phi3: Angle,
}

impl DoorAngles {
    /// Builds the door from its two free angles, rejecting pairs with
    /// `sin phi1 > sin phi2` where no real `phi3` exists.
    pub fn new(phi1: f64, phi2: f64) -> Result<Self> {
        let phi1 = Angle::named("phi1", phi1)?;
        let phi2 = Angle::named("phi2", phi2)?;
        let s3_sq = phi1.sin().powi(2) + phi2.cos().powi(2);
        if s3_sq > 1.0 + 1e-12 {
            return Err(Error::InvalidDoorRegion {
                phi1: phi1.radians(),
                phi2: phi2.radians(),
            });
        }
        let phi3 = Angle(s3_sq.min(1.0).sqrt().asin());
        Ok(Self { phi1, phi2, phi3 })
    }

    /// Projector that fully blocks box `door` (1-based) and leaves the other
    /// two untouched.
    pub fn projector(door: usize) -> Result<Self> {
        match door {
            1 => Self::new(FRAC_PI_2, FRAC_PI_2),
            2 => Self::new(0.0, 0.0),
            3 => Self::new(0.0, FRAC_PI_2),
            _ => Err(Error::InvalidParameter(format!(
                "door index {door} is not in 1..=3"
            ))),
        }
    }

    pub fn phi1(&self) -> Angle {
        self.phi1
    }

    pub fn phi2(&self) -> Angle {
        self.phi2
    }

    pub fn phi3(&self) -> Angle {
        self.phi3
    }

    /// Diagonal of the door-opening operator: `(cos phi1, sin phi2, sin phi3)`.
    pub fn coefficients(&self) -> [f64; 3] {
        [self.phi1.cos(), self.phi2.sin(), self.phi3.sin()]
    }

    /// `cos^2 phi1 + sin^2 phi2 + sin^2 phi3`; equals 2 for every valid door.
    pub fn closure_sum(&self) -> f64 {
        self.coefficients().iter().map(|c| c * c).sum()
    }
}

impl<'de> Deserialize<'de> for DoorAngles {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Free {
            phi1: f64,
            phi2: f64,
        }
        let free = Free::deserialize(deserializer)?;
        DoorAngles::new(free.phi1, free.phi2).map_err(serde::de::Error::custom)
    }
}

/// Free-standing form of [`DoorAngles::new`].
pub fn door_coefficients(phi1: f64, phi2: f64) -> Result<DoorAngles> {
    DoorAngles::new(phi1, phi2)
}
