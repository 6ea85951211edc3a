use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("angle {name} = {value} is outside [0, pi/2]")]
    InvalidAngle { name: &'static str, value: f64 },

    #[error("door angles (phi1 = {phi1}, phi2 = {phi2}) violate sin(phi1) <= sin(phi2)")]
    InvalidDoorRegion { phi1: f64, phi2: f64 },

    #[error("door opening annihilates the state (norm {norm:e})")]
    DegenerateDoorOpening { norm: f64 },

    #[error("invalid Pauli weights ({p_x}, {p_y}, {p_z})")]
    InvalidWeights { p_x: f64, p_y: f64, p_z: f64 },

    #[error("invalid box count: n = {n}, m = {m} (need n >= 2 and m <= n - 2)")]
    InvalidBoxCount { n: u64, m: u64 },

    #[error("{0}")]
    InvalidParameter(String),

    #[error("action {action} is not allowed in phase {phase}")]
    IllegalPhaseTransition {
        phase: &'static str,
        action: &'static str,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
