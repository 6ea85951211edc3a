//! Quantum-optical Monty Hall game.
//!
//! Two polarization photons pass through rotator chains and polarizing beam
//! splitters onto three detectors each. The player's photon picks a box, the
//! host's photon hides the prize, and a door-opening operator acts on the
//! host's amplitudes. Coincidence `(i, i)` pays the player for staying, any
//! `(i, j)` with `i != j` pays for switching.

pub mod angle;
pub mod classical;
pub mod error;
pub mod game;
pub mod model;
pub mod noise;
pub mod quadrature;
pub mod quantum;
pub mod stats;

pub use angle::{Angle, DoorAngles, RotatorAngles};
pub use error::{Error, Result};
pub use game::{Action, Bet, GameSession, HostStrategy, Phase, PlayerChoice, PublicSessionView};
pub use model::GameModel;
pub use noise::PauliWeights;
pub use quantum::{JointState, WinProbabilities};
