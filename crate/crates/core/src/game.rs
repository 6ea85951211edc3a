//! Single-shot game sessions.
//!
//! A round runs `Created -> HostPrepared -> PlayerChosen -> DoorOpened ->
//! BetPlaced -> Resolved`. The player bets on a coincidence class (diagonal
//! for `stay`, off-diagonal for `switch`) before one detector pair is sampled
//! from the game's coincidence distribution. The host's configuration stays
//! out of [`GameSession::public_view`] until the round is resolved.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::angle::{DoorAngles, RotatorAngles};
use crate::error::{Error, Result};
use crate::model::GameModel;
use crate::noise::DetectionDensity;
use crate::quantum::{JointState, WinProbabilities, DEGENERACY_THRESHOLD};

/// Anything that assigns a (possibly unnormalized) weight to each detector
/// pair.
pub trait CoincidenceSource {
    fn coincidence_weights(&self) -> [[f64; 3]; 3];
}

impl CoincidenceSource for JointState {
    fn coincidence_weights(&self) -> [[f64; 3]; 3] {
        self.probabilities()
    }
}

impl CoincidenceSource for DetectionDensity {
    fn coincidence_weights(&self) -> [[f64; 3]; 3] {
        self.coincidences()
    }
}

impl CoincidenceSource for [[f64; 3]; 3] {
    fn coincidence_weights(&self) -> [[f64; 3]; 3] {
        *self
    }
}

/// Draws a 1-based detector pair `(i, j)` with probability proportional to
/// its coincidence weight.
pub fn sample_outcome<S, R>(source: &S, rng: &mut R) -> Result<(usize, usize)>
where
    S: CoincidenceSource + ?Sized,
    R: Rng + ?Sized,
{
    let weights = source.coincidence_weights();
    let flat: Vec<f64> = weights.iter().flatten().map(|w| w.max(0.0)).collect();
    let total: f64 = flat.iter().sum();
    if total < DEGENERACY_THRESHOLD {
        return Err(Error::DegenerateDoorOpening { norm: total });
    }
    let index = WeightedIndex::new(&flat)
        .map_err(|e| Error::InvalidParameter(format!("bad coincidence weights: {e}")))?
        .sample(rng);
    Ok((index / 3 + 1, index % 3 + 1))
}

/// Where the host puts the prize.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PrizePlacement {
    /// A classical box, 1..=3.
    Box {
        number: usize,
    },
    /// Equal amplitude in every box.
    Uniform,
    Angles {
        theta_b1: f64,
        theta_b2: f64,
    },
}

impl PrizePlacement {
    /// `(theta_b1, theta_b2)` producing this placement.
    pub fn angles(&self) -> Result<(f64, f64)> {
        match *self {
            PrizePlacement::Box { number: 1 } => Ok((0.0, 0.0)),
            PrizePlacement::Box { number: 2 } => Ok((0.0, FRAC_PI_2)),
            PrizePlacement::Box { number: 3 } => Ok((FRAC_PI_2, 0.0)),
            PrizePlacement::Box { number } => Err(box_error(number)),
            PrizePlacement::Uniform => Ok(((1.0f64 / 3.0).sqrt().asin(), FRAC_PI_4)),
            PrizePlacement::Angles { theta_b1, theta_b2 } => Ok((theta_b1, theta_b2)),
        }
    }
}

/// How the host opens a door.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DoorPolicy {
    /// One of the three projector doors, uniformly at random.
    RandomProjector,
    /// Fully block box `door`.
    Projector {
        door: usize,
    },
    Fixed {
        phi1: f64,
        phi2: f64,
    },
    /// Door angles maximizing the player's switching advantage.
    HelpAlice,
    /// Door angles minimizing it.
    HurtAlice,
}

impl DoorPolicy {
    fn resolve<R: Rng + ?Sized>(&self, entangled: bool, rng: &mut R) -> Result<DoorAngles> {
        match *self {
            DoorPolicy::RandomProjector => DoorAngles::projector(rng.random_range(1..=3)),
            DoorPolicy::Projector { door } => DoorAngles::projector(door),
            DoorPolicy::Fixed { phi1, phi2 } => DoorAngles::new(phi1, phi2),
            DoorPolicy::HelpAlice => DoorAngles::new(0.0, FRAC_PI_2),
            DoorPolicy::HurtAlice if entangled => DoorAngles::new(PI / 20.0, FRAC_PI_4),
            DoorPolicy::HurtAlice => DoorAngles::new(FRAC_PI_2, FRAC_PI_2),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            DoorPolicy::Projector { door } => DoorAngles::projector(door).map(drop),
            DoorPolicy::Fixed { phi1, phi2 } => DoorAngles::new(phi1, phi2).map(drop),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HostStrategy {
    pub prize: PrizePlacement,
    pub door_policy: DoorPolicy,
}

impl HostStrategy {
    /// Equal-amplitude prize with a random projector door.
    pub fn semiclassical() -> Self {
        Self {
            prize: PrizePlacement::Uniform,
            door_policy: DoorPolicy::RandomProjector,
        }
    }
}

/// The player's initial choice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PlayerChoice {
    Box { number: usize },
    Uniform,
    Angles { theta_a1: f64, theta_a2: f64 },
}

impl PlayerChoice {
    /// `(theta_a1, theta_a2)` producing this choice.
    pub fn angles(&self) -> Result<(f64, f64)> {
        match *self {
            PlayerChoice::Box { number: 1 } => Ok((FRAC_PI_2, 0.0)),
            PlayerChoice::Box { number: 2 } => Ok((FRAC_PI_2, FRAC_PI_2)),
            PlayerChoice::Box { number: 3 } => Ok((0.0, 0.0)),
            PlayerChoice::Box { number } => Err(box_error(number)),
            PlayerChoice::Uniform => Ok(((1.0f64 / 3.0).sqrt().acos(), FRAC_PI_4)),
            PlayerChoice::Angles { theta_a1, theta_a2 } => Ok((theta_a1, theta_a2)),
        }
    }
}

fn box_error(number: usize) -> Error {
    Error::InvalidParameter(format!("box {number} is not in 1..=3"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bet {
    Stay,
    Switch,
}

impl Bet {
    /// Whether detector pair `(i, j)` pays out for this bet.
    pub fn wins(self, i: usize, j: usize) -> bool {
        match self {
            Bet::Stay => i == j,
            Bet::Switch => i != j,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    Created,
    HostPrepared,
    PlayerChosen,
    DoorOpened,
    BetPlaced,
    Resolved,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::Created => "created",
            Phase::HostPrepared => "host-prepared",
            Phase::PlayerChosen => "player-chosen",
            Phase::DoorOpened => "door-opened",
            Phase::BetPlaced => "bet-placed",
            Phase::Resolved => "resolved",
        }
    }
}

/// Sampled detector pair, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub i: usize,
    pub j: usize,
    pub win: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub wins: u64,
    pub losses: u64,
}

impl Tally {
    pub fn plays(&self) -> u64 {
        self.wins + self.losses
    }

    pub fn frequency(&self) -> Option<f64> {
        (self.plays() > 0).then(|| self.wins as f64 / self.plays() as f64)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Score {
    pub stay: Tally,
    pub switch: Tally,
}

impl Score {
    fn record(&mut self, bet: Bet, win: bool) {
        let tally = match bet {
            Bet::Stay => &mut self.stay,
            Bet::Switch => &mut self.switch,
        };
        if win {
            tally.wins += 1;
        } else {
            tally.losses += 1;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "kebab-case")]
pub enum Action {
    HostPrepare {
        strategy: HostStrategy,
    },
    PlayerChoose {
        choice: PlayerChoice,
    },
    OpenDoor,
    PlaceBet {
        bet: Bet,
    },
    Resolve,
    /// Starts another round in the same session, keeping the score.
    NextRound,
}

impl Action {
    pub fn name(&self) -> &'static str {
        match self {
            Action::HostPrepare { .. } => "host-prepare",
            Action::PlayerChoose { .. } => "player-choose",
            Action::OpenDoor => "open-door",
            Action::PlaceBet { .. } => "place-bet",
            Action::Resolve => "resolve",
            Action::NextRound => "next-round",
        }
    }

    fn required_phase(&self) -> Phase {
        match self {
            Action::HostPrepare { .. } => Phase::Created,
            Action::PlayerChoose { .. } => Phase::HostPrepared,
            Action::OpenDoor => Phase::PlayerChosen,
            Action::PlaceBet { .. } => Phase::DoorOpened,
            Action::Resolve => Phase::BetPlaced,
            Action::NextRound => Phase::Resolved,
        }
    }
}

/// Everything revealed once a round is resolved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reveal {
    pub host: HostStrategy,
    pub theta_b1: f64,
    pub theta_b2: f64,
    pub door: DoorAngles,
    pub outcome: Outcome,
    /// Stay/switch probabilities of the configuration that was played.
    pub probabilities: WinProbabilities,
}

/// Full session record, host configuration included. Use
/// [`GameSession::public_view`] for anything shown to the player.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GameSession {
    pub id: String,
    pub entangled: bool,
    pub noise_p: f64,
    pub seed: u64,
    pub round: u64,
    phase: Phase,
    host: Option<HostStrategy>,
    player: Option<PlayerChoice>,
    door: Option<DoorAngles>,
    bet: Option<Bet>,
    outcome: Option<Outcome>,
    score: Score,
    rng: ChaCha8Rng,
}

/// What the player may see. Host fields are present only after resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublicSessionView {
    pub id: String,
    pub phase: Phase,
    pub entangled: bool,
    pub noise_p: f64,
    pub round: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub player_choice: Option<PlayerChoice>,
    pub door_opened: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bet: Option<Bet>,
    pub score: Score,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reveal: Option<Reveal>,
}

impl GameSession {
    pub fn new(id: impl Into<String>, entangled: bool, noise_p: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&noise_p) {
            return Err(Error::InvalidParameter(format!(
                "noise p = {noise_p} is outside [0, 1]"
            )));
        }
        Ok(Self {
            id: id.into(),
            entangled,
            noise_p,
            seed,
            round: 1,
            phase: Phase::Created,
            host: None,
            player: None,
            door: None,
            bet: None,
            outcome: None,
            score: Score::default(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn score(&self) -> Score {
        self.score
    }

    pub fn outcome(&self) -> Option<Outcome> {
        self.outcome
    }

    pub fn door(&self) -> Option<DoorAngles> {
        self.door
    }

    fn model(&self) -> Result<GameModel> {
        GameModel::with_noise(self.entangled, self.noise_p)
    }

    /// Rotator angles of the current round, once both sides have chosen.
    pub fn rotator_angles(&self) -> Result<RotatorAngles> {
        let missing = || Error::InvalidParameter("host and player have not both chosen".into());
        let (b1, b2) = self.host.ok_or_else(missing)?.prize.angles()?;
        let (a1, a2) = self.player.ok_or_else(missing)?.angles()?;
        RotatorAngles::new(a1, a2, b1, b2)
    }

    /// Unnormalized coincidence weights of the current configuration.
    pub fn coincidences(&self) -> Result<[[f64; 3]; 3]> {
        let door = self
            .door
            .ok_or_else(|| Error::InvalidParameter("no door has been opened".into()))?;
        Ok(self.model()?.coincidences(&self.rotator_angles()?, &door))
    }

    /// Applies one action. On error the session is left unchanged.
    pub fn advance(&mut self, action: Action) -> Result<Phase> {
        if action.required_phase() != self.phase {
            return Err(Error::IllegalPhaseTransition {
                phase: self.phase.name(),
                action: action.name(),
            });
        }
        match action {
            Action::HostPrepare { strategy } => {
                let (b1, b2) = strategy.prize.angles()?;
                RotatorAngles::new(0.0, 0.0, b1, b2)?;
                strategy.door_policy.validate()?;
                self.host = Some(strategy);
                self.phase = Phase::HostPrepared;
            }
            Action::PlayerChoose { choice } => {
                let (a1, a2) = choice.angles()?;
                RotatorAngles::new(a1, a2, 0.0, 0.0)?;
                self.player = Some(choice);
                self.phase = Phase::PlayerChosen;
            }
            Action::OpenDoor => {
                let host = self.host.expect("host prepared before door opening");
                let mut rng = self.rng.clone();
                let door = host.door_policy.resolve(self.entangled, &mut rng)?;
                let weights = self.model()?.coincidences(&self.rotator_angles()?, &door);
                let total: f64 = weights.iter().flatten().sum();
                if total < DEGENERACY_THRESHOLD {
                    // the rng still advances so a random policy can draw a
                    // different door on the next attempt
                    self.rng = rng;
                    return Err(Error::DegenerateDoorOpening { norm: total });
                }
                self.rng = rng;
                self.door = Some(door);
                self.phase = Phase::DoorOpened;
            }
            Action::PlaceBet { bet } => {
                self.bet = Some(bet);
                self.phase = Phase::BetPlaced;
            }
            Action::Resolve => {
                let weights = self.coincidences()?;
                let (i, j) = sample_outcome(&weights, &mut self.rng)?;
                let bet = self.bet.expect("bet placed before resolution");
                let win = bet.wins(i, j);
                self.outcome = Some(Outcome { i, j, win });
                self.score.record(bet, win);
                self.phase = Phase::Resolved;
            }
            Action::NextRound => {
                self.host = None;
                self.player = None;
                self.door = None;
                self.bet = None;
                self.outcome = None;
                self.round += 1;
                self.phase = Phase::Created;
            }
        }
        Ok(self.phase)
    }

    fn reveal(&self) -> Option<Reveal> {
        if self.phase != Phase::Resolved {
            return None;
        }
        let host = self.host?;
        let (theta_b1, theta_b2) = host.prize.angles().ok()?;
        let probabilities = WinProbabilities::from_coincidences(&self.coincidences().ok()?).ok()?;
        Some(Reveal {
            host,
            theta_b1,
            theta_b2,
            door: self.door?,
            outcome: self.outcome?,
            probabilities,
        })
    }

    pub fn public_view(&self) -> PublicSessionView {
        PublicSessionView {
            id: self.id.clone(),
            phase: self.phase,
            entangled: self.entangled,
            noise_p: self.noise_p,
            round: self.round,
            player_choice: self.player,
            door_opened: self.door.is_some(),
            bet: self.bet,
            score: self.score,
            reveal: self.reveal(),
        }
    }

    /// Plays a full round with the given choices and returns the outcome.
    pub fn play_round(
        &mut self,
        host: HostStrategy,
        choice: PlayerChoice,
        bet: Bet,
    ) -> Result<Outcome> {
        if self.phase == Phase::Resolved {
            self.advance(Action::NextRound)?;
        }
        self.advance(Action::HostPrepare { strategy: host })?;
        self.advance(Action::PlayerChoose { choice })?;
        self.advance(Action::OpenDoor)?;
        self.advance(Action::PlaceBet { bet })?;
        self.advance(Action::Resolve)?;
        Ok(self.outcome.expect("resolved round has an outcome"))
    }
}
