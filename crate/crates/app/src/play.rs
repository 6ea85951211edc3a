//! Terminal game against a computer host.

use std::io::{BufRead, Write};

use monty_core::game::{
    Action, Bet, DoorPolicy, HostStrategy, Phase, PlayerChoice, PrizePlacement,
};
use monty_core::{Error as CoreError, GameSession};

use crate::error::AppResult;

fn prompt<R: BufRead, W: Write>(
    input: &mut R,
    out: &mut W,
    text: &str,
) -> AppResult<Option<String>> {
    write!(out, "{text}")?;
    out.flush()?;
    let mut line = String::new();
    if input.read_line(&mut line)? == 0 {
        return Ok(None);
    }
    Ok(Some(line.trim().to_lowercase()))
}

/// `1`-`3`, `u`, or two angles in radians.
pub fn parse_choice(text: &str) -> Option<PlayerChoice> {
    match text {
        "1" | "2" | "3" => Some(PlayerChoice::Box {
            number: text.parse().ok()?,
        }),
        "u" | "uniform" => Some(PlayerChoice::Uniform),
        _ => {
            let parts: Vec<f64> = text
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .ok()?;
            match parts[..] {
                [theta_a1, theta_a2] => Some(PlayerChoice::Angles { theta_a1, theta_a2 }),
                _ => None,
            }
        }
    }
}

pub fn parse_bet(text: &str) -> Option<Bet> {
    match text {
        "s" | "switch" => Some(Bet::Switch),
        "k" | "stay" | "keep" => Some(Bet::Stay),
        _ => None,
    }
}

fn describe_door(policy: DoorPolicy) -> &'static str {
    match policy {
        DoorPolicy::RandomProjector | DoorPolicy::Projector { .. } => "blocks one box",
        _ => "attenuates the boxes",
    }
}

/// A random projector may block the only box holding amplitude; the host
/// then draws again.
fn open_door(session: &mut GameSession) -> AppResult<()> {
    let mut attempts = 0;
    loop {
        match session.advance(Action::OpenDoor) {
            Err(CoreError::DegenerateDoorOpening { .. }) if attempts < 32 => attempts += 1,
            other => return other.map(drop).map_err(Into::into),
        }
    }
}

/// Plays rounds until the input ends or the player declines another round.
pub fn run<R: BufRead, W: Write>(
    session: &mut GameSession,
    host: HostStrategy,
    mut input: R,
    mut out: W,
) -> AppResult<()> {
    writeln!(
        out,
        "Quantum Monty Hall ({} source, noise p = {}). The host hides the prize; pick a box.",
        if session.entangled {
            "entangled"
        } else {
            "separable"
        },
        session.noise_p
    )?;
    loop {
        if session.phase() == Phase::Resolved {
            session.advance(Action::NextRound)?;
        }
        session.advance(Action::HostPrepare { strategy: host })?;
        loop {
            let Some(line) = prompt(
                &mut input,
                &mut out,
                "box [1/2/3], u for uniform, or two angles: ",
            )?
            else {
                return Ok(());
            };
            match parse_choice(&line) {
                Some(c) => match session.advance(Action::PlayerChoose { choice: c }) {
                    Ok(_) => break,
                    Err(e) => writeln!(out, "{e}")?,
                },
                None => writeln!(out, "could not read {line:?}")?,
            }
        }
        open_door(session)?;
        writeln!(
            out,
            "The host opens a door: the filter {}.",
            describe_door(host.door_policy)
        )?;
        let bet = loop {
            let Some(line) = prompt(&mut input, &mut out, "switch (s) or stay (k)? ")? else {
                return Ok(());
            };
            match parse_bet(&line) {
                Some(b) => break b,
                None => writeln!(out, "could not read {line:?}")?,
            }
        };
        session.advance(Action::PlaceBet { bet })?;
        session.advance(Action::Resolve)?;
        let view = session.public_view();
        let reveal = view.reveal.expect("resolved round is revealed");
        let o = reveal.outcome;
        writeln!(
            out,
            "Detectors ({}, {}) fired: you {}.",
            o.i,
            o.j,
            if o.win { "win" } else { "lose" }
        )?;
        writeln!(
            out,
            "Host prize angles ({:.4}, {:.4}), door angles ({:.4}, {:.4}); this configuration pays stay {:.4}, switch {:.4}.",
            reveal.theta_b1,
            reveal.theta_b2,
            reveal.door.phi1().radians(),
            reveal.door.phi2().radians(),
            reveal.probabilities.stay,
            reveal.probabilities.switch
        )?;
        let score = session.score();
        writeln!(
            out,
            "Score: switch {}/{}, stay {}/{}.",
            score.switch.wins,
            score.switch.plays(),
            score.stay.wins,
            score.stay.plays()
        )?;
        match prompt(&mut input, &mut out, "again? [y/n] ")? {
            Some(a) if a.is_empty() || a.starts_with('y') => {}
            _ => return Ok(()),
        }
    }
}

/// Host presets accepted by `play --prize`.
pub fn prize_from_name(name: &str) -> Option<PrizePlacement> {
    match name {
        "uniform" => Some(PrizePlacement::Uniform),
        "1" | "2" | "3" => Some(PrizePlacement::Box {
            number: name.parse().ok()?,
        }),
        _ => None,
    }
}
