use monty_core::game::{Bet, DoorPolicy, GameSession, HostStrategy, PlayerChoice, PrizePlacement};
use monty_core::quantum::WinProbabilities;

fn switch_frequency_matches(
    entangled: bool,
    noise_p: f64,
    host: HostStrategy,
    choice: PlayerChoice,
) {
    let mut s = GameSession::new("freq", entangled, noise_p, 77).unwrap();
    s.play_round(host, choice, Bet::Switch).unwrap();
    let p_s = WinProbabilities::from_coincidences(&s.coincidences().unwrap())
        .unwrap()
        .switch;
    let n = 100_000;
    for _ in 1..n {
        s.play_round(host, choice, Bet::Switch).unwrap();
    }
    let f = s.score().switch.frequency().unwrap();
    let se = (p_s * (1.0 - p_s) / n as f64).sqrt();
    assert!(
        (f - p_s).abs() <= 5.0 * se,
        "frequency {f}, p_s {p_s}, se {se}"
    );
}

#[test]
fn fixed_door_entangled_noisy() {
    let host = HostStrategy {
        prize: PrizePlacement::Angles {
            theta_b1: 0.4,
            theta_b2: 1.1,
        },
        door_policy: DoorPolicy::Fixed {
            phi1: 0.3,
            phi2: 0.9,
        },
    };
    let choice = PlayerChoice::Angles {
        theta_a1: 0.7,
        theta_a2: 0.2,
    };
    switch_frequency_matches(true, 0.6, host, choice);
}

#[test]
fn help_alice_separable() {
    let host = HostStrategy {
        prize: PrizePlacement::Uniform,
        door_policy: DoorPolicy::HelpAlice,
    };
    switch_frequency_matches(false, 0.0, host, PlayerChoice::Uniform);
}

#[test]
fn presets_resolve_to_documented_doors() {
    let mut s = GameSession::new("p", true, 0.0, 1).unwrap();
    let host = HostStrategy {
        prize: PrizePlacement::Uniform,
        door_policy: DoorPolicy::HurtAlice,
    };
    s.play_round(host, PlayerChoice::Uniform, Bet::Stay)
        .unwrap();
    let door = s.door().unwrap();
    assert!((door.phi1().radians() - std::f64::consts::PI / 20.0).abs() < 1e-15);
    assert!((door.phi2().radians() - std::f64::consts::FRAC_PI_4).abs() < 1e-15);

    let mut s = GameSession::new("q", false, 0.0, 1).unwrap();
    s.play_round(host, PlayerChoice::Uniform, Bet::Stay)
        .unwrap();
    assert!(s.door().unwrap().coefficients()[0].abs() < 1e-15);
}
