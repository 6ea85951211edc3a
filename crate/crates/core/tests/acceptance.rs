//! One line per acceptance criterion. Exits non-zero if any criterion fails.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::time::Instant;

use monty_core::game::{Bet, GameSession, HostStrategy, PlayerChoice};
use monty_core::noise::{
    channel_input, detection_density, noisy_win_probabilities, pauli_channel,
    semiclassical_noise_curve, PolarizationDensity,
};
use monty_core::quantum::{configuration_probabilities, entangled_amplitudes, propagate_pure};
use monty_core::stats::{
    find_extrema, noise_sweep, random_expectation, sample_phi_region, sample_rotators,
    strategy_expectation, surface_scan, Method, Quantity, Refiner, SweepQuantity, SweepValues,
};
use monty_core::{GameModel, PauliWeights};
use nalgebra::Matrix4;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const QUAD: Method = Method::Quadrature { nodes: 16 };

struct Report {
    failures: Vec<&'static str>,
}

impl Report {
    fn check(&mut self, name: &'static str, pass: bool, detail: String) {
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            self.failures.push(name);
        }
    }
}

fn model(entangled: bool, p: f64) -> GameModel {
    GameModel::with_noise(entangled, p).unwrap()
}

fn stay_at(phi1: f64, phi2: f64, entangled: bool) -> f64 {
    strategy_expectation(phi1, phi2, &model(entangled, 0.0), &QUAD)
        .unwrap()
        .stay
        .value
}

fn semiclassical_baseline(r: &mut Report) {
    let start = Instant::now();
    let curve = semiclassical_noise_curve(&[0.0], 1).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let (stay, switch) = (curve[0].stay, curve[0].switch);
    let pass =
        (stay - 1.0 / 3.0).abs() < 1e-12 && (switch - 2.0 / 3.0).abs() < 1e-12 && elapsed < 1.0;
    r.check(
        "semiclassical baseline",
        pass,
        format!("P_ns = {stay:.15}, P_s = {switch:.15}, {elapsed:.4} s"),
    );
}

fn random_expectations(r: &mut Report, entangled: bool, target: (f64, f64)) {
    let start = Instant::now();
    let m = model(entangled, 0.0);
    let quad = random_expectation(&m, &QUAD).unwrap();
    let mc = random_expectation(
        &m,
        &Method::MonteCarlo {
            samples: 1_000_000,
            seed: 7,
        },
    )
    .unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let sigma = quad.stay.combined_uncertainty(&mc.stay);
    let z = (quad.stay.value - mc.stay.value).abs() / sigma;
    let pass = (quad.stay.value - target.0).abs() <= 0.003
        && (quad.switch.value - target.1).abs() <= 0.003
        && z <= 4.0
        && elapsed <= 300.0;
    r.check(
        if entangled {
            "random entangled expectations"
        } else {
            "random non-entangled expectations"
        },
        pass,
        format!(
            "quadrature <P_ns> = {:.5} (target {}), <P_s> = {:.5} (target {}); MC <P_ns> = {:.5} +- {:.1e}, |z| = {z:.2}; {elapsed:.1} s",
            quad.stay.value, target.0, quad.switch.value, target.1, mc.stay.value, mc.stay.uncertainty
        ),
    );
}

fn table_two(r: &mut Report) {
    let h = FRAC_PI_2;
    // (label, entangled, quantity, phi1, phi2, target, is max)
    let rows = [
        ("<P_s> max", false, Quantity::Switch, 0.0, h, 0.75, true),
        ("<P_s> min", false, Quantity::Switch, h, h, 0.5908, false),
        ("<P_ns> max", false, Quantity::Stay, 0.0, 0.0, 0.4092, true),
        ("<P_ns> min", false, Quantity::Stay, 0.0, h, 0.25, false),
        ("<P_e,s> max", true, Quantity::Switch, 0.0, h, 0.6487, true),
        ("<P_e,s> min", true, Quantity::Switch, h, h, 0.4003, false),
        ("<P_e,ns> max", true, Quantity::Stay, 0.0, 0.0, 0.5997, true),
        ("<P_e,ns> min", true, Quantity::Stay, 0.0, h, 0.3513, false),
    ];
    let surfaces = [false, true].map(|e| {
        let m = model(e, 0.0);
        (
            surface_scan(PI / 20.0, &m, 16).unwrap(),
            Refiner::new(m, 16),
        )
    });
    let mut pass = true;
    let mut detail = Vec::new();
    for (label, entangled, quantity, phi1, phi2, target, is_max) in rows {
        let at = quantity.from_stay(stay_at(phi1, phi2, entangled));
        let (grid, refiner) = &surfaces[entangled as usize];
        let (max, min) = find_extrema(grid, quantity, Some(refiner)).unwrap();
        let global = if is_max { max.value } else { min.value };
        pass &= (at - target).abs() <= 0.005 && (global - at).abs() <= 0.005;
        detail.push(format!(
            "{label} {at:.4} (target {target}, global {global:.4})"
        ));
    }
    r.check("strategy extrema table", pass, detail.join("; "));
}

fn table_three(r: &mut Report) {
    let h = FRAC_PI_2;
    let imbalance = |phi1, phi2, e| Quantity::Imbalance.from_stay(stay_at(phi1, phi2, e));
    let abs_max = imbalance(0.0, h, false);
    let abs_min = imbalance(h, h, false);
    let e_max = imbalance(0.0, h, true);
    let grid = surface_scan(PI / 20.0, &model(true, 0.0), 16).unwrap();
    let (_, e_min) = find_extrema(&grid, Quantity::Imbalance, None).unwrap();
    let pass = (abs_max - 0.5).abs() <= 0.005
        && (abs_min - 0.1817).abs() <= 0.005
        && (e_max - 0.2973).abs() <= 0.005
        && e_min.value <= 0.005;
    r.check(
        "imbalance extrema table",
        pass,
        format!(
            "P_abs max {abs_max:.4}, min {abs_min:.4}; P_e,abs max {e_max:.4}, grid min {:.5} at ({:.4}, {:.4})",
            e_min.value, e_min.phi1, e_min.phi2
        ),
    );
}

fn analytic_cross_check(r: &mut Report) {
    let v = stay_at(0.0, FRAC_PI_2, false);
    r.check(
        "analytic cross-check",
        (v - 0.25).abs() <= 1e-6,
        format!("<P_ns>(0, pi/2) = {v:.12}, closed form 1/4"),
    );
}

fn noise_behavior(r: &mut Report) {
    let grid: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
    let curve = semiclassical_noise_curve(&grid, 1).unwrap();
    let ratios: Vec<f64> = curve.iter().map(|pt| pt.switch / pt.stay).collect();
    let decreasing = ratios.windows(2).all(|w| w[1] < w[0]);
    let (first, last) = (ratios[0], *ratios.last().unwrap());
    let semi_pass = decreasing && (first - 2.0).abs() < 1e-12 && (last - 11.0 / 7.0).abs() <= 0.02;

    let sweep = noise_sweep(
        &SweepQuantity::RandomExpectation { method: QUAD },
        &[0.0, 0.25, 0.5, 0.75, 1.0],
        true,
    )
    .unwrap();
    let (best_p, best_ratio) = sweep
        .iter()
        .map(|pt| match pt.values {
            SweepValues::Random(pair) => (pt.p, pair.switch.value / pair.stay.value),
            _ => unreachable!(),
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    let random_pass = (best_ratio - 2.17).abs() <= 0.05;

    let extrema = noise_sweep(&SweepQuantity::switch_extrema(), &[1.0], true).unwrap();
    let SweepValues::Extrema { max, min } = extrema[0].values else {
        unreachable!()
    };
    let extrema_pass = (max.value - 0.8).abs() <= 0.05 && (min.value - 0.65).abs() <= 0.05;

    r.check(
        "noise behavior",
        semi_pass && random_pass && extrema_pass,
        format!(
            "semiclassical ratio {first:.4} -> {last:.4} (oracle 11/7), monotone {decreasing}; \
             entangled random ratio max {best_ratio:.4} at p = {best_p} (target 2.17); \
             <P_e,s> at p = 1: max {:.4} at ({:.3}, {:.3}), min {:.4} at ({:.3}, {:.3}) (targets 0.8, 0.65)",
            max.value, max.phi1, max.phi2, min.value, min.phi1, min.phi2
        ),
    );
}

fn random_density(rng: &mut ChaCha8Rng) -> PolarizationDensity {
    let g = Matrix4::from_fn(|_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let m = g * g.adjoint();
    let tr = m.trace();
    PolarizationDensity::new(m / tr).unwrap()
}

fn property_suites(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);

    let mut worst_complement = 0.0f64;
    for _ in 0..10_000 {
        let angles = sample_rotators(&mut rng);
        let door = sample_phi_region(&mut rng);
        let entangled = rng.random_bool(0.5);
        let weights = PauliWeights::equal(rng.random_range(0.0..=1.0)).unwrap();
        if let Ok(w) = noisy_win_probabilities(&angles, &door, entangled, &weights) {
            worst_complement = worst_complement.max((w.stay + w.switch - 1.0).abs());
        }
    }

    let r2 = FRAC_1_SQRT_2;
    let zero = Complex64::new(0.0, 0.0);
    let bell = [zero, Complex64::new(r2, 0.0), Complex64::new(r2, 0.0), zero];
    let mut worst_closed = 0.0f64;
    for _ in 0..1_000 {
        let angles = sample_rotators(&mut rng);
        let door = sample_phi_region(&mut rng);
        let closed = entangled_amplitudes(&angles, &door);
        let composed = propagate_pure(&angles, &door, &bell);
        for i in 0..3 {
            for j in 0..3 {
                worst_closed = worst_closed.max((composed[i][j] - closed[i][j]).norm());
            }
        }
    }

    let (mut worst_trace, mut worst_herm, mut worst_eig) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..1_000 {
        let rho = random_density(&mut rng);
        let mut p = [0.0; 3];
        for v in p.iter_mut() {
            *v = rng.random_range(0.0..1.0 / 3.0);
        }
        let out = pauli_channel(&rho, &PauliWeights::new(p[0], p[1], p[2]).unwrap());
        worst_trace = worst_trace.max((out.trace() - 1.0).abs());
        worst_herm = worst_herm.max(out.hermiticity_defect());
        worst_eig = worst_eig.min(out.min_eigenvalue());
        let angles = sample_rotators(&mut rng);
        let door = sample_phi_region(&mut rng);
        worst_eig = worst_eig.min(detection_density(&angles, &door, &out).min_eigenvalue());
    }
    let channel_pass = worst_trace <= 1e-12 && worst_herm <= 1e-12 && worst_eig >= -1e-10;

    let mut worst_noiseless = 0.0f64;
    for _ in 0..1_000 {
        let angles = sample_rotators(&mut rng);
        let door = sample_phi_region(&mut rng);
        for entangled in [false, true] {
            let pure = configuration_probabilities(&angles, &door, entangled);
            let mixed = noisy_win_probabilities(&angles, &door, entangled, &PauliWeights::none());
            if let (Ok(a), Ok(b)) = (pure, mixed) {
                worst_noiseless = worst_noiseless.max((a.stay - b.stay).abs());
            }
        }
    }
    // unit-trace sanity of the channel input itself
    let input_ok =
        (pauli_channel(&channel_input(true), &PauliWeights::none()).trace() - 1.0).abs() < 1e-12;

    let base = random_expectation(&model(false, 0.0), &QUAD).unwrap();
    let mut worst_invariance = 0.0f64;
    for p in [0.25, 0.5, 1.0] {
        let v = random_expectation(&model(false, p), &QUAD).unwrap();
        worst_invariance = worst_invariance.max((v.stay.value - base.stay.value).abs());
    }
    let invariance_bound = base.stay.uncertainty.max(1e-12);

    let pass = worst_complement <= 1e-12
        && worst_closed <= 1e-12
        && channel_pass
        && input_ok
        && worst_noiseless <= 1e-12
        && worst_invariance <= invariance_bound;
    r.check(
        "property suites",
        pass,
        format!(
            "complementarity {worst_complement:.1e}; closed form vs composition {worst_closed:.1e}; \
             channel trace {worst_trace:.1e}, hermiticity {worst_herm:.1e}, min eigenvalue {worst_eig:.1e}; \
             noiseless reduction {worst_noiseless:.1e}; p-invariance {worst_invariance:.1e}"
        ),
    );
}

fn game_statistics(r: &mut Report) {
    let play = |seed| {
        let mut s = GameSession::new("acceptance", false, 0.0, seed).unwrap();
        let outcomes: Vec<_> = (0..100_000)
            .map(|_| {
                s.play_round(
                    HostStrategy::semiclassical(),
                    PlayerChoice::Uniform,
                    Bet::Switch,
                )
                .unwrap()
            })
            .collect();
        (s.score().switch.frequency().unwrap(), outcomes)
    };
    let (freq, first) = play(11);
    let (_, second) = play(11);
    let identical = first == second;
    r.check(
        "game engine statistics",
        (freq - 2.0 / 3.0).abs() <= 0.01 && identical,
        format!("switch win frequency {freq:.4} over 1e5 plays; replay identical: {identical}"),
    );
}

fn main() {
    let mut r = Report {
        failures: Vec::new(),
    };
    semiclassical_baseline(&mut r);
    random_expectations(&mut r, false, (0.3664, 0.6336));
    random_expectations(&mut r, true, (0.5189, 0.4811));
    table_two(&mut r);
    table_three(&mut r);
    analytic_cross_check(&mut r);
    noise_behavior(&mut r);
    property_suites(&mut r);
    game_statistics(&mut r);
    if !r.failures.is_empty() {
        println!(
            "{} criteria failed: {}",
            r.failures.len(),
            r.failures.join(", ")
        );
        std::process::exit(1);
    }
}
