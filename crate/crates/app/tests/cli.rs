use std::io::Write;
use std::process::{Command, Output, Stdio};

fn monty(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monty"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key))
        .and_then(|rest| {
            rest.trim_start_matches([' ', '='])
                .split_whitespace()
                .next()
        })
        .and_then(|v| v.parse().ok())
        .unwrap_or_else(|| panic!("no {key} in {text}"))
}

#[test]
fn semiclassical_prints_thirds() {
    let o = monty(&["semiclassical"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("P_ns = 0.333333"), "{text}");
    assert!(text.contains("P_s = 0.666667"), "{text}");
}

#[test]
fn random_expectation_by_quadrature() {
    let o = monty(&["random-expectation", "--method", "quad:16"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!((field(&text, "<P_ns>") - 0.3664).abs() <= 0.003, "{text}");
    assert!((field(&text, "<P_s>") - 0.6336).abs() <= 0.003, "{text}");
}

#[test]
fn validation_errors_exit_with_two() {
    for args in [
        &["random-expectation", "--method", "mc:1000"][..],
        &["random-expectation", "--noise-p", "1.5"],
        &["random-expectation", "--method", "quad:2"],
        &["strategy-surface", "--step", "2"],
        &["semiclassical", "--door", "4"],
        &["extrema", "--quantity", "nonsense"],
        &["no-such-command"],
    ] {
        let o = monty(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn missing_surface_file_is_not_a_validation_error() {
    let o = monty(&["extrema", "--surface", "/nonexistent/surface.csv"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn surface_then_extrema() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let path = path.to_str().unwrap();
    let o = monty(&["strategy-surface", "--step", "pi/20", "--out", path]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = monty(&["extrema", "--quantity", "switch", "--surface", path]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!((field(&text, "max switch") - 0.75).abs() <= 0.005, "{text}");
    assert!(
        (field(&text, "min switch") - 0.5908).abs() <= 0.005,
        "{text}"
    );
}

#[test]
fn identical_flags_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let o = monty(&[
            "noise-sweep",
            "--quantity",
            "random",
            "--entangled",
            "--method",
            "mc:20000",
            "--seed",
            "9",
            "--grid",
            "0,0.5,1",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(path).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    assert!(String::from_utf8(a)
        .unwrap()
        .starts_with("p,p_ns,p_s,ratio\n"));
}

#[test]
fn tables_print_targets_and_deltas() {
    let o = monty(&["table2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 9);
    for line in text.lines().skip(1) {
        let delta: f64 = line.split_whitespace().last().unwrap().parse().unwrap();
        assert!(delta <= 0.005, "{line}");
    }
}

#[test]
fn scripted_terminal_game() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_monty"))
        .args(["play", "--seed", "4", "--prize", "2"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"1\ns\ny\nu\nk\nn\n")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.matches("Detectors (").count(), 2, "{text}");
    assert!(text.contains("Score: switch"), "{text}");
}
