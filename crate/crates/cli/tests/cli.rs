use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn plesim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plesim")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn gamma_hat(out: &Output) -> f64 {
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).expect("json on stdout");
    v["gamma_hat"].as_f64().expect("gamma_hat")
}

#[test]
fn theory_prints_six_significant_digits() {
    let out = plesim(&["theory", "--op", "mean-interference", "--lambda", "1", "--p", "0.05", "--gamma", "4", "--a", "1"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "0.157080\n");
    let out = plesim(&["theory", "--op", "energy-ratio", "--hops", "1", "--gamma", "3"]);
    assert_eq!(stdout(&out), "1.00000\n");
}

#[test]
fn outage_estimate_from_sir_samples() {
    // sample fractions above 10 and above 1 follow the closed-form success
    // probabilities at gamma = 3 (lambda = 1, p = 0.05, Rayleigh)
    let delta = 2.0 / 3.0;
    let c = 0.05 * std::f64::consts::PI * libm_gamma(1.0 + delta) * libm_gamma(1.0 - delta);
    let n = 200_000usize;
    let k1 = (n as f64 * (-c * 10f64.powf(delta)).exp()).round() as usize;
    let k2 = (n as f64 * (-c).exp()).round() as usize;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sirs.csv");
    let mut body = String::from("sir\n");
    for i in 0..n {
        body.push_str(if i < k1 { "20\n" } else if i < k2 { "5\n" } else { "0.5\n" });
    }
    fs::write(&path, body).unwrap();
    let out = plesim(&["estimate", "--algo", "outage", "--theta1-db", "10", "--theta2-db", "0", "--sirs", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!((gamma_hat(&out) - 3.0).abs() < 0.01, "{}", stdout(&out));
}

/// Γ(x) for x in (0, 3) via a Lanczos approximation; enough for a test oracle.
fn libm_gamma(x: f64) -> f64 {
    const G: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    let x = x - 1.0;
    let t = x + 7.5;
    let a = G.iter().enumerate().skip(1).fold(G[0], |acc, (i, g)| acc + g / (x + i as f64));
    (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

fn simulate_into(dir: &Path, name: &str) -> Vec<u8> {
    let path = dir.join(name);
    let out = plesim(&["--seed", "9", "simulate", "--slots", "400", "--gamma", "3.5", "--near-field", "off", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    fs::read(path).unwrap()
}

#[test]
fn simulate_then_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let a = simulate_into(dir.path(), "a.csv");
    let b = simulate_into(dir.path(), "b.csv");
    assert_eq!(a, b);
    assert!(String::from_utf8_lossy(&a).starts_with("slot,total_power,n_tx,strongest_power\n"));
    let trace = dir.path().join("a.csv");
    let trace = trace.to_str().unwrap();
    for algo in ["txset", "outage", "ks"] {
        let out = plesim(&["estimate", "--algo", algo, "--trace", trace]);
        assert!(out.status.success(), "{algo}: {}", String::from_utf8_lossy(&out.stderr));
        let g = gamma_hat(&out);
        assert!(g > 2.0 && g < 8.0, "{algo}: {g}");
    }
    let out = plesim(&["estimate", "--algo", "nakagami", "--trace", trace, "--lambda", "1", "--p", "0.05"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap_or_default();
    // the variance inversion may legitimately be invalid on a short trace; either way it must not be a usage error
    assert!(out.status.success() && v["m_hat"].is_number() || out.status.code() == Some(2));
}

#[test]
fn experiment_reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let out_dir = dir.path().join(sub);
        let out = plesim(&[
            "--seed", "4", "--threads", "2", "experiment", "mse-sweep", "--realizations", "3", "--slots", "300",
            "--gammas", "3,4", "--algos", "mean,txset", "--out", out_dir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        (fs::read(out_dir.join("mse-sweep.csv")).unwrap(), fs::read(out_dir.join("mse-sweep.json")).unwrap())
    };
    let first = run("a");
    assert_eq!(first, run("b"));
    let csv = String::from_utf8(first.0).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "experiment,algorithm,model,gamma_true,m,param,n_slots,n_realizations,rel_mse,bias,failure_rate"
    );
    assert_eq!(csv.lines().count(), 1 + 2 * 2 * 2);
}

#[test]
fn exit_codes() {
    assert_eq!(plesim(&["theory", "--bogus"]).status.code(), Some(1));
    assert_eq!(plesim(&["--help"]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"n0_dbm": -25, "speed": 3}"#).unwrap();
    let out = plesim(&["--config", cfg.to_str().unwrap(), "selftest"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("speed"));

    // every sample fails both thresholds: a runtime, not a usage, error
    let sirs = dir.path().join("low.csv");
    fs::write(&sirs, "sir\n0.1\n0.2\n").unwrap();
    let out = plesim(&["estimate", "--algo", "outage", "--sirs", sirs.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_values_apply_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"seed": 9, "gamma": 3.5, "n_slots": 400, "near_field": "off"}"#).unwrap();
    let from_file = dir.path().join("f.csv");
    let out = plesim(&["--config", cfg.to_str().unwrap(), "simulate", "--out", from_file.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(fs::read(&from_file).unwrap(), simulate_into(dir.path(), "flags.csv"));
    let overridden = dir.path().join("o.csv");
    plesim(&["--config", cfg.to_str().unwrap(), "simulate", "--slots", "10", "--out", overridden.to_str().unwrap()]);
    assert_eq!(fs::read_to_string(&overridden).unwrap().lines().count(), 11);
}

#[test]
fn selftest_passes() {
    let out = plesim(&["selftest"]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).lines().all(|l| l.starts_with("PASS")));
}
