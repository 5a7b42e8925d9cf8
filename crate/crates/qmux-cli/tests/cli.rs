//! End-to-end checks of the `qmux-sim` binary: CSV contracts, determinism,
//! config precedence, exit codes.

use std::process::{Command, Output};

fn qmux_sim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmux-sim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn assert_csv_shape(body: &str, columns: usize) {
    let mut lines = body.lines();
    let header = lines.next().expect("header row");
    assert_eq!(header.split(',').count(), columns);
    let mut rows = 0;
    for line in lines {
        assert_eq!(line.split(',').count(), columns, "row: {line}");
        rows += 1;
    }
    assert!(rows >= 1, "need at least one data row");
    assert!(!body.contains('\r'));
    assert!(body.ends_with('\n'));
}

#[test]
fn fidelity_sweep_reproduces_the_50km_points() {
    let out = qmux_sim(&["fidelity-vs-distance"]);
    assert!(out.status.success());
    let body = stdout(&out);
    assert_csv_shape(&body, 3);
    assert_eq!(body.lines().count(), 72); // header + 0..=70
    let row50 = body
        .lines()
        .find(|l| l.starts_with("50.0"))
        .expect("L = 50 row");
    assert!(row50.contains("0.794028968501"), "{row50}");
    assert!(row50.contains("0.647772316970"), "{row50}");
}

#[test]
fn purification_ratio_starts_at_three() {
    let out = qmux_sim(&["ratio-purification", "--k", "1"]);
    assert!(out.status.success());
    let body = stdout(&out);
    assert_csv_shape(&body, 4);
    let first = body.lines().nth(1).unwrap();
    let ratio = first.split(',').next_back().unwrap();
    assert_eq!(ratio, "3.00000000000");
}

#[test]
fn ec_ratio_raw_column_is_constant() {
    let out = qmux_sim(&["ratio-ec", "--L-max", "10"]);
    assert!(out.status.success());
    let body = stdout(&out);
    assert_csv_shape(&body, 4);
    for line in body.lines().skip(1) {
        let raw = line.split(',').nth(2).unwrap();
        assert_eq!(raw, "1.70000000000", "{line}");
    }
}

#[test]
fn repeater_ratio_crosses_one_in_band() {
    let out = qmux_sim(&["ratio-repeater"]);
    assert!(out.status.success());
    let body = stdout(&out);
    assert_csv_shape(&body, 3);
    let mut crossing = None;
    let mut last: Option<(f64, f64)> = None;
    for line in body.lines().skip(1) {
        let cells: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        let (l, normalized) = (cells[0], cells[2]);
        if let Some((l_prev, prev)) = last {
            if prev >= 1.0 && normalized < 1.0 {
                crossing = Some((l_prev + l) / 2.0);
            }
        }
        last = Some((l, normalized));
    }
    let crossing = crossing.expect("normalized ratio crosses 1");
    assert!((40.0..=60.0).contains(&crossing), "crossover at {crossing}");
}

#[test]
fn two_round_ratio_minimum_sits_near_18km() {
    let out = qmux_sim(&["ratio-purification", "--k", "2", "--L-step", "0.5"]);
    assert!(out.status.success());
    let body = stdout(&out);
    let mut best = (f64::NAN, f64::INFINITY);
    for line in body.lines().skip(1) {
        let cells: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        if cells[3] < best.1 {
            best = (cells[0], cells[3]);
        }
    }
    assert!((best.0 - 18.0).abs() <= 0.5, "minimum at {} km", best.0);
    assert!((best.1 - 6.569).abs() < 0.01, "minimum value {}", best.1);
}

#[test]
fn cost_sweep_is_monotone() {
    let out = qmux_sim(&["cost-sweep", "--L", "30"]);
    assert!(out.status.success());
    let body = stdout(&out);
    assert_csv_shape(&body, 2);
    let mut last = f64::INFINITY;
    for line in body.lines().skip(1) {
        let v: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(v < last);
        last = v;
    }
}

#[test]
fn waiting_time_analytic_and_monte_carlo() {
    let out = qmux_sim(&[
        "waiting-time",
        "--n",
        "3",
        "--p0",
        "0.5",
        "--trials",
        "200000",
        "--seed",
        "7",
    ]);
    assert!(out.status.success());
    let body = stdout(&out);
    assert_csv_shape(&body, 6);
    let n3 = body.lines().nth(3).expect("N = 3 row");
    let cells: Vec<f64> = n3.split(',').map(|x| x.parse().unwrap()).collect();
    assert!((cells[2] - 22.0 / 7.0).abs() < 1e-11); // analytic 3.142857...
    assert!((cells[4] - cells[2]).abs() <= 3.0 * cells[5]); // MC within 3σ
}

#[test]
fn identical_config_and_seed_give_identical_bytes() {
    let args = [
        "waiting-time",
        "--n",
        "4",
        "--p0",
        "0.3",
        "--trials",
        "50000",
        "--seed",
        "99",
    ];
    let a = qmux_sim(&args);
    let b = qmux_sim(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let sim_args = ["simulate", "--n-pairs", "2", "--L-max", "25", "--seed", "5"];
    let a = qmux_sim(&sim_args);
    let b = qmux_sim(&sim_args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_file_with_flag_override() {
    let dir = std::env::temp_dir().join(format!("qmux-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg_path = dir.join("sweep.cfg");
    std::fs::write(
        &cfg_path,
        "# fidelity sweep at short range\nL_max = 10\nT2 = 1e-3\n",
    )
    .unwrap();

    // file value applies
    let out = qmux_sim(&["fidelity-vs-distance", "--config", cfg_path.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 12); // header + 0..=10

    // flag overrides the file
    let out = qmux_sim(&[
        "fidelity-vs-distance",
        "--config",
        cfg_path.to_str().unwrap(),
        "--L-max",
        "5",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 7);

    // print-config echoes the resolved values
    let out = qmux_sim(&[
        "fidelity-vs-distance",
        "--config",
        cfg_path.to_str().unwrap(),
        "--T2",
        "2e-3",
        "--print-config",
    ]);
    assert!(out.status.success());
    let echo = stdout(&out);
    assert!(echo.contains("T2 = 0.002"), "{echo}");
    assert!(echo.contains("L_max = 10"), "{echo}");

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn config_errors_name_the_key_and_exit_2() {
    let out = qmux_sim(&["ratio-purification", "--L-step", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty(), "no partial CSV on failure");
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("L_step"), "{err}");

    let dir = std::env::temp_dir().join(format!("qmux-cli-badcfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg_path = dir.join("bad.cfg");
    std::fs::write(&cfg_path, "no_such_key = 1\n").unwrap();
    let out = qmux_sim(&["fidelity-vs-distance", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("no_such_key"), "{err}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn simulate_traces_have_bounded_probabilities() {
    for proto in ["qmux-entangle", "three-qubit"] {
        let out = qmux_sim(&[
            "simulate",
            "--protocol",
            proto,
            "--L-max",
            "50",
            "--seed",
            "11",
        ]);
        assert!(out.status.success());
        let body = stdout(&out);
        assert!(body.lines().next().unwrap().starts_with("# simulate"));
        let mut saw_probability = false;
        for line in body.lines() {
            if let Some(idx) = line.find("p=") {
                let value: f64 = line[idx + 2..]
                    .split_whitespace()
                    .next()
                    .unwrap()
                    .parse()
                    .unwrap();
                assert!((0.0..=1.0).contains(&value), "{line}");
                saw_probability = true;
            }
        }
        assert!(saw_probability);
        // steps appear in execution order: init first, transmit before any
        // measurement
        let init = body.lines().position(|l| l.starts_with("init")).unwrap();
        let transmit = body.lines().position(|l| l.starts_with("transmit")).unwrap();
        assert!(init < transmit);
        if let Some(measure) = body.lines().position(|l| l.starts_with("measure")) {
            assert!(transmit < measure);
        }
    }
}

#[test]
fn output_file_writing() {
    let dir = std::env::temp_dir().join(format!("qmux-cli-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("table.csv");
    let out = qmux_sim(&[
        "fidelity-vs-distance",
        "--L-max",
        "3",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let body = std::fs::read_to_string(&path).unwrap();
    assert_csv_shape(&body, 3);
    std::fs::remove_dir_all(&dir).ok();
}
