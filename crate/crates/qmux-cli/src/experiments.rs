//! Experiment implementations: each returns the complete output document
//! (CSV or trace text) so nothing partial is ever written.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use qmux_core::analytics::{
    cost_sweep, expected_attempts_n, monte_carlo_attempts, ratio_ec, ratio_purification,
    ratio_purification_raw, ratio_repeater, CostModel, SweepTable,
};
use qmux_core::format::fmt_sig;
use qmux_core::protocols::{
    qmux_deutsch_fidelity, run_qmux_entangle, run_three_qubit_qmux, trad_deutsch_fidelity,
    EntangleNoise, ThreeQubitNoise, TraceStep,
};
use qmux_core::{noise, Error};

use crate::config::{Experiment, ExperimentConfig, SimProtocol};

/// CLI failure modes, ordered by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Exit 2: bad configuration.
    Config(String),
    /// Exit 3: a physics invariant failed during evaluation.
    Numerical(String),
    /// Exit 1: I/O failure.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Numerical(m) | CliError::Io(m) => m,
        }
    }
}

fn core_error(e: Error) -> CliError {
    match e {
        Error::InvariantViolation(m) => CliError::Numerical(m),
        other => CliError::Config(other.to_string()),
    }
}

fn check_unit_interval(name: &str, value: f64, l: f64) -> Result<(), CliError> {
    if !(value.is_finite() && (-1e-12..=1.0 + 1e-12).contains(&value)) {
        return Err(CliError::Numerical(format!(
            "{name} = {value} out of [0, 1] at L = {l} km"
        )));
    }
    Ok(())
}

fn check_positive(name: &str, value: f64, l: f64) -> Result<(), CliError> {
    if !(value.is_finite() && value > 0.0) {
        return Err(CliError::Numerical(format!(
            "{name} = {value} not positive and finite at L = {l} km"
        )));
    }
    Ok(())
}

/// Run one experiment to completion and return its output document.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<String, CliError> {
    cfg.validate().map_err(CliError::Config)?;
    match cfg.experiment {
        Experiment::FidelityVsDistance => fidelity_vs_distance(cfg),
        Experiment::RatioPurification => ratio_purification_sweep(cfg),
        Experiment::RatioRepeater => ratio_repeater_sweep(cfg),
        Experiment::RatioEc => ratio_ec_sweep(cfg),
        Experiment::CostSweep => cost_sweep_table(cfg),
        Experiment::WaitingTime => waiting_time(cfg),
        Experiment::Simulate => simulate(cfg),
    }
}

fn fidelity_vs_distance(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let rows: Result<Vec<Vec<f64>>, CliError> = cfg
        .l_grid()
        .par_iter()
        .map(|&l| {
            let p = cfg.physical_params(l);
            let qmx = qmux_deutsch_fidelity(&p).map_err(core_error)?.out_fidelity;
            let trad = trad_deutsch_fidelity(&p).map_err(core_error)?.out_fidelity;
            check_unit_interval("F_qmx_dph", qmx, l)?;
            check_unit_interval("F_trad_dph", trad, l)?;
            Ok(vec![l, qmx, trad])
        })
        .collect();
    let mut table = SweepTable::new(vec![
        "L_km".into(),
        "F_qmx_dph".into(),
        "F_trad_dph".into(),
    ]);
    for row in rows? {
        table.push_row(row).map_err(core_error)?;
    }
    Ok(table.to_csv())
}

fn ratio_purification_sweep(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let cost = CostModel::new(cfg.c_m, cfg.c_p).map_err(core_error)?;
    let switches = cfg.switches();
    let rows: Result<Vec<Vec<f64>>, CliError> = cfg
        .l_grid()
        .par_iter()
        .map(|&l| {
            let p = cfg.physical_params(l);
            let raw = ratio_purification_raw(cfg.k, &p, switches).map_err(core_error)?;
            let normalized =
                ratio_purification(cfg.k, &p, &cost, switches).map_err(core_error)?;
            check_positive("ratio_raw", raw, l)?;
            check_positive("ratio_normalized", normalized, l)?;
            Ok(vec![l, noise::transmission_prob(&p), raw, normalized])
        })
        .collect();
    let mut table = SweepTable::new(vec![
        "L_km".into(),
        "P0".into(),
        "ratio_raw".into(),
        "ratio_normalized".into(),
    ]);
    for row in rows? {
        table.push_row(row).map_err(core_error)?;
    }
    Ok(table.to_csv())
}

fn ratio_repeater_sweep(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let cost = CostModel::new(cfg.c_m, cfg.c_p).map_err(core_error)?;
    let rows: Result<Vec<Vec<f64>>, CliError> = cfg
        .l_grid()
        .par_iter()
        .map(|&l| {
            let p = cfg.physical_params(l);
            let (normalized, raw) = ratio_repeater(&p, &cost).map_err(core_error)?;
            check_positive("ratio_raw", raw, l)?;
            check_positive("ratio_normalized", normalized, l)?;
            Ok(vec![l, raw, normalized])
        })
        .collect();
    let mut table = SweepTable::new(vec![
        "L_km".into(),
        "ratio_raw".into(),
        "ratio_normalized".into(),
    ]);
    for row in rows? {
        table.push_row(row).map_err(core_error)?;
    }
    Ok(table.to_csv())
}

fn ratio_ec_sweep(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let cost = CostModel::new(cfg.c_m, cfg.c_p).map_err(core_error)?;
    let switches = cfg.switches();
    let rows: Result<Vec<Vec<f64>>, CliError> = cfg
        .l_grid()
        .par_iter()
        .map(|&l| {
            let p = cfg.physical_params(l);
            let (normalized, raw) = ratio_ec(&p, &cost, switches).map_err(core_error)?;
            check_positive("ratio_raw", raw, l)?;
            check_positive("ratio_normalized", normalized, l)?;
            Ok(vec![l, noise::transmission_prob(&p), raw, normalized])
        })
        .collect();
    let mut table = SweepTable::new(vec![
        "L_km".into(),
        "P0".into(),
        "ratio_raw".into(),
        "ratio_normalized".into(),
    ]);
    for row in rows? {
        table.push_row(row).map_err(core_error)?;
    }
    Ok(table.to_csv())
}

fn cost_sweep_table(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let p = cfg.physical_params(cfg.l_fixed);
    // 41 log-spaced points over two decades around C_M = C_p
    let grid: Vec<f64> = (0..=40)
        .map(|i| 10f64.powf(-1.0 + i as f64 * 0.05))
        .collect();
    let table = cost_sweep(&p, &grid).map_err(core_error)?;
    for row in table.rows() {
        check_positive("ratio_normalized", row[1], cfg.l_fixed)?;
    }
    Ok(table.to_csv())
}

fn waiting_time(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let p0 = cfg.effective_p0();
    let mut table = SweepTable::new(vec![
        "N".into(),
        "P0".into(),
        "expected_attempts".into(),
        "p0_times_mean".into(),
        "mc_mean".into(),
        "mc_std_error".into(),
    ]);
    for n in 1..=cfg.n_links {
        let expected = expected_attempts_n(n, p0).map_err(core_error)?;
        let (mc_mean, mc_se) =
            monte_carlo_attempts(n, p0, cfg.trials, cfg.seed ^ u64::from(n)).map_err(core_error)?;
        check_positive("expected_attempts", expected, 0.0)?;
        table
            .push_row(vec![n as f64, p0, expected, p0 * expected, mc_mean, mc_se])
            .map_err(core_error)?;
    }
    Ok(table.to_csv())
}

fn simulate(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let p = cfg.physical_params(cfg.l_max);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = String::new();
    let push_steps = |steps: &[TraceStep], out: &mut String| -> Result<(), CliError> {
        for step in steps {
            if let Some(pr) = step.probability {
                if !(-1e-12..=1.0 + 1e-12).contains(&pr) {
                    return Err(CliError::Numerical(format!(
                        "trace step {} lists probability {pr}",
                        step.step
                    )));
                }
            }
            out.push_str(&step.render());
            out.push('\n');
        }
        Ok(())
    };
    match cfg.protocol {
        SimProtocol::QmuxEntangle => {
            let run = run_qmux_entangle(cfg.n_pairs, &p, EntangleNoise::Loss, &mut rng)
                .map_err(core_error)?;
            run.state.validate().map_err(core_error)?;
            out.push_str(&format!(
                "# simulate qmux-entangle n_pairs={} L={} km seed={}\n",
                cfg.n_pairs, p.l, cfg.seed
            ));
            push_steps(&run.steps, &mut out)?;
            out.push_str(&format!(
                "# heralded={} herald_probability={} elapsed_s={}\n",
                run.success,
                fmt_sig(run.herald_probability, 12),
                fmt_sig(run.elapsed, 12)
            ));
            let fids: Vec<String> = run
                .per_pair_fidelity
                .iter()
                .map(|f| fmt_sig(*f, 12))
                .collect();
            out.push_str(&format!("# per_pair_fidelity={}\n", fids.join(",")));
        }
        SimProtocol::ThreeQubit => {
            let run = run_three_qubit_qmux(&p, ThreeQubitNoise::Dephasing, &mut rng)
                .map_err(core_error)?;
            run.outcome.out_state.validate().map_err(core_error)?;
            out.push_str(&format!(
                "# simulate three-qubit L={} km seed={}\n",
                p.l, cfg.seed
            ));
            push_steps(&run.steps, &mut out)?;
            out.push_str(&format!(
                "# attempts={} p_success={} out_fidelity={}\n",
                run.attempts,
                fmt_sig(run.outcome.p_success, 12),
                fmt_sig(run.outcome.out_fidelity, 12)
            ));
        }
    }
    Ok(out)
}
