//! `qmux-sim`: CSV sweep and protocol-trace runner.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 numerical
//! invariant violation.

mod config;
mod experiments;

use std::fs;
use std::io::Write;

use clap::Parser;

use config::{Experiment, ExperimentConfig, SimProtocol, SwitchMode};
use experiments::{run_experiment, CliError};

#[derive(Parser, Debug)]
#[command(
    name = "qmux-sim",
    about = "Entanglement distribution sweeps: fidelities, normalized rate ratios, waiting times, protocol traces",
    version
)]
struct Cli {
    /// Experiment to run.
    #[arg(value_enum)]
    experiment: Experiment,

    /// Plain-text config file (`key = value`, `#` comments). Flags override
    /// file values.
    #[arg(long = "config")]
    config: Option<std::path::PathBuf>,

    #[arg(long = "L-min")]
    l_min: Option<f64>,
    #[arg(long = "L-max")]
    l_max: Option<f64>,
    #[arg(long = "L-step")]
    l_step: Option<f64>,
    /// Fixed distance (km) for experiments that do not sweep L.
    #[arg(long = "L")]
    l_fixed: Option<f64>,
    /// Purification rounds.
    #[arg(long = "k")]
    k: Option<u32>,
    #[arg(long = "n-pairs")]
    n_pairs: Option<u32>,
    /// Memory coherence time (s).
    #[arg(long = "T2")]
    t2: Option<f64>,
    /// Signal speed in fiber (km/s).
    #[arg(long = "c")]
    c: Option<f64>,
    /// Attenuation length (km).
    #[arg(long = "L-att")]
    l_att: Option<f64>,
    /// Optical switch transmission.
    #[arg(long = "eta-os")]
    eta_os: Option<f64>,
    /// Entanglement-swapping success probability.
    #[arg(long = "P-es")]
    p_es: Option<f64>,
    /// Memory cost weight.
    #[arg(long = "C-M")]
    c_m: Option<f64>,
    /// Photon cost weight.
    #[arg(long = "C-p")]
    c_p: Option<f64>,
    #[arg(long = "switches", value_enum)]
    switches: Option<SwitchMode>,
    /// Override the optical-switch count (default (3/2)N - 3).
    #[arg(long = "switch-count")]
    switch_count: Option<f64>,
    #[arg(long = "trials")]
    trials: Option<u64>,
    #[arg(long = "seed")]
    seed: Option<u64>,
    /// Parallel links for waiting-time.
    #[arg(long = "n")]
    n_links: Option<u32>,
    /// Per-attempt success probability for waiting-time (default: the
    /// transmission probability at L-max).
    #[arg(long = "p0")]
    p0: Option<f64>,
    /// Protocol for the simulate experiment.
    #[arg(long = "protocol", value_enum)]
    protocol: Option<SimProtocol>,
    /// Output path (stdout when omitted).
    #[arg(long = "output")]
    output: Option<std::path::PathBuf>,

    /// Echo the fully resolved configuration and exit.
    #[arg(long = "print-config")]
    print_config: bool,
}

fn resolve(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::defaults(cli.experiment);
    if let Some(path) = &cli.config {
        let body = fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        cfg.apply_file(&body).map_err(CliError::Config)?;
    }
    macro_rules! set {
        ($field:ident) => {
            if let Some(v) = &cli.$field {
                cfg.$field = v.clone();
            }
        };
    }
    set!(l_min);
    set!(l_max);
    set!(l_step);
    set!(l_fixed);
    set!(k);
    set!(n_pairs);
    set!(t2);
    set!(c);
    set!(l_att);
    set!(eta_os);
    set!(p_es);
    set!(c_m);
    set!(c_p);
    set!(switches);
    set!(trials);
    set!(seed);
    set!(n_links);
    set!(protocol);
    if cli.switch_count.is_some() {
        cfg.switch_count = cli.switch_count;
    }
    if cli.p0.is_some() {
        cfg.p0 = cli.p0;
    }
    if cli.output.is_some() {
        cfg.output = cli.output.clone();
    }
    cfg.validate().map_err(CliError::Config)?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = resolve(cli)?;
    if cli.print_config {
        print!("{}", cfg.canonical());
        return Ok(());
    }
    let document = run_experiment(&cfg)?;
    match &cfg.output {
        Some(path) => fs::write(path, document)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(document.as_bytes())
                .map_err(|e| CliError::Io(e.to_string()))?;
        }
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("qmux-sim: {}", e.message());
        std::process::exit(e.exit_code());
    }
}
