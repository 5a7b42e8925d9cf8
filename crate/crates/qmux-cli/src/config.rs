//! Experiment configuration: defaults, `key = value` config files, and flag
//! overrides, resolved in that order.

use std::fmt;
use std::path::PathBuf;

use qmux_core::analytics::Switches;
use qmux_core::PhysicalParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Experiment {
    FidelityVsDistance,
    RatioPurification,
    RatioRepeater,
    RatioEc,
    CostSweep,
    WaitingTime,
    Simulate,
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Experiment::FidelityVsDistance => "fidelity-vs-distance",
            Experiment::RatioPurification => "ratio-purification",
            Experiment::RatioRepeater => "ratio-repeater",
            Experiment::RatioEc => "ratio-ec",
            Experiment::CostSweep => "cost-sweep",
            Experiment::WaitingTime => "waiting-time",
            Experiment::Simulate => "simulate",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SwitchMode {
    Perfect,
    Imperfect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SimProtocol {
    QmuxEntangle,
    ThreeQubit,
}

impl fmt::Display for SimProtocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SimProtocol::QmuxEntangle => "qmux-entangle",
            SimProtocol::ThreeQubit => "three-qubit",
        })
    }
}

/// Fully resolved experiment configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub l_min: f64,
    pub l_max: f64,
    pub l_step: f64,
    /// Fixed distance for the experiments that do not sweep L (cost-sweep).
    pub l_fixed: f64,
    pub k: u32,
    pub n_pairs: u32,
    pub l_att: f64,
    pub c: f64,
    pub t2: f64,
    pub eta_os: f64,
    pub p_es: f64,
    pub c_m: f64,
    pub c_p: f64,
    pub switches: SwitchMode,
    pub switch_count: Option<f64>,
    pub trials: u64,
    pub seed: u64,
    /// Parallel links for the waiting-time experiment.
    pub n_links: u32,
    /// Per-attempt success probability for waiting-time; defaults to the
    /// transmission probability at `l_max`.
    pub p0: Option<f64>,
    pub protocol: SimProtocol,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        Self {
            experiment,
            l_min: 0.0,
            l_max: 70.0,
            l_step: 1.0,
            l_fixed: 30.0,
            k: 1,
            n_pairs: 2,
            l_att: 25.0,
            c: 2.0e5,
            t2: 1.0e-3,
            eta_os: 0.99,
            p_es: 0.9,
            c_m: 1.0,
            c_p: 1.0,
            switches: SwitchMode::Perfect,
            switch_count: None,
            trials: 100_000,
            seed: 1,
            n_links: 3,
            p0: None,
            protocol: SimProtocol::QmuxEntangle,
            output: None,
        }
    }

    pub fn physical_params(&self, l: f64) -> PhysicalParams {
        PhysicalParams {
            l,
            l_att: self.l_att,
            c: self.c,
            t2: self.t2,
            eta_os: self.eta_os,
            p_es: self.p_es,
        }
    }

    pub fn switches(&self) -> Switches {
        match self.switches {
            SwitchMode::Perfect => Switches::Perfect,
            SwitchMode::Imperfect => Switches::Imperfect {
                count_override: self.switch_count,
            },
        }
    }

    pub fn effective_p0(&self) -> f64 {
        self.p0
            .unwrap_or_else(|| (-self.l_max / self.l_att).exp())
    }

    /// Distance grid `l_min..=l_max` in steps of `l_step`.
    pub fn l_grid(&self) -> Vec<f64> {
        let mut grid = Vec::new();
        let mut i = 0u64;
        loop {
            let l = self.l_min + i as f64 * self.l_step;
            if l > self.l_max + 1e-9 {
                break;
            }
            grid.push(l.min(self.l_max));
            i += 1;
        }
        grid
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.l_min < 0.0 {
            return Err("L_min must be >= 0".into());
        }
        if self.l_min > self.l_max {
            return Err("L_min must be <= L_max".into());
        }
        if !self.l_step.is_finite() || self.l_step <= 0.0 {
            return Err("L_step must be > 0".into());
        }
        if self.l_fixed < 0.0 {
            return Err("L must be >= 0".into());
        }
        if !self.l_att.is_finite() || self.l_att <= 0.0 {
            return Err("L_att must be > 0".into());
        }
        if !self.c.is_finite() || self.c <= 0.0 {
            return Err("c must be > 0".into());
        }
        if !self.t2.is_finite() || self.t2 <= 0.0 {
            return Err("T2 must be > 0".into());
        }
        if self.eta_os <= 0.0 || self.eta_os > 1.0 {
            return Err("eta_OS must be in (0, 1]".into());
        }
        if self.p_es <= 0.0 || self.p_es > 1.0 {
            return Err("P_ES must be in (0, 1]".into());
        }
        if self.c_m < 0.0 || self.c_p < 0.0 || (self.c_m == 0.0 && self.c_p == 0.0) {
            return Err("C_M and C_p must be nonnegative and not both zero".into());
        }
        if let Some(count) = self.switch_count {
            if count < 0.0 {
                return Err("switch_count must be >= 0".into());
            }
        }
        if matches!(
            self.experiment,
            Experiment::WaitingTime | Experiment::Simulate
        ) && self.trials < 1
        {
            return Err("trials must be >= 1".into());
        }
        if self.n_pairs < 1 {
            return Err("n_pairs must be >= 1".into());
        }
        if self.n_links < 1 {
            return Err("n must be >= 1".into());
        }
        if let Some(p0) = self.p0 {
            if p0 <= 0.0 || p0 > 1.0 {
                return Err("p0 must be in (0, 1]".into());
            }
        }
        Ok(())
    }

    /// Apply one `key = value` assignment from a config file.
    pub fn apply_key(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
            value
                .parse::<T>()
                .map_err(|_| format!("config key {key}: cannot parse value {value:?}"))
        }
        match key {
            "L_min" => self.l_min = num(key, value)?,
            "L_max" => self.l_max = num(key, value)?,
            "L_step" => self.l_step = num(key, value)?,
            "L" => self.l_fixed = num(key, value)?,
            "k" => self.k = num(key, value)?,
            "n_pairs" => self.n_pairs = num(key, value)?,
            "L_att" => self.l_att = num(key, value)?,
            "c" => self.c = num(key, value)?,
            "T2" => self.t2 = num(key, value)?,
            "eta_OS" => self.eta_os = num(key, value)?,
            "P_ES" => self.p_es = num(key, value)?,
            "C_M" => self.c_m = num(key, value)?,
            "C_p" => self.c_p = num(key, value)?,
            "switches" => {
                self.switches = match value {
                    "perfect" => SwitchMode::Perfect,
                    "imperfect" => SwitchMode::Imperfect,
                    other => {
                        return Err(format!(
                            "config key switches: expected perfect|imperfect, got {other:?}"
                        ))
                    }
                }
            }
            "switch_count" => self.switch_count = Some(num(key, value)?),
            "trials" => self.trials = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "n" => self.n_links = num(key, value)?,
            "p0" => self.p0 = Some(num(key, value)?),
            "protocol" => {
                self.protocol = match value {
                    "qmux-entangle" => SimProtocol::QmuxEntangle,
                    "three-qubit" => SimProtocol::ThreeQubit,
                    other => {
                        return Err(format!(
                            "config key protocol: expected qmux-entangle|three-qubit, got {other:?}"
                        ))
                    }
                }
            }
            "output" => self.output = Some(PathBuf::from(value)),
            other => return Err(format!("unknown config key {other:?}")),
        }
        Ok(())
    }

    /// Parse a UTF-8 `key = value` config file body (`#` starts a comment).
    pub fn apply_file(&mut self, body: &str) -> Result<(), String> {
        for (lineno, raw) in body.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(format!(
                    "config line {}: expected key = value, got {raw:?}",
                    lineno + 1
                ));
            };
            self.apply_key(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Canonical `key = value` rendering of the resolved configuration.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        kv("experiment", self.experiment.to_string());
        kv("L_min", format!("{}", self.l_min));
        kv("L_max", format!("{}", self.l_max));
        kv("L_step", format!("{}", self.l_step));
        kv("L", format!("{}", self.l_fixed));
        kv("k", format!("{}", self.k));
        kv("n_pairs", format!("{}", self.n_pairs));
        kv("L_att", format!("{}", self.l_att));
        kv("c", format!("{}", self.c));
        kv("T2", format!("{}", self.t2));
        kv("eta_OS", format!("{}", self.eta_os));
        kv("P_ES", format!("{}", self.p_es));
        kv("C_M", format!("{}", self.c_m));
        kv("C_p", format!("{}", self.c_p));
        kv(
            "switches",
            match self.switches {
                SwitchMode::Perfect => "perfect".into(),
                SwitchMode::Imperfect => "imperfect".into(),
            },
        );
        if let Some(count) = self.switch_count {
            kv("switch_count", format!("{count}"));
        }
        kv("trials", format!("{}", self.trials));
        kv("seed", format!("{}", self.seed));
        kv("n", format!("{}", self.n_links));
        if let Some(p0) = self.p0 {
            kv("p0", format!("{p0}"));
        }
        kv("protocol", self.protocol.to_string());
        if let Some(path) = &self.output {
            kv("output", path.display().to_string());
        }
        out
    }
}
