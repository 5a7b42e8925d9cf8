//! Interactive browser demo: three explorable views backed by the exact
//! analytics, exported through wasm-bindgen. The functions are plain Rust,
//! so the same API is unit-tested on the host.

use wasm_bindgen::prelude::*;

use qmux_core::analytics::{
    expected_attempts_n, max_n_pmf, ratio_purification, ratio_purification_raw, ratio_repeater,
    CostModel, Switches,
};
use qmux_core::protocols::{qmux_deutsch_fidelity, trad_deutsch_fidelity};
use qmux_core::PhysicalParams;

/// A shared x grid with one or more labeled series over it.
#[wasm_bindgen]
pub struct CurveSet {
    xs: Vec<f64>,
    labels: Vec<String>,
    series: Vec<Vec<f64>>,
}

#[wasm_bindgen]
impl CurveSet {
    pub fn xs(&self) -> Vec<f64> {
        self.xs.clone()
    }

    pub fn series_count(&self) -> usize {
        self.series.len()
    }

    pub fn label(&self, i: usize) -> String {
        self.labels[i].clone()
    }

    pub fn series(&self, i: usize) -> Vec<f64> {
        self.series[i].clone()
    }
}

fn params(l: f64, t2_ms: f64, l_att: f64) -> PhysicalParams {
    PhysicalParams {
        l,
        l_att,
        t2: t2_ms * 1e-3,
        ..PhysicalParams::default()
    }
}

fn grid(l_max: f64, points: u32) -> Vec<f64> {
    let n = points.max(2) as usize;
    (0..n).map(|i| l_max * i as f64 / (n - 1) as f64).collect()
}

/// Purified-pair fidelity after one round versus distance, for the
/// multiplexed and the conventional pipeline.
#[wasm_bindgen]
pub fn fidelity_curves(l_max_km: f64, t2_ms: f64, l_att_km: f64, points: u32) -> CurveSet {
    let xs = grid(l_max_km, points);
    let mut qmx = Vec::with_capacity(xs.len());
    let mut trad = Vec::with_capacity(xs.len());
    for &l in &xs {
        let p = params(l, t2_ms, l_att_km);
        qmx.push(
            qmux_deutsch_fidelity(&p)
                .map(|o| o.out_fidelity)
                .unwrap_or(f64::NAN),
        );
        trad.push(
            trad_deutsch_fidelity(&p)
                .map(|o| o.out_fidelity)
                .unwrap_or(f64::NAN),
        );
    }
    CurveSet {
        xs,
        labels: vec!["multiplexed".into(), "conventional".into()],
        series: vec![qmx, trad],
    }
}

/// Normalized-rate ratio (multiplexed over conventional) versus distance for
/// k purification rounds, with the raw-rate ratio alongside.
#[wasm_bindgen]
pub fn purification_ratio_curves(
    k: u32,
    cm_over_cp: f64,
    imperfect_switches: bool,
    l_max_km: f64,
    points: u32,
) -> CurveSet {
    let xs = grid(l_max_km, points);
    let cost = CostModel::new(cm_over_cp, 1.0).unwrap_or(CostModel::unit());
    let switches = if imperfect_switches {
        Switches::Imperfect {
            count_override: None,
        }
    } else {
        Switches::Perfect
    };
    let mut normalized = Vec::with_capacity(xs.len());
    let mut raw = Vec::with_capacity(xs.len());
    for &l in &xs {
        let p = PhysicalParams::default().with_l(l);
        normalized.push(ratio_purification(k, &p, &cost, switches).unwrap_or(f64::NAN));
        raw.push(ratio_purification_raw(k, &p, switches).unwrap_or(f64::NAN));
    }
    CurveSet {
        xs,
        labels: vec!["normalized".into(), "raw".into()],
        series: vec![normalized, raw],
    }
}

/// Normalized and raw rate ratio of the three-memory protocol against a
/// single-node repeater, versus distance.
#[wasm_bindgen]
pub fn repeater_ratio_curves(l_max_km: f64, points: u32) -> CurveSet {
    let xs = grid(l_max_km, points);
    let cost = CostModel::unit();
    let mut normalized = Vec::with_capacity(xs.len());
    let mut raw = Vec::with_capacity(xs.len());
    for &l in &xs {
        let p = PhysicalParams::default().with_l(l);
        match ratio_repeater(&p, &cost) {
            Ok((n, r)) => {
                normalized.push(n);
                raw.push(r);
            }
            Err(_) => {
                normalized.push(f64::NAN);
                raw.push(f64::NAN);
            }
        }
    }
    CurveSet {
        xs,
        labels: vec!["normalized".into(), "raw".into()],
        series: vec![normalized, raw],
    }
}

/// Distribution of the number of attempts until all `links` elementary links
/// are entangled (each succeeding with probability `p0` per attempt), over
/// `1..=n_max` attempts.
#[wasm_bindgen]
pub fn waiting_time_pmf(links: u32, p0: f64, n_max: u32) -> CurveSet {
    let horizon = u64::from(n_max.max(1));
    let xs: Vec<f64> = (1..=horizon).map(|n| n as f64).collect();
    let pmf: Vec<f64> = (1..=horizon)
        .map(|n| max_n_pmf(n, links, p0).unwrap_or(f64::NAN))
        .collect();
    CurveSet {
        xs,
        labels: vec![format!("P(attempts = n), N = {links}")],
        series: vec![pmf],
    }
}

/// Expected attempts until all `links` links are up.
#[wasm_bindgen]
pub fn waiting_time_mean(links: u32, p0: f64) -> f64 {
    expected_attempts_n(links, p0).unwrap_or(f64::NAN)
}
