//! Normalized-rate formulas and protocol rate ratios.
//!
//! Inverse rates are handled as dimensionless brackets multiplying `L/c`, so
//! ratios stay exact down to `L = 0` where the rates themselves diverge.
//! Both protocols share one acceptance-probability chain (seeded at the
//! one-way-window pair fidelity, no inter-round dephasing), which is what
//! makes the k = 1 ratio collapse to the closed form
//! `(3/2 + P0/2)(4P0+2)/(3P0+1)`.

use crate::analytics::{CostModel, RatePoint, ResourceCount, SweepTable};
use crate::error::{Error, Result};
use crate::noise::{self, PhysicalParams};
use crate::protocols::purification_chain;

/// Optical-switch treatment for the multiplexed rates. The default count is
/// `(3/2)N - 3` for N woven pairs; an override is available where a
/// different switch inventory is assumed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Switches {
    Perfect,
    Imperfect { count_override: Option<f64> },
}

impl Switches {
    fn adjust(&self, p0: f64, n_pairs: u32, p: &PhysicalParams) -> Result<f64> {
        match *self {
            Switches::Perfect => Ok(p0),
            Switches::Imperfect { count_override } => match count_override {
                Some(count) => noise::switch_adjusted_p0_with_count(p0, count, p.eta_os),
                None => noise::switch_adjusted_p0(p0, n_pairs, p.eta_os),
            },
        }
    }
}

/// Which error-correction pipeline a rate refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EcVariant {
    Qmux,
    Traditional,
}

/// `raw / (M·C_M + m·C_p)`.
pub fn normalized_rate(raw: f64, res: &ResourceCount, cost: &CostModel) -> Result<f64> {
    let denominator = res.matter_qubits as f64 * cost.c_m + res.photons * cost.c_p;
    if denominator <= 0.0 {
        return Err(Error::InvalidParameter(
            "cost-weighted resource count must be positive".into(),
        ));
    }
    Ok(raw / denominator)
}

/// Multiplexed-protocol resources after k rounds: `2^k + 1` memories, `1/P0`
/// photons.
pub fn qmux_resources(k: u32, p0_eff: f64) -> ResourceCount {
    ResourceCount {
        matter_qubits: (1u32 << k) + 1,
        photons: 1.0 / p0_eff,
    }
}

/// Conventional-protocol resources after k rounds: `2^{k+1}` memories,
/// `2^k/P0` photons.
pub fn deutsch_resources(k: u32, p0: f64) -> ResourceCount {
    ResourceCount {
        matter_qubits: 1u32 << (k + 1),
        photons: (1u64 << k) as f64 / p0,
    }
}

/// Pair fidelity over the one-way window, seeding the purification chains.
fn seed_fidelity(p: &PhysicalParams) -> f64 {
    0.5 * (1.0 + (-p.l / (p.c * p.t2)).exp())
}

/// Acceptance probabilities of rounds `1..=k` (empty for k = 0).
fn pd_chain(k: u32, p: &PhysicalParams) -> Result<Vec<f64>> {
    if k == 0 {
        return Ok(Vec::new());
    }
    Ok(purification_chain(k, seed_fidelity(p), 1.0)?
        .into_iter()
        .map(|(_, pd)| pd)
        .collect())
}

/// Inverse multiplexed rate divided by `L/c`: one heralded round carries the
/// whole protocol, so a single term `2/(P0 ∏ P_D)`.
fn qmux_inv_bracket(p0_eff: f64, pds: &[f64]) -> f64 {
    let product: f64 = pds.iter().product();
    2.0 / (p0_eff * product)
}

/// Inverse conventional rate divided by `L/c`: the entangling term carries
/// the two-pair waiting factor `(3/2)^k`, and every purification round adds
/// a one-way acknowledgment term with one fewer `3/2` and the later-round
/// acceptance factors stripped.
fn deutsch_inv_bracket(k: u32, p0: f64, pds: &[f64]) -> f64 {
    let full_product: f64 = pds.iter().product();
    let mut bracket = 1.5f64.powi(k as i32) * 2.0 / (p0 * full_product);
    for j in 1..=k {
        let partial: f64 = pds[..(k - j + 1) as usize].iter().product();
        bracket += 1.5f64.powi((k - j) as i32) / partial;
    }
    bracket
}

fn finite_rate(l: f64, c: f64, bracket: f64) -> f64 {
    if l == 0.0 {
        f64::INFINITY
    } else {
        c / (l * bracket)
    }
}

/// Rate of the multiplexed protocol with k built-in purification rounds.
pub fn raw_rate_qmux(
    k: u32,
    p: &PhysicalParams,
    cost: &CostModel,
    switches: Switches,
) -> Result<RatePoint> {
    p.validate()?;
    let p0 = noise::transmission_prob(p);
    let p0_eff = switches.adjust(p0, 1 << k, p)?;
    let pds = pd_chain(k, p)?;
    let raw = finite_rate(p.l, p.c, qmux_inv_bracket(p0_eff, &pds));
    let res = qmux_resources(k, p0_eff);
    let normalized = normalized_rate(raw, &res, cost)?;
    let mut aux = vec![("P0".to_string(), p0), ("P0_eff".to_string(), p0_eff)];
    for (i, pd) in pds.iter().enumerate() {
        aux.push((format!("PD_{}", i + 1), *pd));
    }
    Ok(RatePoint {
        l_km: p.l,
        raw_rate: raw,
        normalized_rate: normalized,
        aux,
    })
}

/// Rate of the conventionally fed Deutsch protocol with k rounds (k ≥ 1).
pub fn raw_rate_deutsch(k: u32, p: &PhysicalParams, cost: &CostModel) -> Result<RatePoint> {
    p.validate()?;
    if k < 1 {
        return Err(Error::InvalidParameter(
            "the conventional pipeline is defined for k >= 1 purification rounds".into(),
        ));
    }
    let p0 = noise::transmission_prob(p);
    let pds = pd_chain(k, p)?;
    let raw = finite_rate(p.l, p.c, deutsch_inv_bracket(k, p0, &pds));
    let res = deutsch_resources(k, p0);
    let normalized = normalized_rate(raw, &res, cost)?;
    let mut aux = vec![("P0".to_string(), p0)];
    for (i, pd) in pds.iter().enumerate() {
        aux.push((format!("PD_{}", i + 1), *pd));
    }
    Ok(RatePoint {
        l_km: p.l,
        raw_rate: raw,
        normalized_rate: normalized,
        aux,
    })
}

/// Raw-rate ratio multiplexed/conventional for k rounds (exact at L = 0).
pub fn ratio_purification_raw(k: u32, p: &PhysicalParams, switches: Switches) -> Result<f64> {
    p.validate()?;
    if k < 1 {
        return Err(Error::InvalidParameter("ratio needs k >= 1".into()));
    }
    let p0 = noise::transmission_prob(p);
    let p0_eff = switches.adjust(p0, 1 << k, p)?;
    let pds = pd_chain(k, p)?;
    Ok(deutsch_inv_bracket(k, p0, &pds) / qmux_inv_bracket(p0_eff, &pds))
}

/// Normalized-rate ratio multiplexed/conventional for k rounds.
pub fn ratio_purification(
    k: u32,
    p: &PhysicalParams,
    cost: &CostModel,
    switches: Switches,
) -> Result<f64> {
    let raw_ratio = ratio_purification_raw(k, p, switches)?;
    let p0 = noise::transmission_prob(p);
    let p0_eff = switches.adjust(p0, 1 << k, p)?;
    let q = qmux_resources(k, p0_eff);
    let d = deutsch_resources(k, p0);
    let resource_ratio = (d.matter_qubits as f64 * cost.c_m + d.photons * cost.c_p)
        / (q.matter_qubits as f64 * cost.c_m + q.photons * cost.c_p);
    Ok(raw_ratio * resource_ratio)
}

/// Inverse single-node-repeater rate divided by `L/c`: two half-distance
/// links purified once, then swapped with success probability `P_ES`.
fn qr_inv_bracket(p: &PhysicalParams) -> f64 {
    let sqrt_p0 = (-(p.l / 2.0) / p.l_att).exp();
    let f_half = 0.5 * (1.0 + (-(p.l / 2.0) / (p.c * p.t2)).exp());
    let pd = f_half * f_half + (1.0 - f_half) * (1.0 - f_half);
    2.25 / (sqrt_p0 * pd * p.p_es) + 0.75 / (pd * p.p_es) + 0.5 / p.p_es
}

/// Rate of a single-node repeater whose half-distance links are purified
/// once before the swap. Resources: 8 memories, `4/√P0` photons.
pub fn rate_single_node_qr(p: &PhysicalParams, cost: &CostModel) -> Result<RatePoint> {
    p.validate()?;
    let sqrt_p0 = (-(p.l / 2.0) / p.l_att).exp();
    let raw = finite_rate(p.l, p.c, qr_inv_bracket(p));
    let res = ResourceCount {
        matter_qubits: 8,
        photons: 4.0 / sqrt_p0,
    };
    let normalized = normalized_rate(raw, &res, cost)?;
    Ok(RatePoint {
        l_km: p.l,
        raw_rate: raw,
        normalized_rate: normalized,
        aux: vec![("sqrt_P0".to_string(), sqrt_p0)],
    })
}

/// (normalized, raw) rate ratios of the three-memory multiplexed protocol
/// against the single-node repeater, exact at L = 0.
pub fn ratio_repeater(p: &PhysicalParams, cost: &CostModel) -> Result<(f64, f64)> {
    p.validate()?;
    let p0 = noise::transmission_prob(p);
    let pds = pd_chain(1, p)?;
    let qmux_bracket = qmux_inv_bracket(p0, &pds);
    let qr_bracket = qr_inv_bracket(p);
    let raw_ratio = qr_bracket / qmux_bracket;

    let sqrt_p0 = (-(p.l / 2.0) / p.l_att).exp();
    let q = qmux_resources(1, p0);
    let qr_denominator = 8.0 * cost.c_m + 4.0 * cost.c_p / sqrt_p0;
    let q_denominator = q.matter_qubits as f64 * cost.c_m + q.photons * cost.c_p;
    Ok((raw_ratio * qr_denominator / q_denominator, raw_ratio))
}

/// Rate of a three-pair error-correction round. Multiplexed variant: one
/// heralded transmission, 4 memories, `1/P0` photons. Conventional variant:
/// the `1.7/P0` three-link waiting factor, 6 memories, `3/P0` photons.
pub fn rate_ec(
    variant: EcVariant,
    p: &PhysicalParams,
    cost: &CostModel,
    switches: Switches,
) -> Result<RatePoint> {
    p.validate()?;
    let p0 = noise::transmission_prob(p);
    let (bracket, res) = match variant {
        EcVariant::Qmux => {
            let p0_eff = switches.adjust(p0, 3, p)?;
            (
                2.0 / p0_eff,
                ResourceCount {
                    matter_qubits: 4,
                    photons: 1.0 / p0_eff,
                },
            )
        }
        EcVariant::Traditional => (
            1.7 * 2.0 / p0,
            ResourceCount {
                matter_qubits: 6,
                photons: 3.0 / p0,
            },
        ),
    };
    let raw = finite_rate(p.l, p.c, bracket);
    let normalized = normalized_rate(raw, &res, cost)?;
    Ok(RatePoint {
        l_km: p.l,
        raw_rate: raw,
        normalized_rate: normalized,
        aux: vec![("P0".to_string(), p0)],
    })
}

/// (normalized, raw) error-correction rate ratios multiplexed/conventional,
/// exact at L = 0. With perfect switches the raw ratio is the constant 1.7.
pub fn ratio_ec(p: &PhysicalParams, cost: &CostModel, switches: Switches) -> Result<(f64, f64)> {
    p.validate()?;
    let p0 = noise::transmission_prob(p);
    let p0_eff = switches.adjust(p0, 3, p)?;
    let raw_ratio = 1.7 * p0_eff / p0;
    let normalized = raw_ratio * (6.0 * cost.c_m + 3.0 * cost.c_p / p0)
        / (4.0 * cost.c_m + cost.c_p / p0_eff);
    Ok((normalized, raw_ratio))
}

/// Normalized k = 1 ratio versus the cost weight ratio `C_M/C_p` at the
/// fixed distance in `p`. Monotone decreasing in `C_M/C_p`.
pub fn cost_sweep(p: &PhysicalParams, ratio_grid: &[f64]) -> Result<SweepTable> {
    p.validate()?;
    if ratio_grid.iter().any(|g| *g <= 0.0) {
        return Err(Error::InvalidParameter(
            "cost ratio grid values must be positive".into(),
        ));
    }
    let mut table = SweepTable::new(vec![
        "cm_over_cp".to_string(),
        "ratio_normalized".to_string(),
    ]);
    for &g in ratio_grid {
        let cost = CostModel::new(g, 1.0)?;
        let ratio = ratio_purification(1, p, &cost, Switches::Perfect)?;
        table.push_row(vec![g, ratio])?;
    }
    Ok(table)
}
